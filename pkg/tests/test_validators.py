import numpy as np
import pytest
from core.validators import (RangeValidator, nonnegative_entries_validator,
                             probability_vector_validator, sigma_validator,
                             square_matrix_validator)
from django.core.exceptions import ValidationError

correct_sigmas = (1e-6, 0.01, 0.25, 0.4999)
invalid_sigmas = (0, 0.5, 0.7, -0.1, float('nan'), float('inf'))


@pytest.mark.validators
@pytest.mark.parametrize('sigma', correct_sigmas)
def test_sigma_correct(sigma):
    assert sigma_validator(sigma) is None


@pytest.mark.validators
@pytest.mark.parametrize('sigma', invalid_sigmas)
def test_sigma_invalid(sigma):
    with pytest.raises(ValidationError) as exc:
        sigma_validator(sigma)
    assert exc.value.code == 'INVALID_RANGE'


@pytest.mark.validators
def test_range_inclusive_bounds():
    validator = RangeValidator(low=0, high=1, low_inclusive=True)
    assert validator(0) is None
    assert validator(0.5) is None
    pytest.raises(ValidationError, validator, 1)
    pytest.raises(ValidationError, validator, -1e-12)


@pytest.mark.validators
@pytest.mark.parametrize('values, code', (
    (np.array([1.0, -0.5]), 'NEGATIVE_ENTRY'),
    (np.array([1.0, np.nan]), 'NON_FINITE_ENTRY'),
    (np.array([np.inf, 0.0]), 'NON_FINITE_ENTRY'),
))
def test_entries_invalid(values, code):
    with pytest.raises(ValidationError) as exc:
        nonnegative_entries_validator(values, 'L')
    assert exc.value.code == code


@pytest.mark.validators
def test_square_matrix():
    assert square_matrix_validator(np.zeros((3, 3)), 3, 'T') is None
    with pytest.raises(ValidationError) as exc:
        square_matrix_validator(np.zeros((3, 2)), 3, 'T')
    assert exc.value.code == 'DIMENSION_MISMATCH'


@pytest.mark.validators
def test_probability_vector():
    assert probability_vector_validator(np.full(4, 0.25), 'x') is None
    pytest.raises(
        ValidationError, probability_vector_validator, np.full(4, 0.3), 'x'
    )
