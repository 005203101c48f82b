"""Array programming, negative-coefficient elimination, and variation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from xbaropt import crossbar
from xbaropt.crossbar import (
    eliminate_negatives,
    program,
    program_signed,
    saddle_perturbation,
)
from xbaropt.errors import DimensionMismatch, InvalidRange, NegativeEntry, SingularMatrix
from xbaropt.numerics import make_rng

matrices_5x5 = arrays(
    np.float64, (5, 5),
    elements=st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False),
)


@given(matrices_5x5)
@settings(max_examples=50, deadline=None)
def test_eliminate_negatives_is_nonnegative_and_round_trips(C):
    aug = eliminate_negatives(C)
    assert (aug.matrix >= 0).all()
    n, k = aug.original_dim, aug.aux_dim
    assert aug.matrix.shape == (n + k, n + k)
    # Substituting the auxiliary definition reproduces the original action.
    rng = make_rng(0)
    v = rng.standard_normal(n)
    full = aug.matrix @ aug.pad_input(v)
    np.testing.assert_allclose(full[:n], C @ v, atol=1e-8)
    np.testing.assert_allclose(full[n:], np.zeros(k), atol=1e-8)


def test_eliminate_negatives_aux_dim_counts_negative_columns():
    C = np.array([[1.0, -2.0, 0.0], [0.0, 3.0, 0.0], [4.0, 0.0, -5.0]])
    aug = eliminate_negatives(C)
    assert aug.aux_dim == 2
    np.testing.assert_array_equal(aug.aux_column_indices, [1, 2])


def test_eliminate_negatives_nonnegative_matrix_is_unchanged():
    C = np.array([[1.0, 2.0], [0.0, 3.0]])
    aug = eliminate_negatives(C)
    assert aug.aux_dim == 0
    np.testing.assert_array_equal(aug.matrix, C)


def test_eliminate_negatives_rejects_nonsquare():
    with pytest.raises(DimensionMismatch):
        eliminate_negatives(np.ones((2, 3)))


def test_program_increments_call_count():
    before = crossbar.program_call_count()
    program(np.eye(3), 0.0, make_rng(0))
    assert crossbar.program_call_count() == before + 1


def test_program_rejects_negative_entries():
    with pytest.raises(NegativeEntry):
        program(np.array([[1.0, -0.1], [0.0, 1.0]]), 0.0, make_rng(0))


def test_program_rejects_empty_conductance_range():
    with pytest.raises(InvalidRange):
        program(np.eye(2), 0.0, make_rng(0), g_range=(1e-3, 1e-3))


def test_program_conductances_within_range_and_scaled():
    C = np.array([[2.0, 0.5], [0.0, 4.0]])
    arr = program(C, 0.0, make_rng(0), g_range=(1e-6, 1e-3))
    assert arr.conductances.max() == pytest.approx(1e-3)
    assert (arr.conductances >= 1e-6).all() and (arr.conductances <= 1e-3).all()
    np.testing.assert_array_equal(arr.effective_matrix, C)


def test_program_variation_hits_requested_level():
    C = np.abs(make_rng(5).standard_normal((6, 6)))
    arr = program(C, 0.1, make_rng(6))
    level = np.linalg.norm(arr.effective_matrix - C) / np.linalg.norm(C)
    assert level == pytest.approx(0.1, rel=1e-12)


def test_array_multiply_and_solve_are_inverses():
    C = np.abs(make_rng(9).standard_normal((5, 5))) + np.eye(5)
    arr = program(C, 0.05, make_rng(10))
    v = make_rng(11).standard_normal(5)
    np.testing.assert_allclose(arr.solve(arr.multiply(v)), v, atol=1e-9)


def test_array_shape_checks():
    arr = program(np.eye(3), 0.0, make_rng(0))
    with pytest.raises(DimensionMismatch):
        arr.multiply(np.ones(4))
    with pytest.raises(DimensionMismatch):
        arr.solve(np.ones(2))


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_effective_matrix_raises_on_solve():
    arr = program(np.ones((2, 2)), 0.0, make_rng(0))
    with pytest.raises(SingularMatrix):
        arr.solve(np.ones(2))


def test_saddle_perturbation_zero_ratio_is_zero():
    C = make_rng(1).standard_normal((4, 4))
    np.testing.assert_array_equal(saddle_perturbation(C, 0.0, make_rng(2)), np.zeros((4, 4)))


def test_saddle_perturbation_is_symmetric_and_masked():
    rng = make_rng(3)
    C = rng.standard_normal((8, 8))
    C[2, :] = 0.0
    C[:, 2] = 0.0
    sigma = saddle_perturbation(C, 0.1, rng)
    np.testing.assert_allclose(sigma, sigma.T, atol=0)
    assert (sigma[C == 0] == 0).all()
    assert np.linalg.norm(sigma) > 0


def test_saddle_perturbation_frozen_diagonal():
    rng = make_rng(4)
    C = np.abs(rng.standard_normal((6, 6))) + np.eye(6)
    sigma = saddle_perturbation(C, 0.2, rng, frozen_diagonal=3)
    np.testing.assert_array_equal(np.diag(sigma)[:3], np.zeros(3))
    assert np.abs(np.diag(sigma)[3:]).max() > 0


def test_program_signed_round_trip_no_variation():
    C = make_rng(12).standard_normal((6, 6)) + 3 * np.eye(6)
    xb = program_signed(C, 0.0, make_rng(13))
    v = make_rng(14).standard_normal(6)
    np.testing.assert_allclose(xb.multiply(v), C @ v, atol=1e-9)
    np.testing.assert_allclose(xb.solve(C @ v), v, atol=1e-8)


def test_program_signed_variation_is_frozen():
    """The same perturbed matrix drives every multiply after programming."""
    C = make_rng(15).standard_normal((5, 5)) + 4 * np.eye(5)
    xb = program_signed(C, 0.1, make_rng(16))
    v = make_rng(17).standard_normal(5)
    first = xb.multiply(v)
    for _ in range(3):
        np.testing.assert_array_equal(xb.multiply(v), first)
    assert np.linalg.norm(first - C @ v) > 0  # variation actually applied


def test_program_signed_records_variation_ratio():
    C = make_rng(18).standard_normal((4, 4)) + 3 * np.eye(4)
    assert program_signed(C, 0.07, make_rng(19)).variation_ratio == 0.07
