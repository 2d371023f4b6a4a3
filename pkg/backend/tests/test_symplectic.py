import numpy as np
import pytest
from hypothesis import given, settings, seed
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from backend.app.exceptions import DomainError, StructuralError
from backend.app.models import CovarianceMatrix, GaussianChannelDilation
from backend.app.services.random_states import random_cm, random_symplectic
from backend.app.services.symplectic import (
    apply_channel_A,
    apply_local_symplectic,
    beamsplitter,
    bona_fide_margin,
    check_bona_fide,
    direct_sum,
    is_bona_fide,
    is_ppt,
    is_symplectic,
    mode_swap,
    partial_transpose,
    rotation,
    squeezer,
    swap_parties,
    symplectic_eigenvalues,
    symplectic_form,
    vacuum,
)
from backend.app.steering.twomode import tmsv_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)
partitions = st.tuples(st.integers(1, 2), st.integers(1, 2))


def test_symplectic_form_one_mode():
    assert_allclose(symplectic_form(1), [[0.0, 1.0], [-1.0, 0.0]])
    omega = symplectic_form(3)
    assert_allclose(omega @ omega, -np.eye(6))


@pytest.mark.parametrize("n_a, n_b", [(1, 1), (2, 1), (2, 3)])
def test_vacuum_is_bona_fide(n_a, n_b):
    assert is_bona_fide(vacuum(n_a, n_b))


def test_half_identity_is_not_bona_fide():
    sigma = CovarianceMatrix.from_array(0.5 * np.eye(4), 1, 1)
    assert not is_bona_fide(sigma)
    assert bona_fide_margin(0.5 * np.eye(2)) == pytest.approx(-0.5)


def test_tmsv_is_bona_fide_and_pure():
    sigma = tmsv_state(np.cosh(1.0))
    assert is_bona_fide(sigma)
    assert_allclose(symplectic_eigenvalues(sigma.data), [1.0, 1.0], atol=1e-10)


def test_check_bona_fide_flags_boundary_states(tmsv2):
    check = check_bona_fide(tmsv2)
    assert check.passed
    assert check.marginal


def test_is_bona_fide_rejects_raw_arrays():
    with pytest.raises(StructuralError):
        is_bona_fide(np.eye(4))


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (np.eye(4), [1.0, 1.0]),
        (np.diag([3.0, 3.0]), [3.0]),
        (np.diag([2.0, 8.0]), [4.0]),
    ],
)
def test_symplectic_eigenvalues_of_diagonal_matrices(matrix, expected):
    assert_allclose(symplectic_eigenvalues(matrix), expected, rtol=1e-12)


def test_symplectic_eigenvalues_of_tmsv(tmsv2):
    assert_allclose(symplectic_eigenvalues(tmsv2.data), [1.0, 1.0], atol=1e-12)


def test_symplectic_eigenvalues_reject_indefinite_and_odd():
    with pytest.raises(DomainError):
        symplectic_eigenvalues(np.diag([1.0, -1.0]))
    with pytest.raises(StructuralError):
        symplectic_eigenvalues(np.eye(3))


def test_partial_transpose_of_product_is_unchanged(product_state):
    assert_allclose(partial_transpose(product_state).data, product_state.data)


def test_partial_transpose_flips_pp_correlation():
    a, b, c, d = 3.0, 2.0, 1.0, -0.5
    sigma = CovarianceMatrix.from_array(
        [[a, 0, c, 0], [0, a, 0, d], [c, 0, b, 0], [0, d, 0, b]], 1, 1
    )
    flipped = partial_transpose(sigma)
    assert flipped.data[1, 3] == -d
    assert flipped.data[0, 2] == c


def test_partial_transpose_of_tmsv(tmsv2):
    nu = symplectic_eigenvalues(partial_transpose(tmsv2).data)
    assert nu[0] == pytest.approx(2.0 - np.sqrt(3.0), rel=1e-10)
    assert not is_ppt(tmsv2)


def test_product_and_vacuum_are_ppt(product_state, vacuum2):
    assert is_ppt(product_state)
    assert is_ppt(vacuum2)


@seed(11)
@settings(max_examples=40, deadline=None)
@given(seed_=seeds, partition=partitions)
def test_partial_transpose_is_an_exact_involution(seed_, partition):
    sigma = random_cm(*partition, seed=seed_)
    twice = partial_transpose(partial_transpose(sigma))
    assert np.array_equal(twice.data, sigma.data)


@seed(12)
@settings(max_examples=40, deadline=None)
@given(seed_=seeds, partition=partitions)
def test_random_cm_is_bona_fide_with_eigenvalues_above_one(seed_, partition):
    sigma = random_cm(*partition, seed=seed_)
    assert is_bona_fide(sigma)
    assert symplectic_eigenvalues(sigma.data).min() >= 1.0 - 1e-9


@pytest.mark.parametrize("matrix", [rotation(0.3), squeezer(2.5), beamsplitter(0.7), mode_swap()])
def test_standard_transformations_are_symplectic(matrix):
    assert is_symplectic(matrix)


def test_non_symplectic_matrix_is_rejected():
    assert not is_symplectic(np.diag([2.0, 2.0]))
    assert not is_symplectic(np.eye(3))


def test_squeezer_rejects_non_positive_factor():
    with pytest.raises(DomainError):
        squeezer(0.0)


def test_identity_local_symplectic_leaves_state(tmsv2):
    assert_allclose(apply_local_symplectic(tmsv2, np.eye(2), np.eye(2)).data, tmsv2.data)


def test_local_rotation_preserves_spectrum(tmsv2):
    rotated = apply_local_symplectic(tmsv2, rotation(0.4), rotation(-1.1))
    assert_allclose(symplectic_eigenvalues(rotated.data), symplectic_eigenvalues(tmsv2.data), atol=1e-12)


def test_local_squeezer_on_vacuum():
    z = 1.7
    squeezed = apply_local_symplectic(vacuum(1, 1), squeezer(z), np.eye(2))
    assert_allclose(squeezed.data, np.diag([z**2, z**-2, 1.0, 1.0]))


def test_local_symplectic_rejects_mismatch_and_non_symplectic(tmsv2):
    with pytest.raises(StructuralError):
        apply_local_symplectic(tmsv2, np.eye(4), np.eye(2))
    with pytest.raises(DomainError):
        apply_local_symplectic(tmsv2, np.diag([2.0, 2.0]), np.eye(2))


def test_identity_channel_leaves_state(tmsv2):
    channel = GaussianChannelDilation.build(ancilla_cm=np.diag([3.0, 3.0]), symplectic=np.eye(4))
    assert_allclose(apply_channel_A(tmsv2, channel).data, tmsv2.data)


def test_balanced_beamsplitter_is_pure_loss(tmsv2):
    channel = GaussianChannelDilation.build(ancilla_cm=np.eye(2), symplectic=beamsplitter(np.pi / 4))
    out = apply_channel_A(tmsv2, channel)
    assert_allclose(out.a_block, (tmsv2.a_block + np.eye(2)) / 2, atol=1e-12)
    assert_allclose(out.c_block, tmsv2.c_block / np.sqrt(2.0), atol=1e-12)
    assert_allclose(out.b_block, tmsv2.b_block)


def test_swap_channel_replaces_system_with_vacuum(tmsv2):
    channel = GaussianChannelDilation.build(ancilla_cm=np.eye(2), symplectic=mode_swap())
    out = apply_channel_A(tmsv2, channel)
    assert_allclose(out.a_block, np.eye(2), atol=1e-12)
    assert_allclose(out.c_block, np.zeros((2, 2)), atol=1e-12)


def test_channel_rejects_wrong_system_size(tmsv2):
    channel = GaussianChannelDilation.build(ancilla_cm=np.eye(2), symplectic=np.eye(6))
    with pytest.raises(StructuralError):
        apply_channel_A(tmsv2, channel)


def test_dilation_rejects_unphysical_ancilla():
    with pytest.raises(DomainError):
        GaussianChannelDilation.build(ancilla_cm=0.5 * np.eye(2), symplectic=np.eye(4))


def test_direct_sum_orders_parties(tmsv2, product_state):
    joint = direct_sum(tmsv2, product_state)
    assert (joint.n_modes_a, joint.n_modes_b) == (2, 2)
    assert_allclose(joint.a_block, np.diag([2.0, 2.0, 3.0, 3.0]))
    assert_allclose(joint.b_block, np.diag([2.0, 2.0, 2.0, 2.0]))
    assert_allclose(joint.c_block[:2, :2], tmsv2.c_block)
    assert_allclose(joint.c_block[2:, 2:], np.zeros((2, 2)))


def test_swap_parties_is_an_involution():
    sigma = random_cm(2, 1, seed=5)
    swapped = swap_parties(sigma)
    assert (swapped.n_modes_a, swapped.n_modes_b) == (1, 2)
    assert_allclose(swapped.a_block, sigma.b_block)
    assert_allclose(swap_parties(swapped).data, sigma.data)


def test_random_symplectic_is_symplectic():
    assert is_symplectic(random_symplectic(3, 8))
