import json

import numpy as np
import pytest
from hypothesis import given, settings, seed
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from backend.app.exceptions import DomainError, IllConditionedError, PreconditionError, StructuralError
from backend.app.models import CovarianceMatrix, Direction, MeasurementCM, Party
from backend.app.services.random_states import random_cm, random_symplectic
from backend.app.services.symplectic import (
    apply_local_symplectic,
    bona_fide_margin,
    partial_transpose,
    psd_tolerance,
    rotation,
    swap_parties,
    vacuum,
)
from backend.app.steering.measures import (
    coherent_information,
    condition_on_measurement,
    conditional_variance_product,
    measured_steering_violation,
    reid_conditional_variances,
    reid_variances,
    renyi2_entropy,
    schur_complement,
    steering_measure,
    steering_report,
)
from backend.app.steering.twomode import tmsv_state

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_schur_complement_without_correlations_is_b(product_state):
    assert np.array_equal(schur_complement(product_state, Party.B), product_state.b_block)


def test_schur_complement_of_tmsv(tmsv2):
    assert_allclose(schur_complement(tmsv2, Party.B), 0.5 * np.eye(2), atol=1e-12)
    assert_allclose(schur_complement(tmsv2, Party.A), 0.5 * np.eye(2), atol=1e-12)


def test_schur_determinant_identity():
    sigma = random_cm(2, 1, seed=21)
    expected = np.linalg.det(sigma.data) / np.linalg.det(sigma.a_block)
    assert np.linalg.det(schur_complement(sigma, Party.B)) == pytest.approx(expected, rel=1e-8)


def test_singular_conditioning_block_raises():
    sigma = CovarianceMatrix.from_array(np.diag([1e-7, 1e7, 1.0, 1.0]), 1, 1)
    with pytest.raises(IllConditionedError):
        schur_complement(sigma, Party.B)


def test_extremal_measures(extremal2):
    assert steering_measure(extremal2, Direction.A_TO_B) == pytest.approx(np.log(2.0), abs=1e-5)
    assert steering_measure(extremal2, Direction.B_TO_A) == pytest.approx(np.log(3.0), abs=1e-5)


@pytest.mark.parametrize("partition", [(1, 1), (1, 2), (2, 1)])
def test_clearly_ppt_states_have_exactly_zero_measure(partition):
    clear = 0
    for seed_ in range(40):
        sigma = random_cm(*partition, seed=seed_, squeeze_bound=0.3)
        if bona_fide_margin(partial_transpose(sigma).data) <= psd_tolerance(sigma.data):
            continue
        clear += 1
        for direction in Direction:
            assert steering_measure(sigma, direction) == 0.0
    assert clear > 0


@pytest.mark.parametrize("direction", list(Direction))
def test_uncorrelated_states_are_not_steerable(direction, product_state, vacuum2):
    assert steering_measure(product_state, direction) == 0.0
    assert steering_measure(vacuum2, direction) == 0.0


def test_tmsv_measure_is_log_of_a():
    sigma = tmsv_state(np.cosh(2.0))
    for direction in Direction:
        assert steering_measure(sigma, direction) == pytest.approx(np.log(np.cosh(2.0)), abs=1e-10)
        assert steering_measure(sigma, direction) == pytest.approx(1.3254, abs=1e-4)


def test_renyi2_entropy_values(tmsv2):
    assert renyi2_entropy(np.eye(4)) == 0.0
    assert renyi2_entropy(np.diag([3.0, 3.0])) == pytest.approx(np.log(3.0))
    assert renyi2_entropy(tmsv2.a_block) == pytest.approx(np.log(2.0))


def test_renyi2_entropy_needs_positive_determinant():
    with pytest.raises(DomainError):
        renyi2_entropy(np.diag([1.0, -1.0]))


def test_coherent_information(product_state, tmsv2, extremal2):
    assert coherent_information(product_state, Direction.A_TO_B) == pytest.approx(-np.log(2.0))
    assert coherent_information(tmsv2, Direction.A_TO_B) == pytest.approx(np.log(2.0))
    assert coherent_information(extremal2, Direction.A_TO_B) == pytest.approx(np.log(2.0), abs=1e-5)


def test_coherent_information_warns_for_multimode_steered_party(caplog):
    sigma = random_cm(1, 2, seed=4)
    with caplog.at_level("WARNING"):
        coherent_information(sigma, Direction.A_TO_B)
    assert "steered modes" in caplog.text


def test_reid_variances(vacuum2, tmsv2, extremal2):
    assert reid_variances(vacuum2) == pytest.approx((1.0, 1.0))
    assert reid_variances(tmsv2) == pytest.approx((0.25, 0.25))
    product_a, product_b = reid_variances(extremal2)
    assert product_a == pytest.approx(1.0 / 9.0, abs=1e-4)
    assert product_b == pytest.approx(0.25, abs=1e-4)


def test_reid_variances_need_standard_form(tmsv2):
    rotated = apply_local_symplectic(tmsv2, rotation(0.3), np.eye(2))
    with pytest.raises(PreconditionError):
        reid_variances(rotated)
    with pytest.raises(PreconditionError):
        reid_variances(random_cm(2, 1, seed=0))


def test_reid_conditional_variances_of_tmsv(tmsv2):
    variances = reid_conditional_variances(tmsv2)
    assert_allclose(list(variances), [0.5] * 4, atol=1e-12)


def test_conditional_variance_product_matches_schur():
    sigma = random_cm(1, 1, seed=8)
    for steered in Party:
        assert conditional_variance_product(sigma, steered) == pytest.approx(
            np.linalg.det(schur_complement(sigma, steered)), rel=1e-9
        )


def test_measurement_on_uncorrelated_party(product_state):
    conditional = condition_on_measurement(product_state, MeasurementCM.homodyne(1))
    assert_allclose(conditional, product_state.b_block)


def test_heterodyne_on_tmsv_leaves_vacuum(tmsv2):
    conditional = condition_on_measurement(tmsv2, MeasurementCM.heterodyne(1))
    assert_allclose(conditional, np.eye(2), atol=1e-12)


def test_homodyne_on_tmsv(tmsv2):
    conditional = condition_on_measurement(tmsv2, MeasurementCM.build(np.diag([1e-6, 1e6])))
    assert conditional[0, 0] == pytest.approx(0.5, abs=1e-5)
    assert conditional[1, 1] == pytest.approx(2.0, abs=1e-5)


def test_measurement_shape_must_match(tmsv2):
    with pytest.raises(StructuralError):
        condition_on_measurement(tmsv2, MeasurementCM.heterodyne(2))


def test_unphysical_measurement_is_rejected():
    with pytest.raises(DomainError):
        MeasurementCM.build(0.5 * np.eye(2))


@seed(31)
@settings(max_examples=30, deadline=None)
@given(seed_=seeds, squeezing=st.floats(min_value=1e-3, max_value=1e3))
def test_single_measurement_never_beats_the_measure(seed_, squeezing):
    sigma = random_cm(1, 1, seed=seed_)
    measurement = MeasurementCM.build(np.diag([squeezing, 1.0 / squeezing]))
    violation = measured_steering_violation(sigma, measurement)
    assert violation <= steering_measure(sigma, Direction.A_TO_B) + 1e-9


@seed(32)
@settings(max_examples=40, deadline=None)
@given(seed_=seeds, n_a=st.integers(1, 2), n_b=st.integers(1, 2))
def test_measures_are_non_negative_and_mirror_under_swap(seed_, n_a, n_b):
    sigma = random_cm(n_a, n_b, seed=seed_)
    g_ab = steering_measure(sigma, Direction.A_TO_B)
    g_ba = steering_measure(sigma, Direction.B_TO_A)
    assert g_ab >= 0.0 and g_ba >= 0.0
    swapped = swap_parties(sigma)
    assert steering_measure(swapped, Direction.B_TO_A) == pytest.approx(g_ab, abs=1e-9)
    assert steering_measure(swapped, Direction.A_TO_B) == pytest.approx(g_ba, abs=1e-9)


@seed(33)
@settings(max_examples=30, deadline=None)
@given(seed_=seeds)
def test_measure_is_invariant_under_local_symplectics(seed_):
    rng = np.random.default_rng(seed_)
    sigma = random_cm(2, 1, seed=rng)
    moved = apply_local_symplectic(sigma, random_symplectic(2, rng, 1.0), random_symplectic(1, rng, 1.0))
    for direction in Direction:
        before = steering_measure(sigma, direction)
        assert steering_measure(moved, direction) == pytest.approx(before, abs=1e-9 * max(1.0, before))


def test_steering_report_of_tmsv(tmsv2):
    report = steering_report(tmsv2)
    assert report.g_a_to_b == pytest.approx(np.log(2.0))
    assert report.steerable_a_to_b and report.steerable_b_to_a
    assert_allclose(report.nu_a, [0.5])
    assert report.reid_product_a == pytest.approx(0.25)
    assert not report.marginal_a_to_b


def test_steering_report_json_has_eight_fields(tmsv2):
    payload = json.loads(steering_report(tmsv2).to_json())
    assert set(payload) == {
        "g_a_to_b", "g_b_to_a", "nu_a", "nu_b",
        "steerable_a_to_b", "steerable_b_to_a", "reid_product_a", "reid_product_b",
    }


def test_steering_report_marks_boundary_states():
    # 1 - 1e-12 is below one but inside the tolerance band
    a = 2.0
    c = np.sqrt(a * (a - (1.0 - 1e-12)))
    sigma = CovarianceMatrix.from_array([[a, 0, c, 0], [0, a, 0, -c], [c, 0, a, 0], [0, -c, 0, a]], 1, 1)
    report = steering_report(sigma)
    assert report.marginal_a_to_b or not report.steerable_a_to_b


def test_vacuum_report_is_not_steerable():
    report = steering_report(vacuum(2, 1))
    assert report.g_a_to_b == 0.0 and report.g_b_to_a == 0.0
    assert not report.steerable_a_to_b
