import math
import numpy as np
import pytest

from helixrec.errors import DegenerateTorsionError, IntegrationError, SampleFormatError
from helixrec.frenet import (CurveSample, Method, binormal_from_tangent, canonical_initial_state, default_step,
                             identity_initial_state, integrate_frenet)
from helixrec.helix import example_curve
from helixrec.intrinsics import IntrinsicProfile
from helixrec.utils import rotation_about_axis


def _integrate(profile, h, alpha=None):
    steps = int(round(profile.length / h))
    init = identity_initial_state(profile.s0) if alpha is None else canonical_initial_state(alpha, profile.s0)
    return integrate_frenet(profile, init, profile.length / steps, steps, alpha=alpha)


@pytest.fixture(scope='module')
def circular_run():
    a, alpha = 2.0, math.pi / 3
    profile = IntrinsicProfile.from_text('sin(alpha)/a', 'cos(alpha)/a', 0, 10, {'a': a, 'alpha': alpha})
    return profile, _integrate(profile, 1e-3, alpha)


@pytest.fixture(scope='module')
def conical_run():
    alpha = math.pi / 4
    profile = IntrinsicProfile.from_text('sin(alpha)/(a*s)', 'cos(alpha)/(a*s)', 1, 5, {'a': 1, 'alpha': alpha})
    return profile, _integrate(profile, 1e-3, alpha)


def test_canonical_planar_frame():
    state = canonical_initial_state(math.pi / 2)
    assert state.T.tolist() == [1.0, 0.0, 0.0]
    assert state.N.tolist() == [0.0, 1.0, 0.0]
    assert state.B.tolist() == [0.0, 0.0, 1.0]
    assert state.psi.tolist() == [0.0, 0.0, 0.0]


def test_canonical_frame():
    state = canonical_initial_state(math.pi / 3, s0=2.0)
    np.testing.assert_allclose(state.T, [math.sqrt(3) / 2, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(state.B, [-0.5, 0, math.sqrt(3) / 2], atol=1e-15)
    assert state.s == 2.0
    assert state.orthonormality_drift() < 1e-15


@pytest.mark.parametrize('alpha', [0.1, 0.5, 1.0, math.pi / 3, math.pi / 2])
def test_canonical_slope(alpha):
    state = canonical_initial_state(alpha)
    assert state.T[2] == pytest.approx(math.cos(alpha), abs=1e-16)
    np.testing.assert_allclose(np.cross(state.T, state.N), state.B, atol=1e-16)


@pytest.mark.parametrize('alpha', [0.0, -0.1, 2.0])
def test_canonical_rejects_angle(alpha):
    with pytest.raises(IntegrationError):
        canonical_initial_state(alpha)


def test_curvature_floor():
    profile = IntrinsicProfile.from_text('1e-12', '0', 0, 1)
    with pytest.raises(IntegrationError, match='curvature below admissible floor'):
        integrate_frenet(profile, canonical_initial_state(math.pi / 2), 0.1, 10)


def test_evaluation_failure_mid_step():
    profile = IntrinsicProfile.from_text('sqrt(0.55-s)+1', '0', 0, 1)
    with pytest.raises(IntegrationError, match='profile evaluation failed') as excinfo:
        integrate_frenet(profile, identity_initial_state(), 0.1, 10)
    assert excinfo.value.__cause__ is not None


def test_rejects_steps_past_domain():
    profile = IntrinsicProfile.from_text('1', '0', 0, 1)
    with pytest.raises(IntegrationError, match='leaves the domain'):
        integrate_frenet(profile, identity_initial_state(), 0.1, 11)
    with pytest.raises(IntegrationError):
        integrate_frenet(profile, identity_initial_state(), -0.1, 5)


def test_rejects_bad_initial_frame():
    profile = IntrinsicProfile.from_text('1', '0', 0, 1)
    state = identity_initial_state()
    skewed = type(state)(0.0, state.psi, state.T, state.N, -state.B)
    with pytest.raises(IntegrationError, match='right-handed'):
        integrate_frenet(profile, skewed, 0.1, 5)


def test_half_circle():
    profile = IntrinsicProfile.from_text('1', '0', 0, math.pi)
    sample = _integrate(profile, 1e-3, math.pi / 2)
    assert sample.method is Method.FRENET
    assert sample.s[-1] == pytest.approx(math.pi, abs=1e-12)
    np.testing.assert_allclose(sample.psi[-1], [0.0, 2.0, 0.0], atol=1e-8)
    assert np.all(sample.psi[:, 2] == 0.0)


def test_circular_helix_matches_closed_form(circular_run):
    profile, sample = circular_run
    reference = example_curve('circular', dict(profile.params), (0.0, 10.0), len(sample))
    aligned = sample.aligned_to(reference)
    assert np.linalg.norm(aligned.psi[-1] - reference.psi[-1]) < 1e-6
    assert np.max(np.linalg.norm(aligned.psi - reference.psi, axis=1)) < 1e-6


def test_frames_stay_orthonormal(circular_run, conical_run):
    for _, sample in (circular_run, conical_run):
        assert sample.orthonormality_drift() < 1e-9
        assert sample.speed_deviation() < 1e-6


def test_lancret_slope_of_integrated_helix(conical_run):
    _, sample = conical_run
    assert np.max(np.abs(sample.T[:, 2] - math.cos(math.pi / 4))) < 1e-7


def test_fourth_order_convergence():
    a, alpha = 2.0, math.pi / 3
    profile = IntrinsicProfile.from_text('sin(alpha)/a', 'cos(alpha)/a', 0, 10, {'a': a, 'alpha': alpha})
    errors = []
    for h in (0.2, 0.1, 0.05):
        sample = _integrate(profile, h, alpha)
        reference = example_curve('circular', {'a': a, 'alpha': alpha}, (0.0, 10.0), len(sample))
        errors.append(np.max(np.linalg.norm(sample.aligned_to(reference).psi - reference.psi, axis=1)))
    assert errors[0] / errors[1] >= 12
    assert errors[1] / errors[2] >= 12


def test_error_at_fine_steps_is_round_off():
    a, alpha = 2.0, math.pi / 3
    profile = IntrinsicProfile.from_text('sin(alpha)/a', 'cos(alpha)/a', 0, 10, {'a': a, 'alpha': alpha})
    for h in (4e-3, 2e-3, 1e-3):
        sample = _integrate(profile, h, alpha)
        reference = example_curve('circular', {'a': a, 'alpha': alpha}, (0.0, 10.0), len(sample))
        assert np.max(np.linalg.norm(sample.aligned_to(reference).psi - reference.psi, axis=1)) < 1e-10


def test_default_step():
    profile = IntrinsicProfile.from_text('1', '0', 0, 8.192)
    assert default_step(profile) == pytest.approx(2e-3)
    sample = integrate_frenet(profile, identity_initial_state())
    assert len(sample) == 4097
    assert sample.s[-1] == pytest.approx(8.192)


def test_binormal_from_tangent_circular(circular_run):
    profile, sample = circular_run
    s, binormal = binormal_from_tangent(sample, profile)
    np.testing.assert_array_equal(s, sample.s[2:-2])
    assert np.max(np.linalg.norm(binormal - sample.B[2:-2], axis=1)) < 1e-4


def test_binormal_from_tangent_conical(conical_run):
    profile, sample = conical_run
    _, binormal = binormal_from_tangent(sample, profile)
    unit = binormal / np.linalg.norm(binormal, axis=1)[:, None]
    cosines = np.clip(np.einsum('ij,ij->i', unit, sample.B[2:-2]), -1.0, 1.0)
    assert np.max(np.arccos(cosines)) < 1e-3


def test_binormal_from_tangent_errors():
    planar = IntrinsicProfile.from_text('1', '0', 0, 1)
    sample = _integrate(planar, 0.1, math.pi / 2)
    with pytest.raises(DegenerateTorsionError):
        binormal_from_tangent(sample, planar)
    helix = IntrinsicProfile.from_text('1', '1', 0, 0.75)
    short = _integrate(helix, 0.25, math.pi / 4)
    assert len(short) == 4
    with pytest.raises(IntegrationError, match='at least 5'):
        binormal_from_tangent(short, helix)


def _sample_from(s, psi, method='example'):
    frames = np.tile(np.eye(3), (len(s), 1, 1))
    return CurveSample(s, psi, frames[:, 0], frames[:, 1], frames[:, 2], {'kappa': '1', 'tau': '0', 'params': {}},
                       method)


def test_sample_grid_checks():
    psi = np.zeros((4, 3))
    with pytest.raises(SampleFormatError, match='s not increasing'):
        _sample_from([0.0, 0.2, 0.1, 0.3], psi)
    with pytest.raises(SampleFormatError, match='uniform'):
        _sample_from([0.0, 0.1, 0.2, 0.4], psi)
    with pytest.raises(SampleFormatError, match='rows'):
        _sample_from([0.0, 0.1, 0.2], psi)
    empty = _sample_from([], np.zeros((0, 3)))
    assert len(empty) == 0
    assert empty.orthonormality_drift() == 0.0
    assert _sample_from([0.0, 0.1, 0.2, 0.3], psi, 'frenet').method is Method.FRENET


def test_rigid_transform_and_alignment(circular_run, rng):
    _, sample = circular_run
    rotation = rotation_about_axis(rng.normal(size=3), 1.234)
    moved = sample.rigid_transform(rotation, [1.0, -2.0, 0.5])
    assert moved.orthonormality_drift() < 1e-9
    assert moved.speed_deviation() == pytest.approx(sample.speed_deviation(), abs=1e-9)
    back = moved.aligned_to(sample)
    np.testing.assert_allclose(back.psi, sample.psi, atol=1e-11)
    np.testing.assert_allclose(back.T, sample.T, atol=1e-12)
    state = sample[5]
    assert state.s == sample.s[5]
    np.testing.assert_array_equal(state.frame, sample.frames[5])
