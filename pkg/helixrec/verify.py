"""Independent checks of a reconstructed curve against the profile it came from.

Each check looks at the sample from a different side: frame orthonormality, the constant slope of helix tangents,
curvature and torsion recovered from positions alone, and the residuals of the fourth-order position equation

    d/ds[(1/tau) d/ds((1/kappa) psi'')] + (kappa/tau + tau/kappa) psi'' + (kappa/tau)' psi' = 0

and of the third-order tangent equation obtained from it with ``psi' = T``.
"""
import copy
import logging
import numpy as np
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional

from helixrec.errors import DegenerateTorsionError, HelixrecError, VerificationError
from helixrec.intrinsics import classify
from helixrec.utils import (DEFAULT_OPTIONS, FIRST_DERIVATIVE_O2, FIRST_DERIVATIVE_O4, SECOND_DERIVATIVE_O4,
                            THIRD_DERIVATIVE_O4, apply_stencil, slope_components)

__all__ = [
    'VerificationReport', 'RecoveredIntrinsics', 'EquationResidual', 'recover_intrinsics', 'ode4_residual',
    'tangent_ode_residual', 'lancret_check', 'full_report'
]

# nested stencils: 4th-order inner (half width 2) plus two 2nd-order outer ones (half width 1 each)
_RESIDUAL_REACH = 4

logger = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    """Outcome of :func:`full_report`. Values of skipped or failed checks are None."""
    max_orthonormality_drift: Optional[float] = None
    lancret_deviation: Optional[float] = None
    kappa_recovery_error: Optional[float] = None
    tau_recovery_error: Optional[float] = None
    ode4_residual: Optional[float] = None
    ode4_scale: Optional[float] = None
    tangent_ode_residual: Optional[float] = None
    h: Optional[float] = None
    stencil_order: int = 4
    ode4_stride: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def skip(self, check, reason):
        self.skipped.append({'check': check, 'reason': reason})

    def fail(self, check, reason):
        self.failures.append({'check': check, 'reason': reason})

    def to_dict(self):
        out = asdict(self)
        out['passed'] = self.passed
        return out


class RecoveredIntrinsics(NamedTuple):
    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray


class EquationResidual(NamedTuple):
    s: np.ndarray
    residual: np.ndarray
    scale: float
    stride: int


def _require_points(sample, minimum, what):
    if len(sample) < minimum:
        raise VerificationError(f'too few points for {what}: {len(sample)} < {minimum}')


def recover_intrinsics(sample, degenerate_tol=1e-8):
    """Curvature and torsion from positions alone, by 4th-order central differences.

    ``kappa = |psi' x psi''| / |psi'|^3`` and ``tau = <psi' x psi'', psi'''> / |psi' x psi''|^2``; four points at
    each end are dropped.

    Raises:
        VerificationError: Fewer than 9 points, or ``psi' x psi''`` vanishing (straight or degenerate segment).
    """
    _require_points(sample, 9, 'intrinsic recovery')
    h = sample.h
    d1 = apply_stencil(sample.psi, FIRST_DERIVATIVE_O4, h, 1)[4:-4]
    d2 = apply_stencil(sample.psi, SECOND_DERIVATIVE_O4, h, 2)[4:-4]
    d3 = apply_stencil(sample.psi, THIRD_DERIVATIVE_O4, h, 3)[4:-4]
    cross = np.cross(d1, d2)
    cross_norm = np.linalg.norm(cross, axis=1)
    kappa = cross_norm / np.linalg.norm(d1, axis=1)**3
    if np.any(kappa <= degenerate_tol * max(1.0, float(np.max(kappa)))):
        idx = int(np.argmin(kappa))
        raise VerificationError(f'torsion undefined: psi\' x psi\'\' vanishes at s={sample.s[4 + idx]!r} '
                                f'(curvature estimate {kappa[idx]:.3e})')
    tau = np.einsum('ij,ij->i', cross, d3) / cross_norm**2
    return RecoveredIntrinsics(sample.s[4:-4], kappa, tau)


def _torsion_ready(sample, profile, torsion_floor):
    kappa, tau = profile.sample(sample.s)
    if np.min(np.abs(tau)) <= torsion_floor * np.max(kappa):
        raise DegenerateTorsionError('τ below tolerance')
    return kappa, tau


def _effective_stride(n, stride, factor=1):
    """Largest stride not above ``stride`` whose ``factor``-fold multiple leaves at least one interior point."""
    usable = max(1, min(int(stride), (n - 1) // (2 * _RESIDUAL_REACH * factor)))
    if usable < stride:
        logger.warning(f'{n} points are too few for stencil stride {stride}; using {usable}')
    return usable


def _ratio_terms(sample, profile, kappa, tau):
    ratio = kappa / tau
    dkappa, dtau = profile.derivatives(sample.s)
    return ratio + 1 / ratio, (dkappa * tau - kappa * dtau) / tau**2


def _nested_term(inner, tau, h, stride):
    """``d/ds[(1/tau) d/ds(inner)]`` with 2nd-order central stencils."""
    middle = apply_stencil(inner, FIRST_DERIVATIVE_O2, h, 1, stride) / tau[:, None]
    return apply_stencil(middle, FIRST_DERIVATIVE_O2, h, 1, stride)


def _judge(sample, terms, stride, extrapolate):
    """Residual norms and scale on the interior left by ``terms``.

    ``terms(stride)`` returns the residual vectors and the dominant term at that stencil spacing. With
    ``extrapolate`` the spacings ``stride`` and ``2 * stride`` are combined as ``(4 r_k - r_2k) / 3``, which removes
    the leading error of the 2nd-order outer stencils.
    """
    residual, dominant = terms(stride)
    reach = _RESIDUAL_REACH * stride
    if extrapolate:
        coarse, _ = terms(2 * stride)
        residual = (4 * residual - coarse) / 3
        reach *= 2
    cut = slice(reach, len(sample) - reach)
    scale = float(np.max(np.linalg.norm(dominant[cut], axis=1)))
    return EquationResidual(sample.s[cut], np.linalg.norm(residual[cut], axis=1), scale, stride)


def ode4_residual(sample, profile, stride=10, torsion_floor=1e-6, extrapolate=True):
    """Pointwise norm of the fourth-order position equation on interior points.

    ``psi'`` and ``psi''`` use 4th-order stencils and the two nested outer derivatives 2nd-order ones, all with a
    spacing of ``stride`` grid steps. By default the residual is Richardson-extrapolated from the spacings ``stride``
    and ``2 * stride``, so a clean curve leaves a 4th-order remainder; ``8 * stride`` points are then dropped at each
    end (``4 * stride`` without extrapolation). Curvature and torsion come from the profile, their derivatives from a
    fine stencil on the profile itself.

    Returns:
        EquationResidual: Interior grid, residual norms, the scale ``max |(kappa/tau + tau/kappa) psi''|`` and the
            stride actually used.

    Raises:
        DegenerateTorsionError: ``|tau| <= torsion_floor * max kappa`` somewhere on the grid.
        VerificationError: Fewer than 17 points (9 without extrapolation).
    """
    _require_points(sample, 17 if extrapolate else 9, 'the fourth-order residual')
    kappa, tau = _torsion_ready(sample, profile, torsion_floor)
    stride = _effective_stride(len(sample), stride, 2 if extrapolate else 1)
    h = sample.h
    weight, dratio = _ratio_terms(sample, profile, kappa, tau)

    def terms(k):
        d1 = apply_stencil(sample.psi, FIRST_DERIVATIVE_O4, h, 1, k)
        d2 = apply_stencil(sample.psi, SECOND_DERIVATIVE_O4, h, 2, k)
        dominant = weight[:, None] * d2
        return _nested_term(d2 / kappa[:, None], tau, h, k) + dominant + dratio[:, None] * d1, dominant

    return _judge(sample, terms, stride, extrapolate)


def tangent_ode_residual(sample, profile, stride=10, torsion_floor=1e-6, extrapolate=True):
    """Pointwise norm of ``d/ds[(1/tau)(T'/kappa)'] + (kappa/tau + tau/kappa) T' + (kappa/tau)' T`` on the stored
    tangents, with the stencil scheme of :func:`ode4_residual`."""
    _require_points(sample, 17 if extrapolate else 9, 'the tangent residual')
    kappa, tau = _torsion_ready(sample, profile, torsion_floor)
    stride = _effective_stride(len(sample), stride, 2 if extrapolate else 1)
    h = sample.h
    weight, dratio = _ratio_terms(sample, profile, kappa, tau)

    def terms(k):
        dT = apply_stencil(sample.T, FIRST_DERIVATIVE_O4, h, 1, k)
        dominant = weight[:, None] * dT
        return _nested_term(dT / kappa[:, None], tau, h, k) + dominant + dratio[:, None] * sample.T, dominant

    return _judge(sample, terms, stride, extrapolate)


def lancret_check(sample, alpha):
    """``max |<T, e3> - cos(alpha)|`` over the sample."""
    if len(sample) == 0:
        return 0.0
    return float(np.max(np.abs(sample.T[:, 2] - slope_components(alpha)[1])))


def _recovery_errors(sample, profile, degenerate_tol):
    recovered = recover_intrinsics(sample, degenerate_tol)
    kappa, tau = profile.sample(recovered.s)
    kappa_error = np.abs(recovered.kappa - kappa) / kappa
    tau_error = np.abs(recovered.tau - tau) / np.maximum(np.abs(tau), kappa)
    return float(np.max(kappa_error)), float(np.max(tau_error))


def full_report(sample, profile, options=None):
    """Run every applicable check and judge it against the ``verify`` tolerances.

    Lancret's slope test is skipped for Generic profiles and the two equation residuals where the torsion
    (nearly) vanishes. A check that raises is recorded as a failure; the other checks still run.

    Args:
        sample (CurveSample): The curve.
        profile (IntrinsicProfile): Its intrinsic equations.
        options (dict | None): Nested options as from :func:`helixrec.utils.load_options`.
            Default: ``options/defaults.yml``.

    Returns:
        VerificationReport: The report.

    Raises:
        VerificationError: Fewer than 7 points.
    """
    options = copy.deepcopy(DEFAULT_OPTIONS) if options is None else options
    opt = options['verify']
    if len(sample) < 7:
        raise VerificationError(f'too few points: {len(sample)} < 7')
    report = VerificationReport(
        h=sample.h,
        tolerances={
            key: opt[key]
            for key in ('orthonormality_tol', 'lancret_tol', 'kappa_tol', 'tau_tol', 'ode4_tol', 'tangent_ode_tol',
                        'torsion_floor')
        })

    report.max_orthonormality_drift = sample.orthonormality_drift()
    if not report.max_orthonormality_drift <= opt['orthonormality_tol']:
        report.fail('orthonormality', f'drift {report.max_orthonormality_drift:.3e} > {opt["orthonormality_tol"]:g}')

    try:
        curve_class = classify(profile, options['classify']['grid_n'], options['classify']['tol'])
    except HelixrecError as err:
        curve_class = None
        report.fail('lancret', str(err))
    if curve_class is not None and not curve_class.is_helix:
        report.skip('lancret', 'profile is Generic')
    elif curve_class is not None:
        report.lancret_deviation = lancret_check(sample, curve_class.alpha)
        if not report.lancret_deviation <= opt['lancret_tol']:
            report.fail('lancret', f'deviation {report.lancret_deviation:.3e} > {opt["lancret_tol"]:g}')

    try:
        report.kappa_recovery_error, report.tau_recovery_error = _recovery_errors(sample, profile,
                                                                                  opt['degenerate_tol'])
    except HelixrecError as err:
        report.fail('recovery', str(err))
    else:
        if not report.kappa_recovery_error <= opt['kappa_tol']:
            report.fail('kappa_recovery', f'error {report.kappa_recovery_error:.3e} > {opt["kappa_tol"]:g}')
        if not report.tau_recovery_error <= opt['tau_tol']:
            report.fail('tau_recovery', f'error {report.tau_recovery_error:.3e} > {opt["tau_tol"]:g}')

    for check, func, tol_key in (('ode4', ode4_residual, 'ode4_tol'),
                                 ('tangent_ode', tangent_ode_residual, 'tangent_ode_tol')):
        try:
            result = func(sample, profile, opt['ode4_stride'], opt['torsion_floor'])
        except DegenerateTorsionError as err:
            report.skip(check, str(err))
            continue
        except HelixrecError as err:
            report.fail(check, str(err))
            continue
        worst = float(np.max(result.residual))
        if check == 'ode4':
            report.ode4_residual, report.ode4_scale, report.ode4_stride = worst, result.scale, result.stride
        else:
            report.tangent_ode_residual = worst
        if not worst <= opt[tol_key] * result.scale:
            report.fail(check, f'residual {worst:.3e} > {opt[tol_key]:g} * {result.scale:.3e}')

    logger.debug(f'verification of {len(sample)} points: {len(report.failures)} failure(s), '
                 f'{len(report.skipped)} skipped')
    return report
