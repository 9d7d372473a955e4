import csv
import math
import numpy as np
from dataclasses import dataclass, field
from scipy.interpolate import CubicSpline
from types import MappingProxyType

from helixrec.errors import EvaluationError, ProfileError
from helixrec.intrinsics.expression import parse_expression

__all__ = [
    'TabulatedFunction', 'IntrinsicProfile', 'eval_profile', 'load_profile_table', 'is_table_label',
    'profile_from_provenance'
]

# relative slack on the domain ends, so the last Runge-Kutta stage may land a rounding error past s1
_DOMAIN_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class TabulatedFunction:
    """Measured samples of a function of ``s``, interpolated by a cubic spline clamped to the sample range.

    Args:
        s (ndarray): Strictly increasing sample positions, at least 4.
        values (ndarray): Samples.
        label (str): Provenance text written into sample files, e.g. ``'table:profile.csv#kappa'``.
    """
    s: np.ndarray
    values: np.ndarray
    label: str = 'table'
    _spline: CubicSpline = field(init=False, repr=False, default=None)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != values.shape or s.size < 4:
            raise ProfileError('a tabulated function needs matching 1-D arrays of at least 4 samples')
        if not np.all(np.isfinite(s)) or not np.all(np.isfinite(values)):
            raise ProfileError(f'{self.label}: samples must be finite')
        if np.any(np.diff(s) <= 0):
            raise ProfileError(f'{self.label}: sample positions must be strictly increasing')
        object.__setattr__(self, 's', s)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, '_spline', CubicSpline(s, values))

    def evaluate(self, s, params=None):
        s = min(max(float(s), self.s[0]), self.s[-1])
        return float(self._spline(s))

    def evaluate_many(self, s_values, params=None):
        return self._spline(np.clip(np.asarray(s_values, dtype=float), self.s[0], self.s[-1]))

    def parameters(self):
        return frozenset()

    def __str__(self):
        return self.label


@dataclass(frozen=True, eq=False)
class IntrinsicProfile:
    """Curvature and torsion as functions of arc length over a closed domain.

    Args:
        kappa (Expr | TabulatedFunction): Curvature.
        tau (Expr | TabulatedFunction): Torsion.
        s0 (float): Domain start.
        s1 (float): Domain end, ``s1 > s0``.
        params (Mapping[str, float]): Parameter values for the expressions.
    """
    kappa: object
    tau: object
    s0: float
    s1: float
    params: MappingProxyType = field(default_factory=dict)

    def __post_init__(self):
        s0, s1 = float(self.s0), float(self.s1)
        if not (math.isfinite(s0) and math.isfinite(s1)):
            raise ProfileError(f'domain ends must be finite, got [{s0}, {s1}]')
        if not s0 < s1:
            raise ProfileError(f'domain must satisfy s0 < s1, got [{s0}, {s1}]')
        params = {str(k): float(v) for k, v in dict(self.params).items()}
        object.__setattr__(self, 's0', s0)
        object.__setattr__(self, 's1', s1)
        object.__setattr__(self, 'params', MappingProxyType(params))
        missing = (self.kappa.parameters() | self.tau.parameters()) - set(params)
        if missing:
            raise ProfileError(f'unbound parameters: {", ".join(sorted(missing))}')

    @classmethod
    def from_text(cls, kappa, tau, s0, s1, params=None):
        """Build a profile from expression text, e.g. ``from_text('sin(alpha)/(a*s)', 'cos(alpha)/(a*s)', 1, 5,
        {'a': 1, 'alpha': math.pi / 4})``."""
        return cls(parse_expression(kappa), parse_expression(tau), s0, s1, params or {})

    @property
    def length(self):
        return self.s1 - self.s0

    @property
    def provenance(self):
        return {'kappa': str(self.kappa), 'tau': str(self.tau), 'params': dict(sorted(self.params.items()))}

    def grid(self, n):
        return np.linspace(self.s0, self.s1, int(n))

    def contains(self, s):
        slack = _DOMAIN_SLACK * max(1.0, self.length)
        return self.s0 - slack <= s <= self.s1 + slack

    def evaluate(self, s):
        """Evaluate ``(kappa, tau)`` at ``s``.

        Raises:
            ProfileError: ``s`` outside the domain or a non-positive curvature.
            EvaluationError: Unbound parameter or a non-finite value.
        """
        s = float(s)
        if not self.contains(s):
            raise ProfileError(f's={s!r} is outside the domain [{self.s0}, {self.s1}]')
        s = min(max(s, self.s0), self.s1)
        kappa = self.kappa.evaluate(s, self.params)
        tau = self.tau.evaluate(s, self.params)
        if kappa <= 0:
            raise ProfileError(f'curvature must be positive, got kappa({s!r}) = {kappa!r}')
        return kappa, tau

    def sample(self, s_values):
        """Evaluate on many points; returns ``(kappa, tau)`` arrays."""
        pairs = [self.evaluate(s) for s in np.asarray(s_values, dtype=float)]
        if not pairs:
            return np.empty(0), np.empty(0)
        kappa, tau = zip(*pairs)
        return np.array(kappa), np.array(tau)

    def derivatives(self, s_values, delta=None):
        """Curvature and torsion derivatives by a 4th-order central stencil of spacing ``delta``.

        Stencil centres are pulled inside the domain by ``2 * delta``, so values at the very ends belong to a
        point ``2 * delta`` away. Default spacing: ``1e-4`` of the domain length.

        Returns:
            tuple[ndarray, ndarray]: ``(dkappa/ds, dtau/ds)``.
        """
        delta = 1e-4 * self.length if delta is None else float(delta)
        centres = np.clip(np.asarray(s_values, dtype=float), self.s0 + 2 * delta, self.s1 - 2 * delta)
        weights = (1., -8., 8., -1.)
        offsets = (-2, -1, 1, 2)
        dkappa = np.zeros(centres.shape)
        dtau = np.zeros(centres.shape)
        for weight, offset in zip(weights, offsets):
            kappa, tau = self.sample(centres + offset * delta)
            dkappa += weight * kappa
            dtau += weight * tau
        return dkappa / (12 * delta), dtau / (12 * delta)

    def validate(self, grid_n=256):
        """Evaluate on a grid including both ends, so singular domains are rejected up front."""
        try:
            return self.sample(self.grid(grid_n))
        except EvaluationError as err:
            raise ProfileError(f'profile is not admissible on [{self.s0}, {self.s1}]: {err}') from err


def eval_profile(profile, s):
    """Module-level form of :meth:`IntrinsicProfile.evaluate`."""
    return profile.evaluate(s)


def load_profile_table(path, s0=None, s1=None):
    """Read a CSV with header ``s,kappa,tau`` into a tabulated profile.

    The domain defaults to the sample range; a narrower ``[s0, s1]`` may be given.
    """
    with open(path, newline='') as fin:
        reader = csv.DictReader(row for row in fin if not row.lstrip().startswith('#'))
        if reader.fieldnames is None or not {'s', 'kappa', 'tau'} <= set(reader.fieldnames):
            raise ProfileError(f'{path}: expected columns s,kappa,tau')
        rows = [(float(r['s']), float(r['kappa']), float(r['tau'])) for r in reader]
    if len(rows) < 4:
        raise ProfileError(f'{path}: at least 4 rows are needed')
    data = np.array(rows)
    kappa = TabulatedFunction(data[:, 0], data[:, 1], label=f'table:{path}#kappa')
    tau = TabulatedFunction(data[:, 0], data[:, 2], label=f'table:{path}#tau')
    lo = data[0, 0] if s0 is None else s0
    hi = data[-1, 0] if s1 is None else s1
    return IntrinsicProfile(kappa, tau, lo, hi)


def is_table_label(text):
    return text.startswith('table:') and '#' in text


def profile_from_provenance(kappa, tau, s0, s1, params=None):
    """Rebuild a profile from the texts recorded in a sample file (expressions or ``table:<path>#column``)."""
    if is_table_label(kappa) != is_table_label(tau):
        raise ProfileError('kappa and tau must both be expressions or both be tables')
    if is_table_label(kappa):
        path = kappa[len('table:'):].rsplit('#', 1)[0]
        table = load_profile_table(path)
        return IntrinsicProfile(table.kappa, table.tau, s0, s1)
    return IntrinsicProfile.from_text(kappa, tau, s0, s1, params)
