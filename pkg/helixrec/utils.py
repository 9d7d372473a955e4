import copy
import math
import numpy as np
import yaml
from os import path as osp

__all__ = [
    'DEFAULT_OPTION_FILE', 'DEFAULT_OPTIONS', 'FIRST_DERIVATIVE_O2', 'FIRST_DERIVATIVE_O4', 'SECOND_DERIVATIVE_O4',
    'THIRD_DERIVATIVE_O4', 'E3', 'read_option_file', 'load_options', 'slope_components', 'apply_stencil',
    'rotation_about_axis'
]

DEFAULT_OPTION_FILE = osp.join(osp.dirname(osp.dirname(osp.abspath(__file__))), 'options', 'defaults.yml')

# central stencils, weights listed from the most negative offset to the most positive one
FIRST_DERIVATIVE_O2 = np.array([-0.5, 0., 0.5])
FIRST_DERIVATIVE_O4 = np.array([1., -8., 0., 8., -1.]) / 12.
SECOND_DERIVATIVE_O4 = np.array([-1., 16., -30., 16., -1.]) / 12.
THIRD_DERIVATIVE_O4 = np.array([1., -8., 13., 0., -13., 8., -1.]) / 8.

E3 = np.array([0., 0., 1.])


def read_option_file(path):
    """Read a YAML option file.

    Raises:
        ValueError: The file does not hold a mapping.
    """
    with open(path, 'r') as fin:
        loaded = yaml.safe_load(fin) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f'option file {path} must hold a mapping, got {type(loaded).__name__}')
    return loaded


DEFAULT_OPTIONS = read_option_file(DEFAULT_OPTION_FILE)


def _deep_update(base, extra):
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def load_options(path=None, overrides=None):
    """Merge an optional YAML option file and explicit overrides over :data:`DEFAULT_OPTIONS`.

    Args:
        path (str | None): YAML file with the same nesting as ``options/defaults.yml``.
        overrides (dict | None): Values that win over both the defaults and the file.

    Returns:
        dict: A fresh nested option dict.
    """
    opt = copy.deepcopy(DEFAULT_OPTIONS)
    if path is not None:
        _deep_update(opt, read_option_file(path))
    if overrides:
        _deep_update(opt, copy.deepcopy(overrides))
    return opt


def slope_components(alpha):
    """Return ``(sin(alpha), cos(alpha))`` with the planar angle pi/2 mapped to exactly ``(1, 0)``."""
    if abs(alpha - math.pi / 2) <= 1e-15:
        return 1.0, 0.0
    return math.sin(alpha), math.cos(alpha)


def apply_stencil(values, weights, h, power, stride=1):
    """Apply a central finite-difference stencil along the first axis.

    Args:
        values (ndarray): Samples on a uniform grid, shape (n, ...).
        weights (ndarray): Stencil weights for offsets -k..k (odd length).
        h (float): Grid step.
        power (int): Derivative order; the weighted sum is divided by ``(stride * h) ** power``.
        stride (int): Stencil spacing in grid steps. Default: 1.

    Returns:
        ndarray: Same shape as ``values``; the ``k * stride`` points at each end, where the stencil does not fit,
            are NaN.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    half = len(weights) // 2
    reach = half * stride
    out = np.full(values.shape, np.nan)
    if n <= 2 * reach:
        return out
    width = n - 2 * reach
    acc = np.zeros((width, ) + values.shape[1:])
    for k, weight in enumerate(weights):
        if weight == 0:
            continue
        start = reach + (k - half) * stride
        acc += weight * values[start:start + width]
    out[reach:n - reach] = acc / (stride * h)**power
    return out


def rotation_about_axis(axis, angle):
    """Rotation matrix for ``angle`` radians about ``axis`` (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    x, y, z = axis
    cross = np.array([[0., -z, y], [z, 0., -x], [-y, x, 0.]])
    return np.eye(3) + math.sin(angle) * cross + (1 - math.cos(angle)) * cross @ cross
