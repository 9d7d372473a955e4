"""The analytic example curves by name."""
from helixrec.errors import ConfigError
from helixrec.helix.catenary_curve import CatenaryCurve
from helixrec.helix.circular_curve import CircularCurve
from helixrec.helix.conical_curve import ConicalCurve
from helixrec.helix.plane_curve import PlaneCurve

__all__ = ['EXAMPLE_CURVES', 'example_curve']

EXAMPLE_CURVES = {cls.kind: cls() for cls in (PlaneCurve, CircularCurve, ConicalCurve, CatenaryCurve)}


def example_curve(kind, params, domain=None, n=1001, C=None):
    """Sample one of the registered closed-form example curves.

    Args:
        kind (str): ``plane``, ``circular``, ``conical`` or ``catenary``.
        params (dict): ``a`` and, except for ``plane``, ``alpha``.
        domain (tuple | None): ``(s0, s1)``. Default: the example's own domain.
        n (int): Sample points. Default: 1001.
        C (array-like | None): Offset added to the printed closed form.

    Raises:
        ConfigError: Unknown kind or a missing parameter.
        ProfileError: The domain touches the example's singular point.
    """
    try:
        example = EXAMPLE_CURVES[kind]
    except KeyError:
        raise ConfigError(f'unknown example {kind!r}; choose from {", ".join(sorted(EXAMPLE_CURVES))}') from None
    return example.sample(params, domain, n, C)
