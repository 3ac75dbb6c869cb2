"""Normal-incidence interface coefficients and slab resummation helpers.

Everything here is a small closed-form expression: Fresnel reflection and
transmission at a planar boundary, the geometric-series factor for repeated
internal reflections, and the normalization constants for the bosonic noise
channels of an absorbing slab.
"""

from __future__ import annotations

import cmath
import math

from .errors import DivergentResummationError
from .media import RefractiveIndex

__all__ = [
    "fresnel_r",
    "fresnel_t",
    "multi_reflection_factor",
    "noise_normalizers",
]

# Safety margin on |r21 r23 e^{2i phi}| before the geometric series is
# declared divergent.  Passive media cannot actually reach 1.
_DIVERGENCE_GUARD = 1.0 - 1e-12

# Below this value of gamma*omega*l/c the sinh(x)/x term switches to a
# Taylor series to avoid 0/0 and cancellation in the lossless limit.
_SMALL_LOSS = 1e-6


def _as_complex(n) -> complex:
    if isinstance(n, RefractiveIndex):
        return n.n
    return complex(n)


def fresnel_r(n_i, n_j) -> complex:
    """Amplitude reflection coefficient (n_i - n_j)/(n_i + n_j)."""
    ni, nj = _as_complex(n_i), _as_complex(n_j)
    return (ni - nj) / (ni + nj)


def fresnel_t(n_i, n_j) -> complex:
    """Amplitude transmission coefficient 2 n_i/(n_i + n_j)."""
    ni, nj = _as_complex(n_i), _as_complex(n_j)
    return 2.0 * ni / (ni + nj)


def multi_reflection_factor(r21: complex, r23: complex, phi: complex) -> complex:
    """Resummation [1 - e^{2i phi} r21 r23]^{-1} of internal round trips.

    *phi* is the complex half round-trip phase n2*omega*l/c.
    """
    q = cmath.exp(2j * phi) * r21 * r23
    if abs(q) >= _DIVERGENCE_GUARD:
        raise DivergentResummationError(
            f"round-trip gain |q| = {abs(q)!r} too close to 1; "
            "the multiple-reflection series does not converge"
        )
    return 1.0 / (1.0 - q)


def _sinh_over_x(x: float) -> float:
    """sinh(x)/x, stable through x = 0."""
    if abs(x) < _SMALL_LOSS:
        x2 = x * x
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    return math.sinh(x) / x


def _sin_over_x(x: float) -> float:
    """sin(x)/x, stable through x = 0."""
    if abs(x) < _SMALL_LOSS:
        x2 = x * x
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    return math.sin(x) / x


def noise_normalizers(n2: RefractiveIndex, omega: float, l: float):
    """Normalization constants (c_plus, c_minus) of the slab noise channels.

    c_pm = e^{-gamma2 w l/c} [sinh(gamma2 w l/c)/gamma2 +- sin(beta2 w l/c)/beta2]

    with the lossless gamma2 -> 0 limit of the first term evaluated as
    omega*l/c.  Both values are nonnegative for passive media.
    """
    from scipy.constants import c as c_light

    beta2, gamma2 = n2.beta, n2.gamma
    u = omega * l / c_light  # optical path parameter omega*l/c
    xg = gamma2 * u
    damp = math.exp(-xg)
    # sinh(gamma*u)/gamma = u * sinh(x)/x with x = gamma*u.
    grow = u * _sinh_over_x(xg)
    osc = u * _sin_over_x(beta2 * u)
    c_plus = damp * (grow + osc)
    c_minus = damp * (grow - osc)
    # Guard against tiny negative round-off: the exact values satisfy
    # sinh(x)/x >= 1 >= sin(y)/y.
    if -1e-15 * max(1.0, grow) < c_minus < 0.0:
        c_minus = 0.0
    if -1e-15 * max(1.0, grow) < c_plus < 0.0:
        c_plus = 0.0
    return c_plus, c_minus
