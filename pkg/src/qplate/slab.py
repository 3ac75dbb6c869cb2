"""Single-slab scattering: closed-form Green function, the characteristic
transformation matrix T and absorption matrix A, and a finite-difference
Helmholtz solver used as an independent numerical oracle.

Geometry is fixed: the slab (medium 2) occupies [-l/2, +l/2], medium 1
fills x < -l/2 and medium 3 fills x > +l/2.  Normal incidence only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as c_light
from scipy.linalg import solve_banded

from .errors import ConfigurationError, NumericalFailureError
from .interfaces import fresnel_r, fresnel_t, multi_reflection_factor, noise_normalizers
from .media import MediumModel, RefractiveIndex, refractive_index

__all__ = [
    "SlabConfig",
    "TwoPortMatrices",
    "single_slab_T",
    "single_slab_A",
    "single_slab_matrices",
    "green_function",
    "green_homogeneous",
    "helmholtz_oracle",
]


@dataclass(frozen=True)
class SlabConfig:
    """A slab of medium2 and thickness l between semi-infinite outer media."""

    medium1: MediumModel
    medium2: MediumModel
    medium3: MediumModel
    l: float

    def __post_init__(self):
        if not self.l > 0:
            raise ConfigurationError("slab thickness must be > 0")

    def indices(self, omega: float):
        return (
            refractive_index(self.medium1, omega),
            refractive_index(self.medium2, omega),
            refractive_index(self.medium3, omega),
        )


@dataclass(frozen=True)
class TwoPortMatrices:
    """The pair (T, A) of 2x2 matrices describing a plate at one frequency.

    T maps incoming field amplitudes to outgoing ones; A couples the
    internal noise channels of an absorbing plate into the output.
    """

    T: np.ndarray
    A: np.ndarray
    omega: float

    def __post_init__(self):
        T = np.asarray(self.T, dtype=complex)
        A = np.asarray(self.A, dtype=complex)
        if T.shape != (2, 2) or A.shape != (2, 2):
            raise ConfigurationError("T and A must be 2x2")
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(A))):
            raise ConfigurationError("T and A entries must be finite")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "A", A)


def _parts(config: SlabConfig, omega: float):
    """Shared scattering ingredients: indices, Fresnel factors, phases."""
    n1, n2, n3 = config.indices(omega)
    k = omega / c_light
    r12 = fresnel_r(n1, n2)
    r21 = -r12
    r23 = fresnel_r(n2, n3)
    r32 = -r23
    t12 = fresnel_t(n1, n2)
    t21 = fresnel_t(n2, n1)
    t23 = fresnel_t(n2, n3)
    t32 = fresnel_t(n3, n2)
    phi = n2.n * k * config.l  # half round-trip phase
    theta = multi_reflection_factor(r21, r23, phi)
    return n1, n2, n3, k, r12, r21, r23, r32, t12, t21, t23, t32, phi, theta


def single_slab_T(config: SlabConfig, omega: float) -> np.ndarray:
    """Characteristic transformation matrix of a single slab."""
    (n1, n2, n3, k, r12, r21, r23, r32,
     t12, t21, t23, t32, phi, theta) = _parts(config, omega)
    l = config.l
    e2 = cmath.exp(1j * phi)  # one interior pass
    T11 = cmath.exp(-1j * n1.beta * k * l) * (r12 + t12 * e2 * e2 * r23 * theta * t21)
    T22 = cmath.exp(-1j * n3.beta * k * l) * (r32 + t32 * e2 * e2 * r21 * theta * t23)
    outer = cmath.exp(-1j * (n1.beta + n3.beta) * k * l / 2.0)
    T12 = (n1.n / n3.n) * math.sqrt(n3.beta / n1.beta) * outer * t32 * e2 * theta * t21
    T21 = (n3.n / n1.n) * math.sqrt(n1.beta / n3.beta) * outer * t12 * e2 * theta * t23
    return np.array([[T11, T12], [T21, T22]], dtype=complex)


def single_slab_A(config: SlabConfig, omega: float) -> np.ndarray:
    """Characteristic absorption matrix of a single slab.

    Exactly zero for a lossless interior (the sqrt(gamma2) prefactor).
    """
    (n1, n2, n3, k, r12, r21, r23, r32,
     t12, t21, t23, t32, phi, theta) = _parts(config, omega)
    l = config.l
    if n2.gamma == 0.0:
        return np.zeros((2, 2), dtype=complex)
    c_plus, c_minus = noise_normalizers(n2, omega, l)
    e2 = cmath.exp(1j * phi)
    pre1 = math.sqrt(n2.gamma * n2.beta / n1.beta) * cmath.exp(-1j * n1.beta * k * l / 2.0)
    pre3 = math.sqrt(n2.gamma * n2.beta / n3.beta) * cmath.exp(-1j * n3.beta * k * l / 2.0)
    sp, sm = math.sqrt(c_plus), math.sqrt(max(c_minus, 0.0))
    A11 = pre1 * t12 * theta * sp * (1.0 + e2 * r23)
    A12 = pre1 * t12 * theta * sm * (1.0 - e2 * r23)
    A21 = pre3 * t32 * theta * sp * (e2 * r21 + 1.0)
    A22 = pre3 * t32 * theta * sm * (e2 * r21 - 1.0)
    return np.array([[A11, A12], [A21, A22]], dtype=complex)


def single_slab_matrices(config: SlabConfig, omega: float) -> TwoPortMatrices:
    """Both characteristic matrices at one frequency."""
    return TwoPortMatrices(single_slab_T(config, omega),
                           single_slab_A(config, omega), omega)


def green_homogeneous(n: RefractiveIndex, omega: float, dx: float) -> complex:
    """Green function of a uniform medium: e^{i n w |dx|/c} / (2 i n w/c)."""
    k = omega / c_light
    return cmath.exp(1j * n.n * k * abs(dx)) / (2j * n.n * k)


def green_function(config: SlabConfig, omega: float, x: float, xp: float) -> complex:
    """Closed-form slab Green function for any source/field positions.

    Dispatches on the (source region, field region) pair; each of the nine
    cases is kept in factored form (interface coefficients, the resummation
    factor, and decaying phases over nonnegative distances), which keeps
    every exponential bounded for passive media.
    """
    (n1, n2, n3, k, r12, r21, r23, r32,
     t12, t21, t23, t32, phi, theta) = _parts(config, omega)
    l = config.l
    hl = 0.5 * l

    def ph(n, d):
        # e^{i n w d / c} for a nonnegative distance d
        return cmath.exp(1j * n.n * k * d)

    e_l = ph(n2, l)  # one full interior traversal

    def region(y):
        if y < -hl:
            return 1
        if y > hl:
            return 3
        return 2

    rs, rf = region(xp), region(x)

    if rs == 1:
        pre = 1.0 / (2j * n1.n * k)
        src = ph(n1, abs(-hl - xp))  # source to left interface
        if rf == 1:
            refl = r12 + t12 * theta * e_l * r23 * e_l * t21
            return pre * (ph(n1, abs(x - xp)) + src * refl * ph(n1, abs(-hl - x)))
        if rf == 2:
            return pre * t12 * theta * src * (ph(n2, abs(x + hl))
                                              + r23 * ph(n2, l + abs(hl - x)))
        return pre * src * t12 * e_l * theta * t23 * ph(n3, abs(x - hl))

    if rs == 2:
        pre = 1.0 / (2j * n2.n * k)
        up = ph(n2, abs(xp + hl))   # source to left interface
        dn = ph(n2, abs(hl - xp))   # source to right interface
        if rf == 1:
            return pre * theta * (up + dn * r23 * e_l) * t21 * ph(n1, abs(-hl - x))
        if rf == 2:
            direct = ph(n2, abs(x - xp))
            from_right = theta * (up * r21 * e_l + dn) * r23 * ph(n2, abs(hl - x))
            from_left = theta * (up + dn * r23 * e_l) * r21 * ph(n2, abs(x + hl))
            return pre * (direct + from_right + from_left)
        return pre * theta * (up * r21 * e_l + dn) * t23 * ph(n3, abs(x - hl))

    pre = 1.0 / (2j * n3.n * k)
    src = ph(n3, abs(xp - hl))  # source to right interface
    if rf == 1:
        return pre * src * t32 * theta * e_l * t21 * ph(n1, abs(-hl - x))
    if rf == 2:
        return pre * src * t32 * theta * (ph(n2, abs(hl - x))
                                          + e_l * r21 * ph(n2, abs(x + hl)))
    refl = r32 + t32 * theta * e_l * r21 * e_l * t23
    return pre * (ph(n3, abs(x - xp)) + src * refl * ph(n3, abs(x - hl)))


def _solve_helmholtz(eps_nodes, n_left, n_right, k, h, j_source):
    """Tridiagonal solve of [d2/dx2 + k^2 eps(x)] G = delta at node j_source.

    Outgoing-wave conditions are folded into the end rows by ghost-node
    elimination; the delta appears as a 1/h load at its node.
    """
    m = eps_nodes.size
    main = -2.0 / h ** 2 + k * k * eps_nodes
    upper = np.full(m - 1, 1.0 / h ** 2, dtype=complex)
    lower = np.full(m - 1, 1.0 / h ** 2, dtype=complex)
    # Ghost elimination: G' = -i k n G at the left end, +i k n G at the right.
    main = main.astype(complex)
    main[0] += (2j * k * n_left) / h
    main[-1] += (2j * k * n_right) / h
    upper[0] = 2.0 / h ** 2
    lower[-1] = 2.0 / h ** 2
    rhs = np.zeros(m, dtype=complex)
    rhs[j_source] = 1.0 / h
    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = main
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs)
    except Exception as exc:  # singular system should not happen for lossy media
        raise NumericalFailureError(f"Helmholtz solve failed: {exc}") from exc


def helmholtz_oracle(config: SlabConfig, omega: float, xp: float,
                     half_width_factor: float = 5.0, cells: int = None):
    """Direct numerical Green function on a uniform grid.

    Solves the 1D Helmholtz equation on [-L, L] with L =
    half_width_factor * l, second-order finite differences, outgoing-wave
    ends, and Richardson extrapolation from a step-halved companion solve.
    Returns (x_nodes, G_values); the source is snapped to the nearest node.
    """
    n1, n2, n3 = config.indices(omega)
    k = omega / c_light
    l = config.l
    L = half_width_factor * l
    if abs(xp) > L:
        raise ConfigurationError("source position outside the solver domain")

    if cells is None:
        # Resolve the fastest oscillation; Richardson then lifts the order.
        beta_max = max(n1.beta, n2.beta, n3.beta)
        cells = max(2000, int(math.ceil(k * beta_max * 2 * L / 0.02)))
    # Interfaces at +-l/2 must land on nodes of both grids: 2L spans
    # 2*half_width_factor slabs, so round the cell count accordingly.
    unit = max(2, int(round(2 * half_width_factor)))
    cells += (-cells) % (2 * unit)

    def eps_at(nodes):
        eps1 = complex(n1.n) ** 2
        eps2 = complex(n2.n) ** 2
        eps3 = complex(n3.n) ** 2
        eps = np.where(nodes < 0, eps1, eps3).astype(complex)
        inside = np.abs(nodes) < 0.5 * l
        eps[inside] = eps2
        # Average at interface nodes keeps second-order accuracy.
        tol = 1e-9 * l
        eps[np.abs(nodes + 0.5 * l) < tol] = 0.5 * (eps1 + eps2)
        eps[np.abs(nodes - 0.5 * l) < tol] = 0.5 * (eps2 + eps3)
        return eps

    def solve(ncells):
        x = np.linspace(-L, L, ncells + 1)
        h = 2 * L / ncells
        j = int(round((xp + L) / h))
        g = _solve_helmholtz(eps_at(x), complex(n1.n), complex(n3.n), k, h, j)
        return x, g, j

    x_c, g_c, j_c = solve(cells)
    x_f, g_f, j_f = solve(2 * cells)
    if j_f != 2 * j_c:
        # Snap the source identically on both grids by re-solving the fine
        # grid at the coarse node position.
        xp_snapped = x_c[j_c]
        h_f = 2 * L / (2 * cells)
        g_f = _solve_helmholtz(eps_at(x_f), complex(n1.n), complex(n3.n),
                               k, h_f, int(round((xp_snapped + L) / h_f)))
    g = (4.0 * g_f[::2] - g_c) / 3.0
    return x_c, g
