"""Photon statistics and commutator kernels built on the (T, A) matrices.

Delta functions over frequency are never materialized: commutators return
the c-number coefficient multiplying delta(w - w'), and number densities
follow a discrete-spectrum convention in which each frequency delta is
worth a factor L/(2 pi c) for a quantization length L (default 1 m).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as c_light, epsilon_0, hbar, k as k_B
from scipy.integrate import trapezoid

from .errors import (
    ConfigurationError,
    InternalConsistencyError,
    RegionError,
    UnsupportedOrderError,
    UnsupportedStateError,
)
from .media import MediumModel, refractive_index
from .slab import TwoPortMatrices
from .stack import LayerStack

__all__ = [
    "InputState",
    "thermal_occupancy",
    "output_photon_density",
    "absorption_coefficient",
    "one_side_illumination",
    "input_commutator",
    "output_commutator",
    "langevin_kernels",
    "thermal_matter_correlation",
    "output_correlation",
    "first_order_field_correlation",
]

# Relative tolerance for treating two frequencies as delta-matched.
_FREQ_TOL = 1e-9


def _same_freq(w1: float, w2: float) -> bool:
    return abs(w1 - w2) <= _FREQ_TOL * max(abs(w1), abs(w2))


def thermal_occupancy(omega: float, temperature: float) -> float:
    """Bose-Einstein mean occupation 1/(e^{hbar w / kB T} - 1)."""
    if not temperature > 0:
        raise ConfigurationError("temperature must be > 0")
    if not omega > 0:
        raise ConfigurationError("omega must be > 0")
    x = hbar * omega / (k_B * temperature)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class InputState:
    """Spectral densities of the incoming photons and matter excitations
    at one frequency, plus the plate temperature and quantization length.

    n_ph1/n_ph2 are input photon-number densities per channel, x_ph the
    complex cross-correlation between the channels; n_dp1/n_dp2/x_dp are
    the analogous matter-excitation quantities.
    """

    n_ph1: float = 0.0
    n_ph2: float = 0.0
    x_ph: complex = 0.0
    n_dp1: float = 0.0
    n_dp2: float = 0.0
    x_dp: complex = 0.0
    temperature: float = 0.0
    length: float = 1.0

    def __post_init__(self):
        for name in ("n_ph1", "n_ph2", "n_dp1", "n_dp2"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        slack = 1e-12
        if abs(self.x_ph) ** 2 > self.n_ph1 * self.n_ph2 * (1 + slack) + slack:
            raise ConfigurationError(
                "photon cross-correlation violates its Cauchy-Schwarz bound")
        if abs(self.x_dp) ** 2 > self.n_dp1 * self.n_dp2 * (1 + slack) + slack:
            raise ConfigurationError(
                "matter cross-correlation violates its Cauchy-Schwarz bound")
        if self.temperature < 0:
            raise ConfigurationError("temperature must be >= 0")
        if not self.length > 0:
            raise ConfigurationError("quantization length must be > 0")

    @classmethod
    def vacuum(cls) -> "InputState":
        return cls()

    @classmethod
    def thermal_plate(cls, omega: float, temperature: float,
                      length: float = 1.0) -> "InputState":
        """Vacuum input, plate in thermal equilibrium."""
        n = length / (2 * math.pi * c_light) * thermal_occupancy(omega, temperature)
        return cls(n_dp1=n, n_dp2=n, temperature=temperature, length=length)

    @classmethod
    def blackbody(cls, omega: float, temperature: float,
                  length: float = 1.0) -> "InputState":
        """Black-body input on both sides and plate at the same temperature."""
        n = length / (2 * math.pi * c_light) * thermal_occupancy(omega, temperature)
        return cls(n_ph1=n, n_ph2=n, n_dp1=n, n_dp2=n,
                   temperature=temperature, length=length)


def output_photon_density(M: TwoPortMatrices, s: InputState):
    """Photon-number densities of the two output channels for a factored
    input-photon/matter state."""
    T, A = M.T, M.A
    n_ph = (s.n_ph1, s.n_ph2)
    n_dp = (s.n_dp1, s.n_dp2)
    out = []
    for i in range(2):
        v = sum(abs(T[i, k]) ** 2 * n_ph[k] + abs(A[i, k]) ** 2 * n_dp[k]
                for k in range(2))
        v += 2.0 * (T[i, 0].conjugate() * T[i, 1] * s.x_ph
                    + A[i, 0].conjugate() * A[i, 1] * s.x_dp).real
        out.append(v)
    return out[0], out[1]


def absorption_coefficient(M: TwoPortMatrices, side: int) -> float:
    """Probability that a photon incident from the given side (1 or 2)
    is absorbed in the plate."""
    if side not in (1, 2):
        raise ConfigurationError("side must be 1 or 2")
    i = side - 1
    return abs(M.A[i, 0]) ** 2 + abs(M.A[i, 1]) ** 2


def one_side_illumination(M: TwoPortMatrices, n_ph1: float):
    """Outputs for a zero-temperature plate lit from side 1 only."""
    if n_ph1 < 0:
        raise ConfigurationError("input density must be >= 0")
    out1 = abs(M.T[0, 0]) ** 2 * n_ph1
    out2 = abs(M.T[1, 0]) ** 2 * n_ph1
    if out1 + out2 > n_ph1 * (1.0 + 1e-9) + 1e-12:
        raise InternalConsistencyError(
            "output exceeds input for passive one-side illumination")
    return out1, out2


def _outer_geometry(stack: LayerStack, omega: float):
    """Outer refractive indices and boundary positions of a plate."""
    n_left = refractive_index(stack.left, omega)
    n_right = refractive_index(stack.right, omega)
    bounds = stack.boundaries()
    return n_left, n_right, bounds[0], bounds[-1]


def input_commutator(pair: str, x: float, xp: float, omega: float,
                     omega_prime: float, stack: LayerStack) -> float:
    """Coefficient of delta(w - w') in an input-operator commutator.

    ``pair`` selects "left" (right-going input on side 1), "right"
    (left-going input on side 3), or "cross"; cross commutators vanish.
    """
    n_left, n_right, x_l, x_r = _outer_geometry(stack, omega)
    if pair == "cross":
        # Inputs from opposite sides are independent variables.
        return 0.0
    if not _same_freq(omega, omega_prime):
        return 0.0
    k = omega / c_light
    if pair == "left":
        if x > x_l or xp > x_l:
            raise RegionError("left-side positions must satisfy x <= left boundary")
        return math.exp(-n_left.gamma * k * abs(x - xp))
    if pair == "right":
        if x < x_r or xp < x_r:
            raise RegionError("right-side positions must satisfy x >= right boundary")
        return math.exp(-n_right.gamma * k * abs(x - xp))
    raise ConfigurationError(f"unknown pair selector {pair!r}")


def output_commutator(pair: str, x: float, xp: float, omega: float,
                      M: TwoPortMatrices, stack: LayerStack) -> complex:
    """Coefficient of delta(w - w') in an output-operator commutator.

    ``pair``: "left" for the left outgoing operator with its own adjoint,
    "right" for the right one, "cross" for right outgoing vs. adjoint of
    the left outgoing.  Positions use the plate-centered coordinates of
    ``stack`` (left boundary at -l/2, right at +l/2 with l the total
    thickness).  For transparent surroundings the same-side kernels are 1
    and the cross kernel 0.
    """
    n_left, n_right, x_l, x_r = _outer_geometry(stack, omega)
    T, A = M.T, M.A
    k = omega / c_light
    l = stack.total_thickness

    if pair == "left":
        if x > x_l or xp > x_l:
            raise RegionError("left-side positions must satisfy x <= left boundary")
        g, b = n_left.gamma, n_left.beta
        rowsum = (abs(T[0, 0]) ** 2 + abs(T[0, 1]) ** 2
                  + abs(A[0, 0]) ** 2 + abs(A[0, 1]) ** 2) - 1.0
        corr = 1j * (g / b) * (
            T[0, 0] * (cmath.exp(1j * b * k * l) - cmath.exp(-2j * b * k * xp))
            - T[0, 0].conjugate()
            * (cmath.exp(-1j * b * k * l) - cmath.exp(2j * b * k * x)))
        return (math.exp(-g * k * abs(x - xp))
                + math.exp(-g * k * (abs(x - x_l) + abs(xp - x_l)))
                * (rowsum + corr))

    if pair == "right":
        if x < x_r or xp < x_r:
            raise RegionError("right-side positions must satisfy x >= right boundary")
        g, b = n_right.gamma, n_right.beta
        rowsum = (abs(T[1, 0]) ** 2 + abs(T[1, 1]) ** 2
                  + abs(A[1, 0]) ** 2 + abs(A[1, 1]) ** 2) - 1.0
        corr = 1j * (g / b) * (
            T[1, 1] * (cmath.exp(1j * b * k * l) - cmath.exp(2j * b * k * xp))
            - T[1, 1].conjugate()
            * (cmath.exp(-1j * b * k * l) - cmath.exp(-2j * b * k * x)))
        return (math.exp(-g * k * abs(x - xp))
                + math.exp(-g * k * (abs(x - x_r) + abs(xp - x_r)))
                * (rowsum + corr))

    if pair == "cross":
        # right outgoing operator at x, adjoint of left outgoing at xp
        if x < x_r:
            raise RegionError("cross pair needs x on the right side")
        if xp > x_l:
            raise RegionError("cross pair needs xp on the left side")
        g1, b1 = n_left.gamma, n_left.beta
        g3, b3 = n_right.gamma, n_right.beta
        ortho = (T[0, 0].conjugate() * T[1, 0] + T[0, 1].conjugate() * T[1, 1]
                 + A[0, 0].conjugate() * A[1, 0] + A[0, 1].conjugate() * A[1, 1])
        corr = (1j * T[1, 0] * (g1 / b1)
                * (cmath.exp(1j * b1 * k * l) - cmath.exp(-2j * b1 * k * xp))
                + 1j * T[0, 1].conjugate() * (g3 / b3)
                * (cmath.exp(-2j * b3 * k * x) - cmath.exp(-1j * b3 * k * l)))
        return (math.exp(-g1 * k * abs(xp - x_l) - g3 * k * abs(x - x_r))
                * (ortho + corr))

    raise ConfigurationError(f"unknown pair selector {pair!r}")


def langevin_kernels(medium: MediumModel, omega: float, x: float, xp: float,
                     direction: str = "+"):
    """Langevin noise-source kernels of a homogeneous medium.

    Returns (ff, fa): ff is the coefficient of delta(x - x') delta(w - w')
    in the noise-noise commutator; fa is the signed, step-gated kernel of
    the noise source against the amplitude operator's adjoint, for the
    wave running in ``direction`` ("+" right, "-" left).
    """
    n = refractive_index(medium, omega)
    k = omega / c_light
    ff = 2.0 * n.gamma * k
    decay = 2.0 * n.gamma * k * math.exp(-n.gamma * k * abs(xp - x))
    if direction == "+":
        fa = decay if xp > x else 0.0
    elif direction == "-":
        fa = -decay if x > xp else 0.0
    else:
        raise ConfigurationError(f"unknown direction {direction!r}")
    return ff, fa


def thermal_matter_correlation(p: int, q: int, indices, frequencies,
                               temperature: float) -> float:
    """Normally ordered thermal expectation of p matter creation and q
    matter destruction operators (delta coefficients only).

    ``indices`` and ``frequencies`` list the channel index (1 or 2) and
    frequency of each operator, creation first.  Nonzero only when p = q
    and the sorted creation/destruction lists pair up channel by channel
    and frequency by frequency; equal frequencies within the creation
    group make the expression vanish by convention.
    """
    if p < 0 or q < 0:
        raise ConfigurationError("operator counts must be >= 0")
    if len(indices) != p + q or len(frequencies) != p + q:
        raise ConfigurationError("index/frequency lists must have length p + q")
    if p != q:
        return 0.0
    if p == 0:
        return 1.0
    create = sorted(zip(frequencies[:p], indices[:p]), key=lambda t: t[0])
    destroy = sorted(zip(frequencies[p:], indices[p:]), key=lambda t: t[0])
    for a, b in zip(create, create[1:]):
        if a[0] == b[0]:
            return 0.0
    value = 1.0
    for (wc, ic), (wd, jd) in zip(create, destroy):
        if ic != jd or not _same_freq(wc, wd):
            return 0.0
        value *= thermal_occupancy(wc, temperature)
    return value


def output_correlation(m: int, n: int, indices, frequencies, matrices,
                       input_correlation, temperature: float,
                       length: float = 1.0) -> complex:
    """Normally ordered output-photon correlation of order (m, n).

    ``indices``/``frequencies`` give the output channel (1 or 2) and
    frequency of each operator, the m creation operators first.
    ``matrices`` maps a frequency to the plate's TwoPortMatrices;
    ``input_correlation(create, destroy)`` must return the input-photon
    expectation for lists of (channel, frequency) pairs, including any
    frequency-delta density factors.  The plate is thermal at
    ``temperature``; each matter frequency delta contributes a factor
    length/(2 pi c).
    """
    if m < 0 or n < 0 or m > 2 or n > 2 or m + n > 4:
        raise UnsupportedOrderError("correlation order capped at m, n <= 2")
    total = m + n
    if len(indices) != total or len(frequencies) != total:
        raise ConfigurationError("index/frequency lists must have length m + n")
    if total == 0:
        return 1.0 + 0.0j

    mats = {w: matrices(w) for w in set(frequencies)}
    density = length / (2 * math.pi * c_light)

    result = 0.0 + 0.0j
    # Each slot is expanded into its two channels and two excitation kinds
    # (input photon / matter), then the photon and matter expectations
    # factorize for the thermal, uncorrelated plate.
    for kinds in itertools.product((0, 1), repeat=total):  # 0 photon, 1 matter
        for chans in itertools.product((1, 2), repeat=total):
            coeff = 1.0 + 0.0j
            ph_create, ph_destroy = [], []
            dp_create_i, dp_create_w = [], []
            dp_destroy_i, dp_destroy_w = [], []
            for mu in range(total):
                i_out = indices[mu]
                w = frequencies[mu]
                kch = chans[mu]
                Mw = mats[w]
                fac = (Mw.T if kinds[mu] == 0 else Mw.A)[i_out - 1, kch - 1]
                if mu < m:
                    coeff *= fac.conjugate()
                    if kinds[mu] == 0:
                        ph_create.append((kch, w))
                    else:
                        dp_create_i.append(kch)
                        dp_create_w.append(w)
                else:
                    coeff *= fac
                    if kinds[mu] == 0:
                        ph_destroy.append((kch, w))
                    else:
                        dp_destroy_i.append(kch)
                        dp_destroy_w.append(w)
            if coeff == 0:
                continue
            p = len(dp_create_i)
            q = len(dp_destroy_i)
            if p != q:
                continue
            if p > 0:
                if temperature <= 0:
                    continue
                gamma_val = thermal_matter_correlation(
                    p, q, dp_create_i + dp_destroy_i,
                    dp_create_w + dp_destroy_w, temperature)
                gamma_val *= density ** p
                if gamma_val == 0.0:
                    continue
            else:
                gamma_val = 1.0
            c_val = input_correlation(ph_create, ph_destroy)
            if c_val == 0:
                continue
            result += coeff * gamma_val * c_val
    return result


def first_order_field_correlation(x1: float, t1: float, x2: float, t2: float,
                                  channels, matrices, state, omega_grid,
                                  area: float = 1.0) -> complex:
    """First-order field correlation <E^(-)(x1,t1) E^(+)(x2,t2)> of the
    outgoing radiation for a stationary (delta-correlated) input.

    ``channels`` is the pair (i1, i2) of output channels; ``matrices`` and
    ``state`` map a frequency to the plate matrices and the InputState;
    the double frequency integral collapses on the stationarity delta to a
    single quadrature over ``omega_grid``.
    """
    i1, i2 = channels
    if i1 not in (1, 2) or i2 not in (1, 2):
        raise ConfigurationError("channels must be 1 or 2")
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size < 2 or not np.all(np.diff(grid) > 0):
        raise ConfigurationError("omega grid must be increasing with >= 2 points")

    eta = {1: -1.0, 2: 1.0}
    tau1 = t1 + eta[i1] * x1 / c_light
    tau2 = t2 + eta[i2] * x2 / c_light

    vals = np.empty(grid.size, dtype=complex)
    length = None
    for idx, w in enumerate(grid):
        s = state(w)
        if length is None:
            length = s.length
        elif s.length != length:
            raise UnsupportedStateError(
                "state is not stationary: quantization length varies with frequency")
        M = matrices(w)
        dens = _cross_density(M, s, i1, i2)
        vals[idx] = w * cmath.exp(1j * w * (tau1 - tau2)) * dens
    # Undo the discrete-spectrum factor so the result is L-independent.
    prefac = hbar / (4 * math.pi * c_light * epsilon_0 * area)
    prefac *= 2 * math.pi * c_light / length
    return prefac * trapezoid(vals, grid)


def _cross_density(M: TwoPortMatrices, s: InputState, i1: int, i2: int) -> complex:
    """<a'_{i1}^dagger a'_{i2}> density at one frequency."""
    if i1 == i2:
        return output_photon_density(M, s)[i1 - 1]
    T, A = M.T, M.A
    a, b = i1 - 1, i2 - 1
    n_ph = (s.n_ph1, s.n_ph2)
    n_dp = (s.n_dp1, s.n_dp2)
    v = sum(T[a, k].conjugate() * T[b, k] * n_ph[k]
            + A[a, k].conjugate() * A[b, k] * n_dp[k] for k in range(2))
    v += (T[a, 0].conjugate() * T[b, 1] * s.x_ph
          + T[a, 1].conjugate() * T[b, 0] * s.x_ph.conjugate()
          + A[a, 0].conjugate() * A[b, 1] * s.x_dp
          + A[a, 1].conjugate() * A[b, 0] * s.x_dp.conjugate())
    return v
