"""Frequency-dependent complex permittivity models and refractive indices.

Three medium variants are supported: exact vacuum, a single-resonance
(Lorentz oscillator) model, and tabulated (beta, gamma) samples on a
strictly increasing frequency grid.  All frequencies are angular (rad/s).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import (
    ConfigurationError,
    OutOfRangeError,
    TabulatedParseError,
    UnsupportedMediumError,
)

__all__ = [
    "MediumModel",
    "Vacuum",
    "SingleResonance",
    "Tabulated",
    "RefractiveIndex",
    "lossless",
    "permittivity",
    "refractive_index",
    "kramers_kronig_residual",
    "load_tabulated",
    "dump_tabulated",
]


@dataclass(frozen=True)
class RefractiveIndex:
    """Complex refractive index n = beta + i*gamma with gamma >= 0."""

    beta: float
    gamma: float

    @property
    def n(self) -> complex:
        return complex(self.beta, self.gamma)

    def __complex__(self) -> complex:
        return complex(self.beta, self.gamma)


class MediumModel:
    """Base class; subclasses provide ``epsilon(omega)``."""

    def epsilon(self, omega: float) -> complex:
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(MediumModel):
    """epsilon == 1 exactly at every frequency."""

    def epsilon(self, omega: float) -> complex:
        return 1.0 + 0.0j


@dataclass(frozen=True)
class SingleResonance(MediumModel):
    """Lorentz-oscillator permittivity 1 + w1^2 / (w0^2 - w^2 - i*G*w)."""

    omega0: float
    omega1: float
    damping: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ConfigurationError("resonance frequency omega0 must be > 0")
        if self.omega1 < 0:
            raise ConfigurationError("coupling strength omega1 must be >= 0")
        if not self.damping > 0:
            raise ConfigurationError("damping constant must be > 0")

    def epsilon(self, omega: float) -> complex:
        w0, w1, g = self.omega0, self.omega1, self.damping
        return 1.0 + w1 * w1 / complex(w0 * w0 - omega * omega, -g * omega)


@dataclass(frozen=True)
class Tabulated(MediumModel):
    """Linearly interpolated (beta, gamma) samples; no extrapolation."""

    grid: tuple = field(repr=False)
    beta: tuple = field(repr=False)
    gamma: tuple = field(repr=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        gamma = np.asarray(self.gamma, dtype=float)
        if grid.size < 2:
            raise ConfigurationError("tabulated model needs at least 2 samples")
        if grid.size != beta.size or grid.size != gamma.size:
            raise ConfigurationError("grid/beta/gamma length mismatch")
        if not np.all(np.diff(grid) > 0):
            raise ConfigurationError("tabulated grid must be strictly increasing")
        if not np.all(beta > 0):
            raise ConfigurationError("tabulated beta samples must be > 0")
        if not np.all(gamma >= 0):
            raise ConfigurationError("tabulated gamma samples must be >= 0")
        object.__setattr__(self, "grid", tuple(grid))
        object.__setattr__(self, "beta", tuple(beta))
        object.__setattr__(self, "gamma", tuple(gamma))

    def index_at(self, omega: float) -> complex:
        grid = self.grid
        if omega < grid[0] or omega > grid[-1]:
            raise OutOfRangeError(
                f"omega={omega!r} outside tabulated range "
                f"[{grid[0]!r}, {grid[-1]!r}]; extrapolation is not supported"
            )
        b = float(np.interp(omega, grid, self.beta))
        g = float(np.interp(omega, grid, self.gamma))
        return complex(b, g)

    def epsilon(self, omega: float) -> complex:
        n = self.index_at(omega)
        return n * n


@dataclass(frozen=True)
class _LosslessView(MediumModel):
    """Wrap another model, clamping absorption to zero (gamma = 0).

    Evaluates the wrapped model's real refractive-index part and squares
    it, so epsilon is real and the branch gamma = 0 is exact.  Only valid
    where the wrapped model has Re(epsilon) > 0.
    """

    base: MediumModel

    def epsilon(self, omega: float) -> complex:
        n = refractive_index(self.base, omega)
        return complex(n.beta * n.beta, 0.0)


def lossless(model: MediumModel) -> MediumModel:
    """Return a view of *model* with the absorption clamped to zero."""
    if isinstance(model, Vacuum):
        return model
    return _LosslessView(model)


def permittivity(model: MediumModel, omega: float) -> complex:
    """Complex permittivity of *model* at angular frequency *omega*."""
    if not omega > 0:
        raise ConfigurationError("omega must be > 0")
    return model.epsilon(omega)


def refractive_index(model: MediumModel, omega: float) -> RefractiveIndex:
    """Square root of the permittivity on the branch with gamma >= 0.

    A passive medium damps, so the imaginary part of n is never negative;
    media with Im(epsilon) < 0 (gain) are rejected.
    """
    eps = permittivity(model, omega)
    if eps.imag < 0:
        raise UnsupportedMediumError(
            f"gain medium (Im eps = {eps.imag!r} < 0) is not supported"
        )
    if eps.imag == 0.0:
        if eps.real <= 0:
            raise UnsupportedMediumError(
                f"cannot take a passive index for real eps = {eps.real!r} <= 0"
            )
        return RefractiveIndex(math.sqrt(eps.real), 0.0)
    n = complex(np.sqrt(complex(eps)))
    if n.imag < 0:
        n = -n
    return RefractiveIndex(n.real, n.imag)


def kramers_kronig_residual(model: MediumModel, grid) -> float:
    """Causality certification metric.

    Computes max over interior grid points of
    ``|eps_r(w) - 1 - KK[eps_i](w)|`` where KK is a principal-value
    quadrature of the standard dispersion integral over the grid range.
    Purely advisory: nothing is corrected.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 16:
        raise ConfigurationError("Kramers-Kronig grid too coarse (< 16 points)")
    if not np.all(np.diff(grid) > 0):
        raise ConfigurationError("Kramers-Kronig grid must be strictly increasing")

    eps = np.array([permittivity(model, w) for w in grid])
    eps_r = eps.real
    eps_i = eps.imag
    if np.all(eps_i == 0.0):
        # KK transform of zero is zero.
        return float(np.max(np.abs(eps_r - 1.0)))

    f = grid * eps_i  # numerator of the dispersion integrand
    # df/dw on the grid, used for the limiting integrand value at w' = w.
    dfdw = np.gradient(f, grid)

    a, b = grid[0], grid[-1]
    worst = 0.0
    for k in range(1, grid.size - 1):
        w = grid[k]
        # Singularity-subtracted integrand: [f(w') - f(w)] / (w'^2 - w^2).
        denom = grid * grid - w * w
        h = np.empty_like(f)
        mask = grid != w
        h[mask] = (f[mask] - f[k]) / denom[mask]
        h[~mask] = dfdw[k] / (2.0 * w)
        integral = trapezoid(h, grid)
        # Closed-form principal value of 1/(w'^2 - w^2) over [a, b].
        pv = math.log(((b - w) * (a + w)) / ((b + w) * (w - a))) / (2.0 * w)
        kk = (2.0 / math.pi) * (integral + f[k] * pv)
        worst = max(worst, abs(eps_r[k] - 1.0 - kk))
    return worst


def load_tabulated(source) -> Tabulated:
    """Read a tabulated-index stream.

    UTF-8 text; ``#`` starts a comment line; data lines are
    ``omega beta gamma`` with omega in rad/s strictly ascending.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    grid, beta, gamma = [], [], []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TabulatedParseError(
                f"expected 3 columns (omega beta gamma), got {len(parts)}",
                line=lineno,
            )
        try:
            w, b, g = (float(p) for p in parts)
        except ValueError as exc:
            raise TabulatedParseError(str(exc), line=lineno) from None
        if grid and w <= grid[-1]:
            raise TabulatedParseError(
                f"frequency {w!r} not above previous value {grid[-1]!r}",
                line=lineno,
            )
        if g < 0:
            raise TabulatedParseError(f"negative gamma {g!r}", line=lineno)
        if b <= 0:
            raise TabulatedParseError(f"non-positive beta {b!r}", line=lineno)
        grid.append(w)
        beta.append(b)
        gamma.append(g)
    if len(grid) < 2:
        raise TabulatedParseError(
            f"need at least 2 data lines, found {len(grid)}"
        )
    return Tabulated(tuple(grid), tuple(beta), tuple(gamma))


def dump_tabulated(model: Tabulated, stream) -> None:
    """Write *model* in the tabulated-index format (17 significant digits)."""
    for w, b, g in zip(model.grid, model.beta, model.gamma):
        stream.write(f"{w:.16e} {b:.16e} {g:.16e}\n")
