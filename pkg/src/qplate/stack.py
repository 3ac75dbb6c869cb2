"""Multilayer plates by induction: starting from the single-slab matrices,
layers are appended on the right one at a time.  Each step rewrites the
known input-output relation so the appended layer's propagation, its noise
channels, and the new outer interface can be folded in, then merges the
accumulated noise channels back into a single orthonormal pair.

Coordinates place the whole plate symmetrically around the origin; the
single-slab base case is translated to its actual center by pure phase
factors on the amplitude operators.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as c_light

from .errors import ConfigurationError, InternalConsistencyError, OpaqueStackError
from .media import MediumModel, RefractiveIndex, refractive_index
from .slab import SlabConfig, TwoPortMatrices, single_slab_A, single_slab_T

__all__ = [
    "LayerStack",
    "step_PQ",
    "step_alpha",
    "step_Dinv",
    "step_S",
    "assemble_step",
    "merge_noise",
    "stack_matrices",
    "conservation_residuals",
]

# Transmission magnitude below which a partial stack is treated as opaque:
# the induction step needs to divide by it.
_OPAQUE = 1e-14

# A layer with alpha_+ below this carries no resolvable noise power and is
# treated as lossless (its D^-1 factor is the zero matrix).
_LOSSLESS_ALPHA = 2e-12


@dataclass(frozen=True)
class LayerStack:
    """Two semi-infinite outer media around an ordered list of layers.

    ``layers`` is a sequence of (medium, thickness) pairs, left to right.
    """

    left: MediumModel
    right: MediumModel
    layers: tuple

    def __post_init__(self):
        layers = tuple((m, float(l)) for m, l in self.layers)
        if len(layers) < 1:
            raise ConfigurationError("a plate needs at least one layer")
        for _, l in layers:
            if not l > 0:
                raise ConfigurationError("layer thicknesses must be > 0")
        object.__setattr__(self, "layers", layers)

    @property
    def total_thickness(self) -> float:
        return sum(l for _, l in self.layers)

    def boundaries(self):
        """Interface positions x_1 < ... < x_{N-1}, plate centered at 0."""
        xs = [-0.5 * self.total_thickness]
        for _, l in self.layers:
            xs.append(xs[-1] + l)
        return xs


def step_PQ(T_prev: np.ndarray, A_prev: np.ndarray):
    """Re-express the known relation with the right-going/right-boundary
    operators isolated, giving the (P, Q) pair the induction builds on."""
    T = np.asarray(T_prev, dtype=complex)
    A = np.asarray(A_prev, dtype=complex)
    t12 = T[0, 1]
    if abs(t12) < _OPAQUE:
        raise OpaqueStackError("partial stack transmits nothing; cannot invert")
    P = np.array([
        [T[1, 1], T[1, 0] * t12 - T[1, 1] * T[0, 0]],
        [1.0, -T[0, 0]],
    ], dtype=complex) / t12
    Q = np.array([
        [A[1, 0] * t12 - A[0, 0] * T[1, 1], A[1, 1] * t12 - A[0, 1] * T[1, 1]],
        [-A[0, 0], -A[0, 1]],
    ], dtype=complex) / t12
    return P, Q


def step_alpha(n: RefractiveIndex, omega: float, x_left: float, x_right: float):
    """Covariances (alpha_+, alpha_-, alpha_0) of the appended layer's
    accumulated noise, for the layer spanning [x_left, x_right]."""
    if not x_right > x_left:
        raise ConfigurationError("layer boundaries out of order")
    k = omega / c_light
    l = x_right - x_left
    x = n.gamma * k * l
    alpha_p = -math.expm1(-2.0 * x)
    try:
        alpha_m = math.expm1(2.0 * x)
    except OverflowError:
        alpha_m = math.inf
    alpha_0 = (-2.0 * (n.gamma / n.beta)
               * cmath.exp(-1j * n.beta * k * (x_left + x_right))
               * math.sin(n.beta * k * l))
    return alpha_p, alpha_m, alpha_0


def _whitening_inverse(w_plus: float, w_minus: float, w_0: complex) -> np.ndarray:
    """Inverse of the whitening matrix for covariance [[w+, w0],[w0*, w-]].

    Built in closed form so the near-singular lossless regime never goes
    through a numeric matrix inversion.  The result X satisfies
    X X^dagger = [[w+, w0],[w0*, w-]].
    """
    m = abs(w_0)
    g = math.sqrt(w_plus * w_minus)
    if w_plus * w_minus < m * m * (1.0 - 1e-12):
        raise InternalConsistencyError(
            "noise covariance violates its Cauchy-Schwarz bound; "
            "upstream matrices are inconsistent"
        )
    phase = cmath.exp(-1j * cmath.phase(w_0)) if w_0 != 0 else 1.0
    hi = 0.5 * (g + m)
    lo = max(0.5 * (g - m), 0.0)  # clamp rounding at the Cauchy-Schwarz edge
    s = math.sqrt(w_plus / w_minus)
    return np.array([
        [math.sqrt(s * hi), -math.sqrt(s * lo)],
        [phase * math.sqrt(hi / s), phase * math.sqrt(lo / s)],
    ], dtype=complex)


def step_Dinv(alpha_p: float, alpha_m: float, alpha_0: complex) -> np.ndarray:
    """Closed-form D^-1 feeding the appended layer's noise into the output.

    For a (near-)lossless layer the noise power vanishes and the exact
    limit is the zero matrix, returned as a sentinel instead of dividing
    by vanishing alphas.
    """
    if alpha_p < _LOSSLESS_ALPHA or alpha_m <= 0.0:
        return np.zeros((2, 2), dtype=complex)
    return _whitening_inverse(alpha_p, alpha_m, alpha_0)


def step_S(n_in: RefractiveIndex, n_out: RefractiveIndex,
           omega: float, x_boundary: float) -> np.ndarray:
    """Interface matrix linking amplitude operators across x_boundary,
    with the amplitude renormalization between the two media."""
    k = omega / c_light
    amp = math.sqrt(n_in.beta / n_out.beta) / (2.0 * n_in.n)
    plus = (n_out.n + n_in.n) * amp
    minus = (n_out.n - n_in.n) * amp
    ph_d = cmath.exp(-1j * (n_out.beta - n_in.beta) * k * x_boundary)
    ph_s = cmath.exp(-1j * (n_out.beta + n_in.beta) * k * x_boundary)
    return np.array([
        [plus * ph_d, minus * ph_s],
        [minus / ph_s, plus / ph_d],
    ], dtype=complex)


def assemble_step(P, Q, R, S, Dinv):
    """One induction step: fold propagation R, interface S, and the layer
    noise D^-1 into (T_new, A_old_channels, A_new_channels)."""
    M = S @ R @ P
    m21 = M[1, 0]
    if abs(m21) < _OPAQUE:
        raise OpaqueStackError("stack with appended layer transmits nothing")
    SRQ = S @ R @ Q
    SD = S @ Dinv
    T_new = np.array([
        [-M[1, 1], 1.0],
        [M[0, 1] * m21 - M[0, 0] * M[1, 1], M[0, 0]],
    ], dtype=complex) / m21
    A_old = np.array([
        [-SRQ[1, 0], -SRQ[1, 1]],
        [SRQ[0, 0] * m21 - SRQ[1, 0] * M[0, 0],
         SRQ[0, 1] * m21 - SRQ[1, 1] * M[0, 0]],
    ], dtype=complex) / m21
    A_new = np.array([
        [-SD[1, 0], -SD[1, 1]],
        [SD[0, 0] * m21 - SD[1, 0] * M[0, 0],
         SD[0, 1] * m21 - SD[1, 1] * M[0, 0]],
    ], dtype=complex) / m21
    return T_new, A_old, A_new


def merge_noise(A_old: np.ndarray, A_new: np.ndarray):
    """Collapse four noise channels into an orthonormal pair.

    Returns (U, A_merged) where U whitens the combined noise and
    A_merged = U^-1 carries it into the output; A_merged A_merged^dagger
    equals A_old A_old^dagger + A_new A_new^dagger.
    """
    cov = A_old @ A_old.conj().T + A_new @ A_new.conj().T
    mu_p = cov[0, 0].real
    mu_m = cov[1, 1].real
    mu_0 = cov[0, 1]
    if mu_p <= 0.0 and mu_m <= 0.0:
        z = np.zeros((2, 2), dtype=complex)
        return z, z
    if mu_p * mu_m < abs(mu_0) ** 2 * (1.0 - 1e-12):
        raise InternalConsistencyError(
            "merged noise covariance violates its Cauchy-Schwarz bound"
        )
    # One vanishing row: the surviving channel is split evenly (continuous
    # limit of the generic formula); the dead row is zero.
    tiny = 1e-280
    if mu_m <= tiny:
        a = np.array([[math.sqrt(mu_p / 2), -math.sqrt(mu_p / 2)],
                      [0.0, 0.0]], dtype=complex)
        return np.zeros((2, 2), dtype=complex), a
    if mu_p <= tiny:
        a = np.array([[0.0, 0.0],
                      [math.sqrt(mu_m / 2), math.sqrt(mu_m / 2)]], dtype=complex)
        return np.zeros((2, 2), dtype=complex), a
    a_merged = _whitening_inverse(mu_p, mu_m, mu_0)
    u = np.linalg.inv(a_merged)
    return u, a_merged


def _translate(T, A, n_left, n_right, omega, center):
    """Move a plate described around the origin to the given center by
    phase-rotating the outer amplitude operators."""
    k = omega / c_light
    phi = np.diag([cmath.exp(1j * n_left.beta * k * center),
                   cmath.exp(-1j * n_right.beta * k * center)])
    return phi @ T @ phi, phi @ A


def stack_matrices(stack: LayerStack, omega: float) -> TwoPortMatrices:
    """Characteristic transformation and absorption matrices of a plate.

    Base case is the first layer as a single slab (with the second layer's
    medium, or the right outer medium, as its right neighbor); each further
    layer is appended by one induction step.
    """
    media = [stack.left] + [m for m, _ in stack.layers] + [stack.right]
    bounds = stack.boundaries()
    nlayers = len(stack.layers)

    l1 = stack.layers[0][1]
    base = SlabConfig(media[0], media[1], media[2], l1)
    T = single_slab_T(base, omega)
    A = single_slab_A(base, omega)
    n_left = refractive_index(media[0], omega)
    n_next = refractive_index(media[2], omega)
    T, A = _translate(T, A, n_left, n_next, omega, 0.5 * (bounds[0] + bounds[1]))

    for j in range(2, nlayers + 1):
        n_layer = refractive_index(media[j], omega)
        n_out = refractive_index(media[j + 1], omega)
        try:
            P, Q = step_PQ(T, A)
            k = omega / c_light
            damp = math.exp(-n_layer.gamma * k * (bounds[j] - bounds[j - 1]))
            if damp < _OPAQUE:
                raise OpaqueStackError(
                    "appended layer absorbs essentially all transmission")
            alpha_p, alpha_m, alpha_0 = step_alpha(
                n_layer, omega, bounds[j - 1], bounds[j])
            Dinv = step_Dinv(alpha_p, alpha_m, alpha_0)
            R = np.diag([damp, 1.0 / damp]).astype(complex)
            S = step_S(n_layer, n_out, omega, bounds[j])
            T, A_old, A_new = assemble_step(P, Q, R, S, Dinv)
            _, A = merge_noise(A_old, A_new)
        except OpaqueStackError as exc:
            raise OpaqueStackError(str(exc), layer=j) from None
    return TwoPortMatrices(T, A, omega)


def conservation_residuals(M: TwoPortMatrices):
    """Residuals of the probability bookkeeping for lossless surroundings.

    Returns (row1, row2, cross): the two row sums |T_i1|^2 + |T_i2|^2 +
    |A_i1|^2 + |A_i2|^2 minus 1, and the magnitude of the cross-row
    orthogonality sum, all of which vanish for a plate in a transparent
    environment.
    """
    T, A = M.T, M.A
    row1 = abs(T[0, 0]) ** 2 + abs(T[0, 1]) ** 2 \
        + abs(A[0, 0]) ** 2 + abs(A[0, 1]) ** 2 - 1.0
    row2 = abs(T[1, 0]) ** 2 + abs(T[1, 1]) ** 2 \
        + abs(A[1, 0]) ** 2 + abs(A[1, 1]) ** 2 - 1.0
    cross = abs(T[0, 0] * T[1, 0].conjugate() + T[0, 1] * T[1, 1].conjugate()
                + A[0, 0] * A[1, 0].conjugate() + A[0, 1] * A[1, 1].conjugate())
    return row1, row2, cross
