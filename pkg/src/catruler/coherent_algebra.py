"""Exact closed-form algebra for coherent states of a single optical mode.

A coherent state |g> of complex amplitude g has mean photon number |g|^2
and overlaps

    <t|g> = exp[-(|t|^2 + |g|^2)/2 + conj(t) g]

with any other coherent state.  Everything in this module is built from
that one identity: norms of finite superpositions sum_k c_k |g_k> come
from the Gram matrix, displacements act term by term, and homodyne
threshold probabilities reduce to Gaussian integrals of pairwise terms.

Quadrature convention
---------------------
The amplitude quadrature x is fixed so that <x> for |g> equals
mean_scale * Re(g).  Requiring the position-space wave functions to be
normalized *and* to reproduce the overlap identity through
integral(conj(psi_t) psi_g) forces the vacuum variance to equal
mean_scale^2 / 4; the convention is unique up to a global phase.  With
the canonical mean_scale = 1 the wave function is

    psi_g(x) = (2/pi)^(1/4) exp(-x^2 + 2 g x - g^2/2 - |g|^2/2)

whose modulus squared is a Gaussian of mean Re(g) and variance 1/4.
Fringe positions and widths depend only on means and relative phases, so
results are invariant under the admissible rescalings of mean_scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import IntegrationError, NormalizationError

# Imaginary residue of a Hermitian quadratic form above this (relative)
# level signals corrupted coefficients rather than rounding noise.
IMAG_RESIDUE_LIMIT = 1e-9
# Norm^2 values in [-NORM_CLAMP, 0) clamp to 0; anything more negative is
# an error.  Gram matrices of near-parallel coherent states are
# ill-conditioned, so small negatives are expected.
NORM_CLAMP = 1e-12
# The two threshold-probability evaluation paths must agree to this.
DUAL_PATH_TOLERANCE = 1e-8


def _require_finite_complex(value: complex, name: str) -> complex:
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class QuadratureConvention:
    """Scaling of the amplitude quadrature.

    mean_scale: <x> for |g> is mean_scale * Re(g).
    variance:   vacuum variance of x; self-consistency with the coherent
                overlap formula forces variance == mean_scale^2 / 4.
    """

    mean_scale: float = 1.0
    variance: float = 0.25

    def __post_init__(self):
        if not (self.mean_scale > 0 and math.isfinite(self.mean_scale)):
            raise ValueError("mean_scale must be positive and finite")
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError("variance must be positive and finite")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def require_self_consistent(self) -> None:
        """Reject conventions that cannot reproduce the overlap identity."""
        forced = self.mean_scale**2 / 4.0
        if abs(self.variance - forced) > 1e-12 * max(1.0, forced):
            raise ValueError(
                "inconsistent quadrature convention: variance must equal "
                f"mean_scale^2/4 = {forced!r}, got {self.variance!r}"
            )


CANONICAL_CONVENTION = QuadratureConvention()


@dataclass(frozen=True)
class CoherentSuperposition:
    """Finite weighted sum of coherent states, sum_k c_k |g_k>.

    terms holds (coefficient, amplitude) pairs.  The state is immutable;
    all operations return new instances.
    """

    terms: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        if len(self.terms) == 0:
            raise ValueError("superposition must contain at least one term")
        cleaned = []
        for k, (c, g) in enumerate(self.terms):
            c = _require_finite_complex(c, f"coefficient[{k}]")
            g = _require_finite_complex(g, f"amplitude[{k}]")
            cleaned.append((c, g))
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def single(cls, gamma: complex, coefficient: complex = 1.0) -> "CoherentSuperposition":
        return cls(((coefficient, gamma),))

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([g for _, g in self.terms], dtype=complex)

    def scaled(self, factor: complex) -> "CoherentSuperposition":
        return CoherentSuperposition(tuple((c * factor, g) for c, g in self.terms))

    def normalized(self) -> "CoherentSuperposition":
        n2 = norm_squared(self)
        if n2 <= 0.0:
            raise NormalizationError("cannot normalize a zero-norm superposition")
        return self.scaled(1.0 / math.sqrt(n2))


def overlap(tau: complex, gamma: complex) -> complex:
    """Coherent-state overlap <tau|gamma>; |result| <= 1 always."""
    tau = _require_finite_complex(tau, "tau")
    gamma = _require_finite_complex(gamma, "gamma")
    return complex(
        np.exp(-0.5 * (abs(tau) ** 2 + abs(gamma) ** 2) + np.conj(tau) * gamma)
    )


def _overlap_matrix(amps: np.ndarray) -> np.ndarray:
    a2 = np.abs(amps) ** 2
    return np.exp(-0.5 * (a2[:, None] + a2[None, :]) + np.conj(amps)[:, None] * amps[None, :])


def _hermitian_value(coeffs: np.ndarray, kernel: np.ndarray, what: str) -> float:
    """conj(c) . K . c for Hermitian K, with an imaginary-residue check."""
    value = complex(np.conj(coeffs) @ kernel @ coeffs)
    scale = max(1.0, float(np.sum(np.abs(coeffs) ** 2)))
    if abs(value.imag) > IMAG_RESIDUE_LIMIT * scale:
        raise NormalizationError(
            f"{what} has imaginary residue {value.imag:.3e} (scale {scale:.3e}); "
            "coefficients look corrupted"
        )
    return value.real


def norm_squared(s: CoherentSuperposition) -> float:
    """<s|s> via the Gram matrix; tiny negatives clamp to zero."""
    value = _hermitian_value(s.coefficients, _overlap_matrix(s.amplitudes), "norm^2")
    scale = max(1.0, float(np.sum(np.abs(s.coefficients) ** 2)))
    if value < -NORM_CLAMP * scale:
        raise NormalizationError(f"norm^2 = {value!r} is negative beyond tolerance")
    return max(value, 0.0)


def displace(s: CoherentSuperposition, d: complex) -> CoherentSuperposition:
    """Phase-space displacement by d: each |g> -> e^{i Im(d conj(g))} |g + d>.

    Unitary, so the norm is preserved exactly; for real d and g the phase
    factor is identically 1.
    """
    d = _require_finite_complex(d, "d")
    terms = []
    for c, g in s.terms:
        # (d conj(g) - conj(d) g)/2 is purely imaginary; build it as such
        # so real-amplitude displacements pick up no spurious phase.
        phase = 1j * (d * np.conj(g)).imag
        terms.append((c * complex(np.exp(phase)), g + d))
    return CoherentSuperposition(tuple(terms))


def beamsplitter(gamma_a: complex, gamma_b: complex, mix_angle: float) -> tuple[complex, complex]:
    """Two-mode beamsplitter action on coherent amplitudes.

    |g>_a |b>_b -> |cos(t) g + i sin(t) b>_a |cos(t) b + i sin(t) g>_b,
    which conserves |g|^2 + |b|^2.
    """
    gamma_a = _require_finite_complex(gamma_a, "gamma_a")
    gamma_b = _require_finite_complex(gamma_b, "gamma_b")
    if not math.isfinite(mix_angle):
        raise ValueError("mix_angle must be finite")
    c, s = math.cos(mix_angle), math.sin(mix_angle)
    return (c * gamma_a + 1j * s * gamma_b, c * gamma_b + 1j * s * gamma_a)


def quadrature_wavefunction(gamma, x, conv: QuadratureConvention = CANONICAL_CONVENTION):
    """Complex position-space amplitude psi_g(x) in the given convention.

    |psi_g(x)|^2 is Gaussian with mean mean_scale*Re(g) and variance
    conv.variance, and integral(conj(psi_t) psi_g) = overlap(t, g)
    exactly.  x may be a scalar or an ndarray.
    """
    conv.require_self_consistent()
    gamma = _require_finite_complex(gamma, "gamma")
    s = conv.mean_scale
    u = np.asarray(x, dtype=float) / s
    psi = (2.0 / np.pi) ** 0.25 / math.sqrt(s) * np.exp(
        -(u**2) + 2.0 * gamma * u - gamma**2 / 2.0 - abs(gamma) ** 2 / 2.0
    )
    if np.isscalar(x):
        return complex(psi)
    return psi


def _threshold_kernel_erf(amps: np.ndarray, threshold: float, s: float) -> np.ndarray:
    """Pairwise integrals int_{-inf}^{T} conj(psi_k) psi_l dx, closed form.

    Each pair evaluates to overlap(g_k, g_l) * (1 + erf(z_kl))/2 with
    z_kl = sqrt(2) (T/s - (conj(g_k) + g_l)/2); erf takes complex
    arguments.
    """
    z = math.sqrt(2.0) * (threshold / s - (np.conj(amps)[:, None] + amps[None, :]) / 2.0)
    return _overlap_matrix(amps) * 0.5 * (1.0 + erf(z))


def _threshold_erf(s_state: CoherentSuperposition, threshold: float, conv: QuadratureConvention) -> float:
    kernel = _threshold_kernel_erf(s_state.amplitudes, threshold, conv.mean_scale)
    return _hermitian_value(s_state.coefficients, kernel, "threshold probability")


def _threshold_quad(
    s_state: CoherentSuperposition,
    threshold: float,
    conv: QuadratureConvention,
    rtol: float,
    quad_limit: int,
) -> float:
    coeffs = s_state.coefficients
    amps = s_state.amplitudes
    means = conv.mean_scale * amps.real
    lower = min(float(means.min()), threshold) - 12.0 * conv.sigma

    def integrand(x: float) -> float:
        total = 0j
        for c, g in zip(coeffs, amps):
            total += c * quadrature_wavefunction(g, x, conv)
        return abs(total) ** 2

    result = quad(
        integrand, lower, threshold, epsabs=1e-14, epsrel=rtol,
        limit=quad_limit, full_output=1,
    )
    if len(result) == 4:  # quad appends an explanation string on failure
        raise IntegrationError(f"adaptive quadrature failed: {result[3].strip()}")
    value, abserr = result[0], result[1]
    if abserr > max(rtol * abs(value), 1e-12):
        raise IntegrationError(
            f"adaptive quadrature reached error {abserr:.3e} for value {value:.6e}, "
            f"worse than relative tolerance {rtol:.1e}"
        )
    return value


def threshold_probability(
    s: CoherentSuperposition,
    threshold: float,
    conv: QuadratureConvention = CANONICAL_CONVENTION,
    method: str = "quad",
    rtol: float = 1e-9,
    quad_limit: int = 200,
) -> float:
    """Probability that the amplitude quadrature lies at or below threshold.

    Returns int_{-inf}^{T} |sum_k c_k psi_{g_k}(x)|^2 dx, where T is the
    threshold expressed in the convention's quadrature units.  For a
    normalized state this is a probability; for an unnormalized one it
    carries the state's squared norm.

    method selects the evaluation path: "quad" (adaptive quadrature over
    [mu_min - 12 sigma, T]), "erf" (exact closed form via the complex
    error function), or "checked" (both, raising IntegrationError if they
    disagree beyond 1e-8).
    """
    conv.require_self_consistent()
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    if method == "erf":
        value = _threshold_erf(s, threshold, conv)
    elif method == "quad":
        value = _threshold_quad(s, threshold, conv, rtol, quad_limit)
    elif method == "checked":
        value = _threshold_quad(s, threshold, conv, rtol, quad_limit)
        exact = _threshold_erf(s, threshold, conv)
        if abs(value - exact) > DUAL_PATH_TOLERANCE * max(1.0, abs(exact)):
            raise IntegrationError(
                f"quadrature ({value!r}) and closed-form ({exact!r}) threshold "
                "probabilities disagree beyond 1e-8"
            )
    else:
        raise ValueError(f"unknown method {method!r}; use 'quad', 'erf' or 'checked'")

    bound = norm_squared(s) * (1.0 + 1e-9)
    if value < -NORM_CLAMP or value > bound + NORM_CLAMP:
        raise IntegrationError(
            f"threshold probability {value!r} escaped [0, {bound!r}]"
        )
    return min(max(value, 0.0), bound)
