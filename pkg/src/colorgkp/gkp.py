"""Single-mode GKP arithmetic.

Everything a grid-state qubit needs under the twirled Gaussian shift
channel: centered modular reduction on the sqrt(pi) lattice, Steane-type
correction rules (plain and maximum-likelihood rescaled), conditional and
average logical-flip probabilities, the residual maps of the three
error-correction schemes, and the Monte Carlo distance-to-perfect-EC
estimator used to compare them.

All operations are pure and accept scalars or numpy arrays; randomness
enters only through an explicit ``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

__all__ = [
    "SQRT_PI",
    "TWO_SQRT_PI",
    "PROB_EPS",
    "Scheme",
    "NoiseParams",
    "DeltaEstimate",
    "centered_mod",
    "sample_shift",
    "correction",
    "conditional_flip_prob",
    "me_conditional_flip_prob",
    "average_flip_prob",
    "ideal_projection",
    "residual_map",
    "teleport_residual",
    "delta_estimate",
    "clamp_probability",
]

SQRT_PI = math.sqrt(math.pi)
TWO_SQRT_PI = 2.0 * SQRT_PI

# probabilities are clamped away from {0, 1} before any log-odds weight
PROB_EPS = 1e-12


class Scheme(enum.Enum):
    """GKP error-correction scheme."""

    CONVENTIONAL = "conventional"
    ME = "me"
    TELEPORTATION = "teleportation"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        key = name.strip().lower().replace("-", "_")
        aliases = {
            "conventional": cls.CONVENTIONAL,
            "steane": cls.CONVENTIONAL,
            "me": cls.ME,
            "me_steane": cls.ME,
            "teleportation": cls.TELEPORTATION,
            "teleport": cls.TELEPORTATION,
        }
        if key not in aliases:
            raise ValueError(f"unknown scheme {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class NoiseParams:
    """Standard deviations of the three Gaussian shift channels.

    ``sigma1`` acts on data qubits, ``sigma2`` on ancilla qubits and
    ``sigma_m`` on measurements.  For the teleportation scheme comparison,
    ``sigma_m`` doubles as the third input state's noise.
    """

    sigma1: float
    sigma2: float = 0.0
    sigma_m: float = 0.0

    def __post_init__(self) -> None:
        for name in ("sigma1", "sigma2", "sigma_m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def eta(self) -> float:
        """Maximum-likelihood rescaling sigma1^2 / (sigma1^2 + sigma2^2).

        Defined as 1 in the noiseless limit sigma1 = sigma2 = 0.
        """
        s = self.sigma1 ** 2 + self.sigma2 ** 2
        if s == 0.0:
            return 1.0
        return self.sigma1 ** 2 / s


def centered_mod(x, b: float):
    """Reduce x modulo b into the half-open interval (-b/2, b/2].

    The wrap decision carries a relative guard of 1e-9*b so that inputs
    representing an exact half-multiple land on +b/2 regardless of float
    rounding.
    """
    if b <= 0:
        raise ValueError("modulus must be positive")
    x = np.asarray(x, np.float64)
    r = np.mod(x, b)
    r = np.where(r > b / 2.0 + 1e-9 * b, r - b, r)
    if r.ndim == 0:
        return float(r)
    return r


def sample_shift(sigma: float, rng: np.random.Generator, size=None):
    """Gaussian shift sample(s) with mean 0 and std dev sigma (0 is exact)."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return 0.0 if size is None else np.zeros(size)
    return rng.normal(0.0, sigma, size)


def correction(q_out, scheme: Scheme, params: NoiseParams):
    """Shift applied back to the data qubit given the measured outcome.

    Conventional Steane returns the centered residue of q_out modulo
    sqrt(pi); the ME variant rescales it by eta.
    """
    if scheme is Scheme.CONVENTIONAL:
        return centered_mod(q_out, SQRT_PI)
    if scheme is Scheme.ME:
        return params.eta * centered_mod(q_out, SQRT_PI)
    raise ValueError("teleportation has no single-shot correction; "
                     "use teleport_residual")


def _theta_terms(r, sigma: float):
    """Stabilised Gaussian weights exp(-(r - k*sqrt(pi))^2 / 2 sigma^2)."""
    kmax = math.ceil(6.0 * sigma / SQRT_PI) + 2
    k = np.arange(-kmax, kmax + 1)
    z = (np.asarray(r, np.float64)[..., None] - k * SQRT_PI) / sigma
    z2 = 0.5 * z * z
    z2 -= z2.min(axis=-1, keepdims=True)
    return k, np.exp(-z2)


def conditional_flip_prob(q_out, sigma_eff: float):
    """Probability of a residual logical flip given the measured outcome.

    Posterior weight of the odd-multiple-of-sqrt(pi) shift class relative to
    all candidates compatible with the outcome; depends on q_out only
    through its deviation from the nearest lattice point, so it is periodic
    with period sqrt(pi) and symmetric in q -> -q.  Always <= 1/2, reaching
    1/2 exactly at deviation sqrt(pi)/2.
    """
    if sigma_eff <= 0:
        raise ValueError("sigma_eff must be positive")
    r = centered_mod(q_out, SQRT_PI)
    k, terms = _theta_terms(r, sigma_eff)
    odd = (k & 1) == 1
    p = terms[..., odd].sum(axis=-1) / terms.sum(axis=-1)
    if np.ndim(p) == 0:
        return float(p)
    return p


def me_conditional_flip_prob(q_out, params: NoiseParams):
    """Residual flip probability after the ME-rescaled correction.

    Uses the exact Gaussian-mixture form of the posterior of the data shift
    given the outcome: component n has weight proportional to the combined
    channel at (r + n*sqrt(pi)), mean eta*n*sqrt(pi) after correction and
    std dev sigma1*sigma2/sigma12, so every class integral is a difference
    of normal CDFs.  Agrees with `conditional_flip_prob` as sigma2 -> 0.
    """
    s1, s2 = params.sigma1, params.sigma2
    if s1 <= 0:
        raise ValueError("sigma1 must be positive")
    if s2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if s2 == 0.0:
        return conditional_flip_prob(q_out, s1)
    s12 = math.hypot(s1, s2)
    eta = params.eta
    smix = s1 * s2 / s12
    r = centered_mod(q_out, SQRT_PI)
    # mixture weights from the outcome deviation
    n_ax, alpha = _theta_terms(r, s12)
    alpha = alpha / alpha.sum(axis=-1, keepdims=True)
    # per-component success mass over the even windows (independent of r)
    kmax = math.ceil((eta * n_ax[-1] * SQRT_PI + 6.0 * smix + SQRT_PI)
                     / TWO_SQRT_PI) + 2
    kk = np.arange(-kmax, kmax + 1) * TWO_SQRT_PI
    mu = eta * n_ax * SQRT_PI
    hi = (kk[None, :] + 0.5 * SQRT_PI - mu[:, None]) / smix
    lo = (kk[None, :] - 0.5 * SQRT_PI - mu[:, None]) / smix
    success = (ndtr(hi) - ndtr(lo)).sum(axis=1)
    p = 1.0 - (alpha * success).sum(axis=-1)
    p = np.clip(p, 0.0, 1.0)
    if np.ndim(p) == 0 or p.shape == ():
        return float(p)
    return p


def average_flip_prob(sigma: float) -> float:
    """Flip probability of the plain correction averaged over the channel."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    kmax = math.ceil(6.0 * sigma / SQRT_PI) + 2
    centers = np.arange(-kmax, kmax + 1) * TWO_SQRT_PI
    mass = ndtr((centers + 0.5 * SQRT_PI) / sigma) \
        - ndtr((centers - 0.5 * SQRT_PI) / sigma)
    return float(min(max(1.0 - mass.sum(), 0.0), 1.0))


def ideal_projection(u1):
    """Residual displacement left by a perfect correction: 0 or sqrt(pi)."""
    r = np.abs(centered_mod(u1, TWO_SQRT_PI))
    out = np.where(r < 0.5 * SQRT_PI, 0.0, SQRT_PI)
    if out.ndim == 0:
        return float(out)
    return out


def residual_map(u1, u2, scheme: Scheme, params: NoiseParams,
                 wiring: str = "q", u3=None, alpha: float | None = None):
    """Residual data shift left by one noisy Steane-type correction.

    In the position-quadrature circuit the outcome is q_out = u1 + u2 and
    the residual is u1 - correction(q_out).  In the momentum-quadrature
    circuit ("p" wiring) the first ancilla contaminates the data before the
    second ancilla reads it out: the tracked shift is u1 - u2, the outcome
    is u1 - u2 - u3, and the residual is (u1 - u2) - correction(outcome).
    ``alpha`` overrides the correction multiplier (for optimality scans).
    """
    if scheme is Scheme.TELEPORTATION:
        raise ValueError("teleportation has no Steane residual; "
                         "use teleport_residual")
    if alpha is None:
        mult = 1.0 if scheme is Scheme.CONVENTIONAL else params.eta
    else:
        mult = float(alpha)
    if wiring == "q":
        q_out = np.asarray(u1) + np.asarray(u2)
        return np.asarray(u1) - mult * centered_mod(q_out, SQRT_PI)
    if wiring == "p":
        if u3 is None:
            raise ValueError("p-circuit residual needs the readout ancilla "
                             "shift u3")
        tracked = np.asarray(u1) - np.asarray(u2)
        outcome = tracked - np.asarray(u3)
        return tracked - mult * centered_mod(outcome, SQRT_PI)
    raise ValueError(f"unknown wiring {wiring!r}")


def teleport_residual(u1, u2, u3):
    """Residual shift of the teleportation-based correction."""
    u1 = np.asarray(u1, np.float64)
    u2 = np.asarray(u2, np.float64)
    u3 = np.asarray(u3, np.float64)
    out = (u2 + u3) / math.sqrt(2.0) \
        + ideal_projection(u1 - (u2 - u3) / math.sqrt(2.0))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class DeltaEstimate:
    """Monte Carlo distance between a noisy and the perfect correction."""

    mean: float
    stderr: float
    trials: int


def delta_estimate(scheme: Scheme, params: NoiseParams, trials: int,
                   rng: np.random.Generator, alpha: float | None = None,
                   wiring: str = "q") -> DeltaEstimate:
    """Gaussian-averaged |(pi'(u1) - pi(u1)) mod 2 sqrt(pi)|.

    Samples all input shifts from their channels and averages the centered
    2-sqrt(pi) residue of the difference to the perfect map.  For the
    teleportation scheme and the p-circuit comparison, params.sigma_m is
    the third state's noise.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    u1 = sample_shift(params.sigma1, rng, trials)
    u2 = sample_shift(params.sigma2, rng, trials)
    if scheme is Scheme.TELEPORTATION:
        u3 = sample_shift(params.sigma_m, rng, trials)
        resid = teleport_residual(u1, u2, u3)
    elif wiring == "p":
        u3 = sample_shift(params.sigma_m, rng, trials)
        resid = residual_map(u1, u2, scheme, params, wiring="p", u3=u3,
                             alpha=alpha)
    else:
        resid = residual_map(u1, u2, scheme, params, alpha=alpha)
    vals = np.abs(centered_mod(resid - ideal_projection(u1), TWO_SQRT_PI))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return DeltaEstimate(mean, stderr, trials)


def clamp_probability(p):
    """Clip probabilities into [eps, 1 - eps] before log-odds weights."""
    return np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
