"""Spin coherent (Bloch) states and their J_z distributions.

A spin-j state fully polarized along (theta, phi) decomposes over J_z
eigenstates |j, m> with m = -j + k as

    c_k = binom(2j, k)^(1/2) e^{i(j-k)phi} cos(theta/2)^k sin(theta/2)^(2j-k)

so |c_k|^2 is the binomial distribution with n = 2j trials and success
probability cos^2(theta/2).  For large j the distribution concentrates at
m = j cos(theta) with width O(sqrt(j)): the state deflects like a single
classical magnetic moment instead of fanning out over 2j+1 beams.

Everything is evaluated in log space (log-gamma binomials), so spins up to
j ~ 10^6 are exact to floating-point accuracy without overflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

_HALF_INT_TOL = 1e-9


def _two_j(j):
    two_j = round(2.0 * j)
    if two_j < 0 or abs(2.0 * j - two_j) > _HALF_INT_TOL:
        raise DomainError(f"spin must be a non-negative half-integer, got {j}")
    return two_j


@dataclass(frozen=True)
class SpinCoherentState:
    """Spin-j state polarized along the (theta, phi) direction.

    ``two_j`` stores 2j as an exact integer; ``theta`` must lie in [0, pi].
    """

    two_j: int
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.two_j < 0 or self.two_j != int(self.two_j):
            raise DomainError("two_j must be a non-negative integer")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def j(self):
        return self.two_j / 2.0

    @classmethod
    def from_j(cls, j, theta, phi=0.0):
        return cls(_two_j(j), theta, phi)


@dataclass(frozen=True)
class SpinDistribution:
    """Normalized |c_k|^2 weights over k = 0..2j (m = -j + k)."""

    two_j: int
    weights: np.ndarray
    normalization_defect: float = 0.0  # |raw sum - 1| before renormalizing

    @property
    def m_values(self):
        return np.arange(self.two_j + 1) - self.two_j / 2.0

    def argmax_m(self):
        return float(self.m_values[int(np.argmax(self.weights))])

    def mean_m(self):
        return float(self.m_values @ self.weights)

    def std_m(self):
        mu = self.mean_m()
        return float(np.sqrt(((self.m_values - mu) ** 2) @ self.weights))


def _log_weights(two_j, theta):
    """log |c_k|^2 for interior theta; binomial(n=2j, p=cos^2(theta/2))."""
    n = two_j
    k = np.arange(n + 1)
    log_cos2 = 2.0 * np.log(np.cos(theta / 2.0))
    log_sin2 = 2.0 * np.log(np.sin(theta / 2.0))
    return (gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
            + k * log_cos2 + (n - k) * log_sin2)


def coefficient(state, k):
    """Projection amplitude c_k of the state on |j, m = -j + k>."""
    n = state.two_j
    if not 0 <= k <= n:
        raise DomainError(f"index k must lie in [0, {n}], got {k}")
    # aligned/anti-aligned states are one-hot; log forms would hit log(0)
    if state.theta == 0.0:
        return 1.0 + 0.0j if k == n else 0.0j
    if state.theta == math.pi:
        return 1.0 + 0.0j if k == 0 else 0.0j
    log_mag = (0.5 * (gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0))
               + k * math.log(math.cos(state.theta / 2.0))
               + (n - k) * math.log(math.sin(state.theta / 2.0)))
    phase = (n / 2.0 - k) * state.phi
    return math.exp(log_mag) * complex(math.cos(phase), math.sin(phase))


def distribution(state):
    """Exact |c_k|^2 distribution, renormalized (defect recorded)."""
    n = state.two_j
    if state.theta == 0.0 or state.theta == math.pi:
        w = np.zeros(n + 1)
        w[n if state.theta == 0.0 else 0] = 1.0
        return SpinDistribution(n, w)
    logw = _log_weights(n, state.theta)
    shift = logw.max()
    w = np.exp(logw - shift)
    raw_sum = w.sum() * math.exp(shift)
    return SpinDistribution(n, w / w.sum(), abs(raw_sum - 1.0))


def stirling_log_weight(j, theta, x):
    """Large-spin log-weight density f(x), with |c_k|^2 ~ exp(2j f(k/2j)).

    f(x) = -x log x - (1-x) log(1-x)
           + 2x log cos(theta/2) + 2(1-x) log sin(theta/2)

    f vanishes at the peak x0 = cos^2(theta/2) and is negative elsewhere.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie strictly inside (0, 1), got {x}")
    if not 0.0 < theta < math.pi:
        raise DomainError(f"theta must lie strictly inside (0, pi), got {theta}")
    return (-x * math.log(x) - (1.0 - x) * math.log(1.0 - x)
            + 2.0 * x * math.log(math.cos(theta / 2.0))
            + 2.0 * (1.0 - x) * math.log(math.sin(theta / 2.0)))


def approximate_distribution(j, theta, phi=0.0):
    """Large-spin approximation exp(2j f(k/2j)) on the k grid, normalized.

    This is the closed-form asymptotic used for very large spins in place
    of the exact binomial; endpoints k = 0, 2j get weight zero.
    """
    n = _two_j(j)
    if not 0.0 < theta < math.pi:
        raise DomainError("approximation needs theta strictly inside (0, pi)")
    x = np.arange(1, n) / n
    f = (-x * np.log(x) - (1.0 - x) * np.log1p(-x)
         + 2.0 * x * math.log(math.cos(theta / 2.0))
         + 2.0 * (1.0 - x) * math.log(math.sin(theta / 2.0)))
    w = np.zeros(n + 1)
    w[1:n] = np.exp(n * (f - f.max()))
    raw = w.sum()
    return SpinDistribution(n, w / raw)


def saddle_point_peak(j, theta):
    """Peak (x0, m_peak) of the large-spin distribution.

    x0 = cos^2(theta/2) and m_peak = j cos(theta).
    """
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    jj = _two_j(j) / 2.0
    x0 = math.cos(theta / 2.0) ** 2
    return x0, jj * math.cos(theta)


@dataclass(frozen=True)
class ClassicalLimitReport:
    argmax_m: float
    argmax_offset: float   # |argmax_m - j cos(theta)|
    relative_width: float  # std(m) / j


def classical_limit_diagnostics(j, theta):
    """How close the exact distribution is to a single classical value of J_z.

    The relative width scales as 2 sqrt(x0 (1 - x0)) / sqrt(2j): growing j
    by 4 halves it, and at j -> inf the distribution is a delta at
    m = j cos(theta).
    """
    state = SpinCoherentState.from_j(j, theta)
    if state.two_j < 1:
        raise DomainError("need j >= 1/2")
    dist = distribution(state)
    argmax = dist.argmax_m()
    jj = state.two_j / 2.0
    return ClassicalLimitReport(
        argmax_m=argmax,
        argmax_offset=abs(argmax - jj * math.cos(theta)),
        relative_width=dist.std_m() / jj,
    )
