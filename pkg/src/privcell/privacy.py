"""Calibration and sampling for the private Gram releases.

Each AP only ever reports tau_c x tau_c Gram matrices of its local
residual (or trimmed observation).  Privacy against everything the CPU
and other APs see is bought by adding a Hermitian complex Gaussian
matrix to every release.  The two release schedules are:

  * iterative: T releases per AP across the FW-style completion; the
    per-release scale comes from advanced composition over T rounds,
    splitting the budget evenly and halving delta between the
    per-release mechanisms and the composition slack;
  * one-shot: a single release per AP for the spectral completion.

Scales are stated per AP; M released matrices are summed at the CPU, so
the aggregate per-entry variance is M times the per-AP variance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError


@dataclass(frozen=True)
class PrivacyBudget:
    eps: float
    delta: float
    releases: int = 1  # releases per AP the budget is spread over

    def __post_init__(self):
        if self.eps <= 0:
            raise ArgumentError(f"eps must be positive, got {self.eps}")
        if not 0 < self.delta < 1:
            raise ArgumentError(f"delta must lie in (0, 1), got {self.delta}")
        if self.releases < 1:
            raise ArgumentError(f"releases must be >= 1, got {self.releases}")


@dataclass(frozen=True)
class NoiseScale:
    """A calibrated per-entry standard deviation for one release schedule."""

    bound: float  # the sensitivity anchor (observed-signal norm bound)
    scale: float  # per-AP per-entry std of the Hermitian noise
    mechanism: str  # "iterative" | "one_shot"


def frob_bound(beta, n_users, n_antennas, tau_c, sigma2):
    """Worst-case Frobenius bound on any AP's observed signal block.

    The signal part is bounded through the largest per-AP sum of link
    gains (channel hardening across K users and tau_c slots); the additive
    part allows for the thermal noise energy of a fully observed block.
    """
    beta = np.asarray(beta)
    if beta.ndim != 2:
        raise ArgumentError(f"beta must be (K, M), got shape {beta.shape}")
    per_ap = beta.sum(axis=0)  # (M,)
    sig = math.sqrt(n_users * tau_c * n_antennas * float(per_ap.max(initial=0.0)))
    noise = math.sqrt(n_antennas * tau_c * sigma2)
    return sig + noise


def fw_noise_scale(bound, iterations, n_aps, eps, delta):
    """Per-release std for `iterations` composed Gram releases per AP.

    Gaussian-mechanism scale for sensitivity 4*bound^2 at the per-release
    budget (eps / sqrt(8 T ln(2/delta)), delta / 2T), stated per AP for an
    M-AP aggregate.
    """
    _check_budget(eps, delta)
    if iterations < 1:
        raise ArgumentError(f"iterations must be >= 1, got {iterations}")
    if n_aps < 1:
        raise ArgumentError(f"n_aps must be >= 1, got {n_aps}")
    t = float(iterations)
    return (
        16.0
        * bound**2
        * math.sqrt((t / n_aps) * math.log(2.5 * t / delta) * math.log(2.0 / delta))
        / eps
    )


def svd_noise_scale(bound, n_aps, eps, delta):
    """Per-release std for one Gram release per AP at budget (eps, delta)."""
    _check_budget(eps, delta)
    if n_aps < 1:
        raise ArgumentError(f"n_aps must be >= 1, got {n_aps}")
    return bound**2 * math.sqrt((2.0 / n_aps) * math.log(1.25 / delta)) / eps


def compose(eps_per, delta_per, releases, delta_slack):
    """Advanced composition of `releases` (eps_per, delta_per) mechanisms.

    Returns the total (eps, delta) at slack delta_slack.
    """
    if eps_per < 0 or delta_per < 0:
        raise ArgumentError("per-release budget must be non-negative")
    if not 0 < delta_slack < 1:
        raise ArgumentError(f"delta_slack must lie in (0, 1), got {delta_slack}")
    t = int(releases)
    if t < 1:
        raise ArgumentError(f"releases must be >= 1, got {releases}")
    eps_total = eps_per * math.sqrt(2.0 * t * math.log(1.0 / delta_slack)) + t * eps_per * (
        math.expm1(eps_per)
    )
    return eps_total, t * delta_per + delta_slack


def sample_hermitian_noise(dim, scale, seed):
    """Hermitian noise matrix with exact symmetry.

    Strict upper triangle: i.i.d. complex Gaussian with total variance
    scale^2 per entry; diagonal: i.i.d. real N(0, scale^2); lower
    triangle: conjugate mirror.  The draw order (upper-real, upper-imag,
    diagonal) is fixed, so for a given seed the matrix is proportional to
    its unit-scale draw.  scale == 0 short-circuits to exact zeros.
    """
    if dim < 1:
        raise ArgumentError(f"dim must be >= 1, got {dim}")
    if scale < 0:
        raise ArgumentError(f"scale must be non-negative, got {scale}")
    g = np.zeros((dim, dim), dtype=complex)
    if scale == 0.0:
        return g
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(dim, k=1)
    n_off = iu[0].size
    comp = scale / math.sqrt(2.0)
    re = rng.standard_normal(n_off) * comp
    im = rng.standard_normal(n_off) * comp
    g[iu] = re + 1j * im
    g = g + g.conj().T
    g[np.diag_indices(dim)] = rng.standard_normal(dim) * scale
    return g


def _check_budget(eps, delta):
    if eps <= 0:
        raise ArgumentError(f"eps must be positive, got {eps}")
    if not 0 < delta < 1:
        raise ArgumentError(f"delta must lie in (0, 1), got {delta}")
