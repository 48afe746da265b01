"""Cell-free uplink model: geometry, fading, pilots, payload, switches.

One coherence block works on a stacked receive matrix of shape
(M*N_a, tau_c): M access points with N_a antennas each listen to K
single-antenna users for tau_c = tau_p + tau_d slots.  Each AP has only
N_r RF chains behind a switch, so per slot it observes N_r of its N_a
antenna outputs; the unobserved entries are structural zeros.

Conventions:
  * a complex Gaussian CN(0, s2) draw has real/imag parts N(0, s2/2);
  * large-scale gain beta = 10**(-(PL(d) + sigma_sh * z) / 10) with
    PL(d) = pl_a + pl_b * log10(d), d in metres, z standard normal
    (real draw by default; see shadow_convention);
  * AP m owns the stacked row block m*N_a : (m+1)*N_a.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

log = logging.getLogger(__name__)

MIN_DIST_M = 1.0  # distances are floored here before the path-loss law


@dataclass
class Scenario:
    """Physical parameters of one experiment."""

    M: int  # access points
    K: int  # users
    N_a: int  # antennas per AP
    N_r: int  # RF chains per AP (N_r <= N_a)
    tau_p: int  # pilot slots
    tau_d: int  # payload slots
    R_km: float = 1.0  # hexagon circumradius
    pl_a: float = 36.8  # path-loss intercept, dB
    pl_b: float = 36.7  # path-loss slope, dB per decade
    sigma_sh_db: float = 8.0  # shadowing std, dB
    sigma2: float = 1.0e-13  # receiver noise power, W
    signal_model: str = "qpsk"  # payload alphabet: qpsk | gaussian
    shadow_convention: str = "real"  # real | complex
    seed: int = 0

    def __post_init__(self):
        for name in ("M", "K", "N_a", "N_r", "tau_p", "tau_d"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.N_r > self.N_a:
            raise ConfigError(f"N_r={self.N_r} exceeds N_a={self.N_a}")
        if self.tau_p < self.K:
            raise ConfigError(f"tau_p={self.tau_p} below user count K={self.K}")
        if self.R_km <= 0:
            raise ConfigError(f"R_km must be positive, got {self.R_km}")
        if self.sigma2 < 0:
            raise ConfigError(f"sigma2 must be non-negative, got {self.sigma2}")
        if self.sigma_sh_db < 0:
            raise ConfigError(f"sigma_sh_db must be non-negative, got {self.sigma_sh_db}")
        if self.signal_model not in ("qpsk", "gaussian"):
            raise ConfigError(f"unknown signal_model {self.signal_model!r}")
        if self.shadow_convention not in ("real", "complex"):
            raise ConfigError(f"unknown shadow_convention {self.shadow_convention!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        # The analysis regime assumes more stacked antennas than slots.  Long
        # payload sweeps leave it on purpose, so this is advisory only.
        if self.M * self.N_a <= self.tau_c:
            log.warning(
                "M*N_a=%d does not exceed tau_c=%d; outside the usual regime",
                self.M * self.N_a,
                self.tau_c,
            )

    @property
    def tau_c(self):
        return self.tau_p + self.tau_d

    @property
    def n_rows(self):
        return self.M * self.N_a

    def block(self, m):
        """Row slice of AP m inside the stacked matrix."""
        if not 0 <= m < self.M:
            raise ShapeError(f"AP index {m} out of range")
        return slice(m * self.N_a, (m + 1) * self.N_a)


@dataclass
class Topology:
    ap_xy: np.ndarray  # (M, 2), metres
    user_xy: np.ndarray  # (K, 2), metres


@dataclass
class SignalBlock:
    """Everything one coherence block produces, pilot columns first."""

    P: np.ndarray  # (K, tau_p) pilot matrix, orthonormal rows
    D: np.ndarray  # (K, tau_d) payload symbols
    H: np.ndarray  # (M*N_a, K) stacked channel
    X: np.ndarray  # (M*N_a, tau_c) noiseless H @ [P D]
    R: np.ndarray  # X plus receiver noise
    Y: np.ndarray  # switch-sampled R, zeros off the observed set
    omega: np.ndarray  # bool (M*N_a, tau_c), True where observed

    @property
    def S(self):
        return np.hstack([self.P, self.D])


def crandn(rng, shape, s2=1.0):
    """CN(0, s2) i.i.d. array; real and imaginary draws in fixed order."""
    if s2 == 0.0:
        return np.zeros(shape, dtype=complex)
    scale = math.sqrt(s2 / 2.0)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scale * (re + 1j * im)


def _in_hexagon(xy, a):
    """Point-in-regular-hexagon test, circumradius a, vertex on the x-axis."""
    x = np.abs(xy[..., 0])
    y = np.abs(xy[..., 1])
    s3 = math.sqrt(3.0)
    return (y <= s3 / 2.0 * a) & (s3 * x + y <= s3 * a)


def gen_topology(scenario, rng):
    """Drop APs and users uniformly in the hexagonal region (rejection)."""
    a = scenario.R_km * 1000.0

    def sample(n):
        out = np.empty((n, 2))
        got = 0
        while got < n:
            cand = rng.uniform(-a, a, size=(2 * (n - got) + 8, 2))
            cand[:, 1] *= math.sqrt(3.0) / 2.0
            keep = cand[_in_hexagon(cand, a)]
            take = min(len(keep), n - got)
            out[got : got + take] = keep[:take]
            got += take
        return out

    return Topology(ap_xy=sample(scenario.M), user_xy=sample(scenario.K))


def large_scale_fading(topology, scenario, rng):
    """Per-link gains beta, shape (K, M).

    Log-distance path loss plus log-normal shadowing.  With the default
    "real" convention the shadowing deviate z is a standard real normal;
    "complex" takes the real part of a unit complex normal instead
    (variance 1/2), kept as an option because both readings circulate.
    """
    d = np.linalg.norm(
        topology.user_xy[:, None, :] - topology.ap_xy[None, :, :], axis=-1
    )
    d = np.maximum(d, MIN_DIST_M)
    pl_db = scenario.pl_a + scenario.pl_b * np.log10(d)
    z = rng.standard_normal(d.shape)
    if scenario.shadow_convention == "complex":
        z = z / math.sqrt(2.0)
    loss_db = pl_db + scenario.sigma_sh_db * z
    return 10.0 ** (-loss_db / 10.0)


def gen_channels(beta, scenario, rng):
    """Stacked channel H of shape (M*N_a, K): sqrt(beta) times CN(0,1) fading."""
    beta = np.asarray(beta)
    if beta.shape != (scenario.K, scenario.M):
        raise ShapeError(f"beta shape {beta.shape}, expected {(scenario.K, scenario.M)}")
    g = crandn(rng, (scenario.n_rows, scenario.K))
    amp = np.sqrt(np.repeat(beta.T, scenario.N_a, axis=0))  # (M*N_a, K)
    return g * amp


def gen_pilots(K, tau_p):
    """Orthonormal pilot rows: first K rows of the unitary DFT of size tau_p."""
    if tau_p < K:
        raise ShapeError(f"tau_p={tau_p} below K={K}")
    k = np.arange(K)[:, None]
    t = np.arange(tau_p)[None, :]
    return np.exp(-2j * np.pi * k * t / tau_p) / math.sqrt(tau_p)


def gen_payload(K, tau_d, model, rng):
    """Payload symbol matrix (K, tau_d)."""
    if model == "qpsk":
        re = 2 * rng.integers(0, 2, size=(K, tau_d)) - 1
        im = 2 * rng.integers(0, 2, size=(K, tau_d)) - 1
        return (re + 1j * im) / math.sqrt(2.0)
    if model == "gaussian":
        return crandn(rng, (K, tau_d))
    raise ConfigError(f"unknown signal model {model!r}")


def transmit(H, S, sigma2, rng):
    """Noisy receive matrix R = H S + N with N i.i.d. CN(0, sigma2)."""
    H = np.asarray(H)
    S = np.asarray(S)
    if H.shape[1] != S.shape[0]:
        raise ShapeError(f"H {H.shape} and S {S.shape} do not chain")
    return H @ S + crandn(rng, (H.shape[0], S.shape[1]), sigma2)


def sample_switch(R, scenario, rng):
    """Per-AP per-slot switch sampling: keep N_r of N_a antennas, uniformly.

    Returns (Y, omega): Y equals R on the observed set and is exactly zero
    elsewhere; omega is the boolean observation mask.
    """
    R = np.asarray(R)
    n_slots = R.shape[1]
    if R.shape[0] != scenario.n_rows:
        raise ShapeError(f"R has {R.shape[0]} rows, expected {scenario.n_rows}")
    u = rng.random((scenario.M, scenario.N_a, n_slots))
    order = np.argsort(u, axis=1)
    sel = order[:, : scenario.N_r, :]
    m3 = np.zeros((scenario.M, scenario.N_a, n_slots), dtype=bool)
    np.put_along_axis(m3, sel, True, axis=1)
    omega = m3.reshape(scenario.n_rows, n_slots)
    return np.where(omega, R, 0.0), omega


def make_block(scenario, beta, P, master_seed, trial, sigma2=None):
    """Draw one coherence block from the per-trial substreams.

    Pilot-slot noise and masks come from streams keyed independently of
    tau_d, so the pilot part of a block is identical across payload-length
    sweeps at the same master seed and trial.  sigma2 overrides the
    scenario's noise power (the harness passes the unit-rescaled value).
    """
    from .seeding import rng_for

    if sigma2 is None:
        sigma2 = scenario.sigma2
    H = gen_channels(beta, scenario, rng_for(master_seed, "channel", trial))
    D = gen_payload(
        scenario.K, scenario.tau_d, scenario.signal_model,
        rng_for(master_seed, "payload", trial),
    )
    R_p = transmit(H, P, sigma2, rng_for(master_seed, "noise_pilot", trial))
    R_d = transmit(H, D, sigma2, rng_for(master_seed, "noise_data", trial))
    Y_p, om_p = sample_switch(R_p, scenario, rng_for(master_seed, "mask_pilot", trial))
    Y_d, om_d = sample_switch(R_d, scenario, rng_for(master_seed, "mask_data", trial))
    X = np.hstack([H @ P, H @ D])
    return SignalBlock(
        P=P,
        D=D,
        H=H,
        X=X,
        R=np.hstack([R_p, R_d]),
        Y=np.hstack([Y_p, Y_d]),
        omega=np.hstack([om_p, om_d]),
    )
