"""One-shot private completion through a common spectral basis.

Each AP trims implausibly dense rows of its observed block, releases a
single privatised Gram, and the CPU broadcasts the top-K eigenbasis of
the aggregate.  Completion is local: project the trimmed observations
onto the broadcast basis and compensate the switch undersampling by
N_a / N_r.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError
from .fw import CompletionResult
from .linalg import hermitian_eig, hermitize
from .privacy import sample_hermitian_noise
from .protocol import CPU, Backhaul, MessageKind, ap_name


@dataclass(frozen=True)
class SvdConfig:
    rank: int  # broadcast basis size (number of users)
    noise_scale: float  # per-release Hermitian noise std (0 = non-private)
    trim_threshold: float  # rows with more nonzeros than this get zeroed

    def __post_init__(self):
        if self.rank < 1:
            raise ArgumentError(f"rank must be >= 1, got {self.rank}")
        if self.noise_scale < 0:
            raise ArgumentError(f"noise_scale must be non-negative, got {self.noise_scale}")
        if self.trim_threshold < 0:
            raise ArgumentError(f"trim_threshold must be non-negative, got {self.trim_threshold}")

    @classmethod
    def derive(cls, scenario, noise_scale):
        """Threshold 2 * N_r * tau_c / N_a, twice the expected row density."""
        return cls(
            rank=scenario.K,
            noise_scale=noise_scale,
            trim_threshold=2.0 * scenario.N_r * scenario.tau_c / scenario.N_a,
        )


def trim(y_m, threshold):
    """Zero out rows whose nonzero count strictly exceeds the threshold."""
    y_m = np.asarray(y_m)
    counts = np.count_nonzero(y_m, axis=1)
    out = y_m.copy()
    out[counts > threshold] = 0.0
    return out


def ap_release_gram(y_trimmed, noise_scale, seed):
    """Privatised Gram of the trimmed observation; exactly Hermitian."""
    return hermitize(y_trimmed.conj().T @ y_trimmed) + sample_hermitian_noise(
        y_trimmed.shape[1], noise_scale, seed
    )


def cpu_topk(grams, rank, tau_c):
    """Top-`rank` orthonormal eigenbasis of the symmetrized aggregate."""
    w = np.zeros((tau_c, tau_c), dtype=complex)
    for g in grams:  # ascending AP order
        w = w + g
    pairs = hermitian_eig(w, rank)
    return np.column_stack([p.vector for p in pairs])


def ap_complete(y_trimmed, basis, upsample):
    """Project onto the broadcast basis and undo the switch undersampling."""
    if basis.shape[0] != y_trimmed.shape[1]:
        raise ShapeError(
            f"basis rows {basis.shape[0]} do not match block columns {y_trimmed.shape[1]}"
        )
    return upsample * ((y_trimmed @ basis) @ basis.conj().T)


def run_round_svd(y_blocks, cfg, upsample, net, entropy):
    """The single release/broadcast/complete round over the backhaul."""
    n_aps = len(y_blocks)
    tau_c = y_blocks[0].shape[1]
    trimmed = []
    for m in range(n_aps):
        y_t = trim(y_blocks[m], cfg.trim_threshold)
        trimmed.append(y_t)
        seed = np.random.SeedSequence([*entropy, m])
        net.send(
            MessageKind.GRAM_RELEASE,
            ap_name(m),
            CPU,
            1,
            ap_release_gram(y_t, cfg.noise_scale, seed),
        )
    grams = net.round_payloads(MessageKind.GRAM_RELEASE, 1)
    basis = cpu_topk(grams, cfg.rank, tau_c)
    net.broadcast(MessageKind.BASIS_BROADCAST, 1, basis)
    return [ap_complete(y_t, basis, upsample) for y_t in trimmed]


def run_svd(y, omega, n_aps, cfg, seed, upsample, net=None):
    """Run the one-shot spectral completion on a stacked observation matrix.

    Args:
        y: (M*N_a, tau_c) observed matrix, zeros off the observed set.
        omega: matching boolean observation mask (kept for interface parity;
            trimming works off the stored zeros).
        n_aps: number of row blocks (APs).
        cfg: SvdConfig.
        seed: int or tuple of ints for the per-AP release noise.
        upsample: N_a / N_r compensation factor.
        net: optional Backhaul to append to.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape != omega.shape:
        raise ShapeError(f"omega shape {omega.shape} does not match y {y.shape}")
    if y.shape[0] % n_aps != 0:
        raise ShapeError(f"{y.shape[0]} rows do not split over {n_aps} APs")
    if upsample <= 0:
        raise ArgumentError(f"upsample must be positive, got {upsample}")
    entropy = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
    if net is None:
        net = Backhaul()
    n_ant = y.shape[0] // n_aps
    y_blocks = [y[m * n_ant : (m + 1) * n_ant] for m in range(n_aps)]
    x_blocks = run_round_svd(y_blocks, cfg, upsample, net, entropy)
    return CompletionResult(
        x_hat=np.vstack(x_blocks),
        rounds=1,
        transcript=net.transcript,
        ledger=net.ledger,
        masked_norms=np.array([[float(np.linalg.norm(b)) for b in x_blocks]]),
        clip_events=0,
    )
