"""Channel estimation, payload detection, slicing, and error metrics.

The completion-based path estimates the channel from the pilot columns
of a completed block and detects payload by least squares against that
estimate.  The pilot-only baseline skips completion entirely: a
correlation channel estimate from the switch-sampled pilot slots, then
per-slot regularised least squares on whichever antennas happened to be
observed.
"""

import numpy as np

from .errors import MetricUndefinedError, ShapeError
from .linalg import frob_norm, pinv

SQRT_HALF = 1.0 / np.sqrt(2.0)


def estimate_channel(x_pilot, pilots, rcond=1e-12):
    """Channel estimate from pilot columns: X_p @ pinv(P)."""
    x_pilot = np.asarray(x_pilot)
    if x_pilot.shape[1] != pilots.shape[1]:
        raise ShapeError(
            f"pilot block has {x_pilot.shape[1]} columns, pilots {pilots.shape[1]}"
        )
    return x_pilot @ pinv(pilots, rcond=rcond)


def detect_local(h_hat, x_data, rcond=1e-12):
    """Least-squares payload estimate: pinv(H_hat) @ X_d."""
    h_hat = np.asarray(h_hat)
    x_data = np.asarray(x_data)
    if h_hat.shape[0] != x_data.shape[0]:
        raise ShapeError(f"row mismatch {h_hat.shape} vs {x_data.shape}")
    return pinv(h_hat, rcond=rcond) @ x_data


def combine(d_locals):
    """Average the per-AP detections (ascending AP order)."""
    if not d_locals:
        raise ShapeError("no local detections to combine")
    acc = np.zeros_like(np.asarray(d_locals[0], dtype=complex))
    for d in d_locals:
        acc = acc + d
    return acc / len(d_locals)


def slice_qpsk(soft):
    """Quadrant slicer; boundary ties go to the positive side."""
    soft = np.asarray(soft)
    re = np.where(soft.real >= 0, 1.0, -1.0)
    im = np.where(soft.imag >= 0, 1.0, -1.0)
    return (re + 1j * im) * SQRT_HALF


def ser(decided, d_true):
    """Symbol error rate by quadrant disagreement."""
    decided = np.asarray(decided)
    d_true = np.asarray(d_true)
    if decided.shape != d_true.shape:
        raise ShapeError(f"shape mismatch {decided.shape} vs {d_true.shape}")
    if decided.size == 0:
        raise MetricUndefinedError("SER of an empty block")
    wrong = ((decided.real >= 0) != (d_true.real >= 0)) | (
        (decided.imag >= 0) != (d_true.imag >= 0)
    )
    return float(np.mean(wrong))


def nmse(h_hat, h_true):
    """Normalised squared channel error ||H_hat - H||_F^2 / ||H||_F^2."""
    h_hat = np.asarray(h_hat)
    h_true = np.asarray(h_true)
    if h_hat.shape != h_true.shape:
        raise ShapeError(f"shape mismatch {h_hat.shape} vs {h_true.shape}")
    denom = frob_norm(h_true)
    if denom == 0.0:
        raise MetricUndefinedError("NMSE reference is identically zero")
    return (frob_norm(h_hat - h_true) / denom) ** 2


def pilot_only_ls(y_m, pilots):
    """Correlation channel estimate from observed pilot slots: Y_p @ P^H."""
    y_m = np.asarray(y_m)
    tau_p = pilots.shape[1]
    if y_m.shape[1] < tau_p:
        raise ShapeError(f"block has {y_m.shape[1]} columns, needs >= {tau_p}")
    return y_m[:, :tau_p] @ pilots.conj().T


def _observed_index(mask_cols, n_rf):
    """(n_slots, N_r) ascending antenna indices of the observed rows."""
    # stable sort puts True (observed) first while keeping index order
    return np.argsort(~mask_cols, axis=0, kind="stable")[:n_rf].T


def pilot_only_lmmse(h_hat, y_m, omega_m, sigma2, t, tau_p):
    """Regularised LS detection for one payload slot t (0-based).

    Only the antennas observed in that slot enter; the Gram is
    regularised by the noise power, falling back to a pseudoinverse when
    sigma2 is zero.
    """
    col = tau_p + t
    obs = np.flatnonzero(omega_m[:, col])
    f = np.asarray(h_hat)[obs, :]
    yv = np.asarray(y_m)[obs, col]
    if sigma2 > 0:
        a = f.conj().T @ f + sigma2 * np.eye(f.shape[1])
        return np.linalg.solve(a, f.conj().T @ yv)
    return pinv(f) @ yv


def pilot_only_detect_block(h_hat, y_m, omega_m, sigma2, tau_p, n_rf):
    """All payload slots of one AP at once (batched version of the above)."""
    y_m = np.asarray(y_m)
    n_users = h_hat.shape[1]
    data_mask = omega_m[:, tau_p:]
    idx = _observed_index(data_mask, n_rf)  # (tau_d, N_r)
    f = np.asarray(h_hat)[idx]  # (tau_d, N_r, K)
    y_data = y_m[:, tau_p:]
    yv = np.take_along_axis(y_data, idx.T, axis=0).T  # (tau_d, N_r)
    fh = f.conj().transpose(0, 2, 1)  # (tau_d, K, N_r)
    rhs = np.einsum("tkn,tn->tk", fh, yv)
    if sigma2 > 0:
        gram = fh @ f + sigma2 * np.eye(n_users)
        return np.linalg.solve(gram, rhs[..., None])[..., 0].T  # (K, tau_d)
    sol = np.linalg.pinv(f) @ yv[..., None]
    return sol[..., 0].T
