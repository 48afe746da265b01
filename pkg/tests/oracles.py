"""Straight-line reference implementations used to cross-check the
distributed code paths.

These are written against the math only: stacked matrices, explicit
loops, numpy.linalg calls.  They deliberately share nothing with the
package implementation except (for the common-random-numbers variant)
the noise sampler, so that agreement between the two routes is evidence
and not tautology.
"""

import numpy as np

from privcell.privacy import sample_hermitian_noise


def centralized_fw(y, omega, n_aps, iterations, nuclear_bound, clip_bound,
                   noise_scale=0.0, entropy=None):
    """Textbook iterative completion on the stacked matrix.

    Returns the list of iterates (one per round).  When noise_scale > 0,
    entropy must be given and the per-release noise is drawn with the
    same seeds the distributed code uses, so both routes see identical
    perturbations.
    """
    y = np.asarray(y, dtype=complex)
    n_rows, tau_c = y.shape
    n_ant = n_rows // n_aps
    x = np.zeros_like(y)
    iterates = []
    for n in range(1, iterations + 1):
        eta = 1.0 if n == 1 else 1.0 / iterations
        j = np.where(omega, x, 0.0) - y
        w = np.zeros((tau_c, tau_c), dtype=complex)
        for m in range(n_aps):
            jm = j[m * n_ant:(m + 1) * n_ant]
            g = jm.conj().T @ jm
            g = 0.5 * (g + g.conj().T)
            if noise_scale > 0.0:
                g = g + sample_hermitian_noise(
                    tau_c, noise_scale, np.random.SeedSequence([*entropy, m, n])
                )
            w = w + g
        vals, vecs = np.linalg.eigh(0.5 * (w + w.conj().T))
        lam = np.sqrt(max(float(vals[-1]), 0.0))
        v = vecs[:, -1]
        lam_t = lam + np.sqrt(noise_scale) * (n_aps * tau_c) ** 0.25
        x = (1.0 - eta) * x - (eta * nuclear_bound / lam_t) * np.outer(j @ v, v.conj())
        for m in range(n_aps):
            sl = slice(m * n_ant, (m + 1) * n_ant)
            mn = np.linalg.norm(x[sl][omega[sl]])
            if mn > clip_bound:
                x[sl] = x[sl] * (clip_bound / mn)
        iterates.append(x.copy())
    return iterates


def centralized_svd(y, threshold, rank, upsample):
    """One-shot spectral completion on the stacked matrix."""
    y = np.asarray(y, dtype=complex)
    yt = y.copy()
    yt[np.count_nonzero(yt, axis=1) > threshold] = 0.0
    g = yt.conj().T @ yt
    vals, vecs = np.linalg.eigh(0.5 * (g + g.conj().T))
    basis = vecs[:, np.argsort(vals)[::-1][:rank]]
    return upsample * (yt @ basis @ basis.conj().T)
