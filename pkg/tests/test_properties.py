"""Property-based checks for the invariants the rest of the suite leans on."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from privcell.estimation import ser, slice_qpsk
from privcell.fw import clip_observed
from privcell.linalg import frob_norm, hermitize, masked_frob_norm, pinv
from privcell.privacy import (
    compose,
    frob_bound,
    fw_noise_scale,
    sample_hermitian_noise,
    svd_noise_scale,
)
from privcell.svdmc import trim

COMMON = settings(deadline=None, max_examples=40)

dims = st.integers(min_value=1, max_value=12)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
scales = st.floats(min_value=1e-6, max_value=1e6)
budgets = st.floats(min_value=1e-3, max_value=50.0)


def _complex_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


# ---------------------------------------------------------------- privacy


@COMMON
@given(dim=dims, scale=scales, seed=seeds)
def test_noise_release_is_exactly_hermitian(dim, scale, seed):
    e = sample_hermitian_noise(dim, scale, seed)
    np.testing.assert_array_equal(e, e.conj().T)


@COMMON
@given(eps=budgets, bound=scales, iters=st.integers(1, 200), aps=st.integers(1, 100))
def test_noise_scales_halve_exactly_when_eps_doubles(eps, bound, iters, aps):
    # one multiply and one divide on each route, so no rounding slack needed
    assert fw_noise_scale(bound, iters, aps, 2 * eps, 0.1) == fw_noise_scale(
        bound, iters, aps, eps, 0.1
    ) / 2
    assert svd_noise_scale(bound, aps, 2 * eps, 0.1) == svd_noise_scale(
        bound, aps, eps, 0.1
    ) / 2


@COMMON
@given(
    n_releases=st.integers(min_value=1, max_value=30),
    eps_per=st.floats(min_value=1e-3, max_value=0.5),
)
def test_composed_budget_grows_with_release_count(n_releases, eps_per):
    eps_lo, delta_lo = compose(eps_per, 1e-6, n_releases, 1e-6)
    eps_hi, delta_hi = compose(eps_per, 1e-6, n_releases + 1, 1e-6)
    assert eps_hi > eps_lo
    assert delta_hi > delta_lo


@COMMON
@given(seed=seeds, extra=st.floats(min_value=1e-14, max_value=1e-9))
def test_frob_bound_monotone_in_gains(seed, extra):
    rng = np.random.default_rng(seed)
    beta = rng.uniform(1e-13, 1e-10, size=(3, 4))
    base = frob_bound(beta, 3, 2, 10, 1e-13)
    assert frob_bound(beta + extra, 3, 2, 10, 1e-13) > base


# ---------------------------------------------------------------- linalg


@COMMON
@given(dim=dims, seed=seeds)
def test_hermitize_is_idempotent(dim, seed):
    rng = np.random.default_rng(seed)
    a = _complex_matrix(rng, dim, dim)
    h = hermitize(a)
    np.testing.assert_array_equal(h, h.conj().T)
    np.testing.assert_array_equal(hermitize(h), h)


@COMMON
@given(rows=dims, cols=dims, seed=seeds)
def test_pinv_satisfies_penrose_conditions(rows, cols, seed):
    rng = np.random.default_rng(seed)
    a = _complex_matrix(rng, rows, cols)
    p = pinv(a)
    np.testing.assert_allclose(a @ p @ a, a, atol=1e-8)
    np.testing.assert_allclose(p @ a @ p, p, atol=1e-8)
    np.testing.assert_allclose(a @ p, (a @ p).conj().T, atol=1e-8)
    np.testing.assert_allclose(p @ a, (p @ a).conj().T, atol=1e-8)


# ---------------------------------------------------------------- clipping


@COMMON
@given(seed=seeds, bound=st.floats(min_value=0.05, max_value=20.0))
def test_clip_keeps_observed_energy_inside_bound(seed, bound):
    rng = np.random.default_rng(seed)
    x = _complex_matrix(rng, 4, 6)
    omega = rng.random((4, 6)) < 0.6
    clipped, did_clip = clip_observed(x, omega, bound)
    assert masked_frob_norm(clipped, omega) <= bound * (1 + 1e-12)
    assert did_clip == (masked_frob_norm(x, omega) > bound)
    # scaling is a single nonnegative factor applied to the whole block
    if frob_norm(x) > 0:
        ratios = clipped[np.abs(x) > 1e-12] / x[np.abs(x) > 1e-12]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-9)
        assert 0 <= ratios[0].real <= 1 + 1e-12
        assert abs(ratios[0].imag) < 1e-12


# ---------------------------------------------------------------- trimming


@COMMON
@given(seed=seeds, threshold=st.floats(min_value=0.0, max_value=8.0))
def test_trim_zeroes_rows_or_leaves_them_alone(seed, threshold):
    rng = np.random.default_rng(seed)
    x = _complex_matrix(rng, 5, 8)
    x[rng.random((5, 8)) < 0.5] = 0.0
    kept = trim(x, threshold)
    for i in range(5):
        count = int(np.count_nonzero(x[i]))
        if count > threshold:
            assert not kept[i].any()
        else:
            np.testing.assert_array_equal(kept[i], x[i])


# ---------------------------------------------------------------- slicing


@COMMON
@given(seed=seeds, shape=st.tuples(dims, dims))
def test_slicer_lands_on_the_constellation(seed, shape):
    rng = np.random.default_rng(seed)
    soft = _complex_matrix(rng, *shape)
    hard = slice_qpsk(soft)
    np.testing.assert_allclose(np.abs(hard), 1.0, rtol=1e-12)
    root = 1 / np.sqrt(2)
    np.testing.assert_allclose(np.abs(hard.real), root, rtol=1e-12)
    np.testing.assert_allclose(np.abs(hard.imag), root, rtol=1e-12)
    # hard decisions are a fixed point
    assert ser(slice_qpsk(hard), hard) == 0.0
