import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from splitnlse.analysis import (
    RCO_CSV_HEADER, delta_factor, error_norms, error_sample, estimate_order, rco_diagnostics,
)
from splitnlse.errors import InvalidInputError
from splitnlse.spectral import Grid, SpectralField, embed

OMEGA = (-16.0, 16.0)


def rand_field(rng, N):
    return SpectralField(Grid(*OMEGA, N), rng.standard_normal(N) + 1j * rng.standard_normal(N))


def test_error_against_own_embedding_is_zero():
    rng = np.random.default_rng(0)
    u = rand_field(rng, 32)
    assert error_norms(u, embed(u, 128), 0) == 0.0
    assert error_norms(embed(u, 128), u, 1) == 0.0


def test_error_single_coefficient_h1():
    g = Grid(*OMEGA, 64)
    eps, l = 1e-3, 7
    u = SpectralField.single_mode(g, 0, 1.0)
    v = SpectralField(g, u.coeffs.copy())
    v.coeffs[l + 32] += eps
    mu = 2 * math.pi * l / 32
    assert error_norms(u, v, 1) == pytest.approx(eps * math.sqrt(32 * (1 + mu * mu)), rel=1e-12)
    assert error_norms(u, v, 0) == pytest.approx(eps * math.sqrt(32), rel=1e-12)


def test_error_symmetric_and_checks():
    rng = np.random.default_rng(1)
    u, v = rand_field(rng, 16), rand_field(rng, 64)
    assert error_norms(u, v, 1) == error_norms(v, u, 1)
    with pytest.raises(InvalidInputError):
        error_norms(u, SpectralField.zeros(Grid(-8.0, 8.0, 16)))
    with pytest.raises(InvalidInputError):
        error_norms(u, v, 2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), m=st.sampled_from([0, 1]))
def test_error_triangle_inequality(seed, m):
    rng = np.random.default_rng(seed)
    u, v, w = rand_field(rng, 16), rand_field(rng, 32), rand_field(rng, 64)
    assert error_norms(u, w, m) <= error_norms(u, v, m) + error_norms(v, w, m) + 1e-12


def test_error_sample_fields():
    rng = np.random.default_rng(2)
    u, v = rand_field(rng, 16), rand_field(rng, 16)
    s = error_sample(0.5, u, v)
    assert s.t == 0.5 and 0 < s.e_l2 <= s.e_h1


@pytest.mark.parametrize("points,expected", [
    ([(0.1, 0.1 * 3), (0.01, 0.01 * 3)], 1.0),
    ([(0.1, 3e-2), (0.01, 3e-4)], 2.0),
    ([(2.0 ** -k, 5 * 2.0 ** (-k / 2)) for k in range(6)], 0.5),
])
def test_estimate_order_exact_power_laws(points, expected):
    assert estimate_order(points) == pytest.approx(expected, abs=1e-12)


def test_estimate_order_drop_coarsest():
    pts = [(1e-3, 1e-3), (1e-2, 1e-2), (1e-1, 1.0)]
    assert estimate_order(pts, drop_coarsest=True) == pytest.approx(1.0, abs=1e-12)
    assert estimate_order(pts) > 1.0


@pytest.mark.parametrize("pts", [[(0.1, 1.0)], [(0.1, 0.0), (0.2, 1.0)], [(-1, 1), (0.1, 1)],
                                 [(0.1, 1.0), (0.1, 2.0)]])
def test_estimate_order_rejects(pts):
    with pytest.raises(InvalidInputError):
        estimate_order(pts)


def test_delta_factor_matches_quadrature():
    # independent oracle: integrate 1 - exp(i s mu^2) over [0, tau] numerically
    tau = 1.0
    for theta in (1e-6, 3e-3, 0.009, 0.011, 0.5, 3.0, 40.0):
        re = quad(lambda s: 2 * math.sin(s * theta / 2) ** 2, 0, tau, limit=400)[0]
        im = quad(lambda s: -math.sin(s * theta), 0, tau, limit=400)[0]
        d = delta_factor(np.array([theta]))[0]
        assert d.real == pytest.approx(re, rel=1e-9, abs=1e-300)
        assert d.imag == pytest.approx(im, rel=1e-9)


def test_rco_rows_and_zero_mode():
    g = Grid(*OMEGA, 64)
    t = rco_diagnostics(g, 1e-3, 25)
    assert len(t.l) == 64 and t.abs_delta.shape == (64,)
    i0 = int(np.where(t.l == 0)[0][0])
    assert t.abs_delta[i0] == 0.0
    assert t.abs_S[i0] == 26


def test_rco_geometric_sum_against_direct_sum():
    g = Grid(*OMEGA, 32)
    tau, n = 0.013, 40
    t = rco_diagnostics(g, tau, n)
    k = np.arange(n + 1)
    direct = np.abs(np.exp(1j * np.outer(tau * g.modes ** 2, k)).sum(axis=1))
    np.testing.assert_allclose(t.abs_S, direct, rtol=1e-10, atol=1e-11)


@pytest.mark.parametrize("N,tau", [(64, 1e-3), (512, 0.3), (4096, 1e-6)])
def test_rco_delta_bound_every_row(N, tau):
    t = rco_diagnostics(Grid(*OMEGA, N), tau, 10)
    assert np.all(t.abs_delta <= tau ** 2 * t.mu ** 2 / 2 * (1 + 1e-12))


def test_rco_product_bound_under_cfl():
    g = Grid(*OMEGA, 512)
    tau = 0.9 * g.h ** 2 / math.pi
    t = rco_diagnostics(g, tau, 1000)
    assert t.max_product <= math.pi * tau / 2


@settings(max_examples=100, deadline=None)
@given(k=st.integers(3, 12), frac=st.floats(0.01, 0.999), n=st.sampled_from([1, 10, 1000]))
def test_rco_product_bound_random(k, frac, n):
    g = Grid(*OMEGA, 2 ** k)
    tau = frac * g.h ** 2 / math.pi
    assert rco_diagnostics(g, tau, n).max_product <= math.pi * tau / 2


def test_rco_bound_fails_beyond_cfl():
    # tau = 4 h^2 puts tau mu_l^2 near 2 pi for some l, where S_{n,l} grows like n
    g = Grid(*OMEGA, 64)
    tau = 4 * g.h ** 2
    t = rco_diagnostics(g, tau, 1000)
    assert t.max_product > math.pi * tau / 2
    witness = int(t.l[np.argmax(t.abs_product)])
    assert abs(witness) in range(1, 33)


def test_rco_csv(tmp_path):
    t = rco_diagnostics(Grid(*OMEGA, 8), 1e-2, 3)
    path = tmp_path / "rco.csv"
    text = t.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(RCO_CSV_HEADER) == "l,mu,abs_delta,abs_S,abs_product"
    assert len(lines) == 9 and text == path.read_text()
    assert float(lines[1].split(",")[4]) == t.abs_product[0]


def test_rco_rejects_negative_n():
    with pytest.raises(InvalidInputError):
        rco_diagnostics(Grid(*OMEGA, 8), 1e-2, -1)
