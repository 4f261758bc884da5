"""Randomized invariant checks that run without pytest (``splitnlse selftest``)."""
from __future__ import annotations

import math

import numpy as np

from .analysis import error_norms, rco_diagnostics
from .integrators import Propagator, free_flow, lie_step, strang_step, SchemeRun
from .physics import InitialData, Nonlinearity, Potential, sample_initial
from .spectral import (
    Grid, SampledField, SpectralField, embed, forward_transform, inverse_transform, project,
    sobolev_norm, to_native,
)

OMEGA = (-16.0, 16.0)


def _rand(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def check_round_trip(rng):
    worst = 0.0
    for M in (8, 64, 512):
        g = Grid(*OMEGA, M)
        v = _rand(rng, M)
        back = inverse_transform(forward_transform(SampledField(g, v)), g).values
        worst = max(worst, np.linalg.norm(back - v) / np.linalg.norm(v))
    return worst < 1e-12, f"max relative round-trip error {worst:.2e}"


def check_brute_force_dft(rng):
    worst = 0.0
    for M in (4, 8, 16):
        g = Grid(*OMEGA, M)
        v = _rand(rng, M)
        direct = np.array([np.sum(v * np.exp(-1j * mu * (g.nodes - g.a))) / M for mu in g.modes])
        worst = max(worst, np.max(np.abs(forward_transform(SampledField(g, v)) - direct)))
    return worst < 1e-12, f"max deviation from direct summation {worst:.2e}"


def check_parseval(rng):
    g = Grid(*OMEGA, 64)
    f = SpectralField(g, _rand(rng, 64))
    quad = g.h * np.sum(np.abs(inverse_transform(f.coeffs, g).values) ** 2)
    rel = abs(sobolev_norm(f, 0) ** 2 - quad) / quad
    return rel < 1e-12, f"relative Parseval defect {rel:.2e}"


def check_projection_contraction(rng):
    f = SpectralField(Grid(*OMEGA, 64), _rand(rng, 64))
    ok = all(sobolev_norm(project(f, 16), m) <= sobolev_norm(f, m) for m in (0, 1))
    return ok, "||P_N u||_{H^m} <= ||u||_{H^m} for m = 0, 1"


def check_free_flow_isometry(rng):
    f = SpectralField(Grid(*OMEGA, 64), _rand(rng, 64))
    worst = max(abs(sobolev_norm(free_flow(f, t), m) - sobolev_norm(f, m)) / sobolev_norm(f, m)
                for m in (0, 1, 2) for t in (0.1, 1.0, 10.0))
    return worst < 1e-12, f"max relative norm change {worst:.2e}"


def check_phase_modulus(rng):
    g = Grid(*OMEGA, 64)
    prop = Propagator(g, 0.1, Potential("box4"), Nonlinearity(-1.0, 0.3), 8)
    w = prop.fine_values(_rand(rng, 64) / 8)
    before = np.abs(w).copy()
    dev = float(np.max(np.abs(np.abs(prop.apply_phase(w)) - before)))
    return dev < 1e-12, f"max pointwise modulus change {dev:.2e}"


def check_mass_monotone(rng):
    g = Grid(*OMEGA, 128)
    run = SchemeRun("ltfs", 0.02, 0.02, g, Potential("box4"), Nonlinearity(-1.0, 1.0),
                    InitialData.gaussian())
    psi = sample_initial(run.initial, g)
    worst = -math.inf
    for step in (lie_step, strang_step):
        u = psi
        for _ in range(3):
            v = step(u, run)
            worst = max(worst, (sobolev_norm(v) - sobolev_norm(u)) / sobolev_norm(u))
            u = v
    return worst <= 1e-12, f"largest relative one-step mass increase {worst:.2e}"


def check_degeneration(rng):
    g = Grid(*OMEGA, 64)
    f = SpectralField(g, _rand(rng, 64) / (1 + g.indices ** 2))
    prop = Propagator(g, 0.01, Potential("zero"), Nonlinearity(0.0, 1.0), 2)
    ref = to_native(free_flow(f, 0.01).coeffs)
    c = to_native(f.coeffs)
    worst = max(np.max(np.abs(step(c) - ref)) for step in (prop.lie, prop.strang, prop.ewi))
    return worst < 1e-12, f"max deviation of steppers from free flow {worst:.2e}"


def check_error_embedding(rng):
    u = SpectralField(Grid(*OMEGA, 16), _rand(rng, 16))
    return error_norms(u, embed(u, 64), 1) == 0.0, "error_norms(u, embed(u)) == 0"


def check_rco_bound(rng):
    worst = 0.0
    for _ in range(100):
        g = Grid(*OMEGA, int(2 ** rng.integers(3, 12)))
        tau = rng.uniform(0.01, 0.999) * g.h ** 2 / math.pi
        for n in (1, 10, 1000):
            worst = max(worst, rco_diagnostics(g, tau, n).max_product / (math.pi * tau / 2))
    return worst <= 1.0, f"max |delta_l S_nl| / (pi tau / 2) = {worst:.4f} under tau < h^2/pi"


CHECKS = [
    ("transform round trip", check_round_trip),
    ("DFT vs direct summation", check_brute_force_dft),
    ("Parseval", check_parseval),
    ("projection contraction", check_projection_contraction),
    ("free-flow isometry", check_free_flow_isometry),
    ("phase flow modulus", check_phase_modulus),
    ("mass monotonicity", check_mass_monotone),
    ("stepper degeneration", check_degeneration),
    ("error embedding", check_error_embedding),
    ("RCO bound", check_rco_bound),
]


def run_selftest(seed=0, out=print):
    """Run every check; return True when all pass."""
    rng = np.random.default_rng(seed)
    ok_all = True
    for name, check in CHECKS:
        ok, detail = check(rng)
        ok_all &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok_all
