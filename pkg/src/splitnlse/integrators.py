"""Exact sub-flows and the LTFS / STFS / exponential-Euler time steppers.

The NLSE is split as ``psi_t = A psi + B(psi)`` with ``A = i d_xx`` and
``B(psi) = -i (V + f(|psi|^2)) psi``.  Both sub-flows are exact:

* free flow ``e^{it d_xx}``: multiply coefficient ``l`` by ``exp(-i t mu_l^2)``;
* phase flow ``Phi_B^t``: multiply node values by ``exp(-i t (V + f(|psi|^2)))``,
  which leaves ``|psi|`` unchanged pointwise.

``P_N Phi_B^t`` is realized by evaluating the trigonometric polynomial on a
``q``-fold oversampled grid, applying the phase there and keeping the
coefficients in T_N of the fine-grid transform.

The public step functions take and return ``SpectralField`` objects in
canonical order.  ``evolve`` runs the same arithmetic through ``Propagator``,
which keeps coefficients in FFT-native order and reuses its tables.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
import scipy.fft as sfft

from .errors import DivergenceError, InvalidInputError
from .physics import InitialData, Nonlinearity, Potential, sample_initial, sample_potential
from .spectral import Grid, SpectralField, from_native, to_native

__all__ = [
    "SCHEMES",
    "SchemeRun",
    "Trajectory",
    "Propagator",
    "step_potential_values",
    "free_flow",
    "nonlinear_flow",
    "lie_step",
    "strang_step",
    "ewi_step",
    "evolve",
    "phi1",
]

SCHEMES = ("ltfs", "stfs", "ewi1")
DIVERGENCE_CHECK_INTERVAL = 1024
_BLOWUP = 1e100


def step_count(T, tau):
    """``round(T / tau)``, rejecting ratios that are not integers to 1e-9."""
    if not tau > 0:
        raise InvalidInputError(f"time step must be positive, got {tau}")
    if T < 0:
        raise InvalidInputError(f"final time must be nonnegative, got {T}")
    ratio = T / tau
    n = int(round(ratio))
    if abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise InvalidInputError(f"T/tau = {ratio!r} is not an integer step count")
    return n


@dataclass(frozen=True)
class SchemeRun:
    """Fully specified simulation.  ``oversample_q=None`` picks the potential's default."""

    scheme: str
    tau: float
    T: float
    grid: Grid
    potential: Potential = field(default_factory=lambda: Potential("zero"))
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    initial: InitialData = field(default_factory=InitialData.gaussian)
    oversample_q: Optional[int] = None

    def __post_init__(self):
        scheme = self.scheme.lower()
        if scheme not in SCHEMES:
            raise InvalidInputError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        object.__setattr__(self, "scheme", scheme)
        q = self.oversample_q
        if q is None:
            q = self.potential.default_oversampling
        if int(q) != q or q < 1:
            raise InvalidInputError(f"oversample_q must be a positive integer, got {q}")
        object.__setattr__(self, "oversample_q", int(q))
        step_count(self.T, self.tau)

    @property
    def n_steps(self):
        return step_count(self.T, self.tau)


@dataclass
class Trajectory:
    run: SchemeRun
    snapshots: List[Tuple[float, SpectralField]]
    wall_time: float

    @property
    def final(self):
        return self.snapshots[-1][1]

    def at(self, t):
        for s, f in self.snapshots:
            if math.isclose(s, t, rel_tol=1e-9, abs_tol=1e-12):
                return f
        raise KeyError(t)


def step_potential_values(potential, grid):
    """Potential samples used inside the phase flow on ``grid``.

    Equal to the closed form except at nodes that land exactly on a jump,
    where the mean of the one-sided limits is used.  That is the value for
    which the trapezoidal coefficient quadrature stays second order across
    the discontinuity.
    """
    v = np.array(sample_potential(potential, grid), dtype=float)
    for xj, left, right in potential.jumps:
        j = (xj - grid.a) / grid.h
        jr = round(j)
        if abs(j - jr) < 1e-9 and 0 <= jr < grid.N:
            v[jr] = 0.5 * (left + right)
    return v


@lru_cache(maxsize=32)
def _potential_table(potential, a, b, M):
    v = step_potential_values(potential, Grid(a, b, M))
    v.setflags(write=False)
    return v


def phi1(z):
    """``(e^z - 1) / z`` elementwise with the removable singularity ``phi1(0) = 1``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.ones_like(z)
    small = np.abs(z) < 1e-5
    zs = z[~small]
    out[~small] = np.expm1(zs) / zs
    zz = z[small]
    out[small] = 1.0 + zz / 2.0 + zz * zz / 6.0
    return out


class Propagator:
    """Per-run tables and in-place kernels working in FFT-native order.

    Instances own mutable work buffers: use one per thread of execution.
    """

    def __init__(self, grid, tau, potential, nonlinearity, q):
        self.grid = grid
        self.tau = float(tau)
        self.potential = potential
        self.nonlinearity = nonlinearity
        self.q = int(q)
        N = grid.N
        self.N = N
        self.M = M = self.q * N
        mu2 = grid.native_modes ** 2
        self.kin_full = np.exp(-1j * self.tau * mu2)
        self.kin_half = np.exp(-0.5j * self.tau * mu2)
        self.V = None if potential.is_zero else _potential_table(potential, grid.a, grid.b, M)
        self._buf = np.zeros(M, dtype=np.complex128)
        self._phi1 = None

    # native <-> fine grid --------------------------------------------------
    def _synth(self, c):
        h = self.N // 2
        buf = self._buf
        buf[:h] = c[:h]
        buf[self.M - h:] = c[h:]
        return sfft.ifft(buf, norm="forward")

    def _analyze(self, w):
        W = sfft.fft(w, norm="forward", overwrite_x=True)
        h = self.N // 2
        return np.concatenate((W[:h], W[self.M - h:]))

    def _phase_angle(self, w, t):
        """``t * (V + f(|w|^2))`` at the fine nodes, or None when identically 0."""
        nl = self.nonlinearity
        ang = None
        if nl.beta != 0.0:
            rho = w.real * w.real + w.imag * w.imag
            if nl.sigma != 1.0:
                np.power(rho, nl.sigma, out=rho)
            rho *= t * nl.beta
            ang = rho
        if self.V is not None:
            ang = t * self.V if ang is None else np.add(ang, t * self.V, out=ang)
        return ang

    # sub-flows ---------------------------------------------------------------
    def phase_flow(self, c, t=None):
        """``P_N Phi_B^t`` on native coefficients ``c`` (returns a new array)."""
        w = self._synth(c)
        return self._analyze(self.apply_phase(w, t))

    def apply_phase(self, w, t=None):
        """``Phi_B^t`` on fine-grid node values ``w`` (modified in place)."""
        t = self.tau if t is None else t
        ang = self._phase_angle(w, t)
        if ang is None:
            return w
        rot = np.empty(w.shape, dtype=np.complex128)
        rot.real = np.cos(ang)
        rot.imag = -np.sin(ang)
        w *= rot
        return w

    def fine_values(self, c):
        """Node values of native coefficients ``c`` on the oversampled grid."""
        return self._synth(c)

    def source(self, c):
        """``P_N[(V + f(|psi|^2)) psi]`` on native coefficients."""
        w = self._synth(c)
        ang = self._phase_angle(w, 1.0)
        if ang is None:
            return np.zeros(self.N, dtype=np.complex128)
        w *= ang
        return self._analyze(w)

    # steps -------------------------------------------------------------------
    def lie(self, c):
        c = self.phase_flow(c)
        c *= self.kin_full
        return c

    def strang(self, c):
        c = self.phase_flow(c * self.kin_half)
        c *= self.kin_half
        return c

    def ewi(self, c):
        if self._phi1 is None:
            self._phi1 = phi1(-1j * self.tau * self.grid.native_modes ** 2)
        g = self.source(c)
        return self.kin_full * c - 1j * self.tau * self._phi1 * g

    def stepper(self, scheme):
        return {"ltfs": self.lie, "stfs": self.strang, "ewi1": self.ewi}[scheme]


def _propagator_for(field, tau, run):
    if field.grid != run.grid:
        raise InvalidInputError("field does not live on the run's grid")
    return Propagator(run.grid, tau, run.potential, run.nonlinearity, run.oversample_q)


def free_flow(field, t):
    """Exact free Schroedinger flow ``e^{it d_xx}`` on X_N."""
    mult = np.exp(-1j * t * field.grid.modes ** 2)
    return SpectralField(field.grid, field.coeffs * mult)


def nonlinear_flow(field, tau, potential, nonlinearity, q=None):
    """``P_N Phi_B^tau``: pointwise phase on the ``q``-fold grid, then projection."""
    q = potential.default_oversampling if q is None else q
    prop = Propagator(field.grid, tau, potential, nonlinearity, q)
    c = prop.phase_flow(to_native(field.coeffs))
    return SpectralField(field.grid, from_native(c))


def _step(field, run, scheme):
    prop = _propagator_for(field, run.tau, run)
    c = prop.stepper(scheme)(to_native(field.coeffs))
    return SpectralField(field.grid, from_native(c))


def lie_step(field, run):
    """One Lie-Trotter step ``e^{i tau d_xx} P_N Phi_B^tau``."""
    return _step(field, run, "ltfs")


def strang_step(field, run):
    """One Strang step ``e^{i tau/2 d_xx} P_N Phi_B^tau e^{i tau/2 d_xx}``."""
    return _step(field, run, "stfs")


def ewi_step(field, run):
    """One exponential-Euler step.

    ``psi <- e^{i tau d_xx} psi - i tau phi1(-i tau mu^2) P_N[(V + f(|psi|^2)) psi]``
    """
    return _step(field, run, "ewi1")


def _snapshot_steps(run, snapshot_times):
    n = run.n_steps
    steps = []
    for t in snapshot_times:
        k = t / run.tau
        kr = int(round(k))
        if abs(k - kr) > 1e-9 * max(1.0, abs(k)) or kr < 0 or kr > n:
            raise InvalidInputError(f"snapshot time {t} is not a step time in [0, {run.T}]")
        steps.append(kr)
    return sorted(set(steps))


def evolve(run, snapshot_times=None, initial_field=None):
    """Advance ``run.n_steps`` steps from ``P_N psi_0`` and record snapshots.

    ``snapshot_times`` defaults to the final time only.  Raises
    ``DivergenceError`` (carrying the step index) if the coefficients stop
    being finite or blow up.
    """
    if snapshot_times is None:
        snapshot_times = [run.T]
    wanted = _snapshot_steps(run, snapshot_times)
    n_steps = run.n_steps
    t0 = time.perf_counter()
    if initial_field is None:
        initial_field = sample_initial(run.initial, run.grid, run.oversample_q)
    elif initial_field.grid != run.grid:
        raise InvalidInputError("initial field does not live on the run's grid")
    prop = Propagator(run.grid, run.tau, run.potential, run.nonlinearity, run.oversample_q)
    step = prop.stepper(run.scheme)
    c = to_native(initial_field.coeffs)
    snaps = []
    pending = iter(wanted)
    nxt = next(pending, None)
    for k in range(n_steps + 1):
        if k == nxt:
            snaps.append((k * run.tau, SpectralField(run.grid, from_native(c))))
            nxt = next(pending, None)
            if nxt is None:
                break
        if k == n_steps:
            break
        c = step(c)
        if (k + 1) % DIVERGENCE_CHECK_INTERVAL == 0 or k + 1 == n_steps:
            _check_finite(c, k + 1)
    return Trajectory(run, snaps, time.perf_counter() - t0)


def _check_finite(c, k):
    m = np.max(np.abs(c))
    if not np.isfinite(m) or m > _BLOWUP:
        raise DivergenceError(k)
