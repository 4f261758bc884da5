"""Potentials, power nonlinearity and initial data for the 1D NLSE

    i psi_t = -psi_xx + V(x) psi + f(|psi|^2) psi,    f(rho) = beta * rho**sigma.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError
from .spectral import Grid, SampledField, SpectralField, project, synthesize

__all__ = [
    "Nonlinearity",
    "Potential",
    "InitialData",
    "POTENTIALS",
    "INITIAL_DATA",
    "potential_from_key",
    "initial_from_key",
    "eval_potential",
    "eval_f",
    "sample_potential",
    "sample_initial",
]


@dataclass(frozen=True)
class Nonlinearity:
    beta: float = -1.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidInputError(f"sigma must be positive, got {self.sigma}")

    def __call__(self, rho):
        return eval_f(self, rho)


def eval_f(nl, rho):
    """``beta * rho**sigma``; ``f(0) = 0`` for every ``sigma > 0``."""
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0):
        raise InvalidInputError("f is defined for nonnegative densities only")
    if nl.sigma == 1.0:
        out = nl.beta * r
    else:
        out = nl.beta * r ** nl.sigma
    return out if out.ndim else float(out)


def _box4(x):
    return np.where(np.abs(x) < 2.0, -4.0, 0.0)


def _window(x):
    return 1.0 - x * x / 16.0 ** 2


_CLOSED_FORMS = {
    "box4": _box4,
    "fracpow076": lambda x: np.abs(x) ** 0.76,
    "fracpow151w": lambda x: np.abs(x) ** 1.51 * _window(x) ** 2,
    "fracpow251w": lambda x: np.abs(x) ** 2.51 * _window(x) ** 3,
    "harmonic": lambda x: 0.5 * x * x,
    "zero": lambda x: np.zeros_like(x),
}

# jump locations and the one-sided limits (left, right) there
_JUMPS = {"box4": ((-2.0, 0.0, -4.0), (2.0, -4.0, 0.0))}


@dataclass(frozen=True, eq=False)
class Potential:
    """Real, time-independent potential.

    ``key`` selects a closed form (see ``POTENTIALS``) or ``"custom"``, in
    which case ``samples`` on ``sample_grid`` define a band-limited potential
    through their trigonometric interpolant.  Discontinuous potentials must
    use a closed form so they can be sampled on the oversampled step grid.
    """

    key: str
    samples: Optional[np.ndarray] = field(default=None, repr=False)
    sample_grid: Optional[Grid] = None

    def __post_init__(self):
        if self.key == "custom":
            if self.samples is None or self.sample_grid is None:
                raise InvalidInputError("custom potential needs samples and sample_grid")
            v = np.asarray(self.samples)
            if np.iscomplexobj(v) and np.any(v.imag != 0):
                raise InvalidInputError("potential samples must be real")
            v = np.asarray(v.real if np.iscomplexobj(v) else v, dtype=float)
            if v.shape != (self.sample_grid.N,):
                raise InvalidInputError("sample count does not match sample_grid")
            object.__setattr__(self, "samples", v)
        elif self.key not in _CLOSED_FORMS:
            raise InvalidInputError(f"unknown potential {self.key!r}")

    @classmethod
    def custom(cls, values, grid):
        return cls("custom", np.asarray(values), grid)

    @property
    def is_zero(self):
        return self.key == "zero"

    @property
    def jumps(self):
        """Tuples ``(x, left_limit, right_limit)`` at each jump discontinuity."""
        return _JUMPS.get(self.key, ())

    @property
    def default_oversampling(self):
        return 16 if self.jumps else 8

    def __call__(self, x):
        return eval_potential(self, x)


POTENTIALS = tuple(_CLOSED_FORMS)


def potential_from_key(key):
    return Potential(key)


def eval_potential(p, x):
    """Closed-form value ``V(x)``; accepts scalars or arrays.

    Box4 takes the value 0 at ``x = +-2``.  A custom potential can only be
    evaluated at its own sample nodes.
    """
    xa = np.asarray(x, dtype=float)
    if p.key == "custom":
        g = p.sample_grid
        j = (xa - g.a) / g.h
        jr = np.rint(j)
        if np.any(np.abs(j - jr) > 1e-9) or np.any(jr < 0) or np.any(jr > g.N):
            raise InvalidInputError("custom potential evaluated off its sample grid")
        out = p.samples[jr.astype(int) % g.N]
    else:
        out = _CLOSED_FORMS[p.key](xa)
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


def sample_potential(p, grid):
    """Potential values at the nodes of ``grid``.

    Custom potentials are refined by spectral interpolation, so ``grid`` must
    share their interval and have a multiple of their node count.
    """
    if p.key != "custom":
        return eval_potential(p, grid.nodes)
    field = project(SampledField(p.sample_grid, p.samples), p.sample_grid.N)
    return synthesize(field, grid).values.real.copy()


@dataclass(frozen=True)
class InitialData:
    """Initial condition: ``"gaussian"``, ``"odd-gaussian"``, ``"mode"`` or ``"custom"``."""

    key: str
    l: int = 0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.key not in ("gaussian", "odd-gaussian", "mode", "custom"):
            raise InvalidInputError(f"unknown initial data {self.key!r}")
        if self.key == "custom" and self.func is None:
            raise InvalidInputError("custom initial data needs a callable")

    @classmethod
    def gaussian(cls):
        return cls("gaussian")

    @classmethod
    def odd_gaussian(cls):
        return cls("odd-gaussian")

    @classmethod
    def single_mode(cls, l):
        return cls("mode", l=int(l))

    @classmethod
    def custom(cls, func):
        return cls("custom", func=func)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.key == "gaussian":
            return np.exp(-0.5 * x * x)
        if self.key == "odd-gaussian":
            return x * np.exp(-0.5 * x * x)
        if self.key == "custom":
            return np.asarray(self.func(x), dtype=np.complex128)
        raise InvalidInputError("single-mode data has no interval-free closed form")


INITIAL_DATA = ("gaussian", "odd-gaussian")


def initial_from_key(key):
    return InitialData(key)


def sample_initial(data, grid, q=8):
    """``P_N psi_0``: sample on the ``q``-fold refined grid, transform, truncate."""
    if data.key == "mode":
        return SpectralField.single_mode(grid, data.l)
    fine = grid.refine(q)
    vals = data(fine.nodes)
    return project(SampledField(fine, vals), grid.N)
