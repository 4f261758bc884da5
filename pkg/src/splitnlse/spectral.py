"""Periodic grids, Fourier analysis/synthesis and spectral projection.

Coefficients follow the convention

    u_hat[l] = 1/(b-a) * int_a^b u(x) exp(-i mu_l (x-a)) dx,   mu_l = 2 pi l / (b-a)

so ``u_hat[0]`` is the mean value of ``u`` and Parseval reads
``||u||_{L2}^2 = (b-a) * sum |u_hat[l]|^2``.

Storage order
-------------
Every coefficient array crossing the public API is in *canonical* order
``l = -N/2, ..., N/2-1``.  The FFT engine works in its native order
``l = 0, 1, ..., N/2-1, -N/2, ..., -1``; the two are related by
``numpy.fft.fftshift`` / ``ifftshift``.  The helpers ``to_native`` and
``from_native`` are the only places where that permutation happens.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import InvalidInputError

__all__ = [
    "Grid",
    "SpectralField",
    "SampledField",
    "forward_transform",
    "inverse_transform",
    "project",
    "embed",
    "synthesize",
    "sobolev_norm",
    "to_native",
    "from_native",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``(a, b)`` with ``N`` nodes and modes."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        if not self.b > self.a:
            raise InvalidInputError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise InvalidInputError(f"N must be an even integer >= 4, got {self.N}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "N", int(self.N))

    @classmethod
    def from_h(cls, a, b, h):
        """Grid with mesh size ``h``; ``(b-a)/h`` must be an even integer."""
        n = (b - a) / h
        N = int(round(n))
        if abs(n - N) > 1e-9 * n:
            raise InvalidInputError(f"h={h} does not divide the interval length {b - a}")
        return cls(a, b, N)

    @property
    def length(self):
        return self.b - self.a

    @property
    def h(self):
        return self.length / self.N

    @cached_property
    def nodes(self):
        """Nodes ``x_j = a + j h`` for ``j = 0..N-1``."""
        return self.a + self.h * np.arange(self.N)

    @cached_property
    def indices(self):
        """Mode indices ``l = -N/2..N/2-1`` (canonical order)."""
        return np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def modes(self):
        """Frequencies ``mu_l = 2 pi l / (b-a)`` in canonical order."""
        return 2.0 * np.pi * self.indices / self.length

    @cached_property
    def native_modes(self):
        """Frequencies in FFT-native order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.N, d=1.0 / self.N) / self.length

    def refine(self, q):
        """Grid on the same interval with ``q * N`` nodes."""
        if int(q) != q or q < 1:
            raise InvalidInputError(f"oversampling factor must be a positive integer, got {q}")
        return Grid(self.a, self.b, int(q) * self.N)

    def same_interval(self, other):
        return self.a == other.a and self.b == other.b


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Element of X_N: ``N`` Fourier coefficients in canonical order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.N,):
            raise InvalidInputError(
                f"expected {self.grid.N} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def coefficient(self, l):
        """Coefficient ``u_hat[l]`` for ``l`` in T_N."""
        N = self.grid.N
        if not -N // 2 <= l < N // 2:
            raise InvalidInputError(f"mode {l} not in T_{N}")
        return self.coeffs[l + N // 2]

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.N, dtype=np.complex128))

    @classmethod
    def single_mode(cls, grid, l, amplitude=1.0):
        f = cls.zeros(grid)
        if not -grid.N // 2 <= l < grid.N // 2:
            return f
        f.coeffs[l + grid.N // 2] = amplitude
        return f


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex node values on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.N,):
            raise InvalidInputError(
                f"expected {self.grid.N} samples, got shape {v.shape}")
        object.__setattr__(self, "values", v)


def to_native(coeffs):
    """Canonical order -> FFT-native order."""
    return np.fft.ifftshift(coeffs)


def from_native(coeffs):
    """FFT-native order -> canonical order."""
    return np.fft.fftshift(coeffs)


def forward_transform(samples):
    """Discrete Fourier coefficients of ``samples`` for all l in T_M.

    Trapezoidal quadrature of the coefficient integral on the M periodic
    nodes, returned in canonical order.
    """
    if not isinstance(samples, SampledField):
        raise InvalidInputError("forward_transform expects a SampledField")
    M = samples.grid.N
    return from_native(sfft.fft(samples.values) / M)


def inverse_transform(coeffs, grid):
    """Evaluate ``sum_l u_hat[l] exp(i mu_l (x_j - a))`` at the grid nodes."""
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.shape != (grid.N,):
        raise InvalidInputError(f"expected {grid.N} coefficients, got shape {c.shape}")
    return SampledField(grid, sfft.ifft(to_native(c)) * grid.N)


def _resize_canonical(coeffs, N_out):
    """Truncate or zero-pad canonical coefficients to ``N_out`` modes."""
    N_in = coeffs.shape[0]
    if N_out == N_in:
        return coeffs.copy()
    if N_out < N_in:
        off = (N_in - N_out) // 2
        return coeffs[off:off + N_out].copy()
    out = np.zeros(N_out, dtype=np.complex128)
    off = (N_out - N_in) // 2
    out[off:off + N_in] = coeffs
    return out


def project(source, target_N):
    """L2 projection P_N onto X_{target_N}: keep l in T_{target_N}, drop the rest."""
    if int(target_N) != target_N or target_N < 4 or target_N % 2:
        raise InvalidInputError(f"target_N must be an even integer >= 4, got {target_N}")
    target_N = int(target_N)
    if isinstance(source, SampledField):
        coeffs = forward_transform(source)
        grid = source.grid
    elif isinstance(source, SpectralField):
        coeffs = source.coeffs
        grid = source.grid
    else:
        raise InvalidInputError("project expects a SpectralField or SampledField")
    if target_N > grid.N:
        raise InvalidInputError(
            f"cannot project onto X_{target_N}: source resolves only {grid.N} modes")
    return SpectralField(Grid(grid.a, grid.b, target_N), _resize_canonical(coeffs, target_N))


def embed(field, N):
    """Zero-pad a field into X_N for ``N >= field.grid.N`` (exact inclusion)."""
    if N < field.grid.N:
        raise InvalidInputError(f"cannot embed X_{field.grid.N} into smaller X_{N}")
    g = field.grid
    return SpectralField(Grid(g.a, g.b, N), _resize_canonical(field.coeffs, N))


def synthesize(field, eval_grid):
    """Evaluate a trigonometric polynomial on a grid with ``q * N`` nodes."""
    g = field.grid
    if not g.same_interval(eval_grid):
        raise InvalidInputError("evaluation grid must share the field's interval")
    M = eval_grid.N
    if M % g.N:
        raise InvalidInputError(f"evaluation grid size {M} is not a multiple of {g.N}")
    return inverse_transform(_resize_canonical(field.coeffs, M), eval_grid)


def sobolev_norm(field, m=0):
    """``sqrt((b-a) * sum (1 + mu_l^2)^m |u_hat[l]|^2)``."""
    if m < 0:
        raise InvalidInputError(f"Sobolev index must be nonnegative, got {m}")
    w = np.abs(field.coeffs) ** 2
    if m:
        w = w * (1.0 + field.grid.modes ** 2) ** m
    return float(np.sqrt(field.grid.length * w.sum()))
