"""Error norms against reference solutions, order fits and RCO diagnostics."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .spectral import SpectralField, embed, sobolev_norm

__all__ = [
    "ErrorSample",
    "RcoTable",
    "error_norms",
    "error_sample",
    "estimate_order",
    "rco_diagnostics",
    "delta_factor",
    "RCO_CSV_HEADER",
]

RCO_CSV_HEADER = ("l", "mu", "abs_delta", "abs_S", "abs_product")


@dataclass(frozen=True)
class ErrorSample:
    t: float
    e_l2: float
    e_h1: float


def error_norms(numeric, reference, m=0):
    """``||numeric - reference||_{H^m}`` after zero-padding both into the larger mode set."""
    if not numeric.grid.same_interval(reference.grid):
        raise InvalidInputError("fields live on different intervals")
    if m not in (0, 1):
        raise InvalidInputError(f"error norm index must be 0 or 1, got {m}")
    N = max(numeric.grid.N, reference.grid.N)
    u = embed(numeric, N)
    v = embed(reference, N)
    return sobolev_norm(SpectralField(u.grid, u.coeffs - v.coeffs), m)


def error_sample(t, numeric, reference):
    return ErrorSample(t, error_norms(numeric, reference, 0), error_norms(numeric, reference, 1))


def estimate_order(points, drop_coarsest=False):
    """Least-squares slope of ``log(error)`` against ``log(tau)``.

    ``drop_coarsest`` discards the point with the largest ``tau`` first.
    """
    pts = sorted((float(t), float(e)) for t, e in points)
    if drop_coarsest:
        pts = pts[:-1]
    if len(pts) < 2:
        raise InvalidInputError("need at least two (tau, error) points")
    taus, errs = np.array(pts).T
    if np.any(taus <= 0) or np.any(errs <= 0):
        raise InvalidInputError("tau and error values must be positive")
    if np.unique(taus).size < 2:
        raise InvalidInputError("need at least two distinct tau values")
    slope, _ = np.polyfit(np.log(taus), np.log(errs), 1)
    return float(slope)


def delta_factor(theta):
    """``delta / tau`` as a function of ``theta = tau * mu^2``.

    ``delta = int_0^tau (1 - e^{i s mu^2}) ds = tau * (1 - (e^{i theta} - 1)/(i theta))``.
    Small ``theta`` uses the Taylor series to avoid cancellation.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape, dtype=np.complex128)
    nz = theta != 0
    t = theta[nz]
    small = np.abs(t) < 1e-2
    re = np.empty_like(t)
    im = np.empty_like(t)
    ts = t[small]
    t2 = ts * ts
    re[small] = t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
    im[small] = -ts / 2.0 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0))
    tl = t[~small]
    re[~small] = 1.0 - np.sin(tl) / tl
    im[~small] = -2.0 * np.sin(0.5 * tl) ** 2 / tl
    out[nz] = re + 1j * im
    return out


@dataclass(frozen=True, eq=False)
class RcoTable:
    """Per-mode ``|delta_l|``, ``|S_{n,l}|`` and their product for one ``(tau, n)``."""

    tau: float
    n: int
    l: np.ndarray
    mu: np.ndarray
    abs_delta: np.ndarray
    abs_S: np.ndarray
    abs_product: np.ndarray

    @property
    def max_product(self):
        return float(self.abs_product.max())

    def rows(self):
        return zip(self.l.tolist(), self.mu.tolist(), self.abs_delta.tolist(),
                   self.abs_S.tolist(), self.abs_product.tolist())

    def to_csv(self, path=None):
        """Write ``l,mu,abs_delta,abs_S,abs_product`` rows; return the text if no path."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RCO_CSV_HEADER)
        for l, mu, d, s, p in self.rows():
            w.writerow((l, repr(mu), repr(d), repr(s), repr(p)))
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return text


def rco_diagnostics(grid, tau, n):
    """Tabulate ``delta_l`` and the geometric sums ``S_{n,l} = sum_{k<=n} e^{i k tau mu_l^2}``.

    ``|S_{n,l}| = |sin((n+1) theta/2) / sin(theta/2)|`` with ``theta = tau mu_l^2``;
    the degenerate case ``e^{i theta} = 1`` (always at ``l = 0``) is exactly ``n + 1``.
    """
    if int(n) != n or n < 0:
        raise InvalidInputError(f"step index must be a nonnegative integer, got {n}")
    if not tau > 0:
        raise InvalidInputError(f"tau must be positive, got {tau}")
    n = int(n)
    mu = grid.modes
    theta = tau * mu * mu
    abs_delta = tau * np.abs(delta_factor(theta))
    half = np.sin(0.5 * theta)
    degenerate = half == 0.0
    abs_S = np.empty_like(theta)
    abs_S[degenerate] = n + 1
    nd = ~degenerate
    abs_S[nd] = np.abs(np.sin(0.5 * (n + 1) * theta[nd]) / half[nd])
    return RcoTable(float(tau), n, grid.indices.copy(), mu.copy(), abs_delta, abs_S,
                    abs_delta * abs_S)
