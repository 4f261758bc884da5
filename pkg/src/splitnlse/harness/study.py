"""Reference solutions and convergence sweeps."""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path

from filelock import FileLock

from ..analysis import error_norms
from ..errors import CacheError
from ..integrators import SchemeRun, evolve
from ..physics import InitialData, Nonlinearity, Potential
from ..spectral import Grid
from .cache import CacheHeader, read_cache, write_cache

log = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "potential", "sigma", "beta", "h", "tau", "norm", "error", "n_steps",
              "wall_seconds")
_NORM_INDEX = {"L2": 0, "H1": 1}


@dataclass(frozen=True)
class ConvergenceRecord:
    scheme: str
    potential: str
    sigma: float
    beta: float
    h: float
    tau: float
    norm: str
    error: float
    n_steps: int
    wall_seconds: float


def cache_dir(config=None):
    """``$NLSE_CACHE_DIR``, else the config's ``cache_dir``, else ``~/.cache/splitnlse``."""
    env = os.environ.get("NLSE_CACHE_DIR")
    if env:
        return Path(env)
    if config is not None and config.cache_dir:
        return Path(config.cache_dir)
    return Path.home() / ".cache" / "splitnlse"


def reference_header(config, sigma):
    q = config.reference_q or Potential(config.potential).default_oversampling
    return CacheHeader(config.a, config.b, config.N_e, config.tau_e, config.T, "stfs",
                       float(config.beta), float(sigma), config.potential, int(q))


def reference_path(config, sigma, directory=None):
    hd = reference_header(config, sigma)
    name = (f"ref-{hd.potential}-{config.initial}-beta{hd.beta!r}-sigma{hd.sigma!r}"
            f"-a{hd.a!r}-b{hd.b!r}-N{hd.N}-tau{hd.tau_e!r}-T{hd.T!r}-q{hd.oversample_q}.nlsr")
    return Path(directory or cache_dir(config)) / name


def reference_run(config, sigma):
    hd = reference_header(config, sigma)
    return SchemeRun("stfs", hd.tau_e, hd.T, Grid(hd.a, hd.b, hd.N), Potential(hd.potential),
                     Nonlinearity(hd.beta, hd.sigma), InitialData(config.initial),
                     hd.oversample_q)


def compute_reference(config, sigma=None, recompute=False, directory=None):
    """STFS solution at ``(tau_e, h_e)`` and final time T, cached on disk.

    An existing cache with a matching header is returned as is.  A corrupted
    file raises ``CacheError`` unless ``recompute`` is set.
    """
    sigma = config.sigmas[0] if sigma is None else sigma
    path = reference_path(config, sigma, directory)
    header = reference_header(config, sigma)
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        if path.exists() and not recompute:
            cached = read_cache(path)
            if cached.header == header:
                return cached
            raise CacheError(f"{path} holds a different reference ({cached.header}); recompute")
        log.info("computing reference %s", path.name)
        traj = evolve(reference_run(config, sigma))
        return write_cache(path, header, traj.final)


def _run_cell(args):
    scheme, config, sigma, h, tau, reference = args
    grid = Grid(config.a, config.b, int(round((config.b - config.a) / h)))
    run = SchemeRun(scheme, tau, config.T, grid, Potential(config.potential),
                    Nonlinearity(config.beta, sigma), InitialData(config.initial),
                    config.oversample_q)
    traj = evolve(run)
    errs = {n: error_norms(traj.final, reference, _NORM_INDEX[n]) for n in config.norms}
    wall = 0.0 if config.zero_timing else traj.wall_time
    return [ConvergenceRecord(scheme, config.potential, float(sigma), float(config.beta),
                              float(h), float(tau), n, float(errs[n]), run.n_steps, wall)
            for n in config.norms]


def run_convergence_study(config, workers=1, directory=None, write_outputs=True):
    """One record per (scheme, sigma, h, tau, norm), sorted by (scheme, sigma, h, tau).

    References are computed (or loaded) first, one per sigma.  Cells run in
    ``workers`` processes when ``workers > 1``.  Writes the configured CSV and
    SVG outputs when ``write_outputs`` is set.
    """
    refs = {s: compute_reference(config, s, directory=directory).field for s in config.sigmas}
    cells = [(scheme, config, s, h, tau, refs[s])
             for scheme in config.schemes for s in config.sigmas
             for h, tau in config.sweep_pairs()]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_run_cell, cells))
    else:
        chunks = [_run_cell(c) for c in cells]
    records = sorted((r for chunk in chunks for r in chunk),
                     key=lambda r: (r.scheme, r.sigma, r.h, r.tau, r.norm))
    if write_outputs:
        if config.csv:
            write_csv(records, config.csv)
        if config.svg:
            from .plot import emit_plot

            emit_plot(records, config.svg)
    return records


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        row = astuple(r)
        w.writerow(repr(v) if isinstance(v, float) else v for v in row)
    return buf.getvalue()


def write_csv(records, path):
    text = records_to_csv(records)
    Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header")
    types = [f.type for f in fields(ConvergenceRecord)]
    conv = {"str": str, "float": float, "int": int}
    return [ConvergenceRecord(*(conv[t](v) for t, v in zip(types, row))) for row in rows[1:]]
