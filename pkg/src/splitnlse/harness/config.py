"""Experiment configuration: INI-style sections of flat ``key = value`` pairs.

Example::

    [study]
    schemes = ltfs
    potential = box4
    initial = gaussian
    beta = -1
    sigmas = 1
    norms = L2

    [sweep]
    mode = diagonal          # or: grid
    h = 2^-3, 2^-4, 2^-5
    cfl_fraction = 0.9       # diagonal rule tau = cfl_fraction * h^2 / pi
    # tau0 = 0.0179          # alternative diagonal rule tau = tau0 * (h / h_max)^2
    # tau = 1e-1, 1e-2       # grid mode: every h paired with every tau

    [reference]
    tau_e = 1e-5
    h_e = 2^-7

    [output]
    csv = study.csv
    svg = study.svg

Unknown sections and keys are rejected.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple

from ..errors import ConfigError
from ..integrators import SCHEMES
from ..physics import INITIAL_DATA, POTENTIALS

INTERVAL = (-16.0, 16.0)
DESK_REFERENCE = (1e-5, 2.0 ** -7)
FULL_REFERENCE = (1e-6, 2.0 ** -9)

_KEYS = {
    "study": {"schemes", "potential", "initial", "beta", "sigmas", "norms", "t", "a", "b",
              "oversample_q", "seed"},
    "sweep": {"mode", "h", "n", "tau", "tau0", "cfl_fraction"},
    "reference": {"tau_e", "h_e", "oversample_q", "paper_scale"},
    "output": {"csv", "svg", "cache_dir", "zero_timing"},
}


def parse_number(text):
    """Float from ``"1e-3"``, ``"0.25"`` or a power such as ``"2^-5"``."""
    s = text.strip()
    try:
        if "^" in s:
            base, exp = s.split("^", 1)
            return float(base) ** float(exp)
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _numbers(text):
    return tuple(parse_number(t) for t in text.replace(";", ",").split(",") if t.strip())


def _words(text):
    return tuple(t.strip().lower() for t in text.split(",") if t.strip())


def _bool(text):
    s = text.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def steps_for(T, tau_max):
    """Largest ``tau <= tau_max`` that divides ``T`` into an integer number of steps."""
    n = max(1, math.ceil(T / tau_max - 1e-9))
    return T / n


@dataclass(frozen=True)
class ExperimentConfig:
    schemes: Tuple[str, ...] = ("ltfs",)
    potential: str = "box4"
    initial: str = "gaussian"
    beta: float = -1.0
    sigmas: Tuple[float, ...] = (1.0,)
    norms: Tuple[str, ...] = ("L2",)
    T: float = 1.0
    a: float = INTERVAL[0]
    b: float = INTERVAL[1]
    mode: str = "diagonal"
    hs: Tuple[float, ...] = (2.0 ** -3, 2.0 ** -4, 2.0 ** -5)
    taus: Tuple[float, ...] = ()
    tau0: Optional[float] = None
    cfl_fraction: Optional[float] = 0.9
    tau_e: float = DESK_REFERENCE[0]
    h_e: float = DESK_REFERENCE[1]
    oversample_q: Optional[int] = None
    reference_q: Optional[int] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    cache_dir: Optional[str] = None
    zero_timing: bool = False
    seed: int = 0
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        self.validate()

    # construction ------------------------------------------------------------
    @classmethod
    def from_file(cls, path, **overrides):
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            text = p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_string(text, source=str(p), **overrides)

    @classmethod
    def from_string(cls, text, source=None, **overrides):
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        kw = {}
        for section in cp.sections():
            if section not in _KEYS:
                raise ConfigError(f"unknown section [{section}]")
            for key, value in cp.items(section):
                if key not in _KEYS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                kw.update(_convert(section, key, value))
        if "_N" in kw:
            if "hs" in kw:
                raise ConfigError("give either h or N in [sweep], not both")
            a, b = kw.get("a", INTERVAL[0]), kw.get("b", INTERVAL[1])
            kw["hs"] = tuple((b - a) / n for n in kw.pop("_N"))
        kw.update(overrides)
        kw["source"] = source
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def with_paper_scale(self):
        return replace(self, tau_e=FULL_REFERENCE[0], h_e=FULL_REFERENCE[1])

    # derived quantities ------------------------------------------------------
    @property
    def N_e(self):
        return _grid_size(self.a, self.b, self.h_e)

    def sweep_pairs(self):
        """``(h, tau)`` pairs in sweep order; taus already divide T."""
        if self.mode == "diagonal":
            return [(h, self._diagonal_tau(h)) for h in self.hs]
        return [(h, steps_for(self.T, t)) for h in self.hs for t in self.taus]

    def _diagonal_tau(self, h):
        if self.tau0 is not None:
            raw = self.tau0 * (h / max(self.hs)) ** 2
        else:
            raw = self.cfl_fraction * h * h / math.pi
        return steps_for(self.T, raw)

    # validation --------------------------------------------------------------
    def validate(self):
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise ConfigError(f"schemes must be drawn from {SCHEMES}, got {self.schemes}")
        if self.potential not in POTENTIALS:
            raise ConfigError(f"unknown potential {self.potential!r}")
        if self.initial not in INITIAL_DATA:
            raise ConfigError(f"unknown initial data {self.initial!r}")
        if not self.sigmas or any(s <= 0 for s in self.sigmas):
            raise ConfigError("sigmas must be positive")
        if not self.norms or any(n not in ("L2", "H1") for n in self.norms):
            raise ConfigError(f"norms must be L2, H1 or both, got {self.norms}")
        if not self.T > 0:
            raise ConfigError("T must be positive")
        if not self.b > self.a:
            raise ConfigError("need b > a")
        if self.mode not in ("diagonal", "grid"):
            raise ConfigError(f"sweep mode must be 'diagonal' or 'grid', got {self.mode!r}")
        if not self.hs:
            raise ConfigError("sweep needs at least one mesh size")
        for h in self.hs:
            _grid_size(self.a, self.b, h)
        _grid_size(self.a, self.b, self.h_e)
        if self.mode == "grid" and not self.taus:
            raise ConfigError("grid sweeps need a tau list")
        if self.mode == "diagonal":
            if self.tau0 is None and not (self.cfl_fraction and self.cfl_fraction > 0):
                raise ConfigError("diagonal sweeps need tau0 or a positive cfl_fraction")
            for h, tau in self.sweep_pairs():
                if not tau < h * h / math.pi:
                    raise ConfigError(
                        f"diagonal pair h={h!r}, tau={tau!r} violates tau < h^2/pi = {h * h / math.pi!r}")
        if any(t <= 0 for t in self.taus) or not self.tau_e > 0:
            raise ConfigError("time steps must be positive")
        if self.h_e > min(self.hs) / 2 * (1 + 1e-12):
            raise ConfigError(f"reference mesh h_e={self.h_e!r} must be <= min(h)/2")
        min_tau = min(t for _, t in self.sweep_pairs())
        if self.tau_e > min_tau / 10 * (1 + 1e-9):
            raise ConfigError(f"reference step tau_e={self.tau_e!r} must be <= min(tau)/10")
        for q in (self.oversample_q, self.reference_q):
            if q is not None and (int(q) != q or q < 1):
                raise ConfigError(f"oversample_q must be a positive integer, got {q}")
        if abs(self.T / self.tau_e - round(self.T / self.tau_e)) > 1e-9 * self.T / self.tau_e:
            raise ConfigError("tau_e must divide T")


def _grid_size(a, b, h):
    n = (b - a) / h
    N = int(round(n))
    if abs(n - N) > 1e-9 * n or N < 4 or N % 2:
        raise ConfigError(f"mesh size h={h!r} does not give an even node count on ({a}, {b})")
    return N


def _convert(section, key, value):
    if section == "study":
        if key == "schemes":
            return {"schemes": _words(value)}
        if key in ("potential", "initial"):
            return {key: value.strip().lower()}
        if key == "sigmas":
            return {"sigmas": _numbers(value)}
        if key == "norms":
            words = _words(value)
            if words == ("both",):
                return {"norms": ("L2", "H1")}
            return {"norms": tuple(w.upper() for w in words)}
        if key == "t":
            return {"T": parse_number(value)}
        if key in ("oversample_q", "seed"):
            return {key: int(parse_number(value))}
        return {key: parse_number(value)}
    if section == "sweep":
        if key == "mode":
            return {"mode": value.strip().lower()}
        if key == "h":
            return {"hs": _numbers(value)}
        if key == "n":
            return {"_N": _numbers(value)}
        if key == "tau":
            return {"taus": _numbers(value)}
        if key == "tau0":
            return {"tau0": parse_number(value), "cfl_fraction": None}
        return {"cfl_fraction": parse_number(value)}
    if section == "reference":
        if key == "paper_scale":
            return {"tau_e": FULL_REFERENCE[0], "h_e": FULL_REFERENCE[1]} if _bool(value) else {}
        if key == "oversample_q":
            return {"reference_q": int(parse_number(value))}
        return {key: parse_number(value)}
    if key == "zero_timing":
        return {"zero_timing": _bool(value)}
    return {key: value.strip()}
