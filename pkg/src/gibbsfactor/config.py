"""Flat ``key = value`` run configuration.

Grammar (one entry per line, ``#`` starts a comment)::

    name = example-3.2
    x_row = 0 1 1          # repeated: rows of the domain transition matrix
    y_row = 0 1            # repeated: rows of the codomain transition matrix
    map = 1 2 2            # image of domain symbols 1..k
    weight = 2 3 2         # exp(f[23]) = 2; rationals such as 3/2 allowed
    potential = 1 1 0.5    # f[11] = 0.5 (binary64 only)
    mode = exact           # exact | f64
    depth = 14             # word length for tables and defects
    gibbs_depth = 14       # word length for measure diagnostics
    tail_depth = 64        # stored tail values of the piecewise potential
    sandwich_depth = 14    # longest word in the sandwich check of hhat
    schedule_factor = 3    # reference schedule log(q (min(n,m) + 1)) for defects
    k_bound = 8
    power_bound = 20
    validation_depth = 8

Unlisted 2-blocks get weight 1 (f = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError, GibbsFactorError
from .factor import DEFAULT_K_BOUND, DEFAULT_VALIDATION_DEPTH, FactorSystem, build_factor
from .sequences import TwoBlockPotential
from .sft import DEFAULT_POWER_BOUND, build_system

INT_KEYS = {"depth": 14, "gibbs_depth": 14, "tail_depth": 64, "sandwich_depth": 14,
            "schedule_factor": 3, "k_bound": DEFAULT_K_BOUND, "power_bound": DEFAULT_POWER_BOUND,
            "validation_depth": DEFAULT_VALIDATION_DEPTH}
ROW_KEYS = ("x_row", "y_row")
ENTRY_KEYS = ("weight", "potential")
KNOWN = set(INT_KEYS) | set(ROW_KEYS) | set(ENTRY_KEYS) | {"name", "map", "mode"}


@dataclass
class RunConfig:
    name: str = "unnamed"
    x_rows: list = field(default_factory=list)
    y_rows: list = field(default_factory=list)
    symbol_map: list = field(default_factory=list)
    weights: dict = field(default_factory=dict)  # (i, j) -> Fraction | float
    potentials: dict = field(default_factory=dict)  # (i, j) -> float
    mode: str = "exact"
    depth: int = INT_KEYS["depth"]
    gibbs_depth: int = INT_KEYS["gibbs_depth"]
    tail_depth: int = INT_KEYS["tail_depth"]
    sandwich_depth: int = INT_KEYS["sandwich_depth"]
    schedule_factor: int = INT_KEYS["schedule_factor"]
    k_bound: int = INT_KEYS["k_bound"]
    power_bound: int = INT_KEYS["power_bound"]
    validation_depth: int = INT_KEYS["validation_depth"]
    lines: dict = field(default_factory=dict)  # key -> first line number

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def build(self) -> tuple[FactorSystem, TwoBlockPotential]:
        """Validated factor system and potential; errors carry the offending line."""
        try:
            X = build_system(len(self.x_rows), self.x_rows)
        except GibbsFactorError as exc:
            raise ConfigError(f"domain rows: {exc}", self.lines.get("x_row")) from exc
        try:
            Y = build_system(len(self.y_rows), self.y_rows)
        except GibbsFactorError as exc:
            raise ConfigError(f"codomain rows: {exc}", self.lines.get("y_row")) from exc
        try:
            fs = build_factor(X, Y, self.symbol_map, self.validation_depth)
        except GibbsFactorError as exc:
            raise ConfigError(f"symbol map: {exc}", self.lines.get("map")) from exc
        try:
            if self.potentials:
                vals = {b: math.log(w) for b, w in self.weights.items()}
                vals.update(self.potentials)
                f = TwoBlockPotential.from_values(X, vals)
            else:
                f = TwoBlockPotential.from_weights(X, self.weights, exact=self.exact)
        except GibbsFactorError as exc:
            key = "potential" if self.potentials else "weight"
            raise ConfigError(f"potential: {exc}", self.lines.get(key)) from exc
        return fs, f


def _ints(text: str, line: int, key: str) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise ConfigError(f"{key} expects integers, got {text!r}", line) from None


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno)
        cfg.lines.setdefault(key, lineno)
        if key == "name":
            cfg.name = value
        elif key == "mode":
            if value not in ("exact", "f64"):
                raise ConfigError("mode must be exact or f64", lineno)
            cfg.mode = value
        elif key in ROW_KEYS:
            row = _ints(value, lineno, key)
            (cfg.x_rows if key == "x_row" else cfg.y_rows).append(row)
        elif key == "map":
            cfg.symbol_map = _ints(value, lineno, key)
        elif key in INT_KEYS:
            vals = _ints(value, lineno, key)
            if len(vals) != 1 or vals[0] < 1:
                raise ConfigError(f"{key} expects one positive integer", lineno)
            setattr(cfg, key, vals[0])
        else:
            parts = value.split()
            if len(parts) != 3:
                raise ConfigError(f"{key} expects 'i j value'", lineno)
            i, j = _ints(" ".join(parts[:2]), lineno, key)
            try:
                q = Fraction(parts[2]) if key == "weight" else float(parts[2])
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad number {parts[2]!r}", lineno) from None
            if key == "weight":
                if q <= 0:
                    raise ConfigError("weights must be positive", lineno)
                cfg.weights[(i, j)] = q
            else:
                cfg.potentials[(i, j)] = q
    for key in ("x_row", "y_row", "map"):
        if key not in cfg.lines:
            raise ConfigError(f"missing required key {key!r}")
    if cfg.potentials and cfg.exact:
        raise ConfigError("potential entries are real numbers; use mode = f64 or weight entries",
                          cfg.lines["potential"])
    return cfg


FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.cfg"))


def load_config(source: str) -> RunConfig:
    """Read a config file, or a bundled fixture by name."""
    path = Path(source)
    if not path.exists():
        candidate = FIXTURE_DIR / f"{source}.cfg"
        if not candidate.exists():
            raise ConfigError(f"no config file or bundled fixture named {source!r}")
        path = candidate
    return parse_config(path.read_text(encoding="utf-8"))
