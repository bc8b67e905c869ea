"""Command line entry point: ``gibbsfactor analyze|hhat|gibbs|examples``.

Exit codes: 0 success, 1 golden mismatch, 2 configuration or validation
error, 3 enumeration budget exceeded, 4 open classification with --strict.
"""
from __future__ import annotations

import argparse
import math
import re
import shutil
import sys
import tempfile
from pathlib import Path

from . import __version__
from .config import FIXTURE_DIR, RunConfig, fixture_names, load_config
from .errors import ConfigError, DepthOverflow, GibbsFactorError
from .exact import format_real
from .factor import fiber_submixing, settingc_profile
from .hhat import build_hhat, classify_factor
from .measures import (check_gibbs_on_domain, gibbs_diagnostics_vs_potential,
                       gibbs_diagnostics_vs_sequence, gibbs_from_potential, measure_to_csv,
                       pushforward)
from .sequences import additivity_report, h_table, sandwich_check
from .sft import format_word, structure_report

EXIT_OK, EXIT_DIFF, EXIT_CONFIG, EXIT_BUDGET, EXIT_OPEN = 0, 1, 2, 3, 4
COMMANDS = ("analyze", "hhat", "gibbs")
GOLDEN_DIR = FIXTURE_DIR / "golden"
REL_TOL = 1e-9


class OpenCase(Exception):
    """Raised after outputs are written when --strict meets an open case."""


def _header(cfg: RunConfig, command: str) -> list[str]:
    return [f"command: {command}", f"name: {cfg.name}", f"mode: {cfg.mode}", f"depth: {cfg.depth}"]


def _write(out: Path, name: str, text: str) -> None:
    (out / name).write_text(text, encoding="utf-8")


def _schedule_line(rep, factor: int) -> str:
    ok = rep.satisfies(lambda j: math.log(factor * (j + 1)), tol=REL_TOL)
    return f"schedule D(n,m) <= log({factor}(min(n,m)+1)), n+m <= {rep.depth}: " + \
        ("holds" if ok else "violated")


def cmd_analyze(cfg: RunConfig, out: Path) -> list:
    """Structure, factor profile, fiber-mixing, additivity of h and the case table."""
    fs, f = cfg.build()
    lines = _header(cfg, "analyze")
    lines.append(f"domain: {structure_report(fs.domain, cfg.power_bound).describe()}")
    lines.append(f"codomain: {structure_report(fs.codomain, cfg.power_bound).describe()}")
    prof = settingc_profile(fs)
    lines.append(f"3-to-2 profile: {prof.describe()}")
    mix = fiber_submixing(fs, cfg.k_bound)
    lines.append(mix.describe())
    for k, (w, u, v) in sorted(mix.counterexamples.items()):
        lines.append(f"  k={k} counterexample: w={format_word(w)} u={format_word(u)} "
                     f"v={format_word(v)}")
    h = h_table(fs, f, cfg.depth)
    _write(out, "sequence.csv", h.to_csv())
    add = additivity_report(h)
    lines.append(f"additivity of h: {add.describe()}")
    lines.append(_schedule_line(add, cfg.schedule_factor))
    _write(out, "defects.csv", add.to_csv())
    opened = []
    if prof.valid:
        cls = classify_factor(fs, f, add)
        lines += cls.describe().splitlines()
        if cls.is_open:
            opened.append(cls.case)
    else:
        lines.append("case: not applicable (factor outside the supported 3-to-2 shape)")
    _write(out, "report.txt", "\n".join(lines) + "\n")
    return opened


def cmd_hhat(cfg: RunConfig, out: Path) -> list:
    """Piecewise potential listing plus a sandwich check against h."""
    fs, f = cfg.build()
    h = h_table(fs, f, cfg.depth)
    add = additivity_report(h)
    pp = build_hhat(fs, f, cfg.tail_depth, add)
    _write(out, "hhat.txt", pp.to_text())
    k_max = min(cfg.sandwich_depth, cfg.depth)
    sw = sandwich_check(h, pp, add.bound, depths=range(1, k_max + 1))
    lines = _header(cfg, "hhat")
    lines += pp.classification.describe().splitlines()
    lines.append(f"{sw.describe()} (k <= {k_max}, {sw.checked} words)")
    _write(out, "report.txt", "\n".join(lines) + "\n")
    return [pp.classification.case] if pp.classification.is_open else []


def cmd_gibbs(cfg: RunConfig, out: Path) -> list:
    """Pushforward of the Markov Gibbs measure of f and its defect curves."""
    fs, f = cfg.build()
    N = cfg.gibbs_depth
    mu, P = gibbs_from_potential(fs.domain, f)
    nu = pushforward(fs, mu, N)
    _write(out, "measure.csv", measure_to_csv(nu))
    lines = _header(cfg, "gibbs")
    lines.append(f"gibbs depth: {N}")
    lines.append(f"measure: {mu.describe()}")
    lines.append(f"pressure: {format_real(P)}")
    lines.append(f"domain check: {check_gibbs_on_domain(mu, f, P, N).describe()}")
    h = h_table(fs, f, N)
    lines.append(f"pushforward vs h: {gibbs_diagnostics_vs_sequence(nu, h, P).describe()}")
    opened = []
    if settingc_profile(fs).valid:
        pp = build_hhat(fs, f, cfg.tail_depth)
        diag = gibbs_diagnostics_vs_potential(nu, pp, P)
        lines.append(f"pushforward vs {pp.variant}: {diag.describe()}")
        if pp.classification.is_open:
            opened.append(pp.classification.case)
    else:
        diag = gibbs_diagnostics_vs_sequence(nu, h, P)
    _write(out, "defects.csv", diag.to_csv())
    _write(out, "report.txt", "\n".join(lines) + "\n")
    return opened


RUNNERS = {"analyze": cmd_analyze, "hhat": cmd_hhat, "gibbs": cmd_gibbs}


# --------------------------------------------------------------------------
# golden comparison

_NUM = re.compile(r"^[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?$|^[-+]?(inf|nan)$")


def _tokens(line: str) -> list[str]:
    return [t for t in re.split(r"[\s,;()=\[\]]+", line) if t]


def _same_token(a: str, b: str) -> bool:
    if a == b:
        return True
    if _NUM.match(a) and _NUM.match(b):
        x, y = float(a), float(b)
        return math.isclose(x, y, rel_tol=REL_TOL, abs_tol=1e-12)
    return False


def texts_match(a: str, b: str) -> bool:
    """Line-by-line comparison; numeric tokens agree to a relative 1e-9."""
    la, lb = a.splitlines(), b.splitlines()
    if len(la) != len(lb):
        return False
    for x, y in zip(la, lb):
        tx, ty = _tokens(x), _tokens(y)
        if len(tx) != len(ty) or not all(_same_token(p, q) for p, q in zip(tx, ty)):
            return False
    return True


def run_fixture(name: str, command: str, out: Path) -> list:
    out.mkdir(parents=True, exist_ok=True)
    return RUNNERS[command](load_config(name), out)


def cmd_examples(golden_dir: Path, regenerate: bool = False, stream=None) -> int:
    """Run every bundled fixture through every command and diff against golden outputs."""
    stream = sys.stdout if stream is None else stream
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name in fixture_names():
            for command in COMMANDS:
                out = Path(tmp) / name / command
                run_fixture(name, command, out)
                gold = golden_dir / name / command
                if regenerate:
                    if gold.exists():
                        shutil.rmtree(gold)
                    shutil.copytree(out, gold)
                    print(f"wrote {name}/{command}", file=stream)
                    continue
                produced = sorted(p.name for p in out.iterdir())
                expected = sorted(p.name for p in gold.iterdir()) if gold.exists() else []
                for fname in sorted(set(produced) | set(expected)):
                    a, b = out / fname, gold / fname
                    ok = a.exists() and b.exists() and texts_match(
                        a.read_text(encoding="utf-8"), b.read_text(encoding="utf-8"))
                    failures += not ok
                    print(f"{'ok  ' if ok else 'DIFF'} {name}/{command}/{fname}", file=stream)
    return EXIT_DIFF if failures else EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gibbsfactor",
                                     description="Relative pressure sequences, piecewise "
                                                 "potentials and Gibbs checks for factor maps.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=RUNNERS[name].__doc__.splitlines()[0])
        p.add_argument("--config", required=True, help="config file or bundled fixture name")
        p.add_argument("--depth", type=int, help="override the configured depth")
        p.add_argument("--mode", choices=("exact", "f64"), help="override the configured mode")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--strict", action="store_true", help="exit 4 on an open case")
    ex = sub.add_parser("examples", help="run bundled fixtures against golden outputs")
    ex.add_argument("--list", action="store_true", help="list bundled fixtures")
    ex.add_argument("--golden-dir", default=str(GOLDEN_DIR))
    ex.add_argument("--regenerate", action="store_true", help="rewrite the golden outputs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "examples":
            if args.list:
                for name in fixture_names():
                    print(name)
                return EXIT_OK
            return cmd_examples(Path(args.golden_dir), args.regenerate)
        cfg = load_config(args.config)
        if args.depth is not None:
            if args.depth < 1:
                raise ConfigError("--depth must be positive")
            cfg.depth = args.depth
        if args.mode is not None:
            if args.mode == "exact" and cfg.potentials:
                raise ConfigError("potential entries need --mode f64", cfg.lines.get("potential"))
            cfg.mode = args.mode
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        opened = RUNNERS[args.command](cfg, out)
    except DepthOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except GibbsFactorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if opened and args.strict:
        print(f"open case: {', '.join(opened)}", file=sys.stderr)
        return EXIT_OPEN
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
