"""Command line runner: read an INI config, run scenarios, write one report."""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .profile import RULES, make_profile, profile_from_rule
from .quadrature import QuadratureSpec
from .report import CheckRecord, Report
from .scenarios import DEFAULT_SCENARIOS, RUNNERS, SCENARIOS, RunSettings

log = logging.getLogger("kreinreg")

_PROFILE_KEYS = {"c_sq_rule", "delta", "beta", "n", "alpha", "rho_param"}
_RUN_KEYS = {"scenarios", "truncations", "seed", "family_size", "metric_instances", "coordinate_vectors"}
_QUAD_KEYS = {"rel_tol", "abs_tol", "max_panels", "order"}
_OUTPUT_KEYS = {"dir", "format"}
_SECTIONS = {"profile": _PROFILE_KEYS, "run": _RUN_KEYS, "quadrature": _QUAD_KEYS, "output": _OUTPUT_KEYS}


@dataclass(frozen=True)
class ScenarioConfig:
    settings: RunSettings = field(default_factory=RunSettings)
    scenarios: tuple[str, ...] = DEFAULT_SCENARIOS
    out_dir: Path | None = None
    fmt: str = "json"

    def __post_init__(self):
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        unknown = [s for s in self.scenarios if s not in SCENARIOS]
        if unknown:
            raise ConfigError(f"unknown scenarios {unknown}; choose from {list(SCENARIOS)}")
        if not self.settings.truncations:
            raise ConfigError("truncations must be nonempty")
        if any(n < 0 for n in self.settings.truncations):
            raise ConfigError("truncations must be nonnegative")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.fmt!r}")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _names(text: str) -> tuple[str, ...]:
    return tuple(t for t in text.replace(",", " ").split())


def _float(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def load_config(path: str | os.PathLike | None) -> ScenarioConfig:
    """Parse an INI file; missing keys fall back to the module defaults."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        if not cp.read(path):
            raise ConfigError(f"cannot read config file {path}")
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        extra = set(cp[section]) - _SECTIONS[section]
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(extra)}")
    try:
        return _build_config(cp)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _build_config(cp: configparser.ConfigParser) -> ScenarioConfig:
    prof = cp["profile"] if cp.has_section("profile") else {}
    rule = prof.get("c_sq_rule", "infra").strip()
    delta = _float(prof.get("delta", "2.0"))
    beta = _float(prof.get("beta", "1.5"))
    N = int(prof.get("n", "6"))
    alpha = _float(prof.get("alpha", "inf"))
    rho_text = prof.get("rho_param", "").strip()
    rho = float(rho_text) if rho_text else None
    if rule in RULES:
        profile = profile_from_rule(rule, delta, beta, N, alpha, rho)
    else:
        profile = make_profile([float(c) for c in rule.replace(",", " ").split()], delta, beta, N, alpha, rho)

    quad = QuadratureSpec()
    if cp.has_section("quadrature"):
        q = cp["quadrature"]
        quad = QuadratureSpec(
            rel_tol=float(q.get("rel_tol", quad.rel_tol)), abs_tol=float(q.get("abs_tol", quad.abs_tol)),
            max_panels=int(q.get("max_panels", quad.max_panels)), order=int(q.get("order", quad.order)),
        )

    settings = RunSettings(profile=profile, quadrature=quad)
    scenarios = DEFAULT_SCENARIOS
    if cp.has_section("run"):
        r = cp["run"]
        if "scenarios" in r:
            scenarios = _names(r["scenarios"])
        if "truncations" in r:
            settings = replace(settings, truncations=_ints(r["truncations"]))
        for key in ("seed", "family_size", "metric_instances", "coordinate_vectors"):
            if key in r:
                settings = replace(settings, **{key: int(r[key])})

    out = cp["output"] if cp.has_section("output") else {}
    out_dir = Path(out["dir"]) if out.get("dir", "").strip() else None
    return ScenarioConfig(settings, scenarios, out_dir, out.get("format", "json").strip())


def _environment(cfg: ScenarioConfig, order: list[str]) -> dict:
    s = cfg.settings
    return {
        "profile": s.profile.to_config(),
        "truncations": list(s.truncations),
        "quadrature": {"rel_tol": s.quadrature.rel_tol, "abs_tol": s.quadrature.abs_tol,
                       "max_panels": s.quadrature.max_panels, "order": s.quadrature.order},
        "seed": s.seed,
        "family_size": s.family_size,
        "scenarios": order,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def run_scenario(cfg: ScenarioConfig) -> Report:
    """Run the requested scenarios in dependency order and collect one report."""
    order = [name for name in SCENARIOS if name in set(cfg.scenarios)]
    report = Report("+".join(order), environment=_environment(cfg, order))
    start = time.perf_counter()
    for name in order:
        t0 = time.perf_counter()
        log.info("running scenario %s", name)
        try:
            part = RUNNERS[name](cfg.settings)
            report.extend(part, prefix=f"{name}.")
        except Exception as exc:  # a module error is a failed check, not a crash
            log.exception("scenario %s raised", name)
            report.add(CheckRecord(f"{name}.error", 1.0, 0.0, False, None, f"{type(exc).__name__}: {exc}"))
        report.timing[name] = round(time.perf_counter() - t0, 3)
        log.info("scenario %s done in %.2fs", name, report.timing[name])
    report.timing["total"] = round(time.perf_counter() - start, 3)
    return report


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "measured", "bound", "pass", "index", "note"])
    for r in report.records:
        d = r.to_dict()
        w.writerow([d["name"], d["measured"], d["bound"], d["passed"], "" if r.index is None else r.index, d["note"]])
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", out_dir: Path | None = None) -> Path | None:
    text = render(report, fmt)
    if out_dir is None:
        sys.stdout.write(text)
        return None
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"report.{fmt}"
    path.write_text(text, encoding="utf-8")
    return path


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kreinreg", description="Run verification scenarios and write a report.")
    ap.add_argument("--config", type=Path, default=None, help="INI file with [profile], [run], [quadrature], [output]")
    ap.add_argument("--scenario", action="append", choices=SCENARIOS, default=None,
                    help="scenario to run (repeatable); default: all but sweep")
    ap.add_argument("--out", type=Path, default=None, help="output directory (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--truncation", type=int, action="append", default=None, help="truncation order N (repeatable)")
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("KREINREG_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        settings = cfg.settings
        if args.seed is not None:
            settings = replace(settings, seed=args.seed)
        if args.truncation:
            settings = replace(settings, truncations=tuple(args.truncation))
        cfg = ScenarioConfig(
            settings,
            tuple(args.scenario) if args.scenario else cfg.scenarios,
            args.out if args.out is not None else cfg.out_dir,
            args.format or cfg.fmt,
        )
    except ConfigError as exc:
        print(f"kreinreg: {exc}", file=sys.stderr)
        return 2

    report = run_scenario(cfg)
    path = emit_report(report, cfg.fmt, cfg.out_dir)
    failed = report.failures()
    if path is not None:
        print(f"wrote {path}", file=sys.stderr)
    print(f"{len(report.records) - len(failed)}/{len(report.records)} checks passed "
          f"in {report.timing['total']:.1f}s", file=sys.stderr)
    for r in failed[:20]:
        print(f"FAIL {r.name} index={r.index} measured={r.measured!r} bound={r.bound!r} {r.note}", file=sys.stderr)
    return 0 if not failed else 1


if __name__ == "__main__":
    raise SystemExit(main())
