"""Command-line front end.

    sensor-game enumerate|sweep|repeated --config run.json [--seed N] [--out DIR]

The config is one JSON object. It holds an optional ``params`` block (merged
over the defaults), optional ``seed`` and ``output_path``, and at most one
command block, named after the subcommand. Unknown keys are errors.
``SAG_EPS`` in the environment overrides the indifference tolerance.

Exit codes: 0 success, 2 configuration error, 3 internal verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Iterable

from .equilibria import (
    MixedEquilibriumError,
    brute_force_pure_pbne,
    enumerate_pure_pbne,
    solve_mixed,
    verify_pbne,
)
from .game import EPS_INDIFF, GameParameters, validate
from .repeated import RepeatedGameConfig, run_repeated
from .sweep import Scenario, SweepConfig, default_theta_grid, expected_sweep, run_sweep

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3
COMMANDS = ("enumerate", "sweep", "repeated")

_TOP_KEYS = {"params", "seed", "output_path", *COMMANDS}
_BLOCK_KEYS = {
    "enumerate": {"eps", "off_path_grid", "include_mixed"},
    "sweep": {"scenario", "theta_grid", "theta_step", "iterations", "off_path_belief"},
    "repeated": {
        "delta", "horizon", "reset_interval", "deviation_stage_offset",
        "use_discounting", "ma_suspicious_prob",
    },
}

PBNE_HEADER = ["category", "m", "n", "y", "x", "q", "p", "conditions", "off_path_support", "verified"]
SWEEP_HEADER = ["theta", "avg_payoff_ma", "avg_payoff_ha", "avg_eu_dm", "n_ma_samples", "n_ha_samples"]
TRACE_HEADER = [
    "stage", "type", "signal", "action", "regime",
    "u_ma", "u_ha", "u_dm", "cum_ma", "cum_ha", "cum_dm",
]


class ConfigError(ValueError):
    pass


def fmt(value: Any) -> str:
    """CSV cell text; floats use the shortest exactly round-tripping form."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _check_keys(block: dict, allowed: set[str], where: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def load_config(path: str | os.PathLike, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys(raw, _TOP_KEYS, "config")
    others = [c for c in COMMANDS if c != command and c in raw]
    if others:
        raise ConfigError(f"config for '{command}' must not contain block(s): {', '.join(others)}")
    block = raw.get(command, {})
    _check_keys(block, _BLOCK_KEYS[command], f"'{command}' block")
    return raw


def build_params(raw: dict) -> GameParameters:
    block = raw.get("params", {})
    _check_keys(block, set(GameParameters.field_names()), "'params' block")
    try:
        params = GameParameters(**{k: float(v) for k, v in block.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameter value: {exc}") from exc
    violations = validate(params)
    if violations:
        raise ConfigError("invalid parameters: " + "; ".join(violations))
    return params


def _eps(block: dict) -> float:
    env = os.environ.get("SAG_EPS")
    if env is not None:
        try:
            return float(env)
        except ValueError as exc:
            raise ConfigError(f"SAG_EPS is not a number: {env!r}") from exc
    return float(block.get("eps", EPS_INDIFF))


def cmd_enumerate(raw: dict, out: Path) -> int:
    params = build_params(raw)
    block = raw.get("enumerate", {})
    eps = _eps(block)
    grid = block.get("off_path_grid")
    try:
        grid = tuple(float(b) for b in grid) if grid is not None else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad off_path_grid: {exc}") from exc

    profiles = enumerate_pure_pbne(params, eps=eps)
    if block.get("include_mixed", True):
        try:
            profiles.append(solve_mixed(params).as_profile())
        except MixedEquilibriumError as exc:
            log.info("no mixed PBNE: %s", exc)

    rows, failures = [], 0
    for prof in profiles:
        ok = bool(verify_pbne(params, prof.strategy, prof.beliefs, eps))
        failures += not ok
        st, bl = prof.strategy, prof.beliefs
        rows.append([
            prof.category.value, st.m, st.n, st.y, st.x, bl.q, bl.p,
            "; ".join(prof.conditions), prof.off_path_support, ok,
        ])
    write_csv(out / "pbne.csv", PBNE_HEADER, rows)

    emitted = {p.corner for p in profiles if p.corner is not None}
    missing = brute_force_pure_pbne(params, grid, eps) - emitted
    for prof, row in zip(profiles, rows):
        print(f"{prof.category.value:<10} {prof.label:<28} verified={fmt(row[-1])}")
    if failures or missing:
        if failures:
            print(f"error: {failures} emitted profile(s) failed verification", file=sys.stderr)
        if missing:
            print(f"error: brute force found unlisted pure PBNE {sorted(missing)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def _sweep_configs(raw: dict, seed: int) -> list[SweepConfig]:
    params = build_params(raw)
    block = raw.get("sweep", {})
    names = block.get("scenario", [s.value for s in Scenario])
    if isinstance(names, str):
        names = [names]
    try:
        scenarios = [Scenario(name) for name in names]
    except ValueError as exc:
        raise ConfigError(f"unknown scenario: {exc}") from exc
    if "theta_grid" in block and "theta_step" in block:
        raise ConfigError("give either theta_grid or theta_step, not both")
    try:
        grid = block.get("theta_grid") or default_theta_grid(float(block.get("theta_step", 0.1)))
        return [
            SweepConfig(
                scenario=sc,
                theta_grid=tuple(grid),
                iterations_per_point=int(block.get("iterations", 500)),
                seed=seed,
                params=params,
                off_path_belief=float(block.get("off_path_belief", 1.0)),
                eps=_eps(block),
            )
            for sc in scenarios
        ]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sweep(raw: dict, out: Path, seed: int) -> int:
    for cfg in _sweep_configs(raw, seed):
        bad = [v for t in cfg.theta_grid for v in validate(cfg.params.with_(theta=t))]
        if bad:
            raise ConfigError("invalid parameters: " + "; ".join(sorted(set(bad))))
        name = cfg.scenario.value
        write_csv(out / f"sweep_{name}.csv", SWEEP_HEADER, (
            [r.theta, r.avg_payoff_ma, r.avg_payoff_ha, r.avg_eu_dm, r.n_ma_samples, r.n_ha_samples]
            for r in run_sweep(cfg)
        ))
        write_csv(out / f"sweep_{name}_expected.csv", SWEEP_HEADER, (
            [r.theta, r.avg_payoff_ma, r.avg_payoff_ha, r.avg_eu_dm, r.n_ma_samples, r.n_ha_samples]
            for r in expected_sweep(cfg)
        ))
        print(f"wrote sweep_{name}.csv ({len(cfg.theta_grid)} rows)")
    return EXIT_OK


def cmd_repeated(raw: dict, out: Path, seed: int) -> int:
    params = build_params(raw)
    block = raw.get("repeated", {})
    try:
        cfg = RepeatedGameConfig(params=params, seed=seed, **block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    trace = run_repeated(cfg)
    write_csv(out / "repeated_trace.csv", TRACE_HEADER, (
        [r.stage, r.nature_type.short, r.signal.short, r.dm_action.short, r.regime.value,
         r.u_ma, r.u_ha, r.u_dm, *(float(c) for c in cum)]
        for r, cum in zip(trace.stages, trace.cumulative)
    ))
    summary = trace.summary()
    with open(out / "repeated_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for key, value in summary.items():
        print(f"{key:>14}: {fmt(value)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensor-game", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        raw = load_config(args.config, args.command)
        seed = args.seed if args.seed is not None else int(raw.get("seed", 0))
        out = Path(args.out or raw.get("output_path", "."))
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "enumerate":
            return cmd_enumerate(raw, out)
        if args.command == "sweep":
            return cmd_sweep(raw, out, seed)
        return cmd_repeated(raw, out, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
