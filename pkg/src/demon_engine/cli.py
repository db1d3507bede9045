"""``demon-engine`` command-line tool.

Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import gates
from .config import ConfigError, RunConfig, SweepAxis, load_config
from .device import device_report
from .engine import (
    CycleConfig,
    DegenerateConfigurationError,
    demon_ignored_paradox,
    efficiency_closed_form,
    necessary_condition,
    positive_work_condition,
    qin_closed_form,
    run_cycle,
    work_closed_form,
)
from .qmat import trace_distance
from .states import QubitParams, basis_projector, bell_state
from .thermo import BathParams, gibbs_target, population_difference, thermalize

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2
SWEEP_COLUMNS = ("W", "Q_in", "Q_out", "eta", "xi", "w_positive", "necessary_condition")
THERMALIZE_COLUMNS = ("t", "sz_S", "sz_D", "trace_distance")


class UsageError(Exception):
    pass


# --- formatting -------------------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def rounded(obj):
    """Round every float to 12 significant digits for stable JSON."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(rounded(obj), indent=2, sort_keys=True) + "\n"


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def resolve_out(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("OUTPUT_DIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v if isinstance(v, str) else fmt(v)}\n" for k, v in rows)


def _settings(args, run: RunConfig, default_format: str) -> tuple[Path | None, str, bool]:
    out = resolve_out(args.out or run.output_path)
    fmt_ = args.format or run.output_format or default_format
    return out, fmt_, bool(getattr(args, "plot", False) or run.plot)


# --- cycle ------------------------------------------------------------------

def eta_text(ledger) -> str:
    if ledger.eta is not None:
        return fmt(ledger.eta)
    if abs(ledger.q_in) <= 1e-12 * max(1.0, abs(ledger.e_s)):
        return "undefined (Q_in = 0)"
    return "undefined (Q_in < 0)"


def cycle_record(cfg: CycleConfig) -> dict:
    ledger = run_cycle(cfg)
    try:
        eta_cf, xi = efficiency_closed_form(cfg)
    except DegenerateConfigurationError:
        eta_cf, xi = None, None
    pw = positive_work_condition(cfg)
    return {
        "config": {
            "system": {"gap": cfg.s.gap, "temperature": cfg.s.temperature},
            "demon": {"gap": cfg.d.gap, "temperature": cfg.d.temperature},
            "feedback": {"kind": cfg.feedback, "theta": cfg.theta, "phi": cfg.phi},
        },
        "ledger": ledger.to_dict(),
        "closed_form": {"W": work_closed_form(cfg), "Q_in": qin_closed_form(cfg), "eta": eta_cf, "xi": xi},
        "positive_work": pw.to_dict(),
        "paradox": demon_ignored_paradox(cfg).to_dict(),
        "_ledger": ledger,
    }


def cmd_cycle(args) -> int:
    run = load_config(args.config)
    out, fmt_, _ = _settings(args, run, "json")
    rec = cycle_record(run.cycle)
    ledger = rec.pop("_ledger")
    cf = rec["closed_form"]
    rows = [
        ("E_S", ledger.e_s), ("E_D", ledger.e_d),
        ("E_S_final", ledger.e_s_final), ("E_D_final", ledger.e_d_final),
        ("Q_in", ledger.q_in), ("Q_out", ledger.q_out), ("W", ledger.work),
        ("eta", eta_text(ledger)),
        ("xi", fmt(cf["xi"]) if cf["xi"] is not None else "undefined"),
        ("W_closed_form", cf["W"]),
        ("S(rho1)", ledger.entropies[0]), ("S(rho2)", ledger.entropies[1]), ("S(rho3)", ledger.entropies[2]),
        ("w_positive", rec["positive_work"]["w_positive"]),
        ("necessary_condition", rec["positive_work"]["necessary_condition_holds"]),
        ("reduced_view_work", rec["paradox"]["reduced_cycle_work"]),
    ]
    sys.stdout.write(table(rows))
    if out is not None:
        if fmt_ == "json":
            emit(to_json(rec), out)
        else:
            flat = [{"quantity": k, "value": v if isinstance(v, str) else fmt(v)} for k, v in rows]
            emit(to_csv(flat, ("quantity", "value")), out)
    return EXIT_OK


# --- sweep ------------------------------------------------------------------

def apply_point(cfg: CycleConfig, names, values) -> CycleConfig:
    s, d, theta, phi, feedback = cfg.s, cfg.d, cfg.theta, cfg.phi, cfg.feedback
    for name, v in zip(names, values):
        if name == "system.gap":
            s = QubitParams(v, s.temperature)
        elif name == "system.temperature":
            s = QubitParams(s.gap, v)
        elif name == "demon.gap":
            d = QubitParams(v, d.temperature)
        elif name == "demon.temperature":
            d = QubitParams(d.gap, v)
        elif name == "feedback.theta":
            theta, feedback = v, "cev"
        elif name == "feedback.phi":
            phi, feedback = v, "cev"
    return CycleConfig(s, d, theta=theta, phi=phi, feedback=feedback)


def sweep_rows(cycle: CycleConfig, axes: tuple[SweepAxis, ...], workers: int = 1) -> list[dict]:
    if not 1 <= len(axes) <= 2:
        raise UsageError(f"sweep needs 1 or 2 axes, got {len(axes)}")
    names = [a.name for a in axes]
    grid = list(itertools.product(*(a.values() for a in axes)))

    def evaluate(point):
        cfg = apply_point(cycle, names, point)
        ledger = run_cycle(cfg)
        try:
            xi = efficiency_closed_form(cfg)[1]
        except DegenerateConfigurationError:
            xi = None
        row = dict(zip(names, point))
        row.update(W=ledger.work, Q_in=ledger.q_in, Q_out=ledger.q_out, eta=ledger.eta, xi=xi,
                   w_positive=ledger.work > 0, necessary_condition=necessary_condition(cfg))
        return row

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map() yields in input order, so the row order never depends on scheduling.
            return list(pool.map(evaluate, grid))
    return [evaluate(p) for p in grid]


def cmd_sweep(args) -> int:
    run = load_config(args.config)
    out, fmt_, plot = _settings(args, run, "csv")
    rows = sweep_rows(run.cycle, run.axes, run.workers)
    names = [a.name for a in run.axes]
    if fmt_ == "json":
        emit(to_json(rows), out)
    else:
        emit(to_csv(rows, names + list(SWEEP_COLUMNS)), out)
    if plot:
        from .plotting import plot_sweep

        png = (out or resolve_out("sweep.csv")).with_suffix(".png")
        plot_sweep(rows, names, png)
        print(f"figure: {png}", file=sys.stderr)
    return EXIT_OK


# --- decompose --------------------------------------------------------------

TARGETS = {"cnot-s": lambda: gates.cnot("S"), "cnot-d": lambda: gates.cnot("D"), "swap": gates.swap}


def cmd_decompose(args) -> int:
    if not args.e_l > 0:
        raise UsageError(f"--e-l must be > 0, got {args.e_l}")
    out = resolve_out(args.out)
    try:
        report = gates.verify_decomposition(args.e_l, TARGETS[args.target]())
    except gates.DecompositionError as exc:
        print(f"decomposition failed for target {args.target}: best distance {exc.best_distance:.3e}",
              file=sys.stderr)
        return EXIT_VERIFY
    data = {"target": args.target, **report.to_dict()}
    sys.stdout.write(table([
        ("target", args.target),
        ("best_signs", " ".join(f"{s:+d}" for s in report.best_signs)),
        ("roles", report.roles),
        ("correction", report.correction or "none"),
        ("distance", f"{report.distance:.3e}"),
        ("native_windows", str(data["native_windows"])),
    ]))
    if args.format == "csv":
        steps = data["sequence"]["steps"]
        emit(to_csv(steps, ("index", "kind", "target", "angle", "duration")), out)
    else:
        emit(to_json(data), out)
    return EXIT_OK if report.distance < gates.DECOMPOSITION_TOL else EXIT_VERIFY


# --- device -----------------------------------------------------------------

def cmd_device(args) -> int:
    run = load_config(args.config)
    out, fmt_, _ = _settings(args, run, "json")
    dev = run.device
    if dev.s.n_g == 0.5:
        raise UsageError("device.n_g_s = 1/2 gives a zero working-substance gap")
    try:
        rep = device_report(dev)
    except ValueError as exc:
        raise UsageError(f"[device] {exc}") from None
    sched = rep.schedule
    rows = [
        ("Delta_S [J]", rep.gap_s), ("Delta_D [J]", rep.gap_d),
        ("E_L [J]", rep.coupling), ("coupling", "ON" if rep.coupling_on else "OFF"),
        ("t0 [s]", rep.native_time), ("eta_device", rep.eta_device),
        ("eta_cycle", fmt(rep.eta_cycle) if rep.eta_cycle is not None else "undefined"),
        ("W [J]", rep.work), ("P [W]", rep.power),
        ("exp(-beta_S Delta_S)", rep.otto.exp_s), ("exp(-beta_D Delta_D)", rep.otto.exp_d),
        ("otto_limit", "valid" if rep.otto.holds else "not reached"),
        ("gate_time [s]", sched.gate_time), ("thermalization [s]", sched.thermalization_time),
        ("schedule_entries", str(len(sched.entries))),
    ]
    rows += [("warning", w) for w in sched.warnings]
    if rep.otto.warning:
        rows.append(("warning", rep.otto.warning))
    sys.stdout.write(table(rows))
    if out is not None:
        emit(sched.to_csv() if fmt_ == "csv" else to_json(rep.to_dict()), out)
    return EXIT_OK


# --- thermalize -------------------------------------------------------------

def initial_rho(kind: str, target):
    if kind == "thermal":
        return target.copy()
    if kind == "ground":
        return basis_projector(0, 0)
    if kind == "excited":
        return basis_projector(1, 1)
    if kind == "bell":
        return bell_state()
    raise UsageError(f"unknown initial state {kind!r}")


def thermalize_rows(run: RunConfig) -> list[dict]:
    cfg = run.cycle
    sb = BathParams(cfg.s.temperature, run.gamma_s)
    db = BathParams(cfg.d.temperature, run.gamma_d)
    target = gibbs_target(cfg.s.gap, cfg.d.gap, sb, db)
    rho0 = initial_rho(run.initial, target)
    rows = []
    for i in range(run.t_count):
        t = run.t_max * i / (run.t_count - 1)
        rho = thermalize(rho0, sb, db, cfg.s.gap, cfg.d.gap, t)
        rows.append({
            "t": t,
            "sz_S": population_difference(rho, "S"),
            "sz_D": population_difference(rho, "D"),
            "trace_distance": trace_distance(rho, target),
        })
    return rows


def cmd_thermalize(args) -> int:
    run = load_config(args.config)
    out, fmt_, plot = _settings(args, run, "csv")
    rows = thermalize_rows(run)
    emit(to_json(rows) if fmt_ == "json" else to_csv(rows, THERMALIZE_COLUMNS), out)
    if plot:
        from .plotting import plot_thermalization

        png = (out or resolve_out("thermalize.csv")).with_suffix(".png")
        plot_thermalization(rows, png)
        print(f"figure: {png}", file=sys.stderr)
    return EXIT_OK


# --- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="demon-engine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, plot=False):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        if plot:
            p.add_argument("--plot", action="store_true", help="also render a PNG next to the output")

    common(sub.add_parser("cycle", help="run one cycle and print the energy ledger"))
    common(sub.add_parser("sweep", help="sweep one or two parameters, CSV output"), plot=True)
    p = sub.add_parser("decompose", help="certify the CNOT construction from the native gate")
    common(p)
    p.add_argument("--e-l", type=float, default=1.0, help="coupling strength (natural units)")
    p.add_argument("--target", choices=sorted(TARGETS), default="cnot-s")
    common(sub.add_parser("device", help="charge-qubit device estimates and pulse schedule"))
    common(sub.add_parser("thermalize", help="relaxation trace towards the Gibbs state"), plot=True)
    return parser


COMMANDS = {
    "cycle": cmd_cycle,
    "sweep": cmd_sweep,
    "decompose": cmd_decompose,
    "device": cmd_device,
    "thermalize": cmd_thermalize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
