"""Command-line interface.

Five subcommands:

    analyze   equilibrium, coefficients, linear analysis, expansion, class
    simulate  integrate one trajectory and measure the attractor
    sweep     bifurcation diagram rows over a list of delays
    predict   expansion-based cycle prediction at one delay
    verify    closed-form coefficients against the finite-difference oracle

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures. On a nonzero exit a single-line JSON object
{"error": {"type": ..., "message": ...}} is written to stderr.

All JSON output is serialized with sorted keys and fixed indentation, and
no report contains timestamps, so reruns are byte-identical. Every file
written by a command gets a `<name>.meta.json` sidecar recording the
command line, the resolved configuration, and the package version.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import compare_prediction, estimate_cycle, sweep, write_sweep_csv
from .bifurcation import LinearAnalysis, is_locally_stable, linear_analysis
from .config import RunConfig, _parse_value, load_config
from .dde import ConstantHistory, default_step, simulate, write_trajectory_csv
from .errors import (
    DegenerateBifurcation,
    HopfDualError,
    NumericalError,
    ValidationError,
)
from .hopf import CyclePrediction, HopfExpansion, classify, hopf_expansion, predicted_cycle
from .model import (
    Equilibrium,
    ModelConfig,
    TaylorCoefficients,
    find_equilibrium,
    numeric_taylor_oracle,
    taylor_coefficients,
)

# Oracle-vs-closed-form comparison thresholds used by `verify`.
_MATCH_RTOL = 1e-5
_CONVENTION_RATIOS = {"b4": 2.0, "b8": 3.0}
_CONVENTION_ATOL = 1e-3
_ZERO_RTOL = 1e-8


def _clean(obj):
    """JSON-safe copy: enums to values, NaN/inf to None, arrays to lists."""
    if isinstance(obj, dict):
        return {key: _clean(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(value) for value in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_sidecar(path: str, command: str, argv: list[str], cfg: RunConfig) -> None:
    meta = {
        "command": command,
        "argv": list(argv),
        "config": cfg.to_sections(),
        "version": __version__,
    }
    _write_text(str(path) + ".meta.json", _dump_json(meta))


def _g(x) -> str:
    if x is None:
        return "-"
    return "%.10g" % x


class _Chain:
    """Shared analysis pipeline: model, equilibrium, coefficients, linear,
    expansion, evaluated once per command."""

    def __init__(self, cfg: RunConfig, tau: float | None = None):
        self.model: ModelConfig = cfg.build_model(tau=tau)
        self.eq: Equilibrium = find_equilibrium(self.model)
        self.coeffs: TaylorCoefficients = taylor_coefficients(self.model, self.eq)
        self.linear: LinearAnalysis = linear_analysis(self.coeffs, n_critical=cfg.n_critical)
        self.expansion: HopfExpansion = hopf_expansion(self.coeffs, self.linear)


def _linear_payload(lin: LinearAnalysis) -> dict:
    return {
        "b2": lin.b2,
        "omega0": lin.omega0,
        "tau0": lin.tau0,
        "tau_c": list(lin.tau_c),
        "transversality": lin.transversality,
    }


def _expansion_payload(exp: HopfExpansion) -> dict:
    u1, q1 = exp.u1_harmonics, exp.q1_harmonics
    return {
        "omega1": exp.omega1,
        "tau1": exp.tau1,
        "eta1": exp.eta1,
        "omega2": exp.omega2,
        "tau2": exp.tau2,
        "eta2": exp.eta2,
        "u1_harmonics": {"C1": u1.c1, "D1": u1.d1, "E1": u1.e1},
        "q1_harmonics": {"A": q1.a, "B": q1.b, "C": q1.c, "D": q1.d, "E": q1.e},
        "degenerate": list(exp.degenerate),
    }


def _prediction_payload(pred: CyclePrediction, tau0: float) -> dict:
    u1 = pred.u1_harmonics
    return {
        "tau": pred.tau,
        "tau0": tau0,
        "epsilon": pred.epsilon,
        "amplitude": pred.amplitude,
        "omega": pred.omega,
        "period": pred.period,
        "mean_offset": pred.mean_offset,
        "floquet_exponent": pred.floquet_exponent,
        "p_star": pred.p_star,
        "u1_harmonics": {"C1": u1.c1, "D1": u1.d1, "E1": u1.e1},
        "warning": pred.warning,
    }


def _emit(report: dict, text_lines: list[str], cfg: RunConfig,
          command: str, argv: list[str]) -> None:
    """Print the report (text or JSON) and write --out plus sidecar."""
    if cfg.json_output:
        sys.stdout.write(_dump_json(report))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")
    if cfg.out:
        _write_text(cfg.out, _dump_json(report))
        _write_sidecar(cfg.out, command, argv, cfg)


def cmd_analyze(cfg: RunConfig, argv: list[str]) -> int:
    chain = _Chain(cfg)
    lin, exp = chain.linear, chain.expansion
    report: dict = {
        "config": cfg.to_sections(),
        "equilibrium": {"p_star": chain.eq.p_star, "residual": chain.eq.residual},
        "coefficients": {**chain.coeffs.as_dict(), "p_star": chain.coeffs.p_star},
        "linear": _linear_payload(lin),
        "expansion": _expansion_payload(exp),
    }
    lines = [
        f"equilibrium: p_star = {_g(chain.eq.p_star)} (residual = {_g(chain.eq.residual)})",
        "coefficients: " + " ".join(
            f"{name} = {_g(value)}"
            for name, value in chain.coeffs.as_dict().items() if name != "p_star"
        ),
        f"linear: omega0 = {_g(lin.omega0)}, tau0 = {_g(lin.tau0)}, "
        f"transversality = {_g(lin.transversality)}",
        "critical delays: " + ", ".join(_g(t) for t in lin.tau_c),
        f"expansion: omega2 = {_g(exp.omega2)}, tau2 = {_g(exp.tau2)}, "
        f"eta2 = {_g(exp.eta2)}",
        f"u1 harmonics: C1 = {_g(exp.u1_harmonics.c1)}, D1 = {_g(exp.u1_harmonics.d1)}, "
        f"E1 = {_g(exp.u1_harmonics.e1)}",
        f"q1 harmonics: A = {_g(exp.q1_harmonics.a)}, B = {_g(exp.q1_harmonics.b)}, "
        f"C = {_g(exp.q1_harmonics.c)}, D = {_g(exp.q1_harmonics.d)}, "
        f"E = {_g(exp.q1_harmonics.e)}",
    ]
    try:
        verdicts = classify(exp)
        report["classification"] = {
            "direction": verdicts.direction.value,
            "cycle_stability": verdicts.cycle_stability.value,
            "period_trend": verdicts.period_trend.value,
        }
        lines.append(
            f"classification: {verdicts.direction.value} bifurcation, "
            f"{verdicts.cycle_stability.value} cycle, "
            f"period {verdicts.period_trend.value} with delay"
        )
    except DegenerateBifurcation as exc:
        report["classification"] = {"degenerate": exc.quantity}
        lines.append(f"classification: degenerate ({exc.quantity} vanishes)")
    if cfg.tau is not None:
        verdict = is_locally_stable(lin, cfg.tau)
        report["stability"] = {"tau": cfg.tau, "verdict": verdict.value}
        lines.append(f"stability at tau = {_g(cfg.tau)}: {verdict.value}")
        if cfg.tau > lin.tau0:
            try:
                pred = predicted_cycle(exp, cfg.tau)
                report["prediction"] = _prediction_payload(pred, lin.tau0)
                lines.append(
                    f"predicted cycle: epsilon = {_g(pred.epsilon)}, "
                    f"period = {_g(pred.period)}, mean offset = {_g(pred.mean_offset)}"
                )
                if pred.warning:
                    lines.append(f"warning: {pred.warning}")
            except HopfDualError as exc:
                report["prediction"] = {
                    "error": {"type": type(exc).__name__, "message": str(exc)}
                }
                lines.append(f"prediction unavailable: {exc}")
    _emit(report, lines, cfg, "analyze", argv)
    return 0


def _estimate_payload(est) -> dict:
    return {
        "regime": est.regime.value,
        "amplitude": est.amplitude,
        "period": est.period,
        "mean": est.mean,
        "transient_end": est.transient_end,
    }


def cmd_simulate(cfg: RunConfig, argv: list[str]) -> int:
    if cfg.tau is None:
        raise ValidationError("simulate requires a delay (--tau or [simulation] tau)")
    chain = _Chain(cfg, tau=cfg.tau)
    step = cfg.step if cfg.step is not None else default_step(cfg.tau, chain.linear.omega0)
    p0 = cfg.history_p0 if cfg.history_p0 is not None else 1.25 * chain.eq.p_star
    traj = simulate(chain.model, ConstantHistory(p0), cfg.t_end, step)
    report: dict = {
        "config": cfg.to_sections(),
        "tau": cfg.tau,
        "step": step,
        "history_p0": p0,
        "p_star": chain.eq.p_star,
        "samples": len(traj.values),
        "t_end": traj.t_end,
    }
    lines = [
        f"simulated to t = {_g(traj.t_end)} with step {_g(step)} "
        f"({len(traj.values)} samples, history p0 = {_g(p0)})",
    ]
    try:
        est = estimate_cycle(traj, chain.eq.p_star, cfg.transient_fraction)
        report["estimate"] = _estimate_payload(est)
        lines.append(
            f"regime: {est.regime.value}; amplitude = {_g(est.amplitude)}, "
            f"period = {_g(est.period) if math.isfinite(est.period) else '-'}, "
            f"mean = {_g(est.mean)} (transient cut at t = {_g(est.transient_end)})"
        )
        if cfg.tau > chain.linear.tau0:
            try:
                pred = predicted_cycle(chain.expansion, cfg.tau)
                report["prediction"] = _prediction_payload(pred, chain.linear.tau0)
                errs = compare_prediction(est, pred)
                report["prediction_errors"] = {
                    "amplitude": errs.amplitude,
                    "period": errs.period,
                    "mean_offset": errs.mean_offset,
                }
                lines.append(
                    f"prediction errors: amplitude {_g(errs.amplitude)}, "
                    f"period {_g(errs.period)}, mean offset {_g(errs.mean_offset)}"
                )
            except HopfDualError as exc:
                report["prediction"] = {
                    "error": {"type": type(exc).__name__, "message": str(exc)}
                }
    except HopfDualError as exc:
        report["estimate"] = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        lines.append(f"cycle measurement unavailable: {exc}")
    if cfg.out:
        write_trajectory_csv(traj, cfg.out)
        _write_sidecar(cfg.out, "simulate", argv, cfg)
        lines.append(f"trajectory written to {cfg.out}")
        report["csv"] = cfg.out
    if cfg.json_output:
        sys.stdout.write(_dump_json(report))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_sweep(cfg: RunConfig, argv: list[str]) -> int:
    if not cfg.tau_list:
        raise ValidationError("sweep requires --tau-list or [simulation] tau_list")
    if not cfg.out:
        raise ValidationError("sweep requires --out for the diagram CSV")
    rows = sweep(
        cfg.build_model(tau=0.0),
        cfg.tau_list,
        t_end=cfg.t_end,
        step=cfg.step,
        history_p0=cfg.history_p0,
        transient_fraction=cfg.transient_fraction,
    )
    write_sweep_csv(rows, cfg.out)
    _write_sidecar(cfg.out, "sweep", argv, cfg)
    report = {
        "config": cfg.to_sections(),
        "csv": cfg.out,
        "rows": [dataclasses.asdict(row) for row in rows],
    }
    lines = []
    for row in rows:
        lines.append(
            f"tau = {_g(row.tau)}: {row.regime}, amplitude = {_g(row.amp_meas)}, "
            f"period = {_g(row.period_meas)}, status = {row.status}"
        )
    lines.append(f"diagram written to {cfg.out} ({len(rows)} rows)")
    if cfg.json_output:
        sys.stdout.write(_dump_json(report))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_predict(cfg: RunConfig, argv: list[str]) -> int:
    if cfg.tau is None:
        raise ValidationError("predict requires a delay (--tau or [simulation] tau)")
    chain = _Chain(cfg)
    pred = predicted_cycle(chain.expansion, cfg.tau)
    report: dict = {
        "config": cfg.to_sections(),
        "prediction": _prediction_payload(pred, chain.linear.tau0),
    }
    lines = [
        f"tau = {_g(pred.tau)} (onset tau0 = {_g(chain.linear.tau0)})",
        f"epsilon = {_g(pred.epsilon)}",
        f"amplitude = {_g(pred.amplitude)}",
        f"omega = {_g(pred.omega)}, period = {_g(pred.period)}",
        f"mean offset = {_g(pred.mean_offset)}",
        f"floquet exponent = {_g(pred.floquet_exponent)}",
    ]
    if pred.warning:
        lines.append(f"warning: {pred.warning}")
    if cfg.waveform:
        n = cfg.periods * 200
        t = np.linspace(0.0, cfg.periods * pred.period, n + 1)
        p = pred.sample(t)
        out_lines = ["t,p_pred"]
        out_lines.extend("%.17g,%.17g" % (ti, pi) for ti, pi in zip(t, p))
        _write_text(cfg.waveform, "\n".join(out_lines) + "\n")
        _write_sidecar(cfg.waveform, "predict", argv, cfg)
        report["waveform"] = cfg.waveform
        lines.append(f"waveform written to {cfg.waveform} ({cfg.periods} periods)")
    _emit(report, lines, cfg, "predict", argv)
    return 0


def _verify_rows(closed: TaylorCoefficients, oracle: TaylorCoefficients) -> list[dict]:
    closed_map = closed.as_dict()
    oracle_map = oracle.as_dict()
    scale = max(1.0, max(abs(v) for k, v in closed_map.items() if k != "p_star"))
    rows = []
    for name in ("b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9"):
        cf, ov = closed_map[name], oracle_map[name]
        if cf == 0.0:
            status = "match" if abs(ov) <= _ZERO_RTOL * scale else "mismatch"
            rows.append({"name": name, "closed_form": cf, "oracle": ov,
                         "ratio": None, "rel_diff": None, "status": status})
            continue
        ratio = ov / cf
        rel_diff = abs(ov - cf) / abs(cf)
        if rel_diff <= _MATCH_RTOL:
            status = "match"
        elif name in _CONVENTION_RATIOS and abs(ratio - _CONVENTION_RATIOS[name]) <= _CONVENTION_ATOL:
            status = "paper-convention"
        else:
            status = "mismatch"
        rows.append({"name": name, "closed_form": cf, "oracle": ov,
                     "ratio": ratio, "rel_diff": rel_diff, "status": status})
    return rows


def verify_coefficients(model: ModelConfig) -> list[dict]:
    """Per-coefficient comparison rows for any model (library entry point)."""
    eq = find_equilibrium(model)
    return _verify_rows(taylor_coefficients(model, eq), numeric_taylor_oracle(model, eq))


def cmd_verify(cfg: RunConfig, argv: list[str]) -> int:
    chain = _Chain(cfg)
    rows = _verify_rows(chain.coeffs, numeric_taylor_oracle(chain.model, chain.eq))
    ok = all(row["status"] != "mismatch" for row in rows)
    report = {
        "config": cfg.to_sections(),
        "p_star": chain.eq.p_star,
        "coefficients": rows,
        "ok": ok,
    }
    header = f"{'name':<5} {'closed_form':>16} {'oracle':>16} {'ratio':>10} {'rel_diff':>10} status"
    lines = [header]
    for row in rows:
        lines.append(
            f"{row['name']:<5} {_g(row['closed_form']):>16} {_g(row['oracle']):>16} "
            f"{_g(row['ratio']):>10} {_g(row['rel_diff']):>10} {row['status']}"
        )
    conventions = [r["name"] for r in rows if r["status"] == "paper-convention"]
    if conventions:
        lines.append(
            "note: " + ", ".join(conventions) + " use the halved/thirded canonical "
            "convention; their oracle ratios are reported above"
        )
    lines.append("verify: OK" if ok else "verify: MISMATCH")
    _emit(report, lines, cfg, "verify", argv)
    if not ok:
        bad = ", ".join(r["name"] for r in rows if r["status"] == "mismatch")
        raise NumericalError(f"coefficient oracle mismatch: {bad}")
    return 0


_DISPATCH = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "predict": cmd_predict,
    "verify": cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfdual",
        description="Delay-feedback price model: analysis, prediction, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "analyze": "equilibrium, coefficients, linear analysis, expansion",
        "simulate": "integrate one trajectory and measure the attractor",
        "sweep": "bifurcation-diagram rows over a list of delays",
        "predict": "expansion-based cycle prediction at one delay",
        "verify": "closed-form coefficients against the numeric oracle",
    }
    for name, help_text in descriptions.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="FILE", help="configuration file")
        p.add_argument("--tau", type=float, help="feedback delay")
        p.add_argument("--tau-list", dest="tau_list", metavar="T1,T2,...",
                       help="comma-separated delays (sweep)")
        p.add_argument("--step", type=float, help="integration step size")
        p.add_argument("--t-end", dest="t_end", type=float, help="final time")
        p.add_argument("--history-p0", dest="history_p0", type=float,
                       help="constant initial history value")
        p.add_argument("--out", metavar="FILE", help="write the main output file")
        p.add_argument("--json", dest="json_output", action="store_true",
                       help="print the JSON report instead of text")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = _build_parser().parse_args(argv)
    try:
        tau_list = None
        if getattr(args, "tau_list", None):
            tau_list = _parse_value("floatlist", args.tau_list, "--tau-list")
        overrides = {
            "tau": args.tau,
            "tau_list": tau_list,
            "step": args.step,
            "t_end": args.t_end,
            "history_p0": args.history_p0,
            "out": args.out,
            "json_output": args.json_output,
        }
        cfg = load_config(args.config, overrides)
        return _DISPATCH[args.command](cfg, argv)
    except HopfDualError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        return 2 if isinstance(exc, ValidationError) else 3


if __name__ == "__main__":
    sys.exit(main())
