"""
Command dispatch for gslab runs
Each command turns a RunConfig into verdict records, result sections and CSV frames
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from regularity.dynsys import classification, cumulative_S
from regularity.errors import GSLabError, HypothesisUnmet
from regularity.oscillation import dmo_test, oscillation_curve
from regularity.profiles import RadialProfile, log_grid
from regularity.verdicts import ModulusReport, Rule, Status, Verdict
from solvers.fd2d import DEFAULT_T_CUT, fd2d_solve
from solvers.oracle import BoundaryData, comparison_check, lipschitz_probe, mode_reconstruction
from solvers.radial_ode import MAX_STEP, asymptotic_ratio, finite_energy, solve_Z, z_linear_bound

from .config import Command, OutputFormat, RunConfig
from .report import build_report, write_csv, write_json

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


@dataclass
class CommandResult:
    verdicts: List[Dict[str, Any]] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)


@dataclass
class RunOutcome:
    exit_code: int
    files: List[Path]
    report: Dict[str, Any]


def _ode_step(config: RunConfig) -> float:
    return min(config.step, MAX_STEP)


def _modulus_records(modulus: ModulusReport) -> List[Dict[str, Any]]:
    return [
        modulus.dini.to_record("dini"),
        modulus.square_dini.to_record("square_dini"),
        modulus.total_variation_verdict.to_record("total_variation"),
        modulus.rgprime_bounded.to_record("rgprime_bounded"),
        modulus.positive_near_zero.to_record("positive_near_zero"),
    ]


def _classify(config: RunConfig, p: RadialProfile) -> CommandResult:
    result = classification(p, config.n, _ode_step(config))
    dmo = dmo_test(p, config.n)
    results: Dict[str, Any] = {
        "modulus": _modulus_records(result.modulus),
        "stability": {
            "S_end": float(result.stability.S_grid[-1]),
            "sup_increment": result.stability.sup_increment,
            "threshold": result.stability.threshold,
        },
    }
    if result.z_bound is not None:
        results["z_bound"] = result.z_bound.verdict.to_record("z_linear_bound")
    return CommandResult(
        verdicts=result.verdict.to_records() + [dmo.to_record("dini_mean_oscillation")],
        results=results,
        frames={"stability.csv": result.stability.to_frame()},
    )


def _solve_z(config: RunConfig, p: RadialProfile) -> CommandResult:
    sol = solve_Z(p, config.n, _ode_step(config))
    energy, energy_verdict = finite_energy(sol)
    bound = z_linear_bound(sol)
    results: Dict[str, Any] = {
        "nodes": int(sol.t_grid.size),
        "energy": energy,
        "sup_v_over_r": float(np.max(sol.v_over_r)),
        "min_v_over_r": float(np.min(sol.v_over_r)),
    }
    fit_t = max(p.t_min, min(25.0, p.t_max - 10.0))
    try:
        model = asymptotic_ratio(sol, p, fit_t=fit_t)
        results["asymptotic"] = {"c_fit": model.c_fit, "fit_t": model.fit_t, "drift": model.drift}
    except HypothesisUnmet as e:
        logger.warning(f"⚠️ Asymptotic law skipped: {e}")
        results["asymptotic"] = {"skipped": str(e)}
    return CommandResult(
        verdicts=[energy_verdict.to_record("finite_energy"), bound.verdict.to_record("z_linear_bound")],
        results=results,
        frames={"z.csv": sol.to_frame()},
    )


def _oscillation(config: RunConfig, p: RadialProfile) -> CommandResult:
    curve = oscillation_curve(p, config.n)
    dmo = dmo_test(p, config.n, curve=curve)
    return CommandResult(
        verdicts=[dmo.to_record("dini_mean_oscillation")],
        results={
            "radii": int(curve.t_grid.size),
            "omega_max": float(curve.omega_A.max()),
            "max_abs_g_minus_gtilde": float(np.max(np.abs(curve.g_minus_gtilde))),
            "tail_bound": curve.tail_bound,
            "matrix_norm": str(curve.matrix_norm),
        },
        frames={"oscillation.csv": curve.to_frame()},
    )


def _stability(config: RunConfig, p: RadialProfile) -> CommandResult:
    report = cumulative_S(p, log_grid(p, config.step), config.n)
    return CommandResult(
        verdicts=[verdict.to_record(name) for name, verdict in report.verdicts()],
        results={
            "S_end": float(report.S_grid[-1]),
            "sup_increment": report.sup_increment,
            "threshold": report.threshold,
        },
        frames={"stability.csv": report.to_frame()},
    )


def _boundary(config: RunConfig) -> BoundaryData:
    bd = config.boundary_data()
    if bd is None:
        rng = np.random.default_rng(config.seed)
        bd = BoundaryData.random(config.n, rng, n_modes=config.random_modes)
        logger.info(f"🔧 Random boundary data (seed {config.seed}): degrees {bd.degrees}")
    return bd


def _oracle(config: RunConfig, p: RadialProfile) -> CommandResult:
    step = _ode_step(config)
    bd = _boundary(config)
    verdict = classification(p, config.n, step).verdict
    comparison = comparison_check(p, config.n, bd, step=step, tol=config.tol)
    probe = lipschitz_probe(p, config.n, bd, step, verdict=verdict)
    monotone = Verdict(
        Status.from_bool(comparison.monotone, analytic=False),
        {"max_violation": comparison.max_violation, "max_ratio": float(comparison.ratios.max())},
        Rule.COMPARISON,
    )
    results: Dict[str, Any] = {
        "boundary": bd.to_dict(),
        "comparison": comparison.summary(),
        "lipschitz_probe": probe.summary(),
    }
    frames = {"comparison.csv": comparison.to_frame()}

    if config.n == 2:
        fd = fd2d_solve(p, bd, t_cut=min(DEFAULT_T_CUT, p.t_max))
        reference = mode_reconstruction(p, bd, fd.t, fd.theta, step)
        results["fd2d"] = {
            "grid": list(fd.u.shape),
            "t_cut": float(fd.t[-1]),
            "residual": fd.residual,
            "relative_l2_vs_modes": fd.relative_l2(reference),
        }
        frames["fd2d.csv"] = fd.to_frame()

    return CommandResult(
        verdicts=verdict.to_records() + [monotone.to_record("comparison_monotone")],
        results=results,
        frames=frames,
    )


HANDLERS: Dict[Command, Callable[[RunConfig, RadialProfile], CommandResult]] = {
    Command.CLASSIFY: _classify,
    Command.EXAMPLE: _classify,
    Command.SOLVE_Z: _solve_z,
    Command.OSCILLATION: _oscillation,
    Command.STABILITY: _stability,
    Command.ORACLE: _oracle,
}


def exit_code(verdicts: List[Dict[str, Any]], error: Optional[Dict[str, str]]) -> int:
    if error is not None:
        return EXIT_ERROR
    if verdicts and all(v["status"] == str(Status.INCONCLUSIVE) for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def run(config: RunConfig) -> RunOutcome:
    """Execute one command and write its report and CSV artifacts

    Domain errors are logged and serialized into report.json; the exit
    code is 0 on success, 2 when every verdict is INCONCLUSIVE, 1 on error.
    """
    out_dir = Path(config.out_dir)
    logger.info(f"🚀 gslab {config.command} (n={config.n}) -> {out_dir}")
    profile: Optional[Dict[str, Any]] = None
    error: Optional[Dict[str, str]] = None
    try:
        p = config.build_profile()
        profile = p.to_dict()
        result = HANDLERS[config.command](config, p)
    except (GSLabError, ValueError, TypeError, ArithmeticError, OSError) as e:
        logger.error(f"❌ {config.command} failed: {type(e).__name__}: {e}")
        error = {"type": type(e).__name__, "message": str(e)}
        result = CommandResult()

    files: List[Path] = []
    artifacts: List[str] = []
    if config.wants(OutputFormat.CSV):
        for name, frame in result.frames.items():
            files.append(write_csv(frame, out_dir / name))
            artifacts.append(name)

    report = build_report(str(config.command), config.n, profile, result.verdicts,
                          result.results, artifacts, error)
    if config.wants(OutputFormat.JSON) or error is not None:
        files.append(write_json(report, out_dir / REPORT_NAME))

    code = exit_code(result.verdicts, error)
    if code == EXIT_OK:
        logger.info(f"✅ gslab {config.command} finished ({len(files)} files)")
    elif code == EXIT_INCONCLUSIVE:
        logger.warning(f"⚠️ gslab {config.command}: every verdict is INCONCLUSIVE")
    return RunOutcome(exit_code=code, files=files, report=report)
