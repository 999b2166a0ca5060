import os
import logging
from typing import Any, Dict, Optional, Tuple

import click
from dotenv import load_dotenv

from pipeline import Command, RunConfig, run
from regularity.errors import ConfigInvalid


def _log_level() -> int:
    override = os.getenv("GSLAB_LOG_LEVEL")
    if override:
        return getattr(logging, override.upper(), logging.INFO)
    return logging.DEBUG if os.getenv("ENVIRONMENT", "local") == "local" else logging.INFO


# Logging configuration
logging.basicConfig(
    level=_log_level(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Load environment variables for local development
if os.getenv("ENVIRONMENT", "local") == "local":
    logger.info("⚙️ Loading .env for local development")
    load_dotenv(dotenv_path=".env")

FAMILIES = ["zero", "const", "ex1_pos", "ex1_neg", "ex2", "ex3", "table"]


def _parse_modes(modes: Tuple[str, ...], n: Optional[int]) -> Optional[Dict[str, Any]]:
    """K:AMPLITUDE[:KIND] strings to a boundary-data object"""
    if not modes:
        return None
    parsed = []
    for item in modes:
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise click.BadParameter(f"expected K:AMPLITUDE[:KIND], got {item!r}", param_hint="--mode")
        try:
            mode = {"k": int(parts[0]), "amplitude": float(parts[1])}
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--mode") from e
        if len(parts) == 3:
            mode["kind"] = parts[2]
        parsed.append(mode)
    data: Dict[str, Any] = {"modes": parsed}
    if n is not None:
        data["n"] = n
    return data


def _profile_overrides(family: Optional[str], gamma: Optional[float], beta: Optional[float],
                       a: Optional[float], c: Optional[float], scale: Optional[float],
                       t_min: Optional[float], table: Optional[str]) -> Optional[Dict[str, Any]]:
    if family is None:
        return None
    profile = {"family": family, "gamma": gamma, "beta": beta, "A": a, "c": c,
               "scale": scale, "t_min": t_min, "path": table}
    return {k: v for k, v in profile.items() if v is not None}


def common_options(func):
    """Options shared by every gslab command"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="JSON run configuration"),
        click.option("--n", type=click.IntRange(2, 3), default=None, help="Dimension"),
        click.option("--t-max", type=float, default=None, help="Inner window edge -log r_min"),
        click.option("--step", type=float, default=None, help="Grid step in t"),
        click.option("--tol", type=float, default=None, help="Numeric tolerance"),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory"),
        click.option("--format", "formats", type=click.Choice(["json", "csv"]), multiple=True,
                     help="Output formats (repeatable)"),
        click.option("--seed", type=int, default=None, help="Random seed"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def profile_options(func):
    """Profile flags, merged over the profile of --config"""
    options = [
        click.option("--family", type=click.Choice(FAMILIES, case_sensitive=False), default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--beta", type=float, default=None),
        click.option("--A", "a", type=float, default=None, help="Example-3 parameter (> sqrt 2)"),
        click.option("--c", type=float, default=None, help="Constant profile value"),
        click.option("--scale", type=float, default=None),
        click.option("--t-min", type=float, default=None, help="Outer window edge -log r_max"),
        click.option("--table", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Two-column (t, g) CSV for table profiles"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _execute(command: Command, config_path: Optional[str], overrides: Dict[str, Any]) -> None:
    overrides = dict(overrides)
    overrides["command"] = str(command)
    if overrides.get("formats") == ():
        overrides.pop("formats")
    try:
        config = RunConfig.load(config_path, overrides)
    except ConfigInvalid as e:
        logger.error(f"❌ Invalid configuration: {e}")
        click.echo(f"invalid configuration: {e}", err=True)
        raise SystemExit(1)

    outcome = run(config)
    for path in outcome.files:
        click.echo(str(path))
    raise SystemExit(outcome.exit_code)


def _profile_command(command: Command):
    @common_options
    @profile_options
    def handler(config_path, n, t_max, step, tol, out_dir, formats, seed,
                family, gamma, beta, a, c, scale, t_min, table):
        _execute(command, config_path, {
            "n": n, "t_max": t_max, "step": step, "tol": tol, "out_dir": out_dir,
            "formats": formats, "seed": seed,
            "profile": _profile_overrides(family, gamma, beta, a, c, scale, t_min, table),
        })
    return handler


@click.group(name="gslab")
def cli():
    """Regularity lab for Gilbarg-Serrin equations"""


cli.command("classify", help="Classify regularity at the origin")(_profile_command(Command.CLASSIFY))
cli.command("solve-z", help="Solve the comparison ODE for Z")(_profile_command(Command.SOLVE_Z))
cli.command("oscillation", help="Mean oscillation curve and Dini-mean-oscillation verdict")(
    _profile_command(Command.OSCILLATION))
cli.command("stability", help="Cumulative exponent S(t) and stability verdicts")(
    _profile_command(Command.STABILITY))


@cli.command("oracle", help="Mode oracle: comparison ratio, Lipschitz probe and fd2d cross-check")
@common_options
@profile_options
@click.option("--mode", "modes", multiple=True, help="Boundary mode K:AMPLITUDE[:KIND] (repeatable)")
def oracle(config_path, n, t_max, step, tol, out_dir, formats, seed,
           family, gamma, beta, a, c, scale, t_min, table, modes):
    _execute(Command.ORACLE, config_path, {
        "n": n, "t_max": t_max, "step": step, "tol": tol, "out_dir": out_dir,
        "formats": formats, "seed": seed,
        "profile": _profile_overrides(family, gamma, beta, a, c, scale, t_min, table),
        "boundary": _parse_modes(modes, n),
    })


@cli.command("example", help="Run one of the three worked examples")
@common_options
@click.option("--which", type=click.IntRange(1, 3), default=None)
@click.option("--negative", is_flag=True, default=False, help="Example 1 with g = -t^-gamma")
@click.option("--gamma", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--A", "a", type=float, default=None)
def example(config_path, n, t_max, step, tol, out_dir, formats, seed, which, negative, gamma, beta, a):
    _execute(Command.EXAMPLE, config_path, {
        "n": n, "t_max": t_max, "step": step, "tol": tol, "out_dir": out_dir,
        "formats": formats, "seed": seed,
        "which": which, "negative": negative or None, "gamma": gamma, "beta": beta, "A": a,
    })


if __name__ == "__main__":
    cli()
