"""
Command-line front end: wavefunction samples, outcome and success
probabilities, squeezing requirements with the Faraday planner, and the
validation suites.

    python cli.py wavefunction --j 4 --x +J --quadrature both
    python cli.py probability --sweep-db 0:25:0.5
    python cli.py requirements --db 10 --faraday
    python cli.py validate --suite fourier --max-j 10

Data files go to --out-dir (GKP_OUTPUT_DIR); summaries are printed to stderr.
"""
import sys
import math
import logging
import argparse
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from rich.console import Console
from rich.table import Table
from rich.progress import Progress

import config
import export
import faraday_planner
import measurement
import state_model
import validation
from config import RunConfig, build_run_config, parse_range, setup_logging
from error_metrics import error_profile, requirements_table, j_from_db
from errors import (ConfigError, GridTooCoarse, HeraldError, InvalidIndex, ValidationFailure,
                    ZeroProbabilityOutcome)
from spin_algebra import TotalSpin, outcomes, twice
from squeezing import sigma_sq_from_db
from state_model import EncodingParams, Quadrature, QuadratureGrid

console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2


# --- parameter helpers -------------------------------------------------------

def resolve_spin(cfg: RunConfig) -> TotalSpin:
    """Total spin from --j, or from --db rounded to the nearest half-integer."""
    cfg.require_one_of_j_db()
    if cfg.j is not None:
        return TotalSpin.from_value(cfg.j)
    value = j_from_db(cfg.db)
    spin = TotalSpin(max(1, int(round(2 * value))))
    if not math.isclose(spin.value, value, rel_tol=0, abs_tol=1e-9):
        logger.warning(f"{cfg.db:g} dB needs J={value:.4f}; using the nearest half-integer J={spin}")
    return spin


def outcome_tokens(values: Sequence[str]) -> List[str]:
    """Comma-separated --x values as single tokens; defaults to +J."""
    return [t.strip() for v in (values or ['+J']) for t in v.split(',') if t.strip()]


def parse_outcomes(j: TotalSpin, values: Sequence[str]) -> List[Fraction]:
    """Outcomes from +J / -J / J / all / numbers; raises InvalidIndex naming x for anything else."""
    tokens = outcome_tokens(values)
    chosen: List[Fraction] = []
    for token in tokens:
        text = token.upper()
        if text == 'ALL':
            chosen.extend(outcomes(j))
        elif text in ('J', '+J'):
            chosen.append(j.fraction)
        elif text == '-J':
            chosen.append(-j.fraction)
        else:
            try:
                two_x = twice(token)
            except InvalidIndex:
                raise InvalidIndex(f"--x {token!r} is not +J, -J, all or a half-integer")
            if abs(two_x) > j.two_j or (two_x - j.two_j) % 2:
                raise InvalidIndex(f"x={token} is not an outcome for J={j} (x runs from -J to J in steps of 1)")
            chosen.append(Fraction(two_x, 2))
    # keep first occurrence order
    return list(dict.fromkeys(chosen))


def user_range(cfg: RunConfig) -> bool:
    """True when --grid-min or --grid-max was given; such grids must cover the state."""
    return cfg.grid_min is not None or cfg.grid_max is not None


def with_overrides(grid: QuadratureGrid, cfg: RunConfig) -> QuadratureGrid:
    return QuadratureGrid(
        grid.min if cfg.grid_min is None else cfg.grid_min,
        grid.max if cfg.grid_max is None else cfg.grid_max,
        grid.step if cfg.grid_step is None else cfg.grid_step,
    )


def quadratures(cfg: RunConfig) -> List[Quadrature]:
    if cfg.quadrature == 'both':
        return [Quadrature.POSITION, Quadrature.MOMENTUM]
    try:
        return [Quadrature(cfg.quadrature)]
    except ValueError:
        raise ConfigError(f"quadrature must be position, momentum or both, got {cfg.quadrature!r}")


def spin_label(j: TotalSpin) -> str:
    return f"J{j.two_j // 2}" if j.is_integer else f"J{j.two_j}_2"


def sweep_values(cfg: RunConfig):
    """(kind, values) for --sweep-db / --sweep-j, or None."""
    if cfg.sweep_db and cfg.sweep_j:
        raise ConfigError("give only one of --sweep-db / --sweep-j")
    if cfg.sweep_db:
        return 'db', parse_range(cfg.sweep_db)
    if cfg.sweep_j:
        return 'j', parse_range(cfg.sweep_j)
    return None


# --- commands ----------------------------------------------------------------

def _write_samples(points, values, quadrature: Quadrature, path: Path, cfg: RunConfig) -> Path:
    frame = export.samples_frame(points, values, quadrature)
    return export.write_frame(frame, path, cfg.format)


def _target_files(cfg: RunConfig, out_dir: Path) -> List[Path]:
    if cfg.db is not None and cfg.j is not None:
        raise ConfigError("exactly one of --j / --db must be given")
    if cfg.db is not None:
        sigma_sq, tag = sigma_sq_from_db(cfg.db), f"{cfg.db:g}dB"
    elif cfg.j is not None:
        spin = TotalSpin.from_value(cfg.j)
        params = EncodingParams.symmetric_for(spin)
        sigma_sq, tag = params.spike_variance, spin_label(spin)
    else:
        raise ConfigError("--target needs --db or --j")

    parity = state_model.Parity.parse(cfg.target)
    sigma = math.sqrt(sigma_sq)
    written = []
    for quadrature in quadratures(cfg):
        if quadrature is Quadrature.POSITION:
            comb = state_model.target_state(parity, sigma, cfg.q0)
        else:
            comb = state_model.target_momentum_state(parity, sigma, cfg.q0)
        grid = with_overrides(state_model.covering_grid(comb), cfg)
        name = out_dir / f"target_{parity.value}_{tag}_{export.axis_name(quadrature)}"
        values = state_model.evaluate(comb, grid, strict=user_range(cfg))
        written.append(_write_samples(grid.points, values, quadrature, name, cfg))
        if cfg.format == 'json':
            written.append(export.write_json(state_model.comb_to_dict(comb), name.with_name(name.name + '_comb.json')))
    return written


def cmd_wavefunction(cfg: RunConfig) -> List[Path]:
    """Grid samples of the conditional states (or of a target state with --target)."""
    out_dir = Path(cfg.out_dir)
    if cfg.target:
        return _target_files(cfg, out_dir)

    spin = resolve_spin(cfg)
    params = EncodingParams.symmetric_for(spin)
    chosen = parse_outcomes(spin, cfg.x)
    explicit = not any(t.lower() == 'all' for t in outcome_tokens(cfg.x))
    written = []

    for x in chosen:
        try:
            position = state_model.conditional_position_state(params, x)
        except ZeroProbabilityOutcome as e:
            if explicit:
                raise
            logger.warning(f"Skipping x={x}: {e}")
            continue

        stem = f"wavefunction_{spin_label(spin)}_{export.outcome_label(twice(x))}"
        for quadrature in quadratures(cfg):
            if quadrature is Quadrature.POSITION:
                grid = with_overrides(state_model.default_grid(params), cfg)
                values = state_model.evaluate(position, grid, strict=user_range(cfg))
            else:
                envelope = state_model.momentum_grid(params)
                grid = with_overrides(envelope, cfg)
                if user_range(cfg) and not grid.covers(envelope.min, envelope.max):
                    raise GridTooCoarse(f"Momentum grid [{grid.min:.4g}, {grid.max:.4g}] does not cover "
                                        f"[{envelope.min:.4g}, {envelope.max:.4g}] (six envelope std)")
                values = state_model.conditional_momentum_amplitude(params, x, grid.points)
            written.append(_write_samples(grid.points, values, quadrature,
                                          out_dir / f"{stem}_{export.axis_name(quadrature)}", cfg))
        if cfg.format == 'json':
            written.append(export.write_json(state_model.comb_to_dict(position), out_dir / f"{stem}_comb.json"))

    profile = error_profile(params)
    table = Table(show_header=True, header_style="bold magenta", title=f"J = {spin}")
    for column in ('spike var q', 'envelope var q', 'spike var p', 'envelope var p', 'dB'):
        table.add_column(column, justify="right")
    table.add_row(*(f"{v:.6g}" for v in (profile.spike_var_q, profile.env_var_q,
                                        profile.spike_var_p, profile.env_var_p, profile.db)))
    console.print(table)
    return written


def cmd_probability(cfg: RunConfig) -> List[Path]:
    """Outcome distribution for one J, or success probabilities over a sweep."""
    out_dir = Path(cfg.out_dir)
    sweep = sweep_values(cfg)

    if sweep is None:
        spin = resolve_spin(cfg)
        distribution = measurement.outcome_distribution(EncodingParams.symmetric_for(spin))
        rows = [{'x': float(x), 'probability': float(p)} for x, p in zip(distribution.outcomes, distribution.probs)]
        path = export.write_frame(export.rows_frame(rows, ['x', 'probability']),
                                  out_dir / f"distribution_{spin_label(spin)}", cfg.format)

        table = Table(show_header=True, header_style="bold magenta", title=f"P(x), J = {spin}")
        table.add_column("x", justify="right")
        table.add_column("P(x)", justify="right")
        for x in distribution.most_probable(min(5, len(distribution.outcomes))):
            table.add_row(str(x), f"{distribution.probability(x):.6g}")
        console.print(table)
        console.print(f"Sum of P(x): {distribution.total:.15f}")
        return [path]

    kind, values = sweep
    with Progress(console=console) as progress:
        task = progress.add_task(f"[green]Success probabilities over {kind}...", total=len(values))
        rows = measurement.probability_sweep(
            **{f"{kind}s": values}, workers=cfg.workers,
            progress=lambda: progress.update(task, advance=1))
    columns = [kind] + (['j'] if kind == 'db' else []) + ['p_exact', 'p_closed', 'p_asymptotic', 'p_iterated']
    path = export.write_frame(export.rows_frame(rows, columns), out_dir / f"success_sweep_{kind}", cfg.format)
    console.print(f"[green]{len(rows)} sweep points written to {path}[/]")
    return [path]


def cmd_requirements(cfg: RunConfig) -> List[Path]:
    """dB -> (J, r, P_s) table, plus the Faraday planner report with --faraday."""
    out_dir = Path(cfg.out_dir)
    if cfg.sweep_db:
        dbs = parse_range(cfg.sweep_db)
    elif cfg.db is not None:
        dbs = [cfg.db]
    else:
        raise ConfigError("requirements needs --db or --sweep-db")

    rows = requirements_table(dbs, workers=cfg.workers)
    written = [export.write_frame(export.rows_frame(rows, ['db', 'j_required', 'r', 'p_success']),
                                  out_dir / 'requirements', cfg.format)]

    table = Table(show_header=True, header_style="bold magenta")
    for column in ('dB', 'J', 'r', 'P_s'):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(f"{row['db']:g}", f"{row['j_required']:.4f}", f"{row['r']:.4f}", f"{row['p_success']:.4f}")
    console.print(table)

    if cfg.faraday:
        report = faraday_planner.plan(cfg.n_photons, cfg.detuning, state_model.SQRT_PI,
                                      meter_variance=cfg.meter_variance, photon_flux=cfg.photon_flux)
        written.append(export.write_json(report.as_dict(), out_dir / 'faraday_plan.json'))
        console.print(f"eta = {report.eta:.4f}, chi = {report.chi:.4g}, "
                      f"t * flux / N_L = {report.interaction_time_ratio:.6f}, "
                      f"projective = {report.is_projective}")
    return written


def cmd_validate(cfg: RunConfig) -> List[Path]:
    """Run the validation suites; raises ValidationFailure when any check fails."""
    suites = cfg.suite or list(validation.SUITES)
    with Progress(console=console) as progress:
        task = progress.add_task("[green]Validating...", total=len(suites))
        report = validation.run_validation(suites, cfg.max_j, cfg.workers,
                                           progress=lambda _: progress.update(task, advance=1))
    path = export.write_json(report.as_dict(), Path(cfg.out_dir) / 'validation_report.json')

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Suite", style="dim")
    table.add_column("Check")
    table.add_column("Error", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Result")
    for check in report.checks:
        result = "[green]pass[/]" if check.passed else "[red]FAIL[/]"
        table.add_row(check.suite, check.name, f"{check.error:.3g}", f"{check.tolerance:.3g}", result)
    console.print(table)

    if not report.passed:
        raise ValidationFailure(f"{len(report.failures)} of {len(report.checks)} checks failed (see {path})")
    console.print(f"[green]All {len(report.checks)} checks passed[/]")
    return [path]


COMMANDS = {
    'wavefunction': cmd_wavefunction,
    'probability': cmd_probability,
    'requirements': cmd_requirements,
    'validate': cmd_validate,
}


# --- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Heralded GKP states from a spin ensemble and squeezed light')
    parser.add_argument('--config', help='key=value config file (CLI flags take precedence)')
    parser.add_argument('--out-dir', dest='out_dir', help=f'Output directory (default: {config.OUTPUT_DIR})')
    parser.add_argument('--log-level', dest='log_level', help=f'Logging level (default: {config.LOG_LEVEL})')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=['csv', 'json'], help='Output format (default: csv)')
    common.add_argument('--workers', type=int, help=f'Worker threads for sweeps (default: {config.WORKERS})')

    spin = argparse.ArgumentParser(add_help=False)
    spin.add_argument('--j', help='Total spin J, e.g. 4, 9/2 or 4.5')
    spin.add_argument('--db', type=float, help='Squeezing in dB (J from the symmetric encoding)')

    subparsers = parser.add_subparsers(dest='command', help='Command to execute')

    wave = subparsers.add_parser('wavefunction', parents=[common, spin], help='Conditional or target wavefunctions')
    wave.add_argument('--x', action='append', help='Outcome: +J, -J, a value such as 3/2, or all (repeatable; '
                                                   'write negative outcomes as --x=-J)')
    wave.add_argument('--quadrature', choices=['position', 'momentum', 'both'], help='default: position')
    wave.add_argument('--target', choices=['plus', 'minus'], help='Emit the target state instead')
    wave.add_argument('--q0', type=float, help='Target envelope center (|q0| <= sqrt(pi)/2)')
    wave.add_argument('--grid-min', dest='grid_min', type=float)
    wave.add_argument('--grid-max', dest='grid_max', type=float)
    wave.add_argument('--grid-step', dest='grid_step', type=float)

    prob = subparsers.add_parser('probability', parents=[common, spin], help='Outcome and success probabilities')
    prob.add_argument('--sweep-db', dest='sweep_db', help='dB sweep start:stop:step')
    prob.add_argument('--sweep-j', dest='sweep_j', help='J sweep start:stop:step')

    req = subparsers.add_parser('requirements', parents=[common], help='Squeezing requirements and Faraday planner')
    req.add_argument('--db', type=float, help='Target squeezing in dB')
    req.add_argument('--sweep-db', dest='sweep_db', help='dB sweep start:stop:step')
    req.add_argument('--faraday', action='store_true', default=None, help='Also write the Faraday planner report')
    req.add_argument('--n-photons', dest='n_photons', type=float, help='Meter photon number N_L (default: 1e4)')
    req.add_argument('--detuning', type=float, help='Detuning over linewidth (default: 500)')
    req.add_argument('--meter-variance', dest='meter_variance', type=float, help='Meter variance (default: 0.1)')
    req.add_argument('--photon-flux', dest='photon_flux', type=float, help='Photon flux (default: 1e6)')

    val = subparsers.add_parser('validate', parents=[common], help='Run the validation suites')
    val.add_argument('--suite', action='append', choices=list(validation.SUITES), help='Suite to run (repeatable)')
    val.add_argument('--max-j', dest='max_j', type=float, help='Cap on J in the J sweeps')

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        setup_logging(args.log_level)
        values = {k: v for k, v in vars(args).items() if k not in ('command', 'config', 'log_level')}
        cfg = build_run_config(args.command, values, args.config)
        written = COMMANDS[args.command](cfg)
    except ValidationFailure as e:
        logging.error(f"Validation failed: {e}")
        console.print(f"[red]{e}[/]")
        return EXIT_VALIDATION_FAILED
    except HeraldError as e:
        logging.error(f"{args.command} failed: {e}")
        console.print(f"[red]error: {e}[/]")
        return EXIT_USAGE

    for path in written:
        logger.debug(f"Output: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
