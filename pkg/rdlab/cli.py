"""CLI interface for rdlab."""

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from rdlab.bounds import barriers, estimates
from rdlab.generators.artifacts import ArtifactWriter
from rdlab.generators.report import ReportGenerator
from rdlab.model.config import Tolerances, parse_scenario_file
from rdlab.model.exceptions import ConfigError, RDLabError, SolverError
from rdlab.model.geometry import GEOMETRY_KINDS, WEIGHT_KINDS, RadialGeometry, Weight
from rdlab.model.validator import ScenarioValidator
from rdlab.runtime.inequalities import euclidean_sobolev_constant, poincare_estimate, sobolev_estimate
from rdlab.runtime.scenario import ScenarioRunner, run_scenario

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAIL = 2

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _load(config_file):
    """Parse and validate; returns (config, messages)."""
    config = parse_scenario_file(config_file)
    errors = ScenarioValidator(config).validate()
    return config, [str(error) for error in errors]


def _output_dir(config, out, many: bool) -> Path:
    if out is None:
        return Path(config.output or Path("runs") / config.name)
    return Path(out) / config.name if many else Path(out)


def run_one(config_file: str, out, many: bool, tolerances: Tolerances):
    """Run one config file; returns (exit_code, lines) where lines are (text, is_error)."""
    lines = []
    try:
        config, errors = _load(config_file)
    except ConfigError as e:
        return EXIT_USAGE, [(f"Error loading {config_file}: {e}", True)]
    if errors:
        lines.append((f"{config_file}: {len(errors)} validation error(s):", True))
        lines.extend((f"  {error}", True) for error in errors)
        return EXIT_USAGE, lines

    try:
        report = run_scenario(config, tolerances)
    except SolverError as e:
        return EXIT_FAIL, [(f"{config.name}: solver failure: {e}", True)]
    except RDLabError as e:
        return EXIT_FAIL, [(f"{config.name}: {e}", True)]

    output_path = _output_dir(config, out, many)
    ArtifactWriter(report).generate(output_path)
    ReportGenerator(report).generate(str(output_path))
    verdict = "PASS" if report.verdict else "FAIL"
    lines.append((f"{config.name} [{config.kind}]: {verdict} -> {output_path}", False))
    for check in report.checks:
        flag = "ok" if check.passed else ("FAIL" if check.required else "warn")
        lines.append((f"  {check.name}: {check.value:.6g} "
                      f"({'<=' if check.upper else '>='} {check.limit:.6g}) {flag}", False))
    return report.exit_code, lines


@click.group()
@click.option('--verbose', '-v', count=True, help='Increase log verbosity (-v info, -vv debug)')
def cli(verbose):
    """Slow-diffusion reaction lab: simulate, bound and verify."""
    logging.basicConfig(level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument('config_files', nargs=-1, required=True, type=click.Path(exists=True))
@click.option('--out', '-o', default=None, help='Output directory (overrides the config)')
@click.option('--jobs', '-j', default=1, type=click.IntRange(min=1),
              help='Scenarios to run in parallel')
def run(config_files, out, jobs):
    """Run scenario configurations and write their artifacts."""
    try:
        tolerances = Tolerances.from_env()
    except ConfigError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_USAGE)

    many = len(config_files) > 1
    if jobs > 1 and many:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_one, path, out, many, tolerances) for path in config_files]
            results = [future.result() for future in futures]
    else:
        results = [run_one(path, out, many, tolerances) for path in config_files]

    for _, lines in results:
        for text, is_error in lines:
            click.echo(text, err=is_error)
    codes = [code for code, _ in results]
    if EXIT_USAGE in codes:
        sys.exit(EXIT_USAGE)
    sys.exit(max(codes))


@cli.command()
@click.argument('config_file', type=click.Path(exists=True))
def validate(config_file):
    """Validate a scenario configuration."""
    click.echo(f"Validating scenario configuration: {config_file}")
    try:
        config, errors = _load(config_file)
    except ConfigError as e:
        click.echo(f"Error parsing configuration: {e}", err=True)
        sys.exit(EXIT_USAGE)

    if errors:
        click.echo(f"\nFound {len(errors)} validation error(s):", err=True)
        for error in errors:
            click.echo(f"  {error}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(f"Validation passed! Scenario '{config.name}' ({config.kind}).")


@cli.command()
@click.argument('config_file', type=click.Path(exists=True))
@click.option('--c-p', 'c_p', default=None, type=float, help='Poincare constant (else from config or 1)')
@click.option('--c-s', 'c_s', default=None, type=float, help='Sobolev constant (else from config or N-dim sharp value)')
def info(config_file, c_p, c_s):
    """Print the derived exponents and constants of a scenario."""
    try:
        config = parse_scenario_file(config_file)
        params = config.model_params()
    except RDLabError as e:
        click.echo(f"Error parsing configuration: {e}", err=True)
        sys.exit(EXIT_USAGE)

    N = params.geometry.dimension
    c_p = c_p if c_p is not None else config.constants.get("C_p", 1.0)
    c_s = c_s if c_s is not None else config.constants.get("C_s", euclidean_sobolev_constant(N))
    constants = estimates.BoundConstants(N, params.m, params.p, c_p, c_s)

    click.echo(f"Scenario: {config.name} ({config.kind})")
    click.echo(f"  Geometry: {params.geometry.label}, weight {params.weight.kind}")
    click.echo(f"  Ball: R={params.radius:g}, {params.cells} cells (dr={params.dr:g})")
    click.echo(f"  m={params.m:g}, p={params.p:g}, C_p={c_p:.6g}, C_s={c_s:.6g}")

    click.echo("\nExponents:")
    click.echo(f"  2* = {constants.critical_exponent:.6g}, s = {constants.s:.6g}")
    exps = estimates.smoothing_exponents(params.m, params.p, N)
    click.echo(f"  smoothing: reaction {exps.reaction:.6g}, diffusion {exps.diffusion:.6g}, "
               f"transient {exps.transient:.6g}")

    click.echo("\nGrowth rates:")
    for q in sorted(set(config.checks.q_values) | {params.m}):
        click.echo(f"  C({q:g}) = {constants.rate(q):.6g}")
    g1, g2, g = constants.gammas
    click.echo(f"  Gamma1 = {g1:.6g}, Gamma2 = {g2:.6g}, Gamma = {g:.6g}")

    if config.barrier is not None and config.barrier.target == "weighted-euclidean":
        try:
            bp = ScenarioRunner(config, Tolerances()).barrier_params()
            env = barriers.envelope(0.0, bp, params.m, params.p, params.weight.envelope(), N)
        except RDLabError as e:
            click.echo(f"\nBarrier envelope unavailable: {e}", err=True)
        else:
            click.echo("\nBarrier envelope at t=0:")
            for key, value in sorted(env.as_dict().items()):
                click.echo(f"  {key} = {value:.6g}")


def _geometry_options(command):
    command = click.option('--geometry', type=click.Choice(GEOMETRY_KINDS), default='euclidean',
                           help='Radial model manifold')(command)
    command = click.option('--kappa', default=1.0, type=float, help='Hyperbolic curvature scale')(command)
    command = click.option('--dim', default=3, type=int, help='Dimension N')(command)
    command = click.option('--radius', default=20.0, type=float, help='Ball radius R')(command)
    command = click.option('--cells', default=4000, type=int, help='Number of radial cells')(command)
    return command


@cli.command()
@_geometry_options
@click.option('--weight', type=click.Choice(WEIGHT_KINDS), default='unit', help='Density weight')
def poincare(geometry, kappa, dim, radius, cells, weight):
    """Estimate the first Dirichlet eigenvalue and C_p on a ball."""
    try:
        geom = RadialGeometry(dim, geometry, kappa)
        estimate = poincare_estimate(geom, Weight(weight), radius, cells)
    except RDLabError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(f"{geom.label} ball R={radius:g}, {cells} cells, weight {weight}")
    click.echo(f"  lambda1 = {estimate.eigenvalue:.10g}")
    click.echo(f"  C_p     = {estimate.constant:.10g}")
    click.echo(f"  iterations = {estimate.iterations}, residual = {estimate.residual:.3e}")


@cli.command()
@_geometry_options
def sobolev(geometry, kappa, dim, radius, cells):
    """Upper estimate of the Sobolev constant C_s from a bubble family."""
    try:
        geom = RadialGeometry(dim, geometry, kappa)
        estimate = sobolev_estimate(geom, radius, cells)
    except RDLabError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_USAGE)
    click.echo(f"{geom.label} ball R={radius:g}, {cells} cells")
    click.echo(f"  C_s <= {estimate.upper_bound:.10g} (profile {estimate.best_index})")


if __name__ == '__main__':
    cli()
