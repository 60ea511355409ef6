"""
Command-line front end of pysocerr.

Exit codes: 0 on success, 1 when a Monte-Carlo comparison misses its tolerance, 2 on usage or configuration errors.
"""
import logging
import sys

import click

from . import __version__
from .classes.RunConfig import RunConfig
from .exceptions import SocError, ToleranceError
from .helpers import percent
from .io import read_json, read_noise_spec
from .pipelines import DEFAULTS, PIPELINES, REQUIRED

logger = logging.getLogger(__name__)


def _run(command, ctx, flags):
    """Resolve the `RunConfig` of `command` and run its pipeline, mapping library errors to exit codes."""
    options = ctx.obj
    defaults = dict(DEFAULTS[command])
    try:
        if options.get('noise_spec'):
            defaults.update({key: value for key, value in read_noise_spec(options['noise_spec']).to_dict().items()
                             if key in defaults})
        file_config = read_json(options['config']) if options.get('config') else {}
        flags = dict(flags, seed=options.get('seed'))
        config = RunConfig.resolve(command, defaults, file_config, flags, REQUIRED.get(command, ()))
        logger.debug("Resolved configuration: " + str(config.to_dict()))
        return PIPELINES[command](config, options['out'])
    except ToleranceError as error:
        click.echo(str(error), err=True)
        ctx.exit(1)
    except SocError as error:
        raise click.UsageError(str(error), ctx=ctx)
    # unreadable inputs or ill-typed configuration values
    except (OSError, ValueError, TypeError) as error:
        raise click.UsageError(f"{type(error).__name__}: {error}", ctx=ctx)


def _floats(ctx, param, value):
    if value is None:
        return None
    try:
        return [float(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def _strings(ctx, param, value):
    return None if value is None else [item.strip() for item in value.split(',') if item.strip()]


def noise_options(function):
    """Flags of the five error sources, shared by the simulation commands."""
    options = [
        click.option('--sigma-i', type=float, help="Current-noise s.d. in amperes."),
        click.option('--kappa', type=float, help="Integration-error constant."),
        click.option('--sigma-l', type=float, help="Load-current s.d. in amperes."),
        click.option('--sigma-batt', type=float, help="Capacity s.d. in ampere-hours."),
        click.option('--sigma-eta-c', type=float, help="S.d. of the charging-efficiency coefficient."),
        click.option('--sigma-eta-d', type=float, help="S.d. of the discharging-efficiency coefficient."),
        click.option('--sigma-delta', type=float, help="S.d. of the timing coefficient."),
        click.option('--rho-delta-fixed', type=float, help="Fixed timing coefficient (exclusive with --sigma-delta)."),
        click.option('--efficiency-squared/--efficiency-linear', default=None,
                     help="Weight sample counts by squared efficiencies."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def battery_options(function):
    options = [
        click.option('--c-true', type=float, help="True capacity in ampere-hours."),
        click.option('--eta-c-true', type=float, help="True charging efficiency."),
        click.option('--eta-d-true', type=float, help="True discharging efficiency."),
        click.option('--delta', type=float, help="Sample period in seconds."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def profile_options(function):
    options = [
        click.option('--profile', type=click.Path(exists=True, dir_okay=False),
                     help="Segment-profile CSV (duration_s,amps); generated when omitted."),
        click.option('--segments', type=int, help="Number of generated segments."),
        click.option('--amplitude-min', type=float, help="Smallest generated amplitude in amperes."),
        click.option('--amplitude-max', type=float, help="Largest generated amplitude in amperes."),
        click.option('--duration-min', type=float, help="Shortest generated segment in seconds."),
        click.option('--duration-max', type=float, help="Longest generated segment in seconds."),
        click.option('--quantum', type=float, help="Generated durations are multiples of this many seconds."),
        click.option('--aligned/--unaligned', default=None,
                     help="Align generated segments to the sample period."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


@click.group()
@click.version_option(__version__, prog_name='pysocerr')
@click.option('--config', 'config', type=click.Path(exists=True, dir_okay=False),
              help="JSON parameter file or output sidecar; flags override it.")
@click.option('--noise-spec', type=click.Path(exists=True, dir_okay=False), help="NoiseSpec JSON document.")
@click.option('--seed', type=click.IntRange(min=0), help="Experiment seed.")
@click.option('--out', default='results', show_default=True, type=click.Path(file_okay=False),
              help="Output directory.")
@click.option('--verbose', '-v', count=True, help="More logging (repeat for debug output).")
@click.option('--quiet', '-q', is_flag=True, help="Only log warnings and errors.")
@click.pass_context
def cli(ctx, config, noise_spec, seed, out, verbose, quiet):
    """Coulomb-counting SOC error analysis: predictions, simulations, Monte-Carlo validation and tracking."""
    level = logging.WARNING if quiet else (logging.DEBUG if verbose > 1 else logging.INFO)
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    ctx.obj = {'config': config, 'noise_spec': noise_spec, 'seed': seed, 'out': out}


@cli.command()
@click.option('--c-batt', type=float, help="Capacity in ampere-hours.")
@click.option('--eta-c', type=float, help="Charging efficiency.")
@click.option('--eta-d', type=float, help="Discharging efficiency.")
@click.option('--rho-int', type=float, help="Integration coefficient rho_I in 1/hour; sets sigma_l = rho_I * c_batt.")
@click.option('--s-cc', type=float, help="Accumulated SOC the SOC-proportional terms are evaluated at.")
@click.option('--deltas', callback=_floats, help="Comma-separated sample periods in seconds.")
@click.option('--horizons', callback=_strings, help="Comma-separated horizons, e.g. 1h,24h,1y.")
@click.option('--reinit-target', type=float, help="SOC-error s.d. in percent; adds reinitialization horizons.")
@noise_options
@click.pass_context
def predict(ctx, **flags):
    """Closed-form SOC-error s.d. (%) over a grid of sample periods and horizons."""
    report = _run('predict', ctx, flags)
    columns = [column for column in report.columns if column.endswith('_pct') or column.startswith('reinit')]
    click.echo(report.set_index(['delta_s', 'horizon'])[columns].to_string(float_format=lambda x: f"{x:.4f}"))


@cli.command()
@click.option('--source', type=click.Choice(['current', 'integration', 'capacity', 'efficiency', 'timing',
                                             'combined']), help="Injected error source.")
@click.option('--run-index', type=click.IntRange(min=0), help="Monte-Carlo run to realize.")
@click.option('--s0', type=float, help="Initial SOC.")
@battery_options
@profile_options
@noise_options
@click.pass_context
def simulate(ctx, **flags):
    """One corrupted Coulomb-counting run against the geometric truth."""
    frame = _run('simulate', ctx, flags)
    final = frame['error'].iloc[-1] if len(frame) else 0.0
    click.echo(f"{len(frame)} samples, final SOC error {float(percent(final)):.4f} %")


@cli.command()
@click.option('--source', type=click.Choice(['current', 'integration', 'capacity', 'efficiency', 'timing',
                                             'combined']), help="Injected error source.")
@click.option('--runs', type=click.IntRange(min=2), help="Number of Monte-Carlo runs.")
@click.option('--s0', type=float, help="Initial SOC.")
@click.option('--tolerance', type=float, help="Acceptance tolerance on the relative deviation.")
@click.option('--burn-in', type=click.IntRange(min=0), help="Samples skipped before comparing.")
@click.option('--n-jobs', type=click.IntRange(min=1), help="Worker threads.")
@battery_options
@profile_options
@noise_options
@click.pass_context
def mc(ctx, **flags):
    """Monte-Carlo validation of the closed-form prediction of one source."""
    result = _run('mc', ctx, flags)
    click.echo(f"{result.source.value}: M={result.runs}, max relative deviation {result.max_rel_dev} "
               f"(tolerance {result.tolerance})")


@cli.command('fit-kappa')
@click.option('--runs', type=click.IntRange(min=2), help="Number of Monte-Carlo runs.")
@click.option('--s0', type=float, help="Initial SOC.")
@click.option('--tolerance', type=float, help="Acceptance tolerance of the fitted curve.")
@click.option('--burn-in', type=click.IntRange(min=0), help="Samples skipped before comparing.")
@click.option('--n-jobs', type=click.IntRange(min=1), help="Worker threads.")
@battery_options
@profile_options
@click.pass_context
def fit_kappa(ctx, **flags):
    """Fit the integration-error constant kappa on a profile."""
    kappa_hat, result = _run('fit-kappa', ctx, flags)
    click.echo(f"kappa = {kappa_hat:.4f} (sigma_L = {result.diagnostics['sigma_l']:.4f} A, "
               f"max relative deviation {result.max_rel_dev})")


@cli.command()
@click.option('--rule', type=click.Choice(['incremental', 'single_step']), help="Process-noise rule.")
@click.option('--q', type=float, help="Constant process-noise variance replacing the derived one.")
@click.option('--sigma-z', type=float, help="Voltage-noise s.d. in volts ('inf' for no updates).")
@click.option('--s0', type=float, help="Initial SOC.")
@click.option('--p0', type=float, help="Initial SOC variance.")
@click.option('--update-every', type=click.IntRange(min=1), help="Samples between measurement updates.")
@click.option('--run-index', type=click.IntRange(min=0), help="Monte-Carlo run to realize.")
@battery_options
@profile_options
@noise_options
@click.pass_context
def track(ctx, **flags):
    """Closed-loop SOC tracker on a combined corruption."""
    result = _run('track', ctx, flags)
    click.echo(f"RMSE {float(percent(result.rmse)):.4f} % (open loop {float(percent(result.open_loop_rmse)):.4f} %)")


@cli.command('gen-profile')
@profile_options
@click.pass_context
def gen_profile(ctx, **flags):
    """Generate a random piecewise-constant current profile."""
    flags.pop('profile', None)
    profile = _run('gen-profile', ctx, flags)
    click.echo(f"{len(profile)} segments, {profile.total_duration:.1f} s")


@cli.command('stats')
@click.argument('log', type=click.Path(exists=True, dir_okay=False))
@click.option('--c-batt', type=float, help="Capacity in ampere-hours.")
@click.option('--sigma-i', type=float, help="Current-sensor noise s.d. in amperes.")
@click.pass_context
def stats_command(ctx, **flags):
    """Load statistics (sigma_L, rho_i, rho_I) of a current log."""
    load_stats = _run('stats', ctx, flags)
    click.echo(f"sigma_L = {load_stats.sigma_l:.4f} A, rho_i = {load_stats.rho_i_coeff:.4f} /h, "
               f"rho_I = {load_stats.rho_int_coeff:.4f} /h")


def main():
    cli(prog_name='pysocerr')


if __name__ == '__main__':
    sys.exit(main())
