"""
One pipeline per CLI command: resolve the inputs of a `RunConfig`, run the analysis and write its results, each table
with a JSON metadata sidecar holding the resolved configuration, the seed and the package version.
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .classes.Battery import BatteryTruth, BeliefParams
from .classes.FilterState import MeasurementModel
from .classes.NoiseSpec import NoiseSpec, Source
from .classes.SocTrace import CcDecomposition
from .errors import oversampling_sigma, predict_combined, realize, reinit_interval, true_trace
from .exceptions import InvalidInputError
from .helpers import fraction, parse_horizon, percent
from .io import load_csv, load_segments, save_segments, write_frame, write_json
from .model import cc_trace
from .montecarlo import check_tolerance, fit_kappa_mc, run_mc
from .profiles import generate_profile, sample_count, short_segment_kappa, stats
from .tracker import track

logger = logging.getLogger(__name__)

NOISE_FIELDS = ('sigma_i', 'kappa', 'sigma_l', 'sigma_batt', 'sigma_eta_c', 'sigma_eta_d', 'sigma_delta',
                'rho_delta_fixed', 'efficiency_squared')

_BATTERY = {'c_true': 1.5, 'eta_c_true': 1.0, 'eta_d_true': 1.0, 'delta': 1.0, 'seed': 0}
_PROFILE = {'profile': None, 'segments': 210, 'amplitude_min': -2.0, 'amplitude_max': 2.0, 'duration_min': 30.0,
            'duration_max': 90.0, 'quantum': None, 'aligned': True}
_NOISE = {name: None for name in NOISE_FIELDS}
_NOISE['efficiency_squared'] = False
FAMILY_FIELDS = ('segments', 'amplitude_min', 'amplitude_max', 'duration_min', 'duration_max', 'aligned')
# segments shorter than one sample period, the profile family integration error is measured on
SHORT_SEGMENTS = dict(_PROFILE, segments=10000, amplitude_min=0.0, amplitude_max=3.0, duration_min=0.05,
                      duration_max=0.25, aligned=False)

DEFAULTS = {
    'predict': dict(c_batt=1.5, eta_c=1.0, eta_d=1.0, sigma_i=0.01, rho_int=None, sigma_l=None, kappa=1.0,
                    sigma_batt=None, sigma_eta_c=None, sigma_eta_d=None, sigma_delta=None, rho_delta_fixed=None,
                    efficiency_squared=False, s_cc=1.0, deltas=[0.1, 1.0, 10.0], horizons=['1h', '24h', '1y'],
                    reinit_target=None, seed=0),
    'simulate': dict(_BATTERY, **_PROFILE, **_NOISE, source='combined', run_index=0, s0=0.0),
    # profile generator fields left unset fall back to a family chosen by the source
    'mc': dict(_BATTERY, **dict(_PROFILE, **{field: None for field in FAMILY_FIELDS}),
               **dict(_NOISE, sigma_i=0.01, sigma_batt=0.1, sigma_eta_c=0.02, sigma_eta_d=0.02, sigma_delta=0.001),
               source='current', runs=1000, s0=0.0, tolerance=None, burn_in=10, n_jobs=1),
    'fit-kappa': dict(_BATTERY, **SHORT_SEGMENTS, runs=1000, s0=0.0, tolerance=None, burn_in=10, n_jobs=1),
    'track': dict(_BATTERY, **dict(_PROFILE, segments=60, amplitude_min=0.2, amplitude_max=1.8),
                  **dict(_NOISE, sigma_i=0.01, sigma_batt=0.075),
                  ocv_coeffs=[3.2, 0.9, -0.9, 1.2, -0.75, 0.2], b=[0.05], sigma_z=0.01, rule='incremental',
                  q=None, s0=0.1, update_every=1, run_index=0, p0=0.0),
    'gen-profile': dict(_PROFILE, seed=0),
    'stats': dict(log=None, c_batt=1.5, sigma_i=0.0, seed=0),
}

REQUIRED = {'stats': ('log',)}


def metadata(config, **summary):
    """The sidecar document: the resolved configuration plus seed, package version and result summary."""
    document = config.to_dict()
    document.update({'seed': config.get('seed', 0), 'version': __version__, 'summary': summary})
    return document


def _out_path(out_dir, name):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def truth_from_config(config):
    return BatteryTruth(config['c_true'], config['eta_c_true'], config['eta_d_true'], config['delta'])


def spec_from_config(config):
    fields = {name: config.get(name) for name in NOISE_FIELDS if config.get(name) is not None}
    return NoiseSpec(seed=config['seed'], **fields)


def profile_from_config(config, family=None):
    """
    Read the segment profile named by `profile`, or generate one from the generator parameters and the seed.

    Generator parameters left at None are taken from `family`. Unless `quantum` is given, an `aligned` profile gets
    durations in whole sample periods, so no integration error mixes in.
    """
    if config.get('profile') is not None:
        return load_segments(config['profile'])
    family = _PROFILE if family is None else family
    params = {field: family[field] if config.get(field) is None else config[field] for field in FAMILY_FIELDS}
    quantum = config.get('quantum')
    if quantum is None and params['aligned'] and config.get('delta') is not None:
        quantum = config['delta']
    return generate_profile(params['segments'], (params['amplitude_min'], params['amplitude_max']),
                            (params['duration_min'], params['duration_max']), config['seed'], quantum=quantum)


def generated_kappa(config, family):
    """
    Integration constant of the profile `profile_from_config` generates, or None when it reads a file or its segments
    may be longer than one sample period.
    """
    if config.get('profile') is not None or config.get('quantum') is not None:
        return None
    duration_range = [family[field] if config.get(field) is None else config[field]
                      for field in ('duration_min', 'duration_max')]
    if duration_range[1] > config['delta']:
        return None
    return short_segment_kappa(duration_range, config['delta'])


def run_predict_pipeline(config, out_dir):
    """
    Closed-form SOC-error s.d. over the (delta, horizon) grid, charging-only with n = horizon / delta samples and the
    SOC-proportional terms evaluated at the accumulated SOC `s_cc`.

    :return: [pandas.DataFrame] The report, percentages in `*_pct` columns.
    """
    sigma_l = config['sigma_l']
    if config['rho_int'] is not None:
        sigma_l = config['rho_int'] * config['c_batt']
    spec = NoiseSpec(sigma_i=config['sigma_i'], kappa=config['kappa'], sigma_l=sigma_l,
                     sigma_batt=config['sigma_batt'], sigma_eta_c=config['sigma_eta_c'],
                     sigma_eta_d=config['sigma_eta_d'], sigma_delta=config['sigma_delta'],
                     rho_delta_fixed=config['rho_delta_fixed'], seed=config['seed'],
                     efficiency_squared=config['efficiency_squared'])
    deltas = [float(delta) for delta in config['deltas']]
    horizons = [(str(horizon), parse_horizon(horizon)) for horizon in config['horizons']]
    if not deltas or not horizons or min(deltas) <= 0:
        raise InvalidInputError("The prediction grid needs at least one positive delta and one horizon")
    rho_i = spec.value('sigma_i') / config['c_batt']
    rho_int = spec.value('sigma_l') / config['c_batt']
    rows = []
    for delta in deltas:
        belief = BeliefParams(config['c_batt'], config['eta_c'], config['eta_d'], delta)
        for label, horizon_s in horizons:
            n = sample_count(horizon_s, delta)
            decomp = CcDecomposition(s_cc_c=max(config['s_cc'], 0.0), s_cc_d=min(config['s_cc'], 0.0), n_c=n, n_d=0)
            entry = predict_combined(spec, belief, decomp)
            row = {'delta_s': delta, 'horizon': label, 'horizon_s': horizon_s, 'n': n}
            row.update({name + '_pct': float(percent(value)) for name, value in entry.to_dict().items()})
            row['oversampling_i_pct'] = float(percent(oversampling_sigma(rho_i, delta, horizon_s)))
            if config['reinit_target'] is not None:
                target = float(fraction(config['reinit_target']))
                row['reinit_current_s'] = reinit_interval(target, delta, rho_i, eta=config['eta_c'])
                row['reinit_integration_s'] = reinit_interval(target, delta, rho_int, kappa=spec.value('kappa'),
                                                              eta=config['eta_c'])
            rows.append(row)
    report = pd.DataFrame(rows)
    write_frame(report, _out_path(out_dir, 'predict.csv'), metadata(config, rows=len(report)))
    return report


def run_simulate_pipeline(config, out_dir):
    """
    One realization of an error source: true against Coulomb-counted SOC.

    :return: [pandas.DataFrame] Columns k, t_s, s_true, s_cc, error.
    """
    profile = profile_from_config(config)
    truth = truth_from_config(config)
    spec = spec_from_config(config)
    realization = realize(config['source'], profile, truth, BeliefParams.from_truth(truth), spec,
                          config['run_index'])
    s_true = true_trace(realization, config['s0'])
    s_cc = cc_trace(realization.measured.samples, config['s0'], realization.belief)
    frame = pd.DataFrame({'k': np.arange(1, len(s_true) + 1), 't_s': s_true.times, 's_true': s_true.values,
                          's_cc': s_cc.values, 'error': s_cc.values - s_true.values})
    write_frame(frame, _out_path(out_dir, 'simulate.csv'),
                metadata(config, draws=realization.draws, final_error=float(frame['error'].iloc[-1])
                         if len(frame) else 0.0))
    return frame


def run_mc_pipeline(config, out_dir):
    """
    Monte-Carlo validation of one source. Files are written before the tolerance is checked.

    The integration source is compared on a short-segment profile; with `kappa` unset, the prediction uses the kappa
    of that profile family.

    :return: [McResult]
    :raises ToleranceError: when the curves disagree beyond the tolerance.
    """
    source = Source.parse(config['source'])
    family = SHORT_SEGMENTS if source is Source.INTEGRATION else _PROFILE
    profile = profile_from_config(config, family)
    truth = truth_from_config(config)
    spec = spec_from_config(config)
    if source is Source.INTEGRATION and spec.kappa is None:
        kappa = generated_kappa(config, family)
        if kappa is None:
            logger.warning("No kappa given for the integration source; the prediction uses kappa = 1")
        else:
            logger.info("Integration prediction uses kappa = " + str(kappa) + " of the generated profile")
            spec = spec.replace(kappa=kappa)
    result = run_mc(source, profile, truth, BeliefParams.from_truth(truth), spec, config['runs'], s0=config['s0'],
                    tolerance=config['tolerance'], burn_in=config['burn_in'], n_jobs=config['n_jobs'])
    write_frame(result.to_frame(), _out_path(out_dir, 'mc_' + source.value + '.csv'),
                metadata(config, **result.to_dict()))
    return check_tolerance(result)


def run_fit_kappa_pipeline(config, out_dir):
    """
    Fit kappa on a profile and write the fitted comparison. Files are written before the tolerance is checked.

    :return: [tuple] (kappa_hat, McResult)
    :raises ToleranceError: when the fitted curve misses the Monte-Carlo curve beyond the tolerance.
    """
    profile = profile_from_config(config, SHORT_SEGMENTS)
    truth = truth_from_config(config)
    kappa_hat, result = fit_kappa_mc(profile, truth, config['runs'], spec=NoiseSpec(seed=config['seed']),
                                     s0=config['s0'], burn_in=config['burn_in'], n_jobs=config['n_jobs'],
                                     tolerance=config['tolerance'])
    write_frame(result.to_frame(), _out_path(out_dir, 'fit_kappa.csv'),
                metadata(config, kappa_hat=kappa_hat, **result.to_dict()))
    return kappa_hat, check_tolerance(result)


def run_track_pipeline(config, out_dir):
    """
    Closed-loop tracker run on a combined corruption.

    :return: [TrackResult]
    """
    profile = profile_from_config(config)
    truth = truth_from_config(config)
    model = MeasurementModel(config['ocv_coeffs'], config['b'], float(config['sigma_z']))
    result = track(profile, truth, BeliefParams.from_truth(truth), spec_from_config(config), model,
                   s0=config['s0'], run_index=config['run_index'], rule=config['rule'], q_override=config['q'],
                   update_every=config['update_every'], p0=config['p0'])
    write_frame(result.frame, _out_path(out_dir, 'track.csv'), metadata(config, **result.to_dict()))
    return result


def run_gen_profile_pipeline(config, out_dir):
    profile = profile_from_config(config)
    path = _out_path(out_dir, 'profile.csv')
    save_segments(profile, path)
    write_json(metadata(config, segments=len(profile), total_duration=profile.total_duration),
               path.with_name('profile.meta.json'))
    return profile


def run_stats_pipeline(config, out_dir):
    """
    Load statistics of a current log.

    :return: [LoadStats]
    """
    load_stats = stats(load_csv(config['log']), config['c_batt'], config['sigma_i'])
    write_frame(load_stats.diff_histogram, _out_path(out_dir, 'stats_histogram.csv'),
                metadata(config, **load_stats.to_dict()))
    return load_stats


PIPELINES = {'predict': run_predict_pipeline, 'simulate': run_simulate_pipeline, 'mc': run_mc_pipeline,
             'fit-kappa': run_fit_kappa_pipeline, 'track': run_track_pipeline,
             'gen-profile': run_gen_profile_pipeline, 'stats': run_stats_pipeline}
