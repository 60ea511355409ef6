#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Reproduction driver: closed-form error tables, Monte-Carlo comparisons for every error source, the kappa fit and a
tracker run, all written to the results folder.
"""
import logging
from pathlib import Path

import pandas as pd

from pysocerr.classes import BatteryTruth, BeliefParams, MeasurementModel, NoiseSpec, CcDecomposition
from pysocerr.errors import predict_combined
from pysocerr.helpers import parse_horizon, percent
from pysocerr.io import write_frame
from pysocerr.montecarlo import fit_kappa_mc, run_mc
from pysocerr.profiles import generate_profile, short_segment_kappa
from pysocerr.tracker import track

logging.basicConfig(level=logging.INFO, format='%(asctime)s %(name)s %(levelname)s: %(message)s')

results_folder = Path("results")

############WHERE THE TABLES ARE SAVED#############################################################
tables_outname = results_folder / "prediction_tables.csv"
############WHERE THE MONTE-CARLO CURVES ARE SAVED#################################################
mc_outname = results_folder / "mc_{}.csv"
kappa_outname = results_folder / "fit_kappa.csv"
track_outname = results_folder / "track.csv"

###################################################################################################

SEED = 0
RUNS = 1000
C_BATT = 1.5
DELTAS = [0.1, 1.0, 10.0]
HORIZONS = ['1h', '24h', '1y']
LOADS = {'current noise': dict(sigma_i=0.01),
         'smart phone': dict(kappa=1.0, sigma_l=0.1115 * C_BATT),
         'electric vehicle': dict(kappa=1.0, sigma_l=0.0348 * C_BATT)}

MC_SPEC = NoiseSpec(sigma_i=0.01, sigma_batt=0.1, sigma_eta_c=0.02, sigma_eta_d=0.02, sigma_delta=0.001, seed=SEED)

truth = BatteryTruth(C_BATT)
belief = BeliefParams.from_truth(truth)


# =============================================================================
# CLOSED-FORM TABLES
# =============================================================================

rows = []
for table, fields in LOADS.items():
    spec = NoiseSpec(seed=SEED, **fields)
    for delta in DELTAS:
        row = {'table': table, 'delta_s': delta}
        for horizon in HORIZONS:
            n = int(round(parse_horizon(horizon) / delta))
            entry = predict_combined(spec, BeliefParams(C_BATT, delta=delta),
                                     CcDecomposition(0.0, 0.0, n, 0))
            row[horizon] = float(percent(entry.combined))
        rows.append(row)
tables = pd.DataFrame(rows)
write_frame(tables, tables_outname, {'seed': SEED, 'c_batt': C_BATT})
print(tables.to_string(float_format=lambda x: f"{x:.4f}"))


# =============================================================================
# MONTE-CARLO COMPARISONS
# =============================================================================

# 3.5 h of 30-90 s segments aligned to the sample period
profile = generate_profile(210, (-2.0, 2.0), (30.0, 90.0), SEED, quantum=truth.delta_true)
charging_profile = generate_profile(210, (0.2, 2.0), (30.0, 90.0), SEED, quantum=truth.delta_true)

for source, template in [('current', profile), ('capacity', charging_profile), ('efficiency', profile),
                         ('timing', charging_profile), ('combined', charging_profile)]:
    result = run_mc(source, template, truth, belief, MC_SPEC, RUNS, burn_in=10)
    write_frame(result.to_frame(), str(mc_outname).format(source), result.to_dict())
    print(source + ": max relative deviation " + str(result.max_rel_dev) + ", passed " + str(result.passed))

short_segments = generate_profile(10000, (0.0, 3.0), (0.05, 0.25), SEED)
integration_spec = MC_SPEC.replace(kappa=short_segment_kappa((0.05, 0.25), truth.delta_true))
result = run_mc('integration', short_segments, truth, belief, integration_spec, RUNS, burn_in=10)
write_frame(result.to_frame(), str(mc_outname).format('integration'), result.to_dict())
print("integration: max relative deviation " + str(result.max_rel_dev) + ", passed " + str(result.passed))

kappa_hat, kappa_result = fit_kappa_mc(short_segments, truth, RUNS, spec=MC_SPEC, burn_in=100)
write_frame(kappa_result.to_frame(), kappa_outname, dict(kappa_result.to_dict(), kappa_hat=kappa_hat))
print("kappa = " + str(kappa_hat))


# =============================================================================
#     Finally the tracker on a combined corruption:
# =============================================================================

track_truth = truth.with_delta(2.0)
hour_profile = generate_profile(60, (0.2, 1.8), (30.0, 90.0), SEED, quantum=2.0)
tracked = track(hour_profile, track_truth, BeliefParams.from_truth(track_truth),
                NoiseSpec(sigma_i=0.01, sigma_batt=0.075, seed=SEED), MeasurementModel(), s0=0.1)
write_frame(tracked.frame, track_outname, tracked.to_dict())
print("tracker RMSE " + str(tracked.rmse) + " (open loop " + str(tracked.open_loop_rmse) + ")")
