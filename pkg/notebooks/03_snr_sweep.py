"""
How much does cooperation buy?
==============================

The default scenario (N0 = 1e-17 W/Hz over a 100 m square) is a high-SNR
regime: rates grow only logarithmically as links shorten, so cutting a
long hop into pieces helps little. Raising the noise floor makes short
links relatively more valuable. This sweep prints the mean delay ratio
of store-and-forward shortest path over the cooperative optimum.
"""
import sys

from miarouting import ExperimentConfig, run_experiment

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10

print("noise_psd   sp/coop   latest/coop   rr/coop   bcast/coop")
for noise in (1e-17, 1e-15, 1e-14, 1e-13, 1e-12, 1e-11):
    rep = run_experiment(ExperimentConfig(trials=trials, n_nodes=30, seed=1, noise_psd=noise))
    agg = rep.aggregates
    dist = [agg["dist_%s_over_coop" % k]["mean"] for k in ("latest", "rr", "bcast")]
    print("%8.0e   %7.3f   %11.3f   %7.3f   %10.3f" % (noise, agg["sp_over_coop"]["mean"], *dist))
