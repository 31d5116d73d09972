import sys
import logging

import netresid
from netresid.simulate import simulate_network
from netresid.store import write_fit, write_grid

"""
$ python3 residual_example.py <lambda> <output-dir>

Simulate a network with residual structure of strength <lambda> (1 means
none), test the logistic regression on it and export the residual surface.
"""

logging.basicConfig(level=logging.INFO)

lam = float(sys.argv[1])
output = sys.argv[2]

network, U = simulate_network(netresid.SimConfig(n=100, rho=0.1, lam=lam, d=2, seed=7))

hyper = netresid.Hyperparameters(k_max=6)
options = netresid.FitOptions(n_restarts=2, threads=4)
fits = netresid.fit_model(network, hyper, seed=7, options=options)
result = netresid.summarize(fits, hyper, network)

states = {K: f.state for K, f in fits.items()}
write_fit(output, result, states)

print('p(H0|Y) = %.4f' % result.p_H0)
if result.p_H0 < 0.5:
    print('H0 rejected')

grid = netresid.export_grid(states, result.posterior, resolution=51, seed=7)
write_grid(output, grid)
