"""Klein-Gordon reduction and normal modes of a static aAdS slice.

A stationary aAdS metric g = x^{-2}(-dx^2 + gamma(x)) with mass-m scalar
field reduces, after conjugation and a time Fourier transform, to a
parameter-dependent Bessel operator of order nu = sqrt(m + n^2/4); nu > 0 is
the Breitenlohner-Freedman bound.  For the exact static slice the pencil is
|D_nu|^2 + |q|^2 - lambda^2, its eigenvalues are the normal-mode frequencies
lambda = +- sqrt(|q|^2 + j_{nu,n}^2), and the pencil eigenvectors are
two-fold complete at the discrete level (rank surrogate).

Run:  python3 demos/05_normal_modes_ads.py
"""

import numpy as np

from besselbvp import (
    ModelMetric,
    bessel_zeros,
    completeness_check,
    ellipticity_verdicts,
    pencil_modes,
    reduce,
)
from besselbvp.config import DEFAULTS

n = 3
metric = ModelMetric(n, np.diag([1.0, -1.0, -1.0]), None, 0.0)
for mass in (-2.0, -9.0 / 4.0 + 0.49, 0.0):
    red = reduce(metric, mass)
    print(f"mass {mass:+.3f}: nu = {red.nu.nu:.4f} ({red.nu.regime.value}), "
          f"elliptic = {red.elliptic_verdict}")

red = reduce(metric, -2.0)        # nu = 1/2
verdicts = ellipticity_verdicts(red, metric)
print(f"\ntimelike Killing field: {verdicts.elliptic}; "
      f"timelike conormal: {verdicts.parameter_elliptic}")
print(f"parameter-elliptic sectors: {red.parameter_elliptic_sectors}")

print("\nnormal modes at tangential mode q (lambda = +-sqrt(|q|^2 + j^2)):")
for q in ((0, 0), (1, 0)):
    ms = pencil_modes(red.nu, red.bessel_op, None, q=q, n_nodes=160)
    lam = np.sort(np.abs(ms.eigenvalues[:6:2]))
    jz = bessel_zeros(red.nu.nu, 3).zeros
    want = np.sqrt(np.dot(q, q) + jz ** 2)
    for k in range(3):
        print(f"  q={q} n={k + 1}: lambda = {lam[k]:.8f}   "
              f"closed form {want[k]:.8f}")

small = pencil_modes(red.nu, red.bessel_op, None, q=(0, 0), n_nodes=32,
                     residual_cap=None,
                     settings=DEFAULTS.with_overrides(fem_degree=4))
rep = completeness_check(small)
print(f"\ntwo-fold completeness (desk-scale rank surrogate at dof="
      f"{small.dof}): rank {rep.numerical_rank}/{rep.ambient_dim} -> "
      f"{rep.verdict}")
