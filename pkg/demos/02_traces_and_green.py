"""Weighted traces, the scattering coefficient, and Green's identity.

Near the singular end a solution splits as u = x^{1/2-nu} u_- + x^{1/2+nu} u_+
and carries two weighted traces gamma_- = u_-(0), gamma_+ = 2 nu u_+(0).  The
normalised decaying solution of the boundary symbol operator has gamma_- = 1
and

    gamma_+ = -2 nu Gamma(1-nu)/Gamma(1+nu) (i xi / 2)^{2 nu},

the "scattering coefficient" connecting Dirichlet and Neumann data.  The
script extracts both traces from sampled values by a windowed power fit and
compares with the closed form, then certifies the Green identity

    <Pu, v> = <u, P*v> + gamma_+u conj(gamma_-v) - gamma_-u conj(gamma_+v)

on random compactly-supported two-branch test pairs.

Run:  python3 demos/02_traces_and_green.py
"""

import numpy as np
from numpy.polynomial import Polynomial

from besselbvp import (
    BesselOperator,
    GridFunction,
    Order,
    RadialGrid,
    green_defect,
    mode_solution,
    mode_traces,
    traces,
)

print("traces of the decaying mode solution (fit vs closed form)")
rng = np.random.default_rng(0)
for _ in range(5):
    nu = rng.uniform(0.1, 0.9)
    xi = complex(rng.uniform(-1.5, 1.5), -rng.uniform(0.4, 2.0))
    ms = mode_solution(nu, xi)
    fit = traces(ms.profile, nu)
    closed = mode_traces(nu, xi)
    print(f"  nu={nu:.3f} xi={xi:+.3f}: gamma_+ fit {fit.gamma_plus:+.8f} "
          f"closed {closed.gamma_plus:+.8f} "
          f"|diff| {abs(fit.gamma_plus - closed.gamma_plus):.1e}")

print("\nGreen identity defect on random compactly supported pairs")
g = RadialGrid.build(1.0, 128)
for nu in (0.25, 0.5, 0.75):
    op = BesselOperator(Order(nu), a_coeff=1.0)
    worst = 0.0
    for _ in range(20):
        minus = (Polynomial(rng.standard_normal(2))
                 * Polynomial([1.0, -1.0]) ** 2).coef
        plus = (Polynomial(rng.standard_normal(3))
                * Polynomial([1.0, 0.0, -1.0]) ** 2).coef
        u = GridFunction.from_pair(g, nu, minus, plus)
        v = GridFunction.from_pair(g, nu, minus[::-1], plus[::-1])
        worst = max(worst, green_defect(op, u, v))
    print(f"  nu={nu}: worst defect {worst:.2e}")
