"""Euclidean projections onto {r : ||H_alpha(r)||_2 <= gamma}, frozen for the tests.

The set is written as the Minkowski sum {c + e : |c_i| <= alpha, ||e||_2 <= gamma}
and solved with cvxpy, independently of the closed form used in the library.
"""

import cvxpy as cp
import numpy as np

rng = np.random.default_rng(20240612)
lines = ["// Generated by tests/oracles/projection_oracle.py; do not edit.",
         "// {dim, {r}, alpha, gamma, {projection}}"]
for k in range(40):
    dim = 2 if k < 20 else 4
    r = 2.0 * rng.standard_normal(dim)
    alpha = float(abs(rng.standard_normal()))
    gamma = float(abs(rng.standard_normal()))
    c = cp.Variable(dim)
    e = cp.Variable(dim)
    prob = cp.Problem(cp.Minimize(cp.sum_squares(c + e - r)),
                      [cp.abs(c) <= alpha, cp.norm(e, 2) <= gamma])
    prob.solve(solver=cp.CLARABEL)
    assert prob.status == "optimal", prob.status
    x = c.value + e.value
    fmt = lambda v: ", ".join(repr(float(t)) for t in v)
    lines.append(f"{{{dim}, {{{fmt(r)}}}, {alpha!r}, {gamma!r}, {{{fmt(x)}}}}},")
open("projection_instances.inc", "w").write("\n".join(lines) + "\n")
print("wrote", len(lines) - 2, "instances")
