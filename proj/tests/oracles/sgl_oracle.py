"""Reference optima for small sparse group Lasso instances.

Draws instances with numpy, solves them with cvxpy (Clarabel, tight
tolerances) and writes a C++ include consumed by the solver tests and the
acceptance suite. Rerun after changing the instance recipe:

    python3 tests/oracles/sgl_oracle.py > tests/oracles/sgl_instances.inc
"""

import cvxpy as cp
import numpy as np

rng = np.random.default_rng(20240611)


def draw():
    sizes = []
    p = int(rng.integers(2, 7))
    while sum(sizes) < p:
        sizes.append(int(rng.integers(1, min(3, p - sum(sizes)) + 1)))
    n = int(rng.integers(2, 9))
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[rng.random(p) < 0.5] = rng.standard_normal() * 2
    y = X @ beta + 0.3 * rng.standard_normal(n)
    scale = 2 * np.abs(X.T @ y).max()
    lam = float(scale * rng.uniform(0.02, 0.6))
    lam_g = float(scale * rng.uniform(0.0, 0.6))
    return sizes, X, y, lam, lam_g


def solve(sizes, X, y, lam, lam_g):
    p = X.shape[1]
    b = cp.Variable(p)
    offs = np.cumsum([0] + sizes)
    pen = lam * cp.norm1(b) + lam_g * sum(cp.norm2(b[offs[j]:offs[j + 1]]) for j in range(len(sizes)))
    prob = cp.Problem(cp.Minimize(cp.sum_squares(y - X @ b) + pen))
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10, max_iter=500)
    # Evaluate the objective exactly at the returned point.
    v = b.value
    obj = np.sum((y - X @ v) ** 2) + lam * np.abs(v).sum() + lam_g * sum(
        np.linalg.norm(v[offs[j]:offs[j + 1]]) for j in range(len(sizes)))
    return obj, v


def fmt(a):
    return "{" + ", ".join(f"{x:.17g}" for x in np.ravel(a)) + "}"


print("// Generated by tests/oracles/sgl_oracle.py; do not edit.")
print("// Row-major X. objective is the cvxpy optimum evaluated at its solution.")
for k in range(50):
    sizes, X, y, lam, lam_g = draw()
    obj, v = solve(sizes, X, y, lam, lam_g)
    n, p = X.shape
    print(f"{{{n}, {p}, {fmt(sizes)}, {fmt(X)}, {fmt(y)}, {lam:.17g}, {lam_g:.17g}, {obj:.17g}}},")
