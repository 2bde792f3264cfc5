"""Independent oracles shared by the unit and acceptance tests.

Everything here checks results by a different route than the library code:
the Pearson definition evaluated term by term, a characteristic-polynomial
root finder for 4x4 spectra, and a brute-force pairwise correlation scan.
"""

import numpy as np


def pearson_oracle(x, y):
    """Direct evaluation of the sample Pearson correlation definition."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = sum((a - mx) ** 2 for a in x) ** 0.5
    dy = sum((b - my) ** 2 for b in y) ** 0.5
    return num / (dx * dy)


def _det3(a):
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def _det4(m):
    total = 0.0
    for col in range(4):
        minor = [[m[r][c] for c in range(4) if c != col] for r in range(1, 4)]
        sign = 1.0 if col % 2 == 0 else -1.0
        total += sign * m[0][col] * _det3(minor)
    return total


def charpoly_bisection_eigenvalues(c):
    """Roots of det(C - x I) for a symmetric 4x4 C, by grid scan + bisection.

    The grid is refined until four sign changes are bracketed; eigenvalues of
    sample correlation matrices are simple almost surely, so this terminates.
    """
    c = [[float(c[i][j]) for j in range(4)] for i in range(4)]

    def p(x):
        shifted = [[c[i][j] - (x if i == j else 0.0) for j in range(4)] for i in range(4)]
        return _det4(shifted)

    lo, hi = -0.5, 4.5  # PSD with trace 4 keeps the spectrum inside [0, 4]
    n_grid = 4096
    brackets = []
    for _ in range(8):
        xs = [lo + (hi - lo) * k / n_grid for k in range(n_grid + 1)]
        vals = [p(x) for x in xs]
        brackets = [
            (xs[k], xs[k + 1])
            for k in range(n_grid)
            if vals[k] == 0.0 or (vals[k] > 0) != (vals[k + 1] > 0)
        ]
        if len(brackets) == 4:
            break
        n_grid *= 4
    assert len(brackets) == 4, f"found {len(brackets)} brackets, need 4 simple roots"
    roots = []
    for a, b in brackets:
        fa = p(a)
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = p(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fa > 0) != (fm > 0):
                b = mid
            else:
                a, fa = mid, fm
            if b - a < 1e-14:
                break
        roots.append(0.5 * (a + b))
    return sorted(roots, reverse=True)


def brute_force_high_pairs(rp, floor=0.95):
    """All ticker pairs with |sample correlation| >= floor, from the
    definition; no eigendecomposition involved."""
    z = rp.returns - rp.returns.mean(axis=1, keepdims=True)
    out = set()
    for i in range(rp.n_assets):
        for j in range(i + 1, rp.n_assets):
            r = (z[i] @ z[j]) / np.sqrt((z[i] @ z[i]) * (z[j] @ z[j]))
            if abs(r) >= floor:
                out.add((rp.tickers[i], rp.tickers[j]))
    return out


def pairwise_corr(rp, i, j):
    z = rp.returns - rp.returns.mean(axis=1, keepdims=True)
    return float((z[i] @ z[j]) / np.sqrt((z[i] @ z[i]) * (z[j] @ z[j])))
