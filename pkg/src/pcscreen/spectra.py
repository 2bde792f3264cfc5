"""Correlation matrix and its symmetric eigendecomposition.

The eigensolver is a cyclic Jacobi sweep written here rather than delegated
to LAPACK: rotation order is a pure function of the matrix, so results are
bitwise reproducible on a platform and independent of BLAS threading. For
p in the hundreds the O(p^3) sweeps are far from being a bottleneck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateSeriesError, InsufficientHistoryError
from .returns import ReturnPanel

# Jacobi termination: off-diagonal Frobenius norm <= OFF_TOL * p, or give up
# after MAX_SWEEPS (non-convergence is a defect signal, not a real outcome).
OFF_TOL = 1e-12
MAX_SWEEPS = 64


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric p x p Pearson correlation with unit diagonal.

    Entries are clamped to [-1, 1] after computation to absorb last-ulp
    drift; symmetry is exact because each pair is computed once.
    """

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        p = len(self.tickers)
        if v.shape != (p, p):
            raise ValueError(f"expected ({p}, {p}) grid, got {v.shape}")
        if np.any(v != v.T):
            raise ValueError("correlation matrix must be exactly symmetric")
        if np.any(np.diag(v) != 1.0):
            raise ValueError("correlation matrix must have unit diagonal")
        if np.any(np.abs(v) > 1.0):
            raise ValueError("correlation entries must lie in [-1, 1]")

    @property
    def p(self) -> int:
        return len(self.tickers)


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectrum of a correlation matrix.

    eigenvalues are sorted descending; loadings[:, k] is the unit eigenvector
    of eigenvalues[k], with the sign convention that its largest-magnitude
    entry is positive (ties broken by lowest index). Component ranks are
    1-based from the top, so rank p is the least-variance component.
    """

    tickers: tuple[str, ...]
    eigenvalues: np.ndarray  # shape (p,), descending
    loadings: np.ndarray     # shape (p, p), columns are components

    @property
    def p(self) -> int:
        return len(self.tickers)

    def component(self, rank: int) -> np.ndarray:
        """Loading vector of the component with 1-based rank (1 = largest)."""
        if not 1 <= rank <= self.p:
            raise IndexError(f"rank {rank} out of range 1..{self.p}")
        return self.loadings[:, rank - 1]

    def eigenvalue(self, rank: int) -> float:
        if not 1 <= rank <= self.p:
            raise IndexError(f"rank {rank} out of range 1..{self.p}")
        return float(self.eigenvalues[rank - 1])


def correlation(rp: ReturnPanel) -> CorrelationMatrix:
    """Sample Pearson correlation of the return panel over the full sample.

    Each off-diagonal pair is computed once (upper triangle, then mirrored),
    which keeps the matrix exactly symmetric and the result independent of
    BLAS threading.

    Raises:
        DegenerateSeriesError: some ticker's returns have zero variance.
        InsufficientHistoryError: fewer than 2 return observations.
    """
    if rp.n_obs < 2:
        raise InsufficientHistoryError("correlation needs at least 2 return observations")
    z = np.ascontiguousarray(rp.returns - rp.returns.mean(axis=1, keepdims=True))
    p = rp.n_assets
    # Self and cross products come from the same dot kernel so that
    # bit-identical (or negated) series give exactly +1 (or -1).
    sumsq = np.empty(p)
    for i in range(p):
        sumsq[i] = np.dot(z[i], z[i])
        if sumsq[i] == 0.0:
            raise DegenerateSeriesError(rp.tickers[i])
    c = np.eye(p)
    for i in range(p - 1):
        zi = z[i]
        for j in range(i + 1, p):
            r = float(np.dot(zi, z[j])) / math.sqrt(sumsq[i] * sumsq[j])
            if r > 1.0:
                r = 1.0
            elif r < -1.0:
                r = -1.0
            c[i, j] = r
            c[j, i] = r
    return CorrelationMatrix(tickers=rp.tickers, values=c)


def correlation_from_matrix(returns: np.ndarray, tickers: tuple[str, ...]) -> CorrelationMatrix:
    """correlation() for a bare (p, n_obs) array; used by rolling windows."""
    rp = _BareReturns(returns, tickers)
    return correlation(rp)


class _BareReturns:
    """Duck-typed stand-in for ReturnPanel carrying only what correlation() reads."""

    def __init__(self, returns: np.ndarray, tickers: tuple[str, ...]):
        self.returns = returns
        self.tickers = tickers
        self.n_assets = returns.shape[0]
        self.n_obs = returns.shape[1]


def _off_norm(a: np.ndarray) -> float:
    upper = np.triu(a, 1)
    return math.sqrt(2.0 * float(np.sum(upper * upper)))


def _jacobi(matrix: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (diagonal eigenvalues in solver order, eigenvector columns).
    Sweeps every (i, j) pair in a fixed cyclic order, rotating whenever the
    off-diagonal entry is nonzero, until the Frobenius norm of the
    off-diagonal part drops below OFF_TOL * p.
    """
    a = np.array(matrix, dtype=np.float64)
    p = a.shape[0]
    v = np.eye(p)
    threshold = OFF_TOL * p
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            return np.diag(a).copy(), v
        for i in range(p - 1):
            for j in range(i + 1, p):
                apq = a[i, j]
                if apq == 0.0:
                    continue
                diff = a[j, j] - a[i, i]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff  # rotation angle ~ 0; avoids overflow in tau**2
                else:
                    tau = diff / (2.0 * apq)
                    t = 1.0 / (abs(tau) + math.sqrt(tau * tau + 1.0))
                    if tau < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_i = a[i, :].copy()
                row_j = a[j, :].copy()
                a[i, :] = c * row_i - s * row_j
                a[j, :] = s * row_i + c * row_j
                col_i = a[:, i].copy()
                col_j = a[:, j].copy()
                a[:, i] = c * col_i - s * col_j
                a[:, j] = s * col_i + c * col_j
                a[i, j] = 0.0
                a[j, i] = 0.0
                v_i = v[:, i].copy()
                v_j = v[:, j].copy()
                v[:, i] = c * v_i - s * v_j
                v[:, j] = s * v_i + c * v_j
    residual = _off_norm(a)
    if residual <= threshold:
        return np.diag(a).copy(), v
    raise ConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {residual:.3e}, threshold {threshold:.3e})"
    )


def eigendecompose(cm: CorrelationMatrix) -> EigenDecomposition:
    """Full eigendecomposition with deterministic ordering and signs.

    Eigenpairs are sorted by eigenvalue descending with a stable sort, so
    equal eigenvalues keep the Jacobi output order; each eigenvector is then
    flipped, if needed, so its largest-magnitude entry is positive.
    """
    lam, vec = _jacobi(cm.values)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    vec = vec[:, order]
    for k in range(vec.shape[1]):
        col = vec[:, k]
        if col[int(np.argmax(np.abs(col)))] < 0.0:
            vec[:, k] = -col
    return EigenDecomposition(tickers=cm.tickers, eigenvalues=lam, loadings=vec)


def write_correlation_csv(cm: CorrelationMatrix) -> str:
    """p x p dump with a ticker header row/column."""
    lines = ["ticker," + ",".join(cm.tickers)]
    for i, ticker in enumerate(cm.tickers):
        lines.append(ticker + "," + ",".join(repr(float(x)) for x in cm.values[i]))
    return "\n".join(lines) + "\n"


def write_eigenvalues_csv(ed: EigenDecomposition) -> str:
    """``rank,eigenvalue`` for all p components, rank 1 first."""
    lines = ["rank,eigenvalue"]
    for k, lam in enumerate(ed.eigenvalues, start=1):
        lines.append(f"{k},{float(lam)!r}")
    return "\n".join(lines) + "\n"
