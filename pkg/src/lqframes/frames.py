"""Frame-theoretic linear algebra: bounds, duals, coherence, sparsity utilities.

All operations are pure functions of their inputs plus explicit seeds, so
they are safe to call concurrently.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import lq_powsum
from .errors import (
    GenerationFailedError,
    IllConditionedError,
    InvalidDimensionsError,
    NotAFrameError,
)

__all__ = [
    "Frame",
    "SparseApproximation",
    "frame_bounds",
    "canonical_dual",
    "random_tight_frame",
    "mutual_coherence",
    "hard_threshold",
    "cosparse_signal",
    "load_matrix",
    "save_matrix",
]

# Gram matrices with eigenvalue spread above this are refused by canonical_dual.
DEFAULT_CONDITION_CAP = 1e12

_RANK_RTOL = 1e-12


def frame_bounds(matrix: np.ndarray) -> tuple[float, float]:
    """Exact frame bounds of the columns of an n-by-d matrix.

    The bounds are the extreme eigenvalues of ``D @ D.T`` (an n-by-n
    symmetric eigenproblem, never the larger d-by-d Gram matrix).

    Raises
    ------
    NotAFrameError
        If the rows fail to span R^n (rank-deficient matrix).
    InvalidDimensionsError
        If the matrix has more rows than columns.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise InvalidDimensionsError("expected a 2-D matrix")
    n, d = matrix.shape
    if n > d:
        raise InvalidDimensionsError(f"frame needs at least as many atoms as dimensions, got {n}x{d}")
    evals = np.linalg.eigvalsh(matrix @ matrix.T)
    lo, hi = float(evals[0]), float(evals[-1])
    if hi <= 0.0 or lo <= hi * _RANK_RTOL:
        raise NotAFrameError("matrix rows do not span the ambient space")
    return lo, hi


@dataclass(frozen=True)
class Frame:
    """A dictionary whose columns form a frame, with cached bounds.

    Attributes
    ----------
    matrix : (n, d) ndarray
        Columns are the frame atoms.
    lower_bound, upper_bound : float
        Tight two-sided energy bounds: lower * |f|^2 <= |D.T f|^2 <= upper * |f|^2.
    """

    matrix: np.ndarray
    lower_bound: float
    upper_bound: float

    @classmethod
    def from_matrix(cls, matrix) -> "Frame":
        """Validate a matrix and compute its bounds."""
        matrix = np.asarray(matrix, dtype=float)
        lo, hi = frame_bounds(matrix)
        return cls(matrix=matrix, lower_bound=lo, upper_bound=hi)

    @property
    def condition(self) -> float:
        """Ratio of upper to lower frame bound (>= 1)."""
        return self.upper_bound / self.lower_bound

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_atoms(self) -> int:
        return self.matrix.shape[1]

    def analysis(self, f: np.ndarray) -> np.ndarray:
        """Analysis coefficients D.T f."""
        return self.matrix.T @ f

    def is_tight(self, tol: float = 1e-8) -> bool:
        """True when the bounds coincide within tol (relative)."""
        return abs(self.upper_bound - self.lower_bound) <= tol * self.upper_bound


def canonical_dual(frame: Frame, condition_cap: float = DEFAULT_CONDITION_CAP) -> Frame:
    """Canonical dual of a frame: (D D.T)^{-1} D, with bounds (1/upper, 1/lower).

    Raises IllConditionedError when the Gram matrix eigenvalue spread
    exceeds ``condition_cap``.
    """
    if frame.upper_bound / frame.lower_bound > condition_cap:
        raise IllConditionedError(
            f"Gram condition {frame.upper_bound / frame.lower_bound:.3e} exceeds cap {condition_cap:.3e}"
        )
    gram = frame.matrix @ frame.matrix.T
    dual = np.linalg.solve(gram, frame.matrix)
    return Frame(matrix=dual, lower_bound=1.0 / frame.upper_bound, upper_bound=1.0 / frame.lower_bound)


def random_tight_frame(n: int, d: int, seed) -> Frame:
    """Random tight frame with bound 1 (D D.T = I), deterministic per seed.

    Draws an n-by-d standard Gaussian matrix and orthonormalizes its rows.
    """
    if n > d:
        raise InvalidDimensionsError(f"tight frame requires n <= d, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, n))
    q, r = np.linalg.qr(g)
    # Fix column signs so the construction is a deterministic function of g.
    q = q * np.sign(np.diag(r))
    return Frame(matrix=q.T, lower_bound=1.0, upper_bound=1.0)


def _atoms(obj) -> np.ndarray:
    return obj.matrix if isinstance(obj, Frame) else np.asarray(obj, dtype=float)


def mutual_coherence(dicts) -> float:
    """Largest |<d_ki, d_lj>| over atoms of *distinct* dictionaries.

    Accepts two or more frames (or raw matrices) sharing an ambient dimension.
    """
    mats = [_atoms(item) for item in dicts]
    if len(mats) < 2:
        raise InvalidDimensionsError("mutual coherence needs at least two dictionaries")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != n:
            raise InvalidDimensionsError("dictionaries must share the ambient dimension")
    best = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            best = max(best, float(np.max(np.abs(mats[i].T @ mats[j]))))
    return best


@dataclass(frozen=True)
class SparseApproximation:
    """Best s-term approximation of a coefficient vector.

    ``support`` holds the kept indices in ascending order, ``values`` the
    corresponding entries, and ``residual_q_norm`` the l_q quasinorm of the
    discarded entries.
    """

    support: np.ndarray
    values: np.ndarray
    residual_q_norm: float

    def dense(self, d: int) -> np.ndarray:
        """The thresholded vector as a length-d array."""
        out = np.zeros(d)
        out[self.support] = self.values
        return out


def hard_threshold(x: np.ndarray, s: int, q: float = 1.0) -> SparseApproximation:
    """Keep the s largest-magnitude entries of x; ties keep the lowest index.

    The residual is measured in the l_q quasinorm for the requested q.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    if not 0 <= s <= d:
        raise InvalidDimensionsError(f"sparsity {s} outside [0, {d}]")
    order = np.argsort(-np.abs(x), kind="stable")
    support = np.sort(order[:s])
    dropped = x[order[s:]]
    residual = lq_powsum(dropped, q) ** (1.0 / q) if dropped.size else 0.0
    return SparseApproximation(support=support, values=x[support], residual_q_norm=residual)


def cosparse_signal(frame: Frame, s: int, seed, max_retries: int = 50):
    """Unit-norm signal whose analysis coefficients are exactly s-sparse.

    Draws a random cosupport of size d - s, projects a Gaussian vector onto
    the null space of the corresponding analysis rows, and normalizes.
    Returns ``(f, coeffs)`` with ``coeffs = D.T f``.  Retries with a fresh
    cosupport when the null space is trivial and raises
    GenerationFailedError once the retry budget is exhausted.
    """
    d = frame.num_atoms
    n = frame.ambient_dim
    if not 0 < s <= n:
        raise InvalidDimensionsError(f"sparsity {s} outside (0, n={n}]")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        cosupport = rng.choice(d, size=d - s, replace=False)
        b = frame.matrix[:, cosupport].T  # analysis rows to annihilate
        if b.shape[0] == 0:
            null_basis = np.eye(n)
        else:
            _, svals, vt = np.linalg.svd(b, full_matrices=True)
            rank = int(np.sum(svals > svals[0] * 1e-10)) if svals.size else 0
            if rank >= n:
                continue
            null_basis = vt[rank:]
        g = rng.standard_normal(n)
        f = null_basis.T @ (null_basis @ g)
        norm = np.linalg.norm(f)
        if norm <= 1e-12:
            continue
        f /= norm
        return f, frame.matrix.T @ f
    raise GenerationFailedError(
        f"no cosupport of size {d - s} with nontrivial null space after {max_retries} tries"
    )


def load_matrix(path) -> np.ndarray:
    """Read a dense matrix from headerless CSV; rejects ragged rows."""
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise InvalidDimensionsError(f"{path}:{lineno}: non-numeric entry") from exc
            if rows and len(row) != len(rows[0]):
                raise InvalidDimensionsError(
                    f"{path}:{lineno}: ragged row of length {len(row)}, expected {len(rows[0])}"
                )
            rows.append(row)
    if not rows:
        raise InvalidDimensionsError(f"{path}: empty matrix file")
    return np.asarray(rows, dtype=float)


def save_matrix(path, matrix) -> None:
    """Write a dense matrix as headerless CSV with full float precision."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", encoding="ascii") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
