"""Compressed data separation: stacked operators, split-analysis solving,
and the coherence/isometry conditions that guarantee joint recovery.

A signal observed as y = A(f_1 + ... + f_iota) is split into components
that are analysis-sparse in their own tight dictionaries by minimizing the
summed l_q analysis objective under the shared measurement constraint.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionsError, InvalidParametersError
from .frames import Frame
from .rip import _bound_from_t, _ceil_exact, _check_q
from .solvers import LqProblem, SolverConfig, irls_analysis

__all__ = [
    "SeparationProblem",
    "SeparationVerdict",
    "build_stacked",
    "solve_split_analysis",
    "check_separation_conditions",
    "separation_measurement_bound",
]

_TIGHT_TOL = 1e-8


def _require_unit_tight(frames) -> int:
    """Validate shared ambient dimension and unit tight frame bounds."""
    if not frames:
        raise InvalidParametersError("need at least one dictionary")
    n = frames[0].ambient_dim
    for i, fr in enumerate(frames):
        if fr.ambient_dim != n:
            raise InvalidDimensionsError("dictionaries must share the ambient dimension")
        if abs(fr.lower_bound - 1.0) > _TIGHT_TOL or abs(fr.upper_bound - 1.0) > _TIGHT_TOL:
            raise InvalidParametersError(
                f"dictionary {i} is not tight with bound 1 "
                f"(bounds {fr.lower_bound:.6g}, {fr.upper_bound:.6g})"
            )
    return n


@dataclass(frozen=True)
class SeparationProblem:
    """A joint-recovery instance over unit tight dictionaries.

    ``overshoot`` is the comparison order a used by the condition checks;
    it must exceed the total sparsity when given.
    """

    dicts: list
    A: np.ndarray
    y: np.ndarray
    q: float
    sparsities: tuple | None = None
    overshoot: int | None = None
    epsilon: float = 0.0
    norm_index: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float).ravel())
        n = _require_unit_tight(self.dicts)
        if self.A.shape[1] != n:
            raise InvalidDimensionsError(
                f"A has {self.A.shape[1]} columns but dictionaries live in dimension {n}"
            )
        if self.sparsities is not None:
            object.__setattr__(self, "sparsities", tuple(int(s) for s in self.sparsities))
            if len(self.sparsities) != len(self.dicts):
                raise InvalidDimensionsError("one sparsity per dictionary required")
            if self.overshoot is not None and self.overshoot <= sum(self.sparsities):
                raise InvalidParametersError("overshoot order must exceed the total sparsity")


def build_stacked(dicts, A=None):
    """Stack dictionaries for joint solving.

    Returns ``(dbar, psi, a_stacked)``: the horizontal concatenation
    [D_1 | ... | D_iota] (n x sum d_k), the block diagonal of the D_k
    (iota*n x sum d_k), and [A | ... | A] (m x iota*n) so that
    a_stacked @ stack(f_k) = A @ sum(f_k).  ``a_stacked`` is None when A is.
    """
    mats = [fr.matrix if isinstance(fr, Frame) else np.asarray(fr, dtype=float) for fr in dicts]
    if not mats:
        raise InvalidParametersError("need at least one dictionary")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != n:
            raise InvalidDimensionsError("dictionaries must share the ambient dimension")
    iota = len(mats)
    total_d = sum(m.shape[1] for m in mats)
    dbar = np.concatenate(mats, axis=1)
    psi = np.zeros((iota * n, total_d))
    col = 0
    for k, mat in enumerate(mats):
        dk = mat.shape[1]
        psi[k * n : (k + 1) * n, col : col + dk] = mat
        col += dk
    a_stacked = None
    if A is not None:
        A = np.asarray(A, dtype=float)
        if A.shape[1] != n:
            raise InvalidDimensionsError(f"A has {A.shape[1]} columns, expected {n}")
        a_stacked = np.tile(A, (1, iota))
    return dbar, psi, a_stacked


def solve_split_analysis(problem: SeparationProblem, config: SolverConfig | None = None):
    """Solve the split-analysis problem; returns (components, SolverResult).

    Delegates to the IRLS analysis solver on the stacked system: the block
    diagonal of the dictionaries is itself a unit tight frame for the
    stacked signal space, and the stacked measurement applies A to the sum
    of the components.  With a single dictionary this reduces exactly to
    the plain solver.
    """
    n = problem.dicts[0].ambient_dim
    iota = len(problem.dicts)
    _, psi, a_stacked = build_stacked(problem.dicts, problem.A)
    psi_frame = Frame(matrix=psi, lower_bound=1.0, upper_bound=1.0)
    stacked = LqProblem(
        A=a_stacked,
        y=problem.y,
        D=psi_frame,
        q=problem.q,
        epsilon=problem.epsilon,
        norm_index=problem.norm_index,
    )
    result = irls_analysis(stacked, config)
    components = [result.f_hat[k * n : (k + 1) * n] for k in range(iota)]
    return components, result


@dataclass(frozen=True)
class SeparationVerdict:
    """Condition diagnostics for joint recovery.

    ``theta_tilde`` is the split null-space constant; it is None when the
    cluster coherence U >= 1, where the formula is not applicable.
    ``thm3_lhs``/``thm3_holds`` evaluate the two-dictionary coherence-only
    condition; ``thm4_condition_holds`` is the joint isometry + coherence
    condition for general component counts.
    """

    mu1: float
    U: float
    Delta: float
    rho: float
    theta_tilde: float | None
    thm3_lhs: float
    thm3_holds: bool
    thm4_condition_holds: bool

    def to_dict(self) -> dict:
        return {
            "mu1": self.mu1,
            "U": self.U,
            "theta_tilde": self.theta_tilde,
            "thm3_holds": self.thm3_holds,
            "thm4_holds": self.thm4_condition_holds,
        }


def _pow_inf(base: float, expo: float) -> float:
    try:
        return base**expo
    except OverflowError:
        return math.inf


def split_nsp_constant(rho: float, delta_ratio: float, U: float, q: float, iota: int) -> float:
    """Split null-space constant theta_tilde from (rho, Delta, U, q, iota).

    Requires U < 1.  Returns inf when the isometry amplification overflows.
    """
    _check_q(q)
    if U >= 1.0:
        raise InvalidParametersError("cluster coherence U must be < 1")
    lam = _pow_inf(delta_ratio, 2.0 / q)
    if math.isinf(lam):
        return math.inf
    disc = math.sqrt(_pow_inf(U - iota * lam, 2.0) + 4.0 * iota * lam)
    bracket = (U + iota * lam + disc) / (2.0 * (1.0 - U))
    return _pow_inf(bracket, q / 2.0) * rho ** (1.0 - q / 2.0)


def split_nsp_condition(rho: float, delta_ratio: float, U: float, q: float, iota: int) -> bool:
    """The isometry/coherence inequality equivalent to theta_tilde < 1."""
    _check_q(q)
    lam = _pow_inf(delta_ratio, 2.0 / q)
    if math.isinf(lam):
        return False
    r = rho ** (2.0 / q - 1.0)
    return iota * lam * (r + 1.0) * r + U * (1.0 + r) < 1.0


def check_separation_conditions(
    mu1: float,
    sparsities,
    a: int,
    delta_a: float,
    delta_sa: float,
    q: float,
    n_components: int | None = None,
) -> SeparationVerdict:
    """Evaluate the separation recovery conditions verbatim.

    ``sparsities`` are the per-component budgets s_1..s_iota; ``a`` is the
    overshoot order (a > sum s_k); the deltas are q-RIP constants of the
    concatenated dictionary at orders a and s + a.  The two-dictionary
    coherence condition (thm3) is evaluated with the total sparsity.
    """
    _check_q(q)
    sparsities = [int(s) for s in sparsities]
    if any(s <= 0 for s in sparsities):
        raise InvalidParametersError("sparsities must be positive")
    s = sum(sparsities)
    iota = n_components if n_components is not None else len(sparsities)
    if iota < 1:
        raise InvalidParametersError("need at least one component")
    if a <= s:
        raise InvalidParametersError(f"need a > total sparsity, got a={a}, s={s}")
    if mu1 < 0.0 or delta_a < 0.0 or not 0.0 <= delta_sa < 1.0:
        raise InvalidParametersError("mu1 and the RIP constants must be admissible")

    rho = s / a
    delta_ratio = (1.0 + delta_a) / (1.0 - delta_sa)
    U = mu1 * (s + a) / 2.0

    t3 = _ceil_exact((2.0 ** (1.5 * q) * 5.0) ** (2.0 / (2.0 - q)))
    small = math.exp(-(math.log(8.0) + (2.0 / q) * math.log(5.0)))
    thm3_lhs = mu1 * s * (t3 + 1.0) * (small + 1.0)
    thm3_holds = thm3_lhs < 1.0

    r = rho ** (2.0 / q - 1.0)
    mipc = mu1 * (s + a) * (r + 1.0) < 1.0
    cd = delta_ratio * rho ** (1.0 - q / 2.0) * (r + 1.0) ** (q / 2.0) < (2.0 * iota) ** (-q / 2.0)
    thm4 = mipc and cd

    theta_tilde = split_nsp_constant(rho, delta_ratio, U, q, iota) if U < 1.0 else None

    return SeparationVerdict(
        mu1=mu1,
        U=U,
        Delta=delta_ratio,
        rho=rho,
        theta_tilde=theta_tilde,
        thm3_lhs=thm3_lhs,
        thm3_holds=thm3_holds,
        thm4_condition_holds=thm4,
    )


def separation_measurement_bound(q: float, s: int, d_total: int) -> float:
    """Gaussian measurement count sufficient for the separation condition.

    Same structure as the single-dictionary bound with the overshoot order
    t = ceil((5 * 2^(3q/2))^(2/(2-q))); the dictionary condition number
    does not appear because the blocks are unit tight.
    """
    _check_q(q)
    if not 1 <= s <= d_total:
        raise InvalidParametersError(f"need 1 <= s <= d_total, got s={s}, d_total={d_total}")
    t = _ceil_exact((5.0 * 2.0 ** (1.5 * q)) ** (2.0 / (2.0 - q)))
    return _bound_from_t(q, s, d_total, t)
