"""Block-diagonal linear matrix inequality SDPs and an interior-point solver.

The model is the moment-side problem

    minimize   c0 + sum_k c_k y_k
    subject to B_i(y) = C_i + sum_k y_k A_ik  is positive semidefinite,

with one scalar variable per exponent label (the label (0,...,0) is pinned
to one and folded into the constant parts C_i). Its Lagrangian dual asks for
positive semidefinite Gram blocks W_i with <A_ik, W_i> summing to c_k, which
for moment-structured blocks is exactly the coefficient identity of a sum of
squares certificate.

The solver is a primal-dual path-following method with Nesterov-Todd scaling
and a Mehrotra predictor-corrector step, one dense Cholesky per block per
iteration, and a dense Schur complement over the y variables. It is fully
deterministic: no randomness, fixed operation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg as sla

from .poly import Exponent

__all__ = [
    "SolverStatus",
    "SolverConfig",
    "LmiBlock",
    "LmiSdp",
    "SdpSolution",
    "ResidualReport",
    "solve",
    "residuals",
    "export_sdpa",
]


class SolverStatus(enum.Enum):
    OPTIMAL = "Optimal"
    DUAL_UNBOUNDED = "DualUnbounded"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    ITERATION_LIMIT = "IterLimit"
    NUMERICAL_TROUBLE = "NumericalTrouble"


@dataclass(frozen=True)
class SolverConfig:
    """Interior-point tolerances and limits."""

    tol_gap: float = 1e-8
    tol_feas: float = 1e-8
    max_iters: int = 100
    unbounded_threshold: float = -1e10
    rank_tol: float = 1e-6
    step_fraction: float = 0.98

    def as_dict(self) -> dict:
        return {
            "tol_gap": self.tol_gap,
            "tol_feas": self.tol_feas,
            "max_iters": self.max_iters,
            "unbounded_threshold": self.unbounded_threshold,
            "rank_tol": self.rank_tol,
            "step_fraction": self.step_fraction,
        }


class LmiBlock:
    """One symmetric block of the LMI, stored as constant part plus sparse
    per-variable coefficient entries (both triangle orientations materialized).
    """

    def __init__(
        self,
        size: int,
        const: np.ndarray,
        var_ids: np.ndarray,
        rows: np.ndarray,
        cols: np.ndarray,
        vals: np.ndarray,
        labels: tuple[Exponent, ...] | None = None,
    ):
        self.size = int(size)
        self.const = np.asarray(const, dtype=float)
        if self.const.shape != (size, size):
            raise ValueError("constant part has wrong shape")
        if not np.allclose(self.const, self.const.T, atol=0.0):
            raise ValueError("constant part must be symmetric")
        order = np.lexsort((cols, rows, var_ids))
        self.var_ids = np.asarray(var_ids, dtype=np.int64)[order]
        self.rows = np.asarray(rows, dtype=np.int64)[order]
        self.cols = np.asarray(cols, dtype=np.int64)[order]
        self.vals = np.asarray(vals, dtype=float)[order]
        self.labels = labels
        # Per-variable slices into the sorted entry arrays.
        self.local_vars, starts = np.unique(self.var_ids, return_index=True)
        self.slices = np.append(starts, len(self.var_ids))

    @staticmethod
    def from_entries(
        size: int,
        const_upper: Iterable[tuple[int, int, float]],
        coeff_upper: Iterable[tuple[int, int, int, float]],
        labels: tuple[Exponent, ...] | None = None,
    ) -> "LmiBlock":
        """Build from upper-triangle entries (var, r, c, val); mirrors r != c."""
        const = np.zeros((size, size))
        for r, c, v in const_upper:
            const[r, c] = v
            const[c, r] = v
        var_ids, rows, cols, vals = [], [], [], []
        for var, r, c, v in coeff_upper:
            var_ids.append(var), rows.append(r), cols.append(c), vals.append(v)
            if r != c:
                var_ids.append(var), rows.append(c), cols.append(r), vals.append(v)
        return LmiBlock(
            size,
            const,
            np.array(var_ids, dtype=np.int64),
            np.array(rows, dtype=np.int64),
            np.array(cols, dtype=np.int64),
            np.array(vals),
            labels,
        )

    def materialize(self, y: np.ndarray) -> np.ndarray:
        out = self.const.copy()
        np.add.at(out, (self.rows, self.cols), self.vals * y[self.var_ids])
        return out

    def inner_products(self, z: np.ndarray, num_vars: int) -> np.ndarray:
        """Vector of <A_k, Z> for all variables (zero where absent)."""
        if len(self.var_ids) == 0:
            return np.zeros(num_vars)
        return np.bincount(
            self.var_ids,
            weights=z[self.rows, self.cols] * self.vals,
            minlength=num_vars,
        )


class LmiSdp:
    """A block LMI problem over exponent-labeled scalar variables.

    ``exponents`` lists all labels with the zero exponent first (pinned to 1,
    not a free variable); ``objective`` aligns with it. Every non-pinned
    variable must appear in at least one block.
    """

    def __init__(
        self,
        exponents: Sequence[Exponent],
        objective: Sequence[float],
        blocks: Sequence[LmiBlock],
    ):
        if len(exponents) != len(objective):
            raise ValueError("objective length must match exponent list")
        if not exponents or exponents[0] != Exponent.zero():
            raise ValueError("exponent list must start with the zero exponent")
        if len(set(exponents)) != len(exponents):
            raise ValueError("duplicate exponent labels")
        self.exponents: tuple[Exponent, ...] = tuple(exponents)
        self.objective = np.asarray(objective, dtype=float)
        self.blocks: tuple[LmiBlock, ...] = tuple(blocks)
        if not self.blocks:
            raise ValueError("need at least one block")
        self.num_vars = len(exponents) - 1
        covered = np.zeros(self.num_vars, dtype=bool)
        for b in self.blocks:
            if len(b.local_vars):
                if b.local_vars.min() < 0 or b.local_vars.max() >= self.num_vars:
                    raise ValueError("block references unknown variable id")
                covered[b.local_vars] = True
        missing = np.nonzero(~covered)[0]
        if len(missing):
            raise ValueError(
                "free variables (appear in no block): "
                + ", ".join(repr(self.exponents[k + 1]) for k in missing[:5])
            )

    @property
    def var_exponents(self) -> tuple[Exponent, ...]:
        return self.exponents[1:]

    @property
    def block_sizes(self) -> list[int]:
        return [b.size for b in self.blocks]

    def objective_norm(self) -> float:
        return float(np.max(np.abs(self.objective))) if len(self.objective) else 0.0

    def gaussian_start(self) -> np.ndarray:
        """Moment vector of the standard Gaussian weight, restricted to labels.

        Strictly interior for every moment-structured block, which makes the
        LMI side of the solve exactly feasible from the first iterate.
        """
        return np.array(
            [_gaussian_moment(e) for e in self.exponents[1:]], dtype=float
        )


def _gaussian_moment(e: Exponent) -> float:
    out = 1.0
    for _, p in e.items:
        if p % 2 == 1:
            return 0.0
        half = p // 2
        val = 1.0
        for j in range(1, half + 1):
            val *= (2 * j - 1) / 2.0
        out *= val
    return out


@dataclass
class SdpSolution:
    status: SolverStatus
    objective: float
    gram_objective: float
    y: dict[Exponent, float]
    gram: list[np.ndarray]
    iterations: int
    primal_residual: float
    dual_residual: float
    relative_gap: float
    gap_history: list[float] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status is SolverStatus.OPTIMAL

    def metrics(self) -> dict:
        return {
            "iterations": self.iterations,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "relative_gap": self.relative_gap,
        }


def _chol(mat: np.ndarray) -> np.ndarray:
    return sla.cholesky(mat, lower=True, check_finite=False)


def _nt_scaling(x: np.ndarray, s: np.ndarray):
    """Nesterov-Todd scaling point for the pair (x, s).

    Returns (r, r_inv, lam) with w = r r^T satisfying w s w = x and
    lam = r^T s r = r^{-1} x r^{-T} diagonal (as a vector).
    """
    l_x = _chol(x)
    l_s = _chol(s)
    u, sv, vt = sla.svd(l_s.T @ l_x, check_finite=False)
    if sv.min() <= 0:
        raise np.linalg.LinAlgError("singular NT scaling")
    inv_sqrt = 1.0 / np.sqrt(sv)
    r = l_x @ vt.T * inv_sqrt
    r_inv = (u * inv_sqrt).T @ l_s.T
    return r, r_inv, sv


def _max_step(mat: np.ndarray, direction: np.ndarray, chol_factor: np.ndarray) -> float:
    """Largest t with mat + t*direction still PSD (mat PD, factor given)."""
    half = sla.solve_triangular(
        chol_factor, direction, lower=True, check_finite=False
    )
    inner = sla.solve_triangular(
        chol_factor, half.T, lower=True, check_finite=False
    )
    w = sla.eigvalsh((inner + inner.T) / 2.0, check_finite=False)
    lam_min = float(w[0])
    if lam_min >= -1e-300:
        return math.inf
    return -1.0 / lam_min


def solve(problem: LmiSdp, config: SolverConfig | None = None) -> SdpSolution:
    """Run the interior-point method on a block LMI problem."""
    cfg = config or SolverConfig()
    c = problem.objective[1:]
    c0 = float(problem.objective[0])
    num_vars = problem.num_vars
    blocks = problem.blocks
    total_dim = sum(b.size for b in blocks)
    norm_c = float(np.linalg.norm(c))
    norm_const = math.sqrt(sum(float(np.sum(b.const**2)) for b in blocks))

    def build_solution(status, y, x_blocks, iters, pres, dres, relgap, history):
        y_map = {Exponent.zero(): 1.0}
        for exp, val in zip(problem.var_exponents, y):
            y_map[exp] = float(val)
        pobj = c0 + float(c @ y)
        dobj = c0 - sum(float(np.sum(b.const * xb)) for b, xb in zip(blocks, x_blocks))
        return SdpSolution(
            status=status,
            objective=pobj,
            gram_objective=dobj,
            y=y_map,
            gram=[xb.copy() for xb in x_blocks],
            iterations=iters,
            primal_residual=pres,
            dual_residual=dres,
            relative_gap=relgap,
            gap_history=history,
        )

    if num_vars == 0:
        x_blocks = [np.zeros((b.size, b.size)) for b in blocks]
        feasible = all(
            sla.eigvalsh(b.const, check_finite=False)[0] >= -cfg.tol_feas
            for b in blocks
        )
        status = SolverStatus.OPTIMAL if feasible else SolverStatus.PRIMAL_INFEASIBLE
        return build_solution(status, np.zeros(0), x_blocks, 0, 0.0, 0.0, 0.0, [])

    y = problem.gaussian_start()
    s_blocks = []
    for b in blocks:
        sb = b.materialize(y)
        try:
            _chol(sb)
        except np.linalg.LinAlgError:
            sb = (1.0 + float(np.linalg.norm(b.const))) * np.eye(b.size)
        s_blocks.append(sb)
    x_scale = max(1.0, problem.objective_norm())
    x_blocks = [x_scale * np.eye(b.size) for b in blocks]
    y_ref = max(1.0, float(np.max(np.abs(y))) if len(y) else 1.0)

    history: list[float] = []
    iters = 0
    pres = dres = relgap = math.inf

    for iters in range(1, cfg.max_iters + 1):
        lmi_gap = [b.materialize(y) - sb for b, sb in zip(blocks, s_blocks)]
        r_dual = c.copy()
        for b, xb in zip(blocks, x_blocks):
            r_dual -= b.inner_products(xb, num_vars)
        pobj = c0 + float(c @ y)
        dobj = c0 - sum(
            float(np.sum(b.const * xb)) for b, xb in zip(blocks, x_blocks)
        )
        gap = sum(float(np.sum(xb * sb)) for xb, sb in zip(x_blocks, s_blocks))
        relgap = gap / (1.0 + abs(pobj) + abs(dobj))
        pres = math.sqrt(sum(float(np.sum(g**2)) for g in lmi_gap)) / (1.0 + norm_const)
        dres = float(np.linalg.norm(r_dual)) / (1.0 + norm_c)
        history.append(relgap)

        if relgap <= cfg.tol_gap and pres <= cfg.tol_feas and dres <= cfg.tol_feas:
            return build_solution(
                SolverStatus.OPTIMAL, y, x_blocks, iters, pres, dres, relgap, history
            )
        if pres <= cfg.tol_feas and (
            pobj < cfg.unbounded_threshold
            or (pobj < -1e6 and np.max(np.abs(y)) > 1e8 * y_ref)
        ):
            return build_solution(
                SolverStatus.DUAL_UNBOUNDED, y, x_blocks, iters, pres, dres, relgap, history
            )
        if dres <= cfg.tol_feas and dobj > -cfg.unbounded_threshold:
            return build_solution(
                SolverStatus.PRIMAL_INFEASIBLE, y, x_blocks, iters, pres, dres, relgap, history
            )

        try:
            scalings = [
                _nt_scaling(xb, sb) for xb, sb in zip(x_blocks, s_blocks)
            ]
            x_factors = [_chol(xb) for xb in x_blocks]
            s_factors = [_chol(sb) for sb in s_blocks]
        except np.linalg.LinAlgError:
            return build_solution(
                SolverStatus.NUMERICAL_TROUBLE, y, x_blocks, iters, pres, dres, relgap, history
            )

        w_blocks = [r @ r.T for r, _, _ in scalings]
        mu = gap / total_dim

        # Schur complement M[k,l] = sum_b <A_k, W A_l W>.
        schur = np.zeros((num_vars, num_vars))
        for b, w in zip(blocks, w_blocks):
            for vi, v in enumerate(b.local_vars):
                lo, hi = b.slices[vi], b.slices[vi + 1]
                rws, cls, vls = b.rows[lo:hi], b.cols[lo:hi], b.vals[lo:hi]
                wa = (w[:, rws] * vls) @ w[cls, :]
                schur[v] += b.inner_products(wa, num_vars)
        schur = (schur + schur.T) / 2.0

        schur_factor = None
        jitter = 0.0
        base = np.mean(np.diag(schur)) if num_vars else 1.0
        for attempt in range(4):
            try:
                schur_factor = sla.cho_factor(
                    schur + jitter * np.eye(num_vars), lower=True, check_finite=False
                )
                break
            except np.linalg.LinAlgError:
                jitter = max(1e-14 * base, 10.0 * jitter) * (10.0**attempt)
        if schur_factor is None:
            return build_solution(
                SolverStatus.NUMERICAL_TROUBLE, y, x_blocks, iters, pres, dres, relgap, history
            )

        # r1 restores LMI consistency: S + dS = B(y + dy) needs
        # dS = A(dy) + (B(y) - S), so the current gap enters as-is.
        r1 = lmi_gap

        def solve_direction(r3_blocks):
            rhs = -r_dual.copy()
            for b, w, r3, r1b in zip(blocks, w_blocks, r3_blocks, r1):
                rhs += b.inner_products(r3 - w @ r1b @ w, num_vars)
            dy = sla.cho_solve(schur_factor, rhs, check_finite=False)
            ds = []
            for b, r1b in zip(blocks, r1):
                mat = np.zeros((b.size, b.size))
                np.add.at(mat, (b.rows, b.cols), b.vals * dy[b.var_ids])
                ds.append(mat + r1b)
            dx = [
                r3 - w @ dsb @ w for w, r3, dsb in zip(w_blocks, r3_blocks, ds)
            ]
            return dy, ds, dx

        # Predictor: pure Newton step toward the boundary.
        r3_aff = [-xb for xb in x_blocks]
        dy_a, ds_a, dx_a = solve_direction(r3_aff)

        def boundary_steps(dx, ds):
            ap = ad = math.inf
            for xb, dxb, fx in zip(x_blocks, dx, x_factors):
                ap = min(ap, _max_step(xb, dxb, fx))
            for sb, dsb, fs in zip(s_blocks, ds, s_factors):
                ad = min(ad, _max_step(sb, dsb, fs))
            return ap, ad

        ap_a, ad_a = boundary_steps(dx_a, ds_a)
        alpha_p = min(1.0, ap_a)
        alpha_d = min(1.0, ad_a)
        mu_aff = sum(
            float(np.sum((xb + alpha_p * dxb) * (sb + alpha_d * dsb)))
            for xb, dxb, sb, dsb in zip(x_blocks, dx_a, s_blocks, ds_a)
        ) / total_dim
        sigma = min(1.0, max(0.0, (max(mu_aff, 0.0) / mu) ** 3))

        # Corrector with the NT-scaled second-order term.
        r3_blocks = []
        for (r, r_inv, lam), dxb, dsb in zip(scalings, dx_a, ds_a):
            dlx = r_inv @ dxb @ r_inv.T
            dls = r.T @ dsb @ r
            cross = (dlx @ dls + dls @ dlx) / 2.0
            rhs_mat = -cross
            np.fill_diagonal(rhs_mat, rhs_mat.diagonal() + sigma * mu - lam**2)
            gamma = 2.0 / np.add.outer(lam, lam)
            r3_blocks.append(r @ (gamma * rhs_mat) @ r.T)
        dy, ds, dx = solve_direction(r3_blocks)

        ap, ad = boundary_steps(dx, ds)
        alpha_p = min(1.0, cfg.step_fraction * ap)
        alpha_d = min(1.0, cfg.step_fraction * ad)
        if min(alpha_p, alpha_d) < 1e-14:
            return build_solution(
                SolverStatus.NUMERICAL_TROUBLE, y, x_blocks, iters, pres, dres, relgap, history
            )

        for i in range(len(blocks)):
            x_blocks[i] = x_blocks[i] + alpha_p * dx[i]
            x_blocks[i] = (x_blocks[i] + x_blocks[i].T) / 2.0
            s_blocks[i] = s_blocks[i] + alpha_d * ds[i]
            s_blocks[i] = (s_blocks[i] + s_blocks[i].T) / 2.0
        y = y + alpha_d * dy

    return build_solution(
        SolverStatus.ITERATION_LIMIT, y, x_blocks, iters, pres, dres, relgap, history
    )


@dataclass(frozen=True)
class ResidualReport:
    """Solver-independent feasibility and gap check for a returned solution."""

    moment_objective: float
    gram_objective: float
    gap: float
    relative_gap: float
    lmi_min_eigenvalue: float
    gram_min_eigenvalue: float
    coefficient_error: float


def residuals(problem: LmiSdp, solution: SdpSolution) -> ResidualReport:
    """Recompute objectives, PSD margins, and the coefficient identity error."""
    y = np.array(
        [solution.y[e] for e in problem.var_exponents], dtype=float
    )
    c = problem.objective[1:]
    c0 = float(problem.objective[0])
    pobj = c0 + float(c @ y)
    dobj = c0 - sum(
        float(np.sum(b.const * xb)) for b, xb in zip(problem.blocks, solution.gram)
    )
    lmi_min = math.inf
    for b in problem.blocks:
        w = sla.eigvalsh(b.materialize(y), check_finite=False)
        lmi_min = min(lmi_min, float(w[0]))
    gram_min = math.inf
    coeff = c.copy()
    for b, xb in zip(problem.blocks, solution.gram):
        w = sla.eigvalsh((xb + xb.T) / 2.0, check_finite=False)
        gram_min = min(gram_min, float(w[0]))
        coeff -= b.inner_products(xb, problem.num_vars)
    gap = pobj - dobj
    return ResidualReport(
        moment_objective=pobj,
        gram_objective=dobj,
        gap=gap,
        relative_gap=abs(gap) / (1.0 + abs(pobj) + abs(dobj)),
        lmi_min_eigenvalue=lmi_min,
        gram_min_eigenvalue=gram_min,
        coefficient_error=float(np.max(np.abs(coeff))) if len(coeff) else 0.0,
    )


def export_sdpa(problem: LmiSdp) -> str:
    """Serialize to the sparse SDPA format (``.dat-s``).

    Variables are the non-pinned labels in graded lexicographic order; the
    pinned label is folded into the constant matrix F0. The encoded problem is
    ``min c^T x  s.t.  sum_j x_j F_j - F0 >= 0`` so F0 = -C and F_j = A_j.
    """
    lines = [
        f"{problem.num_vars} = mDIM",
        f"{len(problem.blocks)} = nBLOCK",
        "{" + ", ".join(str(b.size) for b in problem.blocks) + "} = bLOCKsTRUCT",
    ]
    obj = problem.objective[1:]
    lines.append("{" + ", ".join(_fmt(v) for v in obj) + "}")
    data: list[str] = []
    for bno, b in enumerate(problem.blocks, start=1):
        for r in range(b.size):
            for cidx in range(r, b.size):
                v = b.const[r, cidx]
                if v != 0.0:
                    data.append(f"0 {bno} {r + 1} {cidx + 1} {_fmt(-v)}")
        for var, rr, cc, vv in zip(b.var_ids, b.rows, b.cols, b.vals):
            if rr <= cc:
                data.append(f"{int(var) + 1} {bno} {rr + 1} {cc + 1} {_fmt(vv)}")
    return "\n".join(lines + data) + "\n"


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))
