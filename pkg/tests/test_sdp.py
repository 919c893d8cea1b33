"""Interior-point solver tests on hand-checkable LMI problems.

Every optimum asserted here has an independent derivation: a closed form,
a brute-force grid scan, or an external conic solver run on the exported
problem data.
"""

import math

import numpy as np
import pytest

from sparsesos import (
    Exponent,
    LmiBlock,
    LmiSdp,
    RelaxationKind,
    SolverConfig,
    SolverStatus,
    build_relaxation,
    export_sdpa,
    solve,
)
from sparsesos.sdp import residuals

Z = Exponent.zero()
U = Exponent.unit


def interval_problem():
    """min y s.t. [[1, y], [y, 1]] >= 0, optimum -1 at y = -1."""
    blk = LmiBlock.from_entries(2, [(0, 0, 1.0), (1, 1, 1.0)], [(0, 0, 1, 1.0)])
    return LmiSdp([Z, U(1)], [0.0, 1.0], [blk])


def disc_problem():
    """min a + b s.t. [[1, a, b], [a, 1, 0], [b, 0, 1]] >= 0.

    The LMI is equivalent to a^2 + b^2 <= 1, so the optimum is -sqrt(2)
    at a = b = -sqrt(2)/2.
    """
    blk = LmiBlock.from_entries(
        3,
        [(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)],
        [(0, 0, 1, 1.0), (1, 0, 2, 1.0)],
    )
    return LmiSdp([Z, U(1), U(2)], [0.0, 1.0, 1.0], [blk])


def box_problem():
    """min -y s.t. y in [-2, 5] via two 1x1 blocks, optimum -5."""
    lo = LmiBlock.from_entries(1, [(0, 0, 2.0)], [(0, 0, 0, 1.0)])
    hi = LmiBlock.from_entries(1, [(0, 0, 5.0)], [(0, 0, 0, -1.0)])
    return LmiSdp([Z, U(1)], [0.0, -1.0], [lo, hi])


def univariate_moment_problem(b, c):
    """Moment form of min x^2 + b x + c, optimum c - b^2 / 4 at x = -b/2."""
    hankel = LmiBlock.from_entries(
        2, [(0, 0, 1.0)], [(0, 0, 1, 1.0), (1, 1, 1, 1.0)]
    )
    return LmiSdp([Z, U(1), U(1) + U(1)], [c, b, 1.0], [hankel])


class TestRegressionProblems:
    def test_interval_minimum(self):
        sol = solve(interval_problem())
        assert sol.status is SolverStatus.OPTIMAL
        assert sol.optimal
        assert abs(sol.objective + 1.0) <= 1e-7
        assert abs(sol.y[U(1)] + 1.0) <= 1e-6
        assert sol.relative_gap <= 1e-8

    def test_scaled_one_dim_bound(self):
        # min 2y s.t. y >= 3, optimum 6
        blk = LmiBlock.from_entries(1, [(0, 0, -3.0)], [(0, 0, 0, 1.0)])
        sol = solve(LmiSdp([Z, U(1)], [0.0, 2.0], [blk]))
        assert sol.status is SolverStatus.OPTIMAL
        assert abs(sol.objective - 6.0) <= 1e-7

    def test_box_between_two_blocks(self):
        sol = solve(box_problem())
        assert sol.status is SolverStatus.OPTIMAL
        assert abs(sol.objective + 5.0) <= 1e-6
        assert abs(sol.y[U(1)] - 5.0) <= 1e-6

    def test_disc_against_closed_form(self):
        sol = solve(disc_problem())
        assert sol.status is SolverStatus.OPTIMAL
        assert abs(sol.objective + math.sqrt(2.0)) <= 1e-7
        assert sol.relative_gap <= 1e-8

    def test_disc_against_grid_scan(self):
        sol = solve(disc_problem())
        grid = np.linspace(-1.05, 1.05, 211)
        aa, bb = np.meshgrid(grid, grid, indexing="ij")
        mats = np.zeros(aa.shape + (3, 3))
        mats[..., 0, 0] = mats[..., 1, 1] = mats[..., 2, 2] = 1.0
        mats[..., 0, 1] = mats[..., 1, 0] = aa
        mats[..., 0, 2] = mats[..., 2, 0] = bb
        feasible = np.linalg.eigvalsh(mats)[..., 0] >= 0.0
        grid_min = float(np.min((aa + bb)[feasible]))
        # The scan only visits feasible points, so it upper-bounds the
        # true optimum; the solver value must sit just below it.
        assert sol.objective <= grid_min + 1e-6
        assert grid_min - sol.objective <= 0.03

    def test_degenerate_vertex(self):
        # min y2 s.t. [[1, y1], [y1, y2]] >= 0 has its optimum at the
        # boundary point (0, 0); moment-structured labels keep the start
        # interior.
        blk = LmiBlock.from_entries(
            2, [(0, 0, 1.0)], [(0, 0, 1, 1.0), (1, 1, 1, 1.0)]
        )
        prob = LmiSdp([Z, U(1), U(1) + U(1)], [0.0, 0.0, 1.0], [blk])
        sol = solve(prob)
        assert sol.status is SolverStatus.OPTIMAL
        assert abs(sol.objective) <= 1e-7

    def test_infeasible_start_recovers(self):
        # [[1, y-5], [y-5, 1]] >= 0 forces y in [4, 6], far from the
        # default starting point; the LMI gap must contract to zero
        # rather than amplify across iterations.
        blk = LmiBlock.from_entries(
            2, [(0, 0, 1.0), (0, 1, -5.0), (1, 1, 1.0)], [(0, 0, 1, 1.0)]
        )
        sol = solve(LmiSdp([Z, U(1)], [0.0, 1.0], [blk]))
        assert sol.status is SolverStatus.OPTIMAL
        assert abs(sol.objective - 4.0) <= 1e-6
        assert sol.primal_residual <= 1e-8

    def test_univariate_quadratic_family(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            b = float(rng.uniform(-4.0, 4.0))
            c = float(rng.uniform(-2.0, 2.0))
            sol = solve(univariate_moment_problem(b, c))
            assert sol.status is SolverStatus.OPTIMAL
            assert abs(sol.objective - (c - b * b / 4.0)) <= 1e-6
            assert abs(sol.y[U(1)] + b / 2.0) <= 1e-4

    def test_gram_objective_brackets_bound(self):
        sol = solve(disc_problem())
        assert sol.gram_objective <= sol.objective + 1e-7
        assert abs(sol.gram_objective - sol.objective) <= 1e-6


class TestStatusClassification:
    def test_dual_unbounded(self):
        # min -y s.t. y >= 0 decreases without bound
        blk = LmiBlock.from_entries(1, [], [(0, 0, 0, 1.0)])
        sol = solve(LmiSdp([Z, U(1)], [0.0, -1.0], [blk]))
        assert sol.status is SolverStatus.DUAL_UNBOUNDED
        assert not sol.optimal
        assert sol.objective < -1e6

    def test_constant_problem_feasible(self):
        prob = LmiSdp([Z], [2.5], [LmiBlock.from_entries(1, [(0, 0, 3.0)], [])])
        sol = solve(prob)
        assert sol.status is SolverStatus.OPTIMAL
        assert sol.objective == 2.5
        assert sol.iterations == 0

    def test_constant_problem_infeasible(self):
        prob = LmiSdp([Z], [2.5], [LmiBlock.from_entries(1, [(0, 0, -1.0)], [])])
        sol = solve(prob)
        assert sol.status is SolverStatus.PRIMAL_INFEASIBLE

    def test_infeasible_lmi_detected(self):
        # y >= 1 and -y >= 0 cannot hold together; the Gram side admits a
        # diverging improving ray, which the solver reads as infeasibility.
        ge_one = LmiBlock.from_entries(1, [(0, 0, -1.0)], [(0, 0, 0, 1.0)])
        le_zero = LmiBlock.from_entries(1, [], [(0, 0, 0, -1.0)])
        sol = solve(LmiSdp([Z, U(1)], [0.0, 1.0], [ge_one, le_zero]))
        assert sol.status is SolverStatus.PRIMAL_INFEASIBLE
        assert not sol.optimal

    def test_iteration_limit_keeps_last_iterate(self):
        sol = solve(disc_problem(), SolverConfig(max_iters=2))
        assert sol.status is SolverStatus.ITERATION_LIMIT
        assert sol.iterations == 2
        assert math.isfinite(sol.objective)

    def test_unreachable_tolerance_reports_trouble(self):
        cfg = SolverConfig(tol_gap=1e-16, tol_feas=1e-16, max_iters=500)
        sol = solve(disc_problem(), cfg)
        assert sol.status is SolverStatus.NUMERICAL_TROUBLE
        # the returned iterate is still the correct optimum
        assert abs(sol.objective + math.sqrt(2.0)) <= 1e-8

    def test_metrics_dict(self):
        sol = solve(disc_problem())
        m = sol.metrics()
        assert set(m) == {
            "iterations",
            "primal_residual",
            "dual_residual",
            "relative_gap",
        }
        assert m["iterations"] == sol.iterations


class TestDeterminism:
    def test_repeat_solves_bitwise_identical(self):
        first = solve(disc_problem())
        second = solve(disc_problem())
        assert first.objective == second.objective
        assert first.gram_objective == second.gram_objective
        assert first.iterations == second.iterations
        assert first.y == second.y
        assert first.gap_history == second.gap_history
        assert all(
            np.array_equal(a, b) for a, b in zip(first.gram, second.gram)
        )

    def test_moment_problem_bitwise_identical(self):
        prob = univariate_moment_problem(-3.0, 1.0)
        first = solve(prob)
        second = solve(prob)
        assert first.objective == second.objective
        assert first.y == second.y


class TestGaussianStart:
    def test_interior_for_moment_blocks(self, amgm_quartic):
        prob, _ = build_relaxation(amgm_quartic, RelaxationKind.DENSE)
        y0 = prob.gaussian_start()
        assert len(y0) == prob.num_vars
        for blk in prob.blocks:
            w = np.linalg.eigvalsh(blk.materialize(y0))
            assert w[0] > 0.0

    def test_prior_moment_values(self):
        labels = [Z, U(1), U(1, 2), U(1, 3), U(1, 4), U(1, 2) + U(2, 2)]
        blk = LmiBlock.from_entries(
            1, [], [(k, 0, 0, 1.0) for k in range(5)]
        )
        prob = LmiSdp(labels, [0.0] * 6, [blk])
        y0 = prob.gaussian_start()
        assert y0 == pytest.approx([0.0, 0.5, 0.0, 0.75, 0.25])


class TestResidualReport:
    def test_optimal_solution_passes_checks(self):
        prob = disc_problem()
        sol = solve(prob)
        rep = residuals(prob, sol)
        assert abs(rep.moment_objective - sol.objective) <= 1e-12
        assert rep.gap >= -1e-8
        assert rep.relative_gap <= 1e-7
        assert rep.lmi_min_eigenvalue >= -1e-7
        assert rep.gram_min_eigenvalue >= -1e-7
        assert rep.coefficient_error <= 1e-6

    def test_moment_problem_certificate_identity(self):
        prob = univariate_moment_problem(-3.0, 1.0)
        rep = residuals(prob, solve(prob))
        assert rep.coefficient_error <= 1e-7


class TestProblemValidation:
    def test_objective_length_mismatch(self):
        blk = LmiBlock.from_entries(1, [], [(0, 0, 0, 1.0)])
        with pytest.raises(ValueError, match="objective length"):
            LmiSdp([Z, U(1)], [0.0], [blk])

    def test_missing_zero_label(self):
        blk = LmiBlock.from_entries(1, [], [(0, 0, 0, 1.0)])
        with pytest.raises(ValueError, match="zero exponent"):
            LmiSdp([U(1), U(2)], [0.0, 1.0], [blk])

    def test_duplicate_labels(self):
        blk = LmiBlock.from_entries(1, [], [(0, 0, 0, 1.0)])
        with pytest.raises(ValueError, match="duplicate exponent"):
            LmiSdp([Z, U(1), U(1)], [0.0, 1.0, 1.0], [blk])

    def test_requires_a_block(self):
        with pytest.raises(ValueError, match="at least one block"):
            LmiSdp([Z, U(1)], [0.0, 1.0], [])

    def test_unknown_variable_id(self):
        blk = LmiBlock.from_entries(1, [], [(7, 0, 0, 1.0)])
        with pytest.raises(ValueError, match="unknown variable"):
            LmiSdp([Z, U(1)], [0.0, 1.0], [blk])

    def test_variable_outside_every_block(self):
        blk = LmiBlock.from_entries(1, [], [(0, 0, 0, 1.0)])
        with pytest.raises(ValueError, match="appear in no block"):
            LmiSdp([Z, U(1), U(2)], [0.0, 1.0, 1.0], [blk])

    def test_block_shape_and_symmetry(self):
        with pytest.raises(ValueError, match="wrong shape"):
            LmiBlock(
                2,
                np.zeros((3, 3)),
                np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
                np.zeros(0),
            )
        with pytest.raises(ValueError, match="symmetric"):
            LmiBlock(
                2,
                np.array([[0.0, 1.0], [0.0, 0.0]]),
                np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
                np.zeros(0, dtype=np.int64),
                np.zeros(0),
            )


def read_sdpa(text):
    """Minimal sparse-SDPA parser used to round-trip the exporter."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    m = int(lines[0].split()[0])
    nblocks = int(lines[1].split()[0])
    struct_src = lines[2].split("=")[0].strip().strip("{}")
    struct = [int(tok) for tok in struct_src.split(",")]
    assert len(struct) == nblocks
    obj = np.array([float(tok) for tok in lines[3].strip("{}").split(",")])
    assert len(obj) == m
    mats = [[np.zeros((s, s)) for s in struct] for _ in range(m + 1)]
    for ln in lines[4:]:
        k, b, i, j, v = ln.split()
        k, b, i, j, v = int(k), int(b), int(i), int(j), float(v)
        assert i <= j, "data lines must address the upper triangle"
        mats[k][b - 1][i - 1, j - 1] = v
        mats[k][b - 1][j - 1, i - 1] = v
    return m, struct, obj, mats


def cvxopt_optimum(m, struct, obj, mats):
    """Solve min obj^T x s.t. sum_j x_j F_j - F0 >= 0 with an external solver."""
    cvxopt = pytest.importorskip("cvxopt")
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    gs, hs = [], []
    for bi, size in enumerate(struct):
        g = np.zeros((size * size, m))
        for j in range(1, m + 1):
            g[:, j - 1] = -mats[j][bi].reshape(-1)
        gs.append(matrix(g))
        hs.append(matrix(-mats[0][bi]))
    out = solvers.sdp(matrix(obj), Gs=gs, hs=hs)
    assert out["status"] == "optimal"
    return float(out["primal objective"])


class TestSdpaExport:
    def test_header_layout(self):
        text = export_sdpa(disc_problem())
        lines = text.splitlines()
        assert lines[0] == "2 = mDIM"
        assert lines[1] == "1 = nBLOCK"
        assert lines[2] == "{3} = bLOCKsTRUCT"
        assert lines[3] == "{1, 1}"
        assert text.endswith("\n")

    def test_constant_matrix_sign_flip(self):
        # F0 = -C, so the identity constant part shows up negated
        text = export_sdpa(disc_problem())
        assert "0 1 1 1 -1" in text
        assert "0 1 2 2 -1" in text
        assert "1 1 1 2 1" in text
        assert "2 1 1 3 1" in text

    def test_only_upper_triangle_emitted(self):
        _, _, _, _ = read_sdpa(export_sdpa(disc_problem()))

    def test_round_trip_reproduces_lmi(self):
        prob = disc_problem()
        m, struct, obj, mats = read_sdpa(export_sdpa(prob))
        assert m == prob.num_vars
        assert struct == prob.block_sizes
        assert np.array_equal(obj, prob.objective[1:])
        rng = np.random.default_rng(7)
        for _ in range(5):
            y = rng.normal(size=m)
            for bi, blk in enumerate(prob.blocks):
                rebuilt = -mats[0][bi] + sum(
                    y[j - 1] * mats[j][bi] for j in range(1, m + 1)
                )
                assert np.max(np.abs(rebuilt - blk.materialize(y))) <= 1e-12

    @pytest.mark.parametrize(
        "factory",
        [interval_problem, disc_problem, box_problem,
         lambda: univariate_moment_problem(-3.0, 1.0)],
        ids=["interval", "disc", "box", "moment"],
    )
    def test_external_solver_matches(self, factory):
        prob = factory()
        ours = solve(prob)
        assert ours.status is SolverStatus.OPTIMAL
        ext = cvxopt_optimum(*read_sdpa(export_sdpa(prob)))
        assert abs(ext + prob.objective[0] - ours.objective) <= 1e-5

    def test_external_solver_matches_relaxation(self, worked_quartic):
        prob, _ = build_relaxation(worked_quartic, RelaxationKind.SPARSE_CLIQUE)
        ours = solve(prob)
        assert ours.status is SolverStatus.OPTIMAL
        ext = cvxopt_optimum(*read_sdpa(export_sdpa(prob)))
        assert abs(ext + prob.objective[0] - ours.objective) <= 1e-5
