"""Recover global minimizers from optimal moment vectors.

A solved moment relaxation returns a vector ``y`` indexed by exponents.
When the truncated moment matrices built from ``y`` satisfy the flat
extension condition they are moment matrices of an atomic measure, and
the atoms of that measure are global minimizers.  This module implements
the extraction chain:

* :func:`numerical_rank` and :func:`flat_extension_check` detect when a
  block admits an atomic representation,
* :func:`atomic_support` recovers atoms and weights via truncated
  eigendecomposition, multiplication matrices and a simultaneous
  (Schur-based) diagonalization,
* :func:`variable_candidates` extracts the candidate set ``V_k`` for a
  single coordinate from its univariate (Hankel) moment matrix,
* :func:`clique_candidates` extracts the tuple set ``X_c`` for a clique,
* :func:`assemble_minimizers` combines per-variable and per-clique sets
  into full points by backtracking over cliques,
* :func:`extract_solution` orchestrates the above for a solved
  relaxation and reports accuracy per minimizer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import schur

from .poly import Clique, Exponent, Polynomial, SparseSum, monomials, rip_check
from .relax import RelaxationInfo, RelaxationKind
from .sdp import SdpSolution, SolverStatus

__all__ = [
    "MomentMatrixView",
    "AtomicMeasure",
    "FlatExtension",
    "ExtractionResult",
    "numerical_rank",
    "flat_extension_check",
    "atomic_support",
    "variable_candidates",
    "clique_candidates",
    "rank_one_point",
    "assemble_minimizers",
    "accuracy",
    "extract_solution",
]

_ASSEMBLY_NODE_BUDGET = 200_000
_ASSEMBLY_POINT_CAP = 64


# ---------------------------------------------------------------------------
# views and results


@dataclass(frozen=True)
class MomentMatrixView:
    """A symmetric matrix of moments indexed by a fixed label list.

    ``matrix[a, b]`` holds ``y[labels[a] + labels[b]]``.  For the classic
    truncated moment matrix the labels are all monomials of the owning
    variables up to some order; blocks of the support-adapted relaxation
    use arbitrary label sets instead.
    """

    variables: tuple[int, ...]
    labels: tuple[Exponent, ...]
    matrix: np.ndarray
    order: int | None = None

    @staticmethod
    def from_moments(y, variables, order):
        """Build the order-``order`` moment matrix of ``variables`` from ``y``.

        Returns None when ``y`` lacks some required entry, which happens
        for relaxations whose moment set does not include the full grid.
        """
        variables = tuple(sorted(variables))
        labels = monomials(variables, order)
        k = len(labels)
        mat = np.empty((k, k))
        for a in range(k):
            for b in range(a, k):
                val = y.get(labels[a] + labels[b])
                if val is None:
                    return None
                mat[a, b] = mat[b, a] = val
        return MomentMatrixView(variables, tuple(labels), mat, order)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported measure reproducing a moment matrix.

    ``atoms`` has one row per atom, columns following ``variables``;
    ``weights`` are positive and sum to one (up to solver accuracy).
    """

    variables: tuple[int, ...]
    atoms: np.ndarray
    weights: np.ndarray
    reconstruction_error: float

    @property
    def rank(self):
        return self.atoms.shape[0]


@dataclass(frozen=True)
class FlatExtension:
    """Outcome of a flat extension test on one clique.

    ``holds`` is true when two consecutive truncated moment matrices have
    the same numerical rank; ``order`` is the smallest witnessing order
    and ``rank`` the common rank.  ``ranks`` lists rank M_k for k = 0..d.
    """

    holds: bool
    order: int | None
    rank: int | None
    ranks: tuple[int, ...]


@dataclass
class ExtractionResult:
    """Everything recovered from one solved relaxation."""

    variable_candidates: dict[int, tuple[float, ...] | None]
    clique_candidates: dict[Clique, tuple[tuple[float, ...], ...] | None]
    minimizers: list[np.ndarray]
    errors: list[float]
    block_ranks: tuple[int, ...]
    flat: dict[Clique, FlatExtension]
    certified: bool
    notes: list[str] = field(default_factory=list)

    def as_dict(self):
        """JSON-friendly summary used by reports."""
        return {
            "minimizers": [list(map(float, x)) for x in self.minimizers],
            "errors": [float(e) for e in self.errors],
            "certified": self.certified,
            "block_ranks": list(self.block_ranks),
            "flat_extension": {
                "/".join(map(str, c)): bool(r.holds) for c, r in self.flat.items()
            },
            "variable_candidates": {
                str(k): (None if v is None else [float(t) for t in v])
                for k, v in self.variable_candidates.items()
            },
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# rank and flatness


def numerical_rank(mat, rank_tol=1e-6):
    """Number of singular values above ``rank_tol`` relative to the largest.

    The reference value is clamped away from zero so the all-zero matrix
    has rank 0 rather than tripping a division.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.count_nonzero(sv > rank_tol * max(sv[0], 1e-300)))


def flat_extension_check(y, clique, order, rank_tol=1e-6):
    """Test rank M_k = rank M_{k+1} for the moment matrices of ``clique``.

    Moments up to degree ``2 * order`` must be present in ``y``.  Returns
    a :class:`FlatExtension` with the smallest witnessing ``k``.
    """
    variables = tuple(sorted(clique))
    view = MomentMatrixView.from_moments(y, variables, order)
    if view is None:
        raise KeyError("moment vector lacks entries for clique %s" % (variables,))
    sizes = [math.comb(len(variables) + k, k) for k in range(order + 1)]
    ranks = tuple(
        numerical_rank(view.matrix[:s, :s], rank_tol) for s in sizes
    )
    for k in range(order):
        if ranks[k] == ranks[k + 1]:
            return FlatExtension(True, k, ranks[k], ranks)
    return FlatExtension(False, None, None, ranks)


# ---------------------------------------------------------------------------
# atomic extraction


def _echelon_pivot_rows(basis, tol=1e-8):
    """Row indices of pivots in a column echelon reduction of ``basis``.

    Rows are scanned in their given (graded) order, so pivots prefer low
    degree monomials.  ``basis`` is n-by-r with full column rank r.
    """
    work = np.array(basis.T, dtype=float)  # r x n, eliminate over columns
    r, n = work.shape
    scale = max(np.abs(work).max(), 1e-300)
    pivots = []
    row = 0
    for col in range(n):
        if row >= r:
            break
        sub = np.abs(work[row:, col])
        best = int(np.argmax(sub))
        if sub[best] <= tol * scale:
            continue
        work[[row, row + best]] = work[[row + best, row]]
        work[row] /= work[row, col]
        mask = np.arange(r) != row
        work[mask] -= np.outer(work[mask, col], work[row])
        pivots.append(col)
        row += 1
    return pivots


def atomic_support(view, rank_tol=1e-6, seed=0, recon_tol=None):
    """Extract an atomic measure from a truncated moment matrix.

    The view must be a full moment matrix (labels = all monomials of its
    variables up to ``view.order``).  Returns None when the flat
    extension condition fails, the simultaneous diagonalization cannot be
    stabilized, or the reconstruction misses ``recon_tol``, which
    defaults to ``max(1e-6, rank_tol)`` so that a loosened rank tolerance
    tolerates correspondingly noisy moments.  Reconstruction is checked
    on the flat principal submatrix M_{k+1}, the part of the view the
    extracted atoms are required to reproduce.

    The method: truncate the eigendecomposition of M_{k+1} at the flat
    rank r, pick r independent monomial rows by column echelon reduction,
    form multiplication matrices per variable, then diagonalize a random
    convex combination of them with a real Schur decomposition.  The
    random combination is drawn from a fixed-seed generator, so repeated
    calls give identical atom orderings.
    """
    variables = view.variables
    order = view.order
    if order is None:
        raise ValueError("atomic_support requires a full moment matrix view")
    nvar = len(variables)
    sizes = [math.comb(nvar + k, k) for k in range(order + 1)]
    ranks = [numerical_rank(view.matrix[:s, :s], rank_tol) for s in sizes]
    flat_k = None
    for k in range(order):
        if ranks[k] == ranks[k + 1]:
            flat_k = k
            break
    if flat_k is None:
        return None
    r = ranks[flat_k]
    if r == 0:
        return None

    m1 = sizes[flat_k + 1]
    sub = view.matrix[:m1, :m1]
    labels = view.labels[:m1]
    evals, evecs = np.linalg.eigh(sub)
    top = np.argsort(evals)[::-1][:r]
    basis = evecs[:, top] * np.sqrt(np.maximum(evals[top], 0.0))

    pivots = _echelon_pivot_rows(basis)
    if len(pivots) < r:
        return None
    index = {lab: i for i, lab in enumerate(labels)}
    gmat = basis[pivots, :]
    try:
        ginv = np.linalg.inv(gmat)
    except np.linalg.LinAlgError:
        return None

    mult = []
    for k in variables:
        unit = Exponent.unit(k)
        rows = []
        for p in pivots:
            shifted = index.get(labels[p] + unit)
            if shifted is None:
                return None
            rows.append(shifted)
        mult.append(ginv @ basis[rows, :])

    rng = np.random.default_rng(seed)
    atoms = None
    for _ in range(5):
        coeff = rng.random(nvar)
        coeff /= coeff.sum()
        combo = sum(c * a for c, a in zip(coeff, mult))
        tmat, qmat = schur(combo, output="real")
        off = np.abs(np.diag(tmat, -1)).max() if r > 1 else 0.0
        eig = np.sort(np.diag(tmat))
        gap = np.diff(eig).min() if r > 1 else np.inf
        if off < 1e-8 * max(1.0, np.abs(tmat).max()) and gap > 1e-8:
            atoms = np.column_stack(
                [np.diag(qmat.T @ a @ qmat) for a in mult]
            )
            break
    if atoms is None:
        return None

    # weights by least squares, then sanity checks.  Both fit and check
    # run on the flat submatrix: entries of degree above 2(k+1) are
    # extension data the flat rank says nothing about, and with an
    # interior point solution they drift whenever the objective leaves
    # them unconstrained.
    phi = np.empty((m1, r))
    for j in range(r):
        point = {k: atoms[j, i] for i, k in enumerate(variables)}
        phi[:, j] = [
            math.prod(point[v] ** p for v, p in lab.items) for lab in labels
        ]
    design = np.stack([np.outer(phi[:, j], phi[:, j]).ravel() for j in range(r)], axis=1)
    weights, *_ = np.linalg.lstsq(design, sub.ravel(), rcond=None)
    if np.any(weights <= 1e-10):
        return None
    recon = (phi * weights) @ phi.T
    denom = max(np.linalg.norm(sub), 1e-300)
    err = np.linalg.norm(recon - sub) / denom
    if recon_tol is None:
        recon_tol = max(1e-6, rank_tol)
    if err > recon_tol:
        return None

    order_idx = np.lexsort(atoms[:, ::-1].T)
    return AtomicMeasure(
        variables, atoms[order_idx], weights[order_idx], float(err)
    )


def variable_candidates(y, k, order, rank_tol=1e-6, seed=0):
    """Candidate values for coordinate ``k`` from its Hankel moment matrix.

    Returns a sorted tuple of scalars, the empty tuple when extraction
    fails (no flat extension), or None when ``y`` lacks the univariate
    moments, as happens for support-adapted relaxations.
    """
    view = MomentMatrixView.from_moments(y, (k,), order)
    if view is None:
        return None
    measure = atomic_support(view, rank_tol, seed)
    if measure is None:
        return ()
    return tuple(sorted(float(v) for v in measure.atoms[:, 0]))


def clique_candidates(y, clique, order, rank_tol=1e-6, seed=0):
    """Candidate tuples for a clique from its full moment matrix.

    Returns a tuple of coordinate tuples (ordered by the sorted clique
    variables), or None when extraction fails.
    """
    variables = tuple(sorted(clique))
    view = MomentMatrixView.from_moments(y, variables, order)
    if view is None:
        return None
    measure = atomic_support(view, rank_tol, seed)
    if measure is None:
        return None
    return tuple(tuple(float(v) for v in row) for row in measure.atoms)


def rank_one_point(view, rank_tol=1e-6):
    """Read coordinates off a numerically rank-one moment block.

    For a rank-one block ``M = v v^T`` with ``v`` proportional to the
    monomial vector of a point, each coordinate ``x_k`` equals the ratio
    ``v[a + e_k] / v[a]`` for any label pair present in the block.  This
    works for arbitrary label sets, including blocks without the constant
    label.  Returns a dict mapping the determinable variables to values,
    or None when the block is not rank one.
    """
    if numerical_rank(view.matrix, rank_tol) != 1:
        return None
    evals, evecs = np.linalg.eigh(view.matrix)
    vec = evecs[:, -1] * math.sqrt(max(evals[-1], 0.0))
    index = {lab: i for i, lab in enumerate(view.labels)}
    vmax = max(np.abs(vec).max(), 1e-300)
    point = {}
    for k in view.variables:
        unit = Exponent.unit(k)
        best = None
        for lab, i in index.items():
            j = index.get(lab + unit)
            if j is None or abs(vec[i]) <= 1e-8 * vmax:
                continue
            if best is None or abs(vec[i]) > best[0]:
                best = (abs(vec[i]), vec[j] / vec[i])
        if best is not None:
            point[k] = float(best[1])
    return point


# ---------------------------------------------------------------------------
# assembly


def _dedupe_points(points, tol):
    kept = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    kept.sort(key=lambda p: tuple(p))
    return kept


def assemble_minimizers(candidates, clique_sets, cliques, n, match_tol=1e-4):
    """Combine per-variable and per-clique candidate sets into full points.

    ``candidates`` maps variable -> iterable of values (may be missing or
    None for undetermined variables), ``clique_sets`` maps a clique to
    its extracted tuples (missing cliques are unconstrained).  Cliques
    are processed in a running intersection order when one exists, which
    keeps the backtracking shallow; each completed clique is checked
    against its tuple set within ``match_tol``.  Returns deduplicated
    points sorted lexicographically, or an empty list when no consistent
    assembly exists or a search limit trips.  Besides the node budget, an
    enumeration cap rejects candidate floods: far more combinations than
    any finite minimizer set signals that the moment data describes a
    continuum, and then no individual combination deserves trust.
    """
    cliques = list(cliques)
    rip = rip_check(cliques)
    if rip.order_nonstrict is not None:
        clique_order = [cliques[i] for i in rip.order_nonstrict]
        # duplicates collapse out of the witness order; keep them at the
        # tail so their tuple sets still gate the assembled points
        rest = set(range(len(cliques))) - set(rip.order_nonstrict)
        clique_order.extend(cliques[i] for i in sorted(rest))
    else:
        clique_order = cliques

    def options(k, clique):
        vals = candidates.get(k)
        if vals:
            return list(vals)
        tuples = clique_sets.get(clique)
        if tuples:
            pos = tuple(sorted(clique)).index(k)
            seen = []
            for t in tuples:
                if not any(abs(t[pos] - s) <= match_tol for s in seen):
                    seen.append(t[pos])
            return seen
        return None

    found = []
    assign = {}
    budget = [_ASSEMBLY_NODE_BUDGET]

    def clique_ok(clique):
        tuples = clique_sets.get(clique)
        if tuples is None:
            return True
        point = [assign[k] for k in sorted(clique)]
        return any(
            max(abs(a - b) for a, b in zip(point, t)) <= match_tol for t in tuples
        )

    def walk(ci):
        if budget[0] <= 0 or len(found) > _ASSEMBLY_POINT_CAP:
            return
        budget[0] -= 1
        if ci == len(clique_order):
            full = np.zeros(n)
            for k, v in assign.items():
                full[k - 1] = v
            found.append(full)
            return
        clique = clique_order[ci]
        free = [k for k in sorted(clique) if k not in assign]
        pools = []
        for k in free:
            opts = options(k, clique)
            if opts is None:
                return
            pools.append(opts)
        for combo in itertools.product(*pools):
            for k, v in zip(free, combo):
                assign[k] = v
            if clique_ok(clique):
                walk(ci + 1)
            for k in free:
                del assign[k]

    # variables outside every clique keep a unique candidate or default 0
    outside = [
        k for k in range(1, n + 1) if not any(k in c for c in cliques)
    ]
    outside_pools = []
    for k in outside:
        vals = candidates.get(k)
        outside_pools.append(list(vals) if vals else [0.0])

    for combo in itertools.product(*outside_pools):
        for k, v in zip(outside, combo):
            assign[k] = v
        walk(0)
        for k in outside:
            del assign[k]

    if len(found) > _ASSEMBLY_POINT_CAP:
        return []
    return _dedupe_points(found, match_tol)


def accuracy(f, point, bound):
    """Relative agreement between the objective at ``point`` and ``bound``.

    err = |f(x) - bound| / max(1, |f(x)|).
    """
    val = f.evaluate(np.asarray(point, dtype=float))
    return abs(val - bound) / max(1.0, abs(val))


# ---------------------------------------------------------------------------
# orchestration


def _block_views(info, y):
    views = []
    for labels, clique in zip(info.block_labels, info.block_cliques):
        size = len(labels)
        mat = np.empty((size, size))
        for a in range(size):
            for b in range(a, size):
                mat[a, b] = mat[b, a] = y[labels[a] + labels[b]]
        order = None
        variables = tuple(sorted(clique))
        if info.kind is not RelaxationKind.SPARSER_SUPPORT:
            order = info.d
        views.append(MomentMatrixView(variables, tuple(labels), mat, order))
    return views


def _extract_sparser(info, views, ranks, match_tol, rank_tol):
    """Per-variable candidates for support-adapted blocks via rank-one reads."""
    raw = {}
    ok = True
    for view, rank in zip(views, ranks):
        if rank != 1:
            ok = False
            continue
        point = rank_one_point(view, rank_tol)
        if point is None:
            ok = False
            continue
        for k, v in point.items():
            raw.setdefault(k, []).append(v)
    cands = {}
    for k, vals in raw.items():
        merged = []
        for v in sorted(vals):
            if not merged or abs(v - merged[-1]) > match_tol:
                merged.append(v)
        if len(merged) > 1:
            # blocks disagree about this coordinate
            ok = False
        cands[k] = tuple(merged)
    return cands, ok


def _consistent_with_variables(tuples, variables, vcands, match_tol):
    """Check the consistency theorem: clique atoms project into the V sets."""
    for tup in tuples:
        for k, value in zip(variables, tup):
            cands = vcands.get(k)
            if cands and min(abs(value - c) for c in cands) > match_tol:
                return False
    return True


def _attempt_extraction(y, info, views, cliques, n, tol, match_tol, seed):
    """One extraction pass at rank tolerance ``tol``.

    Returns (vcands, xsets, flat, minimizers, certified, notes).  The
    minimizer list is empty when nothing consistent could be assembled.
    """
    notes = []
    ranks = tuple(numerical_rank(v.matrix, tol) for v in views)
    xsets = {}

    if info.kind is RelaxationKind.SPARSER_SUPPORT:
        cands, certified = _extract_sparser(info, views, ranks, match_tol, tol)
        vcands = {k: cands.get(k) for k in range(1, n + 1)}
        missing = [k for k in range(1, n + 1) if not vcands.get(k)]
        if missing:
            certified = False
            notes.append("no candidate for variables %s" % missing)
            return vcands, xsets, {}, [], certified, notes
        minimizers = assemble_minimizers(vcands, {}, cliques, n, match_tol)
        return vcands, xsets, {}, minimizers, certified, notes

    d = info.d
    if ranks and all(r == 1 for r in ranks):
        # every moment block is rank one, so the representing measure is a
        # point mass and its coordinates are the first-order moments
        point = np.array([y.get(Exponent.unit(k), 0.0) for k in range(1, n + 1)])
        flat = {
            c: flat_extension_check(y, c, d, tol) for c in dict.fromkeys(cliques)
        }
        vcands = {k: (float(point[k - 1]),) for k in range(1, n + 1)}
        certified = all(r.holds for r in flat.values())
        return vcands, xsets, flat, [point], certified, notes

    vcands = {k: variable_candidates(y, k, d, tol, seed) for k in range(1, n + 1)}
    flat = {c: flat_extension_check(y, c, d, tol) for c in dict.fromkeys(cliques)}
    certified = all(r.holds for r in flat.values())
    if not all(v for v in vcands.values()):
        failed = [k for k, v in vcands.items() if not v]
        notes.append("univariate extraction failed for variables %s" % failed)
        return vcands, xsets, flat, [], False, notes

    ambiguous = {k for k, v in vcands.items() if len(v) > 1}
    if ambiguous:
        for c in dict.fromkeys(cliques):
            if ambiguous.intersection(c):
                got = clique_candidates(y, c, d, tol, seed)
                if got is None:
                    certified = False
                    notes.append("clique %s extraction failed" % (tuple(c),))
                elif not _consistent_with_variables(got, tuple(c), vcands, match_tol):
                    # two nearby atoms can merge into one fictitious mean
                    # atom under the rank test; such a tuple contradicts
                    # the per-variable candidates and must not veto them
                    certified = False
                    notes.append(
                        "clique %s candidates inconsistent with variable candidates"
                        % (tuple(c),)
                    )
                else:
                    xsets[c] = got
    minimizers = assemble_minimizers(vcands, xsets, cliques, n, match_tol)
    if minimizers and not certified:
        notes.append("assembled points lack a full flat extension certificate")
    return vcands, xsets, flat, minimizers, certified, notes


def _exact_eval(polys, xf):
    """Evaluate a sum of polynomials at a rational point exactly.

    Expanded polynomial evaluation in floating point loses all digits
    once terms of order one cancel down to the 1e-16 level, which is
    exactly what happens near minimizers of quartically flat objectives.
    Rational arithmetic sidesteps the cancellation entirely; float
    coordinates are dyadic rationals, so denominators stay moderate.
    """
    total = Fraction(0)
    for poly in polys:
        for exp, coeff in poly.terms.items():
            term = Fraction(coeff)
            for v, p in exp.items:
                term *= xf[v - 1] ** p
            total += term
    return total


class _Descent:
    """First and second derivative oracles kept summand by summand.

    Differentiating and evaluating the small summands directly is far
    cheaper than expanding the full objective, whose term count and
    per-entry Hessian cost grow quickly with the variable count.
    """

    def __init__(self, f):
        if isinstance(f, SparseSum):
            polys = [p for _, p in f.summands]
            self.n = f.n
        else:
            polys = [f]
            self.n = f.n
        self.polys = polys
        self.grad_pieces = [[] for _ in range(self.n)]
        self.hess_pieces = {}
        for poly in polys:
            for i in sorted(poly.variables()):
                gi = poly.differentiate(i)
                self.grad_pieces[i - 1].append(gi)
                for j in sorted(gi.variables()):
                    if j < i:
                        continue
                    hij = gi.differentiate(j)
                    self.hess_pieces.setdefault((i - 1, j - 1), []).append(hij)
        self.fscale = max(
            [1.0] + [abs(c) for poly in polys for c in poly.terms.values()]
        )

    def fun(self, x):
        return float(sum(p.evaluate(x) for p in self.polys))

    def jac(self, x):
        return np.array(
            [sum(g.evaluate(x) for g in pieces) for pieces in self.grad_pieces]
        )

    def exact_fun(self, xf):
        return _exact_eval(self.polys, xf)

    def exact_jac(self, xf):
        return np.array(
            [float(_exact_eval(pieces, xf)) for pieces in self.grad_pieces]
        )

    def hess(self, x):
        h = np.zeros((self.n, self.n))
        for (i, j), pieces in self.hess_pieces.items():
            v = sum(p.evaluate(x) for p in pieces)
            h[i, j] = v
            h[j, i] = v
        return h


def _flat_newton(desc, x0, origin, radius):
    """Damped Newton descent with exact gradient and objective values.

    Drives coordinates into flat (degenerate Hessian) minima where
    quasi-Newton methods stall: on a locally quartic objective each
    accepted Newton step contracts the offset by a constant factor, and
    exact evaluation makes the accept test sound at any scale.  Steps are
    rejected when they leave the trust box around ``origin``.
    """
    x = np.array(x0, dtype=float)
    fbest = desc.exact_fun([Fraction(v) for v in x])
    n = len(x)
    for _ in range(60):
        g = desc.exact_jac([Fraction(v) for v in x])
        if np.abs(g).max() == 0.0:
            break
        hval = desc.hess(x)
        scale = max(np.abs(hval).max(), 1.0)
        step = None
        for lam in (0.0, 1e-12, 1e-8, 1e-4, 1e-2, 1.0):
            try:
                cand = np.linalg.solve(hval + lam * scale * np.eye(n), -g)
            except np.linalg.LinAlgError:
                continue
            xt = x + cand
            if np.abs(xt - origin).max() > radius:
                continue
            ft = desc.exact_fun([Fraction(v) for v in xt])
            if ft <= fbest:
                step, fbest = cand, ft
                break
        if step is None:
            break
        x = x + step
        if np.abs(step).max() < 1e-15:
            break
    return x


def _descend(desc, start, radius, maxiter=200):
    from scipy.optimize import minimize as _minimize

    bounds = None
    if np.isfinite(radius):
        bounds = [(v - radius, v + radius) for v in start]
    res = _minimize(
        desc.fun,
        start,
        jac=desc.jac,
        method="L-BFGS-B",
        bounds=bounds,
        options={"ftol": 1e-16, "gtol": 1e-12, "maxiter": maxiter},
    )
    return np.asarray(res.x, dtype=float), float(res.fun)


def _polish(f, points, match_tol, radius=None, bound=None, seed=0):
    """Refine assembled points by local descent on the objective.

    A quasi-Newton pass handles the well-conditioned directions, then a
    damped Newton pass with exact rational evaluation finishes off flat
    directions where floating-point gradients drown in cancellation.
    By default each point may move at most a small radius, so the polish
    cannot jump between basins; heuristic points pass an infinite radius
    since they only approximate the minimizer's basin.  When a free
    descent stalls visibly above the certified lower bound, seeded
    restarts from perturbed copies of the point hunt for a better basin.
    A polished point is kept only when it does not increase the
    objective.  Near-duplicates after polishing collapse.
    """
    desc = _Descent(f)
    if radius is None:
        radius = max(1e-2, 10.0 * match_tol)
    slack = None
    if bound is not None:
        slack = bound + max(1e-10, 1e-8 * (1.0 + abs(bound)))
    polished = []
    for p in points:
        better, fval = _descend(desc, p, radius)
        if fval > desc.fun(p):
            better, fval = np.asarray(p, dtype=float), desc.fun(p)
        if not np.isfinite(radius) and slack is not None and fval > slack:
            rng = np.random.default_rng(seed)
            sigmas = (0.02, 0.05, 0.1, 0.2, 0.4)
            for trial in range(25):
                start = p + sigmas[trial % len(sigmas)] * rng.normal(size=len(p))
                cand, fc = _descend(desc, start, radius, maxiter=500)
                if fc < fval:
                    better, fval = cand, fc
                if fval <= slack:
                    break
        if np.abs(desc.jac(better)).max() <= 1e-4 * desc.fscale:
            better = _flat_newton(desc, better, p, radius)
        polished.append(better)
    return _dedupe_points(polished, match_tol)


def extract_solution(f, info, sol, rank_tol=1e-6, match_tol=1e-4, seed=0, polish=True):
    """Extract minimizers of ``f`` from a solved relaxation.

    ``f`` is the objective (SparseSum or Polynomial), ``info`` the
    relaxation structure and ``sol`` the solver output.  Follows the
    candidate-set algorithm: per-variable sets from univariate moment
    matrices, per-clique sets where a variable has several candidates,
    then consistent assembly.  Support-adapted relaxations use rank-one
    ratio reads instead, since their blocks are not full moment matrices.

    Interior-point solutions sit at the analytic center of the optimal
    face, which pollutes moment matrices with eigenvalues on the order of
    the square root of the gap tolerance whenever strict complementarity
    fails.  When extraction at ``rank_tol`` finds nothing, the pass is
    retried at a ladder of looser tolerances; any relaxed tolerance is
    recorded in the notes.  Assembled points are then polished by a
    bounded local descent and validated through their ``err`` value, so
    a loosened rank test cannot smuggle in a wrong minimizer silently.

    The result is flagged ``certified`` only when every block passed its
    rank or flat extension test and assembly succeeded; otherwise a
    heuristic point built from first-order moments is reported.
    """
    notes = []
    if sol.status not in (SolverStatus.OPTIMAL, SolverStatus.ITERATION_LIMIT):
        notes.append("no extraction for status %s" % sol.status.value)
        return ExtractionResult({}, {}, [], [], (), {}, False, notes)
    if sol.status is SolverStatus.ITERATION_LIMIT:
        notes.append("moment vector from an iteration-limited solve")

    y = sol.y
    n = info.n
    bound = sol.objective
    views = _block_views(info, y)
    base_ranks = tuple(numerical_rank(v.matrix, rank_tol) for v in views)
    cliques = [Clique(c) for c in info.block_cliques]

    ladder = [rank_tol] + [t for t in (1e-4, 1e-3, 1e-2) if t > rank_tol]
    chosen = None
    for tol in ladder:
        attempt = _attempt_extraction(y, info, views, cliques, n, tol, match_tol, seed)
        if attempt[3]:
            chosen = attempt
            if tol > rank_tol:
                notes.append("rank tolerance relaxed to %g for extraction" % tol)
            break

    if chosen is None:
        vcands, xsets, flat, _, _, sub_notes = _attempt_extraction(
            y, info, views, cliques, n, rank_tol, match_tol, seed
        )
        notes.extend(sub_notes)
        heur = np.array([y.get(Exponent.unit(k), 0.0) for k in range(1, n + 1)])
        minimizers = [heur]
        certified = False
        notes.append("falling back to first-order moments as a heuristic point")
    else:
        vcands, xsets, flat, minimizers, certified, sub_notes = chosen
        notes.extend(sub_notes)

    if polish and minimizers:
        # certified points sit in the right basins, so the polish stays in
        # a tight box around them; anything weaker is a guess and the
        # descent may travel as far as it needs to
        minimizers = _polish(
            f,
            minimizers,
            match_tol,
            None if certified else np.inf,
            bound=bound,
            seed=seed,
        )

    errors = [accuracy(f, x, bound) for x in minimizers]
    return ExtractionResult(
        variable_candidates=vcands,
        clique_candidates=xsets,
        minimizers=minimizers,
        errors=errors,
        block_ranks=base_ranks,
        flat=flat,
        certified=certified,
        notes=notes,
    )
