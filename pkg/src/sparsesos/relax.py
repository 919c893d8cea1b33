"""Moment/SOS relaxations of polynomial minimization problems.

Three relaxation kinds are supported, ordered by block size:

* dense: one moment matrix over all monomials up to half the total degree;
* sparse-clique: one block per summand clique, full monomial basis on the
  clique, all blocks coupled through shared moment variables;
* sparser-support: one block per summand, indexed by the lattice points of
  half its even Newton support, usually far smaller than the clique basis.

The lower bounds satisfy sparser <= sparse <= dense <= true minimum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .poly import (
    Clique,
    Exponent,
    Polynomial,
    SparseSum,
    monomial_decompose,
    monomials,
    newton_half_support,
)
from .sdp import LmiBlock, LmiSdp

__all__ = [
    "RelaxationKind",
    "RelaxationInfo",
    "build_dense",
    "build_sparse",
    "build_sparser",
    "build_relaxation",
    "verify_sos_certificate",
]


class RelaxationKind(enum.Enum):
    DENSE = "dense"
    SPARSE_CLIQUE = "sparse"
    SPARSER_SUPPORT = "sparser"

    @staticmethod
    def parse(name: str) -> "RelaxationKind":
        for kind in RelaxationKind:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown relaxation kind {name!r}")


@dataclass(frozen=True)
class RelaxationInfo:
    """Structure of a built relaxation, used by extraction and reporting."""

    kind: RelaxationKind
    n: int
    d: int
    block_labels: tuple[tuple[Exponent, ...], ...]
    block_cliques: tuple[Clique, ...]
    exponents: tuple[Exponent, ...]

    @property
    def block_sizes(self) -> list[int]:
        return [len(l) for l in self.block_labels]

    @property
    def num_moments(self) -> int:
        return len(self.exponents)


def _assemble(
    objective: Polynomial,
    n: int,
    d: int,
    kind: RelaxationKind,
    block_data: list[tuple[Clique, tuple[Exponent, ...]]],
) -> tuple[LmiSdp, RelaxationInfo]:
    """Build the LMI problem from per-block label bases.

    The moment variable set is exactly the set of pairwise label sums, so a
    coefficient of the objective falling outside it is a structural error.
    """
    seen: set[tuple[tuple[Exponent, ...], tuple[int, ...]]] = set()
    deduped: list[tuple[Clique, tuple[Exponent, ...]]] = []
    for clique, labels in block_data:
        key = (labels, clique.variables)
        if key in seen:
            continue
        seen.add(key)
        deduped.append((clique, labels))

    zero = Exponent.zero()
    moment_set: set[Exponent] = {zero}
    for _, labels in deduped:
        for i, a in enumerate(labels):
            for b in labels[i:]:
                moment_set.add(a + b)
    for exp in objective.terms:
        if exp not in moment_set:
            raise ValueError(
                f"objective monomial {exp!r} is not covered by any block; "
                "the relaxation cannot represent it"
            )
    exponents = sorted(moment_set, key=Exponent.grlex_key)
    var_of = {e: i - 1 for i, e in enumerate(exponents)}

    blocks = []
    for clique, labels in deduped:
        size = len(labels)
        const = np.zeros((size, size))
        var_ids, rows, cols = [], [], []
        for r in range(size):
            for c in range(size):
                s = labels[r] + labels[c]
                if s == zero:
                    const[r, c] = 1.0
                else:
                    var_ids.append(var_of[s])
                    rows.append(r)
                    cols.append(c)
        blocks.append(
            LmiBlock(
                size,
                const,
                np.array(var_ids, dtype=np.int64),
                np.array(rows, dtype=np.int64),
                np.array(cols, dtype=np.int64),
                np.ones(len(var_ids)),
                labels,
            )
        )

    obj = np.zeros(len(exponents))
    for exp, coeff in objective.terms.items():
        obj[var_of[exp] + 1] = coeff

    problem = LmiSdp(exponents, obj, blocks)
    info = RelaxationInfo(
        kind=kind,
        n=n,
        d=d,
        block_labels=tuple(labels for _, labels in deduped),
        block_cliques=tuple(clique for clique, _ in deduped),
        exponents=tuple(exponents),
    )
    return problem, info


def build_dense(f: Polynomial) -> tuple[LmiSdp, RelaxationInfo]:
    """Single-block relaxation over all monomials of degree <= deg(f)/2."""
    if f.is_zero():
        raise ValueError("cannot relax the zero polynomial")
    if f.degree % 2 != 0:
        raise ValueError(f"total degree {f.degree} is odd; no SOS bound exists")
    d = f.degree // 2
    clique = Clique(range(1, f.n + 1))
    labels = tuple(monomials(clique.variables, d))
    return _assemble(f, f.n, d, RelaxationKind.DENSE, [(clique, labels)])


def build_sparse(s: SparseSum) -> tuple[LmiSdp, RelaxationInfo]:
    """One clique block per summand at the uniform order d = max_i d_i.

    Blocks with identical clique and basis are merged; this leaves the
    feasible set unchanged because same-basis square systems add.
    """
    d = max(s.d, 1)
    block_data = [
        (clique, tuple(monomials(clique.variables, d))) for clique, _ in s.summands
    ]
    return _assemble(
        s.expand_total(), s.n, d, RelaxationKind.SPARSE_CLIQUE, block_data
    )


def build_sparser(s: SparseSum) -> tuple[LmiSdp, RelaxationInfo]:
    """One block per summand indexed by its even Newton half support."""
    d = max(s.d, 1)
    block_data = [
        (clique, newton_half_support(poly, clique)) for clique, poly in s.summands
    ]
    return _assemble(
        s.expand_total(), s.n, d, RelaxationKind.SPARSER_SUPPORT, block_data
    )


def build_relaxation(
    problem: Polynomial | SparseSum, kind: RelaxationKind
) -> tuple[LmiSdp, RelaxationInfo]:
    """Dispatch on relaxation kind; dense accepts either problem form."""
    if kind is RelaxationKind.DENSE:
        f = problem.expand_total() if isinstance(problem, SparseSum) else problem
        return build_dense(f)
    if isinstance(problem, Polynomial):
        problem = monomial_decompose(problem)
    if kind is RelaxationKind.SPARSE_CLIQUE:
        return build_sparse(problem)
    return build_sparser(problem)


def verify_sos_certificate(
    problem: Polynomial | SparseSum,
    bound: float,
    gram: list[np.ndarray],
    info: RelaxationInfo,
) -> float:
    """Maximum coefficient error of the claimed identity

        f - bound = sum_i m_i(x)^T W_i m_i(x)

    computed by symbolic expansion of the right-hand side. The caller decides
    what tolerance is acceptable; 1e-6 * max(1, |f|_inf) is the usual gate.
    """
    f = problem.expand_total() if isinstance(problem, SparseSum) else problem
    acc: dict[Exponent, float] = {Exponent.zero(): float(bound)}
    for labels, w in zip(info.block_labels, gram):
        w = np.asarray(w)
        if w.shape != (len(labels), len(labels)):
            raise ValueError("Gram block shape does not match its label set")
        for r, a in enumerate(labels):
            for c, b in enumerate(labels):
                key = a + b
                acc[key] = acc.get(key, 0.0) + float(w[r, c])
    err = 0.0
    for key in set(acc) | set(f.terms):
        err = max(err, abs(acc.get(key, 0.0) - f.terms.get(key, 0.0)))
    return err
