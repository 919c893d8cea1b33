"""Sparse multivariate polynomials, summand decompositions, and clique structure.

Polynomials are stored as maps from exponents to float64 coefficients.
Variables are 1-based (``x1 .. xn``) and monomial orderings are graded
lexicographic throughout: lower total degree first, then lexicographically
larger exponent vectors first (so for two variables the order is
``1, x1, x2, x1^2, x1*x2, x2^2, ...``).
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

__all__ = [
    "Exponent",
    "Polynomial",
    "Clique",
    "SparseSum",
    "CspGraph",
    "RipResult",
    "ParseError",
    "DecompositionError",
    "parse_polynomial",
    "monomials",
    "monomial_decompose",
    "csp_graph",
    "rip_check",
    "newton_half_support",
]


class ParseError(ValueError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DecompositionError(ValueError):
    """Raised when a polynomial admits no valid summand decomposition."""


class Exponent:
    """Immutable sparse exponent vector: a map from variable index to power.

    Zero powers are never stored. Instances are hashable and ordered by the
    graded lexicographic monomial order.
    """

    __slots__ = ("items", "degree", "_hash")

    items: tuple[tuple[int, int], ...]
    degree: int

    def __init__(self, items: Iterable[tuple[int, int]] = ()):
        cleaned = []
        for var, power in items:
            if power < 0:
                raise ValueError(f"negative power {power} for x{var}")
            if var < 1:
                raise ValueError(f"variable index {var} must be >= 1")
            if power:
                cleaned.append((int(var), int(power)))
        cleaned.sort()
        for (a, _), (b, _) in zip(cleaned, cleaned[1:]):
            if a == b:
                raise ValueError(f"duplicate variable index {a}")
        object.__setattr__(self, "items", tuple(cleaned))
        object.__setattr__(self, "degree", sum(p for _, p in cleaned))
        object.__setattr__(self, "_hash", hash(self.items))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Exponent is immutable")

    @staticmethod
    def zero() -> "Exponent":
        return _ZERO

    @staticmethod
    def unit(var: int, power: int = 1) -> "Exponent":
        return Exponent([(var, power)])

    @staticmethod
    def from_dense(vec: Sequence[int]) -> "Exponent":
        return Exponent([(i + 1, int(p)) for i, p in enumerate(vec) if p])

    def as_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n, dtype=np.int64)
        for var, power in self.items:
            out[var - 1] = power
        return out

    def power(self, var: int) -> int:
        for v, p in self.items:
            if v == var:
                return p
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.items)

    def is_even(self) -> bool:
        return all(p % 2 == 0 for _, p in self.items)

    def halve(self) -> "Exponent":
        return Exponent([(v, p // 2) for v, p in self.items])

    def __add__(self, other: "Exponent") -> "Exponent":
        acc = dict(self.items)
        for var, power in other.items:
            acc[var] = acc.get(var, 0) + power
        return Exponent(acc.items())

    def supported_on(self, variables: Iterable[int]) -> bool:
        allowed = set(variables)
        return all(v in allowed for v, _ in self.items)

    def grlex_key(self) -> tuple:
        # Negated powers make the lexicographically larger vector sort first
        # within a degree level, matching the usual grlex listing.
        return (self.degree, tuple((v, -p) for v, p in self.items))

    def __lt__(self, other: "Exponent") -> bool:
        return self.grlex_key() < other.grlex_key()

    def __eq__(self, other) -> bool:
        return isinstance(other, Exponent) and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.items:
            return "1"
        return "*".join(
            f"x{v}" if p == 1 else f"x{v}^{p}" for v, p in self.items
        )


_ZERO = Exponent()


def monomials(variables: Sequence[int], max_degree: int) -> list[Exponent]:
    """All monomials in the given variables up to ``max_degree``, grlex order."""
    ordered = sorted(variables)
    out: list[Exponent] = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(ordered, deg):
            acc: dict[int, int] = {}
            for v in combo:
                acc[v] = acc.get(v, 0) + 1
            out.append(Exponent(acc.items()))
    return out


class Polynomial:
    """A real polynomial in n variables with float64 coefficients.

    ``terms`` never stores a zero coefficient; the zero polynomial has an
    empty term map.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exponent, float] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        self.n = int(n)
        cleaned: dict[Exponent, float] = {}
        for exp, coeff in (terms or {}).items():
            c = float(coeff)
            if c == 0.0:
                continue
            if exp.items and exp.items[-1][0] > n:
                raise ValueError(
                    f"monomial {exp!r} references x{exp.items[-1][0]} but n={n}"
                )
            cleaned[exp] = c
        self.terms = cleaned

    @staticmethod
    def zero(n: int) -> "Polynomial":
        return Polynomial(n, {})

    @staticmethod
    def constant(n: int, value: float) -> "Polynomial":
        return Polynomial(n, {_ZERO: value})

    @staticmethod
    def variable(n: int, var: int) -> "Polynomial":
        return Polynomial(n, {Exponent.unit(var): 1.0})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        if not self.terms:
            return 0
        return max(e.degree for e in self.terms)

    @property
    def support(self) -> set[Exponent]:
        return set(self.terms)

    def variables(self) -> set[int]:
        used: set[int] = set()
        for e in self.terms:
            used.update(e.support)
        return used

    def coefficient(self, exp: Exponent) -> float:
        return self.terms.get(exp, 0.0)

    def sorted_terms(self, top_first: bool = False) -> list[tuple[Exponent, float]]:
        if top_first:
            # Highest total degree first, usual grlex order within a degree.
            key = lambda t: (-t[0].degree, tuple((v, -p) for v, p in t[0].items))
        else:
            key = lambda t: t[0].grlex_key()
        return sorted(self.terms.items(), key=key)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if self.n != other.n:
            raise ValueError("variable counts differ")
        acc = dict(self.terms)
        for exp, coeff in other.terms.items():
            acc[exp] = acc.get(exp, 0.0) + coeff
        return Polynomial(self.n, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {e: -c for e, c in self.terms.items()})

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial(self.n, {e: c * factor for e, c in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.n != other.n:
            raise ValueError("variable counts differ")
        acc: dict[Exponent, float] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = e1 + e2
                acc[key] = acc.get(key, 0.0) + c1 * c2
        return Polynomial(self.n, acc)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.n, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, x: Sequence[float]) -> float:
        if len(x) < self.n:
            raise ValueError(f"point has {len(x)} coordinates, need {self.n}")
        total = 0.0
        for exp, coeff in self.terms.items():
            term = coeff
            for var, power in exp.items:
                term *= x[var - 1] ** power
            total += term
        return total

    def differentiate(self, var: int) -> "Polynomial":
        """Partial derivative with respect to ``x_var``."""
        acc: dict[Exponent, float] = {}
        for exp, coeff in self.terms.items():
            power = exp.power(var)
            if power == 0:
                continue
            lowered = Exponent(
                [(v, p - 1 if v == var else p) for v, p in exp.items]
            )
            acc[lowered] = acc.get(lowered, 0.0) + coeff * power
        return Polynomial(self.n, acc)

    def to_dense_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (exponent matrix T x n, coefficient vector) in grlex order."""
        items = self.sorted_terms()
        exps = np.zeros((len(items), self.n), dtype=np.int64)
        coeffs = np.zeros(len(items))
        for i, (exp, coeff) in enumerate(items):
            for var, power in exp.items:
                exps[i, var - 1] = power
            coeffs[i] = coeff
        return exps, coeffs

    def compose(self, substitutions: Mapping[int, "Polynomial"], n_out: int) -> "Polynomial":
        """Substitute a polynomial for each variable (missing vars are errors)."""
        out = Polynomial.zero(n_out)
        for exp, coeff in self.terms.items():
            term = Polynomial.constant(n_out, coeff)
            for var, power in exp.items:
                if var not in substitutions:
                    raise ValueError(f"no substitution given for x{var}")
                term = term * (substitutions[var] ** power)
            out = out + term
        return out

    def allclose(self, other: "Polynomial", tol: float = 0.0) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= tol for k in keys
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.n == other.n
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def to_text(self) -> str:
        """Canonical text form; ``parse_polynomial`` inverts it exactly."""
        if not self.terms:
            return "0"
        parts: list[str] = []
        for exp, coeff in self.sorted_terms(top_first=True):
            mag = abs(coeff)
            body = _format_coefficient(mag)
            if exp.items:
                mono = "*".join(
                    f"x{v}" if p == 1 else f"x{v}^{p}" for v, p in exp.items
                )
                body = mono if mag == 1.0 else f"{body}*{mono}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial(n={self.n}, {self.to_text()!r})"


def _format_coefficient(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x(?P<index>\d+))"
    r"|(?P<op>[-+*^()])"
    r")"
)


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse a sum of terms like ``2*x1^2*x3 - x2 + 1.5`` into a Polynomial.

    Each term is an optional sign, an optional numeric coefficient, and zero
    or more ``*``-joined factors ``x<i>`` or ``x<i>^<p>``. Raises ParseError
    with the character position on malformed input or out-of-range indices.
    """
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.group("number") is not None:
            tokens.append(("num", m.group("number"), m.start("number")))
        elif m.group("var") is not None:
            tokens.append(("var", m.group("index"), m.start("var")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    if not tokens:
        raise ParseError("empty polynomial text", 0)

    terms: dict[Exponent, float] = {}
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None, len(text))

    while i < len(tokens):
        sign = 1.0
        kind, value, at = peek()
        while kind == "op" and value in "+-":
            if value == "-":
                sign = -sign
            i += 1
            kind, value, at = peek()
        if kind is None:
            raise ParseError("dangling sign", at)

        coeff = sign
        powers: dict[int, int] = {}
        saw_factor = False
        expect_factor = True
        while True:
            kind, value, at = peek()
            if kind == "num" and expect_factor:
                coeff *= float(value)
                saw_factor = True
            elif kind == "var" and expect_factor:
                index = int(value)
                if index < 1 or index > n:
                    raise ParseError(f"variable x{index} out of range 1..{n}", at)
                power = 1
                if i + 1 < len(tokens) and tokens[i + 1][:2] == ("op", "^"):
                    if i + 2 >= len(tokens) or tokens[i + 2][0] != "num":
                        raise ParseError("expected integer power after '^'", at)
                    raw = tokens[i + 2][1]
                    if not raw.isdigit():
                        raise ParseError(f"power must be a nonnegative integer, got {raw!r}", tokens[i + 2][2])
                    power = int(raw)
                    i += 2
                powers[index] = powers.get(index, 0) + power
                saw_factor = True
            else:
                raise ParseError("expected a coefficient or variable", at)
            i += 1
            kind, value, at = peek()
            if kind == "op" and value == "*":
                i += 1
                expect_factor = True
                continue
            break
        if not saw_factor:
            raise ParseError("empty term", at)
        kind, value, at = peek()
        if kind is not None and not (kind == "op" and value in "+-"):
            raise ParseError(f"unexpected token {value!r}", at)
        exp = Exponent(powers.items())
        terms[exp] = terms.get(exp, 0.0) + coeff

    return Polynomial(n, terms)


@dataclass(frozen=True)
class Clique:
    """A sorted tuple of 1-based variable indices."""

    variables: tuple[int, ...]

    def __init__(self, variables: Iterable[int]):
        vs = tuple(sorted(set(int(v) for v in variables)))
        if not vs:
            raise ValueError("clique must be nonempty")
        if vs[0] < 1:
            raise ValueError("variable indices are 1-based")
        object.__setattr__(self, "variables", vs)

    def __iter__(self) -> Iterator[int]:
        return iter(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def __contains__(self, var: int) -> bool:
        return var in self.variables

    def covers(self, variables: Iterable[int]) -> bool:
        return set(variables) <= set(self.variables)

    def __le__(self, other: "Clique") -> bool:
        return set(self.variables) <= set(other.variables)

    def __lt__(self, other: "Clique") -> bool:
        return self.variables < other.variables

    def __repr__(self) -> str:
        return f"Clique({list(self.variables)})"


class SparseSum:
    """A polynomial given as a sum of small polynomials f = sum_i f_i.

    Each summand f_i comes with a clique Delta_i covering its variables and
    must be a nonzero polynomial of even total degree.
    """

    def __init__(self, n: int, summands: Iterable[tuple[Clique, Polynomial]]):
        self.n = int(n)
        pairs = []
        for clique, poly in summands:
            if not isinstance(clique, Clique):
                clique = Clique(clique)
            if max(clique.variables) > self.n:
                raise ValueError(f"clique {clique!r} exceeds n={self.n}")
            if poly.is_zero():
                raise ValueError("zero summand is not allowed")
            if poly.degree % 2 != 0:
                raise ValueError(
                    f"summand {poly.to_text()!r} has odd degree {poly.degree}"
                )
            if not all(e.supported_on(clique.variables) for e in poly.terms):
                raise ValueError(
                    f"summand {poly.to_text()!r} uses variables outside {clique!r}"
                )
            pairs.append((clique, poly))
        if not pairs:
            raise ValueError("need at least one summand")
        self.summands: tuple[tuple[Clique, Polynomial], ...] = tuple(pairs)

    @property
    def m(self) -> int:
        return len(self.summands)

    @property
    def half_degrees(self) -> tuple[int, ...]:
        return tuple(max(1, (p.degree + 1) // 2) if p.degree else 0 for _, p in self.summands)

    @property
    def d(self) -> int:
        """Half of the maximal summand degree (the uniform relaxation order)."""
        return max(p.degree for _, p in self.summands) // 2

    @property
    def delta_norm(self) -> int:
        return max(len(c) for c, _ in self.summands)

    @property
    def cliques(self) -> list[Clique]:
        return [c for c, _ in self.summands]

    def expand_total(self) -> Polynomial:
        """Merge all summands into one global polynomial."""
        total = Polynomial.zero(self.n)
        for _, poly in self.summands:
            total = total + poly
        return total

    def evaluate(self, x: Sequence[float]) -> float:
        return sum(poly.evaluate(x) for _, poly in self.summands)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "summands": [
                {"clique": list(c.variables), "poly": p.to_text()}
                for c, p in self.summands
            ],
        }
        return json.dumps(payload, indent=2)

    @staticmethod
    def from_json(text: str) -> "SparseSum":
        payload = json.loads(text)
        n = int(payload["n"])
        summands = [
            (Clique(entry["clique"]), parse_polynomial(entry["poly"], n))
            for entry in payload["summands"]
        ]
        return SparseSum(n, summands)

    def __repr__(self) -> str:
        return f"SparseSum(n={self.n}, m={self.m}, d={self.d}, |Delta|={self.delta_norm})"


def _group_is_valid(poly: Polynomial) -> bool:
    """A summand can stand alone if its top degree carries an even monomial."""
    deg = poly.degree
    if deg % 2 != 0:
        return False
    return any(e.degree == deg and e.is_even() for e in poly.terms)


def monomial_decompose(p: Polynomial) -> SparseSum:
    """Split a polynomial into summands keyed by monomial support.

    Terms sharing a support set form one summand with that support as its
    clique. Groups whose top degree has no even monomial (odd-degree groups,
    or purely mixed ones like ``x1*x2*x3*x4``) prefer not to stand alone;
    they are merged into the lexicographically smallest valid summand whose
    clique covers them, or absorb the smallest valid group inside their
    support. When neither exists, an even-degree group becomes a summand by
    itself (its even part is zero), which keeps dense quadratics with many
    cross terms decomposable. A polynomial with no even-topped group at all
    is rejected, as is an odd-degree group that nothing can host.
    """
    if p.is_zero():
        raise DecompositionError("cannot decompose the zero polynomial")
    if p.degree % 2 != 0:
        raise DecompositionError(f"total degree {p.degree} is odd")

    groups: dict[tuple[int, ...], Polynomial] = {}
    for exp, coeff in p.terms.items():
        key = exp.support if exp.items else (0,)
        cur = groups.get(key)
        add = Polynomial(p.n, {exp: coeff})
        groups[key] = add if cur is None else cur + add
    # A bare constant group attaches to the lexicographically first other group.
    if (0,) in groups and len(groups) > 1:
        const = groups.pop((0,))
        first = min(k for k in groups)
        groups[first] = groups[first] + const

    valid: dict[tuple[int, ...], Polynomial] = {}
    invalid: dict[tuple[int, ...], Polynomial] = {}
    for key, poly in groups.items():
        (valid if _group_is_valid(poly) else invalid)[key] = poly

    # Largest supports first so merged summands can host later groups.
    for key in sorted(invalid, key=lambda k: (-len(k), k)):
        poly = invalid[key]
        support = set(key) - {0}
        hosts = [
            k for k, q in valid.items()
            if support <= set(k) and q.degree >= poly.degree
        ]
        if hosts:
            host = min(hosts)
            valid[host] = valid[host] + poly
            continue
        donors = [
            k for k, q in valid.items()
            if set(k) <= support and q.degree >= poly.degree
        ]
        if donors:
            donor = min(donors)
            merged = valid.pop(donor) + poly
            valid[tuple(sorted(support))] = merged
            continue
        if poly.degree % 2 == 0 and valid:
            # Last resort: let the group stand alone with a zero even part.
            # The moment matrix over its clique still reaches every term
            # through off-diagonal products, so the relaxation stays exact
            # where it should be (dense convex quadratics in particular).
            valid[tuple(sorted(support))] = poly
            continue
        raise DecompositionError(
            f"summand {poly.to_text()!r} has no even-degree cover; "
            "it cannot stand alone"
        )

    summands = [
        (Clique(k if k != (0,) else (1,)), poly)
        for k, poly in sorted(valid.items())
    ]
    return SparseSum(max(p.n, 1), summands)


@dataclass(frozen=True)
class CspGraph:
    """Variable-interaction graph: vertices 1..n, edges between co-occurring vars."""

    n: int
    edges: frozenset[tuple[int, int]]

    def neighbors(self, var: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == var:
                out.add(b)
            elif b == var:
                out.add(a)
        return out


def csp_graph(s: SparseSum) -> CspGraph:
    """Edge (i, j) is present iff x_i and x_j occur in one monomial together."""
    edges: set[tuple[int, int]] = set()
    for _, poly in s.summands:
        for exp in poly.terms:
            sup = exp.support
            for a, b in itertools.combinations(sup, 2):
                edges.add((a, b) if a < b else (b, a))
    return CspGraph(s.n, frozenset(edges))


@dataclass(frozen=True)
class RipResult:
    """Outcome of the running-intersection search, in both strictness variants.

    ``holds`` uses the proper-inclusion form (intersection strictly inside
    some earlier clique); ``holds_nonstrict`` allows equality. Each field is
    True/False when decided and None when the bounded search was inconclusive.
    """

    holds: bool | None
    order: tuple[int, ...] | None
    holds_nonstrict: bool | None
    order_nonstrict: tuple[int, ...] | None


def _rip_search(cliques: list[frozenset[int]], strict: bool, budget: int):
    m = len(cliques)
    if m == 1:
        return True, (0,)
    nodes = 0
    exhausted = True

    def admissible(prefix_union: frozenset[int], prefix: list[int], idx: int) -> bool:
        inter = cliques[idx] & prefix_union
        for k in prefix:
            ck = cliques[k]
            if inter <= ck and (not strict or inter != ck):
                return True
        return False

    def dfs(prefix: list[int], prefix_union: frozenset[int], remaining: set[int]):
        nonlocal nodes, exhausted
        if not remaining:
            return tuple(prefix)
        nodes += 1
        if nodes > budget:
            exhausted = False
            return None
        # Try high-overlap cliques first; this finds witness orders quickly.
        order = sorted(remaining, key=lambda i: (-len(cliques[i] & prefix_union), i))
        for idx in order:
            if not prefix or admissible(prefix_union, prefix, idx):
                prefix.append(idx)
                result = dfs(prefix, prefix_union | cliques[idx], remaining - {idx})
                if result is not None:
                    return result
                prefix.pop()
        return None

    witness = dfs([], frozenset(), set(range(m)))
    if witness is not None:
        return True, witness
    if exhausted:
        return False, None
    return None, None


def rip_check(cliques: Sequence[Clique], budget: int = 200_000) -> RipResult:
    """Search for an ordering with the running intersection property.

    Exhaustive (hence definitive) for up to 8 distinct cliques; above that a
    bounded backtracking search may return None fields meaning undetermined.
    Duplicate cliques are collapsed before searching.
    """
    first_pos: dict[tuple[int, ...], int] = {}
    for i, c in enumerate(cliques):
        first_pos.setdefault(c.variables, i)
    unique = [frozenset(v) for v in first_pos]
    if not unique:
        raise ValueError("need at least one clique")
    positions = list(first_pos.values())

    def remap(order):
        # witness orders index the deduplicated list; callers hold the
        # original one, so translate to first-occurrence positions
        if order is None:
            return None
        return tuple(positions[i] for i in order)

    effective_budget = budget if len(unique) > 8 else 10**9
    strict, strict_order = _rip_search(unique, True, effective_budget)
    nonstrict, nonstrict_order = _rip_search(unique, False, effective_budget)
    return RipResult(strict, remap(strict_order), nonstrict, remap(nonstrict_order))


def _in_hull(point: np.ndarray, generators: np.ndarray, tol: float = 1e-9) -> bool:
    """LP feasibility test: is point a convex combination of the generators."""
    g = generators.shape[0]
    a_eq = np.vstack([generators.T.astype(float), np.ones((1, g))])
    b_eq = np.concatenate([point.astype(float), [1.0]])
    res = linprog(
        np.zeros(g), A_eq=a_eq, b_eq=b_eq, bounds=(0.0, 1.0), method="highs"
    )
    if not res.success:
        return False
    return float(np.max(np.abs(a_eq @ res.x - b_eq))) <= tol


def newton_half_support(poly: Polynomial, clique: Clique) -> tuple[Exponent, ...]:
    """Lattice points of the convex hull of half the even support of ``poly``.

    These exponents index the square-free block basis for the summand: every
    monomial of ``poly`` lies in the Minkowski sum of the result with itself.
    """
    if poly.is_zero():
        raise ValueError("support is empty: zero summand")
    if not all(e.supported_on(clique.variables) for e in poly.terms):
        raise ValueError("summand uses variables outside its clique")
    gens = [e.halve() for e in poly.terms if e.is_even()]
    if not gens:
        raise ValueError(
            "no even monomial in support: half support is undefined"
        )
    coords = sorted({v for g in gens for v in g.support})
    gen_mat = np.array(
        [[g.power(v) for v in coords] for g in gens], dtype=np.int64
    ).reshape(len(gens), len(coords))
    max_deg = max(g.degree for g in gens)
    min_deg = min(g.degree for g in gens)
    box = gen_mat.max(axis=0) if coords else np.zeros(0, dtype=np.int64)

    gen_set = {g for g in gens}
    found = set(gen_set)
    for combo in itertools.product(*(range(int(b) + 1) for b in box)):
        deg = sum(combo)
        if deg > max_deg or deg < min_deg:
            continue
        cand = Exponent([(v, p) for v, p in zip(coords, combo) if p])
        if cand in found:
            continue
        if _in_hull(np.array(combo, dtype=np.int64), gen_mat):
            found.add(cand)
    if not coords:
        found = {Exponent.zero()}
    return tuple(sorted(found, key=Exponent.grlex_key))
