"""Polynomial core: exponents, arithmetic, parsing, decomposition, cliques.

Arithmetic and calculus are checked against sympy as an independent
oracle; structural properties (round trips, decomposition reassembly,
running intersection orders) are checked with hypothesis where a random
instance is as good as a crafted one.
"""

import fractions
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsesos.poly import (
    Clique,
    DecompositionError,
    Exponent,
    ParseError,
    Polynomial,
    SparseSum,
    csp_graph,
    monomial_decompose,
    monomials,
    newton_half_support,
    parse_polynomial,
    rip_check,
)

from conftest import as_sum


def to_sympy(p, symbols):
    expr = sympy.Integer(0)
    for exp, coeff in p.terms.items():
        term = sympy.Float(coeff, 17)
        for var, power in exp.items:
            term *= symbols[var - 1] ** power
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, symbols, n):
    poly = sympy.Poly(expr, *symbols)
    terms = {}
    for powers, coeff in poly.terms():
        exp = Exponent([(i + 1, int(k)) for i, k in enumerate(powers) if k])
        terms[exp] = float(coeff)
    return Polynomial(n, terms)


coeffs = st.integers(min_value=-9, max_value=9).map(float)


@st.composite
def polynomials(draw, n=3, max_degree=4, max_terms=6):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        # a monomial of degree <= max_degree as a multiset of variables
        factors = draw(st.lists(st.integers(1, n), max_size=max_degree))
        exp = Exponent([(v, factors.count(v)) for v in set(factors)])
        terms[exp] = draw(coeffs)
    return Polynomial(n, terms)


# ---------------------------------------------------------------------------
# exponents and monomial bases


class TestExponent:
    def test_unit_and_power(self):
        e = Exponent.unit(2, 3)
        assert e.power(2) == 3 and e.power(1) == 0
        assert e.degree == 3
        assert e.support == (2,)

    def test_addition_merges_powers(self):
        a = Exponent([(1, 2), (3, 1)])
        b = Exponent([(1, 1), (2, 4)])
        c = a + b
        assert c.power(1) == 3 and c.power(2) == 4 and c.power(3) == 1

    def test_even_and_halve(self):
        e = Exponent([(1, 2), (2, 4)])
        assert e.is_even()
        assert e.halve() == Exponent([(1, 1), (2, 2)])
        assert not Exponent([(1, 3)]).is_even()

    def test_dense_round_trip(self):
        e = Exponent([(1, 2), (3, 1)])
        dense = e.as_dense(4)
        assert list(dense) == [2, 0, 1, 0]
        assert Exponent.from_dense(dense) == e

    def test_grlex_orders_by_degree_first(self):
        x1, x2 = Exponent.unit(1), Exponent.unit(2)
        assert x1 < x1 + x1
        assert x2 < x1 + x2
        # same degree: lexicographic on the dense vector, x1^2 before x1 x2
        assert sorted([x1 + x2, x1 + x1]) == [x1 + x1, x1 + x2]

    def test_monomials_count_matches_binomial(self):
        for nv, d in [(1, 3), (2, 2), (3, 4), (4, 2)]:
            basis = monomials(range(1, nv + 1), d)
            assert len(basis) == math.comb(nv + d, d)
            assert basis[0] == Exponent.zero()
            degrees = [e.degree for e in basis]
            assert degrees == sorted(degrees)
            assert len(set(basis)) == len(basis)

    def test_monomials_respect_variable_subset(self):
        basis = monomials((2, 5), 2)
        assert all(set(e.support) <= {2, 5} for e in basis)
        assert len(basis) == 6


# ---------------------------------------------------------------------------
# polynomial arithmetic against sympy


class TestArithmetic:
    symbols = sympy.symbols("x1 x2 x3")

    def random_pair(self, seed):
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(2):
            terms = {}
            for _ in range(rng.integers(1, 6)):
                powers = rng.integers(0, 3, size=3)
                exp = Exponent([(i + 1, int(p)) for i, p in enumerate(powers) if p])
                terms[exp] = float(rng.integers(-5, 6))
            out.append(Polynomial(3, terms))
        return out

    @pytest.mark.parametrize("seed", range(8))
    def test_product_matches_sympy(self, seed):
        p, q = self.random_pair(seed)
        ours = to_sympy(p * q, self.symbols)
        theirs = sympy.expand(to_sympy(p, self.symbols) * to_sympy(q, self.symbols))
        assert sympy.simplify(ours - theirs) == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_sum_and_difference_match_sympy(self, seed):
        p, q = self.random_pair(seed)
        assert sympy.simplify(
            to_sympy(p + q, self.symbols)
            - to_sympy(p, self.symbols)
            - to_sympy(q, self.symbols)
        ) == 0
        assert sympy.simplify(
            to_sympy(p - q, self.symbols)
            - to_sympy(p, self.symbols)
            + to_sympy(q, self.symbols)
        ) == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_derivative_matches_sympy(self, seed):
        p, _ = self.random_pair(seed)
        for var in (1, 2, 3):
            ours = to_sympy(p.differentiate(var), self.symbols)
            theirs = sympy.expand(
                sympy.diff(to_sympy(p, self.symbols), self.symbols[var - 1])
            )
            assert sympy.simplify(ours - theirs) == 0

    @pytest.mark.parametrize("seed", range(4))
    def test_evaluate_matches_substitution(self, seed):
        p, q = self.random_pair(seed)
        rng = np.random.default_rng(seed + 100)
        x = rng.uniform(-2, 2, size=3)
        subs = dict(zip(self.symbols, x))
        expected = float(to_sympy(p, self.symbols).evalf(subs=subs))
        assert p.evaluate(x) == pytest.approx(expected, rel=1e-12, abs=1e-12)
        assert (p * q).evaluate(x) == pytest.approx(
            p.evaluate(x) * q.evaluate(x), rel=1e-12, abs=1e-9
        )

    def test_power_is_repeated_product(self):
        p = parse_polynomial("x1 - x2", 2)
        assert p ** 3 == p * p * p
        assert p ** 0 == Polynomial.constant(2, 1.0)

    def test_compose_matches_sympy_substitution(self):
        p = parse_polynomial("x1^2*x2 - 2*x2 + 1", 2)
        sub1 = parse_polynomial("x1 + x3", 3)
        sub2 = parse_polynomial("x2^2", 3)
        composed = p.compose({1: sub1, 2: sub2}, 3)
        y1, y2, y3 = sympy.symbols("y1 y2 y3")
        expected = sympy.expand((y1 + y3) ** 2 * y2**2 - 2 * y2**2 + 1)
        assert sympy.simplify(to_sympy(composed, (y1, y2, y3)) - expected) == 0

    def test_zero_and_constant_identities(self):
        z = Polynomial.zero(2)
        p = parse_polynomial("3*x1*x2", 2)
        assert (p + z) == p
        assert (p * z).is_zero()
        assert Polynomial.constant(2, 0.0).is_zero()
        assert p.scale(0.0).is_zero()


@given(polynomials(), polynomials())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q):
    assert p + q == q + p
    assert p * q == q * p
    x = np.array([0.7, -1.3, 0.21])
    lhs = (p * q).evaluate(x)
    rhs = p.evaluate(x) * q.evaluate(x)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-8)


@given(polynomials(), polynomials(), polynomials())
@settings(max_examples=40, deadline=None)
def test_distributivity(p, q, r):
    assert p * (q + r) == p * q + p * r


# ---------------------------------------------------------------------------
# text format


class TestParsing:
    def test_round_trip_fixed(self):
        texts = [
            "x1^4 - 2*x1^2 + 1",
            "0.5*x1^2 + 2*x1*x2 + 0.5*x2^2",
            "-x3 + 4",
            "2.25",
            "x1*x2*x3",
        ]
        for text in texts:
            p = parse_polynomial(text, 3)
            assert parse_polynomial(p.to_text(), 3) == p

    @given(polynomials())
    @settings(max_examples=80, deadline=None)
    def test_round_trip_random(self, p):
        assert parse_polynomial(p.to_text(), 3) == p

    def test_signs_and_implicit_coefficients(self):
        p = parse_polynomial("-x1 + x2 - 1", 2)
        assert p.coefficient(Exponent.unit(1)) == -1.0
        assert p.coefficient(Exponent.unit(2)) == 1.0
        assert p.coefficient(Exponent.zero()) == -1.0

    def test_scientific_notation_coefficients(self):
        p = parse_polynomial("1e-5*x1^2 + 2.5e3", 1)
        assert p.coefficient(Exponent.unit(1, 2)) == 1e-5
        assert p.coefficient(Exponent.zero()) == 2.5e3

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as info:
            parse_polynomial("x1^$", 2)
        assert info.value.position == 3
        assert "position 3" in str(info.value)

    def test_out_of_range_variable(self):
        with pytest.raises(ParseError):
            parse_polynomial("x3 + 1", 2)

    def test_rejects_empty_and_dangling(self):
        for bad in ["", "   ", "x1 +", "* x1", "x1^^2", "x0"]:
            with pytest.raises(ParseError):
                parse_polynomial(bad, 2)

    def test_repeated_factors_accumulate(self):
        p = parse_polynomial("x1*x1*x1", 1)
        assert p == parse_polynomial("x1^3", 1)


# ---------------------------------------------------------------------------
# cliques and sparse sums


class TestClique:
    def test_sorts_and_dedupes(self):
        c = Clique([3, 1, 3, 2])
        assert c.variables == (1, 2, 3)
        assert list(c) == [1, 2, 3]
        assert len(c) == 3
        assert 2 in c and 5 not in c

    def test_covers(self):
        assert Clique([1, 2, 4]).covers([2, 4])
        assert not Clique([1, 2]).covers([3])

    def test_rejects_nonpositive_indices(self):
        with pytest.raises(ValueError):
            Clique([0, 1])
        with pytest.raises(ValueError):
            Clique([])


class TestSparseSum:
    def test_basic_properties(self, worked_quartic):
        f = worked_quartic
        assert f.m == 3
        assert f.d == 2
        assert f.delta_norm == 2
        assert f.half_degrees == (2, 2, 2)

    def test_expand_total_equals_sum(self, worked_quartic):
        total = worked_quartic.expand_total()
        direct = Polynomial.zero(3)
        for _, poly in worked_quartic.summands:
            direct = direct + poly
        assert total == direct

    def test_evaluate_matches_expansion(self, worked_quartic):
        rng = np.random.default_rng(5)
        for _ in range(5):
            x = rng.uniform(-2, 2, size=3)
            assert worked_quartic.evaluate(x) == pytest.approx(
                worked_quartic.expand_total().evaluate(x), rel=1e-12
            )

    def test_rejects_odd_degree_summand(self):
        with pytest.raises(ValueError, match="odd degree"):
            as_sum(2, [((1,), "x1^3")])

    def test_rejects_zero_summand(self):
        with pytest.raises(ValueError, match="zero summand"):
            SparseSum(2, [(Clique([1]), Polynomial.zero(2))])

    def test_rejects_uncovered_variables(self):
        with pytest.raises(ValueError, match="outside"):
            as_sum(3, [((1, 2), "x3^2")])

    def test_rejects_clique_beyond_n(self):
        with pytest.raises(ValueError, match="exceeds"):
            SparseSum(2, [(Clique([3]), parse_polynomial("1.0", 2))])

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="at least one"):
            SparseSum(2, [])

    def test_json_round_trip_is_exact(self, worked_quartic):
        clone = SparseSum.from_json(worked_quartic.to_json())
        assert clone.n == worked_quartic.n
        assert len(clone.summands) == len(worked_quartic.summands)
        for (c1, p1), (c2, p2) in zip(clone.summands, worked_quartic.summands):
            assert c1.variables == c2.variables
            assert p1 == p2

    def test_json_round_trip_preserves_awkward_floats(self):
        f = as_sum(1, [((1,), "1e-5*x1^2 + 0.1")])
        clone = SparseSum.from_json(f.to_json())
        (_, p) = clone.summands[0]
        assert p.coefficient(Exponent.unit(1, 2)) == 1e-5
        assert p.coefficient(Exponent.zero()) == 0.1


# ---------------------------------------------------------------------------
# decomposition of dense polynomials


class TestMonomialDecompose:
    def test_groups_by_support(self):
        p = parse_polynomial("x1^4 + x1^2 + x2^4 + x1^2*x2^2", 2)
        s = monomial_decompose(p)
        assert s.expand_total() == p
        supports = sorted(tuple(c.variables) for c, _ in s.summands)
        assert supports == [(1,), (1, 2), (2,)]

    def test_odd_support_group_is_absorbed(self):
        # x1*x2*x3 cannot stand alone (no even top monomial); it must ride
        # with a group whose clique covers it or absorb one inside it
        p = parse_polynomial("x1^4 + x1*x2*x3", 3)
        s = monomial_decompose(p)
        assert s.expand_total() == p
        assert all(poly.degree % 2 == 0 for _, poly in s.summands)
        for _, poly in s.summands:
            top = poly.degree
            assert any(e.degree == top and e.is_even() for e in poly.terms)

    def test_cross_term_merges_into_covering_group(self):
        # the pure cross group {1,2}: -2x1x2 has no even top; it joins a group
        p = parse_polynomial("x1^2 - 2*x1*x2 + x2^2", 2)
        s = monomial_decompose(p)
        assert s.expand_total() == p
        for _, poly in s.summands:
            assert any(
                e.degree == poly.degree and e.is_even() for e in poly.terms
            )

    def test_rejects_odd_total_degree(self):
        with pytest.raises(DecompositionError):
            monomial_decompose(parse_polynomial("x1^3 + x1", 1))

    def test_rejects_zero(self):
        with pytest.raises(DecompositionError):
            monomial_decompose(Polynomial.zero(2))

    def test_rejects_undecomposable_pure_odd(self):
        # a lone mixed quartic has even total degree but no even monomial
        # at the top and nothing to absorb
        with pytest.raises(DecompositionError):
            monomial_decompose(parse_polynomial("x1*x2*x3*x4", 4))

    @given(polynomials(n=3, max_degree=2, max_terms=4))
    @settings(max_examples=60, deadline=None)
    def test_squares_always_decompose_and_reassemble(self, p):
        if p.is_zero():
            return
        sq = p * p
        s = monomial_decompose(sq)
        assert s.expand_total() == sq
        assert all(c.covers(poly.variables()) for c, poly in s.summands)


# ---------------------------------------------------------------------------
# clique structure analysis


class TestCspGraph:
    def test_edges_from_shared_monomials(self, coupled_quartic):
        g = csp_graph(coupled_quartic)
        assert g.n == 3
        assert (1, 2) in g.edges and (2, 3) in g.edges
        assert (1, 3) not in g.edges
        assert g.neighbors(2) == {1, 3}

    def test_triangle_is_fully_connected(self, triangle_quadratic):
        g = csp_graph(triangle_quadratic)
        assert set(g.edges) >= {(1, 2), (2, 3), (1, 3)}


def _order_satisfies_rip(cliques, order, strict):
    seen = set()
    for idx, pos in enumerate(order):
        cur = set(cliques[pos].variables)
        if idx > 0:
            inter = cur & seen
            earlier = [set(cliques[prev].variables) for prev in order[:idx]]
            if strict:
                ok = any(inter < prev for prev in earlier)
            else:
                ok = any(inter <= prev for prev in earlier)
            if not ok:
                return False
        seen |= cur
    return True


class TestRip:
    def test_chain_has_order(self):
        cliques = [Clique([i, i + 1]) for i in range(1, 6)]
        res = rip_check(cliques)
        assert res.holds_nonstrict
        assert _order_satisfies_rip(cliques, res.order_nonstrict, strict=False)

    def test_cycle_has_no_order(self, triangle_quadratic):
        res = rip_check(triangle_quadratic.cliques)
        assert res.holds_nonstrict is False
        assert res.order_nonstrict is None
        assert res.holds is False

    def test_single_clique(self):
        res = rip_check([Clique([1, 2, 3])])
        assert res.order_nonstrict == (0,)

    def test_duplicate_cliques_collapse(self):
        # repeated variable sets do not change the union structure, so
        # they collapse to one representative before the search
        cliques = [Clique([1, 2]), Clique([1, 2]), Clique([2, 3])]
        res = rip_check(cliques)
        assert res.holds_nonstrict and res.holds
        assert set(res.order_nonstrict) == {0, 2}
        assert _order_satisfies_rip(cliques, res.order_nonstrict, strict=False)

    def test_strict_order_on_chain(self):
        cliques = [Clique([1, 2]), Clique([2, 3]), Clique([3, 4])]
        res = rip_check(cliques)
        assert res.holds
        assert _order_satisfies_rip(cliques, res.order, strict=True)

    @given(
        st.lists(
            st.frozensets(st.integers(1, 6), min_size=1, max_size=3),
            min_size=1,
            max_size=5,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_returned_orders_are_always_valid(self, rough):
        cliques = [Clique(sorted(s)) for s in rough]
        res = rip_check(cliques)
        firsts = sorted(
            {c.variables: i for i, c in reversed(list(enumerate(cliques)))}.values()
        )
        if res.order_nonstrict is not None:
            assert sorted(res.order_nonstrict) == firsts
            assert _order_satisfies_rip(cliques, res.order_nonstrict, False)
        if res.order is not None:
            assert sorted(res.order) == firsts
            assert _order_satisfies_rip(cliques, res.order, True)


class TestNewtonHalfSupport:
    def test_univariate_quartic(self):
        poly = parse_polynomial("x1^4 - 2*x1^2 + 1", 1)
        half = newton_half_support(poly, Clique([1]))
        assert set(half) == {
            Exponent.zero(),
            Exponent.unit(1),
            Exponent.unit(1, 2),
        }

    def test_support_is_covered_by_doubled_half(self):
        cases = [
            ("x1^2 + 1", (1,)),
            ("x1^2*x2^2 - 2*x1*x2 + 1", (1, 2)),
            ("x1^4 + x1^2*x2^2 - 2*x1*x2 + 1", (1, 2)),
        ]
        for text, vars_ in cases:
            poly = parse_polynomial(text, max(vars_))
            half = newton_half_support(poly, Clique(vars_))
            doubled = {a + b for a in half for b in half}
            assert set(poly.terms) <= doubled

    def test_smaller_than_full_basis(self):
        # the quartic (x1 x2 - 1)^2 + x1^4 needs no x2^2 or x2 alone
        poly = parse_polynomial("x1^4 + x1^2*x2^2 - 2*x1*x2 + 1", 2)
        half = newton_half_support(poly, Clique([1, 2]))
        full = monomials((1, 2), 2)
        assert len(half) < len(full)
        assert Exponent.unit(2, 2) not in half
