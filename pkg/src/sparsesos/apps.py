"""Instance generators and problem front-ends.

Named benchmark families with known global minimum zero, random
clique-structured and dense instances, least squares formulations of
sparse polynomial systems, two-point boundary value discretization, and
sensor network localization.  All generators are deterministic under a
fixed seed (numpy's default PCG64 bit generator, whose state advance is
documented and portable).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .poly import Clique, Polynomial, SparseSum, monomials, parse_polynomial

__all__ = [
    "BenchmarkFamily",
    "BenchmarkSpec",
    "benchmark",
    "random_clique_instance",
    "random_dense_instance",
    "nls_from_system",
    "chain_quadratic_system",
    "BvpSpec",
    "bvp_basic",
    "bvp_cubic_forcing",
    "bvp_discretize",
    "SnlInstance",
    "snl_generate",
    "snl_objective",
    "rmsd",
]


def _var(n, i):
    return Polynomial.variable(n, i)


def _const(n, c):
    return Polynomial.constant(n, float(c))


# ---------------------------------------------------------------------------
# benchmark families


class BenchmarkFamily(Enum):
    CHAINED_SINGULAR = "chained-singular"
    CHAINED_WOOD = "chained-wood"
    GEN_ROSENBROCK = "gen-rosenbrock"
    BROYDEN_TRIDIAGONAL = "broyden-tridiagonal"
    BROYDEN_BANDED = "broyden-banded"
    DISCRETE_BOUNDARY_VALUE = "discrete-boundary-value"

    @staticmethod
    def parse(text):
        for fam in BenchmarkFamily:
            if fam.value == text:
                return fam
        raise ValueError(f"unknown benchmark family {text!r}")


@dataclass(frozen=True)
class BenchmarkSpec:
    """A named test function instance; every family has global minimum 0."""

    family: BenchmarkFamily
    n: int

    def __post_init__(self):
        fam, n = self.family, self.n
        if n < 1:
            raise ValueError("n must be positive")
        if fam in (BenchmarkFamily.CHAINED_SINGULAR, BenchmarkFamily.CHAINED_WOOD):
            if n % 4 != 0:
                raise ValueError(f"{fam.value} requires n divisible by 4")
        if fam is BenchmarkFamily.GEN_ROSENBROCK and n < 2:
            raise ValueError("generalized Rosenbrock requires n >= 2")

    def as_dict(self):
        return {"family": self.family.value, "n": self.n}


def benchmark(spec):
    """Build the SparseSum for a benchmark family instance.

    Each additive term of the defining formula becomes one summand with
    its own clique of variables, which is what the clique-based
    relaxation feeds on.
    """
    fam, n = spec.family, spec.n
    if fam is BenchmarkFamily.CHAINED_SINGULAR:
        return _chained_singular(n)
    if fam is BenchmarkFamily.CHAINED_WOOD:
        return _chained_wood(n)
    if fam is BenchmarkFamily.GEN_ROSENBROCK:
        return _gen_rosenbrock(n)
    if fam is BenchmarkFamily.BROYDEN_TRIDIAGONAL:
        return _broyden_tridiagonal(n)
    if fam is BenchmarkFamily.BROYDEN_BANDED:
        return _broyden_banded(n)
    if fam is BenchmarkFamily.DISCRETE_BOUNDARY_VALUE:
        return _discrete_boundary_value(n)
    raise ValueError(f"unhandled family {fam}")


def _chained_singular(n):
    # the 1e-5 factor keeps coefficients like 10^4 from swamping the solver
    scale = 1e-5
    parts = []
    for i in range(1, n - 2, 2):
        x = lambda j: _var(n, j)
        parts.append((Clique([i, i + 1]), ((x(i) + x(i + 1).scale(10.0)) ** 2).scale(scale)))
        parts.append((Clique([i + 2, i + 3]), ((x(i + 2) - x(i + 3)) ** 2).scale(5 * scale)))
        parts.append((Clique([i + 1, i + 2]), ((x(i + 1) - x(i + 2).scale(2.0)) ** 4).scale(scale)))
        parts.append((Clique([i, i + 3]), ((x(i) - x(i + 3).scale(10.0)) ** 4).scale(10 * scale)))
    return SparseSum(n, parts)


def _chained_wood(n):
    parts = []
    one = _const(n, 1.0)
    two = _const(n, 2.0)
    for i in range(1, n - 2, 2):
        x = lambda j: _var(n, j)
        parts.append((Clique([i, i + 1]), ((x(i + 1) - x(i) ** 2) ** 2).scale(100.0)))
        parts.append((Clique([i]), (one - x(i)) ** 2))
        parts.append((Clique([i + 2, i + 3]), ((x(i + 3) - x(i + 2) ** 2) ** 2).scale(90.0)))
        parts.append((Clique([i + 2]), (one - x(i + 2)) ** 2))
        parts.append((Clique([i + 1, i + 3]), ((x(i + 1) + x(i + 3) - two) ** 2).scale(10.0)))
        parts.append((Clique([i + 1, i + 3]), ((x(i + 1) - x(i + 3)) ** 2).scale(0.1)))
    return SparseSum(n, parts)


def _gen_rosenbrock(n):
    parts = []
    one = _const(n, 1.0)
    for i in range(2, n + 1):
        xi = _var(n, i)
        xprev = _var(n, i - 1)
        term = ((xi - xprev**2) ** 2).scale(100.0) + (one - xi) ** 2
        parts.append((Clique([i - 1, i]), term))
    return SparseSum(n, parts)


def _broyden_tridiagonal(n):
    parts = []
    for i in range(1, n + 1):
        xi = _var(n, i)
        g = (_const(n, 3.0) - xi.scale(2.0)) * xi + _const(n, 1.0)
        members = [i]
        if i > 1:
            g = g - _var(n, i - 1)
            members.append(i - 1)
        if i < n:
            g = g - _var(n, i + 1).scale(2.0)
            members.append(i + 1)
        parts.append((Clique(members), g * g))
    return SparseSum(n, parts)


def _broyden_banded(n):
    parts = []
    for i in range(1, n + 1):
        xi = _var(n, i)
        g = xi * (_const(n, 2.0) + xi.scale(10.0) * xi) + _const(n, 1.0)
        members = {i}
        for j in range(max(1, i - 5), min(n, i + 1) + 1):
            if j == i:
                continue
            xj = _var(n, j)
            g = g - (_const(n, 1.0) + xj) * xj
            members.add(j)
        parts.append((Clique(members), g * g))
    return SparseSum(n, parts)


def _discrete_boundary_value(n):
    h = 1.0 / (n + 1)
    parts = []
    for i in range(1, n + 1):
        t = i * h
        xi = _var(n, i)
        g = xi.scale(2.0) + ((xi + _const(n, t + 1.0)) ** 3).scale(0.5 * h * h)
        members = [i]
        if i > 1:
            g = g - _var(n, i - 1)
            members.append(i - 1)
        if i < n:
            g = g - _var(n, i + 1)
            members.append(i + 1)
        parts.append((Clique(members), g * g))
    return SparseSum(n, parts)


# ---------------------------------------------------------------------------
# random instances


def _random_positive_form(rng, n, variables, d):
    """f = m_d^T (n I + B B^T) m_d + b^T m_{2d-1} on the given variables."""
    basis = monomials(variables, d)
    size = len(basis)
    bmat = rng.random((size, size))
    amat = n * np.eye(size) + bmat @ bmat.T
    terms = {}
    for a in range(size):
        for b in range(size):
            key = basis[a] + basis[b]
            terms[key] = terms.get(key, 0.0) + amat[a, b]
    lower = monomials(variables, 2 * d - 1)
    coeffs = rng.random(len(lower))
    for exp, c in zip(lower, coeffs):
        terms[exp] = terms.get(exp, 0.0) + c
    return Polynomial(n, terms)


def random_clique_instance(n, m, d, delta_max, seed):
    """Random sum of m positive definite forms on random small cliques.

    Each summand is built on a random subset of at most ``delta_max``
    variables as m_d^T A m_d + b^T m_{2d-1} with A = n I + B B^T and the
    entries of B and b drawn uniformly from [0, 1).  The quadratic part
    dominates at infinity, so global minimizers exist.  Subset draws are
    repeated until every variable appears in some clique, keeping the
    instance fully determined; the retry loop is part of the seeded
    stream, so instances stay reproducible.
    """
    if delta_max > n:
        raise ValueError("delta_max cannot exceed n")
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = np.random.default_rng(seed)
    low = min(2, delta_max)
    for _ in range(1000):
        cliques = []
        for _ in range(m):
            size = int(rng.integers(low, delta_max + 1))
            members = rng.choice(n, size=size, replace=False) + 1
            cliques.append(Clique(members))
        if set().union(*(set(c) for c in cliques)) == set(range(1, n + 1)):
            break
    else:
        raise ValueError("could not cover all variables; increase m or delta_max")
    parts = []
    for cl in cliques:
        parts.append((cl, _random_positive_form(rng, n, tuple(cl), d)))
    return SparseSum(n, parts)


def random_dense_instance(n, d, seed):
    """Random dense polynomial m_d^T (n I + B B^T) m_d + b^T m_{2d-1}."""
    rng = np.random.default_rng(seed)
    return _random_positive_form(rng, n, tuple(range(1, n + 1)), d)


# ---------------------------------------------------------------------------
# least squares for polynomial systems


def nls_from_system(system):
    """Least squares objective sum g_i^2 for a sparse polynomial system.

    ``system`` is a list of (polynomial, clique) pairs with each
    polynomial supported on its clique.  When the system has a real
    solution, the sparse relaxation of the result is exact with bound 0,
    and the minimizers are exactly the real solutions.
    """
    if not system:
        raise ValueError("empty system")
    n = system[0][0].n
    parts = []
    for g, clique in system:
        if g.n != n:
            raise ValueError("inconsistent variable counts in system")
        parts.append((Clique(clique), g * g))
    return SparseSum(n, parts)


def chain_quadratic_system(n):
    """The quadratic chain system used as a least squares showcase.

    g_1 = 2x_1^2 - 3x_1 + 2x_2 - 1,
    g_i = 2x_i^2 + x_{i-1} - 3x_i + 2x_{i+1} - 1 for 1 < i < n,
    g_n = 2x_n^2 + x_{n-1} - 3x_n - 1.
    """
    if n < 2:
        raise ValueError("chain system needs n >= 2")
    system = []
    for i in range(1, n + 1):
        xi = _var(n, i)
        g = xi.scale(2.0) * xi - xi.scale(3.0)
        members = [i]
        if i > 1:
            g = g + _var(n, i - 1)
            members.append(i - 1)
        if i < n:
            g = g + _var(n, i + 1).scale(2.0)
            members.append(i + 1)
        g = g - _const(n, 1.0)
        system.append((g, Clique(members)))
    return system


# ---------------------------------------------------------------------------
# two-point boundary value problems

# template variables: 1 = t, 2 = x, 3 = x', 4 = x''
_T, _X, _XP, _XPP = 1, 2, 3, 4


@dataclass(frozen=True)
class BvpSpec:
    """Two-point boundary value problem F(t, x, x', x'') = 0 on [a, b].

    ``template`` is a polynomial in the four symbols t, x, x', x''
    (variable indices 1 to 4); boundary conditions x(a) = alpha and
    x(b) = beta; N interior mesh points.
    """

    template: Polynomial
    a: float
    b: float
    alpha: float
    beta: float
    N: int

    def __post_init__(self):
        if self.template.n != 4:
            raise ValueError("template must use exactly 4 symbols (t, x, x', x'')")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not self.b > self.a:
            raise ValueError("need b > a")

    @property
    def h(self):
        return (self.b - self.a) / (self.N + 1)

    def mesh(self):
        """Interior mesh points t_1..t_N."""
        return np.array([self.a + self.h * k for k in range(1, self.N + 1)])

    def as_dict(self):
        return {
            "template": self.template.to_text(),
            "a": self.a,
            "b": self.b,
            "alpha": self.alpha,
            "beta": self.beta,
            "N": self.N,
        }

    @staticmethod
    def from_dict(data):
        return BvpSpec(
            template=parse_polynomial(data["template"], 4),
            a=float(data["a"]),
            b=float(data["b"]),
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            N=int(data["N"]),
        )


def bvp_basic(N):
    """x'' - 2x^3 = 0 with x(0) = 1/2, x(1) = 1/3; exact x(t) = 1/(t+2)."""
    template = _var(4, _XPP) - (_var(4, _X) ** 3).scale(2.0)
    return BvpSpec(template, 0.0, 1.0, 0.5, 1.0 / 3.0, N)


def bvp_cubic_forcing(N):
    """x'' + (x + t)^3 / 2 = 0 with x(0) = x(1) = 0."""
    template = _var(4, _XPP) + ((_var(4, _X) + _var(4, _T)) ** 3).scale(0.5)
    return BvpSpec(template, 0.0, 1.0, 0.0, 0.0, N)


def bvp_discretize(spec):
    """Central difference discretization of a BVP as a polynomial system.

    Substitutes x' -> (x_{k+1} - x_{k-1}) / 2h and
    x'' -> (x_{k-1} - 2x_k + x_{k+1}) / h^2 at each interior point, with
    boundary values in place of x_0 and x_{N+1}, then multiplies the
    residual by h^2 so its coefficients stay of order one.  Returns the
    system as (polynomial, clique) pairs together with its least squares
    SparseSum; each residual touches at most x_{k-1}, x_k, x_{k+1}.
    """
    N = spec.N
    h = spec.h
    system = []
    for k in range(1, N + 1):
        t_k = spec.a + h * k

        def node(j):
            if j == 0:
                return _const(N, spec.alpha)
            if j == N + 1:
                return _const(N, spec.beta)
            return _var(N, j)

        subs = {
            _T: _const(N, t_k),
            _X: node(k),
            _XP: (node(k + 1) - node(k - 1)).scale(1.0 / (2 * h)),
            _XPP: (node(k - 1) - node(k).scale(2.0) + node(k + 1)).scale(1.0 / (h * h)),
        }
        g = spec.template.compose(subs, N).scale(h * h)
        members = [j for j in (k - 1, k, k + 1) if 1 <= j <= N]
        system.append((g, Clique(members)))
    return system, nls_from_system(system)


# ---------------------------------------------------------------------------
# sensor network localization


@dataclass(frozen=True)
class SnlInstance:
    """Planar localization instance with planted sensor positions.

    ``edges_a`` holds (i, j, squared distance) for sensor pairs and
    ``edges_b`` holds (i, k, squared distance) for sensor-anchor pairs,
    with 1-based sensor indices and 0-based anchor indices.  Squared
    distances are stored explicitly so that a serialized instance rebuilds
    the identical objective without recomputation drift.
    """

    n: int
    sensors: np.ndarray
    anchors: np.ndarray
    edges_a: tuple
    edges_b: tuple

    def to_json(self):
        return json.dumps(
            {
                "n": self.n,
                "sensors": self.sensors.tolist(),
                "anchors": self.anchors.tolist(),
                "edges_a": [[i, j, d2] for i, j, d2 in self.edges_a],
                "edges_b": [[i, k, e2] for i, k, e2 in self.edges_b],
            }
        )

    @staticmethod
    def from_json(text):
        data = json.loads(text)
        return SnlInstance(
            n=int(data["n"]),
            sensors=np.array(data["sensors"], dtype=float),
            anchors=np.array(data["anchors"], dtype=float),
            edges_a=tuple((int(i), int(j), float(d2)) for i, j, d2 in data["edges_a"]),
            edges_b=tuple((int(i), int(k), float(e2)) for i, k, e2 in data["edges_b"]),
        )


_SNL_RANGE = 0.3
_SNL_FORWARD_CAP = 10


def snl_generate(n, seed):
    """Random planar instance: n sensors in the unit square, 4 anchors.

    Sensors are uniform on [-0.5, 0.5]^2; anchors sit at (+-0.45,
    +-0.45).  Each sensor connects to its nearest forward neighbors
    (higher index) within range 0.3, at most 10 of them; anchors connect
    to every sensor within range.
    """
    rng = np.random.default_rng(seed)
    sensors = rng.uniform(-0.5, 0.5, size=(n, 2))
    anchors = np.array(
        [[0.45, 0.45], [0.45, -0.45], [-0.45, 0.45], [-0.45, -0.45]]
    )
    edges_a = []
    for i in range(n):
        cand = []
        for j in range(i + 1, n):
            dist = float(np.linalg.norm(sensors[i] - sensors[j]))
            if dist <= _SNL_RANGE:
                cand.append((dist, j))
        cand.sort()
        for dist, j in cand[:_SNL_FORWARD_CAP]:
            edges_a.append((i + 1, j + 1, dist * dist))
    edges_b = []
    for k in range(4):
        for i in range(n):
            dist = float(np.linalg.norm(sensors[i] - anchors[k]))
            if dist <= _SNL_RANGE:
                edges_b.append((i + 1, k, dist * dist))
    return SnlInstance(n, sensors, anchors, tuple(edges_a), tuple(edges_b))


def snl_objective(inst):
    """Quartic least squares objective over flattened sensor coordinates.

    Sensor i occupies variables (2i - 1, 2i).  Each distance equation
    contributes one summand (||x_i - x_j||^2 - d_ij^2)^2 on the clique of
    the coordinates involved; the planted positions give objective zero.
    """
    n = inst.n
    nv = 2 * n

    def coords(i):
        return _var(nv, 2 * i - 1), _var(nv, 2 * i)

    parts = []
    for i, j, d2 in inst.edges_a:
        xi, yi = coords(i)
        xj, yj = coords(j)
        g = (xi - xj) ** 2 + (yi - yj) ** 2 - _const(nv, d2)
        parts.append((Clique([2 * i - 1, 2 * i, 2 * j - 1, 2 * j]), g * g))
    for i, k, e2 in inst.edges_b:
        xi, yi = coords(i)
        ax, ay = inst.anchors[k]
        g = (xi - _const(nv, ax)) ** 2 + (yi - _const(nv, ay)) ** 2 - _const(nv, e2)
        parts.append((Clique([2 * i - 1, 2 * i]), g * g))
    return SparseSum(nv, parts)


def rmsd(estimate, truth):
    """Root mean square distance between two position sets."""
    est = np.asarray(estimate, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValueError("position arrays differ in shape")
    if est.ndim == 1:
        est = est.reshape(-1, 2)
        tru = tru.reshape(-1, 2)
    return float(np.sqrt(np.mean(np.sum((est - tru) ** 2, axis=1))))
