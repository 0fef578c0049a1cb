"""Pencils of quadrics, linear subspaces on the base locus, hyperbolic reduction.

A pencil is a pair of rational symmetric Gram matrices ``(q0, q1)`` of size
N+1; its base locus is ``X = {q0 = q1 = 0}`` in P^N and its fibers are the
quadrics ``s q0 + t q1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from gmpy2 import mpq

from .errors import (
    DegenerateConfiguration,
    MalformedPencil,
    RankDeficient,
    SingularPencil,
    SubspaceNotOnX,
)
from .exact import (
    ONE,
    ZERO,
    Rat,
    Signature,
    SymMat,
    det,
    freeze,
    identity,
    inverse,
    is_zero_matrix,
    kernel,
    matmul,
    rank,
    rat,
    signature_of,
    solve_in_span,
    transpose,
)
from .poly import BinaryForm, binary_det, is_squarefree, primitive_integer_coeffs, repeated_part


@dataclass(frozen=True)
class QuadricPencil:
    q0: SymMat
    q1: SymMat

    def __post_init__(self):
        if self.q0.n != self.q1.n:
            raise MalformedPencil("q0 and q1 have different sizes")
        if self.q0.n < 3:
            raise MalformedPencil("need N >= 2")

    @classmethod
    def from_rows(cls, q0, q1) -> "QuadricPencil":
        return cls(SymMat(freeze(q0)), SymMat(freeze(q1)))

    @property
    def N(self) -> int:
        return self.q0.n - 1

    def fiber(self, s, t) -> SymMat:
        return self.q0.combine(s, self.q1, t)

    def discriminant(self) -> BinaryForm:
        return binary_det(self.q0, self.q1)

    def congruent(self, p) -> "QuadricPencil":
        return QuadricPencil(self.q0.congruent(p), self.q1.congruent(p))

    def reparametrize(self, a, b, c, d) -> "QuadricPencil":
        """The same pencil spanned by ``(a q0 + b q1, c q0 + d q1)``."""
        if rat(a) * rat(d) - rat(b) * rat(c) == 0:
            raise ValueError("reparametrization must be invertible")
        return QuadricPencil(self.q0.combine(a, self.q1, b), self.q0.combine(c, self.q1, d))


@dataclass(frozen=True)
class LinearSubspace:
    """An r-plane spanned by the rows of ``basis``."""

    basis: tuple[tuple[Rat, ...], ...]

    def __post_init__(self):
        b = freeze(self.basis)
        if not b or rank(b) != len(b):
            raise RankDeficient("subspace basis is not of full row rank")
        object.__setattr__(self, "basis", b)

    @property
    def r(self) -> int:
        return len(self.basis) - 1

    @property
    def ambient(self) -> int:
        return len(self.basis[0]) - 1

    def rows(self) -> list[list[Rat]]:
        return [list(row) for row in self.basis]


@dataclass(frozen=True)
class Smoothness:
    smooth: bool
    discriminant: BinaryForm
    witness: BinaryForm | None = None

    def __bool__(self) -> bool:
        return self.smooth


def validate_smooth(p: QuadricPencil) -> Smoothness:
    """X is smooth iff det(s q0 + t q1) is a squarefree form of degree N+1."""
    delta = p.discriminant()
    if delta.is_zero():
        raise MalformedPencil("det(s q0 + t q1) vanishes identically")
    if is_squarefree(delta):
        return Smoothness(True, delta)
    return Smoothness(False, delta, repeated_part(delta))


def require_smooth(p: QuadricPencil) -> BinaryForm:
    sm = validate_smooth(p)
    if not sm:
        raise SingularPencil(f"pencil is singular; repeated factor {sm.witness}", sm.witness)
    return sm.discriminant


def _check_dims(p: QuadricPencil, ell: LinearSubspace):
    if ell.ambient != p.N:
        raise MalformedPencil(f"subspace lives in P^{ell.ambient}, pencil in P^{p.N}")


def contains_subspace(p: QuadricPencil, ell: LinearSubspace) -> bool:
    _check_dims(p, ell)
    b = ell.rows()
    return is_zero_matrix(p.q0.restrict(b).entries) and is_zero_matrix(p.q1.restrict(b).entries)


# --- standard position and the symbolic reduction -------------------------


@dataclass(frozen=True)
class StandardPosition:
    """Coordinates in which the plane is ``{x_(r+1) = ... = x_N = 0}``.

    ``change_of_basis`` P has the plane's basis as its first r+1 columns; the
    transformed Gram matrices are ``P^T q_i P``.  ``l_forms[i][j]`` holds the
    coefficients of l_ij in x_(r+1..N), ``q_forms[i]`` the Gram matrix of q_i
    on those variables, so that ``q_i(x) = sum_j l_ij x_j + q_i(x_(r+1..N))``.
    """

    r: int
    N: int
    change_of_basis: tuple[tuple[Rat, ...], ...]
    grams: tuple[SymMat, SymMat]
    l_forms: tuple[tuple[tuple[Rat, ...], ...], ...]
    q_forms: tuple[SymMat, SymMat]

    def reassemble(self) -> tuple[SymMat, SymMat]:
        """Rebuild the transformed Gram matrices from (l_forms, q_forms)."""
        n, k = self.N + 1, self.r + 1
        out = []
        for i in range(2):
            g = [[ZERO] * n for _ in range(n)]
            for j in range(k):
                for m, c in enumerate(self.l_forms[i][j]):
                    g[j][k + m] = c / 2
                    g[k + m][j] = c / 2
            for a in range(n - k):
                for b in range(n - k):
                    g[k + a][k + b] = self.q_forms[i][a, b]
            out.append(SymMat(g))
        return out[0], out[1]


def _complete_basis(b: list[list[Rat]]) -> list[int]:
    """Coordinate vectors completing the rows of b to a basis.

    Among all admissible column sets the one whose complementary minor of b has
    the smallest absolute value is taken, so integral planes with a unimodular
    minor get a unimodular change of basis.
    """
    k, n = len(b), len(b[0])
    best = None
    for cols in combinations(range(n), k):
        minor = det([[row[c] for c in cols] for row in b])
        if minor == 0:
            continue
        key = (abs(minor), cols)
        if best is None or key < best:
            best = key
    chosen = best[1]
    return [c for c in range(n) if c not in chosen]


def to_standard_position(p: QuadricPencil, ell: LinearSubspace) -> StandardPosition:
    require_smooth(p)
    if not contains_subspace(p, ell):
        raise SubspaceNotOnX("the subspace does not lie on X")
    b = ell.rows()
    k, n = len(b), p.N + 1
    units = _complete_basis(b)
    cols = [list(row) for row in b] + [[ONE if i == u else ZERO for i in range(n)] for u in units]
    pmat = transpose(cols)
    grams = (p.q0.congruent(pmat), p.q1.congruent(pmat))
    for g in grams:
        if not is_zero_matrix([row[:k] for row in g.entries[:k]]):
            raise SubspaceNotOnX("transformed plane block is not zero")
    l_forms = tuple(
        tuple(tuple(2 * g[j, k + m] for m in range(n - k)) for j in range(k)) for g in grams
    )
    q_forms = tuple(SymMat([[g[k + a, k + c] for c in range(n - k)] for a in range(n - k)]) for g in grams)
    return StandardPosition(ell.r, p.N, freeze(pmat), grams, l_forms, q_forms)


Monomial = tuple[int, ...]


@dataclass(frozen=True)
class ReducedPencil:
    """Equations of the reduction in P^1 x P^(N-r-1).

    Variables are ordered ``(s, t, y_(r+1), ..., y_N)``.  The first r+1
    equations have bidegree (1, 1), the last one bidegree (1, 2).  Each equation
    is a tuple of ``(exponent vector, coefficient)`` pairs in lexicographically
    decreasing monomial order, scaled to integer content 1 with positive lead.
    """

    r: int
    N: int
    equations: tuple[tuple[tuple[Monomial, Rat], ...], ...]

    @property
    def variables(self) -> list[str]:
        return ["s", "t"] + [f"y{i}" for i in range(self.r + 1, self.N + 1)]

    def evaluate(self, values: Sequence) -> list[Rat]:
        out = []
        for eq in self.equations:
            acc = ZERO
            for mono, c in eq:
                term = c
                for v, e in zip(values, mono):
                    if e:
                        term = term * v**e
                acc += term
            out.append(acc)
        return out


def _normalize_equation(terms: dict[Monomial, Rat]) -> tuple[tuple[Monomial, Rat], ...]:
    items = sorted(((m, c) for m, c in terms.items() if c != 0), reverse=True)
    ints = primitive_integer_coeffs([c for _, c in items])
    return tuple((m, mpq(v)) for (m, _), v in zip(items, ints))


def hyperbolic_reduce(p: QuadricPencil, ell: LinearSubspace) -> ReducedPencil:
    """The r+2 defining equations ``s l_0j + t l_1j`` and ``s q_0 + t q_1``."""
    sp = to_standard_position(p, ell)
    nv = p.N - ell.r  # number of y variables
    eqs = []
    for j in range(ell.r + 1):
        terms: dict[Monomial, Rat] = {}
        for i in range(2):
            for m, c in enumerate(sp.l_forms[i][j]):
                mono = [0] * (2 + nv)
                mono[i] = 1
                mono[2 + m] = 1
                terms[tuple(mono)] = terms.get(tuple(mono), ZERO) + c
        eqs.append(_normalize_equation(terms))
    terms = {}
    for i in range(2):
        g = sp.q_forms[i]
        for a in range(nv):
            for b in range(a, nv):
                c = g[a, b] if a == b else 2 * g[a, b]
                mono = [0] * (2 + nv)
                mono[i] = 1
                mono[2 + a] += 1
                mono[2 + b] += 1
                terms[tuple(mono)] = terms.get(tuple(mono), ZERO) + c
    eqs.append(_normalize_equation(terms))
    return ReducedPencil(ell.r, p.N, tuple(eqs))


# --- fiberwise numeric reduction ------------------------------------------


@dataclass(frozen=True)
class ReducedFiber:
    point: tuple[Rat, Rat]
    gram: SymMat
    basis_used: tuple[tuple[Rat, ...], ...]


def reduce_form(m: SymMat, basis: Sequence[Sequence]) -> tuple[SymMat, list[list[Rat]]]:
    """Hyperbolic reduction of the form m along the isotropic span of ``basis``.

    Returns the Gram matrix on a complement of the span inside its orthogonal,
    together with that complement (rows in the coordinates of m).
    """
    b = [list(row) for row in basis]
    k, n = len(b), m.n
    bm = matmul(b, m.entries)
    perp = kernel(bm, n)
    if len(perp) != n - k:
        raise DegenerateConfiguration(
            f"orthogonal of the plane has dimension {len(perp)}, expected {n - k}: "
            "the plane meets the kernel of the fiber"
        )
    span = list(b)
    comp = []
    for v in perp:
        if rank(span + [v]) > len(span):
            span.append(v)
            comp.append(v)
        if len(comp) == n - 2 * k:
            break
    if len(comp) != n - 2 * k:
        raise DegenerateConfiguration("plane is not contained in its orthogonal")
    if not comp:
        return SymMat(()), comp
    return m.restrict(comp), comp


def reduced_fiber(p: QuadricPencil, ell: LinearSubspace, st) -> ReducedFiber:
    s, t = rat(st[0]), rat(st[1])
    if s == 0 and t == 0:
        raise ValueError("[0:0] is not a point of P^1")
    _check_dims(p, ell)
    if not contains_subspace(p, ell):
        raise SubspaceNotOnX("the subspace does not lie on X")
    gram, comp = reduce_form(p.fiber(s, t), ell.rows())
    return ReducedFiber((s, t), gram, freeze(comp) if comp else ())


def iterated_reduced_gram(p: QuadricPencil, ell: LinearSubspace, st) -> SymMat:
    """Reduce one basis point of the plane at a time, in the running quotient."""
    m = p.fiber(*st)
    b = ell.rows()
    current = identity(m.n)  # rows: current basis, in ambient coordinates
    gram = m
    for idx, v in enumerate(b):
        coords = solve_in_span(current + b[:idx], v)
        if coords is None:
            raise DegenerateConfiguration("plane vector escaped the running orthogonal")
        w = coords[: len(current)]
        gram, comp = reduce_form(gram, [w])
        current = matmul(comp, current) if comp else []
    return gram


def fiber_signature_gap(p: QuadricPencil, ell: LinearSubspace, st) -> tuple[Signature, Signature]:
    return signature_of(p.fiber(*st)), signature_of(reduced_fiber(p, ell, st).gram)


# --- test-pencil generators -----------------------------------------------


def _random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> list[list[Rat]]:
    m = identity(n)
    perm = list(range(n))
    rng.shuffle(perm)
    m = [m[i] for i in perm]
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        m[i] = [x + c * y for x, y in zip(m[i], m[j])]
    return m


def _standard_plane(n: int, start: int, k: int) -> list[list[Rat]]:
    return [[ONE if c == start + i else ZERO for c in range(n)] for i in range(k)]


def _transport(p: QuadricPencil, planes, rng: random.Random):
    """Apply a random unimodular congruence; planes follow as rows of P^-1 images."""
    n = p.N + 1
    pmat = _random_unimodular(n, rng)
    pinv = inverse(pmat)
    new = p.congruent(pmat)
    moved = [LinearSubspace(freeze(transpose(matmul(pinv, transpose(pl))))) for pl in planes]
    return new, moved


def _block_form(N: int, r: int, rng: random.Random) -> QuadricPencil:
    k = r + 1
    n = N + 1
    tail = n - 2 * k
    diag_m = rng.sample(range(-9, 10), k)
    q0 = [[ZERO] * n for _ in range(n)]
    q1 = [[ZERO] * n for _ in range(n)]
    for i in range(k):
        q0[i][k + i] = q0[k + i][i] = ONE
        q1[i][k + i] = q1[k + i][i] = mpq(diag_m[i])
    for a in range(2 * k, n):
        q0[a][a] = mpq(rng.choice((-1, 1)))
        for c in range(n):
            if c >= 2 * k and c < a:
                continue
            v = mpq(rng.randint(-4, 4))
            q1[a][c] = q1[c][a] = v
    return QuadricPencil.from_rows(q0, q1)


def generate_plane_pair(N: int, r: int, seed: int):
    """Smooth pencil with two disjoint rational r-planes, in random coordinates.

    Built from the block normal form ``[[0, I, 0], [I, 0, 0], [0, 0, D]]`` and
    ``[[0, M, *], [M, 0, *], [*, *, *]]`` with M diagonal with distinct entries,
    where D is a random +-1 diagonal; both coordinate planes of the first two
    blocks lie on X.
    """
    if N < 2:
        raise MalformedPencil("need N >= 2")
    if not 0 <= r <= N // 2 - 1:
        raise ValueError(f"r must lie in [0, {N // 2 - 1}] for N = {N}")
    rng = random.Random(f"pencil:{N}:{r}:{seed}")
    k = r + 1
    while True:
        base = _block_form(N, r, rng)
        if validate_smooth(base):
            break
    n = N + 1
    p, planes = _transport(base, [_standard_plane(n, 0, k), _standard_plane(n, k, k)], rng)
    return p, planes[0], planes[1]


def generate_test_pencil(N: int, seed: int, r: int | None = None) -> tuple[QuadricPencil, LinearSubspace]:
    """Smooth pencil containing a known rational r-plane (default r = floor(N/2) - 1)."""
    if r is None:
        r = N // 2 - 1
    p, ell, _ = generate_plane_pair(N, r, seed)
    return p, ell


@dataclass(frozen=True)
class DiagonalBuilt:
    pencil: QuadricPencil
    plane: LinearSubspace
    roots: tuple[tuple[Rat, Rat], ...]  # [s:t] with Delta(s, t) = 0, one per factor


def generate_diagonal_pencil(N: int, r: int, seed: int) -> DiagonalBuilt:
    """Smooth pencil with all roots of Delta rational and a rational r-plane.

    The plane is spanned by r+1 isotropic vectors with disjoint supports of
    size three in a simultaneously diagonal pencil, so it needs 3(r+1) <= N+1.
    """
    n = N + 1
    if 3 * (r + 1) > n:
        raise ValueError("diagonal construction needs 3(r+1) <= N+1")
    rng = random.Random(f"diag:{N}:{r}:{seed}")
    while True:
        a = [ZERO] * n
        b = [ZERO] * n
        vecs = []
        for blk in range(r + 1):
            idx = [3 * blk, 3 * blk + 1, 3 * blk + 2]
            v = [mpq(rng.choice((1, 2, 3)) * rng.choice((-1, 1))) for _ in range(3)]
            for coeffs in (a, b):
                c0, c1 = mpq(rng.randint(-5, 5)), mpq(rng.randint(-5, 5))
                coeffs[idx[0]], coeffs[idx[1]] = c0, c1
                coeffs[idx[2]] = -(c0 * v[0] ** 2 + c1 * v[1] ** 2) / v[2] ** 2
            vec = [ZERO] * n
            for i, x in zip(idx, v):
                vec[i] = x
            vecs.append(vec)
        for i in range(3 * (r + 1), n):
            a[i], b[i] = mpq(rng.randint(-5, 5)), mpq(rng.randint(-5, 5))
        # fiber s a_i + t b_i degenerates at [b_i : -a_i]
        roots = []
        ok = True
        for ai, bi in zip(a, b):
            if ai == 0 and bi == 0:
                ok = False
                break
            roots.append((bi, -ai))
        if not ok:
            continue
        normalized = {(x / y, ONE) if y != 0 else (ONE, ZERO) for x, y in roots}
        if len(normalized) != n:
            continue
        base = QuadricPencil(SymMat.diag(a), SymMat.diag(b))
        p, (plane,) = _transport(base, [vecs], rng)
        return DiagonalBuilt(p, plane, tuple(sorted(normalized)))
