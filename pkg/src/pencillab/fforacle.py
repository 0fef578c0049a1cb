"""Brute-force finite-field oracles for pencils of quadrics.

Everything here is deliberately naive: points and r-planes on X are found by
enumerating canonical representatives over F_q (q = p or p^2), so the counts
can serve as independent checks of the exact-rational code paths.

Field elements are small integers indexing into lookup tables; for F_(p^2)
the index of ``a + b*w`` (``w^2 = d`` a fixed non-residue) is ``a + p*b``.
Subspaces of F_q^n are visited once each through their reduced row echelon
form, with rows extended one at a time and pruned as soon as the partial
span stops being totally isotropic for both quadrics.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import BadReduction, CeilingExceeded, DegenerateConfiguration, InvalidDimension
from .exact import Rat, det, rat
from .pencil import LinearSubspace, QuadricPencil, ReducedPencil, hyperbolic_reduce, to_standard_position
from .poly import binary_det

DEFAULT_CEILING = 10**8
CEILING_ENV = "PENCILLAB_CEILING"


def enumeration_ceiling(override: int | None = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(CEILING_ENV)
    if env:
        try:
            value = int(float(env))
        except ValueError as exc:
            raise ValueError(f"{CEILING_ENV} must be a number, got {env!r}") from exc
        if value <= 0:
            raise ValueError(f"{CEILING_ENV} must be positive")
        return value
    return DEFAULT_CEILING


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# --- fields ---------------------------------------------------------------


class FiniteField:
    """F_p or F_(p^2) for an odd prime p, with full add/mul tables."""

    MAX_ORDER = 2500

    def __init__(self, p: int, ext: int = 1, nonresidue: int | None = None):
        if not _is_prime(p) or p == 2:
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        if ext not in (1, 2):
            raise ValueError("only F_p and F_(p^2) are supported")
        self.p = p
        self.ext = ext
        self.q = p**ext
        if self.q > self.MAX_ORDER:
            raise ValueError(f"field of order {self.q} is too large for table arithmetic")
        if ext == 2:
            if nonresidue is None:
                nonresidue = next(d for d in range(2, p) if pow(d, (p - 1) // 2, p) == p - 1)
            if pow(nonresidue % p, (p - 1) // 2, p) != p - 1:
                raise ValueError(f"{nonresidue} is not a quadratic non-residue mod {p}")
        self.nonresidue = nonresidue
        q = self.q
        idx = np.arange(q)
        a, b = idx % p, idx // p
        self.add = ((a[:, None] + a[None, :]) % p + p * ((b[:, None] + b[None, :]) % p)).astype(np.int32)
        if ext == 1:
            self.mul = ((a[:, None] * a[None, :]) % p).astype(np.int32)
        else:
            d = nonresidue
            re = (a[:, None] * a[None, :] + d * b[:, None] * b[None, :]) % p
            im = (a[:, None] * b[None, :] + b[:, None] * a[None, :]) % p
            self.mul = (re + p * im).astype(np.int32)
        self.neg = ((-a) % p + p * ((-b) % p)).astype(np.int32)
        inv = np.zeros(q, dtype=np.int32)
        for x in range(1, q):
            inv[x] = int(np.nonzero(self.mul[x] == 1)[0][0])
        self.inv = inv
        # python-level copies for scalar loops
        self._add = self.add.tolist()
        self._mul = self.mul.tolist()
        self._neg = self.neg.tolist()
        self._inv = inv.tolist()

    def __repr__(self) -> str:
        return f"FiniteField({self.p}, ext={self.ext})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.ext, self.nonresidue) == (
            other.p,
            other.ext,
            other.nonresidue,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ext, self.nonresidue))

    @property
    def base(self) -> "FiniteField":
        return self if self.ext == 1 else FiniteField(self.p)

    def from_rat(self, x) -> int:
        x = rat(x)
        num, den = int(x.numerator), int(x.denominator)
        if den % self.p == 0:
            raise BadReduction(f"denominator {den} is divisible by {self.p}")
        return (num * pow(den, -1, self.p)) % self.p

    def from_pair(self, a: int, b: int = 0) -> int:
        return a % self.p + self.p * (b % self.p)

    def elements(self) -> range:
        return range(self.q)

    # scalar helpers
    def s_add(self, x: int, y: int) -> int:
        return self._add[x][y]

    def s_sub(self, x: int, y: int) -> int:
        return self._add[x][self._neg[y]]

    def s_mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def s_inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv[x]

    def s_neg(self, x: int) -> int:
        return self._neg[x]

    def s_pow(self, x: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self._mul[out][x]
            x = self._mul[x][x]
            e >>= 1
        return out

    # vectorized helpers
    def bilinear(self, gram: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """``u^T G v`` over the last axis, broadcasting leading axes of u and v."""
        n = gram.shape[0]
        gv = [None] * n
        for i in range(n):
            acc = None
            for j in range(n):
                g = int(gram[i, j])
                if g == 0:
                    continue
                term = self.mul[g][v[..., j]]
                acc = term if acc is None else self.add[acc, term]
            gv[i] = acc
        out = None
        for i in range(n):
            if gv[i] is None:
                continue
            term = self.mul[u[..., i], gv[i]]
            out = term if out is None else self.add[out, term]
        if out is None:
            shape = np.broadcast_shapes(u.shape[:-1], v.shape[:-1])
            return np.zeros(shape, dtype=np.int32)
        return out

    def linear(self, coeffs: Sequence[int], v: np.ndarray) -> np.ndarray:
        out = np.zeros(v.shape[:-1], dtype=np.int32)
        for j, c in enumerate(coeffs):
            if c:
                out = self.add[out, self.mul[int(c)][v[..., j]]]
        return out


# --- polynomials over F_p (ascending coefficient lists) --------------------


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    quot = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = (a[-1] * inv) % p
        shift = len(a) - len(b)
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _ptrim(a)
    return _ptrim(quot), a


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pdivmod(out, m, p)[1]


def _xpow_mod(e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _pdivmod([0, 1], m, p)[1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


@dataclass(frozen=True)
class DiscriminantModP:
    """Delta reduced mod p, as a binary form of degree N+1."""

    p: int
    degree: int
    coeffs: tuple[int, ...]  # coeffs[i] multiplies s^(d-i) t^i

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def affine(self) -> list[int]:
        """``Delta(x, 1)`` in ascending powers of x."""
        return _ptrim([self.coeffs[self.degree - k] for k in range(self.degree + 1)])

    @property
    def root_at_infinity(self) -> int:
        """Multiplicity of the root [1:0]."""
        return self.degree - (len(self.affine()) - 1) if not self.is_zero else self.degree

    def is_squarefree(self) -> bool:
        if self.is_zero or self.root_at_infinity > 1:
            return False
        g = self.affine()
        if len(g) <= 2:
            return True
        dg = _ptrim([(i * c) % self.p for i, c in enumerate(g)][1:])
        return len(_pgcd(g, dg, self.p)) == 1

    def roots_in(self, ext: int) -> int:
        """Number of distinct roots on P^1(F_(p^ext)) (squarefree input)."""
        g = self.affine()
        count = 1 if self.root_at_infinity else 0
        if len(g) <= 1:
            return count
        h = _xpow_mod(self.p**ext, g, self.p)
        h = _ptrim([(c - (1 if i == 1 else 0)) % self.p for i, c in enumerate(h + [0] * max(0, 2 - len(h)))])
        common = _pgcd(g, h, self.p) if h else _pgcd(g, g, self.p)
        return count + len(common) - 1

    def splits_over(self, ext: int) -> bool:
        return self.roots_in(ext) == self.degree


def discriminant_mod_p(pencil: QuadricPencil, p: int) -> DiscriminantModP:
    form = binary_det(pencil.q0, pencil.q1)
    base = FiniteField(p)
    return DiscriminantModP(p, form.degree, tuple(base.from_rat(c) for c in form.coeffs))


# --- reduced pencils -------------------------------------------------------


@dataclass(frozen=True)
class FqPencil:
    field: FiniteField
    pencil: QuadricPencil
    q0: np.ndarray
    q1: np.ndarray
    discriminant: DiscriminantModP

    @property
    def N(self) -> int:
        return self.pencil.N

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def grams(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.q0, self.q1)

    def over(self, ext: int) -> "FqPencil":
        return reduce_pencil(self.pencil, self.field.p, ext)


def _reduce_matrix(f: FiniteField, rows) -> np.ndarray:
    return np.array([[f.from_rat(v) for v in row] for row in rows], dtype=np.int32)


def reduce_pencil(pencil: QuadricPencil, p: int, ext: int = 1) -> FqPencil:
    """Reduce a rational pencil mod p; rejects bad reduction."""
    f = FiniteField(p, ext)
    try:
        q0 = _reduce_matrix(f, pencil.q0.rows())
        q1 = _reduce_matrix(f, pencil.q1.rows())
        disc = discriminant_mod_p(pencil, p)
    except BadReduction as exc:
        raise BadReduction(f"bad reduction at {p}: {exc}") from exc
    if not disc.is_squarefree():
        raise BadReduction(f"bad reduction at {p}: discriminant is not squarefree of degree {pencil.N + 1} mod {p}")
    return FqPencil(f, pencil, q0, q1, disc)


def reduce_subspace(f: FiniteField, ell: LinearSubspace) -> np.ndarray:
    rows = _reduce_matrix(f, ell.rows())
    if rank_fq(f, rows.tolist()) != ell.r + 1:
        raise BadReduction(f"subspace basis loses rank mod {f.p}")
    return rows


# --- small linear algebra over F_q (python loops) -------------------------


def rref_fq(f: FiniteField, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    m = [list(map(int, row)) for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = f.s_inv(m[r][c])
        m[r] = [f.s_mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                fac = m[i][c]
                m[i] = [f.s_sub(x, f.s_mul(fac, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_fq(f: FiniteField, rows: Sequence[Sequence[int]]) -> int:
    return len(rref_fq(f, rows)[1])


def kernel_fq(f: FiniteField, rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    if not rows:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref_fq(f, rows)
    out = []
    for fc in (c for c in range(ncols) if c not in pivots):
        v = [0] * ncols
        v[fc] = 1
        for row, pc in zip(red, pivots):
            v[pc] = f.s_neg(row[fc])
        out.append(v)
    return out


def is_isotropic(fp: FqPencil, basis: np.ndarray) -> bool:
    for g in fp.grams:
        vals = fp.field.bilinear(g, basis[:, None, :], basis[None, :, :])
        if np.any(vals):
            return False
    return True


# --- subspace enumeration --------------------------------------------------


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _row_candidates(q: int, n: int, pivots: Sequence[int], i: int) -> np.ndarray:
    free = [c for c in range(pivots[i] + 1, n) if c not in pivots]
    count = q ** len(free)
    out = np.zeros((count, n), dtype=np.int32)
    out[:, pivots[i]] = 1
    codes = np.arange(count, dtype=np.int64)
    for c in reversed(free):
        out[:, c] = codes % q
        codes //= q
    return out


_PAIR_BUDGET = 1 << 22


@dataclass
class EnumerationStats:
    visited: int = 0


def iter_isotropic_subspaces(
    f: FiniteField,
    n: int,
    k: int,
    grams: Sequence[np.ndarray] = (),
    stats: EnumerationStats | None = None,
    visit_limit: int | None = None,
) -> Iterator[np.ndarray]:
    """Yield batches (M, k, n) of RREF bases of k-subspaces isotropic for all grams.

    With no grams every k-subspace is produced exactly once.
    """
    stats = stats if stats is not None else EnumerationStats()
    for pivots in combinations(range(n), k):
        yield from _extend(f, n, pivots, 0, np.zeros((1, 0, n), dtype=np.int32), grams, stats, visit_limit)


def _extend(f, n, pivots, i, partial, grams, stats, visit_limit):
    k = len(pivots)
    if i == k:
        if len(partial):
            yield partial
        return
    cand = _row_candidates(f.q, n, pivots, i)
    stats.visited += len(cand)
    for g in grams:
        if len(cand) == 0:
            break
        cand = cand[f.bilinear(g, cand, cand) == 0]
    if len(cand) == 0:
        return
    step = max(1, _PAIR_BUDGET // max(1, len(cand) * max(i, 1) * n))
    for start in range(0, len(partial), step):
        block = partial[start : start + step]
        if i and grams:
            ok = np.ones((len(block), len(cand)), dtype=bool)
            for g in grams:
                vals = f.bilinear(g, block[:, :, None, :], cand[None, None, :, :])
                ok &= ~np.any(vals, axis=1)
            a, b = np.nonzero(ok)
        else:
            a = np.repeat(np.arange(len(block)), len(cand))
            b = np.tile(np.arange(len(cand)), len(block))
        stats.visited += len(block) * len(cand)
        if visit_limit is not None and stats.visited > visit_limit:
            raise CeilingExceeded(f"search visited more than {visit_limit} candidates", estimate=stats.visited)
        if len(a) == 0:
            continue
        grown = np.concatenate([block[a], cand[b][:, None, :]], axis=1)
        yield from _extend(f, n, pivots, i + 1, grown, grams, stats, visit_limit)


def projective_points(f: FiniteField, n: int) -> np.ndarray:
    """All normalized representatives of P^(n-1)(F_q), as an (M, n) array."""
    return np.concatenate([b[:, 0, :] for b in iter_isotropic_subspaces(f, n, 1)], axis=0)


# --- censuses ----------------------------------------------------------------


def count_points(fp: FqPencil, ceiling: int | None = None) -> int:
    """|X(F_q)| by enumerating normalized projective representatives."""
    n = fp.N + 1
    estimate = gaussian_binomial(n, 1, fp.q)
    limit = enumeration_ceiling(ceiling)
    if estimate > limit:
        raise CeilingExceeded(f"{estimate} points of P^{fp.N}(F_{fp.q}) exceed the ceiling {limit}", estimate=estimate)
    return sum(len(b) for b in iter_isotropic_subspaces(fp.field, n, 1, fp.grams))


@dataclass
class PlaneCensus:
    q: int
    r: int
    total: int
    by_intersection: dict[int, int] = field(default_factory=dict)  # dim(ell ∩ m) -> count; -1 = disjoint
    span_in_x: dict[int, int] = field(default_factory=dict)  # same keys, count with <ell, m> inside X
    planes: list[np.ndarray] | None = None

    def meeting(self, d: int) -> int:
        return self.by_intersection.get(d, 0)

    def check_partition(self) -> bool:
        return not self.by_intersection or sum(self.by_intersection.values()) == self.total

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "r": self.r,
            "total": self.total,
            "by_intersection_dim": {str(k): v for k, v in sorted(self.by_intersection.items())},
            "span_in_X": {str(k): v for k, v in sorted(self.span_in_x.items())},
        }


def _classify(fp: FqPencil, ell: np.ndarray, plane: np.ndarray) -> tuple[int, bool]:
    stacked = np.concatenate([ell, plane], axis=0)
    red, _ = rref_fq(fp.field, stacked.tolist())
    dim_sum = len(red)
    inter = ell.shape[0] + plane.shape[0] - dim_sum - 1  # projective dimension
    in_x = is_isotropic(fp, np.array(red, dtype=np.int32))
    return inter, in_x


def census_planes(
    fp: FqPencil,
    r: int,
    ell: np.ndarray | LinearSubspace | None = None,
    ceiling: int | None = None,
    keep: bool = False,
) -> PlaneCensus:
    """Enumerate all r-planes on X over F_q, partitioned relative to ell."""
    N, n = fp.N, fp.N + 1
    if r < 0:
        raise InvalidDimension("r must be non-negative")
    if isinstance(ell, LinearSubspace):
        ell = reduce_subspace(fp.field, ell)
    if ell is not None and not is_isotropic(fp, ell):
        raise BadReduction("reference plane does not lie on X mod p")
    if r > N // 2 - 1:
        return PlaneCensus(fp.q, r, 0, {}, {}, [] if keep else None)
    estimate = gaussian_binomial(n, r + 1, fp.q)
    limit = enumeration_ceiling(ceiling)
    if estimate > limit:
        raise CeilingExceeded(
            f"enumerating {r}-planes in P^{N} over F_{fp.q} visits ~{estimate:.3g} subspaces (ceiling {limit})",
            estimate=estimate,
        )
    census = PlaneCensus(fp.q, r, 0, {}, {}, [] if keep else None)
    for batch in iter_isotropic_subspaces(fp.field, n, r + 1, fp.grams):
        census.total += len(batch)
        if keep:
            census.planes.extend(batch)
        if ell is not None:
            for plane in batch:
                d, in_x = _classify(fp, ell, plane)
                census.by_intersection[d] = census.by_intersection.get(d, 0) + 1
                census.span_in_x[d] = census.span_in_x.get(d, 0) + int(in_x)
    return census


def find_plane(fp: FqPencil, r: int, ceiling: int | None = None) -> np.ndarray | None:
    """First r-plane on X over F_q in enumeration order, or None.

    Unlike census_planes this stops early, so it is bounded by the number of
    candidates actually visited rather than by the Gaussian binomial.
    """
    if r > fp.N // 2 - 1:
        return None
    stats = EnumerationStats()
    for batch in iter_isotropic_subspaces(
        fp.field, fp.N + 1, r + 1, fp.grams, stats=stats, visit_limit=enumeration_ceiling(ceiling)
    ):
        return batch[0]
    return None


# --- the hyperbolic reduction mod p ---------------------------------------


@dataclass(frozen=True)
class ReducedForms:
    """l_ij and q_i of a reduced pencil with coefficients in F_p."""

    field: FiniteField
    r: int
    N: int
    l_forms: tuple[tuple[tuple[int, ...], ...], ...]  # [i][j] -> coefficients over y_(r+1..N)
    q_grams: tuple[np.ndarray, np.ndarray]  # Gram matrices of q_0, q_1 over y

    @property
    def nvars(self) -> int:
        return self.N - self.r


def _forms_from_equations(f: FiniteField, rp: ReducedPencil) -> ReducedForms:
    nv = rp.N - rp.r
    half = f.s_inv(2)
    l_forms = [[[0] * nv for _ in range(rp.r + 1)] for _ in range(2)]
    grams = [np.zeros((nv, nv), dtype=np.int32) for _ in range(2)]
    for j, eq in enumerate(rp.equations):
        for mono, c in eq:
            i = 0 if mono[0] else 1
            ys = [m for m in range(nv) for _ in range(mono[2 + m])]
            val = f.from_rat(c)
            if j <= rp.r:
                l_forms[i][j][ys[0]] = val
            else:
                a, b = ys
                if a == b:
                    grams[i][a, a] = val
                else:
                    grams[i][a, b] = grams[i][b, a] = f.s_mul(val, half)
    return ReducedForms(
        f, rp.r, rp.N, tuple(tuple(tuple(x) for x in li) for li in l_forms), (grams[0], grams[1])
    )


def reduced_forms_mod_p(fp: FqPencil, ell: LinearSubspace) -> ReducedForms:
    """Reduce the emitted equations of the hyperbolic reduction mod p.

    The coordinate change must be invertible mod p and the normalization of
    each equation must not rescale by a multiple of p; otherwise the reduced
    equations would not describe the reduction of X and BadReduction is raised.
    """
    p = fp.field.p
    sp = to_standard_position(fp.pencil, ell)
    base = fp.field
    try:
        for row in sp.change_of_basis:
            for v in row:
                base.from_rat(v)
        if base.from_rat(det(sp.change_of_basis)) == 0:
            raise BadReduction(f"coordinate change is singular mod {p}")
    except BadReduction as exc:
        raise BadReduction(f"standard position does not reduce mod {p}: {exc}") from exc
    rp = hyperbolic_reduce(fp.pencil, ell)
    # the emitted equations are rescaled copies of the standard-position forms
    for j, eq in enumerate(rp.equations[: ell.r + 1]):
        if _p_valuation(_equation_scale(eq, sp, j), p) != 0:
            raise BadReduction(f"equation {j} is rescaled by a multiple of {p}")
    qscale = _quadric_scale(rp.equations[-1], sp)
    if _p_valuation(qscale, p) != 0:
        raise BadReduction(f"quadric equation is rescaled by a multiple of {p}")
    return _forms_from_equations(base, rp)


def _p_valuation(x: Rat, p: int) -> int:
    x = rat(x)
    num, den = int(x.numerator), int(x.denominator)
    v = 0
    while num and num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _equation_scale(eq, sp, j) -> Rat:
    nv = sp.N - sp.r
    for mono, c in eq:
        i = 0 if mono[0] else 1
        m = next(idx for idx in range(nv) if mono[2 + idx])
        orig = sp.l_forms[i][j][m]
        if orig != 0:
            return c / orig
    raise DegenerateConfiguration("empty linear equation in reduced pencil")


def _quadric_scale(eq, sp) -> Rat:
    nv = sp.N - sp.r
    for mono, c in eq:
        i = 0 if mono[0] else 1
        ys = [m for m in range(nv) for _ in range(mono[2 + m])]
        a, b = ys
        g = sp.q_forms[i]
        orig = g[a, b] if a == b else 2 * g[a, b]
        if orig != 0:
            return c / orig
    raise DegenerateConfiguration("empty quadric equation in reduced pencil")


def _lift(forms: ReducedForms, f: FiniteField) -> ReducedForms:
    if f == forms.field:
        return forms
    # base-field indices coincide with their embedding in F_(p^2)
    return ReducedForms(f, forms.r, forms.N, forms.l_forms, forms.q_grams)


@dataclass(frozen=True)
class BijectionCounts:
    lhs: int  # points of Q^(r) off {l_ij = 0, j = 0..r}
    rhs: int  # r-planes m with dim(ell ∩ m) = r-1 and <ell, m> not in X
    lhs_partial_locus: int  # points of Q^(r) off {l_ij = 0, j = 1..r}

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "lhs_partial_locus": self.lhs_partial_locus, "equal": self.equal}


def _reduced_point_counts(forms: ReducedForms, f: FiniteField) -> tuple[int, int]:
    ys = projective_points(f, forms.nvars)
    r = forms.r
    cols = []  # 2 x (r+2) matrix entries per y
    for j in range(r + 1):
        cols.append((f.linear(forms.l_forms[0][j], ys), f.linear(forms.l_forms[1][j], ys)))
    cols.append(
        (f.bilinear(forms.q_grams[0], ys, ys), f.bilinear(forms.q_grams[1], ys, ys))
    )
    rank_le_1 = np.ones(len(ys), dtype=bool)
    for a in range(len(cols)):
        for b in range(a + 1, len(cols)):
            minor = f.add[f.mul[cols[a][0], cols[b][1]], f.neg[f.mul[cols[b][0], cols[a][1]]]]
            rank_le_1 &= minor == 0
    l_nonzero = np.zeros(len(ys), dtype=bool)
    l_tail_nonzero = np.zeros(len(ys), dtype=bool)
    for j in range(r + 1):
        nz = (cols[j][0] != 0) | (cols[j][1] != 0)
        l_nonzero |= nz
        if j >= 1:
            l_tail_nonzero |= nz
    # off the locus each y has a nonzero column, hence exactly one [s:t]
    return int(np.sum(rank_le_1 & l_nonzero)), int(np.sum(rank_le_1 & l_tail_nonzero))


def check_reduction_bijection(fp: FqPencil, ell: LinearSubspace, ceiling: int | None = None) -> BijectionCounts:
    """Count both sides of the correspondence between Q^(r) and planes meeting ell in codim 1."""
    forms = reduced_forms_mod_p(fp, ell)
    ell_mod = reduce_subspace(fp.field, ell)
    lhs, lhs_alt = _reduced_point_counts(_lift(forms, fp.field), fp.field)
    census = census_planes(fp, ell.r, ell_mod, ceiling=ceiling)
    d = ell.r - 1
    rhs = census.by_intersection.get(d, 0) - census.span_in_x.get(d, 0)
    return BijectionCounts(lhs, rhs, lhs_alt)


# --- length of the zero-dimensional reduction (N = 2g, r = g-1) ------------

Poly = dict  # exponent tuple -> field element


def _poly_add_term(f: FiniteField, poly: Poly, mono: tuple[int, ...], c: int) -> None:
    if c == 0:
        return
    new = f.s_add(poly.get(mono, 0), c)
    if new:
        poly[mono] = new
    else:
        poly.pop(mono, None)


def _poly_mul(f: FiniteField, a: Poly, b: Poly, max_degree: int | None = None) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple(x + y for x, y in zip(ma, mb))
            if max_degree is not None and sum(mono) > max_degree:
                continue
            _poly_add_term(f, out, mono, f.s_mul(ca, cb))
    return out


def _poly_translate(f: FiniteField, poly: Poly, point: Sequence[int]) -> Poly:
    """Substitute x_i -> x_i + point_i."""
    nvars = len(point)
    out: Poly = {}
    for mono, c in poly.items():
        term: Poly = {(0,) * nvars: c}
        for i, e in enumerate(mono):
            lin: Poly = {}
            unit = tuple(1 if k == i else 0 for k in range(nvars))
            _poly_add_term(f, lin, unit, 1)
            _poly_add_term(f, lin, (0,) * nvars, point[i])
            for _ in range(e):
                term = _poly_mul(f, term, lin)
        for m, v in term.items():
            _poly_add_term(f, out, m, v)
    return out


def _monomials(nvars: int, below: int) -> list[tuple[int, ...]]:
    return [m for d in range(below) for m in _monomials_of_degree(nvars, d)]


def _monomials_of_degree(nvars: int, d: int):
    if nvars == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, d - first):
            yield (first,) + rest


def local_length(f: FiniteField, polys: Sequence[Poly], nvars: int, max_order: int = 12) -> int:
    """Length of the local ring at the origin of V(polys), a zero-dimensional point.

    Multiplicity one when the Jacobian at the origin has full rank; otherwise
    dim R/(I + m^k) is computed for growing k until it stabilizes, which by
    Nakayama happens exactly when m^k lies in the local ideal.
    """
    for poly in polys:
        if poly.get((0,) * nvars, 0):
            raise ValueError("origin is not on the scheme")
    jac = []
    for poly in polys:
        jac.append([poly.get(tuple(1 if k == i else 0 for k in range(nvars)), 0) for i in range(nvars)])
    if rank_fq(f, jac) == nvars:
        return 1
    prev = None
    for k in range(1, max_order + 1):
        monos = _monomials(nvars, k)
        index = {m: i for i, m in enumerate(monos)}
        rows = []
        for poly in polys:
            for shift in monos:
                prod = _poly_mul(f, {shift: 1}, poly, max_degree=k - 1)
                if prod:
                    row = [0] * len(monos)
                    for m, c in prod.items():
                        row[index[m]] = c
                    rows.append(row)
        dim = len(monos) - (rank_fq(f, rows) if rows else 0)
        if prev is not None and dim == prev:
            return dim
        prev = dim
    raise DegenerateConfiguration(f"local length did not stabilize below order {max_order}")


@dataclass(frozen=True)
class SchemePoint:
    ext: int
    st: tuple[int, int]
    y: tuple[int, ...]
    multiplicity: int


@dataclass
class SchemeLength:
    g: int
    p: int
    points: dict[int, list[SchemePoint]]  # extension degree -> points over F_(p^ext)
    complete: bool  # every root of Delta mod p lies in F_(p^2)

    def length_over(self, ext: int) -> int:
        return sum(pt.multiplicity for pt in self.points.get(ext, []))

    @property
    def total(self) -> int:
        return max((self.length_over(e) for e in self.points), default=0)

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "p": self.p,
            "length_over": {str(e): self.length_over(e) for e in sorted(self.points)},
            "total": self.total,
            "complete": self.complete,
            "lower_bound_only": not self.complete,
        }


def _reduced_equations(forms: ReducedForms, f: FiniteField) -> list[Poly]:
    """Equations of Q^(r) over variables (s, t, y...) as polynomials."""
    nv = forms.nvars
    eqs: list[Poly] = []
    for j in range(forms.r + 1):
        poly: Poly = {}
        for i in range(2):
            for m, c in enumerate(forms.l_forms[i][j]):
                mono = [0] * (2 + nv)
                mono[i] = 1
                mono[2 + m] = 1
                _poly_add_term(f, poly, tuple(mono), c)
        eqs.append(poly)
    poly = {}
    for i in range(2):
        g = forms.q_grams[i]
        for a in range(nv):
            for b in range(a, nv):
                c = int(g[a, b]) if a == b else f.s_add(int(g[a, b]), int(g[a, b]))
                mono = [0] * (2 + nv)
                mono[i] = 1
                mono[2 + a] += 1
                mono[2 + b] += 1
                _poly_add_term(f, poly, tuple(mono), c)
    eqs.append(poly)
    return eqs


def _dehomogenize(f: FiniteField, polys: list[Poly], st_var: int, y_var: int, point) -> tuple[list[Poly], list[int]]:
    """Affine chart s or t = 1 and y_c = 1, returning polys and the point's local coordinates."""
    nv = len(point) - 2
    keep = [i for i in range(2 + nv) if i not in (st_var, 2 + y_var)]
    out = []
    for poly in polys:
        aff: Poly = {}
        for mono, c in poly.items():
            _poly_add_term(f, aff, tuple(mono[i] for i in keep), c)
        out.append(aff)
    s_scale = f.s_inv(point[st_var])
    y_scale = f.s_inv(point[2 + y_var])
    coords = []
    for i in keep:
        scale = s_scale if i < 2 else y_scale
        coords.append(f.s_mul(point[i], scale))
    return out, coords


def _points_over(forms: ReducedForms, f: FiniteField) -> list[tuple[tuple[int, int], tuple[int, ...]]]:
    nv = forms.nvars
    found = []
    for st in [(1, a) for a in range(f.q)] + [(0, 1)]:
        s, t = st
        rows = []
        for j in range(forms.r + 1):
            rows.append(
                [f.s_add(f.s_mul(s, forms.l_forms[0][j][m]), f.s_mul(t, forms.l_forms[1][j][m])) for m in range(nv)]
            )
        ker = kernel_fq(f, rows, nv)
        if not ker:
            continue
        kmat = np.array(ker, dtype=np.int32)
        coeffs = projective_points(f, len(ker))
        ys = np.zeros((len(coeffs), nv), dtype=np.int32)
        for a in range(len(ker)):
            ys = f.add[ys, f.mul[coeffs[:, a : a + 1], kmat[a][None, :]]]
        qv = f.add[
            f.mul[s][f.bilinear(forms.q_grams[0], ys, ys)], f.mul[t][f.bilinear(forms.q_grams[1], ys, ys)]
        ]
        for y in ys[qv == 0]:
            lead = next(int(v) for v in y if v)
            inv = f.s_inv(lead)
            found.append((st, tuple(f.s_mul(int(v), inv) for v in y)))
    return found


def reduced_scheme_length(fp: FqPencil, ell: LinearSubspace, extensions: Sequence[int] = (1, 2)) -> SchemeLength:
    """Points of Q^(g-1) over F_p and F_(p^2), counted with multiplicity."""
    N = fp.N
    if N % 2 or ell.r != N // 2 - 1:
        raise InvalidDimension("needs N = 2g and a (g-1)-plane")
    g = N // 2
    forms = reduced_forms_mod_p(fp, ell)
    result: dict[int, list[SchemePoint]] = {}
    for ext in extensions:
        f = FiniteField(fp.field.p, ext)
        lifted = _lift(forms, f)
        eqs = _reduced_equations(lifted, f)
        pts = []
        for st, y in _points_over(lifted, f):
            point = list(st) + list(y)
            st_var = 0 if st[0] else 1
            y_var = next(i for i, v in enumerate(y) if v)
            aff, coords = _dehomogenize(f, eqs, st_var, y_var, point)
            moved = [_poly_translate(f, poly, coords) for poly in aff]
            pts.append(SchemePoint(ext, st, y, local_length(f, moved, len(coords))))
        result[ext] = pts
    complete = fp.discriminant.splits_over(2)
    return SchemeLength(g, fp.field.p, result, complete)


# --- example generators --------------------------------------------------------


def random_fq_pencil(N: int, p: int, seed: int, max_tries: int = 1000) -> FqPencil:
    """A random smooth pencil with entries in 0..p-1, reduced mod p."""
    rng = random.Random(f"fq:{N}:{p}:{seed}")
    n = N + 1
    for _ in range(max_tries):
        mats = []
        for _ in range(2):
            m = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    m[i][j] = m[j][i] = rng.randrange(p)
            mats.append(m)
        pencil = QuadricPencil.from_rows(*mats) if _nonzero_det_form(mats) else None
        if pencil is None:
            continue
        try:
            return reduce_pencil(pencil, p)
        except BadReduction:
            continue
    raise BadReduction(f"no smooth pencil found mod {p} after {max_tries} tries")


def _nonzero_det_form(mats) -> bool:
    return any(det(m) != 0 for m in mats) or det([[a + b for a, b in zip(r0, r1)] for r0, r1 in zip(*mats)]) != 0


def diagonal_pencil(values: Sequence[int]) -> QuadricPencil:
    """``sum x_i^2`` and ``sum values_i x_i^2``."""
    n = len(values)
    q0 = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    q1 = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return QuadricPencil.from_rows(q0, q1)


def plane_to_subspace(plane: np.ndarray) -> LinearSubspace:
    """Integer lift of an F_p plane basis (entries 0..p-1)."""
    return LinearSubspace(tuple(tuple(rat(int(v)) for v in row) for row in plane))


def good_reduction_seed(N: int, r: int, p: int, start: int = 0, limit: int = 200):
    """First seed whose generated pencil and plane reduce well mod p."""
    from .pencil import generate_test_pencil

    for seed in range(start, start + limit):
        pencil, ell = generate_test_pencil(N, seed, r)
        try:
            fp = reduce_pencil(pencil, p)
            reduce_subspace(fp.field, ell)
            reduced_forms_mod_p(fp, ell)
        except BadReduction:
            continue
        return seed, fp, ell
    raise BadReduction(f"no seed in [{start}, {start + limit}) reduces well mod {p}")


__all__ = [
    "FiniteField",
    "FqPencil",
    "PlaneCensus",
    "BijectionCounts",
    "SchemeLength",
    "reduce_pencil",
    "reduce_subspace",
    "count_points",
    "census_planes",
    "find_plane",
    "gaussian_binomial",
    "iter_isotropic_subspaces",
    "check_reduction_bijection",
    "reduced_scheme_length",
    "local_length",
    "random_fq_pencil",
    "diagonal_pencil",
    "good_reduction_seed",
    "enumeration_ceiling",
]

