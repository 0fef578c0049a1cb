"""Exact rational linear algebra: parsing, symmetric matrices, inertia.

Rationals are ``gmpy2.mpq`` values throughout; they are always reduced with a
positive denominator.  Matrices are plain lists (or tuples) of rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from gmpy2 import mpq

from .errors import MalformedPencil, ParseError

Rat = type(mpq(0))
ZERO = mpq(0)
ONE = mpq(1)


def rat(x) -> Rat:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise ParseError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                den_i = int(den)
                if den_i == 0:
                    raise ParseError(f"zero denominator in {x!r}")
                return mpq(int(num), den_i)
            return mpq(int(s))
        except ValueError as exc:
            raise ParseError(f"not a rational literal: {x!r}") from exc
    raise ParseError(f"not a rational: {x!r}")


def format_rat(x) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(int(x.numerator))
    return f"{int(x.numerator)}/{int(x.denominator)}"


def rat_matrix(rows: Iterable[Iterable]) -> list[list[Rat]]:
    return [[rat(v) for v in row] for row in rows]


def freeze(rows) -> tuple[tuple[Rat, ...], ...]:
    return tuple(tuple(rat(v) for v in row) for row in rows)


# --- dense matrix helpers -------------------------------------------------


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]


def identity(n: int) -> list[list[Rat]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def is_zero_matrix(a: Sequence[Sequence]) -> bool:
    return all(v == 0 for row in a for v in row)


def rref(a: Sequence[Sequence]) -> tuple[list[list[Rat]], list[int]]:
    """Reduced row echelon form and pivot columns (zero rows dropped)."""
    m = [list(map(rat, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[:r], pivots


def rank(a: Sequence[Sequence]) -> int:
    if not a:
        return 0
    return len(rref(a)[1])


def kernel(a: Sequence[Sequence], ncols: int | None = None) -> list[list[Rat]]:
    """Basis of ``{v : a v = 0}``, one vector per free column, in RREF order."""
    if ncols is None:
        ncols = len(a[0])
    if not a:
        return identity(ncols)
    red, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def det(a: Sequence[Sequence]) -> Rat:
    m = [list(map(rat, row)) for row in a]
    n = len(m)
    result = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        pv = m[c][c]
        result *= pv
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def inverse(a: Sequence[Sequence]) -> list[list[Rat]]:
    n = len(a)
    aug = [list(map(rat, row)) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def solve_in_span(rows: Sequence[Sequence], v: Sequence) -> list[Rat] | None:
    """Coefficients c with ``sum c_i rows[i] = v``, or None if v is outside the span."""
    k = len(rows)
    aug = [[rows[i][j] for i in range(k)] + [v[j]] for j in range(len(v))]
    red, pivots = rref(aug)
    if k in pivots:
        return None
    c = [ZERO] * k
    for row, pc in zip(red, pivots):
        c[pc] = row[k]
    return c


# --- symmetric matrices and inertia ---------------------------------------


class Signature(NamedTuple):
    positives: int
    negatives: int
    corank: int

    @property
    def dim(self) -> int:
        return self.positives + self.negatives + self.corank

    def swapped(self) -> "Signature":
        return Signature(self.negatives, self.positives, self.corank)

    def __str__(self) -> str:
        return f"({self.positives}, {self.negatives}, {self.corank})"


@dataclass(frozen=True)
class SymMat:
    entries: tuple[tuple[Rat, ...], ...]

    def __post_init__(self):
        e = freeze(self.entries)
        n = len(e)
        if any(len(row) != n for row in e):
            raise MalformedPencil("matrix is not square")
        for i in range(n):
            for j in range(i + 1, n):
                if e[i][j] != e[j][i]:
                    raise MalformedPencil(f"matrix is not symmetric at ({i}, {j})")
        object.__setattr__(self, "entries", e)

    @classmethod
    def diag(cls, values) -> "SymMat":
        vals = [rat(v) for v in values]
        n = len(vals)
        return cls(tuple(tuple(vals[i] if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, n: int) -> "SymMat":
        return cls(tuple((ZERO,) * n for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list[Rat]]:
        return [list(row) for row in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __neg__(self) -> "SymMat":
        return SymMat(tuple(tuple(-v for v in row) for row in self.entries))

    def combine(self, s, other: "SymMat", t) -> "SymMat":
        """Return ``s * self + t * other``."""
        s, t = rat(s), rat(t)
        return SymMat(
            tuple(
                tuple(s * a + t * b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def congruent(self, p: Sequence[Sequence]) -> "SymMat":
        """``P^T M P``."""
        return SymMat(matmul(transpose(p), matmul(self.entries, p)))

    def restrict(self, basis: Sequence[Sequence]) -> "SymMat":
        """Gram matrix ``B M B^T`` of the form on the row span of ``basis``."""
        return SymMat(matmul(basis, matmul(self.entries, transpose(basis))))

    def quad(self, v: Sequence) -> Rat:
        return sum((v[i] * self.entries[i][j] * v[j] for i in range(self.n) for j in range(self.n)), ZERO)


def signature_of(m: SymMat | Sequence[Sequence]) -> Signature:
    """Exact inertia by symmetric Gaussian elimination over the rationals.

    A nonzero diagonal pivot contributes its sign.  When every remaining
    diagonal entry vanishes but an off-diagonal one does not, the 2x2 block
    ``[[0, b], [b, 0]]`` is a hyperbolic plane and contributes (1, 1); its
    Schur complement is taken in one step.
    """
    a = [list(row) for row in (m.entries if isinstance(m, SymMat) else m)]
    a = [[rat(v) for v in row] for row in a]
    idx = list(range(len(a)))
    pos = neg = 0
    while idx:
        piv = next((i for i in idx if a[i][i] != 0), None)
        if piv is not None:
            d = a[piv][piv]
            if d > 0:
                pos += 1
            else:
                neg += 1
            idx.remove(piv)
            col = [a[k][piv] for k in range(len(a))]
            for k in idx:
                ck = col[k]
                if ck == 0:
                    continue
                f = ck / d
                row_k = a[k]
                row_p = a[piv]
                for l in idx:
                    if row_p[l] != 0:
                        row_k[l] -= f * row_p[l]
            continue
        pair = next(((i, j) for i in idx for j in idx if i < j and a[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        b = a[i][j]
        pos += 1
        neg += 1
        idx.remove(i)
        idx.remove(j)
        ci = {k: a[k][i] for k in idx}
        cj = {k: a[k][j] for k in idx}
        for k in idx:
            for l in idx:
                delta = ci[k] * cj[l] + cj[k] * ci[l]
                if delta != 0:
                    a[k][l] -= delta / b
    return Signature(pos, neg, len(a) - pos - neg)
