"""Univariate polynomials, binary forms and Sturm real-root isolation over Q."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from gmpy2 import mpq

from .errors import MalformedPencil, PencilError
from .exact import ONE, ZERO, Rat, SymMat, det, format_rat, rat


class NotSquarefree(PencilError):
    exit_code = 4


def _trim(coeffs) -> tuple[Rat, ...]:
    c = [rat(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial, coefficients in ascending degree."""

    coeffs: tuple[Rat, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Rat:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __call__(self, x) -> Rat:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UniPoly(tuple((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)))

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return UniPoly(tuple(c * rat(other) for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return UniPoly(())
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return UniPoly(()), self
        q = [ZERO] * (dq + 1)
        lead = other.lead
        for k in range(dq, -1, -1):
            c = r[k + other.degree] / lead
            q[k] = c
            if c != 0:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
        return UniPoly(tuple(q)), UniPoly(tuple(r[: other.degree]))

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lead)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()


def primitive_integer_coeffs(coeffs: Sequence[Rat]) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    nz = [c for c in coeffs if c != 0]
    if not nz:
        return [0] * len(coeffs)
    den = 1
    for c in nz:
        den = den * int(c.denominator) // gcd(den, int(c.denominator))
    ints = [int(c * den) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    if nz[0] < 0:
        ints = [-v for v in ints]
    return ints


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous ``sum c_i s^(d-i) t^i``; ``coeffs[i]`` multiplies ``s^(d-i) t^i``."""

    degree: int
    coeffs: tuple[Rat, ...]

    def __post_init__(self):
        c = tuple(rat(v) for v in self.coeffs)
        if len(c) != self.degree + 1:
            raise ValueError("binary form needs degree+1 coefficients")
        object.__setattr__(self, "coeffs", c)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, s, t) -> Rat:
        s, t = rat(s), rat(t)
        d = self.degree
        return sum((c * s ** (d - i) * t**i for i, c in enumerate(self.coeffs)), ZERO)

    @classmethod
    def from_linear_factors(cls, factors) -> "BinaryForm":
        """Product of ``(a s + b t)`` for each pair ``(a, b)``."""
        out = [ONE]
        for a, b in factors:
            a, b = rat(a), rat(b)
            nxt = [ZERO] * (len(out) + 1)
            for i, c in enumerate(out):
                nxt[i] += c * a
                nxt[i + 1] += c * b
            out = nxt
        return cls(len(out) - 1, tuple(out))

    def dehomogenize(self) -> UniPoly:
        """``f(s, 1)`` as a polynomial in s."""
        d = self.degree
        return UniPoly(tuple(self.coeffs[d - k] for k in range(d + 1)))

    @property
    def infinity_multiplicity(self) -> int:
        """Order of vanishing at ``[1:0]``, i.e. the power of t dividing f."""
        m = 0
        for c in self.coeffs:
            if c != 0:
                break
            m += 1
        return m

    @classmethod
    def homogenize(cls, g: UniPoly, degree: int) -> "BinaryForm":
        c = [ZERO] * (degree + 1)
        for k, a in enumerate(g.coeffs):
            c[degree - k] = a
        return cls(degree, tuple(c))

    def normalized(self) -> "BinaryForm":
        return BinaryForm(self.degree, tuple(mpq(v) for v in primitive_integer_coeffs(self.coeffs)))

    def to_json(self) -> list[str]:
        return [format_rat(c) for c in self.coeffs]

    def __str__(self) -> str:
        terms = []
        d = self.degree
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "*".join(
                p for p in (
                    f"s^{d - i}" if d - i > 1 else ("s" if d - i == 1 else ""),
                    f"t^{i}" if i > 1 else ("t" if i == 1 else ""),
                ) if p
            )
            terms.append(f"{format_rat(c)}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms) if terms else "0"


def binary_det(a: SymMat, b: SymMat) -> BinaryForm:
    """``det(s A + t B)`` by exact interpolation at n+1 points of P^1."""
    if a.n != b.n:
        raise MalformedPencil("pencil matrices differ in size")
    n = a.n
    lead = det(a.entries)  # value at [1:0]
    # remaining coefficients from the chart t = 1 at s = 0..n-1
    xs = [mpq(k) for k in range(n)]
    ys = [det(a.combine(x, b, 1).entries) - lead * x**n for x in xs]
    rest = _interpolate(xs, ys)  # degree < n polynomial in s
    coeffs = [lead] + [rest.coeffs[n - i] if n - i < len(rest.coeffs) else ZERO for i in range(1, n + 1)]
    return BinaryForm(n, tuple(coeffs))


def _interpolate(xs: Sequence[Rat], ys: Sequence[Rat]) -> UniPoly:
    """Newton interpolation through the given points."""
    n = len(xs)
    dd = list(ys)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    poly = UniPoly((dd[-1],)) if n else UniPoly(())
    for i in range(n - 2, -1, -1):
        poly = poly * UniPoly((-xs[i], ONE)) + UniPoly((dd[i],))
    return poly


def is_squarefree(f: BinaryForm) -> bool:
    if f.is_zero():
        raise ValueError("zero form has no squarefree test")
    if f.infinity_multiplicity > 1:
        return False
    g = f.dehomogenize()
    if g.degree <= 0:
        return True
    return g.gcd(g.derivative()).degree == 0


def squarefree_part(f: BinaryForm) -> BinaryForm:
    """Product of the distinct irreducible factors; content 1, positive lead."""
    if f.is_zero():
        raise ValueError("zero form has no squarefree part")
    g = f.dehomogenize()
    if g.degree > 0:
        core = g.divmod(g.gcd(g.derivative()))[0]
    else:
        core = UniPoly((ONE,))
    deg = core.degree + (1 if f.infinity_multiplicity > 0 else 0)
    return BinaryForm.homogenize(core, deg).normalized()


def repeated_part(f: BinaryForm) -> BinaryForm:
    """``f / squarefree_part(f)`` up to scalar: the witness of non-squarefreeness."""
    g = f.dehomogenize()
    common = g.gcd(g.derivative()) if g.degree > 0 else UniPoly((ONE,))
    extra = max(f.infinity_multiplicity - 1, 0)
    deg = common.degree + extra
    return BinaryForm.homogenize(common, deg).normalized()


# --- Sturm sequences ------------------------------------------------------


def sturm_chain(g: UniPoly) -> list[UniPoly]:
    chain = [g, g.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2].divmod(chain[-1])[1]))
    chain.pop()
    return chain


def sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _changes_at(chain: list[UniPoly], x) -> int:
    return sign_changes([p(x) for p in chain])


def _changes_at_infinity(chain: list[UniPoly], sign: int) -> int:
    vals = []
    for p in chain:
        if p.is_zero():
            continue
        lead = p.lead
        vals.append(lead if (sign > 0 or p.degree % 2 == 0) else -lead)
    return sign_changes(vals)


def count_real_roots(g: UniPoly) -> int:
    """Number of distinct real roots from the Sturm chain at -oo and +oo."""
    if g.degree <= 0:
        return 0
    chain = sturm_chain(g)
    return _changes_at_infinity(chain, -1) - _changes_at_infinity(chain, +1)


def cauchy_bound(g: UniPoly) -> Rat:
    lead = abs(g.lead)
    return 1 + max((abs(c) / lead for c in g.coeffs[:-1]), default=ZERO)


@dataclass(frozen=True)
class RootIsolation:
    """Disjoint open rational intervals, one per real root of ``f(s, 1)``.

    ``at_infinity`` marks the root ``[1:0]``.  Interval endpoints are never roots.
    """

    form: BinaryForm
    intervals: tuple[tuple[Rat, Rat], ...]
    squarefree: bool
    at_infinity: bool

    @property
    def count(self) -> int:
        return len(self.intervals) + (1 if self.at_infinity else 0)

    def refine(self, width) -> "RootIsolation":
        width = rat(width)
        g = self.form.dehomogenize()
        return RootIsolation(
            self.form,
            tuple(refine_interval(g, a, b, width) for a, b in self.intervals),
            self.squarefree,
            self.at_infinity,
        )

    def to_json(self) -> dict:
        return {
            "intervals": [[format_rat(a), format_rat(b)] for a, b in self.intervals],
            "squarefree": self.squarefree,
            "root_at_infinity": self.at_infinity,
        }


def _nonroot_near(g: UniPoly, x: Rat, lo: Rat, hi: Rat) -> Rat:
    """A point close to x in (lo, hi) where g does not vanish."""
    if g(x) != 0:
        return x
    k = 3
    while True:
        for cand in (x + (hi - x) / k, x - (x - lo) / k):
            if g(cand) != 0:
                return cand
        k += 1


def refine_interval(g: UniPoly, a: Rat, b: Rat, width: Rat) -> tuple[Rat, Rat]:
    """Bisect an isolating interval of a simple root down to ``b - a <= width``."""
    fa = g(a)
    while b - a > width:
        m = (a + b) / 2
        fm = g(m)
        if fm == 0:
            # exact rational root: shrink symmetrically around it
            h = min(width, b - a) / 4
            return (m - h, m + h)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a, b)


def isolate_real_roots(f: BinaryForm) -> RootIsolation:
    """Sturm isolation of all real projective roots of a squarefree binary form."""
    if f.is_zero() or not is_squarefree(f):
        raise NotSquarefree("root isolation needs a squarefree form")
    g = f.dehomogenize()
    at_inf = f.infinity_multiplicity == 1
    if g.degree <= 0:
        return RootIsolation(f, (), True, at_inf)
    chain = sturm_chain(g)
    bound = cauchy_bound(g)
    lo, hi = -bound, bound
    out: list[tuple[Rat, Rat]] = []
    stack = [(lo, hi, _changes_at(chain, lo), _changes_at(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = _nonroot_near(g, (a + b) / 2, a, b)
        vm = _changes_at(chain, m)
        stack.append((a, m, va, vm))
        stack.append((m, b, vm, vb))
    out.sort()
    return RootIsolation(f, tuple(out), True, at_inf)
