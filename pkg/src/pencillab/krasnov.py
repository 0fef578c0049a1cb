"""Signature walk of a real pencil around the unit circle and its Krasnov invariant.

Walking ``(s, t) = (cos a, sin a)`` counterclockwise, the first half-turn
``a in [0, pi)`` meets every real point of P^1 once: ``a = 0`` is ``[1:0]`` and
on ``0 < a < pi`` the affine coordinate ``u = s/t`` decreases from +oo to -oo.
The second half-turn visits the antipodes, where the form is negated, so
its signatures are the swapped first-half signatures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .errors import InternalInconsistency, MalformedInvariant, MalformedPencil, SingularPencil
from .exact import ONE, ZERO, Rat, Signature, format_rat, signature_of
from .pencil import QuadricPencil, require_smooth
from .poly import isolate_real_roots


@dataclass(frozen=True)
class Crossing:
    """A lift to S^1 of a real root of the discriminant.

    ``interval`` is an isolating interval for ``u = s/t`` (chart t=1), or None
    for the root ``[1:0]`` (chart s=1).  ``sheet`` 0 is the lift with t > 0 (or
    s > 0 at infinity), sheet 1 its antipode.
    """

    interval: tuple[Rat, Rat] | None
    sheet: int

    @property
    def chart(self) -> str:
        return "s=1" if self.interval is None else "t=1"

    def to_json(self) -> dict:
        d = {"chart": self.chart, "sheet": self.sheet}
        if self.interval is None:
            d["point"] = "[1:0]" if self.sheet == 0 else "[-1:0]"
        else:
            d["interval"] = [format_rat(self.interval[0]), format_rat(self.interval[1])]
        return d


@dataclass(frozen=True)
class SignatureWalk:
    N: int
    crossings: tuple[Crossing, ...]
    arcs: tuple[Signature, ...]
    steps: str
    samples: tuple[tuple[Rat, Rat], ...] = field(default=(), compare=False)

    @property
    def real_roots(self) -> int:
        return len(self.crossings) // 2

    def to_json(self) -> dict:
        return {
            "crossings": [c.to_json() for c in self.crossings],
            "arcs": [[a.positives, a.negatives] for a in self.arcs],
            "steps": self.steps,
        }


def antipodal_ok(walk: SignatureWalk) -> bool:
    """Arcs half a turn apart carry swapped signatures."""
    r = walk.real_roots
    if r == 0:
        a = walk.arcs[0]
        return a.positives == a.negatives
    return all(walk.arcs[j + r] == walk.arcs[j].swapped() for j in range(r))


def walk_violations(walk: SignatureWalk) -> list[str]:
    """Names of violated walk invariants (empty when the walk is consistent)."""
    bad = []
    r = walk.real_roots
    if len(walk.crossings) != 2 * r or len(walk.steps) != 2 * r:
        bad.append("crossing-count")
    if len(walk.arcs) != max(2 * r, 1):
        bad.append("arc-count")
    if any(a.corank != 0 or a.positives + a.negatives != walk.N + 1 for a in walk.arcs):
        bad.append("nondegenerate-arcs")
    for j in range(2 * r):
        diff = walk.arcs[j].positives - walk.arcs[j - 1].positives
        if diff != (1 if walk.steps[j] == "+" else -1):
            bad.append("unit-steps")
            break
    if not antipodal_ok(walk):
        bad.append("antipodal-swap")
    return bad


def _arc_samples(iso) -> tuple[list[Crossing], list[tuple[Rat, Rat]]]:
    """First-half crossings and one rational sample strictly inside each first-half arc."""
    ivs = sorted(iso.intervals, key=lambda ab: ab[0], reverse=True)  # decreasing u
    crossings = []
    if iso.at_infinity:
        crossings.append(Crossing(None, 0))
    crossings.extend(Crossing(iv, 0) for iv in ivs)
    r = len(crossings)
    samples: list[tuple[Rat, Rat]] = []
    if r == 0:
        return crossings, [(ONE, ZERO)]
    for j in range(r):
        cur, nxt = crossings[j], crossings[j + 1] if j + 1 < r else None
        if nxt is None:
            # from the last crossing through a = pi to the antipode of the first
            if iso.at_infinity:
                if cur.interval is None:
                    samples.append((ZERO, ONE))
                else:
                    samples.append((cur.interval[0] - 1, ONE))
            else:
                samples.append((-ONE, ZERO))
        elif cur.interval is None:
            samples.append((nxt.interval[1] + 1, ONE))
        else:
            hi_gap, lo_gap = cur.interval[0], nxt.interval[1]
            samples.append(((hi_gap + lo_gap) / 2, ONE))
    return crossings, samples


def compute_walk(p: QuadricPencil) -> SignatureWalk:
    delta = require_smooth(p)
    iso = isolate_real_roots(delta)
    first, samples = _arc_samples(iso)
    r = len(first)
    if r == 0:
        arcs = (signature_of(p.fiber(*samples[0])),)
        return SignatureWalk(p.N, (), arcs, "", tuple(samples))
    full_samples = samples + [(-s, -t) for s, t in samples]
    arcs = tuple(signature_of(p.fiber(s, t)) for s, t in full_samples)
    crossings = tuple(first) + tuple(Crossing(c.interval, 1) for c in first)
    # crossing j sits between arc j-1 and arc j
    steps = []
    for j in range(2 * r):
        diff = arcs[j].positives - arcs[j - 1].positives
        if abs(diff) != 1:
            raise InternalInconsistency(f"signature jump of {diff} at crossing {j}")
        steps.append("+" if diff > 0 else "-")
    walk = SignatureWalk(p.N, crossings, arcs, "".join(steps), tuple(full_samples))
    bad = walk_violations(walk)
    if bad:
        raise InternalInconsistency(f"walk invariants violated: {', '.join(bad)}")
    return walk


# --- the invariant --------------------------------------------------------


def canonical_form(runs: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically smallest rotation of the sequence or of its reversal."""
    runs = tuple(runs)
    if not runs:
        return ()
    cands = []
    for seq in (runs, runs[::-1]):
        for i in range(len(seq)):
            cands.append(seq[i:] + seq[:i])
    return min(cands)


def format_invariant(runs: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in runs) + ")"


def parse_invariant(text: str) -> tuple[int, ...]:
    body = text.strip().strip("()").strip()
    if not body:
        return ()
    try:
        return tuple(int(x) for x in body.split(","))
    except ValueError as exc:
        raise MalformedInvariant(f"cannot parse invariant {text!r}") from exc


@dataclass(frozen=True)
class KrasnovInvariant:
    runs: tuple[int, ...]
    N: int

    def __post_init__(self):
        runs = canonical_form(self.runs)
        object.__setattr__(self, "runs", runs)
        total = sum(runs)
        if any(x <= 0 for x in runs):
            raise MalformedInvariant("runs must be positive")
        if runs and len(runs) % 2 == 0:
            raise MalformedInvariant("an invariant has an odd number of runs")
        if total > self.N + 1 or (total - self.N - 1) % 2:
            raise MalformedInvariant(f"run total {total} incompatible with N = {self.N}")

    @property
    def r(self) -> int:
        return sum(self.runs)

    def __str__(self) -> str:
        return format_invariant(self.runs)


@dataclass(frozen=True)
class HeightFrequency:
    i_min: int
    h: int
    f: int


def plus_runs(steps: str) -> list[int]:
    """Maximal runs of '+' in a cyclic step string, in cyclic order."""
    if not steps:
        return []
    if "-" not in steps:
        return [len(steps)]
    k = steps.index("-")
    rot = steps[k:] + steps[:k]
    return [len(chunk) for chunk in rot.split("-") if chunk]


def krasnov_of(walk: SignatureWalk) -> KrasnovInvariant:
    return KrasnovInvariant(tuple(plus_runs(walk.steps)), walk.N)


def step_sequence(inv: KrasnovInvariant) -> str:
    """Cyclic step string: + runs r_k interleaved with - runs r_(k+u+1), then its negation."""
    runs = inv.runs
    if not runs:
        return ""
    u = (len(runs) - 1) // 2
    first = []
    for k in range(u + 1):
        first.append("+" * runs[k])
        if k < u:
            first.append("-" * runs[k + u + 1])
    half = "".join(first)
    return half + half.translate(str.maketrans("+-", "-+"))


def reconstruct_walk(inv: KrasnovInvariant) -> SignatureWalk:
    """Arc signatures forced by the step sequence and the antipodal swap.

    With d_j = +-1 the step into arc j and S_j the sum of the r steps after
    arc j, the swap ``p_(j+r) = N+1 - p_j`` gives ``p_j = (N+1 - S_j) / 2``.
    """
    n1 = inv.N + 1
    steps = step_sequence(inv)
    r = len(steps) // 2
    if r == 0:
        if n1 % 2:
            raise MalformedInvariant("empty invariant needs N odd")
        half = n1 // 2
        return SignatureWalk(inv.N, (), (Signature(half, half, 0),), "")
    d = [1 if c == "+" else -1 for c in steps]
    arcs = []
    for j in range(2 * r):
        s_j = sum(d[(j + i) % (2 * r)] for i in range(1, r + 1))
        if (n1 - s_j) % 2:
            raise MalformedInvariant("parity of the step sums contradicts N")
        pj = (n1 - s_j) // 2
        if not 0 <= pj <= n1:
            raise MalformedInvariant("invariant forces an impossible signature")
        arcs.append(Signature(pj, n1 - pj, 0))
    crossings = tuple(Crossing(None, 0) for _ in range(2 * r))  # abstract positions
    return SignatureWalk(inv.N, crossings, tuple(arcs), steps)


def height_frequency_of_walk(walk: SignatureWalk) -> HeightFrequency:
    i_min = min(a.negatives for a in walk.arcs)
    f = sum(1 for a in walk.arcs if a.negatives == i_min)
    return HeightFrequency(i_min, walk.N + 1 - 2 * i_min, f)


def height_frequency(inv: KrasnovInvariant) -> HeightFrequency:
    return height_frequency_of_walk(reconstruct_walk(inv))


@dataclass(frozen=True)
class KrasnovReport:
    walk: SignatureWalk
    invariant: KrasnovInvariant
    hf: HeightFrequency


def krasnov_of_pencil(p: QuadricPencil) -> KrasnovReport:
    walk = compute_walk(p)
    inv = krasnov_of(walk)
    direct = height_frequency_of_walk(walk)
    via = height_frequency(inv)
    if direct != via:
        raise InternalInconsistency(f"height/frequency mismatch: walk {direct}, invariant {via}")
    return KrasnovReport(walk, inv, direct)


def staircase_pencil(N: int) -> QuadricPencil:
    """``I`` and ``diag(1, ..., N+1)``: definite q0, invariant (N+1)."""
    from .exact import SymMat

    return QuadricPencil(SymMat.diag([1] * (N + 1)), SymMat.diag(range(1, N + 2)))


def random_pencil(N: int, seed: int, entry_range: int = 3) -> QuadricPencil:
    """Random smooth pencil with small integer entries (resampled until smooth)."""
    import random

    from .exact import SymMat
    from .pencil import validate_smooth

    rng = random.Random(f"random:{N}:{seed}")
    n = N + 1
    while True:
        mats = []
        for _ in range(2):
            m = [[ZERO] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    v = mpq(rng.randint(-entry_range, entry_range))
                    m[i][j] = m[j][i] = v
            mats.append(SymMat(m))
        p = QuadricPencil(*mats)
        try:
            if validate_smooth(p):
                return p
        except MalformedPencil:
            continue


def random_diagonal_pencil(N: int, seed: int) -> QuadricPencil:
    """Simultaneously diagonal pencil with random signs: every root of Delta is real."""
    import random

    from .exact import SymMat

    rng = random.Random(f"rdiag:{N}:{seed}")
    n = N + 1
    while True:
        a = [rng.choice((-2, -1, 1, 2)) for _ in range(n)]
        b = [rng.randint(-6, 6) for _ in range(n)]
        ratios = {mpq(bi, ai) for ai, bi in zip(a, b)}
        if len(ratios) == n:
            return QuadricPencil(SymMat.diag(a), SymMat.diag(b))


__all__ = [
    "Crossing",
    "SignatureWalk",
    "KrasnovInvariant",
    "HeightFrequency",
    "KrasnovReport",
    "compute_walk",
    "krasnov_of",
    "reconstruct_walk",
    "height_frequency",
    "height_frequency_of_walk",
    "krasnov_of_pencil",
    "canonical_form",
    "format_invariant",
    "parse_invariant",
    "step_sequence",
    "plus_runs",
    "antipodal_ok",
    "walk_violations",
    "staircase_pencil",
    "random_pencil",
    "random_diagonal_pencil",
    "SingularPencil",
]
