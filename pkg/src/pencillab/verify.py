"""Seeded property batteries tying the modules together.

Each property is a function ``(rng, trial) -> None`` that raises
AssertionError (or a library error) on failure.  :func:`run_battery` runs
every property ``trials`` times and tallies passes and failures by name.
"""

from __future__ import annotations

import math
import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from gmpy2 import mpq

from . import fforacle, krasnov, verdict
from .errors import PencilError
from .exact import Signature, signature_of
from .pencil import (
    fiber_signature_gap,
    generate_diagonal_pencil,
    generate_plane_pair,
    reduced_fiber,
)


def _random_point(rng: random.Random, p) -> tuple[mpq, mpq]:
    delta = p.discriminant()
    while True:
        st = (mpq(rng.randint(-20, 20), rng.randint(1, 9)), mpq(rng.randint(-20, 20), rng.randint(1, 9)))
        if st != (0, 0) and delta(*st) != 0:
            return st


def prop_signature_law(rng: random.Random, trial: int) -> None:
    N = rng.randint(4, 7)
    r = rng.randint(0, N // 2 - 1)
    p, ell, _ = generate_plane_pair(N, r, rng.randrange(10**6))
    for _ in range(3):
        st = _random_point(rng, p)
        full, red = fiber_signature_gap(p, ell, st)
        expected = Signature(red.positives + r + 1, red.negatives + r + 1, red.corank)
        assert full == expected, f"N={N} r={r} at {st}: {full} vs reduced {red}"


def prop_plane_independence(rng: random.Random, trial: int) -> None:
    N = rng.randint(4, 7)
    r = rng.randint(0, N // 2 - 1)
    p, ell, m = generate_plane_pair(N, r, rng.randrange(10**6))
    st = _random_point(rng, p)
    a = signature_of(reduced_fiber(p, ell, st).gram)
    b = signature_of(reduced_fiber(p, m, st).gram)
    assert a == b, f"N={N} r={r}: reduced signatures differ between planes ({a} vs {b})"


def prop_degeneracy(rng: random.Random, trial: int) -> None:
    N = rng.randint(4, 8)
    r = rng.randint(0, (N + 1) // 3 - 1)
    built = generate_diagonal_pencil(N, r, rng.randrange(10**6))
    for st in built.roots:
        c = signature_of(reduced_fiber(built.pencil, built.plane, st).gram).corank
        assert c == 1, f"corank {c} at root {st}"
    st = _random_point(rng, built.pencil)
    c = signature_of(reduced_fiber(built.pencil, built.plane, st).gram).corank
    assert c == 0, f"corank {c} off the discriminant at {st}"


def _some_pencil(rng: random.Random):
    N = rng.randint(3, 7)
    seed = rng.randrange(10**6)
    if rng.random() < 0.5:
        return krasnov.random_diagonal_pencil(N, seed)
    return krasnov.random_pencil(N, seed)


def prop_walk_invariants(rng: random.Random, trial: int) -> None:
    p = _some_pencil(rng)
    walk = krasnov.compute_walk(p)
    bad = krasnov.walk_violations(walk)
    assert not bad, f"walk invariants violated: {', '.join(bad)}"


def prop_reconstruction(rng: random.Random, trial: int) -> None:
    p = _some_pencil(rng)
    walk = krasnov.compute_walk(p)
    inv = krasnov.krasnov_of(walk)
    rebuilt = krasnov.reconstruct_walk(inv)
    assert sorted(walk.arcs) == sorted(rebuilt.arcs), "arc signature multisets differ"
    assert krasnov.height_frequency_of_walk(walk) == krasnov.height_frequency(inv), "(h, f) differ"


def prop_gl2_invariance(rng: random.Random, trial: int) -> None:
    p = _some_pencil(rng)
    base = krasnov.krasnov_of_pencil(p)
    while True:
        a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
        if a * d - b * c != 0:
            break
    moved = krasnov.krasnov_of_pencil(p.reparametrize(a, b, c, d))
    assert (moved.invariant, moved.hf) == (base.invariant, base.hf), "reparametrization changed the invariant"
    flipped = krasnov.krasnov_of_pencil(p.reparametrize(1, 0, 0, -1))
    assert flipped.invariant == base.invariant, "orientation reversal changed the invariant"


def prop_congruence_invariance(rng: random.Random, trial: int) -> None:
    from .pencil import _random_unimodular

    p = _some_pencil(rng)
    base = krasnov.krasnov_of_pencil(p)
    moved = krasnov.krasnov_of_pencil(p.congruent(_random_unimodular(p.N + 1, rng)))
    assert (moved.invariant, moved.hf) == (base.invariant, base.hf), "congruence changed the invariant"


def prop_verdict_consistency(rng: random.Random, trial: int) -> None:
    N = rng.randint(3, 10)
    classes = verdict.enumerate_isotopy(N)
    cls = rng.choice(classes)
    table = verdict.decide(N, cls.invariant)  # raises on internal contradictions
    for a, b in zip(table.rows, table.rows[1:]):
        if b.fano_real_point.value == verdict.YES:
            assert a.fano_real_point.value == verdict.YES, "real points not monotone in r"


def diagonal_steps(a, b) -> str:
    """Step string of the pencil diag(a), diag(b) read off from root angles.

    Entry i vanishes at the angles of +-(b_i, -a_i); moving counterclockwise
    it turns positive at atan2(-a_i, b_i) and negative at the antipode.
    Floating angles suffice: entries are small integers with distinct ratios.
    """
    events = []
    for ai, bi in zip(a, b):
        theta = math.atan2(-ai, bi) % (2 * math.pi)
        events.append((theta, "+"))
        events.append(((theta + math.pi) % (2 * math.pi), "-"))
    return "".join(sym for _, sym in sorted(events))


def prop_end_to_end(rng: random.Random, trial: int) -> None:
    N = rng.randint(3, 8)
    p = krasnov.random_diagonal_pencil(N, rng.randrange(10**6))
    a = [p.q0[i, i] for i in range(N + 1)]
    b = [p.q1[i, i] for i in range(N + 1)]
    expected = krasnov.KrasnovInvariant(krasnov.plus_runs(diagonal_steps(a, b)), N)
    rep = krasnov.krasnov_of_pencil(p)
    assert rep.invariant == expected, f"walk gives {rep.invariant}, root angles give {expected}"
    got = verdict.decide(N, rep.invariant).to_json()
    assert got == verdict.decide(N, expected).to_json()
    if trial == 0:
        stair = krasnov.krasnov_of_pencil(krasnov.staircase_pencil(N))
        assert stair.invariant.runs == (N + 1,), f"staircase gives {stair.invariant}"


def prop_gaussian_binomial(rng: random.Random, trial: int) -> None:
    q = rng.choice((3, 5))
    n = rng.randint(2, 5 if q == 3 else 4)
    k = rng.randint(1, n)
    f = fforacle.FiniteField(q)
    got = sum(len(b) for b in fforacle.iter_isotropic_subspaces(f, n, k))
    assert got == fforacle.gaussian_binomial(n, k, q), f"[{n} choose {k}]_{q}: enumerated {got}"


def prop_census_partition(rng: random.Random, trial: int) -> None:
    N = rng.randint(4, 5)
    q = rng.choice((3, 5))
    fp = fforacle.random_fq_pencil(N, q, rng.randrange(10**6))
    ell = fforacle.find_plane(fp, 0)
    census = fforacle.census_planes(fp, 0, ell)
    assert census.check_partition(), "partition does not sum to the total"


def prop_bijection(rng: random.Random, trial: int) -> None:
    N, r, q = rng.choice(((4, 0, 3), (4, 0, 5), (5, 0, 3), (5, 1, 3)))
    _, fp, ell = fforacle.good_reduction_seed(N, r, q, start=rng.randrange(1000))
    counts = fforacle.check_reduction_bijection(fp, ell)
    assert counts.equal, f"(N, r, q) = ({N}, {r}, {q}): lhs {counts.lhs} != rhs {counts.rhs}"


PROPERTIES: dict[str, Callable[[random.Random, int], None]] = {
    "signature-law": prop_signature_law,
    "plane-independence": prop_plane_independence,
    "degeneracy-preservation": prop_degeneracy,
    "walk-invariants": prop_walk_invariants,
    "reconstruction-fidelity": prop_reconstruction,
    "gl2-invariance": prop_gl2_invariance,
    "congruence-invariance": prop_congruence_invariance,
    "verdict-consistency": prop_verdict_consistency,
    "end-to-end-verdicts": prop_end_to_end,
    "gaussian-binomial": prop_gaussian_binomial,
    "census-partition": prop_census_partition,
    "reduction-bijection": prop_bijection,
}


@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "failed": self.failed, "failures": self.failures[:5]}


@dataclass
class BatteryReport:
    seed: int
    trials: int
    results: dict[str, PropertyResult]
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.failed == 0 for r in self.results.values())

    @property
    def failed_properties(self) -> list[str]:
        return [name for name, r in self.results.items() if r.failed]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "properties": {name: r.to_json() for name, r in self.results.items()},
            "warnings": self.warnings,
        }


def run_property(name: str, seed: int, trials: int) -> PropertyResult:
    fn = PROPERTIES[name]
    rng = random.Random(f"verify:{seed}:{name}")
    res = PropertyResult(name)
    for trial in range(trials):
        try:
            fn(rng, trial)
        except (AssertionError, PencilError) as exc:
            res.failed += 1
            res.failures.append(f"trial {trial}: {type(exc).__name__}: {exc}")
        else:
            res.passed += 1
    return res


def run_battery(seed: int = 0, trials: int = 50, jobs: int = 1, only: list[str] | None = None) -> BatteryReport:
    names = list(only) if only else list(PROPERTIES)
    unknown = [n for n in names if n not in PROPERTIES]
    if unknown:
        raise KeyError(f"unknown properties: {', '.join(unknown)}")
    notes = []
    if trials <= 0:
        msg = "trials = 0: every property passes vacuously"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
        return BatteryReport(seed, 0, {n: PropertyResult(n) for n in names}, notes)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {n: pool.submit(run_property, n, seed, trials) for n in names}
            results = {n: futures[n].result() for n in names}
    else:
        results = {n: run_property(n, seed, trials) for n in names}
    return BatteryReport(seed, trials, results, notes)
