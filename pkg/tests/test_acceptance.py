"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Expected lists are written in their published (display) order and compared
after canonicalization, so rotation/reversal conventions do not matter.
"""

import json
import random
import time
from itertools import combinations, product
from pathlib import Path

import numpy as np
import pytest
from gmpy2 import mpq

from pencillab import fforacle, krasnov, verdict
from pencillab.cli import isotopy_report
from pencillab.exact import Signature, signature_of
from pencillab.pencil import (
    QuadricPencil,
    fiber_signature_gap,
    generate_diagonal_pencil,
    generate_plane_pair,
    generate_test_pencil,
    reduced_fiber,
)

DATA = Path(__file__).parent / "data"


def canon(items) -> set[str]:
    return {krasnov.format_invariant(krasnov.canonical_form(krasnov.parse_invariant(s))) for s in items}


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


# --- N = 6 real-locus lists -----------------------------------------------------

F2_POINT = ["(1)", "(1,1,1)", "(1,1,1,1,1)", "(1,1,1,1,1,1,1)"]
F1_CONNECTED = F2_POINT + ["(3)", "(2,2,1)", "(2,1,2,1,1)"]
F1_POINT = F1_CONNECTED + ["(3,1,1)", "(3,2,2)", "(3,1,1,1,1)", "(2,2,1,1,1)"]
X_CONNECTED = F1_POINT + ["(5)", "(4,2,1)", "(3,3,1)"]
X_POINT = X_CONNECTED + ["(5,1,1)"]

F1_RATIONAL = ["(1)", "(3)", "(1,1,1)", "(2,2,1)", "(1,1,1,1,1)", "(2,1,2,1,1)", "(1,1,1,1,1,1,1)"]
F1_UNIRATIONAL_EXTRA = ["(3,1,1)", "(3,2,2)", "(3,1,1,1,1)", "(2,2,1,1,1)"]
X_RATIONAL_EXTRA = ["(5)", "(4,2,1)", "(3,3,1)"]
X_UNIRATIONAL_EXTRA = ["(5,1,1)"]


def test_criterion_01_real_locus_lists_n6(criterion):
    expected = {
        "f2-real-point": canon(F2_POINT),
        "f1-connected": canon(F1_CONNECTED),
        "f1-real-point": canon(F1_POINT),
        "f0-connected": canon(X_CONNECTED),
        "f0-real-point": canon(X_POINT),
    }
    report, elapsed = timed(lambda: isotopy_report(6))
    everything = set(report["invariants"])
    got = {key: set(report["lists"][key]) for key in expected}
    ok = got == expected and everything - got["f0-real-point"] == {"(7)"} and elapsed < 1.0
    sizes = ", ".join(f"{k}={len(v)}" for k, v in got.items())
    criterion(1, ok, f"five N=6 lists ({sizes})", elapsed)
    assert got == expected
    assert everything - got["f0-real-point"] == {"(7)"}
    assert elapsed < 1.0


def test_criterion_02_rationality_lists_n6(criterion):
    f1_rat = canon(F1_RATIONAL)
    f1_uni = f1_rat | canon(F1_UNIRATIONAL_EXTRA)
    x_rat = f1_uni | canon(X_RATIONAL_EXTRA)
    x_uni = x_rat | canon(X_UNIRATIONAL_EXTRA)
    expected = {"f1-rational": f1_rat, "f1-unirational": f1_uni, "f0-rational": x_rat, "f0-unirational": x_uni}
    report, elapsed = timed(lambda: isotopy_report(6))
    got = {key: set(report["lists"][key]) for key in expected}
    sizes = [len(f1_rat), len(f1_uni - f1_rat), len(x_rat - f1_uni), len(x_uni - x_rat)]
    ok = got == expected and sizes == [7, 4, 3, 1] and elapsed < 1.0
    criterion(2, ok, f"four N=6 lists, increments {sizes}", elapsed)
    assert sizes == [7, 4, 3, 1]
    assert got == expected
    assert elapsed < 1.0


# --- h = 4, f = 1 classes in odd dimension ---------------------------------------

PUBLISHED_H4F1 = {
    5: ["(4)", "(4,1,1)", "(3,2,1)"],
    7: ["(4)", "(4,1,1)", "(3,2,1)", "(3,1,2,1,1)", "(2,2,2,1,1)", "(3,3,2)"],
}


@pytest.mark.xfail(
    strict=True,
    reason=(
        "(4,1,1) has f = 2, not 1: its sign sequence ++++-+----+- has two arcs at the minimal "
        "negative count, confirmed by brute force over antipodal step strings and by an explicit "
        "diagonal pencil; see the decisions ledger"
    ),
)
def test_criterion_03_height4_frequency1_odd(criterion):
    start = time.perf_counter()
    got = {N: set(verdict.invariants_matching(N, "h=4,f=1")) for N in PUBLISHED_H4F1}
    elapsed = time.perf_counter() - start
    expected = {N: canon(v) for N, v in PUBLISHED_H4F1.items()}
    ok = got == expected and elapsed < 1.0
    diff = {N: sorted(expected[N] ^ got[N]) for N in expected}
    criterion(3, ok, f"published vs computed symmetric difference {diff}", elapsed)
    assert got == expected


def test_height4_frequency1_odd_computed_lists():
    # The published lists minus (4,1,1), whose frequency is 2.
    assert set(verdict.invariants_matching(5, "h=4,f=1")) == canon(["(4)", "(3,2,1)"])
    assert set(verdict.invariants_matching(7, "h=4,f=1")) == canon(
        ["(4)", "(3,2,1)", "(3,1,2,1,1)", "(2,2,2,1,1)", "(3,3,2)"]
    )
    for N in (5, 7):
        hf = krasnov.height_frequency(krasnov.KrasnovInvariant((4, 1, 1), N))
        assert (hf.h, hf.f) == (4, 2)


def _brute_force_hf(runs, N):
    """(h, f) from first principles: try every antipodal step string with these + runs."""
    r = sum(runs)
    results = set()
    for bits in product("+-", repeat=r):
        half = "".join(bits)
        steps = half + half.translate(str.maketrans("+-", "-+"))
        if krasnov.canonical_form(krasnov.plus_runs(steps)) != krasnov.canonical_form(runs):
            continue
        # negatives on arc j: swap p_(j+r) = N+1 - p_j fixes the offset
        deltas = [1 if c == "+" else -1 for c in steps]
        neg = [0]
        for d in deltas[:-1]:
            neg.append(neg[-1] - d)  # a '+' step raises positives, lowers negatives
        shift = (N + 1 - neg[0] - neg[r]) / 2
        neg = [x + shift for x in neg]
        i_min = min(neg)
        results.add((int(N + 1 - 2 * i_min), sum(1 for x in neg if x == i_min)))
    return results


def test_frequency_of_411_by_brute_force():
    assert _brute_force_hf((4, 1, 1), 5) == {(4, 2)}
    assert _brute_force_hf((3, 2, 1), 5) == {(4, 1)}


def test_frequency_of_411_on_explicit_pencil():
    # diag(a), diag(b) with all eight root angles distinct, read counterclockwise:
    # steps ++++-+----+- give + runs (4, 1, 1).
    from pencillab.verify import diagonal_steps

    pencil = None
    rng = random.Random(411)
    for _ in range(20000):
        a = [rng.randint(-6, 6) for _ in range(6)]
        b = [rng.randint(-6, 6) for _ in range(6)]
        if any(x == 0 and y == 0 for x, y in zip(a, b)):
            continue
        if len({(x * 1.0 / y) if y else None for x, y in zip(a, b)}) < 6:
            continue
        if krasnov.canonical_form(krasnov.plus_runs(diagonal_steps(a, b))) == krasnov.canonical_form((4, 1, 1)):
            pencil = QuadricPencil.from_rows(
                [[a[i] if i == j else 0 for j in range(6)] for i in range(6)],
                [[b[i] if i == j else 0 for j in range(6)] for i in range(6)],
            )
            break
    assert pencil is not None
    rep = krasnov.krasnov_of_pencil(pencil)
    assert rep.invariant.runs == krasnov.canonical_form((4, 1, 1))
    assert (rep.hf.h, rep.hf.f) == (4, 2)


# --- class counts ---------------------------------------------------------------


def necklace_oracle(N: int) -> int:
    """Odd-length compositions of r = N+1, N-1, ... up to the dihedral action, by orbit sets."""
    orbits = set()
    for r in range(N + 1, -1, -2):
        if r == 0:
            orbits.add(frozenset({()}))
            continue
        for parts in range(1, r + 1, 2):
            for cuts in combinations(range(1, r), parts - 1):
                bounds = (0,) + cuts + (r,)
                comp = tuple(b - a for a, b in zip(bounds, bounds[1:]))
                orbit = set()
                for seq in (comp, comp[::-1]):
                    for k in range(parts):
                        orbit.add(seq[k:] + seq[:k])
                orbits.add(frozenset(orbit))
    return len(orbits)


def test_criterion_04_class_counts(criterion):
    start = time.perf_counter()
    got = {N: len(verdict.enumerate_isotopy(N)) for N in range(3, 11)}
    oracle = {N: necklace_oracle(N) for N in range(3, 11)}
    published_n6 = canon(F1_RATIONAL + F1_UNIRATIONAL_EXTRA + X_RATIONAL_EXTRA + X_UNIRATIONAL_EXTRA) | {"(7)"}
    elapsed = time.perf_counter() - start
    ok = got == oracle and got[6] == 16 == len(published_n6) and elapsed < 5.0
    criterion(4, ok, f"counts N=3..10 {list(got.values())}", elapsed)
    assert got == oracle
    assert got[6] == len(published_n6) == 16
    assert {str(c.invariant) for c in verdict.enumerate_isotopy(6)} == published_n6
    assert elapsed < 5.0


# --- hyperbolic reduction ----------------------------------------------------------


def _rational_point_off(delta, rng):
    while True:
        st = (mpq(rng.randint(-30, 30), rng.randint(1, 7)), mpq(rng.randint(-30, 30), rng.randint(1, 7)))
        if st != (0, 0) and delta(*st) != 0:
            return st


def test_criterion_05_signature_law(criterion):
    start = time.perf_counter()
    failures = []
    checks = 0
    for N in range(4, 10):
        for r in range(N // 2):
            for seed in range(50):
                p, ell, _ = generate_plane_pair(N, r, seed)
                delta = p.discriminant()
                rng = random.Random(f"law:{N}:{r}:{seed}")
                for _ in range(10):
                    st = _rational_point_off(delta, rng)
                    full, red = fiber_signature_gap(p, ell, st)
                    checks += 1
                    if full != Signature(red.positives + r + 1, red.negatives + r + 1, red.corank) or full.corank:
                        failures.append((N, r, seed, st))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60.0
    criterion(5, ok, f"{checks} fiber checks, {len(failures)} failures", elapsed)
    assert not failures
    assert elapsed < 60.0


def test_criterion_06_degeneracy_preservation(criterion):
    start = time.perf_counter()
    failures = []
    checks = 0
    for N in range(4, 9):
        rmax = (N + 1) // 3 - 1
        for seed in range(20):
            r = seed % (rmax + 1)
            built = generate_diagonal_pencil(N, r, seed)
            for st in built.roots:
                checks += 1
                if signature_of(reduced_fiber(built.pencil, built.plane, st).gram).corank != 1:
                    failures.append(("root", N, r, seed, st))
            rng = random.Random(f"nonroot:{N}:{seed}")
            delta = built.pencil.discriminant()
            for _ in range(20):
                st = _rational_point_off(delta, rng)
                checks += 1
                if signature_of(reduced_fiber(built.pencil, built.plane, st).gram).corank != 0:
                    failures.append(("nonroot", N, r, seed, st))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30.0
    criterion(6, ok, f"{checks} corank checks, {len(failures)} failures", elapsed)
    assert not failures
    assert elapsed < 30.0


# --- signature walk ---------------------------------------------------------------


def test_criterion_07_krasnov_round_trip(criterion):
    from pencillab.pencil import _random_unimodular

    start = time.perf_counter()
    failures = []
    for i in range(100):
        N = 3 + i % 6
        seed = 1000 + i
        p = krasnov.random_pencil(N, seed) if i % 2 else krasnov.random_diagonal_pencil(N, seed)
        walk = krasnov.compute_walk(p)
        bad = krasnov.walk_violations(walk)
        inv = krasnov.krasnov_of(walk)
        direct = krasnov.height_frequency_of_walk(walk)
        rebuilt = krasnov.height_frequency_of_walk(krasnov.reconstruct_walk(inv))
        rng = random.Random(seed)
        while True:
            a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
            if a * d - b * c:
                break
        moved = krasnov.krasnov_of(krasnov.compute_walk(p.reparametrize(a, b, c, d)))
        congruent = krasnov.krasnov_of(krasnov.compute_walk(p.congruent(_random_unimodular(N + 1, rng))))
        if bad or direct != rebuilt or moved != inv or congruent != inv:
            failures.append((N, seed, bad, direct, rebuilt, moved, congruent))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120.0
    criterion(7, ok, f"100 pencils N=3..8, {len(failures)} failures", elapsed)
    assert not failures
    assert elapsed < 120.0


# --- finite fields --------------------------------------------------------------------


def test_criterion_08_split_dp4_lines(criterion):
    data = json.loads((DATA / "split_dp4.json").read_text())
    start = time.perf_counter()
    fp = fforacle.reduce_pencil(fforacle.diagonal_pencil(data["lambda"]), data["p"])
    line = np.array(data["reference_line"], dtype=np.int32)
    census = fforacle.census_planes(fp, 1, line)
    elapsed = time.perf_counter() - start
    disjoint = census.by_intersection.get(-1, 0)
    meeting = census.meeting(0)
    ok = census.total == 16 and disjoint == 10 and meeting == 5 and elapsed < 10.0
    criterion(8, ok, f"p={data['p']}: {census.total} lines, {disjoint} disjoint, {meeting} meeting", elapsed)
    assert fp.discriminant.splits_over(1)
    assert (census.total, disjoint, meeting) == (16, 10, 5)
    assert census.check_partition()
    assert elapsed < 10.0


BIJECTION_CASES = [(4, 0, 3), (4, 0, 5), (5, 0, 3), (5, 1, 3)]


def test_criterion_09_reduction_bijection(criterion):
    start = time.perf_counter()
    rows = []
    for N, r, q in BIJECTION_CASES:
        seed, fp, ell = fforacle.good_reduction_seed(N, r, q)
        counts = fforacle.check_reduction_bijection(fp, ell)
        rows.append((N, r, q, seed, counts.lhs, counts.rhs))
    elapsed = time.perf_counter() - start
    ok = all(lhs == rhs for *_, lhs, rhs in rows) and elapsed < 60.0
    detail = "; ".join(f"({N},{r},{q}) seed {s}: {lhs}={rhs}" for N, r, q, s, lhs, rhs in rows)
    criterion(9, ok, detail, elapsed)
    assert all(lhs == rhs for *_, lhs, rhs in rows)
    assert all(lhs > 0 for *_, lhs, _ in rows)
    assert elapsed < 60.0


# (N, prime, seed) with Delta split over F_(p^2): the reduced scheme is finite of length 2g+1
LENGTH_CASES = [(4, 3, 6), (4, 5, 1), (6, 7, 14), (6, 7, 23)]


def test_criterion_10_reduced_scheme_length(criterion):
    start = time.perf_counter()
    rows = []
    for N, p, seed in LENGTH_CASES:
        pencil, ell = generate_test_pencil(N, seed, N // 2 - 1)
        fp = fforacle.reduce_pencil(pencil, p)
        sl = fforacle.reduced_scheme_length(fp, ell)
        rows.append((N, p, seed, sl.complete, sl.length_over(2), N + 1))
    elapsed = time.perf_counter() - start
    ok = all(c and got == want for *_, c, got, want in rows) and elapsed < 30.0
    detail = "; ".join(f"g={N // 2} p={p} seed {s}: length {got}" for N, p, s, _, got, _ in rows)
    criterion(10, ok, detail, elapsed)
    assert all(complete for *_, complete, _, _ in rows)
    assert [got for *_, got, _ in rows] == [want for *_, want in rows]
    assert elapsed < 30.0


def test_criterion_11_linear_spaces_exist(criterion):
    start = time.perf_counter()
    failures = []
    searched = 0
    for N in (4, 5, 6):
        for q in (3, 5, 7):
            for seed in range(5):
                fp = fforacle.random_fq_pencil(N, q, seed)
                for r in range(N // 2 - 1):
                    searched += 1
                    plane = fforacle.find_plane(fp, r)
                    if plane is None or not fforacle.is_isotropic(fp, plane):
                        failures.append((N, q, seed, r))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 120.0
    criterion(11, ok, f"{searched} searches, {len(failures)} empty", elapsed)
    assert not failures
    assert elapsed < 120.0
