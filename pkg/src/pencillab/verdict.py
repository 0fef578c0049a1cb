"""Isotopy-class enumeration and per-class verdicts on real linear spaces.

Each verdict cell is tri-state (``yes`` / ``no`` / ``unknown``) and carries the
name of the result that decides it.  Nothing is extrapolated: cells no rule
covers stay ``unknown``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .errors import InternalInconsistency, InvalidDimension
from .krasnov import (
    HeightFrequency,
    KrasnovInvariant,
    canonical_form,
    format_invariant,
    height_frequency,
    parse_invariant,
)

YES, NO, UNKNOWN = "yes", "no", "unknown"

REAL_POINTS = "real-point criterion: F_r(R) nonempty iff h <= N-2r-1"
CONNECTED = "connectivity criterion: Q^(r)(R) nonempty and connected iff h <= N-2r-3 or f = 1"
NEXT_PLANE = "next-plane criterion: F_(r+1)(R) nonempty implies F_r R-rational"
UNIRATIONAL = "unirationality criterion: F_r (r <= N/2-2) R-unirational iff F_r(R) nonempty"
EVEN_SECOND_MAXIMAL = "even N = 2g: F_(g-2) R-rational iff F_(g-2)(R) nonempty and Q^(g-2)(R) connected"
ODD_SECOND_MAXIMAL = "odd N = 2g+1: Q^(g-2) R-rational iff F_(g-1)(R) nonempty"
HEIGHT3_FREQ1 = "even N, h = 3, f = 1: F_(g-1)(R) empty, Q^(g-2) R-rational"
HEIGHT3_FREQ_MANY = "even N, h = 3, f > 1: F_(g-2) R-unirational, not R-rational"
N6_LISTS = "N = 6 classification lists"
NO_REAL_POINT = "no real point (an R-rational or R-unirational variety has real points)"
OPEN = "not decided by the available results"
MAXIMAL = "maximal linear spaces: rationality criteria cover r <= floor(N/2)-2 only"


@dataclass(frozen=True)
class Verdict:
    value: str
    citation: str

    def to_json(self) -> dict:
        return {"value": self.value, "citation": self.citation}


@dataclass(frozen=True)
class IsotopyClass:
    invariant: KrasnovInvariant
    hf: HeightFrequency

    def __str__(self) -> str:
        return str(self.invariant)


def _dihedral_classes(r: int) -> set[tuple[int, ...]]:
    out = set()
    if r == 0:
        return {()}
    for parts in range(1, r + 1, 2):
        for comp in _compositions(r, parts):
            out.add(canonical_form(comp))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_isotopy(N: int) -> list[IsotopyClass]:
    """Canonical odd decompositions of each r = N+1, N-1, ... >= 0 up to rotation/reversal."""
    if N < 3:
        raise InvalidDimension("isotopy classification needs N >= 3")
    classes = []
    for r in range(N + 1, -1, -2):
        for runs in _dihedral_classes(r):
            inv = KrasnovInvariant(runs, N)
            classes.append(IsotopyClass(inv, height_frequency(inv)))
    classes.sort(key=lambda c: (-c.invariant.r, len(c.invariant.runs), c.invariant.runs))
    return classes


# --- verdict tables -------------------------------------------------------


@dataclass
class VerdictRow:
    r: int
    fano_real_point: Verdict
    q_r_real_connected: Verdict
    fano_R_rational: Verdict
    fano_R_unirational: Verdict

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "fano_real_point": self.fano_real_point.to_json(),
            "q_r_real_connected": self.q_r_real_connected.to_json(),
            "fano_R_rational": self.fano_R_rational.to_json(),
            "fano_R_unirational": self.fano_R_unirational.to_json(),
        }


@dataclass
class VerdictTable:
    N: int
    invariant: KrasnovInvariant
    hf: HeightFrequency
    rows: list[VerdictRow]
    special: dict[str, Verdict] = field(default_factory=dict)

    def row(self, r: int) -> VerdictRow:
        return self.rows[r]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "invariant": list(self.invariant.runs),
            "h": self.hf.h,
            "f": self.hf.f,
            "rows": [row.to_json() for row in self.rows],
            "special": {k: v.to_json() for k, v in self.special.items()},
        }


# Literal N = 6 lists (F_1 rational, F_1 unirational, X rational, X unirational),
# each list including the previous ones.
_N6_EXTRA = {
    "f1-rational": ["(1)", "(3)", "(1,1,1)", "(2,2,1)", "(1,1,1,1,1)", "(2,1,2,1,1)", "(1,1,1,1,1,1,1)"],
    "f1-unirational": ["(3,1,1)", "(3,2,2)", "(3,1,1,1,1)", "(2,2,1,1,1)"],
    "x-rational": ["(5)", "(4,2,1)", "(3,3,1)"],
    "x-unirational": ["(5,1,1)"],
}


def n6_lists() -> dict[str, set[tuple[int, ...]]]:
    out = {}
    acc: set[tuple[int, ...]] = set()
    for key in ("f1-rational", "f1-unirational", "x-rational", "x-unirational"):
        acc = acc | {canonical_form(parse_invariant(s)) for s in _N6_EXTRA[key]}
        out[key] = set(acc)
    return out


def _yn(flag: bool, citation: str) -> Verdict:
    return Verdict(YES if flag else NO, citation)


def decide(N: int, inv: KrasnovInvariant) -> VerdictTable:
    if N < 3:
        raise InvalidDimension("verdicts need N >= 3")
    if inv.N != N:
        inv = KrasnovInvariant(inv.runs, N)
    hf = height_frequency(inv)
    h, f = hf.h, hf.f
    top = N // 2 - 1  # maximal r with F_r nonempty over C
    rows = []
    for r in range(top + 1):
        real = h <= N - 2 * r - 1
        point = _yn(real, REAL_POINTS)
        if real:
            conn = _yn(h <= N - 2 * r - 3 or f == 1, CONNECTED)
        else:
            conn = Verdict(NO, REAL_POINTS + " (F_r(R) empty)")
        if r <= N // 2 - 2:
            if not real:
                rational = Verdict(NO, NO_REAL_POINT)
            elif h <= N - 2 * r - 3:
                rational = Verdict(YES, NEXT_PLANE)
            elif N % 2 == 0 and r == N // 2 - 2:
                rational = _yn(conn.value == YES, EVEN_SECOND_MAXIMAL)
            else:
                rational = Verdict(UNKNOWN, OPEN)
            unirational = _yn(real, UNIRATIONAL)
        else:
            rational = Verdict(UNKNOWN, MAXIMAL)
            unirational = Verdict(UNKNOWN, MAXIMAL)
        rows.append(VerdictRow(r, point, conn, rational, unirational))

    special: dict[str, Verdict] = {}
    if N % 2 == 0 and N >= 4:
        g = N // 2
        r2 = g - 2
        defined = rows[r2].fano_real_point.value == YES
        if defined:
            special["q_second_maximal_R_rational"] = _yn(rows[r2].q_r_real_connected.value == YES, EVEN_SECOND_MAXIMAL)
        else:
            special["q_second_maximal_R_rational"] = Verdict(NO, REAL_POINTS + " (F_(g-2)(R) empty)")
        special["maximal_empty_but_q_rational"] = _yn(h == 3 and f == 1, HEIGHT3_FREQ1)
        special["second_maximal_unirational_not_rational"] = _yn(h == 3 and f > 1, HEIGHT3_FREQ_MANY)
    if N % 2 == 1 and N >= 5:
        g = (N - 1) // 2
        r2 = g - 2
        special["maximal_real_point"] = _yn(h <= 2, REAL_POINTS + " at r = g-1")
        if rows[r2].fano_real_point.value == YES:
            special["q_second_maximal_R_rational"] = _yn(h <= 2, ODD_SECOND_MAXIMAL)
        else:
            special["q_second_maximal_R_rational"] = Verdict(NO, REAL_POINTS + " (F_(g-2)(R) empty)")

    table = VerdictTable(N, inv, hf, rows, special)
    if N == 6:
        _apply_n6_lists(table)
    _check_consistency(table)
    return table


def _apply_n6_lists(table: VerdictTable) -> None:
    """Fill open N = 6 cells from the literal lists; decided cells must agree."""
    lists = n6_lists()
    runs = table.invariant.runs
    cells = {
        "f1-rational": (1, "fano_R_rational"),
        "f1-unirational": (1, "fano_R_unirational"),
        "x-rational": (0, "fano_R_rational"),
        "x-unirational": (0, "fano_R_unirational"),
    }
    for key, (r, attr) in cells.items():
        expected = YES if runs in lists[key] else NO
        cur: Verdict = getattr(table.rows[r], attr)
        if cur.value == UNKNOWN:
            setattr(table.rows[r], attr, Verdict(expected, N6_LISTS))
        elif cur.value != expected:
            raise InternalInconsistency(
                f"rule verdict {cur.value} for {key} at {format_invariant(runs)} contradicts {N6_LISTS}"
            )


def _check_consistency(table: VerdictTable) -> None:
    rows = table.rows
    for i, row in enumerate(rows):
        if row.fano_R_rational.value == YES and row.fano_R_unirational.value == NO:
            raise InternalInconsistency(f"r={i}: rational but not unirational")
        if row.fano_R_unirational.value == YES and row.fano_real_point.value != YES:
            raise InternalInconsistency(f"r={i}: unirational without real points")
        if i + 1 < len(rows) and rows[i + 1].fano_real_point.value == YES and row.fano_real_point.value != YES:
            raise InternalInconsistency(f"real point at r={i + 1} but not at r={i}")


# --- classification report ------------------------------------------------


PREDICATES_HELP = """\
f<r>-real-point      F_r(R) nonempty                   (x-real-point = f0-real-point)
f<r>-connected       F_r(R) nonempty and Q^(r)(R) nonempty connected (x-connected = f0)
f<r>-rational        F_r R-rational                    (x-rational = f0-rational)
f<r>-unirational     F_r R-unirational                 (x-unirational = f0-unirational)
h=<int>,f=<int>      height / frequency equalities, comma-joined conjunction
"""


def _predicate(name: str):
    name = name.strip()
    if "=" in name:
        conds = {}
        for part in name.split(","):
            k, v = part.split("=")
            conds[k.strip()] = int(v)

        def pred(table: VerdictTable) -> bool:
            vals = {"h": table.hf.h, "f": table.hf.f, "r": table.invariant.r}
            return all(vals[k] == v for k, v in conds.items())

        return pred
    if name.startswith("x-"):
        name = "f0-" + name[2:]
    if not name.startswith("f") or "-" not in name:
        raise ValueError(f"unknown predicate {name!r}")
    head, kind = name[1:].split("-", 1)
    r = int(head)
    attr = {
        "real-point": "fano_real_point",
        "connected": "q_r_real_connected",
        "rational": "fano_R_rational",
        "unirational": "fano_R_unirational",
    }.get(kind)
    if attr is None:
        raise ValueError(f"unknown predicate {name!r}")

    def pred(table: VerdictTable) -> bool:
        if r >= len(table.rows):
            return False
        return getattr(table.rows[r], attr).value == YES

    return pred


def table_for_N(N: int, predicates: list[str] | None = None) -> list[VerdictTable]:
    """Verdict tables for every isotopy class, optionally filtered (conjunction)."""
    preds = [_predicate(p) for p in (predicates or [])]
    out = []
    for cls in enumerate_isotopy(N):
        table = decide(N, cls.invariant)
        if all(p(table) for p in preds):
            out.append(table)
    return out


def invariants_matching(N: int, predicate: str) -> list[str]:
    return [str(t.invariant) for t in table_for_N(N, [predicate])]


def format_table_text(tables: list[VerdictTable]) -> str:
    if not tables:
        return "(no classes)\n"
    N = tables[0].N
    nrows = len(tables[0].rows)
    head = ["invariant", "h", "f"]
    for r in range(nrows):
        head += [f"F{r}pt", f"Q{r}conn", f"F{r}rat", f"F{r}unirat"]
    lines = [head]
    short = {YES: "yes", NO: "no", UNKNOWN: "?"}
    for t in tables:
        row = [str(t.invariant), str(t.hf.h), str(t.hf.f)]
        for vr in t.rows:
            row += [short[vr.fano_real_point.value], short[vr.q_r_real_connected.value],
                    short[vr.fano_R_rational.value], short[vr.fano_R_unirational.value]]
        lines.append(row)
    widths = [max(len(r[i]) for r in lines) for i in range(len(head))]
    text = [f"N = {N}, {len(tables)} classes"]
    for r in lines:
        text.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(text) + "\n"


__all__ = [
    "Verdict",
    "IsotopyClass",
    "VerdictRow",
    "VerdictTable",
    "enumerate_isotopy",
    "decide",
    "table_for_N",
    "invariants_matching",
    "n6_lists",
    "format_table_text",
    "PREDICATES_HELP",
    "YES",
    "NO",
    "UNKNOWN",
]
