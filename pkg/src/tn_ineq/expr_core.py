"""Symbolic determinantal expressions and the row/column shift operations.

An expression is a rational linear combination of products of minors
together with an asserted relation (``>= 0``, ``== 0`` or nothing).
Shift operations act on the index sets of those minors; the sign
bookkeeping that makes them sound for totally nonnegative matrices lives
in :func:`apply_op`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidIndexSet, InvalidOperation


class Relation(Enum):
    GEQ_ZERO = "geq0"
    EQ_ZERO = "eq0"
    UNASSERTED = "none"


class Axis(Enum):
    ROW = "row"
    COL = "col"


@dataclass(frozen=True, order=True)
class IndexSet:
    """A sorted subset of ``{1..n}``."""

    elements: tuple[int, ...]
    n: int = field(compare=False)

    def __post_init__(self) -> None:
        els = self.elements
        if any(b <= a for a, b in zip(els, els[1:])):
            raise InvalidIndexSet(f"index set must be strictly increasing: {els}")
        if els and (els[0] < 1 or els[-1] > self.n):
            raise InvalidIndexSet(f"index set {els} not inside [1, {self.n}]")

    @classmethod
    def of(cls, n: int, items: Iterable[int]) -> "IndexSet":
        items = list(items)
        if len(set(items)) != len(items):
            raise InvalidIndexSet(f"repeated index in {items}")
        return cls(tuple(sorted(items)), n)

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "IndexSet":
        return cls(tuple(i for i in range(1, n + 1) if mask >> i & 1), n)

    @cached_property
    def mask(self) -> int:
        m = 0
        for i in self.elements:
            m |= 1 << i
        return m

    def __contains__(self, i: object) -> bool:
        return isinstance(i, int) and 1 <= i <= self.n and bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"

    def complement(self) -> "IndexSet":
        return IndexSet(tuple(i for i in range(1, self.n + 1) if i not in self), self.n)


@dataclass(frozen=True, order=True)
class Minor:
    rows: IndexSet
    cols: IndexSet

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.cols):
            raise InvalidIndexSet(f"minor {self.rows}|{self.cols} is not square")
        if self.rows.n != self.cols.n:
            raise InvalidIndexSet("row and column sets use different ambient sizes")

    def __str__(self) -> str:
        return f"det A({self.rows}|{self.cols})"


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    minors: tuple[Minor, ...]

    def __post_init__(self) -> None:
        if self.coeff == 0:
            raise ValueError("terms carry nonzero coefficients")
        if not self.minors:
            raise ValueError("a term needs at least one minor")

    def key(self) -> tuple[Minor, ...]:
        """Multiset of minors, used to merge equal products."""
        return tuple(sorted(self.minors))


@dataclass(frozen=True)
class DetExpr:
    n: int
    terms: tuple[Term, ...]
    relation: Relation = Relation.GEQ_ZERO

    def __post_init__(self) -> None:
        for t in self.terms:
            for m in t.minors:
                if m.rows.n != self.n:
                    raise InvalidIndexSet(f"minor {m} does not live in ambient size {self.n}")

    def merged(self) -> "DetExpr":
        """Combine terms with the same multiset of minors and drop zeros.

        The first occurrence fixes the position of a merged term.
        """
        acc: dict[tuple[Minor, ...], Fraction] = {}
        first: dict[tuple[Minor, ...], Term] = {}
        for t in self.terms:
            k = t.key()
            acc[k] = acc.get(k, Fraction(0)) + t.coeff
            first.setdefault(k, t)
        terms = tuple(Term(c, first[k].minors) for k, c in acc.items() if c != 0)
        return DetExpr(self.n, terms, self.relation)

    def signature(self) -> tuple:
        """Order-independent identity of the merged expression."""
        m = self.merged()
        return (self.n, self.relation, frozenset((t.key(), t.coeff) for t in m.terms))

    def same_as(self, other: "DetExpr") -> bool:
        return self.signature() == other.signature()

    def __str__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            parts = []
            for t in self.terms:
                parts.append(f"{t.coeff} * " + " * ".join(map(str, t.minors)))
            body = " + ".join(parts)
        rel = {"geq0": ">= 0", "eq0": "== 0", "none": ""}[self.relation.value]
        return f"{body} {rel}".strip()


@dataclass(frozen=True)
class OpSpec:
    axis: Axis
    u: int
    v: int

    def __post_init__(self) -> None:
        if abs(self.u - self.v) > 1:
            raise InvalidOperation(f"shift ({self.u},{self.v}) needs consecutive indices")

    def inverse(self) -> "OpSpec":
        return OpSpec(self.axis, self.v, self.u)

    def __str__(self) -> str:
        return f"{'R' if self.axis is Axis.ROW else 'C'}{self.u},{self.v}"


def ROW(u: int, v: int) -> OpSpec:
    return OpSpec(Axis.ROW, u, v)


def COL(u: int, v: int) -> OpSpec:
    return OpSpec(Axis.COL, u, v)


@dataclass(frozen=True)
class OpApplicationReport:
    shift_counts: tuple[int, ...]
    max_count: int
    survivors: tuple[int, ...]


# -- set level -------------------------------------------------------------

def shift_mask(mask: int, u: int, v: int) -> int:
    if mask >> u & 1 and not mask >> v & 1:
        return mask ^ (1 << u) ^ (1 << v)
    return mask


def shift_set(s: IndexSet, u: int, v: int) -> IndexSet:
    """``(s \\ {u}) | {v}`` when u is in s and v is not, otherwise s."""
    if u in s and v not in s:
        return IndexSet.of(s.n, [v if i == u else i for i in s])
    return s


def multiplicity(family: Sequence[IndexSet], u: int) -> int:
    return sum(1 for s in family if u in s)


def shift_multiplicity(family: Sequence[IndexSet], u: int, v: int) -> int:
    return sum(1 for s in family if u in s and v not in s)


# -- expression level ------------------------------------------------------

def _check_op(n: int, op: OpSpec) -> None:
    if not (1 <= op.u <= n and 1 <= op.v <= n):
        raise InvalidOperation(f"{op} out of range for n={n}")


def _axis_sets(t: Term, axis: Axis) -> list[IndexSet]:
    return [m.rows if axis is Axis.ROW else m.cols for m in t.minors]


def _shift_term(t: Term, op: OpSpec) -> Term:
    if op.axis is Axis.ROW:
        minors = tuple(Minor(shift_set(m.rows, op.u, op.v), m.cols) for m in t.minors)
    else:
        minors = tuple(Minor(m.rows, shift_set(m.cols, op.u, op.v)) for m in t.minors)
    return Term(t.coeff, minors)


def apply_op(e: DetExpr, op: OpSpec) -> tuple[DetExpr, OpApplicationReport]:
    """Apply a row or column shift to every term of ``e``.

    Only the terms with the largest number of shiftable minors survive, and
    their index sets are shifted. Counts are taken on the terms as given;
    merging happens afterwards.
    """
    _check_op(e.n, op)
    if op.u == op.v:
        idx = tuple(range(len(e.terms)))
        return e, OpApplicationReport(tuple(0 for _ in idx), 0, idx)
    counts = tuple(shift_multiplicity(_axis_sets(t, op.axis), op.u, op.v) for t in e.terms)
    top = max(counts, default=0)
    survivors = tuple(i for i, c in enumerate(counts) if c == top)
    terms = tuple(_shift_term(e.terms[i], op) for i in survivors)
    out = DetExpr(e.n, terms, e.relation).merged()
    return out, OpApplicationReport(counts, top, survivors)


def apply_sequence(e: DetExpr, ops: Iterable[OpSpec]) -> DetExpr:
    """Apply ops left to right (the first op in the list acts first)."""
    for op in ops:
        e, _ = apply_op(e, op)
    return e


def inverse_sequence(ops: Sequence[OpSpec]) -> list[OpSpec]:
    """Formal inverse: reverse the order and swap each pair."""
    return [op.inverse() for op in reversed(ops)]


def is_certifiably_false(e: DetExpr) -> bool:
    """True when ``e >= 0`` is asserted but every coefficient is negative.

    Every minor is strictly positive on a totally positive matrix, so such an
    expression is negative there.
    """
    return (
        e.relation is Relation.GEQ_ZERO
        and len(e.terms) > 0
        and all(t.coeff < 0 for t in e.terms)
    )


def all_ops(n: int, axes: Sequence[Axis] = (Axis.ROW, Axis.COL)) -> list[OpSpec]:
    """Non-trivial shifts in canonical order: axis, then u, then v."""
    out = []
    for axis in axes:
        for u in range(1, n + 1):
            for v in (u - 1, u + 1):
                if 1 <= v <= n:
                    out.append(OpSpec(axis, u, v))
    return out


# -- construction helpers --------------------------------------------------

def minor(n: int, rows: Iterable[int], cols: Iterable[int]) -> Minor:
    return Minor(IndexSet.of(n, rows), IndexSet.of(n, cols))


def product_difference(
    n: int,
    upper: Sequence[tuple[Iterable[int], Iterable[int]]],
    lower: Sequence[tuple[Iterable[int], Iterable[int]]],
) -> DetExpr:
    """``prod(upper) - prod(lower) >= 0``, the form ``lower <= upper``.

    An empty side contributes no term.
    """
    up = tuple(minor(n, r, c) for r, c in upper)
    lo = tuple(minor(n, r, c) for r, c in lower)
    terms = tuple(Term(Fraction(s), m) for s, m in ((1, up), (-1, lo)) if m)
    return DetExpr(n, terms).merged()


def subset_sequence(
    n: int, p: IndexSet, q: IndexSet, x: IndexSet, y: IndexSet
) -> list[OpSpec]:
    """Row shifts carrying the pair (p, q) to (x, y) when x is inside y.

    The pair is first pushed down to initial segments, then the smaller set
    is spread onto its positions inside y, then both are spread onto y.
    Requires |p| = |x|, |q| = |y| and |p| <= |q|.
    """
    if len(p) != len(x) or len(q) != len(y):
        raise InvalidOperation("target sets must match source sizes")
    if not set(x) <= set(y):
        raise InvalidOperation("x must be contained in y")
    ops: list[OpSpec] = []
    sweep = [ROW(k, k - 1) for k in range(n, 1, -1)]
    cur = (p.mask, q.mask)
    while True:
        before = cur
        for op in sweep:
            cur = tuple(shift_mask(m, op.u, op.v) for m in cur)
        ops.extend(sweep)
        if cur == before:
            ops = ops[: -len(sweep)]
            break
    ys = list(y)
    # positions of x inside y, 1-based
    alpha = [ys.index(e) + 1 for e in x]
    for j in range(len(x), 0, -1):
        ops.extend(ROW(t, t + 1) for t in range(j, alpha[j - 1]))
    for j in range(len(y), 0, -1):
        ops.extend(ROW(t, t + 1) for t in range(j, ys[j - 1]))
    return ops


# -- JSON ------------------------------------------------------------------

def expr_to_json(e: DetExpr) -> dict:
    return {
        "n": e.n,
        "relation": e.relation.value,
        "terms": [
            {
                "coeff": str(t.coeff),
                "minors": [{"rows": list(m.rows), "cols": list(m.cols)} for m in t.minors],
            }
            for t in e.terms
        ],
    }


def expr_from_json(data: dict) -> DetExpr:
    n = int(data["n"])
    terms = []
    for t in data["terms"]:
        minors = tuple(minor(n, m["rows"], m["cols"]) for m in t["minors"])
        terms.append(Term(Fraction(t["coeff"]), minors))
    return DetExpr(n, tuple(terms), Relation(data.get("relation", "geq0")))


def dumps_expr(e: DetExpr) -> str:
    return json.dumps(expr_to_json(e), indent=2)


def parse_ops(text: str) -> list[OpSpec]:
    """Parse ``"R1,2;C3,4"`` into op specs."""
    ops = []
    for chunk in text.replace(" ", "").split(";"):
        if not chunk:
            continue
        head, rest = chunk[0].upper(), chunk[1:]
        if head not in "RC":
            raise InvalidOperation(f"bad op {chunk!r}: expected R or C prefix")
        try:
            u, v = (int(s) for s in rest.split(","))
        except ValueError:
            raise InvalidOperation(f"bad op {chunk!r}") from None
        ops.append(OpSpec(Axis.ROW if head == "R" else Axis.COL, u, v))
    return ops


def ops_to_json(ops: Sequence[OpSpec]) -> list[dict]:
    return [{"axis": op.axis.value, "u": op.u, "v": op.v} for op in ops]
