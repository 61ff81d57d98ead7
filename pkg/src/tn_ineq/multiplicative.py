"""Two-by-two products of minors: decision, falsification, and reduction.

A query asks whether

    det A(P1|Q1) det A(P2|Q2) <= det A(I1|J1) det A(I2|J2)

holds for every totally nonnegative A, where |P1| + |P2| = |I1| + |I2| = n.
Such a query is folded into an inequality of principal minors of a 2n by 2n
matrix, where the combinatorial criterion is read off directly.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import BudgetExceeded, QueryError
from .expr_core import (
    Axis,
    DetExpr,
    OpSpec,
    Term,
    all_ops,
    apply_op,
    apply_sequence,
    inverse_sequence,
    is_certifiably_false,
    minor,
    multiplicity,
    shift_mask,
    shift_multiplicity,
)

Sets = tuple[int, ...]
SET_NAMES = ("P1", "P2", "Q1", "Q2", "I1", "I2", "J1", "J2")


def _norm(n: int, s: Sequence[int], name: str) -> Sets:
    t = tuple(sorted(s))
    if len(set(t)) != len(t) or any(not 1 <= x <= n for x in t):
        raise QueryError(f"{name}={list(s)} is not a subset of [1, {n}]")
    return t


@dataclass(frozen=True)
class SmallestMultQuery:
    n: int
    P1: Sets
    P2: Sets
    Q1: Sets
    Q2: Sets
    I1: Sets
    I2: Sets
    J1: Sets
    J2: Sets
    direction: str = "le"

    def __post_init__(self) -> None:
        for name in SET_NAMES:
            object.__setattr__(self, name, _norm(self.n, getattr(self, name), name))
        if self.direction not in ("le", "ge"):
            raise QueryError(f"direction must be 'le' or 'ge', got {self.direction!r}")
        for a, b in (("P1", "Q1"), ("P2", "Q2"), ("I1", "J1"), ("I2", "J2")):
            if len(getattr(self, a)) != len(getattr(self, b)):
                raise QueryError(f"|{a}| != |{b}|")
        if len(self.P1) + len(self.P2) != self.n or len(self.I1) + len(self.I2) != self.n:
            raise QueryError("each product must use n rows in total")

    def canonical(self) -> "SmallestMultQuery":
        """The same inequality written with the smaller side on the left."""
        if self.direction == "le":
            return self
        return SmallestMultQuery(
            self.n, self.I1, self.I2, self.J1, self.J2,
            self.P1, self.P2, self.Q1, self.Q2, "le",
        )

    def swapped(self) -> "SmallestMultQuery":
        """The reverse inequality."""
        c = self.canonical()
        return SmallestMultQuery(c.n, c.I1, c.I2, c.J1, c.J2, c.P1, c.P2, c.Q1, c.Q2, "le")

    def transposed(self) -> "SmallestMultQuery":
        c = self.canonical()
        return SmallestMultQuery(c.n, c.Q1, c.Q2, c.P1, c.P2, c.J1, c.J2, c.I1, c.I2, "le")

    def to_expr(self) -> DetExpr:
        """``upper - lower >= 0``; empty minors are dropped from products."""
        c = self.canonical()

        def prod(pairs):
            ms = tuple(minor(c.n, r, s) for r, s in pairs if r)
            return ms

        upper = prod(((c.I1, c.J1), (c.I2, c.J2)))
        lower = prod(((c.P1, c.Q1), (c.P2, c.Q2)))
        terms = (Term(Fraction(1), upper), Term(Fraction(-1), lower))
        return DetExpr(c.n, terms).merged()

    def to_json(self) -> dict:
        d: dict = {"n": self.n}
        for name in SET_NAMES:
            d[name] = list(getattr(self, name))
        d["direction"] = self.direction
        return d

    @classmethod
    def from_json(cls, data: dict) -> "SmallestMultQuery":
        missing = [k for k in ("n",) + SET_NAMES if k not in data]
        if missing:
            raise QueryError(f"query is missing {missing}")
        return cls(
            int(data["n"]),
            *(tuple(data[k]) for k in SET_NAMES),
            direction=data.get("direction", "le"),
        )


@dataclass(frozen=True)
class PrincipalForm:
    """Index families of the equivalent principal-minor inequality on [2n]."""

    N: int
    R1: Sets
    R2: Sets
    K1: Sets
    K2: Sets

    def as_query(self) -> SmallestMultQuery:
        return SmallestMultQuery(
            self.N, self.R1, self.R2, self.R1, self.R2,
            self.K1, self.K2, self.K1, self.K2,
        )


def to_principal_form(q: SmallestMultQuery) -> PrincipalForm:
    c = q.canonical()
    m = 2 * c.n + 1

    def fold(rows, cols):
        return tuple(sorted(set(rows) | {m - j for j in cols}))

    return PrincipalForm(
        2 * c.n,
        fold(c.P1, c.Q2),
        fold(c.P2, c.Q1),
        fold(c.I1, c.J2),
        fold(c.I2, c.J1),
    )


# -- verdicts --------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    holds: bool
    reason: str = ""
    witness_set: Sets | None = None
    ops: tuple[OpSpec, ...] | None = None
    transcript: tuple[tuple[Sets, int, int], ...] = ()

    @property
    def status(self) -> str:
        return "HOLDS" if self.holds else "FAILS"

    def to_json(self) -> dict:
        d: dict = {"verdict": self.status}
        if self.reason:
            d["reason"] = self.reason
        if self.witness_set is not None:
            d["witness"] = {"S": list(self.witness_set)}
        elif self.ops is not None:
            d["witness"] = {
                "ops": [{"axis": o.axis.value, "u": o.u, "v": o.v} for o in self.ops]
            }
        return d


def _windows(m: Sets) -> Iterator[Sets]:
    """Even-size runs of consecutive elements of m, shortest first."""
    for size in range(2, len(m) + 1, 2):
        for start in range(len(m) - size + 1):
            yield m[start:start + size]


def decide(q: SmallestMultQuery) -> Verdict:
    """Decide the query with the multiset-and-windows criterion."""
    pf = to_principal_form(q)
    r1, r2, k1, k2 = map(set, (pf.R1, pf.R2, pf.K1, pf.K2))
    if Counter(pf.R1) + Counter(pf.R2) != Counter(pf.K1) + Counter(pf.K2):
        return Verdict(False, "multiset")
    m = tuple(sorted(r1 ^ r2))
    log = []
    for s in _windows(m):
        ss = set(s)
        lo = max(len(ss & r1), len(ss & r2))
        hi = max(len(ss & k1), len(ss & k2))
        log.append((s, lo, hi))
        if lo < hi:
            return Verdict(False, "window", witness_set=s, transcript=tuple(log))
    return Verdict(True, transcript=tuple(log))


def _masks(sets: Sequence[Sets]) -> tuple[int, ...]:
    out = []
    for s in sets:
        m = 0
        for i in s:
            m |= 1 << i
        out.append(m)
    return tuple(out)


def necessary_conditions(q: SmallestMultQuery) -> list[str]:
    """Multiplicity conditions every holding query must meet; returns the failures.

    Pointwise equal multiplicities of rows and of columns on both sides, and
    no shift may move more sets on the smaller side than on the larger one.
    """
    c = q.canonical()
    n = c.n
    sides = {"P": (c.P1, c.P2), "Q": (c.Q1, c.Q2), "I": (c.I1, c.I2), "J": (c.J1, c.J2)}
    out = []
    for lo, hi in (("P", "I"), ("Q", "J")):
        for u in range(1, n + 1):
            if multiplicity(sides[lo], u) != multiplicity(sides[hi], u):
                out.append(f"m_{lo}({u}) != m_{hi}({u})")
        for u in range(1, n + 1):
            for v in (u - 1, u + 1):
                if 1 <= v <= n and shift_multiplicity(sides[lo], u, v) > shift_multiplicity(sides[hi], u, v):
                    out.append(f"m_{lo}({u},{v}) > m_{hi}({u},{v})")
    return out


def decide_via_setops(q: SmallestMultQuery, budget: int = 1_000_000) -> Verdict:
    """Decide by exploring simultaneous shifts of both sides of the principal form.

    The query fails exactly when some reachable shift moves the smaller side
    while leaving the larger side fixed.  Only shifts that move the smaller
    side are followed: a shift that moves the larger side alone drops the
    smaller term, after which nothing can go wrong along that branch.
    """
    pf = to_principal_form(q)
    if Counter(pf.R1) + Counter(pf.R2) != Counter(pf.K1) + Counter(pf.K2):
        return Verdict(False, "multiset")
    N = pf.N
    pairs = [(u, v) for u in range(1, N + 1) for v in (u - 1, u + 1) if 1 <= v <= N]
    start = (_masks((pf.R1, pf.R2)), _masks((pf.K1, pf.K2)))
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        (a, b), (c, d) = state
        for u, v in pairs:
            na, nb = shift_mask(a, u, v), shift_mask(b, u, v)
            nc, nd = shift_mask(c, u, v), shift_mask(d, u, v)
            r_moved = (na, nb) != (a, b)
            k_moved = (nc, nd) != (c, d)
            if r_moved and not k_moved:
                path = [OpSpec(Axis.ROW, u, v)]
                s = state
                while parent[s] is not None:
                    s, op = parent[s]
                    path.append(op)
                return Verdict(False, "setops", ops=tuple(reversed(path)))
            if not r_moved:
                continue
            nxt = ((na, nb), (nc, nd))
            if nxt not in parent:
                if len(parent) >= budget:
                    raise BudgetExceeded(f"set-operation search exceeded {budget} states")
                parent[nxt] = (state, OpSpec(Axis.ROW, u, v))
                queue.append(nxt)
    return Verdict(True)


# -- falsification by shifts -----------------------------------------------

Target = Union[SmallestMultQuery, PrincipalForm, DetExpr]


def _as_expr(target: Target) -> DetExpr:
    if isinstance(target, PrincipalForm):
        target = target.as_query()
    if isinstance(target, SmallestMultQuery):
        return target.to_expr()
    return target


def _both_signs(e: DetExpr) -> bool:
    return any(t.coeff > 0 for t in e.terms) and any(t.coeff < 0 for t in e.terms)


def _search(target: Target, max_depth: int | None, axes, all_minimal: bool):
    e = _as_expr(target)
    ops = all_ops(e.n, axes)
    seen = {e.signature()}
    frontier = [(e, [])]
    found: list[list[OpSpec]] = []
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for node, path in frontier:
            for op in ops:
                out, rep = apply_op(node, op)
                if is_certifiably_false(out):
                    if not all_minimal:
                        return [path + [op]]
                    found.append(path + [op])
                    continue
                if rep.max_count == 0 or not _both_signs(out):
                    continue
                sig = out.signature()
                if sig not in seen:
                    seen.add(sig)
                    nxt.append((out, path + [op]))
        if found:
            return found
        frontier = nxt
    return found


MinorMask = tuple[int, int]


def _term_masks(pairs) -> tuple[MinorMask, ...]:
    return tuple(sorted(_masks(p) for p in pairs))


def _shift_term_masks(term, axis: Axis, u: int, v: int):
    ax = 0 if axis is Axis.ROW else 1
    count = 0
    out = []
    for m in term:
        s = m[ax]
        if s >> u & 1 and not s >> v & 1:
            count += 1
            s ^= (1 << u) | (1 << v)
            m = (s, m[1]) if ax == 0 else (m[0], s)
        out.append(m)
    return count, tuple(sorted(out))


def _search_pair(q: SmallestMultQuery, max_depth, axes, all_minimal: bool):
    """Same search as ``_search`` specialised to one positive and one negative term.

    The larger side survives alone when it has more shiftable minors, the
    smaller side alone makes the expression false, and ties shift both.
    """
    c = q.canonical()
    upper = _term_masks(((c.I1, c.J1), (c.I2, c.J2)))
    lower = _term_masks(((c.P1, c.Q1), (c.P2, c.Q2)))
    if upper == lower:
        return []
    ops = all_ops(c.n, axes)
    seen = {(upper, lower)}
    frontier = [((upper, lower), [])]
    found: list[list[OpSpec]] = []
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for (up, lo), path in frontier:
            for op in ops:
                cu, nu = _shift_term_masks(up, op.axis, op.u, op.v)
                cl, nl = _shift_term_masks(lo, op.axis, op.u, op.v)
                if cl > cu:
                    if not all_minimal:
                        return [path + [op]]
                    found.append(path + [op])
                    continue
                if cl < cu or cu == 0 or nu == nl:
                    continue
                state = (nu, nl)
                if state not in seen:
                    seen.add(state)
                    nxt.append((state, path + [op]))
        if found:
            return found
        frontier = nxt
    return found


def _dispatch(target: Target, max_depth, axes, all_minimal: bool):
    if isinstance(target, PrincipalForm):
        target = target.as_query()
    if isinstance(target, SmallestMultQuery):
        return _search_pair(target, max_depth, axes, all_minimal)
    return _search(target, max_depth, axes, all_minimal)


def falsify_search(
    target: Target,
    max_depth: int | None = 6,
    axes: Sequence[Axis] = (Axis.ROW, Axis.COL),
) -> list[OpSpec] | None:
    """Shortest op sequence that turns the inequality certifiably false.

    Breadth first, rows before columns, then by (u, v).  Only shifts that
    keep both signs present are expanded, since an all-positive expression
    can never become false.  ``max_depth=None`` searches the whole finite
    state space.  Queries use a bitmask state; general expressions go
    through :func:`apply_op`.
    """
    res = _dispatch(target, max_depth, axes, all_minimal=False)
    return res[0] if res else None


def falsify_search_expr(
    target: Target,
    max_depth: int | None = 6,
    axes: Sequence[Axis] = (Axis.ROW, Axis.COL),
) -> list[OpSpec] | None:
    """The generic expression-level search, also for queries."""
    res = _search(target, max_depth, axes, all_minimal=False)
    return res[0] if res else None


def minimal_witnesses(
    target: Target,
    max_depth: int | None = 6,
    axes: Sequence[Axis] = (Axis.ROW, Axis.COL),
) -> list[list[OpSpec]]:
    """Every falsifying sequence of the shortest length found by the search."""
    return _dispatch(target, max_depth, axes, all_minimal=True)


def is_witness(target: Target, ops: Sequence[OpSpec]) -> bool:
    return is_certifiably_false(apply_sequence(_as_expr(target), ops))


# -- reduction to a complementary inequality -------------------------------

@dataclass(frozen=True)
class Reduction:
    ancestor: SmallestMultQuery
    row_ops: tuple[OpSpec, ...]
    col_ops: tuple[OpSpec, ...]
    fallback_splits: int = 0

    def replay(self) -> DetExpr:
        """Apply the recorded shifts to the ancestor's expression."""
        return apply_sequence(self.ancestor.to_expr(), self.col_ops + self.row_ops)


def _shift_pair(x: tuple[int, int], u: int, v: int) -> tuple[int, int]:
    return (shift_mask(x[0], u, v), shift_mask(x[1], u, v))


def _unmask(m: int) -> Sets:
    return tuple(i for i in range(1, m.bit_length()) if m >> i & 1)


def _mult(pair: tuple[int, int], u: int) -> int:
    return (pair[0] >> u & 1) + (pair[1] >> u & 1)


def _reduce_rows(q: SmallestMultQuery) -> tuple[SmallestMultQuery, list[OpSpec], int]:
    """Remove common row indices one at a time.

    Each round pushes the smallest doubled index down to 1, opens a gap at 2,
    and splits the doubled 1 into 1 and 2 in one set on each side.  The
    recorded shifts undo a round.  Returns the new query (rows complementary),
    the row shifts in application order, and how many splits needed a choice
    other than the default rule.
    """
    n = q.n
    x = _masks((q.P1, q.P2))
    y = _masks((q.I1, q.I2))
    ops: list[OpSpec] = []
    fallbacks = 0
    while x[0] & x[1]:
        u = min(i for i in range(1, n + 1) if _mult(x, i) == 2)
        n1 = [(k, k - 1) for k in range(u, 1, -1)]
        for a_, b_ in n1:
            x, y = _shift_pair(x, a_, b_), _shift_pair(y, a_, b_)
        n2: list[tuple[int, int]] = []
        if _mult(x, 2) != 0:
            a = min(i for i in range(3, n + 1) if _mult(x, i) == 0)
            n2 = [(k, k + 1) for k in range(a - 1, 1, -1)]
            for a_, b_ in n2:
                x, y = _shift_pair(x, a_, b_), _shift_pair(y, a_, b_)
        cand = replace(
            q, P1=_unmask(x[0]), P2=_unmask(x[1]), I1=_unmask(y[0]), I2=_unmask(y[1])
        )
        choices = _split_choices(cand)
        for attempt, (ix, iy) in enumerate(choices):
            nx = tuple(shift_mask(m, 1, 2) if i == ix else m for i, m in enumerate(x))
            ny = tuple(shift_mask(m, 1, 2) if i == iy else m for i, m in enumerate(y))
            nq = replace(
                q, P1=_unmask(nx[0]), P2=_unmask(nx[1]), I1=_unmask(ny[0]), I2=_unmask(ny[1])
            )
            if decide(nq).holds:
                fallbacks += attempt > 0
                break
        else:
            raise QueryError("no split keeps the query valid; is it a holding query?")
        x, y = nx, ny
        undo = [(2, 1)] + [(b_, a_) for a_, b_ in reversed(n2)] + [(b_, a_) for a_, b_ in reversed(n1)]
        ops = [OpSpec(Axis.ROW, a_, b_) for a_, b_ in undo] + ops
    out = replace(q, P1=_unmask(x[0]), P2=_unmask(x[1]), I1=_unmask(y[0]), I2=_unmask(y[1]))
    return out, ops, fallbacks


def _split_choices(q: SmallestMultQuery) -> list[tuple[int, int]]:
    """Which set on each side should give up its copy of 1, default rule first."""
    pf = to_principal_form(q)
    m = sorted(set(pf.R1) ^ set(pf.R2))
    n = q.n
    pick = (1, 1)
    if m:
        u = m[0]
        if u <= n:
            ix = 0 if u in q.P1 else 1
            iy = 0 if u in q.I1 else 1
        else:
            c = 2 * n + 1 - u
            ix = 0 if c in q.Q1 and c not in q.Q2 else 1
            iy = 0 if c in q.J1 and c not in q.J2 else 1
        pick = (1 - ix, 1 - iy)
    rest = [p for p in itertools.product((0, 1), repeat=2) if p != pick]
    return [pick] + rest


def reduce_to_complementary(q: SmallestMultQuery) -> Reduction:
    """Find a complementary holding inequality and shifts that recover ``q``.

    Rows are processed first with the columns fixed, then the same procedure
    runs on the transpose.  Applying ``col_ops`` and ``row_ops`` to the
    ancestor's expression reproduces the expression of ``q``.
    """
    c = q.canonical()
    if not decide(c).holds:
        raise QueryError("only holding queries can be reduced")
    rows_done, row_ops, f1 = _reduce_rows(c)
    cols_done_t, col_ops_t, f2 = _reduce_rows(rows_done.transposed())
    ancestor = cols_done_t.transposed()
    col_ops = tuple(OpSpec(Axis.COL, o.u, o.v) for o in col_ops_t)
    return Reduction(ancestor, tuple(row_ops), col_ops, f1 + f2)


# -- enumeration and JSON --------------------------------------------------

def _side_choices(n: int, include_empty: bool) -> list[tuple[Sets, Sets, Sets, Sets]]:
    out = []
    lo, hi = (0, n) if include_empty else (1, n - 1)
    for a in range(lo, hi + 1):
        first = list(itertools.combinations(range(1, n + 1), a))
        second = list(itertools.combinations(range(1, n + 1), n - a))
        for p1, q1 in itertools.product(first, first):
            for p2, q2 in itertools.product(second, second):
                out.append((p1, p2, q1, q2))
    return out


def enumerate_queries(n: int, include_empty: bool = True) -> Iterator[SmallestMultQuery]:
    sides = _side_choices(n, include_empty)
    for p1, p2, q1, q2 in sides:
        for i1, i2, j1, j2 in sides:
            yield SmallestMultQuery(n, p1, p2, q1, q2, i1, i2, j1, j2)


def dumps_verdict(v: Verdict) -> str:
    return json.dumps(v.to_json())
