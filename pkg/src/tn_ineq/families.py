"""Generators for the additive and multiplicative inequality families.

Each generator returns a :class:`DetExpr` asserting ``>= 0`` (or ``== 0`` for
the identities).  Alternating partial sums keep one term per summand so the
shift operations can act on them term by term.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import factorial, prod
from typing import Iterator, Sequence

from .errors import HypothesisError
from .expr_core import (
    Axis,
    DetExpr,
    IndexSet,
    Minor,
    OpSpec,
    Relation,
    Term,
    minor,
    shift_mask,
    shift_set,
)


def _full(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def _without(n: int, *drop: int) -> tuple[int, ...]:
    return tuple(i for i in range(1, n + 1) if i not in drop)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _check_range(name: str, x: int, lo: int, hi: int) -> None:
    if not lo <= x <= hi:
        raise HypothesisError(f"{name}={x} outside [{lo}, {hi}]")


def _expr(n: int, terms: list[tuple[int, tuple[Minor, ...]]], rel=Relation.GEQ_ZERO) -> DetExpr:
    out = []
    for c, ms in terms:
        ms = tuple(m for m in ms if len(m.rows)) or ms[:1]
        out.append(Term(Fraction(c), ms))
    return DetExpr(n, tuple(out), rel).merged()


def gantmacher_krein(n: int, l: int) -> DetExpr:
    """Signed partial Laplace expansion of det A along the first row."""
    return laplace_refined_diag(n, 1, l)


def laplace_refined_diag(n: int, i: int, l: int) -> DetExpr:
    """``(-1)^(i+l) * sum_{k<=l} a*_{ik} >= 0`` with ``a*_{ik} = a_ik adj(A)_ki - [k=i] det A``."""
    _check_range("i", i, 1, n)
    _check_range("l", l, 1, n)
    s = _sign(i + l)
    terms = []
    for k in range(1, l + 1):
        terms.append((s * _sign(i + k), (minor(n, [i], [k]), minor(n, _without(n, i), _without(n, k)))))
    if i <= l:
        terms.append((-s, (minor(n, _full(n), _full(n)),)))
    return _expr(n, terms)


def laplace_refined_offdiag(n: int, i: int, j: int, l: int) -> DetExpr:
    """``(-1)^(j+l) * sum_{k<=l} (-1)^(j+k) a_ik det A_jk >= 0`` for i != j."""
    _check_range("i", i, 1, n)
    _check_range("j", j, 1, n)
    _check_range("l", l, 1, n)
    if i == j:
        raise HypothesisError("off-diagonal form needs i != j")
    s = _sign(j + l)
    terms = [
        (s * _sign(j + k), (minor(n, [i], [k]), minor(n, _without(n, j), _without(n, k))))
        for k in range(1, l + 1)
    ]
    return _expr(n, terms)


@dataclass(frozen=True)
class KarlinParams:
    n: int
    T: tuple[int, ...]
    S: tuple[int, ...]
    p: int

    def __post_init__(self) -> None:
        n = self.n
        object.__setattr__(self, "T", tuple(sorted(self.T)))
        object.__setattr__(self, "S", tuple(sorted(self.S)))
        _check_range("p", self.p, 1, n)
        for name in ("T", "S"):
            s = getattr(self, name)
            if len(set(s)) != len(s) or any(not 1 <= x <= n for x in s):
                raise HypothesisError(f"{name} must be a subset of [1, {n}]")
        if self.p in self.S:
            raise HypothesisError("S must avoid p")
        if len(self.S) != len(self.T) + 1:
            raise HypothesisError("|S| must equal |T| + 1")

    @property
    def V(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if i not in self.T)


def _karlin_terms(kp: KarlinParams, l: int, sign: int):
    n, v = kp.n, kp.V
    return [
        (
            sign * _sign(1 + k),
            (minor(n, kp.S, sorted(kp.T + (v[k - 1],))), minor(n, _without(n, kp.p), _without(n, v[k - 1]))),
        )
        for k in range(1, l + 1)
    ]


def karlin_partial(kp: KarlinParams, l: int) -> DetExpr:
    """Partial sums of Karlin's vanishing expansion, one term per column of V."""
    _check_range("l", l, 1, len(kp.V))
    return _expr(kp.n, _karlin_terms(kp, l, _sign(1 + l)))


def karlin_identity(kp: KarlinParams) -> DetExpr:
    """The full alternating sum, which vanishes for every square matrix."""
    if not kp.V:
        raise HypothesisError("T must be a proper subset")
    return _expr(kp.n, _karlin_terms(kp, len(kp.V), 1), Relation.EQ_ZERO)


@dataclass(frozen=True)
class GenLaplaceParams:
    """Row sets P and Q with a split P1 < P2, Q1 < Q2, Q1 in P1, P2 in Q2.

    Empty parts satisfy the order and containment conditions vacuously, which
    on its own admits false inequalities (P={2}, Q={1} gives -det A >= 0).  A
    split is therefore accepted only when (P, Q) is also reachable from
    ([1,d], [d+1,n]) by simultaneous row shifts; see :func:`derivation`.
    """

    n: int
    P: tuple[int, ...]
    Q: tuple[int, ...]
    P1: tuple[int, ...]
    P2: tuple[int, ...]
    Q1: tuple[int, ...]
    Q2: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.n
        if not self.P or not self.Q:
            raise HypothesisError("P and Q must be nonempty")
        if len(self.P) + len(self.Q) != n:
            raise HypothesisError("|P| + |Q| must equal n")
        for name in ("P", "Q"):
            s = getattr(self, name)
            if len(set(s)) != len(s) or any(not 1 <= x <= n for x in s):
                raise HypothesisError(f"{name} must be a subset of [1, {n}]")
        if tuple(sorted(self.P1 + self.P2)) != tuple(sorted(self.P)):
            raise HypothesisError("P1, P2 must split P")
        if tuple(sorted(self.Q1 + self.Q2)) != tuple(sorted(self.Q)):
            raise HypothesisError("Q1, Q2 must split Q")
        if self.P1 and self.P2 and max(self.P1) >= min(self.P2):
            raise HypothesisError("P1 must lie below P2")
        if self.Q1 and self.Q2 and max(self.Q1) >= min(self.Q2):
            raise HypothesisError("Q1 must lie below Q2")
        if not set(self.Q1) <= set(self.P1) or not set(self.P2) <= set(self.Q2):
            raise HypothesisError("need Q1 inside P1 and P2 inside Q2")
        if derivation(n, self.P, self.Q) is None:
            raise HypothesisError(
                f"P={list(self.P)}, Q={list(self.Q)} cannot be reached from the "
                "complementary case by row shifts"
            )

    @classmethod
    def from_sets(cls, n: int, P: Sequence[int], Q: Sequence[int]) -> "GenLaplaceParams":
        """First admissible split, scanning cut points from the bottom."""
        p, q = tuple(sorted(P)), tuple(sorted(Q))
        for a in range(len(p) + 1):
            for b in range(len(q) + 1):
                try:
                    return cls(n, p, q, p[:a], p[a:], q[:b], q[b:])
                except HypothesisError:
                    continue
        raise HypothesisError(f"no admissible split of P={list(p)}, Q={list(q)}")

    @property
    def d(self) -> int:
        return len(self.P)


@lru_cache(maxsize=None)
def _derivations(n: int, d: int) -> dict[tuple[int, int], tuple[tuple[int, int], ...]]:
    """Shortest shift sequences from ([1,d], [d+1,n]) to every reachable pair."""
    start = (_mask(range(1, d + 1)), _mask(range(d + 1, n + 1)))
    paths = {start: ()}
    queue = deque([start])
    pairs = [(u, v) for u in range(1, n + 1) for v in (u - 1, u + 1) if 1 <= v <= n]
    while queue:
        a, b = cur = queue.popleft()
        for u, v in pairs:
            nxt = (shift_mask(a, u, v), shift_mask(b, u, v))
            if nxt not in paths:
                paths[nxt] = paths[cur] + ((u, v),)
                queue.append(nxt)
    return paths


def _mask(items) -> int:
    return sum(1 << i for i in items)


def derivation(n: int, P: Sequence[int], Q: Sequence[int]) -> list[OpSpec] | None:
    """Row shifts taking the complementary pair ([1,d], [d+1,n]) to (P, Q), if any.

    Every term of the partial sums shares these row sets, so each shift keeps
    all terms and carries the complementary inequality to the one for (P, Q).
    """
    if not P or len(P) + len(Q) != n:
        return None
    path = _derivations(n, len(P)).get((_mask(P), _mask(Q)))
    if path is None:
        return None
    return [OpSpec(Axis.ROW, u, v) for u, v in path]


def column_window(n: int, d: int, k: int) -> tuple[int, ...]:
    """``[n-d, n]`` with ``n-d+k`` removed."""
    return tuple(c for c in range(n - d, n + 1) if c != n - d + k)


def gen_laplace_fluct(gp: GenLaplaceParams, l: int) -> DetExpr:
    """Alternating partial sums of the generalized Laplace expansion over a column window."""
    n, d = gp.n, gp.d
    _check_range("l", l, 0, d)
    s = _sign(1 + l)
    terms = []
    for k in range(l + 1):
        jk = column_window(n, d, k)
        rest = tuple(c for c in _full(n) if c not in jk)
        terms.append((s * _sign(1 + k), (minor(n, gp.P, jk), minor(n, gp.Q, rest))))
    return _expr(n, terms)


@dataclass(frozen=True)
class BJParams:
    """Partitions lam and mu of n, padded to a common length, lam majorized by mu."""

    n: int
    lam: tuple[int, ...]
    mu: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.lam) != len(self.mu):
            raise HypothesisError("lam and mu must have the same length")
        for name in ("lam", "mu"):
            s = getattr(self, name)
            if any(x < 0 for x in s) or any(a < b for a, b in zip(s, s[1:])):
                raise HypothesisError(f"{name} must be nonincreasing and nonnegative")
            if sum(s) != self.n:
                raise HypothesisError(f"{name} must sum to n")
        if any(a > b for a, b in zip(itertools.accumulate(self.lam), itertools.accumulate(self.mu))):
            raise HypothesisError("lam must be majorized by mu")


def ordered_set_partitions(n: int, sizes: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Ordered partitions of [n] into blocks of the given sizes."""

    def rec(rest: tuple[int, ...], sizes: Sequence[int]):
        if not sizes:
            yield ()
            return
        for block in itertools.combinations(rest, sizes[0]):
            left = tuple(x for x in rest if x not in block)
            for tail in rec(left, sizes[1:]):
                yield (block,) + tail

    yield from rec(_full(n), sizes)


def _bj_side(n: int, sizes, sign: int, keep=lambda blocks: True, shift=None):
    c = sign * prod(factorial(x) for x in sizes)
    terms = []
    for blocks in ordered_set_partitions(n, sizes):
        if not keep(blocks):
            continue
        ms = []
        for b in blocks:
            s = IndexSet.of(n, b)
            if shift is not None:
                s = shift_set(s, *shift)
            ms.append(Minor(s, s))
        terms.append((c, tuple(ms)))
    return terms


def barrett_johnson(bp: BJParams) -> DetExpr:
    """``lam! * sum_I prod det A(I_k) - mu! * sum_J prod det A(J_k) >= 0``."""
    terms = _bj_side(bp.n, bp.lam, 1) + _bj_side(bp.n, bp.mu, -1)
    return _expr(bp.n, terms)


def barrett_johnson_shifted(bp: BJParams, u: int, v: int) -> DetExpr:
    """The principal-minor form after shifting u to v in every block.

    Only partitions that keep u and v in different blocks contribute.
    """
    _check_range("u", u, 1, bp.n)
    _check_range("v", v, 1, bp.n)
    if abs(u - v) != 1:
        raise HypothesisError("u and v must be consecutive")

    def keep(blocks):
        return not any(u in b and v in b for b in blocks)

    terms = _bj_side(bp.n, bp.lam, 1, keep, (u, v)) + _bj_side(bp.n, bp.mu, -1, keep, (u, v))
    return _expr(bp.n, terms)


# -- parameter enumeration -------------------------------------------------

def _subsets(n: int) -> Iterator[tuple[int, ...]]:
    for s in range(n + 1):
        yield from itertools.combinations(range(1, n + 1), s)


def partitions(n: int, r: int) -> list[tuple[int, ...]]:
    """Nonincreasing nonnegative r-tuples summing to n."""
    out = []

    def rec(left, cap, acc):
        if len(acc) == r:
            if left == 0:
                out.append(tuple(acc))
            return
        for x in range(min(left, cap), -1, -1):
            rec(left - x, x, acc + [x])

    rec(n, n, [])
    return out


def karlin_params(n: int) -> Iterator[KarlinParams]:
    for t in _subsets(n):
        if len(t) > n - 2:
            continue
        for p in range(1, n + 1):
            for s in itertools.combinations(_without(n, p), len(t) + 1):
                yield KarlinParams(n, t, s, p)


def gen_laplace_params(n: int) -> Iterator[GenLaplaceParams]:
    for p in _subsets(n):
        if not p or len(p) == n:
            continue
        for q in itertools.combinations(range(1, n + 1), n - len(p)):
            try:
                yield GenLaplaceParams.from_sets(n, p, q)
            except HypothesisError:
                continue


def bj_params(n: int, max_r: int = 3) -> Iterator[BJParams]:
    for r in range(1, max_r + 1):
        parts = partitions(n, r)
        for lam, mu in itertools.product(parts, parts):
            try:
                yield BJParams(n, lam, mu)
            except HypothesisError:
                continue


def all_instances(n: int, max_r: int = 3) -> Iterator[tuple[str, dict, DetExpr]]:
    """Every family instance of size n, tagged with its CLI name and parameters."""
    for l in range(1, n + 1):
        yield "gk", {"n": n, "l": l}, gantmacher_krein(n, l)
    for i in range(1, n + 1):
        for l in range(1, n + 1):
            yield "laplace-diag", {"n": n, "i": i, "l": l}, laplace_refined_diag(n, i, l)
            for j in range(1, n + 1):
                if j != i:
                    yield "laplace-offdiag", {"n": n, "i": i, "j": j, "l": l}, laplace_refined_offdiag(n, i, j, l)
    for kp in karlin_params(n):
        base = {"n": n, "T": list(kp.T), "S": list(kp.S), "p": kp.p}
        for l in range(1, len(kp.V) + 1):
            yield "karlin", dict(base, l=l), karlin_partial(kp, l)
        yield "karlin-id", base, karlin_identity(kp)
    for gp in gen_laplace_params(n):
        for l in range(gp.d + 1):
            yield "genlaplace", {"n": n, "P": list(gp.P), "Q": list(gp.Q), "l": l}, gen_laplace_fluct(gp, l)
    for bp in bj_params(n, max_r):
        base = {"n": n, "lambda": list(bp.lam), "mu": list(bp.mu)}
        yield "bj", base, barrett_johnson(bp)
        for u in range(1, n + 1):
            for v in (u - 1, u + 1):
                if 1 <= v <= n:
                    yield "bj-shifted", dict(base, u=u, v=v), barrett_johnson_shifted(bp, u, v)


def from_params(name: str, params: dict) -> DetExpr:
    """Build a family instance from its CLI name and a JSON parameter dict."""
    n = int(params["n"])
    if name == "gk":
        return gantmacher_krein(n, int(params["l"]))
    if name == "laplace-diag":
        return laplace_refined_diag(n, int(params["i"]), int(params["l"]))
    if name == "laplace-offdiag":
        return laplace_refined_offdiag(n, int(params["i"]), int(params["j"]), int(params["l"]))
    if name in ("karlin", "karlin-id"):
        kp = KarlinParams(n, tuple(params["T"]), tuple(params["S"]), int(params["p"]))
        return karlin_identity(kp) if name == "karlin-id" else karlin_partial(kp, int(params["l"]))
    if name == "genlaplace":
        if "P1" in params:
            gp = GenLaplaceParams(
                n, tuple(sorted(params["P"])), tuple(sorted(params["Q"])),
                *(tuple(params[k]) for k in ("P1", "P2", "Q1", "Q2")),
            )
        else:
            gp = GenLaplaceParams.from_sets(n, params["P"], params["Q"])
        return gen_laplace_fluct(gp, int(params["l"]))
    if name in ("bj", "bj-shifted"):
        bp = BJParams(n, tuple(params["lambda"]), tuple(params["mu"]))
        if name == "bj":
            return barrett_johnson(bp)
        return barrett_johnson_shifted(bp, int(params["u"]), int(params["v"]))
    raise HypothesisError(f"unknown family {name!r}")


FAMILY_NAMES = ("gk", "laplace-diag", "laplace-offdiag", "karlin", "karlin-id", "genlaplace", "bj", "bj-shifted")
