"""Exact sampling checks for expressions over totally nonnegative matrices."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionError, UnassertedRelation
from .expr_core import Axis, DetExpr, OpSpec, Relation, all_ops, apply_op, apply_sequence
from .planar_net import build_network, path_weight_sum
from .tn_matrix import (
    BidiagFactorization,
    Matrix,
    all_index_sets,
    compose,
    evaluate,
    minor_cofactor,
    perturb,
    sample_factorization,
)

ESCALATION = (1, 3, 10)
RATIONAL_STAGE = (3, 10)  # (weight bound, denominator)
CEX_CHUNK = 500


@dataclass(frozen=True)
class VerifyConfig:
    n: int
    samples: int = 200
    weight_bound: int = 3
    seed: int = 0
    nonsingular_only: bool = False


@dataclass
class VerifyReport:
    checked: int = 0
    violations: list[tuple[BidiagFactorization, Fraction]] = field(default_factory=list)
    min_value_seen: Fraction | None = None
    max_value_seen: Fraction | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "VerifyReport") -> "VerifyReport":
        vals = [v for v in (self.min_value_seen, other.min_value_seen) if v is not None]
        tops = [v for v in (self.max_value_seen, other.max_value_seen) if v is not None]
        return VerifyReport(
            self.checked + other.checked,
            self.violations + other.violations,
            min(vals) if vals else None,
            max(tops) if tops else None,
        )


@lru_cache(maxsize=64)
def sample_pool(n: int, samples: int, weight_bound: int, seed: int, nonsingular_only: bool):
    """Deterministic list of (factorization, matrix) pairs.

    Cached so that many expressions checked with one config share the matrices
    and their memoized minors.
    """
    rng = random.Random(f"{seed}:{n}:{weight_bound}:{nonsingular_only}")
    out = []
    for _ in range(samples):
        f = sample_factorization(n, rng, weight_bound, nonsingular_only)
        out.append((f, compose(f)))
    return tuple(out)


def _violates(e: DetExpr, value: Fraction) -> bool:
    if e.relation is Relation.EQ_ZERO:
        return value != 0
    return value < 0


def verify(e: DetExpr, cfg: VerifyConfig) -> VerifyReport:
    """Evaluate ``e`` on sampled TN matrices and collect violations."""
    if e.relation is Relation.UNASSERTED:
        raise UnassertedRelation("nothing to verify for an unasserted expression")
    if e.n != cfg.n:
        raise DimensionError(f"expression has n={e.n}, config has n={cfg.n}")
    rep = VerifyReport()
    pool = sample_pool(cfg.n, cfg.samples, cfg.weight_bound, cfg.seed, cfg.nonsingular_only)
    for f, a in pool:
        val = evaluate(e, a)
        rep.checked += 1
        if rep.min_value_seen is None or val < rep.min_value_seen:
            rep.min_value_seen = val
        if rep.max_value_seen is None or val > rep.max_value_seen:
            rep.max_value_seen = val
        if _violates(e, val):
            rep.violations.append((f, val))
    return rep


def verify_escalating(
    e: DetExpr, cfg: VerifyConfig, bounds: Sequence[int] = ESCALATION
) -> VerifyReport:
    """Run :func:`verify` at each weight bound in turn, stopping at the first violation."""
    rep = VerifyReport()
    for w in bounds:
        rep = rep.merge(verify(e, VerifyConfig(cfg.n, cfg.samples, w, cfg.seed, cfg.nonsingular_only)))
        if rep.violations:
            break
    return rep


@lru_cache(maxsize=64)
def _cex_chunk(n: int, weight_bound: int, denominator: int, seed: int, index: int):
    rng = random.Random(f"cex:{seed}:{n}:{weight_bound}:{denominator}:{index}")
    out = []
    for _ in range(CEX_CHUNK):
        f = sample_factorization(n, rng, weight_bound, denominator=denominator)
        out.append((f, compose(f)))
    return tuple(out)


def find_counterexample(
    e: DetExpr,
    budget: int = 100_000,
    seed: int = 0,
    bounds: Sequence[int] = ESCALATION,
    rational: bool = True,
) -> tuple[BidiagFactorization, Fraction] | None:
    """First sampled TN matrix violating ``e`` within ``budget`` samples.

    Each round draws a chunk at every integer weight bound in turn and then,
    unless ``rational`` is off, a chunk with weights on the grid k/10 up to 3.
    Integer weights alone never produce an entry ratio strictly between 0 and
    1 along a single edge, which some false inequalities need.
    """
    stages = [(w, 1) for w in bounds] + ([RATIONAL_STAGE] if rational else [])
    spent = 0
    index = 0
    while spent < budget:
        for w, den in stages:
            take = min(CEX_CHUNK, budget - spent)
            if take <= 0:
                break
            for f, a in _cex_chunk(e.n, w, den, seed, index)[:take]:
                val = evaluate(e, a)
                if _violates(e, val):
                    return f, val
            spent += take
        index += 1
    return None


def random_op_sequence(n: int, length: int, rng: random.Random) -> list[OpSpec]:
    ops = all_ops(n)
    return [rng.choice(ops) for _ in range(length)]


def soundness_sweep(
    e: DetExpr,
    cfg: VerifyConfig,
    sequences: Iterable[Sequence[OpSpec]] | None = None,
    count: int = 20,
    max_len: int = 4,
) -> VerifyReport:
    """Apply shift sequences to ``e`` and verify every result.

    Without explicit sequences, ``count`` random ones of length up to
    ``max_len`` are drawn from the config seed.
    """
    if sequences is None:
        rng = random.Random(f"sweep:{cfg.seed}")
        sequences = [random_op_sequence(e.n, rng.randint(0, max_len), rng) for _ in range(count)]
    rep = VerifyReport()
    for seq in sequences:
        derived = apply_sequence(e, seq)
        if not derived.terms:
            continue
        rep = rep.merge(verify(derived, cfg))
    return rep


@dataclass(frozen=True)
class OracleMismatch:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    bareiss: Fraction
    cofactor: Fraction
    paths: Fraction


def oracle_compare(f: BidiagFactorization) -> list[OracleMismatch]:
    """Compare elimination, cofactor expansion, and path families on every minor."""
    a = compose(f)
    net = build_network(f)
    out = []
    for s in range(1, f.n + 1):
        sets = all_index_sets(f.n, s)
        for r, c in itertools.product(sets, sets):
            x = a.minor(r, c)
            y = minor_cofactor(a, r, c)
            z = path_weight_sum(net, r, c)
            if not x == y == z:
                out.append(OracleMismatch(r, c, x, y, z))
    return out


# -- polynomial expansion along a shift ------------------------------------

def shift_polynomial_direct(e: DetExpr, a: Matrix, op: OpSpec) -> list[Fraction]:
    """Coefficients in w of ``e`` evaluated at the perturbed matrix, term by term.

    A minor that the shift can move contributes ``det A(X) + w det A(X')``,
    any other minor stays put; the product is expanded per term.
    """
    top = 0
    polys = []
    for t in e.terms:
        poly = [t.coeff]
        for m in t.minors:
            sets = m.rows if op.axis is Axis.ROW else m.cols
            base = a.minor(m.rows.elements, m.cols.elements)
            if op.u != op.v and op.u in sets and op.v not in sets:
                moved = [op.v if x == op.u else x for x in sets]
                moved.sort()
                if op.axis is Axis.ROW:
                    alt = a.minor(moved, m.cols.elements)
                else:
                    alt = a.minor(m.rows.elements, moved)
                factor = [base, alt]
            else:
                factor = [base]
            nxt = [Fraction(0)] * (len(poly) + len(factor) - 1)
            for i, x in enumerate(poly):
                for j, y in enumerate(factor):
                    nxt[i + j] += x * y
            poly = nxt
        polys.append(poly)
        top = max(top, len(poly))
    total = [Fraction(0)] * top
    for poly in polys:
        for i, x in enumerate(poly):
            total[i] += x
    return total


def shift_polynomial_interpolated(e: DetExpr, a: Matrix, op: OpSpec, degree: int) -> list[Fraction]:
    """Same coefficients recovered from ``degree + 1`` exact evaluations."""
    xs = [Fraction(k) for k in range(degree + 1)]
    ys = [evaluate(e, perturb(a, op, x)) for x in xs]
    # solve the Vandermonde system by Newton divided differences
    coef = list(ys)
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * len(xs)
    for i in range(len(xs) - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [s - xs[i] * p for s, p in zip(shifted, poly)]
        poly[0] += coef[i]
    return poly
