"""Exact rational matrices built from elementary bidiagonal factors.

Every totally nonnegative matrix here is produced as a product of
elementary lower bidiagonals, one positive diagonal, and elementary upper
bidiagonals with nonnegative weights.  Minors are computed exactly with
fraction-free elimination; a cofactor expansion is kept as an independent
check.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from .errors import DimensionError, InvariantError
from .expr_core import Axis, DetExpr, IndexSet, Minor, OpSpec, Relation, shift_set


class Matrix:
    """Square matrix of Fractions with a per-instance minor cache."""

    __slots__ = ("rows", "n", "_minors")

    def __init__(self, rows: Iterable[Iterable]):
        self.rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise DimensionError("matrix must be square")
        self._minors: dict[tuple[int, int], Fraction] = {}

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        """1-based entry access."""
        i, j = ij
        return self.rows[i - 1][j - 1]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return f"Matrix({[[str(x) for x in r] for r in self.rows]})"

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise DimensionError("size mismatch")
        cols = list(zip(*other.rows))
        return Matrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
        key = (_mask(rows), _mask(cols))
        hit = self._minors.get(key)
        if hit is None:
            hit = bareiss_det([[self.rows[i - 1][j - 1] for j in cols] for i in rows])
            self._minors[key] = hit
        return hit


def _mask(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


# -- determinants ----------------------------------------------------------

def bareiss_det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-free elimination.

    Rows are scaled to integers first, so every division is exact.
    """
    n = len(a)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    m: list[list[int]] = []
    for row in a:
        row = [Fraction(x) for x in row]
        d = reduce(lcm, (x.denominator for x in row), 1)
        scale /= d
        m.append([int(x * d) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
        prev = pk
    return sign * m[n - 1][n - 1] * scale


def cofactor_det(a: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by Laplace expansion along the first row."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(a[0][0])
    total = Fraction(0)
    for j in range(n):
        if a[0][j] == 0:
            continue
        sub = [row[:j] + row[j + 1:] for row in a[1:]]
        total += (-1) ** j * a[0][j] * cofactor_det(sub)
    return total


def minor(a: Matrix, rows: IndexSet | Sequence[int], cols: IndexSet | Sequence[int]) -> Fraction:
    r, c = tuple(rows), tuple(cols)
    if len(r) != len(c):
        raise DimensionError("minor needs equally many rows and columns")
    return a.minor(r, c)


def minor_cofactor(a: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
    return cofactor_det([[a[i, j] for j in cols] for i in rows])


def evaluate(e: DetExpr, a: Matrix) -> Fraction:
    if a.n != e.n:
        raise DimensionError(f"expression is {e.n}x{e.n}, matrix is {a.n}x{a.n}")
    total = Fraction(0)
    for t in e.terms:
        p = t.coeff
        for m in t.minors:
            p *= a.minor(m.rows.elements, m.cols.elements)
            if p == 0:
                break
        total += p
    return total


def holds_at(e: DetExpr, a: Matrix) -> bool:
    value = evaluate(e, a)
    if e.relation is Relation.EQ_ZERO:
        return value == 0
    return value >= 0


def adjugate(a: Matrix) -> Matrix:
    n = a.n
    full = list(range(1, n + 1))
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in full:
        for k in full:
            rows = [r for r in full if r != i]
            cols = [c for c in full if c != k]
            out[k - 1][i - 1] = (-1) ** (i + k) * a.minor(rows, cols)
    return Matrix(out)


def a_star(a: Matrix, i: int | None = None, k: int | None = None):
    """``A o adj(A)^T - det(A) I``, or just its entry (i,k) when both are given."""
    n = a.n
    if i is None or k is None:
        return Matrix([[a_star(a, r, c) for c in range(1, n + 1)] for r in range(1, n + 1)])
    full = list(range(1, n + 1))
    rows = [r for r in full if r != i]
    cols = [c for c in full if c != k]
    val = (-1) ** (i + k) * a[i, k] * a.minor(rows, cols)
    if i == k:
        val -= a.minor(full, full)
    return val


# -- bidiagonal factors ----------------------------------------------------

class FactorKind(Enum):
    LOWER = "lower"
    UPPER = "upper"
    DIAG = "diag"


@dataclass(frozen=True)
class BidiagFactor:
    kind: FactorKind
    k: int = 0
    w: Fraction = Fraction(0)
    d: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is FactorKind.DIAG:
            if not self.d or any(x <= 0 for x in self.d):
                raise InvariantError("diagonal factor needs positive entries")
        elif self.w < 0:
            raise InvariantError("bidiagonal weights must be nonnegative")

    def edge(self) -> tuple[int, int] | None:
        """(source level, sink level) of the off-diagonal entry."""
        if self.kind is FactorKind.LOWER:
            return (self.k + 1, self.k)
        if self.kind is FactorKind.UPPER:
            return (self.k, self.k + 1)
        return None


def LOWER(k: int, w) -> BidiagFactor:
    return BidiagFactor(FactorKind.LOWER, k, Fraction(w))


def UPPER(k: int, w) -> BidiagFactor:
    return BidiagFactor(FactorKind.UPPER, k, Fraction(w))


def DIAG(*d) -> BidiagFactor:
    return BidiagFactor(FactorKind.DIAG, 0, Fraction(0), tuple(Fraction(x) for x in d))


def check_factors(n: int, factors: Sequence[BidiagFactor]) -> None:
    for f in factors:
        if f.kind is FactorKind.DIAG:
            if len(f.d) != n:
                raise InvariantError(f"diagonal factor has {len(f.d)} entries, need {n}")
        elif not 1 <= f.k <= n - 1:
            raise InvariantError(f"bidiagonal index {f.k} out of range for n={n}")


@dataclass(frozen=True)
class BidiagFactorization:
    n: int
    factors: tuple[BidiagFactor, ...]

    def __post_init__(self) -> None:
        check_factors(self.n, self.factors)
        kinds = [f.kind for f in self.factors]
        if kinds.count(FactorKind.DIAG) != 1:
            raise InvariantError("exactly one diagonal factor is required")
        mid = kinds.index(FactorKind.DIAG)
        if any(k is not FactorKind.LOWER for k in kinds[:mid]):
            raise InvariantError("only lower factors may precede the diagonal")
        if any(k is not FactorKind.UPPER for k in kinds[mid + 1:]):
            raise InvariantError("only upper factors may follow the diagonal")

    def to_json(self) -> dict:
        return factorization_to_json(self)


def multiply_factors(n: int, factors: Sequence[BidiagFactor]) -> Matrix:
    """Product of factors, applied as column operations on the identity."""
    check_factors(n, factors)
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for f in factors:
        if f.kind is FactorKind.DIAG:
            for row in m:
                for j in range(n):
                    row[j] *= f.d[j]
        elif f.w:
            src, dst = f.edge()
            # right multiplication by I + w E_{src,dst}: col dst += w * col src
            for row in m:
                row[dst - 1] += f.w * row[src - 1]
    return Matrix(m)


def compose(f: BidiagFactorization) -> Matrix:
    return multiply_factors(f.n, f.factors)


def whitney_slots(n: int) -> tuple[list[int], list[int]]:
    """Index k of each lower and upper slot in the standard full layout.

    The upper run mirrors the lower one (k ascending inside each j), so that
    with positive weights every entry above the diagonal is reachable.
    """
    lower = [k for j in range(1, n) for k in range(n - 1, j - 1, -1)]
    upper = [k for j in range(n - 1, 0, -1) for k in range(j, n)]
    return lower, upper


def sample_factorization(
    n: int,
    seed: int | random.Random,
    weight_bound: int,
    nonsingular_only: bool = False,
    denominator: int = 1,
) -> BidiagFactorization:
    """Random full-layout factorization with integer weights.

    Off-diagonal weights are uniform on ``0..W`` (``1..W`` when
    ``nonsingular_only``, which gives a totally positive product) and
    diagonal entries uniform on ``1..W``. With ``denominator`` D > 1 the
    weights live on the grid ``k/D`` instead, up to W, which reaches ratios
    between entries that integer weights cannot (e.g. a12 < a11 with a12 > 0).
    """
    if weight_bound < 1:
        raise ValueError("weight bound must be at least 1")
    if denominator < 1:
        raise ValueError("denominator must be at least 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    lo = 1 if nonsingular_only else 0
    top = weight_bound * denominator

    def draw(low):
        k = rng.randint(low, top)
        return k if denominator == 1 else Fraction(k, denominator)

    lower, upper = whitney_slots(n)
    factors = [LOWER(k, draw(lo)) for k in lower]
    factors.append(DIAG(*(draw(1) for _ in range(n))))
    factors += [UPPER(k, draw(lo)) for k in upper]
    return BidiagFactorization(n, tuple(factors))


def random_integer_matrix(n: int, seed: int | random.Random, bound: int) -> Matrix:
    """Arbitrary (not necessarily TN) matrix with entries in ``-bound..bound``."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return Matrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)])


def all_index_sets(n: int, size: int | None = None) -> list[tuple[int, ...]]:
    sizes = range(n + 1) if size is None else [size]
    return [c for s in sizes for c in itertools.combinations(range(1, n + 1), s)]


def is_tn_bruteforce(a: Matrix) -> bool:
    if a.n > 8:
        raise DimensionError("brute-force TN test is limited to n <= 8")
    for s in range(1, a.n + 1):
        sets = all_index_sets(a.n, s)
        for r in sets:
            for c in sets:
                if a.minor(r, c) < 0:
                    return False
    return True


def perturb(a: Matrix, op: OpSpec, w) -> Matrix:
    """The matrix whose minors expand along the shift ``op``.

    For a row shift this is ``(I + w E_uv) A`` (row u gains w * row v); for a
    column shift it is ``A (I + w E_vu)`` (column u gains w * column v).
    """
    w = Fraction(w)
    m = a.tolist()
    if op.axis is Axis.ROW:
        m[op.u - 1] = [x + w * y for x, y in zip(m[op.u - 1], m[op.v - 1])]
    else:
        for row in m:
            row[op.u - 1] += w * row[op.v - 1]
    return Matrix(m)


def elementary_shift_identity_check(
    a: Matrix, u: int, v: int, w, rows: IndexSet, cols: IndexSet
) -> bool:
    """Check det B(I|J) = det A(I|J) + w det A(I(u,v)|J) for B = (I + w E_uv) A.

    When u is not in I or v is in I the minor is unchanged instead.
    """
    if abs(u - v) != 1:
        raise ValueError("u and v must be consecutive")
    b = perturb(a, OpSpec(Axis.ROW, u, v), w)
    lhs = b.minor(rows.elements, cols.elements)
    shifted = shift_set(rows, u, v)
    base = a.minor(rows.elements, cols.elements)
    if shifted == rows:
        return lhs == base
    return lhs == base + Fraction(w) * a.minor(shifted.elements, cols.elements)


# -- JSON ------------------------------------------------------------------

def factorization_to_json(f: BidiagFactorization) -> dict:
    out = []
    for x in f.factors:
        if x.kind is FactorKind.DIAG:
            out.append({"kind": "diag", "d": [str(v) for v in x.d]})
        else:
            out.append({"kind": x.kind.value, "k": x.k, "w": str(x.w)})
    return {"n": f.n, "factors": out}


def factorization_from_json(data: dict) -> BidiagFactorization:
    factors = []
    for x in data["factors"]:
        kind = FactorKind(x["kind"])
        if kind is FactorKind.DIAG:
            factors.append(DIAG(*(Fraction(v) for v in x["d"])))
        else:
            factors.append(BidiagFactor(kind, int(x["k"]), Fraction(x["w"])))
    return BidiagFactorization(int(data["n"]), tuple(factors))


def dumps_factorization(f: BidiagFactorization) -> str:
    return json.dumps(factorization_to_json(f))
