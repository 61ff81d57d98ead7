import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tn_ineq import families
from tn_ineq.errors import DimensionError, InvariantError
from tn_ineq.expr_core import COL, ROW, DetExpr, IndexSet
from tn_ineq.tn_matrix import (
    DIAG,
    LOWER,
    UPPER,
    BidiagFactorization,
    Matrix,
    a_star,
    adjugate,
    all_index_sets,
    bareiss_det,
    cofactor_det,
    compose,
    elementary_shift_identity_check,
    evaluate,
    factorization_from_json,
    factorization_to_json,
    is_tn_bruteforce,
    minor,
    multiply_factors,
    perturb,
    random_integer_matrix,
    sample_factorization,
    whitney_slots,
)

A2 = Matrix([[1, 1], [1, 2]])


def test_compose_examples():
    f = BidiagFactorization(2, (LOWER(1, 1), DIAG(1, 1), UPPER(1, 1)))
    assert compose(f) == A2
    assert compose(BidiagFactorization(3, (DIAG(1, 1, 1),))) == Matrix.identity(3)
    g = BidiagFactorization(3, (LOWER(2, 1), LOWER(1, 1), DIAG(1, 1, 1)))
    assert compose(g) == Matrix([[1, 0, 0], [1, 1, 0], [1, 1, 1]])


def test_compose_matches_matrix_product():
    f = sample_factorization(4, 11, 3)
    prod = Matrix.identity(4)
    for x in f.factors:
        prod = prod @ multiply_factors(4, [x])
    assert prod == compose(f)


def test_factorization_invariants():
    with pytest.raises(InvariantError):
        DIAG(1, 0)
    with pytest.raises(InvariantError):
        LOWER(1, -1)
    with pytest.raises(InvariantError):
        BidiagFactorization(2, (UPPER(1, 1), DIAG(1, 1)))
    with pytest.raises(InvariantError):
        BidiagFactorization(2, (LOWER(1, 1),))
    with pytest.raises(InvariantError):
        BidiagFactorization(3, (LOWER(3, 1), DIAG(1, 1, 1)))


def test_minor_examples():
    assert minor(A2, (1, 2), (1, 2)) == 1
    assert A2.minor((), ()) == 1
    lower = Matrix([[1, 0, 0], [1, 1, 0], [1, 1, 1]])
    assert lower.minor((2, 3), (1, 2)) == 0


def test_bareiss_handles_zero_pivots():
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[0, 0], [1, 2]]) == 0
    assert bareiss_det([[Fraction(1, 2), 1], [1, 3]]) == Fraction(1, 2)


@settings(max_examples=80)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.fractions(max_denominator=5, min_value=-6, max_value=6),
                                min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_equals_cofactor(rows):
    assert bareiss_det(rows) == cofactor_det(rows)


def test_evaluate_examples():
    assert evaluate(families.gantmacher_krein(2, 1), A2) == 1
    kp = families.KarlinParams(3, (2,), (1, 3), 2)
    for s in range(20):
        assert evaluate(families.karlin_identity(kp), random_integer_matrix(3, s, 5)) == 0
    assert evaluate(DetExpr(2, ()), A2) == 0
    with pytest.raises(DimensionError):
        evaluate(families.gantmacher_krein(3, 1), A2)


def test_adjugate_and_a_star():
    assert adjugate(A2) == Matrix([[2, -1], [-1, 1]])
    assert a_star(A2) == Matrix([[1, -1], [-1, 1]])
    assert adjugate(Matrix.identity(3)) == Matrix.identity(3)
    assert a_star(Matrix.identity(3)) == Matrix([[0] * 3] * 3)


@pytest.mark.parametrize("seed", range(5))
def test_adjugate_identity_and_row_sums(seed):
    a = random_integer_matrix(4, seed, 4)
    det = a.minor((1, 2, 3, 4), (1, 2, 3, 4))
    prod = a @ adjugate(a)
    assert prod == Matrix([[det if i == j else 0 for j in range(4)] for i in range(4)])
    s = a_star(a)
    assert all(sum(s[i, k] for k in range(1, 5)) == 0 for i in range(1, 5))


def test_laplace_rows_on_random_matrices():
    rng = random.Random(0)
    for _ in range(20):
        n = rng.randint(2, 5)
        a = random_integer_matrix(n, rng, 4)
        full = tuple(range(1, n + 1))
        det = a.minor(full, full)
        for i in full:
            for j in full:
                tot = sum(
                    (-1) ** (j + k) * a[i, k]
                    * a.minor(tuple(r for r in full if r != j), tuple(c for c in full if c != k))
                    for k in full
                )
                assert tot == (det if i == j else 0)


def test_sampler_is_deterministic():
    assert sample_factorization(4, 7, 3) == sample_factorization(4, 7, 3)
    assert sample_factorization(4, 7, 3) != sample_factorization(4, 8, 3)


def test_sampler_layout():
    f = sample_factorization(4, 0, 3)
    lower, upper = whitney_slots(4)
    assert len(f.factors) == len(lower) + 1 + len(upper) == 4 * 3 + 1
    assert upper == lower[::-1]


def test_zero_weights_give_identity():
    lower, upper = whitney_slots(3)
    f = BidiagFactorization(3, tuple(LOWER(k, 0) for k in lower) + (DIAG(1, 1, 1),)
                            + tuple(UPPER(k, 0) for k in upper))
    assert compose(f) == Matrix.identity(3)


def test_sampled_matrices_are_tn():
    for seed in range(1000):
        assert is_tn_bruteforce(compose(sample_factorization(4, seed, 3)))
    for seed in range(50):
        assert is_tn_bruteforce(compose(sample_factorization(5, seed, 3)))


def test_positive_weights_give_totally_positive():
    for n in range(2, 6):
        a = compose(sample_factorization(n, n, 2, nonsingular_only=True))
        for s in range(1, n + 1):
            sets = all_index_sets(n, s)
            assert all(a.minor(r, c) > 0 for r, c in itertools.product(sets, sets))


def test_rational_grid_sampling():
    f = sample_factorization(3, 1, 3, denominator=10)
    assert all(x.w * 10 == int(x.w * 10) for x in f.factors if x.d == ())
    assert is_tn_bruteforce(compose(f))


def test_is_tn_bruteforce_examples():
    assert is_tn_bruteforce(A2)
    assert not is_tn_bruteforce(Matrix([[0, 1], [1, 0]]))
    with pytest.raises(DimensionError):
        is_tn_bruteforce(Matrix.identity(9))


def test_elementary_shift_identity():
    a = random_integer_matrix(4, 3, 5)
    for s in range(1, 5):
        for r in all_index_sets(4, s):
            for c in all_index_sets(4, s):
                assert elementary_shift_identity_check(a, 2, 1, 3, IndexSet.of(4, r), IndexSet.of(4, c))
    with pytest.raises(ValueError):
        elementary_shift_identity_check(a, 1, 3, 1, IndexSet.of(4, [1]), IndexSet.of(4, [1]))


def test_perturb_row_and_column():
    b = perturb(A2, ROW(1, 2), 2)
    assert b == Matrix([[3, 5], [1, 2]])
    c = perturb(A2, COL(1, 2), 2)
    assert c == Matrix([[3, 1], [5, 2]])


def test_factorization_json_round_trip():
    f = sample_factorization(3, 5, 10, denominator=10)
    data = factorization_to_json(f)
    assert factorization_from_json(data) == f
    assert all(isinstance(x.get("w", ""), str) for x in data["factors"])
