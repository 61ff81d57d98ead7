"""Worked examples shared by the test modules."""

from tn_ineq.multiplicative import SmallestMultQuery

# two 6x6 products, the first compared against the second in both directions
EX1_SETS = dict(
    P1=(1, 2, 3, 6), Q1=(1, 2, 4, 5), P2=(3, 4), Q2=(2, 5),
    I1=(1, 3, 6), J1=(1, 2, 5), I2=(2, 3, 4), J2=(2, 4, 5),
)
EX1_LE = SmallestMultQuery(6, direction="le", **EX1_SETS)
EX1_GE = SmallestMultQuery(6, direction="ge", **EX1_SETS)

# J1, J2 as needed to reproduce the printed principal form (see notes)
EX2_SETS = dict(
    P1=(1, 3, 4), P2=(2, 5, 6), Q1=(1, 2, 3), Q2=(4, 5, 6),
    I1=(1, 3, 4), I2=(2, 5, 6), J1=(3, 5, 6), J2=(1, 2, 4),
)
EX2_LE = SmallestMultQuery(6, direction="le", **EX2_SETS)
EX2_GE = SmallestMultQuery(6, direction="ge", **EX2_SETS)
EX2_PRINCIPAL = dict(
    R1=(1, 3, 4, 7, 8, 9), R2=(2, 5, 6, 10, 11, 12),
    K1=(1, 3, 4, 9, 11, 12), K2=(2, 5, 6, 7, 8, 10),
)

# principal minors of a 4x4 matrix, a Koteljanskii-type comparison
KOTEL = SmallestMultQuery(
    4, P1=(1, 2, 3), P2=(2,), Q1=(1, 2, 3), Q2=(2,),
    I1=(1, 2), I2=(2, 3), J1=(1, 2), J2=(2, 3),
)
