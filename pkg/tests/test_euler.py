import pytest

from resolvent import (
    ChernTotal,
    DegreeCapExceeded,
    DivisorClass,
    Geometry,
    GradedMatrix,
    InvalidArgument,
    RankDimensionMismatch,
    UnsupportedProblem,
    chern_of_split,
    euler_number,
    euler_of_matrix,
    independence_harness,
    intersection_pairing,
    splitting_type_P1,
)
from resolvent.euler import p1_local_euler

ST = ("s", "t")
XYZ = ("x", "y", "z")


def test_geometry_validation():
    with pytest.raises(InvalidArgument):
        Geometry("P3")
    with pytest.raises(InvalidArgument):
        Geometry("P2", ((1, 0, 0),))
    with pytest.raises(InvalidArgument):
        Geometry("BlownP2", ((1, 0, 0), (2, 0, 0)))
    G = Geometry("BlownP2", ((2, 4, 0),))
    assert G.points == ((1, 2, 0),)


def test_intersection_examples():
    G = Geometry("BlownP2", ((1, 0, 0), (0, 1, 0)))
    H = DivisorClass.hyperplane(G)
    E1 = DivisorClass(0, (1, 0))
    E2 = DivisorClass(0, (0, 1))
    assert intersection_pairing(G, H, H) == 1
    assert intersection_pairing(G, H - E1, H - E1) == 0
    assert intersection_pairing(G, 2 * H - E1 - E2, H) == 2
    with pytest.raises(InvalidArgument):
        intersection_pairing(Geometry("P1"), DivisorClass(1), DivisorClass(1))


def test_chern_examples():
    G = Geometry("P2")
    L = DivisorClass(3)
    assert chern_of_split(G, [L]).c1 == L
    assert chern_of_split(G, [DivisorClass(-1), DivisorClass(-1)]).c2 == 1
    for d in (1, 2, 3):
        c = ChernTotal.of_line(DivisorClass(d)).inverse(G)
        assert c.mul(ChernTotal.of_line(DivisorClass(d)), G) == ChernTotal.one(G)
        assert c.c2 == d * d


def test_splitting_types():
    zero = GradedMatrix.make(ST, [0], [0], [["0"]])
    assert splitting_type_P1(zero) == [0]
    coprime = GradedMatrix.make(ST, [0, 0], [3], [["s^3", "t^3 + s*t^2"]])
    assert splitting_type_P1(coprime) == [-3]
    with_gcd = GradedMatrix.make(ST, [0, 0], [4], [["s^2*(s^2 + t^2)", "s^2*t^2"]])
    assert splitting_type_P1(with_gcd) == [-2]
    rank2 = GradedMatrix.make(ST, [0, 0, 0], [1], [["s", "t", "s + t"]])
    assert sorted(splitting_type_P1(rank2)) == [-1, 0]
    with pytest.raises(DegreeCapExceeded):
        splitting_type_P1(GradedMatrix.make(ST, [0, 0], [6], [["s^6", "t^6"]]), degree_cap=2)


def test_graded_matrix_rejects_inhomogeneous():
    with pytest.raises(InvalidArgument):
        GradedMatrix.make(ST, [0, 0], [2], [["s^2", "t"]])


def test_euler_number_rules():
    P1, P2 = Geometry("P1"), Geometry("P2")
    assert euler_number(P1, [-3]) == -3
    assert euler_number(P1, [-1, 0]) == 0
    with pytest.raises(RankDimensionMismatch):
        euler_number(P1, [])
    assert euler_number(P2, [DivisorClass(-1), DivisorClass(-1)]) == 1
    assert euler_number(P2, [DivisorClass(1)] * 3) == 0
    with pytest.raises(RankDimensionMismatch) as err:
        euler_number(P2, [DivisorClass(-2)])
    assert err.value.cycle == DivisorClass(-2)
    with pytest.raises(UnsupportedProblem):
        euler_number(P2, [DivisorClass(-1)] * 2, torsion_ok=False)


def test_euler_on_p2_examples():
    G = Geometry("P2")
    M = GradedMatrix.make(XYZ, [0, 0, 0], [1], [["x", "y", "z"]])
    assert euler_of_matrix(M, G).value == 1


def test_base_points_need_blowups():
    M = GradedMatrix.make(XYZ, [0, 0, 0], [2], [["y*z", "x*z", "z^2 + x*y"]])
    with pytest.raises(UnsupportedProblem):
        euler_of_matrix(M, Geometry("P2"))
    G = Geometry("BlownP2", ((1, 0, 0), (0, 1, 0)))
    res = euler_of_matrix(M, G)
    assert res.multiplicities == (1, 1)
    # c(K) = 1/(1 + 2H - E1 - E2): c2 = (2H - E1 - E2)^2 = 4 - 2
    assert res.value == 2
    assert independence_harness(M, G)


def test_p1_routes_agree():
    for f, g, d in (("s*(s + t)^2", "s*t^2", 3), ("s^2 - t^2", "s*t", 2), ("s^3*t", "t^4 + s^4", 4)):
        M = GradedMatrix.make(ST, [0, 0], [d], [[f, g]])
        assert euler_of_matrix(M, Geometry("P1")).value == p1_local_euler(M)
        assert independence_harness(M, Geometry("P1"), permutations=(0, 1))


def test_matrix_geometry_mismatch():
    M = GradedMatrix.make(ST, [0, 0], [1], [["s", "t"]])
    with pytest.raises(InvalidArgument):
        euler_of_matrix(M, Geometry("P2"))
