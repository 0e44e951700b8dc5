import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolvent import (
    Chart,
    ComplexOnChart,
    ContextMismatch,
    Ideal,
    InvalidArgument,
    MatrixHom,
    PointOffChart,
    RingMap,
    apply_map,
    base_change_check,
    compose,
    determinantal_ideal,
    direct_sum,
    ideal_equal,
    image_rank,
    is_dominant_heuristic,
    is_regular_point,
    is_unit,
    kernel_fiber_dimension,
    kernel_module,
    pull_ideal,
    pullback_hom,
)
from resolvent.charts import product_chart


@pytest.fixture
def blow():
    """The y = x*t chart of the blowup of the plane at the origin."""
    A2 = Chart.make(["x", "y"])
    B = Chart.make(["x", "t"], exceptionals=[("E1", "x")], name="E1.1")
    return A2, B, RingMap.make(A2, B, ["x", "x*t"])


# -- charts ---------------------------------------------------------------------


def test_is_unit_examples():
    A1 = Chart.make(["x"])
    assert is_unit(A1.parse("2"), A1)
    assert not is_unit(A1.var("x"), A1)
    Q = Chart.make(["x", "y"], relations=["x*y"])
    assert is_unit(Q.parse("1 - x*y"), Q)
    L = Chart.make(["x", "w"], relations=["x*w - 1"])
    assert L.inverse(L.var("x")) == L.var("w")


def test_apply_map_examples(blow):
    A2, B, m = blow
    f = A2.parse("x^3 - 2*y")
    assert apply_map(RingMap.identity(A2), f) == f
    assert apply_map(m, A2.parse("y^2")) == B.parse("x^2*t^2")
    Q = Chart.make(["x", "y"], relations=["x*y"])
    q = RingMap.make(A2, Q, ["x", "y"])
    assert apply_map(q, A2.parse("x*y + 1")) == Q.parse("1")
    with pytest.raises(ContextMismatch):
        m.apply(Chart.make(["a", "b", "c"]).var("a"))


def test_ring_map_checks_relations():
    A1 = Chart.make(["x"])
    Q = Chart.make(["x", "y"], relations=["x*y"])
    with pytest.raises(InvalidArgument):
        RingMap.make(Q, A1, ["x", "x"])
    assert RingMap.make(Q, A1, ["x", "0"]).apply(Q.parse("x + y")) == A1.var("x")


@settings(max_examples=30)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.integers(0, 3), st.integers(0, 3))
def test_ring_map_is_a_homomorphism(cs, i, j):
    A2 = Chart.make(["x", "y"])
    B = Chart.make(["u", "v"])
    m = RingMap.make(A2, B, [f"{cs[0]}*u + {cs[1]}*v^2", f"{cs[2]} + {cs[3]}*u*v"])
    f = A2.parse(f"x^{i} + {cs[4]}*y")
    g = A2.parse(f"y^{j} - {cs[5]}*x*y")
    assert m.apply(f + g) == m.apply(f) + m.apply(g)
    assert m.apply(f * g) == B.reduce(m.apply(f) * m.apply(g))
    assert m.apply(A2.parse("1")) == B.parse("1")


def test_compose_is_associative(blow):
    A2, B, m = blow
    C = Chart.make(["a", "b"])
    n = RingMap.make(B, C, ["a + b", "a*b"])
    k = RingMap.make(C, C, ["b", "a^2"])
    left = compose(compose(k, n), m)
    right = compose(k, compose(n, m))
    assert left.images == right.images


def test_pull_ideal_examples(blow):
    A2, B, m = blow
    assert ideal_equal(pull_ideal(m, Ideal([A2.var("x"), A2.var("y")])), Ideal([B.var("x")]))
    assert pull_ideal(m, Ideal([], 2)).groebner() == ()
    assert pull_ideal(m, Ideal([A2.parse("1")])).is_unit()


def test_dominance(blow):
    A2, B, m = blow
    assert is_dominant_heuristic(m)
    assert not is_dominant_heuristic(RingMap.make(A2, A2, ["0", "0"]))
    assert is_dominant_heuristic(RingMap.identity(A2))


def test_chart_json_round_trip():
    C = Chart.make(["x", "y", "u"], relations=["y^2 - x*u"], exceptionals=[("E1", "x")], name="r/E1.1")
    D = Chart.from_json(C.to_json())
    assert D.same_ring(C) and D.name == C.name and D.exceptionals == C.exceptionals


def test_product_chart():
    a = Chart.make(["x"], relations=[])
    b = Chart.make(["x", "y"], relations=["x*y - 1"])
    P, ia, ib = product_chart(a, b)
    assert P.nvars == 3 and len(set(P.vars)) == 3
    assert P.is_unit(ib.apply(b.var("x")))


# -- matrices -------------------------------------------------------------------


def test_determinantal_examples(a2):
    D = MatrixHom.make(a2, [["x", "0"], ["0", "y"]])
    assert ideal_equal(determinantal_ideal(D, 0), Ideal([a2.var("x"), a2.var("y")]))
    assert ideal_equal(determinantal_ideal(D, 1), Ideal([a2.parse("x*y")]))
    A4 = Chart.make(["x", "y", "z", "w"])
    G = MatrixHom.make(A4, [["x", "y"], ["z", "w"]])
    assert ideal_equal(determinantal_ideal(G, 1), Ideal([A4.parse("x*w - y*z")]))


def test_determinantal_chain(a3):
    phi = MatrixHom.make(a3, [["x", "y", "z"], ["y", "z^2", "x"], ["z", "x", "y*x"]])
    ideals = [determinantal_ideal(phi, r) for r in range(3)]
    for small, big in zip(ideals[1:], ideals):
        assert all(big.contains(g) for g in small.gens)


def test_image_rank_and_regularity(a2):
    D = MatrixHom.make(a2, [["x", "0"], ["0", "y"]])
    assert image_rank(MatrixHom.zero(a2, 2, 3)) == 0
    assert image_rank(MatrixHom.identity(a2, 4)) == 4
    assert image_rank(D) == 2
    assert is_regular_point(D, (1, 1))
    assert not is_regular_point(D, (0, 1))
    assert is_regular_point(MatrixHom.identity(a2, 2), (5, -3))
    Q = Chart.make(["x", "y"], relations=["x*y - 1"])
    with pytest.raises(PointOffChart):
        is_regular_point(MatrixHom.identity(Q, 1), (0, 0))


def test_pullback_and_direct_sum(blow, a3):
    A2, B, m = blow
    D = MatrixHom.make(A2, [["x", "0"], ["0", "y"]])
    assert pullback_hom(m, D).same(MatrixHom.make(B, [["x", "0"], ["0", "x*t"]]))
    assert pullback_hom(RingMap.identity(A2), D).same(D)
    assert pullback_hom(m, MatrixHom.zero(A2, 2, 2)).is_zero()
    s = direct_sum(MatrixHom.make(A2, [["x"]]), MatrixHom.make(A2, [["y"]]))
    assert s.same(D)
    assert direct_sum(D, MatrixHom.zero(A2, 0, 0)).same(D)
    big = direct_sum(MatrixHom.make(a3, [["x", "0"], ["0", "y"]]), MatrixHom.make(a3, [["z"]]))
    assert big.same(MatrixHom.make(a3, [["x", "0", "0"], ["0", "y", "0"], ["0", "0", "z"]]))
    with pytest.raises(ContextMismatch):
        direct_sum(D, MatrixHom.make(a3, [["z"]]))


def test_base_change_examples(blow):
    A2, B, m = blow
    D = MatrixHom.make(A2, [["x", "0"], ["0", "y"]])
    assert base_change_check(RingMap.identity(A2), D, 0)
    assert base_change_check(m, D, 0)
    A4 = Chart.make(["x", "y", "z", "w"])
    C = Chart.make(["x", "y", "z"])
    g = RingMap.make(A4, C, ["x", "y", "z", "y*z"])
    assert base_change_check(g, MatrixHom.make(A4, [["x", "y"], ["z", "w"]]), 1)


def test_kernel_module(a3):
    psi = MatrixHom.make(a3, [["x", "y", "z"]])
    gens = kernel_module(psi)
    assert len(gens) == 3
    for v in gens:
        assert sum((a * b for a, b in zip(psi.entries[0], v)), a3.parse("0")).is_zero()
    assert kernel_fiber_dimension(psi, (0, 0, 0)) == 3
    assert kernel_fiber_dimension(psi, (0, 0, 1)) == 2


def test_complex_validation(a2):
    good = ComplexOnChart((MatrixHom.make(a2, [["x"], ["y"]]), MatrixHom.make(a2, [["-y", "x"]])))
    assert good.ranks == [1, 2, 1]
    with pytest.raises(InvalidArgument):
        ComplexOnChart((MatrixHom.make(a2, [["x"], ["y"]]), MatrixHom.make(a2, [["y", "x"]])))
    with pytest.raises(InvalidArgument):
        ComplexOnChart((MatrixHom.make(a2, [["x"], ["y"]]), MatrixHom.make(a2, [["x"]])))
