"""Fitting ideals and the level-by-level resolution of complexes of free modules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .blowup import BlowupStep, BlowupTower, Leaf, determinantal_tower
from .charts import Chart, RingMap, compose, product_chart
from .diagonalize import DiagCert, KernelBasis, kernel_basis, pullback_cert
from .errors import ContextMismatch, InvalidArgument, NoCommonLeaf, VerificationFailure
from .ideals import Ideal, ideal_equal, saturate
from .matrices import ComplexOnChart, MatrixHom, determinant, determinantal_ideal, matmul, pullback_hom
from .polys import Poly


@dataclass(frozen=True, eq=False)
class Presentation:
    """``O^n --alpha--> O^m``; the presented module is the cokernel."""

    alpha: MatrixHom

    @property
    def m(self) -> int:
        return self.alpha.rows


def fitting_ideal(P: Presentation, h: int) -> Ideal:
    """Ideal of the ``(m-h)``-minors of the presentation matrix; the unit ideal when ``h >= m``."""
    if h < 0:
        raise InvalidArgument("h must be non-negative")
    chart = P.alpha.chart
    if h >= P.m:
        return chart.ideal([Poly.one(chart.nvars)])
    return determinantal_ideal(P.alpha, P.m - h - 1)


def fitting_independence_check(P: Presentation, Q: Presentation) -> bool:
    if not P.alpha.chart.same_ring(Q.alpha.chart):
        raise ContextMismatch("presentations over different charts")
    top = max(P.m, Q.m)
    return all(ideal_equal(fitting_ideal(P, h), fitting_ideal(Q, h)) for h in range(top + 1))


@dataclass(frozen=True, eq=False)
class ResolvedLeaf:
    chart: Chart
    map: RingMap
    depth: int
    complex: ComplexOnChart
    certs: Tuple[DiagCert, ...]
    kernel: KernelBasis
    key: Tuple[int, ...] = ()

    @property
    def ranks(self) -> List[int]:
        return [c.rank for c in self.certs]


@dataclass(frozen=True, eq=False)
class ResolutionResult:
    root: ComplexOnChart
    tower: BlowupTower
    leaves: Tuple[ResolvedLeaf, ...]
    h: Tuple[int, ...]

    @property
    def blowups(self) -> int:
        return self.tower.blowups


@dataclass
class _State:
    chart: Chart
    map: RingMap
    depth: int
    certs: dict
    key: Tuple[int, ...]


def _induced_cert(chart: Chart, outer: DiagCert, inner: DiagCert, rows: int) -> DiagCert:
    """Certificate for ``psi = V [0; A]`` given one for ``A`` and the inverse of ``V``."""
    m = outer.rank
    k = rows - m
    one, zero = Poly.one(chart.nvars), Poly.zero(chart.nvars)
    Vinv = outer.V_inv
    # rows of P * Vinv: the last k rows first, then the first m
    permuted = list(Vinv[m:]) + list(Vinv[:m])
    block = [list(r) + [zero] * m for r in inner.U] + [
        [zero] * k + [one if a == b else zero for b in range(m)] for a in range(m)
    ]
    U = matmul(chart, block, permuted, rows)
    sign = -1 if (k * m) % 2 else 1
    udet = chart.reduce(inner.U_det * chart.inverse(outer.V_det)).scale(sign)
    return DiagCert(chart, U, inner.V, inner.diag, udet, inner.V_det, inner.V_inv, inner.mixing, inner.seed)


def resolve_complex(
    C: ComplexOnChart,
    max_depth: int = 8,
    permutation: int = 0,
    seed: int = 0,
) -> ResolutionResult:
    """Blow up from the top map downwards until every map is diagonalized on every leaf."""
    root = C.chart
    n = len(C.terms)
    ranks = C.ranks
    states = [_State(root, RingMap.identity(root), 0, {}, ())]
    steps: List[BlowupStep] = []
    label = 1
    for level in range(n - 1, -1, -1):
        nxt = []
        for st in states:
            psi = pullback_hom(st.map, C.terms[level])
            if level == n - 1:
                target = psi
            else:
                outer = st.certs[level + 1]
                m = outer.rank
                coords = matmul(st.chart, outer.V_inv, psi.entries, psi.rows)
                if any(e for row in coords[:m] for e in row):
                    raise VerificationFailure("map does not land in the kernel of the next map")
                target = MatrixHom(st.chart, psi.rows - m, psi.cols, tuple(coords[m:]))
            T = determinantal_tower(
                st.chart, target, max_depth, permutation, seed, label_start=label, base_depth=st.depth
            )
            label += T.blowups
            steps.extend(T.steps)
            for leaf in T.leaves:
                certs = {lv: pullback_cert(c, leaf.map) for lv, c in st.certs.items()}
                if level == n - 1:
                    certs[level] = leaf.cert
                else:
                    certs[level] = _induced_cert(leaf.chart, certs[level + 1], leaf.cert, ranks[level + 1])
                nxt.append(_State(leaf.chart, compose(leaf.map, st.map), leaf.depth, certs, st.key + leaf.key))
        states = nxt
    states.sort(key=lambda s: s.key)
    leaves = []
    hs = None
    for st in states:
        certs = tuple(st.certs[i] for i in range(n))
        ms = [c.rank for c in certs]
        h = [ranks[0] - ms[0]]
        h += [(ranks[i] - ms[i]) - ms[i - 1] for i in range(1, n)]
        h.append(ranks[n] - ms[n - 1])
        if hs is None:
            hs = tuple(h)
        elif tuple(h) != hs:
            raise VerificationFailure(f"cohomology ranks differ between leaves: {hs} vs {tuple(h)}")
        leaves.append(
            ResolvedLeaf(st.chart, st.map, st.depth, C.pullback(st.map), certs, kernel_basis(certs[0], ranks[0]), st.key)
        )
    tower_leaves = tuple(Leaf(l.chart, l.map, l.depth, l.certs[0], l.complex.terms[0], l.key) for l in leaves)
    tower = BlowupTower(root, tuple(steps), tower_leaves)
    return ResolutionResult(C, tower, tuple(leaves), hs)


def torsion_check(R: ResolutionResult) -> bool:
    """True when every higher cohomology sheaf has generic rank zero."""
    return all(h == 0 for h in R.h[1:])


def _common_chart(a: ResolvedLeaf, b: ResolvedLeaf, g: RingMap) -> Optional[Tuple[Chart, RingMap, RingMap]]:
    P, ia, ib = product_chart(a.chart, b.chart)
    through_b = compose(b.map, g)
    rels = list(P.relations)
    for x, y in zip(a.map.images, through_b.images):
        d = ia.apply(x) - ib.apply(y)
        if d:
            rels.append(d)
    e = Poly.one(P.nvars)
    for _, x in P.exceptionals:
        e = e * x
    I = saturate(Ideal(rels, P.nvars), e) if rels else Ideal([], P.nvars)
    basis = I.groebner(P.order)
    if len(basis) == 1 and basis[0].is_constant():
        return None
    chart = Chart.make(P.vars, basis, P.exceptionals, P.order, f"{a.chart.name}|{b.chart.name}")
    ia = RingMap.make(a.chart, chart, ia.images, check=False)
    ib = RingMap.make(b.chart, chart, ib.images, check=False)
    return chart, ia, ib


def _same_span(chart: Chart, cert: DiagCert, K: Sequence[Sequence[Poly]], K2: Sequence[Sequence[Poly]], p: int) -> bool:
    if len(K) != len(K2):
        return False
    if not K:
        return True
    m = cert.rank
    cols = tuple(tuple(v[r] for v in K2) for r in range(p))
    coords = matmul(chart, cert.V_inv, cols, p)
    if any(e for row in coords[:m] for e in row):
        return False
    T = coords[m:]
    if matmul(chart, cert.V, coords, p) != tuple(tuple(chart.reduce(e) for e in r) for r in cols):
        return False
    return chart.is_unit(determinant(chart, T))


def base_change_verify(R: ResolutionResult, g: RingMap, R2: ResolutionResult) -> bool:
    """Compare the free kernels of ``R`` and of ``R2`` (a resolution over the target of ``g``).

    Every pair of leaves whose common refinement is nonempty must carry kernel
    bases spanning the same free module there.
    """
    if not g.source.same_ring(R.root.chart) or not g.target.same_ring(R2.root.chart):
        raise ContextMismatch("map does not connect the two resolutions")
    if R.h[0] != R2.h[0]:
        return False
    p = R.root.ranks[0]
    found = False
    for a in R.leaves:
        for b in R2.leaves:
            common = _common_chart(a, b, g)
            if common is None:
                continue
            found = True
            chart, ia, ib = common
            cert = pullback_cert(a.certs[0], ia)
            K = [tuple(ia.apply(x) for x in v) for v in a.kernel.vectors]
            K2 = [tuple(ib.apply(x) for x in v) for v in b.kernel.vectors]
            if not _same_span(chart, cert, K, K2, p):
                return False
    if not found:
        raise NoCommonLeaf("no pair of leaves has a nonempty common refinement")
    return True
