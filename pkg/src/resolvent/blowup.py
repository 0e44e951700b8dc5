"""Blowups of charts along ideals and the iterated determinantal tower."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .charts import Chart, RingMap, compose
from .diagonalize import DiagCert, Reducer
from .errors import DepthExceeded, NotPrincipal, UndecidedPrincipality, ZeroCenter
from .ideals import Ideal, saturate
from .matrices import MatrixHom, pullback_hom
from .polys import Poly, exact_quotient, poly_gcd_list


@dataclass(frozen=True, eq=False)
class BlowupChild:
    chart: Chart
    map: RingMap
    exceptional: Poly


@dataclass(frozen=True, eq=False)
class BlowupStep:
    parent: Chart
    center: Ideal
    generators: Tuple[Poly, ...]
    children: Tuple[BlowupChild, ...]
    label: str
    depth: int = 0

    @property
    def trivial(self) -> bool:
        return len(self.children) == 1 and self.children[0].chart is self.parent

    def to_json(self) -> dict:
        fmt = self.parent.fmt
        return {
            "chart": self.parent.name,
            "label": self.label,
            "depth": self.depth,
            "center": [fmt(g) for g in self.generators],
            "children": [c.chart.name for c in self.children],
        }


@dataclass(frozen=True, eq=False)
class Leaf:
    chart: Chart
    map: RingMap
    depth: int
    cert: Optional[DiagCert] = None
    phi: Optional[MatrixHom] = None
    key: Tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class BlowupTower:
    root: Chart
    steps: Tuple[BlowupStep, ...]
    leaves: Tuple[Leaf, ...]

    @property
    def blowups(self) -> int:
        return len(self.steps)

    @property
    def depth(self) -> int:
        return max((l.depth for l in self.leaves), default=0)

    def exceptional_labels(self) -> List[str]:
        return [s.label for s in self.steps]


def prune_generators(chart: Chart, gens: Sequence[Poly], permutation: int = 0) -> List[Poly]:
    """A minimal generating subset, in canonical order rotated by ``permutation``."""
    seen = {}
    for g in gens:
        g = chart.reduce(g)
        if g:
            g = g.monic(chart.order)
            seen.setdefault(chart.fmt(g), g)
    ordered = [seen[k] for k in sorted(seen)]
    if ordered and permutation:
        k = permutation % len(ordered)
        ordered = ordered[k:] + ordered[:k]
    kept = list(ordered)
    for g in reversed(ordered):
        others = [h for h in kept if h is not g]
        if others and chart.ideal(others).contains(g):
            kept = others
    return kept


def _fresh_names(chart: Chart, gens: Sequence[Poly], i: int, tag: str) -> List[str]:
    taken = set(chart.vars)
    names = []
    for j, g in enumerate(gens):
        if j == i:
            continue
        vs = g.variables()
        if len(g.terms) == 1 and g.total_degree() == 1 and len(vs) == 1:
            base = f"{chart.vars[next(iter(vs))]}_{tag}"
        else:
            base = f"u{j + 1}_{tag}"
        name = base
        while name in taken:
            name += "_"
        taken.add(name)
        names.append(name)
    return names


def _linear_solve(rels: List[Poly], order_vars: Sequence[int]):
    """Eliminate variables that occur in some relation only as ``c*v`` with ``c`` constant.

    Returns the remaining relations and a dict ``var -> expression``.
    """
    solved = {}
    rels = [r for r in rels if r]
    progress = True
    while progress:
        progress = False
        for v in order_vars:
            if v in solved:
                continue
            for r in rels:
                if r.degree_in(v) != 1:
                    continue
                parts = r.coefficients_in(v)
                c = parts[1]
                if not c.is_constant():
                    continue
                expr = -(parts.get(0, Poly.zero(r.nvars))).scale(1 / c.constant_value())
                n = r.nvars
                images = [Poly.var(n, k) for k in range(n)]
                images[v] = expr
                rels = [s.substitute(images) for s in rels if s is not r]
                rels = [s for s in rels if s]
                for k in solved:
                    solved[k] = solved[k].substitute(images)
                solved[v] = expr
                progress = True
                break
    return rels, solved


def _rees_chart(chart: Chart, gens: Sequence[Poly], i: int, label: str, tag: str) -> BlowupChild:
    n = chart.nvars
    k = len(gens)
    new_names = _fresh_names(chart, gens, i, tag)
    N = n + k - 1
    base = list(range(n))
    rels = [r.embed(base, N) for r in chart.relations]
    gi = gens[i].embed(base, N)
    slot = n
    for j, g in enumerate(gens):
        if j == i:
            continue
        rels.append(gi * Poly.var(N, slot) - g.embed(base, N))
        slot += 1
    rels, solved = _linear_solve(rels, list(range(N)))
    keep = [v for v in range(N) if v not in solved]
    pos = {v: a for a, v in enumerate(keep)}
    M = len(keep)
    base_images = [Poly.var(M, pos[v]) if v in pos else Poly.zero(M) for v in range(N)]
    images = list(base_images)
    for v, expr in solved.items():
        images[v] = expr.substitute(base_images)
    rels = [r.substitute(images) for r in rels]
    names = [chart.vars[v] if v < n else new_names[v - n] for v in keep]
    g_img = gi.substitute(images)
    sat = saturate(Ideal(rels, M), g_img) if rels else Ideal([], M)
    rels2, solved2 = _linear_solve(list(sat.groebner()), list(range(M)))
    if solved2:
        keep2 = [v for v in range(M) if v not in solved2]
        pos2 = {v: a for a, v in enumerate(keep2)}
        M2 = len(keep2)
        im2 = [Poly.var(M2, pos2[v]) if v in pos2 else Poly.zero(M2) for v in range(M)]
        for v, expr in solved2.items():
            im2[v] = expr.substitute(im2)
        images = [p.substitute(im2) for p in images]
        rels2 = [r.substitute(im2) for r in rels2]
        names = [names[v] for v in keep2]
    else:
        rels2 = list(sat.groebner())
    exc = []
    parent_images = images[:n]
    child_name = f"{chart.name}/{label}.{i + 1}"
    for lab, e in chart.exceptionals:
        exc.append((lab, e.substitute(parent_images)))
    exc.append((label, gens[i].substitute(parent_images)))
    child = Chart.make(names, rels2, exc, chart.order, child_name)
    m = RingMap.make(chart, child, parent_images, check=False)
    return BlowupChild(child, m, child.exceptional(label))


def blowup(C: Chart, I: Ideal, label: str = "E1", permutation: int = 0, depth: int = 0) -> BlowupStep:
    """Blow up the chart ``C`` along ``I`` by Rees charts, one per pruned generator."""
    gens = prune_generators(C, I.gens, permutation)
    if not gens:
        raise ZeroCenter(f"center is zero on chart {C.name}")
    try:
        g = C.is_principal(C.ideal(gens), gens)
    except UndecidedPrincipality:
        g = None
    if g is not None:
        child = BlowupChild(C, RingMap.identity(C), g)
        return BlowupStep(C, I, (g,), (child,), label, depth)
    tag = label[1:] if label.startswith("E") else label
    children = tuple(_rees_chart(C, gens, i, label, tag) for i in range(len(gens)))
    return BlowupStep(C, I, tuple(gens), children, label, depth)


def _strip_common_factor(chart: Chart, I: Ideal):
    """Split off the gcd of the generators; a principal factor does not change the blowup."""
    one = Poly.one(chart.nvars)
    if chart.relations:
        return I, one
    gens = [g for g in I.gens if g]
    g = poly_gcd_list(gens, chart.nvars)
    if g.is_constant():
        return I, one
    return Ideal([exact_quotient(f, g) for f in gens], chart.nvars), g


def determinantal_tower(
    C: Chart,
    phi: MatrixHom,
    max_depth: int = 8,
    permutation: int = 0,
    seed: int = 0,
    label_start: int = 1,
    base_depth: int = 0,
) -> BlowupTower:
    """Blow up until every stage ideal of ``phi`` is principal; diagonalize every leaf.

    At each stage the center is the entry ideal of the deflated residual block.
    Leaves come back in tree order with certificates attached.
    """
    if not phi.chart.same_ring(C):
        phi = MatrixHom(C, phi.rows, phi.cols, phi.entries)
    queue = deque([(Reducer(phi, seed), RingMap.identity(C), base_depth, ())])
    steps: List[BlowupStep] = []
    leaves: List[Leaf] = []
    counter = label_start
    while queue:
        red, m, depth, key = queue.popleft()
        try:
            red.run()
        except NotPrincipal as exc:
            if depth >= max_depth:
                raise DepthExceeded(
                    f"blowup depth {depth} reached on chart {red.chart.name}", chart=red.chart.name
                ) from None
            label = f"E{counter}"
            counter += 1
            center, factor = _strip_common_factor(red.chart, exc.ideal)
            step = blowup(red.chart, center, label, permutation, depth)
            steps.append(step)
            for idx, child in enumerate(step.children):
                hint = child.chart.reduce(child.map.apply(factor) * child.exceptional)
                nxt = red.pullback(child.map, hint)
                queue.append((nxt, compose(child.map, m), depth + 1, key + (idx,)))
            continue
        leaf_phi = pullback_hom(m, phi)
        leaves.append(Leaf(red.chart, m, depth, red.certificate(), leaf_phi, key))
    leaves.sort(key=lambda l: l.key)
    return BlowupTower(C, tuple(steps), tuple(leaves))


def tower_leaf_maps(T: BlowupTower) -> List[RingMap]:
    return [l.map for l in T.leaves]
