"""Affine charts, ring maps between them, and atlases.

A chart is a polynomial ring modulo a relations ideal that the caller promises
is prime.  Primality is never checked; every algorithm downstream treats the
chart ring as a domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ContextMismatch, InvalidArgument
from .ideals import Ideal, eliminate, is_principal, lift, normal_form
from .parsing import parse_poly
from .polys import GREVLEX, MonomialOrder, Poly, exact_quotient


@dataclass(frozen=True, eq=False)
class Chart:
    vars: Tuple[str, ...]
    relations: Tuple[Poly, ...] = ()
    exceptionals: Tuple[Tuple[str, Poly], ...] = ()
    order: MonomialOrder = GREVLEX
    name: str = "root"
    _rel: Ideal = field(default=None, repr=False)

    @classmethod
    def make(cls, vars, relations=(), exceptionals=(), order=GREVLEX, name="root"):
        vars = tuple(vars)
        if len(set(vars)) != len(vars):
            raise InvalidArgument("duplicate variable names")
        rels = [parse_poly(r, vars) if isinstance(r, str) else r for r in relations]
        ideal = Ideal(rels, len(vars))
        basis = ideal.groebner(order)
        if len(basis) == 1 and basis[0].is_constant():
            raise InvalidArgument("relations generate the unit ideal; the chart is empty")
        ideal = Ideal(basis, len(vars))
        ideal._bases[order] = basis
        chart = cls(vars, basis, (), order, name, ideal)
        exc = []
        for label, e in exceptionals:
            e = parse_poly(e, vars) if isinstance(e, str) else e
            e = chart.reduce(e)
            if e.is_zero():
                raise InvalidArgument(f"exceptional {label} vanishes on the chart")
            exc.append((label, e))
        object.__setattr__(chart, "exceptionals", tuple(exc))
        return chart

    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def relations_ideal(self) -> Ideal:
        return self._rel

    def is_polynomial_ring(self) -> bool:
        return not self.relations

    def same_ring(self, other: "Chart") -> bool:
        return self is other or (self.vars == other.vars and self.relations == other.relations)

    def var(self, name: str) -> Poly:
        return Poly.var(self.nvars, self.vars.index(name))

    def parse(self, text: str) -> Poly:
        return self.reduce(parse_poly(text, self.vars))

    def fmt(self, p: Poly) -> str:
        return p.to_str(self.vars, self.order)

    def reduce(self, f: Poly) -> Poly:
        if f.nvars != self.nvars:
            raise ContextMismatch(f"polynomial has {f.nvars} variables, chart {self.name} has {self.nvars}")
        if not self.relations:
            return f
        return normal_form(f, self.relations, self.order)

    def is_zero(self, f: Poly) -> bool:
        return self.reduce(f).is_zero()

    def ideal(self, gens: Iterable[Poly]) -> Ideal:
        """Ideal of the chart ring generated by ``gens`` (relations included)."""
        return Ideal(tuple(gens) + self.relations, self.nvars)

    def inverse(self, u: Poly) -> Optional[Poly]:
        """Inverse of ``u`` in the chart ring, or None when ``u`` is not a unit."""
        u = self.reduce(u)
        if u.is_zero():
            return None
        if u.is_constant():
            return Poly.constant(self.nvars, 1 / u.constant_value())
        if not self.relations:
            return None
        cof = lift(Poly.one(self.nvars), [u], self.relations, self.order)
        return None if cof is None else self.reduce(cof[0])

    def is_unit(self, u: Poly) -> bool:
        return self.inverse(u) is not None

    def divide(self, f: Poly, p: Poly) -> Optional[Poly]:
        """Some ``q`` with ``f == q * p`` in the chart ring, or None."""
        f = self.reduce(f)
        if f.is_zero():
            return f
        p = self.reduce(p)
        if p.is_zero():
            return None
        if p.is_constant():
            return f.scale(1 / p.constant_value())
        if not self.relations:
            return exact_quotient(f, p)
        cof = lift(f, [p], self.relations, self.order)
        return None if cof is None else self.reduce(cof[0])

    def is_principal(self, I: Ideal, candidates: Sequence[Poly] = ()) -> Optional[Poly]:
        g = is_principal(I, self._rel if self.relations else None, candidates)
        return None if g is None else self.reduce(g)

    def exceptional(self, label: str) -> Poly:
        for lab, e in self.exceptionals:
            if lab == label:
                return e
        raise KeyError(label)

    def with_name(self, name: str) -> "Chart":
        c = Chart(self.vars, self.relations, self.exceptionals, self.order, name, self._rel)
        return c

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vars": list(self.vars),
            "relations": [self.fmt(r) for r in self.relations],
            "exceptionals": [[lab, self.fmt(e)] for lab, e in self.exceptionals],
        }

    @classmethod
    def from_json(cls, data: dict, order: MonomialOrder = GREVLEX) -> "Chart":
        return cls.make(
            data["vars"],
            data.get("relations", ()),
            [tuple(x) for x in data.get("exceptionals", ())],
            order,
            data.get("name", "root"),
        )


def is_unit(u: Poly, chart: Chart) -> bool:
    """True when ``1`` lies in ``(u) + relations``."""
    return chart.is_unit(u)


@dataclass(frozen=True, eq=False)
class RingMap:
    """Ring homomorphism ``source ring -> target ring`` given by variable images.

    Geometrically this is a morphism from the target chart to the source chart.
    """

    source: Chart
    target: Chart
    images: Tuple[Poly, ...]

    @classmethod
    def make(cls, source: Chart, target: Chart, images: Sequence, check: bool = True) -> "RingMap":
        if len(images) != source.nvars:
            raise ContextMismatch("one image per source variable is required")
        ims = tuple(target.parse(i) if isinstance(i, str) else target.reduce(i) for i in images)
        m = cls(source, target, ims)
        if check:
            for r in source.relations:
                if not m.apply(r).is_zero():
                    raise InvalidArgument(
                        f"relation {source.fmt(r)} of {source.name} does not map into the relations of {target.name}"
                    )
        return m

    @classmethod
    def identity(cls, chart: Chart) -> "RingMap":
        return cls(chart, chart, tuple(Poly.var(chart.nvars, i) for i in range(chart.nvars)))

    def apply(self, f: Poly) -> Poly:
        if f.nvars != self.source.nvars:
            raise ContextMismatch(f"polynomial is not in the ring of {self.source.name}")
        if not self.images:
            return self.target.reduce(Poly.constant(self.target.nvars, f.constant_value()))
        return self.target.reduce(f.substitute(self.images))

    def to_json(self) -> List[str]:
        return [self.target.fmt(i) for i in self.images]


def apply_map(m: RingMap, f: Poly) -> Poly:
    return m.apply(f)


def compose(m: RingMap, n: RingMap) -> RingMap:
    """The map ``f -> m(n(f))``; requires ``n.target`` to be ``m.source``."""
    if not n.target.same_ring(m.source):
        raise ContextMismatch(f"cannot compose: {n.target.name} is not {m.source.name}")
    return RingMap(n.source, m.target, tuple(m.apply(i) for i in n.images))


def pull_ideal(m: RingMap, I: Ideal) -> Ideal:
    """Ideal of the target generated by the images of ``I`` (plus target relations)."""
    if I.nvars != m.source.nvars:
        raise ContextMismatch("ideal is not in the source ring")
    return m.target.ideal([m.apply(g) for g in I.gens])


def kernel_of_map(m: RingMap) -> Ideal:
    """Kernel of the ring map, computed by eliminating the target variables."""
    s, t = m.source.nvars, m.target.nvars
    n = s + t
    src = list(range(s))
    tgt = list(range(s, n))
    gens = []
    for i, img in enumerate(m.images):
        gens.append(Poly.var(n, i) - img.embed(tgt, n))
    gens.extend(r.embed(tgt, n) for r in m.target.relations)
    K = eliminate(Ideal(gens, n), src)
    return Ideal([Poly._raw(s, {mono[:s]: c for mono, c in g.terms.items()}) for g in K.gens], s)


def is_dominant_heuristic(m: RingMap) -> bool:
    """True when the map of chart rings is injective (kernel inside source relations)."""
    K = kernel_of_map(m)
    return all(m.source.is_zero(g) for g in K.gens)


@dataclass(frozen=True)
class Atlas:
    charts: Tuple[Chart, ...]

    def __post_init__(self):
        if not self.charts:
            raise InvalidArgument("an atlas needs at least one chart")


def product_chart(a: Chart, b: Chart, suffix: str = "_b"):
    """The product chart ``a x b`` with the two coordinate inclusions."""
    names = list(a.vars)
    for v in b.vars:
        name = v
        while name in names:
            name += suffix
        names.append(name)
    n = len(names)
    pa = list(range(a.nvars))
    pb = list(range(a.nvars, n))
    rels = [r.embed(pa, n) for r in a.relations] + [r.embed(pb, n) for r in b.relations]
    exc = [(lab, e.embed(pa, n)) for lab, e in a.exceptionals] + [(lab, e.embed(pb, n)) for lab, e in b.exceptionals]
    chart = Chart.make(names, rels, exc, a.order, f"{a.name}*{b.name}")
    ia = RingMap.make(a, chart, [Poly.var(n, i) for i in pa])
    ib = RingMap.make(b, chart, [Poly.var(n, i) for i in pb])
    return chart, ia, ib
