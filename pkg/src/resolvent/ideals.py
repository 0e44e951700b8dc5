"""Gröbner bases and the ideal operations built on them.

Buchberger's algorithm runs with sugar/normal pair selection and the
Gebauer-Möller installation of both Buchberger criteria.  It can optionally
track, for each basis element, cofactors expressing it in terms of a prefix of
the input generators; membership certificates and quotients in chart rings are
read off from those cofactors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ContextMismatch, UndecidedPrincipality
from .polys import (
    GREVLEX,
    MonomialOrder,
    Poly,
    block_order,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    poly_gcd_list,
)


class _Elem:
    __slots__ = ("poly", "lm", "lc", "cof", "sugar")

    def __init__(self, poly, order, cof, sugar):
        self.poly = poly
        self.lm, self.lc = poly.lead(order)
        self.cof = cof
        self.sugar = sugar


def _combine(cof, quotients, elems, nvars):
    """``cof - sum(q_k * elems[k].cof)``."""
    out = list(cof)
    for k, q in quotients.items():
        qp = Poly._raw(nvars, q)
        for t, c in enumerate(elems[k].cof):
            if c:
                out[t] = out[t] - qp * c
    return tuple(out)


def _reduce(poly, cof, elems, active, order, full=True):
    """Reduce ``poly`` by ``elems[active]``; returns (remainder, remainder cofactors)."""
    key = order.key
    p = dict(poly.terms)
    rem = {}
    quot = {} if cof is not None else None
    while p:
        m = max(p, key=key)
        c = p[m]
        for k in active:
            e = elems[k]
            if mono_divides(e.lm, m):
                qm = mono_div(m, e.lm)
                qc = c / e.lc
                if quot is not None:
                    qk = quot.setdefault(k, {})
                    qk[qm] = qk.get(qm, 0) + qc
                for dm, dc in e.poly.terms.items():
                    t = mono_mul(dm, qm)
                    v = p.get(t, 0) - qc * dc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            if not full:
                rem.update(p)
                break
            rem[m] = c
            del p[m]
    r = Poly._raw(poly.nvars, rem)
    if quot is None:
        return r, None
    return r, _combine(cof, {k: {m: v for m, v in q.items() if v} for k, q in quot.items()}, elems, poly.nvars)


def _update(elems, G, B, ih):
    """Gebauer-Möller update of basis index set ``G`` and pair set ``B``."""
    mh = elems[ih].lm
    C = set(G)
    D = set()
    while C:
        ig = C.pop()
        mg = elems[ig].lm
        lcm_hg = mono_lcm(mh, mg)

        def lcm_divides(ip):
            return mono_divides(mono_lcm(mh, elems[ip].lm), lcm_hg)

        if mono_mul(mh, mg) == lcm_hg or (
            not any(lcm_divides(ipx) for ipx in C) and not any(lcm_divides(pr[1]) for pr in D)
        ):
            D.add((ih, ig))
    E = set()
    for ih_, ig in D:
        mg = elems[ig].lm
        if mono_mul(mh, mg) != mono_lcm(mh, mg):
            E.add((ih_, ig))
    B_new = set()
    for ig1, ig2 in B:
        mg1, mg2 = elems[ig1].lm, elems[ig2].lm
        lcm12 = mono_lcm(mg1, mg2)
        if (
            not mono_divides(mh, lcm12)
            or mono_lcm(mg1, mh) == lcm12
            or mono_lcm(mg2, mh) == lcm12
        ):
            B_new.add((ig1, ig2))
    B_new |= E
    G_new = {ig for ig in G if not mono_divides(mh, elems[ig].lm)}
    G_new.add(ih)
    return G_new, B_new


def _scale_elem(poly, cof, order):
    c = poly.lc(order)
    if c == 1:
        return poly, cof
    inv = 1 / c
    return poly.scale(inv), (tuple(x.scale(inv) for x in cof) if cof is not None else None)


def _buchberger(gens: Sequence[Poly], order: MonomialOrder, ntrack: int):
    """Reduced Gröbner basis of ``gens``.

    Returns ``(basis, cofactors)``; ``cofactors[k][i]`` is the coefficient of
    ``gens[i]`` (``i < ntrack``) in ``basis[k]``, modulo the untracked generators.
    ``cofactors`` is None when ``ntrack`` is 0.
    """
    if not gens:
        return (), (() if ntrack else None)
    n = gens[0].nvars
    zero = Poly.zero(n)
    track = ntrack > 0

    seeds = []
    for i, g in enumerate(gens):
        if g.nvars != n:
            raise ContextMismatch("generators from different rings")
        if g.is_zero():
            continue
        cof = None
        if track:
            cof = tuple(Poly.one(n) if t == i else zero for t in range(ntrack))
        seeds.append((g, cof))
    if not seeds:
        return (), (() if track else None)

    elems: List[_Elem] = []
    G: set = set()
    B: set = set()

    def unit_result(cof):
        return (Poly.one(n),), ((cof,) if track else None)

    seeds.sort(key=lambda s: order.key(s[0].lm(order)))
    for g, cof in seeds:
        active = sorted(G)
        r, rcof = _reduce(g, cof, elems, active, order)
        if r.is_zero():
            continue
        r, rcof = _scale_elem(r, rcof, order)
        if r.is_constant():
            return unit_result(rcof)
        elems.append(_Elem(r, order, rcof, r.total_degree()))
        G, B = _update(elems, G, B, len(elems) - 1)

    key = order.key
    while B:
        def pair_key(pr):
            a, b = elems[pr[0]], elems[pr[1]]
            lcm = mono_lcm(a.lm, b.lm)
            d = sum(lcm)
            sugar = max(a.sugar + d - sum(a.lm), b.sugar + d - sum(b.lm))
            return (sugar, key(lcm), pr)

        pr = min(B, key=pair_key)
        B.discard(pr)
        a, b = elems[pr[0]], elems[pr[1]]
        lcm = mono_lcm(a.lm, b.lm)
        ma, mb = mono_div(lcm, a.lm), mono_div(lcm, b.lm)
        ca, cb = 1 / a.lc, 1 / b.lc
        s = a.poly.mul_term(ma, ca) - b.poly.mul_term(mb, cb)
        scof = None
        if track:
            pa, pb = Poly.monomial(ma, ca), Poly.monomial(mb, cb)
            scof = tuple(pa * x - pb * y for x, y in zip(a.cof, b.cof))
        d = sum(lcm)
        sugar = max(a.sugar + d - sum(a.lm), b.sugar + d - sum(b.lm))
        r, rcof = _reduce(s, scof, elems, sorted(G), order)
        if r.is_zero():
            continue
        r, rcof = _scale_elem(r, rcof, order)
        if r.is_constant():
            return unit_result(rcof)
        elems.append(_Elem(r, order, rcof, sugar))
        G, B = _update(elems, G, B, len(elems) - 1)

    # minimalize, then inter-reduce tails
    idx = sorted(G)
    minimal = [
        k for k in idx
        if not any(j != k and mono_divides(elems[j].lm, elems[k].lm) for j in idx)
    ]
    final = []
    for k in minimal:
        others = [j for j in minimal if j != k]
        r, rcof = _reduce(elems[k].poly, elems[k].cof, elems, others, order)
        r, rcof = _scale_elem(r, rcof, order)
        final.append((r, rcof))
    final.sort(key=lambda t: key(t[0].lm(order)), reverse=True)
    basis = tuple(p for p, _ in final)
    cofs = tuple(c for _, c in final) if track else None
    return basis, cofs


@lru_cache(maxsize=4096)
def _cached_basis(gens: Tuple[Poly, ...], order: MonomialOrder):
    return _buchberger(gens, order, 0)[0]


@lru_cache(maxsize=2048)
def _cached_tracked(gens: Tuple[Poly, ...], ntrack: int, order: MonomialOrder):
    return _buchberger(gens, order, ntrack)


def normal_form(f: Poly, basis: Sequence[Poly], order: MonomialOrder = GREVLEX) -> Poly:
    """Remainder of ``f`` modulo a Gröbner basis."""
    if not basis or f.is_zero():
        return f
    elems = [_Elem(b, order, None, 0) for b in basis]
    return _reduce(f, None, elems, range(len(elems)), order)[0]


def lift(f: Poly, gens: Sequence[Poly], relations: Sequence[Poly] = (), order: MonomialOrder = GREVLEX):
    """Cofactors ``c`` with ``f == sum(c_i * gens_i)`` modulo ``relations``, or None.

    The relations are not tracked; the identity holds exactly once their
    multiples are added back.
    """
    gens = tuple(gens)
    rels = tuple(relations)
    n = f.nvars
    if not gens:
        return () if normal_form(f, _cached_basis(rels, order) if rels else (), order).is_zero() else None
    basis, cofs = _cached_tracked(gens + rels, len(gens), order)
    elems = [_Elem(b, order, c, 0) for b, c in zip(basis, cofs)]
    zero = tuple(Poly.zero(n) for _ in gens)
    r, rcof = _reduce(f, zero, elems, range(len(elems)), order)
    if not r.is_zero():
        return None
    return tuple(-c for c in rcof)


@dataclass(frozen=True)
class MembershipCertificate:
    cofactors: Tuple[Poly, ...]

    def reconstruct(self, gens: Sequence[Poly]) -> Poly:
        total = Poly.zero(gens[0].nvars)
        for c, g in zip(self.cofactors, gens):
            total = total + c * g
        return total


class Ideal:
    """An ideal given by generators; Gröbner bases are cached per monomial order."""

    __slots__ = ("nvars", "gens", "_bases")

    def __init__(self, gens: Iterable[Poly], nvars: Optional[int] = None):
        gens = tuple(gens)
        if nvars is None:
            if not gens:
                raise ContextMismatch("cannot infer the ring of an empty generator list")
            nvars = gens[0].nvars
        for g in gens:
            if g.nvars != nvars:
                raise ContextMismatch("generators from different rings")
        self.nvars = nvars
        self.gens = gens
        self._bases = {}

    def groebner(self, order: MonomialOrder = GREVLEX) -> Tuple[Poly, ...]:
        basis = self._bases.get(order)
        if basis is None:
            basis = _cached_basis(tuple(g for g in self.gens if g), order)
            self._bases.setdefault(order, basis)
        return basis

    def reduce(self, f: Poly, order: MonomialOrder = GREVLEX) -> Poly:
        if f.nvars != self.nvars:
            raise ContextMismatch("polynomial and ideal live in different rings")
        return normal_form(f, self.groebner(order), order)

    def contains(self, f: Poly) -> bool:
        return self.reduce(f).is_zero()

    def is_zero(self) -> bool:
        return not self.groebner()

    def is_unit(self) -> bool:
        basis = self.groebner()
        return len(basis) == 1 and basis[0].is_constant()

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.nvars != self.nvars:
            raise ContextMismatch("ideals in different rings")
        return Ideal(self.gens + other.gens, self.nvars)

    def __mul__(self, other: "Ideal") -> "Ideal":
        if other.nvars != self.nvars:
            raise ContextMismatch("ideals in different rings")
        return Ideal([a * b for a in self.gens for b in other.gens], self.nvars)

    def __repr__(self):
        return f"Ideal({list(self.gens)!r})"


def groebner(I: Ideal, order: MonomialOrder = GREVLEX) -> Ideal:
    """A new ideal whose generators are the reduced Gröbner basis of ``I``."""
    basis = I.groebner(order)
    J = Ideal(basis, I.nvars)
    J._bases[order] = basis
    return J


def member(f: Poly, I: Ideal) -> Optional[MembershipCertificate]:
    """Certificate that ``f`` lies in ``I`` (cofactors on ``I.gens``), or None."""
    if f.nvars != I.nvars:
        raise ContextMismatch("polynomial and ideal live in different rings")
    if not I.gens:
        return MembershipCertificate(()) if f.is_zero() else None
    cof = lift(f, I.gens)
    return None if cof is None else MembershipCertificate(cof)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    if I.nvars != J.nvars:
        raise ContextMismatch("ideals in different rings")
    return I.groebner() == J.groebner()


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """True when ``J`` is contained in ``I``."""
    return all(I.contains(g) for g in J.gens)


def eliminate(I: Ideal, keep: Iterable[int]) -> Ideal:
    """``I`` intersected with the subring generated by the variables ``keep``."""
    n = I.nvars
    keep = sorted(set(keep))
    drop = [i for i in range(n) if i not in keep]
    if not drop:
        return Ideal(I.groebner(), n)
    perm = drop + keep
    pos = [0] * n
    for new, old in enumerate(perm):
        pos[old] = new
    moved = [g.embed(pos, n) for g in I.gens]
    order = block_order(len(drop))
    basis = _cached_basis(tuple(g for g in moved if g), order)
    inverse = list(perm)
    kept = [b.embed(inverse, n) for b in basis if not any(b.degree_in(i) > 0 for i in range(len(drop)))]
    return Ideal(kept, n)


def saturate(I: Ideal, g: Poly) -> Ideal:
    """``I : g^infinity`` via an auxiliary inverse variable."""
    n = I.nvars
    if g.is_zero():
        raise ValueError("cannot saturate by zero")
    if g.is_constant():
        return Ideal(I.groebner(), n)
    shift = list(range(1, n + 1))
    gens = [h.embed(shift, n + 1) for h in I.gens]
    T = Poly.var(n + 1, 0)
    gens.append(Poly.one(n + 1) - T * g.embed(shift, n + 1))
    basis = _cached_basis(tuple(x for x in gens if x), block_order(1))
    back = [b for b in basis if b.degree_in(0) <= 0]
    return Ideal([Poly._raw(n, {m[1:]: c for m, c in b.terms.items()}) for b in back], n)


def _canon_key(p: Poly):
    return (p.total_degree(), len(p.terms), sorted((GREVLEX.key(m), c) for m, c in p.terms.items()))


def is_principal(
    I: Ideal,
    relations: Optional[Ideal] = None,
    candidates: Sequence[Poly] = (),
) -> Optional[Poly]:
    """A single generator of ``I`` (modulo ``relations``), or None when none exists.

    In a polynomial ring (no relations) the gcd of the generators decides the
    question.  In a quotient ring only the gcd, the supplied ``candidates`` and
    the generators themselves are tried; failure raises UndecidedPrincipality.
    """
    n = I.nvars
    rel_basis = relations.groebner() if relations is not None else ()
    gens = []
    for g in I.gens:
        r = normal_form(g, rel_basis)
        if r and r not in gens:
            gens.append(r)
    if not gens:
        return Poly.zero(n)
    full = Ideal(tuple(gens) + tuple(rel_basis), n)
    if full.is_unit():
        return Poly.one(n)
    if not rel_basis:
        g = poly_gcd_list(gens, n)
        return g if full.contains(g) else None
    tried = []
    pool = [normal_form(c, rel_basis) for c in candidates]
    pool.append(normal_form(poly_gcd_list(gens, n), rel_basis))
    pool.extend(sorted(gens, key=_canon_key))
    for c in pool:
        if not c or c in tried:
            continue
        tried.append(c)
        if not full.contains(c):
            continue
        if all(lift(g, [c], rel_basis) is not None for g in gens):
            return c.monic()
    if _nonprincipal_witness(gens, rel_basis, n) is not None:
        return None
    raise UndecidedPrincipality(
        "no generator candidate spans the ideal in this quotient ring", ideal=I
    )


def _nonprincipal_witness(gens: Sequence[Poly], rel_basis: Sequence[Poly], n: int):
    """A small rational point where the ideal needs two or more local generators.

    By Nakayama the local generator count at ``p`` is ``dim I (x) k(p)``, read
    off from the syzygies of ``gens`` modulo the relations evaluated at ``p``.
    Any such point proves the ideal is not principal, not even locally.
    """
    from itertools import product

    from .charts import Chart
    from .matrices import MatrixHom, kernel_module, rational_rank

    grid = (0, 1, -1) if n <= 6 else (0,)
    points = [p for p in product(grid, repeat=n) if all(f.evaluate(p) == 0 for f in tuple(rel_basis) + tuple(gens))]
    if not points:
        return None
    chart = Chart.make([f"v{i}" for i in range(n)], rel_basis)
    phi = MatrixHom(chart, 1, len(gens), (tuple(gens),))
    syz = kernel_module(phi)
    for p in points:
        values = [[s[k].evaluate(p) for s in syz] for k in range(len(gens))] if syz else []
        if len(gens) - (rational_rank(values) if values else 0) >= 2:
            return p
    return None
