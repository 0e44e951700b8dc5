"""Euler numbers of two-term complexes on the projective line, the plane and its point blowups.

On the line the kernel of a graded matrix splits, and its twists come from
degree-by-degree linear algebra.  On surfaces the kernel of a surjection onto a
line bundle (after blowing up the base points) has total Chern class
``prod(1 + a_i H) / (1 + L)`` with ``L = dH - sum m_i E_i``; the multiplicities
``m_i`` are read off point-blowup charts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations as _perms
from typing import Dict, List, Optional, Sequence, Tuple

from .blowup import blowup
from .charts import Chart
from .diagonalize import diagonalize_on_chart
from .errors import (
    DegreeCapExceeded,
    InvalidArgument,
    RankDimensionMismatch,
    UnsupportedProblem,
)
from .ideals import Ideal, saturate
from .matrices import MatrixHom, image_rank, rational_rank
from .parsing import parse_poly
from .polys import Poly

P1_VARS = ("s", "t")
P2_VARS = ("x", "y", "z")


@dataclass(frozen=True)
class Geometry:
    kind: str
    points: Tuple[Tuple[Fraction, Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if self.kind not in ("P1", "P2", "BlownP2"):
            raise InvalidArgument(f"unknown geometry {self.kind!r}")
        if self.kind != "BlownP2" and self.points:
            raise InvalidArgument("only BlownP2 carries blown-up points")
        pts = []
        for p in self.points:
            if len(p) != 3 or all(Fraction(c) == 0 for c in p):
                raise InvalidArgument(f"{p} is not a point of the projective plane")
            pts.append(_normalize(p))
        if len(set(pts)) != len(pts):
            raise InvalidArgument("blown-up points must be distinct")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def dim(self) -> int:
        return 1 if self.kind == "P1" else 2

    @property
    def vars(self) -> Tuple[str, ...]:
        return P1_VARS if self.kind == "P1" else P2_VARS

    def reorder(self, perm: Sequence[int]) -> "Geometry":
        return Geometry(self.kind, tuple(self.points[i] for i in perm))


def _normalize(p):
    p = [Fraction(c) for c in p]
    k = next(i for i, c in enumerate(p) if c != 0)
    return tuple(c / p[k] for c in p)


@dataclass(frozen=True)
class DivisorClass:
    """``h H - sum e_i E_i`` is written with ``e`` holding the coefficients of ``E_i`` directly."""

    h: int
    e: Tuple[int, ...] = ()

    def _check(self, other):
        if len(self.e) != len(other.e):
            raise InvalidArgument("divisor classes on different geometries")

    def __add__(self, other):
        self._check(other)
        return DivisorClass(self.h + other.h, tuple(a + b for a, b in zip(self.e, other.e)))

    def __neg__(self):
        return DivisorClass(-self.h, tuple(-a for a in self.e))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int):
        return DivisorClass(self.h * k, tuple(a * k for a in self.e))

    __rmul__ = __mul__

    @classmethod
    def zero(cls, G: Geometry):
        return cls(0, (0,) * len(G.points))

    @classmethod
    def hyperplane(cls, G: Geometry, k: int = 1):
        return cls(k, (0,) * len(G.points))

    def to_json(self):
        return {"H": self.h, "E": list(self.e)}


def intersection_pairing(G: Geometry, D1: DivisorClass, D2: DivisorClass) -> int:
    if G.dim != 2:
        raise InvalidArgument("the intersection pairing needs a surface")
    n = len(G.points)
    if len(D1.e) != n or len(D2.e) != n:
        raise InvalidArgument("class length does not match the number of blown-up points")
    return D1.h * D2.h - sum(a * b for a, b in zip(D1.e, D2.e))


@dataclass(frozen=True)
class ChernTotal:
    """``1 + c1 + c2``, truncated at the surface dimension; ``c2`` is a degree."""

    c1: DivisorClass
    c2: int = 0

    @classmethod
    def one(cls, G: Geometry):
        return cls(DivisorClass.zero(G), 0)

    @classmethod
    def of_line(cls, D: DivisorClass):
        return cls(D, 0)

    def mul(self, other: "ChernTotal", G: Geometry) -> "ChernTotal":
        return ChernTotal(self.c1 + other.c1, self.c2 + other.c2 + intersection_pairing(G, self.c1, other.c1))

    def inverse(self, G: Geometry) -> "ChernTotal":
        return ChernTotal(-self.c1, intersection_pairing(G, self.c1, self.c1) - self.c2)

    def to_json(self):
        return {"c1": self.c1.to_json(), "c2": self.c2}


def chern_of_split(G: Geometry, classes: Sequence[DivisorClass]) -> ChernTotal:
    total = ChernTotal.one(G)
    for D in classes:
        total = total.mul(ChernTotal.of_line(D), G)
    return total


@dataclass(frozen=True, eq=False)
class GradedMatrix:
    """``sum O(a_i) -> sum O(b_j)`` with entry ``(j, i)`` homogeneous of degree ``b_j - a_i``."""

    vars: Tuple[str, ...]
    source_twists: Tuple[int, ...]
    target_twists: Tuple[int, ...]
    entries: Tuple[Tuple[Poly, ...], ...]

    def __post_init__(self):
        q, p = len(self.target_twists), len(self.source_twists)
        if len(self.entries) != q or any(len(r) != p for r in self.entries):
            raise InvalidArgument(f"graded matrix entries must be {q}x{p}")
        for j, row in enumerate(self.entries):
            for i, e in enumerate(row):
                if not e:
                    continue
                need = self.target_twists[j] - self.source_twists[i]
                if not e.is_homogeneous() or e.total_degree() != need:
                    raise InvalidArgument(f"entry ({j},{i}) must be homogeneous of degree {need}")

    @classmethod
    def make(cls, vars, source_twists, target_twists, entries) -> "GradedMatrix":
        vars = tuple(vars)
        rows = tuple(
            tuple(parse_poly(e, vars) if isinstance(e, str) else e for e in r) for r in entries
        )
        return cls(vars, tuple(int(a) for a in source_twists), tuple(int(b) for b in target_twists), rows)

    @property
    def shape(self):
        return len(self.target_twists), len(self.source_twists)

    def chart(self) -> Chart:
        return Chart.make(self.vars, name="cone")

    def rank(self) -> int:
        C = self.chart()
        return image_rank(MatrixHom(C, *self.shape, self.entries))

    def scaled(self, factors: Sequence[Fraction]) -> "GradedMatrix":
        rows = tuple(tuple(e.scale(c) for e, c in zip(r, factors)) for r in self.entries)
        return GradedMatrix(self.vars, self.source_twists, self.target_twists, rows)

    def permuted(self, perm: Sequence[int]) -> "GradedMatrix":
        rows = tuple(tuple(r[i] for i in perm) for r in self.entries)
        return GradedMatrix(self.vars, tuple(self.source_twists[i] for i in perm), self.target_twists, rows)

    def to_json(self):
        return {
            "vars": list(self.vars),
            "source_twists": list(self.source_twists),
            "target_twists": list(self.target_twists),
            "entries": [[e.to_str(self.vars) for e in r] for r in self.entries],
        }


def _nullspace(rows: List[List[Fraction]], ncols: int) -> List[List[Fraction]]:
    M = [list(r) for r in rows]
    pivots = []
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = 1 / M[rank][c]
        M[rank] = [x * inv for x in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        pivots.append(c)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -M[r][fc]
        basis.append(v)
    return basis


def splitting_type_P1(M: GradedMatrix, degree_cap: int = 40) -> List[int]:
    """Twists ``c_k`` with ``ker M = sum O(c_k)``, ascending."""
    if len(M.vars) != 2:
        raise InvalidArgument("splitting types need a matrix over the projective line")
    q, p = M.shape
    want = p - M.rank()
    if want == 0:
        return []
    a, b = M.source_twists, M.target_twists
    start = -max(a)
    twists: List[int] = []
    prev: List[List[Fraction]] = []
    prev_layout = None
    D = start
    while len(twists) < want:
        if D > degree_cap:
            raise DegreeCapExceeded(f"kernel generators beyond degree {degree_cap}")
        # unknowns: coefficient of s^(n-k) t^k in v_i, n = D + a_i
        layout = []
        for i in range(p):
            n = D + a[i]
            layout.append((sum(max(D + a[u] + 1, 0) for u in range(i)), n))
        ncols = sum(max(n + 1, 0) for _, n in layout)
        eqs = []
        for j in range(q):
            n_out = D + b[j]
            if n_out < 0:
                continue
            rows = [[Fraction(0)] * ncols for _ in range(n_out + 1)]
            for i in range(p):
                e = M.entries[j][i]
                off, n = layout[i]
                if not e or n < 0:
                    continue
                for k in range(n + 1):
                    for mono, c in e.terms.items():
                        rows[k + mono[1]][off + k] += c
            eqs.extend(rows)
        kernel = _nullspace(eqs, ncols) if ncols else []
        old = []
        if prev:
            for v in prev:
                for shift in (0, 1):
                    w = [Fraction(0)] * ncols
                    for i in range(p):
                        off0, n0 = prev_layout[i]
                        off, n = layout[i]
                        for k in range(max(n0 + 1, 0)):
                            w[off + k + shift] = v[off0 + k]
                    old.append(w)
        new = len(kernel) - (rational_rank(old) if old else 0)
        twists.extend([-D] * new)
        prev, prev_layout = kernel, layout
        D += 1
    return sorted(twists)


def _point_ideal_gens(P, k, nvars=2):
    """Linear generators of the maximal ideal of ``P`` in the affine chart ``x_k = 1``."""
    others = [i for i in range(3) if i != k]
    coords = [P[i] / P[k] for i in others]
    return [Poly.var(nvars, a) - Poly.constant(nvars, coords[a]) for a in range(2)], coords


def _dehomogenize(f: Poly, k: int) -> Poly:
    others = [i for i in range(3) if i != k]
    images = [None] * 3
    images[k] = Poly.one(2)
    for a, i in enumerate(others):
        images[i] = Poly.var(2, a)
    return f.substitute(images)


def _check_base_locus(forms: Sequence[Poly], G: Geometry) -> List[int]:
    """Indices of blown points lying in the base locus; raise when the locus escapes them."""
    base = []
    for idx, P in enumerate(G.points):
        if all(f.evaluate(P) == 0 for f in forms):
            base.append(idx)
    for k in range(3):
        I = Ideal([_dehomogenize(f, k) for f in forms], 2)
        gens = [Poly.one(2)]
        for idx in base:
            P = G.points[idx]
            if P[k] == 0:
                continue
            lin, _ = _point_ideal_gens(P, k)
            gens = [g * l for g in gens for l in lin]
        for g in gens:
            if not saturate(I, g).is_unit():
                raise UnsupportedProblem(
                    "the base locus is not contained in the blown-up points", chart=f"x{k}=1"
                )
    return base


def _separator(P, Q, k) -> Poly:
    """A linear form on the chart ``x_k = 1`` vanishing at ``Q`` but not at ``P``."""
    _, cp = _point_ideal_gens(P, k)
    _, cq = _point_ideal_gens(Q, k)
    a = 0 if cp[0] != cq[0] else 1
    return Poly.var(2, a) - Poly.constant(2, cq[a])


def point_multiplicity(forms: Sequence[Poly], G: Geometry, idx: int, base: Sequence[int], permutation: int = 0) -> int:
    """Order of vanishing of the pulled-back linear system along the exceptional curve over point ``idx``.

    Blows up the point on an affine neighbourhood that avoids the other base
    points, then counts how often the exceptional divides every generator and
    checks the residual ideal is the unit ideal (no infinitely near base points).
    """
    P = G.points[idx]
    k = next(i for i in range(3) if P[i] != 0)
    _, coords = _point_ideal_gens(P, k)
    # coordinates centred at P: X = u - a, Y = v - b, plus w inverting the separators
    shift = [Poly.var(3, 0) + Poly.constant(3, coords[0]), Poly.var(3, 1) + Poly.constant(3, coords[1])]
    sep = Poly.one(3)
    for j in base:
        Q = G.points[j]
        if j == idx or Q[k] == 0:
            continue
        sep = sep * _separator(P, Q, k).substitute(shift)
    rels = [] if sep.is_constant() else [Poly.var(3, 2) * sep - Poly.one(3)]
    if rels:
        C = Chart.make(("X", "Y", "w"), rels, name=f"p{idx + 1}")
        local = [_dehomogenize(f, k).substitute(shift) for f in forms]
    else:
        C = Chart.make(("X", "Y"), name=f"p{idx + 1}")
        two = [Poly.var(2, 0) + Poly.constant(2, coords[0]), Poly.var(2, 1) + Poly.constant(2, coords[1])]
        local = [_dehomogenize(f, k).substitute(two) for f in forms]
    center = C.ideal([C.var("X"), C.var("Y")])
    step = blowup(C, center, f"E{idx + 1}", permutation)
    mults = set()
    for child in step.children:
        ch = child.chart
        e = child.exceptional
        pulled = [child.map.apply(f) for f in local]
        m = 0
        cur = [f for f in pulled if f]
        while True:
            nxt = [ch.divide(f, e) for f in cur]
            if any(x is None for x in nxt):
                break
            cur = nxt
            m += 1
        if not ch.ideal(cur).is_unit():
            raise UnsupportedProblem(
                f"the pulled-back system still has base points over point {idx + 1}; infinitely near points are not supported"
            )
        mults.add(m)
    if len(mults) != 1:
        raise UnsupportedProblem(f"inconsistent multiplicities over point {idx + 1}")
    return mults.pop()


@dataclass(frozen=True)
class EulerResult:
    geometry: str
    value: Optional[int]
    kernel_rank: int
    twists: Tuple[int, ...] = ()
    multiplicities: Tuple[int, ...] = ()
    chern: Optional[ChernTotal] = None

    def to_json(self):
        out = {"geometry": self.geometry, "euler": self.value, "kernel_rank": self.kernel_rank}
        if self.twists:
            out["twists"] = list(self.twists)
        if self.chern is not None:
            out["multiplicities"] = list(self.multiplicities)
            out["chern"] = self.chern.to_json()
        return out


def euler_number(G: Geometry, resolved, torsion_ok: bool = True) -> int:
    """Degree of the top Chern class of the resolved kernel.

    ``resolved`` is a list of splitting twists on the line, or a ChernTotal /
    list of split DivisorClasses on a surface.
    """
    if not torsion_ok:
        raise UnsupportedProblem("higher cohomology is not torsion; the Euler class depends on more than H^0")
    if G.kind == "P1":
        twists = list(resolved)
        r = len(twists)
        if r > 1:
            return 0
        if r < 1:
            raise RankDimensionMismatch("kernel rank 0 is below the dimension 1", cycle="[P1]")
        return twists[0]
    if isinstance(resolved, ChernTotal):
        chern, r = resolved, 2
    else:
        classes = list(resolved)
        chern, r = chern_of_split(G, classes), len(classes)
    if r > 2:
        return 0
    if r < 2:
        cycle = chern.c1 if r == 1 else DivisorClass.zero(G)
        raise RankDimensionMismatch(f"kernel rank {r} is below the dimension 2", cycle=cycle)
    return chern.c2


def _surface_chern(M: GradedMatrix, G: Geometry, permutation: int = 0):
    if M.shape[0] != 1:
        raise UnsupportedProblem("surface problems must map onto a single line bundle")
    (d,) = M.target_twists
    forms = list(M.entries[0])
    base = _check_base_locus([f for f in forms if f], G)
    mults = [0] * len(G.points)
    for idx in base:
        mults[idx] = point_multiplicity(forms, G, idx, base, permutation)
    L = DivisorClass(d, tuple(-m for m in mults))
    total = ChernTotal.one(G)
    for a in M.source_twists:
        total = total.mul(ChernTotal.of_line(DivisorClass.hyperplane(G, a)), G)
    return total.mul(ChernTotal.of_line(L).inverse(G), G), tuple(mults)


def euler_of_matrix(M: GradedMatrix, G: Geometry, degree_cap: int = 40, permutation: int = 0) -> EulerResult:
    """Euler number of ``[sum O(a_i) -> sum O(b_j)]`` on ``G``."""
    if tuple(M.vars) != G.vars:
        raise InvalidArgument(f"matrix variables {M.vars} do not match geometry {G.kind} {G.vars}")
    q, p = M.shape
    m = M.rank()
    torsion = m == q
    r = p - m
    if G.kind == "P1":
        twists = splitting_type_P1(M, degree_cap)
        value = euler_number(G, twists, torsion)
        return EulerResult(G.kind, value, r, tuple(twists))
    if not torsion:
        euler_number(G, [], False)
    if r != 2:
        # kernel rank decides the answer without any class computation when r > 2
        if r > 2:
            return EulerResult(G.kind, 0, r)
        raise RankDimensionMismatch(f"kernel rank {r} is below the dimension 2")
    chern, mults = _surface_chern(M, G, permutation)
    return EulerResult(G.kind, euler_number(G, chern), r, (), mults, chern)


def p1_local_euler(M: GradedMatrix, permutation: int = 0) -> int:
    """Euler number on the line from local diagonal entries on the two affine charts.

    For a single row ``(f_i)`` into ``O(d)`` the kernel has degree
    ``sum a_i - d + deg Z`` where ``Z`` is the zero scheme of the common factor;
    its degree is read from the first diagonal entry on each chart.
    """
    q, p = M.shape
    if q != 1 or p - M.rank() != 1:
        raise UnsupportedProblem("the local route needs one row and a rank-one kernel")
    d = M.target_twists[0]
    order = list(range(p))
    if permutation:
        k = permutation % p
        order = order[k:] + order[:k]
    row = [M.entries[0][i] for i in order]
    zeros = 0
    for k in range(2):
        C = Chart.make(("u",), name=f"{M.vars[1 - k]}=1")
        images = [Poly.one(1), Poly.var(1, 0)] if k == 0 else [Poly.var(1, 0), Poly.one(1)]
        local = [f.substitute(images) for f in row]
        cert = diagonalize_on_chart(MatrixHom(C, 1, p, (tuple(local),)))
        g = cert.diag[0]
        if k == 0:
            zeros += g.total_degree()
        else:
            # only the point u = 0 is new on the second chart
            mult = 0
            while g and g.evaluate([0]) == 0:
                g = Poly._raw(1, {(e[0] - 1,): c for e, c in g.terms.items()})
                mult += 1
            zeros += mult
    return sum(M.source_twists) - d + zeros


def independence_harness(M: GradedMatrix, G: Geometry, permutations: Sequence[int] = (0, 1, 2), degree_cap: int = 40) -> bool:
    """True when every resolution order gives the same Euler number."""
    values = set()
    q, p = M.shape
    cols = [list(range(p))[k:] + list(range(p))[:k] for k in range(p)]
    for perm in permutations:
        for col in cols[:2]:
            values.add(euler_of_matrix(M.permuted(col), G, degree_cap, perm).value)
        if G.kind == "BlownP2":
            for order in list(_perms(range(len(G.points))))[:6]:
                values.add(euler_of_matrix(M, G.reorder(order), degree_cap, perm).value)
        if G.kind == "P1" and q == 1 and p - M.rank() == 1:
            values.add(p1_local_euler(M, perm))
    return len(values) == 1
