"""Matrices over charts: homomorphisms of free modules and complexes of them.

Entry ``(j, i)`` of a :class:`MatrixHom` is the ``j``-th coordinate of the image
of the ``i``-th source basis vector, so a map ``O^p -> O^q`` is a ``q x p``
matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .charts import Chart, RingMap, pull_ideal
from .errors import ContextMismatch, InvalidArgument, MatrixTooLarge, PointOffChart
from .ideals import Ideal, block_order, _cached_basis, ideal_equal
from .polys import Poly

MAX_MINOR_SIZE = 6

Rows = Tuple[Tuple[Poly, ...], ...]


@dataclass(frozen=True, eq=False)
class MatrixHom:
    chart: Chart
    rows: int
    cols: int
    entries: Rows

    @classmethod
    def make(cls, chart: Chart, entries: Sequence[Sequence], rows: int = None, cols: int = None) -> "MatrixHom":
        entries = [list(r) for r in entries]
        q = len(entries) if rows is None else rows
        p = (len(entries[0]) if entries else 0) if cols is None else cols
        if len(entries) != q or any(len(r) != p for r in entries):
            raise InvalidArgument(f"matrix is not {q}x{p}")
        out = tuple(
            tuple(chart.parse(e) if isinstance(e, str) else chart.reduce(_as_poly(e, chart)) for e in r)
            for r in entries
        )
        return cls(chart, q, p, out)

    @classmethod
    def zero(cls, chart: Chart, rows: int, cols: int) -> "MatrixHom":
        z = Poly.zero(chart.nvars)
        return cls(chart, rows, cols, tuple(tuple(z for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, chart: Chart, n: int) -> "MatrixHom":
        return cls(chart, n, n, tuple(tuple(_const(chart, int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def shape(self):
        return self.rows, self.cols

    def entry(self, j: int, i: int) -> Poly:
        return self.entries[j][i]

    def column(self, i: int) -> Tuple[Poly, ...]:
        return tuple(r[i] for r in self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def same(self, other: "MatrixHom") -> bool:
        return (
            self.chart.same_ring(other.chart)
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def to_json(self):
        return [[self.chart.fmt(e) for e in r] for r in self.entries]

    def __matmul__(self, other: "MatrixHom") -> "MatrixHom":
        if not self.chart.same_ring(other.chart):
            raise ContextMismatch("matrices over different charts")
        if self.cols != other.rows:
            raise InvalidArgument(f"cannot multiply {self.shape} by {other.shape}")
        return MatrixHom(self.chart, self.rows, other.cols, matmul(self.chart, self.entries, other.entries, self.cols))


def _const(chart, c):
    return Poly.constant(chart.nvars, c)


def _as_poly(e, chart):
    if isinstance(e, Poly):
        return e
    return _const(chart, e)


def matmul(chart: Chart, A, B, inner: int) -> Rows:
    cols = len(B[0]) if B else 0
    zero = Poly.zero(chart.nvars)
    out = []
    for row in A:
        new = []
        for k in range(cols):
            acc = zero
            for t in range(inner):
                a = row[t]
                if a:
                    b = B[t][k]
                    if b:
                        acc = acc + a * b
            new.append(chart.reduce(acc))
        out.append(tuple(new))
    return tuple(out)


def determinant(chart: Chart, M: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant by Laplace expansion memoized over column subsets."""
    n = len(M)
    if n == 0:
        return _const(chart, 1)
    memo: Dict[Tuple[int, ...], Poly] = {}

    def det(row, cols):
        if row == n:
            return _const(chart, 1)
        got = memo.get(cols)
        if got is not None:
            return got
        total = Poly.zero(chart.nvars)
        for k, c in enumerate(cols):
            a = M[row][c]
            if a:
                sub = det(row + 1, cols[:k] + cols[k + 1:])
                if sub:
                    term = a * sub
                    total = total - term if k % 2 else total + term
        total = chart.reduce(total)
        memo[cols] = total
        return total

    return det(0, tuple(range(n)))


def all_minors(phi: MatrixHom, size: int) -> List[Poly]:
    """All ``size x size`` minors, reduced modulo the chart relations."""
    if size > MAX_MINOR_SIZE:
        raise MatrixTooLarge(f"minors of size {size} exceed the supported {MAX_MINOR_SIZE}")
    q, p = phi.shape
    if size > min(q, p):
        return []
    chart = phi.chart
    out = []
    for rs in combinations(range(q), size):
        for cs in combinations(range(p), size):
            out.append(determinant(chart, [[phi.entries[r][c] for c in cs] for r in rs]))
    return out


def determinantal_ideal(phi: MatrixHom, r: int) -> Ideal:
    """Ideal generated by all ``(r+1)``-minors plus the chart relations."""
    if r < 0:
        raise InvalidArgument("r must be non-negative")
    chart = phi.chart
    seen = {}
    for m in all_minors(phi, r + 1):
        if m:
            m = m.monic(chart.order)
            seen.setdefault(chart.fmt(m), m)
    gens = [seen[k] for k in sorted(seen)]
    return chart.ideal(gens)


def image_rank(phi: MatrixHom) -> int:
    """Generic rank: the largest ``r`` with a nonzero ``r``-minor on the chart."""
    rank = 0
    for size in range(1, min(phi.shape) + 1):
        if any(m for m in all_minors(phi, size)):
            rank = size
        else:
            break
    return rank


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        pv = M[rank][c]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / pv
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def check_point(chart: Chart, point: Sequence) -> List[Fraction]:
    if len(point) != chart.nvars:
        raise PointOffChart(f"point needs {chart.nvars} coordinates")
    point = [Fraction(x) for x in point]
    for rel in chart.relations:
        if rel.evaluate(point) != 0:
            raise PointOffChart(f"relation {chart.fmt(rel)} does not vanish at the point")
    return point


def is_regular_point(phi: MatrixHom, point: Sequence) -> bool:
    point = check_point(phi.chart, point)
    values = [[e.evaluate(point) for e in r] for r in phi.entries]
    return rational_rank(values) == image_rank(phi)


def pullback_hom(m: RingMap, phi: MatrixHom) -> MatrixHom:
    if not phi.chart.same_ring(m.source):
        raise ContextMismatch(f"matrix lives on {phi.chart.name}, map starts at {m.source.name}")
    return MatrixHom(m.target, phi.rows, phi.cols, tuple(tuple(m.apply(e) for e in r) for r in phi.entries))


def direct_sum(a: MatrixHom, b: MatrixHom) -> MatrixHom:
    if not a.chart.same_ring(b.chart):
        raise ContextMismatch("direct sum of matrices over different charts")
    z = Poly.zero(a.chart.nvars)
    rows = []
    for r in a.entries:
        rows.append(tuple(r) + (z,) * b.cols)
    for r in b.entries:
        rows.append((z,) * a.cols + tuple(r))
    return MatrixHom(a.chart, a.rows + b.rows, a.cols + b.cols, tuple(rows))


def base_change_check(m: RingMap, phi: MatrixHom, r: int) -> bool:
    """Whether the determinantal ideal of the pullback equals the pulled-back ideal."""
    left = determinantal_ideal(pullback_hom(m, phi), r)
    right = pull_ideal(m, determinantal_ideal(phi, r))
    return ideal_equal(left, right)


@dataclass(frozen=True, eq=False)
class ComplexOnChart:
    """``F_0 -> F_1 -> ... -> F_n`` given by the maps ``terms[i]: F_i -> F_{i+1}``."""

    terms: Tuple[MatrixHom, ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidArgument("a complex needs at least one map")
        chart = self.terms[0].chart
        for a, b in zip(self.terms, self.terms[1:]):
            if not b.chart.same_ring(chart):
                raise ContextMismatch("complex maps over different charts")
            if a.rows != b.cols:
                raise InvalidArgument("consecutive maps have mismatched ranks")
            if not (b @ a).is_zero():
                raise InvalidArgument("consecutive composite is not zero")

    @property
    def chart(self) -> Chart:
        return self.terms[0].chart

    @property
    def ranks(self) -> List[int]:
        return [t.cols for t in self.terms] + [self.terms[-1].rows]

    def pullback(self, m: RingMap) -> "ComplexOnChart":
        return ComplexOnChart(tuple(pullback_hom(m, t) for t in self.terms))

    def direct_sum(self, other: "ComplexOnChart") -> "ComplexOnChart":
        if len(other.terms) != len(self.terms):
            raise InvalidArgument("complexes of different lengths")
        return ComplexOnChart(tuple(direct_sum(a, b) for a, b in zip(self.terms, other.terms)))


def kernel_module(phi: MatrixHom) -> List[Tuple[Poly, ...]]:
    """Generators of the kernel (syzygy) module of ``phi``.

    The module is encoded in an auxiliary polynomial ring with one variable per
    target slot (eliminated first) and one per source slot; products of two
    auxiliary variables are killed, so only linear expressions survive.
    """
    chart = phi.chart
    q, p = phi.shape
    n = chart.nvars
    if p == 0:
        return []
    N = q + n + p
    E = list(range(q))
    X = list(range(q, q + n))
    F = list(range(q + n, N))
    gens = []
    for i in range(p):
        g = Poly.var(N, F[i])
        for j in range(q):
            e = phi.entries[j][i]
            if e:
                g = g + e.embed(X, N) * Poly.var(N, E[j])
        gens.append(g)
    for rel in chart.relations:
        r = rel.embed(X, N)
        for v in E + F:
            gens.append(r * Poly.var(N, v))
    extra = E + F
    for a in range(len(extra)):
        for b in range(a, len(extra)):
            gens.append(Poly.var(N, extra[a]) * Poly.var(N, extra[b]))
    basis = _cached_basis(tuple(gens), block_order(q))
    out = []
    for b in basis:
        if any(m[v] for m in b.terms for v in E):
            continue
        if any(sum(m[v] for v in F) != 1 for m in b.terms):
            continue
        col = [Poly.zero(n)] * p
        for m, c in b.terms.items():
            i = next(k for k in range(p) if m[F[k]])
            col[i] = col[i] + Poly.monomial(tuple(m[x] for x in X), c)
        out.append(tuple(chart.reduce(c) for c in col))
    return out


def kernel_fiber_dimension(phi: MatrixHom, point: Sequence) -> int:
    """``dim_k (ker phi) (x) k(point)``: the number of local generators of the kernel."""
    point = check_point(phi.chart, point)
    gens = kernel_module(phi)
    if not gens:
        return 0
    S = MatrixHom(phi.chart, phi.cols, len(gens), tuple(tuple(g[i] for g in gens) for i in range(phi.cols)))
    relations = kernel_module(S)
    if not relations:
        return len(gens)
    values = [[rel[k].evaluate(point) for rel in relations] for k in range(len(gens))]
    return len(gens) - rational_rank(values)
