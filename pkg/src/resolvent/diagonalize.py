"""Factor-and-pivot diagonalization with checkable certificates.

At each stage the residual block ``B`` (with the already-split part of the
matrix equal to ``acc * B``) has its entry ideal tested for principality.  When
the ideal is ``(g)`` every entry is divided by ``g``; the quotients generate the
unit ideal, a unit entry is moved to the corner, its row and column are
cleared, and the Schur complement becomes the next residual block.  The new
diagonal entry is ``acc * g``, so consecutive entries divide each other.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .charts import Chart, RingMap
from .errors import NoUnitPivot, NotPrincipal, UndecidedPrincipality
from .ideals import Ideal, lift
from .matrices import MatrixHom, determinant, image_rank, matmul
from .polys import Poly

# random row mixes tried before giving up on a unit pivot
MIX_ATTEMPTS = 3


@dataclass(frozen=True, eq=False)
class DiagCert:
    """``U * phi * V`` is diagonal with ``diag`` leading and zeros elsewhere."""

    chart: Chart
    U: Tuple[Tuple[Poly, ...], ...]
    V: Tuple[Tuple[Poly, ...], ...]
    diag: Tuple[Poly, ...]
    U_det: Poly
    V_det: Poly
    V_inv: Optional[Tuple[Tuple[Poly, ...], ...]] = None
    mixing: Tuple[Tuple[int, int, int, int, int], ...] = ()
    seed: int = 0

    @property
    def rank(self) -> int:
        return len(self.diag)

    def to_json(self) -> dict:
        fmt = self.chart.fmt
        out = {
            "U": [[fmt(e) for e in r] for r in self.U],
            "V": [[fmt(e) for e in r] for r in self.V],
            "diag": [fmt(d) for d in self.diag],
            "U_det": fmt(self.U_det),
            "V_det": fmt(self.V_det),
            "mixing": [list(m) for m in self.mixing],
            "seed": self.seed,
        }
        if self.V_inv is not None:
            out["V_inv"] = [[fmt(e) for e in r] for r in self.V_inv]
        return out

    @classmethod
    def from_json(cls, chart: Chart, data: dict) -> "DiagCert":
        def mat(rows):
            return tuple(tuple(chart.parse(e) for e in r) for r in rows)

        return cls(
            chart,
            mat(data["U"]),
            mat(data["V"]),
            tuple(chart.parse(d) for d in data["diag"]),
            chart.parse(data["U_det"]),
            chart.parse(data["V_det"]),
            mat(data["V_inv"]) if "V_inv" in data else None,
            tuple(tuple(m) for m in data.get("mixing", ())),
            data.get("seed", 0),
        )


@dataclass(frozen=True)
class KernelBasis:
    vectors: Tuple[Tuple[Poly, ...], ...]
    rank: int


@dataclass(frozen=True)
class CertCheck:
    ok: bool
    reason: Optional[str] = None
    message: str = ""

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class Diagonalizability:
    yes: bool
    cert: Optional[DiagCert] = None
    stage: Optional[int] = None
    ideal: Optional[Ideal] = None


def _identity(chart, n):
    one, zero = Poly.one(chart.nvars), Poly.zero(chart.nvars)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


class Reducer:
    """Mutable diagonalization state for one matrix on one chart."""

    def __init__(self, phi: MatrixHom, seed: int = 0, hints: Sequence[Poly] = ()):
        chart = phi.chart
        self.chart = chart
        self.q, self.p = phi.shape
        self.U = _identity(chart, self.q)
        self.V = _identity(chart, self.p)
        self.Vinv = _identity(chart, self.p)
        self.B = [list(r) for r in phi.entries]
        self.acc = Poly.one(chart.nvars)
        self.udet = Poly.one(chart.nvars)
        self.vdet = Poly.one(chart.nvars)
        self.diag: List[Poly] = []
        self.stage_gens: List[Poly] = []
        self.mixing: List[Tuple[int, int, int, int, int]] = []
        self.seed = seed
        self.hints = list(hints)
        self.next_generator: Optional[Poly] = None
        self.done = False
        self._rng = None

    @property
    def r(self) -> int:
        return len(self.diag)

    # -- elementary operations on the residual block ---------------------

    def _red(self, f):
        return self.chart.reduce(f)

    def swap_rows(self, a, b):
        if a == b:
            return
        B, r = self.B, self.r
        B[a], B[b] = B[b], B[a]
        self.U[r + a], self.U[r + b] = self.U[r + b], self.U[r + a]
        self.udet = -self.udet

    def swap_cols(self, a, b):
        if a == b:
            return
        r = self.r
        for row in self.B:
            row[a], row[b] = row[b], row[a]
        for row in self.V:
            row[r + a], row[r + b] = row[r + b], row[r + a]
        self.Vinv[r + a], self.Vinv[r + b] = self.Vinv[r + b], self.Vinv[r + a]
        self.vdet = -self.vdet

    def scale_row(self, a, c):
        r = self.r
        self.B[a] = [self._red(c * e) for e in self.B[a]]
        self.U[r + a] = [c * e for e in self.U[r + a]]
        self.udet = self._red(self.udet * c)

    def add_row(self, target, src, c):
        """row_target += c * row_src"""
        r = self.r
        self.B[target] = [self._red(x + c * y) for x, y in zip(self.B[target], self.B[src])]
        self.U[r + target] = [x + c * y for x, y in zip(self.U[r + target], self.U[r + src])]

    def add_col(self, target, src, c):
        """col_target += c * col_src"""
        r = self.r
        for row in self.B:
            row[target] = self._red(row[target] + c * row[src])
        for row in self.V:
            row[r + target] = row[r + target] + c * row[r + src]
        self.Vinv[r + src] = [x - c * y for x, y in zip(self.Vinv[r + src], self.Vinv[r + target])]

    def transform_cols(self, j, k, t00, t01, t10, t11):
        """(col_j, col_k) <- (t00 col_j + t10 col_k, t01 col_j + t11 col_k); det must be a unit."""
        chart, r = self.chart, self.r
        det = self._red(t00 * t11 - t01 * t10)
        dinv = chart.inverse(det)
        for row in self.B:
            a, b = row[j], row[k]
            row[j] = self._red(t00 * a + t10 * b)
            row[k] = self._red(t01 * a + t11 * b)
        for row in self.V:
            a, b = row[r + j], row[r + k]
            row[r + j] = t00 * a + t10 * b
            row[r + k] = t01 * a + t11 * b
        rj, rk = self.Vinv[r + j], self.Vinv[r + k]
        self.Vinv[r + j] = [dinv * (t11 * x - t01 * y) for x, y in zip(rj, rk)]
        self.Vinv[r + k] = [dinv * (t00 * y - t10 * x) for x, y in zip(rj, rk)]
        self.vdet = self._red(self.vdet * det)

    def transform_rows(self, i, k, t00, t01, t10, t11):
        """(row_i, row_k) <- (t00 row_i + t01 row_k, t10 row_i + t11 row_k)."""
        r = self.r
        det = self._red(t00 * t11 - t01 * t10)
        a, b = self.B[i], self.B[k]
        self.B[i] = [self._red(t00 * x + t01 * y) for x, y in zip(a, b)]
        self.B[k] = [self._red(t10 * x + t11 * y) for x, y in zip(a, b)]
        a, b = self.U[r + i], self.U[r + k]
        self.U[r + i] = [t00 * x + t01 * y for x, y in zip(a, b)]
        self.U[r + k] = [t10 * x + t11 * y for x, y in zip(a, b)]
        self.udet = self._red(self.udet * det)

    # -- stage logic ------------------------------------------------------

    def residual_ideal(self) -> Ideal:
        return self.chart.ideal([e for row in self.B for e in row if e])

    def _principal_generator(self):
        chart = self.chart
        entries = [e for row in self.B for e in row if e]
        hint = self.next_generator
        self.next_generator = None
        if hint is not None:
            quotients = [chart.divide(e, hint) for e in entries]
            if all(x is not None for x in quotients):
                if any(x.is_constant() for x in quotients) or chart.ideal(quotients).is_unit():
                    return hint
        candidates = list(self.hints) + [e for _, e in chart.exceptionals]
        return chart.is_principal(self.residual_ideal(), candidates)

    def step(self, allow_undecided: bool = False) -> bool:
        """Split off one diagonal entry; returns False once the block is zero.

        Raises NotPrincipal when the residual ideal is not principal.  With
        ``allow_undecided`` an undecided quotient-ring ideal is reported the same way.
        """
        if self.done:
            return False
        if self.r >= min(self.q, self.p) or not any(e for row in self.B for e in row):
            self.done = True
            return False
        chart = self.chart
        try:
            g = self._principal_generator()
        except UndecidedPrincipality:
            if not allow_undecided:
                raise
            g = None
        if g is None:
            raise NotPrincipal(self.r, self.residual_ideal())
        if chart.is_unit(g):
            g = Poly.one(chart.nvars)
        self.B = [[chart.divide(e, g) for e in row] for row in self.B]
        i, j = self._find_pivot()
        self.swap_rows(0, i)
        self.swap_cols(0, j)
        self.scale_row(0, chart.inverse(self.B[0][0]))
        for a in range(1, len(self.B)):
            c = self.B[a][0]
            if c:
                self.add_row(a, 0, -c)
        for b in range(1, len(self.B[0])):
            c = self.B[0][b]
            if c:
                self.add_col(b, 0, -c)
        self.acc = self._red(self.acc * g)
        self.diag.append(self.acc)
        self.stage_gens.append(g)
        self.B = [row[1:] for row in self.B[1:]]
        return True

    def run(self, allow_undecided: bool = False):
        while self.step(allow_undecided):
            pass
        return self

    def _unit_position(self):
        """Constant entry with the least fill-in (Markowitz count), else any unit entry."""
        chart, B = self.chart, self.B
        rows = [sum(1 for e in r if e) for r in B]
        cols = [sum(1 for r in B if r[j]) for j in range(len(B[0]) if B else 0)]
        best = None
        for i, row in enumerate(B):
            for j, e in enumerate(row):
                if e and e.is_constant():
                    cost = (rows[i] - 1) * (cols[j] - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
        if best is not None:
            return best[1], best[2]
        if chart.relations:
            for i, row in enumerate(B):
                for j, e in enumerate(row):
                    if e and chart.is_unit(e):
                        return i, j
        return None

    def _find_pivot(self):
        for attempt in range(MIX_ATTEMPTS + 1):
            pos = self._unit_position()
            if pos is not None:
                return pos
            if self._bezout():
                pos = self._unit_position()
                if pos is not None:
                    return pos
            if self._directed_mix() and self._bezout():
                pos = self._unit_position()
                if pos is not None:
                    return pos
            if attempt == MIX_ATTEMPTS or len(self.B) < 2:
                break
            if self._rng is None:
                self._rng = random.Random(f"{self.seed}:{self.chart.name}:{self.r}")
            a, b = self._rng.sample(range(len(self.B)), 2)
            c = self._rng.randint(1, 5)
            self.add_row(a, b, Poly.constant(self.chart.nvars, c))
            self.mixing.append((self.r, 0, a, b, c))
        raise NoUnitPivot(f"no unit entry found at stage {self.r} on {self.chart.name}")

    def _directed_mix(self) -> bool:
        """Add a small multiple of one row (or column) to another so that it generates the unit ideal."""
        chart, B = self.chart, self.B
        n = chart.nvars
        rows = [list(r) for r in B]
        cols = [list(c) for c in zip(*B)] if B else []
        multipliers = [Poly.constant(n, k) for k in (1, -1, 2, -2, 3, -3, 4, -4, 5, -5)]
        for axis, lines in ((0, rows), (1, cols)):
            for a in range(len(lines)):
                for b in range(len(lines)):
                    if a == b or not any(lines[b]):
                        continue
                    for c in multipliers:
                        mixed = [chart.reduce(x + y * c) for x, y in zip(lines[a], lines[b])]
                        if not any(mixed) or not chart.ideal([e for e in mixed if e]).is_unit():
                            continue
                        if axis == 0:
                            self.add_row(a, b, c)
                        else:
                            self.add_col(a, b, c)
                        self.mixing.append((self.r, axis, a, b, int(c.constant_value())))
                        return True
        return False

    def _combine(self, a, b):
        """Bezout data ``(g, a/g, b/g, c1, c2)`` with ``c1 a + c2 b = g`` generating ``(a, b)``."""
        chart = self.chart
        try:
            g = chart.is_principal(chart.ideal([a, b]))
        except UndecidedPrincipality:
            return None
        if g is None:
            return None
        cof = lift(g, [a, b], chart.relations, chart.order)
        a1, b1 = chart.divide(a, g), chart.divide(b, g)
        if cof is None or a1 is None or b1 is None:
            return None
        return g, a1, b1, chart.reduce(cof[0]), chart.reduce(cof[1])

    def _bezout(self) -> bool:
        """Concentrate a row (or column) ideal into one entry by 2x2 unimodular moves."""
        B = self.B
        for i in range(len(B)):
            if sum(1 for e in B[i] if e) < 2:
                continue
            for j in range(1, len(B[i])):
                a, b = B[i][0], B[i][j]
                if not b:
                    continue
                if not a:
                    self.swap_cols(0, j)
                    continue
                data = self._combine(a, b)
                if data is None:
                    continue
                _, a1, b1, c1, c2 = data
                self.transform_cols(0, j, c1, -b1, c2, a1)
            if self.chart.is_unit(B[i][0]):
                return True
        for j in range(len(B[0]) if B else 0):
            if sum(1 for row in B if row[j]) < 2:
                continue
            for i in range(1, len(B)):
                a, b = B[0][j], B[i][j]
                if not b:
                    continue
                if not a:
                    self.swap_rows(0, i)
                    continue
                data = self._combine(a, b)
                if data is None:
                    continue
                _, a1, b1, c1, c2 = data
                self.transform_rows(0, i, c1, c2, -b1, a1)
            if self.chart.is_unit(B[0][j]):
                return True
        return False

    # -- results ------------------------------------------------------------

    def certificate(self) -> DiagCert:
        red = self._red

        def mat(M):
            return tuple(tuple(red(e) for e in row) for row in M)

        return DiagCert(
            self.chart,
            mat(self.U),
            mat(self.V),
            tuple(self.diag),
            red(self.udet),
            red(self.vdet),
            mat(self.Vinv),
            tuple(self.mixing),
            self.seed,
        )

    def pullback(self, m: RingMap, next_generator: Optional[Poly] = None) -> "Reducer":
        new = Reducer.__new__(Reducer)
        ap = m.apply
        new.chart = m.target
        new.q, new.p = self.q, self.p
        new.U = [[ap(e) for e in row] for row in self.U]
        new.V = [[ap(e) for e in row] for row in self.V]
        new.Vinv = [[ap(e) for e in row] for row in self.Vinv]
        new.B = [[ap(e) for e in row] for row in self.B]
        new.acc = ap(self.acc)
        new.udet = ap(self.udet)
        new.vdet = ap(self.vdet)
        new.diag = [ap(d) for d in self.diag]
        new.stage_gens = [ap(g) for g in self.stage_gens]
        new.mixing = list(self.mixing)
        new.seed = self.seed
        new.hints = [ap(h) for h in self.hints]
        new.next_generator = next_generator
        new.done = self.done
        new._rng = None
        return new


def diagonalize_on_chart(phi: MatrixHom, hints: Sequence[Poly] = (), seed: int = 0) -> DiagCert:
    """Certificate for ``phi`` without blowing up.

    Raises NotPrincipal when some stage ideal is not principal on the chart.
    """
    return Reducer(phi, seed, hints).run().certificate()


def _diag_matrix(chart, q, p, diag):
    zero = Poly.zero(chart.nvars)
    rows = [[zero] * p for _ in range(q)]
    for i, d in enumerate(diag):
        rows[i][i] = d
    return tuple(tuple(r) for r in rows)


def verify_cert(phi: MatrixHom, c: DiagCert) -> CertCheck:
    """Re-derive every certificate property by exact computation."""
    chart = c.chart
    if not chart.same_ring(phi.chart):
        return CertCheck(False, "ChartMismatch", "certificate and matrix live on different charts")
    q, p = phi.shape
    if len(c.U) != q or any(len(r) != q for r in c.U) or len(c.V) != p or any(len(r) != p for r in c.V):
        return CertCheck(False, "ShapeMismatch", "U or V has the wrong shape")
    if len(c.diag) > min(q, p):
        return CertCheck(False, "ShapeMismatch", "too many diagonal entries")
    U = tuple(tuple(chart.reduce(e) for e in r) for r in c.U)
    V = tuple(tuple(chart.reduce(e) for e in r) for r in c.V)
    diag = [chart.reduce(d) for d in c.diag]
    if any(d.is_zero() for d in diag):
        return CertCheck(False, "ZeroDiagEntry", "a diagonal entry vanishes")
    product = matmul(chart, matmul(chart, U, phi.entries, q), V, p)
    if product != _diag_matrix(chart, q, p, diag):
        return CertCheck(False, "DiagMismatch", "U*phi*V differs from the stated diagonal")
    for name, M, stated in (("U", U, c.U_det), ("V", V, c.V_det)):
        det = determinant(chart, M)
        if not chart.is_unit(det):
            return CertCheck(False, "NonUnitDet", f"det {name} is not a unit")
        if det != chart.reduce(stated):
            return CertCheck(False, "DetMismatch", f"stated det {name} is wrong")
    for a, b in zip(diag, diag[1:]):
        if chart.divide(b, a) is None:
            return CertCheck(False, "ChainBroken", "divisibility chain fails")
    if c.V_inv is not None:
        if matmul(chart, V, c.V_inv, p) != _diag_matrix(chart, p, p, [Poly.one(chart.nvars)] * p):
            return CertCheck(False, "InverseMismatch", "V_inv is not the inverse of V")
    return CertCheck(True)


def kernel_basis(c: DiagCert, p: int) -> KernelBasis:
    m = len(c.diag)
    cols = tuple(tuple(c.V[row][k] for row in range(p)) for k in range(m, p))
    return KernelBasis(cols, p - m)


def is_locally_diagonalizable(phi: MatrixHom, seed: int = 0) -> Diagonalizability:
    try:
        cert = diagonalize_on_chart(phi, seed=seed)
    except NotPrincipal as exc:
        return Diagonalizability(False, stage=exc.stage, ideal=exc.ideal)
    return Diagonalizability(True, cert=cert)


def pullback_cert(c: DiagCert, m: RingMap) -> DiagCert:
    """Base change of a certificate along a ring map out of its chart."""
    ap = m.apply

    def mat(M):
        return None if M is None else tuple(tuple(ap(e) for e in r) for r in M)

    return DiagCert(
        m.target,
        mat(c.U),
        mat(c.V),
        tuple(ap(d) for d in c.diag),
        ap(c.U_det),
        ap(c.V_det),
        mat(c.V_inv),
        c.mixing,
        c.seed,
    )
