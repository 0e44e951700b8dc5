"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is a sparse map from exponent tuples to :class:`fractions.Fraction`
coefficients.  The number of variables is fixed when the polynomial is built and
binary operations refuse to mix different widths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Sequence, Tuple

from .errors import ContextMismatch, InvalidArgument

Rational = Fraction
Monomial = Tuple[int, ...]


def _grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order; ``split`` is the size of the eliminated leading block."""

    kind: str = "grevlex"
    split: int = 0
    key: Callable = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind == "lex":
            fn = tuple
        elif self.kind == "grevlex":
            fn = _grevlex_key
        elif self.kind == "block":
            k = self.split

            def fn(m, k=k):
                head, tail = m[:k], m[k:]
                return (_grevlex_key(head), _grevlex_key(tail))
        else:
            raise InvalidArgument(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "key", fn)

    def __str__(self):
        return f"block({self.split})" if self.kind == "block" else self.kind


LEX = MonomialOrder("lex")
GREVLEX = MonomialOrder("grevlex")


def block_order(split: int) -> MonomialOrder:
    return MonomialOrder("block", split)


def order_from_name(name: str) -> MonomialOrder:
    if name == "lex":
        return LEX
    if name == "grevlex":
        return GREVLEX
    raise InvalidArgument(f"unknown monomial order {name!r}")


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as a rational coefficient")


class Poly:
    """Immutable polynomial with rational coefficients in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for m, c in items:
                m = tuple(m)
                if len(m) != nvars:
                    raise ContextMismatch(f"monomial {m} does not have {nvars} slots")
                c = _coerce(c)
                if c:
                    c = clean.get(m, 0) + c
                    if c:
                        clean[m] = c
                    else:
                        clean.pop(m, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, c):
        c = _coerce(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def one(cls, nvars):
        return cls.constant(nvars, 1)

    @classmethod
    def var(cls, nvars, i):
        m = [0] * nvars
        m[i] = 1
        return cls._raw(nvars, {tuple(m): Fraction(1)})

    @classmethod
    def monomial(cls, mono, c=1):
        return cls._raw(len(mono), {tuple(mono): _coerce(c)} if c else {})

    # -- basic queries -------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self.terms), default=-1)

    def variables(self):
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return used

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def lead(self, order: MonomialOrder = GREVLEX):
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def lm(self, order: MonomialOrder = GREVLEX) -> Monomial:
        return max(self.terms, key=order.key)

    def lc(self, order: MonomialOrder = GREVLEX) -> Fraction:
        return self.terms[self.lm(order)]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Poly":
        if not self.terms:
            return self
        c = self.lc(order)
        if c == 1:
            return self
        inv = 1 / c
        return Poly._raw(self.nvars, {m: v * inv for m, v in self.terms.items()})

    def sorted_terms(self, order: MonomialOrder = GREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------

    def _check(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ContextMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other, self
        else:
            a, b = self, other
        out = dict(a.terms)
        for m, c in b.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v -= c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(self.nvars, out)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: Dict[Monomial, Fraction] = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                out[m] = get(m, 0) + c1 * c2
        return Poly._raw(self.nvars, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise InvalidArgument("negative exponent")
        result = Poly.one(self.nvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        c = _coerce(c)
        if not c:
            return Poly.zero(self.nvars)
        if c == 1:
            return self
        return Poly._raw(self.nvars, {m: v * c for m, v in self.terms.items()})

    def mul_term(self, mono: Monomial, c) -> "Poly":
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(
            self.nvars,
            {tuple(x + y for x, y in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    # -- comparison ----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ContextMismatch("point has the wrong number of coordinates")
        point = [_coerce(v) for v in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(point, m):
                if e:
                    t *= v**e
            total += t
        return total

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Replace variable ``i`` by ``images[i]``; the result lives in the images' ring."""
        if len(images) != self.nvars:
            raise ContextMismatch("one image per variable is required")
        if not images:
            return self
        n = images[0].nvars
        cache: Dict[Tuple[int, int], Poly] = {}

        def power(i, e):
            p = cache.get((i, e))
            if p is None:
                p = images[i] if e == 1 else power(i, e - 1) * images[i]
                cache[(i, e)] = p
            return p

        out = Poly.zero(n)
        for m, c in self.terms.items():
            t = Poly.constant(n, c)
            for i, e in enumerate(m):
                if e:
                    t = t * power(i, e)
            out = out + t
        return out

    def embed(self, positions: Sequence[int], nvars: int) -> "Poly":
        """Move variable ``i`` to slot ``positions[i]`` of a ring with ``nvars`` variables."""
        out = {}
        for m, c in self.terms.items():
            nm = [0] * nvars
            for i, e in enumerate(m):
                if e:
                    nm[positions[i]] = e
            out[tuple(nm)] = c
        return Poly._raw(nvars, out)

    def coefficients_in(self, i: int) -> Dict[int, "Poly"]:
        """View as a polynomial in variable ``i``: degree -> coefficient (free of ``i``)."""
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            e = m[i]
            parts.setdefault(e, {})[m[:i] + (0,) + m[i + 1:]] = c
        return {e: Poly._raw(self.nvars, t) for e, t in parts.items()}

    # -- printing --------------------------------------------------------

    def to_str(self, names: Sequence[str], order: MonomialOrder = GREVLEX) -> str:
        if len(names) != self.nvars:
            raise ContextMismatch("one name per variable is required")
        if not self.terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms(order):
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = _fmt(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _fmt(mag) + "*" + "*".join(factors)
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        names = [f"x{i}" for i in range(self.nvars)]
        return f"Poly({self.to_str(names)!r})"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def divide_multivariate(f: Poly, divisors: Sequence[Poly], order: MonomialOrder = GREVLEX):
    """Multivariate division: ``f == sum(q_i * d_i) + r`` with no term of ``r``
    divisible by any leading monomial of the divisors."""
    if not divisors:
        raise InvalidArgument("empty divisor list")
    n = f.nvars
    leads = []
    for d in divisors:
        if d.nvars != n:
            raise ContextMismatch("divisor in a different ring")
        if d.is_zero():
            raise InvalidArgument("zero divisor")
        leads.append(d.lead(order))
    quotients = [dict() for _ in divisors]
    remainder: Dict[Monomial, Fraction] = {}
    p = dict(f.terms)
    key = order.key
    while p:
        m = max(p, key=key)
        c = p[m]
        for i, (lm, lc) in enumerate(leads):
            if mono_divides(lm, m):
                qm = mono_div(m, lm)
                qc = c / lc
                quotients[i][qm] = quotients[i].get(qm, 0) + qc
                for dm, dc in divisors[i].terms.items():
                    t = mono_mul(dm, qm)
                    v = p.get(t, 0) - qc * dc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            remainder[m] = c
            del p[m]
    return [Poly(n, q) for q in quotients], Poly._raw(n, remainder)


def exact_quotient(f: Poly, g: Poly):
    """``f / g`` when ``g`` divides ``f`` in the polynomial ring, else ``None``."""
    if g.is_zero():
        raise InvalidArgument("division by zero")
    if f.is_zero():
        return Poly.zero(f.nvars)
    (q,), r = divide_multivariate(f, [g], LEX)
    return q if r.is_zero() else None


# -- gcd via recursive primitive pseudo-remainder sequences ----------------


def _prem(a: Poly, b: Poly, v: int) -> Poly:
    db = b.degree_in(v)
    lcb = b.coefficients_in(v)[db]
    r = a
    while r and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lr = r.coefficients_in(v)[dr]
        shift = [0] * r.nvars
        shift[v] = dr - db
        r = r * lcb - (lr * b).mul_term(tuple(shift), 1)
    return r


def _content(f: Poly, v: int) -> Poly:
    g = Poly.zero(f.nvars)
    for c in f.coefficients_in(v).values():
        g = poly_gcd(g, c)
        if g == 1:
            break
    return g


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic (grevlex) greatest common divisor in Q[x_1..x_n]."""
    if f.nvars != g.nvars:
        raise ContextMismatch("gcd of polynomials in different rings")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return Poly.one(f.nvars)
    used = f.variables() | g.variables()
    v = min(used)
    if v not in f.variables():
        return poly_gcd(f, _content(g, v))
    if v not in g.variables():
        return poly_gcd(_content(f, v), g)
    cf, cg = _content(f, v), _content(g, v)
    a, b = exact_quotient(f, cf), exact_quotient(g, cg)
    c = poly_gcd(cf, cg)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while b and b.degree_in(v) > 0:
        r = _prem(a, b, v)
        a = b
        b = exact_quotient(r, _content(r, v)) if r else r
    if b:
        h = Poly.one(f.nvars)
    else:
        h = exact_quotient(a, _content(a, v))
    return (c * h).monic()


def poly_gcd_list(polys: Iterable[Poly], nvars: int) -> Poly:
    g = Poly.zero(nvars)
    for p in polys:
        g = poly_gcd(g, p)
        if g == 1:
            break
    return g
