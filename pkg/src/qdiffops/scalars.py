"""Exact scalars: rational functions of a formal fourth root of q.

Every coefficient in this package lives in the field Q(v) with v = q^(1/4).
A :class:`QScalar` is a reduced fraction of univariate Laurent polynomials
in v with exact rational coefficients.  Fractional q-powers such as q^(1/2)
(normal ordering) and q^(1/4) (Gaussian conjugation of single shifts) are
therefore exact monomials.

Canonical form: numerator and denominator share no polynomial factor, the
denominator has constant term 1 and no monomial content, and a monomial
denominator is always absorbed into the (Laurent) numerator.  In practice
almost every scalar in the pipeline is a plain Laurent polynomial in q.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

try:
    from gmpy2 import mpq as _mpq

    def rat(a, b=1):
        return _mpq(a, b)
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    def rat(a, b=1):
        return Fraction(a, b)

_R0 = rat(0)
_R1 = rat(1)

RationalLike = Union[int, Fraction]

# ----------------------------------------------------------------------
# univariate polynomial helpers on dict[int exp -> rational], exps >= 0
# ----------------------------------------------------------------------


def _padd(p, q):
    out = dict(p)
    for e, c in q.items():
        s = out.get(e, _R0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _pmul(p, q):
    if len(p) == 1:
        (e1, c1), = p.items()
        return {e1 + e: c1 * c for e, c in q.items()}
    if len(q) == 1:
        (e1, c1), = q.items()
        return {e1 + e: c1 * c for e, c in p.items()}
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = e1 + e2
            s = out.get(e, _R0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _pdivmod(p, d):
    # polynomial division, exponents must be >= 0 on input
    dd = max(d)
    dc = d[dd]
    q = {}
    r = dict(p)
    while r:
        rd = max(r)
        if rd < dd:
            break
        c = r[rd] / dc
        q[rd - dd] = c
        for e, ce in d.items():
            e2 = rd - dd + e
            s = r.get(e2, _R0) - c * ce
            if s:
                r[e2] = s
            else:
                r.pop(e2, None)
    return q, r


def _pgcd(p, d):
    a, b = dict(p), dict(d)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    # normalize: monic in the top coefficient
    if a:
        top = a[max(a)]
        if top != 1:
            a = {e: c / top for e, c in a.items()}
    return a


_DEN_ONE = {0: _R1}  # shared trivial denominator; identity-checked in hot paths


class QScalar:
    """An exact element of Q(v), v = q^(1/4)."""

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, num, den=None, _canonical=False):
        # num, den: dict[int -> rational]; den defaults to 1
        if den is None:
            den = _DEN_ONE
        if not _canonical:
            num, den = self._reduce(num, den)
        if den is not _DEN_ONE and den == _DEN_ONE:
            den = _DEN_ONE
        self._num = num
        self._den = den
        self._hash = None

    # -- construction -------------------------------------------------

    @staticmethod
    def _reduce(num, den):
        if not den:
            raise ZeroDivisionError("zero denominator in QScalar")
        num = {e: c for e, c in num.items() if c}
        if not num:
            return {}, _DEN_ONE
        if len(den) == 1:
            # monomial denominator: absorb into the Laurent numerator
            (e0, c0), = den.items()
            if e0 == 0 and c0 == 1:
                return num, _DEN_ONE
            return {e - e0: c / c0 for e, c in num.items()}, _DEN_ONE
        den_off = min(den)
        den = {e - den_off: c for e, c in den.items()}
        num_off = min(num)
        npoly = {e - num_off: c for e, c in num.items()}
        g = _pgcd(npoly, den)
        if len(g) > 1 or (g and max(g) > 0):
            npoly, _ = _pdivmod(npoly, g)
            den, _ = _pdivmod(den, g)
        if len(den) == 1:
            (e0, c0), = den.items()
            return ({e + num_off - den_off - e0: c / c0 for e, c in npoly.items()},
                    _DEN_ONE)
        c0 = den[min(den)]
        mden = min(den)
        den = {e - mden: c / c0 for e, c in den.items()}
        num = {e + num_off - den_off - mden: c / c0 for e, c in npoly.items()}
        return num, den

    @classmethod
    def from_rational(cls, a, b=1) -> "QScalar":
        c = rat(a) / rat(b)
        return cls({0: c} if c else {}, None, _canonical=True)

    @classmethod
    def zero(cls) -> "QScalar":
        return _ZERO

    @classmethod
    def one(cls) -> "QScalar":
        return _ONE

    @classmethod
    def v_power(cls, e: int, coeff=1) -> "QScalar":
        c = rat(coeff)
        return cls({int(e): c} if c else {}, None, _canonical=True)

    @classmethod
    def q_power(cls, e) -> "QScalar":
        """q^e for exact rational e with 4e an integer."""
        ve = rat(4) * rat(e)
        if ve.denominator != 1:
            raise ValueError(f"q-exponent {e} is finer than the q^(1/4) lattice")
        return cls.v_power(int(ve))

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._num

    def is_one(self) -> bool:
        return self._den is _DEN_ONE and self._num == _DEN_ONE

    def is_monomial(self) -> bool:
        return len(self._num) == 1 and self._den is _DEN_ONE

    def monomial_parts(self):
        """(v-exponent, rational coefficient) of a monomial scalar."""
        if not self.is_monomial():
            raise ValueError("not a q-monomial")
        (e, c), = self._num.items()
        return e, c

    def poly_items(self):
        """[(v-exponent, int or rational coefficient)] of a polynomial scalar.

        Only scalars with trivial denominator can be used as polynomial
        coefficients; anything else raises.
        """
        if self._den is not _DEN_ONE:
            raise ValueError(
                "QScalar with a nontrivial q-denominator cannot be a "
                "polynomial coefficient")
        out = []
        for e, c in self._num.items():
            out.append((e, int(c) if c.denominator == 1 else c))
        return out

    @classmethod
    def from_poly_items(cls, items) -> "QScalar":
        num = {}
        for e, c in items:
            c = rat(c)
            if c:
                num[e] = c
        return cls(num, None, _canonical=True)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other) -> "QScalar":
        if type(other) is not QScalar:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self._den is _DEN_ONE and other._den is _DEN_ONE:
            return QScalar(_padd(self._num, other._num), None, _canonical=True)
        if self._den == other._den:
            return QScalar(_padd(self._num, other._num), self._den)
        num = _padd(_pmul(self._num, other._den), _pmul(other._num, self._den))
        return QScalar(num, _pmul(self._den, other._den))

    __radd__ = __add__

    def __neg__(self) -> "QScalar":
        return QScalar({e: -c for e, c in self._num.items()}, self._den,
                       _canonical=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "QScalar":
        if type(other) is not QScalar:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        n1, n2 = self._num, other._num
        if not n1 or not n2:
            return _ZERO
        if self._den is _DEN_ONE and other._den is _DEN_ONE:
            if len(n1) == 1:
                (e1, c1), = n1.items()
                return QScalar({e1 + e: c1 * c for e, c in n2.items()},
                               None, _canonical=True)
            if len(n2) == 1:
                (e2, c2), = n2.items()
                return QScalar({e2 + e: c2 * c for e, c in n1.items()},
                               None, _canonical=True)
            return QScalar(_pmul(n1, n2), None, _canonical=True)
        return QScalar(_pmul(n1, n2), _pmul(self._den, other._den))

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if not self._num:
            raise ZeroDivisionError("inverse of zero QScalar")
        return QScalar(dict(self._den), dict(self._num))

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> "QScalar":
        if n == 0:
            return _ONE
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self._num.items())),
                               tuple(sorted(self._den.items()))))
        return self._hash

    # -- maps ----------------------------------------------------------

    def substitute_v_power(self, c: int) -> "QScalar":
        """The field map v -> v^c (e.g. c=2 realizes q -> q^2)."""
        if c <= 0:
            raise ValueError("v-power substitution needs a positive exponent")
        return QScalar({e * c: co for e, co in self._num.items()},
                       {e * c: co for e, co in self._den.items()},
                       _canonical=True)

    def evaluate(self, v):
        """Evaluate at an exact rational value of v (nonzero)."""
        v = rat(v)
        num = sum((c * v ** e for e, c in self._num.items()), _R0)
        den = sum((c * v ** e for e, c in self._den.items()), _R0)
        return num / den

    # -- rendering -----------------------------------------------------

    @staticmethod
    def _poly_str(poly) -> str:
        if not poly:
            return "0"
        bits = []
        for e in sorted(poly):
            c = poly[e]
            if e == 0:
                mono = None
            elif e % 4 == 0:
                mono = "q" if e == 4 else f"q^{e // 4}"
            else:
                f = Fraction(e, 4)
                mono = f"q^({f.numerator}/{f.denominator})"
            neg = c < 0
            c = -c if neg else c
            if mono is None:
                body = str(c)
            elif c == 1:
                body = mono
            else:
                body = f"{c}*{mono}"
            if not bits:
                bits.append(("-" if neg else "") + body)
            else:
                bits.append(("- " if neg else "+ ") + body)
        return " ".join(bits)

    def __str__(self) -> str:
        num = self._poly_str(self._num)
        if self._den == {0: _R1}:
            return num
        den = self._poly_str(self._den)
        if len(self._num) > 1:
            num = f"({num})"
        return f"{num}/({den})"

    def __repr__(self) -> str:
        return f"QScalar({self})"

    def to_json(self):
        enc = lambda poly: [[e, str(poly[e])] for e in sorted(poly)]
        return [enc(self._num), enc(self._den)]

    @classmethod
    def from_json(cls, data) -> "QScalar":
        num, den = data
        dec = lambda items: {int(e): rat(Fraction(c)) for e, c in items}
        return cls(dec(num), dec(den))


def _coerce(x):
    if isinstance(x, QScalar):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(_R1):
        return QScalar.from_rational(x)
    return NotImplemented


_ZERO = QScalar({}, None, _canonical=True)
_ONE = QScalar({0: _R1}, None, _canonical=True)


def qpow(e) -> QScalar:
    """Shorthand for the monomial q^e (4e must be an integer)."""
    return QScalar.q_power(e)


ZERO = _ZERO
ONE = _ONE
Q = qpow(1)
