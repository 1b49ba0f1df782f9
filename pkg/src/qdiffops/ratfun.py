"""Rational functions with factored binomial denominators.

Every denominator that occurs in the difference operators of this package
is a product of two-term Laurent polynomials (binomials), so denominators
are kept as multisets of canonical :class:`BinomialFactor` objects and are
never expanded.  Equality is decided by cross-multiplication over the
non-shared factors; no multivariate gcd is ever computed.  Numerators are
opportunistically reduced by trial exact division against the denominator
factors, which keeps operator coefficients in their naturally compact form.

A canonical factor represents x^delta + c(v) with the lex-greater
x-monomial normalized to coefficient 1 and v-power 0; the monomial unit
split off by this normalization is folded into the numerator, which is
always exact in a Laurent ring.
"""

from __future__ import annotations

from typing import Dict, Sequence

from .laurent import (DEFAULT_LATTICE, LaurentPolynomial, NotDivisibleError,
                      _VBIAS, _VBITS, _VMASK, key_field, unpack_v, unpack_x,
                      x_part, zero_key)
from .scalars import ONE, QScalar, rat

# the quick divisibility screen evaluates all but one variable at fixed
# points modulo a 61-bit prime; a nonzero modular remainder soundly rejects
_SCREEN_P = (1 << 61) - 1
_SCREEN_X = (3, 5, 7, 11, 13, 17, 19, 23)
_SCREEN_V = 2


class BinomialFactor:
    """Canonical binomial x^delta + trailing(v), delta lex-positive."""

    __slots__ = ("delta", "trailing", "nvars", "_hash", "_poly")

    def __init__(self, delta: int, trailing: QScalar, nvars: int):
        # delta: biased packed key of the leading monomial (v-exponent 0)
        self.delta = delta
        self.trailing = trailing
        self.nvars = nvars
        self._hash = hash((delta, trailing))
        self._poly = None

    def __eq__(self, other):
        return (isinstance(other, BinomialFactor)
                and self.delta == other.delta and self.trailing == other.trailing)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.delta, hash(self.trailing))

    def as_polynomial(self, lattice=DEFAULT_LATTICE) -> LaurentPolynomial:
        if self._poly is None:
            Z = zero_key(self.nvars)
            terms = {self.delta: 1}
            for ve, c in self.trailing.poly_items():
                terms[Z + ve] = c
            self._poly = LaurentPolynomial(self.nvars, terms, lattice)
        return self._poly

    def delta_vector(self):
        return unpack_x(self.delta, self.nvars)

    def __str__(self):
        return str(self.as_polynomial())

    @staticmethod
    def from_binomial(p: LaurentPolynomial):
        """Split a two-x-monomial polynomial into (factor, unit key, unit coeff).

        p = unit_coeff * x^unit * v^unit_v * (x^delta + trailing(v)); the
        returned unit key is the biased packed key of the unit monomial.
        The leading x-monomial must carry a q-monomial coefficient.
        """
        groups: Dict[int, Dict[int, object]] = {}
        for key, c in p.terms.items():
            xk = key >> _VBITS
            groups.setdefault(xk, {})[(key & _VMASK) - _VBIAS] = c
        if len(groups) != 2:
            raise ValueError("binomial factor needs exactly two x-monomials")
        (xk1, vd1), (xk2, vd2) = sorted(groups.items(), reverse=True)
        lead = QScalar.from_poly_items(vd1.items())
        if not lead.is_monomial():
            raise ValueError("leading coefficient of a denominator factor "
                             "must be a q-monomial")
        ve1, cc1 = lead.monomial_parts()
        trailing = QScalar.from_poly_items(vd2.items()) * QScalar.v_power(-ve1)
        trailing = trailing * QScalar.from_rational(rat(1) / rat(cc1))
        Z = zero_key(p.nvars)
        delta = Z + ((xk1 - xk2) << _VBITS)
        unit_key = ((xk2 << _VBITS) + _VBIAS) + ve1
        return BinomialFactor(delta, trailing, p.nvars), unit_key, cc1


FactorMultiset = Dict[BinomialFactor, int]


class RationalFunction:
    """num / prod factor^multiplicity over the Laurent polynomial ring."""

    __slots__ = ("num", "factors")

    def __init__(self, num: LaurentPolynomial, factors: FactorMultiset = None):
        self.num = num
        self.factors = factors if factors is not None else {}

    # -- construction ----------------------------------------------------

    @classmethod
    def from_laurent(cls, p: LaurentPolynomial) -> "RationalFunction":
        return cls(p, {})

    @classmethod
    def zero(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(LaurentPolynomial.zero(nvars, lattice), {})

    @classmethod
    def one(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(LaurentPolynomial.one(nvars, lattice), {})

    @classmethod
    def monomial_over_binomials(cls, num: LaurentPolynomial,
                                binomials: Sequence[LaurentPolynomial]):
        """num / prod(binomials), canonicalizing each binomial factor."""
        factors: FactorMultiset = {}
        Z = zero_key(num.nvars)
        for b in binomials:
            fac, unit_key, unit_coeff = BinomialFactor.from_binomial(b)
            inv = rat(1) / rat(unit_coeff)
            num = num.mul_monomial_key(Z - unit_key,
                                       int(inv) if inv.denominator == 1 else inv)
            factors[fac] = factors.get(fac, 0) + 1
        return cls(num, factors)

    @property
    def nvars(self):
        return self.num.nvars

    @property
    def lattice(self):
        return self.num.lattice

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def denominator_polynomial(self) -> LaurentPolynomial:
        out = LaurentPolynomial.one(self.nvars, self.lattice)
        for fac, mult in self.factors.items():
            b = fac.as_polynomial(self.lattice)
            for _ in range(mult):
                out = out * b
        return out

    # -- arithmetic --------------------------------------------------------

    def _extend_to(self, target: FactorMultiset) -> LaurentPolynomial:
        """Numerator after extending own denominator to ``target``."""
        num = self.num
        for fac, mult in target.items():
            extra = mult - self.factors.get(fac, 0)
            if extra > 0:
                b = fac.as_polynomial(self.lattice)
                for _ in range(extra):
                    num = num * b
        return num

    def __add__(self, other):
        if isinstance(other, (int, QScalar)):
            other = RationalFunction.from_laurent(
                LaurentPolynomial.constant(self.nvars, other, self.lattice))
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.factors == other.factors:
            return RationalFunction(self.num + other.num, dict(self.factors))
        union: FactorMultiset = dict(self.factors)
        for fac, mult in other.factors.items():
            if union.get(fac, 0) < mult:
                union[fac] = mult
        return RationalFunction(self._extend_to(union) + other._extend_to(union),
                                union)

    __radd__ = __add__

    @staticmethod
    def sum_list(items: Sequence["RationalFunction"]) -> "RationalFunction":
        """Sum many rational functions over a single common denominator.

        Builds the union denominator once and extends every numerator once
        (grouping summands that already share a denominator), avoiding the
        quadratic re-expansion of a pairwise left fold.  Summands with small
        numerators are pre-summed over their own (smaller) union before
        being folded in with the large ones.
        """
        items = [r for r in items if not r.is_zero()]
        if not items:
            raise ValueError("sum_list needs the ambient space; pass a zero "
                             "explicitly for empty sums")
        if len(items) == 1:
            return items[0]
        light = [r for r in items if len(r.num.terms) <= 512]
        if len(light) > 1 and len(light) < len(items):
            heavy = [r for r in items if len(r.num.terms) > 512]
            pre = RationalFunction._sum_best(light)
            return RationalFunction._sum_best([pre] + heavy)
        return RationalFunction._sum_best(items)

    @staticmethod
    def _sum_best(items: Sequence["RationalFunction"]) -> "RationalFunction":
        if len(items) == 1:
            return items[0]
        union: FactorMultiset = {}
        for r in items:
            for fac, mult in r.factors.items():
                if union.get(fac, 0) < mult:
                    union[fac] = mult
        est = 0
        for r in items:
            missing = sum(union.values()) - sum(
                min(m, r.factors.get(f, 0)) for f, m in union.items())
            est += len(r.num.terms) << min(missing, 22)
        if est > 2_000_000:
            dense = RationalFunction._dense_sum(items, union)
            if dense is not None:
                return dense
        return RationalFunction._sum_flat(items)

    @staticmethod
    def _dense_sum(items, union):
        from .densesum import dense_sum_pieces
        nvars = items[0].nvars
        lattice = items[0].lattice
        pieces = []
        for r in items:
            fl = []
            for fac, mult in union.items():
                extra = mult - r.factors.get(fac, 0)
                if extra <= 0:
                    continue
                if not fac.trailing.is_monomial():
                    return None
                w, c = fac.trailing.monomial_parts()
                if rat(c).denominator != 1:
                    return None
                fl.append((fac.delta_vector(), w, int(c), extra))
            pieces.append((r.num.terms, fl))
        total = dense_sum_pieces(pieces, nvars)
        if total is None:
            return None
        return RationalFunction(
            LaurentPolynomial(nvars, total, lattice), dict(union))

    @staticmethod
    def _sum_flat(items: Sequence["RationalFunction"]) -> "RationalFunction":
        if len(items) == 1:
            return items[0]
        union: FactorMultiset = {}
        for r in items:
            for fac, mult in r.factors.items():
                if union.get(fac, 0) < mult:
                    union[fac] = mult
        nvars = items[0].nvars
        lattice = items[0].lattice
        groups = {}
        for r in items:
            key = frozenset(r.factors.items())
            bucket = groups.get(key)
            if bucket is None:
                groups[key] = [r.factors, r.num]
            else:
                bucket[1] = bucket[1] + r.num
        total = {}
        get = total.get
        for factors, num in groups.values():
            num = RationalFunction(num, factors)._extend_to(union)
            for e, c in num.terms.items():
                s = get(e)
                if s is None:
                    total[e] = c
                else:
                    s = s + c
                    if s:
                        total[e] = s
                    else:
                        del total[e]
        return RationalFunction(LaurentPolynomial(nvars, total, lattice), union)

    def __neg__(self):
        return RationalFunction(-self.num, dict(self.factors))

    def __sub__(self, other):
        if isinstance(other, (int, QScalar)):
            other = RationalFunction.from_laurent(
                LaurentPolynomial.constant(self.nvars, other, self.lattice))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, QScalar)):
            return self.scale(other)
        if isinstance(other, LaurentPolynomial):
            other = RationalFunction.from_laurent(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.zero(self.nvars, self.lattice)
        factors = dict(self.factors)
        for fac, mult in other.factors.items():
            factors[fac] = factors.get(fac, 0) + mult
        return RationalFunction(self.num * other.num, factors)

    __rmul__ = __mul__

    def scale(self, coeff) -> "RationalFunction":
        num = self.num.scale(coeff)
        if num.is_zero():
            return RationalFunction.zero(self.nvars, self.lattice)
        return RationalFunction(num, dict(self.factors))

    # -- normalization -------------------------------------------------------

    def simplified(self) -> "RationalFunction":
        """Cancel denominator factors that exactly divide the numerator.

        A factor with direction delta can divide only if the numerator's
        componentwise exponent span covers |delta|, and only if its image
        under a fixed rational evaluation of all but one variable still
        divides; these sound screens skip most exact-division attempts.
        """
        if self.num.is_zero():
            return RationalFunction.zero(self.nvars, self.lattice)
        if not self.factors:
            return self
        num = self.num
        factors: FactorMultiset = {}
        screen_cache: Dict[int, Dict[int, object]] = {}
        spans = None
        for fac, mult in self.factors.items():
            while mult > 0 and len(num.terms) > 1:
                if spans is None:
                    spans = _exponent_spans(num)
                if not _may_divide(num, fac, spans, screen_cache):
                    break
                b = fac.as_polynomial(self.lattice)
                try:
                    num = num.exact_divide(b)
                    screen_cache.clear()
                    spans = None
                    mult -= 1
                except NotDivisibleError:
                    break
            if mult:
                factors[fac] = mult
        return RationalFunction(num, factors)

    def to_laurent(self) -> LaurentPolynomial:
        """Clear the denominator exactly; error if not a Laurent polynomial."""
        num = self.num
        for fac, mult in self.factors.items():
            b = fac.as_polynomial(self.lattice)
            for _ in range(mult):
                try:
                    num = num.exact_divide(b)
                except NotDivisibleError as exc:
                    raise NotDivisibleError(
                        f"denominator factor {fac} does not divide the "
                        f"numerator", exc.remainder) from None
        return num

    # -- equality ---------------------------------------------------------------

    def equal(self, other) -> bool:
        """Representation-independent equality by cross-multiplication."""
        if isinstance(other, (int, QScalar, LaurentPolynomial)):
            if isinstance(other, LaurentPolynomial):
                other = RationalFunction.from_laurent(other)
            else:
                other = RationalFunction.from_laurent(
                    LaurentPolynomial.constant(self.nvars, other, self.lattice))
        if self.num.is_zero():
            return other.num.is_zero()
        if other.num.is_zero():
            return False
        left = self.num
        right = other.num
        for fac, mult in other.factors.items():
            extra = mult - min(mult, self.factors.get(fac, 0))
            b = fac.as_polynomial(self.lattice)
            for _ in range(extra):
                left = left * b
        for fac, mult in self.factors.items():
            extra = mult - min(mult, other.factors.get(fac, 0))
            b = fac.as_polynomial(self.lattice)
            for _ in range(extra):
                right = right * b
        return left == right

    def __eq__(self, other):
        if isinstance(other, (RationalFunction, LaurentPolynomial, int, QScalar)):
            return self.equal(other)
        return NotImplemented

    # -- substitutions -----------------------------------------------------------

    def qshift(self, m: Sequence[int]) -> "RationalFunction":
        """Substitute x_i -> q^{m_i} x_i."""
        if not any(m):
            return self
        num = self.num.qshift(m)
        factors: FactorMultiset = {}
        lat = self.lattice
        n = self.nvars
        vtot = 0
        for fac, mult in self.factors.items():
            dvec = fac.delta_vector()
            ve4 = 4 * sum(mi * di for mi, di in zip(m, dvec))
            if ve4 % lat:
                raise ValueError("q-shift left the q^(1/4) lattice")
            ve = ve4 // lat
            # x^d + c -> q^{m.d} (x^d + c q^{-m.d})
            nfac = BinomialFactor(fac.delta,
                                  fac.trailing * QScalar.v_power(-ve), n)
            vtot -= ve * mult
            factors[nfac] = factors.get(nfac, 0) + mult
        return RationalFunction(num.v_shift(vtot), factors)

    def substitute(self, matrix, new_nvars=None, v_power=1,
                   new_lattice=None) -> "RationalFunction":
        """Monomial substitution applied to numerator and factors."""
        num = self.num.substitute(matrix, new_nvars, None, v_power, new_lattice)
        nvars = num.nvars
        Z = zero_key(nvars)
        factors: FactorMultiset = {}
        for fac, mult in self.factors.items():
            proto = LaurentPolynomial(
                self.nvars, {fac.delta: 1}, self.lattice).substitute(
                    matrix, new_nvars, None, v_power, new_lattice)
            (dkey, dc), = proto.terms.items()
            dve = unpack_v(dkey)
            delta = dkey - dve  # projected leading monomial at v-power 0
            dcoeff = QScalar.v_power(dve, dc)
            trailing = (fac.trailing.substitute_v_power(v_power)
                        if v_power != 1 else fac.trailing)
            if delta == Z:
                c = dcoeff + trailing
                if c.is_zero():
                    raise ZeroDivisionError(
                        "substitution collapsed a denominator factor to zero")
                num = num.scale_by_qscalar_inverse(c, mult)
                continue
            trailing = trailing / dcoeff
            if delta < Z:
                # x^d + c = c x^d (x^{-d} + 1/c)
                nfac = BinomialFactor(2 * Z - delta, trailing.inverse(), nvars)
                unit = trailing * dcoeff
                num = num.mul_monomial_key(mult * (Z - delta), 1)
                num = num.scale_by_qscalar_inverse(unit, mult)
            else:
                nfac = BinomialFactor(delta, trailing, nvars)
                num = num.scale_by_qscalar_inverse(dcoeff, mult)
            factors[nfac] = factors.get(nfac, 0) + mult
        return RationalFunction(num, factors)

    # -- evaluation ----------------------------------------------------------------

    def evaluate(self, xs, v):
        num = self.num.evaluate(xs, v)
        den = rat(1)
        for fac, mult in self.factors.items():
            val = fac.as_polynomial(self.lattice).evaluate(xs, v)
            if val == 0:
                raise ZeroDivisionError("evaluation point hits a denominator zero")
            den = den * val ** mult
        return num / den

    # -- rendering -------------------------------------------------------------------

    def _sorted_factors(self):
        return sorted(self.factors.items(), key=lambda kv: kv[0].sort_key())

    def __str__(self):
        if not self.factors:
            return str(self.num)
        ns = str(self.num)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        bits = []
        for fac, mult in self._sorted_factors():
            bit = f"({fac.as_polynomial(self.lattice)})"
            if mult > 1:
                bit += f"^{mult}"
            bits.append(bit)
        return f"{ns} / [" + " ".join(bits) + "]"

    def __repr__(self):
        return f"RationalFunction({self})"

    def to_json(self):
        facs = []
        for fac, mult in self._sorted_factors():
            facs.append([fac.as_polynomial(self.lattice).to_json(), mult])
        return {"num": self.num.to_json(), "den": facs}

    @classmethod
    def from_json(cls, nvars, data, lattice=DEFAULT_LATTICE):
        num = LaurentPolynomial.from_json(nvars, data["num"], lattice)
        factors: FactorMultiset = {}
        Z = zero_key(nvars)
        for bjson, mult in data["den"]:
            b = LaurentPolynomial.from_json(nvars, bjson, lattice)
            fac, unit_key, unit_coeff = BinomialFactor.from_binomial(b)
            inv = rat(1) / rat(unit_coeff) ** mult
            num = num.mul_monomial_key(mult * (Z - unit_key),
                                       int(inv) if inv.denominator == 1 else inv)
            factors[fac] = factors.get(fac, 0) + mult
        return cls(num, factors)


def _exponent_spans(num: LaurentPolynomial):
    """Componentwise (min, max) of the scaled x-exponents of all terms."""
    n = num.nvars
    lo = [None] * n
    hi = [None] * n
    for key in num.terms:
        e = unpack_x(key, n)
        for i, ei in enumerate(e):
            if lo[i] is None or ei < lo[i]:
                lo[i] = ei
            if hi[i] is None or ei > hi[i]:
                hi[i] = ei
    return lo, hi


_POW_CACHE: Dict[object, int] = {}


def _screen_pow(base, e):
    key = (base, e)
    val = _POW_CACHE.get(key)
    if val is None:
        val = pow(base, e, _SCREEN_P)
        _POW_CACHE[key] = val
    return val


def _mod_rat(c) -> int:
    if type(c) is int:
        return c % _SCREEN_P
    f = rat(c)
    return int(f.numerator) * pow(int(f.denominator), -1, _SCREEN_P) % _SCREEN_P


def _may_divide(num: LaurentPolynomial, fac: BinomialFactor, spans,
                cache: Dict[int, Dict[int, object]]) -> bool:
    """Sound quick rejection of a division attempt (see ``simplified``)."""
    n = num.nvars
    lo, hi = spans
    pivot = -1
    for i in range(n):
        d = key_field(fac.delta, i, n)
        if d:
            if hi[i] - lo[i] < abs(d):
                return False
            if pivot < 0:
                pivot = i
    if pivot < 0:
        return False
    uni = cache.get(pivot)
    if uni is None:
        uni = {}
        nx = len(_SCREEN_X)
        P = _SCREEN_P
        for key, c in num.terms.items():
            e = unpack_x(key, n)
            val = (_mod_rat(c) * _screen_pow(_SCREEN_V, unpack_v(key))) % P
            for j, ej in enumerate(e):
                if j != pivot and ej:
                    val = val * _screen_pow(_SCREEN_X[j % nx], ej) % P
            k = e[pivot]
            s = (uni.get(k, 0) + val) % P
            if s:
                uni[k] = s
            else:
                uni.pop(k, None)
        cache[pivot] = uni
    if not uni:
        return True  # image collapsed; only the exact division can tell
    P = _SCREEN_P
    dvec = fac.delta_vector()
    lead = 1
    for j, dj in enumerate(dvec):
        if j != pivot and dj:
            lead = lead * _screen_pow(_SCREEN_X[j % len(_SCREEN_X)], dj) % P
    trail = 0
    for ve, c in fac.trailing.poly_items():
        trail = (trail + _mod_rat(c) * _screen_pow(_SCREEN_V, ve)) % P
    dpow = abs(dvec[pivot])
    if dvec[pivot] < 0:
        lead, trail = trail, lead
        if not lead:
            return True
    # divide the shifted image by lead*y^dpow + trail, mod P
    mn = min(uni)
    r = {e - mn: c for e, c in uni.items()}
    ratio = trail * pow(lead, -1, P) % P
    while r:
        top = max(r)
        if top < dpow:
            return False
        c = r.pop(top)
        e2 = top - dpow
        s = (r.get(e2, 0) - c * ratio) % P
        if s:
            r[e2] = s
        else:
            r.pop(e2, None)
    return True
