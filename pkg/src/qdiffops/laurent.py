"""Multivariate Laurent polynomials on a fractional exponent lattice.

Exponents are tuples of rationals whose denominators divide the configured
lattice (default 4).  Internally a term is a single packed integer key
holding the lattice-scaled x-exponents (variable 0 in the most significant
field) followed by the exponent of v = q^(1/4) in the least significant
field; the numeric coefficient is a plain Python int, or an exact rational
when a term is not integral.  Integer comparison of keys is lexicographic
comparison of (x-exponents, v-exponent), and multiplying monomials is a
single integer addition, including the q-power bookkeeping of shifts.

Coefficients presented at the API (:meth:`iter_terms`, printing, JSON) are
:class:`~qdiffops.scalars.QScalar` values obtained by grouping the packed
v-terms of one x-monomial.  Coefficients must be polynomial in v; a
QScalar with a nontrivial denominator cannot be stored in a polynomial.

Instances are treated as immutable.  The term order for leading terms,
exact division and canonical printing is graded lexicographic on the
scaled x-exponents, with the v-exponent as the final tiebreak.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .scalars import ONE, ZERO, QScalar, rat

DEFAULT_LATTICE = 4

# packed layout: one _XBITS field per x variable, then _VBITS for v
_XBITS = 24
_XBIAS = 1 << 23
_XMASK = (1 << _XBITS) - 1
_VBITS = 32
_VBIAS = 1 << 31
_VMASK = (1 << _VBITS) - 1
_MAX_X = _XBIAS - 1
_MAX_V = _VBIAS - 1

_ZERO_KEYS: Dict[int, int] = {}

Exponent = Tuple[int, ...]  # lattice-scaled integer x-exponents


def zero_key(nvars: int) -> int:
    z = _ZERO_KEYS.get(nvars)
    if z is None:
        z = 0
        for _ in range(nvars):
            z = (z << _XBITS) | _XBIAS
        z = (z << _VBITS) | _VBIAS
        _ZERO_KEYS[nvars] = z
    return z


def pack(scaled: Sequence[int], vexp: int = 0) -> int:
    p = 0
    for e in scaled:
        if not -_MAX_X <= e <= _MAX_X:
            raise OverflowError(f"scaled exponent {e} exceeds the packed range")
    if not -_MAX_V <= vexp <= _MAX_V:
        raise OverflowError(f"v-exponent {vexp} exceeds the packed range")
    for e in scaled:
        p = (p << _XBITS) | (e + _XBIAS)
    return (p << _VBITS) | (vexp + _VBIAS)


def unpack_x(key: int, nvars: int) -> Exponent:
    key >>= _VBITS
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = (key & _XMASK) - _XBIAS
        key >>= _XBITS
    return tuple(out)


def unpack_v(key: int) -> int:
    return (key & _VMASK) - _VBIAS

def x_part(key: int) -> int:
    return key >> _VBITS


def key_field(key: int, i: int, nvars: int) -> int:
    return ((key >> (_VBITS + _XBITS * (nvars - 1 - i))) & _XMASK) - _XBIAS


def key_grade(key: int, nvars: int) -> int:
    """Total x-degree (scaled); the v-exponent does not contribute."""
    key >>= _VBITS
    g = 0
    for _ in range(nvars):
        g += key & _XMASK
        key >>= _XBITS
    return g - nvars * _XBIAS


def _coeff_entries(coeff):
    """Normalize a coefficient into [(v-exponent, int-or-rational)]."""
    if isinstance(coeff, QScalar):
        return coeff.poly_items()
    c = rat(coeff)
    if not c:
        return []
    return [(0, int(c) if c.denominator == 1 else c)]


class LatticeError(ValueError):
    """An operation produced exponents finer than the configured lattice."""


class NotDivisibleError(ArithmeticError):
    """Exact division failed; carries the offending remainder as witness."""

    def __init__(self, message, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class LaurentPolynomial:
    __slots__ = ("nvars", "lattice", "terms")

    def __init__(self, nvars: int, terms: Dict[int, object] = None,
                 lattice: int = DEFAULT_LATTICE):
        self.nvars = nvars
        self.lattice = lattice
        self.terms = terms if terms is not None else {}

    # -- construction --------------------------------------------------

    @classmethod
    def zero(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(nvars, {}, lattice)

    @classmethod
    def constant(cls, nvars, coeff, lattice=DEFAULT_LATTICE):
        Z = zero_key(nvars)
        terms = {}
        for ve, c in _coeff_entries(coeff):
            terms[Z + ve] = c
        return cls(nvars, terms, lattice)

    @classmethod
    def one(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(nvars, {zero_key(nvars): 1}, lattice)

    @classmethod
    def monomial(cls, nvars, exponents, coeff=1, lattice=DEFAULT_LATTICE):
        """Monomial coeff * prod x_i^e_i; exponents may be Fractions."""
        scaled = cls.scale_exponents(exponents, lattice, nvars)
        base = pack(scaled)
        terms = {}
        for ve, c in _coeff_entries(coeff):
            terms[base + ve] = c
        return cls(nvars, terms, lattice)

    @classmethod
    def monomial_scaled(cls, nvars, scaled: Sequence[int], coeff=1,
                        lattice=DEFAULT_LATTICE):
        base = pack(scaled)
        terms = {}
        for ve, c in _coeff_entries(coeff):
            terms[base + ve] = c
        return cls(nvars, terms, lattice)

    @classmethod
    def variable(cls, nvars, i, power=1, lattice=DEFAULT_LATTICE):
        """x_i^power with 0-based index i."""
        exps = [0] * nvars
        exps[i] = power
        return cls.monomial(nvars, exps, 1, lattice)

    @staticmethod
    def scale_exponents(exponents, lattice, nvars=None) -> Exponent:
        if nvars is not None and len(exponents) != nvars:
            raise ValueError("exponent vector has wrong length")
        out = []
        for e in exponents:
            s = rat(e) * lattice
            if s.denominator != 1:
                raise LatticeError(
                    f"exponent {e} is finer than the 1/{lattice} lattice")
            out.append(int(s))
        return tuple(out)

    def exponent_fractions(self, scaled: Exponent) -> Tuple[Fraction, ...]:
        return tuple(Fraction(int(c), self.lattice) for c in scaled)

    def iter_terms(self):
        """Yield (scaled x-exponent tuple, QScalar coefficient) pairs."""
        for xk, vdict in sorted(self._by_x().items()):
            yield unpack_x(xk << _VBITS, self.nvars), QScalar.from_poly_items(
                vdict.items())

    def _by_x(self) -> Dict[int, Dict[int, object]]:
        out: Dict[int, Dict[int, object]] = {}
        for key, c in self.terms.items():
            xk = key >> _VBITS
            ve = (key & _VMASK) - _VBIAS
            d = out.get(xk)
            if d is None:
                out[xk] = {ve: c}
            else:
                d[ve] = c
        return out

    def coefficient(self, exponents) -> QScalar:
        """The QScalar coefficient of the x-monomial with given exponents."""
        base = pack(self.scale_exponents(exponents, self.lattice, self.nvars))
        items = []
        for key, c in self.terms.items():
            if key >> _VBITS == base >> _VBITS:
                items.append(((key & _VMASK) - _VBIAS, c))
        return QScalar.from_poly_items(items)

    # -- predicates and helpers ----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def _check_compatible(self, other: "LaurentPolynomial"):
        if self.nvars != other.nvars or self.lattice != other.lattice:
            raise LatticeError("mismatched variable count or exponent lattice")

    def _grlex(self, key: int):
        return (key_grade(key, self.nvars), key)

    def leading_x_exponent(self) -> Exponent:
        """Graded-lex maximal x-exponent across all terms (scaled)."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        n = self.nvars
        best = max(self.terms, key=self._grlex)
        return unpack_x(best, n)

    def __len__(self):
        return len(self.terms)

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, QScalar, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other, self.lattice)
        self._check_compatible(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return LaurentPolynomial(self.nvars, out, self.lattice)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(
            self.nvars, {e: -c for e, c in self.terms.items()}, self.lattice)

    def __sub__(self, other):
        if isinstance(other, (int, QScalar, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other, self.lattice)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, QScalar, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        if not self.terms or not other.terms:
            return LaurentPolynomial.zero(self.nvars, self.lattice)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if len(a) * len(b) >= 250_000:
            dense = _dense_multiply(a, b, self.nvars)
            if dense is not None:
                return LaurentPolynomial(self.nvars, dense, self.lattice)
        Z = zero_key(self.nvars)
        out = {}
        get = out.get
        for e1, c1 in a.items():
            e1 -= Z
            for e2, c2 in b.items():
                e = e1 + e2
                s = get(e)
                if s is None:
                    out[e] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return LaurentPolynomial(self.nvars, out, self.lattice)

    __rmul__ = __mul__

    def scale(self, coeff) -> "LaurentPolynomial":
        """Multiply by a scalar (int, Fraction or polynomial QScalar)."""
        entries = _coeff_entries(coeff)
        if not entries:
            return LaurentPolynomial.zero(self.nvars, self.lattice)
        if len(entries) == 1:
            ve, c = entries[0]
            if c == 1 and ve == 0:
                return self
            return LaurentPolynomial(
                self.nvars, {e + ve: c * cc for e, cc in self.terms.items()},
                self.lattice)
        out = {}
        get = out.get
        for ve, c in entries:
            for e, cc in self.terms.items():
                e2 = e + ve
                s = get(e2)
                if s is None:
                    out[e2] = c * cc
                else:
                    s = s + c * cc
                    if s:
                        out[e2] = s
                    else:
                        del out[e2]
        return LaurentPolynomial(self.nvars, out, self.lattice)

    def scale_by_qscalar_inverse(self, c: QScalar, power: int = 1):
        """Divide exactly by c^power for a polynomial QScalar c."""
        if c.is_monomial():
            ve, cc = c.monomial_parts()
            inv = rat(1) / rat(cc) ** power
            return self.v_shift(-ve * power).scale(
                int(inv) if inv.denominator == 1 else inv)
        den = LaurentPolynomial.constant(self.nvars, c, self.lattice)
        out = self
        for _ in range(power):
            out = out.exact_divide(den)
        return out

    def mul_monomial_key(self, key_offset: int, coeff=1) -> "LaurentPolynomial":
        """Multiply by coeff * (monomial with biasless packed offset)."""
        entries = _coeff_entries(coeff)
        if not entries:
            return LaurentPolynomial.zero(self.nvars, self.lattice)
        if len(entries) == 1:
            ve, c = entries[0]
            off = key_offset + ve
            if c == 1:
                out = {e + off: cc for e, cc in self.terms.items()}
            else:
                out = {e + off: c * cc for e, cc in self.terms.items()}
            return LaurentPolynomial(self.nvars, out, self.lattice)
        return self.mul_monomial_key(key_offset).scale(
            QScalar.from_poly_items([(ve, c) for ve, c in entries]))

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                (e, c), = self.terms.items()
                Z = zero_key(self.nvars)
                if c == 1:
                    cc = 1
                elif c == -1:
                    cc = 1 if n % 2 == 0 else -1
                else:
                    cc = rat(1, 1) / rat(c) ** (-n)
                    cc = int(cc) if cc.denominator == 1 else cc
                return LaurentPolynomial(
                    self.nvars, {n * (e - Z) + Z: cc}, self.lattice)
            raise ValueError("negative power of a non-monomial")
        out = LaurentPolynomial.one(self.nvars, self.lattice)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, QScalar, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other, self.lattice)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        if self.nvars != other.nvars or self.lattice != other.lattice:
            return False
        if len(self.terms) != len(other.terms):
            return False
        for e, c in self.terms.items():
            c2 = other.terms.get(e)
            if c2 is None or c2 != c:
                return False
        return True

    def __hash__(self):
        return hash((self.nvars, self.lattice,
                     tuple(sorted((e, rat(c)) for e, c in self.terms.items()))))

    # -- q-shifts and substitutions ---------------------------------------

    def qshift(self, m: Sequence[int]) -> "LaurentPolynomial":
        """Substitute x_i -> q^{m_i} x_i; monomial x^e gains q^{m.e}.

        With v packed into the key this is pure key arithmetic.
        """
        n = self.nvars
        if len(m) != n:
            raise ValueError("shift vector has wrong length")
        if not any(m):
            return self
        lat = self.lattice
        out = {}
        for key, c in self.terms.items():
            dot = 0
            k = key >> _VBITS
            for i in range(n - 1, -1, -1):
                mi = m[i]
                if mi:
                    dot += mi * ((k & _XMASK) - _XBIAS)
                k >>= _XBITS
            ve4 = 4 * dot
            if ve4 % lat:
                raise LatticeError("q-shift left the q^(1/4) lattice")
            out[key + ve4 // lat] = c
        return LaurentPolynomial(n, out, lat)

    def v_shift(self, ve: int) -> "LaurentPolynomial":
        """Multiply by v^ve."""
        if not ve:
            return self
        return LaurentPolynomial(
            self.nvars, {e + ve: c for e, c in self.terms.items()},
            self.lattice)

    def substitute(self, matrix: Sequence[Sequence], new_nvars: Optional[int] = None,
                   scale: Optional[Sequence[QScalar]] = None,
                   v_power: int = 1,
                   new_lattice: Optional[int] = None) -> "LaurentPolynomial":
        """Monomial substitution x_i -> scale_i * prod_j y_j^{M_ij}.

        ``matrix`` has one row per source variable, entries exact rationals.
        ``scale`` entries must be q-monomials when hit by fractional
        exponents.  ``v_power`` applies v -> v^{v_power} to all coefficients.
        """
        n_new = new_nvars if new_nvars is not None else self.nvars
        lat = new_lattice if new_lattice is not None else self.lattice
        if len(matrix) != self.nvars:
            raise ValueError("substitution matrix has wrong number of rows")
        rows = [tuple(rat(x) for x in row) for row in matrix]
        scales = None
        if scale is not None:
            scales = [s.monomial_parts() for s in scale]
        out = {}
        for key, c in self.terms.items():
            e = unpack_x(key, self.nvars)
            ve = unpack_v(key) * v_power
            efrac = [rat(x, self.lattice) for x in e]
            new_e = []
            for j in range(n_new):
                val = sum(efrac[i] * rows[i][j] for i in range(self.nvars)) * lat
                if val.denominator != 1:
                    raise LatticeError(
                        "substitution left the configured exponent lattice")
                new_e.append(int(val))
            if scales is not None:
                for (se, sc), ei in zip(scales, efrac):
                    sve = se * ei
                    if sve.denominator != 1:
                        raise LatticeError("scale power left the q^(1/4) lattice")
                    if sc != 1:
                        if ei.denominator != 1:
                            raise LatticeError(
                                "non-monomial scale raised to fractional power")
                        c = c * rat(sc) ** int(ei)
                        if hasattr(c, "denominator") and c.denominator == 1:
                            c = int(c)
                    ve += int(sve)
            nkey = pack(new_e, ve)
            s = out.get(nkey)
            if s is None:
                out[nkey] = c
            else:
                s = s + c
                if s:
                    out[nkey] = s
                else:
                    del out[nkey]
        return LaurentPolynomial(n_new, out, lat)

    def substitute_v_power(self, v_power: int) -> "LaurentPolynomial":
        """Apply v -> v^{v_power} to every coefficient."""
        out = {}
        for key, c in self.terms.items():
            ve = unpack_v(key)
            out[key + ve * (v_power - 1)] = c
        return LaurentPolynomial(self.nvars, out, self.lattice)

    def map_coefficients(self, fn: Callable[[QScalar], QScalar]):
        """Rebuild the polynomial with fn applied to each x-coefficient."""
        out = LaurentPolynomial.zero(self.nvars, self.lattice)
        terms = {}
        for xk, vdict in self._by_x().items():
            c2 = fn(QScalar.from_poly_items(vdict.items()))
            base = xk << _VBITS
            for ve, c in c2.poly_items():
                terms[base + _VBIAS + ve] = c
        return LaurentPolynomial(self.nvars, terms, self.lattice)

    def permute_variables(self, perm: Sequence[int]) -> "LaurentPolynomial":
        """Relabel x_i -> x_{perm[i]} (perm is a 0-based permutation)."""
        n = self.nvars
        out = {}
        for key, c in self.terms.items():
            e = unpack_x(key, n)
            ne = [0] * n
            for i, val in enumerate(e):
                ne[perm[i]] = val
            out[pack(ne, unpack_v(key))] = c
        return LaurentPolynomial(n, out, self.lattice)

    def invert_variables(self, which: Sequence[int]) -> "LaurentPolynomial":
        """Substitute x_i -> 1/x_i for the 0-based indices in ``which``."""
        flips = set(which)
        n = self.nvars
        out = {}
        for key, c in self.terms.items():
            e = unpack_x(key, n)
            out[pack(tuple(-v if i in flips else v for i, v in enumerate(e)),
                     unpack_v(key))] = c
        return LaurentPolynomial(n, out, self.lattice)

    # -- exact division ----------------------------------------------------

    def exact_divide(self, d: "LaurentPolynomial") -> "LaurentPolynomial":
        """Return u with self = d * u, or raise :class:`NotDivisibleError`.

        Long division by the graded-lex leading term.  Both operands are
        first shifted into the polynomial cone (in x and v); for an exact
        multiple the componentwise minimal exponents are additive, so the
        shifted quotient is again polynomial and the division terminates
        with zero remainder.
        """
        self._check_compatible(d)
        if d.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        n = self.nvars
        Z = zero_key(n)
        pmin_x, pmin_v = _corner(self.terms, n)
        dmin_x, dmin_v = _corner(d.terms, n)
        pmin = pack(pmin_x, pmin_v)
        dmin = pack(dmin_x, dmin_v)
        dshift = [(k - dmin + Z, c) for k, c in d.terms.items()]
        lt_d = max((k for k, _ in dshift), key=self._grlex)
        lc_d = dict(dshift)[lt_d]
        g_ltd = key_grade(lt_d, n)
        dred = [(k, c, key_grade(k, n)) for k, c in dshift if k != lt_d]
        exact_int = lc_d == 1 or lc_d == -1
        offset = pmin - dmin
        rem = {k - pmin + Z: c for k, c in self.terms.items()}
        heap = [(-key_grade(k, n), -k) for k in rem]
        heapq.heapify(heap)
        quo = {}
        while rem:
            while heap:
                g, nk = heap[0]
                e = -nk
                if e in rem:
                    break
                heapq.heappop(heap)
            g_e = -g
            # componentwise divisibility of the leading monomials (x and v)
            ek, dk = e, lt_d
            ok = (ek & _VMASK) >= (dk & _VMASK)
            if ok:
                ek >>= _VBITS
                dk >>= _VBITS
                for _ in range(n):
                    if (ek & _XMASK) < (dk & _XMASK):
                        ok = False
                        break
                    ek >>= _XBITS
                    dk >>= _XBITS
            if not ok:
                witness = LaurentPolynomial(
                    n, {k + pmin - Z: c for k, c in rem.items()}, self.lattice)
                raise NotDivisibleError("not a polynomial multiple", witness)
            qe = e - lt_d + Z
            g_qe = g_e - g_ltd
            if exact_int:
                qc = rem.pop(e) * lc_d  # lc_d is +-1
            else:
                qc = rat(rem.pop(e)) / rat(lc_d)
                if qc.denominator == 1:
                    qc = int(qc)
            quo[qe] = qc
            for de, dc, g_de in dred:
                e2 = qe + de - Z
                s = rem.get(e2)
                if s is None:
                    rem[e2] = -qc * dc
                    heapq.heappush(heap, (-(g_qe + g_de), -e2))
                else:
                    s = s - qc * dc
                    if s:
                        rem[e2] = s
                    else:
                        del rem[e2]
        # quo keys are biased cone keys; offset is the biasless corner shift
        return LaurentPolynomial(
            n, {k + offset: c for k, c in quo.items()}, self.lattice)

    def divisible_by(self, d: "LaurentPolynomial") -> bool:
        try:
            self.exact_divide(d)
            return True
        except NotDivisibleError:
            return False

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, xs: Sequence, v):
        """Exact rational evaluation with x_i^(1/lattice) = root of xs[i].

        Fractional lattice exponents must evaluate exactly, so points
        hitting them should be perfect lattice-th powers.
        """
        xs = [rat(x) for x in xs]
        vv = rat(v)
        roots = [None] * self.nvars
        total = rat(0)
        for key, c in self.terms.items():
            e = unpack_x(key, self.nvars)
            term = rat(c) * vv ** unpack_v(key)
            for i, (xi, ei) in enumerate(zip(xs, e)):
                if ei == 0:
                    continue
                q, r = divmod(ei, self.lattice)
                if r:
                    if roots[i] is None:
                        roots[i] = _exact_root(xi, self.lattice)
                    term = term * roots[i] ** ei
                else:
                    term = term * xi ** q
            total = total + term
        return total

    # -- rendering -----------------------------------------------------------

    def _mono_str(self, e: Exponent) -> str:
        bits = []
        for i, ei in enumerate(e):
            if ei == 0:
                continue
            f = Fraction(ei, self.lattice)
            if f == 1:
                bits.append(f"x{i + 1}")
            elif f.denominator == 1:
                bits.append(f"x{i + 1}^{f.numerator}")
            else:
                bits.append(f"x{i + 1}^({f.numerator}/{f.denominator})")
        return "*".join(bits)

    def sorted_x_terms(self):
        """(scaled x-exponent, QScalar) pairs, graded-lex descending."""
        by_x = self._by_x()
        keys = sorted(by_x, key=lambda xk: (key_grade(xk << _VBITS, self.nvars),
                                            xk), reverse=True)
        return [(unpack_x(xk << _VBITS, self.nvars),
                 QScalar.from_poly_items(by_x[xk].items())) for xk in keys]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_x_terms():
            mono = self._mono_str(e)
            cs = str(c)
            if mono:
                if cs == "1":
                    body = mono
                elif cs == "-1":
                    body = f"-{mono}"
                else:
                    if " " in cs or "/" in cs:
                        cs = f"({cs})"
                    body = f"{cs}*{mono}"
            else:
                body = cs if " " not in cs else f"({cs})"
            if bits and not body.startswith("-"):
                bits.append("+ " + body)
            elif bits:
                bits.append("- " + body[1:])
            else:
                bits.append(body)
        return " ".join(bits)

    def __repr__(self):
        return f"LaurentPolynomial({self})"

    def to_json(self):
        out = []
        for e, c in self.sorted_x_terms():
            fr = self.exponent_fractions(e)
            out.append([[[f.numerator, f.denominator] for f in fr],
                        *c.to_json()])
        return out

    @classmethod
    def from_json(cls, nvars, data, lattice=DEFAULT_LATTICE):
        total = cls.zero(nvars, lattice)
        for ev, num, den in data:
            exps = [Fraction(a, b) for a, b in ev]
            coeff = QScalar.from_json([num, den])
            total = total + cls.monomial(nvars, exps, coeff, lattice)
        return total


_DENSE_BOX_LIMIT = 48_000_000


def _dense_multiply(a: Dict[int, object], b: Dict[int, object], n: int):
    """Dense vectorized product of two large integer-coefficient polys.

    Scatter-adds b's coefficient vector into a dense box once per a-term;
    indices within one scatter are distinct, so ``dense[idx] += vals`` is
    safe.  Returns None (caller falls back to the sparse path) when
    coefficients are not machine integers, the product box is too large,
    or the int64 coefficient bound cannot be guaranteed.
    """
    amax = 0
    for c in a.values():
        if type(c) is not int:
            return None
        if -amax > c or c > amax:
            amax = abs(c)
    bmax = 0
    for c in b.values():
        if type(c) is not int:
            return None
        if -bmax > c or c > bmax:
            bmax = abs(c)
    if amax * bmax * min(len(a), len(b)) >= (1 << 62):
        return None

    def decompose(terms):
        cols = np.empty((n + 1, len(terms)), dtype=np.int64)
        vals = np.empty(len(terms), dtype=np.int64)
        for j, (key, c) in enumerate(terms.items()):
            vals[j] = c
            cols[n, j] = (key & _VMASK) - _VBIAS
            k = key >> _VBITS
            for i in range(n - 1, -1, -1):
                cols[i, j] = (k & _XMASK) - _XBIAS
                k >>= _XBITS
        return cols, vals

    acols, avals = decompose(a)
    bcols, bvals = decompose(b)
    # supports usually live on a sublattice; divide out the common step
    lo = []
    steps = []
    spans = []
    box = 1
    for i in range(n + 1):
        la = int(acols[i].min())
        lb = int(bcols[i].min())
        g = int(np.gcd(np.gcd.reduce(acols[i] - la),
                       np.gcd.reduce(bcols[i] - lb)))
        g = g if g > 0 else 1
        acols[i] = (acols[i] - la) // g
        bcols[i] = (bcols[i] - lb) // g
        hi = int(acols[i].max() + bcols[i].max())
        lo.append(la + lb)
        steps.append(g)
        spans.append(hi + 1)
        box *= hi + 1
        if box > _DENSE_BOX_LIMIT:
            return None
    strides = [0] * (n + 1)
    acc = 1
    for i in range(n, -1, -1):
        strides[i] = acc
        acc *= spans[i]
    aidx = np.zeros(len(avals), dtype=np.int64)
    bidx = np.zeros(len(bvals), dtype=np.int64)
    for i in range(n + 1):
        aidx += acols[i] * strides[i]
        bidx += bcols[i] * strides[i]
    dense = np.zeros(box, dtype=np.int64)
    for j in range(len(avals)):
        dense[aidx[j] + bidx] += avals[j] * bvals
    nz = np.nonzero(dense)[0]
    coeffs = dense[nz]
    out = {}
    for pos, c in zip(nz.tolist(), coeffs.tolist()):
        key = 0
        rem = pos
        for i in range(n + 1):
            f = (rem // strides[i]) * steps[i] + lo[i]
            rem %= strides[i]
            if i < n:
                key = (key << _XBITS) | (f + _XBIAS)
            else:
                key = (key << _VBITS) | (f + _VBIAS)
        out[key] = c
    return out


def _corner(terms: Dict[int, object], n: int):
    """Componentwise minimal (x-exponents, v-exponent) over packed keys."""
    lo = None
    vlo = None
    for key in terms:
        ve = (key & _VMASK) - _VBIAS
        if vlo is None or ve < vlo:
            vlo = ve
        k = key >> _VBITS
        if lo is None:
            lo = [(k >> (_XBITS * (n - 1 - i)) & _XMASK) - _XBIAS
                  for i in range(n)]
        else:
            for i in range(n):
                f = ((k >> (_XBITS * (n - 1 - i))) & _XMASK) - _XBIAS
                if f < lo[i]:
                    lo[i] = f
    return lo, vlo


def _exact_root(x, lattice):
    """lattice-th root of an exact rational, required to be exact."""
    f = Fraction(x)
    num = round(f.numerator ** (1.0 / lattice))
    den = round(f.denominator ** (1.0 / lattice))
    if num ** lattice != f.numerator or den ** lattice != f.denominator:
        raise ValueError(f"{x} has no exact 1/{lattice} root for evaluation")
    return rat(num, den)
