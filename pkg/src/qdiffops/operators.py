"""q-difference operators: rational coefficients times integer shifts.

An operator is a finite sum  sum_m  c_m(x) Gamma^m  with c_m a
:class:`~qdiffops.ratfun.RationalFunction` and Gamma^m the monomial shift
x_i -> q^{m_i} x_i.  The stored normal form keeps all coefficients on the
left of the shifts, which makes it unique; composition uses

    f Gamma^m  o  g Gamma^n  =  f (Gamma^m g) Gamma^{m+n}.

Gaussian conjugation (discrete time evolution) acts on the normal form by

    Gamma^m  ->  q^{k s |m|^2 / 4} prod_i x_i^{k s m_i / 2} Gamma^m

with s the step parameter: s=1 conjugates by the k-th power of the
Gaussian exp(sum (log x_i)^2 / (4 log q)), while s=2 gives its square,
which also realizes the sharper type-A Gaussian convention.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple, Union

from .laurent import DEFAULT_LATTICE, LaurentPolynomial
from .ratfun import RationalFunction
from .scalars import ONE, QScalar

ShiftVector = Tuple[int, ...]


class DifferenceOperator:
    __slots__ = ("nvars", "lattice", "terms")

    def __init__(self, nvars: int, terms: Dict[ShiftVector, RationalFunction] = None,
                 lattice: int = DEFAULT_LATTICE):
        self.nvars = nvars
        self.lattice = lattice
        self.terms = terms if terms is not None else {}

    # -- construction ---------------------------------------------------

    @classmethod
    def zero(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(nvars, {}, lattice)

    @classmethod
    def identity(cls, nvars, lattice=DEFAULT_LATTICE):
        return cls(nvars, {(0,) * nvars: RationalFunction.one(nvars, lattice)},
                   lattice)

    @classmethod
    def shift(cls, nvars, m: Sequence[int], coeff=None, lattice=DEFAULT_LATTICE):
        """coeff * Gamma^m (coeff defaults to 1)."""
        if coeff is None:
            coeff = RationalFunction.one(nvars, lattice)
        elif isinstance(coeff, LaurentPolynomial):
            coeff = RationalFunction.from_laurent(coeff)
        if coeff.is_zero():
            return cls.zero(nvars, lattice)
        return cls(nvars, {tuple(int(v) for v in m): coeff}, lattice)

    @classmethod
    def from_coefficient(cls, coeff: Union[RationalFunction, LaurentPolynomial],
                         lattice=DEFAULT_LATTICE):
        nvars = coeff.nvars
        return cls.shift(nvars, (0,) * nvars, coeff, lattice)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # -- module structure -------------------------------------------------

    def _check(self, other: "DifferenceOperator"):
        if self.nvars != other.nvars or self.lattice != other.lattice:
            raise ValueError("operators live in different variable environments")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else (s + c).simplified()
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return DifferenceOperator(self.nvars, out, self.lattice)

    __radd__ = __add__

    def __neg__(self):
        return DifferenceOperator(self.nvars,
                                  {m: -c for m, c in self.terms.items()},
                                  self.lattice)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff) -> "DifferenceOperator":
        if not isinstance(coeff, QScalar):
            coeff = QScalar.from_rational(coeff)
        if coeff.is_zero():
            return DifferenceOperator.zero(self.nvars, self.lattice)
        if coeff.is_one():
            return self
        return DifferenceOperator(self.nvars,
                                  {m: c.scale(coeff) for m, c in self.terms.items()},
                                  self.lattice)

    def __mul__(self, other):
        if isinstance(other, (int, QScalar)):
            return self.scale(other)
        if isinstance(other, DifferenceOperator):
            return self.compose(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, QScalar)):
            return self.scale(other)
        return NotImplemented

    # -- composition and application ------------------------------------------

    def compose(self, other: "DifferenceOperator",
                shift_filter=None) -> "DifferenceOperator":
        """Operator product self o other in normal form.

        ``shift_filter`` restricts the computed output shifts; the result
        is then only a partial normal form for use in identity checks.
        """
        self._check(other)
        buckets: Dict[ShiftVector, list] = {}
        for ma, ca in self.terms.items():
            mono_a = len(ca.num.terms) == 1
            for mb, cb in other.terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                if shift_filter is not None and not shift_filter(m):
                    continue
                buckets.setdefault(m, []).append(
                    (ca * cb.qshift(ma),
                     mono_a or len(cb.num.terms) == 1))
        final = {}
        for m, items in buckets.items():
            if len(items) == 1:
                # a single product of reduced coefficients only needs
                # re-reduction when both numerators were non-monomial
                c, mono = items[0]
                if not mono:
                    c = c.simplified()
            else:
                c = RationalFunction.sum_list(
                    [it[0] for it in items]).simplified()
            if not c.is_zero():
                final[m] = c
        return DifferenceOperator(self.nvars, final, self.lattice)

    @staticmethod
    def sum_list(ops: Sequence["DifferenceOperator"]) -> "DifferenceOperator":
        """Sum many operators with one batched reduction per shift."""
        if not ops:
            raise ValueError("sum_list needs at least one operator")
        nvars, lattice = ops[0].nvars, ops[0].lattice
        buckets: Dict[ShiftVector, list] = {}
        for op in ops:
            ops[0]._check(op)
            for m, c in op.terms.items():
                buckets.setdefault(m, []).append(c)
        final = {}
        for m, items in buckets.items():
            c = (items[0] if len(items) == 1
                 else RationalFunction.sum_list(items)).simplified()
            if not c.is_zero():
                final[m] = c
        return DifferenceOperator(nvars, final, lattice)

    def apply(self, f: Union[LaurentPolynomial, RationalFunction]) -> RationalFunction:
        """Apply to a function: sum_m c_m * (Gamma^m f)."""
        if isinstance(f, LaurentPolynomial):
            f = RationalFunction.from_laurent(f)
        items = [c * f.qshift(m) for m, c in self.terms.items()]
        items = [r for r in items if not r.is_zero()]
        if not items:
            return RationalFunction.zero(self.nvars, self.lattice)
        return RationalFunction.sum_list(items).simplified()

    # -- comparison ----------------------------------------------------------

    def equal(self, other: "DifferenceOperator") -> bool:
        self._check(other)
        for m in set(self.terms) | set(other.terms):
            a = self.terms.get(m)
            b = other.terms.get(m)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not a.equal(b):
                return False
        return True

    def __eq__(self, other):
        if isinstance(other, DifferenceOperator):
            return self.equal(other)
        return NotImplemented

    def first_difference(self, other: "DifferenceOperator"):
        """First shift (lex order) whose coefficients differ, with both values.

        Returns None when the operators are equal.
        """
        self._check(other)
        zero = RationalFunction.zero(self.nvars, self.lattice)
        for m in sorted(set(self.terms) | set(other.terms)):
            a = self.terms.get(m, zero)
            b = other.terms.get(m, zero)
            if not a.equal(b):
                return m, a, b
        return None

    # -- automorphisms ----------------------------------------------------------

    def gaussian_conjugate(self, k: int, step: int = 1) -> "DifferenceOperator":
        """Conjugate by the k-th Gaussian power (see module docstring)."""
        if k == 0:
            return self
        if step not in (1, 2):
            raise ValueError("step must be 1 or 2")
        out = {}
        for m, c in self.terms.items():
            ve = k * step * sum(v * v for v in m)  # v-exponent of q^{ks|m|^2/4}
            if any((2 * k * step * v * self.lattice) % 4 for v in m):
                raise ValueError("Gaussian twist left the exponent lattice")
            xexp = tuple(2 * k * step * v * self.lattice // 4 for v in m)
            mono = LaurentPolynomial.monomial_scaled(self.nvars, xexp,
                                                     QScalar.v_power(ve),
                                                     self.lattice)
            out[m] = c * mono
        return DifferenceOperator(self.nvars, out, self.lattice)

    def substitute(self, matrix, shift_map, new_nvars=None,
                   v_power: int = 1) -> "DifferenceOperator":
        """Change of variables: coefficients via ``matrix``, shifts via
        ``shift_map`` (a callable on shift vectors returning integer tuples).
        """
        out: Dict[ShiftVector, RationalFunction] = {}
        for m, c in self.terms.items():
            nm = tuple(shift_map(m))
            if any(not isinstance(v, int) for v in nm):
                raise ValueError(f"shift image {nm} is not integral")
            nc = c.substitute(matrix, new_nvars, v_power)
            s = out.get(nm)
            s = nc if s is None else s + nc
            out[nm] = s
        final = {}
        for m, c in out.items():
            c = c.simplified()
            if not c.is_zero():
                final[m] = c
        return DifferenceOperator(new_nvars if new_nvars else self.nvars,
                                  final, self.lattice)

    def weyl_image(self, perm: Sequence[int], flips: Sequence[int]
                   ) -> "DifferenceOperator":
        """Image under x_i -> x_{perm[i]}^{+-1} with matching shift action."""
        n = self.nvars
        matrix = [[0] * n for _ in range(n)]
        for i in range(n):
            matrix[i][perm[i]] = -1 if perm[i] in set(flips) else 1
        out = {}
        for m, c in self.terms.items():
            nm = [0] * n
            for i, v in enumerate(m):
                nm[perm[i]] = -v if perm[i] in set(flips) else v
            out[tuple(nm)] = c.substitute(matrix)
        return DifferenceOperator(n, out, self.lattice)

    def is_weyl_symmetric(self, perm: Sequence[int], flips: Sequence[int]) -> bool:
        return self.equal(self.weyl_image(perm, flips))

    # -- rendering ----------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms):
            shift = "*".join(
                (f"G{i + 1}" if e == 1 else f"G{i + 1}^{e}")
                for i, e in enumerate(m) if e)
            c = str(self.terms[m])
            if shift:
                bits.append(f"[{c}] {shift}")
            else:
                bits.append(f"[{c}]")
        return "  +  ".join(bits)

    def __repr__(self):
        return f"DifferenceOperator({len(self.terms)} terms in {self.nvars} vars)"

    def to_json(self):
        return {
            "nvars": self.nvars,
            "lattice": self.lattice,
            "terms": [{"shift": list(m), "coeff": self.terms[m].to_json()}
                      for m in sorted(self.terms)],
        }

    @classmethod
    def from_json(cls, data) -> "DifferenceOperator":
        nvars = data["nvars"]
        lattice = data.get("lattice", DEFAULT_LATTICE)
        terms = {}
        for item in data["terms"]:
            m = tuple(item["shift"])
            terms[m] = RationalFunction.from_json(nvars, item["coeff"], lattice)
        return cls(nvars, terms, lattice)


def linear_combination_is_zero(terms, shift_filter=None):
    """Exact zero test for sum_i coeff_i * (A_i1 o A_i2 o ...).

    Each product is brought to (possibly shift-filtered) normal form
    separately, so every bucket ends with one reduced coefficient per
    summand; those few are then cleared over their common denominator.
    Returns None when the combination vanishes, else a (shift, nonzero
    difference) witness.

    ``shift_filter`` (optional) restricts the checked output shifts; the
    caller owns the symmetry argument that makes the restriction sound.
    """
    buckets: Dict[ShiftVector, list] = {}
    for coeff, ops in terms:
        ops = list(ops)
        while len(ops) > 2:
            ops[:2] = [ops[0].compose(ops[1])]
        if len(ops) == 2:
            total = ops[0].compose(ops[1], shift_filter=shift_filter)
        else:
            total = ops[0]
        for m, c in total.terms.items():
            if shift_filter is not None and not shift_filter(m):
                continue
            buckets.setdefault(m, []).append(c.scale(coeff))
    for m in sorted(buckets):
        items = [c for c in buckets[m] if not c.is_zero()]
        if not items:
            continue
        s = RationalFunction.sum_list(items)
        if not s.num.is_zero():
            return m, s.simplified()
    return None
