"""Construction of the generalized Macdonald operators M_{a,k}.

Seeds are exact transcriptions of the t -> infinity limits of the
Macdonald / van Diejen difference operators together with their discrete
time evolution:

* type A:  M_{a,k} = sum_{|I|=a} (prod_{i in I} x_i)^k
           prod_{i in I, j not in I} x_i/(x_i - x_j) Gamma_I
* type B:  node 1 first-order operator (single squared shifts);
           for N = 2 the spinor node carries explicit even/odd-time
           operators with shifts Gamma_1^{2e1} Gamma_2^{2e2}.
* type C:  node 1 in even and odd time flavours (the short-root parity
           split), node N of order N with shifts Gamma^eps.
* type D:  node 1 plus the two spinor nodes (sign patterns of product
           +-1, shifts Gamma^eps, prefactors prod x_i^{k eps_i / 2}).

Non-seed nodes come from the quantum determinant of the node-1 family,
expanded through the generating function prod_{i<j}(1 - qhat u_j/u_i):
each subset S of the pair set contributes (-qhat)^{|S|} times the ordered
product of M_{1, k_i - d_i(S)} with
d_i(S) = #{h<i : (h,i) in S} - #{j>i : (i,j) in S}.  The chain nodes of
B, C, D use qhat = q^2, type A uses qhat = q.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from typing import Callable, Dict, Sequence, Tuple

from .laurent import LaurentPolynomial
from .operators import DifferenceOperator
from .ratfun import RationalFunction
from .rootdata import AlgebraType
from .scalars import ONE, QScalar, qpow

HALF = Fraction(1, 2)


class OperatorNotConstructible(ValueError):
    """Requested operator has no available construction."""


def _mono(nvars, exps, qc=ONE) -> LaurentPolynomial:
    return LaurentPolynomial.monomial(nvars, exps, qc)


def _coeff(nvars, exps, qc, binomials) -> RationalFunction:
    return RationalFunction.monomial_over_binomials(
        _mono(nvars, exps, qc), binomials)


def _x_pow_minus_one(nvars, i, e) -> LaurentPolynomial:
    """x_i^e - 1."""
    exps = [0] * nvars
    exps[i] = e
    return _mono(nvars, exps) - LaurentPolynomial.one(nvars)


def _q2x_pow_minus_one(nvars, i, e) -> LaurentPolynomial:
    """q^2 x_i^e - 1."""
    exps = [0] * nvars
    exps[i] = e
    return _mono(nvars, exps, qpow(2)) - LaurentPolynomial.one(nvars)


def _xx_minus_one(nvars, i, ei, j, ej, q2=False) -> LaurentPolynomial:
    """(q^2) x_i^{ei} x_j^{ej} - 1."""
    exps = [0] * nvars
    exps[i] = ei
    exps[j] = ej
    return _mono(nvars, exps, qpow(2) if q2 else ONE) \
        - LaurentPolynomial.one(nvars)


def _x_minus_x(nvars, i, e, j) -> LaurentPolynomial:
    """x_i^e - x_j."""
    exps = [0] * nvars
    exps[i] = e
    a = _mono(nvars, exps)
    exps2 = [0] * nvars
    exps2[j] = 1
    return a - _mono(nvars, exps2)


def type_a_operator(N: int, a: int, k: int) -> DifferenceOperator:
    """The type-A operator M_{a,k} on N variables (gl_N convention)."""
    if not 1 <= a <= N:
        raise ValueError(f"node {a} out of range for A with N={N}")
    terms = {}
    for subset in itertools.combinations(range(N), a):
        inside = set(subset)
        exps = [0] * N
        binoms = []
        for i in subset:
            exps[i] = k + (N - a)
            for j in range(N):
                if j not in inside:
                    binoms.append(_x_minus_x(N, i, 1, j))
        shift = tuple(1 if i in inside else 0 for i in range(N))
        terms[shift] = _coeff(N, exps, ONE, binoms)
    return DifferenceOperator(N, terms)


def central_elements(N: int) -> Tuple[DifferenceOperator, DifferenceOperator]:
    """The central pair (A, Delta) = (x_1...x_N, Gamma_1...Gamma_N)."""
    A = DifferenceOperator.from_coefficient(
        RationalFunction.from_laurent(_mono(N, [1] * N)))
    Delta = DifferenceOperator.shift(N, (1,) * N)
    return A, Delta


# ----------------------------------------------------------------------
# explicit seeds
# ----------------------------------------------------------------------


def _seed_b_node1(N: int, k: int) -> DifferenceOperator:
    terms = {}
    for i in range(N):
        for eps in (1, -1):
            exps = [1] * N
            exps[i] = eps * (k + 1 + 2 * (N - 1))
            binoms = [_x_pow_minus_one(N, i, eps)]
            for j in range(N):
                if j != i:
                    binoms.append(_xx_minus_one(N, i, eps, j, 1))
                    binoms.append(_x_minus_x(N, i, eps, j))
            shift = tuple(2 * eps if j == i else 0 for j in range(N))
            terms[shift] = _coeff(N, exps, ONE, binoms)
    return DifferenceOperator(N, terms)


def _seed_d_node1(N: int, k: int) -> DifferenceOperator:
    terms = {}
    for i in range(N):
        for eps in (1, -1):
            exps = [1] * N
            exps[i] = eps * (k + 2 * (N - 1))
            binoms = []
            for j in range(N):
                if j != i:
                    binoms.append(_xx_minus_one(N, i, eps, j, 1))
                    binoms.append(_x_minus_x(N, i, eps, j))
            shift = tuple(2 * eps if j == i else 0 for j in range(N))
            terms[shift] = _coeff(N, exps, ONE, binoms)
    return DifferenceOperator(N, terms)


def _seed_d_spinor(N: int, node: int, k: int) -> DifferenceOperator:
    want = 1 if node == N else -1
    terms = {}
    for eps in itertools.product((1, -1), repeat=N):
        parity = 1
        for e in eps:
            parity *= e
        if parity != want:
            continue
        exps = [Fraction(k, 2) * e + (N - 1) * e for e in eps]
        binoms = [_xx_minus_one(N, i, eps[i], j, eps[j])
                  for i in range(N) for j in range(i + 1, N)]
        terms[eps] = _coeff(N, exps, ONE, binoms)
    return DifferenceOperator(N, terms)


def _seed_c_node1(N: int, t: int) -> DifferenceOperator:
    """Type C node-1 operator at integer time t (parity-split seed).

    Even times carry the additive constant q^{-t}; both parities subtract
    the inner constant from the shift block, so every term sits at a
    genuine Gamma^0 or Gamma_i^{+-2} shift.
    """
    even = t % 2 == 0
    kk2 = t if even else t + 1  # the inner constant is q^{-kk2}
    terms: Dict[Tuple[int, ...], RationalFunction] = {}
    const = RationalFunction.from_laurent(
        LaurentPolynomial.constant(N, qpow(-kk2))) if even else \
        RationalFunction.zero(N)
    for i in range(N):
        for eps in (1, -1):
            binoms = [_x_pow_minus_one(N, i, 2 * eps),
                      _q2x_pow_minus_one(N, i, 2 * eps)]
            for j in range(N):
                if j != i:
                    binoms.append(_xx_minus_one(N, i, eps, j, 1))
                    binoms.append(_x_minus_x(N, i, eps, j))
            base_i = eps * (4 + 2 * (N - 1))  # x_i power of the fraction block
            exps_shift = [1] * N
            exps_shift[i] = base_i + t * eps
            shift = tuple(2 * eps if j == i else 0 for j in range(N))
            coeff = _coeff(N, exps_shift, qpow(2), binoms)
            prev = terms.get(shift)
            terms[shift] = coeff if prev is None else prev + coeff
            exps_zero = [1] * N
            exps_zero[i] = base_i - (0 if even else eps)
            const = const + _coeff(N, exps_zero, -qpow(2 - kk2), binoms)
    const = const.simplified()
    if not const.is_zero():
        terms[(0,) * N] = const
    return DifferenceOperator(N, {m: c for m, c in terms.items()
                                  if not c.is_zero()})


def _seed_c_nodeN(N: int, k: int) -> DifferenceOperator:
    terms = {}
    for eps in itertools.product((1, -1), repeat=N):
        exps = [e * (k + 2 + (N - 1)) for e in eps]
        binoms = [_x_pow_minus_one(N, i, 2 * eps[i]) for i in range(N)]
        binoms += [_xx_minus_one(N, i, eps[i], j, eps[j])
                   for i in range(N) for j in range(i + 1, N)]
        terms[eps] = _coeff(N, exps, ONE, binoms)
    return DifferenceOperator(N, terms)


def _seed_b2_spinor(t: int) -> DifferenceOperator:
    """The rank-2 type-B spinor-node operator at integer time t."""
    N = 2
    even = t % 2 == 0
    kk = t // 2 if even else (t + 1) // 2
    terms: Dict[Tuple[int, ...], RationalFunction] = {}
    const = RationalFunction.from_laurent(
        LaurentPolynomial.constant(N, qpow(-2 * kk))) if even else \
        RationalFunction.zero(N)
    for eps in itertools.product((1, -1), repeat=2):
        e1, e2 = eps
        binoms = [_x_pow_minus_one(N, 0, e1), _x_pow_minus_one(N, 1, e2),
                  _xx_minus_one(N, 0, e1, 1, e2),
                  _xx_minus_one(N, 0, e1, 1, e2, q2=True)]
        # fraction block numerator: x1^{3 e1} x2^{3 e2} * q^2
        shift_exps = [3 * e1 + Fraction(t, 2) * e1, 3 * e2 + Fraction(t, 2) * e2]
        shift = (2 * e1, 2 * e2)
        coeff = _coeff(N, shift_exps, qpow(2), binoms)
        prev = terms.get(shift)
        terms[shift] = coeff if prev is None else prev + coeff
        zero_exps = [3 * e1, 3 * e2]
        if not even:
            zero_exps = [3 * e1 - HALF * e1, 3 * e2 - HALF * e2]
        const = const + _coeff(N, zero_exps, -qpow(2 - 2 * kk), binoms)
    const = const.simplified()
    if not const.is_zero():
        terms[(0, 0)] = const
    return DifferenceOperator(N, {m: c for m, c in terms.items()
                                  if not c.is_zero()})


def seed_operator(g: AlgebraType, a: int, k: int) -> DifferenceOperator:
    """Explicit operator for a seed node of the given type."""
    N = g.rank
    if g.family == "A":
        return type_a_operator(N, a, k)
    if g.family == "B":
        if a == 1:
            return _seed_b_node1(N, k)
        if a == 2 == N:
            return _seed_b2_spinor(k)
        raise OperatorNotConstructible(
            f"type B node {a} is not a seed (rank {N})")
    if g.family == "C":
        if a == 1:
            return _seed_c_node1(N, k)
        if a == N:
            return _seed_c_nodeN(N, k)
        raise OperatorNotConstructible(f"type C node {a} is not a seed")
    if a == 1:
        return _seed_d_node1(N, k)
    if a in (N - 1, N):
        return _seed_d_spinor(N, a, k)
    raise OperatorNotConstructible(f"type D node {a} is not a seed")


# ----------------------------------------------------------------------
# quantum determinant
# ----------------------------------------------------------------------


def quantum_determinant(entry: Callable[[int], DifferenceOperator],
                        keys: Sequence[int], qpower: int) -> DifferenceOperator:
    """Generating-function expansion of the quantum determinant.

    ``entry(t)`` supplies the operator family indexed by integer time;
    ``qpower`` selects qhat = q^qpower in the Vandermonde-type factor.
    """
    a = len(keys)
    if a < 1:
        raise ValueError("quantum determinant needs at least one key")
    first = entry(keys[0])
    if a == 1:
        return first
    pairs = [(i, j) for i in range(a) for j in range(i + 1, a)]
    pieces = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        delta = [0] * a
        size = 0
        for chosen, (i, j) in zip(bits, pairs):
            if chosen:
                size += 1
                delta[i] -= 1
                delta[j] += 1
        prod = None
        for pos in range(a):
            op = entry(keys[pos] - delta[pos])
            prod = op if prod is None else prod.compose(op)
        sign = qpow(qpower * size) if size % 2 == 0 else -qpow(qpower * size)
        pieces.append(prod.scale(sign))
    return DifferenceOperator.sum_list(pieces)


# ----------------------------------------------------------------------
# the full builder, memoized
# ----------------------------------------------------------------------

_cache: Dict[Tuple[str, int, int, int], DifferenceOperator] = {}
_cache_lock = threading.Lock()


def build_M(g: AlgebraType, a: int, k: int) -> DifferenceOperator:
    """The operator M_{a,k} for any node, via seeds and quantum determinants."""
    if not 1 <= a <= g.nodes:
        raise ValueError(f"node {a} out of range for {g}")
    key = (g.family, g.rank, a, k)
    with _cache_lock:
        cached = _cache.get(key)
    if cached is not None:
        return cached
    N = g.rank
    if g.family == "A":
        op = type_a_operator(N, a, k)
    elif g.family == "B":
        if a == 1:
            op = _seed_b_node1(N, k)
        elif a <= N - 1:
            op = quantum_determinant(lambda t: build_M(g, 1, t), (k,) * a, 2)
        elif k % 2 == 0:
            op = quantum_determinant(lambda t: build_M(g, 1, t),
                                     (k // 2,) * N, 2)
        elif N == 2:
            op = _seed_b2_spinor(k)
        else:
            raise OperatorNotConstructible(
                f"type B rank {N} spinor node at odd time {k}: no explicit "
                f"construction is available")
    elif g.family == "C":
        if a == 1:
            op = _seed_c_node1(N, k)
        elif a == N:
            op = _seed_c_nodeN(N, k)
        else:
            op = quantum_determinant(lambda t: build_M(g, 1, t), (k,) * a, 2)
    else:
        if a == 1:
            op = _seed_d_node1(N, k)
        elif a in (N - 1, N):
            op = _seed_d_spinor(N, a, k)
        else:
            op = quantum_determinant(lambda t: build_M(g, 1, t), (k,) * a, 2)
    with _cache_lock:
        _cache[key] = op
    return op


def clear_cache():
    with _cache_lock:
        _cache.clear()


def boundary_M(g: AlgebraType, a: int, k: int) -> DifferenceOperator:
    """M with the boundary conventions M_{0,k} = 1 (and A: M_{N+1,k} = 0)."""
    if a == 0:
        return DifferenceOperator.identity(g.nvars)
    if g.family == "A" and a == g.nodes + 1:
        return DifferenceOperator.zero(g.nvars)
    return build_M(g, a, k)


def time_evolution_data(g: AlgebraType, a: int, t: int):
    """(prefactor, base time, Gaussian power, step) reproducing M_{a,t}.

    M_{a,t} = prefactor * gaussian_conjugate(M_{a,base}, power, step).
    """
    N = g.rank
    if g.family == "A":
        return qpow(Fraction(-a * t, 2)), 0, t, 2
    if g.family == "B":
        if a <= N - 1:
            return qpow(-t * a), 0, t, 1
        if N != 2 and t % 2:
            raise OperatorNotConstructible("no evolution data for odd "
                                           "spinor times at rank >= 3")
        if t % 2 == 0:
            kk = t // 2
            return qpow(-2 * kk), 0, kk, 1
        kk = (t + 1) // 2
        return qpow(-2 * kk), -1, kk, 1
    if g.family == "C":
        if a == N:
            return qpow(Fraction(-t * N, 2)), 0, t, 2
        eta = t % 2
        kk = (t - eta) // 2
        return qpow(-2 * kk * a), eta, kk, 2
    if a <= N - 2:
        return qpow(-t * a), 0, t, 1
    return qpow(Fraction(-t * N, 4)), 0, t, 1
