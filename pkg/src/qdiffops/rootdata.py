"""Static data for the classical series A, B, C, D.

Weights live in the orthogonal basis e_1..e_N as tuples of exact
Fractions.  Type A is exposed in gl_N form: N variables and N nodes, with
node N central; its fundamental weights are omega_a = e_1 + ... + e_a.

The q-commutation matrix ``lambda_matrix`` stores the normalization

    A:  lambda_ab = min(a,b) - ab/N          (extended by lambda_aN = 0)
    B:  lambda_ab = 2 min(a,b), b < N;  min(a,b), b = N
    C:  lambda_ab = 2 min(a,b), a < N;  min(a,b), a = N
    D:  lambda_ab = 2 min(a,b) on the chain; b / a on mixed pairs;
        N/2 resp. (N-2)/2 on equal resp. distinct spin nodes,

which satisfies lambda_ab = eps * t_a * (omega_a, omega_b) for B, C, D with
eps = 2 (B, D), eps = 1 (C) and t_a = 2 exactly on short-root nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Sequence, Tuple

Weight = Tuple[Fraction, ...]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AlgebraType:
    """A classical family letter with its variable count N."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in "ABCD":
            raise ValueError(f"unknown family {self.family!r}")
        minimum = {"A": 1, "B": 2, "C": 2, "D": 3}[self.family]
        if self.rank < minimum:
            raise ValueError(
                f"type {self.family} needs N >= {minimum}, got {self.rank}")

    @property
    def nvars(self) -> int:
        return self.rank

    @property
    def nodes(self) -> int:
        # gl_N convention for type A: node N is central
        return self.rank

    def __str__(self):
        return f"{self.family}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "AlgebraType":
        return cls(text[0].upper(), int(text[1:]))


def _w(*coords) -> Weight:
    return tuple(Fraction(c) for c in coords)


def weight(coords: Sequence) -> Weight:
    return tuple(Fraction(c) for c in coords)


def add_weights(u: Weight, w: Weight) -> Weight:
    return tuple(a + b for a, b in zip(u, w))


def sub_weights(u: Weight, w: Weight) -> Weight:
    return tuple(a - b for a, b in zip(u, w))


def pairing(u: Sequence, w: Sequence) -> Fraction:
    """Euclidean inner product in the e_i basis."""
    if len(u) != len(w):
        raise ValueError("weights of different lengths")
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, w)), Fraction(0))


def fundamental_weight(g: AlgebraType, a: int) -> Weight:
    N = g.rank
    if not 1 <= a <= g.nodes:
        raise ValueError(f"node {a} out of range for {g}")
    if g.family in ("A", "C") or (g.family == "B" and a < N) \
            or (g.family == "D" and a <= N - 2):
        return _w(*([1] * a + [0] * (N - a)))
    if g.family == "B":  # a == N
        return tuple(HALF for _ in range(N))
    if a == N - 1:  # D
        return tuple([HALF] * (N - 1) + [-HALF])
    return tuple(HALF for _ in range(N))  # D, a == N


def simple_root(g: AlgebraType, a: int) -> Weight:
    N = g.rank
    if not 1 <= a <= g.nodes:
        raise ValueError(f"node {a} out of range for {g}")
    e = [Fraction(0)] * N

    def basis(i):
        v = list(e)
        v[i - 1] = Fraction(1)
        return v

    if a < N or g.family == "A":
        if a == N:  # type A node N: no simple root attached to the center
            raise ValueError("type A node N carries no simple root")
        v = basis(a)
        v[a] = Fraction(-1)
        return tuple(v)
    if g.family == "B":
        return tuple(basis(N))
    if g.family == "C":
        v = basis(N)
        v[N - 1] = Fraction(2)
        return tuple(v)
    v = basis(N - 1)
    v[N - 1] = Fraction(1)
    return tuple(v)


def node_t(g: AlgebraType, a: int) -> int:
    """t_a = 2 on short-root nodes (B: node N; C: nodes < N), else 1."""
    if g.family == "B":
        return 2 if a == g.rank else 1
    if g.family == "C":
        return 2 if a < g.rank else 1
    return 1


def short_nodes(g: AlgebraType) -> Tuple[int, ...]:
    return tuple(a for a in range(1, g.nodes + 1) if node_t(g, a) == 2)


def epsilon(g: AlgebraType) -> int:
    """The normalization epsilon: 2 for B and D, 1 for C (and A)."""
    return 2 if g.family in ("B", "D") else 1


def lambda_entry(g: AlgebraType, a: int, b: int) -> Fraction:
    N = g.rank
    if not (1 <= a <= g.nodes and 1 <= b <= g.nodes):
        raise ValueError(f"indices ({a},{b}) out of range for {g}")
    m = Fraction(min(a, b))
    if g.family == "A":
        return m - Fraction(a * b, N)
    if g.family == "B":
        return m if b == N else 2 * m
    if g.family == "C":
        return m if a == N else 2 * m
    if a <= N - 2 and b <= N - 2:
        return 2 * m
    if a <= N - 2:
        return Fraction(a)
    if b <= N - 2:
        return Fraction(b)
    return Fraction(N, 2) if a == b else Fraction(N - 2, 2)


def lambda_matrix(g: AlgebraType):
    n = g.nodes
    return [[lambda_entry(g, a, b) for b in range(1, n + 1)]
            for a in range(1, n + 1)]


def weight_from_multiplicities(g: AlgebraType, mults: Dict[int, int]) -> Weight:
    lam = tuple(Fraction(0) for _ in range(g.rank))
    for a, n in mults.items():
        if n < 0:
            raise ValueError("negative multiplicity")
        w = fundamental_weight(g, a)
        lam = tuple(x + n * y for x, y in zip(lam, w))
    return lam


def multiplicities_from_weight(g: AlgebraType, lam: Weight) -> Dict[int, int]:
    """Write a dominant weight as sum n_a omega_a with n_a >= 0 integers."""
    lam = weight(lam)
    if not is_dominant(g, lam):
        raise ValueError(f"{lam} is not dominant for {g}")
    N = g.rank
    out: Dict[int, Fraction] = {}
    if g.family == "D":
        for a in range(1, N - 1):
            out[a] = lam[a - 1] - lam[a]
        out[N - 1] = lam[N - 2] - lam[N - 1]
        out[N] = lam[N - 2] + lam[N - 1]
    elif g.family == "B":
        for a in range(1, N):
            out[a] = lam[a - 1] - lam[a]
        out[N] = 2 * lam[N - 1]
    else:
        for a in range(1, N):
            out[a] = lam[a - 1] - lam[a]
        out[N] = lam[N - 1]
    mults = {}
    for a, v in out.items():
        if v.denominator != 1 or v < 0:
            raise ValueError(f"{lam} does not decompose over {g} nodes")
        if v:
            mults[a] = int(v)
    return mults


def is_dominant(g: AlgebraType, lam: Sequence) -> bool:
    lam = weight(lam)
    if len(lam) != g.rank:
        return False
    integral = all(x.denominator == 1 for x in lam)
    half = all(x.denominator == 2 and x.numerator % 2 for x in lam)
    if g.family in ("A", "C"):
        return integral and all(
            lam[i] >= lam[i + 1] for i in range(len(lam) - 1)) and lam[-1] >= 0
    if g.family == "B":
        return (integral or half) and all(
            lam[i] >= lam[i + 1] for i in range(len(lam) - 1)) and lam[-1] >= 0
    head = all(lam[i] >= lam[i + 1] for i in range(len(lam) - 2))
    return (integral or half) and head and lam[-2] >= abs(lam[-1])


def dominant_weights(g: AlgebraType, max_abs_sum) -> Tuple[Weight, ...]:
    """All dominant weights with sum_i |lambda_i| <= max_abs_sum."""
    bound = Fraction(max_abs_sum)
    N = g.rank
    steps = [Fraction(1)]
    if g.family in ("B", "D"):
        steps.append(HALF)
    seen = set()
    results = []

    def rec(prefix, used, step):
        if len(prefix) == N:
            lam = tuple(prefix)
            cands = [lam]
            if g.family == "D" and lam[-1] != 0:
                cands.append(lam[:-1] + (-lam[-1],))
            for c in cands:
                if c not in seen and is_dominant(g, c):
                    seen.add(c)
                    results.append(c)
            return
        cap = min(prefix[-1] if prefix else bound, bound - used)
        v = (cap // step) * step
        while v >= 0:
            rec(prefix + [v], used + v, step)
            v -= step

    for step in steps:
        rec([], Fraction(0), step)
    return tuple(results)


def dominance_leq(mu: Weight, lam: Weight) -> bool:
    """Partial-sum dominance: sum_{i<=m} mu_i <= sum_{i<=m} lam_i for all m."""
    s1 = Fraction(0)
    s2 = Fraction(0)
    for a, b in zip(mu, lam):
        s1 += a
        s2 += b
        if s1 > s2:
            return False
    return True


def format_weight(lam: Weight) -> str:
    return ",".join(str(x) for x in lam)


def parse_weight(text: str) -> Weight:
    return tuple(Fraction(part.strip()) for part in text.split(","))
