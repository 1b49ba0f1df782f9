"""Dense vectorized clearing of common denominators.

Summing many rational functions over the union of their factored
denominators requires multiplying each numerator by its missing binomial
factors.  For the large coefficients produced by operator products the
sparse dictionary arithmetic is the bottleneck, while the supports are
contained in a modest exponent box.  This module performs the whole
extension-and-accumulate pass on dense integer arrays: a numerator is
scattered into an n-dimensional int64 grid (axes: the x variables and the
power of v = q^(1/4)), each binomial multiply is one in-place scale plus
one strided add, and pieces are added into one shared accumulator.

Everything is exact: coefficients must be machine integers, and a proven
1-norm bound guards against int64 overflow; any violation makes the
routine return None so callers fall back to the sparse path.
"""

from __future__ import annotations

from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .laurent import _VBIAS, _VBITS, _VMASK, _XBIAS, _XBITS, _XMASK

BOX_LIMIT = 40_000_000
_INT64_SAFE = 1 << 62

# a piece is (terms, factors): factors = [(delta_x scaled vector,
# trailing v-exponent, trailing int coefficient, multiplicity)]
Piece = Tuple[Dict[int, int], List[Tuple[Sequence[int], int, int, int]]]


def _decode(terms: Dict[int, int], n: int):
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


def dense_sum_pieces(pieces: Sequence[Piece], n: int) -> Optional[Dict[int, int]]:
    """Sum numerator * prod(missing factors) over all pieces, densely.

    Returns the packed-key dictionary of the total, or None when the
    inputs are unsuitable (non-integer data, box too large, or the int64
    coefficient bound cannot be certified).
    """
    dims = n + 1
    # certified coefficient bound for every intermediate and the total
    norm_total = 0
    kept = []
    for terms, factors in pieces:
        if not terms:
            continue
        norm = 0
        for c in terms.values():
            if type(c) is not int:
                return None
            norm += c if c >= 0 else -c
        for _, _, fc, mult in factors:
            if type(fc) is not int:
                return None
            norm *= (1 + abs(fc)) ** mult
        norm_total += norm
        kept.append((terms, factors))
    if norm_total >= _INT64_SAFE:
        return None
    if not kept:
        return {}

    infos = []
    glo = [None] * dims
    ghi = [None] * dims
    gstep = [0] * dims
    for terms, factors in kept:
        cols, vals = _decode(terms, n)
        lo = [int(cols[i].min()) for i in range(dims)]
        hi = [int(cols[i].max()) for i in range(dims)]
        for i in range(dims):
            g = int(np.gcd.reduce(cols[i] - lo[i]))
            gstep[i] = gcd(gstep[i], g)
        for dvec, w, _, mult in factors:
            for i in range(n):
                d = dvec[i]
                if d:
                    gstep[i] = gcd(gstep[i], abs(d))
                    if d > 0:
                        hi[i] += d * mult
                    else:
                        lo[i] += d * mult
            if w:
                gstep[n] = gcd(gstep[n], abs(w))
                if w > 0:
                    hi[n] += w * mult
                else:
                    lo[n] += w * mult
        infos.append([cols, lo, hi, vals, factors])
        for i in range(dims):
            glo[i] = lo[i] if glo[i] is None else min(glo[i], lo[i])
            ghi[i] = hi[i] if ghi[i] is None else max(ghi[i], hi[i])
    for i in range(dims):
        if gstep[i] == 0:
            gstep[i] = 1
        else:
            for cols, lo, hi, vals, factors in infos:
                if (lo[i] - glo[i]) % gstep[i]:
                    gstep[i] = 1
                    break
    shape = []
    box = 1
    for i in range(dims):
        extent = (ghi[i] - glo[i]) // gstep[i] + 1
        shape.append(extent)
        box *= extent
        if box > BOX_LIMIT:
            return None
    acc = np.zeros(shape, dtype=np.int64)
    for cols, lo, hi, vals, factors in infos:
        pshape = tuple((hi[i] - lo[i]) // gstep[i] + 1 for i in range(dims))
        cur = np.zeros(pshape, dtype=np.int64)
        idx = tuple((cols[i] - lo[i]) // gstep[i] for i in range(dims))
        np.add.at(cur, idx, vals)
        org = [int(idx[i].min()) for i in range(dims)]
        csh = [int(idx[i].max()) - org[i] + 1 for i in range(dims)]
        for dvec, w, fc, mult in factors:
            lead = [dvec[i] // gstep[i] for i in range(n)] + [0]
            sv = w // gstep[n]
            for _ in range(mult):
                sl_old = tuple(slice(org[i], org[i] + csh[i])
                               for i in range(dims))
                old = cur[sl_old].copy()
                if sv == 0:
                    # p(x^d + c): scale in place, add the shifted copy
                    if fc == -1:
                        np.negative(cur[sl_old], out=cur[sl_old])
                    elif fc != 1:
                        cur[sl_old] *= fc
                    sl_lead = tuple(slice(org[i] + lead[i],
                                          org[i] + lead[i] + csh[i])
                                    for i in range(dims))
                    cur[sl_lead] += old
                else:
                    cur[sl_old] = 0
                    sl_lead = tuple(slice(org[i] + lead[i],
                                          org[i] + lead[i] + csh[i])
                                    for i in range(dims))
                    cur[sl_lead] += old
                    sl_trail = tuple(
                        slice(org[i] + (sv if i == n else 0),
                              org[i] + (sv if i == n else 0) + csh[i])
                        for i in range(dims))
                    if fc == 1:
                        cur[sl_trail] += old
                    elif fc == -1:
                        cur[sl_trail] -= old
                    else:
                        cur[sl_trail] += fc * old
                for i in range(n):
                    if lead[i] < 0:
                        org[i] += lead[i]
                    csh[i] += abs(lead[i])
                if sv < 0:
                    org[n] += sv
                csh[n] += abs(sv)
        dst = tuple(slice((lo[i] - glo[i]) // gstep[i],
                          (lo[i] - glo[i]) // gstep[i] + pshape[i])
                    for i in range(dims))
        acc[dst] += cur
    flat = acc.ravel()
    nz = np.nonzero(flat)[0]
    if len(nz) == 0:
        return {}
    vals = flat[nz]
    strides = [0] * dims
    a = 1
    for i in range(dims - 1, -1, -1):
        strides[i] = a
        a *= shape[i]
    out = {}
    for pos, c in zip(nz.tolist(), vals.tolist()):
        key = 0
        rem = pos
        for i in range(dims):
            f = (rem // strides[i]) * gstep[i] + glo[i]
            rem %= strides[i]
            if i < n:
                key = (key << _XBITS) | (f + _XBIAS)
            else:
                key = (key << _VBITS) | (f + _VBIAS)
        out[key] = c
    return out
