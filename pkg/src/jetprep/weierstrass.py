"""Classical division and preparation along the vertical coordinate.

weierstrass_divide(g, f) writes g = q*f + r with deg_w r < w_order(f),
exactly at jet level.  weierstrass_prepare factors f = unit * P with P
a unitary w-polynomial whose restriction to z = 0 is exactly w^k.  Both
are certified by multiply-back identities in the tests; the algorithms
below only terminate, they are not trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HypothesisError
from .series import Series, WPolynomial

__all__ = ["WeierstrassFactorization", "weierstrass_divide", "weierstrass_prepare"]


def _w_split(s: Series, k: int):
    """Split s = low + w^k * high with deg_w low < k; high is shifted down."""
    low, high = {}, {}
    for e, c in s.terms.items():
        if e[-1] < k:
            low[e] = c
        else:
            high[e[:-1] + (e[-1] - k,)] = c
    return (
        Series(s.nvars, s.trunc, low, _clean=True),
        Series(s.nvars, s.trunc, high, _clean=True),
    )


@dataclass
class WeierstrassFactorization:
    unit: Series
    poly: WPolynomial

    def reconstruct(self):
        return self.unit * self.poly.to_series()


def weierstrass_divide(g: Series, f: Series):
    """Division with remainder by f, in the ring of jets.

    Returns (q, r) with g = q*f + r up to the common truncation and r a
    w-polynomial of degree < w_order(f).
    """
    g._check_shape(f)
    k = f.w_order()
    if k is math.inf:
        raise HypothesisError("divisor restricted to z = 0 vanishes identically")
    nv, N = f.nvars, f.trunc
    if k == 0:
        q = g * f.invert_unit()
        return q, WPolynomial([Series.zero(nv, N)])
    a_low, b_high = _w_split(f, k)
    # every term of a_low vanishes on z = 0, so its z-order is positive
    # and the loop below gains at least one z-degree per pass
    b_inv = b_high.invert_unit()
    q = Series.zero(nv, N)
    r = Series.zero(nv, N)
    cur = g
    for _ in range(N + 2):
        if cur.is_zero():
            break
        low, high = _w_split(cur, k)
        q0 = high * b_inv
        q = q + q0
        r = r + low
        cur = -(q0 * a_low)
    return q, WPolynomial.from_series(r, degree=max(k - 1, 0))


def weierstrass_prepare(f: Series) -> WeierstrassFactorization:
    """Factor f = unit * P, P unitary of degree k = w_order(f), P(0,w) = w^k."""
    k = f.w_order()
    if k is math.inf:
        raise HypothesisError("restriction to z = 0 vanishes identically")
    nv, N = f.nvars, f.trunc
    wk = Series.monomial(nv, N, (0,) * (nv - 1) + (k,))
    q, r = weierstrass_divide(wk, f)
    poly = WPolynomial.from_series(wk - r.to_series(), degree=k)
    unit = q.invert_unit()
    return WeierstrassFactorization(unit=unit, poly=poly)
