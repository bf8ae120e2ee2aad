"""Exact scalar arithmetic over the Gaussian rationals a/b + (c/d)i.

Every computation in the engine happens in this field.  Nothing ever
rounds: denominators stay positive and in lowest terms, and equality is
literal equality of normalized fractions.  gmpy2's mpq is used when
available (it is markedly faster); plain fractions.Fraction is the
fallback and behaves identically for everything we rely on.
"""

from __future__ import annotations

from fractions import Fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction

__all__ = ["Q", "GaussianRational", "gr", "gr_int", "ZERO", "ONE", "I", "kth_root"]


def Q(num=0, den=1):
    """Exact rational, normalized with positive denominator."""
    if type(num) is str:
        num = Fraction(num)
    return _Q(num, den)


_Q0 = Q(0)
_Q1 = Q(1)


class GaussianRational:
    """A rational complex number re + im*i with exact components."""

    __slots__ = ("re", "im")

    def __init__(self, re=_Q0, im=_Q0):
        self.re = re if type(re) is type(_Q0) else Q(re)
        self.im = im if type(im) is type(_Q0) else Q(im)

    # -- predicates -----------------------------------------------------
    def is_zero(self):
        return not self.re and not self.im

    def is_real(self):
        return not self.im

    def is_one(self):
        return self.re == _Q1 and not self.im

    # -- ring / field operations ----------------------------------------
    def __add__(self, other):
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational(a * c, _Q0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    def inverse(self):
        a, b = self.re, self.im
        if not b:
            if not a:
                raise ZeroDivisionError("inverse of zero")
            return GaussianRational(1 / a, _Q0)
        n = a * a + b * b
        return GaussianRational(a / n, -b / n)

    def __truediv__(self, other):
        return self * other.inverse()

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def mul_int(self, n):
        return GaussianRational(self.re * n, self.im * n)

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- display / serialization ----------------------------------------
    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}i)"

    def to_pair(self):
        """Canonical string pair ("p/q" or "p", same for im)."""
        return str(self.re), str(self.im)

    @staticmethod
    def from_pair(re_s, im_s="0"):
        return GaussianRational(Q(re_s), Q(im_s))


def gr(num, den=1, imnum=0, imden=1):
    """Shorthand constructor used all over the tests."""
    return GaussianRational(Q(num, den), Q(imnum, imden))


_SMALL = [GaussianRational(Q(n)) for n in range(0, 65)]


def gr_int(n):
    if 0 <= n < 65:
        return _SMALL[n]
    return GaussianRational(Q(n))


ZERO = gr_int(0)
ONE = gr_int(1)
I = GaussianRational(_Q0, _Q1)


# ---------------------------------------------------------------------------
# k-th roots in Q(i).
#
# Roots are decided exactly.  Writing c = (a+bi)/d with a+bi a Gaussian
# integer and d a positive integer, c is a k-th power in Q(i) iff
# m = (a+bi)*d^(k-1) is a k-th power in Z[i] (Z[i] is integrally closed),
# which we decide by factoring m into Gaussian primes via its norm.
# ---------------------------------------------------------------------------


def _iroot(n, k):
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1):
        return n
    hi = 1 << ((n.bit_length() + k - 1) // k + 1)
    lo = 1
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid**k
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


# Gaussian integers as plain (x, y) int pairs.

def _gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_norm(a):
    return a[0] * a[0] + a[1] * a[1]


def _gi_divmod(a, b):
    """Euclidean division with nearest rounding; |r| < |b|."""
    nb = _gi_norm(b)
    # a * conj(b) / |b|^2, rounded to nearest integers
    xr = a[0] * b[0] + a[1] * b[1]
    yr = a[1] * b[0] - a[0] * b[1]
    qx = (2 * xr + nb) // (2 * nb)
    qy = (2 * yr + nb) // (2 * nb)
    q = (qx, qy)
    r = (a[0] - (q[0] * b[0] - q[1] * b[1]), a[1] - (q[0] * b[1] + q[1] * b[0]))
    return q, r


def _gi_exact_div(a, b):
    q, r = _gi_divmod(a, b)
    if r == (0, 0):
        return q
    return None


def _gi_gcd(a, b):
    while b != (0, 0):
        _, r = _gi_divmod(a, b)
        a, b = b, r
    return a


def _gi_pow(a, n):
    out = (1, 0)
    while n:
        if n & 1:
            out = _gi_mul(out, a)
        a = _gi_mul(a, a)
        n >>= 1
    return out


def _factor_int(n):
    """Trial-division factorization; inputs here are desk scale."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _sqrt_minus_one_mod(p):
    # p = 1 mod 4, p small: brute force is fine
    for x in range(2, p):
        if (x * x + 1) % p == 0:
            return x
    raise ArithmeticError(f"no sqrt(-1) mod {p}")  # pragma: no cover


def _gi_prime_factor(m):
    """Factor a nonzero Gaussian integer into primes.

    Returns (unit_power_of_i, {prime: exponent}) with primes as (x, y)
    pairs.  Primes over split rational primes come in conjugate pairs and
    both appear with their own exponents.
    """
    factors = {}
    for p, _ in _factor_int(_gi_norm(m)).items():
        if p == 2:
            cands = [(1, 1)]
        elif p % 4 == 3:
            cands = [(p, 0)]
        else:
            x = _sqrt_minus_one_mod(p)
            pi = _gi_gcd((p, 0), (x, 1))
            cands = [pi, (pi[0], -pi[1])]
        for pi in cands:
            e = 0
            while True:
                q = _gi_exact_div(m, pi)
                if q is None:
                    break
                m = q
                e += 1
            if e:
                factors[pi] = factors.get(pi, 0) + e
    # what is left must be a unit 1, i, -1, -i
    units = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}
    if m not in units:  # pragma: no cover - defensive
        raise ArithmeticError(f"incomplete Gaussian factorization, remainder {m}")
    return units[m], factors


def _gi_kth_root(m, k):
    """A k-th root of the Gaussian integer m, or None."""
    if m == (0, 0):
        return (0, 0)
    e, factors = _gi_prime_factor(m)
    root = (1, 0)
    for pi, a in factors.items():
        if a % k:
            return None
        root = _gi_mul(root, _gi_pow(pi, a // k))
    for c in range(4):
        if (c * k - e) % 4 == 0:
            return _gi_mul(_gi_pow((0, 1), c), root)
    return None


def _root_candidates(r, k):
    """All k-th roots in Q(i) sharing r: r times k-th roots of unity."""
    units = [ONE]
    if k % 2 == 0:
        units.append(-ONE)
    if k % 4 == 0:
        units.extend([I, -I])
    return [r * u for u in units]


def kth_root(c: GaussianRational, k: int):
    """An exact k-th root of c in Q(i), or None if none exists.

    Among the roots lying in the field, the one with lexicographically
    largest (re, im) is returned, which in particular prefers the
    positive real root whenever there is one.  The choice is canonical
    so repeated runs agree.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if k == 1 or c.is_zero():
        return c
    # common fast path: positive rational with integer roots
    if c.is_real():
        p, q = int(c.re.numerator), int(c.re.denominator)
        if p > 0:
            rp, rq = _iroot(p, k), _iroot(q, k)
            if rp is not None and rq is not None:
                return GaussianRational(Q(rp, rq))
        elif k % 2 == 1:
            rp, rq = _iroot(-p, k), _iroot(q, k)
            if rp is not None and rq is not None:
                return GaussianRational(Q(-rp, rq))
    # general case through Z[i]
    d_re, d_im = int(c.re.denominator), int(c.im.denominator)
    from math import gcd

    d = d_re * d_im // gcd(d_re, d_im)
    a = int(c.re * d)
    b = int(c.im * d)
    m = _gi_mul((a, b), _gi_pow((d, 0), k - 1))
    r = _gi_kth_root(m, k)
    if r is None:
        return None
    base = GaussianRational(Q(r[0], d), Q(r[1], d))
    best = None
    for cand in _root_candidates(base, k):
        if cand**k == c and (best is None or (cand.re, cand.im) > (best.re, best.im)):
            best = cand
    return best
