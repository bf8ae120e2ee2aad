"""Truncated multivariate power series with exact coefficients.

A Series is a jet: the terms of total degree <= trunc of a formal power
series in variables (z_1, .., z_n, w), the last slot always playing the
role of the distinguished vertical coordinate.  Terms live in a sparse
map from exponent tuples to GaussianRational coefficients; zero
coefficients are never stored, so two equal jets have identical maps.

All values are immutable after construction and safe to share.
"""

from __future__ import annotations

import math

from .coeff import GaussianRational, Q, ZERO, ONE, gr_int
from .errors import DomainError, NotAUnitError, ShapeMismatchError

__all__ = [
    "Series",
    "WPolynomial",
    "grlex_key",
    "monomial_name",
    "series_to_json",
    "series_from_json",
]


def grlex_key(exps):
    """Graded-lexicographic sort key: degree first, then exponents."""
    return (sum(exps), exps)


def monomial_name(exps, names=None):
    """Human-readable monomial, e.g. 'z1^2*w' or 'x*y^3'."""
    nv = len(exps)
    if names is None:
        if nv == 1:
            names = ["w"]
        elif nv == 2:
            names = ["z", "w"]
        else:
            names = [f"z{i + 1}" for i in range(nv - 1)] + ["w"]
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


class Series:
    __slots__ = ("nvars", "trunc", "terms")

    def __init__(self, nvars, trunc, terms=None, _clean=False):
        self.nvars = nvars
        self.trunc = trunc
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            clean = {}
            for e, c in terms.items():
                if sum(e) <= trunc and not c.is_zero():
                    clean[e] = c
            self.terms = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars, trunc):
        return cls(nvars, trunc, {}, _clean=True)

    @classmethod
    def const(cls, nvars, trunc, c):
        if not isinstance(c, GaussianRational):
            c = GaussianRational(Q(c))
        t = {} if c.is_zero() else {(0,) * nvars: c}
        return cls(nvars, trunc, t, _clean=True)

    @classmethod
    def one(cls, nvars, trunc):
        return cls.const(nvars, trunc, ONE)

    @classmethod
    def variable(cls, nvars, trunc, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, trunc, {tuple(e): ONE}, _clean=True)

    @classmethod
    def monomial(cls, nvars, trunc, exps, c=ONE):
        if not isinstance(c, GaussianRational):
            c = GaussianRational(Q(c))
        exps = tuple(exps)
        if c.is_zero() or sum(exps) > trunc:
            return cls.zero(nvars, trunc)
        return cls(nvars, trunc, {exps: c}, _clean=True)

    @classmethod
    def build(cls, nvars, trunc, items):
        """From an iterable of (exponent tuple, coefficient-ish) pairs."""
        terms = {}
        for e, c in items:
            if not isinstance(c, GaussianRational):
                c = GaussianRational(Q(c))
            e = tuple(e)
            if sum(e) > trunc or c.is_zero():
                continue
            prev = terms.get(e)
            c = c if prev is None else prev + c
            if c.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = c
        return cls(nvars, trunc, terms, _clean=True)

    # -- basic queries ----------------------------------------------------
    def _check_shape(self, other):
        if self.nvars != other.nvars or self.trunc != other.trunc:
            raise ShapeMismatchError(
                f"shape mismatch: ({self.nvars},{self.trunc}) vs ({other.nvars},{other.trunc})"
            )

    def is_zero(self):
        return not self.terms

    def is_zero_to(self, degree):
        return all(sum(e) > degree for e in self.terms)

    def order(self):
        """Smallest total degree present, or +inf for the zero jet."""
        if not self.terms:
            return math.inf
        return min(sum(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), ZERO)

    def is_real(self):
        return all(c.is_real() for c in self.terms.values())

    def max_w_degree(self):
        return max((e[-1] for e in self.terms), default=-1)

    def w_order(self):
        """Vanishing order in w of the restriction to z = 0 (+inf if it dies)."""
        best = math.inf
        for e, _ in self.terms.items():
            if sum(e) == e[-1] and e[-1] < best:
                best = e[-1]
        return best

    def restrict_vertical(self):
        """The jet of self(0, .., 0, w)."""
        t = {e: c for e, c in self.terms.items() if sum(e) == e[-1]}
        return Series(self.nvars, self.trunc, t, _clean=True)

    def coeff_of_w(self, j):
        """Coefficient of w^j as a series in the z variables (w-slot zeroed)."""
        t = {}
        for e, c in self.terms.items():
            if e[-1] == j:
                t[e[:-1] + (0,)] = c
        return Series(self.nvars, self.trunc, t, _clean=True)

    def depends_on_w(self):
        return any(e[-1] for e in self.terms)

    def z_slice(self, m):
        """Terms whose z-degree (degree ignoring w) is exactly m."""
        t = {e: c for e, c in self.terms.items() if sum(e) - e[-1] == m}
        return Series(self.nvars, self.trunc, t, _clean=True)

    def degree_slice(self, d):
        t = {e: c for e, c in self.terms.items() if sum(e) == d}
        return Series(self.nvars, self.trunc, t, _clean=True)

    def drop_above(self, degree):
        t = {e: c for e, c in self.terms.items() if sum(e) <= degree}
        return Series(self.nvars, self.trunc, t, _clean=True)

    def filter(self, pred):
        t = {e: c for e, c in self.terms.items() if pred(e)}
        return Series(self.nvars, self.trunc, t, _clean=True)

    def with_trunc(self, trunc):
        t = {e: c for e, c in self.terms.items() if sum(e) <= trunc}
        return Series(self.nvars, trunc, t, _clean=True)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        self._check_shape(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            prev = t.get(e)
            s = c if prev is None else prev + c
            if s.is_zero():
                t.pop(e, None)
            else:
                t[e] = s
        return Series(self.nvars, self.trunc, t, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Series(
            self.nvars, self.trunc, {e: -c for e, c in self.terms.items()}, _clean=True
        )

    def scale(self, c):
        if not isinstance(c, GaussianRational):
            c = GaussianRational(Q(c))
        if c.is_zero():
            return Series.zero(self.nvars, self.trunc)
        return Series(
            self.nvars, self.trunc, {e: ct * c for e, ct in self.terms.items()}, _clean=True
        )

    def __mul__(self, other):
        self._check_shape(other)
        N = self.trunc
        a = [(e, sum(e), c) for e, c in self.terms.items()]
        b = [(e, sum(e), c) for e, c in other.terms.items()]
        if len(a) > len(b):
            a, b = b, a
        b.sort(key=lambda t: t[1])
        out = {}
        for ea, da, ca in a:
            room = N - da
            for eb, db, cb in b:
                if db > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                p = ca * cb
                prev = out.get(e)
                s = p if prev is None else prev + p
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return Series(self.nvars, self.trunc, out, _clean=True)

    def mul_monomial(self, exps, c=ONE):
        """Fast multiply by a single monomial c * x^exps."""
        exps = tuple(exps)
        d = sum(exps)
        N = self.trunc
        out = {}
        for e, ct in self.terms.items():
            if sum(e) + d > N:
                continue
            out[tuple(x + y for x, y in zip(e, exps))] = ct * c
        return Series(self.nvars, N, out, _clean=True)

    def pow_int(self, n):
        if n < 0:
            raise ValueError("negative power; use invert_unit")
        out = Series.one(self.nvars, self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.trunc, frozenset(self.terms.items())))

    # -- calculus -----------------------------------------------------------
    def partial(self, var):
        """Formal partial derivative.

        The result keeps the same truncation order; only its terms of
        degree <= trunc - 1 carry information about the underlying germ.
        """
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range")
        t = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                ne = e[:var] + (k - 1,) + e[var + 1 :]
                t[ne] = c.mul_int(k)
        return Series(self.nvars, self.trunc, t, _clean=True)

    def invert_unit(self):
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.constant_term()
        if c0.is_zero():
            raise NotAUnitError("series has zero constant term")
        inv0 = c0.inverse()
        # a = c0 (1 - r) with ord(r) >= 1; 1/a = (1 + r + r^2 + ..)/c0
        r = Series.one(self.nvars, self.trunc) - self.scale(inv0)
        acc = Series.one(self.nvars, self.trunc)
        for _ in range(self.trunc):
            acc = Series.one(self.nvars, self.trunc) + r * acc
        return acc.scale(inv0)

    # -- substitution ---------------------------------------------------------
    def subst_w(self, image):
        """Substitute the last variable only; other variables stay put.

        Horner evaluation in w, so this is the cheap path used by every
        vertical coordinate change.
        """
        self._check_shape(image)
        d = self.max_w_degree()
        if d <= 0:
            return self
        coeffs = [self.coeff_of_w(j) for j in range(d + 1)]
        acc = coeffs[d]
        for j in range(d - 1, -1, -1):
            acc = acc * image + coeffs[j]
        return acc

    def shift_w(self, delta):
        """Exact substitution w := w + delta for delta of positive order.

        Finite Taylor expansion in delta; exact at jet level because
        high powers of delta leave the truncation.
        """
        self._check_shape(delta)
        if delta.is_zero():
            return self
        d0 = delta.order()
        if d0 < 1:
            raise DomainError("shift_w needs a shift of positive order")
        out = self
        deriv = self
        dpow = delta
        fact = 1
        j = 1
        while j * d0 <= self.trunc:
            deriv = deriv.partial(self.nvars - 1)
            if deriv.is_zero():
                break
            fact *= j
            out = out + (deriv * dpow).scale(GaussianRational(Q(1, fact)))
            dpow = dpow * delta
            j += 1
        return out

    def substitute(self, images, allow_constant=False):
        """Full substitution: one image per variable.

        Images must vanish at the origin unless allow_constant is set;
        composing germs anchored at the origin is the only supported
        semantics.
        """
        if len(images) != self.nvars:
            raise ShapeMismatchError("one image per variable required")
        for im in images:
            self._check_shape(im)
            if not allow_constant and not im.constant_term().is_zero():
                raise DomainError("substitution image has a nonzero constant term")
        return self._subst(images)

    def _subst(self, images):
        used = [i for i in range(self.nvars) if any(e[i] for e in self.terms)]
        if not used:
            return self
        v = used[-1]
        d = max(e[v] for e in self.terms)
        # split off coefficient jets in variable v, recurse on the rest
        layers = []
        for j in range(d + 1):
            t = {}
            for e, c in self.terms.items():
                if e[v] == j:
                    t[e[:v] + (0,) + e[v + 1 :]] = c
            layers.append(Series(self.nvars, self.trunc, t, _clean=True)._subst(images))
        acc = layers[d]
        for j in range(d - 1, -1, -1):
            acc = acc * images[v] + layers[j]
        return acc

    # -- display ----------------------------------------------------------
    def __repr__(self):
        if not self.terms:
            return "<0>"
        bits = []
        for e in sorted(self.terms, key=grlex_key):
            bits.append(f"{self.terms[e]!r}*{monomial_name(e)}")
        s = " + ".join(bits[:12])
        if len(bits) > 12:
            s += f" + ({len(bits) - 12} more)"
        return f"<{s}>"


# ---------------------------------------------------------------------------


class WPolynomial:
    """A polynomial in w whose coefficients are jets in z alone.

    coeffs[j] is the coefficient of w^j; each must be independent of w.
    "Unitary" means the leading coefficient is identically 1.
    """

    __slots__ = ("coeffs", "degree")

    def __init__(self, coeffs):
        if not coeffs:
            raise ValueError("need at least one coefficient")
        for c in coeffs:
            if c.depends_on_w():
                raise ShapeMismatchError("WPolynomial coefficients must not involve w")
        self.coeffs = list(coeffs)
        self.degree = len(coeffs) - 1

    @property
    def nvars(self):
        return self.coeffs[0].nvars

    @property
    def trunc(self):
        return self.coeffs[0].trunc

    def is_unitary(self):
        lead = self.coeffs[-1]
        return lead == Series.one(lead.nvars, lead.trunc)

    def to_series(self):
        nv, N = self.nvars, self.trunc
        out = Series.zero(nv, N)
        w = [0] * nv
        for j, c in enumerate(self.coeffs):
            w[-1] = j
            out = out + c.mul_monomial(tuple(w))
        return out

    @classmethod
    def from_series(cls, s, degree=None):
        """Extract w-coefficients; fails if s has higher w-degree terms."""
        d = s.max_w_degree() if degree is None else degree
        d = max(d, 0)
        if s.max_w_degree() > d:
            raise ShapeMismatchError(f"series has w-degree above {d}")
        return cls([s.coeff_of_w(j) for j in range(d + 1)])

    def eval_at(self, image):
        """Evaluate in w at a series image (z variables untouched)."""
        acc = self.coeffs[self.degree]
        for j in range(self.degree - 1, -1, -1):
            acc = acc * image + self.coeffs[j]
        return acc

    def is_real(self):
        return all(c.is_real() for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, WPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"WPolynomial(deg={self.degree}, coeffs={self.coeffs!r})"


# ---------------------------------------------------------------------------
# Interchange format.  Terms are sorted graded-lex; no zero coefficients;
# fraction strings are reduced with positive denominators, so equal jets
# serialize to identical bytes.
# ---------------------------------------------------------------------------


def series_to_json(s: Series):
    terms = []
    for e in sorted(s.terms, key=grlex_key):
        re_s, im_s = s.terms[e].to_pair()
        terms.append({"exp": list(e), "re": re_s, "im": im_s})
    return {"nvars": s.nvars, "trunc": s.trunc, "terms": terms}


def series_from_json(d) -> Series:
    nvars = int(d["nvars"])
    trunc = int(d["trunc"])
    items = []
    for t in d["terms"]:
        e = tuple(int(x) for x in t["exp"])
        if len(e) != nvars:
            raise ShapeMismatchError("exponent tuple length disagrees with nvars")
        if any(x < 0 for x in e):
            raise ShapeMismatchError("negative exponent")
        items.append((e, GaussianRational.from_pair(t["re"], t.get("im", "0"))))
    return Series.build(nvars, trunc, items)
