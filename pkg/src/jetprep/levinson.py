"""Preparation of function germs into unitary w-polynomials.

The classical factorization (weierstrass.py) leaves a unit factor in
front.  The operations here remove it entirely: a change of the
vertical coordinate alone turns the germ into a unitary w-polynomial,
and a meromorphic germ into a quotient of two unitary w-polynomials.
Every success carries a residual that is identically zero at jet level,
recomputed from scratch at the end; nothing rests on trusting the
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .changes import CoordinateChange
from .coeff import GaussianRational, Q, ZERO, ONE, kth_root
from .errors import FieldExtensionError, HypothesisError, SolverInconsistentError
from .linalg import solve
from .series import Series, WPolynomial, grlex_key

__all__ = [
    "PreparedFunction",
    "PreparedMeromorphic",
    "normalize_vertical",
    "levinson_prepare",
    "meromorphic_prepare",
]


# ---------------------------------------------------------------------------
# One-variable (pure w) series utilities.  These all operate on Series of
# the ambient ring whose terms involve only the last variable.
# ---------------------------------------------------------------------------


def _w_monomial(nv, N, j, c=ONE):
    return Series.monomial(nv, N, (0,) * (nv - 1) + (j,), c)


def _shift_down_w(s: Series, k: int) -> Series:
    t = {}
    for e, c in s.terms.items():
        if e[-1] < k:
            raise ValueError("cannot shift below w^0")
        t[e[:-1] + (e[-1] - k,)] = c
    return Series(s.nvars, s.trunc, t, _clean=True)


def _binom(alpha, j):
    """Generalized binomial coefficient for rational alpha."""
    num = Q(1)
    for i in range(j):
        num = num * (alpha - i)
    den = math.factorial(j)
    return GaussianRational(num / den)


def unit_fracpow(u: Series, alpha) -> Series:
    """(unit with constant term 1) raised to a rational power alpha."""
    one = Series.one(u.nvars, u.trunc)
    h = u - one
    out = one
    hp = one
    for j in range(1, u.trunc + 1):
        hp = hp * h
        if hp.is_zero():
            break
        out = out + hp.scale(_binom(alpha, j))
    return out


def unit_root(u: Series, k: int, what="leading coefficient") -> Series:
    """A k-th root of a unit series, canonical root of the constant term."""
    c0 = u.constant_term()
    r0 = kth_root(c0, k)
    if r0 is None:
        raise FieldExtensionError(
            f"{what} {c0!r} is not a {k}-th power in the coefficient field"
        )
    v = unit_fracpow(u.scale(c0.inverse()), Q(1, k))
    return v.scale(r0)


def reversion(rho: Series) -> Series:
    """Compositional inverse of a pure-w series with invertible linear part."""
    nv, N = rho.nvars, rho.trunc
    w = Series.variable(nv, N, nv - 1)
    c1 = rho.coefficient((0,) * (nv - 1) + (1,))
    if c1.is_zero():
        raise HypothesisError("series has no linear term; not invertible")
    inv1 = c1.inverse()
    psi = w.scale(inv1)
    for _ in range(N + 1):
        err = rho.subst_w(psi) - w
        if err.is_zero():
            break
        psi = psi - err.scale(inv1)
    return psi


def exp_series(a: Series) -> Series:
    """Exact exponential of a series of positive order."""
    if a.order() < 1:
        raise ValueError("exp needs positive order")
    out = Series.one(a.nvars, a.trunc)
    ap = out
    fact = 1
    for j in range(1, a.trunc + 1):
        ap = ap * a
        if ap.is_zero():
            break
        fact *= j
        out = out + ap.scale(GaussianRational(Q(1, fact)))
    return out


def integrate_w(a: Series) -> Series:
    """Antiderivative in w with zero constant term."""
    t = {}
    for e, c in a.terms.items():
        j = e[-1]
        if sum(e) + 1 > a.trunc:
            continue
        t[e[:-1] + (j + 1,)] = c * GaussianRational(Q(1, j + 1))
    return Series(a.nvars, a.trunc, t, _clean=True)


# ---------------------------------------------------------------------------
# Vertical normalization and the main preparation loop.
# ---------------------------------------------------------------------------


def normalize_vertical(f: Series) -> CoordinateChange:
    """One-variable change w := phi(w) with f(0, phi(w)) = w^k exactly.

    k is the vanishing order of f(0, w); the leading coefficient must be
    a k-th power in the field, otherwise FieldExtensionError.
    """
    u = f.restrict_vertical()
    if u.is_zero():
        raise HypothesisError("restriction to z = 0 vanishes identically")
    k = f.w_order()
    if k == 0:
        raise HypothesisError("restriction to z = 0 does not vanish at w = 0")
    nv, N = f.nvars, f.trunc
    # u = c_k w^k (1 + h); a root v with v^k = u gives phi as its reversion
    v = unit_root(_shift_down_w(u, k), k, what="leading coefficient of the restriction")
    rho = v.mul_monomial((0,) * (nv - 1) + (1,))
    phi = reversion(rho)
    return CoordinateChange.w_only(phi)


@dataclass
class PreparedFunction:
    k: int
    coeffs: list                      # w^0 .. w^(k-1) coefficients, z-only jets
    change: CoordinateChange          # substitute into the input to reach the shape
    residual: Series                  # substitute(input, change) - shape; must be 0
    prepared: Series                  # the unitary w-polynomial, as a jet
    certified_degree: int

    def polynomial(self) -> WPolynomial:
        nv, N = self.prepared.nvars, self.prepared.trunc
        return WPolynomial(self.coeffs + [Series.one(nv, N)])

    def is_real(self):
        return all(c.is_real() for c in self.coeffs) and self.change.is_real()


def levinson_prepare(f: Series) -> PreparedFunction:
    """Turn f into a unitary w-polynomial of degree k by a w-change alone.

    Degree-by-degree in z: after the vertical normalization, the part of
    each z-slice with w-degree >= k is cancelled by the substitution
    w := w - (1/k) * sum d_j w^(j-k+1), which works against the exact
    leading term w^k; the rest is absorbed into the output coefficients.
    """
    nv, N = f.nvars, f.trunc
    k = f.w_order()
    if k is math.inf or k == 0:
        raise HypothesisError("restriction to z = 0 must vanish to finite positive order")
    # the change jet through degree N is only pinned down by slices of f
    # through degree N + k - 1, so the loop runs on the canonical
    # zero-extension at that internal order and truncates afterwards
    n_int = N + k - 1
    f_ext = f.with_trunc(n_int)
    change = normalize_vertical(f_ext)
    cur = change.apply(f_ext)
    inv_k = GaussianRational(Q(-1, k))
    w_slot = nv - 1
    for m in range(1, n_int + 1):
        delta_terms = {}
        for e, c in cur.terms.items():
            if sum(e) - e[w_slot] == m and e[w_slot] >= k:
                ne = e[:-1] + (e[w_slot] - k + 1,)
                delta_terms[ne] = delta_terms.get(ne, ZERO) + c * inv_k
        delta = Series(nv, n_int, delta_terms)
        if delta.is_zero():
            continue
        cur = cur.shift_w(delta)
        w = Series.variable(nv, n_int, w_slot)
        change = change.compose(CoordinateChange.w_only(w + delta))
    change = CoordinateChange(
        [c.with_trunc(N) for c in change.components], change.shape
    )
    cur = cur.with_trunc(N)
    coeffs = [cur.coeff_of_w(j) for j in range(k)]
    target = _w_monomial(nv, N, k)
    for j, c in enumerate(coeffs):
        target = target + c.mul_monomial((0,) * (nv - 1) + (j,))
    residual = change.apply(f) - target
    if not residual.is_zero():
        raise SolverInconsistentError(residual.order(), "preparation left a nonzero residual")
    return PreparedFunction(
        k=k,
        coeffs=coeffs,
        change=change,
        residual=residual,
        prepared=target,
        certified_degree=N,
    )


# ---------------------------------------------------------------------------
# Meromorphic preparation: num/den becomes a quotient of unitary
# w-polynomials after a single w-change.  The residual contract is the
# cleared identity  (num o Phi) * Q - (den o Phi) * P = 0.
# ---------------------------------------------------------------------------


@dataclass
class PreparedMeromorphic:
    k0: int
    k_inf: int
    numerator: WPolynomial
    denominator: WPolynomial
    change: CoordinateChange
    residual: Series
    certified_degree: int
    restriction_order: int = 0        # order of num/den on the vertical line

    def is_real(self):
        return (
            self.numerator.is_real()
            and self.denominator.is_real()
            and self.change.is_real()
        )


def _is_unitary_wpoly(s: Series):
    """If s is a w-polynomial with leading coefficient 1, return its degree."""
    d = s.max_w_degree()
    if d < 0:
        return None
    nv, N = s.nvars, s.trunc
    if s.coeff_of_w(d) == Series.one(nv, N):
        return d
    return None


class _ClearedSolver:
    """Degree-by-degree solver for cleared residual identities.

    Maintains a w-only change and polynomial coefficient unknowns, kills
    the residual one total degree at a time with exact linear solves,
    and retries with wider degree windows before giving up.  Progress is
    measured on the residual itself, so any linearization slack is
    caught and either repaired or surfaced as an inconsistency.
    """

    def __init__(self, nv, N):
        self.nv = nv
        self.N = N

    def monomials_of_degree(self, d, z_only=False, min_z=0):
        out = []

        def rec(prefix, remaining, slots):
            if slots == 1:
                out.append(tuple(prefix) + (remaining,))
                return
            for e in range(remaining + 1):
                rec(prefix + [e], remaining - e, slots - 1)

        rec([], d, self.nv)
        if z_only:
            out = [e for e in out if e[-1] == 0]
        if min_z:
            out = [e for e in out if sum(e[:-1]) >= min_z]
        return sorted(out, key=grlex_key)


def meromorphic_prepare(num: Series, den: Series) -> PreparedMeromorphic:
    """Prepare num/den into a quotient of unitary w-polynomials."""
    num._check_shape(den)
    nv, N = num.nvars, num.trunc

    # idempotent fast path: both already unitary w-polynomials
    d0, d1 = _is_unitary_wpoly(num), _is_unitary_wpoly(den)
    if d0 is not None and d1 is not None:
        return PreparedMeromorphic(
            k0=d0,
            k_inf=d1,
            numerator=WPolynomial.from_series(num, d0),
            denominator=WPolynomial.from_series(den, d1),
            change=CoordinateChange.identity(nv, N),
            residual=Series.zero(nv, N),
            certified_degree=N,
            restriction_order=(num.w_order() - den.w_order())
            if num.w_order() is not math.inf and den.w_order() is not math.inf
            else 0,
        )

    a = num.restrict_vertical()
    b = den.restrict_vertical()
    if b.is_zero():
        raise HypothesisError(
            "denominator restricted to z = 0 vanishes identically; the restriction is not a"
            " well-defined meromorphic germ"
        )
    if a.is_zero():
        raise HypothesisError("restriction to z = 0 is constant (identically zero)")

    # constant denominator: this is the holomorphic preparation in disguise
    if not den.depends_on_w() and den.order() == 0 and len(den.terms) == 1:
        c = den.constant_term()
        prep = levinson_prepare(num.scale(c.inverse()))
        den_poly = WPolynomial([Series.one(nv, N).scale(c)])
        res = prep.change.apply(num) - prep.prepared.scale(c)
        return PreparedMeromorphic(
            k0=prep.k,
            k_inf=0,
            numerator=prep.polynomial(),
            denominator=den_poly,
            change=prep.change,
            residual=res,
            certified_degree=N,
            restriction_order=prep.k,
        )

    oa, ob = a.w_order(), b.w_order()
    l = oa - ob
    A = _shift_down_w(a, oa)
    B = _shift_down_w(b, ob)
    w = Series.variable(nv, N, nv - 1)

    if l != 0:
        m = abs(l)
        ratio = A * B.invert_unit() if l > 0 else B * A.invert_unit()
        v = unit_root(ratio, m, what="leading coefficient of the restriction")
        phi0 = reversion(v.mul_monomial((0,) * (nv - 1) + (1,)))
        k0, k_inf = oa, ob
        p_coeffs = [Series.zero(nv, N) for _ in range(k0)]
        q_coeffs = [Series.zero(nv, N) for _ in range(k_inf)]
    else:
        ratio = A * B.invert_unit()
        c = ratio.constant_term()
        dev = ratio - Series.const(nv, N, c)
        if dev.is_zero():
            raise HypothesisError("restriction to z = 0 is a constant germ")
        lam = dev.order()
        v = unit_root(_shift_down_w(dev, lam), lam, what="leading coefficient of the restriction")
        phi0 = reversion(v.mul_monomial((0,) * (nv - 1) + (1,)))
        k0, k_inf = oa + lam, ob
        p_coeffs = [Series.zero(nv, N) for _ in range(k0)]
        p_coeffs[oa] = Series.const(nv, N, c)
        q_coeffs = [Series.zero(nv, N) for _ in range(k_inf)]

    change = CoordinateChange.w_only(phi0)
    num_c = num.subst_w(phi0)
    den_c = den.subst_w(phi0)
    num_w = num.partial(nv - 1).subst_w(phi0)
    den_w = den.partial(nv - 1).subst_w(phi0)

    helper = _ClearedSolver(nv, N)
    one = Series.one(nv, N)

    def poly_series(coeffs, deg):
        out = _w_monomial(nv, N, deg)
        for j, cj in enumerate(coeffs):
            out = out + cj.mul_monomial((0,) * (nv - 1) + (j,))
        return out

    def residual():
        P = poly_series(p_coeffs, k0)
        Qs = poly_series(q_coeffs, k_inf)
        return num_c * Qs - den_c * P, P, Qs

    res, P, Qs = residual()
    guard = 0
    while not res.is_zero():
        nu = res.order()
        solved = False
        for slack in (2, 4, N):
            cols = []
            labels = []
            Wser = num_w * Qs - den_w * P
            oW = Wser.order()
            if oW is not math.inf:
                for d in range(max(1, nu - oW - slack), nu - oW + 1):
                    for mu in helper.monomials_of_degree(d, min_z=1):
                        cols.append(Wser.mul_monomial(mu))
                        labels.append(("delta", mu))
            oD = den_c.order()
            for j in range(k0):
                lead = nu - oD - j
                for d in range(max(0, lead - slack), lead + 1):
                    for mu in helper.monomials_of_degree(d, z_only=True):
                        cols.append(-den_c.mul_monomial(mu[:-1] + (j,)))
                        labels.append(("p", j, mu))
            oN = num_c.order()
            for j in range(k_inf):
                lead = nu - oN - j
                for d in range(max(0, lead - slack), lead + 1):
                    for mu in helper.monomials_of_degree(d, z_only=True):
                        cols.append(num_c.mul_monomial(mu[:-1] + (j,)))
                        labels.append(("q", j, mu))
            if not cols:
                continue
            row_lo = min((c.order() for c in cols if not c.is_zero()), default=nu)
            row_lo = min(row_lo, nu)
            rows = set()
            for d in range(row_lo, nu + 1):
                rows.update(e for e in res.degree_slice(d).terms)
                for c in cols:
                    rows.update(e for e in c.terms if sum(e) >= row_lo and sum(e) <= nu)
            rows = sorted(rows, key=grlex_key)
            matrix = [[c.coefficient(e) for c in cols] for e in rows]
            rhs = [-res.coefficient(e) for e in rows]
            sol = solve(matrix, rhs)
            if sol is None:
                continue
            delta = Series.zero(nv, N)
            for x, lab in zip(sol.solution, labels):
                if x.is_zero():
                    continue
                if lab[0] == "delta":
                    delta = delta + Series.monomial(nv, N, lab[1], x)
                elif lab[0] == "p":
                    p_coeffs[lab[1]] = p_coeffs[lab[1]] + Series.monomial(nv, N, lab[2], x)
                else:
                    q_coeffs[lab[1]] = q_coeffs[lab[1]] + Series.monomial(nv, N, lab[2], x)
            if not delta.is_zero():
                num_c = num_c.shift_w(delta)
                den_c = den_c.shift_w(delta)
                num_w = num_w.shift_w(delta)
                den_w = den_w.shift_w(delta)
                change = change.compose(CoordinateChange.w_only(w + delta))
            new_res, new_P, new_Q = residual()
            if new_res.is_zero() or new_res.order() > nu:
                res, P, Qs = new_res, new_P, new_Q
                solved = True
                break
            # roll back polynomial updates is impossible cheaply; but the
            # update can only have failed through linearization slack,
            # which a wider window repairs on the refreshed state
            res, P, Qs = new_res, new_P, new_Q
        if not solved:
            guard += 1
            if guard > N + 2:
                raise SolverInconsistentError(res.order())
        else:
            guard = 0

    numerator = WPolynomial([c for c in p_coeffs] + [one])
    denominator = WPolynomial([c for c in q_coeffs] + [one])
    return PreparedMeromorphic(
        k0=k0,
        k_inf=k_inf,
        numerator=numerator,
        denominator=denominator,
        change=change,
        residual=res,
        certified_degree=N,
        restriction_order=l,
    )
