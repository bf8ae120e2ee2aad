"""Germs of coordinate changes at jet level.

A CoordinateChange packages one Series per variable: the expression of
each source coordinate in terms of the target coordinates.  Operations
that prepare a function f return a change such that substituting it
into f yields the prepared shape; vector field operations read the same
object as a map applied to points.  Either way the germ fixes the
origin and is invertible exactly when its linear part is.

Declared shapes: "w-only" (all z fixed, only the vertical coordinate
moves), "full" (general germ), "mobius" (accepted on input for
interface completeness; the engine itself never emits it).
"""

from __future__ import annotations

from .coeff import GaussianRational, ZERO, ONE
from .errors import DomainError, ShapeMismatchError
from .linalg import solve
from .series import Series, series_from_json, series_to_json

__all__ = ["CoordinateChange"]

_SHAPES = ("w-only", "full", "mobius")


class CoordinateChange:
    __slots__ = ("components", "shape")

    def __init__(self, components, shape="full"):
        if shape not in _SHAPES:
            raise ValueError(f"unknown shape {shape!r}")
        nv = components[0].nvars
        N = components[0].trunc
        if len(components) != nv:
            raise ShapeMismatchError("need one component per variable")
        for c in components:
            if c.nvars != nv or c.trunc != N:
                raise ShapeMismatchError("component shapes disagree")
            if not c.constant_term().is_zero():
                raise DomainError("coordinate change must fix the origin")
        self.components = list(components)
        self.shape = shape

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, nvars, trunc):
        comps = [Series.variable(nvars, trunc, i) for i in range(nvars)]
        return cls(comps, "w-only")

    @classmethod
    def w_only(cls, phi):
        """All z variables fixed, w replaced by phi(z, w)."""
        nv, N = phi.nvars, phi.trunc
        comps = [Series.variable(nv, N, i) for i in range(nv - 1)] + [phi]
        return cls(comps, "w-only")

    @classmethod
    def from_linear(cls, matrix, nvars, trunc):
        comps = []
        for i in range(nvars):
            s = Series.zero(nvars, trunc)
            for j in range(nvars):
                c = matrix[i][j]
                if not c.is_zero():
                    s = s + Series.variable(nvars, trunc, j).scale(c)
            comps.append(s)
        return cls(comps, "full")

    # -- queries ------------------------------------------------------------
    @property
    def nvars(self):
        return self.components[0].nvars

    @property
    def trunc(self):
        return self.components[0].trunc

    def is_identity(self):
        nv, N = self.nvars, self.trunc
        return all(
            c == Series.variable(nv, N, i) for i, c in enumerate(self.components)
        )

    def linear_matrix(self):
        """Matrix of the linear part, rows indexed by components."""
        nv = self.nvars
        out = []
        for comp in self.components:
            row = []
            for j in range(nv):
                e = [0] * nv
                e[j] = 1
                row.append(comp.coefficient(tuple(e)))
            out.append(row)
        return out

    def is_jet_invertible(self):
        m = self.linear_matrix()
        res = solve(m, [ZERO] * self.nvars)
        return res is not None and len(res.pivots) == self.nvars

    def is_real(self):
        return all(c.is_real() for c in self.components)

    # -- action ---------------------------------------------------------------
    def apply(self, series):
        """Substitute this change into a series: series composed with it."""
        if self.shape == "w-only":
            return series.subst_w(self.components[-1])
        return series.substitute(self.components)

    def compose(self, inner):
        """Standard composition self(inner(.)) at jet level."""
        comps = [inner.apply(c) for c in self.components]
        shape = "w-only" if self.shape == inner.shape == "w-only" else "full"
        return CoordinateChange(comps, shape)

    def jacobian(self):
        """Grid of partial derivatives d(component i)/d(variable j)."""
        return [[c.partial(j) for j in range(self.nvars)] for c in self.components]

    def inverse(self):
        """Jet inverse, by Newton iteration off the inverted linear part."""
        nv, N = self.nvars, self.trunc
        L = self.linear_matrix()
        cols = []
        for j in range(nv):
            rhs = [ONE if i == j else ZERO for i in range(nv)]
            res = solve(L, rhs)
            if res is None or len(res.pivots) != nv:
                raise DomainError("change is not invertible at jet level")
            cols.append(res.solution)
        Linv = [[cols[j][i] for j in range(nv)] for i in range(nv)]
        ident = [Series.variable(nv, N, i) for i in range(nv)]
        psi = [
            sum(
                (ident[j].scale(Linv[i][j]) for j in range(nv)),
                Series.zero(nv, N),
            )
            for i in range(nv)
        ]
        for _ in range(N + 1):
            err = [c.substitute(psi) - ident[i] for i, c in enumerate(self.components)]
            if all(e.is_zero() for e in err):
                break
            psi = [
                psi[i]
                - sum((err[j].scale(Linv[i][j]) for j in range(nv)), Series.zero(nv, N))
                for i in range(nv)
            ]
        shape = "w-only" if self.shape == "w-only" else "full"
        return CoordinateChange(psi, shape)

    def check_inverse(self):
        """Roundtrip certificate: self composed with its inverse is id."""
        inv = self.inverse()
        return self.compose(inv).is_identity() and inv.compose(self).is_identity()

    # -- serialization ----------------------------------------------------------
    def to_json(self):
        return {
            "shape": self.shape,
            "nvars": self.nvars,
            "trunc": self.trunc,
            "components": [series_to_json(c) for c in self.components],
        }

    @staticmethod
    def from_json(d):
        comps = [series_from_json(c) for c in d["components"]]
        return CoordinateChange(comps, d.get("shape", "full"))

    def __eq__(self, other):
        if not isinstance(other, CoordinateChange):
            return NotImplemented
        return self.components == other.components

    def __repr__(self):
        return f"CoordinateChange({self.shape}, {self.components!r})"
