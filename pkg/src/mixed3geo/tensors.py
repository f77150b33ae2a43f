"""Tensor fields on a chart and the pointwise operations built on them.

Conventions:

* ``EndoField`` components are ``T[k, l]`` with ``k`` the output index, so
  ``(T X)^k = T[k, l] X^l``.
* Exterior derivatives use the weighted convention
  ``dη(X, Y) = ½(Xη(Y) − Yη(X) − η([X, Y]))`` and
  ``3 dΩ(X, Y, Z) = Σ_cyc (XΩ(Y, Z) − Ω([X, Y], Z))``; forms are evaluated
  as ``ω(X, Y) = ω_jk X^j Y^k`` with no extra factor.
* The wedge of a 1-form and a 2-form carries the matching ⅓ weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateMetric, NotSkewAdjoint, NullPivot
from .jet_chart import Chart, Jet2, Point, ScalarField, jet_einsum

NONDEGENERACY_THRESHOLD = 1e-10
NULL_PIVOT_THRESHOLD = 1e-8
SKEW_THRESHOLD = 1e-8

JetFn = Callable[[Jet2], Jet2]


class TensorField:
    """Array-valued field on a chart, evaluated as a jet of its components."""

    shape_kind = "tensor"

    def __init__(self, chart: Chart, fn: JetFn, name: str = ""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jet(self, p: Point) -> Jet2:
        return self.fn(Jet2.variables(p.coords))

    def at(self, p: Point) -> np.ndarray:
        return self.jet(p).val

    def value(self, coords) -> np.ndarray:
        """Value only: evaluated on a jet with no derivative directions."""
        x = np.asarray(coords, dtype=float)
        return self.fn(Jet2(x, np.zeros((x.size, 0)), np.zeros((x.size, 0, 0)))).val

    def component(self, *idx) -> ScalarField:
        fn = self.fn
        return ScalarField(self.chart, lambda x: fn(x)[idx], f"{self.name}{list(idx)}")

    def map_jet(self, op: Callable[[Jet2], Jet2], name: str = ""):
        """Same kind of field with ``op`` applied to every evaluation."""
        fn = self.fn
        return type(self)(self.chart, lambda x: op(fn(x)), name or self.name)

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r}, dim={self.chart.dim})"


class VectorField(TensorField):
    shape_kind = "vector"

    @classmethod
    def constant(cls, chart: Chart, v, name: str = "") -> "VectorField":
        v = np.asarray(v, dtype=float)
        return cls(chart, lambda x: Jet2.constant(v, x.dim), name or "const")

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "VectorField":
        e = np.zeros(chart.dim)
        e[i] = 1.0
        return cls.constant(chart, e, f"d/d{chart.coord_names[i]}")

    @classmethod
    def affine(cls, chart: Chart, base, lin, center=None, name: str = "") -> "VectorField":
        """``X(x) = base + lin @ (x - center)``; cheap non-constant test fields."""
        base = np.asarray(base, dtype=float)
        lin = np.asarray(lin, dtype=float)
        c = np.zeros(chart.dim) if center is None else np.asarray(center, dtype=float)
        return cls(chart, lambda x: jet_einsum("kl,l->k", lin, x - c) + base, name or "affine")

    def scaled(self, f: ScalarField) -> "VectorField":
        fx, gx = self.fn, f.fn
        return VectorField(self.chart, lambda x: gx(x) * fx(x), f"{f.name}*{self.name}")

    def __add__(self, other: "VectorField") -> "VectorField":
        a, b = self.fn, other.fn
        return VectorField(self.chart, lambda x: a(x) + b(x), f"{self.name}+{other.name}")


class OneForm(TensorField):
    shape_kind = "oneform"

    @classmethod
    def constant(cls, chart: Chart, w, name: str = "") -> "OneForm":
        w = np.asarray(w, dtype=float)
        return cls(chart, lambda x: Jet2.constant(w, x.dim), name or "const")

    @classmethod
    def exact(cls, f: ScalarField) -> "OneForm":
        """``df``; second derivatives of ``f`` are needed to differentiate it again."""
        g = f.fn

        def fn(x):
            j = g(x)
            d = j.dim
            # derivative of the gradient needs third derivatives; exact only
            # when f is at most quadratic, which is how the tests use it
            return Jet2(j.grad, j.hess, np.zeros(j.hess.shape + (d,)))

        return cls(f.chart, fn, f"d{f.name}")


class EndoField(TensorField):
    shape_kind = "endo"

    @classmethod
    def constant(cls, chart: Chart, m, name: str = "") -> "EndoField":
        m = np.asarray(m, dtype=float)
        return cls(chart, lambda x: Jet2.constant(m, x.dim), name or "const")

    @classmethod
    def identity(cls, chart: Chart) -> "EndoField":
        return cls.constant(chart, np.eye(chart.dim), "I")

    def apply(self, X: VectorField) -> VectorField:
        t, v = self.fn, X.fn
        return VectorField(self.chart, lambda x: jet_einsum("kl,l->k", t(x), v(x)),
                           f"{self.name}({X.name})")

    def __matmul__(self, other: "EndoField") -> "EndoField":
        a, b = self.fn, other.fn
        return EndoField(self.chart, lambda x: jet_einsum("kl,lm->km", a(x), b(x)),
                         f"{self.name}{other.name}")


class MetricField(TensorField):
    """Symmetric (0,2) field; components are symmetrized on every evaluation."""

    shape_kind = "metric"

    def __init__(self, chart: Chart, fn: JetFn, name: str = "g"):
        super().__init__(chart, lambda x: fn(x).symmetrized(), name)

    @classmethod
    def constant(cls, chart: Chart, m, name: str = "g") -> "MetricField":
        m = np.asarray(m, dtype=float)
        return cls(chart, lambda x: Jet2.constant(m, x.dim), name)

    def check_nondegenerate(self, p: Point) -> np.ndarray:
        gm = self.at(p)
        if abs(np.linalg.det(gm)) < NONDEGENERACY_THRESHOLD:
            raise DegenerateMetric(f"|det g| < {NONDEGENERACY_THRESHOLD:g} at {p.tolist()}")
        return gm

    def inner(self, p: Point, X, Y) -> float:
        return float(np.asarray(X) @ self.at(p) @ np.asarray(Y))


# --------------------------------------------------------------------------
# Antisymmetric forms
# --------------------------------------------------------------------------

class FormValue:
    """Value of a k-form at a point, stored on strictly increasing index tuples."""

    def __init__(self, degree: int, dim: int, components):
        self.degree = degree
        self.dim = dim
        self.index = tuple(combinations(range(dim), degree))
        comps = np.asarray(components, dtype=float)
        if comps.shape != (len(self.index),):
            raise ValueError("wrong number of form components")
        self.components = comps

    @classmethod
    def from_full(cls, degree: int, full: np.ndarray) -> "FormValue":
        full = np.asarray(full, dtype=float)
        dim = full.shape[0]
        idx = tuple(combinations(range(dim), degree))
        return cls(degree, dim, [full[t] for t in idx])

    def full(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.degree)
        if self.degree == 2:
            for c, (i, j) in zip(self.components, self.index):
                out[i, j] = c
                out[j, i] = -c
        elif self.degree == 3:
            for c, (i, j, k) in zip(self.components, self.index):
                for perm, s in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                                ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)):
                    out[perm] = s * c
        elif self.degree == 1:
            out[:] = self.components
        else:
            raise ValueError("only degrees 1 to 3 are supported")
        return out

    def __call__(self, *vectors) -> float:
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vectors")
        t = self.full()
        for v in vectors:
            t = np.tensordot(np.asarray(v, dtype=float), t, axes=(0, 0))
        return float(t)

    def _check(self, other: "FormValue"):
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError("forms of different degree or dimension")

    def __add__(self, other: "FormValue") -> "FormValue":
        self._check(other)
        return FormValue(self.degree, self.dim, self.components + other.components)

    def __sub__(self, other: "FormValue") -> "FormValue":
        self._check(other)
        return FormValue(self.degree, self.dim, self.components - other.components)

    def __mul__(self, c: float) -> "FormValue":
        return FormValue(self.degree, self.dim, self.components * float(c))

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components), initial=0.0))

    def __repr__(self):
        return f"FormValue(degree={self.degree}, dim={self.dim}, max={self.max_abs():.3g})"


class TwoFormField(TensorField):
    """2-form field whose evaluator yields components on pairs ``i < j``."""

    shape_kind = "twoform"

    def __init__(self, chart: Chart, fn: JetFn, name: str = ""):
        super().__init__(chart, fn, name)
        d = chart.dim
        pairs = list(combinations(range(d), 2))
        self._rows = np.array([i for i, _ in pairs], dtype=int)
        self._cols = np.array([j for _, j in pairs], dtype=int)

    @classmethod
    def from_full(cls, chart: Chart, full_fn: JetFn, name: str = "") -> "TwoFormField":
        d = chart.dim
        rows, cols = (np.array(a, dtype=int) for a in zip(*combinations(range(d), 2)))
        return cls(chart, lambda x: full_fn(x)[rows, cols], name)

    def full_jet(self, p: Point) -> Jet2:
        return self.expand(self.jet(p))

    def expand(self, comp: Jet2) -> Jet2:
        d = self.chart.dim
        nd = comp.dim
        val = np.zeros((d, d))
        grad = np.zeros((d, d, nd))
        hess = np.zeros((d, d, nd, nd))
        r, c = self._rows, self._cols
        val[r, c], val[c, r] = comp.val, -comp.val
        grad[r, c], grad[c, r] = comp.grad, -comp.grad
        hess[r, c], hess[c, r] = comp.hess, -comp.hess
        return Jet2(val, grad, hess)

    def form_at(self, p: Point) -> FormValue:
        return FormValue(2, self.chart.dim, self.jet(p).val)


def fundamental_2form_field(g: MetricField, phi: EndoField, name: str = "Phi") -> TwoFormField:
    """``Φ(X, Y) = g(X, φY)`` as a field, ``Φ_jk = g_jl φ^l_k``."""
    gf, pf = g.fn, phi.fn
    return TwoFormField.from_full(g.chart, lambda x: jet_einsum("jl,lk->jk", gf(x), pf(x)), name)


# --------------------------------------------------------------------------
# Pointwise operations
# --------------------------------------------------------------------------

def _bracket(xj: Jet2, yj: Jet2) -> np.ndarray:
    # grad[k, j] = d_j X^k
    return yj.grad @ xj.val - xj.grad @ yj.val


def lie_bracket(X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """``[X, Y]^k = X^j d_j Y^k − Y^j d_j X^k`` at ``p``."""
    return _bracket(X.jet(p), Y.jet(p))


def d_oneform(eta: OneForm, p: Point) -> FormValue:
    """``(dη)_jk = ½(d_j η_k − d_k η_j)``."""
    g = eta.jet(p).grad  # g[k, j] = d_j eta_k
    return FormValue.from_full(2, 0.5 * (g.T - g))


def d_twoform(omega: TwoFormField, p: Point) -> FormValue:
    """``(dΩ)_ijk = ⅓(d_i Ω_jk + d_j Ω_ki + d_k Ω_ij)``."""
    D = np.einsum("jki->ijk", omega.full_jet(p).grad)  # D[i, j, k] = d_i Omega_jk
    full = (D + np.einsum("jki->ijk", D) + np.einsum("kij->ijk", D)) / 3.0
    return FormValue.from_full(3, full)


def wedge_1_2(w, omega: FormValue) -> FormValue:
    """``(ω∧Ω)_ijk = ⅓(ω_i Ω_jk + ω_j Ω_ki + ω_k Ω_ij)``, matching :func:`d_twoform`."""
    w = np.asarray(w, dtype=float)
    O = omega.full()
    T = np.einsum("i,jk->ijk", w, O)
    full = (T + np.einsum("jki->ijk", T) + np.einsum("kij->ijk", T)) / 3.0
    return FormValue.from_full(3, full)


def nijenhuis_at(Tj: Jet2, Xj: Jet2, Yj: Jet2) -> np.ndarray:
    """Nijenhuis tensor from jets of ``T``, ``X`` and ``Y`` at one point."""
    TX = jet_einsum("kl,l->k", Tj, Xj)
    TY = jet_einsum("kl,l->k", Tj, Yj)
    T = Tj.val
    return (T @ T @ _bracket(Xj, Yj) + _bracket(TX, TY)
            - T @ _bracket(TX, Yj) - T @ _bracket(Xj, TY))


def nijenhuis(T: EndoField, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """``N_T(X, Y) = T²[X, Y] + [TX, TY] − T[TX, Y] − T[X, TY]`` at ``p``."""
    return nijenhuis_at(T.jet(p), X.jet(p), Y.jet(p))


def skew_residual(gm: np.ndarray, phi: np.ndarray) -> float:
    """max |g(φX, Y) + g(X, φY)| over basis vectors."""
    A = gm @ phi
    return float(np.max(np.abs(A + A.T)))


def fundamental_2form(g: MetricField, phi: EndoField, p: Point) -> FormValue:
    gm, pm = g.at(p), phi.at(p)
    r = skew_residual(gm, pm)
    if r > SKEW_THRESHOLD:
        raise NotSkewAdjoint(f"g(φX,Y)+g(X,φY) reaches {r:.3g} at {p.tolist()}")
    return FormValue.from_full(2, gm @ pm)


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame; ``vectors[i]`` is E_i and ``signs[i] = g(E_i, E_i)``."""

    vectors: np.ndarray
    signs: np.ndarray

    def gram(self, gm: np.ndarray) -> np.ndarray:
        return self.vectors @ gm @ self.vectors.T

    def inverse_metric(self) -> np.ndarray:
        return np.einsum("i,ij,ik->jk", self.signs, self.vectors, self.vectors)


def orthonormal_frame_matrix(gm: np.ndarray, seeds: Sequence | None = None) -> Frame:
    """Indefinite Gram-Schmidt on a metric matrix.

    Seed vectors are orthonormalized first, in order; the remaining slots are
    filled from the coordinate basis, always taking the candidate with the
    largest ``|g(v, v)|`` after projection.
    """
    gm = np.asarray(gm, dtype=float)
    d = gm.shape[0]
    if abs(np.linalg.det(gm)) < NONDEGENERACY_THRESHOLD:
        raise DegenerateMetric("metric is singular")
    basis: list[np.ndarray] = []
    signs: list[float] = []

    def project(v):
        for _ in range(2):
            for e, s in zip(basis, signs):
                v = v - s * (v @ gm @ e) * e
        return v

    def push(v):
        n = v @ gm @ v
        if abs(n) < NULL_PIVOT_THRESHOLD:
            raise NullPivot(f"null pivot |g(v,v)| = {abs(n):.3g}")
        basis.append(v / np.sqrt(abs(n)))
        signs.append(1.0 if n > 0 else -1.0)

    for s in seeds or ():
        push(project(np.asarray(s, dtype=float)))
    remaining = list(np.eye(d))
    while len(basis) < d:
        cands = [project(v) for v in remaining]
        norms = [abs(c @ gm @ c) for c in cands]
        k = int(np.argmax(norms))
        push(cands[k])
        remaining.pop(k)
    return Frame(np.array(basis), np.array(signs))


def orthonormal_frame(g: MetricField, p: Point, seeds: Sequence | None = None) -> Frame:
    return orthonormal_frame_matrix(g.check_nondegenerate(p), seeds)


def signature(gm: np.ndarray) -> tuple[int, int]:
    """(number of minus signs, number of plus signs)."""
    s = orthonormal_frame_matrix(gm).signs
    return int(np.sum(s < 0)), int(np.sum(s > 0))


def killing_residual(g: MetricField, xi: VectorField, p: Point) -> float:
    """max-norm of the Lie derivative of ``g`` along ``ξ`` at ``p``."""
    gj, xj = g.jet(p), xi.jet(p)
    gm = gj.val
    dxi = xj.grad  # dxi[i, j] = d_j xi^i
    L = (np.einsum("jki,i->jk", gj.grad, xj.val)
         + np.einsum("ik,ij->jk", gm, dxi)
         + np.einsum("ij,ik->jk", gm, dxi))
    return float(np.max(np.abs(L)))


def d_oneform_field(eta: OneForm, name: str = "") -> TwoFormField:
    """``dη`` as a 2-form field.

    Its gradient uses the Hessian of ``η``; its own Hessian would need third
    derivatives and is filled with NaN so accidental use is loud.
    """
    ef = eta.fn

    def full(x):
        j = ef(x)
        g, h = j.grad, j.hess  # g[k, j] = d_j eta_k, h[k, j, i] = d_i d_j eta_k
        val = 0.5 * (g.T - g)
        grad = 0.5 * (np.swapaxes(h, 0, 1) - h)
        return Jet2(val, grad, np.full(grad.shape + (j.dim,), np.nan))

    return TwoFormField.from_full(eta.chart, full, name or f"d{eta.name}")
