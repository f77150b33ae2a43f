"""Coordinate charts, sample points and order-2 jet arithmetic.

A :class:`Jet2` carries the value, gradient and Hessian of a (possibly
array-valued) function of the chart coordinates at one point.  Every
component function of every shipped model is written as a composition of jet
operations applied to the coordinate jet, so first and second derivatives are
exact up to rounding.  :func:`fd_oracle` recomputes them by central
differences from values alone and is only used as an independent check.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateValue, SamplingExhausted, StencilOutOfDomain

SAMPLING_MARGIN = 0.05
DEFAULT_FD_STEP = 1e-3
DEFAULT_FD_RTOL = 1e-4

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """64-bit SplitMix generator.

    Small, fast and fully reproducible across platforms, which is all the
    sampler and the random-argument draws need.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo, hi, size: int | None = None):
        if size is None:
            return lo + (hi - lo) * self.random()
        u = np.array([self.random() for _ in range(size)])
        return np.asarray(lo) + (np.asarray(hi) - np.asarray(lo)) * u

    def spawn(self, key: int) -> "SplitMix64":
        """Independent child stream, keyed deterministically."""
        child = SplitMix64(self.state ^ ((int(key) * 0xD1B54A32D192ED03) & _MASK64))
        child.next_u64()
        return child


# --------------------------------------------------------------------------
# Charts and points
# --------------------------------------------------------------------------

Constraint = Callable[[np.ndarray], float]


@dataclass(frozen=True, eq=False)
class Chart:
    """A coordinate chart on an open subset of R^dim.

    The domain is the set where every constraint is strictly positive.
    ``box_lo``/``box_hi`` bound the domain and are used for sampling only.
    """

    dim: int
    coord_names: tuple[str, ...]
    constraints: tuple[Constraint, ...]
    box_lo: np.ndarray
    box_hi: np.ndarray
    name: str = "chart"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be positive")
        if len(self.coord_names) != self.dim:
            raise ValueError("need one coordinate name per dimension")
        lo = np.array(self.box_lo, dtype=float)
        hi = np.array(self.box_hi, dtype=float)
        if lo.shape != (self.dim,) or hi.shape != (self.dim,):
            raise ValueError("bounding box must have shape (dim,)")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "box_lo", lo)
        object.__setattr__(self, "box_hi", hi)

    def constraint_values(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        return np.array([float(c(x)) for c in self.constraints])

    def contains(self, coords, margin: float = 0.0) -> bool:
        if isinstance(coords, Point):
            coords = coords.coords
        x = np.asarray(coords, dtype=float)
        if x.shape != (self.dim,):
            return False
        return all(float(c(x)) > margin for c in self.constraints)

    def point(self, coords) -> "Point":
        return Point(self, coords)

    @classmethod
    def box(cls, lo, hi, names=None, name="box") -> "Chart":
        """Open axis-aligned box, written as one quadratic constraint per axis."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        dim = len(lo)
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        cons = tuple(
            (lambda x, i=i: half[i] ** 2 - (x[i] - mid[i]) ** 2) for i in range(dim)
        )
        names = tuple(names) if names else tuple(f"x{i}" for i in range(dim))
        return cls(dim, names, cons, lo, hi, name)

    @classmethod
    def unit_ball(cls, dim: int) -> "Chart":
        names = tuple(f"x{i}" for i in range(dim))
        return cls(dim, names, (lambda x: 1.0 - float(x @ x),),
                   -np.ones(dim), np.ones(dim), "unit-ball")


@dataclass(frozen=True, eq=False)
class Point:
    chart: Chart
    coords: np.ndarray = field()

    def __post_init__(self):
        x = np.array(self.coords, dtype=float)
        if x.shape != (self.chart.dim,):
            raise ValueError(f"expected {self.chart.dim} coordinates, got shape {x.shape}")
        x.flags.writeable = False
        object.__setattr__(self, "coords", x)

    def shifted(self, delta) -> "Point":
        return Point(self.chart, self.coords + np.asarray(delta, dtype=float))

    def tolist(self) -> list[float]:
        return [float(c) for c in self.coords]


# --------------------------------------------------------------------------
# Order-2 jets
# --------------------------------------------------------------------------

def _sym(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + np.swapaxes(h, -1, -2))


def _expand(c: np.ndarray, extra: int) -> np.ndarray:
    return c.reshape(c.shape + (1,) * extra)


class Jet2:
    """Value, gradient and Hessian of an array-valued function at a point.

    ``val`` has shape ``S``; ``grad`` has shape ``S + (dim,)`` and ``hess``
    ``S + (dim, dim)``.  A scalar jet is the case ``S == ()``.
    """

    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 100

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)
        if self.grad.shape[:-1] != self.val.shape or self.hess.shape[:-2] != self.val.shape:
            raise ValueError("inconsistent jet shapes")

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, value, dim: int) -> "Jet2":
        v = np.asarray(value, dtype=float)
        return cls(v, np.zeros(v.shape + (dim,)), np.zeros(v.shape + (dim, dim)))

    @classmethod
    def variables(cls, coords) -> "Jet2":
        """Jet of the identity map: the coordinate functions themselves."""
        x = np.asarray(coords, dtype=float)
        d = x.shape[0]
        return cls(x.copy(), np.eye(d), np.zeros((d, d, d)))

    @classmethod
    def stack(cls, jets: Sequence["Jet2"], axis: int = 0) -> "Jet2":
        if axis < 0:
            raise ValueError("stack axis must be nonnegative")
        return cls(np.stack([j.val for j in jets], axis),
                   np.stack([j.grad for j in jets], axis),
                   np.stack([j.hess for j in jets], axis))

    # -- shape helpers -----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.val.shape

    def __getitem__(self, idx) -> "Jet2":
        if not isinstance(idx, tuple):
            idx = (idx,)
        # trailing derivative axes stay untouched
        gi = idx + (slice(None),)
        hi = idx + (slice(None), slice(None))
        if any(i is Ellipsis for i in idx):
            raise IndexError("ellipsis indexing is not supported on jets")
        return Jet2(self.val[idx], self.grad[gi], self.hess[hi])

    def transpose(self) -> "Jet2":
        """Swap the two leading axes of a matrix-valued jet."""
        return Jet2(np.swapaxes(self.val, 0, 1), np.swapaxes(self.grad, 0, 1),
                    np.swapaxes(self.hess, 0, 1))

    @property
    def T(self) -> "Jet2":
        return self.transpose()

    def symmetrized(self) -> "Jet2":
        return 0.5 * (self + self.transpose())

    def reshape(self, *shape) -> "Jet2":
        d = self.dim
        return Jet2(self.val.reshape(shape), self.grad.reshape(shape + (d,)),
                    self.hess.reshape(shape + (d, d)))

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet2):
            return other
        return np.asarray(other, dtype=float)

    def __add__(self, other):
        o = self._coerce(other)
        if isinstance(o, Jet2):
            return Jet2(self.val + o.val, *_broadcast_pair(self, o, lambda a, b: a + b))
        shape = np.broadcast_shapes(self.val.shape, o.shape)
        return Jet2(self.val + o, _bcast(self.grad, shape, 1), _bcast(self.hess, shape, 2))

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.val, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if not isinstance(o, Jet2):
            return Jet2(self.val * o, self.grad * _expand(o, 1), self.hess * _expand(o, 2))
        av, bv = self.val, o.val
        ag, bg = self.grad, o.grad
        cross = ag[..., :, None] * bg[..., None, :]
        # vectorized float ops can round mirrored entries differently
        hess = _sym(self.hess * _expand(bv, 2) + _expand(av, 2) * o.hess
                    + cross + np.swapaxes(cross, -1, -2))
        grad = ag * _expand(bv, 1) + _expand(av, 1) * bg
        return Jet2(av * bv, grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if np.any(self.val == 0.0):
            raise DegenerateValue("division by a jet with zero value")
        v = self.val
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        o = self._coerce(other)
        if isinstance(o, Jet2):
            return self * o.reciprocal()
        if np.any(o == 0.0):
            raise DegenerateValue("division by zero constant")
        return self * (1.0 / o)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def sqrt(self) -> "Jet2":
        if np.any(self.val <= 0.0):
            raise DegenerateValue("square root of a nonpositive jet value")
        r = np.sqrt(self.val)
        return self._chain(r, 0.5 / r, -0.25 / (r * self.val))

    def _chain(self, f0, f1, f2) -> "Jet2":
        """Apply an elementwise function given its value and first two derivatives."""
        g = self.grad
        outer = g[..., :, None] * g[..., None, :]
        hess = _sym(_expand(f1, 2) * self.hess + _expand(f2, 2) * outer)
        return Jet2(f0, _expand(f1, 1) * g, hess)

    def __repr__(self):
        return f"Jet2(val={self.val!r}, grad={self.grad!r}, hess={self.hess!r})"


def _bcast(arr, shape, extra):
    return np.broadcast_to(arr, shape + arr.shape[arr.ndim - extra:]).copy()


def _broadcast_pair(a: Jet2, b: Jet2, op):
    shape = np.broadcast_shapes(a.val.shape, b.val.shape)
    g = op(_bcast(a.grad, shape, 1), _bcast(b.grad, shape, 1))
    h = op(_bcast(a.hess, shape, 2), _bcast(b.hess, shape, 2))
    return g, h


def jet_arith(a: Jet2, b: Jet2, op: str) -> Jet2:
    """Combine two jets with ``op`` in {"add", "sub", "mul", "div"}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown jet operation {op!r}")


def jet_sqrt(a: Jet2) -> Jet2:
    return a.sqrt()


def _free_letters(used: str, k: int) -> str:
    pool = [c for c in string.ascii_letters if c not in used]
    return "".join(pool[:k])


def jet_einsum(subscripts: str, a, b=None) -> Jet2:
    """``np.einsum`` lifted to jets (one or two operands).

    Plain arrays are treated as constants.  The Hessian of a product is
    symmetrized explicitly so it is symmetric bit-for-bit.
    """
    ins, out = subscripts.replace(" ", "").split("->")
    if b is None:
        if not isinstance(a, Jet2):
            raise TypeError("single-operand jet_einsum needs a Jet2")
        p, q = _free_letters(subscripts, 2)
        return Jet2(np.einsum(subscripts, a.val),
                    np.einsum(f"{ins}{p}->{out}{p}", a.grad),
                    np.einsum(f"{ins}{p}{q}->{out}{p}{q}", a.hess))
    A, B = ins.split(",")
    p, q = _free_letters(subscripts, 2)
    if not isinstance(a, Jet2) and not isinstance(b, Jet2):
        raise TypeError("at least one operand must be a Jet2")
    if not isinstance(a, Jet2):
        a = np.asarray(a, dtype=float)
        return Jet2(np.einsum(subscripts, a, b.val),
                    np.einsum(f"{A},{B}{p}->{out}{p}", a, b.grad),
                    np.einsum(f"{A},{B}{p}{q}->{out}{p}{q}", a, b.hess))
    if not isinstance(b, Jet2):
        b = np.asarray(b, dtype=float)
        return Jet2(np.einsum(subscripts, a.val, b),
                    np.einsum(f"{A}{p},{B}->{out}{p}", a.grad, b),
                    np.einsum(f"{A}{p}{q},{B}->{out}{p}{q}", a.hess, b))
    val = np.einsum(subscripts, a.val, b.val)
    grad = (np.einsum(f"{A}{p},{B}->{out}{p}", a.grad, b.val)
            + np.einsum(f"{A},{B}{p}->{out}{p}", a.val, b.grad))
    cross = np.einsum(f"{A}{p},{B}{q}->{out}{p}{q}", a.grad, b.grad)
    hess = (np.einsum(f"{A}{p}{q},{B}->{out}{p}{q}", a.hess, b.val)
            + np.einsum(f"{A},{B}{p}{q}->{out}{p}{q}", a.val, b.hess)
            + cross + np.swapaxes(cross, -1, -2))
    return Jet2(val, grad, _sym(hess))


# --------------------------------------------------------------------------
# Scalar fields, sampling and the finite-difference oracle
# --------------------------------------------------------------------------

class ScalarField:
    """A function on a chart, written as a map from the coordinate jet to a jet.

    Writing fields as functions of a coordinate jet (rather than of raw
    numbers) lets callers compose them with other charts, e.g. a product
    chart, without re-deriving anything.
    """

    def __init__(self, chart: Chart, fn: Callable[[Jet2], Jet2], name: str = ""):
        self.chart = chart
        self.fn = fn
        self.name = name

    def jet(self, p: Point) -> Jet2:
        return self.fn(Jet2.variables(p.coords))

    __call__ = jet

    def value(self, coords) -> np.ndarray:
        return self.fn(Jet2.variables(coords)).val

    @classmethod
    def constant(cls, chart: Chart, c: float) -> "ScalarField":
        return cls(chart, lambda x: Jet2.constant(c, x.dim), f"const({c})")

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "ScalarField":
        return cls(chart, lambda x: x[i], chart.coord_names[i])


def sample_points(chart: Chart, count: int, seed: int,
                  margin: float = SAMPLING_MARGIN) -> list[Point]:
    """Deterministic rejection sampling inside ``chart``.

    Candidates are uniform in the bounding box; a candidate is kept when every
    domain constraint exceeds ``margin``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = SplitMix64(seed)
    lo, hi = chart.box_lo, chart.box_hi
    out: list[Point] = []
    budget = 10_000 * count
    draws = 0
    while len(out) < count:
        if draws >= budget:
            raise SamplingExhausted(
                f"only {len(out)} of {count} points found after {draws} draws in {chart.name}")
        draws += 1
        x = lo + (hi - lo) * np.array([rng.random() for _ in range(chart.dim)])
        if chart.contains(x, margin):
            out.append(Point(chart, x))
    return out


def _central(value, x0: np.ndarray, h: float, f0: np.ndarray):
    d = x0.size
    eye = np.eye(d)
    plus = [value(x0 + h * eye[i]) for i in range(d)]
    minus = [value(x0 - h * eye[i]) for i in range(d)]
    grad = np.stack([(plus[i] - minus[i]) / (2 * h) for i in range(d)], axis=-1)
    hess = np.zeros(f0.shape + (d, d))
    for i in range(d):
        hess[..., i, i] = (plus[i] - 2 * f0 + minus[i]) / h**2
        for j in range(i + 1, d):
            ei, ej = h * eye[i], h * eye[j]
            hij = (value(x0 + ei + ej) - value(x0 + ei - ej)
                   - value(x0 - ei + ej) + value(x0 - ei - ej)) / (4 * h * h)
            hess[..., i, j] = hij
            hess[..., j, i] = hij
    return grad, hess


def fd_oracle(f, p: Point, h: float = DEFAULT_FD_STEP, refine: bool = True) -> Jet2:
    """Central-difference jet of ``f`` at ``p`` computed from values only.

    ``f`` is any field with a ``chart`` and a ``value(coords)`` method; the
    result has the same leading shape as the field's values.  With
    ``refine`` the stencils at ``h`` and ``h/2`` are Richardson-combined,
    which removes the O(h²) truncation term.
    """
    chart = f.chart
    x0 = p.coords

    def value(x):
        if not chart.contains(x):
            raise StencilOutOfDomain(f"stencil point {x.tolist()} leaves {chart.name}")
        return np.asarray(f.value(x), dtype=float)

    f0 = value(x0)
    grad, hess = _central(value, x0, h, f0)
    if refine:
        g2, h2 = _central(value, x0, h / 2, f0)
        grad = (4 * g2 - grad) / 3
        hess = (4 * h2 - hess) / 3
    return Jet2(f0, grad, hess)


def jet_fd_mismatch(jet: Jet2, fd: Jet2) -> tuple[float, float]:
    """Relative gradient and Hessian mismatch, scaled by ``1 + |jet|_inf``."""
    g = float(np.max(np.abs(jet.grad - fd.grad), initial=0.0))
    gs = 1.0 + float(np.max(np.abs(jet.grad), initial=0.0))
    hm = float(np.max(np.abs(jet.hess - fd.hess), initial=0.0))
    hs = 1.0 + float(np.max(np.abs(jet.hess), initial=0.0))
    return g / gs, hm / hs
