"""Concrete models: flat paraquaternionic space, pseudo-spheres and M x R.

The flat ambient space is R^{4(m+1)} with metric ``diag(1, 1, -1, -1)`` on
each 4-block and constant structures

* ``J3 = diag(j, -j)`` with ``j`` the rotation by +90 degrees,
* ``J1`` swapping the two 2-dimensional halves of the block,
* ``J2 = J1 J3``.

Level sets ``{G(x, x) = s}`` are described by graph charts: one ambient
coordinate ``x_i0`` (with ``G_i0i0 = s``) is solved for, the others are the
chart coordinates.  On such a chart the chart components of a tangent vector
are its ambient components at the free indices.

The unit normal is ``N = s x``.  With the opposite orientation on the
``s = -1`` level set the induced forms satisfy ``dη^a = -Φ_a`` instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadSeedPoint, ConfigError
from .jet_chart import Chart, Jet2, Point, SplitMix64, jet_einsum
from .structures import TAU, MixedThreeStructure
from .tensors import (
    EndoField,
    MetricField,
    OneForm,
    VectorField,
    d_twoform,
    fundamental_2form_field,
    wedge_1_2,
)

CHART_HALF_WIDTH = 0.3
SEED_NORM_FLOOR = 0.04
SOLVE_COORD_FLOOR = 0.1

_J2x2 = np.array([[0.0, -1.0], [1.0, 0.0]])


# --------------------------------------------------------------------------
# Flat ambient space
# --------------------------------------------------------------------------

@dataclass
class AmbientModel:
    m: int
    G: np.ndarray
    J: tuple[np.ndarray, np.ndarray, np.ndarray]
    chart: Chart
    metric: MetricField
    J_fields: tuple[EndoField, EndoField, EndoField]
    key: str = ""

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    def fields(self) -> dict[str, object]:
        out = {"G": self.metric}
        for a in range(3):
            out[f"J{a + 1}"] = self.J_fields[a]
        return out


def _block_diag(blocks: list[np.ndarray]) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    k = 0
    for b in blocks:
        s = b.shape[0]
        out[k:k + s, k:k + s] = b
        k += s
    return out


def flat_paraquaternionic(m: int) -> AmbientModel:
    if m < 0:
        raise ValueError("m must be nonnegative")
    G4 = np.diag([1.0, 1.0, -1.0, -1.0])
    J3 = _block_diag([_J2x2, -_J2x2])
    J1 = np.zeros((4, 4))
    J1[0:2, 2:4] = np.eye(2)
    J1[2:4, 0:2] = np.eye(2)
    J2 = J1 @ J3
    k = m + 1
    G = _block_diag([G4] * k)
    J = tuple(_block_diag([B] * k) for B in (J1, J2, J3))
    d = 4 * k
    chart = Chart.box(-np.ones(d), np.ones(d), name=f"R^{{{2 * k},{2 * k}}}")
    metric = MetricField.constant(chart, G, "G")
    J_fields = tuple(EndoField.constant(chart, Ja, f"J{a + 1}") for a, Ja in enumerate(J))
    return AmbientModel(m, G, J, chart, metric, J_fields, f"flat-pq:{m}")


# --------------------------------------------------------------------------
# Hypersurfaces
# --------------------------------------------------------------------------

def _assemble_rows(rows: list[Jet2]) -> Jet2:
    return Jet2.stack(rows, axis=0)


@dataclass
class HypersurfaceModel:
    """A nondegenerate hypersurface of the flat ambient with its induced structure.

    ``frame_fn`` maps the chart coordinate jet to the jets of the position
    ``x``, the unit normal ``N`` and the tangent matrix ``T`` (ambient
    components of the coordinate vectors, shape ``(D, d)``).
    """

    m: int
    s: int
    ambient: AmbientModel
    chart: Chart
    free: np.ndarray
    frame_fn: object
    x0: np.ndarray
    i0: int | None = None
    key: str = ""
    structure: MixedThreeStructure = field(init=False)

    def __post_init__(self):
        amb = self.ambient
        G, J, s, free = amb.G, amb.J, float(self.s), self.free
        frame_fn = self.frame_fn
        GJs = [s * (G @ Ja) for Ja in J]

        def metric(x):
            _, _, T = frame_fn(x)
            return jet_einsum("ia,ib->ab", T, jet_einsum("ij,jb->ib", G, T))

        def reeb(a):
            def fn(x):
                _, N, _ = frame_fn(x)
                return jet_einsum("ij,j->i", -TAU[a] * J[a][free], N)
            return fn

        def eta_jet(a, N, T):
            return jet_einsum("i,ia->a", N, jet_einsum("ij,ja->ia", GJs[a], T))

        def contact(a):
            def fn(x):
                _, N, T = frame_fn(x)
                return eta_jet(a, N, T)
            return fn

        def endo(a):
            def fn(x):
                _, N, T = frame_fn(x)
                eta = eta_jet(a, N, T)
                JT = jet_einsum("ij,ja->ia", J[a][free], T)
                return JT - jet_einsum("i,a->ia", N[free], eta)
            return fn

        self.g = MetricField(self.chart, metric, "g")
        self.xi = tuple(VectorField(self.chart, reeb(a), f"xi{a + 1}") for a in range(3))
        self.eta = tuple(OneForm(self.chart, contact(a), f"eta{a + 1}") for a in range(3))
        self.phi = tuple(EndoField(self.chart, endo(a), f"phi{a + 1}") for a in range(3))
        self.structure = MixedThreeStructure.from_fields(
            self.phi, self.xi, self.eta, self.g, Point(self.chart, self.x0[self.free]))

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def sigma(self) -> int:
        return -self.s

    def center(self) -> Point:
        return Point(self.chart, self.x0[self.free])

    def embedding(self, p: Point) -> np.ndarray:
        return self.frame_fn(Jet2.variables(p.coords))[0].val

    def first_fundamental_form(self, p: Point) -> np.ndarray:
        """``G(∂_α x, ∂_β x)`` using the gradient of the position jet."""
        dx = self.frame_fn(Jet2.variables(p.coords))[0].grad
        return dx.T @ self.ambient.G @ dx

    def fields(self) -> dict[str, object]:
        out = {"g": self.g}
        for a in range(3):
            out[f"phi{a + 1}"] = self.phi[a]
            out[f"xi{a + 1}"] = self.xi[a]
            out[f"eta{a + 1}"] = self.eta[a]
        return out


def graph_chart(ambient: AmbientModel, x0, s: int):
    """Graph chart of ``{G(x, x) = s}`` about ``x0``; returns ``(chart, free, i0, frame_fn)``."""
    G = ambient.G
    Gd = np.diag(G)
    x0 = np.asarray(x0, dtype=float)
    D = len(x0)
    cand = [i for i in range(D) if Gd[i] == s]
    i0 = max(cand, key=lambda i: abs(x0[i]))
    if abs(x0[i0]) < SOLVE_COORD_FLOOR:
        raise BadSeedPoint(f"|x_{i0}| = {abs(x0[i0]):.3g} < {SOLVE_COORD_FLOOR}")
    free = np.array([i for i in range(D) if i != i0])
    Gf = Gd[free]
    g0 = Gd[i0]
    sign = 1.0 if x0[i0] > 0 else -1.0
    c = x0[free]
    d = D - 1

    def radicand(u):
        return (s - float(np.sum(Gf * u * u))) / g0

    cons = tuple((lambda u, k=k: CHART_HALF_WIDTH**2 - (u[k] - c[k]) ** 2) for k in range(d))
    cons = cons + (radicand,)
    names = tuple(f"x{i}" for i in free)
    chart = Chart(d, names, cons, c - CHART_HALF_WIDTH, c + CHART_HALF_WIDTH,
                  name=f"graph(x{i0}; G(x,x)={s:+d})")

    def frame_fn(u: Jet2):
        rad = (jet_einsum("i,i->", -Gf / g0, u * u)) + s / g0
        xs = rad.sqrt() * sign
        # d_alpha x_i0 = -G_aa u_a / (G_i0i0 x_i0)
        dxs = (u * (-Gf / g0)) / xs
        n = u.dim
        rows_x, rows_T = [], []
        k = 0
        for i in range(D):
            if i == i0:
                rows_x.append(xs)
                rows_T.append(dxs)
            else:
                rows_x.append(u[k])
                e = np.zeros(d)
                e[k] = 1.0
                rows_T.append(Jet2.constant(e, n))
                k += 1
        x = _assemble_rows(rows_x)
        return x, x * float(s), _assemble_rows(rows_T)  # N = s x

    return chart, free, i0, frame_fn


def pseudo_sphere(m: int, s: int, seed: int, max_draws: int = 100) -> HypersurfaceModel:
    """The level set ``{G(x, x) = s}`` in flat R^{4m+4} with its mixed 3-structure."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if s not in (1, -1):
        raise ValueError("s must be +1 or -1")
    amb = flat_paraquaternionic(m)
    rng = SplitMix64(seed)
    D = amb.dim
    last = None
    for _ in range(max_draws):
        y = rng.uniform(-1.0, 1.0, D)
        n = s * float(y @ amb.G @ y)
        if n <= SEED_NORM_FLOOR:
            continue
        x0 = y / np.sqrt(n)
        try:
            chart, free, i0, frame_fn = graph_chart(amb, x0, s)
        except BadSeedPoint as exc:
            last = exc
            continue
        return HypersurfaceModel(m, s, amb, chart, free, frame_fn, x0, i0,
                                 key=f"pseudo-sphere:{m}:{s:+d}")
    raise BadSeedPoint(f"no usable seed point in {max_draws} draws" + (f" ({last})" if last else ""))


def flat_mixed(m: int) -> HypersurfaceModel:
    """The hyperplane ``{x_0 = 1}`` with normal ``e_0``: a constant mixed 3-structure.

    All tensors are constant, so the algebraic axioms hold exactly while
    ``dη^a = 0 ≠ Φ_a``.  Used as a negative control.
    """
    amb = flat_paraquaternionic(m)
    D = amb.dim
    free = np.arange(1, D)
    d = D - 1
    chart = Chart.box(-np.ones(d), np.ones(d), tuple(f"x{i}" for i in free),
                      name=f"hyperplane(x0=1) in R^{D}")
    e0 = np.zeros(D)
    e0[0] = 1.0
    T = np.zeros((D, d))
    T[1:, :] = np.eye(d)

    def frame_fn(u: Jet2):
        n = u.dim
        x = Jet2.stack([Jet2.constant(1.0, n)] + [u[k] for k in range(d)])
        return x, Jet2.constant(e0, n), Jet2.constant(T, n)

    return HypersurfaceModel(m, 1, amb, chart, free, frame_fn, e0, 0, key=f"flat-mixed:{m}")


# --------------------------------------------------------------------------
# The product M x R
# --------------------------------------------------------------------------

def _place(shape, n, parts) -> Jet2:
    """Assemble a jet from ``(index, jet_or_constant)`` pieces; the rest is zero."""
    val = np.zeros(shape)
    grad = np.zeros(shape + (n,))
    hess = np.zeros(shape + (n, n))
    for idx, piece in parts:
        if isinstance(piece, Jet2):
            val[idx], grad[idx], hess[idx] = piece.val, piece.grad, piece.hess
        else:
            val[idx] = piece
    return Jet2(val, grad, hess)


@dataclass
class ProductModel:
    """``M x R`` with ``J_a(X, f d/dt) = (φ_a X − τ_a f ξ_a, η^a(X) d/dt)`` and
    ``G((X, f), (Y, h)) = g(X, Y) − σ f h``."""

    base: HypersurfaceModel
    key: str = ""

    def __post_init__(self):
        base = self.base
        S = base.structure
        d = base.dim
        n = d + 1
        bc = base.chart
        cons = tuple((lambda x, c=c: c(x[:d])) for c in bc.constraints)
        self.chart = Chart(n, bc.coord_names + ("t",), cons,
                           np.append(bc.box_lo, -1.0), np.append(bc.box_hi, 1.0),
                           name=f"{bc.name} x R")
        self.sigma = S.sigma
        sig = float(S.sigma)
        gfn = S.g.fn
        top = (slice(0, d), slice(0, d))

        def metric(x):
            return _place((n, n), x.dim, [(top, gfn(x[:d])), ((d, d), -sig)])

        def J(a):
            pf, xf, ef = S.phi[a].fn, S.xi[a].fn, S.eta[a].fn

            def fn(x):
                u = x[:d]
                return _place((n, n), x.dim, [(top, pf(u)),
                                              ((slice(0, d), d), xf(u) * (-TAU[a])),
                                              ((d, slice(0, d)), ef(u))])
            return fn

        self.G = MetricField(self.chart, metric, "G")
        self.J = tuple(EndoField(self.chart, J(a), f"J{a + 1}") for a in range(3))
        self.Omega = tuple(fundamental_2form_field(self.G, self.J[a], f"Omega{a + 1}")
                           for a in range(3))
        e = np.zeros(n)
        e[d] = 1.0
        self.dt = OneForm.constant(self.chart, e, "dt")

    @property
    def dim(self) -> int:
        return self.chart.dim

    def lift(self, p: Point, t: float = 0.0) -> Point:
        return Point(self.chart, np.append(p.coords, t))

    def fields(self) -> dict[str, object]:
        out = {"G": self.G}
        for a in range(3):
            out[f"J{a + 1}"] = self.J[a]
            out[f"Omega{a + 1}"] = self.Omega[a]
        return out


def product_with_line(base: HypersurfaceModel, check: bool = True) -> ProductModel:
    if check:
        from .structures import validate_mixed_3_contact
        rep = validate_mixed_3_contact(base.structure, [base.center()])
        if not rep.overall:
            raise ValueError(f"base structure is not mixed 3-contact: {rep.failed()}")
    return ProductModel(base, key=f"product:{base.key}")


def omega_wedge_check(P: ProductModel, a: int, p: Point) -> float:
    """``|dΩ_a − 2σ dt∧Ω_a|_inf`` at ``p`` (``a`` is 1-based)."""
    omega = P.Omega[a - 1]
    lhs = d_twoform(omega, p)
    rhs = wedge_1_2(P.dt.at(p), omega.form_at(p)) * (2.0 * P.sigma)
    return (lhs - rhs).max_abs()


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

MODEL_DESCRIPTIONS = {
    "flat-mixed:1": "hyperplane of flat R^{4,4} with a constant mixed 3-structure (negative control)",
    "flat-pq:1": "flat R^{4,4} with its constant almost hyper paraHermitian structure",
    "product:pseudo-sphere:1:+1": "pseudo-sphere:1:+1 x R with the structures J_a and metric G",
    "product:pseudo-sphere:1:-1": "pseudo-sphere:1:-1 x R with the structures J_a and metric G",
    "pseudo-sphere:1:+1": "level set G(x,x)=+1 in R^{4,4}: negative mixed 3-Sasakian, dim 7",
    "pseudo-sphere:1:-1": "level set G(x,x)=-1 in R^{4,4}: positive mixed 3-Sasakian, dim 7",
}


def _parse_sign(text: str) -> int:
    if text in ("+1", "1", "+"):
        return 1
    if text in ("-1", "-"):
        return -1
    raise ConfigError(f"bad sign {text!r}")


def _parse_m(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise ConfigError(f"bad m {text!r}") from None
    return m


def build_model(key: str, seed: int = 42):
    """Instantiate a model from its registry key."""
    parts = key.split(":")
    try:
        if parts[0] == "flat-pq" and len(parts) == 2:
            m = _parse_m(parts[1])
            if m < 0:
                raise ConfigError("m must be >= 0")
            return flat_paraquaternionic(m)
        if parts[0] == "flat-mixed" and len(parts) == 2:
            m = _parse_m(parts[1])
            if m < 0:
                raise ConfigError("m must be >= 0")
            return flat_mixed(m)
        if parts[0] == "pseudo-sphere" and len(parts) == 3:
            m = _parse_m(parts[1])
            if m < 1:
                raise ConfigError("m must be >= 1")
            return pseudo_sphere(m, _parse_sign(parts[2]), seed)
        if parts[0] == "product" and len(parts) == 4 and parts[1] == "pseudo-sphere":
            m = _parse_m(parts[2])
            if m < 1:
                raise ConfigError("m must be >= 1")
            return product_with_line(pseudo_sphere(m, _parse_sign(parts[3]), seed))
    except IndexError:
        pass
    raise ConfigError(f"unknown model key {key!r}")


def list_models() -> str:
    return "\n".join(f"{k:28s} {MODEL_DESCRIPTIONS[k]}" for k in sorted(MODEL_DESCRIPTIONS))


PERTURBABLE = ("phi", "xi", "eta", "g")


def perturb_structure(S: MixedThreeStructure, which: str, amplitude: float = 1e-3,
                      seed: int = 0) -> MixedThreeStructure:
    """Add a fixed constant random tensor of size ``amplitude`` to one structure tensor.

    ``which`` is one of ``phi``, ``xi``, ``eta`` (all three indices are
    perturbed) or ``g`` (symmetric perturbation).  The signs σ, ε are kept.
    """
    if which not in PERTURBABLE:
        raise ConfigError(f"cannot perturb {which!r}; choose from {PERTURBABLE}")
    rng = SplitMix64(seed).spawn(PERTURBABLE.index(which) + 1)
    d = S.dim

    def bump(field, shape, cls, name):
        delta = amplitude * rng.uniform(-1.0, 1.0, int(np.prod(shape))).reshape(shape)
        if cls is MetricField:
            delta = 0.5 * (delta + delta.T)
        return cls(field.chart, lambda x, f=field.fn: f(x) + delta, name)

    if which == "g":
        return S.replace(g=bump(S.g, (d, d), MetricField, "g~"))
    kinds = {"phi": ((d, d), EndoField), "xi": ((d,), VectorField), "eta": ((d,), OneForm)}
    shape, cls = kinds[which]
    fields = tuple(bump(f, shape, cls, f.name + "~") for f in getattr(S, which))
    return S.replace(**{which: fields})
