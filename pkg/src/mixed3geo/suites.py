"""Named verification suites run over registered models.

Every suite returns a :class:`RunReport` holding one entry per assertion
(maximum residual over all sampled points and random arguments, the point
where it occurred, and the tolerance).  Runs are deterministic: points come
from :func:`sample_points` and random tangent vectors from per-point
:class:`SplitMix64` streams, both seeded from ``SuiteSpec.seed``.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .curvature import (
    CurvaturePack,
    lemma31_residual,
    metric_compatibility,
    p_tensor_values,
    q_frame_sum,
    q_tensor,
    ricci_coordinate,
    riemann,
)
from .errors import ConfigError, DegeneratePlane, NullPivot, StencilOutOfDomain
from .jet_chart import DEFAULT_FD_STEP, Point, SplitMix64, fd_oracle, jet_fd_mismatch, sample_points
from .models import (
    AmbientModel,
    HypersurfaceModel,
    ProductModel,
    build_model,
    flat_mixed,
    omega_wedge_check,
    perturb_structure,
)
from .structures import (
    TAU,
    StructureReport,
    classify_contact_class,
    hv_split,
    validate_hyper_parahermitian,
    validate_mixed_3_contact,
    validate_mixed_3_sasakian,
    validate_mixed_3_structure,
)
from .tensors import VectorField, d_oneform, nijenhuis

DEFAULT_TOLERANCES = {
    "algebraic": 1e-8,
    "hyper-parahermitian": 1e-9,
    "flat-curvature": 1e-12,
    "first-order": 1e-7,
    "einstein": 1e-7,
    "scalar": 1e-6,
    "sectional": 1e-7,
    "lemma31": 1e-7,
    "p-symmetry": 1e-9,
    "ricci-xi": 1e-7,
    "q-tensor": 1e-6,
    "domega": 1e-7,
    "nijenhuis": 1e-6,
    "fd": 1e-4,
    "ricci-paths": 1e-8,
    "metric-compatibility": 1e-9,
    "skip-fraction": 0.1,
}

SUITES = {
    "axioms": "structure axioms of the model (mixed 3-structure or almost hyper paraHermitian)",
    "contact-class": "d eta_a = Phi_a, xi_a Killing and the [r]-Sasakian condition for each a",
    "domega": "d Omega_a = 2 sigma dt ^ Omega_a on the product M x R",
    "einstein": "Ricci tensor equals -sigma (4n+2) g",
    "fd-crosscheck": "jet derivatives against finite differences; frame against coordinate Ricci",
    "kashiwada": "mixed 3-contact implies mixed 3-Sasakian on the sampled points",
    "lemma31": "g(R(X,Y)Z, phi W) + g(R(X,Y)phi Z, W) = -r eps P(X,Y,Z,W) for each a",
    "nijenhuis": "Nijenhuis tensors of J_1, J_2, J_3 vanish",
    "p-symmetry": "symmetries of the P tensor and its value on (xi_a, Y, xi_a, phi_a Y)",
    "q-tensor": "Q(X,Y) = -2 sigma g(X, phi_3 Y) and its frame-sum form",
    "ricci-xi": "rho(X, xi_a) = (dim - 1) r_a eta^a(X)",
    "scalar": "scalar curvature equals -sigma (4n+2)(4n+3)",
    "sectional": "sectional curvature equals -sigma on random nondegenerate planes",
}

# models run when --model all is requested
DEFAULT_MODELS = (
    "product:pseudo-sphere:1:+1",
    "product:pseudo-sphere:1:-1",
    "pseudo-sphere:1:+1",
    "pseudo-sphere:1:-1",
)

MAX_REDRAWS = 100
FD_POINTS = 4  # finite-difference stencils are costly; check this many points


@dataclass
class SuiteSpec:
    suite_id: str
    model_key: str
    points: int = 32
    vectors_per_point: int = 8
    seed: int = 42
    tol_overrides: dict = field(default_factory=dict)
    perturb: str | None = None
    fd_step: float = DEFAULT_FD_STEP

    def tolerances(self) -> dict[str, float]:
        unknown = set(self.tol_overrides) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}; "
                              f"known: {sorted(DEFAULT_TOLERANCES)}")
        tols = dict(DEFAULT_TOLERANCES)
        tols.update({k: float(v) for k, v in self.tol_overrides.items()})
        return tols


@dataclass
class RunReport:
    suite: str
    model: str
    seed: int
    points: int
    vectors: int
    assertions: list[dict]
    tolerances: dict[str, float]
    skipped: int = 0
    discrepancies: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    perturb: str | None = None
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a["pass"] for a in self.assertions)

    def to_dict(self) -> dict:
        return _jsonable({
            "suite": self.suite,
            "model": self.model,
            "seed": self.seed,
            "points": self.points,
            "vectors": self.vectors,
            "assertions": self.assertions,
            "tolerances": self.tolerances,
            "skipped": self.skipped,
            "discrepancies": self.discrepancies,
            "info": self.info,
            "perturb": self.perturb,
            "pass": self.passed,
            "wall_ms": self.wall_ms,
        })


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


# --------------------------------------------------------------------------
# Helpers shared by the suites
# --------------------------------------------------------------------------

class _Context:
    """Model, sample points and per-point random vector streams for one run."""

    def __init__(self, spec: SuiteSpec, model, tols: dict[str, float]):
        self.spec = spec
        self.model = model
        self.tols = tols
        self.points = sample_points(model.chart, spec.points, spec.seed)
        self._root = SplitMix64(spec.seed).spawn(0x5EC7)
        self.report = StructureReport(tols["algebraic"])
        self.discrepancies: list[dict] = []
        self.info: dict = {}
        self.skipped = 0
        self.cases = 0
        self._packs: dict[int, CurvaturePack] = {}

    @property
    def structure(self):
        return self.model.structure

    @property
    def dim(self) -> int:
        return self.model.chart.dim

    def rng(self, k: int) -> SplitMix64:
        return self._root.spawn(k + 1)

    def vectors(self, rng: SplitMix64, count: int) -> list[np.ndarray]:
        return [rng.uniform(-1.0, 1.0, self.dim) for _ in range(count)]

    def pack(self, k: int) -> CurvaturePack:
        if k not in self._packs:
            self._packs[k] = riemann(self.structure.g, self.points[k])
        return self._packs[k]

    def record(self, aid: str, residual: float, p: Point | None, tol_key: str):
        self.report.record(aid, residual, p, self.tols[tol_key])

    def merge(self, rep: StructureReport, prefix: str = ""):
        for k, r in rep.axioms.items():
            self.report.axioms[prefix + k] = r

    def draw(self, rng: SplitMix64, make, count: int = 1):
        """Call ``make(vectors)`` with fresh random vectors until it succeeds.

        ``make`` raises one of the degeneracy errors to ask for a redraw.
        Returns ``None`` (and counts a skip) after ``MAX_REDRAWS`` failures.
        """
        self.cases += 1
        for _ in range(MAX_REDRAWS):
            try:
                return make(self.vectors(rng, count))
            except (DegeneratePlane, NullPivot, _Redraw):
                continue
        self.skipped += 1
        return None

    def record_skips(self):
        frac = self.skipped / self.cases if self.cases else 0.0
        self.report.record("skip-fraction", frac, None, self.tols["skip-fraction"])


class _Redraw(Exception):
    """Raised inside a draw callback when the random arguments are unusable."""


def _n_quaternionic(dim: int) -> int:
    return (dim - 3) // 4


def _require(ctx: _Context, *kinds, sasakian: bool = False):
    model = ctx.model
    if sasakian and not (isinstance(model, HypersurfaceModel)
                         and model.key.startswith("pseudo-sphere")):
        raise ConfigError(f"suite {ctx.spec.suite_id!r} requires a mixed 3-Sasakian model; "
                          f"got {model.key!r}")
    if not isinstance(model, kinds):
        names = ", ".join(k.__name__ for k in kinds)
        raise ConfigError(f"suite {ctx.spec.suite_id!r} requires a model of type {names}; "
                          f"got {model.key!r}")


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------

def _suite_axioms(ctx: _Context):
    m = ctx.model
    if isinstance(m, AmbientModel):
        ctx.merge(validate_hyper_parahermitian(m.J_fields, m.metric, ctx.points,
                                               ctx.tols["hyper-parahermitian"]))
        for p in ctx.points:
            ctx.record("flat-curvature", float(np.max(np.abs(riemann(m.metric, p).riemann13))),
                       p, "flat-curvature")
    elif isinstance(m, ProductModel):
        ctx.merge(validate_hyper_parahermitian(m.J, m.G, ctx.points, ctx.tols["hyper-parahermitian"]))
    else:
        rep = validate_mixed_3_structure(ctx.structure, ctx.points, ctx.tols["algebraic"])
        ctx.merge(rep)
        ctx.info.update(rep.info)
        sigma_ok = rep.info.get("sigma") == -m.s
        ctx.report.record("sigma=-s", 0.0 if sigma_ok else 1.0, None, 0.5)


def _suite_contact_class(ctx: _Context):
    m = ctx.model
    if isinstance(m, AmbientModel):
        # the ambient itself is even-dimensional; test its constant hyperplane structure
        S = flat_mixed(m.m).structure
        points = sample_points(S.chart, ctx.spec.points, ctx.spec.seed)
        ctx.info["structure"] = f"flat-mixed:{m.m}"
    else:
        _require(ctx, HypersurfaceModel)
        S, points = ctx.structure, ctx.points
    flags = {}
    for a in range(3):
        rep = classify_contact_class(S.phi[a], S.xi[a], S.eta[a], S.g, points, TAU[a],
                                     ctx.tols["first-order"])
        ctx.merge(rep, f"a={a + 1}:")
        flags[f"a={a + 1}"] = {k: rep.info[k] for k in ("paracontact_metric", "para_K_contact",
                                                         "r_sasakian")}
    ctx.info["flags"] = flags


def _suite_einstein(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    S = ctx.structure
    n = _n_quaternionic(ctx.dim)
    c = -S.sigma * (4 * n + 2)
    ctx.info["einstein_constant"] = c
    for k, p in enumerate(ctx.points):
        pack = ctx.pack(k)
        ctx.record("rho=c*g", float(np.max(np.abs(pack.ricci - c * pack.metric))), p, "einstein")
        ctx.record("rho-symmetric", float(np.max(np.abs(pack.ricci - pack.ricci.T))), p, "einstein")


def _suite_scalar(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    n = _n_quaternionic(ctx.dim)
    target = -ctx.structure.sigma * (4 * n + 2) * (4 * n + 3)
    ctx.info["expected_scalar"] = target
    for k, p in enumerate(ctx.points):
        ctx.record("Sc=-sigma(4n+2)(4n+3)", abs(ctx.pack(k).scalar - target), p, "scalar")


def _suite_sectional(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    k_target = -ctx.structure.sigma
    planes = 2 * ctx.spec.vectors_per_point
    ctx.info["expected_sectional"] = k_target
    ctx.info["planes_per_point"] = planes
    for k, p in enumerate(ctx.points):
        pack = ctx.pack(k)
        rng = ctx.rng(k)

        def plane(v):
            return pack.sectional(v[0], v[1])

        for _ in range(planes):
            val = ctx.draw(rng, plane, 2)
            if val is not None:
                ctx.record("k=-sigma", abs(val - k_target), p, "sectional")
        # the full constant-curvature form on one random triple
        X, Y, Z = ctx.vectors(rng, 3)
        ideal = k_target * (pack.inner(Y, Z) * X - pack.inner(X, Z) * Y)
        ctx.record("R(X,Y)Z=k(g(Y,Z)X-g(X,Z)Y)", float(np.max(np.abs(pack.R(X, Y, Z) - ideal))),
                   p, "sectional")
    ctx.record_skips()


def _suite_lemma31(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    S = ctx.structure
    for k, p in enumerate(ctx.points):
        pack = ctx.pack(k)
        rng = ctx.rng(k)
        for _ in range(ctx.spec.vectors_per_point):
            X, Y, Z, W = ctx.vectors(rng, 4)
            for a in (1, 2, 3):
                ctx.record(f"a={a}", lemma31_residual(S, a, p, X, Y, Z, W, pack), p, "lemma31")
        X, Y = ctx.vectors(rng, 2)
        for a in (1, 2, 3):
            xi = S.xi[a - 1].at(p)
            ctx.record(f"a={a}:Z=W=xi", lemma31_residual(S, a, p, X, Y, xi, xi, pack), p, "lemma31")


def _suite_p_symmetry(ctx: _Context):
    _require(ctx, HypersurfaceModel)
    S = ctx.structure
    contact = ctx.model.key.startswith("pseudo-sphere")
    unsigned_rev = 0.0
    eps_form = 0.0
    for k, p in enumerate(ctx.points):
        gm = S.g.at(p)
        rng = ctx.rng(k)
        detas = [d_oneform(S.eta[a], p).full() for a in range(3)]
        for _ in range(ctx.spec.vectors_per_point):
            X1, X2, X3, X4 = ctx.vectors(rng, 4)
            for a in range(3):
                def P(*v, _a=a):
                    return p_tensor_values(detas[_a], gm, *v)

                base = P(X1, X2, X3, X4)
                tag = f"a={a + 1}:"
                ctx.record(tag + "(i)", abs(base + P(X2, X1, X3, X4)), p, "p-symmetry")
                ctx.record(tag + "(ii)", abs(base + P(X1, X2, X4, X3)), p, "p-symmetry")
                ctx.record(tag + "(iii)", abs(base + P(X3, X4, X1, X2)), p, "p-symmetry")
                ctx.record(tag + "reversal", abs(base + P(X4, X3, X2, X1)), p, "p-symmetry")
                unsigned_rev = max(unsigned_rev, abs(base - P(X4, X3, X2, X1)))
        if not contact:
            continue
        # P_a(xi_a, Y, xi_a, phi_a Y) for Y orthogonal to the Reeb fields
        for a in range(3):
            xi, phi = S.xi[a].at(p), S.phi[a].at(p)

            def xi_value(v, _a=a, _xi=xi, _phi=phi):
                Y = hv_split(S, p, v[0])[0]
                gyy = float(Y @ gm @ Y)
                if abs(gyy) < 1e-8:
                    raise _Redraw
                return p_tensor_values(detas[_a], gm, _xi, Y, _xi, _phi @ Y), gyy

            got = ctx.draw(rng, xi_value)
            if got is None:
                continue
            val, gyy = got
            ctx.record(f"a={a + 1}:P(xi,Y,xi,phiY)=sigma*g(Y,Y)", abs(val - S.sigma * gyy),
                       p, "p-symmetry")
            eps_form = max(eps_form, abs(val + S.epsilon[a] * gyy))
    ctx.record_skips()
    tol = ctx.tols["p-symmetry"]
    ctx.discrepancies.append({
        "id": "unsigned reversal P(X1,X2,X3,X4)=P(X4,X3,X2,X1)",
        "residual": unsigned_rev, "tol": tol, "holds": unsigned_rev <= tol,
        "note": "(i)-(iii) force P(X4,X3,X2,X1) = -P(X1,X2,X3,X4); the reversal assertion tests that"})
    if contact:
        ctx.discrepancies.append({
            "id": "P_a(xi_a,Y,xi_a,phi_aY)=-eps_a g(Y,Y)",
            "residual": eps_form, "tol": tol, "holds": eps_form <= tol,
            "note": "with d eta_a = Phi_a the value is -tau_a eps_a g(Y,Y) = sigma g(Y,Y); "
                    "the -eps_a form agrees only for a=3"})


def _suite_ricci_xi(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    S = ctx.structure
    two_n = ctx.dim - 1
    for k, p in enumerate(ctx.points):
        pack = ctx.pack(k)
        rng = ctx.rng(k)
        for X in ctx.vectors(rng, ctx.spec.vectors_per_point):
            for a in range(3):
                lhs = pack.ricci_form(X, S.xi[a].at(p))
                rhs = two_n * S.r[a] * float(S.eta[a].at(p) @ X)
                ctx.record(f"a={a + 1}", abs(lhs - rhs), p, "ricci-xi")


def _suite_q_tensor(ctx: _Context):
    _require(ctx, HypersurfaceModel, sasakian=True)
    S = ctx.structure
    for k, p in enumerate(ctx.points):
        pack = ctx.pack(k)
        rng = ctx.rng(k)
        phi3 = S.phi[2].at(p)
        for _ in range(ctx.spec.vectors_per_point):
            X, Y = ctx.vectors(rng, 2)
            q = q_tensor(S, p, X, Y, pack)
            ctx.record("Q=-2sigma*g(X,phi3Y)", abs(q + 2 * S.sigma * pack.inner(X, phi3 @ Y)),
                       p, "q-tensor")
            ctx.record("Q=frame-sum", abs(q - q_frame_sum(S, p, X, Y, pack)), p, "q-tensor")
        X = ctx.vectors(rng, 1)[0]
        ctx.record("Q(X,X)=0", abs(q_tensor(S, p, X, X, pack)), p, "q-tensor")


def _suite_domega(ctx: _Context):
    _require(ctx, ProductModel)
    for p in ctx.points:
        for a in (1, 2, 3):
            ctx.record(f"a={a}", omega_wedge_check(ctx.model, a, p), p, "domega")


def _suite_nijenhuis(ctx: _Context):
    _require(ctx, ProductModel, AmbientModel)
    m = ctx.model
    J = m.J if isinstance(m, ProductModel) else m.J_fields
    d = ctx.dim
    for k, p in enumerate(ctx.points):
        rng = ctx.rng(k)
        for _ in range(ctx.spec.vectors_per_point):
            # affine fields centred at p, so their derivatives (including d/dt) are exercised
            X = VectorField.affine(m.chart, rng.uniform(-1, 1, d),
                                   rng.uniform(-1, 1, d * d).reshape(d, d), p.coords)
            Y = VectorField.affine(m.chart, rng.uniform(-1, 1, d),
                                   rng.uniform(-1, 1, d * d).reshape(d, d), p.coords)
            for a in range(3):
                ctx.record(f"N_J{a + 1}=0", float(np.max(np.abs(nijenhuis(J[a], X, Y, p)))),
                           p, "nijenhuis")


def _suite_kashiwada(ctx: _Context):
    _require(ctx, HypersurfaceModel)
    t = ctx.tols["first-order"]
    contact = validate_mixed_3_contact(ctx.structure, ctx.points, t)
    sas = validate_mixed_3_sasakian(ctx.structure, ctx.points, 10 * t)
    worst = max(sas.axioms.values(), key=lambda r: r.max_residual)
    residual = worst.max_residual if contact.overall else 0.0
    ctx.report.record("contact=>sasakian", residual, None, 10 * t)
    ctx.report.axioms["contact=>sasakian"].worst_point = worst.worst_point
    ctx.info.update(
        contact_pass=contact.overall,
        sasakian_pass=sas.overall,
        contact_max_residual=max(r.max_residual for r in contact.axioms.values()),
        sasakian_max_residual=worst.max_residual,
    )


def _suite_fd_crosscheck(ctx: _Context):
    m = ctx.model
    fields = m.fields()
    if ctx.spec.perturb is not None:
        S = ctx.structure
        fields = {"g": S.g}
        for a in range(3):
            fields.update({f"phi{a + 1}": S.phi[a], f"xi{a + 1}": S.xi[a], f"eta{a + 1}": S.eta[a]})
    metric = {AmbientModel: "G", ProductModel: "G"}.get(type(m), "g")
    pts = ctx.points[:FD_POINTS]
    ctx.info["fd_points"] = len(pts)
    ctx.info["fd_step"] = ctx.spec.fd_step
    for p in pts:
        for name in sorted(fields):
            f = fields[name]
            ctx.cases += 1
            try:
                fd = fd_oracle(f, p, ctx.spec.fd_step)
            except StencilOutOfDomain:
                ctx.skipped += 1
                continue
            ctx.record(f"fd:{name}", max(jet_fd_mismatch(f.jet(p), fd)), p, "fd")
    for p in ctx.points:
        g = fields[metric]
        pack = riemann(g, p)
        ctx.record("ricci:frame=coordinate",
                   float(np.max(np.abs(pack.ricci - ricci_coordinate(pack.riemann13)))), p, "ricci-paths")
        ctx.record("nabla-g=0", metric_compatibility(g, p), p, "metric-compatibility")
    ctx.record_skips()


_RUNNERS = {
    "axioms": _suite_axioms,
    "contact-class": _suite_contact_class,
    "domega": _suite_domega,
    "einstein": _suite_einstein,
    "fd-crosscheck": _suite_fd_crosscheck,
    "kashiwada": _suite_kashiwada,
    "lemma31": _suite_lemma31,
    "nijenhuis": _suite_nijenhuis,
    "p-symmetry": _suite_p_symmetry,
    "q-tensor": _suite_q_tensor,
    "ricci-xi": _suite_ricci_xi,
    "scalar": _suite_scalar,
    "sectional": _suite_sectional,
}


def _prepare_model(spec: SuiteSpec):
    model = build_model(spec.model_key, spec.seed)
    if spec.perturb is not None:
        if not isinstance(model, HypersurfaceModel):
            raise ConfigError("perturbation applies to hypersurface models only")
        model.structure = perturb_structure(model.structure, spec.perturb, seed=spec.seed)
    return model


def run_suite(spec: SuiteSpec) -> RunReport:
    """Run one suite on one model; raises ConfigError on bad input."""
    if spec.suite_id not in _RUNNERS:
        raise ConfigError(f"unknown suite {spec.suite_id!r}")
    if spec.points < 1 or spec.vectors_per_point < 1:
        raise ConfigError("points and vectors must be positive")
    if not spec.fd_step > 0:
        raise ConfigError("fd step must be positive")
    tols = spec.tolerances()
    start = time.perf_counter()
    model = _prepare_model(spec)
    ctx = _Context(spec, model, tols)
    _RUNNERS[spec.suite_id](ctx)
    assertions = [{"id": k, "residual": r.max_residual, "tol": r.tol, "pass": r.passed,
                   "worst_point": r.worst_point} for k, r in ctx.report.axioms.items()]
    return RunReport(
        suite=spec.suite_id, model=spec.model_key, seed=spec.seed, points=spec.points,
        vectors=spec.vectors_per_point, assertions=assertions, tolerances=tols,
        skipped=ctx.skipped, discrepancies=ctx.discrepancies, info=ctx.info,
        perturb=spec.perturb, wall_ms=1000.0 * (time.perf_counter() - start))


def applicable(suite_id: str, model_key: str) -> bool:
    """Whether ``suite_id`` accepts models of the kind named by ``model_key``."""
    kind = model_key.split(":")[0]
    sasakian = kind == "pseudo-sphere"
    table = {
        "axioms": True,
        "contact-class": kind in ("pseudo-sphere", "flat-mixed", "flat-pq"),
        "domega": kind == "product",
        "einstein": sasakian,
        "fd-crosscheck": True,
        "kashiwada": kind in ("pseudo-sphere", "flat-mixed"),
        "lemma31": sasakian,
        "nijenhuis": kind in ("product", "flat-pq"),
        "p-symmetry": kind in ("pseudo-sphere", "flat-mixed"),
        "q-tensor": sasakian,
        "ricci-xi": sasakian,
        "scalar": sasakian,
        "sectional": sasakian,
    }
    return table.get(suite_id, False)


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def emit_report(reports: RunReport | list[RunReport], fmt: str = "text") -> bytes:
    """Serialize one report or a list of reports as json, csv or text."""
    single = isinstance(reports, RunReport)
    items = [reports] if single else list(reports)
    if fmt == "json":
        data = items[0].to_dict() if single else [r.to_dict() for r in items]
        return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "model", "seed", "assertion", "residual", "tol", "pass", "worst_point"])
        for r in items:
            for a in r.assertions:
                wp = "" if a["worst_point"] is None else " ".join(repr(x) for x in a["worst_point"])
                w.writerow([r.suite, r.model, r.seed, a["id"], repr(a["residual"]), repr(a["tol"]),
                            a["pass"], wp])
        return buf.getvalue().encode()
    if fmt == "text":
        lines = []
        for r in items:
            status = "PASS" if r.passed else "FAIL"
            extra = f" perturb={r.perturb}" if r.perturb else ""
            lines.append(f"[{status}] {r.suite} on {r.model} (seed {r.seed}, {r.points} points, "
                         f"{r.vectors} vectors{extra}, {r.wall_ms:.0f} ms)")
            for a in r.assertions:
                mark = "ok  " if a["pass"] else "FAIL"
                lines.append(f"    {mark} {a['id']:<44s} {a['residual']:.3e} <= {a['tol']:.1e}")
            if r.skipped:
                lines.append(f"    skipped cases: {r.skipped}")
            for d in r.discrepancies:
                state = "holds" if d["holds"] else "does not hold"
                lines.append(f"    note: {d['id']} {state} (residual {d['residual']:.3e})")
        total = sum(r.passed for r in items)
        lines.append(f"{total}/{len(items)} runs passed")
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown format {fmt!r}")


def list_suites() -> str:
    return "\n".join(f"{k:16s} {SUITES[k]}" for k in sorted(SUITES))
