"""Validators for every structure class, producing per-axiom residual reports.

Structure indices ``a`` are 1-based in names and reports and 0-based in the
tuples (``phi[0]`` is φ₁).  Sign constants are fixed: ``τ = (−1, −1, +1)``
and the [r]-Sasakian parameter of each constituent is ``r_a = τ_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curvature import _connection, nabla_endo_tensor
from .errors import DegenerateVertical, DimensionError
from .jet_chart import Point
from .tensors import (
    EndoField,
    MetricField,
    OneForm,
    VectorField,
    d_oneform,
    killing_residual,
    orthonormal_frame_matrix,
    skew_residual,
)

TAU = (-1, -1, 1)
CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))

TOL_ALGEBRAIC = 1e-8
TOL_FIRST_ORDER = 1e-7
TOL_SECOND_ORDER = 1e-6


@dataclass
class MixedThreeStructure:
    """The data (φ_a, ξ_a, η^a, g) together with the sign bookkeeping."""

    phi: tuple[EndoField, EndoField, EndoField]
    xi: tuple[VectorField, VectorField, VectorField]
    eta: tuple[OneForm, OneForm, OneForm]
    g: MetricField
    sigma: int
    epsilon: tuple[float, float, float]
    tau: tuple[int, int, int] = TAU

    @property
    def r(self) -> tuple[int, int, int]:
        return self.tau

    @property
    def chart(self):
        return self.g.chart

    @property
    def dim(self) -> int:
        return self.g.chart.dim

    @classmethod
    def from_fields(cls, phi, xi, eta, g: MetricField, ref: Point) -> "MixedThreeStructure":
        """Read ε_a = sign g(ξ_a, ξ_a) and σ = ε₁ off a reference point."""
        gm = g.at(ref)
        eps = tuple(float(np.sign(x.at(ref) @ gm @ x.at(ref))) for x in xi)
        return cls(tuple(phi), tuple(xi), tuple(eta), g, int(eps[0]), eps)

    def replace(self, **kw) -> "MixedThreeStructure":
        data = dict(phi=self.phi, xi=self.xi, eta=self.eta, g=self.g,
                    sigma=self.sigma, epsilon=self.epsilon, tau=self.tau)
        data.update(kw)
        return MixedThreeStructure(**data)

    def values(self, p: Point) -> dict:
        """Component matrices of every tensor at ``p``."""
        return {
            "g": self.g.at(p),
            "phi": [f.at(p) for f in self.phi],
            "xi": [f.at(p) for f in self.xi],
            "eta": [f.at(p) for f in self.eta],
        }


@dataclass
class AxiomResult:
    max_residual: float
    worst_point: list[float] | None
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "worst_point": self.worst_point,
                "tol": self.tol, "pass": self.passed}


@dataclass
class StructureReport:
    """Maximum residual of each axiom over a set of sample points."""

    tolerance: float
    axioms: dict[str, AxiomResult] = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    def record(self, axiom_id: str, residual: float, p: Point | None, tol: float | None = None):
        tol = self.tolerance if tol is None else tol
        residual = float(residual)
        cur = self.axioms.get(axiom_id)
        if cur is None:
            self.axioms[axiom_id] = AxiomResult(residual, p.tolist() if p else None, tol)
        elif residual > cur.max_residual or np.isnan(residual):
            cur.max_residual = residual
            cur.worst_point = p.tolist() if p else None

    @property
    def overall(self) -> bool:
        return all(r.passed for r in self.axioms.values())

    def failed(self) -> list[str]:
        return [k for k, r in self.axioms.items() if not r.passed]

    def __getitem__(self, axiom_id: str) -> AxiomResult:
        return self.axioms[axiom_id]

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "overall": self.overall,
                "axioms": {k: v.to_dict() for k, v in self.axioms.items()},
                "info": self.info}


def _mx(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


# --------------------------------------------------------------------------
# Almost hyper paraHermitian
# --------------------------------------------------------------------------

def hyper_parahermitian_residuals(J: Sequence[np.ndarray], G: np.ndarray) -> dict[str, float]:
    d = G.shape[0]
    eye = np.eye(d)
    out = {}
    for a in range(3):
        out[f"J{a + 1}^2=-tau{a + 1}I"] = _mx(J[a] @ J[a] + TAU[a] * eye)
        out[f"J{a + 1}-skew"] = skew_residual(G, J[a])
    for a, b, c in CYCLIC:
        out[f"J{a + 1}J{b + 1}=tau{c + 1}J{c + 1}"] = _mx(J[a] @ J[b] - TAU[c] * J[c])
        out[f"J{b + 1}J{a + 1}=-tau{c + 1}J{c + 1}"] = _mx(J[b] @ J[a] + TAU[c] * J[c])
    minus, plus = _signature(G)
    out["neutral-signature"] = float(abs(minus - plus))
    return out


def _signature(gm):
    s = orthonormal_frame_matrix(gm).signs
    return int(np.sum(s < 0)), int(np.sum(s > 0))


def validate_hyper_parahermitian(J: Sequence[EndoField], G: MetricField, samples: Sequence[Point],
                                 tol: float = TOL_ALGEBRAIC) -> StructureReport:
    if G.chart.dim % 4:
        raise DimensionError(f"dimension {G.chart.dim} is not divisible by 4")
    rep = StructureReport(tol)
    for p in samples:
        res = hyper_parahermitian_residuals([j.at(p) for j in J], G.at(p))
        for k, v in res.items():
            rep.record(k, v, p, 0.5 if k == "neutral-signature" else None)
    return rep


# --------------------------------------------------------------------------
# Single almost (para)contact metric structures
# --------------------------------------------------------------------------

def almost_contact_residuals(phi, xi, eta, gm, r: int = -1) -> dict[str, float]:
    """Axioms of an almost [r]-contact metric structure at one point.

    ``r = -1`` is the paracontact case, ``r = +1`` the indefinite contact one:
    ``φ² = r(−I + η⊗ξ)`` and ``g(φX, φY) = r(g(X, Y) − ε η(X)η(Y))``.
    """
    d = gm.shape[0]
    eps = float(np.sign(xi @ gm @ xi))
    out = {
        "phi^2": _mx(phi @ phi - r * (-np.eye(d) + np.outer(xi, eta))),
        "eta(xi)=1": abs(float(eta @ xi) - 1.0),
        "compatibility": _mx(phi.T @ gm @ phi - r * (gm - eps * np.outer(eta, eta))),
        "phi(xi)=0": _mx(phi @ xi),
        "eta.phi=0": _mx(eta @ phi),
        "skew": skew_residual(gm, phi),
        "eta=eps*g(.,xi)": _mx(eta - eps * (gm @ xi)),
        "|g(xi,xi)|=1": abs(abs(float(xi @ gm @ xi)) - 1.0),
    }
    return out


def validate_almost_paracontact_metric(phi: EndoField, xi: VectorField, eta: OneForm,
                                       g: MetricField, samples: Sequence[Point],
                                       r: int = -1, tol: float = TOL_ALGEBRAIC) -> StructureReport:
    if g.chart.dim % 2 == 0:
        raise DimensionError(f"dimension {g.chart.dim} is even")
    rep = StructureReport(tol)
    eps_seen = set()
    for p in samples:
        gm, xv = g.at(p), xi.at(p)
        eps_seen.add(float(np.sign(xv @ gm @ xv)))
        for k, v in almost_contact_residuals(phi.at(p), xv, eta.at(p), gm, r).items():
            rep.record(k, v, p)
    rep.info["epsilon"] = sorted(eps_seen)
    return rep


def _nabla_phi_residual(gj, Pj, xv, ev, r, eps) -> float:
    """max over basis X, Y of |(∇_X φ)(Y) − r(g(X, Y)ξ − ε η(Y)X)|."""
    _, gamma, _ = _connection(gj)
    N = nabla_endo_tensor(gamma, Pj)  # N[k, j, i] = (nabla_i phi)^k_j
    d = gj.val.shape[0]
    target = r * (np.einsum("ij,k->kji", gj.val, xv)
                  - eps * np.einsum("j,ki->kji", ev, np.eye(d)))
    return _mx(N - target)


def classify_contact_class(phi: EndoField, xi: VectorField, eta: OneForm, g: MetricField,
                           samples: Sequence[Point], r: int, tol: float = TOL_FIRST_ORDER) -> StructureReport:
    """Paracontact-metric (dη = Φ), K-contact (ξ Killing) and [r]-Sasakian residuals.

    The ``info`` dict carries the three flags.
    """
    rep = StructureReport(tol)
    for p in samples:
        gj, Pj = g.jet(p), phi.jet(p)
        gm, pm = gj.val, Pj.val
        xv, ev = xi.at(p), eta.at(p)
        eps = float(np.sign(xv @ gm @ xv))
        rep.record("d_eta=Phi", _mx(d_oneform(eta, p).full() - gm @ pm), p)
        rep.record("xi-killing", killing_residual(g, xi, p), p)
        rep.record("nabla_phi", _nabla_phi_residual(gj, Pj, xv, ev, r, eps), p)
    contact = rep["d_eta=Phi"].passed
    rep.info.update(
        r=r,
        paracontact_metric=contact,
        para_K_contact=contact and rep["xi-killing"].passed,
        r_sasakian=contact and rep["nabla_phi"].passed,
    )
    return rep


# --------------------------------------------------------------------------
# Mixed 3-structures
# --------------------------------------------------------------------------

def _check_dim(dim: int):
    if dim < 3 or (dim - 3) % 4:
        raise DimensionError(f"dimension {dim} is not of the form 4m+3")


def mixed_structure_residuals(v: dict, sigma: int) -> tuple[dict[str, float], dict]:
    gm, phi, xi, eta = v["g"], v["phi"], v["xi"], v["eta"]
    d = gm.shape[0]
    eye = np.eye(d)
    out: dict[str, float] = {}
    for a in range(3):
        t = TAU[a]
        n = f"{a + 1}"
        eps = float(np.sign(xi[a] @ gm @ xi[a]))
        out[f"phi{n}^2"] = _mx(phi[a] @ phi[a] + t * (eye - np.outer(xi[a], eta[a])))
        out[f"eta{n}(xi{n})=1"] = abs(float(eta[a] @ xi[a]) - 1.0)
        out[f"compat{n}"] = _mx(phi[a].T @ gm @ phi[a]
                                - t * (gm - eps * np.outer(eta[a], eta[a])))
        out[f"eta{n}=eps*g(.,xi{n})"] = _mx(eta[a] - eps * (gm @ xi[a]))
    for a, b, c in CYCLIC:
        A, B, C = a + 1, b + 1, c + 1
        lhs1 = phi[a] @ phi[b] - TAU[a] * np.outer(xi[a], eta[b])
        lhs2 = -phi[b] @ phi[a] + TAU[b] * np.outer(xi[b], eta[a])
        out[f"phi{A}phi{B}-tau{A}eta{B}(x)xi{A}=tau{C}phi{C}"] = _mx(lhs1 - TAU[c] * phi[c])
        out[f"-phi{B}phi{A}+tau{B}eta{A}(x)xi{B}=tau{C}phi{C}"] = _mx(lhs2 - TAU[c] * phi[c])
        out[f"eta{A}.phi{B}=tau{C}eta{C}"] = _mx(eta[a] @ phi[b] - TAU[c] * eta[c])
        out[f"-eta{B}.phi{A}=tau{C}eta{C}"] = _mx(-eta[b] @ phi[a] - TAU[c] * eta[c])
        out[f"phi{A}(xi{B})=tau{B}xi{C}"] = _mx(phi[a] @ xi[b] - TAU[b] * xi[c])
        out[f"phi{B}(xi{A})=-tau{A}xi{C}"] = _mx(phi[b] @ xi[a] + TAU[a] * xi[c])
    n1, n2, n3 = (float(x @ gm @ x) for x in xi)
    out["eps1=eps2=-eps3"] = abs(n1 - n2) + abs(n1 + n3) + abs(abs(n1) - 1.0)
    out["eps1=sigma"] = abs(n1 - sigma)
    minus, plus = _signature(gm)
    # H neutral  <=>  (plus - minus) equals eps1 + eps2 + eps3 = sigma
    out["H-neutral-signature"] = float(abs((plus - minus) - sigma))
    info = {"signature": [minus, plus], "epsilon": [float(np.sign(n)) for n in (n1, n2, n3)],
            "sigma": float(np.sign(n1))}
    return out, info


def validate_mixed_3_structure(S: MixedThreeStructure, samples: Sequence[Point],
                               tol: float = TOL_ALGEBRAIC) -> StructureReport:
    _check_dim(S.dim)
    rep = StructureReport(tol)
    sigs = set()
    for p in samples:
        res, info = mixed_structure_residuals(S.values(p), S.sigma)
        for k, v in res.items():
            rep.record(k, v, p, 0.5 if k == "H-neutral-signature" else None)
        sigs.add((tuple(info["signature"]), tuple(info["epsilon"]), info["sigma"]))
    if len(sigs) == 1:
        (sig, eps, sigma), = sigs
        rep.info.update(signature=list(sig), epsilon=list(eps), sigma=sigma)
    else:
        rep.info["signature_changes"] = sorted(sigs)
    return rep


def hv_split(S: MixedThreeStructure, p: Point, v) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into its H = ∩ ker η^a and V = span(ξ_a) parts."""
    gm = S.g.at(p)
    X = np.array([x.at(p) for x in S.xi])  # rows xi_a
    gram = X @ gm @ X.T
    if abs(np.linalg.det(gram)) < 1e-10:
        raise DegenerateVertical("Gram matrix of the Reeb fields is singular")
    v = np.asarray(v, dtype=float)
    coef = np.linalg.solve(gram, X @ gm @ v)
    vert = coef @ X
    return v - vert, vert


def validate_mixed_3_contact(S: MixedThreeStructure, samples: Sequence[Point],
                             tol: float = TOL_FIRST_ORDER) -> StructureReport:
    """dη^a = Φ_a for every a."""
    rep = StructureReport(tol)
    for p in samples:
        gm = S.g.at(p)
        for a in range(3):
            rep.record(f"d_eta{a + 1}=Phi{a + 1}",
                       _mx(d_oneform(S.eta[a], p).full() - gm @ S.phi[a].at(p)), p)
    return rep


def validate_mixed_3_sasakian(S: MixedThreeStructure, samples: Sequence[Point],
                              tol: float = TOL_FIRST_ORDER) -> StructureReport:
    """(∇_X φ_a)(Y) = τ_a(g(X, Y)ξ_a − ε_a η^a(Y)X) for every a."""
    rep = StructureReport(tol)
    for p in samples:
        gj = S.g.jet(p)
        gm = gj.val
        for a in range(3):
            xv = S.xi[a].at(p)
            eps = float(np.sign(xv @ gm @ xv))
            rep.record(f"nabla_phi{a + 1}",
                       _nabla_phi_residual(gj, S.phi[a].jet(p), xv, S.eta[a].at(p), TAU[a], eps), p)
    return rep


def restriction_residuals(S: MixedThreeStructure, p: Point, vectors: Sequence) -> dict[str, float]:
    """Almost hyper paraHermitian axioms of the φ_a restricted to H, checked on H-vectors."""
    v = S.values(p)
    gm, phi = v["g"], v["phi"]
    hs = [hv_split(S, p, w)[0] for w in vectors]
    out = {}
    for a in range(3):
        sq = max(_mx(phi[a] @ (phi[a] @ h) + TAU[a] * h) for h in hs)
        out[f"phi{a + 1}^2=-tau{a + 1} on H"] = sq
        out[f"phi{a + 1} skew on H"] = max(
            abs(float((phi[a] @ x) @ gm @ y + x @ gm @ (phi[a] @ y))) for x in hs for y in hs)
        out[f"phi{a + 1} preserves H"] = max(
            _mx(np.array([e @ (phi[a] @ h) for e in v["eta"]])) for h in hs)
    for a, b, c in CYCLIC:
        out[f"phi{a + 1}phi{b + 1}=tau{c + 1}phi{c + 1} on H"] = max(
            _mx(phi[a] @ (phi[b] @ h) - TAU[c] * (phi[c] @ h)) for h in hs)
    return out
