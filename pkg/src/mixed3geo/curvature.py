"""Levi-Civita connection and curvature.

Sign conventions:

* ``R(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z``, stored as
  ``riemann13[l, k, i, j]`` = l-component of ``R(∂_i, ∂_j)∂_k``.
* The (0,4) tensor is ``R(X, Y, Z, W) = g(R(Z, W)Y, X)``.
* ``ρ(X, Y) = tr{Z ↦ R(Z, X)Y}``.

With these, the round unit sphere has sectional curvature +1 and Ricci
tensor ``(n − 1) g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlane
from .jet_chart import Jet2, Point, jet_einsum
from .tensors import (
    EndoField,
    Frame,
    MetricField,
    OneForm,
    VectorField,
    d_oneform,
    orthonormal_frame_matrix,
)

PLANE_THRESHOLD = 1e-8


def _connection(gj: Jet2):
    g = gj.val
    dg = gj.grad   # dg[a, b, m] = d_m g_ab
    ddg = gj.hess  # ddg[a, b, m, n] = d_n d_m g_ab
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + ginv.T)
    # S[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    S = np.einsum("jli->ijl", dg) + np.einsum("ilj->ijl", dg) - dg
    gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, S)
    dS = (np.einsum("jlim->ijlm", ddg) + np.einsum("iljm->ijlm", ddg) - ddg)
    dginv = -np.einsum("ka,abm,bl->klm", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("klm,ijl->kijm", dginv, S) + np.einsum("kl,ijlm->kijm", ginv, dS))
    gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))
    dgamma = 0.5 * (dgamma + np.swapaxes(dgamma, 1, 2))
    return ginv, gamma, dgamma


def christoffel(g: MetricField, p: Point) -> np.ndarray:
    """``Γ[k, i, j] = Γ^k_ij = ½ g^kl (d_i g_jl + d_j g_il − d_l g_ij)``."""
    g.check_nondegenerate(p)
    return _connection(g.jet(p))[1]


@dataclass
class CurvaturePack:
    """Everything curvature-related for one metric at one point."""

    metric: np.ndarray
    inverse: np.ndarray
    gamma: np.ndarray
    riemann13: np.ndarray
    ricci: np.ndarray
    scalar: float
    frame: Frame

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    def inner(self, X, Y) -> float:
        return float(np.asarray(X) @ self.metric @ np.asarray(Y))

    def R(self, X, Y, Z) -> np.ndarray:
        """The vector ``R(X, Y)Z``."""
        return np.einsum("lkij,k,i,j->l", self.riemann13, Z, X, Y)

    def R04(self, X, Y, Z, W) -> float:
        """``R(X, Y, Z, W) = g(R(Z, W)Y, X)``."""
        return self.inner(self.R(Z, W, Y), X)

    def ricci_form(self, X, Y) -> float:
        return float(np.asarray(X) @ self.ricci @ np.asarray(Y))

    def sectional(self, X, Y) -> float:
        X, Y = np.asarray(X, float), np.asarray(Y, float)
        den = self.inner(X, X) * self.inner(Y, Y) - self.inner(X, Y) ** 2
        if abs(den) < PLANE_THRESHOLD:
            raise DegeneratePlane(f"plane Gram determinant {den:.3g}")
        return self.inner(self.R(X, Y, Y), X) / den


def _riemann_from(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    # dgamma[l, j, k, i] = d_i Gamma^l_jk
    R = (np.einsum("ljki->lkij", dgamma) - np.einsum("likj->lkij", dgamma)
         + np.einsum("lim,mjk->lkij", gamma, gamma)
         - np.einsum("ljm,mik->lkij", gamma, gamma))
    return 0.5 * (R - np.swapaxes(R, 2, 3))


def ricci_coordinate(riemann13: np.ndarray) -> np.ndarray:
    """``ρ_ab = R^l_{b l a}``: the trace of ``Z ↦ R(Z, ∂_a)∂_b``."""
    return np.einsum("lbla->ab", riemann13)


def ricci_frame(riemann13: np.ndarray, gm: np.ndarray, frame: Frame) -> np.ndarray:
    """``ρ(X, Y) = Σ ε_i g(R(E_i, X)Y, E_i)`` assembled on coordinate vectors."""
    E, eps = frame.vectors, frame.signs
    return np.einsum("i,ic,id,dl,lbca->ab", eps, E, E, gm, riemann13)


def riemann(g: MetricField, p: Point) -> CurvaturePack:
    gm = g.check_nondegenerate(p)
    gj = g.jet(p)
    ginv, gamma, dgamma = _connection(gj)
    R = _riemann_from(gamma, dgamma)
    frame = orthonormal_frame_matrix(gm)
    ric = ricci_frame(R, gm, frame)
    scalar = float(np.einsum("i,ia,ib,ab->", frame.signs, frame.vectors, frame.vectors, ric))
    return CurvaturePack(gm, ginv, gamma, R, ric, scalar, frame)


def riemann_0_4(g: MetricField, p: Point, X, Y, Z, W) -> float:
    return riemann(g, p).R04(X, Y, Z, W)


def ricci(g: MetricField, p: Point, path: str = "frame") -> np.ndarray:
    """Ricci tensor by the frame trace (``path="frame"``) or coordinate trace."""
    pack = riemann(g, p)
    if path == "frame":
        return pack.ricci
    if path == "coordinate":
        return ricci_coordinate(pack.riemann13)
    raise ValueError(f"unknown Ricci path {path!r}")


def scalar_curvature(g: MetricField, p: Point) -> float:
    return riemann(g, p).scalar


def sectional(g: MetricField, p: Point, X, Y) -> float:
    return riemann(g, p).sectional(X, Y)


def metric_compatibility(g: MetricField, p: Point) -> float:
    """max |(∇_i g)_jk| = |d_i g_jk − Γ^l_ij g_lk − Γ^l_ik g_jl|."""
    gj = g.jet(p)
    _, gamma, _ = _connection(gj)
    gm = gj.val
    nab = (np.einsum("jki->ijk", gj.grad)
           - np.einsum("lij,lk->ijk", gamma, gm)
           - np.einsum("lik,jl->ijk", gamma, gm))
    return float(np.max(np.abs(nab)))


# --------------------------------------------------------------------------
# Covariant derivatives
# --------------------------------------------------------------------------

def _nabla_vec(gamma: np.ndarray, Xv: np.ndarray, Yj: Jet2) -> np.ndarray:
    # (nabla_X Y)^k = X^i (d_i Y^k + Gamma^k_ij Y^j)
    return Yj.grad @ Xv + np.einsum("kij,i,j->k", gamma, Xv, Yj.val)


def covariant_deriv_vector(g: MetricField, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    gamma = _connection(g.jet(p))[1]
    return _nabla_vec(gamma, X.at(p), Y.jet(p))


def covariant_deriv_endo(g: MetricField, phi: EndoField, X: VectorField, Y: VectorField,
                         p: Point) -> np.ndarray:
    """``(∇_X φ)(Y) = ∇_X(φY) − φ(∇_X Y)``."""
    gamma = _connection(g.jet(p))[1]
    Xv, Yj, Pj = X.at(p), Y.jet(p), phi.jet(p)
    phiY = jet_einsum("kl,l->k", Pj, Yj)
    return _nabla_vec(gamma, Xv, phiY) - Pj.val @ _nabla_vec(gamma, Xv, Yj)


def nabla_endo_tensor(gamma: np.ndarray, Pj: Jet2) -> np.ndarray:
    """``N[k, j, i] = (∇_i φ)^k_j``, so ``(∇_X φ)(Y) = N[k, j, i] X^i Y^j``."""
    return (np.einsum("kji->kji", Pj.grad)
            + np.einsum("kil,lj->kji", gamma, Pj.val)
            - np.einsum("lij,kl->kji", gamma, Pj.val))


# --------------------------------------------------------------------------
# The auxiliary P and Q tensors
# --------------------------------------------------------------------------

def p_tensor_values(deta: np.ndarray, gm: np.ndarray, X, Y, Z, W) -> float:
    """P(X,Y,Z,W) = dη(X,Z)g(Y,W) − dη(X,W)g(Y,Z) − dη(Y,Z)g(X,W) + dη(Y,W)g(X,Z)."""
    def d(a, b):
        return a @ deta @ b

    def g(a, b):
        return a @ gm @ b

    X, Y, Z, W = (np.asarray(v, dtype=float) for v in (X, Y, Z, W))
    return float(d(X, Z) * g(Y, W) - d(X, W) * g(Y, Z) - d(Y, Z) * g(X, W) + d(Y, W) * g(X, Z))


def p_tensor(g: MetricField, eta: OneForm, p: Point, X, Y, Z, W) -> float:
    return p_tensor_values(d_oneform(eta, p).full(), g.at(p), X, Y, Z, W)


def lemma31_lhs(pack: CurvaturePack, phi: np.ndarray, X, Y, Z, W) -> float:
    """``g(R(X, Y)Z, φW) + g(R(X, Y)φZ, W)``."""
    Z, W = np.asarray(Z, float), np.asarray(W, float)
    return pack.inner(pack.R(X, Y, Z), phi @ W) + pack.inner(pack.R(X, Y, phi @ Z), W)


def lemma31_residual(structure, a: int, p: Point, X, Y, Z, W, pack: CurvaturePack | None = None) -> float:
    """``|g(R(X,Y)Z, φ_a W) + g(R(X,Y)φ_a Z, W) + r_a ε_a P_a(X,Y,Z,W)|``.

    ``a`` is 1, 2 or 3; ``r_a`` is the structure's fixed (−1, −1, +1).
    """
    pack = pack or riemann(structure.g, p)
    i = a - 1
    phi = structure.phi[i].at(p)
    deta = d_oneform(structure.eta[i], p).full()
    P = p_tensor_values(deta, pack.metric, X, Y, Z, W)
    r, eps = structure.r[i], structure.epsilon[i]
    return abs(lemma31_lhs(pack, phi, X, Y, Z, W) + r * eps * P)


def q_tensor(structure, p: Point, X, Y, pack: CurvaturePack | None = None) -> float:
    """``Q(X,Y) = ρ(X, φ₃Y) − ρ(Y, φ₃X) + 2σ(4n+1) g(X, φ₃Y)`` with dim = 4n+3."""
    pack = pack or riemann(structure.g, p)
    n = (pack.dim - 3) // 4
    phi3 = structure.phi[2].at(p)
    X, Y = np.asarray(X, float), np.asarray(Y, float)
    s = structure.sigma
    return (pack.ricci_form(X, phi3 @ Y) - pack.ricci_form(Y, phi3 @ X)
            + 2 * s * (4 * n + 1) * pack.inner(X, phi3 @ Y))


def q_frame_sum(structure, p: Point, X, Y, pack: CurvaturePack | None = None,
                frame: Frame | None = None) -> float:
    """``Σ_i ε_i g(R(X, Y)e_i, φ₃ e_i)`` over an orthonormal frame."""
    pack = pack or riemann(structure.g, p)
    frame = frame or pack.frame
    phi3 = structure.phi[2].at(p)
    total = 0.0
    for e, eps in zip(frame.vectors, frame.signs):
        total += eps * pack.inner(pack.R(X, Y, e), phi3 @ e)
    return float(total)
