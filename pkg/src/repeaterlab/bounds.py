"""Success-probability limits for swapping in arbitrary finite dimension.

Three layers: a steering bound on how much weight any ensemble member of
a state can carry, a rearrangement inequality for traces of Hermitian
products, and the resulting closed-form ceiling on the probability that
a single measurement outcome at the middle station leaves the end nodes
maximally entangled, together with the operator that reaches it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath
from .states import SchmidtState, max_entangled

PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10
ELEMENT_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class BoundResult:
    """Ceiling, the unitary picking the target state, and the reaching operator."""

    p_max: float
    optimal_u: np.ndarray
    m_i: np.ndarray
    achieved_p: float
    post_fidelity: float

    def to_dict(self) -> dict:
        return {
            "p_max": self.p_max,
            "achieved_p": self.achieved_p,
            "post_fidelity": self.post_fidelity,
            "optimal_u": qmath.as_real_pairs(self.optimal_u),
            "m_i": qmath.as_real_pairs(self.m_i),
        }


def _require_state(rho: np.ndarray, what: str) -> np.ndarray:
    m = qmath.as_matrix(rho)
    qmath.require_hermitian(m, PSD_ATOL, what=what)
    w = np.linalg.eigvalsh(m)
    if float(w[0]) < -PSD_ATOL:
        raise ValueError(f"{what} has negative eigenvalue {float(w[0]):.3e}")
    if abs(float(np.trace(m).real) - 1.0) > TRACE_ATOL:
        raise ValueError(f"{what} must have unit trace, got {float(np.trace(m).real)!r}")
    return m


def steering_bound(rho: np.ndarray, rho_i: np.ndarray) -> float:
    """Largest weight any ensemble for rho can give the member rho_i.

    Zero (with a warning) when rho_i leaks outside the support of rho,
    since no decomposition of rho can contain it at all.
    """
    rho = _require_state(rho, "rho")
    rho_i = _require_state(rho_i, "rho_i")
    if rho.shape != rho_i.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {rho_i.shape}")
    kernel = np.eye(rho.shape[0]) - qmath.support_projector(rho)
    leak = float(np.trace(kernel @ rho_i).real)
    if leak > qmath.SUPPORT_CUTOFF:
        warnings.warn(
            f"rho_i has weight {leak:.3e} outside the support of rho; bound is 0",
            RuntimeWarning, stacklevel=2)
        return 0.0
    inv_sqrt = qmath.pinv_sqrt(rho)
    return float(1.0 / qmath.op_norm_inf(inv_sqrt @ rho_i @ inv_sqrt))


def trace_rearrangement_lb(a: np.ndarray, b: np.ndarray) -> float:
    """Floor on tr(AB): ascending spectrum of A against descending of B."""
    a = qmath.as_matrix(a)
    b = qmath.as_matrix(b)
    qmath.require_hermitian(a, PSD_ATOL, what="a")
    qmath.require_hermitian(b, PSD_ATOL, what="b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    la = np.linalg.eigvalsh(a)
    lb = np.linalg.eigvalsh(b)[::-1]
    return float(np.dot(la, lb))


def _as_schmidt(x) -> SchmidtState:
    if isinstance(x, SchmidtState):
        return x
    return SchmidtState(x)


def p_max(a: SchmidtState | Sequence[float], b: SchmidtState | Sequence[float]) -> float:
    """Ceiling on any single outcome's probability of leaving the ends maximal.

    The source pairs have Schmidt coefficient lists a and b; the smaller
    list is paired against the reversal of the larger one's head.
    """
    sa = _as_schmidt(a)
    sb = _as_schmidt(b)
    if sa.dim > sb.dim:
        sa, sb = sb, sa
    d_a, d = sa.dim, sb.dim
    ca = np.asarray(sa.coefficients)
    cb = np.asarray(sb.coefficients)
    denom = float(np.sum(1.0 / (ca * cb[d_a - 1 :: -1])))
    return float(d / denom)


def optimal_u(d_a: int, d: int) -> np.ndarray:
    """Permutation reversing the first d_a basis states, identity beyond."""
    if not 1 <= d_a <= d:
        raise ValueError(f"need 1 <= d_a <= d, got d_a={d_a}, d={d}")
    u = np.zeros((d, d), dtype=complex)
    for k in range(d_a):
        u[d_a - 1 - k, k] = 1.0
    for k in range(d_a, d):
        u[k, k] = 1.0
    return u


def achieving_operator(a: SchmidtState | Sequence[float],
                       b: SchmidtState | Sequence[float]) -> BoundResult:
    """Measurement element reaching the ceiling, checked on the actual state.

    The middle station holds a mirror copy of the end-node pair; applying
    the element there and tracing gives the honest outcome probability
    and the post-state overlap with the target.  With equal local
    dimensions both hit the ceiling exactly; with unequal dimensions the
    smaller local rank caps what any operator can reach.
    """
    sa = _as_schmidt(a)
    sb = _as_schmidt(b)
    if sa.dim > sb.dim:
        sa, sb = sb, sa
    d_a, d = sa.dim, sb.dim
    ceiling = p_max(sa, sb)

    u = optimal_u(d_a, d)
    omega = max_entangled(u, d)
    a_pad = np.zeros(d)
    a_pad[:d_a] = sa.coefficients
    diag = np.kron(a_pad, np.asarray(sb.coefficients))
    g = np.sqrt(diag)
    inv_g = np.where(g > np.sqrt(qmath.SUPPORT_CUTOFF), 1.0 / np.where(g > 0, g, 1.0), 0.0)
    m_i = np.sqrt(ceiling) * np.outer(omega, omega.conj() * inv_g)

    gram = qmath.dagger(m_i) @ m_i
    top = float(np.linalg.eigvalsh(gram)[-1])
    if top > 1.0 + ELEMENT_ATOL:
        raise ValueError(
            f"operator is not a valid measurement element: "
            f"largest eigenvalue of M^dag M exceeds 1 by {top - 1.0:.3e}")

    joint = g[:, None] * m_i.T
    achieved = float(np.sum(np.abs(joint) ** 2))
    if achieved > qmath.PROB_FLOOR:
        rho_post = (joint @ qmath.dagger(joint)) / achieved
        fidelity = float(np.real(np.vdot(omega, rho_post @ omega)))
    else:
        fidelity = 0.0
    return BoundResult(p_max=ceiling, optimal_u=u, m_i=m_i,
                       achieved_p=achieved, post_fidelity=float(np.clip(fidelity, 0.0, 1.0)))
