"""Structural classification: degradability, antidegradability, monotonicity
certificates, and the 3-level connecting channel.

Degradability is decided by the spectrum of the Choi matrix of the degrading
map (complementary after inverse). Antidegradability has the exact analytic
criterion gamma_j0 >= gamma_jj for every level j >= 1; it is witnessed
constructively by a tripartite two-extension of the Choi state, and refuted
by a strictly positive capacity lower bound.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .channel import TransitionMatrix, channel_map
from .complementary import complementary_map
from .errors import (ConditionViolatedError, NotComparableError)
from .inverse import mad_inverse
from .maps import LinearMap

BOUNDARY_BAND = 1e-7  # relative |min eig| band reported as "boundary"


@dataclass
class ClassificationResult:
    degradable: str  # "yes" | "no" | "boundary" | "unknown"
    antidegradable: bool
    min_choi_eig: Optional[float]
    witnesses: Dict[str, object] = field(default_factory=dict)


def choi_of(m: LinearMap, normalized: bool = True) -> np.ndarray:
    return m.choi(normalized=normalized)


def degrading_map(tm: TransitionMatrix) -> LinearMap:
    """Lambda = Phi_complementary ∘ Phi^{-1}: maps channel outputs to the
    environment output. CP iff the channel is degradable."""
    return mad_inverse(tm).then(complementary_map(tm))


def _psd_status(c: np.ndarray, tol: float) -> tuple[str, float]:
    """PSD verdict with a boundary band.

    Rank-deficient CP maps have exact zero Choi eigenvalues, so values down
    to numerical noise still mean "yes"; only slightly negative values inside
    the band are flagged "boundary" instead of being flipped to "no".
    """
    eig = np.linalg.eigvalsh((c + c.conj().T) / 2)
    lo = float(eig[0])
    scale = max(1.0, float(np.max(np.abs(c))))
    if lo >= -max(1e-12, tol * 1e-3) * scale:
        return "yes", lo
    if lo >= -BOUNDARY_BAND * scale:
        return "boundary", lo
    return ("yes" if lo >= -tol * scale else "no"), lo


def is_degradable(tm: TransitionMatrix, tol: float = 1e-9) -> ClassificationResult:
    """Choi-PSD test of the degrading map; 'unknown' when some gamma_kk = 0
    (the inverse map, and with it the test, is unavailable there)."""
    anti = is_antidegradable(tm)
    if any(tm.gamma[k, k] <= 0.0 for k in range(1, tm.dim)):
        return ClassificationResult("unknown", anti, None)
    c = degrading_map(tm).choi()
    status, lo = _psd_status(c, tol)
    return ClassificationResult(status, anti, lo)


def is_antidegradable(tm: TransitionMatrix) -> bool:
    """Exact arithmetic: gamma_j0 - gamma_jj >= 0 for all j = 1..d-1."""
    g = tm.gamma
    return all(g[j, 0] - g[j, j] >= 0.0 for j in range(1, tm.dim))


def mad_choi_state(tm: TransitionMatrix) -> np.ndarray:
    """State-normalized Choi of the MAD channel, assembled in closed form."""
    d = tm.dim
    g = tm.gamma
    c = np.zeros((d * d, d * d))
    for j in range(d):
        for i in range(j + 1):
            c[j * d + i, j * d + i] = g[j, i]
    surv = np.sqrt(np.diag(g))
    for j in range(d):
        for i in range(d):
            if i != j:
                c[j * d + j, i * d + i] = surv[j] * surv[i]
    return c / d


@dataclass
class TwoExtension:
    dim: int
    tau: np.ndarray  # d^3 x d^3 on A ⊗ B1 ⊗ B2
    p: np.ndarray    # p[j, i] distribution rows


def _extension_p(tm: TransitionMatrix) -> np.ndarray:
    d = tm.dim
    g = tm.gamma
    p = np.zeros((d, d))
    for j in range(1, d):
        if g[j, j] < 1.0:
            p[j, :j] = g[j, :j] / (1.0 - g[j, j])
    return p


def build_two_extension(tm: TransitionMatrix) -> TwoExtension:
    """Tripartite witness tau on A ⊗ B1 ⊗ B2 whose two partial traces both
    equal the channel's Choi state; PSD exactly when the channel is
    antidegradable. Uses p_i^(j) = gamma_ji / (1 - gamma_jj)."""
    if not is_antidegradable(tm):
        raise ConditionViolatedError("two-extension requires antidegradability")
    d = tm.dim
    g = tm.gamma
    for j in range(1, d):
        if g[j, 0] - g[j, j] > 0.0 and g[j, j] >= 1.0:
            raise ConditionViolatedError(f"1 - gamma_jj vanishes at level {j}")
    p = _extension_p(tm)
    n = d ** 3
    tau = np.zeros((n, n))

    def idx(a: int, b1: int, b2: int) -> int:
        return (a * d + b1) * d + b2

    # Diagonal-in-A part.
    tau[idx(0, 0, 0), idx(0, 0, 0)] = g[0, 0]
    for j in range(1, d):
        delta = g[j, 0] - g[j, j]
        r1, r2 = idx(j, 0, j), idx(j, j, 0)
        tau[r1, r1] += g[j, j]
        tau[r2, r2] += g[j, j]
        tau[r1, r2] += g[j, j]
        tau[r2, r1] += g[j, j]
        for i in range(1, j):
            tau[idx(j, i, i), idx(j, i, i)] += g[j, i]
        for i in range(j):
            tau[idx(j, 0, i), idx(j, 0, i)] += p[j, i] * delta
        for i in range(1, j):
            tau[idx(j, i, 0), idx(j, i, 0)] += p[j, i] * delta
            tau[idx(j, i, i), idx(j, i, i)] -= p[j, i] * delta
    # Off-diagonal-in-A part.
    surv = np.sqrt(np.diag(g))
    for j in range(d):
        for i in range(d):
            if i == j:
                continue
            c = surv[j] * surv[i]
            tau[idx(j, 0, j), idx(i, 0, i)] += c
            tau[idx(j, j, 0), idx(i, i, 0)] += c
            if j > 0 and i > 0:
                tau[idx(j, j, 0), idx(i, 0, i)] += c
                tau[idx(j, 0, j), idx(i, i, 0)] += c
    tau /= d
    return TwoExtension(d, tau, p)


def _lg_f(x: float) -> float:
    """log2 of f(x) = x^x / (1+x)^(1+x), with f(0) = 1."""
    term = x * np.log2(x) if x > 0.0 else 0.0
    return float(term - (1.0 + x) * np.log2(1.0 + x))


def capacity_positive_witness(tm: TransitionMatrix, j: int) -> float:
    """Positive lower bound on Q from a level j violating antidegradability:
    (1/2)[log2 f(gamma_j0) - log2 f(gamma_jj)], f non-increasing."""
    g = tm.gamma
    if g[j, 0] >= g[j, j]:
        raise ConditionViolatedError(
            f"witness needs gamma_j0 < gamma_jj at level {j}")
    return 0.5 * (_lg_f(g[j, 0]) - _lg_f(g[j, j]))


def best_capacity_witness(tm: TransitionMatrix) -> float:
    g = tm.gamma
    vals = [capacity_positive_witness(tm, j)
            for j in range(1, tm.dim) if g[j, 0] < g[j, j]]
    return max(vals) if vals else 0.0


@dataclass
class MonotonicityCertificate:
    side: str
    cp: bool
    status: str  # "yes" | "no" | "boundary"
    min_eig: float


def _single_entry_difference(a: TransitionMatrix, b: TransitionMatrix) -> tuple[int, int]:
    d = a.dim
    if b.dim != d:
        raise NotComparableError("dimension mismatch")
    diff = [(j, i) for j in range(1, d) for i in range(j)
            if abs(a.gamma[j, i] - b.gamma[j, i]) > 1e-14]
    if len(diff) != 1:
        raise NotComparableError(
            f"transition matrices differ in {len(diff)} decay entries, need 1")
    return diff[0]


def monotonicity_certificate(tm: TransitionMatrix, tm_bigger: TransitionMatrix,
                             side: str, tol: float = 1e-9) -> MonotonicityCertificate:
    """Choi-PSD certificate for Q(bigger) <= Q(tm) when one decay increased.

    side='left' tests Lambda_L = Phi_bigger ∘ Phi_tm^{-1}; side='right' tests
    Lambda_R = Phi_tm^{-1} ∘ Phi_bigger. Either being CP certifies the
    capacity ordering through the pipeline inequality.
    """
    j, i = _single_entry_difference(tm, tm_bigger)
    if tm_bigger.gamma[j, i] < tm.gamma[j, i]:
        raise NotComparableError(
            f"entry ({j},{i}) decreases; certificate needs an increase")
    if side == "left":
        lam = mad_inverse(tm).then(channel_map(tm_bigger))
    elif side == "right":
        lam = channel_map(tm_bigger).then(mad_inverse(tm))
    else:
        raise NotComparableError(f"side must be 'left' or 'right', got {side!r}")
    status, lo = _psd_status(lam.choi(), tol)
    return MonotonicityCertificate(side, status != "no", status, lo)


def connecting_choi(gamma21: float, omega21: float, k: float) -> np.ndarray:
    """Unnormalized 9x9 Choi of the map Phi_L with Phi_L ∘ Phi_1 = Phi_2.

    Phi_1 is the 3-level MAD with gamma_20 = (1-gamma21)/2 and Phi_2 the one
    with omega_20 = (1-omega21)/k; the shared gamma_10 cancels and is set to
    0. PSD of this matrix certifies Q(Phi_2) <= Q(Phi_1).
    """
    if not (0.0 <= gamma21 < 1.0):
        raise ConditionViolatedError(f"gamma21={gamma21} outside [0, 1)")
    if not (0.0 <= omega21 <= 1.0):
        raise ConditionViolatedError(f"omega21={omega21} outside [0, 1]")
    if not (1.0 <= k < 2.0):
        raise ConditionViolatedError(f"k={k} outside [1, 2)")
    g1 = TransitionMatrix(3, {(2, 1): gamma21, (2, 0): (1.0 - gamma21) / 2.0})
    g2 = TransitionMatrix(3, {(2, 1): omega21, (2, 0): (1.0 - omega21) / k})
    lam = mad_inverse(g1).then(channel_map(g2))
    return lam.choi(normalized=False)


def connecting_eigenvalues(gamma21: float, omega21: float, k: float) -> np.ndarray:
    """Closed-form nonzero eigenvalues of the unnormalized connecting Choi."""
    g, w = gamma21, omega21
    e1 = (2.0 * (1.0 - w) - k * (1.0 - g)) / (k * (1.0 - g))
    e2 = 2.0 * (w - g) / (1.0 - g)
    e3 = (2.0 * k * (2.0 - g - w) - 2.0 * (1.0 - w)) / (k * (1.0 - g))
    return np.array([e1, e2, e3])
