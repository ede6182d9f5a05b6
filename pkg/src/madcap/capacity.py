"""Coherent information, its maximization, and quantum-capacity certificates.

The certificate cascade for a transition matrix:
  1. antidegradable                -> Zero
  2. degradable (Choi test)       -> ExactDegradable, value = diagonal max
  3. a level decays completely    -> ExactByReduction (drop the top level
     after relabeling it there with level-swap unitaries), recursively
  4. region extension along a single decay entry, either sandwiched between
     a degradable border and a complete-damping border with equal values, or
     pinned between a monotone upper bound and an independent lower bound
  5. otherwise a LowerBound (diagonal max / noiseless subspace / analytic
     witness) or Unknown.
All capacities are in bits.
"""
import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .channel import (TransitionMatrix, apply, channel_map, kraus_from_gamma,
                      permute_levels)
from .complementary import complementary_apply
from .errors import ConditionViolatedError
from .linalg import shannon_entropy, von_neumann_entropy
from .maps import LinearMap
from .structure import best_capacity_witness, is_antidegradable, is_degradable

_GOLD = (np.sqrt(5.0) - 1.0) / 2.0
_ZERO_LEVEL_TOL = 1e-12
_MAX_DEPTH = 6

EXACT_KINDS = ("Zero", "ExactDegradable", "ExactByReduction",
               "ExactByRegionExtension")


# ---------------------------------------------------------------------------
# coherent information

def coherent_information(tm: TransitionMatrix, rho: np.ndarray) -> float:
    """I_c = S(Phi(rho)) - S(Phi_complementary(rho)), in bits."""
    out = apply(tm, rho)
    env = complementary_apply(tm, rho, validate=False)
    return von_neumann_entropy(out, validate=False) - von_neumann_entropy(env, validate=False)


def _env_pairs(d: int) -> List[Tuple[int, int]]:
    return [(j, i) for j in range(1, d) for i in range(j)]


def diagonal_coherent_information(tm: TransitionMatrix, p: np.ndarray) -> float:
    """I_c on a diagonal input: both outputs are diagonal, so the entropies
    are plain Shannon entropies of closed-form distributions."""
    g = tm.gamma
    p = np.asarray(p, dtype=float)
    out = g.T @ p
    env = [float(np.diag(g) @ p)] + [g[j, i] * p[j] for j, i in _env_pairs(tm.dim)]
    return shannon_entropy(out) - shannon_entropy(np.asarray(env))


def _diag_ic_batch(g: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Vectorized diagonal coherent information over rows of ``pts``."""
    d = g.shape[0]
    out = pts @ g
    env_cols = [pts @ np.diag(g)]
    for j, i in _env_pairs(d):
        env_cols.append(g[j, i] * pts[:, j])
    env = np.stack(env_cols, axis=1)

    def ent(x):
        x = np.where(x > 1e-12, x, 1.0)
        return -np.sum(x * np.log2(x), axis=1)

    return ent(out) - ent(env)


@lru_cache(maxsize=16)
def _simplex_grid(d: int, steps: int) -> np.ndarray:
    """All probability vectors with entries k/steps on the (d-1)-simplex."""
    combos = itertools.combinations(range(steps + d - 1), d - 1)
    cuts = np.array(list(combos), dtype=int).reshape(-1, d - 1)
    padded = np.hstack([np.full((cuts.shape[0], 1), -1), cuts,
                        np.full((cuts.shape[0], 1), steps + d - 1)])
    parts = np.diff(padded, axis=1) - 1
    return parts / steps


def golden_section_max(f, a: float, b: float, tol: float = 1e-10) -> Tuple[float, float]:
    """Maximize a unimodal scalar function on [a, b]."""
    c = b - _GOLD * (b - a)
    e = a + _GOLD * (b - a)
    fc, fe = f(c), f(e)
    while abs(b - a) > tol:
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _GOLD * (b - a)
            fe = f(e)
    x = (a + b) / 2.0
    return x, f(x)


def _refine_simplex(f, p: np.ndarray, tol: float = 1e-8,
                    max_passes: int = 60) -> Tuple[np.ndarray, float]:
    """Coordinate-pairwise golden-section ascent on the simplex."""
    p = p.copy()
    d = p.size
    best = f(p)
    for _ in range(max_passes):
        moved = 0.0
        for i in range(d):
            for j in range(i + 1, d):
                m = p[i] + p[j]
                if m <= tol:
                    continue

                def slice_f(t, i=i, j=j, m=m):
                    q = p.copy()
                    q[i] = t
                    q[j] = m - t
                    return f(q)

                t, val = golden_section_max(slice_f, 0.0, m, tol=tol * max(m, 1e-3))
                if val > best:
                    moved = max(moved, abs(p[i] - t))
                    p[i], p[j] = t, m - t
                    best = val
        if moved < tol:
            break
    return p, best


def max_diagonal_coherent_info(tm: TransitionMatrix,
                               grid_step: float = 0.02) -> Tuple[float, np.ndarray]:
    """Maximize I_c over diagonal inputs: coarse simplex grid followed by
    coordinate-wise golden-section refinement. For degradable channels this
    equals the quantum capacity; otherwise it is a lower bound."""
    d = tm.dim
    if d == 1:
        return 0.0, np.ones(1)
    steps = max(1, int(round(1.0 / grid_step)))
    pts = _simplex_grid(d, steps)
    vals = _diag_ic_batch(tm.gamma, pts)
    start = pts[int(np.argmax(vals))]
    p, val = _refine_simplex(lambda q: diagonal_coherent_information(tm, q), start)
    return float(val), p


def _h2(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def adc_capacity(gamma: float) -> float:
    """Quantum capacity of the 2-level channel: diagonal maximum of
    h2((1-g)p) - h2(gp) for g <= 1/2, zero (antidegradable) for g >= 1/2."""
    if not (0.0 <= gamma <= 1.0):
        raise ConditionViolatedError(f"gamma={gamma} outside [0, 1]")
    if gamma >= 0.5:
        return 0.0
    _, val = golden_section_max(
        lambda p: _h2((1.0 - gamma) * p) - _h2(gamma * p), 0.0, 1.0, tol=1e-12)
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# complete damping

def reduce_complete_damping(tm: TransitionMatrix) -> TransitionMatrix:
    """Drop a completely decaying top level; the reduced channel has the same
    quantum capacity."""
    d = tm.dim
    if tm.gamma[d - 1, d - 1] > _ZERO_LEVEL_TOL:
        raise ConditionViolatedError(
            f"top level survives with probability {tm.gamma[d - 1, d - 1]}")
    decays = {(j, i): p for (j, i), p in tm.decays.items() if j < d - 1}
    return TransitionMatrix(d - 1, decays)


def _direct_sum_map(tm: TransitionMatrix) -> LinearMap:
    """Reduced channel on the lower block plus a classical flag on the top
    level: Kraus of the (d-1) channel padded with zeros, plus |d-1><d-1|."""
    d = tm.dim
    reduced = reduce_complete_damping(tm)
    ops = []
    for k in kraus_from_gamma(reduced):
        pad = np.zeros((d, d), dtype=complex)
        pad[:d - 1, :d - 1] = k
        ops.append(pad)
    flag = np.zeros((d, d), dtype=complex)
    flag[d - 1, d - 1] = 1.0
    ops.append(flag)
    return LinearMap.from_kraus(ops)


def _level_erasure_map(tm: TransitionMatrix) -> LinearMap:
    """Keep the lower block untouched and send the top-level population onto
    the diagonal with the channel's own decay weights."""
    d = tm.dim
    proj = np.eye(d, dtype=complex)
    proj[d - 1, d - 1] = 0.0
    ops = [proj]
    for i in range(d - 1):
        p = tm.gamma[d - 1, i]
        if p > 0.0:
            k = np.zeros((d, d), dtype=complex)
            k[i, d - 1] = np.sqrt(p)
            ops.append(k)
    return LinearMap.from_kraus(ops)


def verify_cd_decomposition(tm: TransitionMatrix, tol: float = 1e-10) -> bool:
    """Check the channel factors as level-erasure after the direct-sum map on
    a full matrix probe basis."""
    d = tm.dim
    if tm.gamma[d - 1, d - 1] > _ZERO_LEVEL_TOL:
        raise ConditionViolatedError("not a complete-damping channel")
    composite = _direct_sum_map(tm).then(_level_erasure_map(tm))
    phi = channel_map(tm)
    for m in range(d):
        for n in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[m, n] = 1.0
            if np.max(np.abs(composite(e) - phi(e))) > tol:
                return False
    return True


# ---------------------------------------------------------------------------
# capacity certificates

@dataclass
class CapacityCertificate:
    kind: str
    value: Optional[float]
    provenance: List[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS

    def to_json(self, tm: TransitionMatrix | None = None) -> str:
        payload = {"kind": self.kind, "value": self.value,
                   "provenance": self.provenance}
        if tm is not None:
            payload["gamma"] = [[float(x) for x in row] for row in tm.gamma]
        return json.dumps(payload)


_CERT_CACHE: dict = {}


def _deg_ok(tm: TransitionMatrix, tol_psd: float) -> bool:
    res = is_degradable(tm, tol_psd)
    return res.degradable in ("yes", "boundary")


def _noiseless_log2(tm: TransitionMatrix) -> float:
    count = sum(1 for j in range(tm.dim) if tm.gamma[j, j] >= 1.0 - _ZERO_LEVEL_TOL)
    return float(np.log2(count)) if count >= 1 else 0.0


def _find_cd_permutation(tm: TransitionMatrix) -> Optional[Tuple[Tuple[int, ...], TransitionMatrix]]:
    """A level relabeling that keeps all decays downward and puts a completely
    decaying level on top, enabling the complete-damping reduction."""
    d = tm.dim
    zeros = [k for k in range(1, d) if tm.gamma[k, k] <= _ZERO_LEVEL_TOL]
    if not zeros:
        return None
    if d - 1 in zeros:
        return tuple(range(d)), tm
    for perm in itertools.permutations(range(d)):
        if not any(perm[k] == d - 1 for k in zeros):
            continue
        try:
            return perm, permute_levels(tm, perm)
        except Exception:
            continue
    return None


def _bisect_predicate(pred, lo: float, hi: float, iters: int = 60) -> float:
    """Largest t in [lo, hi] with pred(t) true, assuming pred(lo) and not
    pred(hi), by bisection on the boolean."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _monotone_axis(tm: TransitionMatrix, j: int, i: int) -> bool:
    """Axes where increasing gamma_ji is always capacity-non-increasing:
    decays out of the top level (left-composition with a single-decay channel)
    and the gamma_10 decay (right-composition)."""
    return j == tm.dim - 1 or (j, i) == (1, 0)


def _axis_cert_ok(tm_lo: TransitionMatrix, tm_hi: TransitionMatrix,
                  tol_psd: float) -> bool:
    """CP check of a connecting map for one increased entry, either side."""
    from .structure import monotonicity_certificate
    for side in ("right", "left"):
        try:
            if monotonicity_certificate(tm_lo, tm_hi, side, tol_psd).cp:
                return True
        except Exception:
            continue
    return False


def certify_capacity(tm: TransitionMatrix, tol_border: float = 1e-6,
                     tol_psd: float = 1e-9, _depth: int = 0) -> CapacityCertificate:
    key = (tm.key(), round(tol_border, 15), _depth >= _MAX_DEPTH)
    hit = _CERT_CACHE.get(key)
    if hit is not None:
        return hit
    cert = _certify(tm, tol_border, tol_psd, _depth)
    _CERT_CACHE[key] = cert
    return cert


def _certify(tm: TransitionMatrix, tol_border: float, tol_psd: float,
             _depth: int) -> CapacityCertificate:
    d = tm.dim
    if is_antidegradable(tm):
        return CapacityCertificate(
            "Zero", 0.0, ["antidegradable: gamma_j0 >= gamma_jj for every j"])

    zeros = [k for k in range(1, d) if tm.gamma[k, k] <= _ZERO_LEVEL_TOL]
    if not zeros:
        res = is_degradable(tm, tol_psd)
        if res.degradable in ("yes", "boundary"):
            val, _ = max_diagonal_coherent_info(tm)
            note = "" if res.degradable == "yes" else " (boundary)"
            return CapacityCertificate(
                "ExactDegradable", val,
                [f"degrading-map Choi PSD{note}, min eig {res.min_choi_eig:.3e}",
                 "value = max coherent information over diagonal inputs"])
    else:
        found = _find_cd_permutation(tm)
        if found is not None:
            perm, relabeled = found
            reduced = reduce_complete_damping(relabeled)
            sub = certify_capacity(reduced, tol_border, tol_psd, _depth + 1)
            prov = [f"complete damping after level relabeling {perm}",
                    f"reduced to {reduced.dim} levels"] + sub.provenance
            if sub.exact:
                return CapacityCertificate("ExactByReduction", sub.value, prov)
            if sub.kind == "LowerBound":
                return CapacityCertificate("LowerBound", sub.value, prov)

    if _depth < _MAX_DEPTH:
        pinned = _try_axis_sandwich(tm, tol_border, tol_psd, _depth)
        if pinned is not None:
            return pinned
        pinned = _try_monotone_pin(tm, tol_border, tol_psd, _depth)
        if pinned is not None:
            return pinned

    diag_val, _ = max_diagonal_coherent_info(tm)
    lb = max(diag_val, _noiseless_log2(tm), best_capacity_witness(tm))
    if lb > 0.0:
        return CapacityCertificate(
            "LowerBound", lb,
            ["max of diagonal coherent information, noiseless-subspace "
             "dimension, and the analytic positivity witness"])
    return CapacityCertificate("Unknown", None, ["no positive bound found"])


def _try_axis_sandwich(tm: TransitionMatrix, tol_border: float, tol_psd: float,
                       _depth: int) -> Optional[CapacityCertificate]:
    """Exact value by matching the degradable border and the complete-damping
    border along one decay entry, with a monotone connecting path."""
    d = tm.dim
    for (j, i) in sorted(tm.decays):
        gji = float(tm.gamma[j, i])
        gjj = float(tm.gamma[j, j])
        if gji <= 1e-12 or gjj <= 1e-12:
            continue
        if not _deg_ok(tm.with_decay(j, i, 0.0), tol_psd):
            continue
        t_border = _bisect_predicate(
            lambda t: _deg_ok(tm.with_decay(j, i, t), tol_psd), 0.0, gji)
        tm_lo = tm.with_decay(j, i, t_border)
        tm_hi = tm.with_decay(j, i, gji + gjj)
        sub = certify_capacity(tm_hi, tol_border, tol_psd, _depth + 1)
        if not sub.exact or sub.value is None:
            continue
        v_low, _ = max_diagonal_coherent_info(tm_lo)
        if abs(v_low - sub.value) > tol_border:
            continue
        if not _monotone_axis(tm, j, i):
            if not (_axis_cert_ok(tm_lo, tm, tol_psd)
                    and _axis_cert_ok(tm, tm_hi, tol_psd)):
                continue
        return CapacityCertificate(
            "ExactByRegionExtension", v_low,
            [f"axis ({j}->{i}): degradable border at {t_border:.9f} "
             f"(value {v_low:.9f}) matches the complete-damping border "
             f"(value {sub.value:.9f}); path monotone"])
    return None


def _try_monotone_pin(tm: TransitionMatrix, tol_border: float, tol_psd: float,
                      _depth: int) -> Optional[CapacityCertificate]:
    """Exact value by pinning: decrease an always-monotone entry to the last
    point that is exactly certifiable (upper bound U) and compare with an
    independent lower bound L; |U - L| <= tol pins the capacity."""
    diag_val, _ = max_diagonal_coherent_info(tm)
    lower = max(diag_val, _noiseless_log2(tm), best_capacity_witness(tm))
    if lower <= 0.0:
        return None
    decays = sorted(tm.decays)
    for (j, i) in decays:
        if not _monotone_axis(tm, j, i):
            continue
        gji = float(tm.gamma[j, i])
        if gji <= 1e-9:
            continue
        for (j2, i2) in decays:
            if (j2, i2) == (j, i):
                continue

            def pred(t):
                return _deg_ok(tm.with_decay(j, i, t).with_decay(j2, i2, 0.0),
                               tol_psd)

            if pred(gji) or not pred(0.0):
                continue
            t_star = _bisect_predicate(pred, 0.0, gji)
            if t_star >= gji - 1e-9:
                continue
            sub = certify_capacity(tm.with_decay(j, i, t_star),
                                   tol_border, tol_psd, _depth + 1)
            if not sub.exact or sub.value is None:
                continue
            if abs(sub.value - lower) <= tol_border:
                return CapacityCertificate(
                    "ExactByRegionExtension", sub.value,
                    [f"monotone decrease of ({j}->{i}) to {t_star:.9f} gives "
                     f"exact upper bound {sub.value:.9f}; lower bound "
                     f"{lower:.9f} matches"])
    return None


# ---------------------------------------------------------------------------
# 3-level slice verification

def mad3_acge_verification(gamma10: float, grid_step: float = 0.05,
                           iterations: int = 3,
                           k_grid: Optional[List[float]] = None) -> dict:
    """Iterate the connecting-channel construction on the 3-level slice at
    fixed gamma10: at step n the PSD region of the connecting Choi must be
    omega21 <= 1 - k/2^(n+1), extending the certified-equal-capacity region;
    the certified value is adc_capacity(gamma10), cross-checked against the
    diagonal maximum at the degradable edge point (gamma21=0, gamma20=1/2)."""
    from .structure import connecting_choi
    if not (0.0 <= gamma10 <= 0.5):
        raise ConditionViolatedError(f"gamma10={gamma10} outside [0, 0.5]")
    q = adc_capacity(gamma10)
    if k_grid is None:
        k_grid = [round(1.0 + 0.1 * t, 10) for t in range(10)]
    omegas = np.arange(0.0, 1.0 + 1e-12, grid_step)
    steps = []
    for n in range(iterations + 1):
        g21 = 1.0 - 2.0 ** (-n)
        k_checks = []
        for k in k_grid:
            bound = 1.0 - k / 2.0 ** (n + 1)
            mismatches = 0
            for w in omegas:
                c = connecting_choi(g21, float(w), k)
                lo = float(np.linalg.eigvalsh((c + c.conj().T) / 2)[0])
                psd = lo >= -1e-7 * max(1.0, float(np.max(np.abs(c))))
                expected = (g21 <= w + 1e-12) and (w <= bound + 1e-12)
                if psd != expected and min(abs(w - bound), abs(w - g21)) > grid_step:
                    mismatches += 1
            k_checks.append({"k": k, "analytic_bound": bound,
                             "mismatches": mismatches})
        steps.append({"n": n, "gamma21": g21, "k_checks": k_checks})
    certified_omega = 1.0 - 2.0 ** (-(iterations + 1))
    edge = TransitionMatrix(3, {(1, 0): gamma10, (2, 0): 0.5})
    edge_val, _ = max_diagonal_coherent_info(edge)
    edge_deg = is_degradable(edge).degradable
    slice_points = [float(w) for w in omegas if w <= certified_omega + 1e-12]
    return {
        "gamma10": gamma10,
        "certificate_value": q,
        "certified_omega_max": certified_omega,
        "slice_points": slice_points,
        "steps": steps,
        "crosscheck": {
            "edge_point": {"gamma21": 0.0, "gamma20": 0.5},
            "edge_degradable": edge_deg,
            "edge_diagonal_max": edge_val,
            "matches": bool(abs(edge_val - q) <= 1e-6),
        },
    }
