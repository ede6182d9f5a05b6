"""Dense complex-matrix primitives: eigenvalues, entropy, partial trace, PSD tests.

All entropies are base-2 (bits). Everything works on plain numpy arrays in
64-bit complex arithmetic; the intended scale is small (d <= 6 levels).
"""
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidStateError, NonHermitianError

HERMITICITY_RTOL = 1e-10
EIG_FLOOR = 1e-12


def _norm_inf(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def check_hermitian(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, _norm_inf(m))
    if _norm_inf(m - m.conj().T) > rtol * scale:
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    return m


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    m = check_hermitian(m)
    return np.linalg.eigvalsh(m)


def check_density_matrix(rho: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"state must be square, got shape {rho.shape}")
    if _norm_inf(rho - rho.conj().T) > max(atol, 1e-12 * max(1.0, _norm_inf(rho))):
        raise InvalidStateError("state is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
        raise InvalidStateError("state trace differs from 1")
    if np.linalg.eigvalsh(rho)[0] < -1e-9:
        raise InvalidStateError("state has a significantly negative eigenvalue")
    return rho


def shannon_entropy(p: np.ndarray) -> float:
    """H(p) in bits; entries below 1e-12 are treated as exact zeros."""
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_FLOOR]
    if p.size == 0:
        return 0.0
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: np.ndarray, validate: bool = True) -> float:
    """S(rho) = -tr rho log2 rho in bits."""
    if validate:
        rho = check_density_matrix(rho)
    else:
        rho = np.asarray(rho, dtype=complex)
    return shannon_entropy(np.linalg.eigvalsh(rho))


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order; the result lives
    on the kept subsystems in their original order.
    """
    m = np.asarray(m, dtype=complex)
    dims = list(dims)
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise DimensionMismatchError(
            f"matrix shape {m.shape} incompatible with dims {dims}")
    keep = sorted(keep)
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionMismatchError(f"keep={keep} out of range for {len(dims)} subsystems")
    nsub = len(dims)
    t = m.reshape(dims + dims)
    # Trace out the discarded subsystems one by one, highest index first so
    # the axis bookkeeping stays simple.
    for ax in sorted(set(range(nsub)) - set(keep), reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + cur)
    dkeep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(dkeep, dkeep)


def is_psd(m: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff min eigenvalue >= -tol * max(1, ||m||_inf)."""
    m = check_hermitian(m)
    lo = np.linalg.eigvalsh(m)[0]
    return bool(lo >= -tol * max(1.0, _norm_inf(m)))


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state G G† / tr(G G†) with complex Gaussian G."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real
