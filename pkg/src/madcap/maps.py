"""Generic linear maps on matrices, represented by signed (pseudo-)Kraus stages.

A map is a chain of stages applied in order; each stage is a list of
``(sign, operator)`` pairs acting as ``theta -> sum_k s_k A_k theta A_k†``.
Channels have all signs +1; inverse maps carry explicit minus signs.
Keeping the chain unexpanded matches the constructive definitions and avoids
blowing up the term count; Choi matrices and superoperators are exported
densely on demand.
"""
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatchError

Stage = List[Tuple[float, np.ndarray]]


class LinearMap:
    def __init__(self, stages: Sequence[Stage]):
        if not stages:
            raise DimensionMismatchError("a LinearMap needs at least one stage")
        self.stages = [[(float(s), np.asarray(a, dtype=complex)) for s, a in st]
                       for st in stages]
        self.in_dim = self.stages[0][0][1].shape[1]
        self.out_dim = self.stages[-1][0][1].shape[0]
        prev = self.in_dim
        for st in self.stages:
            rows = {a.shape[0] for _, a in st}
            cols = {a.shape[1] for _, a in st}
            if len(rows) != 1 or len(cols) != 1 or cols.pop() != prev:
                raise DimensionMismatchError("inconsistent stage dimensions")
            prev = st[0][1].shape[0]

    @classmethod
    def from_kraus(cls, ops: Sequence[np.ndarray],
                   signs: Sequence[float] | None = None) -> "LinearMap":
        if signs is None:
            signs = [1.0] * len(ops)
        return cls([[(s, a) for s, a in zip(signs, ops)]])

    @classmethod
    def identity(cls, d: int) -> "LinearMap":
        return cls.from_kraus([np.eye(d)])

    def __call__(self, mat: np.ndarray) -> np.ndarray:
        out = np.asarray(mat, dtype=complex)
        if out.shape != (self.in_dim, self.in_dim):
            raise DimensionMismatchError(
                f"map expects {self.in_dim}x{self.in_dim} input, got {out.shape}")
        for stage in self.stages:
            out = sum(s * (a @ out @ a.conj().T) for s, a in stage)
        return out

    def then(self, nxt: "LinearMap") -> "LinearMap":
        """Composition: apply self first, then ``nxt``."""
        if nxt.in_dim != self.out_dim:
            raise DimensionMismatchError("composition dimension mismatch")
        return LinearMap(self.stages + nxt.stages)

    def choi(self, normalized: bool = True) -> np.ndarray:
        """(Id ⊗ map)(|Ω⟩⟨Ω|), divided by d_in when ``normalized``.

        Subsystem order: input copy first, output second.
        """
        d, do = self.in_dim, self.out_dim
        c = np.zeros((d * do, d * do), dtype=complex)
        basis = np.eye(d)
        for i in range(d):
            for j in range(d):
                eij = np.outer(basis[i], basis[j])
                block = self(eij)
                c[i * do:(i + 1) * do, j * do:(j + 1) * do] = block
        if normalized:
            c /= d
        return c

    def superoperator(self) -> np.ndarray:
        """Dense d_out² × d_in² matrix acting on row-major vectorized inputs."""
        d, do = self.in_dim, self.out_dim
        s = np.zeros((do * do, d * d), dtype=complex)
        for m in range(d):
            for n in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[m, n] = 1.0
                s[:, m * d + n] = self(e).reshape(-1)
        return s

    def is_trace_preserving(self, tol: float = 1e-12) -> bool:
        d = self.in_dim
        for m in range(d):
            for n in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[m, n] = 1.0
                expected = 1.0 if m == n else 0.0
                if abs(np.trace(self(e)) - expected) > tol:
                    return False
        return True
