"""Factor a unitary into two-level rotations and a diagonal phase layer.

Entries below the diagonal are eliminated column by column; each elimination
contributes one factor touching exactly two basis states.  The product of
the emitted factors, followed by the residual phase diagonal, reproduces the
input.  A 2x2 input is kept whole as a single factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUnitaryError

ROUNDTRIP_TOL = 1e-10
OMIT_TOL = 1e-12
INPUT_TOL = 1e-8


@dataclass(frozen=True)
class TwoLevelFactor:
    """A unitary differing from the identity only on basis states i < j."""

    i: int
    j: int
    core: np.ndarray

    def embed(self, dim: int) -> np.ndarray:
        mat = np.eye(dim, dtype=np.complex128)
        mat[self.i, self.i] = self.core[0, 0]
        mat[self.i, self.j] = self.core[0, 1]
        mat[self.j, self.i] = self.core[1, 0]
        mat[self.j, self.j] = self.core[1, 1]
        return mat


@dataclass(frozen=True)
class TwoLevelDecomposition:
    """u = factors[0] @ factors[1] @ ... @ diag(phases)."""

    dim: int
    factors: tuple[TwoLevelFactor, ...]
    phases: np.ndarray

    def recompose(self) -> np.ndarray:
        mat = np.diag(self.phases).astype(np.complex128)
        for factor in reversed(self.factors):
            mat = factor.embed(self.dim) @ mat
        return mat


def _is_identity(core: np.ndarray, tol: float) -> bool:
    return bool(np.abs(core - np.eye(2)).max() <= tol)


def decompose_block(u: np.ndarray, tol: float = INPUT_TOL) -> TwoLevelDecomposition:
    """Two-level factorization of a unitary matrix.

    Factors come out in product order (leftmost first), at most
    dim*(dim-1)/2 of them; exact zeros and near-identity rotations are
    dropped.  Residual per-state phases are returned explicitly rather than
    folded into the last factor.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"need a square matrix, got shape {u.shape}")
    dim = u.shape[0]
    dev = np.abs(u.conj().T @ u - np.eye(dim)).max()
    if dev > tol:
        raise NonUnitaryError(f"block is not unitary: deviation {dev:.3e}")

    if dim == 1:
        phase = u[0, 0] / abs(u[0, 0])
        return TwoLevelDecomposition(1, (), np.array([phase]))
    if dim == 2:
        if _is_identity(u, OMIT_TOL):
            return TwoLevelDecomposition(2, (), np.ones(2, dtype=np.complex128))
        factor = TwoLevelFactor(0, 1, u.copy())
        return TwoLevelDecomposition(2, (factor,), np.ones(2, dtype=np.complex128))

    work = u.copy()
    factors: list[TwoLevelFactor] = []
    for n in range(dim - 1):
        for m in range(n + 1, dim):
            b = work[m, n]
            if b == 0:
                continue
            a = work[n, n]
            r = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            g = np.array(
                [[np.conj(a) / r, np.conj(b) / r], [-b / r, a / r]],
                dtype=np.complex128,
            )
            work[[n, m], :] = g @ work[[n, m], :]
            work[m, n] = 0.0
            core = g.conj().T
            if _is_identity(core, OMIT_TOL):
                continue
            factors.append(TwoLevelFactor(n, m, core))

    diag = np.diag(work).copy()
    mags = np.abs(diag)
    if np.abs(mags - 1.0).max() > 1e-6:
        raise NonUnitaryError(
            "elimination left a non-phase diagonal; input was not unitary"
        )
    return TwoLevelDecomposition(dim, tuple(factors), diag / mags)
