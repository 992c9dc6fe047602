"""Generalized Pauli (shift/clock) operators and twirling identities.

The d² unitaries W = X^j Z^k average any matrix to its trace times the
identity, which converts partial traces into convex combinations of unitary
conjugations.  The enumeration order is fixed lexicographically in (j, k) for
reproducible reports; only the average is semantically relevant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, InputError
from .linalg import kron, partial_trace


@dataclass(frozen=True)
class PauliFamily:
    dim: int
    ops: tuple  # d² unitaries, ordered X^j Z^k with (j, k) lexicographic


@lru_cache(maxsize=None)
def generalized_paulis(d: int) -> PauliFamily:
    """Shift X (|e_k⟩ ↦ |e_{k+1 mod d}⟩), clock Z = diag(e^{i2πk/d}), and
    their d² monomials X^j Z^k."""
    if d < 2:
        raise InputError("dimension must be at least 2")
    shift = np.zeros((d, d), dtype=complex)
    for k in range(d):
        shift[(k + 1) % d, k] = 1.0
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    ops = []
    xj = np.eye(d, dtype=complex)
    for _ in range(d):
        zk = np.eye(d, dtype=complex)
        for _ in range(d):
            ops.append(xj @ zk)
            zk = zk @ clock
        xj = xj @ shift
    return PauliFamily(d, tuple(ops))


def twirl(a, family: PauliFamily | None = None) -> np.ndarray:
    """(1/d) Σ_n W_n A W_n† = (Tr A)·I."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    fam = family or generalized_paulis(d)
    acc = np.zeros_like(a)
    for w in fam.ops:
        acc += w @ a @ w.conj().T
    return acc / d


def twirl_first_factor(a12, d1: int, d2: int, u=None) -> np.ndarray:
    """(1/d1) Σ_n (W_n U† ⊗ I) A12 (W_n U† ⊗ I)† = I_1 ⊗ Tr_1 A12.

    An optional unitary U on the first factor corresponds to a change of
    basis and leaves the result unchanged.
    """
    a12 = np.asarray(a12, dtype=complex)
    if a12.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"A12 must be {d1 * d2}x{d1 * d2}")
    fam = generalized_paulis(d1)
    eye2 = np.eye(d2, dtype=complex)
    acc = np.zeros_like(a12)
    for w in fam.ops:
        wu = w if u is None else w @ np.asarray(u, dtype=complex).conj().T
        big = kron(wu, eye2)
        acc += big @ a12 @ big.conj().T
    return acc / d1


def second_factor_twirl_blocks(a12, d1: int, d2: int) -> list[np.ndarray]:
    """Blocks (I ⊗ W_n) A12 (I ⊗ W_n)† over the d2² Paulis of factor two."""
    a12 = np.asarray(a12, dtype=complex)
    if a12.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"A12 must be {d1 * d2}x{d1 * d2}")
    fam = generalized_paulis(d2)
    eye1 = np.eye(d1, dtype=complex)
    out = []
    for w in fam.ops:
        big = kron(eye1, w)
        out.append(big @ a12 @ big.conj().T)
    return out


def twirl_residual(d: int, a) -> float:
    """‖(1/d) Σ_n W_n A W_n† − (Tr A)·I‖_max, the completeness defect."""
    a = np.asarray(a, dtype=complex)
    return float(np.abs(twirl(a) - np.trace(a) * np.eye(d)).max(initial=0.0))


def first_factor_twirl_residual(a12, d1: int, d2: int, u=None) -> float:
    """Deviation of the first-factor twirl from I_1 ⊗ Tr_1 A12."""
    target = kron(np.eye(d1), partial_trace(a12, (d1, d2), "first"))
    return float(np.abs(twirl_first_factor(a12, d1, d2, u) - target).max(initial=0.0))
