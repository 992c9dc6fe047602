"""Left/right multiplication operators, the relative modular operator, and
resolvents acting on d×d matrices.

The primary representation is the spectral double sum over eigenpairs of A
and B; dense d²×d² matrices (matrix-unit basis, column index varying fastest)
are materialized only on request for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InputError, KernelViolationError, ParameterError
from .linalg import as_hermitian, eig_hermitian, kernel_cutoff


@dataclass
class Superoperator:
    dim: int
    action: Callable[[np.ndarray], np.ndarray]
    _dense: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise InputError(f"expected a {self.dim}x{self.dim} matrix")
        return self.action(x)

    def to_dense(self) -> np.ndarray:
        """d²×d² matrix of the action in the matrix-unit basis E_{ij}."""
        if self._dense is None:
            d = self.dim
            cols = []
            for i in range(d):
                for j in range(d):
                    e = np.zeros((d, d), dtype=complex)
                    e[i, j] = 1.0
                    cols.append(self.action(e).reshape(-1))
            self._dense = np.array(cols).T
        return self._dense


def mult_op(side: str, a) -> Superoperator:
    """L_A (side='left': X ↦ AX) or R_A (side='right': X ↦ XA)."""
    a = np.asarray(a, dtype=complex)
    if side == "left":
        return Superoperator(a.shape[0], lambda x: a @ x)
    if side == "right":
        return Superoperator(a.shape[0], lambda x: x @ a)
    raise InputError(f"side must be 'left' or 'right', got {side!r}")


class ModularData:
    """Cached spectral data of a pair (A, B) for modular-operator actions.

    Holds eigenpairs (a_i, u_i) of A and (b_j, v_j) of B with kernel indices
    flagged; the overlap matrix ⟨u_i|X|v_j⟩ is computed per application.
    """

    def __init__(self, a, b):
        a = as_hermitian(a)
        b = as_hermitian(b)
        if a.shape != b.shape:
            raise InputError("A and B must have the same dimension")
        wa, ua = eig_hermitian(a)
        wb, vb = eig_hermitian(b)
        cut_a = kernel_cutoff(wa)
        cut_b = kernel_cutoff(wb)
        if wa.min() < -cut_a or wb.min() < -cut_b:
            raise InputError("A and B must be positive semidefinite")
        self.dim = a.shape[0]
        self.a_eigs = np.where(wa > cut_a, wa, 0.0)
        self.b_eigs = np.where(wb > cut_b, wb, 0.0)
        self.a_vecs = ua
        self.b_vecs = vb
        self.a_kernel = self.a_eigs == 0.0
        self.b_kernel = self.b_eigs == 0.0

    def overlap(self, x) -> np.ndarray:
        """Matrix of coefficients ⟨u_i|X|v_j⟩."""
        return self.a_vecs.conj().T @ np.asarray(x, dtype=complex) @ self.b_vecs

    def assemble(self, coeffs) -> np.ndarray:
        """Σ_ij coeffs[i, j] |u_i⟩⟨v_j|."""
        return self.a_vecs @ coeffs @ self.b_vecs.conj().T

    def fiber_values(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """f(a_i / b_j) on the joint support (entries off the support are 0)."""
        ratio = np.where(
            self.b_kernel[None, :], 1.0, self.a_eigs[:, None] / np.where(self.b_kernel, 1.0, self.b_eigs)[None, :]
        )
        vals = np.zeros((self.dim, self.dim))
        mask = ~self.a_kernel[:, None] & ~self.b_kernel[None, :]
        if mask.any():
            vals[mask] = f(ratio[mask])
        return vals


def modular_apply(a, b, f: Callable[[np.ndarray], np.ndarray], x) -> np.ndarray:
    """f(Δ_AB)(X) with Δ_AB = L_A R_B^{-1}, via the spectral double sum.

    Raises :class:`KernelViolationError` if X has a nonzero overlap with a
    kernel eigenvector of B (the modular operator is undefined there).
    """
    md = a if isinstance(a, ModularData) else ModularData(a, b)
    y = md.overlap(x)
    scale = max(np.abs(y).max(initial=0.0), 1.0)
    if md.b_kernel.any() and np.abs(y[:, md.b_kernel]).max(initial=0.0) > 1e-10 * scale:
        raise KernelViolationError("X meets the kernel of B with a nonzero overlap")
    if md.a_kernel.any():
        rows = np.abs(y[md.a_kernel][:, ~md.b_kernel]).max(initial=0.0)
        if rows > 1e-10 * scale:
            # x = 0 fiber: only meaningful if f extends continuously to 0.
            try:
                f0 = float(f(np.array([0.0]))[0])
            except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
                raise KernelViolationError(
                    "X meets the kernel of A and f is undefined at 0"
                ) from exc
            if not np.isfinite(f0):
                raise KernelViolationError("X meets the kernel of A and f(0) is not finite")
    coeffs = md.fiber_values(f) * y
    # Kernel-of-A rows with finite f(0) contribute f(0)·overlap.
    if md.a_kernel.any():
        try:
            f0 = float(f(np.array([0.0]))[0])
        except Exception:
            f0 = 0.0
        if np.isfinite(f0) and f0 != 0.0:
            block = np.zeros((md.dim, md.dim))
            block[md.a_kernel[:, None] & ~md.b_kernel[None, :]] = f0
            coeffs = coeffs + block * y
    return md.assemble(coeffs)


def ab_linear_apply(a, b, t: float, x, power: float = -1.0) -> np.ndarray:
    """(L_A + t R_B)^power (X) computed spectrally.

    ``power=-1`` solves AY + tYB = X; ``power=±1/2`` gives the square-root
    factors used in the Schwarz-inequality residuals.  Requires A, B positive
    definite and t > 0 so that every coefficient a_i + t·b_j is positive.
    """
    if t <= 0:
        raise ParameterError("t must be positive")
    md = a if isinstance(a, ModularData) else ModularData(a, b)
    if md.a_kernel.any() or md.b_kernel.any():
        raise InputError("A and B must be positive definite")
    denom = md.a_eigs[:, None] + t * md.b_eigs[None, :]
    return md.assemble(denom**power * md.overlap(x))


def resolvent_apply(a, b, t: float, x) -> np.ndarray:
    """Solve AY + tYB = X for positive definite A, B and t > 0."""
    return ab_linear_apply(a, b, t, x, power=-1.0)
