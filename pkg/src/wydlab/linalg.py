"""Dense Hermitian linear algebra with explicit kernel/support conventions.

All matrices are plain complex numpy arrays.  ``as_hermitian`` is the single
entry point that validates and symmetrizes inputs; every matrix function goes
through a full eigendecomposition (dimensions here are small, and the spectral
form is needed anyway for modular-operator actions).

Eigenvalues whose magnitude is below ``PSD_TOL * max(spectral radius, 1)`` are
treated as exact kernel directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    CommutationError,
    DimensionError,
    DomainError,
    InputError,
    KernelViolationError,
)

PSD_TOL = 1e-10
HERM_TOL = 1e-8


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors


@dataclass(frozen=True)
class PsdClass:
    kind: str  # "positive-definite" | "positive-semidefinite" | "indefinite"
    support: np.ndarray
    min_eigenvalue: float


def as_hermitian(a, tol: float = HERM_TOL) -> np.ndarray:
    """Validate a square matrix as Hermitian and return (A + A†)/2.

    Raises :class:`InputError` for non-finite entries, non-square shapes, or
    asymmetry beyond ``tol`` relative to the matrix scale.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise InputError("matrix has non-finite entries")
    scale = max(np.abs(a).max(initial=0.0), 1.0)
    asym = np.abs(a - a.conj().T).max(initial=0.0)
    if asym > tol * scale:
        raise InputError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return 0.5 * (a + a.conj().T)


def eig_hermitian(a) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_hermitian(a)
    w, v = np.linalg.eigh(a)
    return SpectralDecomposition(w, v)


def kernel_cutoff(eigenvalues: np.ndarray, psd_tol: float = PSD_TOL) -> float:
    """Absolute threshold below which an eigenvalue counts as kernel."""
    lam_max = float(np.abs(eigenvalues).max(initial=0.0))
    return psd_tol * max(lam_max, 1.0)


def classify_psd(a, psd_tol: float = PSD_TOL) -> PsdClass:
    w, v = eig_hermitian(a)
    cut = kernel_cutoff(w, psd_tol)
    min_eig = float(w.min())
    keep = w > cut
    support = (v[:, keep] @ v[:, keep].conj().T)
    support = 0.5 * (support + support.conj().T)
    if min_eig < -cut:
        kind = "indefinite"
    elif np.all(keep):
        kind = "positive-definite"
    else:
        kind = "positive-semidefinite"
    return PsdClass(kind, support, min_eig)


def _require_psd(w: np.ndarray, cut: float):
    if w.min() < -cut:
        raise InputError(
            f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})"
        )


def mat_func(a, f: Callable[[float], float], kernel_value: float = 0.0) -> np.ndarray:
    """Spectral function V f(λ) V† of a psd matrix.

    Eigenvalues in the kernel band are mapped to ``kernel_value``; ``f`` is
    only evaluated on strictly positive eigenvalues.  A ``DomainError`` is
    raised if ``f`` fails on a positive eigenvalue.
    """
    w, v = eig_hermitian(a)
    cut = kernel_cutoff(w)
    _require_psd(w, cut)
    fw = np.empty_like(w)
    for i, lam in enumerate(w):
        if lam <= cut:
            fw[i] = kernel_value
        else:
            try:
                fw[i] = f(lam)
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise DomainError(f"f undefined at eigenvalue {lam}: {exc}") from exc
            if not math.isfinite(fw[i]):
                raise DomainError(f"f({lam}) is not finite")
    out = (v * fw) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def mat_power(a, p: float) -> np.ndarray:
    """Support-restricted power A^p (0 on the kernel, also for p < 0)."""
    return mat_func(a, lambda x: x**p, kernel_value=0.0)


def mat_log(a) -> np.ndarray:
    """log A on the support of A, 0 on the kernel."""
    return mat_func(a, math.log, kernel_value=0.0)


def mat_imag_power(a, t: float) -> np.ndarray:
    """A^{it} on the support of A, 0 on the kernel (not Hermitian)."""
    w, v = eig_hermitian(a)
    cut = kernel_cutoff(w)
    _require_psd(w, cut)
    phases = np.where(w > cut, np.exp(1j * t * np.log(np.where(w > cut, w, 1.0))), 0.0)
    return (v * phases) @ v.conj().T


def support_projection(b) -> np.ndarray:
    """Orthogonal projection onto (ker B)^⊥ for psd B."""
    return classify_psd(b).support


def commuting_quotient(a, d) -> np.ndarray:
    """A D^{-1} for commuting psd A, D with ker D ⊆ ker A.

    Computed on the joint eigenbasis as lim_{ε→0} √A (D+εI)^{-1} √A, i.e.
    eigenvalue-wise division on the support of A and 0 on ker A.
    """
    a = as_hermitian(a)
    d = as_hermitian(d)
    if a.shape != d.shape:
        raise DimensionError("A and D must have the same shape")
    comm = a @ d - d @ a
    scale = max(np.abs(a).max(initial=0.0) * np.abs(d).max(initial=0.0), 1.0)
    if np.abs(comm).max(initial=0.0) > 1e-8 * scale:
        raise CommutationError("A and D do not commute")
    # Joint eigenbasis: diagonalize A + c·D for a generic combination, then
    # read both spectra in that basis.
    wa = np.linalg.eigvalsh(a)
    wd = np.linalg.eigvalsh(d)
    cut_a = kernel_cutoff(wa)
    cut_d = kernel_cutoff(wd)
    _require_psd(wa, cut_a)
    _require_psd(wd, cut_d)
    _, v = np.linalg.eigh(a + math.pi * d)
    alpha = np.real(np.einsum("ij,jk,ki->i", v.conj().T, a, v))
    delta = np.real(np.einsum("ij,jk,ki->i", v.conj().T, d, v))
    quot = np.zeros_like(alpha)
    for i in range(alpha.size):
        if alpha[i] > cut_a:
            if delta[i] <= cut_d:
                raise KernelViolationError("ker D is not contained in ker A")
            quot[i] = alpha[i] / delta[i]
    out = (v * quot) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def kron(a, b) -> np.ndarray:
    """Tensor product of two matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def ptrace(a, dims, trace_out) -> np.ndarray:
    """Partial trace of a multipartite matrix.

    ``dims`` lists the factor dimensions and ``trace_out`` the factor indices
    to trace over; the remaining factors keep their original order.
    """
    a = np.asarray(a, dtype=complex)
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise DimensionError(f"matrix shape {a.shape} does not match dims {dims}")
    trace_out = sorted(set(int(i) for i in trace_out))
    if any(i < 0 or i >= len(dims) for i in trace_out):
        raise DimensionError("trace_out index out of range")
    n = len(dims)
    t = a.reshape(dims + dims)
    for k, axis in enumerate(trace_out):
        # earlier traces removed k row axes and k column axes, all of which
        # precede both members of the current pair
        t = np.trace(t, axis1=axis - k, axis2=axis + n - 2 * k)
    keep = [d for i, d in enumerate(dims) if i not in trace_out]
    dk = int(np.prod(keep)) if keep else 1
    return t.reshape(dk, dk)


def partial_trace(a12, dims, over: str = "first") -> np.ndarray:
    """Partial trace of a bipartite matrix over the first or second factor."""
    d1, d2 = dims
    if over == "first":
        return ptrace(a12, (d1, d2), [0])
    if over == "second":
        return ptrace(a12, (d1, d2), [1])
    raise InputError(f"over must be 'first' or 'second', got {over!r}")


def matrix_to_json(a) -> dict:
    """Serialize a matrix to the shared JSON schema {dim, re, im}."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("only square matrices are serialized")
    return {
        "dim": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the shared matrix JSON schema, rejecting malformed payloads."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimensionError(
            f"matrix JSON arrays have shape {re.shape}/{im.shape}, expected ({dim}, {dim})"
        )
    return re + 1j * im
