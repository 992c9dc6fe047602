"""Seeded random instance generation (Ginibre-based ensembles).

Every draw is a pure function of (seed, kind, dims, index), so identical
configurations reproduce identical matrices bit for bit.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

KINDS = (
    "density",
    "pd",
    "unitary",
    "contraction",
    "family",
    "tripartite",
    "structure_state",
)

MAX_TOTAL_DIM = 64


def _rng(seed: int, kind: str, dims, index: int) -> np.random.Generator:
    if kind not in KINDS:
        raise InputError(f"unknown instance kind {kind!r}")
    key = [int(seed), KINDS.index(kind), int(index)] + [int(d) for d in dims]
    return np.random.default_rng(key)


def _check_dims(dims):
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise InputError("dimensions must be positive")
    if int(np.prod(dims)) > MAX_TOTAL_DIM:
        raise InputError(f"total dimension {np.prod(dims)} exceeds {MAX_TOTAL_DIM}")
    return dims


def ginibre(rng: np.random.Generator, d: int) -> np.ndarray:
    """Complex standard Gaussian d×d matrix."""
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_density(d: int, seed: int, index: int = 0) -> np.ndarray:
    """GG†/Tr(GG†): unit trace, positive semidefinite (a.s. definite)."""
    (d,) = _check_dims((d,))
    g = ginibre(_rng(seed, "density", (d,), index), d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pd(d: int, seed: int, index: int = 0) -> np.ndarray:
    """GG† + 1e-3·I, a well-conditioned positive definite matrix."""
    (d,) = _check_dims((d,))
    g = ginibre(_rng(seed, "pd", (d,), index), d)
    return g @ g.conj().T + 1e-3 * np.eye(d)


def random_unitary(d: int, seed: int, index: int = 0) -> np.ndarray:
    """Haar-like unitary: QR of a Ginibre matrix with phase fixing."""
    (d,) = _check_dims((d,))
    g = ginibre(_rng(seed, "unitary", (d,), index), d)
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases[None, :]


def random_contraction(d: int, seed: int, index: int = 0) -> np.ndarray:
    """Random matrix rescaled to operator norm at most 1."""
    g = ginibre(_rng(seed, "contraction", (d,), index), d)
    norm = np.linalg.norm(g, ord=2)
    return g / (norm * (1.0 + 1e-12))


def random_family(d: int, m: int, seed: int, index: int = 0):
    """m pairs of positive definite matrices (A_j, B_j)."""
    dims = _check_dims((d,))
    rng = _rng(seed, "family", dims + (m,), index)
    pairs = []
    for _ in range(m):
        ga = ginibre(rng, d)
        gb = ginibre(rng, d)
        pairs.append(
            (ga @ ga.conj().T + 1e-3 * np.eye(d), gb @ gb.conj().T + 1e-3 * np.eye(d))
        )
    return pairs


def random_tripartite(dims, seed: int, index: int = 0) -> np.ndarray:
    """Positive definite matrix on a tripartite tensor product."""
    dims = _check_dims(dims)
    total = int(np.prod(dims))
    g = ginibre(_rng(seed, "tripartite", dims, index), total)
    return g @ g.conj().T + 1e-3 * np.eye(total)


def random_instance(kind: str, dims, seed: int, index: int = 0):
    """Dispatch by kind; deterministic per (seed, kind, dims, index)."""
    dims = _check_dims(dims)
    if kind == "density":
        return random_density(dims[0], seed, index)
    if kind == "pd":
        return random_pd(dims[0], seed, index)
    if kind == "unitary":
        return random_unitary(dims[0], seed, index)
    if kind == "contraction":
        return random_contraction(dims[0], seed, index)
    if kind == "family":
        d, m = dims
        return random_family(d, m, seed, index)
    if kind == "tripartite":
        return random_tripartite(dims, seed, index)
    if kind == "structure_state":
        from .equality import random_structure_state

        return random_structure_state(dims, seed, index)
    raise InputError(f"unknown instance kind {kind!r}")
