"""The g-function family and the J_p relative-entropy functionals.

Every functional is computable by at least two independent routes:

* ``direct``    — closed trace formulas with matrix powers/logarithms,
* ``modular``   — spectral double sum over the relative modular operator,
* ``quadrature``— numerical integration of the explicit integral
                  representation of g_p (three branches: p∈(0,1), p=1,
                  p∈(1,2)), applied fiber-wise on the modular spectrum.

For |p−1| < P_ONE_TOL the direct route switches to the logarithmic branch,
because the 1/(p(1−p)) prefactor amplifies cancellation near p = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InputError,
    KernelViolationError,
    NumericalError,
    ParameterError,
)
from .linalg import (
    as_hermitian,
    eig_hermitian,
    kernel_cutoff,
    mat_log,
    mat_power,
    support_projection,
)
from .superop import ModularData

P_ONE_TOL = 1e-6


@dataclass(frozen=True)
class JEvaluation:
    value: float
    route: str
    p: float
    quad_error: float | None = None


def c_p(p: float) -> float:
    """The constant sin(pπ)/π appearing in the integral representation."""
    return math.sin(p * math.pi) / math.pi


# ---------------------------------------------------------------------------
# scalar g family
# ---------------------------------------------------------------------------

def _g_scalar(p: float, x):
    x = np.asarray(x, dtype=float)
    if abs(p - 1.0) < P_ONE_TOL:
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    return (x - np.power(x, p)) / (p * (1.0 - p))


def _g_tilde_scalar(p: float, x):
    x = np.asarray(x, dtype=float)
    if abs(p) < P_ONE_TOL:
        return -np.log(x)
    return (1.0 - np.power(x, p)) / (p * (1.0 - p))


def g_eval(family: str, p: float, x: float) -> float:
    """Evaluate g_p, its dual, or their nonnegative average G_p at x > 0."""
    if x <= 0:
        raise DomainError("g functions are defined for x > 0 only")
    if family == "g":
        if not 0.0 < p <= 2.0:
            raise ParameterError("g_p requires p in (0, 2]")
        return float(_g_scalar(p, x))
    if family == "g_tilde":
        if not -1.0 <= p < 1.0:
            raise ParameterError("the dual family requires p in [-1, 1)")
        return float(_g_tilde_scalar(p, x))
    if family == "G":
        if not 0.0 < p <= 2.0:
            raise ParameterError("G_p requires p in (0, 2]")
        return 0.5 * float(_g_scalar(p, x) + x * _g_scalar(p, 1.0 / x))
    raise InputError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# J_p routes
# ---------------------------------------------------------------------------

def _check_k(k, dim):
    k = np.asarray(k, dtype=complex)
    if k.shape != (dim, dim):
        raise InputError(f"K must be {dim}x{dim}")
    return k


def _support_kernel_guard(a, b):
    """Require ker B ⊆ ker A, i.e. supp A ⊆ supp B (P_B P_A = P_A)."""
    pa = support_projection(a)
    pb = support_projection(b)
    if np.abs(pb @ pa - pa).max(initial=0.0) > 1e-8:
        raise KernelViolationError("ker B is not contained in ker A")


def _j_p_direct(k, a, b, p: float) -> float:
    a = as_hermitian(a)
    b = as_hermitian(b)
    k = _check_k(k, a.shape[0])
    pb = support_projection(b)
    kp = k @ pb  # kernel columns of B never contribute (K√B kills them)
    if abs(p - 1.0) < P_ONE_TOL:
        val = np.trace(kp @ kp.conj().T @ a @ mat_log(a)) - np.trace(
            kp.conj().T @ a @ kp @ mat_log(b)
        )
    elif abs(p - 2.0) < P_ONE_TOL:
        binv = mat_power(b, -1.0)
        val = -0.5 * (
            np.trace(kp.conj().T @ a @ kp) - np.trace(a @ kp @ binv @ kp.conj().T @ a)
        )
    else:
        val = (
            np.trace(kp.conj().T @ a @ kp)
            - np.trace(k.conj().T @ mat_power(a, p) @ k @ mat_power(b, 1.0 - p))
        ) / (p * (1.0 - p))
    return _realize(val)


def _realize(val) -> float:
    val = complex(val)
    if abs(val.imag) > 1e-10 * (1.0 + abs(val.real)):
        raise NumericalError(f"value has a large imaginary residue {val.imag:.3e}")
    return float(val.real)


def _fiber_weights(md: ModularData, k) -> tuple[np.ndarray, np.ndarray]:
    """Fibers x_ij = a_i/b_j and weights |⟨u_i|K√B|v_j⟩|² on supp B columns.

    Kernel-of-A rows carry fiber value x = 0, where every g_p vanishes.
    """
    sqrt_b = np.where(md.b_kernel, 0.0, np.sqrt(np.abs(md.b_eigs)))
    y = md.a_vecs.conj().T @ np.asarray(k, dtype=complex) @ md.b_vecs
    y = y * sqrt_b[None, :]
    weights = np.abs(y) ** 2
    b_safe = np.where(md.b_kernel, 1.0, md.b_eigs)
    fibers = md.a_eigs[:, None] / b_safe[None, :]
    weights[:, md.b_kernel] = 0.0
    return fibers, weights


def _j_p_modular(k, a, b, p: float, g=None) -> float:
    md = ModularData(a, b)
    k = _check_k(k, md.dim)
    fibers, weights = _fiber_weights(md, k)
    mask = weights > 0
    if g is None:
        g = lambda x: _g_scalar(p, x)
    vals = np.zeros_like(fibers)
    pos = mask & (fibers > 0)
    zero = mask & (fibers <= 0)
    if pos.any():
        vals[pos] = g(fibers[pos])
    # x = 0 fibers: g_p(0) = 0 for p in (0, 2].
    vals[zero] = 0.0
    return float(np.sum(vals * weights))


def j_p(k, a, b, p: float, route: str = "direct") -> JEvaluation:
    """The generalized relative entropy J_p(K, A, B) for p ∈ (0, 2]."""
    if not 0.0 < p <= 2.0:
        raise ParameterError(f"p must be in (0, 2], got {p}")
    k_arr = np.asarray(k, dtype=complex)
    if k_arr.shape == (k_arr.shape[0],) * 2 and np.array_equal(
        k_arr, np.eye(k_arr.shape[0])
    ):
        # For K = I, psd inputs are meaningful only when ker B ⊆ ker A.
        _support_kernel_guard(as_hermitian(a), as_hermitian(b))
    if route == "direct":
        return JEvaluation(_j_p_direct(k, a, b, p), "direct", p)
    if route == "modular":
        return JEvaluation(_j_p_modular(k, a, b, p), "modular", p)
    if route == "quadrature":
        return j_p_quadrature(k, a, b, p)
    raise InputError(f"unknown route {route!r}")


def j_tilde_p(k, a, b, p: float) -> JEvaluation:
    """The dual functional; satisfies J_p(K†, B, A) = J̃_{1−p}(K, A, B)."""
    if not -1.0 <= p < 1.0:
        raise ParameterError(f"dual exponent must be in [-1, 1), got {p}")
    val = _j_p_modular(k, a, b, p, g=lambda x: _g_tilde_scalar(p, x))
    return JEvaluation(val, "modular", p)


def relative_entropy(a, b) -> float:
    """H(A, B) = Tr A (log A − log B), requiring ker B ⊆ ker A."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    _support_kernel_guard(a, b)
    return _realize(np.trace(a @ (mat_log(a) - mat_log(b))))


def wyd_skew(k, gamma, p: float) -> float:
    """Skew information −½ Tr [K, γ^p][K, γ^{1−p}] for Hermitian K."""
    gamma = as_hermitian(gamma)
    k = np.asarray(k, dtype=complex)
    if np.abs(k - k.conj().T).max(initial=0.0) > 1e-8 * max(np.abs(k).max(initial=0.0), 1.0):
        raise InputError("K must be Hermitian")
    cp = k @ mat_power(gamma, p) - mat_power(gamma, p) @ k
    cq = k @ mat_power(gamma, 1.0 - p) - mat_power(gamma, 1.0 - p) @ k
    return _realize(-0.5 * np.trace(cp @ cq))


def klein_gap(u, a, b, p: float) -> float:
    """J_p(U, A, B) for unitary U and unit-trace A, B (≥ 0, Klein-type).

    Also verifies the unitary-covariance identity
    J_p(U,A,B) = J_p(I, U†AU, B) = J_p(I, A, UBU†) to 1e-10.
    """
    a = as_hermitian(a)
    b = as_hermitian(b)
    u = _check_k(u, a.shape[0])
    if abs(np.trace(a).real - 1.0) > 1e-8 or abs(np.trace(b).real - 1.0) > 1e-8:
        raise InputError("A and B must have unit trace")
    if np.abs(u @ u.conj().T - np.eye(a.shape[0])).max(initial=0.0) > 1e-10:
        raise InputError("U must be unitary")
    val = _j_p_modular(u, a, b, p)
    eye = np.eye(a.shape[0])
    left = _j_p_modular(eye, u.conj().T @ a @ u, b, p)
    right = _j_p_modular(eye, a, u @ b @ u.conj().T, p)
    scale = 1.0 + abs(val)
    if abs(val - left) > 1e-10 * scale or abs(val - right) > 1e-10 * scale:
        raise NumericalError("unitary covariance of J_p violated")
    return val


# ---------------------------------------------------------------------------
# quadrature route
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_panel(f, lo: float, hi: float) -> np.ndarray:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    s = mid + half * _GL_NODES
    vals = f(s)  # shape (..., nodes)
    return half * np.tensordot(vals, _GL_WEIGHTS, axes=([-1], [0]))


def _adaptive_gl(f, tol: float = 1e-10, max_level: int = 9):
    """Adaptive composite Gauss–Legendre on [0, 1] with a Richardson-style
    error estimate from panel doubling.  ``f`` maps an array of nodes to an
    array of integrand values with the node axis last (vector-valued fibers
    are integrated simultaneously)."""
    coarse = _gl_panel(f, 0.0, 1.0)
    panels = 2
    for _ in range(max_level):
        edges = np.linspace(0.0, 1.0, panels + 1)
        fine = sum(_gl_panel(f, edges[i], edges[i + 1]) for i in range(panels))
        err = np.abs(fine - coarse).max(initial=0.0)
        # the tolerance is relative to the integrand scale: large fibers make
        # the integral large without degrading the weighted final value
        scale = max(float(np.abs(fine).max(initial=0.0)), 1.0)
        if err <= tol * scale:
            return fine, float(err / scale)
        coarse = fine
        panels *= 2
    return coarse, float(err / scale)


def _g_quad(p: float, x: np.ndarray, tol: float = 1e-10):
    """g_p(x) for an array of positive fibers, from the explicit integral
    representations; returns (values, error estimate)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))[:, None]
    if abs(p - 1.0) < P_ONE_TOL:
        # ∫_0^∞ (x²/(x+t) − 1 + t/(x+t)) dt/(1+t), head [0,1] + tail t=1/s
        def head(s):
            t = s[None, :]
            return (x * x - x) / ((x + t) * (1.0 + t))

        def tail(s):
            s = s[None, :]
            return (x * x - x) / ((x * s + 1.0) * (s + 1.0))

        h, eh = _adaptive_gl(head, tol)
        t_, et = _adaptive_gl(tail, tol)
        return (h + t_).ravel(), eh + et
    if p < 1.0:
        # I(x) = ∫_0^∞ (t/(x+t) − 1) t^{p−1} dt = −∫ x t^{p−1}/(x+t) dt
        # head: t = s^{1/p} absorbs t^{p−1}; tail: t = 1/s then s = u^{1/(1−p)}
        def head(s):
            t = s[None, :] ** (1.0 / p)
            return -(x / (x + t)) / p

        def tail(u):
            s = u[None, :] ** (1.0 / (1.0 - p))
            return -(x / (x * s + 1.0)) / (1.0 - p)

        h, eh = _adaptive_gl(head, tol)
        t_, et = _adaptive_gl(tail, tol)
        integral = (h + t_).ravel()
        vals = (x.ravel() + c_p(p) * integral) / (p * (1.0 - p))
        return vals, (eh + et) * abs(c_p(p) / (p * (1.0 - p)))
    if p < 2.0:
        # I2(x) = ∫_0^∞ x²/(x+t) t^{p−2} dt
        # head: t = s^{1/(p−1)}; tail: t = 1/s then s = u^{1/(2−p)}
        def head(s):
            t = s[None, :] ** (1.0 / (p - 1.0))
            return (x * x / (x + t)) / (p - 1.0)

        def tail(u):
            s = u[None, :] ** (1.0 / (2.0 - p))
            return (x * x / (x * s + 1.0)) / (2.0 - p)

        h, eh = _adaptive_gl(head, tol)
        t_, et = _adaptive_gl(tail, tol)
        integral = (h + t_).ravel()
        vals = (x.ravel() - c_p(p - 1.0) * integral) / (p * (1.0 - p))
        return vals, (eh + et) * abs(c_p(p - 1.0) / (p * (1.0 - p)))
    raise ParameterError("quadrature route covers p in (0, 2) only")


def j_p_quadrature(k, a, b, p: float) -> JEvaluation:
    """J_p via numerical integration of the explicit spectral measures."""
    if not 0.0 < p < 2.0:
        raise ParameterError(f"quadrature route requires p in (0, 2), got {p}")
    md = ModularData(a, b)
    k = _check_k(k, md.dim)
    fibers, weights = _fiber_weights(md, k)
    mask = (weights > 0) & (fibers > 0)
    if not mask.any():
        return JEvaluation(0.0, "quadrature", p, 0.0)
    vals, err = _g_quad(p, fibers[mask])
    total_err = float(err * weights[mask].sum())
    if total_err > 1e-4:
        raise NumericalError("quadrature failed to converge", estimate=total_err)
    value = float(np.sum(vals * weights[mask]))
    return JEvaluation(value, "quadrature", p, total_err)
