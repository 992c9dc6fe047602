import numpy as np
import pytest

from wydlab.errors import InputError, KernelViolationError, ParameterError
from wydlab.superop import (
    ModularData,
    ab_linear_apply,
    modular_apply,
    mult_op,
    resolvent_apply,
)


def rand_pd(d, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return g @ g.conj().T + 1e-3 * np.eye(d)


def rand_mat(d, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def test_mult_op_actions():
    a = rand_mat(3, 0)
    x = rand_mat(3, 1)
    assert np.allclose(mult_op("left", a)(x), a @ x)
    assert np.allclose(mult_op("right", a)(x), x @ a)


def test_mult_op_dense_agrees_with_action():
    a = rand_mat(3, 2)
    op = mult_op("left", a)
    x = rand_mat(3, 3)
    dense = op.to_dense()
    assert np.allclose((dense @ x.reshape(-1)).reshape(3, 3), a @ x)


def test_mult_op_bad_side():
    with pytest.raises(InputError):
        mult_op("middle", np.eye(2))


def test_modular_apply_identity_function():
    a = rand_pd(3, 4)
    b = rand_pd(3, 5)
    x = rand_mat(3, 6)
    # f(x) = x gives A X B^{-1}
    out = modular_apply(a, b, lambda s: s, x)
    assert np.allclose(out, a @ x @ np.linalg.inv(b))


def test_modular_apply_power():
    a = rand_pd(3, 7)
    b = rand_pd(3, 8)
    x = rand_mat(3, 9)
    out = modular_apply(a, b, lambda s: s**2, x)
    assert np.allclose(out, a @ a @ x @ np.linalg.inv(b @ b))


def test_modular_apply_kernel_violation():
    a = rand_pd(2, 10)
    b = np.diag([1.0, 0.0])
    x = np.ones((2, 2), dtype=complex)
    with pytest.raises(KernelViolationError):
        modular_apply(a, b, lambda s: s, x)


def test_modular_apply_supported_x_on_singular_b():
    a = np.diag([2.0, 3.0])
    b = np.diag([1.0, 0.0])
    x = np.diag([1.0, 0.0]).astype(complex)
    out = modular_apply(a, b, lambda s: s, x)
    assert np.allclose(out, np.diag([2.0, 0.0]))


def test_resolvent_solves_sylvester():
    a = rand_pd(4, 11)
    b = rand_pd(4, 12)
    x = rand_mat(4, 13)
    t = 0.37
    y = resolvent_apply(a, b, t, x)
    assert np.allclose(a @ y + t * y @ b, x)


def test_ab_linear_half_powers_compose():
    a = rand_pd(3, 14)
    b = rand_pd(3, 15)
    x = rand_mat(3, 16)
    t = 2.5
    half = ab_linear_apply(a, b, t, x, power=-0.5)
    again = ab_linear_apply(a, b, t, half, power=-0.5)
    assert np.allclose(again, resolvent_apply(a, b, t, x))


def test_ab_linear_requires_positive_t():
    with pytest.raises(ParameterError):
        ab_linear_apply(np.eye(2), np.eye(2), 0.0, np.eye(2))


def test_ab_linear_requires_pd():
    with pytest.raises(InputError):
        ab_linear_apply(np.diag([1.0, 0.0]), np.eye(2), 1.0, np.eye(2))


def test_modular_data_caches_spectra():
    a = np.diag([3.0, 1.0])
    b = np.diag([2.0, 4.0])
    md = ModularData(a, b)
    assert sorted(md.a_eigs) == [1.0, 3.0]
    assert not md.a_kernel.any()
    x = rand_mat(2, 17)
    assert np.allclose(md.assemble(md.overlap(x)), x)
