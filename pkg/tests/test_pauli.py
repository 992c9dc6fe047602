import numpy as np
import pytest

from wydlab.errors import InputError
from wydlab.instances import random_pd, random_unitary
from wydlab.linalg import kron, partial_trace
from wydlab.pauli import (
    first_factor_twirl_residual,
    generalized_paulis,
    second_factor_twirl_blocks,
    twirl,
    twirl_first_factor,
    twirl_residual,
)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_family_is_unitary(d):
    fam = generalized_paulis(d)
    assert len(fam.ops) == d * d
    for w in fam.ops:
        assert np.allclose(w @ w.conj().T, np.eye(d), atol=1e-12)


def test_shift_and_clock_relation():
    d = 3
    fam = generalized_paulis(d)
    x = fam.ops[d]  # X^1 Z^0 in (j, k) lexicographic order
    z = fam.ops[1]  # X^0 Z^1
    omega = np.exp(2j * np.pi / d)
    assert np.allclose(z @ x, omega * x @ z)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_twirl_is_trace_times_identity(d):
    a = random_pd(d, d)
    out = twirl(a)
    assert np.allclose(out, np.trace(a) * np.eye(d), atol=1e-12)
    assert twirl_residual(d, a) < 1e-12


def test_twirl_on_nonhermitian():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(twirl(a), np.trace(a) * np.eye(3), atol=1e-12)


def test_first_factor_twirl():
    d1, d2 = 3, 2
    a12 = random_pd(d1 * d2, 1)
    out = twirl_first_factor(a12, d1, d2)
    target = kron(np.eye(d1), partial_trace(a12, (d1, d2), "first"))
    assert np.allclose(out, target, atol=1e-12)
    assert first_factor_twirl_residual(a12, d1, d2) < 1e-12


def test_first_factor_twirl_unitary_invariance():
    d1, d2 = 2, 3
    a12 = random_pd(d1 * d2, 2)
    u = random_unitary(d1, 3)
    plain = twirl_first_factor(a12, d1, d2)
    rotated = twirl_first_factor(a12, d1, d2, u=u)
    assert np.allclose(plain, rotated, atol=1e-12)


def test_second_factor_blocks_sum_to_twirl():
    d1, d2 = 2, 3
    a12 = random_pd(d1 * d2, 4)
    blocks = second_factor_twirl_blocks(a12, d1, d2)
    assert len(blocks) == d2 * d2
    total = sum(blocks) / d2
    target = kron(partial_trace(a12, (d1, d2), "second"), np.eye(d2))
    assert np.allclose(total, target, atol=1e-11)


def test_dimension_guard():
    with pytest.raises(InputError):
        generalized_paulis(1)
