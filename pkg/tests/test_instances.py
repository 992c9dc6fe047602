import numpy as np
import pytest

from wydlab.errors import InputError
from wydlab.instances import (
    MAX_TOTAL_DIM,
    random_contraction,
    random_density,
    random_family,
    random_instance,
    random_pd,
    random_tripartite,
    random_unitary,
)


def test_density_properties():
    for i in range(5):
        rho = random_density(4, 0, i)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-14


def test_pd_well_conditioned():
    a = random_pd(5, 1)
    assert np.linalg.eigvalsh(a).min() >= 1e-3 - 1e-12


def test_unitary_residual():
    u = random_unitary(4, 2)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() < 1e-12


def test_contraction_norm():
    k = random_contraction(4, 3)
    assert np.linalg.norm(k, ord=2) <= 1.0


def test_determinism_bytes():
    a = random_density(3, 7, 2)
    b = random_density(3, 7, 2)
    assert a.tobytes() == b.tobytes()
    assert random_unitary(3, 7).tobytes() == random_unitary(3, 7).tobytes()


def test_seed_and_index_vary():
    assert not np.allclose(random_pd(3, 0), random_pd(3, 1))
    assert not np.allclose(random_pd(3, 0, 0), random_pd(3, 0, 1))


def test_family_shapes():
    fam = random_family(3, 4, seed=5)
    assert len(fam) == 4
    for a, b in fam:
        assert a.shape == (3, 3) and b.shape == (3, 3)
        assert np.linalg.eigvalsh(a).min() > 0


def test_tripartite_dimension_guard():
    with pytest.raises(InputError):
        random_tripartite((4, 4, 5), 0)  # 80 > MAX_TOTAL_DIM
    assert MAX_TOTAL_DIM == 64


def test_dispatch_matches_direct_calls():
    assert np.array_equal(random_instance("density", (3,), 9), random_density(3, 9))
    assert np.array_equal(random_instance("unitary", (4,), 9), random_unitary(4, 9))
    a12, b12, structure = random_instance("structure_state", (2, 1, 2), 9)
    d2 = sum(dl * dr for dl, dr in structure.blocks)
    assert a12.shape == (2 * d2, 2 * d2)
    assert np.linalg.eigvalsh(b12).min() >= -1e-12


def test_unknown_kind():
    with pytest.raises(InputError):
        random_instance("qubit", (2,), 0)
