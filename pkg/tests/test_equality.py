import numpy as np
import pytest

from wydlab.entropy import j_p
from wydlab.equality import (
    BlockStructure,
    ConditionVerdicts,
    SubalgebraSpec,
    check_commuting_factorization,
    check_cor_ssas,
    check_equality_conditions,
    check_factorization_conditions,
    check_phi_psi_equality,
    conditional_expectation,
    construct_cor_ssas_family,
    construct_equality_family,
    construct_ssa_structure_state,
    construct_structure_state,
    dilation_embedding_deviation,
    petz_recovery,
    random_structure_state,
    reduce_unitary_K,
    sufficiency_check,
    unitary_dilation,
    wedderburn_decompose,
)
from wydlab.errors import (
    CommutationError,
    ContractionError,
    InputError,
)
from wydlab.inequalities import InstanceFamily, partial_trace_monotonicity_gap, ssa_gap
from wydlab.instances import (
    random_contraction,
    random_family,
    random_pd,
    random_unitary,
)
from wydlab.linalg import kron, partial_trace


def scaled_family(k, a, b, weights):
    """A_j = w_j A, B_j = w_j B: the canonical equality case for general K."""
    pairs = [(w * a, w * b) for w in weights]
    return InstanceFamily(k, pairs)


class TestConditionVerdicts:
    def test_coherence_flag(self):
        good = ConditionVerdicts({"x": 1e-12, "y": 1e-10})
        assert good.all_pass and good.coherent
        mixed = ConditionVerdicts({"x": 1e-12, "y": 1.0})
        assert not mixed.all_pass and not mixed.coherent


class TestGeneralKConditions:
    def test_scaled_family_passes_all(self):
        k = random_contraction(3, 300)
        a = random_pd(3, 301)
        b = random_pd(3, 302)
        fam = scaled_family(k, a, b, (0.3, 0.7))
        out = check_equality_conditions(k, fam)
        assert set(out.deviations) == {
            "additivity", "resolvent", "modular_flow", "log_intertwining"
        }
        assert out.all_pass and out.coherent

    def test_generic_family_fails_all(self):
        k = random_contraction(3, 310)
        fam = InstanceFamily(k, random_family(3, 2, 311))
        out = check_equality_conditions(k, fam)
        assert not any(out.verdicts.values())
        assert out.coherent


class TestEqualityFamily:
    def test_construct_and_detect(self):
        # commuting diagonal factors produce an additive K = I family
        a = np.diag([0.5, 1.0, 2.0])
        b = np.diag([1.5, 0.7, 0.4])
        d_list = [np.diag([1.0, 2.0, 0.5]), np.diag([0.5, 1.0, 3.0])]
        fam = construct_equality_family(a, b, d_list)
        assert len(fam.pairs) == 2
        out = check_factorization_conditions(fam)
        assert out.all_pass and out.coherent

    def test_noncommuting_factor_rejected(self):
        a = random_pd(3, 320)
        with pytest.raises(CommutationError):
            construct_equality_family(a, np.eye(3), [random_pd(3, 321)])

    def test_generic_family_detected_as_unequal(self):
        fam = InstanceFamily(np.eye(3), random_family(3, 2, 322))
        out = check_factorization_conditions(fam)
        assert not any(out.verdicts.values())

    def test_requires_identity_k(self):
        fam = InstanceFamily(random_contraction(3, 323), random_family(3, 2, 324))
        with pytest.raises(InputError):
            check_factorization_conditions(fam)


class TestConditionalExpectation:
    def test_trace_preserving_and_idempotent(self):
        spec = SubalgebraSpec("first", (2, 3))
        a = random_pd(6, 330)
        e = conditional_expectation(spec, a)
        assert np.trace(e).real == pytest.approx(np.trace(a).real, abs=1e-12)
        assert np.allclose(conditional_expectation(spec, e), e, atol=1e-12)

    def test_second_factor(self):
        spec = SubalgebraSpec("second", (2, 3))
        a = random_pd(6, 331)
        e = conditional_expectation(spec, a)
        target = kron(np.eye(2) / 2, partial_trace(a, (2, 3), "first"))
        assert np.allclose(e, target, atol=1e-12)

    def test_bad_factor_name(self):
        with pytest.raises(InputError):
            SubalgebraSpec("third", (2, 3))

    def test_recovery_fixes_reference(self):
        spec = SubalgebraSpec("first", (2, 2))
        q = random_pd(4, 332)
        e_q = conditional_expectation(spec, q)
        assert np.allclose(petz_recovery(spec, q, e_q), q, atol=1e-10)


class TestSufficiency:
    def test_shared_second_factor_is_sufficient(self):
        # Q_j = A_j x C with a common C: the first factor carries all the
        # distinguishing information, so its subalgebra is sufficient
        spec = SubalgebraSpec("first", (2, 2))
        c = random_pd(2, 340)
        q_list = [kron(random_pd(2, 341 + i), c) for i in range(3)]
        out = sufficiency_check(spec, q_list)
        assert set(out.deviations) == {"recovery", "modular_flow", "j_p_preservation"}
        assert out.all_pass and out.coherent

    def test_generic_states_not_sufficient(self):
        spec = SubalgebraSpec("first", (2, 2))
        q_list = [random_pd(4, 350 + i) for i in range(3)]
        out = sufficiency_check(spec, q_list)
        assert not any(out.verdicts.values())
        assert out.coherent


class TestDilation:
    def test_block_unitary(self):
        k = random_contraction(3, 360)
        big = unitary_dilation(k)
        assert big.shape == (6, 6)
        assert np.allclose(big[:3, :3], k, atol=1e-14)
        assert np.allclose(big @ big.conj().T, np.eye(6), atol=1e-10)

    def test_norm_guard(self):
        with pytest.raises(ContractionError):
            unitary_dilation(2.0 * np.eye(2))

    def test_embedding_preserves_j_p(self):
        k = random_contraction(2, 361)
        a = random_pd(2, 362)
        b = random_pd(2, 363)
        for p in (0.5, 1.0, 1.5):
            assert dilation_embedding_deviation(k, a, b, p) < 1e-9


class TestUnitaryReduction:
    def test_values_preserved(self):
        u = random_unitary(3, 370)
        fam = InstanceFamily(u, random_family(3, 2, 371))
        reduced = reduce_unitary_K(u, fam)
        assert np.allclose(reduced.K, np.eye(3), atol=1e-14)
        for (a, b), (a2, b2) in zip(fam.pairs, reduced.pairs):
            orig = j_p(u, a, b, 1.3).value
            red = j_p(np.eye(3), a2, b2, 1.3).value
            assert orig == pytest.approx(red, abs=1e-9 * (1 + abs(orig)))

    def test_rejects_contraction(self):
        k = 0.5 * random_contraction(3, 372)
        with pytest.raises(InputError):
            reduce_unitary_K(k, InstanceFamily(k, random_family(3, 1, 373)))


class TestStructureStates:
    def test_monotonicity_is_tight(self):
        a12, b12, structure = random_structure_state((2, 1, 2, 2, 1), 380)
        d2 = sum(dl * dr for dl, dr in structure.blocks)
        rep = partial_trace_monotonicity_gap(
            np.eye(d2), np.eye(2), a12, b12, 0.7, (2, d2)
        )
        assert abs(rep.gap) < 1e-9 * (1 + abs(rep.lhs))

    def test_p_independence_of_equality(self):
        a12, b12, structure = random_structure_state((2, 2, 1), 381)
        d2 = sum(dl * dr for dl, dr in structure.blocks)
        for p in (0.25, 0.7, 1.0, 1.3, 1.75):
            rep = partial_trace_monotonicity_gap(
                np.eye(d2), np.eye(2), a12, b12, p, (2, d2)
            )
            assert abs(rep.gap) < 1e-9 * (1 + abs(rep.lhs))

    def test_perturbation_reopens_the_gap(self):
        a12, b12, structure = random_structure_state((2, 1, 2), 382)
        d2 = sum(dl * dr for dl, dr in structure.blocks)
        rng = np.random.default_rng(383)
        h = rng.standard_normal((2 * d2, 2 * d2))
        a_pert = a12 + 1e-2 * (h + h.T) / 2 + 1e-1 * np.eye(2 * d2)
        rep = partial_trace_monotonicity_gap(
            np.eye(d2), np.eye(2), a_pert, b12, 0.7, (2, d2)
        )
        assert rep.gap > 1e-6

    def test_determinism(self):
        x1 = random_structure_state((2, 1, 2), 384)[0]
        x2 = random_structure_state((2, 1, 2), 384)[0]
        assert x1.tobytes() == x2.tobytes()
        assert not np.allclose(x1, random_structure_state((2, 1, 2), 385)[0])

    def test_ssa_structure_is_tight(self):
        rng = np.random.default_rng(386)

        def pd(n):
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            return g @ g.conj().T + 1e-2 * np.eye(n)

        blocks = [(pd(2 * 1), pd(2 * 2)), (pd(2 * 2), pd(1 * 2))]
        a123, dims, structure = construct_ssa_structure_state(blocks, 2, 2)
        assert dims == (2, 4, 2)
        assert structure.blocks == [(1, 2), (2, 1)]
        for p in (0.5, 1.0, 1.5):
            rep = ssa_gap(a123, p, dims)
            assert abs(rep.gap) < 1e-8 * (1 + abs(rep.lhs))

    def test_commuting_factorization_check(self):
        f_l = random_pd(4, 390)  # on H1 x H2 with d1 = d2 = 2
        f_r = random_pd(4, 391)  # on H2 x H3
        # commuting product exists when both act on disjoint slots of a
        # diagonal middle register; use diagonal factors for an exact case
        f_l = np.diag(np.diag(f_l).real).astype(complex)
        f_r = np.diag(np.diag(f_r).real).astype(complex)
        a123 = kron(f_l, np.eye(2)) @ kron(np.eye(2), f_r)
        out = check_commuting_factorization(a123, f_l, f_r, (2, 2, 2))
        assert out["verdict"]
        bad = check_commuting_factorization(
            a123 + 0.1 * np.eye(8), f_l, f_r, (2, 2, 2)
        )
        assert not bad["verdict"]


class TestCorSSAS:
    def test_split_family_is_tight(self):
        d1, d2 = 2, 2
        # A commuting with D_j x I: build A block diagonal over the first
        # factor's eigenbasis of the diagonal D_j
        a = np.zeros((4, 4), dtype=complex)
        a[:2, :2] = random_pd(2, 400)
        a[2:, 2:] = random_pd(2, 401)
        d_list = [np.diag([1.0, 2.0]), np.diag([0.5, 1.5])]
        a_list = construct_cor_ssas_family(a, d_list, (d1, d2))
        assert np.allclose(sum(a_list), a, atol=1e-12)
        out = check_cor_ssas(a_list, d_list, (d1, d2))
        assert out.all_pass and out.coherent

    def test_generic_split_fails(self):
        a_list = [random_pd(4, 402), random_pd(4, 403)]
        d_list = [np.diag([1.0, 2.0]), np.diag([0.5, 1.5])]
        out = check_cor_ssas(a_list, d_list, (2, 2))
        assert not out.all_pass


class TestPhiPsiEquality:
    def test_orthogonal_supports_are_additive(self):
        # families supported on orthogonal subspaces add exactly
        e1 = np.zeros((4, 4))
        e1[:2, :2] = np.eye(2)
        e2 = np.eye(4) - e1

        def embed(m, proj):
            out = np.zeros((4, 4), dtype=complex)
            if proj is e1:
                out[:2, :2] = m
            else:
                out[2:, 2:] = m
            return out

        phi_families = [
            [embed(random_pd(2, 410), e1), embed(random_pd(2, 411), e1)],
            [embed(random_pd(2, 412), e2), embed(random_pd(2, 413), e2)],
        ]
        psi_families = [
            kron(np.diag([1.0, 0.0]), random_pd(2, 414)),
            kron(np.diag([0.0, 1.0]), random_pd(2, 415)),
        ]
        out = check_phi_psi_equality(
            phi_families, psi_families, dims=(2, 2), p_samples=(0.5, 1.5)
        )
        assert out["phi_hat"]["verdict"]
        assert out["psi_hat"]["verdict"]

    def test_generic_families_deviate(self):
        phi_families = [
            [random_pd(3, 420), random_pd(3, 421)],
            [random_pd(3, 422), random_pd(3, 423)],
        ]
        out = check_phi_psi_equality(phi_families, p_samples=(0.5, 1.5))
        assert not out["phi_hat"]["verdict"]

    def test_dims_required_for_bipartite(self):
        with pytest.raises(InputError):
            check_phi_psi_equality(psi_families=[random_pd(4, 424)])


def assemble_generators(blocks, seed, count=2):
    """Hermitian generators of ⊕_n I_L x B(H_R) conjugated by a random U."""
    d = sum(dl * dr for dl, dr in blocks)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    u, _ = np.linalg.qr(g)
    gens = []
    for _ in range(count):
        full = np.zeros((d, d), dtype=complex)
        offset = 0
        for dl, dr in blocks:
            h = rng.standard_normal((dr, dr)) + 1j * rng.standard_normal((dr, dr))
            x = (h + h.conj().T) / 2
            nb = dl * dr
            full[offset : offset + nb, offset : offset + nb] = np.kron(np.eye(dl), x)
            offset += nb
        gens.append(u @ full @ u.conj().T)
    return gens


class TestWedderburn:
    @pytest.mark.parametrize(
        "blocks",
        [
            [(3, 1)],
            [(1, 3)],
            [(2, 1), (1, 1)],
            [(2, 2)],
            [(1, 2), (2, 1)],
        ],
        ids=lambda b: "-".join(f"{l}x{r}" for l, r in b),
    )
    def test_recovers_block_dimensions(self, blocks):
        gens = assemble_generators(blocks, seed=sum(17 * l + r for l, r in blocks))
        structure = wedderburn_decompose(gens, seed=5)
        assert isinstance(structure, BlockStructure)
        assert sorted(structure.blocks) == sorted(blocks)
        d = sum(dl * dr for dl, dr in blocks)
        u = structure.basis
        assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-9)

    def test_identity_only_generator(self):
        structure = wedderburn_decompose([np.eye(3)], seed=1)
        assert structure.blocks == [(3, 1)]

    def test_requires_a_generator(self):
        with pytest.raises(InputError):
            wedderburn_decompose([])
