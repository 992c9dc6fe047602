"""End-to-end acceptance gate.

Each test prints a single pass/fail line so the whole gate can be read at a
glance from the pytest -s output.
"""

import time

import numpy as np
import pytest

from wydlab import equality as eq
from wydlab import inequalities as ineq
from wydlab.entropy import j_p, j_p_quadrature, klein_gap
from wydlab.inequalities import InstanceFamily, entropy_vn
from wydlab.instances import (
    random_contraction,
    random_density,
    random_family,
    random_pd,
    random_tripartite,
    random_unitary,
)
from wydlab.linalg import kron, partial_trace
from wydlab.pauli import first_factor_twirl_residual, twirl_residual
from wydlab.suites import SuiteConfig, run_suite
from wydlab.superop import ab_linear_apply

P_GRID = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75)


def announce(name: str, ok: bool, detail: str):
    print(f"\n{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_route_agreement():
    start = time.monotonic()
    worst_mod = 0.0
    worst_quad = 0.0
    for i in range(200):
        d = 2 + i % 3
        a = random_pd(d, 1, i)
        b = random_pd(d, 2, i)
        k = random_contraction(d, 3, i)
        for p in P_GRID:
            direct = j_p(k, a, b, p, route="direct").value
            modular = j_p(k, a, b, p, route="modular").value
            quad = j_p_quadrature(k, a, b, p).value
            scale = 1.0 + abs(direct)
            worst_mod = max(worst_mod, abs(direct - modular) / scale)
            worst_quad = max(worst_quad, abs(direct - quad) / scale)
    elapsed = time.monotonic() - start
    ok = worst_mod <= 1e-8 and worst_quad <= 1e-6 and elapsed < 120.0
    announce(
        "route agreement",
        ok,
        f"direct/modular {worst_mod:.2e}, quadrature {worst_quad:.2e}, {elapsed:.1f}s",
    )


def test_joint_convexity():
    worst = -np.inf
    count = 0
    for d in (2, 3, 4):
        for m in (2, 3):
            for i in range(200):
                fam = InstanceFamily(
                    random_contraction(d, 10, i), random_family(d, m, 11, i)
                )
                a_list = [a for a, _ in fam.pairs]
                a12_list = [random_pd(2 * d, 12, 1000 * m + i + j) for j in range(m)]
                reps = []
                for p in P_GRID:
                    reps.append(ineq.subadditivity_gap("j", fam, p))
                    reps.append(ineq.subadditivity_gap("j_tilde", fam, p - 1.0))
                    reps.append(ineq.upsilon_hat_subadditivity_gap(fam.K, a_list, p))
                    reps.append(
                        ineq.phi_hat_subadditivity_gap(
                            p, [[aj, bj] for aj, bj in fam.pairs]
                        )
                    )
                    reps.append(ineq.psi_hat_subadditivity_gap(p, a12_list, (2, d)))
                    # regime-valid two-exponent points derived from p
                    reps.append(ineq.lieb_ando_gap(fam.K, fam, p / 2, 1.0 - p / 2))
                    reps.append(
                        ineq.lieb_ando_gap(fam.K, fam, 1.0 + p / 2, 1.0 + p / 4)
                    )
                triples = [
                    (aj, bj, random_contraction(d, 13, i + 7 * j))
                    for j, (aj, bj) in enumerate(fam.pairs)
                ]
                reps.append(ineq.schwarz_gap(triples, 1.0))
                reps.append(
                    ineq.p2_convexity_gap(
                        [(aj, random_contraction(d, 14, i + 7 * j))
                         for j, aj in enumerate(a_list)]
                    )
                )
                for rep in reps:
                    count += 1
                    worst = max(
                        worst, -rep.gap / (1.0 + abs(rep.lhs) + abs(rep.rhs))
                    )
                    if worst > 1e-9:
                        announce("joint convexity", False,
                                 f"violation {worst:.2e} at d={d} m={m} i={i}")
    announce("joint convexity", worst <= 1e-9,
             f"{count} gaps, worst signed defect {worst:.2e}")


def test_monotonicity_and_ssa():
    worst = -np.inf
    worst_ent = 0.0
    dims3 = (2, 2, 3)
    for i in range(200):
        a12 = random_pd(6, 20, i)
        b12 = random_pd(6, 21, i)
        k2 = random_contraction(3, 22, i)
        v1 = random_unitary(2, 23, i)
        a123 = random_tripartite(dims3, 24, i)
        for p in P_GRID:
            reps = [
                ineq.partial_trace_monotonicity_gap(k2, v1, a12, b12, p, (2, 3)),
                ineq.ssa_gap(a123, p, dims3),
                ineq.triple_minkowski_gap(a123, p, dims3),
            ]
            reps.extend(ineq.psi_monotonicity_gap(a123, p, dims3))
            for rep in reps:
                worst = max(worst, -rep.gap / (1.0 + abs(rep.lhs) + abs(rep.rhs)))
        # independent entropic cross-check of the p = 1 gap
        rep1 = ineq.ssa_gap(a123, 1.0, dims3)
        a_12 = partial_trace(a123, (4, 3), "second")
        a_23 = partial_trace(a123, (2, 6), "first")
        a_2 = partial_trace(a_12, (2, 2), "first")
        ent = (
            entropy_vn(a_12) + entropy_vn(a_23) - entropy_vn(a_2) - entropy_vn(a123)
        )
        worst_ent = max(worst_ent, abs(rep1.gap - ent))
    ok = worst <= 1e-9 and worst_ent <= 1e-10
    announce(
        "monotonicity and strong subadditivity",
        ok,
        f"worst signed defect {worst:.2e}, p=1 entropic mismatch {worst_ent:.2e}",
    )


def test_equality_p_independence():
    p_five = (0.3, 0.7, 1.0, 1.3, 1.7)
    d = 4
    q = random_unitary(d, 30)
    rng = np.random.default_rng([30, 1])
    diag = lambda: np.diag(rng.uniform(0.2, 2.0, d))
    a = q @ diag() @ q.conj().T
    b = q @ diag() @ q.conj().T
    fam = eq.construct_equality_family(a, b, [q @ diag() @ q.conj().T for _ in range(2)])
    worst_fam = 0.0
    eye = np.eye(d)
    for p in p_five:
        total = j_p(eye, *fam.sums(), p).value
        parts = sum(j_p(eye, aj, bj, p).value for aj, bj in fam.pairs)
        worst_fam = max(worst_fam, abs(total - parts))

    conds = eq.check_equality_conditions(eye, fam)
    facts = eq.check_factorization_conditions(fam)
    spec = eq.SubalgebraSpec("first", (2, 3))
    sigma = random_density(3, 31)
    suff = eq.sufficiency_check(
        spec, [kron(random_pd(2, 32, i), sigma) for i in range(3)]
    )
    conditions_ok = (
        conds.all_pass and conds.coherent
        and facts.all_pass and facts.coherent
        and suff.all_pass and suff.coherent
    )

    a12, b12, st = eq.random_structure_state((2, 1, 2, 2, 1), 33)
    d2 = sum(dl * dr for dl, dr in st.blocks)
    worst_struct = 0.0
    for p in p_five:
        rep = ineq.partial_trace_monotonicity_gap(
            np.eye(d2), np.eye(2), a12, b12, p, (2, d2)
        )
        worst_struct = max(worst_struct, abs(rep.gap))

    # perturb the left factor on the B side only: the structure is broken
    # and a genuinely positive gap must reappear
    rng2 = np.random.default_rng([33, 2])
    lf = random_pd(4, 34)
    ar = random_pd(2, 35)
    br = random_pd(2, 36)
    h = rng2.standard_normal((4, 4))
    lf_pert = lf + 1e-2 * (h + h.T) / 2
    a12p = eq.construct_structure_state([(lf, ar, ar)], 2)[0]
    b12p = eq.construct_structure_state([(lf_pert, br, br)], 2)[0]
    reopened = max(
        ineq.partial_trace_monotonicity_gap(
            np.eye(4), np.eye(2), a12p, b12p, p, (2, 4)
        ).gap
        for p in p_five
    )

    ok = (
        worst_fam <= 1e-9
        and conditions_ok
        and worst_struct <= 1e-9
        and reopened >= 1e-6
    )
    announce(
        "equality p-independence",
        ok,
        f"family dev {worst_fam:.2e}, structure dev {worst_struct:.2e}, "
        f"conditions {'coherent' if conditions_ok else 'incoherent'}, "
        f"perturbed gap {reopened:.2e}",
    )


def test_variational_identity():
    worst_arg = 0.0
    worst_obj = 0.0
    for p in (1.25, 1.5, 1.75):
        for i in range(20):
            d = 2 + i % 2
            k = random_contraction(d, 40, i)
            a = random_pd(d, 41, i)
            rep = ineq.upsilon_variational_check(k, a, p)
            worst_arg = max(worst_arg, rep.params["argmin_dev"])
            worst_obj = max(worst_obj, rep.params["objective_dev"])
    ok = worst_arg <= 1e-5 and worst_obj <= 1e-6
    announce(
        "variational identity",
        ok,
        f"argmin dev {worst_arg:.2e}, objective dev {worst_obj:.2e}",
    )


def test_twirl_identities():
    worst = 0.0
    rng = np.random.default_rng(50)
    for d in (2, 3, 4, 5):
        for _ in range(100):
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            worst = max(worst, twirl_residual(d, m))
    worst_first = 0.0
    for d1, d2 in ((2, 2), (2, 3), (3, 2), (2, 4)):
        for i in range(100):
            a12 = random_pd(d1 * d2, 51, 100 * d1 + 10 * d2 + i)
            worst_first = max(worst_first, first_factor_twirl_residual(a12, d1, d2))
    ok = worst <= 1e-12 and worst_first <= 1e-12
    announce(
        "twirl identities",
        ok,
        f"full residual {worst:.2e}, first-factor residual {worst_first:.2e}",
    )


def test_schwarz_residual_identity():
    worst_id = 0.0
    worst_eq = 0.0
    for i in range(50):
        d = 2 + i % 3
        triples = [
            (random_pd(d, 60, i + 7 * j), random_pd(d, 61, i + 7 * j),
             random_contraction(d, 62, i + 7 * j))
            for j in range(3)
        ]
        for t in (0.37, 1.0, 2.5):
            rep = ineq.schwarz_gap(triples, t)
            worst_id = max(
                worst_id,
                rep.params["identity_dev"] / (1.0 + abs(rep.lhs) + abs(rep.rhs)),
            )
            # exact equality inputs X_j = A_j Λ + t Λ B_j for a common Λ
            lam = random_contraction(d, 63, i)
            eq_triples = [
                (aj, bj, ab_linear_apply(aj, bj, t, lam, power=1.0))
                for aj, bj, _ in triples
            ]
            rep_eq = ineq.schwarz_gap(eq_triples, t)
            worst_eq = max(worst_eq, abs(rep_eq.gap) / (1.0 + abs(rep_eq.lhs)))
        # p = 2 reduction: equality at X_j = A_j T
        t_mat = random_contraction(d, 64, i)
        rep2 = ineq.p2_convexity_gap([(aj, aj @ t_mat) for aj, _, _ in triples])
        worst_eq = max(worst_eq, abs(rep2.gap) / (1.0 + abs(rep2.lhs)))
    ok = worst_id <= 1e-9 and worst_eq <= 1e-10
    announce(
        "residual certificate identity",
        ok,
        f"identity dev {worst_id:.2e}, equality-input gap {worst_eq:.2e}",
    )


def test_klein_positivity():
    worst = -np.inf
    for i in range(500):
        d = 2 + i % 3
        rho = random_density(d, 70, i)
        sig = random_density(d, 71, i)
        u = random_unitary(d, 72, i)
        for p in P_GRID:
            worst = max(worst, -klein_gap(u, rho, sig, p))
    worst_eq = 0.0
    for i in range(50):
        d = 2 + i % 3
        rho = random_density(d, 73, i)
        u = random_unitary(d, 74, i)
        sig = u.conj().T @ rho @ u  # A = U B U*, the exact equality point
        for p in P_GRID:
            worst_eq = max(worst_eq, abs(klein_gap(u, rho, sig, p)))
    ok = worst <= 1e-9 and worst_eq <= 1e-10
    announce(
        "Klein-type positivity",
        ok,
        f"worst signed value {worst:.2e}, equality-point value {worst_eq:.2e}",
    )


def test_block_identity():
    worst = 0.0
    for dims in ((2, 3), (3, 2), (2, 2)):
        for i in range(20):
            a12 = random_pd(dims[0] * dims[1], 80, 10 * dims[0] + dims[1] + i)
            for p in (0.5, 1.5):
                out = ineq.psi_block_identity(a12, dims, p)
                worst = max(worst, out["deviation"] / (1.0 + abs(out["lhs"])))
    announce("block identity", worst <= 1e-9, f"worst deviation {worst:.2e}")


def test_determinism():
    cfg = dict(seed=11, dims=(2, 3), p_grid=(0.5, 1.0, 1.5), trials=2)
    r1 = run_suite(SuiteConfig(**cfg))
    r2 = run_suite(SuiteConfig(**cfg))
    identical = r1.to_json() == r2.to_json()
    gaps_identical = all(
        (a["gap"] is None and b["gap"] is None) or a["gap"] == b["gap"]
        for a, b in zip(r1.rows, r2.rows)
    )
    announce(
        "determinism",
        identical and gaps_identical and len(r1.rows) > 0,
        f"{len(r1.rows)} rows bit-identical across repeated runs",
    )
