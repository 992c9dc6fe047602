"""Constructors and detectors for the equality conditions: modular-flow
identities, factorizations, sufficiency, unitary dilation, and the
direct-sum/tensor structure of equality states.

Condition checks are identities in continuous parameters (t, p); a few
generic samples suffice numerically.  The default samples are irrationally
spaced to avoid accidental periodicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .entropy import j_p
from .errors import (
    CommutationError,
    ContractionError,
    DimensionError,
    InputError,
    KernelViolationError,
    NumericalError,
)
from .linalg import (
    as_hermitian,
    eig_hermitian,
    kernel_cutoff,
    kron,
    mat_imag_power,
    mat_log,
    mat_power,
    partial_trace,
    support_projection,
)
from .superop import ModularData

T_SAMPLES = (0.1, 0.37, 1.0, 2.5, 10.0)
IT_SAMPLES = (0.05, 0.13, 0.29, 0.61)
P_SAMPLES = (0.3, 0.7, 1.0, 1.3, 1.7)

PASS_TOL = 1e-8


@dataclass
class FactorizationData:
    """Commuting positive factors D_j realizing an equality family."""

    d_list: list
    base_a: np.ndarray
    base_b: np.ndarray

    @property
    def d_sum(self) -> np.ndarray:
        return sum(self.d_list)


@dataclass
class BlockStructure:
    """Basis change on the traced-out space exhibiting ⊕_n H_n^L ⊗ H_n^R."""

    basis: np.ndarray  # unitary; columns ordered block by block, (l, r) fast
    blocks: list  # [(d_L, d_R)] per block


@dataclass
class SubalgebraSpec:
    """A tensor-factor subalgebra of a bipartite matrix algebra."""

    factor: str  # "first" | "second"
    dims: tuple  # (d1, d2)

    def __post_init__(self):
        if self.factor not in ("first", "second"):
            raise InputError("factor must be 'first' or 'second'")


@dataclass
class ConditionVerdicts:
    deviations: dict
    tol: float = PASS_TOL
    verdicts: dict = field(init=False)
    coherent: bool = field(init=False)

    def __post_init__(self):
        self.verdicts = {k: v <= self.tol for k, v in self.deviations.items()}
        flags = set(self.verdicts.values())
        self.coherent = len(flags) == 1

    @property
    def all_pass(self) -> bool:
        return all(self.verdicts.values())


def _delta_resolvent(a, b, t: float, x) -> np.ndarray:
    """(Δ_AB + tI)^{-1}(X) for positive definite A, B."""
    md = ModularData(a, b)
    if md.a_kernel.any() or md.b_kernel.any():
        raise KernelViolationError("resolvent of the modular operator needs A, B > 0")
    fibers = md.a_eigs[:, None] / md.b_eigs[None, :]
    return md.assemble(md.overlap(x) / (fibers + t))


def check_equality_conditions(
    k,
    fam,
    t_samples=T_SAMPLES,
    p_samples=P_SAMPLES,
    it_samples=IT_SAMPLES,
) -> ConditionVerdicts:
    """Evaluate the five equivalent equality conditions for general K on a
    family of strictly positive pairs; reports max deviation per condition."""
    k = np.asarray(k, dtype=complex)
    a = sum(aj for aj, _ in fam.pairs)
    b = sum(bj for _, bj in fam.pairs)
    for aj, bj in fam.pairs:
        if np.linalg.eigvalsh(aj).min() <= 0 or np.linalg.eigvalsh(bj).min() <= 0:
            raise KernelViolationError("general-K conditions require A_j, B_j > 0")

    dev_add = 0.0
    for p in p_samples:
        total = j_p(k, a, b, p).value
        parts = sum(j_p(k, aj, bj, p).value for aj, bj in fam.pairs)
        dev_add = max(dev_add, abs(total - parts) / (1.0 + abs(total)))

    dev_res = 0.0
    for t in t_samples:
        ref = _delta_resolvent(a, b, t, k)
        for aj, bj in fam.pairs:
            dev_res = max(
                dev_res, np.abs(_delta_resolvent(aj, bj, t, k) - ref).max(initial=0.0)
            )

    dev_flow = 0.0
    for t in it_samples:
        ref = mat_imag_power(a, t) @ k @ mat_imag_power(b, -t)
        for aj, bj in fam.pairs:
            cur = mat_imag_power(aj, t) @ k @ mat_imag_power(bj, -t)
            dev_flow = max(dev_flow, np.abs(cur - ref).max(initial=0.0))

    log_a, log_b = mat_log(a), mat_log(b)
    dev_log = 0.0
    for aj, bj in fam.pairs:
        lhs = (log_a - mat_log(aj)) @ k
        rhs = k @ (log_b - mat_log(bj))
        dev_log = max(dev_log, np.abs(lhs - rhs).max(initial=0.0))

    return ConditionVerdicts(
        {
            "additivity": dev_add,
            "resolvent": dev_res,
            "modular_flow": dev_flow,
            "log_intertwining": dev_log,
        }
    )


def check_factorization_conditions(fam, t_samples=IT_SAMPLES, p: float = 0.7) -> ConditionVerdicts:
    """K = I equality conditions on psd families with ker B_j ⊆ ker A_j:
    the support-projected modular flow identity and J_p additivity."""
    eye = np.eye(fam.dim)
    if np.abs(fam.K - eye).max(initial=0.0) > 1e-12:
        raise InputError("factorization conditions apply to K = I families")
    a = sum(aj for aj, _ in fam.pairs)
    b = sum(bj for _, bj in fam.pairs)
    for aj, bj in fam.pairs:
        pa = support_projection(aj)
        pb = support_projection(bj)
        if np.abs(pb @ pa - pa).max(initial=0.0) > 1e-8:
            raise KernelViolationError("ker B_j is not contained in ker A_j")

    dev_flow = 0.0
    for t in t_samples:
        ref = mat_imag_power(a, t) @ mat_imag_power(b, -t)
        for aj, bj in fam.pairs:
            proj = support_projection(bj)
            cur = mat_imag_power(aj, t) @ mat_imag_power(bj, -t)
            dev_flow = max(dev_flow, np.abs(cur - ref @ proj).max(initial=0.0))

    total = j_p(eye, a, b, p, route="modular").value
    parts = sum(j_p(eye, aj, bj, p, route="modular").value for aj, bj in fam.pairs)
    dev_add = abs(total - parts) / (1.0 + abs(total))

    return ConditionVerdicts({"additivity": dev_add, "modular_flow": dev_flow})


def construct_equality_family(a, b, d_list):
    """Build the family A_j = A D^{-1} D_j, B_j = B D^{-1} D_j from
    commuting positive factors; additivity is verified post-construction."""
    from .inequalities import InstanceFamily

    a = as_hermitian(a)
    b = as_hermitian(b)
    d_list = [as_hermitian(d) for d in d_list]
    if not d_list:
        raise InputError("at least one factor D_j is required")
    for d in d_list:
        if np.linalg.eigvalsh(d).min() < -1e-10:
            raise InputError("factors D_j must be positive semidefinite")
        for m in (a, b):
            comm = np.abs(m @ d - d @ m).max(initial=0.0)
            if comm > 1e-8 * max(np.abs(m).max() * max(np.abs(d).max(), 1.0), 1.0):
                raise CommutationError("D_j must commute with A and B")
    d_sum = sum(d_list)
    w = np.linalg.eigvalsh(d_sum)
    cut = kernel_cutoff(w)
    # D must be invertible on the joint support of A and B
    pd = support_projection(d_sum)
    for m in (a, b):
        pm = support_projection(m)
        if np.abs(pd @ pm - pm).max(initial=0.0) > 1e-8:
            raise KernelViolationError("ΣD_j must be invertible on the support of A and B")
    d_inv = mat_power(d_sum, -1.0)
    pairs = [(as_hermitian(a @ d_inv @ dj), as_hermitian(b @ d_inv @ dj)) for dj in d_list]
    fam = InstanceFamily(np.eye(a.shape[0]), pairs)
    eye = np.eye(a.shape[0])
    for p in (0.4, 1.0, 1.6):
        total = j_p(eye, *fam.sums(), p, route="modular").value
        parts = sum(j_p(eye, aj, bj, p, route="modular").value for aj, bj in pairs)
        if abs(total - parts) > 1e-9 * (1.0 + abs(total)):
            raise NumericalError("constructed family fails additivity")
    return fam


def conditional_expectation(spec: SubalgebraSpec, a) -> np.ndarray:
    """Trace-preserving conditional expectation onto a tensor-factor
    subalgebra: Tr_2 A ⊗ I/d_2 (first factor) or I/d_1 ⊗ Tr_1 A."""
    d1, d2 = spec.dims
    a = np.asarray(a, dtype=complex)
    if a.shape != (d1 * d2, d1 * d2):
        raise DimensionError("matrix shape does not match the declared factors")
    if spec.factor == "first":
        return kron(partial_trace(a, spec.dims, "second"), np.eye(d2) / d2)
    return kron(np.eye(d1) / d1, partial_trace(a, spec.dims, "first"))


def petz_recovery(spec: SubalgebraSpec, q_m, x) -> np.ndarray:
    """The canonical recovery channel
    Q^{1/2} E(Q)^{-1/2} X E(Q)^{-1/2} Q^{1/2} built on the reference Q_m."""
    e_q = conditional_expectation(spec, q_m)
    e_half_inv = mat_power(as_hermitian(e_q), -0.5)
    q_half = mat_power(as_hermitian(q_m), 0.5)
    return q_half @ e_half_inv @ np.asarray(x, dtype=complex) @ e_half_inv @ q_half


def sufficiency_check(
    spec: SubalgebraSpec, q_list, t_samples=IT_SAMPLES, p: float = 0.5
) -> ConditionVerdicts:
    """Sufficiency of the tensor-factor subalgebra for {Q_1, ..., Q_m}:
    (i) the canonical recovery map restores every Q_j, (ii) the compressed
    modular flow agrees, (iv) J_p is preserved under the conditional
    expectation.  The three verdicts must agree."""
    q_list = [as_hermitian(q) for q in q_list]
    q_m = q_list[-1]
    p_m = support_projection(q_m)
    for q in q_list:
        pq = support_projection(q)
        if np.abs(p_m @ pq - pq).max(initial=0.0) > 1e-8:
            raise KernelViolationError("ker Q_m must be contained in every ker Q_j")
    e_list = [as_hermitian(conditional_expectation(spec, q)) for q in q_list]
    e_m = e_list[-1]

    dev_recovery = 0.0
    for q, e in zip(q_list, e_list):
        dev_recovery = max(
            dev_recovery, np.abs(petz_recovery(spec, q_m, e) - q).max(initial=0.0)
        )

    dev_flow = 0.0
    for t in t_samples:
        for q, e in zip(q_list, e_list):
            lhs = mat_imag_power(e, t) @ mat_imag_power(e_m, -t) @ p_m
            rhs = mat_imag_power(q, t) @ mat_imag_power(q_m, -t)
            dev_flow = max(dev_flow, np.abs(lhs - rhs).max(initial=0.0))

    eye = np.eye(q_m.shape[0])
    dev_j = 0.0
    for q, e in zip(q_list[:-1], e_list[:-1]):
        full = j_p(eye, q, q_m, p, route="modular").value
        compressed = j_p(eye, e, e_m, p, route="modular").value
        dev_j = max(dev_j, abs(full - compressed) / (1.0 + abs(full)))

    return ConditionVerdicts(
        {"recovery": dev_recovery, "modular_flow": dev_flow, "j_p_preservation": dev_j}
    )


def unitary_dilation(k) -> np.ndarray:
    """Block unitary [[K, L], [−L, K]] with L = U(1−|K|²)^{1/2} from the
    polar decomposition K = U|K|; requires ‖K‖ ≤ 1."""
    k = np.asarray(k, dtype=complex)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise DimensionError("K must be square")
    d = k.shape[0]
    w, s, vh = np.linalg.svd(k)
    if s.max(initial=0.0) > 1.0 + 1e-12:
        raise ContractionError(f"operator norm {s.max():.6f} exceeds 1")
    u = w @ vh
    resid = vh.conj().T @ np.diag(np.sqrt(np.clip(1.0 - s**2, 0.0, None))) @ vh
    l = u @ resid
    big = np.block([[k, l], [-l, k]])
    if np.abs(big @ big.conj().T - np.eye(2 * d)).max(initial=0.0) > 1e-10:
        raise NumericalError("dilation failed the unitarity check")
    return big


def dilation_embedding_deviation(k, a, b, p: float) -> float:
    """|J_p(K, A, B) − J_p(𝒰, A⊕0, B⊕0)| for the unitary dilation 𝒰."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    d = a.shape[0]
    big = unitary_dilation(k)
    pad = np.zeros((2 * d, 2 * d), dtype=complex)
    a_pad = pad.copy()
    a_pad[:d, :d] = a
    b_pad = pad.copy()
    b_pad[:d, :d] = b
    small = j_p(k, a, b, p, route="modular").value
    large = j_p(big, a_pad, b_pad, p, route="modular").value
    return abs(small - large)


def reduce_unitary_K(k, fam):
    """Map (K, {A_j, B_j}) to (I, {A_j, K B_j K†}); J_p values coincide."""
    from .inequalities import InstanceFamily

    k = np.asarray(k, dtype=complex)
    d = k.shape[0]
    if np.abs(k @ k.conj().T - np.eye(d)).max(initial=0.0) > 1e-10:
        raise InputError("K must be unitary")
    pairs = [(a, as_hermitian(k @ b @ k.conj().T)) for a, b in fam.pairs]
    eye = np.eye(d)
    for (a, b), (a2, b2) in zip(fam.pairs, pairs):
        orig = j_p(k, a, b, 0.7, route="modular").value
        red = j_p(eye, a2, b2, 0.7, route="modular").value
        if abs(orig - red) > 1e-10 * (1.0 + abs(orig)):
            raise NumericalError("unitary-K reduction changed a J_p value")
    return InstanceFamily(eye, pairs)


# ---------------------------------------------------------------------------
# structure states
# ---------------------------------------------------------------------------

def _assemble_structure(d1: int, blocks, left_factors, right_factors) -> np.ndarray:
    """⊕_n L_n ⊗ R_n on H_1 ⊗ (⊕_n H_n^L ⊗ H_n^R), standard block order."""
    d2 = sum(dl * dr for dl, dr in blocks)
    total = d1 * d2
    out = np.zeros((total, total), dtype=complex)
    offset = 0
    for (dl, dr), lf, rf in zip(blocks, left_factors, right_factors):
        lf = np.asarray(lf, dtype=complex)
        rf = np.asarray(rf, dtype=complex)
        if lf.shape != (d1 * dl, d1 * dl) or rf.shape != (dr, dr):
            raise DimensionError("factor shapes do not match the block dims")
        for i in range(d1):
            for l in range(dl):
                for r in range(dr):
                    row = i * d2 + offset + l * dr + r
                    for i2 in range(d1):
                        for l2 in range(dl):
                            for r2 in range(dr):
                                col = i2 * d2 + offset + l2 * dr + r2
                                out[row, col] = (
                                    lf[i * dl + l, i2 * dl + l2] * rf[r, r2]
                                )
        offset += dl * dr
    return out


def construct_structure_state(blocks, d1: int):
    """Build (A12, B12) with A12 = ⊕_n A_n^L ⊗ A_n^R and
    B12 = ⊕_n A_n^L ⊗ B_n^R (equal left factors), the exact equality
    structure for monotonicity under the partial trace over H_1.

    ``blocks`` is a list of (A_n^L, A_n^R, B_n^R) with A_n^L psd on
    H_1 ⊗ H_n^L and A_n^R, B_n^R psd on H_n^R.
    """
    if not blocks:
        raise InputError("at least one block is required")
    dims = []
    for lf, ar, br in blocks:
        lf = np.asarray(lf)
        ar = np.asarray(ar)
        br = np.asarray(br)
        if ar.shape != br.shape:
            raise DimensionError("A_n^R and B_n^R must have equal dimension")
        if lf.shape[0] % d1 != 0:
            raise DimensionError("left factor dimension must be a multiple of d1")
        dims.append((lf.shape[0] // d1, ar.shape[0]))
    a12 = _assemble_structure(d1, dims, [b[0] for b in blocks], [b[1] for b in blocks])
    b12 = _assemble_structure(d1, dims, [b[0] for b in blocks], [b[2] for b in blocks])
    d2 = sum(dl * dr for dl, dr in dims)
    structure = BlockStructure(np.eye(d2), dims)
    return as_hermitian(a12), as_hermitian(b12), structure


def random_structure_state(dims, seed: int, index: int = 0):
    """Random equality-structure pair; ``dims`` = (d1, dL_1, dR_1, dL_2, ...)."""
    from .instances import ginibre

    if len(dims) < 3 or len(dims) % 2 == 0:
        raise InputError("dims must be (d1, dL_1, dR_1, [dL_2, dR_2, ...])")
    d1 = int(dims[0])
    pairs = [(int(dims[i]), int(dims[i + 1])) for i in range(1, len(dims), 2)]
    rng = np.random.default_rng([int(seed), 97, int(index)] + [int(d) for d in dims])
    blocks = []
    for dl, dr in pairs:
        g = ginibre(rng, d1 * dl)
        lf = g @ g.conj().T + 1e-3 * np.eye(d1 * dl)
        ga = ginibre(rng, dr)
        gb = ginibre(rng, dr)
        blocks.append(
            (lf, ga @ ga.conj().T + 1e-3 * np.eye(dr), gb @ gb.conj().T + 1e-3 * np.eye(dr))
        )
    return construct_structure_state(blocks, d1)


def construct_ssa_structure_state(blocks, d1: int, d3: int):
    """Tripartite state A123 = ⊕_n A_n^L ⊗ A_n^R with A_n^L on H_1 ⊗ H_n^L
    and A_n^R on H_n^R ⊗ H_3: the exact equality case of generalized SSA.

    Returns (A123, (d1, d2, d3), structure); the middle factor is
    H_2 = ⊕_n H_n^L ⊗ H_n^R.
    """
    if not blocks:
        raise InputError("at least one block is required")
    dims = []
    for lf, ar in blocks:
        lf = np.asarray(lf)
        ar = np.asarray(ar)
        if lf.shape[0] % d1 != 0 or ar.shape[0] % d3 != 0:
            raise DimensionError("factor dims must be multiples of d1 / d3")
        dims.append((lf.shape[0] // d1, ar.shape[0] // d3))
    d2 = sum(dl * dr for dl, dr in dims)
    total = d1 * d2 * d3
    out = np.zeros((total, total), dtype=complex)
    offset = 0
    for (dl, dr), (lf, ar) in zip(dims, blocks):
        lf = np.asarray(lf, dtype=complex)
        ar = np.asarray(ar, dtype=complex)
        for i in range(d1):
            for l in range(dl):
                for r in range(dr):
                    for m in range(d3):
                        row = (i * d2 + offset + l * dr + r) * d3 + m
                        for i2 in range(d1):
                            for l2 in range(dl):
                                for r2 in range(dr):
                                    for m2 in range(d3):
                                        col = (i2 * d2 + offset + l2 * dr + r2) * d3 + m2
                                        out[row, col] = (
                                            lf[i * dl + l, i2 * dl + l2]
                                            * ar[r * d3 + m, r2 * d3 + m2]
                                        )
        offset += dl * dr
    structure = BlockStructure(np.eye(d2), dims)
    return as_hermitian(out), (d1, d2, d3), structure


def check_commuting_factorization(a123, f_l, f_r, dims) -> dict:
    """Verify A = (F_L ⊗ I_3)(I_1 ⊗ F_R) with the two factors commuting."""
    d1, d2, d3 = dims
    a123 = np.asarray(a123, dtype=complex)
    left = kron(np.asarray(f_l, dtype=complex), np.eye(d3))
    right = kron(np.eye(d1), np.asarray(f_r, dtype=complex))
    comm_dev = float(np.abs(left @ right - right @ left).max(initial=0.0))
    prod_dev = float(np.abs(left @ right - a123).max(initial=0.0))
    return {
        "commutation_dev": comm_dev,
        "product_dev": prod_dev,
        "verdict": comm_dev <= 1e-10 and prod_dev <= 1e-10,
    }


def construct_cor_ssas_family(a, d_list, dims):
    """Split A on H_1 ⊗ H_2 as A_j = A (D^{-1} D_j ⊗ I) for first-factor
    positive D_j commuting with A; the exact equality case of the
    conditional-entropy subadditivity."""
    from .inequalities import InstanceFamily

    d1, d2 = dims
    a = as_hermitian(a)
    d_list = [as_hermitian(d) for d in d_list]
    d_sum = sum(d_list)
    for d in d_list:
        big = kron(d, np.eye(d2))
        if np.abs(a @ big - big @ a).max(initial=0.0) > 1e-8:
            raise CommutationError("A must commute with every D_j ⊗ I")
    d_inv = mat_power(d_sum, -1.0)
    pairs = []
    for d in d_list:
        factor = kron(as_hermitian(d_inv @ d), np.eye(d2))
        pairs.append(as_hermitian(a @ factor))
    return pairs


def check_cor_ssas(a_list, d_list, dims, p_samples=(0.5, 1.0, 1.5)) -> ConditionVerdicts:
    """Validate the D_j-split structure and the resulting equality in the
    conditional-entropy form J_p(I, A, (Tr_2 A) ⊗ I_2)."""
    d1, d2 = dims
    a_list = [as_hermitian(x) for x in a_list]
    a = sum(a_list)
    d_sum = sum(as_hermitian(d) for d in d_list)
    d_inv = mat_power(d_sum, -1.0)

    dev_struct = 0.0
    for aj, dj in zip(a_list, d_list):
        big = kron(as_hermitian(dj), np.eye(d2))
        dev_struct = max(dev_struct, float(np.abs(aj @ big - big @ aj).max(initial=0.0)))
        target = a @ kron(as_hermitian(d_inv @ dj), np.eye(d2))
        dev_struct = max(dev_struct, float(np.abs(aj - target).max(initial=0.0)))

    eye = np.eye(d1 * d2)
    dev_eq = 0.0
    for p in p_samples:
        total = j_p(eye, a, kron(partial_trace(a, dims, "second"), np.eye(d2)), p,
                    route="modular").value
        parts = sum(
            j_p(eye, aj, kron(partial_trace(aj, dims, "second"), np.eye(d2)), p,
                route="modular").value
            for aj in a_list
        )
        dev_eq = max(dev_eq, abs(total - parts) / (1.0 + abs(total)))

    return ConditionVerdicts({"structure": dev_struct, "equality": dev_eq})


def check_phi_psi_equality(phi_families=None, psi_families=None, dims=None,
                           p_samples=(0.5, 1.0, 1.5)) -> dict:
    """Additivity of the hatted Minkowski functionals on explicit families.

    ``phi_families`` is a list over j of block lists {A_jk}; ``psi_families``
    a list of bipartite matrices on ``dims``.  Returns per-functional max
    deviations over p_samples and pass verdicts at 1e-8.
    """
    from .inequalities import phi_hat, psi_hat

    out = {}
    if phi_families is not None:
        sums = [sum(blocks) for blocks in zip(*phi_families)]
        dev = 0.0
        for p in p_samples:
            total = phi_hat(p, sums)
            parts = sum(phi_hat(p, list(blocks)) for blocks in phi_families)
            dev = max(dev, abs(total - parts) / (1.0 + abs(total)))
        out["phi_hat"] = {"deviation": dev, "verdict": dev <= PASS_TOL}
    if psi_families is not None:
        if dims is None:
            raise InputError("dims required for the bipartite families")
        total_a = sum(psi_families)
        dev = 0.0
        for p in p_samples:
            total = psi_hat(p, total_a, dims)
            parts = sum(psi_hat(p, aj, dims) for aj in psi_families)
            dev = max(dev, abs(total - parts) / (1.0 + abs(total)))
        out["psi_hat"] = {"deviation": dev, "verdict": dev <= PASS_TOL}
    return out


# ---------------------------------------------------------------------------
# Wedderburn block decomposition
# ---------------------------------------------------------------------------

def _orthonormal_span(vectors, tol=1e-10):
    """Orthonormal basis (rows) of the span of the given vectors."""
    stack = np.array(vectors)
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(s > tol * max(s.max(initial=0.0), 1.0)))
    return vh[:rank]


def _generated_algebra(generators, d: int) -> np.ndarray:
    """Basis (rows of vec'd matrices) of the unital algebra generated."""
    vecs = [np.eye(d, dtype=complex).reshape(-1)]
    vecs += [np.asarray(g, dtype=complex).reshape(-1) for g in generators]
    basis = _orthonormal_span(vecs)
    while True:
        mats = [v.reshape(d, d) for v in basis]
        prods = [(m1 @ m2).reshape(-1) for m1 in mats for m2 in mats]
        new_basis = _orthonormal_span(list(basis) + prods)
        if new_basis.shape[0] == basis.shape[0] or new_basis.shape[0] == d * d:
            return new_basis
        basis = new_basis


def _commutant(generators, d: int) -> np.ndarray:
    """Basis (rows of vec'd matrices) of {X : [X, G] = 0 for all G}."""
    rows = []
    eye = np.eye(d)
    for g in generators:
        g = np.asarray(g, dtype=complex)
        rows.append(np.kron(g, eye) - np.kron(eye, g.T))
    stacked = np.vstack(rows)
    _, s, vh = np.linalg.svd(stacked)
    null_dim = d * d - int(np.sum(s > 1e-10 * max(s.max(initial=0.0), 1.0)))
    return vh[d * d - null_dim :].conj()


def _subspace_intersection(basis1, basis2, tol=1e-8) -> np.ndarray:
    """Intersection of two subspaces given by orthonormal row bases."""
    p1 = basis1.conj().T @ basis1
    p2 = basis2.conj().T @ basis2
    w, v = np.linalg.eigh(p1 @ p2 @ p1 + (p1 @ p2 @ p1).conj().T)
    keep = w > 2.0 - tol
    return v[:, keep].T.conj()


def _random_hermitian_from_basis(basis, d: int, rng) -> np.ndarray:
    coeffs = rng.standard_normal(basis.shape[0]) + 1j * rng.standard_normal(basis.shape[0])
    m = np.tensordot(coeffs, basis, axes=(0, 0)).reshape(d, d)
    return 0.5 * (m + m.conj().T)


def _cluster_eigenvalues(w, gap_tol=1e-8):
    """Group sorted eigenvalues into clusters separated by more than gap_tol;
    returns slices, or None when a separation is ambiguous."""
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    clusters = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap_tol * scale:
            clusters.append(slice(start, i))
            start = i
        elif gap_tol * scale / 10 < w[i] - w[i - 1] <= gap_tol * scale:
            return None  # borderline separation: retry with a fresh element
    return clusters


def wedderburn_decompose(generators, seed: int = 0, attempts: int = 10) -> BlockStructure:
    """Canonical block/tensor decomposition of the commutant of the algebra
    generated by Hermitian matrices.

    Finds a unitary basis change after which the generated algebra M is
    ⊕_n I_n^L ⊗ B(H_n^R) and its commutant M′ is ⊕_n B(H_n^L) ⊗ I_n^R.
    Returns the basis and the list of (d_L, d_R) block dimensions.
    """
    generators = [as_hermitian(g) for g in generators]
    if not generators:
        raise InputError("at least one generator is required")
    d = generators[0].shape[0]
    algebra = _generated_algebra(generators, d)
    commutant = _commutant(generators, d)
    center = _subspace_intersection(algebra, commutant)
    rng = np.random.default_rng([int(seed), 131])

    last_error = None
    for _ in range(attempts):
        try:
            return _decompose_once(generators, commutant, center, d, rng)
        except NumericalError as exc:
            last_error = exc
    raise NumericalError(f"block splitting remained ambiguous: {last_error}")


def _decompose_once(generators, commutant, center, d, rng) -> BlockStructure:
    z = _random_hermitian_from_basis(center, d, rng)
    wz, vz = np.linalg.eigh(z)
    clusters = _cluster_eigenvalues(wz)
    if clusters is None:
        raise NumericalError("central element eigenvalues too close")
    basis_cols = []
    blocks = []
    c1 = _random_hermitian_from_basis(commutant, d, rng)
    c2 = _random_hermitian_from_basis(commutant, d, rng)
    for sl in clusters:
        iso = vz[:, sl]  # isometry onto the central block
        nb = iso.shape[1]
        c1_blk = iso.conj().T @ c1 @ iso
        w, v = np.linalg.eigh(0.5 * (c1_blk + c1_blk.conj().T))
        sub = _cluster_eigenvalues(w)
        if sub is None:
            raise NumericalError("commutant element eigenvalues too close")
        mults = {s.stop - s.start for s in sub}
        if len(mults) != 1:
            raise NumericalError("unequal eigenspace multiplicities")
        d_r = mults.pop()
        d_l = len(sub)
        if d_l * d_r != nb:
            raise NumericalError("block dimension bookkeeping failed")
        c2_blk = iso.conj().T @ c2 @ iso
        q_ref = v[:, sub[0]]
        slots = [q_ref]
        for s in sub[1:]:
            q = v[:, s]
            m = q.conj().T @ c2_blk @ q_ref
            uu, ss, vvh = np.linalg.svd(m)
            if ss.min() < 1e-8 * max(ss.max(), 1.0):
                raise NumericalError("alignment map is near-singular")
            slots.append(q @ (uu @ vvh))
        for q in slots:
            for r in range(d_r):
                basis_cols.append(iso @ q[:, r])
        blocks.append((d_l, d_r))
    basis = np.array(basis_cols).T
    structure = BlockStructure(basis, blocks)
    _verify_structure(generators, structure)
    return structure


def _verify_structure(generators, structure: BlockStructure, tol=1e-9):
    """Each generator must be ⊕_n I ⊗ X_n in the new basis."""
    u = structure.basis
    for g in generators:
        gt = u.conj().T @ g @ u
        offset = 0
        recon = np.zeros_like(gt)
        for dl, dr in structure.blocks:
            nb = dl * dr
            blk = gt[offset : offset + nb, offset : offset + nb]
            x = sum(blk[l * dr : (l + 1) * dr, l * dr : (l + 1) * dr] for l in range(dl)) / dl
            recon[offset : offset + nb, offset : offset + nb] = np.kron(np.eye(dl), x)
            offset += nb
        if np.abs(recon - gt).max(initial=0.0) > tol * max(np.abs(g).max(initial=0.0), 1.0):
            raise NumericalError("reconstruction failed for a generator")
