"""Suite runner: seeded batch execution of every gap and equality check.

Each suite yields a deterministic list of rows (plain dicts).  A row is
either a signed-gap check (verdict: gap above −tol on the |lhs|+|rhs|
scale) or a deviation check (verdict: deviation below an absolute target).
Numerical failures inside a single check mark the run degraded but do not
stop it.  Suites can run concurrently (WYDLAB_JOBS); aggregation order is
always the canonical suite order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import equality as eq
from . import inequalities as ineq
from .entropy import j_p, klein_gap
from .errors import InputError, NumericalError, WydlabError
from .inequalities import GapReport, InstanceFamily
from .instances import (
    random_contraction,
    random_density,
    random_family,
    random_pd,
    random_tripartite,
    random_unitary,
)
from .linalg import kron
from .report import RunReport

SUITE_NAMES = ("convexity", "monotonicity", "ssa", "carlen-lieb", "equality", "appendix")

DEFAULT_P_GRID = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75)


@dataclass
class SuiteConfig:
    seed: int = 0
    dims: tuple = (2, 3)
    p_grid: tuple = DEFAULT_P_GRID
    m: int = 2
    trials: int = 3
    atol: float = 1e-9
    rtol: float = 1e-9
    suites: tuple = SUITE_NAMES
    out: str | None = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.p_grid = tuple(float(p) for p in self.p_grid)
        self.suites = tuple(self.suites)
        unknown = set(self.suites) - set(SUITE_NAMES)
        if unknown:
            raise InputError(f"unknown suites: {sorted(unknown)}")
        if self.seed < 0 or self.trials < 0 or self.m < 1:
            raise InputError("seed/trials must be nonnegative, m positive")
        for p in self.p_grid:
            if not 0.0 < p <= 2.0:
                raise InputError("p grid values must lie in (0, 2]")

    def to_dict(self) -> dict:
        return asdict(self)


class _Rows:
    """Row collector with the shared tolerance policy and degradation."""

    def __init__(self, suite: str, cfg: SuiteConfig):
        self.suite = suite
        self.cfg = cfg
        self.rows: list = []
        self.degraded = False

    def gap(self, check: str, d: int, index: int, rep: GapReport):
        tol = self.cfg.atol + self.cfg.rtol * (abs(rep.lhs) + abs(rep.rhs))
        self.rows.append(
            {
                "suite": self.suite,
                "check": check,
                "p": rep.p,
                "d": d,
                "seed": self.cfg.seed,
                "index": index,
                "lhs": rep.lhs,
                "rhs": rep.rhs,
                "gap": rep.gap,
                "verdict": bool(rep.gap >= -tol),
                "near_zero": bool(-self.cfg.atol <= rep.gap < 0.0),
                "degraded": False,
                "params": rep.params,
            }
        )

    def deviation(self, check: str, d: int, index: int, p, value: float,
                  target: float = 1e-9, params: dict | None = None):
        self.rows.append(
            {
                "suite": self.suite,
                "check": check,
                "p": p,
                "d": d,
                "seed": self.cfg.seed,
                "index": index,
                "lhs": value,
                "rhs": target,
                "gap": value,
                "verdict": bool(value <= target),
                "near_zero": False,
                "degraded": False,
                "params": {"kind": "deviation", **(params or {})},
            }
        )

    def run(self, check: str, d: int, index: int, p, fn):
        """Execute fn(); a NumericalError degrades the run but continues."""
        try:
            fn()
        except NumericalError as exc:
            self.degraded = True
            self.rows.append(
                {
                    "suite": self.suite,
                    "check": check,
                    "p": p,
                    "d": d,
                    "seed": self.cfg.seed,
                    "index": index,
                    "lhs": None,
                    "rhs": None,
                    "gap": None,
                    "verdict": True,
                    "near_zero": False,
                    "degraded": True,
                    "params": {"error": str(exc)},
                }
            )


def _suite_convexity(cfg: SuiteConfig) -> _Rows:
    out = _Rows("convexity", cfg)
    for d in cfg.dims:
        for i in range(cfg.trials):
            fam = InstanceFamily(
                random_contraction(d, cfg.seed, i), random_family(d, cfg.m, cfg.seed, i)
            )
            a_list = [a for a, _ in fam.pairs]
            for p in cfg.p_grid:
                out.run("subadditivity[j]", d, i, p,
                        lambda: out.gap("subadditivity[j]", d, i,
                                        ineq.subadditivity_gap("j", fam, p)))
                pt = p - 1.0
                if -1.0 <= pt < 1.0:
                    out.run("subadditivity[j_tilde]", d, i, pt,
                            lambda: out.gap("subadditivity[j_tilde]", d, i,
                                            ineq.subadditivity_gap("j_tilde", fam, pt)))
                out.run("upsilon_hat_subadditivity", d, i, p,
                        lambda: out.gap("upsilon_hat_subadditivity", d, i,
                                        ineq.upsilon_hat_subadditivity_gap(fam.K, a_list, p)))
                out.run("phi_hat_subadditivity", d, i, p,
                        lambda: out.gap("phi_hat_subadditivity", d, i,
                                        ineq.phi_hat_subadditivity_gap(
                                            p, [[aj, bj] for aj, bj in fam.pairs])))
            # Lieb-Ando regimes, one representative point each
            out.run("lieb_ando[concave]", d, i, 0.3,
                    lambda: out.gap("lieb_ando[concave]", d, i,
                                    ineq.lieb_ando_gap(fam.K, fam, 0.3, 0.4)))
            out.run("lieb_ando[convex]", d, i, 1.5,
                    lambda: out.gap("lieb_ando[convex]", d, i,
                                    ineq.lieb_ando_gap(fam.K, fam, 1.5, 1.2)))
            jensen = ineq.operator_jensen_gap("log", fam.pairs[0][0], fam.pairs[0][1], 0.3)
            out.gap("operator_jensen[log]", d, i,
                    GapReport("operator_jensen[log]", None, 0.0, jensen, jensen))
            out.run("p2_convexity", d, i, 2.0,
                    lambda: out.gap("p2_convexity", d, i, ineq.p2_convexity_gap(
                        [(a, random_contraction(d, cfg.seed, 100 + i)) for a in a_list])))
            # Klein-type positivity on density pairs
            rho = random_density(d, cfg.seed, i)
            sig = random_density(d, cfg.seed, i + 1000)
            u = random_unitary(d, cfg.seed, i)
            for p in cfg.p_grid:
                kg = klein_gap(u, rho, sig, p)
                out.gap("klein_positivity", d, i, GapReport("klein_positivity", p, 0.0, kg, kg))
        d1, d2 = 2, d
        for i in range(cfg.trials):
            a_list = [random_pd(d1 * d2, cfg.seed, 200 + i), random_pd(d1 * d2, cfg.seed, 300 + i)]
            for p in cfg.p_grid:
                out.run("psi_hat_subadditivity", d1 * d2, i, p,
                        lambda: out.gap("psi_hat_subadditivity", d1 * d2, i,
                                        ineq.psi_hat_subadditivity_gap(p, a_list, (d1, d2))))
    return out


def _suite_monotonicity(cfg: SuiteConfig) -> _Rows:
    out = _Rows("monotonicity", cfg)
    for d in cfg.dims:
        d1, d2 = 2, d
        for i in range(cfg.trials):
            a12 = random_pd(d1 * d2, cfg.seed, 400 + i)
            b12 = random_pd(d1 * d2, cfg.seed, 500 + i)
            k2 = random_contraction(d2, cfg.seed, 400 + i)
            v1 = random_unitary(d1, cfg.seed, 400 + i)
            for p in cfg.p_grid:
                out.run("partial_trace_monotonicity", d1 * d2, i, p,
                        lambda: out.gap("partial_trace_monotonicity", d1 * d2, i,
                                        ineq.partial_trace_monotonicity_gap(
                                            k2, v1, a12, b12, p, (d1, d2))))
            fam = InstanceFamily(
                random_contraction(d, cfg.seed, i), random_family(d, cfg.m, cfg.seed, i)
            )
            chk = ineq.block_embed_check(fam, 0.7)
            out.deviation("block_embed_additivity", d, i, 0.7,
                          chk["block_additivity_dev"], 1e-8)
            out.gap("block_embed_monotonicity", d, i,
                    GapReport("block_embed_monotonicity", 0.7, 0.0,
                              chk["monotonicity_gap"], chk["monotonicity_gap"]))
        dims3 = (2, 2, d)
        for i in range(cfg.trials):
            a123 = random_tripartite(dims3, cfg.seed, 600 + i)
            for p in cfg.p_grid:
                out.run("psi_monotonicity", int(np.prod(dims3)), i, p,
                        lambda: [out.gap(rep.name, int(np.prod(dims3)), i, rep)
                                 for rep in ineq.psi_monotonicity_gap(a123, p, dims3)])
                out.run("triple_minkowski", int(np.prod(dims3)), i, p,
                        lambda: out.gap("triple_minkowski", int(np.prod(dims3)), i,
                                        ineq.triple_minkowski_gap(a123, p, dims3)))
    return out


def _suite_ssa(cfg: SuiteConfig) -> _Rows:
    out = _Rows("ssa", cfg)
    for d in cfg.dims:
        dims3 = (2, 2, d)
        total = int(np.prod(dims3))
        for i in range(cfg.trials):
            a123 = random_tripartite(dims3, cfg.seed, 700 + i)
            for p in cfg.p_grid:
                out.run("ssa", total, i, p,
                        lambda: out.gap("ssa", total, i, ineq.ssa_gap(a123, p, dims3)))
        # exact equality structure: gap vanishes at every p
        blocks = [
            (random_pd(2 * 1, cfg.seed, 710 + i), random_pd(1 * d, cfg.seed, 720 + i)),
            (random_pd(2 * 2, cfg.seed, 730 + i), random_pd(2 * d, cfg.seed, 740 + i)),
        ]
        i = 0
        a123, dims_s, _ = eq.construct_ssa_structure_state(blocks, 2, d)
        for p in cfg.p_grid:
            rep = ineq.ssa_gap(a123, p, dims_s)
            out.deviation("ssa_structure_equality", int(np.prod(dims_s)), i, p,
                          abs(rep.gap), 1e-8)
    # conditional-entropy split equality
    from scipy.linalg import block_diag

    d1, d2 = 2, cfg.dims[0]
    d_list = [np.diag([1.0, 2.0]), np.diag([0.5, 1.5])]
    a = block_diag(random_pd(d2, cfg.seed, 750), random_pd(d2, cfg.seed, 751))
    fams = eq.construct_cor_ssas_family(a, d_list, (d1, d2))
    verdicts = eq.check_cor_ssas(fams, d_list, (d1, d2))
    out.deviation("cor_ssas_equality", d1 * d2, 0, None,
                  max(verdicts.deviations.values()), 1e-8,
                  params={"coherent": verdicts.coherent})
    return out


def _suite_carlen_lieb(cfg: SuiteConfig) -> _Rows:
    out = _Rows("carlen-lieb", cfg)
    for d in cfg.dims:
        for i in range(cfg.trials):
            k = random_contraction(d, cfg.seed, 800 + i)
            a = random_pd(d, cfg.seed, 800 + i)
            if d <= 3:
                out.run("upsilon_variational", d, i, 1.5,
                        lambda: out.deviation(
                            "upsilon_variational", d, i, 1.5,
                            ineq.upsilon_variational_check(k, a, 1.5).params["upsilon_dev"],
                            1e-6))
        d1, d2 = 2, d
        for i in range(cfg.trials):
            a12 = random_pd(d1 * d2, cfg.seed, 810 + i)
            for p in (0.5, 1.5):
                ident = ineq.psi_block_identity(a12, (d1, d2), p)
                out.deviation("psi_block_identity", d1 * d2, i, p,
                              ident["deviation"], 1e-9 * max(abs(ident["lhs"]), 1.0))
    # hatted-functional additivity on constructed equality families
    blocks = [random_pd(3, cfg.seed, 820), random_pd(3, cfg.seed, 821)]
    phi_fams = [[0.3 * b for b in blocks], [0.7 * b for b in blocks]]
    rho = random_pd(cfg.dims[0], cfg.seed, 822)
    psi_fams = [kron(np.diag([0.4, 0.8]), rho), kron(np.diag([0.6, 1.2]), rho)]
    res = eq.check_phi_psi_equality(phi_families=phi_fams, psi_families=psi_fams,
                                    dims=(2, cfg.dims[0]))
    for name, entry in sorted(res.items()):
        out.deviation(f"{name}_additivity", 3, 0, None, entry["deviation"], 1e-8)
    return out


def _suite_equality(cfg: SuiteConfig) -> _Rows:
    out = _Rows("equality", cfg)
    d = 4
    q = random_unitary(d, cfg.seed, 900)
    rng = np.random.default_rng([cfg.seed, 901])
    diag = lambda: np.diag(rng.uniform(0.2, 2.0, d))
    a = q @ diag() @ q.conj().T
    b = q @ diag() @ q.conj().T
    d_list = [q @ diag() @ q.conj().T for _ in range(2)]
    fam = eq.construct_equality_family(a, b, d_list)
    verdicts = eq.check_equality_conditions(np.eye(d), fam)
    out.deviation("equality_conditions", d, 0, None,
                  max(verdicts.deviations.values()), 1e-8,
                  params={"coherent": verdicts.coherent, **verdicts.deviations})
    fv = eq.check_factorization_conditions(fam)
    out.deviation("factorization_conditions", d, 0, None,
                  max(fv.deviations.values()), 1e-8,
                  params={"coherent": fv.coherent})
    for p in cfg.p_grid:
        total = j_p(np.eye(d), *fam.sums(), p).value
        parts = sum(j_p(np.eye(d), aj, bj, p).value for aj, bj in fam.pairs)
        out.deviation("equality_p_independence", d, 0, p, abs(total - parts),
                      1e-9 * (1.0 + abs(total)))

    spec = eq.SubalgebraSpec("first", (2, 3))
    sigma = random_density(3, cfg.seed, 910)
    qs = [kron(random_pd(2, cfg.seed, 911 + i), sigma) for i in range(3)]
    sv = eq.sufficiency_check(spec, qs)
    out.deviation("sufficiency", 6, 0, None, max(sv.deviations.values()), 1e-8,
                  params={"coherent": sv.coherent})

    for i in range(cfg.trials):
        k = random_contraction(3, cfg.seed, 920 + i)
        dev = eq.dilation_embedding_deviation(
            k, random_pd(3, cfg.seed, 930 + i), random_pd(3, cfg.seed, 940 + i), 0.7
        )
        out.deviation("unitary_dilation", 3, i, 0.7, dev, 1e-9)
        fam_u = InstanceFamily(random_unitary(3, cfg.seed, 950 + i),
                               random_family(3, cfg.m, cfg.seed, 950 + i))
        eq.reduce_unitary_K(fam_u.K, fam_u)
        out.deviation("reduce_unitary_K", 3, i, None, 0.0, 1e-9)

    a12, b12, st = eq.random_structure_state((2, 1, 2, 2, 1), cfg.seed, 0)
    d2 = sum(dl * dr for dl, dr in st.blocks)
    for p in cfg.p_grid:
        rep = ineq.partial_trace_monotonicity_gap(
            np.eye(d2), np.eye(2), a12, b12, p, (2, d2)
        )
        out.deviation("structure_state_equality", 2 * d2, 0, p, abs(rep.gap),
                      1e-8 * (1.0 + abs(rep.lhs)))

    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    z = np.diag([1.0, -1.0])
    u = random_unitary(4, cfg.seed, 960)
    gens = [u @ kron(g, np.eye(2)) @ u.conj().T for g in (x, z)]
    st_w = eq.wedderburn_decompose(gens, seed=cfg.seed)
    out.deviation("wedderburn_blocks", 4, 0, None,
                  0.0 if st_w.blocks == [(2, 2)] else 1.0, 0.5,
                  params={"blocks": st_w.blocks})

    f_l = kron(random_pd(2, cfg.seed, 970), np.eye(2))
    f_r = kron(np.eye(2), random_pd(2, cfg.seed, 971))
    a123 = kron(f_l, np.eye(2)) @ kron(np.eye(2), f_r)
    cf = eq.check_commuting_factorization(a123, f_l, f_r, (2, 2, 2))
    out.deviation("commuting_factorization", 8, 0, None,
                  max(cf["commutation_dev"], cf["product_dev"]), 1e-10)
    return out


def _suite_appendix(cfg: SuiteConfig) -> _Rows:
    out = _Rows("appendix", cfg)
    for d in cfg.dims:
        for i in range(cfg.trials):
            triples = [
                (random_pd(d, cfg.seed, 1000 + i + 10 * j),
                 random_pd(d, cfg.seed, 1100 + i + 10 * j),
                 random_contraction(d, cfg.seed, 1200 + i + 10 * j))
                for j in range(cfg.m)
            ]
            for t in (0.37, 1.0, 2.5):
                rep = ineq.schwarz_gap(triples, t)
                out.gap("schwarz", d, i, rep)
                out.deviation("schwarz_residual_identity", d, i, None,
                              rep.params["identity_dev"],
                              1e-9 * (1.0 + abs(rep.lhs) + abs(rep.rhs)),
                              params={"t": t})
            # p = 2 reduction with the exact equality inputs X_j = A_j T
            t_mat = random_contraction(d, cfg.seed, 1300 + i)
            pairs = [(aj, aj @ t_mat) for aj, _, _ in triples]
            rep = ineq.p2_convexity_gap(pairs)
            out.deviation("p2_equality", d, i, 2.0, abs(rep.gap),
                          1e-10 * (1.0 + abs(rep.lhs)))
    return out


_SUITE_FNS = {
    "convexity": _suite_convexity,
    "monotonicity": _suite_monotonicity,
    "ssa": _suite_ssa,
    "carlen-lieb": _suite_carlen_lieb,
    "equality": _suite_equality,
    "appendix": _suite_appendix,
}


def jobs_from_env() -> int:
    try:
        return max(1, int(os.environ.get("WYDLAB_JOBS", "1")))
    except ValueError:
        return 1


def run_suite(config: SuiteConfig) -> RunReport:
    """Execute the selected suites and aggregate rows in canonical order."""
    selected = [s for s in SUITE_NAMES if s in config.suites]
    jobs = jobs_from_env()
    if jobs > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda s: _SUITE_FNS[s](config), selected))
    else:
        results = [_SUITE_FNS[s](config) for s in selected]
    rows = [row for res in results for row in res.rows]
    degraded = any(res.degraded for res in results)
    return RunReport(config.to_dict(), rows, degraded=degraded)


def exit_code(report: RunReport) -> int:
    """0 all pass, 1 violation beyond tolerance, 3 numerical degradation."""
    if report.failed:
        return 1
    if report.degraded:
        return 3
    return 0
