"""Named verification suites: seeded identity checks over the base-point data.

Each suite returns a list of CheckResult records; a suite passes iff every
check does.  The same functions back the command-line `verify` subcommand
and the acceptance tests, so both always agree on what was verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .bracket import (
    PoissonOp,
    check_operator_homogeneity,
    check_series_homogeneity,
    def_a_residual,
    deformed_entries_for_residual,
    dx_commutator_residual,
    euler_commutator_residual,
    r_deform_bracket,
    s_deform_bracket,
    uniqueness_residuals,
)
from .diffop import DiffOperator, conjugate_by_miura
from .genus0 import Genus0Data, check_commutation, trr_extend
from .givental import GiventalGen, r_deform_omega, triple_omega
from .jetcalc import HbarSeries, JetPoly, random_jetpoly
from .kdvbase import kdv_flow, kdv_omega_table, quasi_miura


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def to_obj(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


def _result(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name, ok, detail)


def suite_lemmas(seed: int = 7, count: int = 100) -> list[CheckResult]:
    """The two operator-commutation identities on seeded random polynomials."""
    rng = random.Random(seed)
    bad_dx = 0
    for _ in range(count):
        b = random_jetpoly(rng)
        f = random_jetpoly(rng)
        zeta = rng.randint(1, 3)
        if not dx_commutator_residual(b, zeta, f).is_zero():
            bad_dx += 1
    out = [_result("total-derivative-commutes-with-evolution",
                   bad_dx == 0, f"{count - bad_dx}/{count} zero residuals")]
    bad_mixed = 0
    for _ in range(count):
        a = random_jetpoly(rng, n_terms=2)
        b = random_jetpoly(rng, n_terms=2)
        f = random_jetpoly(rng, n_terms=2)
        if not euler_commutator_residual(
                a, rng.randint(0, 3), rng.randint(1, 3),
                b, rng.randint(1, 3), f).is_zero():
            bad_mixed += 1
    out.append(_result("euler-operator-commutator-expansion",
                       bad_mixed == 0, f"{count - bad_mixed}/{count} zero residuals"))
    return out


def suite_commutation(pmax: int = 3) -> list[CheckResult]:
    """Dispersionless commutation residuals at the one-color cubic point."""
    table = trr_extend(Genus0Data(1, {(1, 1): JetPoly.var(1, 0)}), pmax + 1, pmax)
    bad = []
    for p in range(pmax + 1):
        for q in range(pmax + 1):
            if not check_commutation(table, 1, p, 1, q).is_zero():
                bad.append((p, q))
    return [_result("hamiltonian-commutation-residuals", not bad,
                    f"all ({pmax + 1}x{pmax + 1}) residuals zero" if not bad
                    else f"nonzero at {bad}")]


def suite_quasimiura() -> list[CheckResult]:
    """Consequences of the rational coordinate change at the base point."""
    out = []
    m = quasi_miura("forward", 2)
    d = DiffOperator.dx_op(1, 2)
    conj = conjugate_by_miura(d, m)
    out.append(_result("bracket-invariance-under-coordinate-change",
                       conj == d, "conjugate of d equals d through hbar^2"))
    riemann = [HbarSeries.of(JetPoly.var(1, 0) * JetPoly.var(1, 1), 2)]
    pushed = m.push_flow(riemann)[0]
    out.append(_result("dispersionless-flow-maps-to-dispersive-flow",
                       pushed == kdv_flow(1),
                       "rational terms cancel through hbar^2"))
    roundtrip = m.express_in_target(m.forward[0])
    out.append(_result("forward-inverse-roundtrip",
                       roundtrip == HbarSeries.var(1, 0, 2), ""))
    return out


def suite_homogeneity(pmax: int = 5) -> list[CheckResult]:
    """Degree-doubling grading of tables, deformations, and the operator."""
    out = []
    table = kdv_omega_table(pmax, pmax, 1)
    bad = [key for key, series in table.items()
           if not check_series_homogeneity(series, 0).ok]
    out.append(_result("table-entry-grading", not bad,
                       f"{(pmax + 1) ** 2} entries at degree 2g"))
    table2 = kdv_omega_table(2, 2, 2)
    bad2 = [key for key, series in table2.items()
            if not check_series_homogeneity(series, 0).ok]
    out.append(_result("table-entry-grading-hbar2", not bad2, ""))
    gen = GiventalGen("r", 1, [[1]])
    bad3 = []
    for p in range(3):
        for q in range(3):
            if not check_series_homogeneity(
                    r_deform_omega(table, gen, 1, p, 1, q), 0).ok:
                bad3.append((p, q))
    out.append(_result("deformed-entry-grading", not bad3, ""))
    dP = r_deform_bracket(table, PoissonOp.dx(1, 1), gen)
    out.append(_result("deformed-operator-grading",
                       check_operator_homogeneity(dP, 1).ok,
                       "order-k coefficient at hbar^g has degree 2g-k+1"))
    bad4 = []
    for k in [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 1)]:
        t = triple_omega(table, (1, k[0]), (1, k[1]), (1, k[2]))
        if not check_series_homogeneity(t, 1).ok:
            bad4.append(k)
    out.append(_result("triple-correlator-grading", not bad4, "degree 2g+1"))
    return out


def suite_uniqueness(pmax: int = 3) -> list[CheckResult]:
    """Only d solves the dispersionless defining relation."""
    out = []
    table0 = trr_extend(Genus0Data(1, {(1, 1): JetPoly.var(1, 0)}),
                        pmax + 1, pmax)
    ok = all(r.is_zero() for _, r in
             uniqueness_residuals(table0, DiffOperator.dx_op(1, 0), pmax))
    out.append(_result("defining-relation-accepts-d", ok, f"p <= {pmax}"))
    scaled = DiffOperator.dx_op(1, 0, scale=2)
    ok = any(not r.is_zero() for _, r in uniqueness_residuals(table0, scaled, 0))
    out.append(_result("defining-relation-rejects-scaled-d", ok, ""))
    pert = DiffOperator(1, 0, {(1, 1): {1: HbarSeries.const(1, 0),
                                        2: HbarSeries.of(JetPoly.var(1, 1), 0)}})
    ok = any(not r.is_zero() for _, r in uniqueness_residuals(table0, pert, 2))
    out.append(_result("defining-relation-rejects-perturbed-d", ok, ""))
    conj = conjugate_by_miura(DiffOperator.dx_op(1, 2), quasi_miura("inverse", 2))
    out.append(_result("inverse-change-keeps-zero-order0",
                       conj.coeff(1, 1, 0).is_zero(),
                       "no constant term through hbar^2"))
    return out


def suite_defining_equation(levels=(1, 2, 3), pmax: int = 2,
                            trunc: int = 1) -> list[CheckResult]:
    """Linearized defining-equation residuals for both generator kinds."""
    out = []
    bound = pmax + 1 + max(levels)
    table = kdv_omega_table(bound, bound, min(trunc, 1))
    pop = PoissonOp.dx(1, table.trunc)
    for level in levels:
        gen = GiventalGen("r", level, [[0]] if level % 2 == 0 else [[1]])
        dP = r_deform_bracket(table, pop, gen)
        bad = []
        for p in range(pmax + 1):
            ent = deformed_entries_for_residual(table, gen, 1, p)
            if not def_a_residual(table, pop, ent, dP, 1, p, 1).is_zero():
                bad.append(p)
        out.append(_result(f"upper-bracket-defining-equation-level-{level}",
                           not bad, f"p <= {pmax}, hbar^{table.trunc}"))
        sgen = GiventalGen("s", level, [[0]] if level % 2 == 0 else [[1]])
        dPs = s_deform_bracket(pop, sgen)
        bad = []
        for p in range(pmax + 1):
            ent = deformed_entries_for_residual(table, sgen, 1, p)
            if not def_a_residual(table, pop, ent, dPs, 1, p, 1).is_zero():
                bad.append(p)
        out.append(_result(f"lower-bracket-defining-equation-level-{level}",
                           not bad, f"p <= {pmax}, hbar^{table.trunc}"))
    if trunc >= 2:
        table2 = kdv_omega_table(2, 2, 2)
        pop2 = PoissonOp.dx(1, 2)
        gen = GiventalGen("r", 1, [[1]])
        dP2 = r_deform_bracket(table2, pop2, gen)
        ent = deformed_entries_for_residual(table2, gen, 1, 0)
        res = def_a_residual(table2, pop2, ent, dP2, 1, 0, 1)
        out.append(_result("upper-bracket-defining-equation-hbar2",
                           res.is_zero(), "level 1, p = 0, paper-sourced entries"))
    return out


SUITES = {
    "lemmas": lambda args: suite_lemmas(args.get("seed", 7), args.get("count", 100)),
    "commutation": lambda args: suite_commutation(args.get("pmax", 3)),
    "quasimiura": lambda args: suite_quasimiura(),
    "homogeneity": lambda args: suite_homogeneity(),
    "uniqueness": lambda args: suite_uniqueness(args.get("pmax", 3)),
    "defining-equation": lambda args: suite_defining_equation(
        pmax=args.get("pmax", 2), trunc=args.get("hbar", 1)),
}


def run_suite(name: str, **args) -> list[CheckResult]:
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(SUITES[key](args))
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](args)
