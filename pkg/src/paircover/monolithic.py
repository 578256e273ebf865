"""One-shot formulation: a fixed number of case slots, solved whole.

For ``m`` slots the model picks one level per factor per slot and maximizes
the number of distinct achievable pairs covered across slots.  Avoid tuples
become per-slot knapsack rows; each must tuple gets containment indicator
variables tied to the slots, at least one of which has to fire.

The coverage chain is x (slot picks level) -> q (slot covers pair) -> p
(pair covered anywhere).  q needs both directions: q <= each x so a slot
cannot claim a pair it does not contain, and q >= x + x - 1 so propagation
fixes q as soon as both picks are down.  p <= sum of q over slots.

``minimal_suite`` searches m upward from a pair-packing lower bound and
returns the first m whose model covers everything, which is the exact
minimum suite size.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .core import (
    ConstraintSet,
    FactorSystem,
    PaircoverError,
    StructureError,
    TestCase,
    TestSuite,
    validate_case,
)
from .interactions import CoverageState, InteractionUniverse
from .milp import MilpModel, MilpSolution, SolveStatus, solve
from .milp.reference import solve_reference


class ModelSizeError(PaircoverError):
    """The requested monolithic model would exceed the variable cap."""


class MonolithicTimeout(PaircoverError):
    """A fixed-m solve hit its time limit before deciding coverage."""


DEFAULT_TIME_LIMIT = 3600.0
DEFAULT_MAX_VARS = 200_000


@dataclass
class MonolithicModel:
    """The assembled program plus everything needed to decode a solution."""

    milp: MilpModel
    system: FactorSystem
    constraints: ConstraintSet
    universe: InteractionUniverse
    m: int
    x_index: dict = field(repr=False, default_factory=dict)  # (slot, factor, level) -> var
    p_index: dict = field(repr=False, default_factory=dict)  # universe idx -> var

    def decode(self, values) -> TestSuite:
        suite = TestSuite(self.system)
        for c in range(self.m):
            levels = []
            for i in range(self.system.n_factors):
                pick = None
                for a in range(self.system.cardinality(i)):
                    if values[self.x_index[(c, i, a)]] == 1:
                        if pick is not None:
                            raise StructureError(
                                f"slot {c} factor {i} has two levels set"
                            )
                        pick = a
                if pick is None:
                    raise StructureError(f"slot {c} factor {i} has no level set")
                levels.append(pick)
            tc = TestCase(tuple(levels))
            if not validate_case(tc, self.system, self.constraints):
                raise StructureError(f"decoded slot {c} violates an avoid tuple")
            suite.append(tc)
        return suite


def build_monolithic(
    system: FactorSystem,
    constraints: ConstraintSet,
    m: int,
    universe: InteractionUniverse | None = None,
    max_vars: int = DEFAULT_MAX_VARS,
) -> MonolithicModel:
    """Assemble the m-slot coverage maximization program."""
    if m < 1:
        raise StructureError(f"need at least one slot, got m={m}")
    constraints.validate_against(system)
    if universe is None:
        universe = InteractionUniverse(system, constraints)
    n = system.n_factors
    card = system.cardinalities
    nu = len(universe)
    est_vars = m * sum(card) + m * nu + nu + m * len(constraints.must)
    if est_vars > max_vars:
        raise ModelSizeError(
            f"monolithic model would need {est_vars} variables (cap {max_vars})"
        )

    milp = MilpModel(sense="max", name=f"mono_m{m}")
    x_index: dict = {}
    for c in range(m):
        for i in range(n):
            for a in range(card[i]):
                x_index[(c, i, a)] = milp.add_var(name=f"x_c{c}_f{i}_l{a}")
    q_index: dict = {}
    for c in range(m):
        for u in range(nu):
            q_index[(c, u)] = milp.add_var(name=f"q_c{c}_u{u}")
    p_index: dict = {}
    for u in range(nu):
        p_index[u] = milp.add_var(name=f"p_u{u}", obj=1)
    y_index: dict = {}
    for g in range(len(constraints.must)):
        for c in range(m):
            y_index[(g, c)] = milp.add_var(name=f"y_g{g}_c{c}")

    # one level per factor per slot
    for c in range(m):
        for i in range(n):
            milp.add_constraint(
                {x_index[(c, i, a)]: 1 for a in range(card[i])},
                "==",
                1,
                name=f"one_c{c}_f{i}",
            )
    # q tied to both picks
    for c in range(m):
        for u in range(nu):
            xi = x_index[(c, int(universe.f1[u]), int(universe.v1[u]))]
            xj = x_index[(c, int(universe.f2[u]), int(universe.v2[u]))]
            qv = q_index[(c, u)]
            milp.add_constraint({qv: 1, xi: -1}, "<=", 0, name=f"qa_c{c}_u{u}")
            milp.add_constraint({qv: 1, xj: -1}, "<=", 0, name=f"qb_c{c}_u{u}")
            milp.add_constraint(
                {xi: 1, xj: 1, qv: -1}, "<=", 1, name=f"ql_c{c}_u{u}"
            )
    # p covered by some slot
    for u in range(nu):
        coefs = {p_index[u]: 1}
        for c in range(m):
            coefs[q_index[(c, u)]] = -1
        milp.add_constraint(coefs, "<=", 0, name=f"pu_u{u}")
    # avoid tuples per slot
    for c in range(m):
        for t, av in enumerate(constraints.avoid):
            coefs = {x_index[(c, f, v)]: 1 for f, v in av.picks}
            milp.add_constraint(coefs, "<=", len(av) - 1, name=f"av{t}_c{c}")
    # must tuples: containment indicators, at least one slot fires
    for g, mu in enumerate(constraints.must):
        for c in range(m):
            yv = y_index[(g, c)]
            coefs = {yv: -1}
            for f, v in mu.picks:
                milp.add_constraint(
                    {yv: 1, x_index[(c, f, v)]: -1}, "<=", 0, name=f"ya_g{g}_c{c}_f{f}"
                )
                coefs[x_index[(c, f, v)]] = 1
            milp.add_constraint(coefs, "<=", len(mu) - 1, name=f"yl_g{g}_c{c}")
        milp.add_constraint(
            {y_index[(g, c)]: 1 for c in range(m)}, ">=", 1, name=f"ysum_g{g}"
        )

    return MonolithicModel(milp, system, constraints, universe, m, x_index, p_index)


def coverage_lower_bound(universe: InteractionUniverse) -> int:
    """Most pairs any factor pair contributes; each case covers one of them."""
    best = 0
    for s in range(len(universe.slot_i)):
        lo = int(universe.slot_base[s])
        size = (
            int(universe.slot_base[s + 1]) - lo
            if s + 1 < len(universe.slot_base)
            else len(universe.pair_id) - lo
        )
        count = int((universe.pair_id[lo : lo + size] >= 0).sum())
        best = max(best, count)
    return best


def _full_coverage_solve(
    mono: MonolithicModel, backend: str, time_limit: float | None
) -> MilpSolution:
    nu = len(mono.universe)
    if backend == "reference":
        # a floor of |U|-1 turns the solve into "is full coverage possible",
        # so any provably dead pair prunes the whole subtree
        return solve_reference(mono.milp, time_limit=time_limit, cutoff=nu - 1)
    return solve(mono.milp, backend=backend, time_limit=time_limit)


def minimal_suite(
    system: FactorSystem,
    constraints: ConstraintSet,
    backend: str = "reference",
    time_limit: float | None = DEFAULT_TIME_LIMIT,
    max_m: int | None = None,
    max_vars: int = DEFAULT_MAX_VARS,
) -> tuple[TestSuite, dict]:
    """Exact minimum-size suite via the m-search.

    ``time_limit`` is the budget per fixed-m solve.  Raises
    :class:`MonolithicTimeout` when a solve cannot decide coverage within
    its budget, since continuing would forfeit the minimality claim.
    """
    constraints.validate_against(system)
    universe = InteractionUniverse(system, constraints)
    nu = len(universe)
    report: dict = {"backend": backend, "universe": nu, "attempts": []}
    if nu == 0 and not constraints.must:
        return TestSuite(system), report

    lb = max(coverage_lower_bound(universe), 1)
    hi = max_m if max_m is not None else nu + len(constraints.must) + 1
    t0 = time.perf_counter()
    for m in range(lb, hi + 1):
        mono = build_monolithic(system, constraints, m, universe, max_vars=max_vars)
        sol = _full_coverage_solve(mono, backend, time_limit)
        attempt = {
            "m": m,
            "status": sol.status.value,
            "objective": sol.objective,
            "nvars": mono.milp.nvars,
            "ncons": mono.milp.ncons,
        }
        report["attempts"].append(attempt)
        if sol.status == SolveStatus.TIMED_OUT or (
            sol.status == SolveStatus.FEASIBLE and (sol.objective or 0) < nu
        ):
            raise MonolithicTimeout(
                f"could not decide coverage at m={m} within {time_limit}s"
            )
        if sol.has_solution and sol.objective == nu:
            suite = mono.decode(sol.values)
            # decoded suite must actually do what the objective claims
            state = CoverageState(universe)
            for tc in suite:
                state.mark_case(tc)
            if not state.is_full:
                raise PaircoverError("decoded monolithic suite misses pairs")
            for sat in suite.satisfied_musts(constraints):
                if not sat:
                    raise PaircoverError("decoded monolithic suite misses a must")
            report["m"] = m
            report["wall_s"] = time.perf_counter() - t0
            return suite, report
    raise PaircoverError(f"no covering suite found with m <= {hi}")


def max_coverage_suite(
    system: FactorSystem,
    constraints: ConstraintSet,
    m: int,
    backend: str = "reference",
    time_limit: float | None = DEFAULT_TIME_LIMIT,
) -> tuple[TestSuite, dict]:
    """Best coverage achievable with exactly m cases (the raw maximization)."""
    constraints.validate_against(system)
    universe = InteractionUniverse(system, constraints)
    mono = build_monolithic(system, constraints, m, universe)
    sol = solve(mono.milp, backend=backend, time_limit=time_limit)
    if not sol.has_solution:
        if sol.status == SolveStatus.INFEASIBLE:
            raise StructureError(
                f"no valid suite with m={m} cases satisfies the must tuples"
            )
        raise MonolithicTimeout(f"no incumbent within {time_limit}s at m={m}")
    suite = mono.decode(sol.values)
    return suite, {
        "status": sol.status.value,
        "covered": sol.objective,
        "universe": len(universe),
        "proved_optimal": sol.status == SolveStatus.OPTIMAL,
    }
