"""Per-case generation: one small integer program per new test case.

Each step picks one level per factor to maximize the weight of still
uncovered pairs the case would close, respecting the avoid tuples and any
picks fixed up front (the must-group phase fixes the group's picks this
way).  The weight of a pair is the product of its two factors'
cardinalities, so rarer combinations get priority; an unweighted universe
makes every pair count 1.

Coverage indicators only need the upper half of the usual AND coupling
(p <= x on each side): the objective already pushes every p up, and leaving
the lower bound out keeps the model smaller.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConstraintSet,
    FactorSystem,
    PaircoverError,
    PartialAssignment,
    StructureError,
    TestCase,
    validate_case,
)
from .interactions import CoverageState, InteractionUniverse
from .milp import MilpModel, SolveStatus, solve

DEFAULT_STEP_TIME_LIMIT = 60.0


class StepTimeout(PaircoverError):
    """A per-case solve produced no usable case within its budget."""


@dataclass
class StepModel:
    milp: MilpModel
    system: FactorSystem
    constraints: ConstraintSet
    x_index: dict = field(repr=False, default_factory=dict)  # (factor, level) -> var
    p_vars: list = field(repr=False, default_factory=list)  # aligned with uncovered_ids
    uncovered_ids: list = field(repr=False, default_factory=list)

    def decode(self, values) -> TestCase:
        levels = []
        for i in range(self.system.n_factors):
            pick = None
            for a in range(self.system.cardinality(i)):
                if values[self.x_index[(i, a)]] == 1:
                    if pick is not None:
                        raise StructureError(f"factor {i} has two levels set")
                    pick = a
            if pick is None:
                raise StructureError(f"factor {i} has no level set")
            levels.append(pick)
        tc = TestCase(tuple(levels))
        if not validate_case(tc, self.system, self.constraints):
            raise StructureError("decoded step case violates an avoid tuple")
        return tc


def build_step(
    system: FactorSystem,
    constraints: ConstraintSet,
    universe: InteractionUniverse,
    uncovered_ids,
    fixed: PartialAssignment | None = None,
) -> StepModel:
    """Assemble the one-case maximization over the given uncovered pairs."""
    n = system.n_factors
    card = system.cardinalities
    milp = MilpModel(sense="max", name="step")
    x_index: dict = {}
    for i in range(n):
        for a in range(card[i]):
            x_index[(i, a)] = milp.add_var(name=f"x_f{i}_l{a}")
    uncovered_ids = [int(u) for u in uncovered_ids]
    p_vars: list[int] = []
    for u in uncovered_ids:
        p_vars.append(milp.add_var(name=f"p_u{u}", obj=int(universe.weights[u])))

    for i in range(n):
        milp.add_constraint(
            {x_index[(i, a)]: 1 for a in range(card[i])}, "==", 1, name=f"one_f{i}"
        )
    for k, u in enumerate(uncovered_ids):
        xi = x_index[(int(universe.f1[u]), int(universe.v1[u]))]
        xj = x_index[(int(universe.f2[u]), int(universe.v2[u]))]
        milp.add_constraint({p_vars[k]: 1, xi: -1}, "<=", 0, name=f"pa_u{u}")
        milp.add_constraint({p_vars[k]: 1, xj: -1}, "<=", 0, name=f"pb_u{u}")
    for t, av in enumerate(constraints.avoid):
        milp.add_constraint(
            {x_index[(f, v)]: 1 for f, v in av.picks}, "<=", len(av) - 1, name=f"av{t}"
        )
    if fixed is not None:
        for f, v in fixed.picks:
            milp.add_constraint({x_index[(f, v)]: 1}, "==", 1, name=f"fix_f{f}")

    return StepModel(milp, system, constraints, x_index, p_vars, uncovered_ids)


def generate_single_case(
    system: FactorSystem,
    constraints: ConstraintSet,
    universe: InteractionUniverse,
    coverage: CoverageState,
    fixed: PartialAssignment | None = None,
    backend: str = "reference",
    time_limit: float | None = DEFAULT_STEP_TIME_LIMIT,
) -> tuple[TestCase | None, dict]:
    """Best next case, or None when everything is already covered.

    A solve that times out with an incumbent still returns that case and
    flags the step as unproven; with no incumbent it raises StepTimeout.
    """
    uncovered = coverage.uncovered_indices()
    if len(uncovered) == 0 and fixed is None:
        return None, {"complete": True}
    t0 = time.perf_counter()
    step = build_step(system, constraints, universe, uncovered, fixed)
    sol = solve(step.milp, backend=backend, time_limit=time_limit)
    stats = {
        "uncovered_before": int(len(uncovered)),
        "status": sol.status.value,
        "objective": sol.objective,
        "nvars": step.milp.nvars,
        "ncons": step.milp.ncons,
        "wall_s": time.perf_counter() - t0,
        "proved_optimal": sol.status == SolveStatus.OPTIMAL,
    }
    stats.update({k: sol.stats.get(k) for k in ("nodes",) if k in sol.stats})
    if sol.status == SolveStatus.INFEASIBLE:
        raise StructureError(
            "step model infeasible: the fixed picks conflict with the avoid tuples"
        )
    if not sol.has_solution:
        raise StepTimeout(f"no case found within {time_limit}s")
    return step.decode(sol.values), stats


def handle_must_include(
    system: FactorSystem,
    constraints: ConstraintSet,
    universe: InteractionUniverse,
    coverage: CoverageState,
    merged_groups: list[PartialAssignment],
    backend: str = "reference",
    time_limit: float | None = DEFAULT_STEP_TIME_LIMIT,
) -> tuple[list[TestCase], list[dict]]:
    """One case per must group, each maximizing fresh coverage around it."""
    cases: list[TestCase] = []
    stats: list[dict] = []
    for merged in merged_groups:
        tc, st = generate_single_case(
            system,
            constraints,
            universe,
            coverage,
            fixed=merged,
            backend=backend,
            time_limit=time_limit,
        )
        if tc is None:  # coverage complete but the group still needs its case
            raise PaircoverError("must group produced no case")
        coverage.mark_case(tc)
        st["fixed"] = merged.picks
        cases.append(tc)
        stats.append(st)
    return cases, stats
