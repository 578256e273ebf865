"""Greedy one-pass suite construction, the non-optimizing baseline.

Cases are built factor by factor: factors ordered by how many uncovered
pairs they still touch, each factor assigned the level that closes the most
uncovered pairs against the picks made so far.  Levels that would complete
an avoid tuple are skipped, with chronological backtracking when a factor
runs out of levels.  Ties rotate deterministically from a seed so different
seeds give different (still valid) suites.

Must tuples are ignored here: this generator exists as a fast baseline and
a warm-start source, and the pipeline's must phase takes care of them.
"""

from __future__ import annotations

import numpy as np

from .core import ConstraintSet, FactorSystem, PaircoverError, TestCase, TestSuite
from .interactions import CoverageState, InteractionUniverse, find_extension

MAX_BACKTRACKS_PER_CASE = 10_000


class _FactorAdjacency:
    """Per-factor flat view of the universe for vectorized level scoring."""

    def __init__(self, universe: InteractionUniverse):
        system = universe.system
        n = system.n_factors
        f1, v1 = universe.f1, universe.v1
        f2, v2 = universe.f2, universe.v2
        ids = np.arange(len(universe), dtype=np.int64)
        self.level: list[np.ndarray] = []
        self.other_f: list[np.ndarray] = []
        self.other_v: list[np.ndarray] = []
        self.pair: list[np.ndarray] = []
        for f in range(n):
            a_side = f1 == f
            b_side = f2 == f
            self.level.append(np.concatenate([v1[a_side], v2[b_side]]))
            self.other_f.append(np.concatenate([f2[a_side], f1[b_side]]))
            self.other_v.append(np.concatenate([v2[a_side], v1[b_side]]))
            self.pair.append(np.concatenate([ids[a_side], ids[b_side]]))


def _avoid_by_pick(constraints: ConstraintSet) -> dict:
    out: dict = {}
    for av in constraints.avoid:
        d = dict(av.picks)
        for f, v in av.picks:
            out.setdefault((f, v), []).append(d)
    return out


def _level_allowed(f: int, v: int, assigned: np.ndarray, av_by_pick: dict) -> bool:
    for d in av_by_pick.get((f, v), ()):
        if all(g == f or assigned[g] == w for g, w in d.items()):
            return False
    return True


def greedy_suite(
    system: FactorSystem,
    constraints: ConstraintSet,
    universe: InteractionUniverse | None = None,
    seed: int = 0,
    max_cases: int | None = None,
) -> TestSuite:
    """Cover every achievable pair with one greedy case after another."""
    constraints.validate_against(system)
    if universe is None:
        universe = InteractionUniverse(system, constraints)
    n = system.n_factors
    card = system.cardinalities
    adj = _FactorAdjacency(universe)
    av_by_pick = _avoid_by_pick(constraints)
    rng = np.random.default_rng(seed)
    state = CoverageState(universe)
    suite = TestSuite(system)
    limit = max_cases if max_cases is not None else len(universe) + 1

    while not state.is_full:
        if len(suite) >= limit:
            raise PaircoverError(f"greedy did not converge within {limit} cases")
        unc = ~state.mask
        # factor order: most uncovered pairs touched first
        touch = np.zeros(n, dtype=np.int64)
        np.add.at(touch, universe.f1[unc], 1)
        np.add.at(touch, universe.f2[unc], 1)
        factor_order = sorted(range(n), key=lambda f: (-int(touch[f]), f))

        assigned = np.full(n, -1, dtype=np.int64)
        # per-factor candidate orderings, built lazily at first visit
        candidates: list[list[int] | None] = [None] * n
        cursor = [0] * n
        pos = 0
        backtracks = 0
        while 0 <= pos < n:
            f = factor_order[pos]
            if candidates[pos] is None:
                lv, of, ov, pr = adj.level[f], adj.other_f[f], adj.other_v[f], adj.pair[f]
                hit = unc[pr] & (assigned[of] == ov)
                scores = np.bincount(lv[hit], minlength=card[f])
                if not hit.any():
                    # nothing assigned connects yet: rank by uncovered potential
                    scores = np.bincount(lv[unc[pr]], minlength=card[f])
                rot = int(rng.integers(card[f]))
                keys = sorted(
                    range(card[f]),
                    key=lambda v: (-int(scores[v]), (v - rot) % card[f]),
                )
                candidates[pos] = keys
                cursor[pos] = 0
            placed = False
            keys = candidates[pos]
            while cursor[pos] < len(keys):
                v = keys[cursor[pos]]
                cursor[pos] += 1
                if _level_allowed(f, v, assigned, av_by_pick):
                    assigned[f] = v
                    placed = True
                    break
            if placed:
                pos += 1
            else:
                candidates[pos] = None
                assigned[f] = -1
                pos -= 1
                if pos >= 0:
                    assigned[factor_order[pos]] = -1
                backtracks += 1
                if backtracks > MAX_BACKTRACKS_PER_CASE:
                    break

        if pos == n:
            tc = TestCase(tuple(int(v) for v in assigned))
            if state.would_cover(tc) == 0:
                tc = _progress_case(system, constraints, universe, state)
        else:
            # constraints cornered the greedy walk; fall back to a witness
            tc = _progress_case(system, constraints, universe, state)
        state.mark_case(tc)
        suite.append(tc)
    return suite


def _progress_case(
    system: FactorSystem,
    constraints: ConstraintSet,
    universe: InteractionUniverse,
    state: CoverageState,
) -> TestCase:
    """A valid case containing the first uncovered pair; always exists."""
    u = int(state.uncovered_indices()[0])
    tc = find_extension(
        universe.interaction(u).as_assignment(), system, constraints
    )
    if tc is None:
        raise PaircoverError("universe contains an unachievable pair")
    return tc
