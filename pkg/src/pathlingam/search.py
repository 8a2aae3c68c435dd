"""Causal ordering by shortest-path search over the subset lattice.

A lattice node is the set of features not yet placed in the order; the root
is the full set, the goal is the empty set, and every root-to-goal path is a
permutation. The edge leaving a state by choosing one candidate is weighted
by how dependent that candidate still is on the rest, so the cheapest path is
the most plausible causal ordering. Edges into the goal weigh exactly 0.

Edge weights are evaluated lazily (only when a state is expanded) and
memoized per lattice edge, which also serves the path-distribution module.
"""

import heapq
import time
from dataclasses import dataclass

import numpy as np

from .errors import PriorUnsatisfiable, ZeroVariance
from .measures import MeasureConfig, MeasureKind, knn_step_cost, plr_costs, residual
from .model import CausalOrder, PriorKnowledge, SearchState, standardize_values


@dataclass(frozen=True)
class SearchResult:
    """An ordering plus how much work the search did to find it."""

    order: CausalOrder
    edges_evaluated: int
    states_expanded: int
    wall_time: float


def is_state_allowed(remaining, prior):
    """Whether a lattice state is consistent with the prior orderings.

    A state is disallowed iff some pair (a, b) has a still remaining while b
    was already chosen: that would place b before a. The full and empty sets
    are always allowed.
    """
    if prior is None:
        return True
    remaining = int(remaining)
    for a, b in prior.pairs:
        if remaining & (1 << a) and not remaining & (1 << b):
            return False
    return True


def residualize(state, chosen):
    """Remove ``chosen`` from a state, regressing it out of every column.

    This is the single lattice transition: each remaining column is replaced
    by its least-squares residual on the chosen column.
    """
    pos = state.position(chosen)
    chosen_col = state.residuals[:, pos]
    if chosen_col.std() == 0.0:
        raise ZeroVariance(f"column for feature {chosen} is constant at this state")
    kept = [i for i in range(state.residuals.shape[1]) if i != pos]
    if kept:
        columns = np.column_stack(
            [residual(state.residuals[:, i], chosen_col) for i in kept]
        )
    else:
        columns = np.empty((state.residuals.shape[0], 0))
    return SearchState(
        remaining=state.remaining & ~(1 << int(chosen)),
        residuals=columns,
        cost_from_start=state.cost_from_start,
    )


class Lattice:
    """Shared residual and edge-weight cache over the 2^p subset lattice.

    Residuals are memoized per bitset and computed canonically, by removing
    features in ascending index order; sequential univariate regressions over
    the same removed set agree up to rounding regardless of order, and the
    canonical order makes the cached values deterministic. Edge weights are
    therefore functions of (state, candidate) alone and are computed at most
    once each; ``edges_evaluated`` counts those computations.
    """

    def __init__(self, data, config=None, prior=None):
        self.config = config if config is not None else MeasureConfig()
        self.prior = prior if prior is not None else PriorKnowledge()
        self.p = data.n_features
        if self.p < 2:
            raise ValueError("need at least 2 features")
        if data.n_samples < self.p + 2:
            raise ValueError("need at least p + 2 samples")
        if self.prior and self.prior.max_index() >= self.p:
            raise ValueError("prior references a feature index outside the data")
        self.full = (1 << self.p) - 1
        self._columns = {self.full: standardize_values(data.values)}
        self._costs = {}
        # blockers[f]: bitset of features that must precede f.
        self.blockers = [0] * self.p
        for a, b in self.prior.pairs:
            self.blockers[b] |= 1 << a
        self.edges_evaluated = 0

    def columns(self, mask):
        cached = self._columns.get(mask)
        if cached is not None:
            return cached
        removed = self.full & ~mask
        last = removed.bit_length() - 1  # canonical: peel the highest index
        parent = mask | (1 << last)
        state = SearchState(remaining=parent, residuals=self.columns(parent))
        columns = residualize(state, last).residuals
        self._columns[mask] = columns
        return columns

    def allowed_candidates(self, mask):
        """Features choosable at ``mask`` without violating the prior."""
        out = []
        for f in range(self.p):
            bit = 1 << f
            if mask & bit and not mask & self.blockers[f]:
                out.append(f)
        return out

    def costs_at(self, mask, cost_from_start=0.0):
        """Step cost of each allowed candidate at a state with >= 2 features.

        Returns a dict feature -> cost; memoized, so repeated visits do not
        recount edges.
        """
        cached = self._costs.get(mask)
        if cached is not None:
            return cached
        allowed = self.allowed_candidates(mask)
        state = SearchState(
            remaining=mask,
            residuals=self.columns(mask),
            cost_from_start=cost_from_start,
        )
        costs = {}
        if self.config.kind is MeasureKind.PLR:
            by_position = plr_costs(state)
            for f in allowed:
                costs[f] = float(by_position[state.position(f)])
        else:
            for f in allowed:
                costs[f] = knn_step_cost(f, state, self.config)
        self.edges_evaluated += len(allowed)
        self._costs[mask] = costs
        return costs


def _reconstruct(parent, full):
    order, step_costs = [], []
    mask = 0
    while mask != full:
        prev, feature, weight = parent[mask]
        order.append(feature)
        step_costs.append(weight)
        mask = prev
    order.reverse()
    step_costs.reverse()
    return CausalOrder(
        order=tuple(order),
        step_costs=tuple(step_costs),
        total_cost=sum(step_costs),
    )


def shortest_path_order(data, config=None, prior=None):
    """Minimum-total-cost causal ordering via Dijkstra with lazy edges.

    Deterministic tie-breaking: frontier ties pop the numerically smaller
    remaining-bitset first, and the first relaxation of a node wins, with
    candidates processed in ascending index order.
    """
    start = time.perf_counter()
    lattice = Lattice(data, config, prior)
    full = lattice.full
    dist = {full: 0.0}
    parent = {}
    done = set()
    frontier = [(0.0, full)]
    states_expanded = 0
    while frontier:
        cost, mask = heapq.heappop(frontier)
        if mask in done:
            continue
        done.add(mask)
        if mask == 0:
            order = _reconstruct(parent, full)
            return SearchResult(
                order=order,
                edges_evaluated=lattice.edges_evaluated,
                states_expanded=states_expanded,
                wall_time=time.perf_counter() - start,
            )
        states_expanded += 1
        if mask.bit_count() == 1:
            # Goal edge: weight exactly 0, no measure evaluation.
            successors = [(mask.bit_length() - 1, 0.0)]
        else:
            successors = sorted(lattice.costs_at(mask, cost).items())
        for feature, weight in successors:
            child = mask & ~(1 << feature)
            new_cost = cost + weight
            if new_cost < dist.get(child, np.inf):
                dist[child] = new_cost
                parent[child] = (mask, feature, weight)
                heapq.heappush(frontier, (new_cost, child))
    raise PriorUnsatisfiable("no ordering satisfies the prior")


def direct_lingam_order(data, config=None, prior=None):
    """Greedy baseline: repeatedly extract the most independent candidate.

    Uses the same lattice edge weights as the shortest-path search, so its
    total cost is an upper bound on the shortest-path total. Ties go to the
    lower feature index.
    """
    start = time.perf_counter()
    lattice = Lattice(data, config, prior)
    mask = lattice.full
    order, step_costs = [], []
    states_expanded = 0
    while mask:
        states_expanded += 1
        if mask.bit_count() == 1:
            order.append(mask.bit_length() - 1)
            step_costs.append(0.0)
            break
        costs = lattice.costs_at(mask, sum(step_costs))
        if not costs:
            raise PriorUnsatisfiable("no candidate is allowed by the prior")
        best = min(costs, key=lambda f: (costs[f], f))
        order.append(best)
        step_costs.append(costs[best])
        mask &= ~(1 << best)
    causal = CausalOrder(
        order=tuple(order), step_costs=tuple(step_costs), total_cost=sum(step_costs)
    )
    return SearchResult(
        order=causal,
        edges_evaluated=lattice.edges_evaluated,
        states_expanded=states_expanded,
        wall_time=time.perf_counter() - start,
    )
