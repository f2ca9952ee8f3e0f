"""Exact rank distributions for small instances.

Two oracles:

brute_force_distribution
    Exact D(p, s) by enumerating every outcome of the lazy reveal process
    with rational arithmetic. It rests on one fact shared by all three
    mechanisms: whenever an unmatched agent reveals a preference, every
    item they have already revealed is taken. So the next reveal is
    uniform over the agent's unrevealed items, all currently available
    items are among them, and the available items are exchangeable. The
    state therefore only needs each unmatched agent's reveal count, not
    item identities.

enumerate_profile_distribution
    The literal definition: run the mechanism on each of the (n!)^n
    preference profiles and average. Only feasible for n <= 3; it is what
    the first oracle is checked against.
"""
from collections import defaultdict
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Dict, List, Tuple

import numpy as np

from src.mechanisms.engine import assign_from_profile
from src.models.mechanism import Mechanism
from src.models.rank_distribution import Provenance, RankDistribution
from src.utils.errors import EmptyInstance
from src.utils.logger import setup_logger
from src.utils.resource_guard import resource_guard

logger = setup_logger("Oracle")

FractionMatrix = List[List[Fraction]]


def first_available_draws(unrevealed: int, available: int) -> List[Fraction]:
    """
    Law of the number of reveals needed to hit one of `available` items
    when revealing uniformly without replacement from `unrevealed` items.

    Returns P(draws = g) for g = 1..unrevealed - available + 1.
    """
    law = []
    miss = Fraction(1)
    for g in range(1, unrevealed - available + 2):
        remaining = unrevealed - (g - 1)
        law.append(miss * Fraction(available, remaining))
        miss *= Fraction(remaining - available, remaining)
    return law


def _empty_matrix(n: int) -> FractionMatrix:
    return [[Fraction(0)] * n for _ in range(n)]


def _sd_fractions(n: int) -> FractionMatrix:
    matrix = _empty_matrix(n)
    for k in range(1, n + 1):
        # agent k faces n - k + 1 available items and has revealed nothing
        for g, p in enumerate(first_available_draws(n, n - k + 1), start=1):
            matrix[k - 1][g - 1] = p
    return matrix


def _nb_fractions(n: int) -> FractionMatrix:
    matrix = _empty_matrix(n)
    frontier: Dict[Tuple[int, ...], Fraction] = {tuple(range(1, n + 1)): Fraction(1)}
    r = 0
    while frontier:
        r += 1
        unrevealed = n - (r - 1)
        next_frontier: Dict[Tuple[int, ...], Fraction] = defaultdict(Fraction)
        for remaining, prob in frontier.items():
            k = len(remaining)
            # (claimed this round, losers so far) -> probability
            partial: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {(0, ()): prob}
            for p in remaining:
                step: Dict[Tuple[int, Tuple[int, ...]], Fraction] = defaultdict(Fraction)
                for (claimed, losers), pr in partial.items():
                    win = Fraction(k - claimed, unrevealed)
                    if win:
                        matrix[p - 1][r - 1] += pr * win
                        step[(claimed + 1, losers)] += pr * win
                    if win != 1:
                        step[(claimed, losers + (p,))] += pr * (1 - win)
                partial = step
            for (_, losers), pr in partial.items():
                if losers:
                    next_frontier[losers] += pr
        frontier = dict(next_frontier)
    return matrix


def _ab_fractions(n: int) -> FractionMatrix:
    matrix = _empty_matrix(n)
    # state: ((position, revealed count), ...) for unmatched agents
    frontier: Dict[Tuple[Tuple[int, int], ...], Fraction] = {
        tuple((p, 0) for p in range(1, n + 1)): Fraction(1)
    }
    while frontier:
        next_frontier: Dict[Tuple[Tuple[int, int], ...], Fraction] = defaultdict(Fraction)
        for remaining, prob in frontier.items():
            m = len(remaining)
            partial: Dict[Tuple[int, Tuple[Tuple[int, int], ...]], Fraction] = {(0, ()): prob}
            for p, revealed in remaining:
                draws_law = first_available_draws(n - revealed, m)
                step: Dict[Tuple[int, Tuple[Tuple[int, int], ...]], Fraction] = defaultdict(Fraction)
                for (claimed, losers), pr in partial.items():
                    win = Fraction(m - claimed, m)
                    for g, pg in enumerate(draws_law, start=1):
                        rank = revealed + g
                        if win:
                            matrix[p - 1][rank - 1] += pr * pg * win
                            step[(claimed + 1, losers)] += pr * pg * win
                        if win != 1:
                            step[(claimed, losers + ((p, rank),))] += pr * pg * (1 - win)
                partial = step
            for (_, losers), pr in partial.items():
                if losers:
                    next_frontier[losers] += pr
        frontier = dict(next_frontier)
    return matrix


def brute_force_fractions(mechanism: Mechanism, n: int) -> FractionMatrix:
    """Exact D(p, s) as Fractions; rows are positions 1..n, columns ranks 1..n."""
    if n < 1:
        raise EmptyInstance(f"need at least one agent, got n={n}")
    resource_guard.check_oracle(n)
    builder = {
        Mechanism.SD: _sd_fractions,
        Mechanism.NB: _nb_fractions,
        Mechanism.AB: _ab_fractions,
    }[Mechanism(mechanism)]
    matrix = builder(n)
    logger.debug(f"Exact {Mechanism(mechanism).value} distribution for n={n}")
    return matrix


def _to_distribution(mechanism: Mechanism, n: int, matrix: FractionMatrix,
                     provenance: Provenance) -> RankDistribution:
    return RankDistribution(
        n=n,
        mechanism=mechanism,
        provenance=provenance,
        positions=list(range(1, n + 1)),
        probabilities=np.array([[float(x) for x in row] for row in matrix]),
    )


def brute_force_distribution(mechanism: Mechanism, n: int) -> RankDistribution:
    """Exact rank distribution matrix for n <= 6."""
    return _to_distribution(mechanism, n, brute_force_fractions(mechanism, n), Provenance.BRUTE_FORCE)


def enumerate_profile_fractions(mechanism: Mechanism, n: int) -> FractionMatrix:
    """Average over every preference profile; n <= 3."""
    if n < 1:
        raise EmptyInstance(f"need at least one agent, got n={n}")
    resource_guard.check_oracle(n, exhaustive_profiles=True)

    orders = list(permutations(range(n)))
    weight = Fraction(1, factorial(n) ** n)
    counts = [[0] * n for _ in range(n)]
    for profile in product(orders, repeat=n):
        assignment = assign_from_profile(mechanism, profile)
        for record in assignment.records:
            counts[record.agent_position - 1][record.rank_obtained - 1] += 1
    return [[weight * c for c in row] for row in counts]


def enumerate_profile_distribution(mechanism: Mechanism, n: int) -> RankDistribution:
    return _to_distribution(
        mechanism, n, enumerate_profile_fractions(mechanism, n), Provenance.BRUTE_FORCE
    )
