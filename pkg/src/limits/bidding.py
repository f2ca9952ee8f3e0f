"""Finite-size facts about one round of bidding."""
from typing import Iterable, Optional

from src.utils.errors import BadIndex


def expected_first_claims(m: int, members: Iterable[int], blue: Optional[int] = None) -> float:
    """
    E[C_A] when agents 1, 2, ... each pick one of m items uniformly and C_A
    counts members of A whose pick is a blue item nobody earlier picked:

        E[C_A] = (blue / m) * sum_{a in A} (1 - 1/m)^{a-1}

    `blue` defaults to m (every item counts). Var(C_A) <= E[C_A].
    """
    if m < 1:
        raise BadIndex(f"need at least one item, got m={m}")
    blue = m if blue is None else blue
    if not 0 <= blue <= m:
        raise BadIndex(f"blue must lie in 0..{m}, got {blue}")
    miss = 1.0 - 1.0 / m
    total = 0.0
    for a in members:
        if a < 1:
            raise BadIndex(f"agents are numbered from 1, got {a}")
        total += miss ** (a - 1)
    return blue / m * total
