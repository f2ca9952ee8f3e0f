"""Outcome models - what a mechanism run produces."""
import math
from bisect import bisect_left
from collections import Counter
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence

from pydantic import BaseModel, Field, model_validator

from src.models.mechanism import Mechanism, RngSpec
from src.utils.errors import BadThetaGrid, InvalidAssignment


def segment_size(n: int, theta: float) -> int:
    """|A_n(theta)| = floor(n * theta), robust to binary rounding of theta."""
    return min(n, math.floor(n * theta + 1e-9))


def check_theta_grid(theta_grid: Sequence[float]) -> List[float]:
    grid = [float(t) for t in theta_grid]
    if not grid:
        raise BadThetaGrid("theta grid is empty")
    if any(not (0.0 <= t <= 1.0) for t in grid):
        raise BadThetaGrid(f"theta values must lie in [0, 1], got {grid}")
    if grid != sorted(grid):
        raise BadThetaGrid("theta grid must be sorted")
    return grid


class Bid(NamedTuple):
    """One bid: the round it was made in, the preference rank bid for, and whether it won."""
    round: int
    rank: int
    success: bool


class OutcomeRecord(BaseModel):
    """What happened to one agent."""

    agent_position: int = Field(ge=1)  # 1-based position in the order rho
    item: int = Field(ge=0)
    exit_round: int = Field(ge=1)
    rank_obtained: int = Field(ge=1)
    bids: List[Bid] = Field(default_factory=list)


class Assignment(BaseModel):
    """A perfect matching of n agents to n items with per-agent outcomes."""

    n: int = Field(ge=1)
    mechanism: Mechanism
    rng: Optional[RngSpec] = None  # None for runs on explicit profiles
    records: List[OutcomeRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def _valid_outcome(self) -> "Assignment":
        if self.records:
            self.check()
        return self

    def violations(self) -> List[str]:
        """
        Every broken invariant, as readable messages; empty when valid.

        Checked: one record per position in order, items form a perfect
        matching, the first agent gets rank 1, and each agent's bids end in
        its single successful bid at (exit_round, rank_obtained) after one
        failed bid per earlier round. Per mechanism: SD exits in round 1,
        NB obtains rank = round, AB obtains rank >= round with bid ranks
        strictly increasing from 1.
        """
        problems: List[str] = []
        if len(self.records) != self.n:
            return [f"expected {self.n} records, got {len(self.records)}"]
        if [r.agent_position for r in self.records] != list(range(1, self.n + 1)):
            problems.append("records are not in position order 1..n")
        if not self.is_perfect_matching():
            problems.append("items do not form a perfect matching")
        if self.records[0].rank_obtained != 1:
            problems.append(f"position 1 got rank {self.records[0].rank_obtained}")

        for record in self.records:
            p, R, S = record.agent_position, record.exit_round, record.rank_obtained
            if self.mechanism == Mechanism.SD and R != 1:
                problems.append(f"position {p}: SD exit round {R}")
            elif self.mechanism == Mechanism.NB and S != R:
                problems.append(f"position {p}: NB rank {S} in round {R}")
            elif self.mechanism == Mechanism.AB and S < R:
                problems.append(f"position {p}: AB rank {S} below round {R}")

            bids = record.bids
            if not bids:
                continue
            if [b.round for b in bids] != list(range(1, R + 1)):
                problems.append(f"position {p}: bid rounds {[b.round for b in bids]} for exit round {R}")
            if [b.success for b in bids] != [False] * (len(bids) - 1) + [True]:
                problems.append(f"position {p}: only the last bid may succeed")
            if bids[-1].rank != S:
                problems.append(f"position {p}: winning bid rank {bids[-1].rank} != rank {S}")
            if self.mechanism == Mechanism.NB and any(b.rank != b.round for b in bids):
                problems.append(f"position {p}: NB bid rank differs from its round")
            if self.mechanism == Mechanism.AB:
                ranks = [b.rank for b in bids]
                if ranks[0] != 1 or any(b <= a for a, b in zip(ranks, ranks[1:])):
                    problems.append(f"position {p}: AB bid ranks {ranks} not increasing from 1")
        return problems

    def check(self) -> "Assignment":
        """Raise InvalidAssignment listing every violation; returns self."""
        problems = self.violations()
        if problems:
            shown = "; ".join(problems[:5])
            more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
            raise InvalidAssignment(f"{self.mechanism.value} n={self.n}: {shown}{more}")
        return self

    @property
    def rounds_used(self) -> int:
        return max((r.exit_round for r in self.records), default=0)

    def ranks(self) -> List[int]:
        """rank_obtained by position (index 0 = position 1)."""
        return [r.rank_obtained for r in self.records]

    def exit_rounds(self) -> List[int]:
        return [r.exit_round for r in self.records]

    def is_perfect_matching(self) -> bool:
        return sorted(r.item for r in self.records) == list(range(self.n))

    def survivors(self, round_number: int, cutoff: Optional[int] = None) -> int:
        """Agents at positions <= cutoff still unmatched at the start of `round_number`."""
        limit = self.n if cutoff is None else cutoff
        return sum(1 for r in self.records[:limit] if r.exit_round >= round_number)

    def save(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(self.model_dump_json(indent=2))

    @classmethod
    def load(cls, path: Path) -> "Assignment":
        with open(path) as f:
            return cls.model_validate_json(f.read())


class RankCount(BaseModel):
    """Bid counts for one (round, rank, theta) cell."""

    round: int
    rank: int
    theta_index: int
    bids: int = 0
    unsuccessful: int = 0
    successful: int = 0


class RoundTrace(BaseModel):
    """
    Per-round population counts of a run.

    remaining[r-1]              N_n(r): agents (= items) present at round r
    remaining_by_theta[r-1][j]  N_n(r, theta_j): members of A_n(theta_j) present at round r
    rank_counts                 nonzero N_n(r,s,theta), U_n(r,s,theta), S_n(r,s,theta) cells
    """

    n: int
    mechanism: Mechanism
    theta_grid: List[float]
    remaining: List[int] = Field(default_factory=list)
    remaining_by_theta: List[List[int]] = Field(default_factory=list)
    rank_counts: List[RankCount] = Field(default_factory=list)

    @classmethod
    def from_assignment(cls, assignment: Assignment, theta_grid: Sequence[float]) -> "RoundTrace":
        """Recompute every count from the outcome records alone."""
        grid = check_theta_grid(theta_grid)
        n = assignment.n
        cutoffs = [segment_size(n, t) for t in grid]
        rounds = assignment.rounds_used
        buckets = len(grid) + 1  # last bucket: positions beyond every segment

        # exits[r, b]: agents in bucket b matched at round r
        exits = [[0] * buckets for _ in range(rounds + 2)]
        cells: Counter = Counter()
        wins: Counter = Counter()
        for record in assignment.records:
            bucket = bisect_left(cutoffs, record.agent_position)
            exits[record.exit_round][bucket] += 1
            for bid in record.bids:
                cells[(bid.round, bid.rank, bucket)] += 1
                if bid.success:
                    wins[(bid.round, bid.rank, bucket)] += 1

        remaining: List[int] = []
        remaining_by_theta: List[List[int]] = []
        alive = [0] * buckets
        per_round = []
        for r in range(rounds, 0, -1):
            alive = [a + e for a, e in zip(alive, exits[r])]
            per_round.append(alive)
        for alive in reversed(per_round):
            remaining.append(sum(alive))
            running, row = 0, []
            for j in range(len(grid)):
                running += alive[j]
                row.append(running)
            remaining_by_theta.append(row)

        rank_counts: List[RankCount] = []
        for (r, s) in sorted({(r, s) for (r, s, _) in cells}):
            bids_total = succ_total = 0
            for j in range(len(grid)):
                bids_total += cells.get((r, s, j), 0)
                succ_total += wins.get((r, s, j), 0)
                if bids_total:
                    rank_counts.append(RankCount(
                        round=r, rank=s, theta_index=j, bids=bids_total,
                        unsuccessful=bids_total - succ_total, successful=succ_total,
                    ))

        return cls(
            n=n,
            mechanism=assignment.mechanism,
            theta_grid=grid,
            remaining=remaining,
            remaining_by_theta=remaining_by_theta,
            rank_counts=rank_counts,
        )

    def is_consistent(self) -> bool:
        """Populations never grow and every cell splits into successes and failures."""
        if any(b > a for a, b in zip(self.remaining, self.remaining[1:])):
            return False
        for row_a, row_b in zip(self.remaining_by_theta, self.remaining_by_theta[1:]):
            if any(b > a for a, b in zip(row_a, row_b)):
                return False
        return all(c.bids == c.successful + c.unsuccessful for c in self.rank_counts)

    @property
    def rounds(self) -> int:
        return len(self.remaining)

    def survivor_fraction(self, round_number: int) -> float:
        """N_n(r) / n, zero once everyone is matched."""
        if round_number > self.rounds:
            return 0.0
        return self.remaining[round_number - 1] / self.n

    def cell(self, round_number: int, rank: int, theta_index: int) -> RankCount:
        for count in self.rank_counts:
            if (count.round, count.rank, count.theta_index) == (round_number, rank, theta_index):
                return count
        return RankCount(round=round_number, rank=rank, theta_index=theta_index)

    def counts_by_round(self) -> Dict[int, Dict[str, int]]:
        """Totals over ranks for the last theta column, keyed by round."""
        last = len(self.theta_grid) - 1
        totals: Dict[int, Dict[str, int]] = {}
        for count in self.rank_counts:
            if count.theta_index != last:
                continue
            row = totals.setdefault(count.round, {"bids": 0, "unsuccessful": 0, "successful": 0})
            row["bids"] += count.bids
            row["unsuccessful"] += count.unsuccessful
            row["successful"] += count.successful
        return totals
