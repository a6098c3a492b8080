"""Reproducible annotation sampling.

Draws are uniform without replacement from a PCG64 generator seeded by the
plan, so the same plan over the same entry list yields the same sample on
any machine. With unique_paragraphs set, two entries sharing the exact
concatenated passage text never both appear; eligibility is counted over
distinct paragraph keys.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entries import GoldEntry


class CapacityError(ValueError):
    """The plan asks for more entries than are eligible."""


@dataclass(frozen=True)
class SamplePlan:
    dataset: str
    n: int
    seed: int
    unique_paragraphs: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"sample size must be at least 1, got {self.n}")


def sample(entries: Sequence[GoldEntry], plan: SamplePlan) -> list[GoldEntry]:
    """Draw plan.n entries in draw order."""
    if not entries:
        raise CapacityError("no entries to sample from")
    pool = [e for e in entries if e.dataset == plan.dataset]
    if not pool:
        raise CapacityError(f"no entries for dataset {plan.dataset!r}")

    if plan.unique_paragraphs:
        eligible = len({e.paragraph_key() for e in pool})
    else:
        eligible = len(pool)
    if eligible < plan.n:
        raise CapacityError(
            f"cannot draw {plan.n} entries for {plan.dataset}: only {eligible} eligible"
        )

    rng = np.random.Generator(np.random.PCG64(plan.seed))
    order = rng.permutation(len(pool))
    drawn: list[GoldEntry] = []
    seen_paragraphs: set[str] = set()
    for index in order:
        entry = pool[int(index)]
        if plan.unique_paragraphs:
            key = entry.paragraph_key()
            if key in seen_paragraphs:
                continue
            seen_paragraphs.add(key)
        drawn.append(entry)
        if len(drawn) == plan.n:
            break
    return drawn
