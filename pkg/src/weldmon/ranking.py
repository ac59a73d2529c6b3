"""Welder ranking by undesirable-pattern count: fewest errors ranks first."""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .dataset import LabeledDataset
from .errors import EmptyInputError, InvalidArgumentError


@dataclass(frozen=True)
class WelderScore:
    welder_id: str
    total_patterns: int
    undesirable_count: int
    rank: int


def score_welders(labeled: LabeledDataset) -> list[WelderScore]:
    """Group by welder, count label-0 patterns, rank ascending by that count.

    Ties share the smallest applicable rank and the following ranks are
    skipped (competition ranking). Output is sorted by rank, then welder id.
    """
    if len(labeled) == 0:
        raise EmptyInputError("cannot rank an empty dataset")
    totals: dict[str, int] = {}
    bad: dict[str, int] = {}
    for i, rec in enumerate(labeled):
        if rec.label not in (0, 1):
            raise InvalidArgumentError(f"record {i} has label {rec.label!r}; expected 0 or 1")
        wid = rec.provenance.welder_id
        totals[wid] = totals.get(wid, 0) + 1
        if rec.label == 0:
            bad[wid] = bad.get(wid, 0) + 1
    ordered = sorted(totals, key=lambda w: (bad.get(w, 0), w))
    scores = []
    prev_count = None
    prev_rank = 0
    for pos, wid in enumerate(ordered, start=1):
        count = bad.get(wid, 0)
        rank = prev_rank if count == prev_count else pos
        scores.append(WelderScore(wid, totals[wid], count, rank))
        prev_count = count
        prev_rank = rank
    return scores


def uneven_pattern_counts(scores: list[WelderScore]) -> bool:
    """True when welders carry different pattern totals; ranks then compare raw counts."""
    return len({s.total_patterns for s in scores}) > 1


def write_ranking_csv(path, scores: list[WelderScore]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "welder_id", "undesirable_count", "total_patterns"])
        for s in scores:
            writer.writerow([s.rank, s.welder_id, s.undesirable_count, s.total_patterns])


def format_ranking(scores: list[WelderScore]) -> str:
    lines = ["rank  welder_id  undesirable  total"]
    for s in scores:
        lines.append(
            f"{s.rank:>4}  {s.welder_id:<9}  {s.undesirable_count:>11}  {s.total_patterns:>5}"
        )
    return "\n".join(lines)
