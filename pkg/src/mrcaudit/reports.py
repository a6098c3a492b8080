"""Label-count aggregation with per-family denominators.

Each label family reports percentages over a different record subset:
answer type and correctness over all records of a sample, reasoning and
knowledge over records not labeled unanswerable, and linguistic complexity
over records that mark at least one supporting fact. Interior rows count
records with any leaf in the subtree, so child rows need not sum to their
parent. Percentages are recomputed from (absolute, denominator) at one
decimal, half-up; they are presentation values, never stored truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

from .entries import GoldEntry
from .records import AnnotationRecord, validate
from .taxonomy import (
    ANSWER_TYPE,
    CORRECTNESS,
    KNOWLEDGE,
    LINGUISTIC_COMPLEXITY,
    REASONING,
    SUPPORTING_FACT,
    UNANSWERABLE,
    taxonomy,
)

_DENOMINATOR_BY_FAMILY = {
    SUPPORTING_FACT: "all",
    ANSWER_TYPE: "all",
    CORRECTNESS: "all",
    REASONING: "answerable",
    KNOWLEDGE: "answerable",
    LINGUISTIC_COMPLEXITY: "has_facts",
}


def relative_percentage(absolute: int, denominator: int) -> float:
    """100 * absolute / denominator at one decimal, half-up."""
    if denominator == 0:
        return 0.0
    exact = Decimal(absolute * 100) / Decimal(denominator)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ReportRow:
    path: str
    absolute: int
    denominator: int

    @property
    def relative(self) -> float:
        return relative_percentage(self.absolute, self.denominator)


@dataclass(frozen=True)
class DatasetReport:
    dataset: str
    records: int
    answerable: int
    with_facts: int
    rows: tuple[ReportRow, ...]

    def row(self, path: str) -> ReportRow:
        for row in self.rows:
            if row.path == path:
                return row
        raise KeyError(path)


def _record_leaves(record: AnnotationRecord) -> set[tuple[str, ...]]:
    leaves: set[tuple[str, ...]] = set()
    if record.answer_type is not None:
        leaves.add(record.answer_type.path)
    if record.correctness is not None:
        leaves.add(record.correctness.verdict.path)
        if record.correctness.sub_reason is not None:
            leaves.add(record.correctness.sub_reason.path)
    for label in record.reasoning | record.knowledge | record.linguistic_labels():
        leaves.add(label.path)
    return leaves


def aggregate(records: Sequence[AnnotationRecord], entries: Mapping[str, GoldEntry]) -> DatasetReport:
    """Count every catalog node over one dataset's validated records."""
    if not records:
        raise ValueError("no records to aggregate")
    datasets = set()
    for record in records:
        entry = entries.get(record.entry_id)
        if entry is None:
            raise KeyError(f"record references unknown entry {record.entry_id!r}")
        result = validate(record, entry)
        if not result.ok:
            first = result.errors[0]
            raise ValueError(
                f"record for {record.entry_id} fails validation ({first.rule}: {first.message})"
            )
        datasets.add(entry.dataset)
    if len(datasets) > 1:
        raise ValueError(f"records span several datasets: {sorted(datasets)}")
    dataset = datasets.pop()

    total = len(records)
    answerable = sum(1 for r in records if r.answer_type != UNANSWERABLE)
    with_facts = sum(1 for r in records if r.supporting_facts)
    denominators = {"all": total, "answerable": answerable, "has_facts": with_facts}

    # Labels are counted within each family's denominator subset, which keeps
    # every absolute count at or below its denominator.
    subsets = {
        "all": [_record_leaves(r) for r in records],
        "answerable": [_record_leaves(r) for r in records if r.answer_type != UNANSWERABLE],
        "has_facts": [_record_leaves(r) for r in records if r.supporting_facts],
    }

    rows = []
    tax = taxonomy()
    for root in tax.roots:
        subset_name = _DENOMINATOR_BY_FAMILY[root.name]
        denominator = denominators[subset_name]
        record_leaves = subsets[subset_name]
        if root.name == SUPPORTING_FACT:
            rows.append(ReportRow(SUPPORTING_FACT, with_facts, denominator))
            continue
        for path, node in root.walk():
            if node.is_leaf:
                count = sum(1 for leaves in record_leaves if path in leaves)
            else:
                subtree = set(tax.subtree_paths(path))
                count = sum(1 for leaves in record_leaves if leaves & subtree)
            rows.append(ReportRow("/".join(path), count, denominator))
    return DatasetReport(
        dataset=dataset,
        records=total,
        answerable=answerable,
        with_facts=with_facts,
        rows=tuple(rows),
    )


def report_to_dict(report: DatasetReport) -> dict:
    return {
        "dataset": report.dataset,
        "records": report.records,
        "answerable": report.answerable,
        "with_supporting_facts": report.with_facts,
        "rows": [
            {
                "path": row.path,
                "absolute": row.absolute,
                "denominator": row.denominator,
                "relative": row.relative,
            }
            for row in report.rows
        ],
    }


def _family_paths(family: str) -> list[str]:
    tax = taxonomy()
    for root in tax.roots:
        if root.name == family:
            return ["/".join(path) for path, _ in root.walk()]
    raise KeyError(family)


def render_family_table(reports: Sequence[DatasetReport], family: str) -> str:
    """Rows are catalog nodes of one family, columns abs/rel per dataset."""
    paths = _family_paths(family) if family != SUPPORTING_FACT else [SUPPORTING_FACT]
    names = {path: "  " * (path.count("/")) + path.split("/")[-1] for path in paths}
    label_width = max(max(len(n) for n in names.values()), len("label"))
    header = ["label".ljust(label_width)]
    for report in reports:
        header.append(f"{report.dataset:>14} abs  rel")
    lines = ["  ".join(header)]
    for path in paths:
        cells = [names[path].ljust(label_width)]
        for report in reports:
            row = report.row(path)
            cells.append(f"{row.absolute:>18} {row.relative:>5.1f}")
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def chart_series(reports: Sequence[DatasetReport]) -> dict:
    """Bar-chart data: per family, one series per label with percentages."""
    out: dict = {"datasets": [r.dataset for r in reports], "families": []}
    for family in taxonomy().families():
        paths = [SUPPORTING_FACT] if family == SUPPORTING_FACT else _family_paths(family)
        series = []
        for path in paths:
            series.append(
                {
                    "label": path,
                    "percentages": {r.dataset: r.row(path).relative for r in reports},
                }
            )
        out["families"].append({"family": family, "series": series})
    return out
