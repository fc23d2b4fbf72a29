"""FindN, TopN and reciprocal-rank metrics over recommendation runs.

FindN is the number of relevant papers in a run's top list, TopN is that
count divided by the list length N, and MRR averages the reciprocal rank of
the first relevant paper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DataError, EmptyInputError, ParameterError


@dataclass(frozen=True)
class RunResult:
    run_id: str
    top_list: tuple[str, ...]
    relevant: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "top_list", tuple(self.top_list))
        object.__setattr__(self, "relevant", frozenset(self.relevant))
        if len(set(self.top_list)) != len(self.top_list):
            raise DataError(f"run {self.run_id!r} has duplicate entries in its top list")

    @property
    def n(self) -> int:
        return len(self.top_list)


@dataclass(frozen=True)
class RunMetrics:
    run_id: str
    find_n: int
    top_n: float
    rr: float


@dataclass(frozen=True)
class EvalReport:
    n: int
    per_run: tuple[RunMetrics, ...]
    avg_find_n: float
    avg_top_n: float
    avg_mrr: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "per_run": [vars(m) for m in self.per_run],
            "avg_top_n": self.avg_top_n,
            "avg_find_n": self.avg_find_n,
            "avg_mrr": self.avg_mrr,
        }

    def table(self) -> str:
        rows = [("Average TopN", self.avg_top_n), ("Average FindN", self.avg_find_n),
                ("Average MRR", self.avg_mrr)]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value:.4f}" for name, value in rows)


def find_n(run: RunResult) -> int:
    return sum(1 for pid in run.top_list if pid in run.relevant)


def top_n(find_n_value: float, n: int) -> float:
    if n < 1:
        raise ParameterError("n must be at least 1")
    return find_n_value / n


def reciprocal_rank(run: RunResult) -> float:
    for rank, pid in enumerate(run.top_list, start=1):
        if pid in run.relevant:
            return 1.0 / rank
    return 0.0


def aggregate(runs: Sequence[RunResult]) -> EvalReport:
    runs = list(runs)
    if not runs:
        raise EmptyInputError("no runs to aggregate")
    sizes = {r.n for r in runs}
    if len(sizes) != 1:
        raise ParameterError(f"runs use different list sizes: {sorted(sizes)}")
    n = sizes.pop()
    per_run = tuple(
        RunMetrics(r.run_id, f, top_n(f, n), reciprocal_rank(r))
        for r in runs for f in [find_n(r)]
    )
    avg_find = sum(m.find_n for m in per_run) / len(per_run)
    return EvalReport(
        n=n,
        per_run=per_run,
        avg_find_n=avg_find,
        # derived from avg_find so that avg_top_n * n == avg_find_n holds exactly
        avg_top_n=top_n(avg_find, n),
        avg_mrr=sum(m.rr for m in per_run) / len(per_run),
    )


def runs_from_reports(reports: Iterable[dict], relevant: Iterable[str]) -> list[RunResult]:
    relevant = frozenset(relevant)
    return [RunResult(rep.get("run_id", str(i)), tuple(rep["top5"]), relevant)
            for i, rep in enumerate(reports)]
