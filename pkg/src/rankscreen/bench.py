"""Replication harness: run screeners over many simulated datasets and
aggregate the evaluation metrics.

Metrics per method: the minimum model size (largest rank among the active
predictors, abbreviated MMS), its robust spread IQR/1.349 across
replications, the median rank of each active predictor, and the proportion
of replications in which every active predictor lands inside the screening
budget.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .baselines import kendall_sis, pearson_sis
from .dataset import Dataset
from .errors import HarnessError, InvalidInput
from .rc_screen import rc_screen
from .report import ScreeningReport, TopD, default_top_d
from .rpc_screen import rpc_screen
from .simgen import Scenario, simulate
from .spline import BasisConfig

__all__ = [
    "METHOD_NAMES",
    "get_method",
    "mms",
    "rsd",
    "MethodMetrics",
    "MetricsReport",
    "run_replications",
]

RSD_SCALE = 1.349  # normal-consistent IQR scale

METHOD_NAMES = ("rc", "rpc-l2", "rpc-l1", "pearson", "kendall")

Screener = Callable[[Dataset, TopD], ScreeningReport]


def get_method(name: str, basis_config: BasisConfig = BasisConfig(),
               threads: int = 1) -> Screener:
    """Resolve a CLI method name to a screener callable."""
    if name == "rc":
        return lambda ds, sel: rc_screen(ds, sel, threads=threads)
    if name == "pearson":
        return lambda ds, sel: pearson_sis(ds, sel)
    if name == "kendall":
        return lambda ds, sel: kendall_sis(ds, sel)
    if name == "rpc-l2":
        return lambda ds, sel: rpc_screen(ds, loss="l2", selection=sel,
                                          basis_config=basis_config,
                                          threads=threads)
    if name == "rpc-l1":
        return lambda ds, sel: rpc_screen(ds, loss="l1", selection=sel,
                                          basis_config=basis_config,
                                          threads=threads)
    raise InvalidInput(
        f"unknown method '{name}'; valid: {', '.join(METHOD_NAMES)}"
    )


def mms(ranking, active) -> int:
    """Smallest ranking prefix containing all active columns.

    Equals the maximum 1-based position among the active column ids.
    """
    ranking = np.asarray(ranking)
    active = np.asarray(list(active))
    if active.size == 0:
        raise InvalidInput("active set is empty")
    pos = {int(col): i + 1 for i, col in enumerate(ranking)}
    try:
        return max(pos[int(j)] for j in active)
    except KeyError as exc:
        raise InvalidInput(f"active column {exc} not present in the ranking") \
            from None


def rsd(values) -> float:
    """Robust spread IQR/1.349 with type-7 quantile interpolation."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise InvalidInput("cannot take the spread of an empty vector")
    if arr.size == 1:
        return 0.0
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    return float((q3 - q1) / RSD_SCALE)


@dataclass(frozen=True)
class MethodMetrics:
    """Aggregated screening metrics for one method."""

    method: str
    median_mms: float
    rsd_mms: float
    median_ranks: list[float]
    proportion: float
    mms_values: np.ndarray


@dataclass(frozen=True)
class MetricsReport:
    """Replication summary for one scenario across methods."""

    scenario: dict
    n_reps: int
    n_failures: int
    d_n: int
    active: list[int]
    per_method: list[MethodMetrics] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "scenario": self.scenario,
            "n_reps": self.n_reps,
            "n_failures": self.n_failures,
            "d_n": self.d_n,
            "active_columns": [int(a + 1) for a in self.active],
            "methods": [
                {
                    "method": m.method,
                    "median_ranks": [float(r) for r in m.median_ranks],
                    "median_mms": float(m.median_mms),
                    "rsd_mms": float(m.rsd_mms),
                    "proportion": float(m.proportion),
                }
                for m in self.per_method
            ],
        }

    def to_csv_rows(self) -> list[list[str]]:
        header = (["method"]
                  + [f"R_{a + 1}" for a in self.active]
                  + ["MMS", "RSD", "P"])
        rows = [header]
        for m in self.per_method:
            rows.append(
                [m.method]
                + [repr(float(r)) for r in m.median_ranks]
                + [repr(float(m.median_mms)), repr(float(m.rsd_mms)),
                   repr(float(m.proportion))]
            )
        return rows


def run_replications(scenario, methods, n_reps: int, base_seed: int,
                     d_n: int | None = None,
                     max_failure_fraction: float = 0.05,
                     basis_config: BasisConfig = BasisConfig(),
                     threads: int = 1) -> MetricsReport:
    """Run every method on ``n_reps`` independently generated datasets.

    Parameters
    ----------
    scenario : Scenario or callable
        Either a simulation scenario or a callable ``f(seed) -> SimDataset``
        (the seed is a ``numpy.random.SeedSequence``).
    methods : sequence of str
        Names from `METHOD_NAMES`.
    n_reps : int
        Number of replications.
    base_seed : int
        Replication r uses the child stream ``SeedSequence([base_seed, r])``.
    d_n : int, optional
        Screening budget; default floor(n / ln n) for the generated n.
    threads : int
        Worker cap for replication-level parallelism.  Results are collected
        per replication index and aggregated after sorting, so the report is
        identical for any thread count.

    Raises
    ------
    HarnessError
        If more than ``max_failure_fraction`` of the replications fail.
    """
    if n_reps < 1:
        raise InvalidInput("need at least one replication")
    if not methods:
        raise InvalidInput("need at least one method")
    for m in methods:
        get_method(m)  # validate names up front

    if isinstance(scenario, Scenario):
        make = lambda seq: simulate(scenario, seq)  # noqa: E731
        scenario_echo = {
            "id": scenario.id, "n": scenario.n, "p": scenario.p,
            "rho0": scenario.rho0, "w0": scenario.w0,
            "error": scenario.error, "r2": scenario.r2,
            "case": scenario.case,
        }
    else:
        make = scenario
        scenario_echo = {"id": "custom"}

    def one_replication(r: int):
        seq = np.random.SeedSequence([base_seed, r])
        sim = make(seq)
        budget = d_n if d_n is not None else default_top_d(sim.dataset.n)
        sel = TopD(budget)
        ranks = {}
        for name in methods:
            report = get_method(name, basis_config=basis_config)(sim.dataset,
                                                                 sel)
            pos = report.ranks()
            ranks[name] = pos[sim.active]
        return budget, sim.active, ranks

    results: list = [None] * n_reps
    errors: list = []

    def run(r: int):
        try:
            results[r] = one_replication(r)
        except Exception as exc:  # noqa: BLE001 - harness counts failures
            errors.append((r, repr(exc)))

    if threads <= 1:
        for r in range(n_reps):
            run(r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_reps)))

    n_failures = len(errors)
    if n_failures > max_failure_fraction * n_reps:
        detail = "; ".join(f"rep {r}: {msg}" for r, msg in errors[:5])
        raise HarnessError(
            f"{n_failures}/{n_reps} replications failed ({detail})"
        )

    kept = [res for res in results if res is not None]
    budget = kept[0][0]
    active = kept[0][1]
    per_method = []
    for name in methods:
        rank_matrix = np.array([res[2][name] for res in kept])  # (reps, k)
        mms_values = rank_matrix.max(axis=1).astype(float)
        hit = np.all(rank_matrix <= budget, axis=1)
        per_method.append(MethodMetrics(
            method=name,
            median_mms=float(np.median(np.sort(mms_values))),
            rsd_mms=rsd(mms_values),
            median_ranks=[float(np.median(np.sort(rank_matrix[:, i])))
                          for i in range(rank_matrix.shape[1])],
            proportion=float(np.mean(hit)),
            mms_values=mms_values,
        ))
    return MetricsReport(
        scenario=scenario_echo,
        n_reps=len(kept),
        n_failures=n_failures,
        d_n=budget,
        active=[int(a) for a in active],
        per_method=per_method,
    )
