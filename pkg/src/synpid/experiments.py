"""Reproduction pipelines: rule tables, the OR localization demo, profiles.

Rounding to three decimals happens only at text-rendering time; reports and
JSON carry full precision. Identical configurations produce byte-identical
JSON because every reduction below runs in key-sorted order and reports
serialize with sorted keys and no timestamps.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import eca
from .distributions import JointDistribution, VariableSpec, count_samples
from .dynamics import (
    DynamicsConfig, ca_samples, ca_variables, profile, profile_measures,
    write_profile_csv, write_profile_pgm,
)
from .lattice import Antichain
from .pid import argmin_table, i_min, local_i_min, modified_information


@dataclass(frozen=True)
class ExperimentConfig:
    """Batch settings for repeat-run experiments. Run i uses base_seed + i."""

    rules: tuple[int, ...]
    runs: int = 100
    width: int = 200
    steps: int = 200
    k: int = 16
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(int(r) for r in self.rules))
        if not self.rules:
            raise ValueError("need at least one rule")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.steps <= self.k:
            raise ValueError(
                f"steps={self.steps} leaves no destinations after a k={self.k} window")

    def seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + i for i in range(self.runs))

    def to_json_dict(self) -> dict:
        return {
            "rules": list(self.rules),
            "runs": self.runs,
            "width": self.width,
            "steps": self.steps,
            "k": self.k,
            "base_seed": self.base_seed,
        }


def _pooled_distributions(rule, config, threads):
    """Simulate the batch and pool samples at k=config.k and k=1."""

    def worker(i):
        grid = eca.run(rule, config.width, config.steps, config.base_seed + i)
        return ca_samples(grid, config.k), ca_samples(grid, 1)

    workers = threads or os.cpu_count() or 1
    if workers > 1 and config.runs > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(worker, range(config.runs)))
    else:
        parts = [worker(i) for i in range(config.runs)]
    dist_k = count_samples(ca_variables(config.k),
                           np.concatenate([p[0] for p in parts]))
    dist_1 = count_samples(ca_variables(1),
                           np.concatenate([p[1] for p in parts]))
    return dist_k, dist_1


@dataclass(frozen=True)
class RuleResult:
    """Hierarchy terms and modified information for one rule's batch."""

    rule: int
    k: int
    pi: tuple[float, ...]
    m_x: float
    m_x_k1: float
    total: float
    samples: int
    samples_k1: int

    def to_json_dict(self) -> dict:
        return {
            "rule": self.rule,
            "k": self.k,
            "pi_by_order": {str(o + 1): v for o, v in enumerate(self.pi)},
            "m_x": self.m_x,
            "m_x_k1": self.m_x_k1,
            "total_information": self.total,
            "samples": self.samples,
            "samples_k1": self.samples_k1,
        }


@dataclass(frozen=True)
class TableReport:
    config: ExperimentConfig
    results: tuple[RuleResult, ...]

    def to_json_dict(self) -> dict:
        return {
            "format": "synpid-table1",
            "version": 1,
            "config": self.config.to_json_dict(),
            "seeds": list(self.config.seeds()),
            "rules": [r.to_json_dict() for r in self.results],
        }

    def format_text(self) -> str:
        k = self.config.k
        header = (f"{'rule':>4}  {'pi(o=1)':>8}  {'pi(o=2)':>8}  {'pi(o=3)':>8}  "
                  f"{'m_x(k=' + str(k) + ')':>10}  {'m_x(k=1)':>8}")
        lines = [header]
        for r in self.results:
            lines.append(
                f"{r.rule:>4}  {r.pi[0]:>8.3f}  {r.pi[1]:>8.3f}  {r.pi[2]:>8.3f}  "
                f"{r.m_x:>10.3f}  {r.m_x_k1:>8.3f}")
        return "\n".join(lines)


def run_table1(config: ExperimentConfig, threads: int | None = None) -> TableReport:
    """Hierarchy and modified-information summary across rules.

    For each rule: pool config.runs grids, decompose I(next; hist, left,
    right) at k=config.k into partial terms grouped by smallest subset
    size, and report the modified information at both k=config.k and k=1.
    """
    results = []
    for rule in config.rules:
        dist_k, dist_1 = _pooled_distributions(rule, config, threads)
        dec_k = modified_information(dist_k, config.k)
        dec_1 = modified_information(dist_1, 1)
        r = dec_k.lattice.r
        results.append(RuleResult(
            rule=rule,
            k=config.k,
            pi=tuple(dec_k.hierarchy[o] for o in range(1, r + 1)),
            m_x=dec_k.m_x,
            m_x_k1=dec_1.m_x,
            total=dec_k.total,
            samples=int(dist_k.total),
            samples_k1=int(dist_1.total),
        ))
    return TableReport(config, tuple(results))


# -- OR localization demo ---------------------------------------------------

OR_NODE = Antichain([{1}, {2}])


def or_distribution(delta: float) -> JointDistribution:
    """Analytic OR-gate table with the mixed input rows tilted by delta.

    Bypasses counting: probabilities are set exactly, which is what lets a
    1e-6 tilt act on the decomposition without being rounded away.
    """
    if not abs(delta) < 0.25:
        raise ValueError(f"|delta| must be < 0.25, got {delta}")
    variables = (
        VariableSpec("x", 2, "destination-next"),
        VariableSpec("a1", 2, "source"),
        VariableSpec("a2", 2, "source"),
    )
    weights = {
        (0, 0, 0): 0.25,
        (1, 0, 1): 0.25 + delta,
        (1, 1, 0): 0.25 - delta,
        (1, 1, 1): 0.25,
    }
    return JointDistribution(variables, weights)


@dataclass(frozen=True)
class OrDemoRow:
    a1: int
    a2: int
    x: int
    probability: float
    chosen: str
    local_value: float
    tied: bool

    def to_json_dict(self) -> dict:
        return {
            "a1": self.a1, "a2": self.a2, "x": self.x,
            "probability": self.probability,
            "chosen_source": self.chosen,
            "local_value": self.local_value,
            "tied": self.tied,
        }


@dataclass(frozen=True)
class OrDemoResult:
    delta: float
    rows: tuple[OrDemoRow, ...]
    average: float

    @property
    def any_tie(self) -> bool:
        return any(r.tied for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "format": "synpid-or-demo",
            "version": 1,
            "delta": self.delta,
            "node": OR_NODE.label,
            "rows": [r.to_json_dict() for r in self.rows],
            "average": self.average,
            "any_tie": self.any_tie,
        }

    def format_text(self) -> str:
        lines = [f"localized redundancy at node {OR_NODE.label}, delta={self.delta!r}",
                 f"{'a1':>3} {'a2':>3} {'x':>3}  {'p':>10}  {'argmin':>6}  "
                 f"{'local':>8}  tied"]
        for r in self.rows:
            lines.append(
                f"{r.a1:>3} {r.a2:>3} {r.x:>3}  {r.probability:>10.6f}  "
                f"{r.chosen:>6}  {r.local_value:>8.3f}  {str(r.tied).lower()}")
        lines.append(f"average: {self.average:.6f} bits")
        return "\n".join(lines)


def run_or_demo(delta: float) -> OrDemoResult:
    """Localize the two-singleton redundancy node across the OR gate's rows."""
    dist = or_distribution(delta)
    table = argmin_table(dist, OR_NODE)
    rows = []
    for a1 in (0, 1):
        for a2 in (0, 1):
            x = a1 | a2
            obs = (x, a1, a2)
            choice = table[x]
            rows.append(OrDemoRow(
                a1=a1, a2=a2, x=x,
                probability=float(dist.counts[obs]),
                chosen=f"A{min(OR_NODE.subsets[choice.subset_index])}",
                local_value=local_i_min(dist, OR_NODE, obs),
                tied=choice.tied,
            ))
    return OrDemoResult(delta, tuple(rows), i_min(dist, OR_NODE))


# -- local profiles ---------------------------------------------------------

def export_local_profiles(rule: int, config: ExperimentConfig, measures,
                          out_dir, threads: int | None = None) -> dict:
    """Write CSV and 16-bit PGM profiles of local measures for one rule.

    Probabilities are pooled over the whole batch; the displayed grid is the
    batch's first run, so every site's configuration has been counted.
    Returns {measure: {"csv": path, "pgm": path}}.
    """
    dyncfg = DynamicsConfig(k=config.k)
    allowed = profile_measures(dyncfg)
    measures = tuple(measures)
    for m in measures:
        if m not in allowed:
            raise ValueError(f"unknown measure {m!r}, expected one of {allowed}")
    if not measures:
        raise ValueError("need at least one measure")
    dist_k, _ = _pooled_distributions(rule, config, threads)
    display = eca.run(rule, config.width, config.steps, config.base_seed)
    os.makedirs(out_dir, exist_ok=True)
    written = {}
    for m in measures:
        prof = profile(dist_k, display, dyncfg, m)
        csv_path = os.path.join(out_dir, f"rule{rule}_{m}.csv")
        pgm_path = os.path.join(out_dir, f"rule{rule}_{m}.pgm")
        write_profile_csv(prof, csv_path)
        write_profile_pgm(prof, pgm_path)
        written[m] = {"csv": csv_path, "pgm": pgm_path}
    return written
