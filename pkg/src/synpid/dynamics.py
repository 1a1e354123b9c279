"""Information dynamics of distributed computation on spacetime grids.

Everything here is built from one pooled joint distribution over

    (next, hist, y_1, ..., y_g)

where ``next`` is a cell's value one step ahead, ``hist`` is that cell's own
k-step past packed into a single symbol, and each ``y_j`` is the single
previous value of one neighbor. For a standard two-neighbor ring the sources
are the left and right neighbors. All cells and all times with a full
history window are pooled; the first k time steps of a run never appear as
destinations.

Measures, all in bits:

- active information storage  I(next; hist): how much of the next value is
  predicted by the cell's own past.
- apparent transfer entropy   I(next; y | hist): state updates in the source
  beyond the destination's own past.
- conditional transfer entropy I(next; y | hist, others): the same with
  further sources held fixed; conditioning on every other causal source
  gives the complete flavor.
- local variants of each: log-ratios at one observed configuration. These
  can be negative (a misinformative past or source).
- local separable information: local storage plus the sum of apparent local
  transfers from every source. The parts overlap, so this is a heuristic
  diagnostic of where computation happens, not a proper joint measure.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    JointDistribution, VariableSpec, avg_mi, count_samples, local_mi,
)
from .eca import SpacetimeGrid


@dataclass(frozen=True)
class DynamicsConfig:
    """Names the destination and its causal sources for one analysis."""

    k: int
    destination: str = "next"
    sources: tuple[str, ...] = ("left", "right")

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"history length k must be >= 1, got {self.k}")
        if self.destination in self.sources:
            raise ValueError("destination cannot be one of its own sources")
        if len(set(self.sources)) != len(self.sources):
            raise ValueError(f"duplicate source names: {self.sources}")


def _offset_name(offset: int) -> str:
    if offset == -1:
        return "left"
    if offset == 1:
        return "right"
    return f"off{offset:+d}"


def ca_variables(k: int, offsets=(-1, 1)) -> tuple[VariableSpec, ...]:
    """Variable layout for ring-automaton samples: next, hist, then sources."""
    return (
        VariableSpec("next", 2, "destination-next"),
        VariableSpec("hist", 2 ** k, "destination-history"),
        *(VariableSpec(_offset_name(o), 2, "source") for o in offsets),
    )


def ca_samples(grid: SpacetimeGrid, k: int, offsets=(-1, 1),
               start: int | None = None) -> np.ndarray:
    """All (next, hist, sources...) tuples of one grid as an int64 matrix.

    ``start`` is the first destination time; it defaults to k, which skips
    exactly the rows with an incomplete history window. Rows are emitted in
    (time, cell) order.
    """
    if k < 1:
        raise ValueError(f"history length k must be >= 1, got {k}")
    cells = grid.cells.astype(np.int64)
    steps, width = cells.shape
    if start is None:
        start = k
    if start < k:
        raise ValueError(f"start={start} would need history before time 0 (k={k})")
    if start >= steps:
        raise ValueError(f"grid with {steps} steps has no destinations at start={start}")
    ts = np.arange(start, steps)
    columns = [cells[ts]]
    hist = np.zeros((len(ts), width), dtype=np.int64)
    for j in range(k):
        hist += cells[ts - 1 - j] << j
    columns.append(hist)
    for o in offsets:
        columns.append(np.roll(cells[ts - 1], -o, axis=1))
    return np.stack(columns, axis=-1).reshape(-1, len(columns))


def ca_distribution(grids, k: int, offsets=(-1, 1),
                    start: int | None = None) -> JointDistribution:
    """Pool every cell of every grid into one plug-in distribution."""
    grids = list(grids)
    if not grids:
        raise ValueError("need at least one grid")
    samples = np.concatenate([ca_samples(g, k, offsets, start) for g in grids])
    return count_samples(ca_variables(k, offsets), samples)


def _indices(dist: JointDistribution, config: DynamicsConfig):
    xi = dist.index_of(config.destination)
    hi = dist.index_of_role("destination-history")
    dest_arity = dist.variables[xi].arity
    if dist.variables[hi].arity != dest_arity ** config.k:
        raise ValueError(
            f"history arity {dist.variables[hi].arity} does not match "
            f"k={config.k} over a base-{dest_arity} alphabet")
    return xi, hi


def active_info_storage(dist: JointDistribution, config: DynamicsConfig) -> float:
    """Average mutual information between a cell's k-step past and its next value."""
    xi, hi = _indices(dist, config)
    return avg_mi(dist, (xi,), (hi,))


def local_ais(dist: JointDistribution, history: int, next_value: int) -> float:
    """Local storage at one (history, next) configuration; may be negative."""
    xi = dist.index_of_role("destination-next")
    hi = dist.index_of_role("destination-history")
    return local_mi(dist, {xi: next_value}, {hi: history})


def _source_indices(dist, config, source, conditionals):
    if source not in config.sources:
        raise ValueError(f"{source!r} is not a configured source {config.sources}")
    conditionals = tuple(conditionals)
    for c in conditionals:
        if c not in config.sources:
            raise ValueError(f"conditional {c!r} is not a configured source")
        if c == source:
            raise ValueError(f"source {source!r} cannot condition on itself")
    if len(set(conditionals)) != len(conditionals):
        raise ValueError(f"duplicate conditionals: {conditionals}")
    return dist.index_of(source), tuple(dist.index_of(c) for c in conditionals)


def transfer_entropy(dist: JointDistribution, config: DynamicsConfig,
                     source: str, conditionals=()) -> float:
    """Average transfer entropy from ``source``, given the destination's past.

    With no conditionals this is the apparent flavor; conditioning on every
    other source makes it complete. The result is invariant to the order of
    ``conditionals``.
    """
    xi, hi = _indices(dist, config)
    si, ci = _source_indices(dist, config, source, conditionals)
    return avg_mi(dist, (xi,), (si,), (hi,) + ci)


def local_te(dist: JointDistribution, config: DynamicsConfig, source: str,
             conditionals, observation) -> float:
    """Local transfer entropy at one full observation tuple."""
    xi, hi = _indices(dist, config)
    si, ci = _source_indices(dist, config, source, conditionals)
    obs = tuple(int(v) for v in observation)
    if len(obs) != len(dist.variables):
        raise ValueError(
            f"observation must cover all {len(dist.variables)} variables, got {obs}")
    cond = {hi: obs[hi], **{c: obs[c] for c in ci}}
    return local_mi(dist, {xi: obs[xi]}, {si: obs[si]}, cond)


def local_separable(dist: JointDistribution, config: DynamicsConfig, observation) -> float:
    """Local storage plus every apparent local transfer at one observation.

    The summands overlap, so this is a heuristic locator of nontrivial
    information processing rather than a measure in its own right; strongly
    negative values are still diagnostic of modification-like events.
    """
    obs = tuple(int(v) for v in observation)
    xi, hi = _indices(dist, config)
    total = local_mi(dist, {xi: obs[xi]}, {hi: obs[hi]})
    for s in config.sources:
        total += local_te(dist, config, s, (), obs)
    return total


@dataclass(frozen=True)
class LocalProfile:
    """Per-site local values of one measure on one displayed grid.

    ``values`` has the grid's shape; rows before ``start`` (times without a
    full history window) are NaN.
    """

    measure: str
    k: int
    start: int
    values: np.ndarray = field(repr=False, compare=False)

    def defined_values(self) -> np.ndarray:
        return self.values[self.start:]


def profile_measures(config: DynamicsConfig) -> tuple[str, ...]:
    return ("local_ais",
            *(f"local_te_{s}" for s in config.sources),
            "local_separable")


def profile(dist: JointDistribution, grid: SpacetimeGrid, config: DynamicsConfig,
            measure: str, offsets=(-1, 1)) -> LocalProfile:
    """Evaluate one local measure at every site of ``grid``.

    Probabilities come from ``dist`` (typically pooled over many runs, with
    the displayed grid among them, so every configuration is observed).
    """
    allowed = profile_measures(config)
    if measure not in allowed:
        raise ValueError(f"unknown measure {measure!r}, expected one of {allowed}")
    samples = ca_samples(grid, config.k, offsets)
    steps, width = grid.cells.shape
    start = config.k
    samples = samples.reshape(steps - start, width, -1)
    xi, hi = _indices(dist, config)
    values = np.full((steps, width), np.nan)
    if measure == "local_ais":
        def site(obs):
            return local_mi(dist, {xi: obs[xi]}, {hi: obs[hi]})
    elif measure == "local_separable":
        def site(obs):
            return local_separable(dist, config, obs)
    else:
        source = measure[len("local_te_"):]
        def site(obs):
            return local_te(dist, config, source, (), obs)
    for ti in range(samples.shape[0]):
        row = samples[ti]
        for c in range(width):
            values[start + ti, c] = site(tuple(row[c]))
    return LocalProfile(measure, config.k, start, values)


def write_profile_csv(prof: LocalProfile, path) -> None:
    """Rows of (cell, time, value) for every defined site."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cell", "time", "value"])
        for t in range(prof.start, prof.values.shape[0]):
            for c in range(prof.values.shape[1]):
                writer.writerow([c, t, repr(float(prof.values[t, c]))])


def write_profile_pgm(prof: LocalProfile, path) -> None:
    """16-bit PGM of the defined rows, darkest = smallest value.

    The affine gray mapping is recorded in the header comment so the raster
    can be decoded back to bits.
    """
    data = prof.defined_values()
    vmin = float(data.min())
    vmax = float(data.max())
    if vmax > vmin:
        gray = np.round((data - vmin) / (vmax - vmin) * 65535.0)
    else:
        gray = np.zeros_like(data)
    steps, width = prof.values.shape
    header = (
        f"P5\n"
        f"# {prof.measure} k={prof.k}; rows are times {prof.start}..{steps - 1}; "
        f"value_bits = {vmin!r} + gray * ({vmax!r} - {vmin!r}) / 65535\n"
        f"{width} {data.shape[0]}\n65535\n"
    )
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(gray.astype(">u2").tobytes())
