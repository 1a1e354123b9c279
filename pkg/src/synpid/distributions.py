"""Sparse joint distributions over small discrete alphabets.

Estimation is plug-in maximum likelihood throughout: probabilities are raw
count ratios with no bias correction, smoothing, or shrinkage. That choice is
deliberate and load-bearing. Averages follow the 0*log(0) = 0 convention, so
unobserved configurations simply drop out of sums, but asking for the local
value of a configuration that was never counted is an error rather than
-inf. All logarithms are base 2 and all returned quantities are in bits.

A distribution stores a sparse mapping from sample tuples to counts. Counts
are integers on every empirical path; analytically constructed distributions
(exact gate tables, tilted families) may carry real-valued weights instead,
with the same invariant that the stored total equals the sum of counts.

Heavy reductions (average mutual information, grouped marginals) run over
key-sorted numpy arrays, so results do not depend on dict insertion order,
merge order, or thread scheduling. That is what makes repeated runs
byte-identical.

History embedding packs the k most recent values of a series into one
symbol with the most recent value in the lowest digit:

    symbol = series[t] + base * series[t-1] + ... + base**(k-1) * series[t-k+1]
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

ROLES = ("destination-next", "destination-history", "source")

_SNAPSHOT_FORMAT = "synpid-distribution"
_SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class VariableSpec:
    """One named variable: its alphabet size and its role in the dynamics."""

    name: str
    arity: int
    role: str = "source"

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")
        if not isinstance(self.arity, int) or self.arity < 2:
            raise ValueError(f"arity must be an integer >= 2, got {self.arity!r}")
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")


def _radix_multipliers(arities: Sequence[int]) -> list[int]:
    mults, m = [], 1
    for a in arities:
        mults.append(m)
        m *= a
    if m >= 2 ** 62:
        raise ValueError("joint state space too large to pack into 64-bit codes")
    return mults


class JointDistribution:
    """Sparse plug-in joint distribution.

    ``counts`` maps sample tuples (one symbol per variable, in variable
    order) to nonnegative counts. Treat instances as immutable once built;
    derived caches assume it.
    """

    def __init__(self, variables: Sequence[VariableSpec],
                 counts: Mapping[tuple, float] | None = None,
                 validate: bool = True):
        self.variables = tuple(variables)
        if not self.variables:
            raise ValueError("a distribution needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        self.counts: dict[tuple, float] = dict(counts) if counts else {}
        if validate:
            self._validate_counts()
        self.total = float(sum(self.counts.values()))
        self._arrays_cache = None
        self._group_cache: dict[tuple, np.ndarray] = {}
        self._marginal_cache: dict[tuple, dict] = {}
        self.cache: dict = {}

    def _validate_counts(self):
        nv = len(self.variables)
        for key, c in self.counts.items():
            if len(key) != nv:
                raise ValueError(f"sample tuple {key!r} has wrong length, expected {nv}")
            for v, spec in zip(key, self.variables):
                if not isinstance(v, (int, np.integer)) or not 0 <= v < spec.arity:
                    raise ValueError(
                        f"symbol {v!r} out of range for variable {spec.name!r} "
                        f"(arity {spec.arity})")
            if not (isinstance(c, (int, float, np.integer, np.floating)) and c >= 0):
                raise ValueError(f"count for {key!r} must be nonnegative, got {c!r}")

    # -- basic introspection ------------------------------------------------

    def __len__(self):
        return len(self.counts)

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise ValueError(f"no variable named {name!r}")

    def index_of_role(self, role: str) -> int:
        hits = [i for i, v in enumerate(self.variables) if v.role == role]
        if len(hits) != 1:
            raise ValueError(f"expected exactly one {role!r} variable, found {len(hits)}")
        return hits[0]

    # -- array backing ------------------------------------------------------

    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Sample tuples as a key-sorted (n, nvars) int64 matrix plus counts."""
        if self._arrays_cache is None:
            if not self.counts:
                raise ValueError("empty distribution")
            keys = np.array(list(self.counts.keys()), dtype=np.int64)
            vals = np.array(list(self.counts.values()), dtype=np.float64)
            mults = _radix_multipliers([v.arity for v in self.variables])
            codes = keys @ np.array(mults, dtype=np.int64)
            order = np.argsort(codes, kind="stable")
            self._arrays_cache = (keys[order], vals[order])
        return self._arrays_cache

    def _group_counts(self, cols: tuple[int, ...]) -> np.ndarray:
        """Per-row count of each row's group when grouped by ``cols``."""
        cols = tuple(sorted(cols))
        if cols not in self._group_cache:
            keys, vals = self._arrays()
            if not cols:
                per_row = np.full(len(vals), self.total)
            else:
                mults = _radix_multipliers([self.variables[c].arity for c in cols])
                codes = keys[:, cols] @ np.array(mults, dtype=np.int64)
                _, inverse = np.unique(codes, return_inverse=True)
                sums = np.bincount(inverse, weights=vals)
                per_row = sums[inverse]
            self._group_cache[cols] = per_row
        return self._group_cache[cols]

    def marginal_counts(self, cols: Iterable[int]) -> dict[tuple, float]:
        """Counts marginalized onto ``cols`` (ascending index order)."""
        cols = tuple(sorted(cols))
        for c in cols:
            if not 0 <= c < len(self.variables):
                raise ValueError(f"variable index {c} out of range")
        if cols not in self._marginal_cache:
            keys, vals = self._arrays()
            if not cols:
                table = {(): self.total}
            else:
                sub = keys[:, cols]
                mults = _radix_multipliers([self.variables[c].arity for c in cols])
                codes = sub @ np.array(mults, dtype=np.int64)
                _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
                sums = np.bincount(inverse, weights=vals)
                table = dict(zip(map(tuple, sub[first].tolist()), sums.tolist()))
            self._marginal_cache[cols] = table
        return self._marginal_cache[cols]

    def probability(self, assignment: Mapping[int, int]) -> float:
        """Marginal probability of a partial assignment {index: symbol}."""
        if self.total == 0:
            raise ValueError("empty distribution")
        cols = tuple(sorted(assignment))
        key = tuple(int(assignment[c]) for c in cols)
        return self.marginal_counts(cols).get(key, 0.0) / self.total

    # -- persistence --------------------------------------------------------

    def to_json_dict(self) -> dict:
        items = sorted(self.counts.items())
        return {
            "format": _SNAPSHOT_FORMAT,
            "version": _SNAPSHOT_VERSION,
            "variables": [
                {"name": v.name, "arity": v.arity, "role": v.role}
                for v in self.variables
            ],
            "counts": [[list(map(int, k)), c] for k, c in items],
            "total": self.total,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "JointDistribution":
        if doc.get("format") != _SNAPSHOT_FORMAT:
            raise ValueError(f"not a distribution snapshot: format={doc.get('format')!r}")
        if doc.get("version") != _SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {doc.get('version')!r}")
        variables = [VariableSpec(d["name"], d["arity"], d.get("role", "source"))
                     for d in doc["variables"]]
        counts = {}
        for key, c in doc["counts"]:
            key = tuple(int(v) for v in key)
            if key in counts:
                raise ValueError(f"duplicate sample tuple {key} in snapshot")
            counts[key] = c
        dist = cls(variables, counts, validate=True)
        stored = doc.get("total")
        if stored is None or not math.isclose(stored, dist.total, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(f"snapshot total {stored!r} does not match counts sum {dist.total}")
        return dist


def save_json(dist: JointDistribution, path) -> None:
    with open(path, "w") as f:
        json.dump(dist.to_json_dict(), f, sort_keys=True)


def load_json(path) -> JointDistribution:
    with open(path) as f:
        return JointDistribution.from_json_dict(json.load(f))


# -- construction -----------------------------------------------------------

def embed_history(series, k: int, t: int, base: int = 2) -> int:
    """Pack the k values of ``series`` ending at index t into one symbol.

    The most recent value lands in the lowest digit. Requires t >= k-1 so
    the full window exists.
    """
    if k < 1:
        raise ValueError(f"history length k must be >= 1, got {k}")
    if t < k - 1:
        raise ValueError(f"need t >= k-1 for a full window, got t={t}, k={k}")
    symbol = 0
    for j in range(k):
        v = int(series[t - j])
        if not 0 <= v < base:
            raise ValueError(f"series value {v} out of range for base {base}")
        symbol += v * base ** j
    return symbol


def unpack_history(symbol: int, k: int, base: int = 2) -> tuple[int, ...]:
    """Inverse of embed_history: (most recent, ..., oldest)."""
    if not 0 <= symbol < base ** k:
        raise ValueError(f"symbol {symbol} out of range for k={k}, base={base}")
    out = []
    for _ in range(k):
        out.append(symbol % base)
        symbol //= base
    return tuple(out)


def count_samples(variables: Sequence[VariableSpec], samples) -> JointDistribution:
    """Tally a stream of sample tuples into a distribution.

    ``samples`` may be any iterable of tuples or a 2-D integer array with one
    column per variable. Symbols outside a variable's alphabet are an error.
    """
    variables = tuple(variables)
    arr = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples)
    if arr.size == 0:
        return JointDistribution(variables, {}, validate=False)
    if arr.ndim != 2 or arr.shape[1] != len(variables):
        raise ValueError(
            f"samples must have one column per variable ({len(variables)}), "
            f"got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"samples must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    for i, v in enumerate(variables):
        col = arr[:, i]
        if col.min() < 0 or col.max() >= v.arity:
            raise ValueError(
                f"symbol out of range for variable {v.name!r} (arity {v.arity}): "
                f"saw values in [{col.min()}, {col.max()}]")
    mults = np.array(_radix_multipliers([v.arity for v in variables]), dtype=np.int64)
    codes = arr @ mults
    ucodes, ucounts = np.unique(codes, return_counts=True)
    keys = np.empty((len(ucodes), len(variables)), dtype=np.int64)
    rem = ucodes.copy()
    for i, v in enumerate(variables):
        keys[:, i] = rem % v.arity
        rem //= v.arity
    counts = dict(zip(map(tuple, keys.tolist()), ucounts.tolist()))
    dist = JointDistribution(variables, counts, validate=False)
    dist._arrays_cache = (keys, ucounts.astype(np.float64))
    return dist


def merge(a: JointDistribution, b: JointDistribution) -> JointDistribution:
    """Combine two tallies over the same variables; equals counting one stream."""
    if a.variables != b.variables:
        raise ValueError(
            f"cannot merge distributions over different variables: "
            f"{[v.name for v in a.variables]} vs {[v.name for v in b.variables]}")
    counts = dict(a.counts)
    for k, c in b.counts.items():
        counts[k] = counts.get(k, 0) + c
    return JointDistribution(a.variables, counts, validate=False)


# -- information measures ---------------------------------------------------

def _canonical_cols(dist, cols, label):
    out = tuple(int(c) for c in cols)
    for c in out:
        if not 0 <= c < len(dist.variables):
            raise ValueError(f"{label} index {c} out of range")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate {label} indices: {out}")
    return out


def avg_mi(dist: JointDistribution, xs, ys, cond=()) -> float:
    """Average mutual information I(X; Y | cond) in bits.

    ``xs``, ``ys``, ``cond`` are disjoint tuples of variable indices. The
    unconditioned case passes an empty cond. Plug-in averages are always
    nonnegative up to float rounding.
    """
    xs = _canonical_cols(dist, xs, "x")
    ys = _canonical_cols(dist, ys, "y")
    cond = _canonical_cols(dist, cond, "cond")
    if not xs or not ys:
        raise ValueError("x and y variable sets must be nonempty")
    if set(xs) & set(ys) or set(xs) & set(cond) or set(ys) & set(cond):
        raise ValueError("x, y, and cond variable sets must be disjoint")
    if dist.total == 0:
        raise ValueError("empty distribution")
    g_xyc = dist._group_counts(xs + ys + cond)
    g_xc = dist._group_counts(xs + cond)
    g_yc = dist._group_counts(ys + cond)
    g_c = dist._group_counts(cond)
    _, vals = dist._arrays()
    ratios = (g_xyc * g_c) / (g_xc * g_yc)
    return float(np.dot(vals, np.log2(ratios)) / dist.total)


def _assignment_counts(dist, assignment: Mapping[int, int]) -> float:
    cols = tuple(sorted(assignment))
    if not cols:
        return dist.total
    key = tuple(int(assignment[c]) for c in cols)
    c = dist.marginal_counts(cols).get(key, 0.0)
    if c <= 0:
        names = {dist.variables[i].name: assignment[i] for i in cols}
        raise ValueError(f"configuration {names} has zero probability")
    return c


def local_mi(dist: JointDistribution, x: Mapping[int, int], y: Mapping[int, int],
             cond: Mapping[int, int] | None = None) -> float:
    """Local mutual information log2 p(x|y,cond) - log2 p(x|cond) in bits.

    Arguments are assignments {variable index: symbol}. May be negative; a
    configuration with zero probability is an error, not -inf.
    """
    cond = dict(cond) if cond else {}
    x, y = dict(x), dict(y)
    if not x or not y:
        raise ValueError("x and y assignments must be nonempty")
    keys = [set(x), set(y), set(cond)]
    if keys[0] & keys[1] or keys[0] & keys[2] or keys[1] & keys[2]:
        raise ValueError("x, y, and cond assignments must be disjoint")
    if dist.total == 0:
        raise ValueError("empty distribution")
    c_xyc = _assignment_counts(dist, {**x, **y, **cond})
    c_xc = _assignment_counts(dist, {**x, **cond})
    c_yc = _assignment_counts(dist, {**y, **cond})
    c_c = _assignment_counts(dist, cond)
    return math.log2(c_xyc * c_c) - math.log2(c_xc * c_yc)
