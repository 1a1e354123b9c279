import math

import numpy as np
import pytest

import pid_oracle
from support import gate_distribution, random_distribution, to_prob_table
from synpid.distributions import (
    JointDistribution, VariableSpec, avg_mi, local_mi,
)
from synpid.experiments import or_distribution
from synpid.lattice import Antichain, build_lattice
from synpid.pid import (
    TIE_TOLERANCE, argmin_table, decomposition_report, discontinuity_scan,
    hierarchy_terms, i_min, local_i_min, modified_information, partial_terms,
    specific_information,
)

BOTTOM2 = Antichain([{1}, {2}])
OR_REDUNDANCY = 0.3112781244591328
OR_SPEC_X1_A1 = 0.0817041659455104


def xor_dynamics():
    """x = h XOR s with history/source roles, k = 1."""
    variables = (
        VariableSpec("x", 2, "destination-next"),
        VariableSpec("h", 2, "destination-history"),
        VariableSpec("s", 2, "source"),
    )
    counts = {(h ^ s, h, s): 1 for h in (0, 1) for s in (0, 1)}
    return JointDistribution(variables, counts)


# -- specific information ---------------------------------------------------

def test_specific_information_or_gate_frozen():
    d = gate_distribution("or")
    assert specific_information(d, 1, {1}) == pytest.approx(OR_SPEC_X1_A1, abs=1e-12)
    assert specific_information(d, 1, {2}) == pytest.approx(OR_SPEC_X1_A1, abs=1e-12)
    assert specific_information(d, 0, {1}) == pytest.approx(1.0, abs=1e-12)
    assert specific_information(d, 0, {1, 2}) == pytest.approx(2.0, abs=1e-12)


def test_specific_information_matches_oracle():
    rng = np.random.default_rng(7)
    for _ in range(30):
        dist = random_distribution(rng, r=2)
        table = to_prob_table(dist)
        for x in range(dist.variables[0].arity):
            for subset, pos in [({1}, (1,)), ({2}, (2,)), ({1, 2}, (1, 2))]:
                expect = pid_oracle.specific_info(table, x, pos)
                try:
                    got = specific_information(dist, x, subset)
                except ValueError:
                    assert (x,) not in dist.marginal_counts((0,))
                    continue
                assert got == pytest.approx(expect, abs=1e-10)


def test_specific_information_averages_to_mi():
    # Expectation over destination outcomes recovers I(X; A).
    rng = np.random.default_rng(9)
    for _ in range(20):
        dist = random_distribution(rng, r=2)
        marg = dist.marginal_counts((0,))
        mean = sum(
            c / dist.total * specific_information(dist, x, {1, 2})
            for (x,), c in marg.items())
        assert mean == pytest.approx(avg_mi(dist, (0,), (1, 2)), abs=1e-10)


def test_specific_information_errors():
    d = gate_distribution("xor")
    with pytest.raises(ValueError, match="nonempty"):
        specific_information(d, 0, set())
    with pytest.raises(ValueError, match="out of range"):
        specific_information(d, 5, {1})
    with pytest.raises(ValueError, match="out of range"):
        specific_information(d, 0, {9})
    lopsided = JointDistribution(
        (VariableSpec("x", 2, "destination-next"), VariableSpec("a1", 2)),
        {(0, 0): 1, (0, 1): 1})
    with pytest.raises(ValueError, match="zero probability"):
        specific_information(lopsided, 1, {1})


# -- expected minimum specific information ----------------------------------

def test_i_min_frozen_gate_values():
    assert i_min(gate_distribution("or"), BOTTOM2) == pytest.approx(
        OR_REDUNDANCY, abs=1e-12)
    assert i_min(gate_distribution("xor"), BOTTOM2) == pytest.approx(0.0, abs=1e-12)
    assert i_min(gate_distribution("copy2"), BOTTOM2) == pytest.approx(1.0, abs=1e-12)


def test_i_min_single_subset_is_plain_mi():
    rng = np.random.default_rng(13)
    for _ in range(30):
        dist = random_distribution(rng, r=2)
        assert i_min(dist, [{1}]) == pytest.approx(
            avg_mi(dist, (0,), (1,)), abs=1e-10)
        assert i_min(dist, [{1, 2}]) == pytest.approx(
            avg_mi(dist, (0,), (1, 2)), abs=1e-10)


def test_i_min_matches_oracle_on_every_node():
    rng = np.random.default_rng(19)
    for _ in range(10):
        dist = random_distribution(rng, r=2)
        table = to_prob_table(dist)
        for node in build_lattice(2).nodes:
            expect = pid_oracle.imin(table, [set(s) for s in node])
            assert i_min(dist, node) == pytest.approx(expect, abs=1e-10)


def test_i_min_superset_member_is_inert():
    # Adding a superset of an existing subset cannot change the minimum.
    for gate in ("xor", "or", "and", "copy2"):
        d = gate_distribution(gate)
        assert i_min(d, [{1}, {1, 2}]) == pytest.approx(i_min(d, [{1}]), abs=1e-12)
    rng = np.random.default_rng(29)
    for _ in range(20):
        dist = random_distribution(rng, r=2)
        assert i_min(dist, [{2}, {1, 2}]) == pytest.approx(
            i_min(dist, [{2}]), abs=1e-12)


def test_i_min_shrinks_as_subsets_accumulate():
    rng = np.random.default_rng(31)
    for _ in range(20):
        dist = random_distribution(rng, r=2)
        lone = i_min(dist, [{1}])
        pair = i_min(dist, [{1}, {2}])
        assert pair <= lone + 1e-12
        assert pair >= -1e-12


def test_i_min_argument_forms():
    d = gate_distribution("or")
    v = i_min(d, BOTTOM2)
    assert i_min(d, [{1}, {2}]) == v
    assert i_min(d, (frozenset({2}), frozenset({1}))) == v
    with pytest.raises(ValueError):
        i_min(d, [])
    with pytest.raises(ValueError):
        i_min(d, [set()])


# -- argmin choices and localization ----------------------------------------

def test_argmin_ties_on_symmetric_or():
    table = argmin_table(gate_distribution("or"), BOTTOM2)
    assert set(table) == {0, 1}
    for choice in table.values():
        assert choice.tied
        assert choice.subset_index == 0  # canonical tie break


def test_argmin_tilt_resolves_ties():
    plus = argmin_table(or_distribution(1e-6), BOTTOM2)
    minus = argmin_table(or_distribution(-1e-6), BOTTOM2)
    assert not plus[1].tied and not minus[1].tied
    assert plus[1].subset_index == 0   # A1 is the weaker predictor
    assert minus[1].subset_index == 1  # tilting the other way flips it
    assert plus[1].specific_info == pytest.approx(OR_SPEC_X1_A1, abs=1e-4)


def test_local_i_min_single_subset_equals_local_mi():
    rng = np.random.default_rng(37)
    for _ in range(20):
        dist = random_distribution(rng, r=2)
        for obs in list(dist.counts)[:6]:
            got = local_i_min(dist, [{1, 2}], obs)
            expect = local_mi(dist, {0: obs[0]}, {1: obs[1], 2: obs[2]})
            assert got == pytest.approx(expect, abs=1e-12)


def test_local_i_min_weighted_mean_matches_average():
    # Only holds when no outcome is tied, so tilt the OR gate slightly.
    for dist in (gate_distribution("xor"), gate_distribution("copy2"),
                 or_distribution(1e-3)):
        mean = sum(
            c / dist.total * local_i_min(dist, BOTTOM2, obs)
            for obs, c in dist.counts.items())
        assert mean == pytest.approx(i_min(dist, BOTTOM2), abs=1e-9)


def test_local_i_min_matches_oracle_choice():
    dist = or_distribution(1e-6)
    table = to_prob_table(dist)
    for obs in sorted(dist.counts):
        locals_, specifics = pid_oracle.local_values(
            table, [frozenset({1}), frozenset({2})], obs)
        best = min(specifics, key=lambda s: (specifics[s], sorted(s)))
        assert local_i_min(dist, BOTTOM2, obs) == pytest.approx(
            locals_[best], abs=1e-12)


def test_local_i_min_rejects_bad_observations():
    d = gate_distribution("xor")
    with pytest.raises(ValueError, match="never counted"):
        local_i_min(d, BOTTOM2, (0, 0, 1))  # destination contradicts the gate
    with pytest.raises(ValueError, match="cover all"):
        local_i_min(d, BOTTOM2, (0, 0))


# -- partial terms and modified information ---------------------------------

def test_partial_terms_frozen_gates():
    lat = build_lattice(2)
    by_label = lambda valued: {n.label: valued.i_partial[n] for n in valued.nodes}

    xor = by_label(partial_terms(gate_distribution("xor"), lat))
    assert xor["{1}{2}"] == pytest.approx(0.0, abs=1e-12)
    assert xor["{1}"] == pytest.approx(0.0, abs=1e-12)
    assert xor["{2}"] == pytest.approx(0.0, abs=1e-12)
    assert xor["{1,2}"] == pytest.approx(1.0, abs=1e-12)

    orr = by_label(partial_terms(gate_distribution("or"), lat))
    assert orr["{1}{2}"] == pytest.approx(OR_REDUNDANCY, abs=1e-12)
    assert orr["{1}"] == pytest.approx(0.0, abs=1e-12)
    assert orr["{2}"] == pytest.approx(0.0, abs=1e-12)
    assert orr["{1,2}"] == pytest.approx(0.5, abs=1e-12)

    copy2 = by_label(partial_terms(gate_distribution("copy2"), lat))
    assert copy2["{1}{2}"] == pytest.approx(1.0, abs=1e-12)
    assert copy2["{1}"] == pytest.approx(0.0, abs=1e-12)
    assert copy2["{2}"] == pytest.approx(0.0, abs=1e-12)
    assert copy2["{1,2}"] == pytest.approx(1.0, abs=1e-12)


def test_partial_terms_match_oracle_decompose():
    rng = np.random.default_rng(41)
    lat = build_lattice(2)
    for _ in range(15):
        dist = random_distribution(rng, r=2)
        _, icap, ipart = pid_oracle.decompose(to_prob_table(dist), 2)
        valued = partial_terms(dist, lat)
        for node in valued.nodes:
            key = frozenset(node.subsets)
            assert valued.i_cap[node] == pytest.approx(icap[key], abs=1e-9)
            assert valued.i_partial[node] == pytest.approx(ipart[key], abs=1e-9)


def test_partial_terms_sum_to_total_mi():
    rng = np.random.default_rng(43)
    lat = build_lattice(2)
    for _ in range(15):
        dist = random_distribution(rng, r=2)
        valued = partial_terms(dist, lat)
        total = math.fsum(valued.i_partial.values())
        assert total == pytest.approx(avg_mi(dist, (0,), (1, 2)), abs=1e-10)
        assert valued.i_cap[valued.top] == pytest.approx(total, abs=1e-10)


def test_partial_terms_cached_per_distribution():
    d = gate_distribution("and")
    lat = build_lattice(2)
    assert partial_terms(d, lat) is partial_terms(d, lat)


def test_partial_terms_rejects_mismatched_lattice():
    with pytest.raises(ValueError, match="does not fit"):
        partial_terms(gate_distribution("xor"), build_lattice(3))


def test_modified_information_xor_dynamics():
    dec = modified_information(xor_dynamics(), k=1)
    assert dec.m_x == pytest.approx(1.0, abs=1e-12)
    assert dec.total == pytest.approx(1.0, abs=1e-12)
    assert dec.k == 1
    assert dec.source_names == ("h", "s")
    assert dec.hierarchy[1] == pytest.approx(0.0, abs=1e-12)
    assert dec.hierarchy[2] == pytest.approx(1.0, abs=1e-12)
    assert hierarchy_terms(dec) == dec.hierarchy


def test_modified_information_hierarchy_reconciles():
    dec = modified_information(xor_dynamics(), k=1, sources=["s"])
    assert math.fsum(dec.hierarchy.values()) == pytest.approx(dec.total, abs=1e-10)
    oracle_h = pid_oracle.hierarchy(
        {frozenset(n.subsets): v for n, v in dec.lattice.i_partial.items()}, 2)
    for order, value in oracle_h.items():
        assert dec.hierarchy[order] == pytest.approx(value, abs=1e-10)


def test_modified_information_validation():
    with pytest.raises(ValueError, match="destination-history"):
        modified_information(gate_distribution("xor"), k=1)
    with pytest.raises(ValueError, match="does not match k"):
        modified_information(xor_dynamics(), k=2)
    with pytest.raises(ValueError, match="k must be >= 1"):
        modified_information(xor_dynamics(), k=0)
    with pytest.raises(ValueError, match="must match"):
        modified_information(xor_dynamics(), k=1, sources=["wrong"])


def test_decomposition_report_shape():
    report = decomposition_report(modified_information(xor_dynamics(), k=1))
    assert report["format"] == "synpid-decomposition"
    assert report["r"] == 2
    assert report["sources"] == ["h", "s"]
    assert [n["antichain"] for n in report["nodes"]] == [
        "{1}{2}", "{1}", "{2}", "{1,2}"]
    assert report["hierarchy"] == {"1": 0.0, "2": 1.0}
    assert report["m_x"] == pytest.approx(1.0)


def test_i_partial_nonnegative_on_random_counts():
    rng = np.random.default_rng(47)
    lat = build_lattice(2)
    for _ in range(100):
        dist = random_distribution(rng, r=2)
        valued = partial_terms(dist, lat)
        for node, v in valued.i_partial.items():
            assert v >= -1e-9, (node.label, v)


# -- discontinuity scans ----------------------------------------------------

def test_scan_detects_localization_jump():
    report = discontinuity_scan(or_distribution, [-1e-6, 0.0, 1e-6], BOTTOM2)
    assert report.node_label == "{1}{2}"
    assert report.max_jump > 0.99
    assert report.any_tie  # the delta = 0 point is tied
    assert all(j.avg_abs_change < 1e-5 for j in report.jumps)
    # the average itself moves smoothly
    averages = [p.average for p in report.points]
    assert max(averages) - min(averages) < 1e-5


def test_scan_rows_track_choices():
    report = discontinuity_scan(or_distribution, [1e-6], BOTTOM2)
    rows = {r.observation: r for r in report.points[0].rows}
    assert set(rows) == {(0, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)}
    assert rows[(1, 0, 1)].chosen == "{1}"
    assert rows[(1, 0, 1)].value == pytest.approx(math.log2(2 / 3), abs=1e-4)
    assert rows[(1, 1, 0)].value == pytest.approx(math.log2(4 / 3), abs=1e-4)
    assert not any(r.tied for r in report.points[0].rows)


def test_scan_custom_local_function():
    report = discontinuity_scan(
        or_distribution, [0.0, 1e-3], BOTTOM2,
        local_fn=lambda d, obs: local_mi(d, {0: obs[0]}, {1: obs[1], 2: obs[2]}))
    for point in report.points:
        for row in point.rows:
            assert row.chosen is None
            assert not row.tied
    assert report.max_jump < 0.02  # joint local MI moves continuously here


def test_scan_rejects_support_changes():
    def builder(p):
        counts = dict(pid_oracle.or_table(0.0))
        if p > 0.5:
            counts.pop((1, 1, 1))
        variables = (
            VariableSpec("x", 2, "destination-next"),
            VariableSpec("a1", 2), VariableSpec("a2", 2))
        return JointDistribution(variables, counts)

    with pytest.raises(ValueError, match="support changed"):
        discontinuity_scan(builder, [0.0, 1.0], BOTTOM2)
    with pytest.raises(ValueError, match="at least one parameter"):
        discontinuity_scan(builder, [], BOTTOM2)


def test_tie_tolerance_is_tiny():
    assert 0 < TIE_TOLERANCE <= 1e-9
