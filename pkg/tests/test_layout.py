import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from giant_atoms.errors import DomainError, InvalidLayoutError, ModelValidityWarning, UnsupportedLayoutError
from giant_atoms.layout import (
    AtomSpec,
    Layout,
    Topology,
    braided_pair,
    classify_topology,
    dfi_candidate_points,
    giant_atom,
    layout_from_points,
    nested_pair,
    phase_map,
    separate_pair,
    single_atom,
    small_pair,
)
from giant_atoms.resolvent import f_pm


def test_atom_validation():
    with pytest.raises(InvalidLayoutError):
        AtomSpec(0.0, (3, 1), 0.2)
    with pytest.raises(InvalidLayoutError):
        AtomSpec(0.0, (1, 1), 0.2)
    with pytest.raises(InvalidLayoutError):
        AtomSpec(0.0, (), 0.2)
    with pytest.raises(InvalidLayoutError):
        AtomSpec(0.0, (0, 1.5), 0.2)
    with pytest.raises(InvalidLayoutError):
        AtomSpec(0.0, (0,), -0.1)
    with pytest.raises(InvalidLayoutError):
        AtomSpec(float("nan"), (0,), 0.1)


def test_strong_coupling_warns_but_builds():
    with pytest.warns(ModelValidityWarning):
        atom = AtomSpec(0.0, (0, 1), 1.5)
    assert atom.g == 1.5


def test_weak_coupling_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        AtomSpec(0.0, (0, 1), 0.5)


def test_shared_cavity_rejected():
    with pytest.raises(InvalidLayoutError):
        layout_from_points([(0, 2), (2, 4)], 0.0, 0.2)


def test_too_many_atoms():
    atoms = tuple(AtomSpec(0.0, (i,), 0.1) for i in range(3))
    with pytest.raises(UnsupportedLayoutError):
        Layout(atoms)


@pytest.mark.parametrize("points, expected", [
    ([(0, 5), (10, 15)], Topology.SEPARATE),
    ([(0, 15), (5, 10)], Topology.NESTED),
    ([(0, 10), (5, 15)], Topology.BRAIDED),
    ([(5, 10), (0, 15)], Topology.NESTED),
])
def test_classify_topology(points, expected):
    assert classify_topology(layout_from_points(points, 0.0, 0.1)) is expected


def test_classify_needs_two_point_atoms():
    with pytest.raises(UnsupportedLayoutError):
        classify_topology(giant_atom(0.0, 0.1, 2))
    with pytest.raises(UnsupportedLayoutError):
        classify_topology(layout_from_points([(0, 3, 6), (1, 4)], 0.0, 0.1))


@given(st.integers(-1000, 1000), st.sampled_from([braided_pair, nested_pair, separate_pair]),
       st.integers(1, 20))
def test_topology_translation_invariant(shift, builder, d):
    lay = builder(0.0, 0.2, d)
    assert classify_topology(lay.shifted(shift)) is classify_topology(lay)


def test_generators():
    assert braided_pair(0, 0.2, 3).topology is Topology.BRAIDED
    assert nested_pair(0, 0.2, 3).topology is Topology.NESTED
    assert separate_pair(0, 0.2, 3).topology is Topology.SEPARATE
    assert single_atom(0, 0.2).topology is Topology.SINGLE
    b = braided_pair(0.5, 0.2, 4)
    assert b.span == 12 and b.spacing == 4 and b.equidistant and b.identical
    assert small_pair(3.0, 0.2, 7).span == 7
    assert not nested_pair(0, 0.2, 2).identical
    assert giant_atom(0, 0.2, 3, P=4).atoms[0].coupling_points == (0, 3, 6, 9)


def test_layout_not_equidistant():
    lay = layout_from_points([(0, 3), (1, 7)], 0.0, 0.1)
    assert not lay.equidistant and lay.spacing is None


def test_phase_map_examples():
    assert phase_map(1, 0.0).varphi == pytest.approx(np.pi / 2)
    assert phase_map(2, 0.0).varphi == pytest.approx(np.pi)
    assert phase_map(3, -1.0).varphi == pytest.approx(np.pi)


def test_phase_map_matches_argument_of_f():
    # Inside the band f(Delta + i0) = exp(i phi) per site.
    for Delta in (-1.5, -1.0, 0.3, 1.8):
        arg = np.angle(f_pm(complex(Delta, 0.0)))
        assert phase_map(1, Delta).varphi == pytest.approx(arg, abs=1e-12)


def test_phase_map_outside_band():
    with pytest.raises(DomainError):
        phase_map(1, 2.5)


@given(st.integers(1, 50), st.floats(-2, 2))
def test_phase_map_linear_in_d(d, Delta):
    assert phase_map(d, Delta).varphi == d * phase_map(1, Delta).varphi


def test_dfi_candidates_examples():
    assert dfi_candidate_points(1) == [(1, 0.0)]
    d2 = [x for d, x in dfi_candidate_points(2) if d == 2]
    assert d2 == [pytest.approx(-np.sqrt(2))]
    d5 = [x for d, x in dfi_candidate_points(5) if d == 5]
    assert any(x == pytest.approx(-2 * np.cos(np.pi / 10)) for x in d5)
    assert any(x == pytest.approx(0.0, abs=1e-12) for x in d5)


def test_dfi_candidates_match_root_scan():
    # Independent route: sign changes of the wrapped phase offset on a fine grid.
    Delta = np.linspace(-2, 2, 400_001)
    off = np.mod(2 * np.arccos(-Delta / 2) - np.pi / 2 + np.pi, 2 * np.pi) - np.pi
    idx = np.nonzero((np.sign(off[:-1]) != np.sign(off[1:])) & (np.abs(off[:-1]) < 1))[0]
    roots = Delta[idx]
    d2 = [x for d, x in dfi_candidate_points(2) if d == 2]
    np.testing.assert_allclose(sorted(d2), sorted(roots), atol=2e-5)


@given(st.integers(1, 15))
def test_dfi_candidates_satisfy_condition(d_max):
    for d, Delta in dfi_candidate_points(d_max):
        phi = phase_map(d, Delta).varphi
        assert abs(np.mod(phi, 2 * np.pi) - np.pi / 2) <= 1e-9


def test_dfi_candidates_second_branch():
    both = dfi_candidate_points(7, both_branches=True)
    assert (7, 0.0) in [(d, round(x, 12) + 0.0) for d, x in both]
    assert (7, 0.0) not in [(d, round(x, 12) + 0.0) for d, x in dfi_candidate_points(7)]


def test_dfi_candidates_sorted():
    pts = dfi_candidate_points(10, both_branches=True)
    assert pts == sorted(pts)
