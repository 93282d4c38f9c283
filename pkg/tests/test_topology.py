"""Topology construction invariants."""

import pytest

from island_evo.topology import make_topology


@pytest.mark.parametrize("kind", ["ring", "complete"])
@pytest.mark.parametrize("lam", [3, 4, 5, 8])
def test_symmetric_and_irreflexive(kind, lam):
    topo = make_topology(kind, lam)
    for j, nbrs in enumerate(topo.neighbors):
        assert j not in nbrs
        assert list(nbrs) == sorted(set(nbrs))
        for i in nbrs:
            assert j in topo.neighbors[i]


def test_ring_degrees():
    for lam in (3, 4, 7):
        topo = make_topology("ring", lam)
        assert all(len(nbrs) == 2 for nbrs in topo.neighbors)
    assert make_topology("ring", 3).neighbors == ((1, 2), (0, 2), (0, 1))


def test_complete_degrees():
    for lam in (1, 2, 5):
        topo = make_topology("complete", lam)
        assert all(len(nbrs) == lam - 1 for nbrs in topo.neighbors)


def test_isolated_has_no_edges():
    topo = make_topology("isolated", 6)
    assert all(nbrs == () for nbrs in topo.neighbors)
    assert not topo.has_edges
    assert make_topology("ring", 3).has_edges


def test_diameters():
    assert make_topology("complete", 1).diameter() == 0
    assert make_topology("complete", 9).diameter() == 1
    assert make_topology("ring", 6).diameter() == 3
    assert make_topology("ring", 7).diameter() == 3
    with pytest.raises(ValueError):
        make_topology("isolated", 4).diameter()


def test_validation():
    with pytest.raises(ValueError):
        make_topology("ring", 2)
    with pytest.raises(ValueError):
        make_topology("torus", 4)
    with pytest.raises(ValueError):
        make_topology("complete", 0)
