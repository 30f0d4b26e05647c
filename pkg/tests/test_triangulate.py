import itertools
import math

from cubical.core import boundary, pushout, quotient_by, representable, to_point
from cubical.groups import abelian_invariants
from cubical.spaces import circle, codiscrete, torus
from cubical.triangulate import (Triangulation, edge_path_presentation, oracle_compare,
                                 simplicial_identity_violations, triangulate, triangulate_map)


def _chains_in_cube(n):
    """Nondegenerate simplices of the n-fold power of the 1-simplex, by brute force."""
    verts = list(itertools.product((0, 1), repeat=n))

    def le(a, b):
        return all(x <= y for x, y in zip(a, b))

    counts = []
    for m in range(n + 1):
        c = 0
        for chain in itertools.combinations(sorted(verts), m + 1):
            if all(le(a, b) and a != b for a, b in zip(chain, chain[1:])):
                c += 1
        counts.append(c)
    return counts


def test_cube_counts_match_chain_oracle():
    for n in range(5):
        assert triangulate(representable(n)).counts() == _chains_in_cube(n)


def test_top_simplices_of_cubes():
    for n in range(5):
        assert triangulate(representable(n)).counts()[n] == math.factorial(n)
    assert triangulate(representable(2)).counts() == [4, 5, 2]


def test_interval_and_circle():
    assert triangulate(representable(1)).counts() == [2, 1]
    K = triangulate(circle())
    assert K.counts() == [1, 1]
    assert K.euler_characteristic() == 0


def test_simplicial_identities():
    for X in (representable(3), torus(), codiscrete("ab", 3), boundary(3)[0]):
        assert simplicial_identity_violations(triangulate(X), cap=3) == []


def test_euler_characteristic_is_preserved():
    for X in (representable(3), torus(), boundary(3)[0], circle()):
        assert triangulate(X).euler_characteristic() == X.euler_characteristic()


def test_triangulation_preserves_the_sphere_pushout():
    for n in (1, 2):
        B, inc = boundary(n)
        Q, proj, base = quotient_by(representable(n), inc)
        TQ = triangulate(Q)
        # the pushout of T(box) <- T(bd) -> point, counted cell by cell
        TB, Tbox = triangulate(B), triangulate(representable(n))
        expect = [a - b for a, b in zip(Tbox.counts(), TB.counts() + [0] * n)]
        expect[0] += 1
        assert TQ.counts() == expect


def test_triangulated_map_respects_faces():
    B, inc = boundary(2)
    TX, TY = Triangulation(B), Triangulation(representable(2))
    Tf = triangulate_map(inc, TX, TY)
    K, L = TX.space, TY.space
    for s in K.nd(1):
        for i in range(2):
            assert L.face(Tf[s], i) == _push(Tf, K.face(K.ref(s), i), L)


def _push(Tf, r, L):
    from cubical.triangulate import SimplexRef
    img = Tf[r.base]
    return SimplexRef(img.base, tuple(img.degen[v] for v in r.degen))


def test_edge_path_presentations():
    assert abelian_invariants(edge_path_presentation(triangulate(representable(1)), "0")).is_trivial()
    assert abelian_invariants(edge_path_presentation(triangulate(circle()), "v")).rank == 1
    assert abelian_invariants(edge_path_presentation(triangulate(torus()), "v|v")).rank == 2


def test_oracle_agreement():
    S2, _, base = quotient_by(representable(2), boundary(2)[1])
    for X, x, rank in ((circle(), "v", 1), (torus(), "v|v", 2), (S2, base, 0)):
        rep = oracle_compare(X, x)
        assert rep["agree"] and rep["cubical"].rank == rank and not rep["cubical"].torsion


def test_oracle_agreement_on_suite_spaces():
    B, inc = boundary(1)
    S1, _, _ = pushout(inc, to_point(B))
    for X, x in ((codiscrete("ab", 3), "a"), (S1, S1.nd(0)[0]), (boundary(3)[0], "000")):
        assert oracle_compare(X, x)["agree"]
