import itertools

from cubical.boxcat import Degeneracy
from cubical.core import (CubicalMap, boundary, face_keys, open_box, point, product, representable,
                          search_maps, subcomplex, to_point)
from cubical.lifting import (LiftingProblem, OpenBoxMap, enumerate_open_boxes, find_filler, find_lift,
                             has_rlp_boundaries, is_fibration, is_kan)
from cubical.spaces import circle, codiscrete


def _faces_match(X, cube, box):
    return all(X.face(cube, *k) == r for k, r in box.faces.items())


def test_representable_fills_its_own_box():
    I = representable(1)
    box = OpenBoxMap(1, 1, 1, {(1, 0): I.ref("0")})
    filler = find_filler(I, box)
    assert _faces_match(I, filler, box)
    # degenerate fillers come first in the search order; the interval is the other one
    assert filler.is_degenerate
    fills = [c for c in I.materialize(1) if _faces_match(I, c, box)]
    assert I.ref("*") in fills and len(fills) == 2


def test_two_points_fill_only_degenerately():
    B = boundary(1)[0]
    box = OpenBoxMap(1, 1, 1, {(1, 0): B.ref(B.nd(0)[0])})
    # the only filler is degenerate, so it never reaches the other point
    filler = find_filler(B, box)
    assert filler.is_degenerate
    assert B.face(filler, 1, 1) == B.ref(B.nd(0)[0])


def test_codiscrete_fills_every_square_box(codisc2):
    for (n, i, e) in [(2, i, e) for i in (1, 2) for e in (0, 1)]:
        for box in enumerate_open_boxes(codisc2, n, i, e):
            cube = find_filler(codisc2, box)
            assert cube is not None and _faces_match(codisc2, cube, box)


def test_open_box_counts_terminal_and_interval():
    P = point()
    for n in range(1, 4):
        for i in range(1, n + 1):
            for e in (0, 1):
                assert len(enumerate_open_boxes(P, n, i, e)) == 1
    assert len(enumerate_open_boxes(representable(1), 1, 1, 0)) == 2


def test_open_box_count_against_brute_force():
    X = boundary(2)[0]
    edges = X.materialize(1)

    def ends(r):
        return X.face(r, 1, 0), X.face(r, 1, 1)

    # missing (2,1): faces (1,0), (1,1), (2,0); the identity d(2,t)d(1,s) = d(1,s)d(1,t)
    count = 0
    for a, b, c in itertools.product(edges, repeat=3):
        if ends(c)[0] == ends(a)[0] and ends(c)[1] == ends(b)[0]:
            count += 1
    assert len(enumerate_open_boxes(X, 2, 2, 1)) == count


def test_kan_checks(codisc2):
    assert is_kan(point(), 3).ok
    rep = is_kan(representable(1), 2)
    assert not rep.ok and rep.counterexample is not None
    assert is_kan(codisc2, 3).ok
    for pts in ("a", "abc"):
        assert is_kan(codiscrete(pts, 3), 3).ok


def test_kan_reports_are_deterministic():
    a = is_kan(representable(1), 2)
    b = is_kan(representable(1), 2, budget=10 ** 7)
    assert (a.ok, a.shape, a.counterexample) == (b.ok, b.shape, b.counterexample)


def test_boundary_lifting():
    assert has_rlp_boundaries(point(), 3).ok
    assert has_rlp_boundaries(codiscrete("ab", 3), 3).ok
    rep = has_rlp_boundaries(circle(), 2)
    assert not rep.ok and rep.shape == (2,)


def test_fibrations(codisc2):
    assert is_fibration(to_point(codisc2), 2).ok
    F = codiscrete("ab", 2)
    P, px, py = product(codisc2, F, 2, skeleton=True)
    assert is_fibration(px, 2).ok
    inc = subcomplex(representable(1), ["0"])[1]
    rep = is_fibration(inc, 1)
    assert not rep.ok


def test_lift_along_identity():
    X = codiscrete("ab", 2)
    top = X.identity_map()
    L = LiftingProblem(X.identity_map(), top)
    assert find_lift(L) == top


def test_lift_of_open_box_into_codiscrete(codisc2):
    O, inc = open_box(2, 2, 1)
    top = next(CubicalMap(O, codisc2, a) for a in search_maps(O, codisc2))
    lift = find_lift(LiftingProblem(inc, top, to_point(codisc2), to_point(representable(2))))
    assert lift is not None
    assert lift.compose(inc) == top


def test_fillers_of_one_box_have_homotopic_missing_faces(codisc2):
    X = codisc2
    squares = X.materialize(2)
    for box in list(enumerate_open_boxes(X, 2, 2, 1))[:12]:
        fills = [c for c in squares if _faces_match(X, c, box)]
        assert fills
        tops = {X.face(c, 2, 1) for c in fills}
        for u, v in itertools.combinations(sorted(tops, key=X.sort_key), 2):
            a, b = X.face(u, 1, 0), X.face(u, 1, 1)
            rel = [w for w in squares if X.face(w, 2, 0) == u and X.face(w, 2, 1) == v
                   and X.face(w, 1, 0) == X.act_gen(a, Degeneracy(1))
                   and X.face(w, 1, 1) == X.act_gen(b, Degeneracy(1))]
            assert rel


def test_face_keys_cover_boundary():
    assert len(face_keys(3)) == 6
