from cubical.boxcat import Face, compose, make_generator
from cubical.core import (CubicalMap, boundary, disjoint_union, point, rep_cube_morphism, representable,
                          subcomplex)
from cubical.homotopy import (are_homotopic, cube_contraction, elementary_homotopy_search,
                              induced_on_pi0, path_object_check, pi0, relative_classes,
                              relative_homotopy_search, vertex_inclusion_equivalence)
from cubical.spaces import circle, codiscrete


def _vertex_map(X, v):
    return CubicalMap(point(), X, {"pt": X.ref(v)})


def _components_by_brute_force(X):
    # repeated relaxation over all materialized 1-cubes
    label = {v: v for v in X.nd(0)}
    changed = True
    while changed:
        changed = False
        for e in X.materialize(1):
            a, b = X.face(e, 1, 0).base, X.face(e, 1, 1).base
            m = min(label[a], label[b])
            for v in (a, b):
                if label[v] != m:
                    label[v] = m
                    changed = True
    return len(set(label.values()))


def test_pi0_small_cases():
    for n in range(4):
        assert pi0(representable(n)).count == 1
    assert pi0(boundary(1)[0]).count == 2
    U = disjoint_union(circle(), boundary(1)[0])[0]
    assert pi0(U).count == 3 == _components_by_brute_force(U)


def test_pi0_is_additive():
    spaces = [circle(), boundary(1)[0], representable(2), codiscrete("ab", 2)]
    for X in spaces:
        for Y in spaces:
            U = disjoint_union(X, Y)[0]
            assert pi0(U).count == pi0(X).count + pi0(Y).count


def test_reflexive_homotopy():
    X = codiscrete("ab", 2)
    f = _vertex_map(X, "a")
    h = elementary_homotopy_search(f, f)
    assert h is not None and h.is_valid()


def test_constant_maps_into_codiscrete_are_homotopic():
    X = codiscrete("ab", 2)
    h = elementary_homotopy_search(_vertex_map(X, "a"), _vertex_map(X, "b"))
    assert h is not None and h.is_valid()
    ok, chain = are_homotopic(_vertex_map(X, "a"), _vertex_map(X, "b"))
    assert ok and len(chain) == 1


def test_endpoints_of_two_points_are_not_homotopic():
    B = boundary(1)[0]
    a, b = B.nd(0)
    assert elementary_homotopy_search(_vertex_map(B, a), _vertex_map(B, b)) is None
    assert are_homotopic(_vertex_map(B, a), _vertex_map(B, b))[0] is False


def test_interval_endpoints_are_homotopic_by_a_zigzag():
    I = representable(1)
    ok, chain = are_homotopic(_vertex_map(I, "1"), _vertex_map(I, "0"))
    assert ok and chain and all(h.is_valid() for h, _ in chain)


def test_absolute_and_empty_relative_agree():
    X = codiscrete("ab", 2)
    f, g = _vertex_map(X, "a"), _vertex_map(X, "b")
    assert (relative_homotopy_search(f, g) is None) == (elementary_homotopy_search(f, g) is None)


def test_relative_classes_of_paths_in_codiscrete():
    X = codiscrete("ab", 2)
    A = subcomplex(X, ["a"])[1]
    classes = relative_classes(representable(1), boundary(1)[1], X, A)
    assert len(classes) == 1


def test_relative_symmetry_on_kan_pair():
    X = codiscrete("ab", 2)
    A = subcomplex(X, ["a"])[1]
    I = representable(1)
    maps = [m for m in _maps_of_pairs(I, X, A)]
    for f in maps:
        for g in maps:
            h = relative_homotopy_search(f, g, boundary(1)[1], A)
            if h is not None:
                assert relative_homotopy_search(g, f, boundary(1)[1], A) is not None


def _maps_of_pairs(I, X, A):
    from cubical.core import enumerate_maps
    inside = A.image_ids()
    for m in enumerate_maps(I, X):
        if m("0").base in inside and m("1").base in inside:
            yield m


def test_cube_contraction_ends():
    for n in (1, 2, 3):
        H = cube_contraction(n)
        assert H.is_valid()
        box = representable(n)
        assert H.start.assignment == box.identity_map().assignment
        # the stop is the face d(n,1) after the degeneracy s(n)
        want = compose(make_generator(Face(n, 1), n), _degen(n))
        for c in box.all_ids():
            r = H.stop(c)
            got = compose(rep_cube_morphism(r.base), r.epi)
            assert got == compose(want, rep_cube_morphism(c))


def _degen(n):
    from cubical.boxcat import Degeneracy
    return make_generator(Degeneracy(n), n)


def test_vertex_inclusion_is_homotopy_equivalence():
    for n in (1, 2):
        inc, ret, chain = vertex_inclusion_equivalence(n)
        assert ret.compose(inc) == point().identity_map()
        assert all(h.is_valid() for h in chain)
        box = representable(n)
        assert chain[0].start.assignment == box.identity_map().assignment
        assert chain[-1].stop == inc.compose(ret)
        for a, b in zip(chain, chain[1:]):
            assert a.stop == b.start
        # pi0 agrees along the equivalence
        assert induced_on_pi0(inc) == {0: 0}


def test_homotopy_closure_adds_nothing_on_kan_target():
    X = codiscrete("ab", 2)
    from cubical.core import enumerate_maps
    maps = enumerate_maps(boundary(1)[0], X)
    for f in maps:
        for g in maps:
            single = elementary_homotopy_search(f, g) is not None
            assert single == are_homotopic(f, g)[0]


def test_path_object_checks():
    assert path_object_check(point(), 2)["ok"]
    rep = path_object_check(codiscrete("ab", 3), 2)
    assert rep["ok"] and rep["applicable"] and rep["section"]
    rep = path_object_check(circle(), 2)
    assert rep["section"] and not rep["applicable"]
