import pytest

from cubical.boxcat import Degeneracy
from cubical.core import (CubicalMap, are_isomorphic, boundary, enumerate_maps, point, product,
                          quotient_by, representable)
from cubical.groups import (AbelianInvariants, GroupPresentation, NotAFibration,
                            NotKanUpToRequiredDimension, abelian_invariants, basepoint_transport,
                            collapse_map, concatenate, fiber, induced_on_pi_n, interchange_box,
                            les_report, loop_map, loop_space, parse_presentation, path_loop_checks,
                            path_loop_space, path_space_maps, pi0_exactness_check, pi1_presentation,
                            pi_n, product_check, quotient_class_bijection, sphere_class,
                            whitehead_report)
from cubical.homotopy import pi0
from cubical.lifting import IncompatibleFaces, is_fibration
from cubical.spaces import circle, codiscrete, torus


def _loops_in(X, x, k):
    out = []
    for w in X.materialize(k + 1):
        if X.face(w, 1, 0).base == x and X.face(w, 1, 1).base == x:
            out.append(w)
    return out


# -- loop spaces ---------------------------------------------------------------------

def test_loop_space_of_point():
    S = loop_space(point(), "pt").to_cubical_set(2)
    assert pi0(S.space).count == 1


def test_loop_space_vertices_of_codiscrete(codisc2):
    L = loop_space(codisc2, "a")
    assert L.level(0) == _loops_in(codisc2, "a", 0)
    assert len(L.level(0)) == 1


def test_shift_levels_are_filtered_cubes(codisc2_4):
    L = loop_space(codisc2_4, "a")
    for k in range(4):
        assert set(L.level(k)) == set(_loops_in(codisc2_4, "a", k))


def test_loops_of_a_product_are_pairs_of_loops():
    X = codiscrete("ab", 2)
    P, px, py = product(X, X, 2, skeleton=True)
    LP, LX = loop_space(P, "(a,b)"), loop_space(X, "a")
    LY = loop_space(X, "b")
    for k in range(2):
        pairs = {(px(w), py(w)) for w in LP.level(k)}
        assert len(pairs) == len(LP.level(k))
        assert pairs == {(u, v) for u in LX.level(k) for v in LY.level(k)}


def test_path_loop_space_contains_loops(codisc2):
    PL = path_loop_space(codisc2, "a")
    for k in range(2):
        assert set(loop_space(codisc2, "a").level(k)) <= set(PL.level(k))


# -- homotopy groups --------------------------------------------------------------------

def test_point_groups_are_trivial():
    P = codiscrete("a", 4)
    for n in range(3):
        assert pi_n(P, "a", n).is_trivial()


def test_codiscrete_fundamental_group_is_trivial(codisc2, codisc3):
    for X in (codisc2, codisc3):
        G = pi_n(X, "a", 1)
        assert G.is_trivial() and G.axioms_hold()


def test_codiscrete_pi0(codisc3):
    assert pi_n(codisc3, "b", 0).order == 1


def test_nerve_fundamental_group(nerve2):
    G = pi_n(nerve2, "0", 1)
    assert G.order == 2
    assert G.table == [[0, 1], [1, 0]]
    assert G.inverse == [0, 1]
    assert G.axioms_hold()
    for law in ("left_unit", "right_unit", "associativity", "inverse"):
        assert G.witnesses[law]
    assert G.witnesses["rechoice_checks"] > 0


def test_group_law_witnesses_have_the_stated_faces(nerve2):
    G = pi_n(nerve2, "0", 1)
    X = nerve2
    unit = X.constant("0", 1)
    for sq in G.witnesses["left_unit"]:
        assert X.face(sq, 1, 0) == unit == X.face(sq, 1, 1)
    for (a, b, c), W in G.witnesses["associativity"]:
        S = X.face(W, 3, 0)
        assert X.face(S, 1, 1) == unit
    for a, H in G.witnesses["inverse"]:
        assert X.face(H, 2, 0) == unit


def test_non_kan_input_is_refused():
    with pytest.raises(NotKanUpToRequiredDimension):
        pi_n(circle(), "v", 1)


def test_concatenation_with_units(nerve2):
    X = nerve2
    G = pi_n(X, "0", 1)
    unit = X.constant("0", 1)
    sq, prod = concatenate(X, unit, unit)
    assert G.class_of[prod] == 0
    f = X.ref("01")
    for left, right in ((f, unit), (unit, f)):
        sq, prod = concatenate(X, left, right)
        assert G.class_of[prod] == G.class_of[f]
        assert X.face(sq, 1, 0) == left and X.face(sq, 2, 1) == right
        assert X.face(sq, 1, 1) == X.act_gen(X.face(right, 1, 1), Degeneracy(1))


def test_products_of_groups(codisc2, nerve2):
    rep = product_check(codisc2, "a", nerve2, "0", 1, 3)
    assert rep["ok"] and rep["orders"] == (2, 1, 2)
    assert rep["laws"]


def test_pi0_of_products():
    X = codiscrete("ab", 2)
    Y = boundary(1)[0]
    P = product(X, Y, 2, skeleton=True)[0]
    assert pi0(P).count == pi0(X).count * pi0(Y).count


def test_maps_induce_homomorphisms(nerve2):
    G = pi_n(nerve2, "0", 1)
    ident = nerve2.identity_map()
    assert induced_on_pi_n(ident, G, G) == [0, 1]


# -- presentations --------------------------------------------------------------------

def test_abelian_invariants_of_small_presentations():
    assert abelian_invariants(GroupPresentation(["u"], [])) == AbelianInvariants(1, [])
    comm = [("a", 1), ("b", 1), ("a", -1), ("b", -1)]
    assert abelian_invariants(GroupPresentation(["a", "b"], [comm])) == AbelianInvariants(2, [])
    assert abelian_invariants(GroupPresentation(["a"], [[("a", 1), ("a", 1)]])) == \
        AbelianInvariants(0, [2])
    six = GroupPresentation(["a", "b"], [[("a", 1)] * 2, [("b", 1)] * 3])
    assert abelian_invariants(six) == AbelianInvariants(0, [6])


def test_presentation_text_round_trip():
    P = pi1_presentation(torus(), "v|v")
    Q = parse_presentation(P.text())
    assert Q.generators == P.generators and Q.relations == P.relations
    assert P.text().startswith("gen: ")


def test_cubical_presentations():
    assert abelian_invariants(pi1_presentation(circle(), "v")).rank == 1
    assert str(abelian_invariants(pi1_presentation(torus(), "v|v"))) == "Z + Z"
    S2, _, base = quotient_by(representable(2), boundary(2)[1])
    assert abelian_invariants(pi1_presentation(S2, base)).is_trivial()


# -- equivalent descriptions -----------------------------------------------------------

def test_collapse_map_is_pointed():
    for n in (1, 2):
        c, B = collapse_map(n)
        assert c.is_valid()
        assert c("0" * (n + 1)).base == c(B.nd(0)[-1]).base


@pytest.mark.parametrize("n", [0, 1])
def test_four_descriptions_agree_on_codiscrete(codisc3, n):
    rep = quotient_class_bijection(codisc3, "a", n)
    assert rep["consistent"], rep
    assert rep["relative"] == rep["loop_components"] == rep["quotient"] == rep["boundary_sphere"]


def test_four_descriptions_agree_on_nerve(nerve2_4):
    rep = quotient_class_bijection(nerve2_4, "0", 1)
    assert rep["consistent"] and rep["classes"] == 2


def test_constant_sphere_is_trivial(codisc2):
    B = boundary(2)[0]
    f = CubicalMap(B, codisc2, {c: codisc2.constant("a", B.dim_of[c]) for c in B.all_ids()})
    rep = sphere_class(f, "a")
    assert rep.trivial and rep.filler is not None and rep.consistent


def test_every_circle_in_codiscrete_bounds(codisc2):
    B = boundary(2)[0]
    for f in enumerate_maps(B, codisc2):
        if f("00").base != "a":
            continue
        rep = sphere_class(f, "a")
        assert rep.trivial and rep.consistent


def test_circles_in_nerve_split_by_fillers(nerve2):
    B = boundary(2)[0]
    spheres = [f for f in enumerate_maps(B, nerve2)]
    classes = {sphere_class(f, "0").class_index for f in spheres}
    assert classes == {0, 1}
    assert all(sphere_class(f, "0").consistent for f in spheres)


# -- interchange ------------------------------------------------------------------------

def test_interchange_degenerate(codisc2_4):
    X = codisc2_4
    d = X.constant("a", 2)
    res = interchange_box(X, d, d, d, d)
    assert res.valid and res.filler is not None
    assert res.filler == X.constant("a", 4)


def test_interchange_codiscrete_grid(codisc2_4):
    X = codisc2_4
    squares = X.materialize(2)
    f1 = next(w for w in squares if not w.is_degenerate)
    right = [w for w in squares if X.face(w, 1, 0) == X.face(f1, 1, 1)]
    f2 = right[min(3, len(right) - 1)]
    g1 = next(w for w in squares if X.face(w, 2, 0) == X.face(f1, 2, 1))
    g2 = next(w for w in squares if X.face(w, 2, 0) == X.face(f2, 2, 1)
              and X.face(w, 1, 0) == X.face(g1, 1, 1))
    res = interchange_box(X, f1, f2, g1, g2)
    assert res.valid and res.filler is not None


def test_interchange_rejects_mismatched_edges(codisc2_4):
    X = codisc2_4
    a, b = X.constant("a", 2), X.constant("b", 2)
    with pytest.raises(IncompatibleFaces):
        interchange_box(X, a, b, a, a)


# -- fibrations ---------------------------------------------------------------------------

def test_path_loop_checks(codisc2):
    rep = path_loop_checks(codisc2, "a", 2)
    assert rep["ok"] and rep["loop_pullback"] and rep["path_pullback"]
    assert path_loop_checks(codiscrete("a", 3), "a", 2)["ok"]


def test_fibers():
    X, F = codiscrete("ab", 2), codiscrete("abc", 2)
    P, px, py = product(X, F, 2, skeleton=True)
    fib, inc = fiber(px, "a")
    assert are_isomorphic(fib.space, F) is not None
    one, _ = fiber(X.identity_map(), "a")
    assert one.space.counts() == [1]


def test_fiber_of_endpoint_is_loop_space(codisc2):
    rep = path_loop_checks(codisc2, "a", 1)
    L = loop_space(codisc2, "a").to_cubical_set()
    fib, inc = fiber(rep["endpoint"], "a")
    assert are_isomorphic(fib.space, L.space) is not None


def test_pi0_exactness():
    X, F = codiscrete("ab", 2), codiscrete("abc", 2)
    P, px, py = product(X, F, 2, skeleton=True)
    assert pi0_exactness_check(px, "a", 2)["exact"]
    rep = path_loop_checks(X, "a", 1)
    assert pi0_exactness_check(rep["endpoint"], "a", 1)["exact"]
    from cubical.core import subcomplex
    with pytest.raises(NotAFibration):
        pi0_exactness_check(subcomplex(representable(1), ["0"])[1], "0", 1)


def test_les_of_identity_and_projection(codisc2):
    rep = les_report(codisc2.identity_map(), "a", 1, 2)
    assert rep["ok"] and not rep["violations"]
    X = codiscrete("ab", 3)
    P, px, py = product(X, codiscrete("ab", 3), 3, skeleton=True)
    rep = les_report(px, "(a,a)", 1, 2)
    assert rep["ok"]
    assert any(n["status"] == "OK" for n in rep["nodes"])


def test_les_of_path_endpoint(nerve2_4):
    rep = path_loop_checks(nerve2_4, "0", 2)
    les = les_report(rep["endpoint"], rep["space"].nd(0)[0], 1, 2)
    assert les["ok"]
    assert les["orders"]["pi1(Y)"] == 2 and les["orders"]["pi0(A)"] == 2


def test_loop_map_preserves_fibrations():
    X = codiscrete("ab", 3)
    P, px, py = product(X, X, 3, skeleton=True)
    assert is_fibration(px, 2).ok
    m, SX, SY = loop_map(px, "(a,a)")
    assert is_fibration(m, 1).ok


def test_path_space_section(codisc2):
    PX, section, ends, pair, XX = path_space_maps(codisc2)
    for e in ends:
        comp = e.compose(section)
        assert all(comp(c) == codisc2.ref(c) for c in section.source.all_ids())


def test_basepoint_transport(codisc2):
    g, hom, rep = basepoint_transport(codisc2, "ab", 3)
    assert rep["moves_basepoint"] and rep["pi0_bijective"] and rep["homotopy_valid"]
    assert rep.get("pi1_bijective", True)
    g, hom, rep = basepoint_transport(codisc2, codisc2.constant("a", 1), 3)
    assert rep["moves_basepoint"]
    with pytest.raises(NotKanUpToRequiredDimension):
        basepoint_transport(circle(), "u", 2)


def test_whitehead_reports(codisc2):
    rep = whitehead_report(codisc2.identity_map(), 2)
    assert rep["consistent"] and rep["groups_iso"]
    X = codiscrete("ab", 3)
    P, px, py = product(X, codiscrete("a", 3), 3, skeleton=True)
    assert whitehead_report(px, 2)["consistent"]
