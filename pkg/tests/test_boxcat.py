import pytest

from cubical.boxcat import (
    Degeneracy, DimensionMismatch, Face, IndexOutOfRange, NegConnection,
    PosConnection, WordSyntaxError, canonical_word, check_identities, compose, epi_mono_factor,
    enumerate_hom, epis, format_word, hom_set, identity, make_generator, monos, normalize_word,
    parse_word, tensor, word_morphism,
)


# -- an independent model of the cube category on coordinate tuples ----------------------

def _tuple_generators(n):
    """Generator maps touching ``[1]^n`` as (dom, cod, function) on tuples."""
    out = []
    for i in range(1, n + 1):
        for e in (0, 1):
            out.append((n - 1, n, lambda x, i=i, e=e: x[:i - 1] + (e,) + x[i - 1:]))
        out.append((n, n - 1, lambda x, i=i: x[:i - 1] + x[i:]))
    for i in range(1, n):
        out.append((n, n - 1, lambda x, i=i: x[:i - 1] + (max(x[i - 1], x[i]),) + x[i + 1:]))
        out.append((n, n - 1, lambda x, i=i: x[:i - 1] + (min(x[i - 1], x[i]),) + x[i + 1:]))
    return out


def _closure_hom(m, n, top=5):
    """Tables ``[1]^m -> [1]^n`` reachable by composing generators through dims <= top."""
    gens = [g for k in range(top + 1) for g in _tuple_generators(k)]
    # vertex v has x_k as bit k-1
    start = tuple(tuple(v >> k & 1 for k in range(m)) for v in range(1 << m))
    seen = {(m, start)}
    frontier = [(m, start)]
    while frontier:
        nxt = []
        for d, tab in frontier:
            for (a, b, fn) in gens:
                if a != d:
                    continue
                new = (b, tuple(fn(x) for x in tab))
                if new not in seen:
                    seen.add(new)
                    nxt.append(new)
        frontier = nxt
    return {tab for d, tab in seen if d == n}


def test_generator_tables():
    assert make_generator(Face(1, 0), 1).table == (0,)
    d = make_generator(Face(1, 1), 2)
    assert d.dom == 1 and d.cod == 2
    assert d.table == (1, 3)
    s = make_generator(Degeneracy(1), 2)
    assert s.table == (0, 0, 1, 1)
    mx = make_generator(NegConnection(1), 2)
    mn = make_generator(PosConnection(1), 2)
    assert mx.table == (0, 1, 1, 1)
    assert mn.table == (0, 0, 0, 1)


def test_bad_indices():
    with pytest.raises(IndexOutOfRange):
        make_generator(Face(3, 0), 2)
    with pytest.raises(IndexOutOfRange):
        make_generator(NegConnection(2), 2)
    with pytest.raises(WordSyntaxError):
        parse_word("q1")


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose(identity(1), identity(2))


def test_small_hom_counts():
    assert len(enumerate_hom(1, 1)) == 3
    assert len(enumerate_hom(2, 1)) == 6
    assert len(enumerate_hom(1, 0)) == 1


@pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4)])
def test_hom_sets_match_independent_closure(m, n):
    oracle = _closure_hom(m, n, top=max(m, n) + 1)
    got = {tuple(tuple((v >> k) & 1 for k in range(n)) for v in f.table) for f in hom_set(m, n)}
    assert got == oracle
    assert len(enumerate_hom(m, n)) == len(oracle)


def test_epi_counts_frozen():
    # from the independent closure above, rerun once and frozen
    assert [len(epis(3, k)) for k in range(4)] == [1, 15, 7, 1]
    assert [len(epis(4, k)) for k in range(5)] == [1, 62, 38, 10, 1]


def test_monos_are_face_inclusions():
    for k in range(3):
        for f in monos(k, 3):
            assert f.is_injective()


def test_word_round_trip():
    w = parse_word("d1:0,s2,g1-")
    assert format_word(w) == "d1:0,s2,g1-"
    f = word_morphism(w, 3)
    assert f.dom == 3 and f.cod == 2


def test_factorization_recomposes():
    for f in hom_set(3, 2):
        mono, epi = epi_mono_factor(f)
        assert compose(mono, epi) == f
        assert mono.is_injective() and epi.is_surjective()


def test_canonical_word_evaluates_to_morphism():
    for f in hom_set(3, 3):
        assert word_morphism(canonical_word(f), 3) == f


def test_normalize_word_keeps_table():
    w = parse_word("s1,d1:0,g1+,d2:1")
    dom = 2
    assert word_morphism(normalize_word(w, dom), dom) == word_morphism(w, dom)


def test_tensor_of_identities():
    assert tensor(identity(1), identity(2)) == identity(3)


def test_identities_exhaustive():
    rep = check_identities(5)
    assert rep["failures"] == []
    assert set(rep["families"]) == {"face-face", "degen-degen", "degen-face", "conn-conn",
                                    "conn-face", "degen-conn"}


def test_printed_connection_face_rule_fails_only_where_expected():
    rep = check_identities(5, literal=True)
    assert rep["failures"]
    assert {f[0] for f in rep["failures"]} == {"conn-face"}
    # every failure is the opposite-sign case with the connection just below the face
    for fam, lhs, rhs, dom in rep["failures"]:
        g, d = parse_word(lhs)
        assert g.i == d.i - 1 and g.e != d.e
