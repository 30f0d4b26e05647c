"""The cube category with faces, degeneracies and both connections.

Objects are the posets ``[1]^n``.  A morphism ``[1]^m -> [1]^n`` is stored as
its vertex table: vertex ``x = (x_1, ..., x_m)`` is encoded as the integer
``sum(x_k << (k - 1))`` and ``table[x]`` is the encoded image.  Tables are the
source of truth for equality; generator words are carried along as witnesses.

Words are written in composition order, so the leftmost symbol is applied
last (it sits on the codomain side).  This matches the right action notation
``x.(a b) = (x.a).b`` used for cubical sets.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "BoxError", "IndexOutOfRange", "DimensionMismatch", "NotFactorable",
    "LimitExceeded", "NonTerminating", "WordSyntaxError",
    "Gen", "BoxMorphism", "make_generator", "identity", "compose", "tensor",
    "word_morphism", "epi_mono_factor", "enumerate_hom", "epis", "monos",
    "normalize_word", "canonical_epi_word", "canonical_word", "parse_word",
    "format_word", "epi_generators", "generators", "hom_set", "cubical_identities",
    "check_identities",
]

DEFAULT_LIMIT = 6
DEFAULT_STEP_BUDGET = 10_000


class BoxError(Exception):
    pass


class IndexOutOfRange(BoxError):
    pass


class DimensionMismatch(BoxError):
    pass


class NotFactorable(BoxError):
    pass


class LimitExceeded(BoxError):
    pass


class NonTerminating(BoxError):
    pass


class WordSyntaxError(BoxError, ValueError):
    pass


FACE, DEGEN, CONN = "d", "s", "g"
# kind order used for lexicographic comparison of words
_KIND_ORDER = {FACE: 0, DEGEN: 1, CONN: 2}


@dataclass(frozen=True, order=False)
class Gen:
    """A generator symbol.

    ``kind`` is ``"d"`` (face), ``"s"`` (degeneracy) or ``"g"`` (connection).
    For faces ``e`` is the inserted constant; for connections ``e = 0`` is the
    negative (max) connection and ``e = 1`` the positive (min) one.
    """

    kind: str
    i: int
    e: int = 0

    def sort_key(self) -> tuple[int, int, int]:
        return (_KIND_ORDER[self.kind], self.i, self.e)

    @property
    def is_face(self) -> bool:
        return self.kind == FACE

    def dim_change(self) -> int:
        return 1 if self.kind == FACE else -1

    def __str__(self) -> str:
        if self.kind == FACE:
            return f"d{self.i}:{self.e}"
        if self.kind == DEGEN:
            return f"s{self.i}"
        return f"g{self.i}{'-' if self.e == 0 else '+'}"

    __repr__ = __str__


def Face(i: int, e: int) -> Gen:
    return Gen(FACE, i, e)


def Degeneracy(i: int) -> Gen:
    return Gen(DEGEN, i, 0)


def NegConnection(i: int) -> Gen:
    return Gen(CONN, i, 0)


def PosConnection(i: int) -> Gen:
    return Gen(CONN, i, 1)


class BoxMorphism:
    """A morphism ``[1]^dom -> [1]^cod`` given by its vertex table."""

    __slots__ = ("dom", "cod", "table", "word", "_hash")

    def __init__(self, dom: int, cod: int, table, word=None):
        self.dom = dom
        self.cod = cod
        self.table = tuple(table)
        self.word = None if word is None else tuple(word)
        self._hash = hash((dom, cod, self.table))

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, BoxMorphism):
            return NotImplemented
        return (self._hash == other._hash and self.dom == other.dom
                and self.cod == other.cod and self.table == other.table)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        w = "" if self.word is None else f" word={format_word(self.word)!r}"
        return f"BoxMorphism({self.dom}->{self.cod}{w})"

    def __call__(self, x: tuple[int, ...]) -> tuple[int, ...]:
        return decode(self.table[encode(x)], self.cod)

    def with_word(self, word) -> "BoxMorphism":
        return BoxMorphism(self.dom, self.cod, self.table, word)

    @property
    def key(self):
        return (self.dom, self.cod, self.table)

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.table == tuple(range(1 << self.dom))

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == (1 << self.cod)

    def is_monotone(self) -> bool:
        t = self.table
        for x in range(len(t)):
            for k in range(self.dom):
                if not x >> k & 1 and t[x] & ~t[x | 1 << k]:
                    return False
        return True


def encode(x) -> int:
    v = 0
    for k, bit in enumerate(x):
        v |= (bit & 1) << k
    return v


def decode(v: int, n: int) -> tuple[int, ...]:
    return tuple(v >> k & 1 for k in range(n))


def _insert(v: int, i: int, e: int) -> int:
    low = v & ((1 << (i - 1)) - 1)
    return low | (e << (i - 1)) | ((v >> (i - 1)) << i)


def _delete(v: int, i: int) -> int:
    low = v & ((1 << (i - 1)) - 1)
    return low | ((v >> i) << (i - 1))


def _connect(v: int, i: int, e: int) -> int:
    a = v >> (i - 1) & 1
    b = v >> i & 1
    c = (a | b) if e == 0 else (a & b)
    rest = _delete(v, i + 1)
    return (rest & ~(1 << (i - 1))) | (c << (i - 1))


def _check_gen(g: Gen, n: int) -> None:
    if g.kind not in _KIND_ORDER or g.e not in (0, 1):
        raise IndexOutOfRange(f"malformed generator {g}")
    hi = n - 1 if g.kind == CONN else n
    if not 1 <= g.i <= hi:
        raise IndexOutOfRange(f"{g} is not defined at ambient dimension {n}")


@lru_cache(maxsize=None)
def make_generator(g: Gen, ambient_dim: int) -> BoxMorphism:
    """The morphism of ``g``; ``ambient_dim`` is the larger of its two dimensions."""
    n = ambient_dim
    _check_gen(g, n)
    if g.kind == FACE:
        table = [_insert(v, g.i, g.e) for v in range(1 << (n - 1))]
        return BoxMorphism(n - 1, n, table, (g,))
    if g.kind == DEGEN:
        table = [_delete(v, g.i) for v in range(1 << n)]
    else:
        table = [_connect(v, g.i, g.e) for v in range(1 << n)]
    return BoxMorphism(n, n - 1, table, (g,))


def gen_at_domain(g: Gen, dom: int) -> BoxMorphism:
    return make_generator(g, dom + 1 if g.kind == FACE else dom)


@lru_cache(maxsize=None)
def identity(n: int) -> BoxMorphism:
    return BoxMorphism(n, n, range(1 << n), ())


_compose_cache: dict = {}


def compose(f: BoxMorphism, g: BoxMorphism) -> BoxMorphism:
    """``f . g`` (apply ``g`` first)."""
    if g.cod != f.dom:
        raise DimensionMismatch(f"cannot compose {f} after {g}")
    word = None
    if f.word is not None and g.word is not None:
        word = f.word + g.word
    key = (f, g)
    hit = _compose_cache.get(key)
    if hit is None:
        ft = f.table
        hit = BoxMorphism(g.dom, f.cod, [ft[v] for v in g.table])
        if len(_compose_cache) > 500_000:
            _compose_cache.clear()
        _compose_cache[key] = hit
    if word is None:
        return hit
    return hit.with_word(word)


def compose_fast(f: BoxMorphism, g: BoxMorphism) -> BoxMorphism:
    """``compose`` without word bookkeeping (the result may carry no word)."""
    key = (f, g)
    hit = _compose_cache.get(key)
    if hit is None:
        if g.cod != f.dom:
            raise DimensionMismatch(f"cannot compose {f} after {g}")
        ft = f.table
        hit = BoxMorphism(g.dom, f.cod, [ft[v] for v in g.table])
        _compose_cache[key] = hit
    return hit


def tensor(f: BoxMorphism, g: BoxMorphism) -> BoxMorphism:
    """``f (x) g``: ``f`` on the first block of coordinates, ``g`` on the second."""
    m, p = f.dom, g.dom
    mask = (1 << m) - 1
    table = []
    for v in range(1 << (m + p)):
        table.append(f.table[v & mask] | (g.table[v >> m] << f.cod))
    word = None
    if f.word is not None and g.word is not None:
        # f (x) g = (f (x) id) . (id (x) g); g's symbols move past f's block
        word = tuple(f.word) + tuple(Gen(s.kind, s.i + f.dom, s.e) for s in g.word)
    return BoxMorphism(m + p, f.cod + g.cod, table, word)


def word_dims(word, dom: int) -> list[int]:
    """Domain dimension of each symbol of ``word`` (a word acting on ``[1]^dom``)."""
    dims = [0] * len(word)
    d = dom
    for k in range(len(word) - 1, -1, -1):
        dims[k] = d
        d += word[k].dim_change()
        if d < 0:
            raise DimensionMismatch("word leaves the cube category")
    return dims


def word_morphism(word, dom: int) -> BoxMorphism:
    """Evaluate ``word`` as a morphism out of ``[1]^dom``."""
    f = identity(dom)
    d = dom
    for g in reversed(word):
        h = gen_at_domain(g, d)
        f = compose(h, f)
        d = h.cod
    return f.with_word(tuple(word))


def _fixed_coordinates(f: BoxMorphism) -> dict[int, int]:
    """Coordinates of the codomain on which ``f`` is constant."""
    t = f.table
    ones = -1
    zeros = -1
    for v in t:
        ones &= v
        zeros &= ~v
    out = {}
    for k in range(f.cod):
        if ones >> k & 1:
            out[k + 1] = 1
        elif zeros >> k & 1:
            out[k + 1] = 0
    return out


def mono_from_constants(k: int, consts: dict[int, int]) -> BoxMorphism:
    """The face composite ``[1]^k -> [1]^(k + len(consts))`` fixing ``consts``."""
    n = k + len(consts)
    free = [c for c in range(1, n + 1) if c not in consts]
    base = 0
    for c, e in consts.items():
        base |= e << (c - 1)
    table = []
    for v in range(1 << k):
        out = base
        for j, c in enumerate(free):
            out |= (v >> j & 1) << (c - 1)
        table.append(out)
    word = tuple(Face(c, consts[c]) for c in sorted(consts, reverse=True))
    return BoxMorphism(k, n, table, word)


_factor_cache: dict = {}


def epi_mono_factor(f: BoxMorphism) -> tuple[BoxMorphism, BoxMorphism]:
    """Split ``f = mono . epi`` with ``mono`` a face composite and ``epi`` vertex-surjective.

    The image of a cube-category morphism is the sub-cube cut out by its
    constant coordinates, so the factorization is read off the table.
    """
    hit = _factor_cache.get(f)
    if hit is not None:
        return hit
    consts = _fixed_coordinates(f)
    free = [c - 1 for c in range(1, f.cod + 1) if c not in consts]
    k = len(free)
    etable = []
    for v in f.table:
        out = 0
        for j, c in enumerate(free):
            out |= (v >> c & 1) << j
        etable.append(out)
    epi = BoxMorphism(f.dom, k, etable)
    if not epi.is_surjective():
        raise NotFactorable(f"{f} is not a morphism of the cube category")
    mono = mono_from_constants(k, consts)
    epi = epi.with_word(canonical_epi_word(epi))
    _factor_cache[f] = (mono, epi)
    return mono, epi


def epi_generators(dom: int) -> list[Gen]:
    """All degeneracies and connections out of ``[1]^dom``, in canonical order."""
    out = [Degeneracy(i) for i in range(1, dom + 1)]
    for i in range(1, dom):
        out.append(NegConnection(i))
        out.append(PosConnection(i))
    return sorted(out, key=Gen.sort_key)


def face_generators(cod: int) -> list[Gen]:
    return [Face(i, e) for i in range(1, cod + 1) for e in (0, 1)]


def generators(dom: int) -> list[Gen]:
    """Every generator whose domain is ``[1]^dom``."""
    return face_generators(dom + 1) + epi_generators(dom)


@lru_cache(maxsize=None)
def _canonical_epis(m: int, k: int) -> dict:
    """Map from epi table ``[1]^m -> [1]^k`` to its lexicographically least word.

    Words are explored left to right (codomain side first); a prefix whose
    composite was already reached by a smaller prefix is pruned, since every
    completion of it is reached through the smaller one as well.
    """
    result: dict = {}
    if m < k:
        return result
    seen = [set() for _ in range(m - k + 1)]

    def walk(prefix: BoxMorphism, word: tuple, depth: int) -> None:
        if depth == m - k:
            result.setdefault(prefix.table, word)
            return
        if prefix.table in seen[depth]:
            return
        seen[depth].add(prefix.table)
        d = k + depth + 1
        for g in epi_generators(d):
            h = make_generator(g, d)
            walk(compose(prefix, h), word + (g,), depth + 1)

    walk(identity(k), (), 0)
    return result


def canonical_epi_word(f: BoxMorphism) -> tuple:
    if f.dom == f.cod:
        if not f.is_identity():
            raise NotFactorable(f"{f} is not an epi of the cube category")
        return ()
    try:
        return _canonical_epis(f.dom, f.cod)[f.table]
    except KeyError:
        raise NotFactorable(f"{f} is not an epi of the cube category") from None


def canonical_word(f: BoxMorphism) -> tuple:
    mono, epi = epi_mono_factor(f)
    return mono.word + epi.word


@lru_cache(maxsize=None)
def _epis(m: int, k: int) -> tuple:
    if k > m:
        return ()
    return tuple(BoxMorphism(m, k, t, w) for t, w in sorted(
        _canonical_epis(m, k).items(), key=lambda tw: [g.sort_key() for g in tw[1]]))


def epis(m: int, k: int) -> tuple:
    """All vertex-surjective morphisms ``[1]^m -> [1]^k``, ordered by canonical word."""
    return _epis(m, k)


@lru_cache(maxsize=None)
def monos(k: int, n: int) -> tuple:
    """All face composites ``[1]^k -> [1]^n``."""
    if k > n:
        return ()
    out = []
    for coords in itertools.combinations(range(1, n + 1), n - k):
        for vals in itertools.product((0, 1), repeat=n - k):
            out.append(mono_from_constants(k, dict(zip(coords, vals))))
    return tuple(out)


_hom_cache: dict = {}


def enumerate_hom(m: int, n: int, limit: int = DEFAULT_LIMIT, slack: int = 2) -> list:
    """All morphisms ``[1]^m -> [1]^n`` by closure under generator composition.

    Starting from the identity on ``[1]^m``, generators are post-composed
    breadth first through intermediate dimensions at most ``max(m, n) + slack``.
    """
    if m > limit or n > limit:
        raise LimitExceeded(f"hom({m},{n}) exceeds the dimension limit {limit}")
    key = (m, max(m, n) + slack)
    reach = _hom_cache.get(key)
    if reach is None:
        top = key[1]
        reach = {}
        start = identity(m)
        reach[start] = start
        queue = deque([start])
        while queue:
            f = queue.popleft()
            for g in generators(f.cod):
                if g.is_face and f.cod + 1 > top:
                    continue
                if not g.is_face and f.cod == 0:
                    continue
                h = compose(gen_at_domain(g, f.cod), f)
                if h not in reach:
                    reach[h] = h
                    queue.append(h)
        _hom_cache[key] = reach
    found = [f for f in reach if f.cod == n]
    return sorted(found, key=lambda f: f.table)


# -- word rewriting ---------------------------------------------------------

def _rewrite_pair(a: Gen, b: Gen):
    """Rewrite ``a b`` (``b`` applied first) if an oriented identity applies.

    Returns the replacement list, or ``None`` when the pair is already in
    order.  Faces travel to the left past degeneracies and connections, and
    adjacent faces are put in strictly decreasing index order.
    """
    if a.kind == FACE and b.kind == FACE:
        if a.i <= b.i:
            return [Face(b.i + 1, b.e), Face(a.i, a.e)]
        return None
    if b.kind != FACE:
        return None
    i, e = b.i, b.e
    j = a.i
    if a.kind == DEGEN:
        if j < i:
            return [Face(i - 1, e), Degeneracy(j)]
        if j == i:
            return []
        return [Face(i, e), Degeneracy(j - 1)]
    # connection a = gamma_{j, a.e} after face b = d_{i, e}
    if j < i - 1:
        return [Face(i - 1, e), Gen(CONN, j, a.e)]
    if j in (i - 1, i):
        if a.e == e:
            return []
        return [Face(j, e), Degeneracy(j)]
    return [Face(i, e), Gen(CONN, j - 1, a.e)]


def normalize_word(word, dom: int, budget: int = DEFAULT_STEP_BUDGET) -> tuple:
    """Canonical word with the same table: faces first, then a canonical epi word.

    Faces are moved left with the face/degeneracy and face/connection
    identities and sorted with the face/face identity; the remaining
    degeneracy/connection block is replaced by its canonical epi word.
    """
    w = list(word)
    word_dims(w, dom)  # typing check
    steps = 0
    changed = True
    while changed:
        changed = False
        for k in range(len(w) - 1):
            rep = _rewrite_pair(w[k], w[k + 1])
            if rep is not None:
                w[k:k + 2] = rep
                steps += 1
                if steps > budget:
                    raise NonTerminating(f"rewriting {format_word(word)} exceeded {budget} steps")
                changed = True
                break
    nfaces = 0
    while nfaces < len(w) and w[nfaces].kind == FACE:
        nfaces += 1
    faces, tail = w[:nfaces], w[nfaces:]
    if tail:
        epi = word_morphism(tail, dom)
        tail = list(canonical_epi_word(epi))
    return tuple(faces + tail)


# -- text syntax ------------------------------------------------------------

def parse_symbol(tok: str) -> Gen:
    tok = tok.strip()
    try:
        if tok.startswith("d"):
            i, e = tok[1:].split(":")
            return Face(int(i), int(e))
        if tok.startswith("s"):
            return Degeneracy(int(tok[1:]))
        if tok.startswith("g") and tok[-1] in "+-":
            return Gen(CONN, int(tok[1:-1]), 0 if tok[-1] == "-" else 1)
    except ValueError:
        pass
    raise WordSyntaxError(f"bad generator token {tok!r}")


def parse_word(text) -> tuple:
    """Parse ``"d1:0,s2,g1-"`` (or a list of tokens) into a tuple of generators."""
    if isinstance(text, str):
        toks = [t for t in text.split(",") if t.strip()]
    else:
        toks = list(text)
    out = tuple(parse_symbol(t) for t in toks)
    for g in out:
        if g.i < 1 or g.e not in (0, 1):
            raise WordSyntaxError(f"bad generator token {g}")
    return out


def format_word(word) -> str:
    return ",".join(str(g) for g in word)


@lru_cache(maxsize=None)
def hom_set(m: int, n: int) -> tuple:
    """All morphisms ``[1]^m -> [1]^n`` as mono-after-epi composites.

    Agrees with ``enumerate_hom`` (the factorization is unique) and is much
    cheaper for the larger dimensions met in products.
    """
    out = []
    for k in range(min(m, n) + 1):
        for e in epis(m, k):
            for mo in monos(k, n):
                out.append(compose(mo, e).with_word(mo.word + e.word))
    return tuple(sorted(out, key=lambda f: f.table))


# -- the cubical identities ------------------------------------------------------------

def cubical_identities(max_dim: int = 5, literal: bool = False):
    """Yield ``(family, lhs, rhs, dom)`` for every instance with all dimensions ``<= max_dim``.

    Words are in composition order.  With ``literal`` the connection/face
    family uses ``d(i,e) s(i)`` for opposite signs at ``j = i - 1`` as well,
    which is false; the default uses ``d(j,e) s(j)``.
    """
    d, s, g = Face, Degeneracy, Gen

    def conn(i, e):
        return g(CONN, i, e)

    for m in range(1, max_dim + 1):
        # composites through [1]^m, the largest dimension involved
        for i in range(1, m):
            for j in range(1, i + 1):
                for e, e2 in itertools.product((0, 1), repeat=2):
                    if m - 2 >= 0:
                        yield ("face-face", (d(j, e2), d(i, e)), (d(i + 1, e), d(j, e2)), m - 2)
        for i in range(1, m):
            for j in range(1, i + 1):
                yield ("degen-degen", (s(i), s(j)), (s(j), s(i + 1)), m)
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                for e in (0, 1):
                    if j < i:
                        rhs = (d(i - 1, e), s(j))
                    elif j == i:
                        rhs = ()
                    else:
                        rhs = (d(i, e), s(j - 1))
                    yield ("degen-face", (s(j), d(i, e)), rhs, m - 1)
        for i in range(1, m):
            for j in range(1, m - 1):
                for e, e2 in itertools.product((0, 1), repeat=2):
                    if j > i:
                        yield ("conn-conn", (conn(j, e2), conn(i, e)), (conn(i, e), conn(j + 1, e2)), m)
                    elif j == i and e == e2:
                        yield ("conn-conn", (conn(j, e2), conn(i, e)), (conn(i, e), conn(i + 1, e)), m)
        for i in range(1, m + 1):
            for j in range(1, m):
                for e, e2 in itertools.product((0, 1), repeat=2):
                    if j < i - 1:
                        rhs = (d(i - 1, e), conn(j, e2))
                    elif j in (i - 1, i) and e == e2:
                        rhs = ()
                    elif j in (i - 1, i):
                        k = i if literal else j
                        rhs = (d(k, e), s(k))
                    else:
                        rhs = (d(i, e), conn(j - 1, e2))
                    yield ("conn-face", (conn(j, e2), d(i, e)), rhs, m - 1)
        for i in range(1, m):
            for j in range(1, m):
                for e in (0, 1):
                    if j < i:
                        rhs = (conn(i - 1, e), s(j))
                    elif j == i:
                        rhs = (s(i), s(i))
                    else:
                        rhs = (conn(i, e), s(j + 1))
                    yield ("degen-conn", (s(j), conn(i, e)), rhs, m)


def check_identities(max_dim: int = 5, literal: bool = False) -> dict:
    """Compare both sides of every identity instance by vertex tables."""
    checked, failures = 0, []
    by_family: dict = {}
    for fam, lhs, rhs, dom in cubical_identities(max_dim, literal):
        checked += 1
        try:
            a = word_morphism(lhs, dom)
            b = word_morphism(rhs, dom) if rhs else identity(dom)
        except BoxError:
            a, b = None, False
        by_family[fam] = by_family.get(fam, 0) + 1
        if a != b:
            failures.append((fam, format_word(lhs), format_word(rhs) or "id", dom))
    return {"checked": checked, "failures": failures, "families": by_family}
