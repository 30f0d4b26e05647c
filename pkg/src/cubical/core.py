"""Finite cubical sets with connections.

A finite cubical set stores its nondegenerate cubes and, for each of them,
the value of every codimension-one face.  Every cube is written uniquely as
``base . epi`` where ``base`` is nondegenerate and ``epi`` is a surjective
morphism of the cube category (degeneracies and connections).  Actions of
arbitrary cube-category morphisms are computed by splitting the composite
into a face part, which is walked through the stored faces, and an epi part.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from .boxcat import (
    BoxMorphism, Gen, LimitExceeded, compose, compose_fast, epi_generators, epi_mono_factor,
    epis, gen_at_domain, identity, make_generator, Face,
)

__all__ = [
    "CubeRef", "FiniteCubicalSet", "CubicalMap", "PointedCubicalSet",
    "ValidationReport", "CoreError", "NotMono", "CapTooSmall", "NotEZ",
    "BudgetExceeded", "InvalidCubicalSet",
    "representable", "boundary", "open_box", "subcomplex", "disjoint_union",
    "pushout", "quotient_by", "pullback", "product", "empty", "point",
    "enumerate_maps", "are_isomorphic", "search_maps", "extract", "face_keys",
    "DEFAULT_BUDGET", "is_iso_of_arrows", "induced_from_pushout", "to_point",
    "rep_ref_of", "rep_cube_morphism", "PointedCubicalSet",
]

DEFAULT_BUDGET = 2_000_000
REPRESENTABLE_LIMIT = 6


class CoreError(Exception):
    pass


class NotMono(CoreError):
    pass


class CapTooSmall(CoreError):
    pass


class NotEZ(CoreError):
    pass


class InvalidCubicalSet(CoreError):
    pass


class BudgetExceeded(CoreError):
    pass


class CubeRef(NamedTuple):
    """The cube ``base . epi``; ``epi`` maps the cube's dimension onto ``dim(base)``."""

    base: str
    epi: BoxMorphism

    @property
    def dim(self) -> int:
        return self.epi.dom

    @property
    def is_degenerate(self) -> bool:
        return self.epi.dom != self.epi.cod

    def __repr__(self):
        if not self.is_degenerate:
            return f"<{self.base}>"
        return f"<{self.base}.{','.join(map(str, self.epi.word or ()))}>"


@lru_cache(maxsize=None)
def _face_keys(n: int) -> tuple:
    return tuple((i, e) for i in range(1, n + 1) for e in (0, 1))


def face_keys(n: int):
    return _face_keys(n)


@lru_cache(maxsize=None)
def _face_gen(key, n):
    return make_generator(Face(*key), n)


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)
    cap: int = 0
    checked: int = 0

    def __bool__(self):
        return self.ok


class FiniteCubicalSet:
    """Nondegenerate cubes by dimension with their face values.

    ``cells`` maps a dimension to an ordered list of cube ids and ``faces``
    maps each id of positive dimension to ``{(i, e): CubeRef}``.
    """

    def __init__(self, name: str, cells: dict, faces: dict, check: bool = True):
        self.name = name
        self.cells = {int(n): list(ids) for n, ids in cells.items() if ids}
        self.faces = {c: dict(fv) for c, fv in faces.items()}
        self.dim_of = {}
        for n, ids in self.cells.items():
            for c in ids:
                if c in self.dim_of:
                    raise InvalidCubicalSet(f"duplicate cube id {c!r}")
                self.dim_of[c] = n
        self._order = {}
        for n in sorted(self.cells):
            for k, c in enumerate(self.cells[n]):
                self._order[c] = (n, k)
        self._act_cache: dict = {}
        self._faces_cache: dict = {}
        self._level_cache: dict = {}
        self._index_cache: dict = {}
        self._partial_index: dict = {}
        if check:
            problems = self._typing_problems()
            if problems:
                raise InvalidCubicalSet("; ".join(problems[:5]))

    # -- basic structure -------------------------------------------------
    def __repr__(self):
        return f"FiniteCubicalSet({self.name!r}, counts={self.counts()})"

    @property
    def max_dim(self) -> int:
        return max(self.cells, default=-1)

    def counts(self) -> list[int]:
        return [len(self.cells.get(n, ())) for n in range(self.max_dim + 1)]

    def nd(self, n: int) -> list[str]:
        return self.cells.get(n, [])

    def all_ids(self) -> list[str]:
        return [c for n in sorted(self.cells) for c in self.cells[n]]

    def __len__(self):
        return len(self.dim_of)

    def __contains__(self, c):
        return c in self.dim_of

    def ref(self, c: str) -> CubeRef:
        return CubeRef(c, identity(self.dim_of[c]))

    def degenerate(self, c, epi: BoxMorphism) -> CubeRef:
        return CubeRef(c, epi)

    def constant(self, vertex: str, n: int) -> CubeRef:
        """The ``n``-cube totally degenerate at ``vertex``."""
        return CubeRef(vertex, epis(n, 0)[0])

    def sort_key(self, ref: CubeRef):
        return (ref.dim, -ref.is_degenerate, self.dim_of[ref.base], self._order[ref.base],
                [g.sort_key() for g in ref.epi.word or ()], ref.epi.table)

    def face_value(self, c: str, i: int, e: int) -> CubeRef:
        return self.faces[c][(i, e)]

    def _typing_problems(self) -> list[str]:
        out = []
        for n, ids in self.cells.items():
            for c in ids:
                fv = self.faces.get(c, {})
                if set(fv) != set(face_keys(n)):
                    out.append(f"cube {c!r} has face keys {sorted(fv)} but dimension {n}")
                    continue
                for key, ref in fv.items():
                    if ref.base not in self.dim_of:
                        out.append(f"face {key} of {c!r} references unknown cube {ref.base!r}")
                    elif ref.epi.dom != n - 1 or ref.epi.cod != self.dim_of[ref.base]:
                        out.append(f"face {key} of {c!r} has ill-typed epi")
                    elif not ref.epi.is_surjective():
                        out.append(f"face {key} of {c!r} has a non-surjective epi")
        return out

    # -- the action --------------------------------------------------------
    def act(self, ref: CubeRef, alpha: BoxMorphism) -> CubeRef:
        """``ref . alpha`` for a morphism ``alpha`` into ``ref``'s dimension."""
        if alpha.cod != ref.epi.dom:
            raise CoreError(f"cannot act on a {ref.dim}-cube by {alpha}")
        return self._act_base(ref.base, compose_fast(ref.epi, alpha))

    def _act_base(self, base: str, phi: BoxMorphism) -> CubeRef:
        key = (base, phi)
        hit = self._act_cache.get(key)
        if hit is not None:
            return hit
        mono, epi = epi_mono_factor(phi)
        if mono.dom == mono.cod:
            out = CubeRef(base, epi)
        else:
            first = mono.word[0]
            fv = self.faces[base][(first.i, first.e)]
            rest = _mono_tail(mono)
            out = self._act_base(fv.base, compose_fast(fv.epi, compose_fast(rest, epi)))
        self._act_cache[key] = out
        return out

    def act_gen(self, ref: CubeRef, g: Gen) -> CubeRef:
        n = ref.dim
        h = make_generator(g, n) if g.is_face else make_generator(g, n + 1)
        return self.act(ref, h)

    def act_word(self, ref: CubeRef, word) -> CubeRef:
        for g in word:
            ref = self.act_gen(ref, g)
        return ref

    def face(self, ref: CubeRef, i: int, e: int) -> CubeRef:
        return self.faces_of(ref)[2 * i + e - 2]

    def faces_of(self, ref: CubeRef) -> tuple:
        """All faces in the order ``(1,0), (1,1), (2,0), ...``."""
        hit = self._faces_cache.get(ref)
        if hit is None:
            n = ref.dim
            if not ref.is_degenerate:
                fv = self.faces[ref.base]
                hit = tuple(fv[k] for k in face_keys(n))
            else:
                hit = tuple(self.act(ref, _face_gen(k, n)) for k in face_keys(n))
            self._faces_cache[ref] = hit
        return hit

    def vertices_of(self, ref: CubeRef) -> tuple:
        """Vertex ``v`` of the cube is ``ref . (constant map at v)``, in encoding order."""
        n = ref.dim
        out = []
        for v in range(1 << n):
            out.append(self.act(ref, BoxMorphism(0, n, (v,))).base)
        return tuple(out)

    # -- levels --------------------------------------------------------------
    def materialize(self, n: int) -> list[CubeRef]:
        """Every ``n``-cube, degenerate ones first."""
        hit = self._level_cache.get(n)
        if hit is None:
            hit = []
            for k in range(n + 1):
                for c in self.nd(k):
                    for epi in epis(n, k):
                        hit.append(CubeRef(c, epi))
            hit.sort(key=self.sort_key)
            self._level_cache[n] = hit
        return hit

    def level_size(self, n: int) -> int:
        return sum(len(self.nd(k)) * len(epis(n, k)) for k in range(n + 1))

    def face_index(self, n: int) -> dict:
        """Map from the full face tuple to the ``n``-cubes having it."""
        hit = self._index_cache.get(n)
        if hit is None:
            hit = {}
            for ref in self.materialize(n):
                hit.setdefault(self.faces_of(ref), []).append(ref)
            self._index_cache[n] = hit
        return hit

    def partial_face_index(self, n: int, i: int, e: int) -> dict:
        """Map from the face tuple with position ``(i, e)`` removed to cubes."""
        key = (n, i, e)
        hit = self._partial_index.get(key)
        if hit is None:
            drop = face_keys(n).index((i, e))
            hit = {}
            for faces, refs in self.face_index(n).items():
                hit.setdefault(faces[:drop] + faces[drop + 1:], []).extend(refs)
            self._partial_index[key] = hit
        return hit

    # -- validation -----------------------------------------------------------
    def validate(self, cap: int | None = None) -> ValidationReport:
        """Check face typing, face/face compatibility and functoriality up to ``cap``."""
        if cap is None:
            cap = max(self.max_dim, 0)
        rep = ValidationReport(ok=True, cap=cap)
        for p in self._typing_problems():
            rep.violations.append(p)
        if rep.violations:
            rep.ok = False
            return rep
        # face/face compatibility on stored faces
        for n in range(2, self.max_dim + 1):
            for c in self.nd(n):
                for g in face_keys(n):
                    fv = self.faces[c][g]
                    outer = make_generator(Face(*g), n)
                    for h in face_keys(n - 1):
                        inner = make_generator(Face(*h), n - 1)
                        lhs = self.act(fv, inner)
                        rhs = self._stored_chain(c, compose(outer, inner))
                        rep.checked += 1
                        if lhs != rhs:
                            rep.violations.append(
                                f"cube {c!r}: face {g} then {h} gives {lhs}, expected {rhs}")
        if rep.violations:
            rep.ok = False
            return rep
        # functoriality on materialized cubes: (c.g).h == c.(g h)
        for n in range(0, cap + 1):
            if self.level_size(n) > 200_000:
                break
            for ref in self.materialize(n):
                for g in _generators_into(n):
                    ga = make_generator(g, n if g.is_face else n + 1)
                    left = self.act(ref, ga)
                    for h in _generators_into(ga.dom):
                        if ga.dom > cap + 1:
                            continue
                        ha = make_generator(h, ga.dom if h.is_face else ga.dom + 1)
                        rep.checked += 1
                        a = self.act(left, ha)
                        b = self._act_base_fresh(ref, compose(ga, ha))
                        if a != b:
                            rep.violations.append(
                                f"cube {ref}: ({g}) then ({h}) gives {a}, composite gives {b}")
                            if len(rep.violations) > 20:
                                rep.ok = False
                                return rep
        rep.ok = not rep.violations
        return rep

    def _stored_chain(self, c: str, mono: BoxMorphism) -> CubeRef:
        # walk a two-face mono using its canonical (decreasing) face order
        return self._act_base(c, mono)

    def _act_base_fresh(self, ref: CubeRef, alpha: BoxMorphism) -> CubeRef:
        # functoriality check uses a canonical split of the whole composite
        return self._act_base(ref.base, compose(ref.epi, alpha))

    # -- convenience -----------------------------------------------------------
    def with_name(self, name: str) -> "FiniteCubicalSet":
        return FiniteCubicalSet(name, self.cells, self.faces, check=False)

    def relabel(self, mapping: dict, name: str | None = None) -> "FiniteCubicalSet":
        cells = {n: [mapping[c] for c in ids] for n, ids in self.cells.items()}
        faces = {mapping[c]: {k: CubeRef(mapping[r.base], r.epi) for k, r in fv.items()}
                 for c, fv in self.faces.items()}
        return FiniteCubicalSet(name or self.name, cells, faces)

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * len(ids) for n, ids in self.cells.items())

    def identity_map(self) -> "CubicalMap":
        return CubicalMap(self, self, {c: self.ref(c) for c in self.all_ids()})


def _mono_tail(mono: BoxMorphism) -> BoxMorphism:
    """The face composite left after removing the leftmost face of ``mono``."""
    from .boxcat import word_morphism
    return word_morphism(mono.word[1:], mono.dom)


def _generators_into(n: int) -> list[Gen]:
    """Generators whose codomain is ``[1]^n``."""
    out = [Face(i, e) for i in range(1, n + 1) for e in (0, 1)]
    out.extend(epi_generators(n + 1))
    return out


@dataclass
class PointedCubicalSet:
    space: FiniteCubicalSet
    basepoint: str

    def __post_init__(self):
        if self.space.dim_of.get(self.basepoint) != 0:
            raise CoreError(f"basepoint {self.basepoint!r} is not a 0-cube")


# -- maps ----------------------------------------------------------------------

class CubicalMap:
    """A map of cubical sets given on nondegenerate cubes."""

    def __init__(self, source: FiniteCubicalSet, target: FiniteCubicalSet, assignment: dict):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)

    def __repr__(self):
        return f"CubicalMap({self.source.name} -> {self.target.name})"

    def __call__(self, ref) -> CubeRef:
        if isinstance(ref, str):
            return self.assignment[ref]
        img = self.assignment[ref.base]
        if not ref.is_degenerate:
            return img
        return self.target.act(img, ref.epi)

    def __eq__(self, other):
        if not isinstance(other, CubicalMap):
            return NotImplemented
        return (self.source is other.source or self.source.cells == other.source.cells) and \
            self.assignment == other.assignment

    def __hash__(self):
        return hash(tuple(sorted(self.assignment.items(), key=lambda kv: kv[0])))

    def key(self):
        return tuple((c, self.assignment[c]) for c in self.source.all_ids())

    def check(self) -> list[str]:
        """Naturality violations (empty when the map is a cubical map)."""
        out = []
        S, T = self.source, self.target
        for c in S.all_ids():
            img = self.assignment.get(c)
            if img is None:
                out.append(f"cube {c!r} is unassigned")
                continue
            if img.base not in T.dim_of or img.dim != S.dim_of[c]:
                out.append(f"cube {c!r} is sent to an ill-typed cube {img}")
                continue
            for (i, e) in face_keys(S.dim_of[c]):
                a = self(S.faces[c][(i, e)])
                b = T.face(img, i, e)
                if a != b:
                    out.append(f"cube {c!r}: face ({i},{e}) maps to {a}, image face is {b}")
        return out

    def is_valid(self) -> bool:
        return not self.check()

    def compose(self, first: "CubicalMap") -> "CubicalMap":
        """``self . first``."""
        return CubicalMap(first.source, self.target,
                          {c: self(r) for c, r in first.assignment.items()})

    def is_mono(self) -> bool:
        seen = set()
        for c, r in self.assignment.items():
            if r.is_degenerate or r.base in seen:
                return False
            seen.add(r.base)
        return True

    def image_ids(self) -> set:
        return {r.base for r in self.assignment.values()}


# -- constructors ----------------------------------------------------------------

def empty(name: str = "empty") -> FiniteCubicalSet:
    return FiniteCubicalSet(name, {}, {})


def point(name: str = "pt") -> FiniteCubicalSet:
    return FiniteCubicalSet(name, {0: ["pt"]}, {})


def _rep_id(mono: BoxMorphism) -> str:
    from .boxcat import _fixed_coordinates  # noqa: internal helper
    fixed = _fixed_coordinates(mono)
    if mono.cod == 0:
        return "pt"
    return "".join(str(fixed[k]) if k in fixed else "*" for k in range(1, mono.cod + 1))


def representable(n: int) -> FiniteCubicalSet:
    """The standard ``n``-cube; cubes are named by strings over ``0``, ``1``, ``*``."""
    if n > REPRESENTABLE_LIMIT:
        raise LimitExceeded(f"representable({n}) exceeds the limit {REPRESENTABLE_LIMIT}")
    from .boxcat import monos
    cells: dict = {}
    faces: dict = {}
    for k in range(n + 1):
        ids = []
        for m in monos(k, n):
            cid = _rep_id(m)
            ids.append(cid)
            fv = {}
            for (i, e) in face_keys(k):
                sub = compose(m, make_generator(Face(i, e), k))
                fv[(i, e)] = CubeRef(_rep_id(sub), identity(k - 1))
            faces[cid] = fv
        cells[k] = sorted(ids, key=_rep_sort)
    return FiniteCubicalSet(f"box{n}", cells, faces)


def _rep_sort(cid: str):
    return cid.replace("*", "2")


def rep_cube_morphism(cid: str) -> BoxMorphism:
    """The mono named by a representable cube id."""
    from .boxcat import mono_from_constants
    if cid == "pt":
        return identity(0)
    consts = {k + 1: int(ch) for k, ch in enumerate(cid) if ch != "*"}
    return mono_from_constants(cid.count("*"), consts)


def rep_ref_of(alpha: BoxMorphism) -> CubeRef:
    """The cube of the representable corresponding to ``alpha`` (Yoneda)."""
    mono, epi = epi_mono_factor(alpha)
    return CubeRef(_rep_id(mono), epi)


def subcomplex(X: FiniteCubicalSet, ids: Iterable[str], name: str | None = None):
    """The smallest subobject containing ``ids``, with its inclusion."""
    keep = set()
    stack = list(ids)
    while stack:
        c = stack.pop()
        if c in keep:
            continue
        keep.add(c)
        for r in X.faces.get(c, {}).values():
            stack.append(r.base)
    cells = {n: [c for c in cs if c in keep] for n, cs in X.cells.items()}
    faces = {c: X.faces[c] for c in keep if c in X.faces}
    sub = FiniteCubicalSet(name or f"sub({X.name})", cells, faces)
    return sub, CubicalMap(sub, X, {c: X.ref(c) for c in sub.all_ids()})


def boundary(n: int):
    """``(boundary of the n-cube, inclusion)``."""
    if n < 1:
        raise CoreError("boundary needs n >= 1")
    box = representable(n)
    top = box.nd(n)[0]
    sub, inc = subcomplex(box, [r.base for r in box.faces[top].values()], name=f"bd{n}")
    return sub, inc


def open_box(n: int, i: int, e: int):
    """``(open box missing face (i, e), inclusion into the n-cube)``."""
    if not 1 <= i <= n or e not in (0, 1):
        raise CoreError(f"no open box ({n},{i},{e})")
    box = representable(n)
    top = box.nd(n)[0]
    gens = [r.base for k, r in box.faces[top].items() if k != (i, e)]
    return subcomplex(box, gens, name=f"obox{n}_{i}{e}")


def boundary_maps(n: int):
    """The boundary inclusion as a pair usable for lifting problems."""
    return boundary(n)[1]


# -- extraction of nondegenerate structure -------------------------------------------

def extract(name: str, levels: list, face: Callable, act_epi: Callable,
            name_of: Callable, check: bool = True):
    """Build a finite cubical set from levelwise elements and their actions.

    ``levels[k]`` lists the ``k``-cubes, ``face(x, i, e)`` and
    ``act_epi(x, g)`` give the structure maps.  Elements not in the image of
    any degeneracy or connection become nondegenerate.  Returns the set and
    a dict ``(k, element) -> CubeRef``.
    """
    rep: dict = {}
    cells: dict = {}
    faces: dict = {}
    nd_by_level: list = []
    for k, elems in enumerate(levels):
        found: dict = {}
        for j in range(k):
            for b, bid in nd_by_level[j]:
                for epi in epis(k, j):
                    y = b
                    for g in epi.word:
                        y = act_epi(y, g)
                    prev = found.get(y)
                    if prev is None:
                        found[y] = CubeRef(bid, epi)
                    elif check and prev != CubeRef(bid, epi):
                        raise NotEZ(f"cube {y!r} is both {prev} and {CubeRef(bid, epi)}")
        nds = []
        idk = identity(k)
        for x in elems:
            r = found.get(x)
            if r is None:
                bid = name_of(x)
                nds.append((x, bid))
                rep[(k, x)] = CubeRef(bid, idk)
            else:
                rep[(k, x)] = r
        for y, r in found.items():
            rep.setdefault((k, y), r)
        nd_by_level.append(nds)
        if nds:
            cells[k] = [bid for _, bid in nds]
        for x, bid in nds:
            if k:
                faces[bid] = {(i, e): rep[(k - 1, face(x, i, e))] for (i, e) in face_keys(k)}
    return FiniteCubicalSet(name, cells, faces), rep


# -- colimits ---------------------------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b, key=None):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if key is not None and key(rb) < key(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra


def _tagged(X: FiniteCubicalSet, tag: str):
    return {c: f"{tag}{c}" for c in X.all_ids()}


def disjoint_union(X: FiniteCubicalSet, Y: FiniteCubicalSet, name: str | None = None,
                   tags=("0.", "1.")):
    """``X + Y`` with ids prefixed by ``tags``, plus the two inclusions."""
    mx, my = _tagged(X, tags[0]), _tagged(Y, tags[1])
    cells = {}
    for n in range(max(X.max_dim, Y.max_dim) + 1):
        cells[n] = [mx[c] for c in X.nd(n)] + [my[c] for c in Y.nd(n)]
    faces = {}
    for S, m in ((X, mx), (Y, my)):
        for c, fv in S.faces.items():
            faces[m[c]] = {k: CubeRef(m[r.base], r.epi) for k, r in fv.items()}
    U = FiniteCubicalSet(name or f"({X.name}+{Y.name})", cells, faces)
    ix = CubicalMap(X, U, {c: U.ref(mx[c]) for c in X.all_ids()})
    iy = CubicalMap(Y, U, {c: U.ref(my[c]) for c in Y.all_ids()})
    return U, ix, iy


def _elements_name(side: str, ref: CubeRef) -> str:
    return ref.base


def pushout(i: CubicalMap, f: CubicalMap, name: str | None = None):
    """Pushout of ``B <-i- A -f-> C`` with ``i`` mono.

    Returns ``(P, j_B, j_C)`` where ``j_B: B -> P`` and ``j_C: C -> P``.
    """
    if not i.is_mono():
        raise NotMono("pushout needs the first leg to be a monomorphism")
    A, B, C = i.source, i.target, f.target
    if f.source is not A and f.source.cells != A.cells:
        raise CoreError("pushout legs have different sources")
    cap = max(B.max_dim, C.max_dim, 0)
    clash = set(B.all_ids()) & set(C.all_ids())
    tb, tc = ("B.", "C.") if clash else ("", "")
    side_rank = {"C": 0, "B": 1}

    def key(x):
        side, r = x
        S = C if side == "C" else B
        return (side_rank[side], S.sort_key(r))

    levels = []
    uf = _UnionFind()
    for k in range(cap + 1):
        for r in C.materialize(k):
            uf.add(("C", r))
        for r in B.materialize(k):
            uf.add(("B", r))
        for a in A.materialize(k):
            uf.union(("C", f(a)), ("B", i(a)), key=key)
    for k in range(cap + 1):
        roots = {uf.find(("C", r)) for r in C.materialize(k)}
        roots |= {uf.find(("B", r)) for r in B.materialize(k)}
        levels.append(sorted(roots, key=key))

    def face(x, a, e):
        side, r = x
        S = C if side == "C" else B
        return uf.find((side, S.face(r, a, e)))

    def act_epi(x, g):
        side, r = x
        S = C if side == "C" else B
        return uf.find((side, S.act_gen(r, g)))

    def name_of(x):
        side, r = x
        return (tc if side == "C" else tb) + r.base

    P, rep = extract(name or f"pushout({B.name},{C.name})", levels, face, act_epi, name_of)
    jb = CubicalMap(B, P, {c: rep[(B.dim_of[c], uf.find(("B", B.ref(c))))] for c in B.all_ids()})
    jc = CubicalMap(C, P, {c: rep[(C.dim_of[c], uf.find(("C", C.ref(c))))] for c in C.all_ids()})
    return P, jb, jc


def to_point(X: FiniteCubicalSet, P: FiniteCubicalSet | None = None) -> CubicalMap:
    P = P or point()
    v = P.nd(0)[0]
    return CubicalMap(X, P, {c: P.constant(v, X.dim_of[c]) for c in X.all_ids()})


def quotient_by(X: FiniteCubicalSet, inclusion: CubicalMap, name: str | None = None,
                point_name: str = "*"):
    """Collapse a subobject to a point: ``(X/A, projection, basepoint id)``."""
    P = FiniteCubicalSet("pt", {0: [point_name]}, {})
    Q, proj, jp = pushout(inclusion, to_point(inclusion.source, P),
                          name=name or f"{X.name}/{inclusion.source.name}")
    return Q, proj, jp(point_name).base


# -- limits ----------------------------------------------------------------------

def pullback(f: CubicalMap, g: CubicalMap, cap: int, name: str | None = None,
             skeleton: bool = False):
    """Pullback of ``X -f-> Z <-g- Y`` computed degreewise up to ``cap``.

    With ``skeleton=False`` nondegenerate cubes at level ``cap`` raise
    ``CapTooSmall``; with ``skeleton=True`` the ``cap``-skeleton is returned.
    Returns ``(P, proj_X, proj_Y)``.
    """
    X, Y = f.source, g.source
    levels = []
    for k in range(cap + 1):
        by_img: dict = {}
        for y in Y.materialize(k):
            by_img.setdefault(g(y), []).append(y)
        pairs = []
        for x in X.materialize(k):
            for y in by_img.get(f(x), ()):
                pairs.append((x, y))
        levels.append(pairs)

    def face(p, i, e):
        return (X.face(p[0], i, e), Y.face(p[1], i, e))

    def act_epi(p, h):
        return (X.act_gen(p[0], h), Y.act_gen(p[1], h))

    def name_of(p):
        return f"({_ref_name(p[0])},{_ref_name(p[1])})"

    P, rep = extract(name or f"pullback({X.name},{Y.name})", levels, face, act_epi, name_of)
    if not skeleton and P.nd(cap):
        raise CapTooSmall(f"pullback has nondegenerate {cap}-cubes; raise the cap")
    px, py = {}, {}
    for (k, p), r in rep.items():
        if not r.is_degenerate:
            px[r.base] = p[0]
            py[r.base] = p[1]
    return P, CubicalMap(P, X, px), CubicalMap(P, Y, py)


def _ref_name(r: CubeRef) -> str:
    if not r.is_degenerate:
        return r.base
    return f"{r.base}.{','.join(map(str, r.epi.word))}"


def product(X: FiniteCubicalSet, Y: FiniteCubicalSet, cap: int, name: str | None = None,
            skeleton: bool = False):
    """Cartesian product ``X x Y`` as a pullback over the point."""
    P = point()
    return pullback(to_point(X, P), to_point(Y, P), cap, name=name or f"{X.name}x{Y.name}",
                    skeleton=skeleton)


# -- map search -----------------------------------------------------------------

def _visit_order(X: FiniteCubicalSet, skip) -> list[str]:
    """Cubes ordered so that each cube comes right after its faces."""
    order, seen = [], set()

    def visit(c):
        stack = [(c, False)]
        while stack:
            node, ready = stack.pop()
            if ready:
                if node not in seen:
                    seen.add(node)
                    order.append(node)
                continue
            if node in seen:
                continue
            stack.append((node, True))
            for k in reversed(face_keys(X.dim_of[node])):
                b = X.faces[node][k].base
                if b not in seen:
                    stack.append((b, False))

    for n in sorted(X.cells, reverse=True):
        for c in X.cells[n]:
            visit(c)
    return [c for c in order if c not in skip]


def search_maps(source: FiniteCubicalSet, target: FiniteCubicalSet, fixed: dict | None = None,
                allowed: Callable | None = None, nd_injective: bool = False,
                budget: int | None = DEFAULT_BUDGET):
    """Yield every cubical map extending ``fixed`` (id -> CubeRef) by backtracking.

    ``allowed(cube_id, candidate)`` filters candidates; ``nd_injective``
    restricts to maps sending nondegenerate cubes injectively to
    nondegenerate cubes.  Raises ``BudgetExceeded`` after ``budget`` tries.
    """
    fixed = dict(fixed or {})
    order = _visit_order(source, fixed)
    assign = dict(fixed)
    used = {r.base for r in fixed.values()} if nd_injective else set()
    counter = [0]

    def candidates(c):
        n = source.dim_of[c]
        if n == 0:
            pool = target.materialize(0)
        else:
            req = tuple(target.act(assign[r.base], r.epi) if r.is_degenerate else assign[r.base]
                        for r in (source.faces[c][k] for k in face_keys(n)))
            pool = target.face_index(n).get(req, ())
        for cand in pool:
            if nd_injective and (cand.is_degenerate or cand.base in used):
                continue
            if allowed is not None and not allowed(c, cand):
                continue
            yield cand

    def rec(pos):
        if pos == len(order):
            yield dict(assign)
            return
        c = order[pos]
        for cand in candidates(c):
            counter[0] += 1
            if budget is not None and counter[0] > budget:
                raise BudgetExceeded(f"map search exceeded {budget} steps")
            assign[c] = cand
            if nd_injective:
                used.add(cand.base)
            yield from rec(pos + 1)
            if nd_injective:
                used.discard(cand.base)
        assign.pop(c, None)

    yield from rec(0)


def enumerate_maps(X: FiniteCubicalSet, Y: FiniteCubicalSet, budget: int | None = DEFAULT_BUDGET):
    return [CubicalMap(X, Y, a) for a in search_maps(X, Y, budget=budget)]


def are_isomorphic(X: FiniteCubicalSet, Y: FiniteCubicalSet, budget: int | None = DEFAULT_BUDGET):
    """An isomorphism ``X -> Y`` or ``None``."""
    if X.counts() != Y.counts():
        return None
    for a in search_maps(X, Y, nd_injective=True, budget=budget):
        return CubicalMap(X, Y, a)
    return None


def is_iso_of_arrows(i: CubicalMap, j: CubicalMap, budget: int | None = DEFAULT_BUDGET):
    """Isomorphisms ``(s, t)`` with ``t . i = j . s``, for monos ``i``, ``j``.

    Since both maps are monos the source iso is determined by the target iso,
    so it is enough to search target isos that carry the image of ``i`` onto
    the image of ``j``.
    """
    if i.source.counts() != j.source.counts() or i.target.counts() != j.target.counts():
        return None
    im_i, im_j = i.image_ids(), j.image_ids()

    def allowed(c, cand):
        return (c in im_i) == (cand.base in im_j)

    for a in search_maps(i.target, j.target, allowed=allowed, nd_injective=True, budget=budget):
        t = CubicalMap(i.target, j.target, a)
        back = {r.base: c for c, r in j.assignment.items()}
        s = CubicalMap(i.source, j.source,
                       {c: j.source.ref(back[t(i(c)).base]) for c in i.source.all_ids()})
        return s, t
    return None


def induced_from_pushout(P: FiniteCubicalSet, jb: CubicalMap, jc: CubicalMap,
                         u: CubicalMap, v: CubicalMap) -> CubicalMap:
    """The map ``P -> Z`` restricting to ``u`` along ``jb`` and ``v`` along ``jc``."""
    assignment = {}
    for j, w in ((jc, v), (jb, u)):
        for c, r in j.assignment.items():
            if not r.is_degenerate and r.base not in assignment:
                assignment[r.base] = w(c)
    missing = [c for c in P.all_ids() if c not in assignment]
    if missing:
        raise CoreError(f"cubes {missing[:3]} of the pushout are not hit by either leg")
    return CubicalMap(P, u.target, assignment)
