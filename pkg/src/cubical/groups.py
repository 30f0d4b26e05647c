"""Loop spaces, homotopy groups, presentations, and instance checkers for fibrations.

Loop and path spaces are built by shifting: the ``k``-cubes of the shifted
set are ``(k + s)``-cubes of the parent whose first ``s`` coordinates carry
prescribed constant faces, and every structure map acts at index ``+ s``.
Shifted sets of truncated inputs lose ``s`` dimensions.

Cubes inside a shift are kept as cubes of the root set, so iterated shifts
can be compared by plain set equality.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .boxcat import Degeneracy, Gen
from .core import (
    CoreError, CubeRef, CubicalMap, DEFAULT_BUDGET, FiniteCubicalSet, PointedCubicalSet,
    _UnionFind, _ref_name, boundary, extract, face_keys, point, product, pullback,
    rep_cube_morphism, representable, search_maps, subcomplex,
)
from .homotopy import Homotopy, _cylinder, pi0, relative_classes, relative_homotopy_search
from .lifting import (
    IncompatibleFaces, LiftingProblem, OpenBoxMap, compatibility_violations, find_filler,
    find_lift, has_rlp_boundaries, is_fibration, is_kan,
)
from .spaces import sphere

__all__ = ["Shift", "loop_space", "path_loop_space", "path_space", "iterated_loop_space",
           "path_space_maps", "loop_map", "NotKanUpToRequiredDimension", "NoFillerFound",
           "NotAFibration", "HomotopyGroup", "pi_n", "concatenation_square", "concatenate",
           "GroupPresentation", "AbelianInvariants", "pi1_presentation", "abelian_invariants",
           "parse_presentation", "free_reduce", "collapse_map", "quotient_class_bijection",
           "sphere_class", "SphereClass", "vertical_composite", "horizontal_composite",
           "InterchangeResult", "interchange_box", "path_loop_checks", "fiber",
           "pi0_exactness_check", "les_report", "basepoint_transport", "whitehead_report",
           "induced_on_pi_n", "product_check"]


class NotKanUpToRequiredDimension(CoreError):
    pass


class NoFillerFound(CoreError):
    pass


class NotAFibration(CoreError):
    pass


# -- shifted sets ---------------------------------------------------------------------

class Shift:
    """Cubes of ``parent`` seen ``shift`` dimensions lower.

    ``constrained`` lists parent faces ``(j, e)`` with ``j <= shift`` that
    must be constant at ``base``.
    """

    def __init__(self, parent, shift: int, base: str | None, constrained, name: str | None = None):
        self.parent, self.shift, self.base = parent, shift, base
        self.constrained = tuple(constrained)
        if isinstance(parent, Shift):
            self.root, self.total_shift = parent.root, parent.total_shift + shift
        else:
            self.root, self.total_shift = parent, shift
        self.name = name or f"shift{shift}({_name(parent)})"
        self._levels: dict = {}
        self._space = None

    def level(self, k: int) -> list:
        if k not in self._levels:
            P = self.parent
            out = []
            for w in _level(P, k + self.shift):
                if all(_face(P, w, j, e).base == self.base for (j, e) in self.constrained):
                    out.append(w)
            self._levels[k] = out
        return self._levels[k]

    def face(self, w: CubeRef, i: int, e: int) -> CubeRef:
        return _face(self.parent, w, i + self.shift, e)

    def act_gen(self, w: CubeRef, g: Gen) -> CubeRef:
        return _act(self.parent, w, Gen(g.kind, g.i + self.shift, g.e))

    def act_word(self, w: CubeRef, word) -> CubeRef:
        for g in word:
            w = self.act_gen(w, g)
        return w

    @property
    def default_cap(self) -> int:
        return max(self.root.max_dim - self.total_shift, 0)

    def to_cubical_set(self, cap: int | None = None) -> "ShiftSpace":
        if cap is None:
            cap = self.default_cap
        if self._space is not None and self._space.cap == cap:
            return self._space
        levels = [self.level(k) for k in range(cap + 1)]
        X, rep = extract(self.name, levels, self.face, self.act_gen, _ref_name)
        self._space = ShiftSpace(self, X, rep, cap)
        return self._space


class ShiftSpace:
    """A shift as a finite cubical set, with conversions to and from root cubes."""

    def __init__(self, shift: Shift, space: FiniteCubicalSet, rep: dict, cap: int):
        self.shift, self.space, self.cap = shift, space, cap
        self._rep = rep
        self._cube = {r.base: w for (k, w), r in rep.items() if not r.is_degenerate}

    def of(self, w: CubeRef) -> CubeRef:
        """The cube of the space standing for the root cube ``w``."""
        return self._rep[(w.dim - self.shift.total_shift, w)]

    def cube(self, r: CubeRef) -> CubeRef:
        """The root cube behind a cube of the space."""
        return self.shift.act_word(self._cube[r.base], r.epi.word)

    def point_of(self, vertex: str) -> str:
        """Id of the 0-cube standing for the fully degenerate cube at ``vertex``."""
        X = self.shift.root
        return self.of(X.constant(vertex, self.shift.total_shift)).base


def _name(P) -> str:
    return P.name


def _level(P, k: int) -> list:
    return P.materialize(k) if isinstance(P, FiniteCubicalSet) else P.level(k)


def _face(P, w, i, e):
    return P.face(w, i, e)


def _act(P, w, g):
    return P.act_gen(w, g)


def loop_space(X: FiniteCubicalSet, x: str) -> Shift:
    return Shift(X, 1, x, face_keys(1), name=f"loop({X.name},{x})")


def iterated_loop_space(X, x: str, n: int) -> Shift:
    """``n``-fold loops in one shift: all faces in the first ``n`` coordinates constant."""
    return Shift(X, n, x, face_keys(n), name=f"loop{n}({_name(X)},{x})")


def path_loop_space(X: FiniteCubicalSet, x: str) -> Shift:
    """Paths starting at ``x`` (the face ``(1, 0)`` is constant)."""
    return Shift(X, 1, x, [(1, 0)], name=f"paths({X.name},{x})")


def path_space(X: FiniteCubicalSet) -> Shift:
    """All paths: the ``(k+1)``-cubes of ``X`` as ``k``-cubes."""
    return Shift(X, 1, None, [], name=f"paths({X.name})")


def path_space_maps(X: FiniteCubicalSet):
    """``(PX, section, (start, stop), pair, XxX)`` for the free path space.

    ``section`` sends a cube to its degeneracy along the path direction and
    ``pair`` is the endpoint map into the product (built at the same cap).
    """
    S = path_space(X).to_cubical_set()
    PX = S.space
    cap = S.cap
    ends = []
    for e in (0, 1):
        ends.append(CubicalMap(PX, X, {c: X.face(S.cube(PX.ref(c)), 1, e) for c in PX.all_ids()}))
    XX, p1, p2 = product(X, X, cap, skeleton=True)
    lookup = {}
    for k in range(cap + 1):
        for r in XX.materialize(k):
            lookup[(p1(r), p2(r))] = r
    pair = CubicalMap(PX, XX, {c: lookup[(ends[0](c), ends[1](c))] for c in PX.all_ids()})
    sec = {}
    for c in X.all_ids():
        if X.dim_of[c] <= cap:
            sec[c] = S.of(X.act_gen(X.ref(c), Degeneracy(1)))
    Xs, _ = subcomplex(X, [c for c in X.all_ids() if X.dim_of[c] <= cap])
    section = CubicalMap(Xs, PX, sec)
    return PX, section, ends, pair, XX


def loop_map(p: CubicalMap, x: str, SX: ShiftSpace | None = None, SY: ShiftSpace | None = None):
    """``Omega p`` between the loop spaces at ``x`` and ``p(x)``."""
    y = p(x).base
    SX = SX or loop_space(p.source, x).to_cubical_set()
    SY = SY or loop_space(p.target, y).to_cubical_set(SX.cap)
    out = {c: SY.of(p(SX.cube(SX.space.ref(c)))) for c in SX.space.all_ids()}
    return CubicalMap(SX.space, SY.space, out), SX, SY


# -- concatenation --------------------------------------------------------------------

def _constant_edge(X, v: CubeRef) -> CubeRef:
    return X.act_gen(v, Degeneracy(1))


def concatenation_square(X, f: CubeRef, g: CubeRef) -> CubeRef:
    """A square with left side ``f``, bottom ``g`` and a constant right side.

    Its top face is a composite of ``f`` and then ``g``.
    """
    if X.face(f, 1, 1) != X.face(g, 1, 0):
        raise IncompatibleFaces(f"{f} does not end where {g} starts")
    faces = {(1, 0): f, (1, 1): _constant_edge(X, X.face(g, 1, 1)), (2, 1): g}
    w = find_filler(X, OpenBoxMap(2, 2, 0, faces))
    if w is None:
        raise NoFillerFound(f"no concatenation square for {f} and {g}")
    return w


def concatenate(X, f: CubeRef, g: CubeRef):
    """``(square, product)`` where the product is the top face of the square."""
    w = concatenation_square(X, f, g)
    return w, X.face(w, 2, 0)


def _all_concatenation_squares(X, f, g) -> list:
    faces = {(1, 0): f, (1, 1): _constant_edge(X, X.face(g, 1, 1)), (2, 1): g}
    box = OpenBoxMap(2, 2, 0, faces)
    return list(X.partial_face_index(2, 2, 0).get(box.face_tuple(), ()))


# -- homotopy groups ------------------------------------------------------------------

@dataclass
class HomotopyGroup:
    """``pi_n(X, x)``: classes of ``n``-cubes of ``X`` with every face at ``x``.

    For ``n >= 1`` the product comes from concatenation squares in the
    ``(n-1)``-fold loop space; ``table[a][b]`` is the class of ``a . b``.
    For ``n = 0`` this is the pointed set of components.
    """

    X: FiniteCubicalSet
    x: str
    n: int
    elements: list
    classes: list
    class_of: dict
    identity: int = 0
    table: list | None = None
    inverse: list | None = None
    witnesses: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    verified_up_to: int = 0
    loops: ShiftSpace | None = None

    @property
    def order(self) -> int:
        return len(self.classes)

    def is_trivial(self) -> bool:
        return self.order == 1

    def multiply(self, a: int, b: int) -> int:
        return self.table[a][b]

    def class_of_cube(self, w: CubeRef) -> int:
        return self.class_of[w]

    def representative(self, k: int) -> CubeRef:
        return self.classes[k][0]

    def is_abelian(self) -> bool:
        return self.table is None or all(self.table[a][b] == self.table[b][a]
                                         for a in range(self.order) for b in range(self.order))

    def axioms_hold(self) -> bool:
        return not self.violations


def _require_kan(X, D, budget):
    rep = is_kan(X, D, budget)
    if not rep.ok:
        raise NotKanUpToRequiredDimension(
            f"{X.name} is not Kan up to dimension {D}: {rep.summary()}")
    return rep


def pi_n(X: FiniteCubicalSet, x: str, n: int, D: int | None = None, budget=DEFAULT_BUDGET,
         check_laws: bool = True, rechoice_limit: int = 400) -> HomotopyGroup:
    """The homotopy group with its multiplication table and law witnesses."""
    D = max(n + 2, D or 0)
    _require_kan(X, D, budget)
    if n == 0:
        comp = pi0(X)
        base_class = comp.class_of[x]
        order = [base_class] + [k for k in range(comp.count) if k != base_class]
        classes = [[X.ref(v) for v in comp.classes[k]] for k in order]
        class_of = {r: k for k, cl in enumerate(classes) for r in cl}
        return HomotopyGroup(X, x, 0, [r for cl in classes for r in cl], classes, class_of,
                             verified_up_to=D)
    if n == 1:
        Y, y, S = X, x, None
    else:
        S = iterated_loop_space(X, x, n - 1).to_cubical_set()
        Y, y = S.space, S.point_of(x)

    def up(r):
        return r if S is None else S.cube(r)

    def down(w):
        return w if S is None else S.of(w)

    loops = [w for w in Y.materialize(1) if Y.face(w, 1, 0).base == y and Y.face(w, 1, 1).base == y]
    uf = _UnionFind()
    for w in loops:
        uf.add(w)
    pos = {w: k for k, w in enumerate(loops)}
    for w in Y.materialize(2):
        if Y.face(w, 1, 0).base == y and Y.face(w, 1, 1).base == y:
            uf.union(Y.face(w, 2, 0), Y.face(w, 2, 1), key=pos.get)
    groups: dict = {}
    for w in loops:
        groups.setdefault(uf.find(w), []).append(w)
    unit = Y.constant(y, 1)
    ordered = sorted(groups.values(), key=lambda g: (unit not in g, pos[g[0]]))
    classes_y = ordered
    cls_y = {w: k for k, g in enumerate(classes_y) for w in g}
    m = len(classes_y)
    table = [[0] * m for _ in range(m)]
    squares = {}
    for a in range(m):
        for b in range(m):
            sq, prod = concatenate(Y, classes_y[a][0], classes_y[b][0])
            table[a][b] = cls_y[prod]
            squares[(a, b)] = sq
    G = HomotopyGroup(X, x, n, [up(w) for w in loops], [[up(w) for w in g] for g in classes_y],
                      {}, 0, table, None, {"products": squares}, [], D, S)
    G.class_of = {up(w): k for w, k in cls_y.items()}
    G.inverse = [None] * m
    if check_laws:
        _group_laws(G, Y, y, classes_y, cls_y, rechoice_limit)
    else:
        for a in range(m):
            G.inverse[a] = next(b for b in range(m) if table[b][a] == 0)
    return G


def _group_laws(G, Y, y, classes, cls, rechoice_limit):
    """Unit, associativity, inverse and well-definedness, each with explicit cubes."""
    bad = G.violations
    m = len(classes)
    table = G.table
    unit = Y.constant(y, 1)
    reps = [g[0] for g in classes]
    wit = G.witnesses
    wit["left_unit"], wit["right_unit"], wit["associativity"], wit["inverse"] = [], [], [], []
    for a, f in enumerate(reps):
        # f.s2 has constant sides and f on top and bottom; f.g1- has f on the left and top
        left = Y.act_gen(f, Degeneracy(2))
        right = Y.act_gen(f, Gen("g", 1, 0))
        if (Y.face(left, 1, 0), Y.face(left, 1, 1), Y.face(left, 2, 1), Y.face(left, 2, 0)) != \
                (unit, unit, f, f):
            bad.append(f"left unit square for class {a} has the wrong faces")
        if (Y.face(right, 1, 0), Y.face(right, 1, 1), Y.face(right, 2, 1), Y.face(right, 2, 0)) != \
                (f, unit, unit, f):
            bad.append(f"right unit square for class {a} has the wrong faces")
        wit["left_unit"].append(left)
        wit["right_unit"].append(right)
        if table[0][a] != a or table[a][0] != a:
            bad.append(f"class {a} is not fixed by the unit in the table")
    for a, b, c in itertools.product(range(m), repeat=3):
        f, g, h = reps[a], reps[b], reps[c]
        fg_sq, fg = concatenate(Y, f, g)
        gh_sq, gh = concatenate(Y, g, h)
        fgh_sq, f_gh = concatenate(Y, f, gh)
        faces = {(1, 0): fg_sq, (1, 1): Y.constant(y, 2), (2, 0): fgh_sq,
                 (2, 1): Y.act_gen(h, Degeneracy(2)), (3, 1): gh_sq}
        box = OpenBoxMap(3, 3, 0, faces)
        problems = box.violations(Y)
        if problems:
            bad.append(f"associativity box ({a},{b},{c}) is invalid: {problems[0]}")
            continue
        W = find_filler(Y, box, check=False)
        if W is None:
            bad.append(f"associativity box ({a},{b},{c}) has no filler")
            continue
        S = Y.face(W, 3, 0)
        got = (Y.face(S, 1, 0), Y.face(S, 1, 1), Y.face(S, 2, 1), Y.face(S, 2, 0))
        if got != (fg, unit, h, f_gh):
            bad.append(f"associativity filler ({a},{b},{c}) is not a concatenation square")
        wit["associativity"].append(((a, b, c), W))
        if table[table[a][b]][c] != table[a][table[b][c]] or cls[f_gh] != table[cls[fg]][c]:
            bad.append(f"table is not associative at ({a},{b},{c})")
    for a, f in enumerate(reps):
        faces = {(1, 1): unit, (2, 0): unit, (2, 1): f}
        H = find_filler(Y, OpenBoxMap(2, 1, 0, faces))
        if H is None:
            bad.append(f"no inverse box filler for class {a}")
            continue
        g = Y.face(H, 1, 0)
        wit["inverse"].append((a, H))
        left = cls[g]
        if table[left][a] != 0:
            bad.append(f"left inverse of class {a} does not multiply to the unit")
        G.inverse[a] = left
        if table[a][left] != 0:
            bad.append(f"left inverse of class {a} is not a right inverse")
    checked = 0
    for a, b in itertools.product(range(m), repeat=2):
        for f in classes[a]:
            for g in classes[b]:
                if checked >= rechoice_limit:
                    break
                for sq in _all_concatenation_squares(Y, f, g):
                    checked += 1
                    if cls[Y.face(sq, 2, 0)] != table[a][b]:
                        bad.append(f"concatenation of classes {a},{b} depends on the filler")
    wit["rechoice_checks"] = checked


def induced_on_pi_n(f: CubicalMap, G: HomotopyGroup, H: HomotopyGroup) -> list:
    """Class index in ``G`` to class index in ``H`` along ``f``."""
    return [H.class_of[f(G.representative(k))] for k in range(G.order)]


def product_check(X, x, Y, y, n: int, cap: int, budget=DEFAULT_BUDGET) -> dict:
    """Compare ``pi_n`` of the product with the product of the groups."""
    P, px, py = product(X, Y, cap, skeleton=True)
    base = f"({x},{y})"
    GP = pi_n(P, base, n, budget=budget)
    GX, GY = pi_n(X, x, n, budget=budget), pi_n(Y, y, n, budget=budget)
    pairs = [(GX.class_of[px(GP.representative(k))], GY.class_of[py(GP.representative(k))])
             for k in range(GP.order)]
    bijective = len(set(pairs)) == len(pairs) == GX.order * GY.order
    hom = True
    if n >= 1:
        for a in range(GP.order):
            for b in range(GP.order):
                c = GP.table[a][b]
                want = (GX.table[pairs[a][0]][pairs[b][0]], GY.table[pairs[a][1]][pairs[b][1]])
                hom = hom and pairs[c] == want
    return {"n": n, "orders": (GP.order, GX.order, GY.order), "pairs": pairs,
            "bijective": bijective, "homomorphism": hom, "ok": bijective and hom,
            "laws": GP.axioms_hold() and GX.axioms_hold() and GY.axioms_hold()}


# -- presentations --------------------------------------------------------------------

@dataclass
class GroupPresentation:
    generators: list
    relations: list
    origin: str = "cubical-2-skeleton"
    labels: dict = field(default_factory=dict)

    def text(self) -> str:
        lines = ["gen: " + " ".join(self.generators)]
        for r in self.relations:
            lines.append("rel: " + format_relation(r))
        return "\n".join(lines) + "\n"


@dataclass
class AbelianInvariants:
    rank: int
    torsion: list

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def format_relation(word) -> str:
    return ".".join(g if s == 1 else f"{g}^-1" for g, s in word) if word else "1"


def parse_presentation(text: str) -> GroupPresentation:
    gens, rels = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        body = body.strip()
        if head == "gen":
            gens = body.split()
        elif head == "rel":
            word = []
            if body != "1":
                for tok in body.split("."):
                    if tok.endswith("^-1"):
                        word.append((tok[:-3], -1))
                    else:
                        word.append((tok, 1))
            rels.append(word)
        else:
            raise ValueError(f"unknown presentation line {line!r}")
    return GroupPresentation(gens, rels, "parsed")


def free_reduce(word) -> list:
    out = []
    for g, s in word:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return out


def edge_presentation(vertices, edges, ends, cells, boundary_word, base, origin) -> GroupPresentation:
    """Presentation from a 2-skeleton with a spanning tree killed.

    ``ends[e]`` gives the endpoints of an edge and ``boundary_word(c)`` the
    boundary of a 2-cell as ``(edge or None, sign)`` pairs.
    """
    adj: dict = {v: [] for v in vertices}
    for e in edges:
        a, b = ends[e]
        adj[a].append((e, b))
        adj[b].append((e, a))
    seen, tree, queue = {base}, set(), [base]
    while queue:
        v = queue.pop(0)
        for e, w in adj[v]:
            if w not in seen:
                seen.add(w)
                tree.add(e)
                queue.append(w)
    comp_edges = [e for e in edges if ends[e][0] in seen]
    names = {e: f"e{k}" for k, e in enumerate(comp_edges)}
    gens = [names[e] for e in comp_edges if e not in tree]
    rels = []
    for c in cells:
        word = boundary_word(c)
        if not word or not any(e is not None and ends[e][0] in seen for e, _ in word):
            continue
        red = free_reduce([(names[e], s) for e, s in word if e is not None and e not in tree])
        if red:
            rels.append(red)
    labels = {names[e]: e for e in comp_edges if e not in tree}
    return GroupPresentation(gens, rels, origin, labels)


def pi1_presentation(X: FiniteCubicalSet, x: str) -> GroupPresentation:
    """Generators are nondegenerate edges, one relation per nondegenerate square."""
    def edge_of(r):
        return None if r.is_degenerate else r.base

    ends = {e: (X.faces[e][(1, 0)].base, X.faces[e][(1, 1)].base) for e in X.nd(1)}

    def boundary_word(v):
        f = X.faces[v]
        return [(edge_of(f[(1, 0)]), 1), (edge_of(f[(2, 1)]), 1),
                (edge_of(f[(1, 1)]), -1), (edge_of(f[(2, 0)]), -1)]

    return edge_presentation(X.nd(0), X.nd(1), ends, X.nd(2), boundary_word, x,
                             "cubical-2-skeleton")


def relation_matrix(P: GroupPresentation) -> list:
    col = {g: k for k, g in enumerate(P.generators)}
    rows = []
    for r in P.relations:
        row = [0] * len(P.generators)
        for g, s in r:
            row[col[g]] += s
        rows.append(row)
    return rows


def abelian_invariants(P: GroupPresentation) -> AbelianInvariants:
    """Rank and torsion of the abelianization from the Smith normal form."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import invariant_factors

    rows = [r for r in relation_matrix(P) if any(r)]
    n = len(P.generators)
    if not rows or n == 0:
        return AbelianInvariants(n, [])
    factors = [abs(int(d)) for d in invariant_factors(Matrix(rows), domain=ZZ)]
    nonzero = [d for d in factors if d != 0]
    return AbelianInvariants(n - len(nonzero), sorted(d for d in nonzero if d > 1))


# -- equivalent descriptions of the groups --------------------------------------------

def _zero_id(n: int) -> str:
    return "0" * n if n else "pt"


def collapse_map(n: int, Q=None, proj=None, base=None):
    """``bd(n+1) -> box_n / bd(n)``: faces in the last direction at 0 are kept.

    Everything else goes to the basepoint.  For ``n = 0`` the zero vertex
    is the basepoint and the other endpoint is kept.
    """
    if Q is None:
        Q, proj, base = sphere(n) if n else _sphere0()
    B, _ = boundary(n + 1)
    if n == 0:
        # the two endpoints: the zero vertex is the basepoint, the other is the element
        return CubicalMap(B, Q, {"0": Q.ref(base), "1": proj("pt")}), B
    out = {}
    for c in B.all_ids():
        k = B.dim_of[c]
        if c.endswith("0"):
            out[c] = proj(c[:-1] or "pt")
        else:
            out[c] = Q.constant(base, k)
    return CubicalMap(B, Q, out), B


def _sphere0():
    Q = FiniteCubicalSet("S0", {0: ["*", "pt"]}, {})
    box = representable(0)
    return Q, CubicalMap(box, Q, {"pt": Q.ref("pt")}), "*"


def _element_maps(X, x, n, elements):
    """Each element as a map of the cube, of the quotient, and of the sphere."""
    box = representable(n)
    if n:
        Q, proj, qbase = sphere(n)
    else:
        Q, proj, qbase = _sphere0()
    top = Q.nd(n)[0] if n else "pt"
    c, B = collapse_map(n, Q, proj, qbase)
    rel, quo, sph = [], [], []
    for w in elements:
        rel.append(CubicalMap(box, X, {cid: X.act(w, rep_cube_morphism(cid)) for cid in box.all_ids()}))
        qa = {qbase: X.ref(x), top: w}
        qm = CubicalMap(Q, X, qa)
        quo.append(qm)
        sph.append(qm.compose(c))
    return box, (Q, qbase), B, rel, quo, sph


def _partition(classes, key) -> list:
    return sorted(sorted(key(m) for m in cl) for cl in classes)


def quotient_class_bijection(X: FiniteCubicalSet, x: str, n: int, D: int | None = None,
                             budget=DEFAULT_BUDGET, G: HomotopyGroup | None = None) -> dict:
    """Compare four descriptions of ``pi_n(X, x)`` on the same elements.

    Classes from loop-space components, relative homotopy of cube maps,
    pointed homotopy of maps from the quotient sphere, and pointed homotopy
    of maps from the boundary sphere (through the collapse map), plus the
    filler test for trivial boundary spheres.
    """
    G = G or pi_n(X, x, n, D, budget=budget, check_laws=False)
    elements = [G.representative(k) for k in range(G.order)]
    elements = [w for cl in G.classes for w in cl]
    box, (Q, qbase), B, rel, quo, sph = _element_maps(X, x, n, elements)
    index = {w: k for k, w in enumerate(elements)}
    loops_part = _partition(G.classes, lambda w: index[w])
    _, xinc = subcomplex(X, [x])
    if n:
        _, binc = boundary(n)
        rel_classes = relative_classes(box, binc, X, xinc, budget, maps=rel)
    else:
        rel_classes = relative_classes(box, None, X, None, budget, maps=rel)
    key_of = {m.key(): k for k, m in enumerate(rel)}
    rel_part = _partition(rel_classes, lambda m: key_of[m.key()])
    _, qinc = subcomplex(Q, [qbase])
    quo_classes = relative_classes(Q, qinc, X, xinc, budget, maps=quo)
    qkey = {m.key(): k for k, m in enumerate(quo)}
    quo_part = _partition(quo_classes, lambda m: qkey[m.key()])
    zero = _zero_id(n + 1)
    _, zinc = subcomplex(B, [zero])
    all_sph = [CubicalMap(B, X, a) for a in search_maps(B, X, fixed={zero: X.ref(x)}, budget=budget)]
    sph_classes = relative_classes(B, zinc, X, xinc, budget, maps=all_sph)
    sclass = {m.key(): k for k, cl in enumerate(sph_classes) for m in cl}
    hit = {sclass[m.key()] for m in sph}
    sph_groups: dict = {}
    for k, m in enumerate(sph):
        sph_groups.setdefault(sclass[m.key()], []).append(k)
    sph_part = sorted(sorted(v) for v in sph_groups.values())
    unit_class = sclass[sph[0].key()]
    _, bd_inc = boundary(n + 1)
    filler_mismatch = []
    for m in all_sph:
        lift = find_lift(LiftingProblem(bd_inc, m), budget=budget)
        if (lift is not None) != (sclass[m.key()] == unit_class):
            filler_mismatch.append(m.key())
    consistent = (loops_part == rel_part == quo_part == sph_part and len(hit) == len(sph_classes)
                  and not filler_mismatch)
    return {"n": n, "elements": len(elements), "classes": G.order,
            "loop_components": loops_part, "relative": rel_part, "quotient": quo_part,
            "boundary_sphere": sph_part, "sphere_maps": len(all_sph),
            "sphere_classes": len(sph_classes), "collapse_surjective": len(hit) == len(sph_classes),
            "filler_mismatches": filler_mismatch, "consistent": consistent}


@dataclass
class SphereClass:
    class_index: int | None
    trivial: bool
    filler: CubicalMap | None
    consistent: bool


def sphere_class(f: CubicalMap, x: str, G: HomotopyGroup | None = None,
                 budget=DEFAULT_BUDGET) -> SphereClass:
    """The class of a pointed map ``bd(n+1) -> X`` and a filler when it is trivial."""
    B, X = f.source, f.target
    n = B.max_dim
    zero = _zero_id(n + 1)
    if f(zero).base != x:
        raise CoreError("sphere map is not pointed at the zero vertex")
    G = G or pi_n(X, x, n, budget=budget, check_laws=False)
    _require_kan(X, n + 2, budget)
    _, zinc = subcomplex(B, [zero])
    _, xinc = subcomplex(X, [x])
    elements = [G.representative(k) for k in range(G.order)]
    *_, sph = _element_maps(X, x, n, elements)
    B2 = sph[0].source
    f2 = CubicalMap(B2, X, dict(f.assignment))
    _, zinc = subcomplex(B2, [zero])
    found = None
    for k, m in enumerate(sph):
        if m.assignment == f2.assignment:
            found = k
            break
    if found is None:
        from .homotopy import are_homotopic
        for k, m in enumerate(sph):
            ok, _ = are_homotopic(f2, m, budget, zinc, xinc)
            if ok:
                found = k
                break
    _, bd_inc = boundary(n + 1)
    lift = find_lift(LiftingProblem(bd_inc, f2), budget=budget)
    trivial = found == G.identity
    return SphereClass(found, trivial, lift, (lift is not None) == trivial)


# -- interchange ----------------------------------------------------------------------

def vertical_composite(X, f: CubeRef, g: CubeRef, left=None, right=None):
    """``(cube, square)`` stacking ``f`` above ``g``; the square is face ``(3, 0)``."""
    if X.face(f, 2, 1) != X.face(g, 2, 0):
        raise IncompatibleFaces("the bottom of the upper square is not the top of the lower one")
    left = left or concatenation_square(X, X.face(f, 1, 0), X.face(g, 1, 0))
    right = right or concatenation_square(X, X.face(f, 1, 1), X.face(g, 1, 1))
    faces = {(1, 0): left, (1, 1): right, (2, 0): f,
             (2, 1): X.act_gen(X.face(g, 2, 1), Degeneracy(2)), (3, 1): g}
    return _fill3(X, OpenBoxMap(3, 3, 0, faces), (3, 0))


def horizontal_composite(X, f: CubeRef, h: CubeRef, top=None, bottom=None):
    """``(cube, square)`` putting ``f`` left of ``h``; the square is face ``(2, 0)``."""
    if X.face(f, 1, 1) != X.face(h, 1, 0):
        raise IncompatibleFaces("the right side of the left square is not the left side of the right one")
    top = top or concatenation_square(X, X.face(f, 2, 0), X.face(h, 2, 0))
    bottom = bottom or concatenation_square(X, X.face(f, 2, 1), X.face(h, 2, 1))
    faces = {(1, 0): f, (1, 1): X.act_gen(X.face(h, 1, 1), Degeneracy(1)), (2, 1): h,
             (3, 0): top, (3, 1): bottom}
    return _fill3(X, OpenBoxMap(3, 2, 0, faces), (2, 0))


def _fill3(X, box, result):
    bad = box.violations(X)
    if bad:
        raise IncompatibleFaces(bad[0])
    w = find_filler(X, box, check=False)
    if w is None:
        raise NoFillerFound(f"no filler for the composition box {box.shape}")
    return w, X.face(w, *result)


@dataclass
class InterchangeResult:
    box: OpenBoxMap
    violations: list
    filler: CubeRef | None
    pieces: dict

    @property
    def valid(self) -> bool:
        return not self.violations


def interchange_box(X, f1: CubeRef, f2: CubeRef, g1: CubeRef, g2: CubeRef,
                    search: bool = True) -> InterchangeResult:
    """The open 4-box comparing both ways of composing a 2x2 grid of squares.

    ``f1, f2`` sit on top (left to right), ``g1, g2`` below.  The six edge
    concatenations are chosen once and shared by every composite.
    """
    need = [(X.face(f1, 1, 1), X.face(f2, 1, 0), "f1 | f2"),
            (X.face(g1, 1, 1), X.face(g2, 1, 0), "g1 | g2"),
            (X.face(f1, 2, 1), X.face(g1, 2, 0), "f1 over g1"),
            (X.face(f2, 2, 1), X.face(g2, 2, 0), "f2 over g2")]
    for a, b, what in need:
        if a != b:
            raise IncompatibleFaces(f"edges do not match for {what}: {a} vs {b}")
    cs = concatenation_square
    rows = [cs(X, X.face(f1, 2, 0), X.face(f2, 2, 0)),
            cs(X, X.face(f1, 2, 1), X.face(f2, 2, 1)),
            cs(X, X.face(g1, 2, 1), X.face(g2, 2, 1))]
    cols = [cs(X, X.face(f1, 1, 0), X.face(g1, 1, 0)),
            cs(X, X.face(f1, 1, 1), X.face(g1, 1, 1)),
            cs(X, X.face(f2, 1, 1), X.face(g2, 1, 1))]
    v1, _ = vertical_composite(X, f1, g1, cols[0], cols[1])
    v2, _ = vertical_composite(X, f2, g2, cols[1], cols[2])
    h1, top = horizontal_composite(X, f1, f2, rows[0], rows[1])
    h2, bottom = horizontal_composite(X, g1, g2, rows[1], rows[2])
    vh, _ = vertical_composite(X, top, bottom, cols[0], cols[2])
    faces = {(1, 0): v1, (1, 1): X.act_gen(cols[2], Degeneracy(1)),
             (2, 0): vh, (2, 1): v2,
             (3, 0): h1, (3, 1): X.act_gen(rows[2], Degeneracy(3)),
             (4, 1): h2}
    box = OpenBoxMap(4, 4, 0, faces)
    bad = box.violations(X)
    filler = find_filler(X, box, check=False) if search and not bad else None
    pieces = {"rows": rows, "cols": cols, "vertical": (v1, v2, vh), "horizontal": (h1, h2)}
    return InterchangeResult(box, bad, filler, pieces)


# -- path-loop space and fibers -------------------------------------------------------

def _point_map(X, v: str):
    P = point()
    return CubicalMap(P, X, {"pt": X.ref(v)})


def path_loop_checks(X: FiniteCubicalSet, x: str, D: int, budget=DEFAULT_BUDGET) -> dict:
    """Pullback squares of the path-loop space and the lifting properties of its maps."""
    PL = path_loop_space(X, x)
    L = loop_space(X, x)
    F = path_space(X)
    cap = PL.default_cap
    D = min(D, cap)
    S = PL.to_cubical_set()
    PX = S.space
    ev = CubicalMap(PX, X, {c: X.face(S.cube(PX.ref(c)), 1, 1) for c in PX.all_ids()})
    # fiber of the endpoint over x, computed as a real pullback
    P, pa, _ = pullback(ev, _point_map(X, x), cap, skeleton=True)
    loops_ok = all({S.cube(pa(r)) for r in P.materialize(k)} == set(L.level(k))
                   for k in range(cap + 1))
    FS = F.to_cubical_set()
    start = CubicalMap(FS.space, X, {c: X.face(FS.cube(FS.space.ref(c)), 1, 0)
                                     for c in FS.space.all_ids()})
    P2, pb, _ = pullback(start, _point_map(X, x), cap, skeleton=True)
    paths_ok = all({FS.cube(pb(r)) for r in P2.materialize(k)} == set(PL.level(k))
                   for k in range(cap + 1))
    fib = is_fibration(ev, D, budget)
    acyclic = has_rlp_boundaries(PX, D, budget)
    return {"loop_pullback": loops_ok, "path_pullback": paths_ok,
            "endpoint_fibration": fib.ok, "contractible": acyclic.ok,
            "verified_up_to": D, "ok": loops_ok and paths_ok and fib.ok and acyclic.ok,
            "space": PX, "endpoint": ev}


def fiber(p: CubicalMap, y: str, cap: int | None = None, x: str | None = None,
          skeleton: bool = True):
    """``(PointedCubicalSet, inclusion)`` for the strict fiber over ``y``.

    The basepoint is the pair over ``x`` when given, else the first vertex.
    """
    X, Y = p.source, p.target
    if cap is None:
        cap = max(X.max_dim, 0)
    P, px, _ = pullback(p, _point_map(Y, y), cap, name=f"fiber({X.name},{y})", skeleton=skeleton)
    base = None
    for v in P.nd(0):
        if x is None or px(v).base == x:
            base = v
            break
    pointed = PointedCubicalSet(P, base) if base is not None else None
    return pointed, px


def _pi0_map(f: CubicalMap, a, b) -> list:
    return [b.class_of[f(cl[0]).base] for cl in a.classes]


def pi0_exactness_check(p: CubicalMap, y: str, D: int, x: str | None = None,
                        budget=DEFAULT_BUDGET) -> dict:
    """Image of the fiber's components equals the components over ``[y]``."""
    rep = is_fibration(p, D, budget)
    if not rep.ok:
        raise NotAFibration(rep.summary())
    F, inc = fiber(p, y, x=x)
    X, Y = p.source, p.target
    cx, cy = pi0(X), pi0(Y)
    image = set()
    if F is not None:
        image = set(_pi0_map(inc, pi0(F.space), cx))
    target = cy.class_of[y]
    over = {k for k, cl in enumerate(cx.classes) if cy.class_of[p(cl[0]).base] == target}
    return {"image": sorted(image), "preimage": sorted(over), "exact": image == over,
            "verified_up_to": D}


def _safe_group(X, x, k, budget):
    try:
        return pi_n(X, x, k, budget=budget), None
    except NotKanUpToRequiredDimension as err:
        return None, str(err)


def _connecting(p, G_Y, G_A, inc_lookup, x, k):
    """``pi_k(Y) -> pi_{k-1}(A)`` by lifting against the box missing face ``(k, 0)``."""
    X = p.source
    out = []
    keys = [kk for kk in face_keys(k) if kk != (k, 0)]
    box = tuple(X.constant(x, k - 1) for _ in keys)
    pool = X.partial_face_index(k, k, 0).get(box, ())
    for c in range(G_Y.order):
        w = G_Y.representative(c)
        lift = next((W for W in pool if p(W) == w), None)
        if lift is None:
            out.append(None)
            continue
        out.append(G_A.class_of[inc_lookup[X.face(lift, k, 0)]])
    return out


def les_report(p: CubicalMap, x: str, n_max: int, D: int | None = None,
               budget=DEFAULT_BUDGET) -> dict:
    """Exactness of the long exact sequence at every node that can be computed."""
    X, Y = p.source, p.target
    y = p(x).base
    D = D if D is not None else n_max + 1
    fib = is_fibration(p, D, budget)
    if not fib.ok:
        raise NotAFibration(fib.summary())
    F, inc = fiber(p, y, x=x)
    A, a = F.space, F.basepoint
    inc_lookup = {}
    for k in range(A.max_dim + 1):
        for r in A.materialize(k):
            inc_lookup[inc(r)] = r
    groups, skipped = {}, []
    for k in range(n_max + 1):
        for label, S, s in (("A", A, a), ("X", X, x), ("Y", Y, y)):
            G, why = _safe_group(S, s, k, budget)
            groups[(label, k)] = G
            if G is None:
                skipped.append({"node": f"pi{k}({label})", "status": "SKIPPED", "reason": why})
    maps = {}
    for k in range(n_max + 1):
        GA, GX, GY = groups[("A", k)], groups[("X", k)], groups[("Y", k)]
        if GA and GX:
            maps[("i", k)] = [GX.class_of[inc(GA.representative(c))] for c in range(GA.order)]
        if GX and GY:
            maps[("p", k)] = [GY.class_of[p(GX.representative(c))] for c in range(GX.order)]
        if k >= 1 and GY and groups[("A", k - 1)]:
            maps[("d", k)] = _connecting(p, GY, groups[("A", k - 1)], inc_lookup, x, k)
    nodes, violations = [], []

    def exact_at(name, into, out_of, size, unit=0):
        if into is None or out_of is None:
            nodes.append({"node": name, "status": "SKIPPED", "reason": "a neighbouring map is not computed"})
            return
        image = set(into)
        kernel = {c for c in range(size) if out_of[c] == unit}
        ok = image == kernel and None not in into
        nodes.append({"node": name, "status": "OK" if ok else "FAIL",
                      "image": sorted(image, key=str), "kernel": sorted(kernel)})
        if not ok:
            violations.append(name)

    for k in range(n_max, -1, -1):
        GX, GY, GA = groups[("X", k)], groups[("Y", k)], groups[("A", k)]
        if GX:
            exact_at(f"pi{k}(X)", maps.get(("i", k)), maps.get(("p", k)), GX.order)
        if k >= 1 and GY:
            exact_at(f"pi{k}(Y)", maps.get(("p", k)), maps.get(("d", k)), GY.order)
        if k >= 1 and groups[("A", k - 1)]:
            exact_at(f"pi{k - 1}(A)", maps.get(("d", k)), maps.get(("i", k - 1)),
                     groups[("A", k - 1)].order)
    orders = {f"pi{k}({lab})": (G.order if G else None) for (lab, k), G in groups.items()}
    return {"orders": orders, "nodes": nodes, "skipped": skipped, "violations": violations,
            "ok": not violations, "maps": {f"{m}{k}": v for (m, k), v in maps.items()}}


# -- basepoint change and Whitehead ---------------------------------------------------

def basepoint_transport(X: FiniteCubicalSet, u: str | CubeRef, D: int, budget=DEFAULT_BUDGET):
    """A self-map homotopic to the identity moving the start of ``u`` to its end.

    The homotopy is found by extending ``X (x) {0}`` together with ``u`` over
    the cylinder.  Truncated inputs only allow this on the ``(D-1)``-skeleton.
    Returns ``(map, homotopy, report)``.
    """
    _require_kan(X, D, budget)
    u = X.ref(u) if isinstance(u, str) else u
    a, b = X.face(u, 1, 0).base, X.face(u, 1, 1).base
    dim = max(min(D - 1, X.max_dim), 1)
    Xs, sinc = subcomplex(X, [c for c in X.all_ids() if X.dim_of[c] <= dim],
                          name=f"{X.name}[{dim}]")
    cyl = _cylinder(Xs)
    I = cyl.interval
    fixed = {r.base: X.ref(c) for c, r in cyl.end0.assignment.items()}
    fixed[cyl.tensor.pair(Xs.ref(a), I.ref("*")).base] = u
    fixed[cyl.tensor.pair(Xs.ref(a), I.ref("1")).base] = X.ref(b)
    H = None
    for asg in search_maps(cyl.space, X, fixed=fixed, budget=budget):
        H = CubicalMap(cyl.space, X, asg)
        break
    if H is None:
        raise NoFillerFound("no homotopy extending the path found")
    g = H.compose(cyl.end1)
    hom = Homotopy(H, cyl, sinc, g)
    c0 = pi0(X)
    pi0_perm = [c0.class_of[g(cl[0]).base] for cl in pi0(Xs).classes]
    report = {"skeleton": dim, "moves_basepoint": g(a).base == b,
              "pi0_bijective": sorted(pi0_perm) == list(range(c0.count)),
              "homotopy_valid": hom.is_valid()}
    if dim >= 1 and X.max_dim >= 3:
        Ga, Gb = pi_n(X, a, 1, budget=budget, check_laws=False), pi_n(X, b, 1, budget=budget,
                                                                      check_laws=False)
        image = [Gb.class_of[g(Ga.representative(k))] for k in range(Ga.order)]
        report["pi1_bijective"] = sorted(image) == list(range(Gb.order))
        report["pi1_homomorphism"] = all(image[Ga.table[i][j]] == Gb.table[image[i]][image[j]]
                                         for i in range(Ga.order) for j in range(Ga.order))
    return g, hom, report


def whitehead_report(f: CubicalMap, D: int, n_max: int = 1, budget=DEFAULT_BUDGET) -> dict:
    """Isomorphisms on homotopy groups against contractibility of fibers, instance by instance."""
    fib = is_fibration(f, D, budget)
    if not fib.ok:
        raise NotAFibration(fib.summary())
    X, Y = f.source, f.target
    cx, cy = pi0(X), pi0(Y)
    pi0_map = [cy.class_of[f(cl[0]).base] for cl in cx.classes]
    iso0 = sorted(pi0_map) == list(range(cy.count))
    iso = {"pi0": iso0}
    skipped = []
    for cl in cx.classes:
        x = cl[0]
        for k in range(1, n_max + 1):
            GX, why1 = _safe_group(X, x, k, budget)
            GY, why2 = _safe_group(Y, f(x).base, k, budget)
            if GX is None or GY is None:
                skipped.append({"node": f"pi{k} at {x}", "reason": why1 or why2})
                continue
            image = [GY.class_of[f(GX.representative(c))] for c in range(GX.order)]
            iso[f"pi{k}@{x}"] = sorted(image) == list(range(GY.order))
    fibers = {}
    for v in Y.nd(0):
        F, _ = fiber(f, v)
        if F is None:
            fibers[v] = False
            continue
        d = min(D, F.space.max_dim)
        fibers[v] = has_rlp_boundaries(F.space, d, budget).ok
    groups_iso = all(iso.values())
    contractible = all(fibers.values())
    return {"iso": iso, "fibers_contractible": fibers, "groups_iso": groups_iso,
            "all_fibers_contractible": contractible, "consistent": groups_iso == contractible,
            "skipped": skipped, "verified_up_to": D}
