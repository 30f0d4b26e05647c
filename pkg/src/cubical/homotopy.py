"""Connected components, homotopies between maps, and cube contractions."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .boxcat import BoxMorphism, NegConnection, make_generator, tensor as box_tensor
from .core import (
    CoreError, CubeRef, CubicalMap, DEFAULT_BUDGET, FiniteCubicalSet, _UnionFind,
    enumerate_maps, point, rep_cube_morphism, rep_ref_of, representable, search_maps,
)
from .tensor import Cylinder

__all__ = ["Pi0Result", "Homotopy", "pi0", "elementary_homotopy_search", "are_homotopic",
           "relative_homotopy_search", "relative_classes", "homotopy_classes",
           "cube_contraction", "vertex_inclusion_equivalence",
           "path_object_check", "induced_on_pi0"]


@dataclass
class Pi0Result:
    classes: list
    class_of: dict

    @property
    def count(self) -> int:
        return len(self.classes)

    def representative(self, v: str) -> str:
        return self.classes[self.class_of[v]][0]


def pi0(X: FiniteCubicalSet) -> Pi0Result:
    """Vertices joined by nondegenerate edges, closed up."""
    uf = _UnionFind()
    order = {v: k for k, v in enumerate(X.nd(0))}
    for v in X.nd(0):
        uf.add(v)
    for e in X.nd(1):
        a, b = X.faces[e][(1, 0)].base, X.faces[e][(1, 1)].base
        uf.union(a, b, key=order.get)
    groups: dict = {}
    for v in X.nd(0):
        groups.setdefault(uf.find(v), []).append(v)
    classes = sorted(groups.values(), key=lambda g: order[g[0]])
    class_of = {v: k for k, g in enumerate(classes) for v in g}
    return Pi0Result(classes, class_of)


def induced_on_pi0(f: CubicalMap) -> dict:
    """Class index in the source to class index in the target."""
    a, b = pi0(f.source), pi0(f.target)
    return {k: b.class_of[f(g[0]).base] for k, g in enumerate(a.classes)}


@dataclass
class Homotopy:
    """``H: X (x) box1 -> Y`` with ``H . end0 = start`` and ``H . end1 = stop``."""

    H: CubicalMap
    cylinder: Cylinder
    start: CubicalMap
    stop: CubicalMap

    def check(self) -> list[str]:
        out = list(self.H.check())
        for end, m, label in ((self.cylinder.end0, self.start, "start"),
                              (self.cylinder.end1, self.stop, "stop")):
            got = self.H.compose(end)
            if got.assignment != m.assignment:
                out.append(f"{label} end does not match")
        return out

    def is_valid(self) -> bool:
        return not self.check()

    def reverse_ends(self):
        return self.stop, self.start


_cylinders: dict = {}


def _cylinder(X: FiniteCubicalSet) -> Cylinder:
    cyl = _cylinders.get(id(X))
    if cyl is None or cyl.base is not X:
        cyl = Cylinder(X)
        _cylinders[id(X)] = cyl
    return cyl


def _end_fixing(cyl: Cylinder, f: CubicalMap, g: CubicalMap) -> dict:
    fixed = {}
    for end, m in ((cyl.end0, f), (cyl.end1, g)):
        for c, r in end.assignment.items():
            if r.is_degenerate:
                raise CoreError("cylinder end is not a monomorphism")
            fixed[r.base] = m(c)
    return fixed


def relative_homotopy_search(f: CubicalMap, g: CubicalMap, sub_source: CubicalMap | None = None,
                             sub_target: CubicalMap | None = None, budget=DEFAULT_BUDGET):
    """An elementary homotopy from ``f`` to ``g`` keeping ``A (x) box1`` inside ``B``.

    ``sub_source: A -> X`` and ``sub_target: B -> Y`` are inclusions; either
    may be ``None`` for the empty subobject (absolute homotopies).
    """
    X, Y = f.source, f.target
    cyl = _cylinder(X)
    fixed = _end_fixing(cyl, f, g)
    allowed = None
    if sub_source is not None:
        over = set(cyl.restrict_to(sub_source))
        inside = sub_target.image_ids() if sub_target is not None else set()

        def allowed(c, cand):
            return c not in over or cand.base in inside
    for a in search_maps(cyl.space, Y, fixed=fixed, allowed=allowed, budget=budget):
        h = Homotopy(CubicalMap(cyl.space, Y, a), cyl, f, g)
        if h.check():
            raise CoreError("homotopy search produced an invalid witness")
        return h
    return None


def elementary_homotopy_search(f: CubicalMap, g: CubicalMap, budget=DEFAULT_BUDGET):
    return relative_homotopy_search(f, g, None, None, budget)


def _classes(maps, related, budget):
    """Union maps joined by an elementary homotopy in either direction."""
    uf = _UnionFind()
    keys = [m.key() for m in maps]
    for k in keys:
        uf.add(k)
    witness = {}
    for a in range(len(maps)):
        for b in range(a + 1, len(maps)):
            if uf.find(keys[a]) == uf.find(keys[b]):
                continue
            h = related(maps[a], maps[b])
            if h is None:
                h = related(maps[b], maps[a])
            if h is not None:
                uf.union(keys[a], keys[b])
                witness[(a, b)] = h
    groups: dict = {}
    for k, m in zip(keys, maps):
        groups.setdefault(uf.find(k), []).append(m)
    return list(groups.values()), witness


def homotopy_classes(X: FiniteCubicalSet, Y: FiniteCubicalSet, budget=DEFAULT_BUDGET):
    maps = enumerate_maps(X, Y, budget=budget)
    classes, _ = _classes(maps, lambda a, b: elementary_homotopy_search(a, b, budget), budget)
    return classes


def are_homotopic(f: CubicalMap, g: CubicalMap, budget=DEFAULT_BUDGET, sub_source=None,
                  sub_target=None):
    """``(True, chain)`` when a zig-zag of elementary homotopies joins ``f`` to ``g``.

    ``chain`` lists ``(homotopy, forward)`` steps.  The search first tries a
    single homotopy and then walks the graph of all maps with the same
    boundary behaviour.
    """
    def step(a, b):
        return relative_homotopy_search(a, b, sub_source, sub_target, budget)

    if f.assignment == g.assignment:
        return True, [(step(f, f), True)]
    h = step(f, g)
    if h is not None:
        return True, [(h, True)]
    h = step(g, f)
    if h is not None:
        return True, [(h, False)]
    maps = [m for m in enumerate_maps(f.source, f.target, budget=budget)
            if _respects(m, sub_source, sub_target)]
    index = {m.key(): k for k, m in enumerate(maps)}
    start, goal = index.get(f.key()), index.get(g.key())
    if start is None or goal is None:
        return False, []
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        for nxt in range(len(maps)):
            if nxt in prev:
                continue
            h = step(maps[cur], maps[nxt])
            fwd = True
            if h is None:
                h, fwd = step(maps[nxt], maps[cur]), False
            if h is not None:
                prev[nxt] = (cur, h, fwd)
                queue.append(nxt)
    if goal not in prev:
        return False, []
    chain = []
    node = goal
    while prev[node] is not None:
        cur, h, fwd = prev[node]
        chain.append((h, fwd))
        node = cur
    return True, chain[::-1]


def _respects(m: CubicalMap, sub_source, sub_target) -> bool:
    if sub_source is None:
        return True
    inside = sub_target.image_ids() if sub_target is not None else set()
    return all(m(sub_source(a)).base in inside for a in sub_source.source.all_ids())


def relative_classes(X: FiniteCubicalSet, sub_source: CubicalMap | None, Y: FiniteCubicalSet,
                     sub_target: CubicalMap | None, budget=DEFAULT_BUDGET, maps=None):
    """Classes of maps of pairs ``(X, A) -> (Y, B)`` up to relative homotopy."""
    if maps is None:
        maps = [m for m in enumerate_maps(X, Y, budget=budget)
                if _respects(m, sub_source, sub_target)]
    classes, _ = _classes(
        maps, lambda a, b: relative_homotopy_search(a, b, sub_source, sub_target, budget), budget)
    return classes


# -- explicit contractions ------------------------------------------------------------

def _cell_morphism(cyl: Cylinder, cid: str) -> BoxMorphism:
    """The box morphism picked out by a cylinder cell of a representable."""
    from .boxcat import compose
    phi, b, c = cyl.tensor.cells[cid]
    return compose(box_tensor(rep_cube_morphism(b), rep_cube_morphism(c)), phi)


def _homotopy_from_table(n: int, table_fn) -> Homotopy:
    """The homotopy ``box_n (x) box1 -> box_n`` induced by a box morphism ``[1]^(n+1) -> [1]^n``."""
    from .boxcat import compose
    box = representable(n)
    cyl = _cylinder(box)
    h = table_fn
    assignment = {cid: rep_ref_of(compose(h, _cell_morphism(cyl, cid))) for cid in cyl.tensor.cells}
    H = CubicalMap(cyl.space, box, assignment)
    start = H.compose(cyl.end0)
    stop = H.compose(cyl.end1)
    return Homotopy(H, cyl, start, stop)


def cube_contraction(n: int) -> Homotopy:
    """The negative connection on the last two coordinates as a homotopy on ``box_n``.

    Its start is the identity and its stop sets the last coordinate to 1.
    """
    if n < 1:
        raise CoreError("cube_contraction needs n >= 1")
    return _homotopy_from_table(n, make_generator(NegConnection(n), n + 1))


def _partial_top(n: int, k: int) -> BoxMorphism:
    """The endomorphism of ``[1]^n`` setting coordinates ``k..n`` to 1."""
    table = []
    mask = ((1 << n) - 1) ^ ((1 << (k - 1)) - 1)
    for v in range(1 << n):
        table.append(v | mask)
    return BoxMorphism(n, n, table)


def _sweep(n: int, k: int) -> BoxMorphism:
    """``(x, t) -> (x_1..x_{k-1}, max(x_k, t), 1, .., 1)``: from ``top(k+1)`` to ``top(k)``."""
    table = []
    high = ((1 << n) - 1) ^ ((1 << k) - 1)
    for v in range(1 << (n + 1)):
        t = v >> n & 1
        x = v & ((1 << n) - 1)
        y = (x & ((1 << (k - 1)) - 1)) | high | ((((x >> (k - 1)) & 1) | t) << (k - 1))
        table.append(y)
    return BoxMorphism(n + 1, n, table)


def vertex_inclusion_equivalence(n: int):
    """Witnesses that the top vertex ``box_0 -> box_n`` is a homotopy equivalence.

    Returns ``(inclusion, retraction, chain)``: the retraction composed with
    the inclusion is the identity of ``box_0``, and ``chain`` is a list of
    elementary homotopies from the identity of ``box_n`` to the constant
    map at the top vertex.
    """
    box, pt = representable(n), point()
    top = "1" * n if n else "pt"
    inc = CubicalMap(pt, box, {"pt": box.ref(top)})
    ret = CubicalMap(box, pt, {c: pt.constant("pt", box.dim_of[c]) for c in box.all_ids()})
    chain = [_homotopy_from_table(n, _sweep(n, k)) for k in range(n, 0, -1)]
    return inc, ret, chain


# -- path objects ----------------------------------------------------------------------

def path_object_check(X: FiniteCubicalSet, D: int, budget=DEFAULT_BUDGET) -> dict:
    """Check the factorization of the diagonal through the path space.

    The path space has the ``(k+1)``-cubes of ``X`` as ``k``-cubes (first
    coordinate is the path direction).  Reports the section equations, the
    fibration property of the endpoint pair, and boundary lifting for each
    endpoint evaluation, all up to ``D``.
    """
    from .groups import path_space_maps
    from .lifting import has_rlp_boundaries, is_fibration, is_kan
    PX, section, ends, pair, XX = path_space_maps(X)
    inclusion = {c: X.ref(c) for c in section.source.all_ids()}
    sec_ok = all(e.compose(section).assignment == inclusion for e in ends)
    # the Kan claims are judged at the requested bound, the path space checks at its cap
    bound = max(D, min(D, PX.max_dim) + 1)
    kan = is_kan(X, bound)
    D = min(D, PX.max_dim)
    fib = is_fibration(pair, D, budget)
    rlp = [has_rlp_boundaries(e, D, budget) for e in ends]
    return {
        "section": sec_ok,
        "X_kan_up_to": kan.verified_up_to if not kan.ok else bound,
        "kan": kan.ok,
        "endpoint_pair_fibration": fib.ok,
        "endpoint_rlp_boundaries": [r.ok for r in rlp],
        "verified_up_to": D,
        "applicable": kan.ok,
        "ok": sec_ok and (not kan.ok or (fib.ok and all(r.ok for r in rlp))),
    }
