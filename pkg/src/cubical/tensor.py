"""Geometric product of finite cubical sets.

An ``n``-cube of ``X (x) Y`` is a class of cells ``(phi, x, y)`` with ``x``,
``y`` nondegenerate of dimensions ``p``, ``q`` and ``phi: [1]^n -> [1]^(p+q)``.
Degenerate arguments are absorbed into ``phi`` up front, so the only
identifications left are the face moves

    ((d (x) id) . phi', x, y) ~ (phi', x.d, y)

and their mirror on the second factor.  Classes are found by union-find.
"""
from __future__ import annotations

from functools import lru_cache

from .boxcat import (
    BoxMorphism, Face, canonical_word, compose, epis, format_word, hom_set,
    identity, make_generator, tensor as box_tensor,
)
from .core import (
    CoreError, CubeRef, CubicalMap, FiniteCubicalSet, NotMono, _UnionFind, extract,
    face_keys, induced_from_pushout, pushout, representable,
)

__all__ = ["Tensor", "geometric_product", "tensor_maps", "cylinder", "pushout_product",
           "cells_conjecture"]

MAX_CAP = 6


@lru_cache(maxsize=None)
def _left(alpha: BoxMorphism, q: int) -> BoxMorphism:
    return box_tensor(alpha, identity(q))


@lru_cache(maxsize=None)
def _right(p: int, beta: BoxMorphism) -> BoxMorphism:
    return box_tensor(identity(p), beta)


class Tensor:
    """``X (x) Y`` with the cell data behind each nondegenerate cube."""

    def __init__(self, X: FiniteCubicalSet, Y: FiniteCubicalSet, cap: int | None = None,
                 name: str | None = None):
        if cap is None:
            cap = max(X.max_dim, 0) + max(Y.max_dim, 0)
        if cap > MAX_CAP:
            from .boxcat import LimitExceeded
            raise LimitExceeded(f"product cap {cap} exceeds {MAX_CAP}")
        self.left, self.right, self.cap = X, Y, cap
        xo, yo = X._order, Y._order
        uf = _UnionFind()

        def key(cell):
            phi, b, c = cell
            return (not phi.is_identity(), phi.cod, phi.table, xo[b], yo[c])

        self._key = key
        self._uf = uf
        levels = []
        for n in range(cap + 1):
            cells = []
            for b in X.all_ids():
                p = X.dim_of[b]
                for c in Y.all_ids():
                    q = Y.dim_of[c]
                    for phi in hom_set(n, p + q):
                        cell = (phi, b, c)
                        uf.add(cell)
                        cells.append(cell)
            for b in X.all_ids():
                p = X.dim_of[b]
                if p == 0:
                    continue
                for (i, e) in face_keys(p):
                    fv = X.faces[b][(i, e)]
                    d = make_generator(Face(i, e), p)
                    for c in Y.all_ids():
                        q = Y.dim_of[c]
                        a1, a2 = _left(d, q), _left(fv.epi, q)
                        for phi in hom_set(n, p - 1 + q):
                            uf.union((compose(a1, phi), b, c), (compose(a2, phi), fv.base, c), key)
            for c in Y.all_ids():
                q = Y.dim_of[c]
                if q == 0:
                    continue
                for (i, e) in face_keys(q):
                    fv = Y.faces[c][(i, e)]
                    d = make_generator(Face(i, e), q)
                    for b in X.all_ids():
                        p = X.dim_of[b]
                        a1, a2 = _right(p, d), _right(p, fv.epi)
                        for phi in hom_set(n, p + q - 1):
                            uf.union((compose(a1, phi), b, c), (compose(a2, phi), b, fv.base), key)
            levels.append(sorted({uf.find(cl) for cl in cells}, key=key))

        def face(cell, i, e):
            phi, b, c = cell
            return uf.find((compose(phi, make_generator(Face(i, e), phi.dom)), b, c))

        def act_epi(cell, g):
            phi, b, c = cell
            return uf.find((compose(phi, make_generator(g, phi.dom + 1)), b, c))

        def name_of(cell):
            phi, b, c = cell
            if phi.is_identity():
                return f"{b}|{c}"
            return f"{b}|{c}@{format_word(canonical_word(phi))}"

        self.space, self._rep = extract(name or f"{X.name}(x){Y.name}", levels, face, act_epi,
                                        name_of)
        self.cells = {}
        for (n, cell), r in self._rep.items():
            if not r.is_degenerate:
                self.cells[r.base] = cell

    def cube_of(self, phi: BoxMorphism, x: CubeRef, y: CubeRef) -> CubeRef:
        """The class of ``(phi, x, y)`` for arbitrary cubes ``x``, ``y``."""
        phi2 = compose(box_tensor(x.epi, y.epi), phi)
        root = self._uf.find((phi2, x.base, y.base))
        return self._rep[(phi.dom, root)]

    def pair(self, x: CubeRef, y: CubeRef) -> CubeRef:
        """The cube ``x (x) y`` of dimension ``dim x + dim y``."""
        return self.cube_of(identity(x.dim + y.dim), x, y)

    def projection_onto_left(self, point_cube: str | None = None) -> CubicalMap:
        """``X (x) Y -> X``, defined when ``Y`` is connected to a point (collapse ``Y``)."""
        X = self.left
        out = {}
        for cid, (phi, b, c) in self.cells.items():
            p, q = X.dim_of[b], self.right.dim_of[c]
            proj = box_tensor(identity(p), epis(q, 0)[0])
            out[cid] = X.act(X.ref(b), compose(proj, phi))
        return CubicalMap(self.space, X, out)


def geometric_product(X: FiniteCubicalSet, Y: FiniteCubicalSet, cap: int | None = None,
                      name: str | None = None) -> Tensor:
    return Tensor(X, Y, cap, name)


def tensor_maps(f: CubicalMap, g: CubicalMap, source: Tensor | None = None,
                target: Tensor | None = None) -> CubicalMap:
    """``f (x) g`` between the given (or freshly built) products."""
    source = source or Tensor(f.source, g.source)
    target = target or Tensor(f.target, g.target, cap=max(source.cap,
                              max(f.target.max_dim, 0) + max(g.target.max_dim, 0)))
    out = {}
    for cid, (phi, b, c) in source.cells.items():
        out[cid] = target.cube_of(phi, f(b), g(c))
    return CubicalMap(source.space, target.space, out)


class Cylinder:
    """``X (x) box1`` with its two ends and the collapse back to ``X``."""

    def __init__(self, X: FiniteCubicalSet):
        self.base = X
        self.interval = representable(1)
        self.tensor = Tensor(X, self.interval, cap=max(X.max_dim, 0) + 1,
                             name=f"{X.name}(x)I")
        self.space = self.tensor.space
        I = self.interval
        self.ends = []
        for v in ("0", "1"):
            self.ends.append(CubicalMap(X, self.space,
                                        {c: self.tensor.pair(X.ref(c), I.ref(v)) for c in X.all_ids()}))
        self.collapse = self.tensor.projection_onto_left()

    @property
    def end0(self) -> CubicalMap:
        return self.ends[0]

    @property
    def end1(self) -> CubicalMap:
        return self.ends[1]

    def restrict_to(self, sub_inclusion: CubicalMap) -> list[str]:
        """Ids of cylinder cubes lying over a subobject ``A`` of ``X``."""
        keep = sub_inclusion.image_ids()
        return [cid for cid, (phi, b, c) in self.tensor.cells.items() if b in keep]


def cylinder(X: FiniteCubicalSet):
    """``(X (x) box1, end0, end1, collapse)``."""
    cyl = Cylinder(X)
    return cyl.space, cyl.end0, cyl.end1, cyl.collapse


def pushout_product(f: CubicalMap, g: CubicalMap):
    """``(corner source, corner map)`` for monos ``f: A -> B`` and ``g: X -> Y``."""
    if not f.is_mono() or not g.is_mono():
        raise NotMono("pushout products are formed from monomorphisms")
    A, B, X, Y = f.source, f.target, g.source, g.target
    cap = max(B.max_dim, 0) + max(Y.max_dim, 0)
    AX, BX = Tensor(A, X, cap), Tensor(B, X, cap)
    AY, BY = Tensor(A, Y, cap), Tensor(B, Y, cap)
    ida, idb = A.identity_map(), B.identity_map()
    idx, idy = X.identity_map(), Y.identity_map()
    a_g = tensor_maps(ida, g, AX, AY)
    f_x = tensor_maps(f, idx, AX, BX)
    P, jay, jbx = pushout(a_g, f_x, name=f"corner({B.name},{Y.name})")
    corner = induced_from_pushout(P, jay, jbx, tensor_maps(f, idy, AY, BY),
                                  tensor_maps(idb, g, BX, BY))
    return P, corner


def cells_conjecture(T: Tensor) -> dict:
    """Compare nondegenerate counts of ``X (x) Y`` with counts of nondegenerate pairs."""
    X, Y = T.left, T.right
    pairs = [0] * (T.cap + 1)
    for p, xs in X.cells.items():
        for q, ys in Y.cells.items():
            if p + q <= T.cap:
                pairs[p + q] += len(xs) * len(ys)
    got = [len(T.space.nd(n)) for n in range(T.cap + 1)]
    bad = [cid for cid, (phi, b, c) in T.cells.items() if not phi.is_identity()]
    return {"holds": got == pairs and not bad, "product_counts": got, "pair_counts": pairs,
            "non_identity_cells": bad}
