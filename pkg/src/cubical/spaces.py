"""Small named cubical sets used throughout the test suite and the CLI.

Codiscrete sets and group nerves have nondegenerate cubes in every
dimension, so they are built as skeleta: ``codiscrete(S, N)`` holds every
labeling of dimension at most ``N``.  Open boxes of dimension at most ``N``
still fill, so the skeleton is Kan up to ``N``.
"""
from __future__ import annotations

import itertools

from .boxcat import BoxMorphism, make_generator, Face
from .core import (
    FiniteCubicalSet, boundary, extract, face_keys, quotient_by, representable,
)
from .tensor import Tensor

__all__ = ["codiscrete", "group_nerve", "circle", "torus", "sphere", "labeling_of"]


def _labeling_space(name: str, levels_fn, normalize, max_dim: int, label_name):
    levels = []
    for k in range(max_dim + 1):
        levels.append(sorted(set(levels_fn(k))))

    def face(lab, i, e):
        n = len(lab).bit_length() - 1
        t = make_generator(Face(i, e), n).table
        return normalize(tuple(lab[v] for v in t))

    def act_epi(lab, g):
        n = len(lab).bit_length() - 1
        t = make_generator(g, n + 1).table
        return normalize(tuple(lab[v] for v in t))

    X, _ = extract(name, levels, face, act_epi, label_name)
    return X


def _join(lab) -> str:
    parts = [str(s) for s in lab]
    if all(len(p) == 1 for p in parts):
        return "".join(parts)
    return "|".join(parts)


def codiscrete(points, max_dim: int = 3, name: str | None = None) -> FiniteCubicalSet:
    """Cubes are all vertex labelings ``{0,1}^n -> points``, for ``n <= max_dim``.

    Cube ids spell the labels in vertex-encoding order (bit ``k`` of the
    vertex index is coordinate ``k + 1``).
    """
    pts = list(points)

    def level(k):
        return itertools.product(pts, repeat=1 << k)

    return _labeling_space(name or f"codisc{len(pts)}", level, lambda t: t, max_dim, _join)


def group_nerve(order: int, max_dim: int = 3, name: str | None = None) -> FiniteCubicalSet:
    """Nerve of the cyclic group of the given order as a one-object groupoid.

    An ``n``-cube is a labeling ``h`` of the vertices by group elements taken
    up to left translation, normalized so that ``h(0) = 0``; the edge from
    ``u`` to ``w`` carries ``h(w) - h(u)``.
    """
    def normalize(t):
        z = t[0]
        return tuple((s - z) % order for s in t)

    def level(k):
        for rest in itertools.product(range(order), repeat=(1 << k) - 1):
            yield (0,) + rest

    return _labeling_space(name or f"nerveZ{order}", level, normalize, max_dim, _join)


def labeling_of(X: FiniteCubicalSet, ref) -> tuple:
    """Vertex labels of a cube, by vertex encoding."""
    return X.vertices_of(ref)


def sphere(n: int):
    """``box_n`` with its boundary collapsed: ``(space, projection, basepoint)``."""
    sub, inc = boundary(n)
    Q, proj, base = quotient_by(representable(n), inc, name=f"S{n}")
    return Q, proj, base


def circle() -> FiniteCubicalSet:
    """The cubical circle: one vertex ``v`` and one loop ``u``."""
    Q, _, base = sphere(1)
    loop = Q.nd(1)[0]
    return Q.relabel({base: "v", loop: "u"}, name="circle")


def torus() -> FiniteCubicalSet:
    S = circle()
    return Tensor(S, S, name="torus").space
