"""Triangulation of cubical sets and a small simplicial toolkit.

An ``m``-simplex of the triangulated ``n``-cube is a chain of ``m + 1``
vertices of ``[1]^n`` (weakly increasing).  A simplex of ``T X`` is a pair
``(chain, x)`` up to moving faces and degeneracies of ``x`` onto the chain.
Each class has exactly one member with ``x`` nondegenerate and the chain
moving in every coordinate, so the classes are found by reduction rather
than union-find.  Such a chain runs from the bottom vertex to the top one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .boxcat import LimitExceeded, mono_from_constants
from .core import CubicalMap, FiniteCubicalSet
from .groups import GroupPresentation, abelian_invariants, edge_presentation, pi1_presentation

__all__ = ["FiniteSimplicialSet", "SimplexRef", "triangulate", "Triangulation",
           "edge_path_presentation", "oracle_compare", "triangulate_map", "simplicial_identity_violations"]

MAX_DIM = 6


@dataclass(frozen=True)
class SimplexRef:
    """``base . s`` where ``s`` is the surjection ``[m] -> [k]`` given as a tuple."""

    base: str
    degen: tuple

    @property
    def dim(self) -> int:
        return len(self.degen) - 1

    @property
    def is_degenerate(self) -> bool:
        return len(set(self.degen)) != len(self.degen)


@dataclass
class FiniteSimplicialSet:
    name: str
    cells: dict
    faces: dict
    dim_of: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.dim_of:
            self.dim_of = {c: m for m, cs in self.cells.items() for c in cs}

    @property
    def max_dim(self) -> int:
        return max((m for m, cs in self.cells.items() if cs), default=-1)

    def nd(self, m: int) -> list:
        return list(self.cells.get(m, []))

    def counts(self) -> list:
        return [len(self.nd(m)) for m in range(self.max_dim + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** m * len(cs) for m, cs in self.cells.items())

    def ref(self, c: str) -> SimplexRef:
        return SimplexRef(c, tuple(range(self.dim_of[c] + 1)))

    def face(self, r: SimplexRef, i: int) -> SimplexRef:
        """``d_i`` of a possibly degenerate simplex."""
        s = r.degen
        rest = s[:i] + s[i + 1:]
        if len(set(rest)) == s[-1] + 1:
            return SimplexRef(r.base, rest)
        # the deleted index was the only one hitting s[i]
        j = s[i]
        inner = self.faces[r.base][j]
        return SimplexRef(inner.base, tuple(inner.degen[v if v < j else v - 1] for v in rest))

    def vertices(self, r: SimplexRef) -> list:
        out = []
        for i in range(r.dim + 1):
            v = r
            for _ in range(r.dim - i):
                v = self.face(v, v.dim)
            for _ in range(i):
                v = self.face(v, 0)
            out.append(v.base)
        return out

    def to_document(self) -> dict:
        cubes = {}
        for m in sorted(self.cells):
            entries = []
            for c in self.cells[m]:
                entry = {"id": c}
                if m:
                    entry["faces"] = {f"d{i}": {"base": r.base, "degen": list(r.degen)}
                                      for i, r in enumerate(self.faces[c])}
                entries.append(entry)
            cubes[str(m)] = entries
        return {"name": self.name, "simplices": cubes}


def simplicial_identity_violations(K: FiniteSimplicialSet, cap: int = 3) -> list:
    """``d_i d_j = d_(j-1) d_i`` for ``i < j`` on nondegenerate simplices."""
    out = []
    for m in range(2, min(cap, K.max_dim) + 1):
        for c in K.nd(m):
            r = K.ref(c)
            for j in range(m + 1):
                for i in range(j):
                    a = K.face(K.face(r, j), i)
                    b = K.face(K.face(r, i), j - 1)
                    if a != b:
                        out.append(f"{c}: d{i}d{j} != d{j - 1}d{i}")
    return out


def _bits(v: int, p: int) -> str:
    return "".join(str(v >> k & 1) for k in range(p))


class Triangulation:
    """``T X`` together with the reduction of arbitrary cells."""

    def __init__(self, X: FiniteCubicalSet, name: str | None = None):
        if X.max_dim > MAX_DIM:
            raise LimitExceeded(f"triangulation limited to dimension {MAX_DIM}")
        self.source = X
        cells: dict = {}
        faces: dict = {}
        for c in X.all_ids():
            p = X.dim_of[c]
            for chain in _strict_chains(p):
                cells.setdefault(len(chain) - 1, []).append(self._name(c, chain))
        self._pending = [(c, chain) for c in X.all_ids() for chain in _strict_chains(X.dim_of[c])]
        dim_of = {sid: m for m, ids in cells.items() for sid in ids}
        for c, chain in self._pending:
            m = len(chain) - 1
            if m == 0:
                continue
            sid = self._name(c, chain)
            faces[sid] = [self.cell(chain[:i] + chain[i + 1:], X.ref(c)) for i in range(m + 1)]
        for m in cells:
            cells[m].sort()
        self.space = FiniteSimplicialSet(name or f"T({X.name})", cells, faces, dim_of)

    def _name(self, c: str, chain) -> str:
        p = self.source.dim_of[c]
        if p == 0:
            return c
        return f"{c}[{'<'.join(_bits(v, p) for v in chain)}]"

    def cell(self, chain, x) -> SimplexRef:
        """The simplex ``(chain, x)`` for any cube ``x`` and weakly increasing chain."""
        X = self.source
        chain = tuple(chain)
        r = x
        while True:
            chain = tuple(r.epi.table[v] for v in chain)
            base = r.base
            p = X.dim_of[base]
            consts = {}
            for k in range(p):
                vals = {v >> k & 1 for v in chain}
                if len(vals) == 1:
                    consts[k + 1] = vals.pop()
            if not consts:
                break
            free = [k for k in range(p) if k + 1 not in consts]
            chain = tuple(sum(((v >> k & 1) << t) for t, k in enumerate(free)) for v in chain)
            mono = mono_from_constants(len(free), consts)
            r = X.act(X.ref(base), mono)
        strict = []
        degen = []
        for v in chain:
            if not strict or strict[-1] != v:
                strict.append(v)
            degen.append(len(strict) - 1)
        return SimplexRef(self._name(base, strict), tuple(degen))


def _strict_chains(p: int) -> list:
    """Strictly increasing chains from the bottom to the top vertex of ``[1]^p``."""
    if p == 0:
        return [(0,)]
    out = []
    full = (1 << p) - 1

    def rec(chain):
        last = chain[-1]
        if last == full:
            out.append(tuple(chain))
            return
        rest = full ^ last
        sub = rest
        while sub:
            rec(chain + [last | sub])
            sub = (sub - 1) & rest

    rec([0])
    return sorted(out)


def triangulate(X: FiniteCubicalSet, name: str | None = None) -> FiniteSimplicialSet:
    return Triangulation(X, name).space


def triangulate_map(f: CubicalMap, TX: Triangulation | None = None,
                    TY: Triangulation | None = None) -> dict:
    """``T f`` on nondegenerate simplices."""
    TX = TX or Triangulation(f.source)
    TY = TY or Triangulation(f.target)
    out = {}
    for c, chain in TX._pending:
        out[TX._name(c, chain)] = TY.cell(chain, f(c))
    return out


def edge_path_presentation(K: FiniteSimplicialSet, v: str) -> GroupPresentation:
    """Generators are nondegenerate edges; each 2-simplex gives ``d2 . d0 = d1``."""
    def edge_of(r):
        return None if r.is_degenerate else r.base

    ends = {e: (K.faces[e][1].base, K.faces[e][0].base) for e in K.nd(1)}

    def boundary_word(t):
        d0, d1, d2 = K.faces[t]
        return [(edge_of(d2), 1), (edge_of(d0), 1), (edge_of(d1), -1)]

    return edge_presentation(K.nd(0), K.nd(1), ends, K.nd(2), boundary_word, v,
                             "simplicial-edge-path")


def oracle_compare(X: FiniteCubicalSet, x: str) -> dict:
    """Abelianized fundamental group from cubes against the triangulation."""
    cub = abelian_invariants(pi1_presentation(X, x))
    K = triangulate(X)
    simp = abelian_invariants(edge_path_presentation(K, x))
    return {"cubical": cub, "simplicial": simp, "agree": cub == simp,
            "euler": (X.euler_characteristic(), K.euler_characteristic())}
