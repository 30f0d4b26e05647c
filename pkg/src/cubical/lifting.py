"""Open boxes, fillers, and bounded Kan and fibration checks.

All checks stop at an explicit dimension bound ``D`` and say so in their
reports; a truncated search never certifies fibrancy in all dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    BudgetExceeded, CoreError, CubeRef, CubicalMap, DEFAULT_BUDGET, FiniteCubicalSet,
    face_keys, open_box, search_maps,
)

__all__ = ["OpenBoxMap", "LiftingProblem", "LiftReport", "IncompatibleFaces",
           "find_filler", "enumerate_open_boxes", "iter_open_boxes", "iter_boundaries",
           "is_kan", "is_fibration", "has_rlp_boundaries", "find_lift", "box_shapes",
           "compatibility_violations", "open_boxes_by_maps", "iter_box_tuples"]


class IncompatibleFaces(CoreError):
    pass


def box_shapes(n: int):
    return [(n, i, e) for i in range(1, n + 1) for e in (0, 1)]


def compatibility_violations(X: FiniteCubicalSet, n: int, faces: dict) -> list[str]:
    """Pairs of assigned faces that disagree on their common codimension-two face.

    In an ``n``-cube ``w`` with ``j < k`` the identity
    ``w.d(k,t).d(j,s) = w.d(j,s).d(k-1,t)`` must hold.
    """
    out = []
    keys = sorted(faces)
    for (j, s) in keys:
        for (k, t) in keys:
            if j >= k:
                continue
            a = X.face(faces[(k, t)], j, s)
            b = X.face(faces[(j, s)], k - 1, t)
            if a != b:
                out.append(f"faces ({j},{s}) and ({k},{t}) disagree: {b} vs {a}")
    for key, r in faces.items():
        if r.dim != n - 1:
            out.append(f"face {key} has dimension {r.dim}, expected {n - 1}")
    return out


@dataclass
class OpenBoxMap:
    """A map from the open box missing face ``(i, e)`` of the ``n``-cube."""

    n: int
    i: int
    e: int
    faces: dict

    def __post_init__(self):
        want = set(face_keys(self.n)) - {(self.i, self.e)}
        if set(self.faces) != want:
            raise IncompatibleFaces(f"open box ({self.n},{self.i},{self.e}) needs faces {sorted(want)}")

    @property
    def shape(self):
        return (self.n, self.i, self.e)

    def face_tuple(self) -> tuple:
        return tuple(self.faces[k] for k in face_keys(self.n) if k != (self.i, self.e))

    def violations(self, X: FiniteCubicalSet) -> list[str]:
        return compatibility_violations(X, self.n, self.faces)

    def is_valid(self, X: FiniteCubicalSet) -> bool:
        return not self.violations(X)

    @classmethod
    def from_tuple(cls, n, i, e, tup):
        keys = [k for k in face_keys(n) if k != (i, e)]
        return cls(n, i, e, dict(zip(keys, tup)))


def find_filler(X: FiniteCubicalSet, box: OpenBoxMap, check: bool = True):
    """A cube (degenerate ones first) whose faces extend ``box``, or ``None``."""
    if check:
        bad = box.violations(X)
        if bad:
            raise IncompatibleFaces(bad[0])
    pool = X.partial_face_index(box.n, box.i, box.e).get(box.face_tuple(), ())
    for w in pool:
        # recheck against the data, not just the index
        if all(X.face(w, j, s) == r for (j, s), r in box.faces.items()):
            return w
    return None


def _prefix_index(X: FiniteCubicalSet, m: int, k: int, skip) -> dict:
    """Index ``m``-cubes by their faces ``(j, s)`` for ``j < k``, leaving out ``skip``."""
    key = ("prefix", m, k, skip)
    hit = X._partial_index.get(key)
    if hit is None:
        hit = {}
        positions = [p for p, fk in enumerate(face_keys(m)) if fk[0] < k and fk != skip]
        for faces, refs in X.face_index(m).items():
            hit.setdefault(tuple(faces[p] for p in positions), []).extend(refs)
        X._partial_index[key] = hit
    return hit


def _iter_face_families(X: FiniteCubicalSet, n: int, missing, budget):
    """Yield compatible assignments of the ``(n-1)``-faces except ``missing``.

    Faces are chosen in the order ``(1,0), (1,1), (2,0), ...``.  A face
    ``(k, t)`` must agree with every chosen face ``(j, s)``, ``j < k``, and
    those agreements fix exactly its own faces ``(j, s)`` for ``j < k``.
    """
    keys = [k for k in face_keys(n) if k != missing]
    counter = [0]
    if n == 1:
        for v in X.materialize(0):
            if len(keys) == 1:
                yield (v,)
            else:
                for w in X.materialize(0):
                    yield (v, w)
        return
    pos_of = {k: p for p, k in enumerate(keys)}
    chosen = [None] * len(keys)
    plan = []
    for (k, t) in keys:
        # inside the face (k, t), the chosen face (j, s) with j < k shows up as its face (j, s)
        sub_skip = missing if missing is not None and missing[0] < k else None
        need = [js for js in face_keys(n - 1) if js[0] < k and js != sub_skip]
        need = [pos_of[js] for js in need]
        plan.append((len(plan), _prefix_index(X, n - 1, k, sub_skip), need, 2 * (k - 1) + t - 2))
    faces_of = X.faces_of

    def rec(pos):
        if pos == len(plan):
            yield tuple(chosen)
            return
        key, idx, need, slot = plan[pos]
        req = tuple(faces_of(chosen[js])[slot] for js in need)
        for cand in idx.get(req, ()):
            counter[0] += 1
            if budget is not None and counter[0] > budget:
                raise BudgetExceeded(f"open box enumeration exceeded {budget} steps")
            chosen[key] = cand
            yield from rec(pos + 1)
        chosen[key] = None

    yield from rec(0)


def iter_open_boxes(X: FiniteCubicalSet, n: int, i: int, e: int, budget=DEFAULT_BUDGET):
    for tup in _iter_face_families(X, n, (i, e), budget):
        yield OpenBoxMap.from_tuple(n, i, e, tup)


def iter_box_tuples(X: FiniteCubicalSet, n: int, i: int, e: int, budget=DEFAULT_BUDGET):
    """Open boxes as face tuples in ``face_keys`` order without ``(i, e)``."""
    return _iter_face_families(X, n, (i, e), budget)


def iter_boundaries(X: FiniteCubicalSet, n: int, budget=DEFAULT_BUDGET):
    """Compatible families of all ``2n`` faces, as tuples in ``face_keys`` order."""
    return _iter_face_families(X, n, None, budget)


def enumerate_open_boxes(X: FiniteCubicalSet, n: int, i: int, e: int, budget=DEFAULT_BUDGET):
    return list(iter_open_boxes(X, n, i, e, budget))


def open_boxes_by_maps(X: FiniteCubicalSet, n: int, i: int, e: int, budget=DEFAULT_BUDGET):
    """The same open boxes, found as cubical maps out of the open box subobject."""
    sub, inc = open_box(n, i, e)
    top = inc.target.nd(n)[0]
    face_id = {k: r.base for k, r in inc.target.faces[top].items()}
    out = []
    for a in search_maps(sub, X, budget=budget):
        out.append(OpenBoxMap(n, i, e, {k: a[c] for k, c in face_id.items() if k != (i, e)}))
    return out


@dataclass
class LiftReport:
    ok: bool
    verified_up_to: int
    checked: int = 0
    counterexample: object = None
    shape: tuple | None = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return f"holds (verified up to dimension {self.verified_up_to}, {self.checked} problems)"
        return f"fails at shape {self.shape}: {self.counterexample}"


def is_kan(X: FiniteCubicalSet, D: int, budget=DEFAULT_BUDGET) -> LiftReport:
    """Every open box of dimension ``1..D`` in ``X`` has a filler."""
    cache = X.__dict__.setdefault("_kan_reports", {})
    for d, rep in cache.items():
        if (rep.ok and d >= D) or (not rep.ok and rep.verified_up_to < D):
            return LiftReport(rep.ok, min(D, rep.verified_up_to), rep.checked, rep.counterexample,
                              rep.shape)
    rep = _kan_search(X, D, budget)
    cache[D] = rep
    return rep


def _kan_search(X, D, budget):
    checked = 0
    for n in range(1, D + 1):
        for shape in box_shapes(n):
            idx = X.partial_face_index(*shape)
            for tup in iter_box_tuples(X, *shape, budget=budget):
                checked += 1
                if tup not in idx:
                    return LiftReport(False, n - 1, checked, OpenBoxMap.from_tuple(*shape, tup), shape)
    return LiftReport(True, D, checked)


def is_fibration(p: CubicalMap, D: int, budget=DEFAULT_BUDGET) -> LiftReport:
    """Right lifting against open box inclusions of dimension ``1..D``."""
    X, Y = p.source, p.target
    checked = 0
    for n in range(1, D + 1):
        for shape in box_shapes(n):
            xi = X.partial_face_index(*shape)
            yi = Y.partial_face_index(*shape)
            for tup in iter_box_tuples(X, *shape, budget=budget):
                below = tuple(p(r) for r in tup)
                ys = yi.get(below, ())
                if not ys:
                    continue
                lifts = {p(w) for w in xi.get(tup, ())}
                for y in ys:
                    checked += 1
                    if y not in lifts:
                        return LiftReport(False, n - 1, checked,
                                          (OpenBoxMap.from_tuple(*shape, tup), y), shape)
    return LiftReport(True, D, checked)


def has_rlp_boundaries(p, D: int, budget=DEFAULT_BUDGET) -> LiftReport:
    """Right lifting against boundary inclusions of dimension ``0..D``.

    ``p`` is a map or a cubical set (meaning the map to the point).
    """
    if isinstance(p, FiniteCubicalSet):
        X = p
        if not X.nd(0):
            return LiftReport(False, -1, 1, "empty", (0,))
        checked = 1
        for n in range(1, D + 1):
            idx = X.face_index(n)
            for tup in iter_boundaries(X, n, budget):
                checked += 1
                if tup not in idx:
                    return LiftReport(False, n - 1, checked, dict(zip(face_keys(n), tup)), (n,))
        return LiftReport(True, D, checked)
    X, Y = p.source, p.target
    hit = {p(v) for v in X.materialize(0)}
    checked = 0
    for y in Y.materialize(0):
        checked += 1
        if y not in hit:
            return LiftReport(False, -1, checked, y, (0,))
    for n in range(1, D + 1):
        xi, yi = X.face_index(n), Y.face_index(n)
        for tup in iter_boundaries(X, n, budget):
            faces = dict(zip(face_keys(n), tup))
            lifts = {p(w) for w in xi.get(tup, ())}
            for y in yi.get(tuple(p(r) for r in tup), ()):
                checked += 1
                if y not in lifts:
                    return LiftReport(False, n - 1, checked, (faces, y), (n,))
    return LiftReport(True, D, checked)


@dataclass
class LiftingProblem:
    """A square ``p . top = bottom . i`` with ``i: A -> B`` mono and ``p: X -> Y``."""

    i: CubicalMap
    top: CubicalMap
    p: CubicalMap | None = None
    bottom: CubicalMap | None = None

    def violations(self) -> list[str]:
        out = []
        if not self.i.is_mono():
            out.append("left map is not a monomorphism")
        if self.p is not None:
            for a in self.i.source.all_ids():
                if self.p(self.top(a)) != self.bottom(self.i(a)):
                    out.append(f"square does not commute at {a!r}")
        return out


def find_lift(L: LiftingProblem, budget=DEFAULT_BUDGET, all_lifts: bool = False):
    """A diagonal ``B -> X`` for the square, or ``None`` (or all of them)."""
    bad = L.violations()
    if bad:
        raise CoreError(bad[0])
    B, X = L.i.target, L.top.target
    fixed = {L.i(a).base: L.top(a) for a in L.i.source.all_ids()}
    allowed = None
    if L.p is not None:
        def allowed(c, cand):
            return L.p(cand) == L.bottom(c)
    found = []
    for a in search_maps(B, X, fixed=fixed, allowed=allowed, budget=budget):
        m = CubicalMap(B, X, a)
        if m.check():
            raise CoreError("map search returned a non-natural assignment")
        if not all_lifts:
            return m
        found.append(m)
    return found if all_lifts else None
