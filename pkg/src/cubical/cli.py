"""Command-line front end.

Cubical sets are read from JSON documents of the form::

    {"name": "circle",
     "cubes": {"0": [{"id": "v"}],
               "1": [{"id": "u", "faces": {"1,0": {"base": "v", "epi": []},
                                           "1,1": {"base": "v", "epi": []}}}]}}

``epi`` lists generator tokens such as ``"s1"`` or ``"g1-"`` in
composition order.  Anywhere a file is expected, ``@name`` picks a built-in
space: ``@point``, ``@circle``, ``@torus``, ``@cube:N``, ``@boundary:N``,
``@sphere:N``, ``@codisc:LABELS:N``, ``@nerve:ORDER:N``.

Exit codes: 0 success, 1 the property fails, 2 usage or parse error,
3 search budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import spaces
from .boxcat import BoxError, check_identities, format_word, parse_word, word_morphism
from .core import (
    BudgetExceeded, CoreError, CubeRef, CubicalMap, DEFAULT_BUDGET, FiniteCubicalSet,
    are_isomorphic, boundary, face_keys, open_box, representable,
)

__all__ = ["main", "run", "read_document", "write_document", "to_document", "from_document",
           "read_map", "map_to_document"]


class UsageError(Exception):
    pass


# -- documents ---------------------------------------------------------------------------

def _ref_doc(r: CubeRef) -> dict:
    return {"base": r.base, "epi": [str(g) for g in r.epi.word]}


def to_document(X: FiniteCubicalSet) -> dict:
    cubes = {}
    for n in sorted(X.cells):
        entries = []
        for c in X.cells[n]:
            entry = {"id": c}
            if n:
                entry["faces"] = {f"{i},{e}": _ref_doc(X.faces[c][(i, e)]) for (i, e) in face_keys(n)}
            entries.append(entry)
        cubes[str(n)] = entries
    return {"name": X.name, "cubes": cubes}


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise UsageError(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise UsageError(f"{where}: unknown keys {sorted(extra)}")


def _parse_ref(obj, dims: dict, face_dim: int, where: str) -> CubeRef:
    _check_keys(obj, ("base", "epi"), where)
    base = obj.get("base")
    if base not in dims:
        raise UsageError(f"{where}: unknown cube {base!r}")
    try:
        word = parse_word(obj.get("epi", []))
        epi = word_morphism(word, face_dim)
    except BoxError as err:
        raise UsageError(f"{where}: {err}") from err
    if epi.cod != dims[base] or not epi.is_surjective():
        raise UsageError(f"{where}: epi does not map dimension {face_dim} onto {dims[base]}")
    return CubeRef(base, epi)


def from_document(doc: dict) -> FiniteCubicalSet:
    _check_keys(doc, ("name", "cubes"), "document")
    cubes = doc.get("cubes")
    if not isinstance(cubes, dict):
        raise UsageError("document: 'cubes' must be an object")
    dims, cells, raw = {}, {}, {}
    for key, entries in cubes.items():
        try:
            n = int(key)
        except ValueError as err:
            raise UsageError(f"cubes: bad dimension {key!r}") from err
        for k, entry in enumerate(entries):
            _check_keys(entry, ("id", "faces"), f"cubes[{key}][{k}]")
            cid = entry.get("id")
            if not isinstance(cid, str) or cid in dims:
                raise UsageError(f"cubes[{key}][{k}]: missing or repeated id")
            dims[cid] = n
            cells.setdefault(n, []).append(cid)
            raw[cid] = entry.get("faces", {})
    faces = {}
    for cid, fs in raw.items():
        n = dims[cid]
        if n == 0:
            if fs:
                raise UsageError(f"{cid}: a vertex has no faces")
            continue
        want = {f"{i},{e}" for (i, e) in face_keys(n)}
        if set(fs) != want:
            raise UsageError(f"{cid}: faces must be exactly {sorted(want)}")
        faces[cid] = {}
        for (i, e) in face_keys(n):
            faces[cid][(i, e)] = _parse_ref(fs[f"{i},{e}"], dims, n - 1, f"{cid} face {i},{e}")
    try:
        return FiniteCubicalSet(doc.get("name", "X"), cells, faces)
    except CoreError as err:
        raise UsageError(f"invalid cubical set: {err}") from err


def builtin(spec: str) -> FiniteCubicalSet:
    parts = spec[1:].split(":")
    head, args = parts[0], parts[1:]
    try:
        if head == "point":
            from .core import point
            return point()
        if head == "circle":
            return spaces.circle()
        if head == "torus":
            return spaces.torus()
        if head == "cube":
            return representable(int(args[0]))
        if head == "boundary":
            return boundary(int(args[0]))[0]
        if head == "sphere":
            return spaces.sphere(int(args[0]))[0]
        if head == "codisc":
            return spaces.codiscrete(args[0], int(args[1]) if len(args) > 1 else 3)
        if head == "nerve":
            return spaces.group_nerve(int(args[0]), int(args[1]) if len(args) > 1 else 3)
    except (IndexError, ValueError) as err:
        raise UsageError(f"bad built-in space {spec!r}") from err
    raise UsageError(f"unknown built-in space {spec!r}")


def read_document(path: str) -> FiniteCubicalSet:
    if path.startswith("@"):
        return builtin(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read {path}: {err}") from err
    return from_document(doc)


def write_document(X: FiniteCubicalSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(to_document(X)))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def map_to_document(f: CubicalMap, source=None, target=None) -> dict:
    return {"source": source if source is not None else to_document(f.source),
            "target": target if target is not None else to_document(f.target),
            "assignment": {c: _ref_doc(f.assignment[c]) for c in f.source.all_ids()}}


def _space_arg(obj):
    if isinstance(obj, str):
        return read_document(obj)
    return from_document(obj)


def read_map(path: str, source: FiniteCubicalSet | None = None,
             target: FiniteCubicalSet | None = None) -> CubicalMap:
    """A map document: ``{"source", "target", "assignment"}``.

    ``source`` and ``target`` are documents or file names (``@`` built-ins
    allowed); they may be omitted when given on the command line.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read {path}: {err}") from err
    _check_keys(doc, ("source", "target", "assignment"), "map document")
    X = source or _space_arg(doc.get("source"))
    Y = target or _space_arg(doc.get("target"))
    asg = doc.get("assignment", {})
    if set(asg) != set(X.all_ids()):
        raise UsageError("map document must assign every nondegenerate source cube")
    out = {c: _parse_ref(asg[c], Y.dim_of, X.dim_of[c], f"assignment {c}") for c in X.all_ids()}
    f = CubicalMap(X, Y, out)
    bad = f.check()
    if bad:
        raise UsageError(f"map is not natural: {bad[0]}")
    return f


# -- output ----------------------------------------------------------------------------

class Out:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, text: str, data) -> None:
        if self.fmt == "json":
            sys.stdout.write(dumps(data))
        else:
            sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _box_text(box) -> str:
    parts = [f"{i},{e}={r}" for (i, e), r in sorted(box.faces.items())]
    return f"open box {box.shape}: " + " ".join(parts)


def _box_data(box) -> dict:
    return {"shape": list(box.shape),
            "faces": {f"{i},{e}": _ref_doc(r) for (i, e), r in sorted(box.faces.items())}}


# -- subcommands -----------------------------------------------------------------------

def cmd_validate(a, out):
    X = read_document(a.file)
    rep = X.validate(a.max_dim)
    out.emit("valid" if rep.ok else "\n".join(rep.violations),
             {"valid": rep.ok, "violations": rep.violations, "checked": rep.checked})
    return 0 if rep.ok else 1


def cmd_info(a, out):
    X = read_document(a.file)
    counts = X.counts()
    out.emit(f"name: {X.name}\ncounts: {' '.join(map(str, counts))}\n"
             f"euler: {X.euler_characteristic()}",
             {"name": X.name, "counts": counts, "euler": X.euler_characteristic()})
    return 0


def cmd_kan(a, out):
    from .lifting import is_kan, OpenBoxMap
    X = read_document(a.file)
    rep = is_kan(X, a.max_dim, a.budget)
    if rep.ok:
        out.emit(f"Kan up to dimension {a.max_dim} ({rep.checked} open boxes)",
                 {"kan": True, "verified_up_to": a.max_dim, "checked": rep.checked})
        return 0
    box = rep.counterexample
    out.emit(f"not Kan: no filler for {_box_text(box)}",
             {"kan": False, "verified_up_to": rep.verified_up_to, "counterexample": _box_data(box)})
    return 1


def cmd_fibration(a, out):
    from .lifting import is_fibration
    X, Y = read_document(a.source), read_document(a.target)
    f = read_map(a.mapfile, X, Y)
    rep = is_fibration(f, a.max_dim, a.budget)
    if rep.ok:
        out.emit(f"fibration up to dimension {a.max_dim} ({rep.checked} problems)",
                 {"fibration": True, "verified_up_to": a.max_dim, "checked": rep.checked})
        return 0
    box, y = rep.counterexample
    out.emit(f"not a fibration: {_box_text(box)} over {y} has no lift",
             {"fibration": False, "verified_up_to": rep.verified_up_to,
              "counterexample": _box_data(box), "below": _ref_doc(y)})
    return 1


def cmd_pi0(a, out):
    from .homotopy import pi0
    X = read_document(a.file)
    r = pi0(X)
    out.emit(str(r.count), {"count": r.count, "classes": r.classes})
    return 0


def cmd_pi1(a, out):
    from .groups import abelian_invariants, format_relation, pi1_presentation
    X = read_document(a.file)
    _need_vertex(X, a.base)
    P = pi1_presentation(X, a.base)
    data = {"generators": P.generators, "relations": [format_relation(r) for r in P.relations],
            "labels": P.labels}
    text = P.text().rstrip("\n")
    if a.abelianize:
        inv = abelian_invariants(P)
        data["abelian"] = {"rank": inv.rank, "torsion": inv.torsion}
        text += f"\nabelian: {inv}"
    out.emit(text, data)
    return 0


def _need_vertex(X, v):
    if v not in X.dim_of or X.dim_of[v] != 0:
        raise UsageError(f"{v!r} is not a vertex of {X.name}")


def cmd_pin(a, out):
    from .groups import NotKanUpToRequiredDimension, pi_n
    X = read_document(a.file)
    _need_vertex(X, a.base)
    try:
        G = pi_n(X, a.base, a.n, a.max_dim, budget=a.budget)
    except NotKanUpToRequiredDimension as err:
        sys.stderr.write(f"{err}\nhint: pi1 gives a presentation for sets that are not Kan\n")
        out.emit("not Kan", {"kan": False, "error": str(err)})
        return 1
    reps = [str(G.representative(k)) for k in range(G.order)]
    lines = [f"order: {G.order}", "elements: " + " ".join(reps)]
    if G.table is not None:
        lines += ["table:"] + [" ".join(map(str, row)) for row in G.table]
    lines.append("laws: " + ("ok" if G.axioms_hold() else "; ".join(G.violations)))
    out.emit("\n".join(lines), {"order": G.order, "representatives": reps, "table": G.table,
                                "inverse": G.inverse, "laws": G.axioms_hold(),
                                "violations": G.violations, "verified_up_to": G.verified_up_to})
    return 0 if G.axioms_hold() else 1


def cmd_tensor(a, out):
    from .tensor import Tensor
    X, Y = read_document(a.left), read_document(a.right)
    T = Tensor(X, Y).space
    write_document(T, a.output)
    out.emit(f"wrote {a.output}: counts {' '.join(map(str, T.counts()))}",
             {"output": a.output, "counts": T.counts()})
    return 0


def _inclusion(spec: str):
    """``bd:N``, ``box:N,I,E``, ``end:E`` or ``empty:N`` as a mono into a cube."""
    head, _, rest = spec.partition(":")
    try:
        if head == "bd":
            return boundary(int(rest))[1]
        if head == "box":
            n, i, e = (int(t) for t in rest.split(","))
            return open_box(n, i, e)[1]
        if head == "end":
            from .core import subcomplex
            return subcomplex(representable(1), [rest])[1]
        if head == "empty":
            from .core import empty
            box = representable(int(rest))
            return CubicalMap(empty(), box, {})
    except (ValueError, CoreError) as err:
        raise UsageError(f"bad inclusion {spec!r}: {err}") from err
    raise UsageError(f"unknown inclusion {spec!r} (use bd:N, box:N,I,E, end:E, empty:N)")


def cmd_pushout_product(a, out):
    from .tensor import pushout_product
    f, g = _inclusion(a.left), _inclusion(a.right)
    P, corner = pushout_product(f, g)
    data = {"source_counts": P.counts(), "target_counts": corner.target.counts(),
            "mono": corner.is_mono()}
    if a.compare:
        if a.compare.startswith("@") or ":" not in a.compare:
            raise UsageError("--compare expects an inclusion such as bd:3")
        from .core import is_iso_of_arrows
        data["iso"] = is_iso_of_arrows(corner, _inclusion(a.compare), a.budget) is not None
    if a.output:
        write_document(P, a.output)
    lines = [f"corner counts: {' '.join(map(str, P.counts()))}",
             f"target counts: {' '.join(map(str, corner.target.counts()))}"]
    if "iso" in data:
        lines.append(f"isomorphic to {a.compare}: {'yes' if data['iso'] else 'no'}")
    out.emit("\n".join(lines), data)
    return 0 if data.get("iso", True) else 1


def cmd_triangulate(a, out):
    from .triangulate import triangulate
    K = triangulate(read_document(a.file))
    with open(a.output, "w", encoding="utf-8") as fh:
        fh.write(dumps(K.to_document()))
    out.emit(f"wrote {a.output}: counts {' '.join(map(str, K.counts()))}",
             {"output": a.output, "counts": K.counts()})
    return 0


def cmd_h1(a, out):
    from .groups import abelian_invariants
    from .triangulate import edge_path_presentation, triangulate
    X = read_document(a.file)
    _need_vertex(X, a.base)
    inv = abelian_invariants(edge_path_presentation(triangulate(X), a.base))
    out.emit(str(inv), {"rank": inv.rank, "torsion": inv.torsion})
    return 0


def cmd_iso(a, out):
    X, Y = read_document(a.left), read_document(a.right)
    f = are_isomorphic(X, Y, a.budget)
    if f is None:
        out.emit("not isomorphic", {"isomorphic": False})
        return 1
    asg = {c: str(f.assignment[c]) for c in X.all_ids()}
    out.emit("isomorphic\n" + "\n".join(f"{c} -> {r}" for c, r in asg.items()),
             {"isomorphic": True, "assignment": asg})
    return 0


def _parse_faces(spec: str, X, n: int) -> dict:
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as err:
            raise UsageError(f"cannot read faces {spec}: {err}") from err
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise UsageError(f"bad faces JSON: {err}") from err
    faces = {}
    for key, ref in obj.items():
        try:
            i, e = (int(t) for t in key.split(","))
        except ValueError as err:
            raise UsageError(f"bad face key {key!r}") from err
        faces[(i, e)] = _parse_ref(ref, X.dim_of, n - 1, f"face {key}")
    return faces


def cmd_filler(a, out):
    from .lifting import IncompatibleFaces, OpenBoxMap, find_filler
    X = read_document(a.file)
    try:
        n, i, e = (int(t) for t in a.shape.split(","))
    except ValueError as err:
        raise UsageError("--shape expects n,i,e") from err
    faces = _parse_faces(a.faces, X, n)
    try:
        box = OpenBoxMap(n, i, e, faces)
        w = find_filler(X, box)
    except IncompatibleFaces as err:
        out.emit(f"incompatible faces: {err}", {"compatible": False, "error": str(err)})
        return 1
    if w is None:
        out.emit("no filler", {"compatible": True, "filler": None})
        return 1
    out.emit(f"filler: {w}", {"compatible": True, "filler": _ref_doc(w),
                              "missing_face": _ref_doc(X.face(w, i, e))})
    return 0


def cmd_les(a, out):
    from .groups import NotAFibration, les_report
    f = read_map(a.mapfile)
    _need_vertex(f.source, a.base)
    try:
        rep = les_report(f, a.base, a.n_max, a.max_dim, a.budget)
    except NotAFibration as err:
        sys.stderr.write(f"not a fibration: {err}\n")
        out.emit("not a fibration", {"fibration": False})
        return 1
    lines = [f"{k}: {v if v is not None else 'SKIPPED'}" for k, v in rep["orders"].items()]
    lines += [f"{nd['node']}: {nd['status']}" for nd in rep["nodes"]]
    lines.append("exact" if rep["ok"] else "violations: " + " ".join(rep["violations"]))
    data = {k: rep[k] for k in ("orders", "nodes", "skipped", "violations", "ok")}
    out.emit("\n".join(lines), data)
    return 0 if rep["ok"] else 1


def cmd_whitehead(a, out):
    from .groups import NotAFibration, whitehead_report
    f = read_map(a.mapfile)
    try:
        rep = whitehead_report(f, a.max_dim, a.n_max, a.budget)
    except NotAFibration as err:
        sys.stderr.write(f"not a fibration: {err}\n")
        out.emit("not a fibration", {"fibration": False})
        return 1
    lines = [f"{k}: {'iso' if v else 'not iso'}" for k, v in rep["iso"].items()]
    lines += [f"fiber over {k}: {'contractible' if v else 'not contractible'}"
              for k, v in rep["fibers_contractible"].items()]
    lines.append("consistent" if rep["consistent"] else "inconsistent")
    data = {k: rep[k] for k in ("iso", "fibers_contractible", "groups_iso",
                                "all_fibers_contractible", "consistent", "skipped")}
    out.emit("\n".join(lines), data)
    return 0 if rep["consistent"] else 1


def cmd_check_identities(a, out):
    rep = check_identities(a.max_dim)
    lines = [f"{fam}: {k}" for fam, k in rep["families"].items()]
    lines.append(f"checked {rep['checked']}, failures {len(rep['failures'])}")
    lines += [f"FAIL {fam}: {l} = {r} on dimension {d}" for fam, l, r, d in rep["failures"]]
    out.emit("\n".join(lines), {"checked": rep["checked"], "families": rep["families"],
                                "failures": [list(f) for f in rep["failures"]]})
    return 0 if not rep["failures"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubical", description="Finite cubical sets with connections.")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on search steps")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *args, **kw):
        q = sub.add_parser(name, **kw)
        for spec in args:
            flags, opts = spec
            q.add_argument(*flags, **opts)
        q.set_defaults(fn=fn)
        return q

    f = ((["file"], {}),)
    d = ((["--max-dim"], {"type": int, "required": True}),)
    base = ((["--base"], {"required": True}),)
    add("validate", cmd_validate, *f, (["--max-dim"], {"type": int, "default": None}))
    add("info", cmd_info, *f)
    add("kan", cmd_kan, *f, *d)
    add("fibration", cmd_fibration, (["source"], {}), (["target"], {}), (["mapfile"], {}), *d)
    add("pi0", cmd_pi0, *f)
    add("pi1", cmd_pi1, *f, *base, (["--abelianize"], {"action": "store_true"}))
    add("pin", cmd_pin, *f, *base, (["--n"], {"type": int, "required": True}),
        (["--max-dim"], {"type": int, "default": None}))
    add("tensor", cmd_tensor, (["left"], {}), (["right"], {}), (["-o", "--output"], {"required": True}))
    add("pushout-product", cmd_pushout_product, (["left"], {}), (["right"], {}),
        (["--compare"], {"default": None}), (["-o", "--output"], {"default": None}))
    add("triangulate", cmd_triangulate, *f, (["-o", "--output"], {"required": True}))
    add("h1", cmd_h1, *f, *base)
    add("iso", cmd_iso, (["left"], {}), (["right"], {}))
    add("filler", cmd_filler, *f, (["--shape"], {"required": True}), (["--faces"], {"required": True}))
    add("les", cmd_les, (["mapfile"], {}), *base, (["--n-max"], {"type": int, "default": 1}),
        (["--max-dim"], {"type": int, "default": None}))
    add("whitehead", cmd_whitehead, (["mapfile"], {}), *d, (["--n-max"], {"type": int, "default": 1}))
    add("check-identities", cmd_check_identities, (["--max-dim"], {"type": int, "default": 5}))
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    out = Out(a.format)
    try:
        return a.fn(a, out)
    except UsageError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except BudgetExceeded as err:
        sys.stderr.write(f"budget exceeded: {err}\n")
        return 3
    except (CoreError, BoxError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
