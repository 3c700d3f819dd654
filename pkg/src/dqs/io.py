"""File formats: DQS surfaces, map bundles, forms, OBJ meshes.

The DQS format is UTF-8 JSON: {"vertices": [{"id", "color"}...],
"quads": [{"id", "bm", "wm", "bp", "wp", "rho": [re, im]}...]} with
dense ids and "b"/"w" colors.  An optional "basis" key stores homology
cycles as signed medial edge keys so that generated surfaces carry
their preferred meridian/longitude basis through pipelines.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError
from .calculus import DiamondForm
from .homology import Cycle, HomologyBasis, build_basis
from .surface import BLACK, WHITE, QuadComplex


def _require(cond, path, msg):
    if not cond:
        raise ParseError(path, msg)


def parse_dqs(text: str, name: str = "<dqs>"):
    """Parse a DQS document; returns (complex, basis-or-None)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(name, f"invalid JSON: {exc}") from None
    _require(isinstance(doc, dict), name, "top level must be an object")
    _require("vertices" in doc, name, "missing 'vertices'")
    _require("quads" in doc, name, "missing 'quads'")

    verts = doc["vertices"]
    _require(isinstance(verts, list), f"{name}:vertices", "must be an array")
    colors = {}
    for i, v in enumerate(verts):
        path = f"{name}:vertices[{i}]"
        _require(isinstance(v, dict), path, "must be an object")
        _require("id" in v and "color" in v, path, "needs 'id' and 'color'")
        _require(v["color"] in ("b", "w"), path, f"color {v['color']!r} not 'b' or 'w'")
        vid = v["id"]
        _require(isinstance(vid, int) and vid >= 0, path, "id must be a nonnegative integer")
        _require(vid not in colors, path, f"duplicate vertex id {vid}")
        colors[vid] = BLACK if v["color"] == "b" else WHITE
    _require(sorted(colors) == list(range(len(colors))), f"{name}:vertices",
             "vertex ids must be dense 0..n-1")

    quads_doc = doc["quads"]
    _require(isinstance(quads_doc, list), f"{name}:quads", "must be an array")
    quads = {}
    rho = {}
    for i, q in enumerate(quads_doc):
        path = f"{name}:quads[{i}]"
        _require(isinstance(q, dict), path, "must be an object")
        for key in ("id", "bm", "wm", "bp", "wp"):
            _require(key in q, path, f"missing '{key}'"
                     + (f" (quad id {q['id']})" if key != "id" and "id" in q else ""))
        qid = q["id"]
        _require(qid not in quads, path, f"duplicate quad id {qid}")
        _require("rho" in q, path, f"missing 'rho' (quad id {qid})")
        r = q["rho"]
        _require(isinstance(r, list) and len(r) == 2, f"{path}.rho",
                 f"rho of quad {qid} must be [re, im]")
        for v in (q["bm"], q["wm"], q["bp"], q["wp"]):
            _require(isinstance(v, int) and v in colors, path,
                     f"quad {qid} references unknown vertex {v}")
        quads[qid] = (q["bm"], q["wm"], q["bp"], q["wp"])
        rho[qid] = complex(float(r[0]), float(r[1]))
    _require(sorted(quads) == list(range(len(quads))), f"{name}:quads",
             "quad ids must be dense 0..n-1")

    cx = QuadComplex.build([colors[i] for i in range(len(colors))],
                           [quads[i] for i in range(len(quads))],
                           [rho[i] for i in range(len(quads))])
    basis = None
    if "basis" in doc:
        basis = _parse_basis(doc["basis"], cx, f"{name}:basis")
    return cx, basis


def _parse_basis(doc, cx, path):
    _require(isinstance(doc, dict) and "a" in doc and "b" in doc, path,
             "basis needs 'a' and 'b' cycle arrays")

    def cycles(key):
        out = []
        for i, edges in enumerate(doc[key]):
            cyc = []
            for e in edges:
                _require(isinstance(e, list) and len(e) == 3, f"{path}.{key}[{i}]",
                         "edge must be [quad, corner, sign]")
                q, corner, sign = e
                _require(0 <= q < cx.nq and 0 <= corner < 4 and sign in (1, -1),
                         f"{path}.{key}[{i}]", f"bad edge key {e}")
                cyc.append((4 * q + corner, sign))
            out.append(Cycle(tuple(cyc), f"{key}{i+1}"))
        return out
    return build_basis(cx, cycles("a"), cycles("b"))


def serialize_dqs(cx: QuadComplex, basis: HomologyBasis = None) -> str:
    doc = {
        "vertices": [{"id": i, "color": "b" if c == BLACK else "w"}
                     for i, c in enumerate(cx.colors)],
        "quads": [{"id": i, "bm": t[0], "wm": t[1], "bp": t[2], "wp": t[3],
                   "rho": [cx.rho[i].real, cx.rho[i].imag]}
                  for i, t in enumerate(cx.quads)],
    }
    if basis is not None and basis.g:
        doc["basis"] = {
            key: [[[e // 4, e % 4, s] for (e, s) in c.edges] for c in group]
            for key, group in (("a", basis.a), ("b", basis.b))
        }
    return json.dumps(doc)


# ---------------------------------------------------------------------------
# forms and functions


def serialize_oneform(omega: DiamondForm) -> str:
    values = [[q, [omega.black[q].real, omega.black[q].imag],
               [omega.white[q].real, omega.white[q].imag]]
              for q in range(len(omega.black))]
    return json.dumps({"type": "oneform-diamond", "values": values})


def parse_oneform(text: str, cx: QuadComplex, name: str = "<form>") -> DiamondForm:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(name, f"invalid JSON: {exc}") from None
    _require(doc.get("type") == "oneform-diamond", name,
             "type must be 'oneform-diamond'")
    black = np.zeros(cx.nq, complex)
    white = np.zeros(cx.nq, complex)
    for i, row in enumerate(doc.get("values", [])):
        _require(len(row) == 3, f"{name}:values[{i}]", "row must be [quad, black, white]")
        q, b, w = row
        _require(0 <= q < cx.nq, f"{name}:values[{i}]", f"unknown quad {q}")
        black[q] = complex(b[0], b[1])
        white[q] = complex(w[0], w[1])
    return DiamondForm(black, white)


def serialize_function(f) -> str:
    f = np.asarray(f, dtype=complex)
    return json.dumps({str(i): [f[i].real, f[i].imag] for i in range(len(f))})


def parse_function(text: str, cx: QuadComplex, name: str = "<function>") -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(name, f"invalid JSON: {exc}") from None
    out = np.zeros(cx.nv, complex)
    for k, v in doc.items():
        i = int(k)
        _require(0 <= i < cx.nv, name, f"unknown vertex {i}")
        out[i] = complex(v[0], v[1])
    return out


# ---------------------------------------------------------------------------
# map bundles


def parse_map_bundle(text: str, name: str = "<map>", loader=None):
    """Covering-map JSON: source/target as inline DQS objects or paths.

    Returns (source, target, vertex_map, source_basis, target_basis).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(name, f"invalid JSON: {exc}") from None
    for key in ("source", "target", "vertex_map"):
        _require(key in doc, name, f"missing '{key}'")

    def load_side(side):
        val = doc[side]
        if isinstance(val, str):
            if loader is None:
                raise ParseError(name, f"'{side}' is a path but no loader given")
            return parse_dqs(loader(val), val)
        return parse_dqs(json.dumps(val), f"{name}:{side}")

    source, sb = load_side("source")
    target, tb = load_side("target")
    vm = [0] * source.nv
    seen = set()
    for i, pair in enumerate(doc["vertex_map"]):
        _require(isinstance(pair, list) and len(pair) == 2, f"{name}:vertex_map[{i}]",
                 "entries must be [source, target]")
        s, t = pair
        _require(0 <= s < source.nv and 0 <= t < target.nv, f"{name}:vertex_map[{i}]",
                 f"bad pair {pair}")
        _require(s not in seen, f"{name}:vertex_map[{i}]", f"duplicate source vertex {s}")
        seen.add(s)
        vm[s] = t
    _require(len(seen) == source.nv, name, "vertex_map must cover every source vertex")
    return source, target, vm, sb, tb


def serialize_map_bundle(source: QuadComplex, target: QuadComplex, vertex_map,
                         source_basis=None, target_basis=None) -> str:
    return json.dumps({
        "source": json.loads(serialize_dqs(source, source_basis)),
        "target": json.loads(serialize_dqs(target, target_basis)),
        "vertex_map": [[i, int(t)] for i, t in enumerate(vertex_map)],
    })


# ---------------------------------------------------------------------------
# OBJ triangle meshes


def parse_obj(text: str, name: str = "<obj>"):
    """Wavefront OBJ subset: v and f records, triangles only."""
    verts = []
    faces = []
    for ln, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            _require(len(parts) >= 4, f"{name}:{ln}", "vertex needs 3 coordinates")
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [p.split("/")[0] for p in parts[1:]]
            _require(len(idx) == 3, f"{name}:{ln}", "faces must be triangles")
            faces.append(tuple(int(i) - 1 for i in idx))
    _require(len(verts) > 0 and len(faces) > 0, name, "no geometry found")
    return np.array(verts, dtype=float), faces


# ---------------------------------------------------------------------------
# divisors


def parse_divisor_string(terms: str):
    """Parse "v:3=-1,q:7=-2" into vertex and quad coefficient dicts."""
    from .riemann_roch import Divisor

    vc, qc = {}, {}
    if terms.strip():
        for tok in terms.split(","):
            tok = tok.strip()
            try:
                kind_id, coef = tok.split("=")
                kind, ident = kind_id.split(":")
                ident, coef = int(ident), int(coef)
            except ValueError:
                raise ParseError("<divisor>", f"bad term {tok!r}; use v:ID=C or q:ID=C")
            if kind == "v":
                vc[ident] = coef
            elif kind == "q":
                qc[ident] = coef
            else:
                raise ParseError("<divisor>", f"unknown kind {kind!r} in {tok!r}")
    return Divisor(vc, qc)
