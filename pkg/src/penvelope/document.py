"""JSON scenario documents: schema validation and object construction.

A document looks like::

    {
      "version": 1,
      "name": "e2",
      "group": "cyclic(2)",
      "algebra": {"preset": "diagonal", "n": 2},
      "action": {"elements": {"g": {"domain": [["1", "0"]], "ambient": [["1","0"],["0","1"]]}}},
      "parameters": {"seed": 42, "samples": 1000}
    }

Scalars are strings such as ``"3/4"``, ``"-i"`` or ``"1/2+3/4i"`` (plain
integers are accepted too). Matrices are lists of rows and act on column
vectors of basis coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .exactlin import ZERO, DenseMatrix, GaussianRational, Subspace, parse_scalar
from .fingroup import Group, build, from_table
from .paction import GlobalAction, PartialAction, restrict
from .setaction import SetPAction, from_partial_permutations
from .staralg import (
    BlockRealization,
    StarAlgebra,
    diagonal_algebra,
    is_ideal,
    matrix_blocks,
    natural_realization,
    truncated_polynomial,
)

SUPPORTED_VERSIONS = (1,)
PRESETS = ("diagonal", "truncated_polynomial", "matrix_blocks")


class DocumentError(Exception):
    """Any problem with the input document (exit code 2)."""

    def __init__(self, message: str, diagnostics: list | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or [message]


# ---------------------------------------------------------------------------
# schema check (structure and literal syntax only)


class _Schema:
    def __init__(self):
        self.errors: list[str] = []

    def err(self, path: str, msg: str):
        self.errors.append(f"{path}: {msg}")

    def obj(self, v, path) -> bool:
        if not isinstance(v, dict):
            self.err(path, "expected an object")
            return False
        return True

    def scalar(self, v, path):
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            self.err(path, f"expected a scalar literal, got {json.dumps(v)}")
            return
        try:
            parse_scalar(v)
        except (ValueError, ZeroDivisionError) as exc:
            self.err(path, f"malformed scalar {v!r} ({exc})")

    def index(self, v, path):
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            self.err(path, "expected a non-negative integer")
            return False
        return True

    def vector(self, v, path):
        if not isinstance(v, list):
            self.err(path, "expected a list of scalars")
            return
        for k, x in enumerate(v):
            self.scalar(x, f"{path}[{k}]")

    def matrix(self, v, path):
        if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
            self.err(path, "expected a list of rows")
            return
        widths = {len(r) for r in v}
        if len(widths) > 1:
            self.err(path, "rows have different lengths")
        for k, r in enumerate(v):
            self.vector(r, f"{path}[{k}]")

    def vectors(self, v, path):
        if not isinstance(v, list):
            self.err(path, "expected a list of vectors")
            return
        for k, x in enumerate(v):
            self.vector(x, f"{path}[{k}]")

    def group(self, v, path):
        if isinstance(v, str):
            return
        if not self.obj(v, path):
            return
        if "table" not in v:
            self.err(path + ".table", "required")
            return
        t = v["table"]
        if not isinstance(t, list) or not all(isinstance(r, list) for r in t):
            self.err(path + ".table", "expected a list of rows")
            return
        for a, row in enumerate(t):
            for b, x in enumerate(row):
                self.index(x, f"{path}.table[{a}][{b}]")
        if "labels" in v and not (isinstance(v["labels"], list) and all(isinstance(x, str) for x in v["labels"])):
            self.err(path + ".labels", "expected a list of strings")

    def algebra(self, v, path):
        if not self.obj(v, path):
            return
        if "preset" in v:
            p = v["preset"]
            if p not in PRESETS:
                self.err(path + ".preset", f"unknown preset {p!r}")
            elif p == "matrix_blocks":
                s = v.get("sizes")
                if not isinstance(s, list) or not s or not all(
                        isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in s):
                    self.err(path + ".sizes", "expected a non-empty list of positive integers")
            else:
                n = v.get("n")
                if isinstance(n, bool) or not isinstance(n, int) or n < 1:
                    self.err(path + ".n", "expected a positive integer")
        else:
            if "dim" not in v:
                self.err(path + ".dim", "required")
            elif isinstance(v["dim"], bool) or not isinstance(v["dim"], int) or v["dim"] < 1:
                self.err(path + ".dim", "expected a positive integer")
            for key in ("structure", "involution"):
                if key not in v:
                    self.err(f"{path}.{key}", "required")
                    continue
                width = 4 if key == "structure" else 3
                entries = v[key]
                if not isinstance(entries, list):
                    self.err(f"{path}.{key}", "expected a list of sparse entries")
                    continue
                for k, e in enumerate(entries):
                    p = f"{path}.{key}[{k}]"
                    if not isinstance(e, list) or len(e) != width:
                        self.err(p, f"expected [{'i, j, k' if width == 4 else 'i, j'}, coefficient]")
                        continue
                    for x in e[:-1]:
                        self.index(x, p)
                    self.scalar(e[-1], p + f"[{width - 1}]")
            if "basis" in v and not (isinstance(v["basis"], list) and all(isinstance(x, str) for x in v["basis"])):
                self.err(path + ".basis", "expected a list of names")
        if "realization" in v:
            self.realization(v["realization"], path + ".realization")

    def realization(self, v, path):
        if v == "natural":
            return
        if not self.obj(v, path):
            return
        if not isinstance(v.get("blocks"), list):
            self.err(path + ".blocks", "required list of block sizes")
        imgs = v.get("images")
        if not isinstance(imgs, list):
            self.err(path + ".images", "required list of per-basis block matrices")
            return
        for i, per in enumerate(imgs):
            if not isinstance(per, list):
                self.err(f"{path}.images[{i}]", "expected a list of matrices")
                continue
            for b, m in enumerate(per):
                self.matrix(m, f"{path}.images[{i}][{b}]")

    def element_action(self, v, path):
        if not self.obj(v, path):
            return
        if "domain" not in v:
            self.err(path + ".domain", "required")
        else:
            self.vectors(v["domain"], path + ".domain")
        has = [k for k in ("ambient", "map") if k in v]
        if len(has) != 1:
            self.err(path, "exactly one of 'ambient' or 'map' is required")
        for k in has:
            self.matrix(v[k], f"{path}.{k}")

    def action(self, v, path):
        if not self.obj(v, path):
            return
        if "global" in v:
            if not self.obj(v["global"], path + ".global"):
                return
            for lab, m in v["global"].items():
                self.matrix(m, f"{path}.global.{lab}")
            if "ideal" not in v:
                self.err(path + ".ideal", "required with 'global'")
            else:
                self.vectors(v["ideal"], path + ".ideal")
        elif "elements" in v:
            if self.obj(v["elements"], path + ".elements"):
                for lab, e in v["elements"].items():
                    self.element_action(e, f"{path}.elements.{lab}")
        else:
            self.err(path, "expected 'elements' or 'global'")

    def family(self, v, path):
        if not self.obj(v, path):
            return
        for key in v:
            if key != "scale":
                self.err(f"{path}.{key}", "unknown family field")
        if "scale" in v and self.obj(v["scale"], path + ".scale"):
            for lab, c in v["scale"].items():
                self.scalar(c, f"{path}.scale.{lab}")

    def envelope(self, v, path):
        if not self.obj(v, path):
            return
        for key in ("algebra", "global", "embedding"):
            if key not in v:
                self.err(f"{path}.{key}", "required")
        if "algebra" in v:
            self.algebra(v["algebra"], path + ".algebra")
        if "global" in v and self.obj(v["global"], path + ".global"):
            for lab, m in v["global"].items():
                self.matrix(m, f"{path}.global.{lab}")
        if "embedding" in v:
            self.matrix(v["embedding"], path + ".embedding")

    def set_action(self, v, path):
        if not self.obj(v, path):
            return
        pts = v.get("points")
        if not isinstance(pts, list) or not all(isinstance(x, str) for x in pts):
            self.err(path + ".points", "required list of point names")
        maps = v.get("maps")
        if not isinstance(maps, dict):
            self.err(path + ".maps", "required object of partial maps")
            return
        for lab, m in maps.items():
            if not isinstance(m, dict) or not all(isinstance(x, str) for x in m.values()):
                self.err(f"{path}.maps.{lab}", "expected an object point -> point")

    def parameters(self, v, path):
        if not self.obj(v, path):
            return
        for key in ("seed", "samples"):
            if key in v:
                self.index(v[key], f"{path}.{key}")


def schema_check(doc: Any) -> list[str]:
    """Diagnostics for a parsed JSON document (empty when well formed)."""
    s = _Schema()
    if not s.obj(doc, "$"):
        return s.errors
    if "version" not in doc:
        s.err("$.version", "required")
    elif doc["version"] not in SUPPORTED_VERSIONS or isinstance(doc["version"], bool):
        s.err("$.version", f"unsupported version {doc['version']!r}")
    if "name" in doc and not isinstance(doc["name"], str):
        s.err("$.name", "expected a string")
    if "group" not in doc:
        s.err("$.group", "required")
    else:
        s.group(doc["group"], "$.group")
    has_alg = "algebra" in doc
    if has_alg:
        s.algebra(doc["algebra"], "$.algebra")
    if "action" in doc:
        if not has_alg:
            s.err("$.algebra", "required with 'action'")
        s.action(doc["action"], "$.action")
    if "family" in doc:
        s.family(doc["family"], "$.family")
    if "envelope" in doc:
        s.envelope(doc["envelope"], "$.envelope")
    if "set_action" in doc:
        s.set_action(doc["set_action"], "$.set_action")
    if "parameters" in doc:
        s.parameters(doc["parameters"], "$.parameters")
    unknown = set(doc) - {"version", "name", "description", "group", "algebra", "action", "family",
                          "envelope", "set_action", "parameters"}
    for key in sorted(unknown):
        s.err(f"$.{key}", "unknown field")
    return s.errors


# ---------------------------------------------------------------------------
# construction


@dataclass
class Scenario:
    name: str
    group: Group
    algebra: StarAlgebra | None = None
    action: PartialAction | None = None
    realization: BlockRealization | None = None
    family_spec: dict | None = None
    envelope: tuple | None = None
    set_action: SetPAction | None = None
    parameters: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {path}: {exc.msg} at line {exc.lineno}") from None


def _mat(rows) -> DenseMatrix:
    if not rows:
        raise DocumentError("empty matrix")
    return DenseMatrix([[parse_scalar(x) for x in r] for r in rows])


def _vecs(rows, dim: int, path: str) -> list[tuple]:
    out = []
    for k, r in enumerate(rows):
        if len(r) != dim:
            raise DocumentError(f"{path}[{k}]: expected {dim} entries, got {len(r)}")
        out.append(tuple(parse_scalar(x) for x in r))
    return out


def _group(node) -> Group:
    try:
        if isinstance(node, str):
            return build(node)
        return from_table(node["table"], node.get("labels"), node.get("name", ""))
    except ValueError as exc:
        raise DocumentError(f"$.group: {exc}") from None


def _algebra(node: dict, path: str) -> tuple[StarAlgebra, BlockRealization | None]:
    try:
        if "preset" in node:
            p = node["preset"]
            if p == "diagonal":
                alg = diagonal_algebra(node["n"])
                sizes = [1] * node["n"]
            elif p == "truncated_polynomial":
                alg = truncated_polynomial(node["n"])
                sizes = None
            else:
                alg = matrix_blocks(node["sizes"])
                sizes = node["sizes"]
        else:
            n = node["dim"]
            c = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
            for i, j, k, x in node["structure"]:
                _bounds(path + ".structure", n, i, j, k)
                c[i][j][k] = c[i][j][k] + parse_scalar(x)
            s = [[ZERO] * n for _ in range(n)]
            for i, j, x in node["involution"]:
                _bounds(path + ".involution", n, i, j)
                s[i][j] = s[i][j] + parse_scalar(x)
            alg = StarAlgebra(c, s, node.get("basis"))
            sizes = None
    except ValueError as exc:
        raise DocumentError(f"{path}: {exc}") from None
    real = None
    if "realization" in node:
        r = node["realization"]
        if r == "natural":
            if sizes is None:
                raise DocumentError(f"{path}.realization: 'natural' needs a diagonal or matrix_blocks preset")
            real = natural_realization(sizes)
        else:
            imgs = [[[[complex(parse_scalar(x)) for x in row] for row in m] for m in per] for per in r["images"]]
            try:
                real = BlockRealization(r["blocks"], imgs)
            except ValueError as exc:
                raise DocumentError(f"{path}.realization: {exc}") from None
    return alg, real


def _bounds(path, n, *idx):
    if any(i >= n for i in idx):
        raise DocumentError(f"{path}: index out of range for dimension {n}")


def _element(g: Group, label: str, path: str) -> int:
    try:
        return g.index(label)
    except KeyError:
        raise DocumentError(f"{path}: unknown group element {label!r}") from None


def _global_action(g: Group, alg: StarAlgebra, node: dict, path: str) -> GlobalAction:
    mats = [DenseMatrix.identity(alg.dim) for _ in range(g.order)]
    for lab, rows in node.items():
        m = _mat(rows)
        if m.rows != alg.dim or m.cols != alg.dim:
            raise DocumentError(f"{path}.{lab}: expected a {alg.dim}x{alg.dim} matrix")
        mats[_element(g, lab, f"{path}.{lab}")] = m
    return GlobalAction.from_matrices(g, alg, mats)


def _action(g: Group, alg: StarAlgebra, node: dict) -> PartialAction:
    n = alg.dim
    if "global" in node:
        beta = _global_action(g, alg, node["global"], "$.action.global")
        ideal = is_ideal(Subspace(n, _vecs(node["ideal"], n, "$.action.ideal")), alg)
        if not ideal:
            raise DocumentError(f"$.action.ideal: not an ideal (witness {ideal.witness})")
        try:
            return restrict(beta, ideal)
        except (ValueError, AssertionError) as exc:
            raise DocumentError(f"$.action: restriction failed: {exc}") from None
    elements = node["elements"]
    domains = [Subspace.full(n) if t == g.identity else None for t in range(g.order)]
    ambient: list = [DenseMatrix.identity(n) if t == g.identity else None for t in range(g.order)]
    direct: list = [None] * g.order
    for lab, e in elements.items():
        path = f"$.action.elements.{lab}"
        t = _element(g, lab, path)
        domains[t] = Subspace(n, _vecs(e["domain"], n, path + ".domain"))
        if "ambient" in e:
            m = _mat(e["ambient"])
            if m.rows != n or m.cols != n:
                raise DocumentError(f"{path}.ambient: expected a {n}x{n} matrix")
            ambient[t] = m
            direct[t] = None
        else:
            direct[t] = _mat(e["map"]) if e["map"] else DenseMatrix.zeros(n, 0)
            ambient[t] = None
    missing = [g.label(t) for t in range(g.order) if domains[t] is None]
    if missing:
        raise DocumentError(f"$.action.elements: missing group elements {', '.join(missing)}")
    maps = []
    for t in range(g.order):
        src = domains[g.inv(t)]
        if ambient[t] is not None:
            maps.append(DenseMatrix.from_columns([ambient[t].apply(b) for b in src.basis], n))
        else:
            maps.append(direct[t])
    try:
        return PartialAction(g, alg, tuple(domains), tuple(maps))
    except ValueError as exc:
        raise DocumentError(f"$.action: {exc}") from None


def _set_action(g: Group, node: dict) -> SetPAction:
    pts = tuple(node["points"])
    maps = [dict() for _ in range(g.order)]
    maps[g.identity] = {x: x for x in pts}
    for lab, m in node["maps"].items():
        t = _element(g, lab, f"$.set_action.maps.{lab}")
        for x, y in m.items():
            if x not in pts or y not in pts:
                raise DocumentError(f"$.set_action.maps.{lab}: unknown point")
        maps[t] = dict(m)
    try:
        return from_partial_permutations(g, pts, maps)
    except ValueError as exc:
        raise DocumentError(f"$.set_action: {exc}") from None


def load_scenario(doc: dict, name: str = "") -> Scenario:
    """Build every object a document describes. Raises DocumentError."""
    errors = schema_check(doc)
    if errors:
        raise DocumentError(errors[0], errors)
    g = _group(doc["group"])
    sc = Scenario(doc.get("name", name), g, raw=doc, parameters=dict(doc.get("parameters", {})))
    if "algebra" in doc:
        sc.algebra, sc.realization = _algebra(doc["algebra"], "$.algebra")
    if "action" in doc:
        sc.action = _action(g, sc.algebra, doc["action"])
        if sc.realization is not None and "global" in doc["action"]:
            # the restricted algebra lives on the ideal's canonical basis
            n = sc.algebra.dim
            basis = Subspace(n, _vecs(doc["action"]["ideal"], n, "$.action.ideal")).basis
            sc.realization = sc.realization.restrict(basis)
    if "family" in doc:
        sc.family_spec = doc["family"]
        for lab in doc["family"].get("scale", {}):
            _element(g, lab, f"$.family.scale.{lab}")
    if "envelope" in doc:
        env = doc["envelope"]
        balg, _ = _algebra(env["algebra"], "$.envelope.algebra")
        beta = _global_action(g, balg, env["global"], "$.envelope.global")
        emb = _mat(env["embedding"])
        if sc.algebra is not None and (emb.rows != balg.dim or emb.cols != sc.algebra.dim):
            raise DocumentError("$.envelope.embedding: wrong shape")
        sc.envelope = (beta, emb)
    if "set_action" in doc:
        sc.set_action = _set_action(g, doc["set_action"])
    return sc


def load(path: str | Path) -> Scenario:
    return load_scenario(read_json(path), Path(path).stem)


def scalar_json(x: GaussianRational) -> str:
    return str(x)


def matrix_json(m: DenseMatrix) -> list:
    return [[str(x) for x in row] for row in m.entries]
