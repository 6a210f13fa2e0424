"""JSON graph documents: labelled vertices, edges and optional momenta.

All rationals are strings (``"3"``, ``"-7/2"``) so documents round-trip
without floating point.

    {
      "version": 1,
      "vertices": ["a", "b", "c"],
      "edges": [{"id": "e0", "tail": "a", "head": "b"}, ...],
      "momenta": {"dim": 1, "form": [["1"]], "p": {"a": ["1"], ...}},
      "y": [["1", "2", "3"]],
      "base": ["1", "1", "1"],
      "perturbation": [["0", "1/2", "0"], ...]
    }

Only ``vertices`` and ``edges`` are required.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .homology import MomentumNotConservedError, RationalMatrix
from .multigraph import Multigraph
from .symanzik import MomentumAssignment

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Malformed or inconsistent graph document."""


def parse_rational(text: Any, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError(f"{where}: expected a rational string, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"{where}: not a rational: {text!r}") from None


def rational_str(x: Fraction) -> str:
    return str(Fraction(x))


def _rational_list(xs: Any, where: str) -> list[Fraction]:
    if not isinstance(xs, list):
        raise DocumentError(f"{where}: expected a list")
    return [parse_rational(x, f"{where}[{i}]") for i, x in enumerate(xs)]


@dataclass(frozen=True)
class GraphDocument:
    labels: tuple[str, ...]
    edge_ids: tuple[str, ...]
    graph: Multigraph
    momenta: MomentumAssignment | None = None
    y: tuple[tuple[Fraction, ...], ...] = ()
    base: tuple[Fraction, ...] | None = None
    perturbation: RationalMatrix | None = None

    @classmethod
    def from_graph(cls, graph: Multigraph, momenta: MomentumAssignment | None = None, **extra) -> "GraphDocument":
        return cls(tuple(str(v) for v in range(graph.n)), tuple(f"e{i}" for i in range(graph.m)), graph, momenta, **extra)

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "version": FORMAT_VERSION,
            "vertices": list(self.labels),
            "edges": [
                {"id": eid, "tail": self.labels[t], "head": self.labels[h]}
                for eid, (t, h) in zip(self.edge_ids, self.graph.edges)
            ],
        }
        if self.momenta is not None:
            doc["momenta"] = {
                "dim": self.momenta.dim,
                "form": [[rational_str(x) for x in r] for r in self.momenta.form],
                "p": {lab: [rational_str(x) for x in pv] for lab, pv in zip(self.labels, self.momenta.p)},
            }
        if self.y:
            doc["y"] = [[rational_str(x) for x in point] for point in self.y]
        if self.base is not None:
            doc["base"] = [rational_str(x) for x in self.base]
        if self.perturbation is not None:
            doc["perturbation"] = self.perturbation.to_strings()
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def parse_document(data: Any) -> GraphDocument:
    """Validate and convert a decoded JSON object; raises :class:`DocumentError`."""
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DocumentError(f"unsupported document version {version!r}")
    labels = data.get("vertices")
    if not isinstance(labels, list) or not labels:
        raise DocumentError("'vertices' must be a nonempty list of labels")
    labels = [str(v) for v in labels]
    if len(set(labels)) != len(labels):
        raise DocumentError("vertex labels must be unique")
    index = {lab: i for i, lab in enumerate(labels)}
    raw_edges = data.get("edges")
    if not isinstance(raw_edges, list):
        raise DocumentError("'edges' must be a list")
    ids, edges = [], []
    for i, e in enumerate(raw_edges):
        if not isinstance(e, dict) or "tail" not in e or "head" not in e:
            raise DocumentError(f"edges[{i}] needs 'tail' and 'head'")
        tail, head = str(e["tail"]), str(e["head"])
        if tail not in index or head not in index:
            raise DocumentError(f"edges[{i}] refers to an unknown vertex")
        ids.append(str(e.get("id", f"e{i}")))
        edges.append((index[tail], index[head]))
    if len(set(ids)) != len(ids):
        raise DocumentError("edge ids must be unique")
    graph = Multigraph(len(labels), tuple(edges))

    momenta = None
    if data.get("momenta") is not None:
        momenta = _parse_momenta(data["momenta"], labels)
    y = tuple(tuple(_rational_list(point, f"y[{k}]")) for k, point in enumerate(data.get("y") or []))
    for k, point in enumerate(y):
        if len(point) != graph.m:
            raise DocumentError(f"y[{k}] has {len(point)} entries, graph has {graph.m} edges")
    base = None
    if data.get("base") is not None:
        base = tuple(_rational_list(data["base"], "base"))
        if len(base) != graph.m or any(v <= 0 for v in base):
            raise DocumentError("'base' must list one positive weight per edge")
    perturbation = None
    if data.get("perturbation") is not None:
        rows = data["perturbation"]
        if not isinstance(rows, list) or len(rows) != graph.m:
            raise DocumentError(f"'perturbation' must be a {graph.m}x{graph.m} matrix")
        parsed = [_rational_list(r, f"perturbation[{i}]") for i, r in enumerate(rows)]
        if any(len(r) != graph.m for r in parsed):
            raise DocumentError(f"'perturbation' must be a {graph.m}x{graph.m} matrix")
        perturbation = RationalMatrix(parsed, graph.m)
    return GraphDocument(tuple(labels), tuple(ids), graph, momenta, y, base, perturbation)


def _parse_momenta(raw: Any, labels: list[str]) -> MomentumAssignment:
    if not isinstance(raw, dict):
        raise DocumentError("'momenta' must be an object")
    dim = raw.get("dim", 1)
    if not isinstance(dim, int) or dim < 1:
        raise DocumentError("'momenta.dim' must be a positive integer")
    form_raw = raw.get("form", [[str(int(i == j)) for j in range(dim)] for i in range(dim)])
    if not isinstance(form_raw, list) or len(form_raw) != dim:
        raise DocumentError(f"'momenta.form' must be {dim}x{dim}")
    form = [_rational_list(r, f"momenta.form[{i}]") for i, r in enumerate(form_raw)]
    p_raw = raw.get("p")
    if not isinstance(p_raw, dict):
        raise DocumentError("'momenta.p' must map vertex labels to vectors")
    unknown = set(map(str, p_raw)) - set(labels)
    if unknown:
        raise DocumentError(f"'momenta.p' names unknown vertices {sorted(unknown)}")
    p = []
    for lab in labels:
        vec = _rational_list(p_raw.get(lab, ["0"] * dim), f"momenta.p[{lab}]")
        if len(vec) != dim:
            raise DocumentError(f"momenta.p[{lab}] must have {dim} entries")
        p.append(vec)
    try:
        return MomentumAssignment(tuple(map(tuple, p)), tuple(map(tuple, form)))
    except MomentumNotConservedError:
        raise DocumentError("momentum not conserved") from None
    except ValueError as exc:
        raise DocumentError(f"momenta: {exc}") from None


def load_document(path: str | Path) -> GraphDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_document(data)
