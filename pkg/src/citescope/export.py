"""Serialization of matrices, maps, reports and loading tables.

Every ``render_*`` function returns the file text; the matching ``write_*``
writes it atomically (temporary file in the target directory, then rename).
Output is UTF-8 with LF line endings and is byte-identical for identical
inputs. Cosines are written with 6 decimals, shares with 9.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .environment import Environment, NodeGeometry, pearson_r
from .errors import ParseError
from .factors import FactorModel, loadings_table
from .ingest import CitationMatrix, JournalMeta, canonical_label
from .simgraph import Edge, SimilarityGraph

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
LABEL_POLICIES = ("always", "degree>=1", "none")
HAIRLINE = 0.5


def atomic_write(path: str | Path, text: str) -> Path:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _share(x: float) -> str:
    return f"{x:.9f}"


def _weight(x: float) -> str:
    return f"{x:.6f}"


# -- dense matrix -------------------------------------------------------------


def render_matrix_csv(m: CitationMatrix) -> str:
    rows = [[""] + list(m.cited_labels)]
    rows += [[label] + [str(int(c)) for c in counts] for label, counts in zip(m.citing_labels, m.counts)]
    return _csv_text(rows)


def write_matrix_csv(m: CitationMatrix, path: str | Path) -> Path:
    return atomic_write(path, render_matrix_csv(m))


# -- Pajek --------------------------------------------------------------------


def render_pajek(g: SimilarityGraph) -> str:
    ids = {label: i for i, label in enumerate(g.labels, start=1)}
    lines = [f"*Vertices {len(g.labels)}"]
    for label, i in ids.items():
        if '"' in label:
            raise ValueError(f"Pajek labels cannot contain double quotes: {label!r}")
        lines.append(f'{i} "{label}"')
    lines.append("*Edges")
    pairs = sorted((tuple(sorted((ids[e.a], ids[e.b]))), e.cosine) for e in g.edges)
    lines += [f"{a} {b} {_weight(w)}" for (a, b), w in pairs]
    return "\n".join(lines) + "\n"


def write_pajek(g: SimilarityGraph, path: str | Path) -> Path:
    return atomic_write(path, render_pajek(g))


_VERTEX = re.compile(r'\s*(\d+)\s+"([^"]*)"')


def parse_pajek(text: str) -> SimilarityGraph:
    """Read the subset of Pajek written by :func:`render_pajek` (plus unquoted labels)."""
    labels: dict[int, str] = {}
    edges = []
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        if stripped.startswith("*"):
            section = stripped.split()[0].lower()
            continue
        if section == "*vertices":
            match = _VERTEX.match(stripped)
            if match:
                vid, label = int(match.group(1)), match.group(2)
            else:
                parts = stripped.split()
                if len(parts) < 2 or not parts[0].isdigit():
                    raise ParseError(f"bad vertex line {stripped!r}", row=n)
                vid, label = int(parts[0]), parts[1]
            labels[vid] = label
        elif section in ("*edges", "*arcs"):
            parts = stripped.split()
            try:
                a, b = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) > 2 else 1.0
            except (IndexError, ValueError):
                raise ParseError(f"bad edge line {stripped!r}", row=n) from None
            if a not in labels or b not in labels:
                raise ParseError(f"edge refers to unknown vertex in {stripped!r}", row=n)
            edges.append(Edge(labels[min(a, b)], labels[max(a, b)], w))
        else:
            raise ParseError(f"line outside any section: {stripped!r}", row=n)
    order = tuple(labels[i] for i in sorted(labels))
    return SimilarityGraph(labels=order, edges=tuple(edges))


def read_pajek(path: str | Path) -> SimilarityGraph:
    return parse_pajek(Path(path).read_text(encoding="utf-8"))


# -- GraphML ------------------------------------------------------------------

def render_graphml(g: SimilarityGraph) -> str:
    ids = {label: f"n{i}" for i, label in enumerate(g.labels)}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<graphml xmlns="{GRAPHML_NS}">',
        '  <key id="label" for="node" attr.name="label" attr.type="string"/>',
        '  <key id="share_total" for="node" attr.name="share_total" attr.type="double"/>',
        '  <key id="share_excl_self" for="node" attr.name="share_excl_self" attr.type="double"/>',
        '  <key id="cn_percent" for="node" attr.name="cn_percent" attr.type="double"/>',
        '  <key id="cosine" for="edge" attr.name="cosine" attr.type="double"/>',
        '  <graph id="G" edgedefault="undirected">',
    ]
    for label in g.labels:
        out.append(f"    <node id={quoteattr(ids[label])}>")
        out.append(f'      <data key="label">{escape(label)}</data>')
        geo = g.geometry.get(label)
        if geo is not None:
            total = _share(geo.share_total)
            out.append(f'      <data key="share_total">{total}</data>')
            out.append(f'      <data key="share_excl_self">{_share(geo.share_excl_self)}</data>')
            # derived from the written share so re-emission is byte-stable
            out.append(f'      <data key="cn_percent">{100 * float(total):.7f}</data>')
        out.append("    </node>")
    pos = {label: i for i, label in enumerate(g.labels)}
    for e in sorted(g.edges, key=lambda e: tuple(sorted((pos[e.a], pos[e.b])))):
        a, b = sorted((e.a, e.b), key=pos.__getitem__)
        out.append(f"    <edge source={quoteattr(ids[a])} target={quoteattr(ids[b])}>")
        out.append(f'      <data key="cosine">{_weight(e.cosine)}</data>')
        out.append("    </edge>")
    out += ["  </graph>", "</graphml>"]
    return "\n".join(out) + "\n"


def write_graphml(g: SimilarityGraph, path: str | Path) -> Path:
    return atomic_write(path, render_graphml(g))


def parse_graphml(text: str) -> SimilarityGraph:
    ns = {"g": GRAPHML_NS}
    root = ET.fromstring(text)
    keys = {k.get("id"): k.get("attr.name") for k in root.findall("g:key", ns)}
    graph = root.find("g:graph", ns)
    if graph is None:
        raise ParseError("no <graph> element")

    def data(el):
        return {keys.get(d.get("key"), d.get("key")): (d.text or "") for d in el.findall("g:data", ns)}

    labels = []
    by_id = {}
    geometry = {}
    for node in graph.findall("g:node", ns):
        attrs = data(node)
        label = attrs.get("label", node.get("id"))
        by_id[node.get("id")] = label
        labels.append(label)
        if "share_total" in attrs and "share_excl_self" in attrs:
            geometry[label] = NodeGeometry(label, float(attrs["share_total"]), float(attrs["share_excl_self"]))
    edges = []
    for edge in graph.findall("g:edge", ns):
        attrs = data(edge)
        edges.append(Edge(by_id[edge.get("source")], by_id[edge.get("target")], float(attrs.get("cosine", "1"))))
    return SimilarityGraph(labels=tuple(labels), edges=tuple(edges), geometry=geometry)


def read_graphml(path: str | Path) -> SimilarityGraph:
    return parse_graphml(Path(path).read_text(encoding="utf-8"))


# -- DOT ----------------------------------------------------------------------


def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(g: SimilarityGraph) -> str:
    out = ["graph citescope {"]
    for label in g.labels:
        geo = g.geometry.get(label)
        if geo is None:
            out.append(f"  {_dot_id(label)};")
        else:
            out.append(
                f"  {_dot_id(label)} [share_total={_share(geo.share_total)}, "
                f"share_excl_self={_share(geo.share_excl_self)}];"
            )
    pos = {label: i for i, label in enumerate(g.labels)}
    for e in sorted(g.edges, key=lambda e: tuple(sorted((pos[e.a], pos[e.b])))):
        a, b = sorted((e.a, e.b), key=pos.__getitem__)
        w = _weight(e.cosine)
        out.append(f'  {_dot_id(a)} -- {_dot_id(b)} [weight={w}, label="{e.cosine:.2f}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def write_dot(g: SimilarityGraph, path: str | Path) -> Path:
    return atomic_write(path, render_dot(g))


# -- SVG map ------------------------------------------------------------------


@dataclass(frozen=True)
class MapStyle:
    width: float = 800.0
    height: float = 800.0
    ellipse_scale: float = 200.0
    edge_width_scale: float = 4.0
    label_policy: str = "always"

    def __post_init__(self):
        for name in ("width", "height", "ellipse_scale", "edge_width_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        policy = self.label_policy.replace("≥", ">=")
        if policy not in LABEL_POLICIES:
            raise ValueError(f"label_policy must be one of {LABEL_POLICIES}")
        object.__setattr__(self, "label_policy", policy)


def circular_layout(labels: Sequence[str], style: MapStyle) -> dict[str, tuple[float, float]]:
    """Clockwise from 12 o'clock around the canvas centre, in member order."""
    cx, cy = style.width / 2, style.height / 2
    radius = 0.38 * min(style.width, style.height)
    n = len(labels)
    out = {}
    for i, label in enumerate(labels):
        theta = 2 * math.pi * i / n
        out[label] = (cx + radius * math.sin(theta), cy - radius * math.cos(theta))
    return out


def _num(x: float) -> str:
    text = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def render_svg_map(
    g: SimilarityGraph,
    style: MapStyle | None = None,
    layout: str | Mapping[str, tuple[float, float]] = "circular",
) -> str:
    """SVG with one ellipse per node and one line per edge.

    Vertical radius follows ``share_total``, horizontal radius
    ``share_excl_self``; both are floored at a hairline so isolates and
    all-self-citing journals stay visible.
    """
    style = style or MapStyle()
    g.require_geometry()
    if isinstance(layout, str):
        if layout != "circular":
            raise ValueError(f"unknown layout {layout!r}")
        pos = circular_layout(g.labels, style)
    else:
        pos = {}
        for label in g.labels:
            if label not in layout:
                raise ValueError(f"no position for node {label!r}")
            x, y = layout[label]
            pos[label] = (float(x), float(y))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(style.width)}" '
        f'height="{_num(style.height)}" viewBox="0 0 {_num(style.width)} {_num(style.height)}">',
        '  <g class="edges" stroke="#7f7f7f" stroke-linecap="round">',
    ]
    for e in g.edges:
        (x1, y1), (x2, y2) = pos[e.a], pos[e.b]
        out.append(
            f'    <line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
            f'stroke-width="{_num(style.edge_width_scale * e.cosine)}">'
            f"<title>{escape(e.a)} - {escape(e.b)}: {_weight(e.cosine)}</title></line>"
        )
    out.append("  </g>")
    out.append('  <g class="nodes" fill="#9ecae1" fill-opacity="0.85" stroke="#08519c" stroke-width="0.5">')
    for label in g.labels:
        geo = g.geometry[label]
        x, y = pos[label]
        rx = max(style.ellipse_scale * geo.share_excl_self, HAIRLINE)
        ry = max(style.ellipse_scale * geo.share_total, HAIRLINE)
        out.append(
            f'    <ellipse cx="{_num(x)}" cy="{_num(y)}" rx="{_num(rx)}" ry="{_num(ry)}">'
            f"<title>{escape(label)}: {geo.cn_percent:.4f}%</title></ellipse>"
        )
    out.append("  </g>")
    if style.label_policy != "none":
        out.append('  <g class="labels" font-family="sans-serif" font-size="11" text-anchor="middle">')
        for label in g.labels:
            if style.label_policy == "degree>=1" and g.degree(label) == 0:
                continue
            x, y = pos[label]
            ry = max(style.ellipse_scale * g.geometry[label].share_total, HAIRLINE)
            out.append(f'    <text x="{_num(x)}" y="{_num(y + ry + 12)}">{escape(label)}</text>')
        out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg_map(
    g: SimilarityGraph,
    path: str | Path,
    style: MapStyle | None = None,
    layout: str | Mapping[str, tuple[float, float]] = "circular",
) -> Path:
    return atomic_write(path, render_svg_map(g, style, layout))


# -- report and loadings ------------------------------------------------------


def report_rows(
    geometry: Sequence[NodeGeometry],
    meta: Iterable[JournalMeta] = (),
) -> list[tuple[str, float | None, int | None, float]]:
    """(journal, impact_factor, total_cites, cn_percent), largest C/N first, ties by label."""
    by_label = {canonical_label(m.label): m for m in meta}
    rows = []
    for geo in geometry:
        m = by_label.get(geo.journal)
        rows.append(
            (
                geo.journal,
                m.impact_factor if m else None,
                m.total_cites if m else None,
                geo.cn_percent,
            )
        )
    rows.sort(key=lambda r: (-r[3], r[0]))
    return rows


def report_correlation(rows) -> float | None:
    """Pearson r of C/N against total cites over rows that have total cites; None if undefined."""
    pairs = [(r[2], r[3]) for r in rows if r[2] is not None]
    if len(pairs) < 2:
        return None
    x, y = zip(*pairs)
    if len(set(x)) < 2 or len(set(y)) < 2:
        return None
    return pearson_r(x, y)


def render_report(
    env: Environment,
    geometry: Sequence[NodeGeometry],
    meta: Iterable[JournalMeta] = (),
    factors: FactorModel | None = None,
    display_cutoff: float = 0.1,
) -> str:
    """CSV table of impact factor, total cites and C/N per member.

    When total cites are known for at least two members a ``pearson_r`` line
    follows the table; a fitted factor model adds a ``loadings`` section.
    """
    unknown = [g.journal for g in geometry if g.journal not in env.members]
    if unknown:
        raise ValueError(f"geometry for non-member {unknown[0]!r}")
    rows = report_rows(geometry, meta)
    table = [["journal", "impact_factor", "total_cites", "cn_percent"]]
    for journal, impact, cites, cn in rows:
        table.append(
            [
                journal,
                "" if impact is None else repr(float(impact)),
                "" if cites is None else str(cites),
                f"{cn:.6f}",
            ]
        )
    text = _csv_text(table)
    r = report_correlation(rows)
    if r is not None:
        text += "\n" + _csv_text([["pearson_r", f"{r:.6f}"]])
    if factors is not None:
        text += "\n" + _csv_text([["loadings"]]) + render_loadings_csv(factors, display_cutoff)
    return text


def write_report(
    env: Environment,
    geometry: Sequence[NodeGeometry],
    meta: Iterable[JournalMeta],
    path: str | Path,
    factors: FactorModel | None = None,
    display_cutoff: float = 0.1,
) -> Path:
    return atomic_write(path, render_report(env, geometry, meta, factors, display_cutoff))


def render_loadings_csv(model: FactorModel, display_cutoff: float = 0.1, sort_rows: bool = False) -> str:
    return _csv_text(loadings_table(model, display_cutoff, sort_rows))


def render_loadings_text(model: FactorModel, display_cutoff: float = 0.1, sort_rows: bool = False) -> str:
    table = loadings_table(model, display_cutoff, sort_rows)
    name_width = max(len(row[0]) for row in table)
    cell_width = max(7, *(len(c) for row in table for c in row[1:]))
    lines = []
    for row in table:
        cells = [row[0].ljust(name_width)] + [c.rjust(cell_width) for c in row[1:]]
        lines.append("  ".join(cells).rstrip())
    lines.append("")
    lines.append(f"variance explained: {100 * model.variance_explained_total:.1f}%")
    lines.append(f"iterations used: {model.iterations_used}" + ("" if model.converged else " (not converged)"))
    return "\n".join(lines) + "\n"
