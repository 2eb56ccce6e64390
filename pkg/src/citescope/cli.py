"""Command-line front end: ``citescope env | factors | validate``.

Settings come from flags, from an optional ``--config`` file of
``key = value`` lines, and finally from built-in defaults; flags win over
the file. ``CITESCOPE_OUT`` supplies the output directory when neither sets
one. All requested files are rendered in memory first and only then written,
each through a temporary file and a rename, so a failing run leaves no
partial output.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .environment import DIRECTIONS, CITING, build_environment, cn_values, grand_total
from .errors import CitescopeError
from .export import (
    MapStyle,
    atomic_write,
    render_dot,
    render_graphml,
    render_loadings_csv,
    render_loadings_text,
    render_pajek,
    render_report,
    render_svg_map,
)
from .factors import KAISER, fit_factors
from .ingest import parse_matrix, parse_metadata, validate_matrix
from .simgraph import DIAGONAL_POLICIES, INCLUDE_SELF, build_graph, similarity_matrix

log = logging.getLogger("citescope")

ENV_FORMATS = ("pajek", "graphml", "dot", "svg", "report")
FACTOR_FORMATS = ("loadings", "report")
ALL_FORMATS = ("pajek", "graphml", "dot", "svg", "report", "loadings")

EXIT_OK = 0
EXIT_ERROR = 2


class UsageError(CitescopeError):
    pass


@dataclass
class RunConfig:
    matrix_path: str
    seed: str
    direction: str = CITING
    metadata_path: str | None = None
    threshold_fraction: float = 0.01
    suppression_threshold: float = 0.2
    diagonal_policy: str = INCLUDE_SELF
    components: int | str = 3
    display_cutoff: float = 0.1
    output_dir: str = "."
    formats: tuple[str, ...] = ()
    matrix_format: str = "auto"

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise UsageError(f"direction must be one of {', '.join(DIRECTIONS)}")
        for name in ("threshold_fraction", "suppression_threshold"):
            value = getattr(self, name)
            if not 0 <= value < 1:
                raise UsageError(f"{name} must lie in [0, 1), got {value}")
        if self.diagonal_policy not in DIAGONAL_POLICIES:
            raise UsageError(f"diagonal policy must be one of {', '.join(DIAGONAL_POLICIES)}")
        if self.components != KAISER and (not isinstance(self.components, int) or self.components < 1):
            raise UsageError(f"components must be a positive integer or 'kaiser', got {self.components!r}")
        if self.display_cutoff < 0:
            raise UsageError("cutoff must be non-negative")
        unknown = [f for f in self.formats if f not in ALL_FORMATS]
        if unknown:
            raise UsageError(f"unknown format {unknown[0]!r}; choose from {', '.join(ALL_FORMATS)}")


# flag dest / config key -> RunConfig field
_KEYS = {
    "matrix": "matrix_path",
    "matrix_format": "matrix_format",
    "meta": "metadata_path",
    "seed": "seed",
    "direction": "direction",
    "threshold": "threshold_fraction",
    "suppress": "suppression_threshold",
    "diagonal": "diagonal_policy",
    "components": "components",
    "cutoff": "display_cutoff",
    "out": "output_dir",
    "formats": "formats",
}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, values may be quoted."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(("#", "[")):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        else:
            value = re.sub(r"\s+#.*$", "", value)
        key = key.replace("-", "_")
        fieldname = _KEYS.get(key, key)
        if fieldname not in RunConfig.__dataclass_fields__:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[fieldname] = value
    return out


def _coerce(fieldname: str, value):
    if value is None or not isinstance(value, str):
        return value
    if fieldname in ("threshold_fraction", "suppression_threshold", "display_cutoff"):
        try:
            return float(value)
        except ValueError:
            raise UsageError(f"{fieldname}: not a number: {value!r}") from None
    if fieldname == "components":
        if value.strip().lower() == KAISER:
            return KAISER
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"components: expected an integer or 'kaiser', got {value!r}") from None
    if fieldname == "formats":
        return tuple(f.strip() for f in value.split(",") if f.strip())
    return value


def resolve_config(args: argparse.Namespace, default_formats: tuple[str, ...]) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for dest, fieldname in _KEYS.items():
        flag = getattr(args, dest, None)
        if flag is not None:
            values[fieldname] = flag
    if "output_dir" not in values and os.environ.get("CITESCOPE_OUT"):
        values["output_dir"] = os.environ["CITESCOPE_OUT"]
    values.setdefault("formats", default_formats)
    for required, flag in (("matrix_path", "--matrix"), ("seed", "--seed")):
        if not values.get(required):
            raise UsageError(f"{flag} is required (flag or config file)")
    return RunConfig(**{k: _coerce(k, v) for k, v in values.items()})


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", text).strip("-").lower() or "journal"


def _commit(outputs: dict[Path, str]) -> None:
    written = []
    try:
        for path, text in outputs.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            atomic_write(path, text)
            written.append(path)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def cmd_env(config: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    bad = [f for f in config.formats if f not in ENV_FORMATS]
    if bad:
        raise UsageError(f"format {bad[0]!r} is not produced by 'env'")

    matrix = parse_matrix(config.matrix_path, config.matrix_format)
    meta = parse_metadata(config.metadata_path) if config.metadata_path else []
    env = build_environment(matrix, config.seed, config.direction, config.threshold_fraction)
    geometry = cn_values(env)
    sim = similarity_matrix(env, config.diagonal_policy)
    graph = build_graph(env, sim, geometry, config.suppression_threshold)

    known = set(matrix.journals())
    for m in meta:
        if m.label not in known:
            log.warning("metadata label %r matches no matrix journal", m.label)

    stem = Path(config.output_dir) / f"{_slug(env.seed)}_{env.direction}"
    renderers = {
        "pajek": (".net", lambda: render_pajek(graph)),
        "graphml": (".graphml", lambda: render_graphml(graph)),
        "dot": (".dot", lambda: render_dot(graph)),
        "svg": (".svg", lambda: render_svg_map(graph, MapStyle())),
        "report": ("_report.csv", lambda: render_report(env, geometry, meta)),
    }
    outputs = {}
    for fmt in config.formats:
        suffix, render = renderers[fmt]
        outputs[Path(f"{stem}{suffix}")] = render()
    _commit(outputs)

    print(f"{env.direction} environment of {env.seed}", file=stdout)
    print(f"members: {env.size}", file=stdout)
    print(f"grand total: {grand_total(env)}", file=stdout)
    print(f"edges (cosine >= {config.suppression_threshold:g}): {len(graph.edges)}", file=stdout)
    print("top C/N:", file=stdout)
    top = sorted(geometry, key=lambda g: (-g.cn_percent, g.journal))[:5]
    width = max(len(g.journal) for g in top)
    for g in top:
        print(f"  {g.journal.ljust(width)}  {g.cn_percent:9.4f}", file=stdout)
    for path in outputs:
        print(f"wrote {path}", file=stdout)
    return EXIT_OK


def cmd_factors(config: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if config.direction != CITING:
        raise UsageError("factor analysis runs on citing patterns; use --direction citing")
    bad = [f for f in config.formats if f not in FACTOR_FORMATS]
    if bad:
        raise UsageError(f"format {bad[0]!r} is not produced by 'factors'")

    matrix = parse_matrix(config.matrix_path, config.matrix_format)
    meta = parse_metadata(config.metadata_path) if config.metadata_path else []
    env = build_environment(matrix, config.seed, config.direction, config.threshold_fraction)
    model = fit_factors(env, config.components)

    stem = Path(config.output_dir) / f"{_slug(env.seed)}_{env.direction}"
    text = render_loadings_text(model, config.display_cutoff, sort_rows=True)
    outputs = {}
    if "loadings" in config.formats:
        outputs[Path(f"{stem}_loadings.csv")] = render_loadings_csv(model, config.display_cutoff)
        outputs[Path(f"{stem}_loadings.txt")] = text
    if "report" in config.formats:
        outputs[Path(f"{stem}_report.csv")] = render_report(
            env, cn_values(env), meta, model, config.display_cutoff
        )
    _commit(outputs)

    stdout.write(text)
    for path in outputs:
        print(f"wrote {path}", file=stdout)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, stdout=None) -> int:
    stdout = stdout or sys.stdout
    matrix_path = args.matrix
    matrix_format = args.matrix_format or "auto"
    if args.config:
        values = read_config_file(args.config)
        matrix_path = matrix_path or values.get("matrix_path")
        matrix_format = args.matrix_format or values.get("matrix_format", "auto")
    if not matrix_path:
        raise UsageError("--matrix is required")
    matrix = parse_matrix(matrix_path, matrix_format)
    rows, cols = matrix.shape
    print(f"{rows} citing x {cols} cited journals, {int(matrix.counts.sum())} citations", file=stdout)
    report = validate_matrix(matrix)
    if not report:
        print("no issues", file=stdout)
    for line in report.lines():
        print(line, file=stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citescope",
        description="Cited/citing environments of a seed journal from a citation matrix.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats):
        p.add_argument("-q", "--quiet", action="store_true", help="only log warnings and errors")
        p.add_argument("--config", help="file of key = value settings (flags win)")
        p.add_argument("--matrix", help="citation matrix CSV (dense or citing,cited,count)")
        p.add_argument("--matrix-format", choices=("auto", "dense", "edges"))
        p.add_argument("--meta", help="metadata CSV with label,total_cites,impact_factor")
        p.add_argument("--seed", help="seed journal label")
        p.add_argument("--direction", choices=DIRECTIONS)
        p.add_argument("--threshold", help="inclusion threshold as a fraction of the seed total (default 0.01)")
        p.add_argument("--out", help="output directory (default $CITESCOPE_OUT or .)")
        p.add_argument("--formats", help=f"comma-separated subset of {','.join(formats)}")

    env = sub.add_parser("env", help="build an environment and write its map")
    common(env, ENV_FORMATS)
    env.add_argument("--suppress", help="minimum cosine for an edge (default 0.2)")
    env.add_argument("--diagonal", choices=DIAGONAL_POLICIES)

    fac = sub.add_parser("factors", help="varimax-rotated PCA of citing patterns")
    common(fac, FACTOR_FORMATS)
    fac.add_argument("--components", help="number of components or 'kaiser' (default 3)")
    fac.add_argument("--cutoff", help="blank loadings below this magnitude (default 0.1)")

    val = sub.add_parser("validate", help="check a matrix for empty rows/columns and one-axis labels")
    val.add_argument("-q", "--quiet", action="store_true")
    val.add_argument("--config")
    val.add_argument("--matrix")
    val.add_argument("--matrix-format", choices=("auto", "dense", "edges"))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "env":
            return cmd_env(resolve_config(args, ENV_FORMATS))
        return cmd_factors(resolve_config(args, ("loadings",)))
    except (CitescopeError, ValueError, OSError) as exc:
        print(f"citescope: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
