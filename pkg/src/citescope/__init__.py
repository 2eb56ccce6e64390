"""citescope: journal citation environments, cosine maps and varimax PCA."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def fixture_path(name: str = "table3.csv") -> Path:
    """Path of a bundled data file (``table3.csv``, ``table1_2_meta.csv``, ...)."""
    return Path(str(resources.files(__name__).joinpath("data", name)))


from .environment import (  # noqa: E402
    Environment,
    NodeGeometry,
    build_environment,
    cn_values,
    pearson_r,
    self_cite_rate,
)
from .factors import FactorModel, fit_factors, loadings_table, principal_components, varimax_rotate  # noqa: E402
from .ingest import CitationMatrix, JournalMeta, parse_matrix, parse_metadata, validate_matrix  # noqa: E402
from .simgraph import SimilarityGraph, build_graph, cosine, similarity_matrix  # noqa: E402
from .export import write_graphml, write_pajek, write_report, write_svg_map  # noqa: E402
