"""d-separation and do-calculus checks for cluster-DAGs that may contain cycles."""

from .cluster import ClusterDag, DsepQuery, enumerate_compatible, is_admissible, is_compatible
from .construction import minimal_compatible_graph, unfolded_graph
from .criterion import (
    cluster_d_connected,
    docalc_check,
    exists_directed_micro_path,
    oracle_cluster_d_connected,
)
from .cdag_io import export, parse_cdag, render

__all__ = [
    "ClusterDag",
    "DsepQuery",
    "cluster_d_connected",
    "docalc_check",
    "enumerate_compatible",
    "exists_directed_micro_path",
    "export",
    "is_admissible",
    "is_compatible",
    "minimal_compatible_graph",
    "oracle_cluster_d_connected",
    "parse_cdag",
    "render",
    "unfolded_graph",
]
