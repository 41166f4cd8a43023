"""Parallel reachability-based graph algorithms: SCC, connectivity, BCC and LE-lists."""
from .config import Params, VgcParams
from .graph import Graph, GraphError, build_csr, from_csr, symmetrize, transpose

__all__ = ["Graph", "GraphError", "Params", "VgcParams", "build_csr", "from_csr", "symmetrize", "transpose"]
