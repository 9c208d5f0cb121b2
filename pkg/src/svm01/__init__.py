"""Linear SVMs with the 0/1 loss and their convex relatives.

Modules:

- ``core``: data types, losses, objectives and metrics
- ``data_io``: dataset parsing, serialization and fixtures
- ``qp``: box-constrained dual QP solver, hard-margin and hinge SVMs
- ``duality_lab``: locally nice pair certification and enumeration
- ``admm01``: ADMM for the 0/1-loss SVM
- ``cccp_ramp``: CCCP for the ramp-loss SVM
- ``harness``: parameter sweeps and the command line
"""

from .core import (Dataset, DualPoint, Hyperparams, MarginPartition, PrimalPoint, Status,
                   dual_objective, hinge, margins, metrics, ramp, ramp_argmin, zeroone)
from .data_io import fixtures, gram, load_dataset, parse_sparse_lines, parse_sparse_text, serialize
from .qp import BoxQPSpec, QPSolution, solve_box_qp, solve_hard_margin, solve_hinge

__version__ = "0.1.0"

__all__ = [
    "BoxQPSpec", "Dataset", "DualPoint", "Hyperparams", "MarginPartition", "PrimalPoint",
    "QPSolution", "Status", "dual_objective", "fixtures", "gram", "hinge", "load_dataset",
    "margins", "metrics", "parse_sparse_lines", "parse_sparse_text", "ramp", "ramp_argmin", "serialize", "solve_box_qp",
    "solve_hard_margin", "solve_hinge", "zeroone",
]
