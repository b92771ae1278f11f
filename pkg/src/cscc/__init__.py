"""cscc - 3D color codes and the transversal control-S gate on the truncated cube."""

__version__ = "0.1.0"

from cscc.complex_builder import (
    Bipartition,
    ColoredComplex,
    bipartition,
    build_cube,
    build_tetrahedral15,
    build_truncated_cube,
    validate,
)
from cscc.css_code import CssCode, LogicalBasis, assemble, logical_basis, project_z
from cscc.phase_polynomial import (
    induced_phase_polynomial,
    logical_action,
    preserves_codespace,
    statevector_logical_action,
)
from cscc.verify import oracle_crosscheck, run_fixture, verify_cs_protocol

__all__ = [
    "Bipartition",
    "ColoredComplex",
    "CssCode",
    "LogicalBasis",
    "assemble",
    "bipartition",
    "build_cube",
    "build_tetrahedral15",
    "build_truncated_cube",
    "induced_phase_polynomial",
    "logical_action",
    "logical_basis",
    "oracle_crosscheck",
    "preserves_codespace",
    "project_z",
    "run_fixture",
    "statevector_logical_action",
    "validate",
    "verify_cs_protocol",
]
