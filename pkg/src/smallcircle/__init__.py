"""Exact small-circle loops that implement unitary gates as holonomies."""

from .errors import (
    DegenerateStart,
    DimensionError,
    EmptyInput,
    FixtureMismatch,
    InsufficientSteps,
    InvalidDirection,
    InvalidFrame,
    NoConvergence,
    NotAntiHermitian,
    NotHermitian,
    NotUnitary,
    OpenLoop,
    SmallCircleError,
    ZeroWinding,
)
from .holonomy import connection_numeric, holonomy_exact, holonomy_path_ordered
from .linalg import (
    expm_antihermitian,
    frobenius_norm,
    hermitian_eig,
    unitary_log_principal,
)
from .manifold import (
    ControlMatrix,
    loop_point,
    loop_speed,
    penalty,
    project,
    reference_frame,
    winding_profile,
)
from .synthesis import (
    analyze_gate,
    build_solution,
    enumerate_families,
    family_norm,
    optimal_solution,
)

__version__ = "0.1.0"
