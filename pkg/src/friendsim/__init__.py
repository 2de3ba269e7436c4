"""Small exact quantum-state toolkit, stopping-time Monte Carlo and the
two-friend conditional-probability protocol."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.0.0"

from .qstate import (  # noqa: E402
    AnnihilatedStateError,
    DensityMatrix,
    DimensionError,
    InvariantError,
    Ket,
    Operator,
    basis,
    partial_trace,
    reduced_state,
    tensor,
)
from .protocol import ProtocolParams, conditional_posterior, fig1_sweep, prob_spin_down  # noqa: E402
from .monogamy import Measure, ckw_check, monogamy_scan  # noqa: E402

__all__ = [
    "__version__",
    "AnnihilatedStateError",
    "DensityMatrix",
    "DimensionError",
    "InvariantError",
    "Ket",
    "Operator",
    "basis",
    "partial_trace",
    "reduced_state",
    "tensor",
    "ProtocolParams",
    "conditional_posterior",
    "fig1_sweep",
    "prob_spin_down",
    "Measure",
    "ckw_check",
    "monogamy_scan",
]
