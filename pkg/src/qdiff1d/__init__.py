"""1D condensates with quantum-diffusive (k^2) loss: dissipative GP
evolution, dispersive-KPZ blow-up, dissipative soliton fronts, and the
Rydberg-polariton scattering calculation behind the model."""

from .fields import (
    ComplexField,
    Grid1D,
    GpState,
    NaturalUnits,
    RealField,
    RHO0,
    SOUND_SPEED,
    TAU,
    XI,
    derivative,
    gaussian_bump_state,
    make_grid,
    total_number,
)

__all__ = [
    "ComplexField",
    "Grid1D",
    "GpState",
    "NaturalUnits",
    "RealField",
    "RHO0",
    "SOUND_SPEED",
    "TAU",
    "XI",
    "derivative",
    "gaussian_bump_state",
    "make_grid",
    "total_number",
]

__version__ = "0.1.0"
