"""Stationary Bogoliubov-de Gennes laboratory on a magnetic lattice cell."""

from ._bdglab import (  # noqa: F401
    BdGState,
    Cocycle,
    FluxSector,
    Grid,
    Lattice,
    LowestMode,
    NormalState,
    PotentialOnGrid,
    SCFConfig,
    SCFResult,
    StabilityOperator,
    TcResult,
    Thermo,
    build_L,
    chern_number,
    cluster_labels,
    critical_temperature,
    fermi_occupation,
    laplacian_spectrum,
    lowest_eigenvalue,
    magnetic_laplacian,
    magnetic_translation,
    make_flux_sector,
    normal_state,
    sample_potential,
    scalar_f,
    scf_solve,
    self_consistency_residual,
    symmetric_gauge_potential,
)

__all__ = [name for name in dir() if not name.startswith("_")]
