//! End-to-end procedures: the revival map, the inverse-channel pipeline, the
//! GAD region scan and the entanglement audits.

pub mod audit;
pub mod pipeline;
pub mod revival;
pub mod scan;

pub use audit::{
    ancilla_residual, conservation_audit, invariance_residuals, trajectory_audit, ConservationAudit,
    InvarianceResiduals, TrajectoryAudit,
};
pub use pipeline::{
    local_dilations, procedure2_channel_level, procedure2_residuals, procedure2_stinespring, PipelineStates,
    Procedure2Residuals,
};
pub use revival::{
    default_time_grid, evolve_pair, nonpositivity_search, procedure1_trajectory, revival_consistency, revival_map,
    single_revival_map, trace_preservation_defect, trajectory, ExceedingPair, Procedure1Config, Procedure1Report,
    TrajectoryPoint, INVERTIBILITY_THRESHOLD,
};
pub use scan::{classify_cell, gad_region_scan, item_seed, unit_axis, Cell, CellClass, RegionGrid, ScanConfig};
