//! Lattice statics for screw dislocations in the anti-plane triangular
//! lattice model: lattice complexes, bond-length 1-forms and Burgers
//! circuits, a periodic pair-potential energy, linear-elastic predictor
//! fields with truncated core correctors and a polygonal boundary
//! corrector, and Newton equilibration with stability certification.

pub mod elasticity;
pub mod energy;
pub mod error;
pub mod fit;
pub mod forms;
pub mod geometry;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod predictor;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::Vec2;

pub use elasticity::{
    corrector_on_bonds, dipole_field, grad_hat_y, hat_y, solve_boundary_corrector,
    BoundaryCorrector, DipoleField,
};
pub use energy::{make_psi_cos, make_psi_lin, EnergyModel, Potential};
pub use forms::{
    bond_length_form, boundary_circulation, cell_circulation, config_metrics, detect_cores,
    finite_difference, net_burgers, BondForm, Displacement, DislocationConfig,
};
pub use lattice::{
    build_ball, build_polygon, dist, hexagon_corners, Bond, Cell, CellAutomorphism,
    ConvexLatticePolygon, Dir, LatticeComplex, Orientation, Site, WindowKind,
};
pub use predictor::{
    assemble_predictor_infinite, assemble_predictor_polygon, compute_core_corrector,
    hat_displacement, residual_decay_data, truncate, CoreCorrector, SweepParameter, SweepSpec,
    SweepTable, TruncationParams,
};
pub use solver::{
    certify, dual_norm, global_instability_witness, min_eigenvalue, newton_correct,
    CertifyReport, CoreRecord, EquilibriumReport, InstabilityWitness, SolverOptions,
    StabilityVerdict,
};
