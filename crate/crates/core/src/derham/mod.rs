//! Differential forms, truncated de Rham complexes and the lattice model of
//! the de Rham complex of weak completions.

pub mod forms;

pub use forms::{d_poly, de_rham_complex, induced_map, infinitesimal_tower, infinitesimal_complex, DeRhamComplex, Form, FormKey};
pub mod rigid;

pub use rigid::{level_complex, rigid_report, rigid_tower, HolimCheck, RigidReport, torus_weights, RigidError, RigidParams, RigidPresentation, RigidTower};
