// SPDX-License-Identifier: Apache-2.0

//! Volumes of representations: exact lattice chains and cocycles, bounded
//! cocycles on circle groups, Lorentz-group normal forms, hyperbolic volume
//! functions, Dehn filling and a transfer for interval-exchange domains.

pub mod circle;
pub mod dehn;
pub mod error;
pub mod hypvol;
pub mod lattice;
pub mod lorentz;
pub mod rational;
pub mod special;
pub mod transfer;

pub use circle::{
    higher_rotation_number, integrality_audit, kappa_cocycle, o2_reduction, Angle, AuditReport,
    O2Element, O2Reduction, PairingValue, TorusCochain, TorusElement, TorusHom,
};
pub use error::{ChainError, CircleError, DehnError, Error, HypVolError, LorentzError, ParseError, TransferError};
pub use lattice::{
    euclidean_volume_cocycle, fundamental_cycle, CochainValue, LatticeChain, LatticeCochain,
    LatticePoint, Simplex, ValueKind,
};
pub use lorentz::{
    a_gen, classify, common_invariant_structure, decompose_p, m_gen, n_gen, ConjugacyCase,
    ConjugacyKind, IsometryClass, IsometryKind, LorentzMatrix,
};
pub use dehn::{FillingPath, GluingSystem, Solution};
pub use hypvol::HPoint;
pub use rational::Q;
pub use transfer::{
    bad_domain, retract, transfer_cochain, translate_overlap_count, IntervalDomain, IntervalSet,
    Quadrature, TransferResult,
};
