//! Backlund transformations of constant-torsion curves: the single
//! transformation with real constant C, nonlinear superposition, and the
//! double transformation at a complex pair nu, conj(nu).

mod double;
mod single;

pub use double::{
    alpha_constant, case_a_double_bt, closed_double_bt, double_bt, double_bt_components,
    double_gauge, DoubleBt, DoubleBtComponents, DoubleBtSpec,
};
pub use single::{
    closed_single_bt_rod, displacement_scale, single_bt, superpose, BetaSource, Branch,
    ClosedSingleBt, SingleBtSpec,
};
