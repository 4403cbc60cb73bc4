//! Complex linear algebra and quantum primitives.

pub mod channel;
pub mod matrix;
pub mod norms;
pub mod ops;
pub mod state;

pub use channel::{
    apply_choi_on_first_factor, apply_from_choi, choi_of_dephasing, choi_of_map,
    choi_of_measurement, choi_of_unitary, unitary_channel, vn_measure_channel, vn_measure_map,
    ChoiMatrix,
};
pub use matrix::{CMatrix, C64};
pub use norms::{abs_hermitian, operator_norm, trace_norm, HermitianEigen};
pub use ops::{
    dephase, depolarize, kron, kron_all, max_entangled_projector, partial_trace, swap_operator,
    unvec, vec,
};
pub use state::{PureState, QState, Unitary, VonNeumannMeasurement};

pub const TAU_HERM: f64 = 1e-10;
pub const TAU_UNIT: f64 = 1e-10;
pub const TAU_TR: f64 = 1e-10;
pub const TAU_PSD: f64 = 1e-9;
pub const TAU_CPTP: f64 = 1e-9;
