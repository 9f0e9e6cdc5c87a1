//! Stroboscopic simulation of the periodically kicked central spin model.

pub mod axis;
pub mod dense;
pub mod dicke;
pub mod drive;
pub mod error;
mod exact;
pub mod floquet;
pub mod metrology;
pub mod observables;
pub mod oracle;
pub mod protocol;
pub mod report;
pub mod state;

pub use axis::Axis;
pub use drive::{DriveParams, SatelliteFields};
pub use error::{Result, SpinError};
pub use floquet::{apply_interaction, apply_kick, floquet_step, Checkpoint, FloquetOperator};
pub use observables::{Observation, Sign};
pub use metrology::{qfi_matrix, scaling_fit, QfiMatrix, QfiPoint, ScalingFit};
pub use oracle::{echo_prediction, hodtc_state_at, predicted_periods, EchoPrediction, OracleTime};
pub use protocol::{run_trajectory, sweep_grid, OrderParams, Quantity, SweepGrid, SweepSpec, Trajectory};
pub use state::{new_product_state, project_full_to_symmetric, Backend, BackendChoice, SpinState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
