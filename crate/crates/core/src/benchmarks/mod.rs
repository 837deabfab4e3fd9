//! Benchmark objectives, cost models, control families and the offline oracle.

pub mod airfoil;
pub mod costs;
pub mod environment;
pub mod families;
pub mod functions;
pub mod oracle;

pub use airfoil::{make_airfoil_env, AirfoilData, AirfoilSurrogate, AirfoilTable};
pub use costs::CostModel;
pub use environment::{
    make_ackley_env, make_ackley_env_on, make_hartmann_env, make_levy_env, ObjectiveEnvironment, ACKLEY_HALF_WIDTH,
};
pub use families::{airfoil_family, synthetic_family};
pub use oracle::{compute_oracle, OracleSolution, OracleSpec};
