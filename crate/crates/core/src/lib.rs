//! Measurement partitioning for second-quantized Hamiltonians: Jordan-Wigner
//! Pauli strings, a round-robin schedule of four-mode excitations built by
//! network-flow rounding, and certified commuting families.

pub mod baranyai;
pub mod fermion;
pub mod flow;
pub mod oracles;
pub mod partition;
pub mod pauli;

pub use baranyai::{
    build_schedule, pad_and_build, FlowEngine, Round, Schedule, ScheduleError, Subset4,
};
pub use fermion::{jw_excitation, jw_term, EncodingError, FermionicTerm};
pub use partition::{
    commuting_families, partition, CommutingFamily, HamiltonianCoefficients, PartitionError,
    ScheduleCache,
};
pub use pauli::{PauliError, PauliOp, PauliString, WeightedPauliString};
