pub mod arith;
pub mod clifford;
pub mod error;
pub mod exec;
pub mod galois;
pub mod grid;
pub mod groupcoh;
pub mod linalg;
pub mod multiquad;
pub mod quadform;
pub mod twists;
pub mod universal;
