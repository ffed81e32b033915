pub mod cd;
pub mod digest;
pub mod dsl;
pub mod engine;
pub mod equiv;
pub mod fuzz;
pub mod grammar;
pub mod production;
pub mod randgen;
pub mod symbol;
pub mod transform;
pub mod validate;
