pub mod aprank;
pub mod avoid;
pub mod ballbox;
pub mod certify;
pub mod lattice;
pub mod sieve;
pub mod template;
pub mod words;
