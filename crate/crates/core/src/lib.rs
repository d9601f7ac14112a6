pub mod attacks;
pub mod blackbox;
pub mod builtin;
pub mod cli;
pub mod discrim;
pub mod error;
pub mod funcspec;
pub mod qmat;
pub mod report;
pub mod tol;
