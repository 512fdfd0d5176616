pub mod coefficients;
pub mod graded;
pub mod linalg;
pub mod ainf_core;
pub mod ainf_fun;
pub mod modules_yoneda;
pub mod transfer;
pub mod twisted;
pub mod fixtures;
pub mod fukaya_torus;
pub mod cli;
