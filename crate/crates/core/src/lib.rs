pub mod constants;
pub mod error;
pub mod quad;
pub mod special;
pub mod nonlinearity;
pub mod moser;
pub mod radial;
pub mod eigen;
pub mod mountain_pass;
pub mod cli;
