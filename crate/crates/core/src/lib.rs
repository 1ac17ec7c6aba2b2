pub mod algebra;
pub mod cli;
pub mod error;
pub mod gefp;
pub mod hfun;
pub mod ik;
pub mod oracle;
pub mod params;
pub mod report;
pub mod scalar;
pub mod verify;
