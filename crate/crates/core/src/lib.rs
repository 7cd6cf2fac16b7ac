pub mod cli;
pub mod complex;
pub mod config;
pub mod error;
pub mod exact;
pub mod gamma;
pub mod kernel;
pub mod output;
pub mod quadrature;
pub mod rational;
pub mod series;
pub mod verify;
