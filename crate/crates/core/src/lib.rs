pub mod error;
pub mod exactlin;
pub mod dga;
pub mod freealg;
pub mod homotopy;
pub mod koszul;
pub mod models;
pub mod scalar;
