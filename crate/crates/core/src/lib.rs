pub mod cli;
pub mod components;
pub mod lp;
pub mod network;
pub mod oracle;
pub mod scenario;
pub mod thermo;
