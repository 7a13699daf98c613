pub mod catalog;
pub mod driver;
pub mod efflen;
pub mod gatekit;
pub mod graphset;
pub mod ports;
pub mod scatter;
