pub mod abelian;
pub mod catalog;
pub mod cft;
pub mod gmodule;
pub mod group;
pub mod hrv;
pub mod mackey;
pub mod matrix;
pub mod ramification;
pub mod report;
pub mod system;
pub mod transfer;
