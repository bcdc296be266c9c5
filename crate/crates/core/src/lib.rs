pub mod addpoly;
pub mod cli;
pub mod cokernel;
pub mod edim;
pub mod field_tower;
pub mod linalg;
pub mod pgroup;
pub mod valgroup;
pub mod valuation;
