pub mod bivar_poly;
pub mod curve_series;
pub mod divpoly;
pub mod qseries;
pub mod siegel;
pub mod unit_lattice;
