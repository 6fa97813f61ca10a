pub mod canon;
pub mod dual;
pub mod ged;
pub mod gen;
pub mod graph;
pub mod inject;
pub mod io;
pub mod lp;
pub mod metrics;
pub mod simplex;
pub mod tol;
