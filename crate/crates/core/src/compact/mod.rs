//! Compact schemes: the tabular solutions of Doolittle, Cholesky (in
//! Benoit's arrangement), Crout, Dwyer and Satterthwaite.

pub mod cholesky;
pub mod crout;
pub mod doolittle;
pub mod dwyer;
pub mod satterthwaite;
pub mod tableau;

pub use cholesky::{cholesky_factor, cholesky_solve, cholesky_squared, cholesky_squared_solve, replay_benoit, CholeskyFactors};
pub use crout::{crout_solve, replay_crout, CroutSolution};
pub use doolittle::{
    doolittle_back, doolittle_forward, doolittle_names, doolittle_refine, doolittle_solve, replay_doolittle,
    RefinementReport, RefinementStep,
};
pub use dwyer::{dwyer_single_division, replay_dwyer, DwyerSolution};
pub use satterthwaite::{improve_inverse, inverse, satterthwaite_factor, TripleFactorization};
pub use tableau::{Cell, Layout, Tableau, TableauRow};
