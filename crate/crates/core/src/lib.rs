pub mod blowup;
pub mod compact;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod flow;
pub mod ode;
pub mod par;
pub mod pde;
pub mod portrait;
pub mod wave;
