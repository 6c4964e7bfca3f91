pub mod dieudonne;
pub mod dvrmod;
pub mod error;
pub mod field;
pub mod filisoc;
pub mod filvect;
pub mod format;
pub mod hnfilt;
pub mod isoc;
pub mod linalg;
pub mod poly;
pub mod polycalc;
pub mod rational;
pub mod sampling;

pub use error::{Error, Result};
pub use polycalc::{ConcavePolygon, NewtonVector, Point, PolygonTriple};
pub use rational::Rational;
