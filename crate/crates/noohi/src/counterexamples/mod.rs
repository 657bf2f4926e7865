//! Explicit examples: the nodal curve, wedges of glued curves, the interval G-set and the
//! Borel coset obstruction.

mod borel;
mod cyclotomic;
mod gluing;
mod interval;

pub use borel::{borel_obstruction, BorelReport};
pub use cyclotomic::{cyclotomic_setting, CyclotomicSetting};
pub use gluing::{nodal_complex, nodal_presentation, wedge_presentation, WedgeVertex};
pub use interval::{
    build_interval_gset, frobenius_obstruction, propagate, ContradictionReport, EvalPath, FrobeniusOutcome, Interval,
    IntervalGSet, Side,
};
