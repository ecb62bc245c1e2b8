//! Fixtures shared by the criterion benches.

use torus_dirac::{GaugeField, Grid, TorusParams};

/// Default torus used by every bench.
pub fn torus() -> TorusParams {
    TorusParams::new(0.5, 2.0).expect("valid torus")
}

pub fn periodic(n: usize) -> Grid {
    Grid::periodic(n).expect("valid grid")
}

pub fn hermitizing_field() -> GaugeField {
    GaugeField::hermitizing(1.0)
}
