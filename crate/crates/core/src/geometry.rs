//! Torus metric, zweibeins, Christoffel symbols and the spin connection.
//!
//! Coordinates are ordered `(t, x, u)` where `x` is the angle around the tube
//! (radius `a`) and `u` the angle around the central circle (radius `c`).
//! The radius of the parallel through `x` is `R(x) = c + a cos x`.

use std::f64::consts::TAU;

use nalgebra::Matrix3;

use crate::error::{Error, Result};

/// Below this |R(x)| the frame is treated as degenerate.
pub const DEGENERATE_RADIUS: f64 = 1e-12;

/// Tube radius `a` and center-circle radius `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusParams {
    pub a: f64,
    pub c: f64,
}

impl TorusParams {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("tube radius a must be > 0, got {a}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("center radius c must be > 0, got {c}")));
        }
        if (c - a).abs() <= f64::EPSILON * a.max(c) {
            return Err(Error::InvalidParameter(format!("radii must differ (c != a), got a = c = {a}")));
        }
        Ok(Self { a, c })
    }

    /// Soft diagnostics. `c < a` is legal (the constrained branch of the
    /// superpotential produces it) but `R(x)` then vanishes somewhere.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.c <= self.a {
            out.push(format!(
                "c = {} <= a = {}: R(x) = c + a cos x changes sign near x = {:.6}",
                self.c,
                self.a,
                (-self.c / self.a).acos()
            ));
        }
        out
    }

    #[inline]
    pub fn radius(&self, x: f64) -> f64 {
        radius_profile(self, x)
    }

    /// dR/dx = -a sin x
    #[inline]
    pub fn radius_prime(&self, x: f64) -> f64 {
        -self.a * x.sin()
    }

    #[inline]
    pub fn radius_second(&self, x: f64) -> f64 {
        -self.a * x.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// Uniform 1-D grid.
///
/// Periodic grids hold `n` points `x_i = i h` with `h = 2π/n`. Dirichlet grids
/// hold `n` points including both endpoints (`h = (x_max - x_min)/(n - 1)`);
/// the endpoint values are pinned to zero by every discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub boundary: Boundary,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n: usize, x_min: f64, x_max: f64, boundary: Boundary) -> Result<Self> {
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidGrid(format!("need at least {} points, got {n}", Self::MIN_POINTS)));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if boundary == Boundary::Periodic && (x_min != 0.0 || (x_max - TAU).abs() > 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "periodic grids must span [0, 2π), got [{x_min}, {x_max})"
            )));
        }
        Ok(Self { n, x_min, x_max, boundary })
    }

    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 0.0, TAU, Boundary::Periodic)
    }

    pub fn dirichlet(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        Self::new(n, x_min, x_max, Boundary::Dirichlet)
    }

    pub fn spacing(&self) -> f64 {
        match self.boundary {
            Boundary::Periodic => (self.x_max - self.x_min) / self.n as f64,
            Boundary::Dirichlet => (self.x_max - self.x_min) / (self.n - 1) as f64,
        }
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Same grid with `n` replaced (used for refinement studies).
    pub fn with_points(&self, n: usize) -> Result<Self> {
        Self::new(n, self.x_min, self.x_max, self.boundary)
    }
}

/// Nonvanishing Christoffel symbols of the spatial torus metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelSet {
    /// Γ^u_{xu} = Γ^u_{ux}
    pub gamma_2_12: f64,
    /// Γ^x_{uu}
    pub gamma_1_22: f64,
}

impl ChristoffelSet {
    /// Full `Γ^λ_{μν}` table indexed `[λ][μ][ν]` over `(t, x, u)`.
    pub fn table(&self) -> [[[f64; 3]; 3]; 3] {
        let mut g = [[[0.0; 3]; 3]; 3];
        g[2][1][2] = self.gamma_2_12;
        g[2][2][1] = self.gamma_2_12;
        g[1][2][2] = self.gamma_1_22;
        g
    }
}

pub const MINKOWSKI: [f64; 3] = [1.0, -1.0, -1.0];

pub fn radius_profile(params: &TorusParams, x: f64) -> f64 {
    params.c + params.a * x.cos()
}

/// `diag(1, -a², -R(x)²)` in `(t, x, u)` order.
pub fn metric_at(params: &TorusParams, x: f64) -> Matrix3<f64> {
    let r = radius_profile(params, x);
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -params.a * params.a, -r * r))
}

/// Frame components `e^a_μ` (row = local index `a`, column = coordinate `μ`).
pub fn vierbein_at(params: &TorusParams, x: f64) -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, params.a, radius_profile(params, x)))
}

/// Rebuilds `g_{μν} = e^a_μ e^b_ν η_{ab}` from a frame.
pub fn metric_from_frame(frame: &Matrix3<f64>) -> Matrix3<f64> {
    let eta = Matrix3::from_diagonal(&nalgebra::Vector3::from(MINKOWSKI));
    frame.transpose() * eta * frame
}

/// Largest entry of `|g - e^T η e|`.
pub fn frame_identity_defect(params: &TorusParams, x: f64) -> f64 {
    (metric_at(params, x) - metric_from_frame(&vierbein_at(params, x))).abs().max()
}

pub fn christoffel_at(params: &TorusParams, x: f64) -> Result<ChristoffelSet> {
    let r = radius_profile(params, x);
    if r.abs() < DEGENERATE_RADIUS {
        return Err(Error::DegenerateGeometry { x, r });
    }
    let s = x.sin();
    Ok(ChristoffelSet { gamma_2_12: -params.a * s / r, gamma_1_22: r * s / params.a })
}

/// Coefficient of `γ₁γ₂` in the u-component of the spin connection as printed
/// for this model: `(a/2) R(x) sin x`.
pub fn spin_connection_paper(params: &TorusParams, x: f64) -> f64 {
    0.5 * params.a * radius_profile(params, x) * x.sin()
}

/// Coefficient of `γ₁γ₂` in `Γ_μ = ½ S^{ab} e_a^ν g_{ρν} D_μ e_b^ρ`, evaluated
/// from the frame and the Christoffel symbols for coordinate direction `mu`
/// (1 = x, 2 = u). Only the spatial generator `S^{12}` contributes.
///
/// With `S^{12} = ½γ^1γ^2` and `γ₁γ₂ = γ^1γ^2` the coefficient is
/// `½ e_{1ρ} D_μ e_2^ρ`.
pub fn spin_connection_component(params: &TorusParams, x: f64, mu: usize) -> Result<f64> {
    assert!(mu < 3, "coordinate index out of range");
    let gam = christoffel_at(params, x)?.table();
    let g = metric_at(params, x);
    let r = radius_profile(params, x);
    // inverse frame e_a^ν (diagonal)
    let inv = [1.0, 1.0 / params.a, 1.0 / r];
    // ∂_μ e_2^ρ: only e_2^u = 1/R depends on x
    let mut d_e2 = [0.0; 3];
    if mu == 1 {
        d_e2[2] = -params.radius_prime(x) / (r * r);
    }
    let mut acc = 0.0;
    for rho in 0..3 {
        let lowered_e1 = g[(rho, 1)] * inv[1];
        if lowered_e1 == 0.0 {
            continue;
        }
        let mut cov = d_e2[rho];
        for lam in 0..3 {
            let e2 = if lam == 2 { inv[2] } else { 0.0 };
            cov += gam[rho][mu][lam] * e2;
        }
        acc += lowered_e1 * cov;
    }
    Ok(0.5 * acc)
}

/// u-component of the frame-derived spin connection; equals `-½ sin x`.
pub fn spin_connection_derived(params: &TorusParams, x: f64) -> Result<f64> {
    spin_connection_component(params, x, 2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinConnectionComparison {
    pub x: f64,
    pub printed: f64,
    pub derived: f64,
    pub difference: f64,
}

pub fn compare_spin_connection(params: &TorusParams, x: f64) -> Result<SpinConnectionComparison> {
    let printed = spin_connection_paper(params, x);
    let derived = spin_connection_derived(params, x)?;
    Ok(SpinConnectionComparison { x, printed, derived, difference: printed - derived })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn torus() -> TorusParams {
        TorusParams::new(0.5, 2.0).unwrap()
    }

    #[test]
    fn radius_values() {
        let p = torus();
        assert_abs_diff_eq!(radius_profile(&p, 0.0), 2.5);
        assert_abs_diff_eq!(radius_profile(&p, FRAC_PI_2), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(radius_profile(&p, PI), 1.5);
    }

    #[test]
    fn metric_values() {
        let g = metric_at(&torus(), 0.0);
        assert_eq!(g[(0, 0)], 1.0);
        assert_abs_diff_eq!(g[(1, 1)], -0.25);
        assert_abs_diff_eq!(g[(2, 2)], -6.25);
        let thin = TorusParams::new(1e-3, 2.0).unwrap();
        for x in [0.0, 1.0, 2.5, 4.0] {
            let g22 = metric_at(&thin, x)[(2, 2)];
            assert!((g22 + 4.0).abs() < 0.04);
        }
    }

    #[test]
    fn vierbein_values() {
        let e = vierbein_at(&torus(), FRAC_PI_2);
        assert_abs_diff_eq!(e[(1, 1)], 0.5);
        assert_abs_diff_eq!(e[(2, 2)], 2.0, epsilon = 1e-15);
        let p = TorusParams::new(0.7, 3.0).unwrap();
        let e = vierbein_at(&p, 1.1);
        assert!(e[(1, 1)] > 0.0 && e[(2, 2)] > 0.0);
        assert_eq!(metric_from_frame(&e), metric_at(&p, 1.1));
    }

    #[test]
    fn christoffel_values() {
        let p = torus();
        let c = christoffel_at(&p, 0.0).unwrap();
        assert_eq!((c.gamma_2_12, c.gamma_1_22), (0.0, 0.0));
        let c = christoffel_at(&p, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(c.gamma_2_12, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c.gamma_1_22, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn christoffel_rejects_vanishing_radius() {
        let p = TorusParams::new(1.0, 0.5).unwrap();
        let x = (-0.5f64).acos();
        assert!(matches!(christoffel_at(&p, x), Err(Error::DegenerateGeometry { .. })));
        assert!(!p.warnings().is_empty());
    }

    #[test]
    fn spin_connection_printed_values() {
        assert_eq!(spin_connection_paper(&torus(), 0.0), 0.0);
        assert_abs_diff_eq!(spin_connection_paper(&torus(), FRAC_PI_2), 0.5, epsilon = 1e-15);
        let p = TorusParams::new(0.3, 1.5).unwrap();
        assert_abs_diff_eq!(spin_connection_paper(&p, PI), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn spin_connection_frame_value() {
        let p = torus();
        assert_eq!(spin_connection_derived(&p, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(spin_connection_derived(&p, PI).unwrap(), 0.0, epsilon = 1e-15);
        for x in [0.3, 0.7, 2.0, 5.1] {
            assert_abs_diff_eq!(spin_connection_derived(&p, x).unwrap(), -0.5 * x.sin(), epsilon = 1e-14);
            assert_abs_diff_eq!(spin_connection_component(&p, x, 1).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(TorusParams::new(2.0, 2.0).is_err());
        assert!(TorusParams::new(-1.0, 2.0).is_err());
        assert!(Grid::periodic(8).is_err());
        assert!(Grid::new(32, 0.0, 3.0, Boundary::Periodic).is_err());
        assert!(Grid::dirichlet(32, 1.0, 0.0).is_err());
    }

    #[test]
    fn grid_spacing() {
        let g = Grid::periodic(64).unwrap();
        assert_abs_diff_eq!(g.spacing() * 64.0, TAU, epsilon = 1e-14);
        let d = Grid::dirichlet(101, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(d.point(100), 1.0, epsilon = 1e-14);
    }
}
