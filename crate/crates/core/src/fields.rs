//! Gauge-field and Fermi-velocity profiles along the tube angle `x`.
//!
//! All amplitudes and the charge are dimensionless. Gauge components are
//! complex on purpose: the hermitizing choice of `A_x` is purely imaginary.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geometry::{Grid, TorusParams};

/// Samples on a grid, interpolated linearly; derivatives come from central
/// differences of the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl Table {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("table has {} samples, grid has {}", values.len(), grid.n)));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("tabulated samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    fn sample(&self, i: isize) -> C64 {
        let n = self.grid.n as isize;
        if self.grid.is_periodic() {
            self.values[i.rem_euclid(n) as usize]
        } else {
            self.values[i.clamp(0, n - 1) as usize]
        }
    }

    fn derivative_sample(&self, i: isize) -> C64 {
        let h = self.grid.spacing();
        let n = self.grid.n as isize;
        if self.grid.is_periodic() || (i > 0 && i < n - 1) {
            (self.sample(i + 1) - self.sample(i - 1)) / (2.0 * h)
        } else if i <= 0 {
            (self.sample(1) - self.sample(0)) / h
        } else {
            (self.sample(n - 1) - self.sample(n - 2)) / h
        }
    }

    fn locate(&self, x: f64) -> (isize, f64) {
        let h = self.grid.spacing();
        let mut s = (x - self.grid.x_min) / h;
        if self.grid.is_periodic() {
            s = s.rem_euclid(self.grid.n as f64);
        } else {
            s = s.clamp(0.0, (self.grid.n - 1) as f64);
        }
        let i = s.floor();
        (i as isize, s - i)
    }

    pub fn value(&self, x: f64) -> C64 {
        let (i, t) = self.locate(x);
        self.sample(i) * (1.0 - t) + self.sample(i + 1) * t
    }

    pub fn derivative(&self, x: f64) -> C64 {
        let (i, t) = self.locate(x);
        self.derivative_sample(i) * (1.0 - t) + self.derivative_sample(i + 1) * t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxProfile {
    Zero,
    /// `A_x = -i a² sin x / (2e)`, the choice that removes `σ(x)`.
    Hermitizing,
    /// `A_x = amplitude · sin x`
    Sinusoidal { amplitude: C64 },
    Tabulated(Table),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuProfile {
    Zero,
    /// `A_u = C₂ R(x)² + C₃`. `rotated` records that `C₂` was entered as a real
    /// number and multiplied by `i`.
    Quadratic { c2: C64, c3: C64, rotated: bool },
    /// `A_u = a₂ R(x) - k/(a e)`
    Linear { a2: f64, k: i32 },
    Tabulated(Table),
}

/// Gauge potential `(A_x(x), A_u(x))` with charge `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub charge: f64,
    pub ax: AxProfile,
    pub au: AuProfile,
}

/// Values and first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeSample {
    pub ax: C64,
    pub au: C64,
    pub dax: C64,
    pub dau: C64,
}

impl GaugeField {
    pub fn zero() -> Self {
        Self { charge: 1.0, ax: AxProfile::Zero, au: AuProfile::Zero }
    }

    pub fn new(charge: f64, ax: AxProfile, au: AuProfile) -> Self {
        Self { charge, ax, au }
    }

    pub fn hermitizing(charge: f64) -> Self {
        Self { charge, ax: AxProfile::Hermitizing, au: AuProfile::Zero }
    }

    /// Quadratic `A_u` with the k-cancelling offset `C₃ = -k/(a e)`.
    pub fn quadratic_au(params: &TorusParams, charge: f64, c2: C64, k: i32) -> Self {
        let c3 = C64::new(-(k as f64) / (params.a * charge), 0.0);
        Self { charge, ax: AxProfile::Zero, au: AuProfile::Quadratic { c2, c3, rotated: false } }
    }

    /// Same as [`GaugeField::quadratic_au`] with `C₂ → i C₂`.
    pub fn quadratic_au_rotated(params: &TorusParams, charge: f64, c2: f64, k: i32) -> Self {
        let mut f = Self::quadratic_au(params, charge, C64::new(0.0, c2), k);
        if let AuProfile::Quadratic { rotated, .. } = &mut f.au {
            *rotated = true;
        }
        f
    }

    pub fn linear_au(charge: f64, a2: f64, k: i32) -> Self {
        Self { charge, ax: AxProfile::Zero, au: AuProfile::Linear { a2, k } }
    }

    pub fn with_ax(mut self, ax: AxProfile) -> Self {
        self.ax = ax;
        self
    }

    pub fn with_au(mut self, au: AuProfile) -> Self {
        self.au = au;
        self
    }

    /// The same field with `A_u → -A_u`.
    pub fn negated_au(&self) -> Self {
        let au = match &self.au {
            AuProfile::Zero => AuProfile::Zero,
            AuProfile::Quadratic { c2, c3, rotated } => AuProfile::Quadratic { c2: -c2, c3: -c3, rotated: *rotated },
            AuProfile::Linear { a2, k } => AuProfile::Linear { a2: -a2, k: -k },
            AuProfile::Tabulated(t) => {
                AuProfile::Tabulated(Table { grid: t.grid, values: t.values.iter().map(|v| -v).collect() })
            }
        };
        Self { charge: self.charge, ax: self.ax.clone(), au }
    }

    pub fn ax_kind(&self) -> &'static str {
        match self.ax {
            AxProfile::Zero => "zero",
            AxProfile::Hermitizing => "hermitizing_ax",
            AxProfile::Sinusoidal { .. } => "sinusoidal_ax",
            AxProfile::Tabulated(_) => "tabulated",
        }
    }

    pub fn au_kind(&self) -> &'static str {
        match self.au {
            AuProfile::Zero => "zero",
            AuProfile::Quadratic { .. } => "quadratic_au",
            AuProfile::Linear { .. } => "linear_au",
            AuProfile::Tabulated(_) => "tabulated",
        }
    }

    fn needs_charge(&self) -> bool {
        matches!(self.ax, AxProfile::Hermitizing)
            || matches!(self.au, AuProfile::Quadratic { .. } | AuProfile::Linear { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if self.needs_charge() && self.charge == 0.0 {
            return Err(Error::ChargeZero);
        }
        Ok(())
    }

    pub fn sample(&self, params: &TorusParams, x: f64) -> Result<GaugeSample> {
        self.validate()?;
        let e = self.charge;
        let a = params.a;
        let (s, c) = x.sin_cos();
        let (ax, dax) = match &self.ax {
            AxProfile::Zero => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            AxProfile::Hermitizing => {
                let amp = C64::new(0.0, -a * a / (2.0 * e));
                (amp * s, amp * c)
            }
            AxProfile::Sinusoidal { amplitude } => (amplitude * s, amplitude * c),
            AxProfile::Tabulated(t) => (t.value(x), t.derivative(x)),
        };
        let r = params.radius(x);
        let dr = params.radius_prime(x);
        let (au, dau) = match &self.au {
            AuProfile::Zero => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            AuProfile::Quadratic { c2, c3, .. } => (c2 * r * r + c3, c2 * 2.0 * r * dr),
            AuProfile::Linear { a2, k } => {
                (C64::new(a2 * r - *k as f64 / (a * e), 0.0), C64::new(a2 * dr, 0.0))
            }
            AuProfile::Tabulated(t) => (t.value(x), t.derivative(x)),
        };
        Ok(GaugeSample { ax, au, dax, dau })
    }

    /// Largest |Re A_x| over the given points; zero means the field is
    /// imaginary or absent along `x`.
    pub fn max_real_ax(&self, params: &TorusParams, xs: &[f64]) -> Result<f64> {
        let mut m: f64 = 0.0;
        for &x in xs {
            m = m.max(self.sample(params, x)?.ax.re.abs());
        }
        Ok(m)
    }
}

pub fn eval_gauge(field: &GaugeField, params: &TorusParams, x: f64) -> Result<(C64, C64)> {
    let s = field.sample(params, x)?;
    Ok((s.ax, s.au))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FermiVelocity {
    Constant { v_f: f64 },
    /// `V_F(x) = a cos x` with the tube radius `a`.
    Cosine,
    Tabulated(Table),
}

/// `(V_F, V_F', V_F'')` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocitySample {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
}

impl FermiVelocity {
    pub fn validate(&self) -> Result<()> {
        if let FermiVelocity::Constant { v_f } = self {
            if !(v_f.is_finite() && *v_f > 0.0) {
                return Err(Error::InvalidParameter(format!("constant Fermi velocity must be > 0, got {v_f}")));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FermiVelocity::Constant { .. } => "constant",
            FermiVelocity::Cosine => "cosine",
            FermiVelocity::Tabulated(_) => "tabulated",
        }
    }

    pub fn sample(&self, params: &TorusParams, x: f64) -> VelocitySample {
        match self {
            FermiVelocity::Constant { v_f } => VelocitySample { v: *v_f, dv: 0.0, d2v: 0.0 },
            FermiVelocity::Cosine => {
                let (s, c) = x.sin_cos();
                VelocitySample { v: params.a * c, dv: -params.a * s, d2v: -params.a * c }
            }
            FermiVelocity::Tabulated(t) => {
                let h = t.grid.spacing();
                let d2 = (t.derivative(x + 0.5 * h) - t.derivative(x - 0.5 * h)) / h;
                VelocitySample { v: t.value(x).re, dv: t.derivative(x).re, d2v: d2.re }
            }
        }
    }
}

pub fn eval_fermi_velocity(v: &FermiVelocity, params: &TorusParams, x: f64) -> (f64, f64) {
    let s = v.sample(params, x);
    (s.v, s.dv)
}

/// Angular wavenumber, charge, constant gap and energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumNumbers {
    pub k: i32,
    pub e: f64,
    pub delta: f64,
    pub energy: f64,
}

impl QuantumNumbers {
    /// `ε = E/V_F - Δ`
    pub fn epsilon(&self, v_f: f64) -> f64 {
        self.energy / v_f - self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn torus() -> TorusParams {
        TorusParams::new(0.5, 2.0).unwrap()
    }

    #[test]
    fn hermitizing_vanishes_at_origin() {
        let (ax, au) = eval_gauge(&GaugeField::hermitizing(1.0), &torus(), 0.0).unwrap();
        assert_eq!(ax.norm(), 0.0);
        assert_eq!(au.norm(), 0.0);
        let (ax, _) = eval_gauge(&GaugeField::hermitizing(1.0), &torus(), 1.0).unwrap();
        assert_eq!(ax.re, 0.0);
    }

    #[test]
    fn quadratic_paper_offset() {
        let f = GaugeField::quadratic_au(&torus(), 1.0, C64::new(1.0, 0.0), 1);
        let (_, au) = eval_gauge(&f, &torus(), FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(au.re, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn quadratic_cancels_k() {
        // k + a e A_u = a e C2 R²
        let p = torus();
        let c2 = C64::new(0.3, -0.2);
        for k in [-2, 1, 3] {
            let f = GaugeField::quadratic_au(&p, 1.5, c2, k);
            for x in [0.1, 1.0, 4.0] {
                let (_, au) = eval_gauge(&f, &p, x).unwrap();
                let lhs = au * (p.a * 1.5) + k as f64;
                let rhs = c2 * (p.a * 1.5) * p.radius(x).powi(2);
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn linear_value() {
        let (_, au) = eval_gauge(&GaugeField::linear_au(1.0, 0.1, 2), &torus(), 0.0).unwrap();
        assert_abs_diff_eq!(au.re, -3.75, epsilon = 1e-14);
    }

    #[test]
    fn zero_charge_rejected() {
        let p = torus();
        assert_eq!(GaugeField::hermitizing(0.0).sample(&p, 0.3), Err(Error::ChargeZero));
        assert_eq!(GaugeField::linear_au(0.0, 0.1, 1).sample(&p, 0.3), Err(Error::ChargeZero));
        let f = GaugeField::new(0.0, AxProfile::Zero, AuProfile::Zero);
        assert!(f.sample(&p, 0.3).is_ok());
    }

    #[test]
    fn velocity_profiles() {
        let p = torus();
        assert_eq!(eval_fermi_velocity(&FermiVelocity::Constant { v_f: 1.0 }, &p, 2.0), (1.0, 0.0));
        assert_eq!(eval_fermi_velocity(&FermiVelocity::Cosine, &p, 0.0), (0.5, -0.0));
        let (v, dv) = eval_fermi_velocity(&FermiVelocity::Cosine, &p, FRAC_PI_2);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dv, -0.5);
        assert!(FermiVelocity::Constant { v_f: 0.0 }.validate().is_err());
    }

    #[test]
    fn builtins_are_periodic() {
        let p = torus();
        let fields = [
            GaugeField::hermitizing(1.0),
            GaugeField::quadratic_au(&p, 1.0, C64::new(0.2, 0.1), 1),
            GaugeField::linear_au(0.7, 0.3, -1),
        ];
        for f in &fields {
            for x in [0.0, 0.4, 2.2, 5.9] {
                let a = f.sample(&p, x).unwrap();
                let b = f.sample(&p, x + TAU).unwrap();
                assert!((a.ax - b.ax).norm() < 1e-13 && (a.au - b.au).norm() < 1e-13);
                assert!((a.dax - b.dax).norm() < 1e-13 && (a.dau - b.dau).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn tabulated_tracks_smooth_profile() {
        let g = Grid::periodic(512).unwrap();
        let vals = g.points().iter().map(|&x| C64::new(x.cos(), 0.0)).collect();
        let t = Table::new(g, vals).unwrap();
        for x in [0.05, 1.3, 6.2] {
            assert!((t.value(x).re - x.cos()).abs() < 1e-4);
            assert!((t.derivative(x).re + x.sin()).abs() < 1e-3);
        }
        assert!(Table::new(g, vec![C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn epsilon_shift() {
        let q = QuantumNumbers { k: 1, e: 1.0, delta: 0.25, energy: 2.0 };
        assert_abs_diff_eq!(q.epsilon(4.0), 0.25);
    }
}
