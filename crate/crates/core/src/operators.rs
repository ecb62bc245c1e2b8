//! The first-order Dirac operator on the tube angle and its squared,
//! decoupled second-order form.
//!
//! After the `exp(iku)` reduction the operator is off-diagonal,
//!
//! ```text
//! H_D = [[0, D₋], [D₊, 0]]
//! D₋ = -(1/a) d/dx - k/R + W₁ - iW₂
//! D₊ = -(1/a) d/dx + k/R + W₁ + iW₂
//! W₁ = -s(x)/a - (ie/a) A_x,   W₂ = -i e a A_u / R
//! ```
//!
//! where `s(x) = -a Γ(x)/R(x)` is the spin-connection term inside the
//! x-bracket. Writing `a D₋ = -d + P` and `a D₊ = -d + Q`, the squared
//! operator on each component is
//!
//! ```text
//! L⁺ = -a² D₋D₊ = -d² + σ d + (Q' - PQ),   L⁻ = -a² D₊D₋ = -d² + σ d + (P' - PQ)
//! ```
//!
//! with `σ = P + Q`. An eigenpair `H_D Ψ = εΨ` therefore gives
//! `L^± Ψ = -a²ε² Ψ`; the `+a²ε²` form used by [`SLProblem`] holds for
//! `i H_D`, the operator that is Hermitian for the hermitizing `A_x`.

use num_complex::Complex64 as C64;

use crate::discrete::{
    check_grid, derivative, first_derivative_op, inner, l2_norm, second_derivative, second_derivative_op,
    DiffScheme, GridFunction, SparseOp,
};
use crate::error::{Error, Result};
use crate::fields::{FermiVelocity, GaugeField, GaugeSample};
use crate::geometry::{Grid, TorusParams, DEGENERATE_RADIUS};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which spin-connection coefficient feeds the x-bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinTerm {
    /// `(a/2) R sin x`, giving the bracket term `-(a²/2) sin x`.
    #[default]
    Printed,
    /// The frame computation `-½ sin x`.
    FrameDerived,
}

impl SpinTerm {
    pub fn name(&self) -> &'static str {
        match self {
            SpinTerm::Printed => "printed",
            SpinTerm::FrameDerived => "frame_derived",
        }
    }

    /// Bracket term `s(x)` and its derivative.
    fn bracket(&self, params: &TorusParams, x: f64) -> (f64, f64) {
        let a = params.a;
        let (sn, cs) = x.sin_cos();
        match self {
            SpinTerm::Printed => (-0.5 * a * a * sn, -0.5 * a * a * cs),
            SpinTerm::FrameDerived => {
                let r = params.radius(x);
                let dr = params.radius_prime(x);
                (a * sn / (2.0 * r), a * cs / (2.0 * r) - a * sn * dr / (2.0 * r * r))
            }
        }
    }
}

/// How the second-order coefficients are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Squared from the first-order operator (`ρ⁺ = Q' - PQ`, `G⁺ = Q`).
    #[default]
    Derived,
    /// The closed forms as printed, including their misprints.
    Printed,
}

impl Convention {
    pub fn name(&self) -> &'static str {
        match self {
            Convention::Derived => "derived",
            Convention::Printed => "printed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Plus,
    Minus,
}

/// The multiplicative parts of the off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W12Pair {
    pub w1: C64,
    pub w2: C64,
}

/// `W₁`, `W₂` with the printed spin term.
pub fn dirac_offdiag(params: &TorusParams, field: &GaugeField, x: f64) -> Result<W12Pair> {
    dirac_offdiag_with(params, field, x, SpinTerm::Printed)
}

pub fn dirac_offdiag_with(params: &TorusParams, field: &GaugeField, x: f64, spin: SpinTerm) -> Result<W12Pair> {
    Ok(coefficients(params, field, 0, x, spin)?.w)
}

fn checked_radius(params: &TorusParams, x: f64) -> Result<f64> {
    let r = params.radius(x);
    if r.abs() < DEGENERATE_RADIUS {
        return Err(Error::DegenerateGeometry { x, r });
    }
    Ok(r)
}

/// Everything the squared operator needs at one point.
#[derive(Debug, Clone, Copy)]
struct PointCoefficients {
    w: W12Pair,
    /// `a D₋ = -d + p`, `a D₊ = -d + q`
    p: C64,
    q: C64,
    dq: C64,
    gauge: GaugeSample,
    r: f64,
    dr: f64,
}

fn coefficients(params: &TorusParams, field: &GaugeField, k: i32, x: f64, spin: SpinTerm) -> Result<PointCoefficients> {
    let a = params.a;
    let e = field.charge;
    let r = checked_radius(params, x)?;
    let dr = params.radius_prime(x);
    let g = field.sample(params, x)?;
    let (s, ds) = spin.bracket(params, x);
    let w1 = C64::new(-s / a, 0.0) - I * (e / a) * g.ax;
    let dw1 = C64::new(-ds / a, 0.0) - I * (e / a) * g.dax;
    let w2 = -I * (e * a / r) * g.au;
    let dw2 = -I * (e * a) * (g.dau / r - g.au * dr / (r * r));
    let kf = k as f64;
    let p = (w1 - I * w2) * a - a * kf / r;
    let q = (w1 + I * w2) * a + a * kf / r;
    let dq = (dw1 + I * dw2) * a - a * kf * dr / (r * r);
    Ok(PointCoefficients { w: W12Pair { w1, w2 }, p, q, dq, gauge: g, r, dr })
}

/// Two spinor components on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorGF {
    pub psi1: GridFunction,
    pub psi2: GridFunction,
}

impl SpinorGF {
    pub fn new(psi1: GridFunction, psi2: GridFunction) -> Result<Self> {
        psi1.same_grid(&psi2)?;
        Ok(Self { psi1, psi2 })
    }

    pub fn grid(&self) -> &Grid {
        &self.psi1.grid
    }

    pub fn norm(&self) -> f64 {
        self.psi1.norm().hypot(self.psi2.norm())
    }

    /// Stacked `(ψ₁, ψ₂)`.
    pub fn stacked(&self) -> Vec<C64> {
        self.psi1.values.iter().chain(&self.psi2.values).copied().collect()
    }

    pub fn from_stacked(grid: Grid, v: &[C64]) -> Result<Self> {
        if v.len() != 2 * grid.n {
            return Err(Error::GridMismatch(format!("stacked spinor of length {} on {} points", v.len(), grid.n)));
        }
        Self::new(
            GridFunction::new(grid, v[..grid.n].to_vec())?,
            GridFunction::new(grid, v[grid.n..].to_vec())?,
        )
    }
}

/// The discretized first-order operator on a periodic grid.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub params: TorusParams,
    pub grid: Grid,
    pub k: i32,
    pub spin: SpinTerm,
    /// multiplicative part of `D₋`
    m12: Vec<C64>,
    /// multiplicative part of `D₊`
    m21: Vec<C64>,
}

impl DiracOperator {
    pub fn new(params: &TorusParams, field: &GaugeField, k: i32, grid: &Grid, spin: SpinTerm) -> Result<Self> {
        if !grid.is_periodic() {
            return Err(Error::GridMismatch("the Dirac operator is built on a periodic grid".into()));
        }
        let a = params.a;
        let mut m12 = Vec::with_capacity(grid.n);
        let mut m21 = Vec::with_capacity(grid.n);
        for x in grid.points() {
            let c = coefficients(params, field, k, x, spin)?;
            m12.push(c.p / a);
            m21.push(c.q / a);
        }
        Ok(Self { params: *params, grid: *grid, k, spin, m12, m21 })
    }

    pub fn apply(&self, spinor: &SpinorGF, scheme: DiffScheme) -> Result<SpinorGF> {
        check_grid(&self.grid, spinor.grid())?;
        let inv_a = 1.0 / self.params.a;
        let d1 = derivative(&spinor.psi1.values, &self.grid, scheme)?;
        let d2 = derivative(&spinor.psi2.values, &self.grid, scheme)?;
        let out1 = (0..self.grid.n).map(|i| -d2[i] * inv_a + self.m12[i] * spinor.psi2.values[i]).collect();
        let out2 = (0..self.grid.n).map(|i| -d1[i] * inv_a + self.m21[i] * spinor.psi1.values[i]).collect();
        SpinorGF::new(GridFunction::new(self.grid, out1)?, GridFunction::new(self.grid, out2)?)
    }

    /// `2n × 2n` central-difference matrix acting on stacked spinors.
    pub fn to_sparse(&self) -> SparseOp {
        let n = self.grid.n;
        let d = first_derivative_op(&self.grid);
        let mut op = SparseOp::zeros(2 * n);
        let inv_a = C64::new(-1.0 / self.params.a, 0.0);
        for (i, j, v) in d.entries() {
            op.push(i, n + j, inv_a * v);
            op.push(n + i, j, inv_a * v);
        }
        for i in 0..n {
            op.push(i, n + i, self.m12[i]);
            op.push(n + i, i, self.m21[i]);
        }
        op
    }
}

/// `H_D Ψ` with central differences and the printed spin term.
pub fn apply_dirac(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    grid: &Grid,
    spinor: &SpinorGF,
) -> Result<SpinorGF> {
    DiracOperator::new(params, field, k, grid, SpinTerm::Printed)?.apply(spinor, DiffScheme::Central)
}

/// `-ψ'' + σ ψ' + ρ ψ = s · w(x) · λ · ψ` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SLProblem {
    pub grid: Grid,
    pub sigma: Vec<C64>,
    pub rho: Vec<C64>,
    /// The factor `s` (`a²` for the decoupled Dirac problems).
    pub eigen_scale: f64,
    /// The weight `w(x)` (`1` for constant Fermi velocity, `1/V_F²` otherwise).
    pub weight: Vec<f64>,
    pub sector: Sector,
    pub convention: Convention,
}

impl SLProblem {
    /// `-d² + V` with unit weight and scale.
    pub fn schrodinger(grid: Grid, v: Vec<C64>) -> Result<Self> {
        if v.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} potential samples on {} points", v.len(), grid.n)));
        }
        Ok(Self {
            grid,
            sigma: vec![C64::new(0.0, 0.0); grid.n],
            rho: v,
            eigen_scale: 1.0,
            weight: vec![1.0; grid.n],
            sector: Sector::Plus,
            convention: Convention::Derived,
        })
    }

    /// Left-hand side `-ψ'' + σψ' + ρψ`.
    pub fn apply(&self, psi: &[C64], scheme: DiffScheme) -> Result<Vec<C64>> {
        let d1 = derivative(psi, &self.grid, scheme)?;
        let d2 = second_derivative(psi, &self.grid, scheme)?;
        let mut out: Vec<C64> =
            (0..self.grid.n).map(|i| -d2[i] + self.sigma[i] * d1[i] + self.rho[i] * psi[i]).collect();
        if !self.grid.is_periodic() {
            out[0] = C64::new(0.0, 0.0);
            out[self.grid.n - 1] = C64::new(0.0, 0.0);
        }
        Ok(out)
    }

    /// Central-difference matrix of the left-hand side.
    pub fn to_sparse(&self) -> SparseOp {
        let d1 = first_derivative_op(&self.grid);
        let d2 = second_derivative_op(&self.grid);
        let mut rho = self.rho.clone();
        if !self.grid.is_periodic() {
            rho[0] = C64::new(0.0, 0.0);
            let last = rho.len() - 1;
            rho[last] = C64::new(0.0, 0.0);
        }
        SparseOp::diagonal(&self.sigma).compose(&d1).sub(&d2).add(&SparseOp::diagonal(&rho))
    }

    /// CSV with columns `x, re_sigma, im_sigma, re_rho, im_rho`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re_sigma,im_sigma,re_rho,im_rho\n");
        for (i, x) in self.grid.points().into_iter().enumerate() {
            s.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                x, self.sigma[i].re, self.sigma[i].im, self.rho[i].re, self.rho[i].im
            ));
        }
        s
    }

    /// Largest coefficient magnitude over the points a discretization uses.
    pub fn max_coefficient(&self) -> f64 {
        let range = if self.grid.is_periodic() { 0..self.grid.n } else { 1..self.grid.n - 1 };
        range.map(|i| self.sigma[i].norm().max(self.rho[i].norm())).fold(0.0, f64::max)
    }
}

fn ensure_positive_radius(params: &TorusParams, grid: &Grid) -> Result<()> {
    for x in grid.points() {
        let r = params.radius(x);
        if r <= DEGENERATE_RADIUS {
            return Err(Error::DegenerateGeometry { x, r });
        }
    }
    Ok(())
}

/// `ρ⁺` exactly as printed.
fn rho_plus_printed(params: &TorusParams, e: f64, k: f64, g: &GaugeSample, r: f64, dr: f64, x: f64) -> C64 {
    let a = params.a;
    let (sn, cs) = x.sin_cos();
    let cross = (g.ax * e + I * (0.5 * a * a * sn)).powu(2);
    let kin = (g.au * (a * a * e) + k * a).powu(2) / (r * r);
    -I * e * g.dax + cross + 0.5 * a * a * cs + kin + g.dau * (a * e / r)
        - k * a * dr / (r * r)
        - g.au * (a * a * e * dr / (r * r))
}

/// `F⁺` exactly as printed.
fn f_plus_printed(params: &TorusParams, e: f64, k: f64, g: &GaugeSample, r: f64, dr: f64, x: f64) -> C64 {
    let a = params.a;
    let (sn, cs) = x.sin_cos();
    g.ax.powu(2) * (e * e) + 0.5 * a * a * cs - 0.25 * a.powi(4) * sn
        + (g.au * (a * a * e) + k * a).powu(2) / (r * r)
        + I * e * (g.ax * (a * a * sn) - g.dax)
        + g.dau * (a * a * e / r)
        + (g.au * (a * e) + k) * (a * dr / (r * r))
}

/// `G⁺` exactly as printed.
fn g_plus_printed(params: &TorusParams, e: f64, k: f64, g: &GaugeSample, r: f64, x: f64) -> C64 {
    let a = params.a;
    -I * e * g.ax + a * k / r + g.au * (a * a * e / r) + 0.5 * a * a * x.sin()
}

fn sigma_printed(params: &TorusParams, e: f64, g: &GaugeSample, x: f64) -> C64 {
    C64::new(params.a * params.a * x.sin(), 0.0) - I * (2.0 * e) * g.ax
}

/// Plus and minus problems for constant Fermi velocity, eigenvalue `λ = ε²`
/// with scale `a²` and unit weight.
///
/// The minus sector is built as the plus sector of `(−k, −A_u)`, so the two
/// sectors exchange bit-for-bit under that substitution.
pub fn decouple_constant_vf(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    grid: &Grid,
    convention: Convention,
) -> Result<(SLProblem, SLProblem)> {
    decouple_constant_vf_with(params, field, k, grid, convention, SpinTerm::Printed)
}

pub fn decouple_constant_vf_with(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    grid: &Grid,
    convention: Convention,
    spin: SpinTerm,
) -> Result<(SLProblem, SLProblem)> {
    field.validate()?;
    ensure_positive_radius(params, grid)?;
    if convention == Convention::Printed && spin != SpinTerm::Printed {
        return Err(Error::InvalidParameter("printed closed forms assume the printed spin term".into()));
    }
    let plus = sector_constant(params, field, k, grid, convention, spin, Sector::Plus)?;
    let minus = sector_constant(params, &field.negated_au(), -k, grid, convention, spin, Sector::Minus)?;
    Ok((plus, minus))
}

fn sector_constant(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    grid: &Grid,
    convention: Convention,
    spin: SpinTerm,
    sector: Sector,
) -> Result<SLProblem> {
    let mut sigma = Vec::with_capacity(grid.n);
    let mut rho = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let c = coefficients(params, field, k, x, spin)?;
        match convention {
            Convention::Derived => {
                sigma.push(c.p + c.q);
                rho.push(c.dq - c.p * c.q);
            }
            Convention::Printed => {
                sigma.push(sigma_printed(params, field.charge, &c.gauge, x));
                rho.push(rho_plus_printed(params, field.charge, k as f64, &c.gauge, c.r, c.dr, x));
            }
        }
    }
    Ok(SLProblem {
        grid: *grid,
        sigma,
        rho,
        eigen_scale: params.a * params.a,
        weight: vec![1.0; grid.n],
        sector,
        convention,
    })
}

/// Result of the position-dependent decoupling: normalized problems plus the
/// raw `F`, `G` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfvDecoupling {
    pub plus: SLProblem,
    pub minus: SLProblem,
    pub f_plus: Vec<C64>,
    pub g_plus: Vec<C64>,
    pub f_minus: Vec<C64>,
    pub g_minus: Vec<C64>,
}

/// Decoupling with `V_F(x)`, divided through by `V_F²`:
/// `-ψ'' + (σ - V_F'/V_F)ψ' + (F + G V_F'/V_F)ψ = a² E² / V_F² ψ`.
pub fn decouple_pdfv(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    vf: &FermiVelocity,
    grid: &Grid,
    convention: Convention,
) -> Result<PdfvDecoupling> {
    field.validate()?;
    vf.validate()?;
    ensure_positive_radius(params, grid)?;
    let n = grid.n;
    let interior = |i: usize| grid.is_periodic() || (i > 0 && i + 1 < n);
    let neg = field.negated_au();
    let mut out = PdfvDecoupling {
        plus: SLProblem::schrodinger(*grid, vec![C64::new(0.0, 0.0); n])?,
        minus: SLProblem::schrodinger(*grid, vec![C64::new(0.0, 0.0); n])?,
        f_plus: Vec::with_capacity(n),
        g_plus: Vec::with_capacity(n),
        f_minus: Vec::with_capacity(n),
        g_minus: Vec::with_capacity(n),
    };
    let mut sig_p = Vec::with_capacity(n);
    let mut sig_m = Vec::with_capacity(n);
    let mut rho_p = Vec::with_capacity(n);
    let mut rho_m = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    for (i, x) in grid.points().into_iter().enumerate() {
        let v = vf.sample(params, x);
        if interior(i) && v.v.abs() < 1e-12 {
            return Err(Error::VelocityZero { x, value: v.v.abs() });
        }
        let cp = coefficients(params, field, k, x, SpinTerm::Printed)?;
        let cm = coefficients(params, &neg, -k, x, SpinTerm::Printed)?;
        let (fp, gp, fm, gm, sp, sm) = match convention {
            Convention::Derived => {
                (cp.dq - cp.p * cp.q, cp.q, cm.dq - cm.p * cm.q, cm.q, cp.p + cp.q, cm.p + cm.q)
            }
            Convention::Printed => {
                let e = field.charge;
                (
                    f_plus_printed(params, e, k as f64, &cp.gauge, cp.r, cp.dr, x),
                    g_plus_printed(params, e, k as f64, &cp.gauge, cp.r, x),
                    f_plus_printed(params, e, -k as f64, &cm.gauge, cm.r, cm.dr, x),
                    g_plus_printed(params, e, -k as f64, &cm.gauge, cm.r, x),
                    sigma_printed(params, e, &cp.gauge, x),
                    sigma_printed(params, e, &cm.gauge, x),
                )
            }
        };
        // endpoints of a Dirichlet grid may sit on a zero of V_F; they never enter
        let ratio = if v.v.abs() < 1e-12 { 0.0 } else { v.dv / v.v };
        sig_p.push(sp - ratio);
        sig_m.push(sm - ratio);
        rho_p.push(fp + gp * ratio);
        rho_m.push(fm + gm * ratio);
        weight.push(if v.v.abs() < 1e-12 { 0.0 } else { 1.0 / (v.v * v.v) });
        out.f_plus.push(fp);
        out.g_plus.push(gp);
        out.f_minus.push(fm);
        out.g_minus.push(gm);
    }
    let scale = params.a * params.a;
    out.plus = SLProblem {
        grid: *grid,
        sigma: sig_p,
        rho: rho_p,
        eigen_scale: scale,
        weight: weight.clone(),
        sector: Sector::Plus,
        convention,
    };
    out.minus =
        SLProblem { grid: *grid, sigma: sig_m, rho: rho_m, eigen_scale: scale, weight, sector: Sector::Minus, convention };
    Ok(out)
}

/// Two readings of the first-order pair written for position-dependent
/// Fermi velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstOrderReading {
    /// Both lines carry the same operator.
    Literal,
    /// The second line carries `k → -k`, `A_u → -A_u`, matching the sector rule.
    #[default]
    SignFlipped,
}

/// Multiplicative parts `(m₁, m₂)` of the pair
/// `E/V_F Ψ₁ = ((1/a) d + m₁) Ψ₂`, `E/V_F Ψ₂ = ((1/a) d + m₂) Ψ₁` at `x`.
pub fn case2_first_order_pair(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    x: f64,
    reading: FirstOrderReading,
) -> Result<(C64, C64)> {
    let m = |f: &GaugeField, k: f64| -> Result<C64> {
        let a = params.a;
        let e = f.charge;
        let r = checked_radius(params, x)?;
        let g = f.sample(params, x)?;
        Ok(C64::new(0.5 * a * a * x.sin() - k / r, 0.0) - I * e * g.ax - g.au * (a * e / r))
    };
    let m1 = m(field, k as f64)?;
    let m2 = match reading {
        FirstOrderReading::Literal => m1,
        FirstOrderReading::SignFlipped => m(&field.negated_au(), -k as f64)?,
    };
    Ok((m1, m2))
}

/// Inner product used by the self-adjointness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// Uniform weights.
    #[default]
    Flat,
    /// Surface element `a R(x)`.
    Curved,
}

/// Self-adjointness defects of a discretized operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiticityReport {
    /// `max |H - H^♯|` over matrix entries, `H^♯` the adjoint in the chosen measure.
    pub entry_defect: f64,
    /// `max |⟨f, Hg⟩ - ⟨Hf, g⟩|` over the supplied unit test vectors.
    pub form_defect: f64,
}

/// Self-adjointness of a stacked-spinor operator on `grid`. Test vectors are
/// normalized in the chosen measure before use.
pub fn hermiticity_defect(
    op: &SparseOp,
    params: &TorusParams,
    grid: &Grid,
    measure: Measure,
    tests: &[Vec<C64>],
) -> Result<HermiticityReport> {
    let blocks = op.n / grid.n;
    if blocks * grid.n != op.n {
        return Err(Error::GridMismatch(format!("operator of size {} on {} points", op.n, grid.n)));
    }
    let w: Vec<f64> = (0..op.n)
        .map(|i| match measure {
            Measure::Flat => 1.0,
            Measure::Curved => params.a * params.radius(grid.point(i % grid.n)),
        })
        .collect();
    let inv_w: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();
    let sharp = op.adjoint().similarity_by_weights(&inv_w);
    let entry_defect = op.sub(&sharp).max_abs();
    let h = grid.spacing();
    let wip = |f: &[C64], g: &[C64]| -> C64 {
        let fw: Vec<C64> = f.iter().zip(&w).map(|(a, b)| a * *b).collect();
        inner(&fw, g, h)
    };
    let normed: Vec<Vec<C64>> = tests
        .iter()
        .map(|t| {
            if t.len() != op.n {
                return Err(Error::GridMismatch(format!("test vector of length {} for size {}", t.len(), op.n)));
            }
            let nrm = wip(t, t).re.sqrt();
            Ok(t.iter().map(|v| v / nrm).collect())
        })
        .collect::<Result<_>>()?;
    let images: Vec<Vec<C64>> = normed.iter().map(|t| op.apply(t)).collect();
    let mut form_defect: f64 = 0.0;
    for (f, hf) in normed.iter().zip(&images) {
        for (g, hg) in normed.iter().zip(&images) {
            form_defect = form_defect.max((wip(f, hg) - wip(hf, g)).norm());
        }
    }
    Ok(HermiticityReport { entry_defect, form_defect })
}

/// Relative deviation of `a² H_D(H_D Ψ)` from `-(L⁺ψ₁, L⁻ψ₂)`.
pub fn squaring_defect(
    op: &DiracOperator,
    plus: &SLProblem,
    minus: &SLProblem,
    spinor: &SpinorGF,
    scheme: DiffScheme,
) -> Result<f64> {
    let a2 = op.params.a * op.params.a;
    let hh = op.apply(&op.apply(spinor, scheme)?, scheme)?;
    let l1 = plus.apply(&spinor.psi1.values, scheme)?;
    let l2 = minus.apply(&spinor.psi2.values, scheme)?;
    let h = op.grid.spacing();
    let diff: Vec<C64> = hh
        .psi1
        .values
        .iter()
        .zip(&l1)
        .chain(hh.psi2.values.iter().zip(&l2))
        .map(|(x, y)| x * a2 + y)
        .collect();
    let reference: Vec<C64> = l1.iter().chain(&l2).copied().collect();
    Ok(l2_norm(&diff, h) / l2_norm(&reference, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::AxProfile;
    use std::f64::consts::FRAC_PI_2;

    fn torus() -> TorusParams {
        TorusParams::new(0.5, 2.0).unwrap()
    }

    #[test]
    fn offdiag_values() {
        let p = torus();
        let w = dirac_offdiag(&p, &GaugeField::zero(), FRAC_PI_2).unwrap();
        assert!((w.w1 - C64::new(0.25, 0.0)).norm() < 1e-15 && w.w2.norm() == 0.0);
        let w = dirac_offdiag(&p, &GaugeField::zero(), 0.0).unwrap();
        assert_eq!(w.w1.norm() + w.w2.norm(), 0.0);
        let w = dirac_offdiag(&p, &GaugeField::hermitizing(1.0), FRAC_PI_2).unwrap();
        assert!(w.w1.norm() < 1e-15);
    }

    #[test]
    fn zero_field_k0_closed_form() {
        let p = torus();
        let g = Grid::periodic(64).unwrap();
        for conv in [Convention::Derived, Convention::Printed] {
            let (plus, _) = decouple_constant_vf(&p, &GaugeField::zero(), 0, &g, conv).unwrap();
            for (i, x) in g.points().into_iter().enumerate() {
                let a = p.a;
                assert!((plus.sigma[i].re - a * a * x.sin()).abs() < 1e-14);
                let want = -a.powi(4) / 4.0 * x.sin().powi(2) + a * a / 2.0 * x.cos();
                assert!((plus.rho[i] - C64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn derived_and_printed_rho_differ_only_by_au_derivative_term() {
        let p = torus();
        let g = Grid::periodic(64).unwrap();
        let f = GaugeField::quadratic_au(&p, 1.3, C64::new(0.4, 0.1), 2).with_ax(AxProfile::Sinusoidal { amplitude: C64::new(0.3, -0.2) });
        let (d, _) = decouple_constant_vf(&p, &f, 2, &g, Convention::Derived).unwrap();
        let (q, _) = decouple_constant_vf(&p, &f, 2, &g, Convention::Printed).unwrap();
        for (i, x) in g.points().into_iter().enumerate() {
            let s = f.sample(&p, x).unwrap();
            let r = p.radius(x);
            let gap = s.dau * (f.charge * p.a * (p.a - 1.0) / r);
            assert!((d.rho[i] - q.rho[i] - gap).norm() < 1e-12);
            assert!((d.sigma[i] - q.sigma[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn sector_exchange_is_exact() {
        let p = torus();
        let g = Grid::periodic(48).unwrap();
        let f = GaugeField::linear_au(1.0, 0.3, 1).with_ax(AxProfile::Sinusoidal { amplitude: C64::new(0.5, 0.0) });
        for conv in [Convention::Derived, Convention::Printed] {
            let (p1, m1) = decouple_constant_vf(&p, &f, 1, &g, conv).unwrap();
            let (p2, m2) = decouple_constant_vf(&p, &f.negated_au(), -1, &g, conv).unwrap();
            assert_eq!(p1.rho, m2.rho);
            assert_eq!(m1.rho, p2.rho);
            assert_eq!(p1.sigma, m2.sigma);
        }
    }

    #[test]
    fn pdfv_reduces_to_constant_case() {
        let p = torus();
        let g = Grid::periodic(48).unwrap();
        let f = GaugeField::linear_au(1.0, 0.1, 1);
        let (plus, minus) = decouple_constant_vf(&p, &f, 1, &g, Convention::Derived).unwrap();
        let d = decouple_pdfv(&p, &f, 1, &FermiVelocity::Constant { v_f: 2.0 }, &g, Convention::Derived).unwrap();
        assert_eq!(d.plus.rho, plus.rho);
        assert_eq!(d.plus.sigma, plus.sigma);
        assert_eq!(d.minus.rho, minus.rho);
        assert!(d.plus.weight.iter().all(|w| (w - 0.25).abs() < 1e-15));
    }

    #[test]
    fn pdfv_rejects_velocity_zero() {
        let p = torus();
        let g = Grid::dirichlet(65, 0.0, std::f64::consts::PI).unwrap();
        assert!(matches!(
            decouple_pdfv(&p, &GaugeField::zero(), 0, &FermiVelocity::Cosine, &g, Convention::Derived),
            Err(Error::VelocityZero { .. })
        ));
    }

    #[test]
    fn dirac_matrix_has_zero_diagonal_blocks() {
        let p = torus();
        let g = Grid::periodic(32).unwrap();
        let op = DiracOperator::new(&p, &GaugeField::hermitizing(1.0), 2, &g, SpinTerm::Printed).unwrap().to_sparse();
        for (i, j, _) in op.entries() {
            assert!((i < 32) != (j < 32), "entry ({i}, {j}) in a diagonal block");
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = Grid::periodic(16).unwrap();
        let (plus, _) = decouple_constant_vf(&torus(), &GaugeField::zero(), 1, &g, Convention::Derived).unwrap();
        let csv = plus.to_csv();
        assert!(csv.starts_with("x,re_sigma,im_sigma,re_rho,im_rho\n"));
        assert_eq!(csv.lines().count(), 17);
    }
}
