//! Intertwining operators, superpotential factorization, partner potentials
//! and the Rosen-Morse II reduction, all as grid objects that can be
//! checked numerically.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use crate::discrete::{check_grid, first_derivative_op, l2_norm, GridFunction, PotentialForm, SparseOp};
use crate::error::{Error, Result};
use crate::fields::{AuProfile, AxProfile, FermiVelocity, GaugeField};
use crate::geometry::{Grid, TorusParams};
use crate::numerics::integrate_simpson_fn;
use crate::operators::SLProblem;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `d/dx + f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderOp {
    pub grid: Grid,
    pub f: Vec<C64>,
    pub label: String,
    /// `f` contains a term that grows linearly in `x`.
    pub secular: bool,
}

impl FirstOrderOp {
    pub fn from_fn(grid: Grid, label: impl Into<String>, secular: bool, f: impl Fn(f64) -> C64) -> Self {
        Self { grid, f: grid.points().into_iter().map(f).collect(), label: label.into(), secular }
    }

    pub fn to_sparse(&self) -> SparseOp {
        let mut f = self.f.clone();
        if !self.grid.is_periodic() {
            f[0] = C64::new(0.0, 0.0);
            let last = f.len() - 1;
            f[last] = C64::new(0.0, 0.0);
        }
        first_derivative_op(&self.grid).add(&SparseOp::diagonal(&f))
    }
}

/// Pointwise multiplication by `g(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplication {
    pub grid: Grid,
    pub g: Vec<C64>,
    pub label: String,
}

impl Multiplication {
    pub fn to_sparse(&self) -> SparseOp {
        SparseOp::diagonal(&self.g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intertwiner {
    FirstOrder(FirstOrderOp),
    Multiplication(Multiplication),
    Identity(Grid),
}

impl Intertwiner {
    pub fn grid(&self) -> &Grid {
        match self {
            Intertwiner::FirstOrder(op) => &op.grid,
            Intertwiner::Multiplication(m) => &m.grid,
            Intertwiner::Identity(g) => g,
        }
    }

    pub fn to_sparse(&self) -> SparseOp {
        match self {
            Intertwiner::FirstOrder(op) => op.to_sparse(),
            Intertwiner::Multiplication(m) => m.to_sparse(),
            Intertwiner::Identity(g) => SparseOp::identity(g.n),
        }
    }
}

/// Right-hand operator of an intertwining relation.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Problem(&'a SLProblem),
    /// Conjugate transpose of the discretized problem.
    AdjointOf(&'a SLProblem),
    Matrix(&'a SparseOp),
}

/// Coefficients of `-ψ'' + (A + B cos x + C sin x + D sin²x) ψ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParams {
    pub a_m: C64,
    pub b_m: C64,
    pub c_m: C64,
    pub d_m: C64,
}

impl MathieuParams {
    pub fn bracket(&self, x: f64) -> C64 {
        let (s, c) = x.sin_cos();
        self.a_m + self.b_m * c + self.c_m * s + self.d_m * s * s
    }
}

/// `A(x) = C₁ + a⁴x/4 - (a²/2) sin x - (a⁴/8) sin 2x`.
pub fn eta2_case1_coefficient(params: &TorusParams, c1: f64, x: f64) -> f64 {
    let a = params.a;
    c1 + a.powi(4) * x / 4.0 - a * a / 2.0 * x.sin() - a.powi(4) / 8.0 * (2.0 * x).sin()
}

/// `η₂ = d/dx + A(x)`; `A` has a secular term, so the result is flagged.
pub fn eta2_case1(params: &TorusParams, c1: f64, grid: &Grid) -> FirstOrderOp {
    FirstOrderOp::from_fn(*grid, "case-1 intertwiner d/dx + A(x)", true, |x| {
        C64::new(eta2_case1_coefficient(params, c1, x), 0.0)
    })
}

/// Potential of the Hermitian counterpart for the quadratic `A_u` family:
/// `(ak + a²eA_u)²/R² + aeA_u'/R - akR'/R² - a²eA_uR'/R²`.
pub fn hermitian_counterpart_case1(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    grid: &Grid,
) -> Result<PotentialForm> {
    if !matches!(field.au, AuProfile::Quadratic { .. }) {
        return Err(Error::FamilyMismatch { expected: "quadratic_au", found: field.au_kind() });
    }
    field.validate()?;
    let a = params.a;
    let e = field.charge;
    let kf = k as f64;
    let mut v = Vec::with_capacity(grid.n);
    for x in grid.points() {
        let g = field.sample(params, x)?;
        let r = params.radius(x);
        let dr = params.radius_prime(x);
        v.push(
            (g.au * (a * a * e) + a * kf).powu(2) / (r * r) + g.dau * (a * e / r)
                - a * kf * dr / (r * r)
                - g.au * (a * a * e * dr / (r * r)),
        );
    }
    PotentialForm::new(*grid, v, "Hermitian counterpart, quadratic A_u")
}

/// `A + B cos x + C sin x + D sin²x` form of the counterpart potential with
/// `C₃ = -k/(ae)`.
pub fn mathieu_form(params: &TorusParams, e: f64, c2: C64) -> MathieuParams {
    let a = params.a;
    let c = params.c;
    let q = c2 * c2 * e * e;
    MathieuParams {
        a_m: q * (a.powi(4) * (a * a + c * c)),
        b_m: q * (2.0 * c * a.powi(5)),
        c_m: c2 * (e * a * a * (a - 2.0)),
        d_m: -q * a.powi(6),
    }
}

/// Principal square root of `a - 1`; `i√(1-a)` for `a < 1`.
pub fn sqrt_a_minus_1(a: f64) -> C64 {
    C64::new(a - 1.0, 0.0).sqrt()
}

/// Superpotential of the constant-velocity chain together with the
/// constants it requires.
#[derive(Debug, Clone, PartialEq)]
pub struct Superpotential {
    pub w: FirstOrderOp,
    pub w_prime: Vec<C64>,
    /// `C₂ = √(a-1)/(a⁴e)` on the principal branch.
    pub c2: C64,
    /// `c = a²/(2√(1-a))`, real only for `a < 1`.
    pub c_radius: Option<f64>,
    /// `true` when `a < 1` (real `c`, imaginary `C₂`).
    pub real_radius_branch: bool,
}

/// `W(x) = -(i√(a-1)/a) sin x + i(a-2)/(2a)`.
pub fn superpotential_value(params: &TorusParams, x: f64) -> (C64, C64) {
    let a = params.a;
    let s = sqrt_a_minus_1(a);
    let w = -I * s / a * x.sin() + I * ((a - 2.0) / (2.0 * a));
    let dw = -I * s / a * x.cos();
    (w, dw)
}

pub fn superpotential_case1(params: &TorusParams, e: f64, grid: &Grid) -> Result<Superpotential> {
    if e == 0.0 {
        return Err(Error::ChargeZero);
    }
    let a = params.a;
    let (w, dw): (Vec<C64>, Vec<C64>) = grid.points().into_iter().map(|x| superpotential_value(params, x)).unzip();
    let c_radius = (a < 1.0).then(|| a * a / (2.0 * (1.0 - a).sqrt()));
    Ok(Superpotential {
        w: FirstOrderOp { grid: *grid, f: w, label: "A = d/dx + W".into(), secular: false },
        w_prime: dw,
        c2: sqrt_a_minus_1(a) / (a.powi(4) * e),
        c_radius,
        real_radius_branch: a < 1.0,
    })
}

/// `W² - W'` and `W² + W'` from sampled `W`, `W'`.
pub fn factorized_potentials(sp: &Superpotential) -> (PotentialForm, PotentialForm) {
    let g = sp.w.grid;
    let minus = sp.w.f.iter().zip(&sp.w_prime).map(|(w, d)| w * w - d).collect();
    let plus = sp.w.f.iter().zip(&sp.w_prime).map(|(w, d)| w * w + d).collect();
    (
        PotentialForm { grid: g, v: minus, label: "W^2 - W'".into() },
        PotentialForm { grid: g, v: plus, label: "W^2 + W'".into() },
    )
}

/// Closed-form partner potentials `(V, V₁)`; they differ only in the sign of
/// the `i√(a-1) cos x / a` term.
pub fn partner_potentials_case1(params: &TorusParams, grid: &Grid) -> (PotentialForm, PotentialForm) {
    let a = params.a;
    let s = sqrt_a_minus_1(a);
    let common = |x: f64| {
        C64::new((a - 1.0) / (a * a) * x.cos().powi(2) - 0.25, 0.0) + s * ((a - 2.0) / (a * a) * x.sin())
    };
    let v = PotentialForm::from_fn(*grid, "V", |x| common(x) + I * s / a * x.cos());
    let v1 = PotentialForm::from_fn(*grid, "V1", |x| common(x) - I * s / a * x.cos());
    (v, v1)
}

/// `η₁(x) = i(2-a)/(2a) + (i√(a-1)/a) sin x`.
pub fn eta1_case1(params: &TorusParams, grid: &Grid) -> Multiplication {
    let a = params.a;
    let s = sqrt_a_minus_1(a);
    Multiplication {
        grid: *grid,
        g: grid.points().into_iter().map(|x| I * ((2.0 - a) / (2.0 * a)) + I * s / a * x.sin()).collect(),
        label: "eta_1".into(),
    }
}

/// `η₂ = d/dx + a⁴/16 + C₂ + (3/4)a² sin x - (a⁴/32) sin 2x`.
pub fn eta2_case2(params: &TorusParams, c2: f64, grid: &Grid) -> FirstOrderOp {
    let a = params.a;
    FirstOrderOp::from_fn(*grid, "case-2 intertwiner", false, |x| {
        C64::new(a.powi(4) / 16.0 + c2 + 0.75 * a * a * x.sin() - a.powi(4) / 32.0 * (2.0 * x).sin(), 0.0)
    })
}

fn check_tan_poles(grid: &Grid) -> Result<()> {
    for x in grid.points() {
        let m = ((x - FRAC_PI_2) / PI).round();
        let pole = FRAC_PI_2 + m * PI;
        if (x - pole).abs() < 1e-6 {
            return Err(Error::DomainSingularity { x });
        }
    }
    Ok(())
}

fn ax_integral(field: &GaugeField, params: &TorusParams, x: f64) -> Result<C64> {
    if matches!(field.ax, AxProfile::Zero) || x == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let steps = ((x.abs() / 1e-3).ceil() as usize).max(8);
    let mut failure = None;
    let val = integrate_simpson_fn(
        |t| match field.sample(params, t) {
            Ok(s) => s.ax,
            Err(e) => {
                failure = Some(e);
                C64::new(0.0, 0.0)
            }
        },
        0.0,
        x,
        steps,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// `exp[½∫₀ˣ (2ieA_x - a² sin t + tan t) dt]`, equal to 1 at `x = 0`.
pub fn prefactor_case2(params: &TorusParams, field: &GaugeField, grid: &Grid) -> Result<GridFunction> {
    prefactor(params, field, grid, 1.0)
}

/// The prefactor that removes the first-derivative term of the decoupled
/// problem with `V_F = a cos x`: `exp[½∫₀ˣ σ̃]` with
/// `σ̃ = a² sin t - 2ieA_x + tan t`. It agrees with [`prefactor_case2`] only
/// when `2ieA_x = a² sin x`.
pub fn prefactor_case2_removing_drift(params: &TorusParams, field: &GaugeField, grid: &Grid) -> Result<GridFunction> {
    prefactor(params, field, grid, -1.0)
}

fn prefactor(params: &TorusParams, field: &GaugeField, grid: &Grid, sign: f64) -> Result<GridFunction> {
    check_tan_poles(grid)?;
    field.validate()?;
    let a = params.a;
    let e = field.charge;
    let mut values = Vec::with_capacity(grid.n);
    for x in grid.points() {
        // ∫₀ˣ(-a² sin) = a²(cos x - 1), ∫₀ˣ tan = -ln|cos x|
        let smooth = sign * a * a * (x.cos() - 1.0) - x.cos().abs().ln();
        let gauge = ax_integral(field, params, x)? * (2.0 * e * sign) * I;
        values.push((C64::new(smooth, 0.0) + gauge).scale(0.5).exp());
    }
    GridFunction::new(*grid, values)
}

/// The effective potential written for general `V_F` and `A_u`:
/// `-V_F'²/(4V_F²) + V_F''/(2V_F) + (aeA_u + k)²/R² - aeA_u'/R
///  + (k + aeA_u)R'/R² - kV_F'/(RV_F) - aeA_uV_F'/(RV_F)`.
pub fn veff_case2_general(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    vf: &FermiVelocity,
    grid: &Grid,
) -> Result<PotentialForm> {
    field.validate()?;
    let a = params.a;
    let e = field.charge;
    let kf = k as f64;
    let mut out = Vec::with_capacity(grid.n);
    for (i, x) in grid.points().into_iter().enumerate() {
        let v = vf.sample(params, x);
        if v.v.abs() < 1e-12 {
            if !grid.is_periodic() && (i == 0 || i + 1 == grid.n) {
                out.push(C64::new(0.0, 0.0));
                continue;
            }
            return Err(Error::VelocityZero { x, value: v.v.abs() });
        }
        let g = field.sample(params, x)?;
        let r = params.radius(x);
        let dr = params.radius_prime(x);
        let lr = v.dv / v.v;
        out.push(
            C64::new(-lr * lr / 4.0 + v.d2v / (2.0 * v.v), 0.0) + (g.au * (a * e) + kf).powu(2) / (r * r)
                - g.dau * (a * e / r)
                + (g.au * (a * e) + kf) * (dr / (r * r))
                - kf * lr / r
                - g.au * (a * e * lr / r),
        );
    }
    PotentialForm::new(*grid, out, "effective potential, general form")
}

/// Rosen-Morse II closed form `a²a₂²e² - 1/2 + a₂ea tan x - (1/4) tan²x`.
pub fn veff_case2_closed(params: &TorusParams, a2: f64, e: f64, grid: &Grid) -> Result<PotentialForm> {
    check_tan_poles(grid)?;
    let a = params.a;
    Ok(PotentialForm::from_real_fn(*grid, "Rosen-Morse II", |x| {
        let t = x.tan();
        a * a * a2 * a2 * e * e - 0.5 + a2 * e * a * t - 0.25 * t * t
    }))
}

/// Effective potential for `V_F = a cos x` and `A_u = a₂R - k/(ae)`,
/// returned in the Rosen-Morse closed form after checking the field
/// families.
pub fn veff_case2(
    params: &TorusParams,
    field: &GaugeField,
    k: i32,
    vf: &FermiVelocity,
    grid: &Grid,
) -> Result<PotentialForm> {
    let AuProfile::Linear { a2, k: kk } = field.au else {
        return Err(Error::FamilyMismatch { expected: "linear_au", found: field.au_kind() });
    };
    if !matches!(vf, FermiVelocity::Cosine) {
        return Err(Error::FamilyMismatch { expected: "cosine", found: vf.kind() });
    }
    if kk != k {
        return Err(Error::InvalidParameter(format!("linear_au offset built for k = {kk}, used with k = {k}")));
    }
    field.validate()?;
    veff_case2_closed(params, a2, field.charge, grid)
}

/// Potential left after removing the first-derivative term of
/// `-ψ'' + σψ' + ρψ`: `ρ - σ'/2 + σ²/4`, with `σ'` from central differences
/// (one-sided at Dirichlet endpoints).
pub fn liouville_potential(problem: &SLProblem) -> PotentialForm {
    let g = problem.grid;
    let n = g.n;
    let h = g.spacing();
    let s = &problem.sigma;
    let ds: Vec<C64> = (0..n)
        .map(|i| {
            if g.is_periodic() {
                (s[(i + 1) % n] - s[(i + n - 1) % n]) / (2.0 * h)
            } else if i == 0 {
                (s[1] - s[0]) / h
            } else if i == n - 1 {
                (s[n - 1] - s[n - 2]) / h
            } else {
                (s[i + 1] - s[i - 1]) / (2.0 * h)
            }
        })
        .collect();
    let v = (0..n).map(|i| problem.rho[i] - ds[i] * 0.5 + s[i] * s[i] * 0.25).collect();
    PotentialForm { grid: g, v, label: "rho - sigma'/2 + sigma^2/4".into() }
}

/// Relative residual of the substitution `ψ = P φ`:
/// `‖L[Pφ] - P(-φ'' + Vφ)‖ / ‖P(-φ'' + Vφ)‖` over interior points, with
/// `L = -d² + σd + ρ` and a central-difference second derivative.
pub fn mapping_residual(
    problem: &SLProblem,
    prefactor: &GridFunction,
    v: &PotentialForm,
    phi: &GridFunction,
) -> Result<f64> {
    check_grid(&problem.grid, &prefactor.grid)?;
    check_grid(&problem.grid, &v.grid)?;
    check_grid(&problem.grid, &phi.grid)?;
    let psi: Vec<C64> = prefactor.values.iter().zip(&phi.values).map(|(p, f)| p * f).collect();
    let lhs = problem.to_sparse().apply(&psi);
    let d2 = crate::discrete::second_derivative_op(&problem.grid).apply(&phi.values);
    let rhs: Vec<C64> =
        (0..problem.grid.n).map(|i| prefactor.values[i] * (-d2[i] + v.v[i] * phi.values[i])).collect();
    let range = v.active_range();
    let diff: Vec<C64> = range.clone().map(|i| lhs[i] - rhs[i]).collect();
    let reference: Vec<C64> = range.map(|i| rhs[i]).collect();
    let h = problem.grid.spacing();
    Ok(l2_norm(&diff, h) / l2_norm(&reference, h))
}

/// `max_φ ‖(η H - T η) φ‖ / ‖φ‖` with every operator discretized by central
/// differences and adjoints taken as conjugate transposes.
pub fn intertwining_residual(
    eta: &Intertwiner,
    h: &SLProblem,
    target: Target<'_>,
    tests: &[GridFunction],
) -> Result<f64> {
    let grid = *eta.grid();
    check_grid(&grid, &h.grid)?;
    let t = match target {
        Target::Problem(p) => {
            check_grid(&grid, &p.grid)?;
            p.to_sparse()
        }
        Target::AdjointOf(p) => {
            check_grid(&grid, &p.grid)?;
            p.to_sparse().adjoint()
        }
        Target::Matrix(m) => {
            if m.n != grid.n {
                return Err(Error::GridMismatch(format!("target of size {} on {} points", m.n, grid.n)));
            }
            m.clone()
        }
    };
    let e = eta.to_sparse();
    let comm = e.compose(&h.to_sparse()).sub(&t.compose(&e));
    let mut worst: f64 = 0.0;
    for phi in tests {
        check_grid(&grid, &phi.grid)?;
        let r = comm.apply(&phi.values);
        worst = worst.max(l2_norm(&r, grid.spacing()) / phi.norm());
    }
    Ok(worst)
}

/// Smooth bumps `exp(-1/(1-t²)) e^{imx}` supported strictly inside the grid
/// interval.
pub fn bump_test_functions(grid: &Grid, count: usize) -> Vec<GridFunction> {
    let len = grid.x_max - grid.x_min;
    (0..count)
        .map(|j| {
            let center = grid.x_min + len * (0.3 + 0.4 * (j as f64 + 0.5) / count.max(1) as f64);
            let width = len * 0.2;
            let m = (j % 3) as f64;
            GridFunction::from_fn(*grid, |x| {
                let t = (x - center) / width;
                if t.abs() >= 1.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar((-1.0 / (1.0 - t * t)).exp(), m * x)
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus() -> TorusParams {
        TorusParams::new(0.5, 2.0).unwrap()
    }

    #[test]
    fn eta2_case1_values() {
        let p = torus();
        assert_eq!(eta2_case1_coefficient(&p, 0.0, 0.0), 0.0);
        let tiny = TorusParams::new(1e-6, 2.0).unwrap();
        assert!(eta2_case1_coefficient(&tiny, 0.0, 1.3).abs() < 1e-11);
        assert!(eta2_case1(&p, 0.0, &Grid::periodic(16).unwrap()).secular);
    }

    #[test]
    fn counterpart_cancels_k() {
        let p = torus();
        let g = Grid::periodic(64).unwrap();
        let f = GaugeField::quadratic_au(&p, 1.0, C64::new(0.0, 0.0), 3);
        let v = hermitian_counterpart_case1(&p, &f, 3, &g).unwrap();
        assert!(v.v.iter().all(|z| z.norm() < 1e-13));
        assert!(matches!(
            hermitian_counterpart_case1(&p, &GaugeField::linear_au(1.0, 0.1, 1), 1, &g),
            Err(Error::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn superpotential_branch() {
        let p = torus();
        let g = Grid::periodic(16).unwrap();
        let sp = superpotential_case1(&p, 1.0, &g).unwrap();
        assert!((sp.c_radius.unwrap() - 0.25 / (2.0 * 0.5f64.sqrt())).abs() < 1e-15);
        assert!((sp.w.f[0] - C64::new(0.0, -1.5)).norm() < 1e-15);
        assert!(sp.real_radius_branch);
        assert!(sp.c2.re.abs() < 1e-15 && sp.c2.im > 0.0);
    }

    #[test]
    fn eta2_case2_values() {
        let p = torus();
        let g = Grid::periodic(16).unwrap();
        let op = eta2_case2(&p, 0.0, &g);
        assert!((op.f[0].re - 0.00390625).abs() < 1e-16);
        assert!(!op.secular);
    }

    #[test]
    fn prefactor_normalized_and_small_a_limit() {
        let g = Grid::dirichlet(101, -1.0, 1.0).unwrap();
        let p = torus();
        let pf = prefactor_case2(&p, &GaugeField::zero(), &g).unwrap();
        assert!((pf.values[50] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let tiny = TorusParams::new(1e-8, 2.0).unwrap();
        let pf = prefactor_case2(&tiny, &GaugeField::zero(), &g).unwrap();
        for (x, v) in g.points().into_iter().zip(&pf.values) {
            assert!((v.re - x.cos().abs().powf(-0.5)).abs() < 1e-12);
        }
        let bad = Grid::dirichlet(101, 0.0, FRAC_PI_2).unwrap();
        assert!(matches!(prefactor_case2(&p, &GaugeField::zero(), &bad), Err(Error::DomainSingularity { .. })));
    }

    #[test]
    fn veff_family_checks() {
        let p = torus();
        let g = Grid::dirichlet(64, -1.0, 1.0).unwrap();
        let err = veff_case2(&p, &GaugeField::zero(), 0, &FermiVelocity::Cosine, &g);
        assert!(matches!(err, Err(Error::FamilyMismatch { .. })));
        let f = GaugeField::linear_au(1.0, 0.0, 0);
        let v = veff_case2(&p, &f, 0, &FermiVelocity::Cosine, &g).unwrap();
        for (x, z) in g.points().into_iter().zip(&v.v) {
            assert!((z.re - (-0.5 - 0.25 * x.tan().powi(2))).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_intertwines_trivially() {
        let g = Grid::dirichlet(200, 0.0, 3.0).unwrap();
        let h = SLProblem::schrodinger(g, g.points().iter().map(|x| C64::new(x.sin(), 0.1)).collect()).unwrap();
        let r = intertwining_residual(&Intertwiner::Identity(g), &h, Target::Problem(&h), &bump_test_functions(&g, 3))
            .unwrap();
        assert_eq!(r, 0.0);
    }
}
