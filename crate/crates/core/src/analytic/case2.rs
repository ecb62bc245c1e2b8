//! Position-dependent-velocity chain: hypergeometric parameters,
//! quantization and wavefunctions on `(-π/2, π/2)`.

use num_complex::Complex64 as C64;

use super::special::gauss_2f1;
use crate::discrete::{l2_norm, GridFunction};
use crate::error::{Error, Result};
use crate::geometry::{Grid, TorusParams};
use crate::numerics::{discretize_schrodinger, find_root_bracketed};
use crate::pseudoherm::veff_case2_closed;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub gamma_h: C64,
    pub a_h: C64,
    pub b_h: C64,
    pub beta: C64,
    /// `-1 - 4C₁ + α² + 4ε² < 0`.
    pub complex_beta: bool,
    /// The inner square root of `a_h, b_h` is imaginary.
    pub complex_roots: bool,
}

/// `β = ¼√(-1-4C₁+α²+4ε²)`, `γ = 1+2β-iα/2`,
/// `a, b = ½+2β ± ½√(5+16C₁-4α²+8β+16β²-16ε²)`.
pub fn case2_hyp_params(alpha: f64, c1: f64, eps: f64) -> HypParams {
    let radicand = clamp_rounding(-1.0 - 4.0 * c1 + alpha * alpha + 4.0 * eps * eps, 1.0 + 4.0 * c1.abs() + alpha * alpha + 4.0 * eps * eps);
    let beta = C64::new(radicand, 0.0).sqrt() / 4.0;
    let disc = beta * beta * 16.0 + beta * 8.0 + (5.0 + 16.0 * c1 - 4.0 * alpha * alpha - 16.0 * eps * eps);
    let root = disc.sqrt() / 2.0;
    let centre = beta * 2.0 + 0.5;
    HypParams {
        gamma_h: C64::new(1.0, -alpha / 2.0) + beta * 2.0,
        a_h: centre + root,
        b_h: centre - root,
        beta,
        complex_beta: radicand < 0.0,
        complex_roots: disc.im.abs() > 1e-14 || disc.re < 0.0,
    }
}

// the branch floor is computed from the same terms, so it can land a few ulps below zero
fn clamp_rounding(v: f64, scale: f64) -> f64 {
    if v < 0.0 && v > -8.0 * f64::EPSILON * scale {
        0.0
    } else {
        v
    }
}

/// Derivative-free coefficient of the hypergeometric form of the tied
/// equation, `ε² + (α²-4C₁)/4 + ½√(-1-4C₁+α²+4ε²)`.
pub fn case2_constant_coefficient(alpha: f64, c1: f64, eps: f64) -> C64 {
    let radicand = -1.0 - 4.0 * c1 + alpha * alpha + 4.0 * eps * eps;
    C64::new(eps * eps + (alpha * alpha - 4.0 * c1) / 4.0, 0.0) + C64::new(radicand, 0.0).sqrt() / 2.0
}

/// `a₂ = -2αβ/e`, the tie that removes the linear term.
pub fn tied_a2(alpha: f64, beta: f64, e: f64) -> f64 {
    // + 0.0 folds -0.0 into 0.0
    -2.0 * alpha * beta / e + 0.0
}

/// Which hypergeometric parameter hit `-n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminating {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Solution {
    pub n: usize,
    pub alpha: f64,
    pub c1: f64,
    pub beta: f64,
    pub gamma_h: C64,
    pub a_h: C64,
    pub b_h: C64,
    pub epsilon_n: f64,
    /// `|param + n|` at the root.
    pub residual: f64,
    pub terminating: Terminating,
}

impl Case2Solution {
    pub fn a2(&self, e: f64) -> f64 {
        tied_a2(self.alpha, self.beta, e)
    }
}

/// Lower end of the real-β branch, `ε² = max(0, (1+4C₁-α²)/4)`.
fn eps2_floor(alpha: f64, c1: f64) -> f64 {
    ((1.0 + 4.0 * c1 - alpha * alpha) / 4.0).max(0.0)
}

fn param(h: &HypParams, which: Terminating) -> C64 {
    match which {
        Terminating::A => h.a_h,
        Terminating::B => h.b_h,
    }
}

/// Solves `a_h(ε) = -n` (then `b_h(ε) = -n`, the series being symmetric) on
/// the real-β branch. `ε²` is scanned on the branch endpoint plus a
/// geometric ladder `1e-6..1e4` of 200 points above it, then refined by
/// bracketed root finding.
pub fn case2_quantize(n: usize, alpha: f64, c1: f64) -> Result<Case2Solution> {
    let floor = eps2_floor(alpha, c1);
    let mut ladder = vec![floor];
    let (lo, hi) = (1e-6f64.ln(), 1e4f64.ln());
    ladder.extend((0..200).map(|j| floor + (lo + (hi - lo) * j as f64 / 199.0).exp()));
    let target = -(n as f64);
    for which in [Terminating::A, Terminating::B] {
        let f = |e2: f64| -> Option<f64> {
            let h = case2_hyp_params(alpha, c1, e2.max(0.0).sqrt());
            let p = param(&h, which);
            (!h.complex_beta && p.im.abs() < 1e-12).then_some(p.re - target)
        };
        let mut prev: Option<(f64, f64)> = None;
        for &e2 in &ladder {
            let Some(v) = f(e2) else {
                prev = None;
                continue;
            };
            if v.abs() < 1e-12 {
                return Ok(solution(n, alpha, c1, e2, which));
            }
            if let Some((pe, pv)) = prev {
                if pv.signum() != v.signum() {
                    let root = find_root_bracketed(|e| f(e).unwrap_or(f64::NAN), pe, e2, 1e-15)?;
                    return Ok(solution(n, alpha, c1, root, which));
                }
            }
            prev = Some((e2, v));
        }
    }
    Err(Error::NoRootInBracket(format!(
        "neither a_h nor b_h reaches -{n} for eps^2 in [{floor}, {:e}] (alpha = {alpha}, C1 = {c1})",
        floor + 1e4
    )))
}

fn solution(n: usize, alpha: f64, c1: f64, eps2: f64, which: Terminating) -> Case2Solution {
    let eps = eps2.max(0.0).sqrt();
    let h = case2_hyp_params(alpha, c1, eps);
    Case2Solution {
        n,
        alpha,
        c1,
        beta: h.beta.re,
        gamma_h: h.gamma_h,
        a_h: h.a_h,
        b_h: h.b_h,
        epsilon_n: eps,
        residual: (param(&h, which) + n as f64).norm(),
        terminating: which,
    }
}

fn check_pole(x: f64) -> Result<()> {
    if (x.abs() - std::f64::consts::FRAC_PI_2).abs() < POLE_GUARD || x.abs() > std::f64::consts::FRAC_PI_2 {
        return Err(Error::DomainSingularity { x });
    }
    Ok(())
}

/// Unnormalized `e^{-αx/2}(1+tan²x)^β ₂F₁(-n, b; γ; (1-i tan x)/2)`; with
/// `swap` the non-terminating parameter comes from the other root.
pub fn case2_wavefunction_raw(sol: &Case2Solution, x: f64, swap: bool) -> Result<C64> {
    check_pole(x)?;
    let t = x.tan();
    let other = match (sol.terminating, swap) {
        (Terminating::A, false) | (Terminating::B, true) => sol.b_h,
        _ => sol.a_h,
    };
    let top = C64::new(-(sol.n as f64), 0.0);
    let s = (C64::new(1.0, 0.0) - I * t) / 2.0;
    let (p, q) = if swap { (other, top) } else { (top, other) };
    let f = gauss_2f1(p, q, sol.gamma_h, s)?;
    Ok(f * (-sol.alpha * x / 2.0).exp() * (1.0 + t * t).powf(sol.beta))
}

/// Wavefunction on `grid`, normalized to unit discrete L² norm.
pub fn case2_wavefunction(sol: &Case2Solution, grid: &Grid) -> Result<GridFunction> {
    let values: Vec<C64> = grid.points().into_iter().map(|x| case2_wavefunction_raw(sol, x, false)).collect::<Result<_>>()?;
    let norm = l2_norm(&values, grid.spacing());
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::InvalidParameter("wavefunction norm is not finite and positive".into()));
    }
    GridFunction::new(*grid, values.into_iter().map(|v| v / norm).collect())
}

/// Relative max-norm residual of `-φ'' + V_eff φ - ε²φ` on the interior
/// of `grid`, with the tied `a₂` in the closed-form potential.
pub fn case2_ode_residual(params: &TorusParams, e: f64, sol: &Case2Solution, phi: &GridFunction) -> Result<f64> {
    let grid = phi.grid;
    let v = veff_case2_closed(params, sol.a2(e), e, &grid)?;
    let h = grid.spacing();
    let f = &phi.values;
    let e2 = sol.epsilon_n * sol.epsilon_n;
    let (mut num, mut den): (f64, f64) = (0.0, 0.0);
    for i in 1..grid.n - 1 {
        let d2 = (f[i + 1] - f[i] * 2.0 + f[i - 1]) / (h * h);
        let r = -d2 + v.v[i] * f[i] - f[i] * e2;
        num = num.max(r.norm());
        den = den.max(d2.norm() + (v.v[i] * f[i]).norm() + e2 * f[i].norm());
    }
    Ok(num / den)
}

/// Dirichlet interval `(-π/2+δ, π/2-δ)` with `n` nodes.
pub fn truncated_interval(delta: f64, n: usize) -> Result<Grid> {
    let half = std::f64::consts::FRAC_PI_2 - delta;
    Grid::dirichlet(n, -half, half)
}

/// Lowest `count` Dirichlet eigenvalues of the closed-form potential on the
/// truncated interval.
pub fn case2_fd_spectrum(params: &TorusParams, a2: f64, e: f64, delta: f64, n_grid: usize, count: usize) -> Result<Vec<f64>> {
    let grid = truncated_interval(delta, n_grid)?;
    let v = veff_case2_closed(params, a2, e, &grid)?;
    Ok(discretize_schrodinger(&v, &grid)?.lowest(count)?.eigenvalues)
}

/// Levels of `c + 2B tan x + A(A-1) sec²x` with `A = ½`, `2B = a₂ea`:
/// `(n+½)² - B²/(n+½)² + a²a₂²e² - ¼`.
pub fn rosen_morse_reference_levels(params: &TorusParams, a2: f64, e: f64, count: usize) -> Vec<f64> {
    let a = params.a;
    let b = a2 * e * a / 2.0;
    (0..count)
        .map(|n| {
            let m = n as f64 + 0.5;
            m * m - b * b / (m * m) + a * a * a2 * a2 * e * e - 0.25
        })
        .collect()
}

/// Best fit of `ε² = ½(n+μ+1)² - ½ν/(n+μ+1)²` to a set of levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuNuFit {
    pub mu: f64,
    pub nu: f64,
    pub rms: f64,
}

fn nu_for(mu: f64, levels: &[(usize, f64)]) -> (f64, f64) {
    // ν enters linearly: ε² - ½m² = -½ν/m²
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(n, e2) in levels {
        let m = n as f64 + mu + 1.0;
        let x = -0.5 / (m * m);
        let y = e2 - 0.5 * m * m;
        sxx += x * x;
        sxy += x * y;
    }
    let nu = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss: f64 = levels
        .iter()
        .map(|&(n, e2)| {
            let m = n as f64 + mu + 1.0;
            let r = e2 - 0.5 * m * m + 0.5 * nu / (m * m);
            r * r
        })
        .sum();
    (nu, (ss / levels.len() as f64).sqrt())
}

/// Scans `μ ∈ (-0.99, 20)` and refines by golden section; `ν` is solved in
/// closed form for each trial `μ`.
pub fn fit_mu_nu(levels: &[(usize, f64)]) -> Result<MuNuFit> {
    if levels.len() < 2 {
        return Err(Error::InvalidParameter("fit needs at least two levels".into()));
    }
    let cost = |mu: f64| nu_for(mu, levels).1;
    let (lo, hi) = (-0.99, 20.0);
    let steps = 4000;
    let mut best = lo;
    for j in 0..=steps {
        let mu = lo + (hi - lo) * j as f64 / steps as f64;
        if cost(mu) < cost(best) {
            best = mu;
        }
    }
    let step = (hi - lo) / steps as f64;
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mu = 0.5 * (a + b);
    let (nu, rms) = nu_for(mu, levels);
    Ok(MuNuFit { mu, nu, rms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyp_params_at_origin() {
        let h = case2_hyp_params(0.0, -0.25, 0.0);
        assert!(h.beta.norm() < 1e-15);
        assert!((h.gamma_h - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((h.a_h - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(h.b_h.norm() < 1e-15);
    }

    #[test]
    fn ground_state_root_at_branch_point() {
        let s = case2_quantize(0, 0.0, -0.25).unwrap();
        assert_eq!(s.terminating, Terminating::B);
        assert!(s.residual < 1e-12);
        assert!(s.epsilon_n.abs() < 1e-12);
    }

    #[test]
    fn excited_levels_have_no_root() {
        for n in 1..4 {
            assert!(matches!(case2_quantize(n, 1.0, 0.0), Err(Error::NoRootInBracket(_))));
        }
    }

    #[test]
    fn reference_levels_without_tilt() {
        let p = TorusParams::new(0.5, 2.0).unwrap();
        let l = rosen_morse_reference_levels(&p, 0.0, 1.0, 4);
        for (n, v) in l.iter().enumerate() {
            assert!((v - (n * n + n) as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn fit_recovers_exact_form() {
        let (mu, nu) = (0.7, 1.3);
        let levels: Vec<(usize, f64)> = (0..6)
            .map(|n| {
                let m = n as f64 + mu + 1.0;
                (n, 0.5 * m * m - 0.5 * nu / (m * m))
            })
            .collect();
        let fit = fit_mu_nu(&levels).unwrap();
        assert!((fit.mu - mu).abs() < 1e-6 && (fit.nu - nu).abs() < 1e-5, "{fit:?}");
    }
}
