//! Constant-velocity chain: Mathieu form to Morse form, energies and
//! Laguerre wavefunctions.

use num_complex::Complex64 as C64;

use super::special::laguerre_gen;
use crate::error::{Error, Result};
use crate::geometry::TorusParams;
use crate::numerics::{shoot_bound_state, ShootingProblem};
use crate::pseudoherm::{mathieu_form, sqrt_a_minus_1, MathieuParams};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Real branch of the Mathieu coefficients: principal `C₂`, sine term dropped.
pub fn mathieu_real_branch(params: &TorusParams, e: f64) -> Result<MathieuParams> {
    if e == 0.0 {
        return Err(Error::ChargeZero);
    }
    let c2 = sqrt_a_minus_1(params.a) / (params.a.powi(4) * e);
    let mut m = mathieu_form(params, e, c2);
    m.c_m = C64::new(0.0, 0.0);
    Ok(m)
}

/// `Δ = a⁴(a²+c²)C₂²`.
pub fn case1_delta(params: &TorusParams, c2: C64) -> C64 {
    let a = params.a;
    c2 * c2 * (a.powi(4) * (a * a + params.c * params.c))
}

/// `K = D - (B+C)/2`, the combination under the square root of the level
/// formula.
pub fn morse_depth(m: &MathieuParams) -> C64 {
    m.d_m - (m.b_m + m.c_m) / 2.0
}

/// Morse-type equation `ψ'' + α²[A+B + p(u-1) + r(u-1)²]ψ = 0`, `u = e^{-αt}`,
/// with `p, r` from the displayed expansion. The exact Taylor coefficients
/// are kept alongside for comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseChain {
    pub alpha: f64,
    pub mathieu: MathieuParams,
    pub constant: C64,
    /// Displayed linear coefficient `iC`.
    pub linear: C64,
    /// Displayed quadratic coefficient `(B - iC - 2D)/2`.
    pub quadratic: C64,
    /// Taylor coefficient of the `z = e^{ix}` bracket at `z = 1`: `-iC`.
    pub exact_linear: C64,
    /// `(B + iC - 2D)/2`.
    pub exact_quadratic: C64,
    /// max over real `x` of |exact bracket - displayed quadratic expansion|.
    pub truncation_error: f64,
}

impl MorseChain {
    /// Potential `V(t)` of `-ψ'' + Vψ = λψ` with `λ = α²(A+B)`.
    pub fn potential(&self, t: f64) -> C64 {
        let w = (-self.alpha * t).exp() - 1.0;
        -(self.linear * w + self.quadratic * w * w) * (self.alpha * self.alpha)
    }

    /// `V(t → +∞)`.
    pub fn asymptote(&self) -> C64 {
        (self.linear - self.quadratic) * (self.alpha * self.alpha)
    }

    pub fn eigen_parameter(&self) -> C64 {
        self.constant * (self.alpha * self.alpha)
    }
}

/// Bracket `A + B cos x + C sin x + D sin²x` written in `z = e^{ix}`.
pub fn z_bracket(m: &MathieuParams, z: C64) -> C64 {
    let zi = z.inv();
    m.a_m + m.d_m / 2.0 + (m.b_m - I * m.c_m) / 2.0 * z + (m.b_m + I * m.c_m) / 2.0 * zi
        - m.d_m / 4.0 * (z * z + zi * zi)
}

pub fn case1_transform_chain(m: &MathieuParams, alpha: f64) -> Result<MorseChain> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let linear = I * m.c_m;
    let quadratic = (m.b_m - I * m.c_m - 2.0 * m.d_m) / 2.0;
    let constant = m.a_m + m.b_m;
    let samples = 2048;
    let mut err: f64 = 0.0;
    for j in 0..samples {
        let x = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
        let z = C64::from_polar(1.0, x);
        let w = z - 1.0;
        let approx = constant + linear * w + quadratic * w * w;
        err = err.max((z_bracket(m, z) - approx).norm());
    }
    Ok(MorseChain {
        alpha,
        mathieu: *m,
        constant,
        linear,
        quadratic,
        exact_linear: -I * m.c_m,
        exact_quadratic: (m.b_m + I * m.c_m - 2.0 * m.d_m) / 2.0,
        truncation_error: err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case1Solution {
    pub n: usize,
    pub alpha: f64,
    /// `K = D - (B+C)/2`.
    pub depth: C64,
    /// `-α²/4 (2n+1 - α(2D-B-2C)/√K)²`.
    pub energy_sq: C64,
    pub is_real: bool,
    /// `±i√E/(2α)`; the first entry is the decaying choice.
    pub mu: [C64; 2],
    /// Upper Laguerre index `4μ` for the decaying `μ`.
    pub laguerre_order: C64,
    /// Scale `α√K` of `s = α√K e^{-αt}`.
    pub s_scale: C64,
}

pub fn case1_energy(n: usize, alpha: f64, m: &MathieuParams) -> Result<Case1Solution> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let k = morse_depth(m);
    if k.norm() < 1e-14 {
        return Err(Error::SingularParameter(format!("D - (B+C)/2 = {k} vanishes")));
    }
    let sk = k.sqrt();
    let inner = C64::new(2.0 * n as f64 + 1.0, 0.0) - (m.d_m * 2.0 - m.b_m - m.c_m * 2.0) * alpha / sk;
    let energy_sq = -inner * inner * (alpha * alpha / 4.0);
    let is_real = energy_sq.im.abs() <= 1e-12 * (1.0 + energy_sq.re.abs());
    let root = I * energy_sq.sqrt() / (2.0 * alpha);
    // positive real part so that z^{2μ} decays as t → +∞
    let mu = if root.re >= 0.0 { [root, -root] } else { [-root, root] };
    Ok(Case1Solution {
        n,
        alpha,
        depth: k,
        energy_sq,
        is_real,
        mu,
        laguerre_order: mu[0] * 4.0,
        s_scale: sk * alpha,
    })
}

/// Morse level `λ_n - V(∞) = -α²(√K - n - ½)²` of the chain potential with
/// `C = 0`.
pub fn morse_reference_level(n: usize, alpha: f64, depth: f64) -> f64 {
    let x = depth.sqrt() - n as f64 - 0.5;
    -alpha * alpha * x * x
}

/// Dirichlet shooting of the chain potential on `[t_min, t_max]`; returns
/// `λ_n - V(∞)`.
pub fn case1_shooting_level(chain: &MorseChain, n: usize, t_min: f64, t_max: f64, steps: usize) -> Result<f64> {
    let mid = 0.5 * (t_min + t_max);
    let probe = chain.potential(mid);
    if probe.im.abs() > 1e-12 || chain.asymptote().im.abs() > 1e-12 {
        return Err(Error::ComplexPotential { x: mid, imag: probe.im });
    }
    let c = *chain;
    let p = ShootingProblem::new(move |t| c.potential(t).re, t_min, t_max, steps)?;
    let (e, _) = shoot_bound_state(&p, n)?;
    Ok(e - chain.asymptote().re)
}

/// Readings of the ambiguous symbols in `z^{2μ} e^{-z/α} L_n^{4μ}(2γs)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZReading {
    /// `z ≡ s = α√K e^{-αt}`.
    S,
    /// `z = e^{-αt}`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaReading {
    AlphaSqrtK,
    InverseAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveReading {
    pub z: ZReading,
    pub gamma: GammaReading,
}

impl WaveReading {
    pub const ALL: [WaveReading; 4] = [
        WaveReading { z: ZReading::S, gamma: GammaReading::AlphaSqrtK },
        WaveReading { z: ZReading::S, gamma: GammaReading::InverseAlpha },
        WaveReading { z: ZReading::Exponential, gamma: GammaReading::AlphaSqrtK },
        WaveReading { z: ZReading::Exponential, gamma: GammaReading::InverseAlpha },
    ];
}

impl std::fmt::Display for WaveReading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let z = match self.z {
            ZReading::S => "s",
            ZReading::Exponential => "exp(-alpha t)",
        };
        let gamma = match self.gamma {
            GammaReading::AlphaSqrtK => "alpha sqrt(K)",
            GammaReading::InverseAlpha => "1/alpha",
        };
        write!(f, "z = {z}, gamma = {gamma}")
    }
}

pub fn case1_wavefunction(sol: &Case1Solution, reading: WaveReading, t: f64) -> C64 {
    let u = (-sol.alpha * t).exp();
    let s = sol.s_scale * u;
    let z = match reading.z {
        ZReading::S => s,
        ZReading::Exponential => C64::new(u, 0.0),
    };
    let gamma = match reading.gamma {
        GammaReading::AlphaSqrtK => sol.s_scale,
        GammaReading::InverseAlpha => C64::new(1.0 / sol.alpha, 0.0),
    };
    z.powc(sol.mu[0] * 2.0) * (-z / sol.alpha).exp() * laguerre_gen(sol.n, sol.laguerre_order, gamma * s * 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub best: WaveReading,
    /// Relative ODE residual for every reading.
    pub residuals: Vec<(WaveReading, f64)>,
    /// Best profile decays at both window edges.
    pub bounded: bool,
}

/// Relative residual of `-ψ'' + Vψ - λψ` with `λ = E + V(∞)`, sampled on
/// `[t_min, t_max]` with `points` nodes and a five-point `ψ''`.
pub fn wavefunction_residual(
    sol: &Case1Solution,
    chain: &MorseChain,
    reading: WaveReading,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> f64 {
    let h = (t_max - t_min) / (points - 1) as f64;
    let psi: Vec<C64> = (0..points).map(|i| case1_wavefunction(sol, reading, t_min + i as f64 * h)).collect();
    let lambda = sol.energy_sq + chain.asymptote();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 2..points - 2 {
        let t = t_min + i as f64 * h;
        let d2 = (-psi[i + 2] + psi[i + 1] * 16.0 - psi[i] * 30.0 + psi[i - 1] * 16.0 - psi[i - 2]) / (12.0 * h * h);
        let v = chain.potential(t);
        num += (-d2 + v * psi[i] - lambda * psi[i]).norm_sqr();
        den += d2.norm_sqr() + (v * psi[i]).norm_sqr() + (lambda * psi[i]).norm_sqr();
    }
    if den == 0.0 || !num.is_finite() {
        return f64::INFINITY;
    }
    (num / den).sqrt()
}

/// Tries every reading and keeps the one with the smallest ODE residual.
pub fn calibrate_case1_reading(
    sol: &Case1Solution,
    chain: &MorseChain,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> Result<Calibration> {
    if points < 16 || !(t_min < t_max) {
        return Err(Error::InvalidParameter("calibration window needs t_min < t_max and 16 points".into()));
    }
    let residuals: Vec<(WaveReading, f64)> = WaveReading::ALL
        .iter()
        .map(|&r| (r, wavefunction_residual(sol, chain, r, t_min, t_max, points)))
        .collect();
    let best = residuals.iter().min_by(|a, b| a.1.total_cmp(&b.1)).map(|r| r.0).expect("four readings");
    let h = (t_max - t_min) / (points - 1) as f64;
    let peak = (0..points).map(|i| case1_wavefunction(sol, best, t_min + i as f64 * h).norm()).fold(0.0, f64::max);
    let edge = case1_wavefunction(sol, best, t_min).norm().max(case1_wavefunction(sol, best, t_max).norm());
    Ok(Calibration { best, residuals, bounded: peak.is_finite() && edge < 1e-3 * peak })
}
