//! Eigensolvers, shooting, quadrature and root finding.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::discrete::PotentialForm;
use crate::error::{Error, Result};
use crate::geometry::Grid;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSym {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalSym {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal needs n diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tridiagonal entries must be finite".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin bounds on the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence of the LDLᵀ
    /// pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..self.len() {
            let b2 = if i > 0 { self.offdiag[i - 1].powi(2) } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Eigenpairs in ascending order with residuals `‖Hv - λv‖/‖v‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Lowest `k` eigenpairs by bisection on the Sturm count followed by inverse
/// iteration.
pub fn eig_sym_tridiag(m: &TridiagonalSym, k: usize) -> Result<EigResult> {
    let n = m.len();
    if k > n {
        return Err(Error::InvalidParameter(format!("asked for {k} eigenvalues of a {n}x{n} matrix")));
    }
    let (glo, ghi) = m.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let (mut lo, mut hi) = (glo, ghi);
        let mut iter = 0;
        while hi - lo > 2.0 * f64::EPSILON * scale.max(lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if m.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            iter += 1;
            if iter > 4000 {
                return Err(Error::ConvergenceFailure(format!("bisection for eigenvalue {j}")));
            }
        }
        let lambda = 0.5 * (lo + hi);
        let v = inverse_iteration(m, lambda, &eigenvectors)?;
        let hv = m.matvec(&v);
        // Rayleigh quotient is the best estimate for the computed vector
        let rq: f64 = hv.iter().zip(&v).map(|(a, b)| a * b).sum();
        let lambda = if (rq - lambda).abs() <= (hi - lo).max(1e-14 * scale) * 4.0 { rq } else { lambda };
        let res = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(res);
    }
    Ok(EigResult { eigenvalues, eigenvectors, residuals })
}

fn inverse_iteration(m: &TridiagonalSym, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = m.len();
    let (glo, ghi) = m.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(1.0);
    let shift = lambda + f64::EPSILON * scale;
    let orthogonalize = |w: &mut Vec<f64>| {
        for p in previous {
            let d: f64 = p.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            for (wi, pi) in w.iter_mut().zip(p) {
                *wi -= d * pi;
            }
        }
    };
    'seed: for seed in 0..n.min(8) + 1 {
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * (7 + seed) + 3 * seed + 3) % 11) as f64).collect();
        if seed > 0 {
            v[(seed * 5) % n] += 10.0;
        }
        orthogonalize(&mut v);
        if !normalize(&mut v) {
            continue;
        }
        for _ in 0..8 {
            let mut w = solve_shifted(m, shift, &v);
            // keep clustered vectors apart
            orthogonalize(&mut w);
            if !normalize(&mut w) {
                continue 'seed;
            }
            let change = v.iter().zip(&w).map(|(a, b)| (a - b).abs().min((a + b).abs())).fold(0.0, f64::max);
            v = w;
            if change < 1e-14 {
                break;
            }
        }
        // fix the sign so the first significant entry is positive
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-8) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        return Ok(v);
    }
    Err(Error::ConvergenceFailure("inverse iteration collapsed".into()))
}

fn normalize(v: &mut [f64]) -> bool {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(nrm.is_finite() && nrm > 0.0) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= nrm);
    true
}

/// Solve `(T - s I) x = b` with partial pivoting (tridiagonal LU with one
/// extra superdiagonal).
fn solve_shifted(m: &TridiagonalSym, s: f64, b: &[f64]) -> Vec<f64> {
    let n = m.len();
    if n == 1 {
        let d = m.diag[0] - s;
        return vec![b[0] / if d == 0.0 { f64::EPSILON } else { d }];
    }
    // rows stored as (sub, diag, sup, sup2)
    let mut dl: Vec<f64> = m.offdiag.clone();
    let mut d: Vec<f64> = m.diag.iter().map(|x| x - s).collect();
    let mut du: Vec<f64> = m.offdiag.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut rhs = b.to_vec();
    let tiny = f64::EPSILON * m.gershgorin().1.abs().max(1.0);
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
            rhs[i + 1] -= f * rhs[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] -= f * rhs[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

/// Second-order finite-difference form of `-d²/dx² + V`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSchrodinger {
    pub grid: Grid,
    pub matrix: TridiagonalSym,
    /// Wraparound coupling for periodic grids.
    pub corner: Option<f64>,
}

impl DiscreteSchrodinger {
    /// Lowest `k` eigenpairs. Periodic problems go through a dense symmetric
    /// eigensolver because of the corner entries.
    pub fn lowest(&self, k: usize) -> Result<EigResult> {
        match self.corner {
            None => eig_sym_tridiag(&self.matrix, k),
            Some(c) => dense_lowest(&self.matrix, c, k),
        }
    }

    /// Embed an eigenvector back onto the full grid (zero endpoints for
    /// Dirichlet grids).
    pub fn embed(&self, v: &[f64]) -> Vec<f64> {
        if self.corner.is_some() {
            return v.to_vec();
        }
        let mut out = Vec::with_capacity(v.len() + 2);
        out.push(0.0);
        out.extend_from_slice(v);
        out.push(0.0);
        out
    }
}

fn dense_lowest(t: &TridiagonalSym, corner: f64, k: usize) -> Result<EigResult> {
    let n = t.len();
    if k > n {
        return Err(Error::InvalidParameter(format!("asked for {k} eigenvalues of a {n}x{n} matrix")));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = t.diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = t.offdiag[i];
            m[(i + 1, i)] = t.offdiag[i];
        }
    }
    m[(0, n - 1)] += corner;
    m[(n - 1, 0)] += corner;
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut out = EigResult { eigenvalues: vec![], eigenvectors: vec![], residuals: vec![] };
    for &j in order.iter().take(k) {
        let lambda = eig.eigenvalues[j];
        let v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let hv = &m * eig.eigenvectors.column(j);
        let res = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        out.eigenvalues.push(lambda);
        out.eigenvectors.push(v);
        out.residuals.push(res);
    }
    Ok(out)
}

/// Central-difference matrix of `-d²/dx² + V`. The potential must be real.
pub fn discretize_schrodinger(v: &PotentialForm, grid: &Grid) -> Result<DiscreteSchrodinger> {
    if v.grid != *grid {
        return Err(Error::GridMismatch(format!("potential lives on {:?}, asked for {:?}", v.grid, grid)));
    }
    let range = v.active_range();
    for i in range.clone() {
        let z = v.v[i];
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("potential not finite at x = {}", grid.point(i))));
        }
        if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
            return Err(Error::ComplexPotential { x: grid.point(i), imag: z.im });
        }
    }
    let h2 = grid.spacing().powi(2);
    let diag: Vec<f64> = range.clone().map(|i| 2.0 / h2 + v.v[i].re).collect();
    let offdiag = vec![-1.0 / h2; diag.len() - 1];
    let corner = grid.is_periodic().then_some(-1.0 / h2);
    Ok(DiscreteSchrodinger { grid: *grid, matrix: TridiagonalSym::new(diag, offdiag)?, corner })
}

/// `-ψ'' + V(t) ψ = E ψ` on `[t_min, t_max]` with `ψ = 0` at both ends.
pub struct ShootingProblem<'a> {
    pub potential: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub t_min: f64,
    pub t_max: f64,
    /// Numerov steps across the window.
    pub steps: usize,
    /// Absolute energy tolerance of the final bisection.
    pub tolerance: f64,
}

impl<'a> ShootingProblem<'a> {
    pub fn new(potential: impl Fn(f64) -> f64 + Sync + 'a, t_min: f64, t_max: f64, steps: usize) -> Result<Self> {
        if !(t_min < t_max) {
            return Err(Error::InvalidParameter(format!("need t_min < t_max, got [{t_min}, {t_max}]")));
        }
        if steps < 16 {
            return Err(Error::InvalidParameter("shooting needs at least 16 steps".into()));
        }
        Ok(Self { potential: Box::new(potential), t_min, t_max, steps, tolerance: 1e-12 })
    }

    fn step(&self) -> f64 {
        (self.t_max - self.t_min) / self.steps as f64
    }

    fn samples(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.steps).map(|i| (self.potential)(self.t_min + i as f64 * h)).collect()
    }
}

/// Numerov integration of `ψ'' = (V - E) ψ` from one end; returns the profile
/// (rescaled on overflow) and the number of sign changes.
fn numerov(v: &[f64], e: f64, h: f64, reverse: bool, stop: usize) -> (Vec<f64>, usize) {
    let n = v.len();
    let h2 = h * h / 12.0;
    let idx = |j: usize| if reverse { n - 1 - j } else { j };
    let len = if reverse { n - stop } else { stop + 1 };
    let mut psi = vec![0.0; n];
    let g = |i: usize| 1.0 - h2 * (v[i] - e);
    psi[idx(0)] = 0.0;
    psi[idx(1)] = 1e-30;
    let mut nodes = 0;
    for j in 1..len - 1 {
        let (im, i0, ip) = (idx(j - 1), idx(j), idx(j + 1));
        let next = ((12.0 - 10.0 * g(i0)) * psi[i0] - g(im) * psi[im]) / g(ip);
        psi[ip] = next;
        if psi[ip] * psi[i0] < 0.0 || (psi[ip] == 0.0 && j + 1 < len - 1) {
            nodes += 1;
        }
        if next.abs() > 1e200 {
            for k in 0..=j + 1 {
                psi[idx(k)] *= 1e-200;
            }
        }
    }
    (psi, nodes)
}

/// `n`-th Dirichlet eigenvalue by node counting and bisection on the
/// Wronskian mismatch at the well minimum. Errors with `NotConfining` when the
/// level sits above the lower of the two edge potentials (a box state rather
/// than a bound state of the well).
pub fn shoot_bound_state(p: &ShootingProblem, n: usize) -> Result<(f64, Vec<f64>)> {
    let v = p.samples();
    let h = p.step();
    let last = v.len() - 1;
    let count = |e: f64| numerov(&v, e, h, false, last).1;
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let edge = v[0].min(v[last]);
    let mut lo = vmin;
    let mut hi = vmin + 1.0;
    let mut guard = 0;
    while count(hi) <= n {
        hi = vmin + 2.0 * (hi - vmin);
        guard += 1;
        if guard > 80 {
            return Err(Error::NotConfining(format!("no level {n} below {hi:e}")));
        }
    }
    // isolate level n: count(lo) <= n < count(hi), then shrink until exactly one level
    while count(lo) < n || count(hi) > n + 1 {
        let mid = 0.5 * (lo + hi);
        if count(mid) <= n {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    let m = v
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i.clamp(2, last - 2))
        .unwrap_or(last / 2);
    let mismatch = |e: f64| {
        let (l, _) = numerov(&v, e, h, false, m + 1);
        let (r, _) = numerov(&v, e, h, true, m - 1);
        let nl = l[..=m + 1].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let nr = r[m - 1..].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let dl = (l[m + 1] - l[m - 1]) / (2.0 * h);
        let dr = (r[m + 1] - r[m - 1]) / (2.0 * h);
        (dl * r[m] - dr * l[m]) / (nl * nr)
    };
    let energy = match find_root_bracketed(mismatch, lo, hi, 0.0) {
        Ok(e) => e,
        Err(Error::NoSignChange { .. }) => {
            // fall back to the node-count transition itself
            let (mut a, mut b) = (lo, hi);
            while b - a > p.tolerance.max(4.0 * f64::EPSILON * b.abs()) {
                let mid = 0.5 * (a + b);
                if count(mid) <= n {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        }
        Err(e) => return Err(e),
    };
    if energy > edge {
        return Err(Error::NotConfining(format!(
            "level {n} at {energy:e} lies above the edge potential {edge:e}"
        )));
    }
    let (mut profile, _) = numerov(&v, energy, h, false, m + 1);
    let (right, _) = numerov(&v, energy, h, true, m - 1);
    // least-squares match of value and slope, so a node at the matching point is harmless
    let len2 = 1.0 / ((energy - v[m]).abs() + 1.0);
    let dl = (profile[m + 1] - profile[m - 1]) / (2.0 * h);
    let dr = (right[m + 1] - right[m - 1]) / (2.0 * h);
    let ratio = (profile[m] * right[m] + dl * dr * len2) / (right[m].powi(2) + dr * dr * len2);
    for i in m + 1..=last {
        profile[i] = right[i] * ratio;
    }
    let peak = profile.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    profile.iter_mut().for_each(|x| *x /= peak);
    Ok((energy, profile))
}

/// Number of sign changes in a sampled profile, ignoring values below
/// `floor` in magnitude.
pub fn count_nodes(profile: &[f64], floor: f64) -> usize {
    let mut last = 0.0;
    let mut nodes = 0;
    for &x in profile {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != f64::signum(last) {
            nodes += 1;
        }
        last = x;
    }
    nodes
}

/// Composite Simpson rule on uniformly spaced samples.
pub fn integrate_simpson(f: &[f64], h: f64) -> Result<f64> {
    let n = f.len();
    if n < 3 || n % 2 == 0 {
        return Err(Error::EvenSampleCount(n));
    }
    let mut s = f[0] + f[n - 1];
    for (i, v) in f.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(s * h / 3.0)
}

/// Simpson integral of a complex function on `[a, b]` with `m` intervals
/// (`m` is rounded up to even).
pub fn integrate_simpson_fn(
    mut f: impl FnMut(f64) -> num_complex::Complex64,
    a: f64,
    b: f64,
    m: usize,
) -> num_complex::Complex64 {
    let m = (m.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += f(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// Root of `f` on `[lo, hi]` by false position (Illinois variant) with a
/// bisection safeguard. Stops when `|f| <= tol` or the bracket collapses.
pub fn find_root_bracketed(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let mut side = 0i8;
    for _ in 0..400 {
        let width = b - a;
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() <= tol || fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        // force a bisection when false position stalls
        if b - a > 0.5 * width {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if fm.abs() <= tol || fm == 0.0 {
                return Ok(mid);
            }
            if fm.signum() == fb.signum() {
                b = mid;
                fb = fm;
            } else {
                a = mid;
                fa = fm;
            }
            side = 0;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            let x = if fa.abs() < fb.abs() { a } else { b };
            let fx = f(x);
            if fx.abs() <= tol.max(0.0) || tol == 0.0 {
                return Ok(x);
            }
            return Err(Error::ConvergenceFailure(format!("bracket collapsed at {x} with |f| = {:e}", fx.abs())));
        }
    }
    Err(Error::ConvergenceFailure("root finder hit the iteration cap".into()))
}
