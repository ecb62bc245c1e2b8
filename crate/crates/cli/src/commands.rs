use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use torus_dirac::analytic::case1::{
    calibrate_case1_reading, case1_energy, case1_shooting_level, case1_transform_chain, case1_wavefunction, mathieu_real_branch,
    morse_depth,
};
use torus_dirac::analytic::case2::{
    case2_hyp_params, case2_quantize, case2_wavefunction, rosen_morse_reference_levels, truncated_interval,
};
use torus_dirac::discrete::PotentialForm;
use torus_dirac::geometry::{christoffel_at, compare_spin_connection, frame_identity_defect};
use torus_dirac::numerics::discretize_schrodinger;
use torus_dirac::pseudoherm::{sqrt_a_minus_1, veff_case2_closed};
use torus_dirac::{AuProfile, Error, Grid, C64};

use crate::checks::{self, ShootingWindow};
use crate::config::{constrained_radius, Artifact, Case, ScenarioConfig};
use crate::output::{fmt_f64, Sink, Table};
use crate::report::{CheckRecord, RunReport};

fn wants(cfg: &ScenarioConfig, a: Artifact) -> bool {
    cfg.outputs.contains(&a)
}

fn finish(cfg: &ScenarioConfig, sink: &Sink, report: &RunReport, name: &str) -> Result<()> {
    if wants(cfg, Artifact::Report) {
        sink.write_text(name, &report.render())?;
    }
    Ok(())
}

fn window(cfg: &ScenarioConfig) -> ShootingWindow {
    ShootingWindow { t_min: cfg.case1.t_min, t_max: cfg.case1.t_max, steps: cfg.case1.steps }
}

pub fn cmd_geometry(cfg: &ScenarioConfig, sink: &Sink) -> Result<RunReport> {
    let p = cfg.torus()?;
    let mut report = RunReport::new("geometry");
    report.flag("a", p.a);
    report.flag("c", p.c);
    for w in p.warnings() {
        report.flag("warning", w);
    }
    report.push(checks::frame_identity(&p));
    report.push(checks::christoffel_fd(&p));
    report.push(checks::spin_connection_gap(&p));

    let grid = Grid::periodic(cfg.grid.n)?;
    let mut t = Table::new(&["x", "R", "gamma_u_xu", "gamma_x_uu", "spin_printed", "spin_derived", "spin_difference", "frame_defect"]);
    let (mut xs, mut printed, mut derived) = (Vec::new(), Vec::new(), Vec::new());
    for x in grid.points() {
        let ch = christoffel_at(&p, x)?;
        let sc = compare_spin_connection(&p, x)?;
        t.push_numeric(&[x, p.radius(x), ch.gamma_2_12, ch.gamma_1_22, sc.printed, sc.derived, sc.difference, frame_identity_defect(&p, x)]);
        xs.push(x);
        printed.push(sc.printed);
        derived.push(sc.derived);
    }
    if wants(cfg, Artifact::Table) {
        sink.write_table("geometry.csv", &t)?;
    }
    if wants(cfg, Artifact::Series) {
        sink.write_series("spin_printed.csv", &xs, &printed)?;
        sink.write_series("spin_derived.csv", &xs, &derived)?;
    }
    finish(cfg, sink, &report, "geometry_report.txt")?;
    Ok(report)
}

/// Options that only `spectrum` understands.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectrumOptions {
    /// Replace the scenario by a particle in a box on `[0, π]`.
    pub box_test: bool,
}

fn complex_hint(e: Error) -> anyhow::Error {
    match e {
        Error::ComplexPotential { .. } => {
            anyhow::anyhow!("{e}; this branch is not Hermitian, run `verify` for its residual checks instead")
        }
        other => other.into(),
    }
}

pub fn cmd_spectrum(cfg: &ScenarioConfig, sink: &Sink, opts: SpectrumOptions) -> Result<RunReport> {
    let mut report = RunReport::new("spectrum");
    let header = ["n", "lambda", "residual", "analytic", "rel_deviation", "a2"];
    let mut t = Table::new(&header);
    if opts.box_test {
        report.flag("scenario", "box");
        let g = Grid::dirichlet(cfg.grid.n, 0.0, std::f64::consts::PI)?;
        let v = PotentialForm::from_real_fn(g, "free", |_| 0.0);
        let r = discretize_schrodinger(&v, &g)?.lowest(4)?;
        for (k, (l, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
            let exact = ((k + 1) * (k + 1)) as f64;
            t.push_numeric(&[(k + 1) as f64, *l, *res, exact, (l - exact).abs() / exact, 0.0]);
            report.push(CheckRecord::below(&format!("box level {}", k + 1), "plumbing", g.n, (l - exact).abs() / exact, 1e-3));
        }
    } else {
        match cfg.case {
            Case::ConstantVf => spectrum_case1(cfg, &mut t, &mut report)?,
            Case::Pdfv => spectrum_case2(cfg, &mut t, &mut report)?,
        }
    }
    if wants(cfg, Artifact::Table) {
        sink.write_table("spectrum.csv", &t)?;
    }
    if wants(cfg, Artifact::Series) {
        let ns: Vec<f64> = t.rows.iter().map(|r| r[0].parse().unwrap_or(f64::NAN)).collect();
        let ls: Vec<f64> = t.rows.iter().map(|r| r[1].parse().unwrap_or(f64::NAN)).collect();
        sink.write_series("spectrum_series.csv", &ns, &ls)?;
    }
    finish(cfg, sink, &report, "spectrum_report.txt")?;
    Ok(report)
}

fn spectrum_case1(cfg: &ScenarioConfig, t: &mut Table, report: &mut RunReport) -> Result<()> {
    let (a, e, alpha) = (cfg.torus.a, cfg.field.charge, cfg.case1.alpha);
    report.flag("scenario", "constant velocity, Morse chain on the constrained branch");
    report.flag("c_constrained", constrained_radius(a));
    let m = mathieu_real_branch(&cfg.constrained_torus()?, e)?;
    let chain = case1_transform_chain(&m, alpha)?;
    let bound = morse_depth(&m).re.sqrt() - 0.5;
    let w = window(cfg);
    for n in 0..cfg.case1.levels {
        if n as f64 >= bound {
            report.flag("unbound_level", n);
            continue;
        }
        let analytic = case1_energy(n, alpha, &m)?.energy_sq.re;
        let fine = case1_shooting_level(&chain, n, w.t_min / alpha, w.t_max / alpha, w.steps).map_err(complex_hint)?;
        let coarse = case1_shooting_level(&chain, n, w.t_min / alpha, w.t_max / alpha, w.steps / 2).map_err(complex_hint)?;
        let dev = (fine - analytic).abs() / analytic.abs();
        t.push_numeric(&[n as f64, fine, (fine - coarse).abs(), analytic, dev, 0.0]);
        report.push(CheckRecord::below(&format!("Case 1 level n={n}"), "constant-velocity level formula", w.steps, dev, 1e-4));
    }
    Ok(())
}

fn spectrum_case2(cfg: &ScenarioConfig, t: &mut Table, report: &mut RunReport) -> Result<()> {
    let p = cfg.torus()?;
    let (e, c2) = (cfg.field.charge, cfg.case2);
    report.flag("scenario", "cosine velocity, Rosen-Morse II on the truncated interval");
    report.flag("delta", c2.delta);
    let grid = truncated_interval(c2.delta, c2.n_grid)?;
    for n in 0..c2.levels {
        let (a2, analytic) = match case2_quantize(n, c2.alpha, c2.c1) {
            Ok(sol) => (sol.a2(e), sol.epsilon_n * sol.epsilon_n),
            Err(err) => {
                report.push(CheckRecord::errored(&format!("Case 2 level n={n}"), "hypergeometric quantization a = -n", c2.n_grid, err));
                (cfg.field.a2, f64::NAN)
            }
        };
        let v = veff_case2_closed(&p, a2, e, &grid).map_err(complex_hint)?;
        let r = discretize_schrodinger(&v, &grid)?.lowest(n + 1)?;
        let lam = r.eigenvalues[n];
        let dev = (analytic - lam).abs() / lam.abs();
        t.push_numeric(&[n as f64, lam, r.residuals[n], analytic, dev, a2]);
        if analytic.is_finite() {
            report.push(CheckRecord::below(&format!("Case 2 level n={n}"), "hypergeometric quantization a = -n", c2.n_grid, dev, 1e-3));
        }
    }
    Ok(())
}

pub fn cmd_verify(cfg: &ScenarioConfig, sink: &Sink, negative_control: bool) -> Result<RunReport> {
    let p = cfg.torus()?;
    let field = cfg.gauge_field()?;
    let (e, k, n) = (cfg.field.charge, cfg.quantum.k, cfg.grid.n);
    let mut report = RunReport::new("verify");
    report.flag("negative_control", negative_control);
    report.flag("spin_term", "printed");
    report.flag("convention", "derived");
    report.flag("ax", field.ax_kind());
    report.flag("au", field.au_kind());

    report.push(checks::frame_identity(&p));
    report.push(checks::christoffel_fd(&p));
    for r in checks::squaring(&p, &field, k, n) {
        report.push(r);
    }
    // the A_x switch is tested with A_u = 0; the configured A_u is reported alongside
    let bare = field.clone().with_au(AuProfile::Zero);
    report.push(checks::hermiticity(&p, &bare, k, 128, &format!("{}, A_u = 0", field.ax_kind())));
    let mut full = checks::hermiticity(&p, &field, k, 128, &format!("{}, {}", field.ax_kind(), field.au_kind()));
    full.passed = full.value.is_finite();
    full.note = "reported only; a complex A_u is pseudo-Hermitian at best".into();
    report.push(full);
    let scale = if negative_control { 1.01 } else { 1.0 };
    for r in checks::factorization(p.a, scale) {
        report.push(r);
    }
    for r in checks::intertwining(p.a, cfg.case1.c1, &p, cfg.field.a2, 2 * n) {
        report.push(r);
    }
    report.push(checks::rosen_morse_equivalence(&p, cfg.field.a2, e, k));
    let w = window(cfg);
    for r in checks::case1_levels(p.a, e, cfg.case1.alpha, cfg.case1.levels, w) {
        report.push(r);
    }
    report.push(checks::case1_shooting_order(p.a, e, cfg.case1.alpha, 0, w));
    for r in checks::case1_wavefunctions(p.a, e, cfg.case1.alpha, cfg.case1.levels, w) {
        report.push(r);
    }
    report.push(checks::case1_truncation(p.a, e, cfg.case1.alpha));
    let c2 = cfg.case2;
    for r in checks::case2_levels(&p, e, c2.alpha, c2.c1, c2.levels, c2.delta, c2.n_grid) {
        report.push(r);
    }
    for r in checks::case2_wavefunctions(&p, e, c2.alpha, c2.c1, c2.levels.min(3)) {
        report.push(r);
    }
    for r in checks::special_functions() {
        report.push(r);
    }
    for r in checks::solvers() {
        report.push(r);
    }

    if wants(cfg, Artifact::Table) {
        let mut t = Table::new(&["name", "passed", "value", "tolerance", "order"]);
        for r in &report.records {
            t.push(vec![
                format!("\"{}\"", r.name),
                r.passed.to_string(),
                fmt_f64(r.value),
                fmt_f64(r.tolerance),
                r.order.map_or(String::new(), fmt_f64),
            ]);
        }
        sink.write_table("verify.csv", &t)?;
    }
    finish(cfg, sink, &report, "verify_report.txt")?;
    Ok(report)
}

/// Parameter range for `sweep`.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            bail!("sweep needs at least one point");
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            bail!("sweep range must be finite");
        }
        if self.points == 1 {
            return Ok(vec![self.from]);
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.from + step * i as f64).collect())
    }
}

pub const SWEEP_LEVELS: usize = 4;

/// One sweep row: value, constrained c, C₂, four levels and a residual.
fn sweep_row(base: &ScenarioConfig, parameter: &str, value: f64) -> Result<Vec<f64>> {
    let mut cfg = base.clone();
    cfg.set_parameter(parameter, value)?;
    cfg.validate().with_context(|| format!("{parameter} = {value}"))?;
    let a = cfg.torus.a;
    let e = cfg.field.charge;
    let c2 = sqrt_a_minus_1(a) / (a.powi(4) * e);
    let mut row = vec![value, if a < 1.0 { constrained_radius(a) } else { f64::NAN }, c2.re, c2.im];
    match cfg.case {
        Case::ConstantVf => {
            let m = mathieu_real_branch(&cfg.constrained_torus()?, e)?;
            let bound = morse_depth(&m).re.sqrt() - 0.5;
            for n in 0..SWEEP_LEVELS {
                let level = case1_energy(n, cfg.case1.alpha, &m).map_or(f64::NAN, |s| s.energy_sq.re);
                row.push(if (n as f64) < bound { level } else { f64::NAN });
            }
            row.push(checks::factorization_defect(a, 1.0, 1000)?);
        }
        Case::Pdfv => {
            for n in 0..SWEEP_LEVELS {
                row.push(case2_quantize(n, cfg.case2.alpha, cfg.case2.c1).map_or(f64::NAN, |s| s.epsilon_n * s.epsilon_n));
            }
            row.push(checks::rosen_morse_equivalence(&cfg.torus()?, cfg.field.a2, e, cfg.quantum.k).value);
        }
    }
    Ok(row)
}

pub fn cmd_sweep(cfg: &ScenarioConfig, sink: &Sink, spec: &SweepSpec) -> Result<Table> {
    let values = spec.values()?;
    // reject unknown names before spawning any work
    cfg.clone().set_parameter(&spec.parameter, values[0])?;
    let rows: Vec<Result<Vec<f64>>> = values.par_iter().map(|&v| sweep_row(cfg, &spec.parameter, v)).collect();
    let mut t = Table::new(&["value", "c_constrained", "re_C2", "im_C2", "level0", "level1", "level2", "level3", "residual"]);
    for r in rows {
        t.push_numeric(&r?);
    }
    if wants(cfg, Artifact::Table) {
        sink.write_table(&format!("sweep_{}.csv", spec.parameter), &t)?;
    }
    Ok(t)
}

pub fn cmd_analytic(cfg: &ScenarioConfig, sink: &Sink) -> Result<RunReport> {
    let mut report = RunReport::new("analytic");
    let (a, e) = (cfg.torus.a, cfg.field.charge);

    let alpha = cfg.case1.alpha;
    let m = mathieu_real_branch(&cfg.constrained_torus()?, e)?;
    let chain = case1_transform_chain(&m, alpha)?;
    report.flag("case1_depth_K", morse_depth(&m).re);
    report.flag("case1_truncation_error", chain.truncation_error);
    let mut t1 = Table::new(&["n", "re_energy", "im_energy", "residual"]);
    for n in 0..cfg.case1.levels {
        let sol = case1_energy(n, alpha, &m)?;
        let cal = calibrate_case1_reading(&sol, &chain, -4.0 / alpha, 40.0 / alpha, 4000)?;
        let best = cal.residuals.iter().find(|r| r.0 == cal.best).map_or(f64::NAN, |r| r.1);
        t1.push_numeric(&[n as f64, sol.energy_sq.re, sol.energy_sq.im, best]);
    }

    let c2 = cfg.case2;
    let mut t2 = Table::new(&["n", "re_epsilon", "im_epsilon", "residual"]);
    let mut ground = None;
    for n in 0..c2.levels {
        match case2_quantize(n, c2.alpha, c2.c1) {
            Ok(sol) => {
                t2.push_numeric(&[n as f64, sol.epsilon_n, 0.0, sol.residual]);
                if n == 0 {
                    ground = Some(sol);
                }
            }
            Err(err) => report.push(CheckRecord::errored(&format!("Case 2 root n={n}"), "hypergeometric quantization a = -n", 0, err)),
        }
    }
    let h = case2_hyp_params(c2.alpha, c2.c1, ground.map_or(0.0, |s| s.epsilon_n));
    report.flag("case2_a_h", h.a_h);
    report.flag("case2_b_h", h.b_h);
    report.flag("case2_beta", h.beta);
    let p = cfg.torus()?;
    let refs = rosen_morse_reference_levels(&p, cfg.field.a2, e, c2.levels);
    report.flag("rosen_morse_reference_levels", format!("{refs:?}"));
    report.flag("a", a);

    if wants(cfg, Artifact::Table) {
        sink.write_table("analytic_case1.csv", &t1)?;
        sink.write_table("analytic_case2.csv", &t2)?;
    }
    if wants(cfg, Artifact::Series) {
        let sol = case1_energy(0, alpha, &m)?;
        let reading = calibrate_case1_reading(&sol, &chain, -4.0 / alpha, 40.0 / alpha, 4000)?.best;
        let ts: Vec<f64> = (0..400).map(|i| (-4.0 + 44.0 * i as f64 / 399.0) / alpha).collect();
        let psi: Vec<C64> = ts.iter().map(|&t| case1_wavefunction(&sol, reading, t)).collect();
        let mut w = Table::new(&["x", "re_phi", "im_phi"]);
        for (x, v) in ts.iter().zip(&psi) {
            w.push_numeric(&[*x, v.re, v.im]);
        }
        sink.write_table("wavefunction_case1_n0.csv", &w)?;
        if let Some(sol) = ground {
            let g = truncated_interval(0.05, 400)?;
            let phi = case2_wavefunction(&sol, &g)?;
            let mut w = Table::new(&["x", "re_phi", "im_phi"]);
            for (x, v) in g.points().iter().zip(&phi.values) {
                w.push_numeric(&[*x, v.re, v.im]);
            }
            sink.write_table("wavefunction_case2_n0.csv", &w)?;
        }
    }
    finish(cfg, sink, &report, "analytic_report.txt")?;
    Ok(report)
}
