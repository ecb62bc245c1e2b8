use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_dirac::discrete::{DiffScheme, GridFunction};
use torus_dirac::fields::{AxProfile, AuProfile, FermiVelocity, GaugeField};
use torus_dirac::operators::*;
use torus_dirac::{Grid, TorusParams};

fn torus() -> TorusParams {
    TorusParams::new(0.5, 2.0).unwrap()
}

fn band_limited(grid: Grid, rng: &mut ChaCha8Rng, modes: i32) -> GridFunction {
    let coeffs: Vec<(i32, C64)> = (-modes..=modes)
        .map(|m| (m, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + (m * m) as f64)))
        .collect();
    GridFunction::from_fn(grid, |x| coeffs.iter().map(|(m, c)| c * C64::from_polar(1.0, *m as f64 * x)).sum())
}

fn random_spinors(grid: Grid, count: usize, seed: u64) -> Vec<SpinorGF> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SpinorGF::new(band_limited(grid, &mut rng, 8), band_limited(grid, &mut rng, 8)).unwrap())
        .collect()
}

fn generic_field() -> GaugeField {
    GaugeField::new(
        1.0,
        AxProfile::Sinusoidal { amplitude: C64::new(0.4, -0.3) },
        AuProfile::Quadratic { c2: C64::new(0.2, 0.1), c3: C64::new(-0.5, 0.0), rotated: false },
    )
}

fn worst_squaring(n: usize, scheme: DiffScheme, field: &GaugeField, conv: Convention) -> f64 {
    let p = torus();
    let g = Grid::periodic(n).unwrap();
    let op = DiracOperator::new(&p, field, 1, &g, SpinTerm::Printed).unwrap();
    let (plus, minus) = decouple_constant_vf(&p, field, 1, &g, conv).unwrap();
    random_spinors(g, 20, 7)
        .iter()
        .map(|s| squaring_defect(&op, &plus, &minus, s, scheme).unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn squaring_spectral_at_1024() {
    let d = worst_squaring(1024, DiffScheme::Spectral, &generic_field(), Convention::Derived);
    assert!(d < 1e-6, "defect {d:e}");
}

#[test]
fn squaring_central_converges_at_second_order() {
    let f = generic_field();
    let e: Vec<f64> = [128, 256, 512].iter().map(|&n| worst_squaring(n, DiffScheme::Central, &f, Convention::Derived)).collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.8, "{e:?}");
    }
}

#[test]
fn printed_coefficients_miss_the_squared_operator_when_au_varies() {
    let d = worst_squaring(512, DiffScheme::Spectral, &generic_field(), Convention::Printed);
    assert!(d > 1e-3, "defect {d:e}");
    // with A_u constant the printed and derived forms agree
    let flat = GaugeField::new(1.0, AxProfile::Zero, AuProfile::Quadratic { c2: C64::new(0.0, 0.0), c3: C64::new(0.3, 0.0), rotated: false });
    assert!(worst_squaring(512, DiffScheme::Spectral, &flat, Convention::Printed) < 1e-9);
}

fn hermiticity(field: &GaugeField, i_times: bool) -> HermiticityReport {
    let p = torus();
    let g = Grid::periodic(128).unwrap();
    let mut op = DiracOperator::new(&p, field, 1, &g, SpinTerm::Printed).unwrap().to_sparse();
    if i_times {
        op = op.scale(C64::new(0.0, 1.0));
    }
    let tests: Vec<Vec<C64>> = random_spinors(g, 6, 3).iter().map(|s| s.stacked()).collect();
    hermiticity_defect(&op, &p, &g, Measure::Flat, &tests).unwrap()
}

#[test]
fn i_times_dirac_is_hermitian_only_for_hermitizing_ax() {
    let herm = hermiticity(&GaugeField::hermitizing(1.0), true);
    assert!(herm.entry_defect < 1e-12 && herm.form_defect < 1e-10, "{herm:?}");
    let zero = hermiticity(&GaugeField::zero(), true);
    assert!(zero.entry_defect > 1e-3);
    let real = hermiticity(&GaugeField::zero().with_ax(AxProfile::Sinusoidal { amplitude: C64::new(1.0, 0.0) }), true);
    assert!(real.entry_defect > 1e-3);
}

#[test]
fn bare_dirac_matrix_is_never_hermitian() {
    // the derivative block is antisymmetric, so H_D itself always fails
    for f in [GaugeField::zero(), GaugeField::hermitizing(1.0)] {
        assert!(hermiticity(&f, false).entry_defect > 1.0);
    }
}

#[test]
fn pdfv_with_unit_velocity_is_constant_case() {
    let p = torus();
    let g = Grid::periodic(64).unwrap();
    let f = generic_field();
    let (plus, minus) = decouple_constant_vf(&p, &f, 2, &g, Convention::Derived).unwrap();
    let d = decouple_pdfv(&p, &f, 2, &FermiVelocity::Constant { v_f: 1.0 }, &g, Convention::Derived).unwrap();
    for i in 0..g.n {
        assert!((d.plus.sigma[i] - plus.sigma[i]).norm() < 1e-14);
        assert!((d.minus.rho[i] - minus.rho[i]).norm() < 1e-14);
    }
}

#[test]
fn cosine_velocity_vanishes_inside_periodic_grid() {
    let p = torus();
    let g = Grid::periodic(64).unwrap();
    let r = decouple_pdfv(&p, &GaugeField::zero(), 0, &FermiVelocity::Cosine, &g, Convention::Derived);
    assert!(matches!(r, Err(torus_dirac::Error::VelocityZero { .. })));
}

#[test]
fn first_order_readings() {
    let p = torus();
    let f = GaugeField::linear_au(1.0, 0.3, 1);
    let (m1, m2) = case2_first_order_pair(&p, &f, 1, 0.4, FirstOrderReading::Literal).unwrap();
    assert_eq!(m1, m2);
    let (n1, n2) = case2_first_order_pair(&p, &f, 1, 0.4, FirstOrderReading::SignFlipped).unwrap();
    assert_eq!(m1, n1);
    assert!((n2 - n1).norm() > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sectors_exchange_under_k_and_au_flip(k in -3i32..=3, re in -1.0f64..1.0, im in -1.0f64..1.0, amp in -1.0f64..1.0) {
        let p = torus();
        let g = Grid::periodic(48).unwrap();
        let f = GaugeField::new(
            1.3,
            AxProfile::Sinusoidal { amplitude: C64::new(0.0, amp) },
            AuProfile::Quadratic { c2: C64::new(re, im), c3: C64::new(0.2, 0.0), rotated: false },
        );
        let (plus, minus) = decouple_constant_vf(&p, &f, k, &g, Convention::Derived).unwrap();
        let (plus2, minus2) = decouple_constant_vf(&p, &f.negated_au(), -k, &g, Convention::Derived).unwrap();
        prop_assert_eq!(&plus.rho, &minus2.rho);
        prop_assert_eq!(&minus.rho, &plus2.rho);
        prop_assert_eq!(&plus.sigma, &minus2.sigma);
    }

    #[test]
    fn coefficients_are_periodic(x in -3.0f64..3.0) {
        let p = torus();
        let f = generic_field();
        let a = dirac_offdiag(&p, &f, x).unwrap();
        let b = dirac_offdiag(&p, &f, x + 2.0 * std::f64::consts::PI).unwrap();
        prop_assert!((a.w1 - b.w1).norm() < 1e-12 && (a.w2 - b.w2).norm() < 1e-12);
    }

    #[test]
    fn zero_field_w1_is_odd(x in 0.01f64..3.1) {
        let p = torus();
        let a = dirac_offdiag(&p, &GaugeField::zero(), x).unwrap();
        let b = dirac_offdiag(&p, &GaugeField::zero(), -x).unwrap();
        prop_assert!((a.w1 + b.w1).norm() < 1e-15);
    }
}
