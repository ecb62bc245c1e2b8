use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_dirac::discrete::PotentialForm;
use torus_dirac::numerics::*;
use torus_dirac::Grid;

fn box_levels(n: usize, count: usize) -> Vec<f64> {
    let g = Grid::dirichlet(n, 0.0, std::f64::consts::PI).unwrap();
    let v = PotentialForm::from_real_fn(g, "free", |_| 0.0);
    discretize_schrodinger(&v, &g).unwrap().lowest(count).unwrap().eigenvalues
}

#[test]
fn particle_in_a_box() {
    let l = box_levels(4000, 5);
    for (k, v) in l.iter().enumerate() {
        let want = ((k + 1) * (k + 1)) as f64;
        assert!((v - want).abs() < 1e-5 * want, "{k}: {v}");
    }
}

#[test]
fn box_converges_at_second_order() {
    let errs: Vec<f64> = [200, 400, 800].iter().map(|&n| (box_levels(n, 3)[2] - 9.0).abs()).collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{errs:?}");
    }
}

fn oscillator(n: usize) -> EigResult {
    let g = Grid::dirichlet(n, -10.0, 10.0).unwrap();
    let v = PotentialForm::from_real_fn(g, "x^2", |x| x * x);
    discretize_schrodinger(&v, &g).unwrap().lowest(3).unwrap()
}

#[test]
fn harmonic_oscillator() {
    let r = oscillator(6000);
    for (k, v) in r.eigenvalues.iter().enumerate() {
        let want = 2.0 * k as f64 + 1.0;
        assert!((v - want).abs() < 1e-5 * want, "{k}: {v}");
    }
    assert!(r.max_residual() < 1e-8, "{}", r.max_residual());
}

#[test]
fn oscillator_converges_at_second_order() {
    let e: Vec<f64> = [500, 1000, 2000].iter().map(|&n| (oscillator(n).eigenvalues[2] - 5.0).abs()).collect();
    for w in e.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{e:?}");
    }
}

#[test]
fn random_tridiagonal_against_dense_and_sturm_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 50;
    let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let m = TridiagonalSym::new(diag.clone(), off.clone()).unwrap();
    let r = eig_sym_tridiag(&m, n).unwrap();
    let dense = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let mut reference: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
    reference.sort_by(f64::total_cmp);
    for (i, (a, b)) in r.eigenvalues.iter().zip(&reference).enumerate() {
        assert!((a - b).abs() < 1e-10, "{i}: {a} vs {b}");
        assert_eq!(m.count_below(a - 1e-9), i);
        assert_eq!(m.count_below(a + 1e-9), i + 1);
    }
    assert!(r.max_residual() < 1e-8);
}

#[test]
fn simpson_fourth_order_slope() {
    let err = |m: usize| {
        let h = std::f64::consts::PI / m as f64;
        let f: Vec<f64> = (0..=m).map(|i| (i as f64 * h).sin()).collect();
        (integrate_simpson(&f, h).unwrap() - 2.0).abs()
    };
    let (e1, e2) = (err(16), err(64));
    let slope = (e1 / e2).ln() / 4f64.ln();
    assert!((3.8..=4.2).contains(&slope), "{slope}");
    assert!(matches!(integrate_simpson(&[0.0; 4], 0.1), Err(torus_dirac::Error::EvenSampleCount(4))));
}

#[test]
fn simpson_complex_callable() {
    let v = integrate_simpson_fn(|t| C64::new(t.cos(), t.sin()), 0.0, 1.0, 64);
    let want = C64::new(1f64.sin(), 1.0 - 1f64.cos());
    assert!((v - want).norm() < 1e-9);
}

#[test]
fn shooting_agrees_with_matrix_solver() {
    let p = ShootingProblem::new(|x| x * x, -10.0, 10.0, 6000).unwrap();
    let m = oscillator(6000);
    for k in 0..3 {
        let (e, profile) = shoot_bound_state(&p, k).unwrap();
        assert!((e - m.eigenvalues[k]).abs() < 1e-5 * m.eigenvalues[k]);
        assert_eq!(count_nodes(&profile, 1e-8), k);
    }
}

#[test]
fn roots() {
    let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
    assert!((r - 2f64.sqrt()).abs() < 1e-13);
    let r = find_root_bracketed(f64::cos, 1.0, 2.0, 1e-14).unwrap();
    assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    assert!(matches!(find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(torus_dirac::Error::NoSignChange { .. })));
}
