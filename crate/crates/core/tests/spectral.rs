use std::f64::consts::PI;

use hyperdiff::chapman_enskog::{compute_parabolic_limit, exact_group_projection};
use hyperdiff::model::{damped_euler_2d, goldstein_kac_1d};
use hyperdiff::spectral::{
    evolve_hyperbolic, evolve_parabolic_phi, evolve_parabolic_psi, make_initial_data,
    read_snapshot, write_snapshot, InitialKind, Representation, SplitEvolver,
};
use hyperdiff::{Complex64, CutoffSpec, GridField, HyperbolicSystem, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(sigma: f64, center: Option<Vec<f64>>, weights: Option<Vec<f64>>) -> InitialKind {
    InitialKind::Gaussian {
        sigma,
        center,
        weights,
    }
}

fn l2(f: &GridField) -> f64 {
    f.lp_norm(2.0).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn shifted_gaussian_spectrum() {
    let g = PeriodicGrid::new(1, 256, 20.0).unwrap();
    let sigma = 1.3;
    let centered = make_initial_data(g, 1, &gaussian(sigma, None, None), 0)
        .unwrap()
        .field
        .to_frequency()
        .unwrap();
    let shifted = make_initial_data(g, 1, &gaussian(sigma, Some(vec![2.5]), None), 0)
        .unwrap()
        .field
        .to_frequency()
        .unwrap();
    let peak = centered.at(0)[0].norm();
    for p in 0..g.total() {
        let k = g.frequency_norm(p);
        let want = peak * (-0.5 * k * k * sigma * sigma).exp();
        assert!(
            (centered.at(p)[0].norm() - want).abs() < 1e-12 * peak,
            "k = {k}"
        );
        assert!(
            (shifted.at(p)[0].norm() - want).abs() < 1e-12 * peak,
            "k = {k}"
        );
    }
}

#[test]
fn evolution_is_a_linear_semigroup() {
    let sys = damped_euler_2d();
    let g = PeriodicGrid::new(2, 32, 12.0).unwrap();
    let a = make_initial_data(g, 3, &gaussian(1.0, None, Some(vec![1.0, 0.5, -0.3])), 0)
        .unwrap()
        .field;
    let b = make_initial_data(
        g,
        3,
        &InitialKind::RandomBand {
            k_min: 0.0,
            k_max: 2.0,
        },
        4,
    )
    .unwrap()
    .field;
    let once = evolve_hyperbolic(&sys, &a, 2.5).unwrap();
    let twice = evolve_hyperbolic(&sys, &evolve_hyperbolic(&sys, &a, 1.0).unwrap(), 1.5).unwrap();
    assert!(l2(&once.sub(&twice).unwrap()) < 1e-12 * l2(&once));

    let s = Complex64::new(0.7, -1.1);
    let lhs = evolve_hyperbolic(&sys, &a.add(&b.scaled(s)).unwrap(), 2.0).unwrap();
    let rhs = evolve_hyperbolic(&sys, &a, 2.0)
        .unwrap()
        .add(&evolve_hyperbolic(&sys, &b, 2.0).unwrap().scaled(s))
        .unwrap();
    assert!(l2(&lhs.sub(&rhs).unwrap()) < 1e-12 * l2(&lhs));
}

fn rk4(
    sys: &HyperbolicSystem,
    k: &[f64],
    v0: &[Complex64],
    t: f64,
    steps: usize,
) -> Vec<Complex64> {
    let e = sys.symbol(k).e;
    let f = |v: &[Complex64]| -> Vec<Complex64> { e.matvec(v).into_iter().map(|z| -z).collect() };
    let axpy = |v: &[Complex64], a: f64, w: &[Complex64]| -> Vec<Complex64> {
        v.iter().zip(w).map(|(x, y)| x + y * a).collect()
    };
    let h = t / steps as f64;
    let mut v = v0.to_vec();
    for _ in 0..steps {
        let k1 = f(&v);
        let k2 = f(&axpy(&v, h / 2.0, &k1));
        let k3 = f(&axpy(&v, h / 2.0, &k2));
        let k4 = f(&axpy(&v, h, &k3));
        for i in 0..v.len() {
            v[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    v
}

#[test]
fn per_frequency_evolution_matches_ode_solver() {
    let sys = damped_euler_2d();
    let g = PeriodicGrid::new(2, 32, 8.0).unwrap();
    let u0 = make_initial_data(
        g,
        3,
        &InitialKind::RandomBand {
            k_min: 0.0,
            k_max: 6.0,
        },
        9,
    )
    .unwrap()
    .field
    .to_frequency()
    .unwrap();
    let t = 1.7;
    let u = evolve_hyperbolic(&sys, &u0, t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..16 {
        let p = rng.random_range(0..g.total());
        let want = rk4(&sys, &g.frequency(p), &u0.at(p), t, 4000);
        let scale = u0.at(p).iter().map(|z| z.norm()).fold(1e-300, f64::max);
        for (a, b) in u.at(p).iter().zip(&want) {
            assert!((a - b).norm() < 1e-9 * scale, "p = {p}");
        }
    }
}

#[test]
fn euler_phi_is_the_heat_kernel() {
    let sys = damped_euler_2d();
    let pl = compute_parabolic_limit(&sys).unwrap();
    let g = PeriodicGrid::new(2, 128, 30.0).unwrap();
    let sigma: f64 = 1.5;
    let u0 = make_initial_data(g, 3, &gaussian(sigma, None, None), 0)
        .unwrap()
        .field;
    for t in [1.0, 4.0, 9.0] {
        let u = evolve_parabolic_phi(&pl, &u0, t).unwrap();
        let var = sigma * sigma + 2.0 * t;
        let exact = GridField::from_fn(g, 3, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let rho = (-r2 / (2.0 * var)).exp() / (2.0 * PI * var);
            vec![
                Complex64::new(rho, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ]
        });
        let err = u.sub(&exact).unwrap().lp_norm(f64::INFINITY).unwrap();
        assert!(err < 1e-10, "t = {t}: {err}");
    }
}

#[test]
fn drift_translates_the_profile() {
    // A = [[a, 1], [1, 0]], B = diag(0, 1): drift a, diffusion 1.
    let a = 0.4;
    let sys = HyperbolicSystem::from_real(
        &[vec![vec![a, 1.0], vec![1.0, 0.0]]],
        &[vec![0.0, 0.0], vec![0.0, 1.0]],
    )
    .unwrap();
    let pl = compute_parabolic_limit(&sys).unwrap();
    assert!((pl.c[0] - a).abs() < 1e-12);
    assert!((pl.d[0][0] - 1.0).abs() < 1e-12);
    let g = PeriodicGrid::new(1, 512, 40.0).unwrap();
    let sigma: f64 = 1.0;
    let u0 = make_initial_data(g, 2, &gaussian(sigma, None, None), 0)
        .unwrap()
        .field;
    let t = 6.0;
    let u = evolve_parabolic_phi(&pl, &u0, t).unwrap();
    let var = sigma * sigma + 2.0 * t;
    let exact = GridField::from_fn(g, 2, |x| {
        let y = x[0] - a * t;
        vec![
            Complex64::new((-y * y / (2.0 * var)).exp() / (2.0 * PI * var).sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ]
    });
    assert!(u.sub(&exact).unwrap().lp_norm(f64::INFINITY).unwrap() < 1e-10);
}

#[test]
fn psi_equals_phi_without_first_order_terms() {
    let sys = HyperbolicSystem::from_real(
        &[vec![vec![0.0, 0.0], vec![0.0, 1.0]]],
        &[vec![0.0, 0.0], vec![0.0, 1.0]],
    )
    .unwrap();
    let pl = compute_parabolic_limit(&sys).unwrap();
    assert!(pl.p1.iter().all(|m| m.max_abs() < 1e-14));
    let g = PeriodicGrid::new(1, 128, 20.0).unwrap();
    let u0 = make_initial_data(g, 2, &gaussian(1.0, None, Some(vec![1.0, 1.0])), 0)
        .unwrap()
        .field;
    let phi = evolve_parabolic_phi(&pl, &u0, 3.0).unwrap();
    let psi = evolve_parabolic_psi(&pl, &u0, 3.0).unwrap();
    assert!(l2(&phi.sub(&psi).unwrap()) < 1e-14);
}

#[test]
fn split_of_projected_low_band_data_has_no_remainder() {
    let sys = goldstein_kac_1d();
    let pl = compute_parabolic_limit(&sys).unwrap();
    let g = PeriodicGrid::new(1, 256, 120.0).unwrap();
    let cut = CutoffSpec::new(0.3, 20.0).unwrap();
    let mut u0 = GridField::zeros(g, 2, Representation::Frequency);
    for p in 0..g.total() {
        let s = g.frequency_norm(p);
        if s < 0.14 {
            let proj = exact_group_projection(&sys, &g.frequency(p)).unwrap();
            let w = (-s * s * 100.0).exp();
            let v: Vec<Complex64> =
                proj.matvec(&[Complex64::new(w, 0.0), Complex64::new(0.3 * w, 0.0)]);
            u0.set_at(p, &v);
        }
    }
    let ev = SplitEvolver::new(&sys, g, cut, &pl.p0).unwrap();
    let (u, _, u2) = ev.split(&u0, 5.0).unwrap();
    assert!(l2(&u2) < 1e-10 * l2(&u));
}

#[test]
fn high_band_data_has_no_low_part() {
    let sys = damped_euler_2d();
    let pl = compute_parabolic_limit(&sys).unwrap();
    let g = PeriodicGrid::new(2, 32, 10.0).unwrap();
    let cut = CutoffSpec::new(0.5, 20.0).unwrap();
    let u0 = make_initial_data(
        g,
        3,
        &InitialKind::RandomBand {
            k_min: 0.6,
            k_max: 2.5,
        },
        3,
    )
    .unwrap()
    .field;
    let ev = SplitEvolver::new(&sys, g, cut, &pl.p0).unwrap();
    let (u, u1, u2) = ev.split(&u0, 2.0).unwrap();
    assert!(l2(&u1) < 1e-13 * l2(&u));
    assert!(l2(&u2.sub(&u).unwrap()) < 1e-13 * l2(&u));
}

#[test]
fn goldstein_kac_remainder_decays_exponentially() {
    let sys = goldstein_kac_1d();
    let pl = compute_parabolic_limit(&sys).unwrap();
    let g = PeriodicGrid::new(1, 2048, 100.0).unwrap();
    let cut = CutoffSpec::new(0.4, 20.0).unwrap();
    let u0 = make_initial_data(g, 2, &gaussian(0.5, None, None), 0)
        .unwrap()
        .field;
    let ev = SplitEvolver::new(&sys, g, cut, &pl.p0).unwrap();
    let ts = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];
    let logs: Vec<f64> = ts
        .iter()
        .map(|&t| l2(&ev.split(&u0, t).unwrap().2).ln())
        .collect();
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let rate = -ts
        .iter()
        .zip(&logs)
        .map(|(t, l)| (t - mt) * (l - ml))
        .sum::<f64>()
        / ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
    assert!(rate >= 0.02, "rate {rate}");
}

#[test]
fn first_order_correction_decays_faster() {
    let sys = goldstein_kac_1d();
    let pl = compute_parabolic_limit(&sys).unwrap();
    let g = PeriodicGrid::new(1, 1024, 200.0).unwrap();
    let u0 = make_initial_data(g, 2, &gaussian(1.0, None, None), 0)
        .unwrap()
        .field;
    let ts: Vec<f64> = (0..8).map(|i| 10.0 * 1.4f64.powi(i)).collect();
    let diff: Vec<f64> = ts
        .iter()
        .map(|&t| {
            l2(&evolve_parabolic_phi(&pl, &u0, t)
                .unwrap()
                .sub(&evolve_parabolic_psi(&pl, &u0, t).unwrap())
                .unwrap())
        })
        .collect();
    let s = slope(&ts, &diff);
    assert!(s <= -0.75 + 0.2, "slope {s}");
}

#[test]
fn snapshot_round_trip() {
    let g = PeriodicGrid::new(2, 16, 5.0).unwrap();
    let u = make_initial_data(
        g,
        3,
        &InitialKind::RandomBand {
            k_min: 0.0,
            k_max: 3.0,
        },
        1,
    )
    .unwrap()
    .field;
    let mut buf = Vec::new();
    write_snapshot(&u, 2.25, &mut buf).unwrap();
    let (back, t) = read_snapshot(buf.as_slice()).unwrap();
    assert_eq!(t, 2.25);
    assert_eq!(back, u);
    assert!(read_snapshot(&buf[..buf.len() - 1]).is_err());
}
