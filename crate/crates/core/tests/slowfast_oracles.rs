mod common;

use rand::Rng;
use slowfast::dynsys::{DyadicPoint, Fiber, SuspensionPoint, ToyDoubling, ZExtension};
use slowfast::limitproc::{sample_limit_law, LimitKind, LimitLawParams};
use slowfast::slowfast::{
    birkhoff_integral, discrete_comparison, f_of, gronwall_check, integrate_averaged, integrate_perturbed, max_step,
    perturbed_birkhoff, uniform_grid, Amplitude, Envelope, FastState, Fbar, Normalization, PerturbationSpec, Profile,
};
use slowfast::stats::{exponent_fit, ks_two_sample};

fn wavy_spec() -> PerturbationSpec {
    PerturbationSpec {
        dim: 2,
        envelope: Envelope::Power { p: 5.0 },
        amplitude: vec![
            Amplitude { base: 1.0, amp: 0.4, wave: vec![1.0, -0.5], phase: 0.2 },
            Amplitude { base: 0.7, amp: 0.2, wave: vec![0.3, 2.0], phase: 0.0 },
        ],
        mix: Some(vec![vec![1.0, 0.3], vec![-0.2, 1.0]]),
        profile: vec![Profile::FiberSine { harmonic: 3 }, Profile::Cosine { harmonic: 2, phase: 0.4 }],
        centered: false,
        offsets: None,
        fbar: Fbar::SineDamping { rate: 0.5 },
        eps0: 0.5,
    }
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn rk4_converges_at_fourth_order() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let spec = wavy_spec();
    let eps = 1.0;
    let grid = [5.0, 10.0];
    let h0 = max_step(&toy, eps);
    for i in 0..5u64 {
        let start = SuspensionPoint::on_section(DyadicPoint::from_key(common::rng(i).random()), 0);
        let run = |dt: f64| integrate_perturbed(&spec, &toy, &[0.3, -0.1], &start, eps, &grid, Some(dt)).unwrap();
        let reference = run(h0 / 256.0);
        let e1 = gap(run(h0 / 8.0).last().unwrap(), reference.last().unwrap());
        let e2 = gap(run(h0 / 16.0).last().unwrap(), reference.last().unwrap());
        let order = (e1 / e2).log2();
        assert!((3.5..4.6).contains(&order), "observed order {order} ({e1:.3e}, {e2:.3e})");
    }
}

#[test]
fn zero_forcing_follows_the_damped_pendulum() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let mut spec = PerturbationSpec::scalar(Envelope::Cells { radius: 0 }, 0.0, Profile::Constant { value: 1.0 }, false, Fbar::SineDamping { rate: 0.7 });
    spec.amplitude[0] = Amplitude::constant(0.0);
    let grid = uniform_grid(2.0, 20);
    let x0 = 1.3f64;
    let start = SuspensionPoint::on_section(DyadicPoint::from_key(5), 0);
    let x = integrate_perturbed(&spec, &toy, &[x0], &start, 1e-2, &grid, None).unwrap();
    let w = integrate_averaged(&spec.fbar, &[x0], &grid, 1e-3).unwrap();
    for (k, &t) in grid.iter().enumerate() {
        // tan(x/2) decays like exp(-rate t)
        let exact = 2.0 * ((x0 / 2.0).tan() * (-0.7 * t).exp()).atan();
        assert!((x.values[k][0] - exact).abs() < 1e-10);
        assert!((x.values[k][0] - w.values[k][0]).abs() < 1e-10);
    }
}

#[test]
fn constant_forcing_is_a_straight_line() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let spec = PerturbationSpec::scalar(Envelope::Cells { radius: 10_000 }, 1.5, Profile::Constant { value: 2.0 }, false, Fbar::Zero);
    let grid = uniform_grid(1.0, 10);
    let start = SuspensionPoint::on_section(DyadicPoint::from_key(9), 0);
    let x = integrate_perturbed(&spec, &toy, &[0.25], &start, 1e-3, &grid, None).unwrap();
    for (k, &t) in grid.iter().enumerate() {
        assert!((x.values[k][0] - 0.25 - 3.0 * t).abs() < 1e-12);
    }
}

#[test]
fn fiber_integral_matches_refined_simpson() {
    let spec = wavy_spec();
    let big_f = f_of(&spec);
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let x = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
        let coord: f64 = rng.random();
        let cell = rng.random_range(-3..=3);
        let roof = 0.7 + 0.6 * rng.random::<f64>();
        let mut got = [0.0; 2];
        big_f.eval(&x, coord, cell, roof, &mut got);
        let n = 10_000;
        let h = roof / n as f64;
        let mut want = [0.0; 2];
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let mut v = [0.0; 2];
            spec.eval(&x, &FastState { coord, cell, height: k as f64 * h, roof }, &mut v);
            want[0] += w * h / 3.0 * v[0];
            want[1] += w * h / 3.0 * v[1];
        }
        assert!(gap(&got, &want) < 1e-9, "{got:?} vs {want:?}");
    }
}

#[test]
fn discrete_comparison_gap_is_linear_in_eps() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let spec = PerturbationSpec {
        envelope: Envelope::Cells { radius: 1_000_000 },
        ..wavy_spec()
    };
    let grid = uniform_grid(1.0, 50);
    let eps: Vec<f64> = (4..=9).map(|k| 0.5f64.powi(k)).collect();
    let errors: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let mut gaps: Vec<f64> = (0..16u64)
                .map(|i| {
                    let omega = DyadicPoint::from_key(common::rng(i).random());
                    let start = SuspensionPoint::on_section(omega, 0);
                    let x = integrate_perturbed(&spec, &toy, &[0.3, -0.1], &start, e, &grid, None).unwrap();
                    let d = discrete_comparison(&spec, &toy, &[0.3, -0.1], &omega, e, &grid).unwrap();
                    x.values.iter().zip(&d.xtilde.values).map(|(a, b)| gap(a, b)).fold(0.0, f64::max)
                })
                .collect();
            common::median(&mut gaps)
        })
        .collect();
    let fit = exponent_fit(&eps, &errors).unwrap();
    assert!((fit.slope - 1.0).abs() < 0.15, "slope {} from {errors:?}", fit.slope);
}

#[test]
fn perturbed_birkhoff_reduces_to_the_plain_integral() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let mut spec = wavy_spec();
    for a in &mut spec.amplitude {
        a.amp = 0.0;
    }
    let eps = 1e-3;
    let start = SuspensionPoint { base: DyadicPoint::from_key(11), cell: 0, height: 0.3 };
    let u = perturbed_birkhoff(&spec, &toy, &start, eps, &[1.0], 1).unwrap();
    for i in 0..2 {
        let g = |f: &Fiber<DyadicPoint>, s: f64| {
            let mut v = [0.0; 2];
            spec.eval(&[0.0, 0.0], &FastState { coord: toy.coord(&f.base), cell: f.cell, height: s, roof: f.roof }, &mut v);
            v[i]
        };
        let b = birkhoff_integral(&toy, g, &start, 1.0 / eps, Normalization::InvQuarter).unwrap();
        assert!((u.values[0][i] - b).abs() < 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn perturbed_birkhoff_is_stable_under_piece_refinement() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let spec = wavy_spec();
    let start = SuspensionPoint::on_section(DyadicPoint::from_key(21), 0);
    let grid = [0.5, 1.0];
    let run = |p| perturbed_birkhoff(&spec, &toy, &start, 1e-3, &grid, p).unwrap();
    let (u1, u4, u16) = (run(1), run(4), run(16));
    let d1 = gap(u1.last().unwrap(), u16.last().unwrap());
    let d4 = gap(u4.last().unwrap(), u16.last().unwrap());
    assert!(d1 < 1e-6 && d4 < 1e-10, "{d1:.3e} {d4:.3e}");
}

#[test]
fn unit_roof_integral_is_the_horizon() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let start = SuspensionPoint { base: DyadicPoint::from_key(2), cell: 0, height: 0.4 };
    let v = birkhoff_integral(&toy, |_, _| 1.0, &start, 1234.5, Normalization::None).unwrap();
    assert!((v - 1234.5).abs() < 1e-9);
}

#[test]
fn hopf_ratio_within_one_cell() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let t = 1e6;
    for i in 0..3u64 {
        let start = SuspensionPoint::on_section(DyadicPoint::from_key(common::rng(i).random()), 0);
        // ν(g) = E[τ cos²(2πx)] = 1/2 and ν(h) = E[τ] = 1
        let g = |f: &Fiber<DyadicPoint>, _| {
            if f.cell == 0 {
                (std::f64::consts::TAU * f.base.x()).cos().powi(2)
            } else {
                0.0
            }
        };
        let h = |f: &Fiber<DyadicPoint>, _| if f.cell == 0 { 1.0 } else { 0.0 };
        let a = birkhoff_integral(&toy, g, &start, t, Normalization::None).unwrap();
        let b = birkhoff_integral(&toy, h, &start, t, Normalization::None).unwrap();
        assert!(b > 0.0);
        assert!((a / b / 0.5 - 1.0).abs() < 0.05, "ratio {}", a / b);
    }
}

#[test]
fn cell_occupation_follows_the_local_time_law() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let n = 2000;
    let horizon = 1e4;
    let dynamics: Vec<f64> = (0..n as u64)
        .map(|i| {
            let start = SuspensionPoint::on_section(DyadicPoint::from_key(common::rng(i).random()), 0);
            let g = |f: &Fiber<DyadicPoint>, _| if f.cell == 0 { 1.0 } else { 0.0 };
            birkhoff_integral(&toy, g, &start, horizon, Normalization::InvSqrt).unwrap()
        })
        .collect();
    let params = LimitLawParams::constant(1.0, 1.0, vec![0.0], vec![1.0]).unwrap();
    let grid = uniform_grid(1.0, 10_000);
    let limit = sample_limit_law(&params, LimitKind::Integrable, &Fbar::Zero, &[0.0], &grid, &[1.0], n, 17).unwrap();
    let limit: Vec<f64> = limit.iter().map(|p| p.values[0][0]).collect();
    let ks = ks_two_sample(&dynamics, &limit, 0.05).unwrap();
    assert!(!ks.reject, "KS {} vs critical {}", ks.statistic, ks.critical);
}

#[test]
fn gronwall_bound_holds_for_random_specs() {
    let toy = ToyDoubling::new(0.3).unwrap();
    let base = common::billiard();
    for i in 0..10u64 {
        let mut rng = common::rng(500 + i);
        let spec = PerturbationSpec {
            amplitude: vec![
                Amplitude { base: rng.random_range(-1.0..1.0), amp: rng.random(), wave: vec![rng.random_range(-2.0..2.0), 1.0], phase: 0.0 },
                Amplitude::constant(rng.random_range(-1.0..1.0)),
            ],
            fbar: Fbar::Linear { matrix: vec![vec![-rng.random::<f64>(), 0.2], vec![0.0, -0.5]] },
            ..wavy_spec()
        };
        let x0 = [rng.random::<f64>(), rng.random::<f64>()];
        let s = SuspensionPoint::on_section(DyadicPoint::from_key(rng.random()), 0);
        assert!(gronwall_check(&spec, &toy, &x0, &s, 1e-2, 1.0, None).unwrap().holds(1e-9));
        let b = SuspensionPoint::on_section(common::boundary_point(&base, &mut rng), 0);
        assert!(gronwall_check(&spec, &base, &x0, &b, 1e-2, 1.0, None).unwrap().holds(1e-9));
    }
}
