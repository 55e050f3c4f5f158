mod common;

use rand::Rng;
use slowfast::dynsys::{
    birkhoff_step_sum, displacement_path, n_t, roof_sums, suspension_flow, Displacement, DyadicPoint, SuspensionPoint,
    ToyDoubling, ZExtension,
};
use slowfast::geometry::evolve_boundary;

#[test]
fn n_t_brackets_t_between_section_times() {
    let toy = ToyDoubling::new(0.3).unwrap();
    for i in 0..10_000u64 {
        let mut rng = common::rng(i);
        let w = DyadicPoint::from_key(rng.random());
        let t = 50.0 * rng.random::<f64>();
        let n = n_t(&toy, &w, t).unwrap() as usize;
        // section times summed left to right from the roof formula
        let mut tk = 0.0;
        let mut p = w;
        let mut times = vec![0.0];
        for _ in 0..=n {
            tk += 1.0 * (1.0 + 0.3 * (std::f64::consts::TAU * p.x()).sin());
            times.push(tk);
            p = p.shift();
        }
        assert!(times[n] <= t && t < times[n + 1], "t={t} n={n}");
        assert_eq!(roof_sums(&toy, &w, n + 1).unwrap(), times);
    }
}

#[test]
fn step_sum_is_the_walk_of_leading_bits() {
    let toy = ToyDoubling::new(0.3).unwrap();
    for i in 0..500u64 {
        let w = DyadicPoint::from_key(common::rng(i).random());
        let mut p = w;
        let mut s = 0i64;
        for _ in 0..200 {
            s += if p.x() < 0.5 { 1 } else { -1 };
            p = p.shift();
        }
        assert_eq!(birkhoff_step_sum(&toy, &w, 200).unwrap(), s);
    }
}

#[test]
fn suspension_flow_is_a_semigroup() {
    let toy = ToyDoubling::new(0.3).unwrap();
    for i in 0..10_000u64 {
        let mut rng = common::rng(i);
        let p = SuspensionPoint { base: DyadicPoint::from_key(rng.random()), cell: 3, height: 0.2 };
        let s = 20.0 * rng.random::<f64>();
        let t = 20.0 * rng.random::<f64>();
        let once = suspension_flow(&toy, &p, s + t).unwrap();
        let twice = suspension_flow(&toy, &suspension_flow(&toy, &p, s).unwrap(), t).unwrap();
        assert_eq!(once.base, twice.base);
        assert_eq!(once.cell, twice.cell);
        assert!((once.height - twice.height).abs() < 1e-9);
        let n = n_t(&toy, &p.base, p.height + s + t).unwrap();
        assert_eq!(once.cell - p.cell, birkhoff_step_sum(&toy, &p.base, n).unwrap());
    }
}

#[test]
fn billiard_suspension_agrees_with_the_flow() {
    let base = common::billiard();
    let table = base.table();
    for i in 0..500u64 {
        let mut rng = common::rng(i);
        let b = common::boundary_point(&base, &mut rng);
        let t = 3.0 * rng.random::<f64>();
        let s = suspension_flow(&base, &SuspensionPoint::on_section(b, 0), t).unwrap();
        let via_suspension = s.base.translate(s.cell).advance_free(table, s.height);
        let direct = evolve_boundary(&b, t, table).unwrap();
        assert!(via_suspension.distance(&direct) < 1e-8, "gap {}", via_suspension.distance(&direct));
    }
}

#[test]
fn toy_step_has_mean_zero_and_roof_mean_scale() {
    let toy = ToyDoubling::scaled(0.3, 1.7).unwrap();
    let mut rng = common::rng(77);
    let n = 1_000_000;
    let (mut steps, mut roofs) = (0.0, 0.0);
    for _ in 0..n {
        let tr = toy.transition(&toy.sample_base(&mut rng)).unwrap();
        steps += tr.step as f64;
        roofs += tr.roof;
    }
    assert!((steps / n as f64).abs() < 3e-3);
    // sd of τ is 1.7 * 0.3 / √2
    assert!((roofs / n as f64 - 1.7).abs() < 3.0 * 1.7 * 0.3 / (2.0 * n as f64).sqrt());
}

#[test]
fn displacement_variance_is_t_over_tau_bar() {
    let toy = ToyDoubling::scaled(0.3, 2.0).unwrap();
    let eps = 1e-3;
    let n = 4000;
    let finals: Vec<f64> = (0..n)
        .map(|i| {
            let w = toy.sample_base(&mut common::rng(i));
            let p = displacement_path(&toy, &w, &[0.5, 1.0], eps, Displacement::Birkhoff, i).unwrap();
            p.values[1][0]
        })
        .collect();
    let (m, v) = common::mean_var(&finals);
    let target = 1.0 / 2.0;
    assert!(m.abs() < 3.0 * (target / n as f64).sqrt());
    assert!((v - target).abs() < 3.0 * target * (2.0 / n as f64).sqrt() + 2.0 * eps);
}

#[test]
fn cell_label_and_section_label_stay_close() {
    let base = common::billiard();
    let reach = (0.4 + base.table().horizon_bound().unwrap()).ceil() + 1.0;
    let eps = 1e-3;
    let grid: Vec<f64> = (1..=50).map(|k| k as f64 * 0.02).collect();
    for i in 0..50u64 {
        let w = common::boundary_point(&base, &mut common::rng(i));
        let s = displacement_path(&base, &w, &grid, eps, Displacement::Birkhoff, i).unwrap();
        let p = displacement_path(&base, &w, &grid, eps, Displacement::Psi, i).unwrap();
        for (a, b) in s.values.iter().zip(&p.values) {
            assert!((a[0] - b[0]).abs() <= eps.sqrt() * reach + 1e-12);
        }
    }
}
