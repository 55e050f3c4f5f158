//! Two-sample Kolmogorov-Smirnov comparison of path ensembles.

use slowfast::limitproc::{sample_limit_law, LimitKind, LimitLawParams};
use slowfast::slowfast::{uniform_grid, Fbar};
use slowfast::stats::{compare_to_limit, ks_two_sample};

fn main() -> slowfast::Result<()> {
    let params = LimitLawParams::constant(1.0, 1.0, vec![1.0], vec![0.0])?;
    let grid = uniform_grid(1.0, 1000);
    let record = [0.5, 1.0];
    let a = sample_limit_law(&params, LimitKind::Birkhoff, &Fbar::Zero, &[0.0], &grid, &record, 1000, 1)?;
    let b = sample_limit_law(&params, LimitKind::Birkhoff, &Fbar::Zero, &[0.0], &grid, &record, 1000, 2)?;
    for r in compare_to_limit(&a, &b, &record, 0.12, 0.05)? {
        println!("t={}: KS {:.4?}, critical {:.4}, {}", r.time, r.ks, r.critical, if r.pass { "PASS" } else { "FAIL" });
    }

    let x: Vec<f64> = a.iter().map(|p| p.values[1][0]).collect();
    let shifted: Vec<f64> = b.iter().map(|p| p.values[1][0] + 0.3).collect();
    let ks = ks_two_sample(&x, &shifted, 0.05)?;
    println!("shifted by 0.3: KS {:.4}, reject {}", ks.statistic, ks.reject);
    Ok(())
}
