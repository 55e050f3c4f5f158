//! Diffusive scaling of the cell label on the doubling-map suspension:
//! `ε^{1/2} S_{n_{1/ε}}` has variance close to `Σ/τ̄`.

use slowfast::dynsys::{displacement_path, Displacement, ToyDoubling, ZExtension};
use slowfast::rng::stream_rng;

fn main() -> slowfast::Result<()> {
    let toy = ToyDoubling::scaled(0.3, 2.0)?;
    let n = 4000;
    for eps in [1e-2, 1e-3, 1e-4] {
        let mut finals = Vec::with_capacity(n);
        for i in 0..n as u64 {
            let w = toy.sample_base(&mut stream_rng(3, 0, i));
            let p = displacement_path(&toy, &w, &[1.0], eps, Displacement::Birkhoff, i)?;
            finals.push(p.values[0][0]);
        }
        let mean = finals.iter().sum::<f64>() / n as f64;
        let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        println!("eps {eps:e}: mean {mean:+.4}, variance {var:.4} (target {:.4})", 1.0 / toy.roof_scale);
    }
    Ok(())
}
