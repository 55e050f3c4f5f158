//! Green-Kubo variance of a centered observable on the toy model, with the
//! truncation bound and its behaviour under lag doubling.

use slowfast::dynsys::ToyDoubling;
use slowfast::slowfast::{Amplitude, Envelope, Fbar, PerturbationSpec, Profile};
use slowfast::stats::{estimate_h, green_kubo};

fn main() -> slowfast::Result<()> {
    let toy = ToyDoubling::new(0.3)?;
    let spec = PerturbationSpec {
        dim: 2,
        envelope: Envelope::Power { p: 5.0 },
        amplitude: vec![Amplitude::constant(1.0), Amplitude::constant(0.5)],
        mix: Some(vec![vec![1.0, 0.4], vec![0.0, 1.0]]),
        profile: vec![Profile::Cosine { harmonic: 1, phase: 0.0 }, Profile::Cosine { harmonic: 2, phase: 0.5 }],
        centered: true,
        offsets: None,
        fbar: Fbar::Zero,
        eps0: 0.5,
    }
    .prepare(&toy, 1)?;
    let x = [0.2, -0.1];
    for lags in [50, 100, 200] {
        let g = green_kubo(&spec, &toy, &x, lags, 10, 20_000, 2)?;
        println!(
            "lags {lags:>3}: G = [{:.4} {:.4}; {:.4} {:.4}], min eigenvalue {:.4}, tail bound {:.2e}",
            g.value[0],
            g.value[1],
            g.value[2],
            g.value[3],
            g.min_eigenvalue(),
            g.tail_bound
        );
    }
    let h = estimate_h(&spec, &toy, &x, 20_000, 10, 3)?;
    println!("drift h = {:?} +- {:?} (centered, so near zero)", h.value, h.stderr);
    Ok(())
}
