use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;

use crate::path::{PathMeta, PathSample};
use crate::rng::{domain, stream_rng, StreamRng};

/// Brownian motion with variance `sigma` per unit time on `grid`, started at
/// 0 at time 0.
pub fn simulate_bm(sigma: f64, grid: &[f64], seed: u64) -> PathSample {
    let mut rng = stream_rng(seed, domain::LIMIT_DRIVER, 0);
    let values = simulate_bm_with(&mut rng, sigma, grid);
    PathSample::scalar(grid.to_vec(), values, PathMeta { eps: 0.0, seed, model: "bm".into() })
        .expect("grid validated by caller")
}

/// As [`simulate_bm`], drawing from `rng`.
pub fn simulate_bm_with<R: Rng + ?Sized>(rng: &mut R, sigma: f64, grid: &[f64]) -> Vec<f64> {
    let sd = sigma.max(0.0).sqrt();
    let mut out = Vec::with_capacity(grid.len());
    let mut b = 0.0;
    let mut t = 0.0;
    for &s in grid {
        let z: f64 = rng.sample(StandardNormal);
        b += sd * (s - t).max(0.0).sqrt() * z;
        t = s;
        out.push(b);
    }
    out
}

/// Standard `d`-dimensional Brownian motion sampled lazily at arbitrary
/// times. Times past the last known one extend the path forward; times in
/// between are filled by Brownian-bridge sampling, so every set of queries
/// has the exact joint Gaussian law.
pub struct LazyBrownian {
    dim: usize,
    rng: StreamRng,
    known: BTreeMap<u64, Vec<f64>>,
}

impl LazyBrownian {
    pub fn new(dim: usize, rng: StreamRng) -> Self {
        let mut known = BTreeMap::new();
        known.insert(0f64.to_bits(), vec![0.0; dim]);
        Self { dim, rng, known }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `B_t` for `t >= 0`.
    pub fn at(&mut self, t: f64) -> Vec<f64> {
        assert!(t >= 0.0, "Brownian time must be nonnegative");
        // nonnegative floats order like their bit patterns; + 0.0 maps -0.0 to 0.0
        let key = (t + 0.0).to_bits();
        if let Some(v) = self.known.get(&key) {
            return v.clone();
        }
        let (&lk, lv) = self.known.range(..key).next_back().expect("0 is known");
        let (t0, v0) = (f64::from_bits(lk), lv.clone());
        let value: Vec<f64> = match self.known.range(key..).next() {
            None => {
                let sd = (t - t0).sqrt();
                v0.iter().map(|a| a + sd * self.rng.sample::<f64, _>(StandardNormal)).collect()
            }
            Some((&rk, rv)) => {
                let t1 = f64::from_bits(rk);
                let lam = (t - t0) / (t1 - t0);
                let sd = ((t - t0) * (t1 - t) / (t1 - t0)).sqrt();
                let rv = rv.clone();
                v0.iter()
                    .zip(&rv)
                    .map(|(a, b)| a + lam * (b - a) + sd * self.rng.sample::<f64, _>(StandardNormal))
                    .collect()
            }
        };
        self.known.insert(key, value.clone());
        value
    }

    /// Drops stored points before `t` except the last one, which anchors
    /// later queries at or after `t`.
    pub fn forget_before(&mut self, t: f64) {
        let key = (t + 0.0).to_bits();
        let anchor = self.known.range(..=key).next_back().map(|(k, v)| (*k, v.clone()));
        let mut keep = self.known.split_off(&key);
        if let Some((k, v)) = anchor {
            keep.insert(k, v);
        }
        self.known = keep;
    }
}
