use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Transition, ZExtension};
use crate::error::{Error, Result};
use crate::rng::mix64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Point of the doubling map, stored as a 64-bit window onto an infinite
/// binary expansion.
///
/// Bits past the window are generated on demand by hashing `(key, block)`, so
/// an orbit never runs out of precision and is a pure function of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPoint {
    pub key: u64,
    /// Number of shifts applied so far.
    pub pos: u64,
    /// Bits `pos .. pos + 64` of the expansion, most significant first.
    pub window: u64,
}

impl DyadicPoint {
    /// Point whose expansion starts with the 53 bits of `x`.
    pub fn from_unit(x: f64, key: u64) -> Self {
        let top = ((x.clamp(0.0, 1.0 - f64::EPSILON / 2.0)) * (1u64 << 53) as f64) as u64;
        let low = block(key, 0) & ((1 << 11) - 1);
        Self { key, pos: 0, window: (top << 11) | low }
    }

    pub fn from_key(key: u64) -> Self {
        Self { key, pos: 0, window: block(key, 0) }
    }

    /// The point as a real in `[0, 1)`, truncated to 53 bits.
    pub fn x(&self) -> f64 {
        (self.window >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn shift(&self) -> Self {
        let i = self.pos + 64;
        let bit = (block(self.key, i / 64) >> (63 - i % 64)) & 1;
        Self { key: self.key, pos: self.pos + 1, window: (self.window << 1) | bit }
    }

    /// First binary digit: 0 iff `x < 1/2`.
    pub fn lead_bit(&self) -> u64 {
        self.window >> 63
    }
}

fn block(key: u64, b: u64) -> u64 {
    mix64(key ^ mix64(b.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Doubling map `x -> 2x mod 1` with step `+1` on `[0,1/2)`, `-1` on
/// `[1/2,1)` and roof `c (1 + α sin 2πx)`.
///
/// `S_nφ` is a simple symmetric random walk under Lebesgue measure, so
/// `Σ = 1` and `τ̄ = c` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyDoubling {
    pub alpha: f64,
    #[serde(default = "one")]
    pub roof_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl ToyDoubling {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::scaled(alpha, 1.0)
    }

    pub fn scaled(alpha: f64, roof_scale: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParam(format!("roof amplitude {alpha} not in [0,1)")));
        }
        if !(roof_scale.is_finite() && roof_scale > 0.0) {
            return Err(Error::InvalidParam(format!("roof scale {roof_scale} must be positive")));
        }
        Ok(Self { alpha, roof_scale })
    }

    pub fn tau(&self, x: f64) -> f64 {
        self.roof_scale * (1.0 + self.alpha * (std::f64::consts::TAU * x).sin())
    }
}

impl ZExtension for ToyDoubling {
    type Point = DyadicPoint;

    #[inline]
    fn transition(&self, p: &DyadicPoint) -> Result<Transition<DyadicPoint>> {
        Ok(Transition {
            next: p.shift(),
            step: if p.lead_bit() == 0 { 1 } else { -1 },
            roof: self.tau(p.x()),
        })
    }

    fn sample_base<R: Rng + ?Sized>(&self, rng: &mut R) -> DyadicPoint {
        DyadicPoint::from_key(rng.random())
    }

    fn coord(&self, p: &DyadicPoint) -> f64 {
        p.x()
    }

    fn roof_bounds(&self) -> (f64, f64) {
        (self.roof_scale * (1.0 - self.alpha), self.roof_scale * (1.0 + self.alpha))
    }

    fn name(&self) -> &str {
        "toy"
    }

    /// Midpoint rule: exact for trigonometric polynomials of degree < n.
    fn base_nodes(&self, n: usize) -> Option<Vec<DyadicPoint>> {
        Some((0..n).map(|i| DyadicPoint::from_unit((i as f64 + 0.5) / n as f64, i as u64)).collect())
    }

    fn tau_bar_exact(&self) -> Option<f64> {
        Some(self.roof_scale)
    }

    fn sigma_exact(&self) -> Option<f64> {
        Some(1.0)
    }
}
