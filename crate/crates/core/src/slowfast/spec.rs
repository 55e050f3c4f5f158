use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::quad::gauss_legendre_fiber;
use crate::dynsys::ZExtension;
use crate::error::{Error, Result};
use crate::rng::{domain, stream_rng};

/// Largest supported slow dimension.
pub const MAX_DIM: usize = 8;

/// Samples used for Monte Carlo centering when the base has no exact rule.
pub const CENTERING_SAMPLES: usize = 1 << 20;

/// Nodes of the deterministic centering rule on bases that provide one.
const CENTERING_NODES: usize = 4096;

/// Per-cell envelope `w(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    /// `(1 + |m|)^{-p}`
    Power { p: f64 },
    /// `1` on `|m| <= radius`, `0` elsewhere.
    Cells { radius: u32 },
}

impl Envelope {
    #[inline]
    pub fn weight(&self, m: i64) -> f64 {
        match *self {
            Self::Power { p } => (1.0 + m.unsigned_abs() as f64).powf(-p),
            Self::Cells { radius } => {
                if m.unsigned_abs() <= radius as u64 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether `Σ_m (1+|m|)^q w(m)` converges.
    pub fn moment_finite(&self, q: f64) -> bool {
        match *self {
            Self::Power { p } => p - q > 1.0,
            Self::Cells { .. } => true,
        }
    }

    /// `Σ_{|m| > cut} w(m)`.
    pub fn tail_mass(&self, cut: u64) -> f64 {
        match *self {
            Self::Power { p } => {
                if p <= 1.0 {
                    return f64::INFINITY;
                }
                // explicit terms, then the integral bound for the rest
                let stop = cut + 100_000;
                let head: f64 = (cut + 1..=stop).map(|m| (1.0 + m as f64).powf(-p)).sum();
                2.0 * (head + (1.0 + stop as f64).powf(1.0 - p) / (p - 1.0))
            }
            Self::Cells { radius } => 2.0 * (radius as u64).saturating_sub(cut) as f64,
        }
    }

    /// `Σ_m w(m)`.
    pub fn total_mass(&self) -> f64 {
        self.weight(0) + self.tail_mass(0)
    }
}

/// Slowly varying amplitude `base + amp sin(<wave, x> + phase)` of one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub base: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub wave: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

impl Amplitude {
    pub fn constant(base: f64) -> Self {
        Self { base, amp: 0.0, wave: Vec::new(), phase: 0.0 }
    }

    #[inline]
    fn arg(&self, x: &[f64]) -> f64 {
        self.wave.iter().zip(x).map(|(k, xi)| k * xi).sum::<f64>() + self.phase
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.amp == 0.0 {
            self.base
        } else {
            self.base + self.amp * self.arg(x).sin()
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.amp.abs() * self.wave.iter().map(|k| k * k).sum::<f64>().sqrt()
    }
}

/// Fast observable `u(ω, s)` of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `cos(2π k c(ω) + phase)` of the base coordinate.
    Cosine {
        harmonic: u32,
        #[serde(default)]
        phase: f64,
    },
    /// `sin(2π k s / τ(ω))` along the roof fiber.
    FiberSine { harmonic: u32 },
}

impl Profile {
    fn fiber_dependent(&self) -> bool {
        matches!(self, Self::FiberSine { .. })
    }

    #[inline]
    fn eval(&self, coord: f64, height: f64, roof: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Cosine { harmonic, phase } => (TAU * harmonic as f64 * coord + phase).cos(),
            Self::FiberSine { harmonic } => (TAU * harmonic as f64 * height / roof).sin(),
        }
    }
}

/// Drift `f̄` of the averaged equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fbar {
    #[default]
    Zero,
    Constant { value: Vec<f64> },
    Linear { matrix: Vec<Vec<f64>> },
    /// `f̄_i(x) = -rate sin(x_i)`
    SineDamping { rate: f64 },
}

impl Fbar {
    #[inline]
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            Self::Constant { value } => out.copy_from_slice(value),
            Self::Linear { matrix } => {
                for (o, row) in out.iter_mut().zip(matrix) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Self::SineDamping { rate } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = -rate * xi.sin();
                }
            }
        }
    }

    /// `Df̄(x)`, row-major `d x d`.
    pub fn jacobian(&self, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            Self::Zero | Self::Constant { .. } => {}
            Self::Linear { matrix } => {
                for (i, row) in matrix.iter().enumerate() {
                    out[i * d..(i + 1) * d].copy_from_slice(row);
                }
            }
            Self::SineDamping { rate } => {
                for (i, xi) in x.iter().enumerate() {
                    out[i * d + i] = -rate * xi.cos();
                }
            }
        }
    }

    /// Global Lipschitz constant in the Euclidean norm.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Zero | Self::Constant { .. } => 0.0,
            Self::Linear { matrix } => {
                let d = matrix.len();
                let m = nalgebra::DMatrix::from_fn(d, d, |i, j| matrix[i][j]);
                m.singular_values().max()
            }
            Self::SineDamping { rate } => rate.abs(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    fn check(&self, d: usize) -> Result<()> {
        let ok = match self {
            Self::Zero | Self::SineDamping { .. } => true,
            Self::Constant { value } => value.len() == d,
            Self::Linear { matrix } => matrix.len() == d && matrix.iter().all(|r| r.len() == d),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("fbar does not match dimension {d}")))
        }
    }
}

/// Fast state seen by `f`: base coordinate, cell, height in the fiber, roof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastState {
    pub coord: f64,
    pub cell: i64,
    pub height: f64,
    pub roof: f64,
}

/// The pair `(f, f̄)` of the built-in family
/// `f(x, (ω, m, s)) = w(m) diag(A(x)) Q (u(ω, s) - c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub dim: usize,
    pub envelope: Envelope,
    pub amplitude: Vec<Amplitude>,
    /// Constant mixing matrix `Q`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<Vec<Vec<f64>>>,
    pub profile: Vec<Profile>,
    /// Subtract `c` so that `∫ f(x, ·) dν = 0`.
    #[serde(default)]
    pub centered: bool,
    /// Centering offsets; computed by [`Self::prepare`] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(default)]
    pub fbar: Fbar,
    /// Decay exponent `ε₀` of the cell-moment condition.
    #[serde(default = "default_eps0")]
    pub eps0: f64,
}

fn default_eps0() -> f64 {
    0.5
}

/// Per-fiber constants of `f`.
#[derive(Debug, Clone, Copy)]
pub struct FiberCache {
    w: f64,
    fixed: [f64; MAX_DIM],
    coord: f64,
    roof: f64,
}

impl PerturbationSpec {
    /// Scalar spec with a constant amplitude.
    pub fn scalar(envelope: Envelope, amplitude: f64, profile: Profile, centered: bool, fbar: Fbar) -> Self {
        Self {
            dim: 1,
            envelope,
            amplitude: vec![Amplitude::constant(amplitude)],
            mix: None,
            profile: vec![profile],
            centered,
            offsets: None,
            fbar,
            eps0: default_eps0(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidParam(format!("dimension {d} not in 1..={MAX_DIM}")));
        }
        if self.amplitude.len() != d || self.profile.len() != d {
            return Err(Error::InvalidParam(format!("amplitude/profile lists must have length {d}")));
        }
        if self.amplitude.iter().any(|a| a.amp != 0.0 && a.wave.len() != d) {
            return Err(Error::InvalidParam(format!("wave vectors must have length {d}")));
        }
        if let Some(q) = &self.mix {
            if q.len() != d || q.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidParam(format!("mix must be {d}x{d}")));
            }
        }
        if let Some(c) = &self.offsets {
            if c.len() != d {
                return Err(Error::InvalidParam(format!("offsets must have length {d}")));
            }
        }
        if let Envelope::Power { p } = self.envelope {
            if !(p > 0.0) {
                return Err(Error::InvalidParam(format!("envelope exponent {p} must be positive")));
            }
        }
        if !(self.eps0 > 0.0) {
            return Err(Error::InvalidParam("eps0 must be positive".into()));
        }
        self.fbar.check(d)
    }

    /// Cell-moment condition `Σ_m (1+|m|)^{2(1+ε₀)} w(m) < ∞`.
    pub fn satisfies_decay(&self) -> bool {
        self.envelope.moment_finite(2.0 * (1.0 + self.eps0))
    }

    /// `f(x, ·)` is ν-integrable.
    pub fn integrable(&self) -> bool {
        self.envelope.moment_finite(0.0)
    }

    /// Same spec multiplied by `c` (both `f` and its offsets scale).
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        for a in &mut s.amplitude {
            a.base *= c;
            a.amp *= c;
        }
        s
    }

    /// Fills in the centering offsets for the given base.
    ///
    /// `c_i = E[∫_0^τ u_i ds] / E[τ]`, from the base's exact rule when it has
    /// one and from `2^20` Monte Carlo samples otherwise.
    pub fn prepare<Z: ZExtension>(&self, model: &Z, seed: u64) -> Result<Self> {
        self.check()?;
        let mut s = self.clone();
        if !s.centered {
            s.offsets = Some(vec![0.0; s.dim]);
        } else if s.offsets.is_none() {
            s.offsets = Some(centering_offsets(&s.profile, model, seed)?);
        }
        Ok(s)
    }

    fn offsets_or_zero(&self, i: usize) -> f64 {
        self.offsets.as_ref().map_or(0.0, |c| c[i])
    }

    #[inline]
    pub fn weight(&self, cell: i64) -> f64 {
        self.envelope.weight(cell)
    }

    /// Caches the per-fiber factors.
    #[inline]
    pub fn fiber(&self, coord: f64, cell: i64, roof: f64) -> FiberCache {
        let mut fixed = [0.0; MAX_DIM];
        for (i, p) in self.profile.iter().enumerate() {
            if !p.fiber_dependent() {
                fixed[i] = p.eval(coord, 0.0, roof) - self.offsets_or_zero(i);
            }
        }
        FiberCache { w: self.weight(cell), fixed, coord, roof }
    }

    /// `Q (u - c)` at `height` in the fiber.
    #[inline]
    fn profile_vector(&self, cache: &FiberCache, height: f64, out: &mut [f64; MAX_DIM]) {
        let d = self.dim;
        let mut u = cache.fixed;
        for (i, p) in self.profile.iter().enumerate() {
            if p.fiber_dependent() {
                u[i] = p.eval(cache.coord, height, cache.roof) - self.offsets_or_zero(i);
            }
        }
        match &self.mix {
            None => *out = u,
            Some(q) => {
                for i in 0..d {
                    out[i] = (0..d).map(|j| q[i][j] * u[j]).sum();
                }
            }
        }
    }

    /// `f(x, state)` into `out`.
    #[inline]
    pub fn eval_cached(&self, x: &[f64], cache: &FiberCache, height: f64, out: &mut [f64]) {
        if cache.w == 0.0 {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let mut v = [0.0; MAX_DIM];
        self.profile_vector(cache, height, &mut v);
        for i in 0..self.dim {
            out[i] = cache.w * self.amplitude[i].eval(x) * v[i];
        }
    }

    pub fn eval(&self, x: &[f64], st: &FastState, out: &mut [f64]) {
        let cache = self.fiber(st.coord, st.cell, st.roof);
        self.eval_cached(x, &cache, st.height, out);
    }

    /// `D_1 f(x, state)`, row-major.
    pub fn jacobian_cached(&self, x: &[f64], cache: &FiberCache, height: f64, out: &mut [f64]) {
        let d = self.dim;
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut v = [0.0; MAX_DIM];
        self.profile_vector(cache, height, &mut v);
        for (i, a) in self.amplitude.iter().enumerate() {
            if a.amp == 0.0 {
                continue;
            }
            let c = a.amp * a.arg(x).cos() * cache.w * v[i];
            for j in 0..d {
                out[i * d + j] = c * a.wave[j];
            }
        }
    }

    /// `max_i |amp_i| |wave_i|`, a Lipschitz constant of `x -> diag(A(x))`
    /// in operator norm.
    pub fn amplitude_lipschitz(&self) -> f64 {
        self.amplitude.iter().map(Amplitude::lipschitz).fold(0.0, f64::max)
    }

    /// Lipschitz constant in `x` of `f(·, state)`.
    pub fn lipschitz_cached(&self, cache: &FiberCache, height: f64) -> f64 {
        let mut v = [0.0; MAX_DIM];
        self.profile_vector(cache, height, &mut v);
        let norm = v[..self.dim].iter().map(|a| a * a).sum::<f64>().sqrt();
        cache.w * self.amplitude_lipschitz() * norm
    }

    /// `diag(A(x))` as a vector.
    pub fn amplitude_at(&self, x: &[f64]) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.eval(x)).collect()
    }

    /// `Q` as a dense row-major matrix.
    pub fn mix_matrix(&self) -> Vec<f64> {
        let d = self.dim;
        let mut q = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                q[i * d + j] = match &self.mix {
                    Some(m) => m[i][j],
                    None => f64::from(u8::from(i == j)),
                };
            }
        }
        q
    }

    /// `U(ω) = ∫_0^τ Q (u(ω, s) - c) ds`, the fiber integral without the
    /// cell and amplitude factors.
    pub fn fiber_integral(&self, coord: f64, roof: f64) -> [f64; MAX_DIM] {
        let cache = FiberCache { w: 1.0, ..self.fiber(coord, 0, roof) };
        let mut acc = [0.0; MAX_DIM];
        gauss_legendre_fiber(0.0, roof, |s, wt| {
            let mut v = [0.0; MAX_DIM];
            self.profile_vector(&cache, s, &mut v);
            for i in 0..self.dim {
                acc[i] += wt * v[i];
            }
        });
        acc
    }
}

fn centering_offsets<Z: ZExtension>(profiles: &[Profile], model: &Z, seed: u64) -> Result<Vec<f64>> {
    let d = profiles.len();
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    let mut add = |coord: f64, roof: f64| {
        den += roof;
        for (i, p) in profiles.iter().enumerate() {
            let mut acc = 0.0;
            gauss_legendre_fiber(0.0, roof, |s, w| acc += w * p.eval(coord, s, roof));
            num[i] += acc;
        }
    };
    if let Some(nodes) = model.base_nodes(CENTERING_NODES) {
        for p in &nodes {
            add(model.coord(p), model.roof(p)?);
        }
    } else {
        let mut rng = stream_rng(seed, domain::CENTERING, 0);
        for _ in 0..CENTERING_SAMPLES {
            let p = model.sample_base(&mut rng);
            add(model.coord(&p), model.roof(&p)?);
        }
    }
    Ok(num.into_iter().map(|n| n / den).collect())
}
