use serde::{Deserialize, Serialize};

use super::ZExtension;
use crate::error::Result;
use crate::path::{PathMeta, PathSample};

/// Point `(ω, m, s)` of the suspension flow, `0 <= s < τ(ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPoint<P> {
    pub base: P,
    pub cell: i64,
    pub height: f64,
}

impl<P> SuspensionPoint<P> {
    pub fn on_section(base: P, cell: i64) -> Self {
        Self { base, cell, height: 0.0 }
    }
}

/// One roof fiber `{(ω, m)} x [0, τ(ω))` visited by the flow; `start` is the
/// flow time at which the fiber is entered (negative for the fiber holding
/// the initial point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fiber<P> {
    pub base: P,
    pub cell: i64,
    pub roof: f64,
    pub step: i64,
    pub next: P,
    pub start: f64,
}

impl<P> Fiber<P> {
    pub fn end(&self) -> f64 {
        self.start + self.roof
    }
}

/// Iterator over the fibers of a forward orbit.
///
/// Entry times are accumulated left to right from the start of the first
/// fiber, the same order used by [`n_t`] and [`roof_sums`], so the
/// quantities agree bit for bit.
pub struct FiberWalk<'a, Z: ZExtension> {
    model: &'a Z,
    base: Z::Point,
    cell: i64,
    acc: f64,
    offset: f64,
}

impl<'a, Z: ZExtension> FiberWalk<'a, Z> {
    pub fn new(model: &'a Z, start: &SuspensionPoint<Z::Point>) -> Self {
        Self { model, base: start.base, cell: start.cell, acc: 0.0, offset: start.height }
    }

    /// Next fiber; `start` is `t_k - height0`.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Result<Fiber<Z::Point>> {
        let tr = self.model.transition(&self.base)?;
        let fiber = Fiber {
            base: self.base,
            cell: self.cell,
            roof: tr.roof,
            step: tr.step,
            next: tr.next,
            start: self.acc - self.offset,
        };
        self.acc += tr.roof;
        self.base = tr.next;
        self.cell += tr.step;
        Ok(fiber)
    }

    /// `t_k` of the fiber about to be returned by [`Self::next`].
    pub fn section_time(&self) -> f64 {
        self.acc
    }
}

/// `n_t(ω) = sup { n : t_n(ω) <= t }`.
pub fn n_t<Z: ZExtension>(model: &Z, omega: &Z::Point, t: f64) -> Result<u64> {
    let mut acc = 0.0;
    let mut p = *omega;
    let mut n = 0u64;
    loop {
        let tr = model.transition(&p)?;
        let next = acc + tr.roof;
        if next > t {
            return Ok(n);
        }
        acc = next;
        p = tr.next;
        n += 1;
    }
}

/// `[t_0, t_1, ..., t_m]` with `t_k = Σ_{j<k} τ(T̄^j ω)`.
pub fn roof_sums<Z: ZExtension>(model: &Z, omega: &Z::Point, m: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    let mut p = *omega;
    out.push(acc);
    for _ in 0..m {
        let tr = model.transition(&p)?;
        acc += tr.roof;
        out.push(acc);
        p = tr.next;
    }
    Ok(out)
}

/// `S_nφ(ω)`.
pub fn birkhoff_step_sum<Z: ZExtension>(model: &Z, omega: &Z::Point, n: u64) -> Result<i64> {
    let mut p = *omega;
    let mut s = 0;
    for _ in 0..n {
        let tr = model.transition(&p)?;
        s += tr.step;
        p = tr.next;
    }
    Ok(s)
}

/// `φ_t(ω, m, s) = (T^{n}(ω, m), s + t - t_n)` with `n = n_{s+t}(ω)`.
pub fn suspension_flow<Z: ZExtension>(
    model: &Z,
    p: &SuspensionPoint<Z::Point>,
    t: f64,
) -> Result<SuspensionPoint<Z::Point>> {
    let total = p.height + t;
    let mut acc = 0.0;
    let mut base = p.base;
    let mut cell = p.cell;
    loop {
        let tr = model.transition(&base)?;
        let next = acc + tr.roof;
        if next > total {
            let mut height = total - acc;
            if height >= tr.roof {
                height = tr.roof.next_down();
            }
            return Ok(SuspensionPoint { base, cell, height: height.max(0.0) });
        }
        acc = next;
        base = tr.next;
        cell += tr.step;
    }
}

/// Flow point in cell 0 with base `ω ~ μ̄` and height uniform in
/// `[0, τ(ω))`; its law is absolutely continuous with respect to `ν`.
pub fn sample_start<Z: ZExtension, R: rand::Rng + ?Sized>(model: &Z, rng: &mut R) -> Result<SuspensionPoint<Z::Point>> {
    let base = model.sample_base(rng);
    let roof = model.roof(&base)?;
    let height = rng.random::<f64>() * roof;
    Ok(SuspensionPoint { base, cell: 0, height })
}

/// Which cell label the displacement path reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Displacement {
    /// `S_{n_{t/ε}} φ`, the label of the last section crossing.
    #[default]
    Birkhoff,
    /// `Ψ ∘ φ_{t/ε}`, the label of the current position.
    Psi,
}

/// Path of `ε^{1/2} S_{n_{t/ε}}φ(ω)` (or `ε^{1/2} Ψ∘φ_{t/ε}`) on an
/// increasing grid of slow times, starting on the section of cell 0.
pub fn displacement_path<Z: ZExtension>(
    model: &Z,
    omega: &Z::Point,
    grid: &[f64],
    eps: f64,
    kind: Displacement,
    seed: u64,
) -> Result<PathSample> {
    let scale = eps.sqrt();
    let mut walk = FiberWalk::new(model, &SuspensionPoint::on_section(*omega, 0));
    let mut fiber = walk.next()?;
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid {
        let fast = t / eps;
        while fiber.end() <= fast {
            fiber = walk.next()?;
        }
        let label = match kind {
            Displacement::Birkhoff => fiber.cell,
            Displacement::Psi => model.psi(&fiber.base, fiber.cell, fast - fiber.start),
        };
        values.push(vec![scale * label as f64]);
    }
    PathSample::new(
        grid.to_vec(),
        values,
        PathMeta { eps, seed, model: model.name().to_string() },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{DyadicPoint, ToyDoubling};

    #[test]
    fn constant_roof_counts() {
        let z = ToyDoubling::scaled(0.0, 2.0).unwrap();
        let w = DyadicPoint::from_key(3);
        assert_eq!(n_t(&z, &w, 5.0).unwrap(), 2);
        assert_eq!(n_t(&z, &w, 0.0).unwrap(), 0);
        assert_eq!(n_t(&z, &w, 4.0).unwrap(), 2);
    }

    #[test]
    fn lands_on_next_section() {
        let z = ToyDoubling::new(0.3).unwrap();
        let w = DyadicPoint::from_unit(0.1, 5);
        let tr = crate::dynsys::ZExtension::transition(&z, &w).unwrap();
        let p = SuspensionPoint { base: w, cell: 4, height: 0.25 };
        let q = suspension_flow(&z, &p, tr.roof - 0.25).unwrap();
        assert_eq!(q.base, tr.next);
        assert_eq!(q.cell, 5);
        assert!(q.height.abs() < 1e-15);
        assert_eq!(suspension_flow(&z, &p, 0.0).unwrap(), p);
    }
}
