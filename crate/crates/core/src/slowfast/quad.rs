/// Gauss-Legendre 8-point nodes on `[-1, 1]` (positive half) and weights.
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Calls `f(node, weight)` for the 8-point Gauss-Legendre rule on `[a, b]`.
#[inline]
pub fn gauss_legendre_fiber(a: f64, b: f64, mut f: impl FnMut(f64, f64)) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for k in 0..4 {
        let dx = half * GL8_X[k];
        let w = half * GL8_W[k];
        f(mid - dx, w);
        f(mid + dx, w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_degree_15() {
        let mut acc = 0.0;
        gauss_legendre_fiber(0.0, 2.0, |x, w| acc += w * x.powi(15));
        assert!((acc - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let mut s = 0.0;
        gauss_legendre_fiber(-1.0, 3.0, |_, w| s += w);
        assert!((s - 4.0).abs() < 1e-15);
    }
}
