/// Occupation-density estimate of the local time at 0,
/// `L̂_t = (2δ)^{-1} ∫_0^t 1{|B_s| <= δ} ds`, by the left-point rule on the
/// path's grid. Nondecreasing, and flat on steps that start outside
/// `[-δ, δ]`.
pub fn local_time_at_zero(times: &[f64], b: &[f64], delta: f64) -> Vec<f64> {
    assert!(delta > 0.0, "bandwidth must be positive");
    assert_eq!(times.len(), b.len());
    let inv = 0.5 / delta;
    let mut out = Vec::with_capacity(b.len());
    let mut acc = 0.0;
    if !times.is_empty() {
        // mass on [0, t_0] from the starting point B_0 = 0
        if times[0] > 0.0 {
            acc += inv * times[0];
        }
        out.push(acc);
    }
    for k in 1..times.len() {
        if b[k - 1].abs() <= delta {
            acc += inv * (times[k] - times[k - 1]);
        }
        out.push(acc);
    }
    out
}

/// Default bandwidth `2 √Δt`.
pub fn default_bandwidth(dt: f64) -> f64 {
    2.0 * dt.sqrt()
}

/// `(B̃, L̃)` with `B̃_t = B'_{t/τ̄}` and `L̃_t = τ̄ L'_{t/τ̄}`. Returns the
/// rescaled grid `τ̄ s_k` and the two value arrays.
pub fn rescale_pair(
    times: &[f64],
    bprime: &[f64],
    lprime: &[f64],
    tau_bar: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(tau_bar > 0.0, "tau_bar must be positive");
    let t = times.iter().map(|s| tau_bar * s).collect();
    let l = lprime.iter().map(|l| tau_bar * l).collect();
    (t, bprime.to_vec(), l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_off_the_band() {
        let t = [0.0, 0.1, 0.2, 0.3];
        let b = [0.0, 0.5, 0.6, 0.7];
        let l = local_time_at_zero(&t, &b, 0.05);
        assert_eq!(l, vec![0.0, 1.0, 1.0, 1.0]);
        let far = [0.0, 1.0, 1.0, 1.0];
        let l = local_time_at_zero(&t, &far, 0.05);
        assert!(l.windows(2).skip(1).all(|w| w[0] == w[1]));
    }

    #[test]
    fn rescale_round_trip() {
        let t = [0.0, 0.25, 0.5];
        let b = [0.0, 0.1, -0.2];
        let l = [0.0, 0.3, 0.3];
        let (t1, b1, l1) = rescale_pair(&t, &b, &l, 2.0);
        let (t2, b2, l2) = rescale_pair(&t1, &b1, &l1, 0.5);
        assert_eq!((t2.as_slice(), b2.as_slice(), l2.as_slice()), (&t[..], &b[..], &l[..]));
    }
}
