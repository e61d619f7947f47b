//! Integer-order Bessel functions of the first kind by Miller's backward
//! recurrence, normalized with `J_0 + 2 Σ_{k>=1} J_{2k} = 1`.

/// Starting order for the downward recurrence that leaves every order up to
/// `n_max` accurate to double precision.
fn start_order(x: f64, n_max: usize) -> usize {
    let top = (n_max as f64).max(x) + 30.0 + 10.0 * x.cbrt();
    let s = top.ceil() as usize;
    s + (s % 2)
}

/// `J_0(x), J_1(x), …, J_{n_max}(x)` for `x >= 0`.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "bessel argument must be finite and >= 0"
    );
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = start_order(x, n_max);
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        let next = (2.0 * k as f64 / x) * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = vals[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * vals[k];
        k += 2;
    }
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}
