/// Real roots of a polynomial (coefficients highest degree first), found by
/// sign scanning on the Cauchy bound and bisection to machine precision.
/// Roots of even multiplicity are not detected.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let eval = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
    let bound = 1.0
        + coeffs[1..]
            .iter()
            .map(|c| (c / coeffs[0]).abs())
            .fold(0.0, f64::max);
    let samples = 200_000;
    let mut roots = Vec::new();
    let mut prev_x = -bound;
    let mut prev_y = eval(prev_x);
    for k in 1..=samples {
        let x = -bound + 2.0 * bound * k as f64 / samples as f64;
        let y = eval(x);
        if y == 0.0 {
            roots.push(x);
        } else if prev_y != 0.0 && prev_y.signum() != y.signum() {
            let (mut lo, mut hi) = (prev_x, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval(mid).signum() == eval(lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_y = y;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}
