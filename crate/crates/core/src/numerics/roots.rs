use num_complex::Complex64;

/// All complex roots of `Σ coeffs[k] z^(n−k)` (highest degree first) by
/// Aberth–Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let lead = coeffs
        .iter()
        .position(|c| c.norm() != 0.0)
        .unwrap_or(coeffs.len());
    let a: Vec<Complex64> = coeffs[lead..].iter().map(|c| c / coeffs[lead]).collect();
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Cauchy bound gives the radius of the starting circle
    let radius = 1.0 + a[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64,
            )
        })
        .collect();

    let eval = |x: Complex64| {
        let mut p = a[0];
        let mut dp = Complex64::new(0.0, 0.0);
        for c in &a[1..] {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };

    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}
