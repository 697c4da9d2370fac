//! Small numeric helpers shared across modules.

/// ln(n!) by direct summation. Exact enough for the cutoffs used here
/// (relative error ~1e-15 at n = 1000).
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Cumulative table of ln(k!) for k = 0..=n.
pub(crate) fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Wrap an angle difference into (-pi, pi].
pub(crate) fn wrap_angle(delta: f64) -> f64 {
    let mut d = delta % std::f64::consts::TAU;
    if d > std::f64::consts::PI {
        d -= std::f64::consts::TAU;
    } else if d <= -std::f64::consts::PI {
        d += std::f64::consts::TAU;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_table() {
        let table = ln_factorial_table(20);
        for (n, &t) in table.iter().enumerate() {
            assert!((ln_factorial(n) - t).abs() < 1e-12);
        }
        // 10! = 3628800
        assert!((ln_factorial(10) - 3628800.0_f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn angle_wrap() {
        assert!((wrap_angle(3.0 * std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-12);
        assert!(wrap_angle(-std::f64::consts::PI) > 0.0);
        assert!((wrap_angle(0.3) - 0.3).abs() < 1e-15);
    }
}
