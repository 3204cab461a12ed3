//! Spherical Bessel function of order zero and its first two derivatives.

pub fn j0(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

pub fn j0_prime(x: f64) -> f64 {
    if x.abs() < 2e-2 {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

pub fn j0_second(x: f64) -> f64 {
    if x.abs() < 5e-2 {
        let x2 = x * x;
        -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0 + x2 * x2 * x2 / 6480.0
    } else {
        ((2.0 - x * x) * x.sin() - 2.0 * x * x.cos()) / (x * x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_match_at_switch_points() {
        for &x in &[1e-3, 2e-2, 5e-2, 0.3] {
            let h = 1e-5;
            let d1 = (j0(x + h) - j0(x - h)) / (2.0 * h);
            let d2 = (j0_prime(x + h) - j0_prime(x - h)) / (2.0 * h);
            assert!((d1 - j0_prime(x)).abs() < 1e-9);
            assert!((d2 - j0_second(x)).abs() < 1e-8);
        }
    }
}
