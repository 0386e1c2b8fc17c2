use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaField {
    Skyscraper,
    Continuous,
    Constant(f64),
}

impl KappaField {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            KappaField::Skyscraper => kappa_skyscraper(x, y),
            KappaField::Continuous => kappa_continuous(x, y),
            KappaField::Constant(c) => c,
        }
    }

    pub fn name(&self) -> String {
        match self {
            KappaField::Skyscraper => "skyscraper".into(),
            KappaField::Continuous => "continuous".into(),
            KappaField::Constant(c) => format!("constant-{c:?}"),
        }
    }
}

/// 10⁴·(⌊9y⌋+1) on cells where both ⌊9x⌋ and ⌊9y⌋ are even, 1 elsewhere.
pub fn kappa_skyscraper(x: f64, y: f64) -> f64 {
    let fx = (9.0 * x).floor() as i64;
    let fy = (9.0 * y).floor() as i64;
    if fx % 2 == 0 && fy % 2 == 0 {
        1e4 * (fy as f64 + 1.0)
    } else {
        1.0
    }
}

/// |10⁶/3 · sin(4π(x+y) + 0.1)|, floored at 1.
pub fn kappa_continuous(x: f64, y: f64) -> f64 {
    let v = 1e6 / 3.0 * (4.0 * PI * (x + y) + 0.1).sin();
    v.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skyscraper_cells() {
        assert_eq!(kappa_skyscraper(0.05, 0.05), 1e4);
        assert_eq!(kappa_skyscraper(0.15, 0.05), 1.0);
        // ⌊9x⌋ = 2, ⌊9y⌋ = 4
        assert_eq!(kappa_skyscraper(0.25, 0.5), 5e4);
        assert_eq!(kappa_skyscraper(0.25, 0.4), 1.0);
    }

    #[test]
    fn continuous_extremum_and_floor() {
        // 4π(x+y) + 0.1 = π/2
        let s = (PI / 2.0 - 0.1) / (4.0 * PI);
        assert!((kappa_continuous(s / 2.0, s / 2.0) - 1e6 / 3.0).abs() < 1e-6);
        // zero of the sine: floored at 1
        let s0 = (PI - 0.1) / (4.0 * PI);
        assert_eq!(kappa_continuous(s0, 0.0), 1.0);
        for k in 0..50 {
            let t = k as f64 / 49.0;
            assert!(kappa_continuous(t, 1.0 - t) >= 1.0);
        }
    }
}
