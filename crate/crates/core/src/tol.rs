//! Numeric comparison tolerance shared by every module.

/// Environment variable that overrides [`Tolerance::atol`].
pub const ATOL_ENV: &str = "DUALKIT_ATOL";

/// Mixed absolute/relative tolerance.
///
/// Two reals are equal iff `|a - b| <= max(atol, rtol * max(|a|, |b|))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-8,
            rtol: 1e-6,
        }
    }
}

impl Tolerance {
    /// Default tolerance with `atol` taken from `DUALKIT_ATOL` when it parses
    /// as a non-negative finite number.
    pub fn from_env() -> Self {
        let mut tol = Tolerance::default();
        if let Some(atol) = std::env::var(ATOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v >= 0.0)
        {
            tol.atol = atol;
        }
        tol
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        if a == b {
            return true;
        }
        if !a.is_finite() || !b.is_finite() {
            return false;
        }
        (a - b).abs() <= self.atol.max(self.rtol * a.abs().max(b.abs()))
    }

    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.atol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_tolerance() {
        let t = Tolerance::default();
        assert!(t.eq(1.0, 1.0 + 5e-9));
        assert!(!t.eq(1.0, 1.0 + 1e-5));
        assert!(t.eq(1e6, 1e6 + 0.5));
        assert!(t.eq(f64::INFINITY, f64::INFINITY));
        assert!(!t.eq(f64::INFINITY, 1e300));
        assert!(!t.eq(f64::NEG_INFINITY, f64::INFINITY));
        assert!(t.is_zero(-1e-9));
        assert!(!t.is_zero(1e-7));
    }
}
