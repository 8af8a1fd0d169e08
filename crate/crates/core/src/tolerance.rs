use crate::error::{Error, Result};

/// Numerical thresholds shared by every test of definiteness, rank and fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    /// Relative eigenvalue-zero threshold, also the Jacobi stopping criterion.
    pub tol_eig: f64,
    /// Absolute threshold below which a vector entry counts as zero.
    pub tol_zero: f64,
    /// Relative reconstruction threshold for decompositions and factorizations.
    pub tol_residual: f64,
    pub max_jacobi_sweeps: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_eig: 1e-10,
            tol_zero: 1e-8,
            tol_residual: 1e-8,
            max_jacobi_sweeps: 64,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("tol_eig", self.tol_eig),
            ("tol_zero", self.tol_zero),
            ("tol_residual", self.tol_residual),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        if self.max_jacobi_sweeps == 0 {
            return Err(Error::InvalidTolerance(
                "max_jacobi_sweeps must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn with_tol_eig(mut self, value: f64) -> Self {
        self.tol_eig = value;
        self
    }

    pub fn with_tol_zero(mut self, value: f64) -> Self {
        self.tol_zero = value;
        self
    }

    pub fn with_tol_residual(mut self, value: f64) -> Self {
        self.tol_residual = value;
        self
    }

    /// Eigenvalue magnitude at or below which a value counts as zero, given
    /// the spectral radius of the matrix and its order.
    pub fn zero_threshold(&self, spectral_radius: f64, n: usize) -> f64 {
        (self.tol_eig * spectral_radius.max(1.0)).max(f64::EPSILON * n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let tol = ToleranceConfig::default();
        tol.validate().unwrap();
        assert_eq!(tol.tol_eig, 1e-10);
        assert_eq!(tol.tol_zero, 1e-8);
        assert_eq!(tol.tol_residual, 1e-8);
        assert_eq!(tol.max_jacobi_sweeps, 64);
    }

    #[test]
    fn rejects_nonpositive_values() {
        assert!(ToleranceConfig::default()
            .with_tol_eig(0.0)
            .validate()
            .is_err());
        assert!(ToleranceConfig::default()
            .with_tol_zero(-1.0)
            .validate()
            .is_err());
        assert!(ToleranceConfig::default()
            .with_tol_residual(f64::NAN)
            .validate()
            .is_err());
        let tol = ToleranceConfig {
            max_jacobi_sweeps: 0,
            ..Default::default()
        };
        assert!(tol.validate().is_err());
    }

    #[test]
    fn zero_threshold_has_unit_floor_on_scale() {
        let tol = ToleranceConfig::default();
        assert_eq!(tol.zero_threshold(0.01, 3), 1e-10);
        assert_eq!(tol.zero_threshold(100.0, 3), 1e-8);
    }
}
