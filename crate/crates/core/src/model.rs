use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, LAMBDA0_QMUPL, LAMBDA_CSL, LAMBDA_GRW, M_NUCLEON, R_C};
use crate::error::{ensure, ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Qmupl,
    Grw,
    Csl,
}

/// One collapse-model instance. `lambda0` is m^-2 s^-1 for QMUPL and a
/// rate (s^-1) for GRW and CSL; `r_c` is ignored by QMUPL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseModelParams {
    pub kind: ModelKind,
    pub lambda0: f64,
    pub r_c: f64,
    pub m0: f64,
}

impl CollapseModelParams {
    pub fn new(kind: ModelKind, lambda0: f64, r_c: f64, m0: f64) -> Result<Self> {
        ensure(lambda0.is_finite() && lambda0 >= 0.0, || {
            format!("lambda0 must be non-negative, got {lambda0}")
        })?;
        ensure_positive("r_c", r_c)?;
        ensure_positive("m0", m0)?;
        Ok(Self {
            kind,
            lambda0,
            r_c,
            m0,
        })
    }

    pub fn qmupl() -> Self {
        Self {
            kind: ModelKind::Qmupl,
            lambda0: LAMBDA0_QMUPL,
            r_c: R_C,
            m0: M_NUCLEON,
        }
    }

    pub fn grw() -> Self {
        Self {
            kind: ModelKind::Grw,
            lambda0: LAMBDA_GRW,
            r_c: R_C,
            m0: M_NUCLEON,
        }
    }

    pub fn csl() -> Self {
        Self {
            kind: ModelKind::Csl,
            lambda0: LAMBDA_CSL,
            r_c: R_C,
            m0: M_NUCLEON,
        }
    }

    /// Mass-proportional strength (m / m0) lambda0.
    pub fn lambda_for_mass(&self, mass: f64) -> f64 {
        mass / self.m0 * self.lambda0
    }

    /// QMUPL frequency 2 sqrt(hbar lambda0 / m0); mass independent.
    pub fn qmupl_omega(&self) -> f64 {
        2.0 * (HBAR * self.lambda0 / self.m0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_value() {
        let w = CollapseModelParams::qmupl().qmupl_omega();
        // 1/omega is about 2e4 s.
        assert!(w > 4e-5 && w < 6e-5, "{w}");
    }

    #[test]
    fn lambda_scaling() {
        let p = CollapseModelParams::qmupl();
        let m = 1e-3;
        assert!((p.lambda_for_mass(m) / (m / p.m0 * p.lambda0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(CollapseModelParams::new(ModelKind::Grw, -1.0, 1e-7, 1e-27).is_err());
        assert!(CollapseModelParams::new(ModelKind::Grw, 1.0, 0.0, 1e-27).is_err());
        assert!(CollapseModelParams::new(ModelKind::Grw, 0.0, 1e-7, 1e-27).is_ok());
    }
}
