use super::AssemblyError;

/// Material constants. The elastic equation is divided by the fluid density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub rho1: f64,
    pub rho2: f64,
    pub c: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { rho1: 1.0, rho2: 1.0, c: 1.0, lambda: 1.0, mu: 1.0 }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), AssemblyError> {
        let bad = |m: &str| Err(AssemblyError::InvalidParams(m.to_string()));
        let all = [self.rho1, self.rho2, self.c, self.lambda, self.mu];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("physical parameters must be finite");
        }
        if !(self.rho1 > 0.0 && self.rho2 > 0.0 && self.c > 0.0) {
            return bad("densities and sound speed must be positive");
        }
        if !(self.mu > 0.0) || !(3.0 * self.lambda + 2.0 * self.mu > 0.0) {
            return bad("Lamé constants need mu > 0 and 3 lambda + 2 mu > 0");
        }
        Ok(())
    }
}

/// How the jump of the displacement across interior elastic edges is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElasticJump {
    /// Vector jump u₁ - u₂, paired with the full average traction.
    #[default]
    Full,
    /// Scalar normal jump u₁·n₁ + u₂·n₂, paired with the normal traction n·{σ(u)n}.
    NormalComponent,
}

impl ElasticJump {
    pub fn name(self) -> &'static str {
        match self {
            ElasticJump::Full => "full",
            ElasticJump::NormalComponent => "normal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    pub alpha: f64,
    pub beta: f64,
    pub elastic_jump: ElasticJump,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        PenaltyParams { alpha: 100.0, beta: 1.0, elastic_jump: ElasticJump::Full }
    }
}

impl PenaltyParams {
    pub fn validate(&self) -> Result<(), AssemblyError> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(AssemblyError::InvalidParams("penalty alpha must be positive".into()));
        }
        if !(self.beta >= 1.0) || !self.beta.is_finite() {
            return Err(AssemblyError::InvalidParams("penalty beta must be at least 1".into()));
        }
        Ok(())
    }

    /// α / |e|^β
    pub fn weight(&self, length: f64) -> f64 {
        self.alpha / length.powf(self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(PhysicalParams::default().validate().is_ok());
        let p = PhysicalParams { mu: 0.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = PhysicalParams { lambda: -0.5, mu: 1.0, ..Default::default() };
        assert!(p.validate().is_ok());
        let p = PhysicalParams { lambda: -1.0, mu: 1.0, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(PenaltyParams { beta: 0.5, ..Default::default() }.validate().is_err());
        assert!(PenaltyParams { alpha: 0.0, ..Default::default() }.validate().is_err());
    }
}
