use super::ModelError;

/// Compound-scaling coefficients for a CNN backbone: depth, width and
/// resolution grow as `alpha^phi`, `beta^phi` and `gamma^phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    /// Enforce `alpha * beta^2 * gamma^2` within `[1.8, 2.2]`.
    pub validate: bool,
}

impl ScalingConfig {
    pub fn flops_factor(&self) -> f64 {
        self.alpha * self.beta * self.beta * self.gamma * self.gamma
    }
}

/// Returns `(depth, width, resolution)` multipliers.
pub fn compound_scale(cfg: &ScalingConfig) -> Result<(f64, f64, f64), ModelError> {
    let finite = [cfg.alpha, cfg.beta, cfg.gamma, cfg.phi]
        .iter()
        .all(|v| v.is_finite());
    if !finite || cfg.alpha < 1.0 || cfg.beta < 1.0 || cfg.gamma < 1.0 || cfg.phi < 0.0 {
        return Err(ModelError::InvalidConfig(format!(
            "need alpha, beta, gamma >= 1 and phi >= 0, got {cfg:?}"
        )));
    }
    if cfg.validate {
        let product = cfg.flops_factor();
        if !(1.8..=2.2).contains(&product) {
            return Err(ModelError::ConstraintViolated { product });
        }
    }
    Ok((cfg.alpha.powf(cfg.phi), cfg.beta.powf(cfg.phi), cfg.gamma.powf(cfg.phi)))
}
