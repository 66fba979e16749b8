use crate::error::{ModelError, Result};

pub const SUPPORTED_SCALES: [usize; 4] = [2, 3, 4, 8];

/// Architectural hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    /// Residual groups `N`.
    pub n_groups: usize,
    /// RCABs per group.
    pub n_blocks: usize,
    pub channels: usize,
    /// Channel-attention reduction ratio; must divide `channels`.
    pub reduction: usize,
    pub scale: usize,
    /// Trailing feature groups modulated by a CSAM.
    pub csam_count: usize,
    /// Input values are multiplied by this before the head conv, outputs divided by it.
    pub rgb_range: f64,
    pub lam: bool,
    pub csam: bool,
}

/// LAM/CSAM ablation arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Full,
    WithoutLam,
    WithoutCsam,
    Baseline,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Full, Variant::WithoutLam, Variant::WithoutCsam, Variant::Baseline];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::WithoutLam => "w/o LAM",
            Variant::WithoutCsam => "w/o CSAM",
            Variant::Baseline => "baseline",
        }
    }
}

impl ModelConfig {
    /// Ten groups of twenty RCABs at 64 channels.
    pub fn full_scale(scale: usize) -> Self {
        ModelConfig {
            n_groups: 10,
            n_blocks: 20,
            channels: 64,
            reduction: 16,
            scale,
            csam_count: 1,
            rgb_range: 1.0,
            lam: true,
            csam: true,
        }
    }

    /// Desk-scale network: 2 groups of 2 blocks at 16 channels.
    pub fn toy(scale: usize) -> Self {
        ModelConfig { n_groups: 2, n_blocks: 2, channels: 16, reduction: 4, ..Self::full_scale(scale) }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.lam = matches!(variant, Variant::Full | Variant::WithoutCsam);
        self.csam = matches!(variant, Variant::Full | Variant::WithoutLam);
        self
    }

    pub fn variant(&self) -> Variant {
        match (self.lam, self.csam) {
            (true, true) => Variant::Full,
            (false, true) => Variant::WithoutLam,
            (true, false) => Variant::WithoutCsam,
            (false, false) => Variant::Baseline,
        }
    }

    /// `×2` stages for powers of two, a single `×3` stage for scale 3.
    pub fn upsample_stages(&self) -> Vec<usize> {
        match self.scale {
            3 => vec![3],
            s => vec![2; s.trailing_zeros() as usize],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(ModelError::Config(m));
        if self.n_groups == 0 || self.n_blocks == 0 {
            return fail(format!("need at least one group and block, got {}x{}", self.n_groups, self.n_blocks));
        }
        if self.channels < 4 {
            return fail(format!("channels must be >= 4, got {}", self.channels));
        }
        if self.reduction == 0 || self.channels % self.reduction != 0 {
            return fail(format!("reduction {} does not divide {} channels", self.reduction, self.channels));
        }
        if !SUPPORTED_SCALES.contains(&self.scale) {
            return fail(format!("unsupported scale {} (expected one of {SUPPORTED_SCALES:?})", self.scale));
        }
        if self.csam_count == 0 || self.csam_count > self.n_groups {
            return fail(format!("csam_count {} outside 1..={}", self.csam_count, self.n_groups));
        }
        if !(self.rgb_range.is_finite() && self.rgb_range > 0.0) {
            return fail(format!("rgb_range must be positive, got {}", self.rgb_range));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelConfig::toy(2).validate().is_ok());
        assert!(ModelConfig::full_scale(8).validate().is_ok());
        assert!(ModelConfig { scale: 5, ..ModelConfig::toy(2) }.validate().is_err());
        assert!(ModelConfig { reduction: 3, ..ModelConfig::toy(2) }.validate().is_err());
        assert!(ModelConfig { csam_count: 3, ..ModelConfig::toy(2) }.validate().is_err());
        assert!(ModelConfig { channels: 2, reduction: 1, ..ModelConfig::toy(2) }.validate().is_err());
    }

    #[test]
    fn upsample_stage_plan() {
        let stages = |s| ModelConfig::toy(s).upsample_stages();
        assert_eq!(stages(2), vec![2]);
        assert_eq!(stages(3), vec![3]);
        assert_eq!(stages(4), vec![2, 2]);
        assert_eq!(stages(8), vec![2, 2, 2]);
    }

    #[test]
    fn variants_round_trip() {
        for v in Variant::ALL {
            assert_eq!(ModelConfig::toy(2).with_variant(v).variant(), v);
        }
    }
}
