//! `key = value` run configuration. Blank lines and `#` comments are ignored;
//! relative paths resolve against the directory holding the config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use han_core::AdamConfig;
use han_data::{DegradationKind, DegradationSpec};
use han_model::ModelConfig;

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "HAN_SEED";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub adam: AdamConfig,
    pub batch_size: usize,
    pub steps: usize,
    pub degradation: DegradationSpec,
    /// Dataset root: `<train_dir>/HR/*.png`, or PNGs directly inside it.
    pub train_dir: PathBuf,
    /// LR patch extent; HR patches are `scale` times larger.
    pub patch_size: usize,
    /// Draw this many patches once and cycle through them instead of resampling each step.
    pub fixed_patches: Option<usize>,
    pub augment: bool,
    /// Write generated LR images to `<train_dir>/LR_<kind>_x<s>/`.
    pub cache_lr: bool,
    pub seed: u64,
    pub checkpoint: PathBuf,
    /// Save every this many steps; 0 saves only at the end.
    pub checkpoint_every: usize,
    pub loss_log: Option<PathBuf>,
    pub log_every: usize,
}

const KEYS: &[&str] = &[
    "preset",
    "n_groups",
    "n_blocks",
    "channels",
    "reduction",
    "scale",
    "csam_count",
    "rgb_range",
    "lam",
    "csam",
    "lr",
    "beta1",
    "beta2",
    "epsilon",
    "batch_size",
    "steps",
    "degradation",
    "blur_kernel",
    "blur_sigma",
    "train_dir",
    "patch_size",
    "fixed_patches",
    "augment",
    "cache_lr",
    "seed",
    "checkpoint",
    "checkpoint_every",
    "loss_log",
    "log_every",
];

fn bad(key: &str, value: &str, what: &str) -> CliError {
    CliError::Config(format!("{key} = {value:?}: expected {what}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "a number"))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "true or false")),
    }
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    if p.is_absolute() { p } else { base.join(p) }
}

impl RunConfig {
    /// Full-scale defaults; `train_dir` and `checkpoint` are relative to `base`.
    pub fn defaults(base: &Path) -> Self {
        RunConfig {
            model: ModelConfig::full_scale(4),
            adam: AdamConfig::default(),
            batch_size: 16,
            steps: 1000,
            degradation: DegradationSpec::bi(4),
            train_dir: base.join("data"),
            patch_size: 64,
            fixed_patches: None,
            augment: true,
            cache_lr: false,
            seed: 0,
            checkpoint: base.join("han.ckpt"),
            checkpoint_every: 0,
            loss_log: None,
            log_every: 10,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let base = base.canonicalize().unwrap_or_else(|_| base.to_path_buf());
        Self::parse(&text, &base).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("line {}: expected `key = value`", lineno + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("line {}: unknown key {k:?}", lineno + 1)));
            }
            if pairs.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key {k:?}", lineno + 1)));
            }
        }

        let mut cfg = Self::defaults(base);
        let scale = match pairs.get("scale") {
            Some(v) => num("scale", v)?,
            None => 4,
        };
        cfg.model = match pairs.get("preset").map(String::as_str) {
            None | Some("full") => ModelConfig::full_scale(scale),
            Some("toy") => ModelConfig::toy(scale),
            Some(other) => return Err(bad("preset", other, "full or toy")),
        };
        let mut kind = DegradationKind::Bi;
        for (k, v) in &pairs {
            let v = v.as_str();
            match k.as_str() {
                "preset" | "scale" => {}
                "n_groups" => cfg.model.n_groups = num(k, v)?,
                "n_blocks" => cfg.model.n_blocks = num(k, v)?,
                "channels" => cfg.model.channels = num(k, v)?,
                "reduction" => cfg.model.reduction = num(k, v)?,
                "csam_count" => cfg.model.csam_count = num(k, v)?,
                "rgb_range" => cfg.model.rgb_range = num(k, v)?,
                "lam" => cfg.model.lam = boolean(k, v)?,
                "csam" => cfg.model.csam = boolean(k, v)?,
                "lr" => cfg.adam.lr = num(k, v)?,
                "beta1" => cfg.adam.beta1 = num(k, v)?,
                "beta2" => cfg.adam.beta2 = num(k, v)?,
                "epsilon" => cfg.adam.epsilon = num(k, v)?,
                "batch_size" => cfg.batch_size = num(k, v)?,
                "steps" => cfg.steps = num(k, v)?,
                "degradation" => kind = v.parse().map_err(|_| bad(k, v, "bi or bd"))?,
                "blur_kernel" => cfg.degradation.kernel_size = num(k, v)?,
                "blur_sigma" => cfg.degradation.sigma = num(k, v)?,
                "train_dir" => cfg.train_dir = resolve(base, v),
                "patch_size" => cfg.patch_size = num(k, v)?,
                "fixed_patches" => cfg.fixed_patches = if v == "none" { None } else { Some(num(k, v)?) },
                "augment" => cfg.augment = boolean(k, v)?,
                "cache_lr" => cfg.cache_lr = boolean(k, v)?,
                "seed" => cfg.seed = num(k, v)?,
                "checkpoint" => cfg.checkpoint = resolve(base, v),
                "checkpoint_every" => cfg.checkpoint_every = num(k, v)?,
                "loss_log" => cfg.loss_log = if v == "none" { None } else { Some(resolve(base, v)) },
                "log_every" => cfg.log_every = num(k, v)?,
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.degradation.kind = kind;
        cfg.degradation.scale = scale;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.degradation.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.model.scale != self.degradation.scale {
            return Err(CliError::Config("model and degradation scales differ".into()));
        }
        if self.batch_size == 0 {
            return Err(CliError::Config("batch_size must be at least 1".into()));
        }
        if self.patch_size < han_model::network::MIN_INPUT_EXTENT {
            return Err(CliError::Config(format!(
                "patch_size must be at least {}",
                han_model::network::MIN_INPUT_EXTENT
            )));
        }
        if self.fixed_patches == Some(0) {
            return Err(CliError::Config("fixed_patches must be positive".into()));
        }
        let a = &self.adam;
        if !(a.lr > 0.0 && (0.0..1.0).contains(&a.beta1) && (0.0..1.0).contains(&a.beta2) && a.epsilon > 0.0) {
            return Err(CliError::Config(format!("invalid optimizer settings {a:?}")));
        }
        Ok(())
    }

    /// Replace the seed with `HAN_SEED` when that variable is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| bad(SEED_ENV, &v, "an unsigned integer"))?;
        }
        Ok(())
    }

    /// Every key spelled out, paths absolute; `parse` of this text reproduces `self`.
    pub fn to_text(&self) -> String {
        let m = &self.model;
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n_groups", m.n_groups.to_string());
        put("n_blocks", m.n_blocks.to_string());
        put("channels", m.channels.to_string());
        put("reduction", m.reduction.to_string());
        put("scale", m.scale.to_string());
        put("csam_count", m.csam_count.to_string());
        put("rgb_range", m.rgb_range.to_string());
        put("lam", m.lam.to_string());
        put("csam", m.csam.to_string());
        put("lr", self.adam.lr.to_string());
        put("beta1", self.adam.beta1.to_string());
        put("beta2", self.adam.beta2.to_string());
        put("epsilon", self.adam.epsilon.to_string());
        put("batch_size", self.batch_size.to_string());
        put("steps", self.steps.to_string());
        put("degradation", self.degradation.kind.to_string());
        put("blur_kernel", self.degradation.kernel_size.to_string());
        put("blur_sigma", self.degradation.sigma.to_string());
        put("train_dir", self.train_dir.display().to_string());
        put("patch_size", self.patch_size.to_string());
        put("fixed_patches", self.fixed_patches.map_or("none".into(), |n| n.to_string()));
        put("augment", self.augment.to_string());
        put("cache_lr", self.cache_lr.to_string());
        put("seed", self.seed.to_string());
        put("checkpoint", self.checkpoint.display().to_string());
        put("checkpoint_every", self.checkpoint_every.to_string());
        put("loss_log", self.loss_log.as_ref().map_or("none".into(), |p| p.display().to_string()));
        put("log_every", self.log_every.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_training_settings() {
        let c = RunConfig::parse("", Path::new("/x")).unwrap();
        assert_eq!((c.patch_size, c.batch_size), (64, 16));
        assert_eq!(c.adam, AdamConfig { lr: 1e-5, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 });
        assert_eq!(c.model.n_groups, 10);
        assert_eq!(c.train_dir, PathBuf::from("/x/data"));
    }

    #[test]
    fn preset_applies_before_overrides_regardless_of_order() {
        let c = RunConfig::parse("channels = 8 # narrow\npreset = toy\nscale = 3\nreduction=2", Path::new("/b")).unwrap();
        assert_eq!((c.model.n_groups, c.model.channels, c.model.reduction, c.model.scale), (2, 8, 2, 3));
        assert_eq!(c.degradation.scale, 3);
    }

    #[test]
    fn text_round_trip() {
        let src = "preset = toy\nscale = 2\nlr = 0.001\ndegradation = bd\nblur_sigma = 1.2\nloss_log = logs/loss.tsv\nfixed_patches = 4\n";
        let c = RunConfig::parse(src, Path::new("/runs/a")).unwrap();
        assert_eq!(c.loss_log.as_deref(), Some(Path::new("/runs/a/logs/loss.tsv")));
        assert_eq!(RunConfig::parse(&c.to_text(), Path::new("/elsewhere")).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let base = Path::new("/");
        for text in ["colour = red", "seed = 1\nseed = 2", "seed", "seed = -1", "batch_size = 0", "preset = huge", "scale = 5"] {
            assert!(matches!(RunConfig::parse(text, base), Err(CliError::Config(_))), "{text}");
        }
    }
}
