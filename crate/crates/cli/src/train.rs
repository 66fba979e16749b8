use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use han_core::Tensor;
use han_data::{batch_tensor, Dataset, PatchPair, PatchSampler};
use han_model::{Han, Trainer};

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Stack the LR and HR halves of `pairs` into training tensors.
pub fn batch_tensors(pairs: &[PatchPair]) -> Result<(Tensor<f32>, Tensor<f32>)> {
    let lr: Vec<_> = pairs.iter().map(|p| p.lr.clone()).collect();
    let hr: Vec<_> = pairs.iter().map(|p| p.hr.clone()).collect();
    Ok((batch_tensor(&lr)?, batch_tensor(&hr)?))
}

/// Where each step's batch comes from.
pub enum PatchSource {
    /// Fresh patches every step.
    Stream(PatchSampler),
    /// A fixed set visited cyclically, `batch_size` consecutive patches per step.
    Fixed(Vec<PatchPair>),
}

impl PatchSource {
    pub fn next_batch(&mut self, step: usize, batch_size: usize) -> Vec<PatchPair> {
        match self {
            PatchSource::Stream(s) => s.batch(batch_size),
            PatchSource::Fixed(set) => (0..batch_size).map(|i| set[(step * batch_size + i) % set.len()].clone()).collect(),
        }
    }
}

/// Run `steps` Adam steps; `on_step(step, loss)` sees each pre-update loss, 1-based.
pub fn fit(
    trainer: &mut Trainer,
    source: &mut PatchSource,
    batch_size: usize,
    steps: usize,
    mut on_step: impl FnMut(&Trainer, usize, f32) -> Result<()>,
) -> Result<()> {
    for step in 0..steps {
        let (lr, hr) = batch_tensors(&source.next_batch(step, batch_size))?;
        let loss = trainer.step(&lr, &hr).map_err(|e| match CliError::from(e) {
            CliError::Numerical(m) => CliError::Numerical(format!("step {}: loss is not finite ({m})", step + 1)),
            other => other,
        })?;
        on_step(trainer, step + 1, loss)?;
    }
    Ok(())
}

pub fn save_model(path: &Path, config: &RunConfig, model: &Han<f32>) -> Result<()> {
    Checkpoint::from_params(config.to_text(), model.params()).save(path)
}

pub struct TrainSummary {
    pub losses: Vec<f32>,
}

pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary> {
    config.validate()?;
    let dataset = Dataset::load(&config.train_dir)?;
    if dataset.is_empty() {
        return Err(CliError::Io(format!("{}: no PNG images", Dataset::hr_dir(&config.train_dir).display())));
    }
    let pairs = dataset.pairs(&config.degradation, config.cache_lr)?;
    let sampler = PatchSampler::from_pairs(pairs, config.degradation.scale, config.patch_size, config.seed ^ 0x5eed)?
        .with_augmentation(config.augment);
    let mut source = match config.fixed_patches {
        Some(n) => {
            let mut s = sampler;
            PatchSource::Fixed(s.batch(n))
        }
        None => PatchSource::Stream(sampler),
    };

    let mut log = match &config.loss_log {
        Some(p) => {
            if let Some(dir) = p.parent() {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            let mut f = fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            writeln!(f, "step\tloss").map_err(|e| CliError::Io(e.to_string()))?;
            Some(f)
        }
        None => None,
    };

    let model = Han::<f32>::new(config.model, config.seed)?;
    println!("training {} parameters for {} steps", model.num_parameters(), config.steps);
    let mut trainer = Trainer::new(model, config.adam);
    let mut losses = Vec::with_capacity(config.steps);
    let start = Instant::now();
    fit(&mut trainer, &mut source, config.batch_size, config.steps, |t, step, loss| {
        losses.push(loss);
        if let Some(f) = log.as_mut() {
            writeln!(f, "{step}\t{loss}").map_err(|e| CliError::Io(e.to_string()))?;
        }
        if config.log_every > 0 && (step % config.log_every == 0 || step == config.steps) {
            println!("step {step:>6}  loss {loss:.6}  {:.1}s", start.elapsed().as_secs_f64());
        }
        if config.checkpoint_every > 0 && step % config.checkpoint_every == 0 && step < config.steps {
            save_model(&config.checkpoint, config, t.model())?;
        }
        Ok(())
    })?;
    save_model(&config.checkpoint, config, trainer.model())?;
    println!("wrote {}", config.checkpoint.display());
    Ok(TrainSummary { losses })
}
