use std::fs;
use std::path::Path;

use han_data::{degrade, list_pngs, read_png, write_png, DegradationSpec, Image};
use han_metrics::{evaluate_dataset, self_ensemble, EvalReport};
use han_model::Han;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Model and run config stored in a checkpoint.
pub fn load_model(path: &Path) -> Result<(Han<f32>, RunConfig)> {
    let ckpt = Checkpoint::load(path)?;
    let config = RunConfig::parse(&ckpt.config_text, Path::new("/"))
        .map_err(|e| CliError::Io(format!("{}: stored config unreadable: {e}", path.display())))?;
    let model = Han::from_params(config.model, ckpt.to_params()?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok((model, config))
}

pub fn upscale(model: &Han<f32>, lr: &Image) -> Result<Image> {
    let out = model.predict(&lr.to_tensor::<f32>())?;
    Ok(Image::from_tensor(&out, 0)?)
}

pub fn upscale_with(model: &Han<f32>, lr: &Image, ensemble: bool) -> Result<Image> {
    if ensemble {
        self_ensemble(|im: &Image| upscale(model, im), lr)
    } else {
        upscale(model, lr)
    }
}

pub struct EvalOptions {
    pub spec: DegradationSpec,
    pub self_ensemble: bool,
    pub crop: Option<usize>,
}

pub fn cmd_eval(checkpoint: &Path, dir: &Path, opts: &EvalOptions) -> Result<EvalReport> {
    let (model, _) = load_model(checkpoint)?;
    if model.config().scale != opts.spec.scale {
        return Err(CliError::Config(format!(
            "checkpoint upscales x{}, evaluation asked for x{}",
            model.config().scale,
            opts.spec.scale
        )));
    }
    Ok(evaluate_dataset(|lr: &Image| upscale_with(&model, lr, opts.self_ensemble), dir, &opts.spec, opts.crop)?)
}

pub fn cmd_infer(checkpoint: &Path, input: &Path, output: &Path, ensemble: bool) -> Result<()> {
    let (model, _) = load_model(checkpoint)?;
    let lr = read_png(input)?;
    let sr = upscale_with(&model, &lr, ensemble)?;
    write_png(output, &sr)?;
    Ok(())
}

/// Degrade every PNG in `hr_dir` into `out_dir` under the same file name. Returns the count.
pub fn cmd_degrade(hr_dir: &Path, out_dir: &Path, spec: &DegradationSpec) -> Result<usize> {
    spec.validate()?;
    let files = list_pngs(hr_dir)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    for path in &files {
        let lr = degrade(&read_png(path)?, spec)?;
        write_png(&out_dir.join(path.file_name().unwrap()), &lr)?;
    }
    Ok(files.len())
}
