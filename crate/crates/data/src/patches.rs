use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::degrade::{degrade, DegradationSpec};
use crate::dihedral::Dihedral;
use crate::error::{DataError, Result};
use crate::image::Image;

#[derive(Clone, Debug, PartialEq)]
pub struct PatchPair {
    pub lr: Image,
    pub hr: Image,
    pub source: usize,
    /// Top-left corner in LR pixels; the HR corner is this times the scale.
    pub lr_top_left: (usize, usize),
    pub scale: usize,
    pub transform: Dihedral,
}

impl PatchPair {
    pub fn hr_top_left(&self) -> (usize, usize) {
        (self.lr_top_left.0 * self.scale, self.lr_top_left.1 * self.scale)
    }
}

/// Apply one uniformly drawn dihedral transform to both halves of the pair.
pub fn augment(pair: &PatchPair, seed: u64) -> PatchPair {
    let d = Dihedral::random(&mut ChaCha8Rng::seed_from_u64(seed));
    transform_pair(pair, d)
}

fn transform_pair(pair: &PatchPair, d: Dihedral) -> PatchPair {
    PatchPair { lr: d.apply(&pair.lr), hr: d.apply(&pair.hr), transform: d, ..pair.clone() }
}

/// Seeded stream of aligned LR/HR patches drawn from a set of image pairs.
#[derive(Debug, Clone)]
pub struct PatchSampler {
    pairs: Vec<(Image, Image)>,
    scale: usize,
    patch: usize,
    augment: bool,
    rng: ChaCha8Rng,
}

impl PatchSampler {
    /// Degrades each HR image with `spec`, then samples LR patches of `patch` pixels.
    pub fn new(hr: &[Image], spec: &DegradationSpec, patch: usize, seed: u64) -> Result<Self> {
        let pairs = hr
            .iter()
            .map(|im| Ok((degrade(im, spec)?, im.crop_to_multiple(spec.scale)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(pairs, spec.scale, patch, seed)
    }

    /// `pairs` are (LR, HR) with HR extents exactly `scale` times LR.
    pub fn from_pairs(pairs: Vec<(Image, Image)>, scale: usize, patch: usize, seed: u64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(DataError::Sampling("no images to sample from".into()));
        }
        if patch == 0 {
            return Err(DataError::Sampling("patch size must be positive".into()));
        }
        for (i, (lr, hr)) in pairs.iter().enumerate() {
            if (hr.width(), hr.height()) != (lr.width() * scale, lr.height() * scale) {
                return Err(DataError::Sampling(format!(
                    "pair {i}: HR {}x{} is not {scale}x LR {}x{}",
                    hr.width(),
                    hr.height(),
                    lr.width(),
                    lr.height()
                )));
            }
            if lr.width() < patch || lr.height() < patch {
                return Err(DataError::Sampling(format!(
                    "image {i}: LR {}x{} smaller than patch {patch}",
                    lr.width(),
                    lr.height()
                )));
            }
        }
        Ok(PatchSampler { pairs, scale, patch, augment: false, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn with_augmentation(mut self, on: bool) -> Self {
        self.augment = on;
        self
    }

    pub fn next_pair(&mut self) -> PatchPair {
        let source = self.rng.gen_range(0..self.pairs.len());
        let (lr, hr) = &self.pairs[source];
        let x = self.rng.gen_range(0..=lr.width() - self.patch);
        let y = self.rng.gen_range(0..=lr.height() - self.patch);
        let (p, s) = (self.patch, self.scale);
        let pair = PatchPair {
            lr: lr.crop(x, y, p, p).expect("patch inside LR"),
            hr: hr.crop(x * s, y * s, p * s, p * s).expect("patch inside HR"),
            source,
            lr_top_left: (x, y),
            scale: s,
            transform: Dihedral::IDENTITY,
        };
        if self.augment {
            let d = Dihedral::random(&mut self.rng);
            transform_pair(&pair, d)
        } else {
            pair
        }
    }

    pub fn batch(&mut self, n: usize) -> Vec<PatchPair> {
        (0..n).map(|_| self.next_pair()).collect()
    }
}

/// `count` unaugmented patch pairs from a single HR image.
pub fn sample_patches(hr: &Image, spec: &DegradationSpec, patch: usize, count: usize, seed: u64) -> Result<Vec<PatchPair>> {
    Ok(PatchSampler::new(std::slice::from_ref(hr), spec, patch, seed)?.batch(count))
}
