use std::fs;
use std::path::{Path, PathBuf};

use crate::degrade::{degrade, DegradationSpec};
use crate::error::{DataError, Result};
use crate::image::Image;
use crate::png_io::{read_png, write_png};

/// `*.png` files directly inside `dir`, sorted by file name.
pub fn list_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| DataError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| DataError::io(dir, e))?.path();
        let is_png = path.extension().is_some_and(|x| x.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// HR images of a dataset root. Images live in `<root>/HR/` when that directory
/// exists, otherwise directly in `<root>`.
#[derive(Debug, Clone)]
pub struct Dataset {
    root: PathBuf,
    names: Vec<String>,
    hr: Vec<Image>,
}

impl Dataset {
    pub fn load(root: &Path) -> Result<Self> {
        let dir = Self::hr_dir(root);
        if !dir.is_dir() {
            return Err(DataError::Dataset { path: dir, detail: "not a directory".into() });
        }
        let mut names = Vec::new();
        let mut hr = Vec::new();
        for path in list_pngs(&dir)? {
            names.push(path.file_name().unwrap().to_string_lossy().into_owned());
            hr.push(read_png(&path)?);
        }
        Ok(Dataset { root: root.to_path_buf(), names, hr })
    }

    pub fn hr_dir(root: &Path) -> PathBuf {
        let nested = root.join("HR");
        if nested.is_dir() { nested } else { root.to_path_buf() }
    }

    /// Cache location for LR images, `<root>/LR_<kind>_x<s>`.
    pub fn lr_dir(root: &Path, spec: &DegradationSpec) -> PathBuf {
        root.join(format!("LR_{}_x{}", spec.kind, spec.scale))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn hr(&self) -> &[Image] {
        &self.hr
    }

    pub fn len(&self) -> usize {
        self.hr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hr.is_empty()
    }

    /// (LR, cropped HR) per image. LR is 8-bit quantized so cached and freshly
    /// generated images agree; a cache file with the wrong extents is regenerated.
    pub fn pairs(&self, spec: &DegradationSpec, write_cache: bool) -> Result<Vec<(Image, Image)>> {
        let cache = Self::lr_dir(&self.root, spec);
        if write_cache {
            fs::create_dir_all(&cache).map_err(|e| DataError::io(&cache, e))?;
        }
        self.names
            .iter()
            .zip(&self.hr)
            .map(|(name, hr)| {
                let hr = hr.crop_to_multiple(spec.scale)?;
                let (w, h) = (hr.width() / spec.scale, hr.height() / spec.scale);
                let path = cache.join(name);
                if path.is_file() {
                    let lr = read_png(&path)?;
                    if (lr.width(), lr.height()) == (w, h) {
                        return Ok((lr, hr));
                    }
                }
                let lr = degrade(&hr, spec)?.quantized();
                if write_cache {
                    write_png(&path, &lr)?;
                }
                Ok((lr, hr))
            })
            .collect()
    }
}
