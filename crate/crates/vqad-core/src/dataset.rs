//! Dataset ingestion and on-disk layout.
//!
//! Layout:
//!
//! ```text
//! <root>/train/normal/*.png          anomaly-free training images
//! <root>/test/images/*.png           test images (normal and abnormal)
//! <root>/test/masks/*.png            ground-truth masks, {0,255}, same file name
//! ```
//!
//! Training images never carry masks; a test image without a mask file is a
//! normal sample. Samples are ordered lexicographically by file name, which
//! makes loading deterministic.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::ImageReader;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image_data::{ImageBuffer, ImageSample, Mask};

pub const INDEX_VERSION: &str = "vqad-index v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Test => write!(f, "test"),
        }
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::config(format!("unknown split '{other}'"))),
        }
    }
}

/// Kinds of synthetic anomalies; see [`crate::synth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnomalyKind {
    /// One cell's texture replaced by out-of-family noise.
    TexturePatch,
    /// Two structurally distinct cells exchanged; textures stay locally valid
    /// but end up at globally wrong positions.
    StructureSwap,
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnomalyKind::TexturePatch => write!(f, "texture_patch"),
            AnomalyKind::StructureSwap => write!(f, "structure_swap"),
        }
    }
}

impl FromStr for AnomalyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "texture_patch" => Ok(AnomalyKind::TexturePatch),
            "structure_swap" => Ok(AnomalyKind::StructureSwap),
            other => Err(Error::config(format!("unknown anomaly kind '{other}'"))),
        }
    }
}

pub type AnomalyKinds = BTreeSet<AnomalyKind>;

#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub split: Split,
    pub samples: Vec<ImageSample>,
    pub channels: usize,
    pub resolution: (usize, usize),
}

impl DatasetManifest {
    pub fn new(
        split: Split,
        samples: Vec<ImageSample>,
        channels: usize,
        resolution: (usize, usize),
    ) -> Result<Self> {
        let manifest = Self { split, samples, channels, resolution };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.samples {
            if s.pixels.height() != self.resolution.0
                || s.pixels.width() != self.resolution.1
                || s.pixels.channels() != self.channels
            {
                return Err(Error::data(format!(
                    "sample {}: shape {}x{}x{} differs from manifest {}x{}x{}",
                    s.id,
                    s.pixels.height(),
                    s.pixels.width(),
                    s.pixels.channels(),
                    self.resolution.0,
                    self.resolution.1,
                    self.channels
                )));
            }
            if self.split == Split::Train {
                if let Some(mask) = &s.mask {
                    if mask.any() {
                        return Err(Error::data(format!(
                            "train sample {} carries a nonzero anomaly mask",
                            s.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn png_files_sorted(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::config(format!("cannot read directory {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "png").unwrap_or(false))
        .collect();
    files.sort();
    Ok(files)
}

fn decode_image(path: &Path) -> Result<(ImageBuffer, usize)> {
    let img = ImageReader::open(path)?.decode()?;
    let channels = match img.color().channel_count() {
        1 | 2 => 1,
        _ => 3,
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = if channels == 1 {
        img.to_luma8().into_raw().iter().map(|&v| v as f32 / 255.0).collect()
    } else {
        img.to_rgb8().into_raw().iter().map(|&v| v as f32 / 255.0).collect()
    };
    Ok((ImageBuffer::new(h, w, channels, data)?, channels))
}

fn decode_mask(path: &Path) -> Result<Mask> {
    let img = ImageReader::open(path)?.decode()?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.into_raw().iter().map(|&v| u8::from(v > 127)).collect();
    Mask::new(h, w, data)
}

fn sample_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Load one split from the standard directory layout, resizing every image to
/// `resolution` (bilinear) and every mask to the same shape (nearest neighbor).
pub fn load_dataset(
    root: &Path,
    split: Split,
    resolution: (usize, usize),
) -> Result<DatasetManifest> {
    let (h, w) = resolution;
    let entries: Vec<(PathBuf, Option<PathBuf>)> = match split {
        Split::Train => {
            let dir = root.join("train").join("normal");
            png_files_sorted(&dir)?.into_iter().map(|p| (p, None)).collect()
        }
        Split::Test => {
            let images = root.join("test").join("images");
            let masks = root.join("test").join("masks");
            png_files_sorted(&images)?
                .into_iter()
                .map(|p| {
                    let mask = p
                        .file_name()
                        .map(|name| masks.join(name))
                        .filter(|m| m.is_file());
                    (p, mask)
                })
                .collect()
        }
    };

    let samples: Vec<ImageSample> = entries
        .par_iter()
        .map(|(img_path, mask_path)| -> Result<ImageSample> {
            let id = sample_id(img_path);
            let (raw, _) = decode_image(img_path)?;
            let pixels = raw.resize_bilinear(h, w)?;
            let mask = match mask_path {
                Some(mp) => {
                    let m = decode_mask(mp)?.resize_nearest(h, w)?;
                    if m.height() != pixels.height() || m.width() != pixels.width() {
                        return Err(Error::data(format!(
                            "sample {id}: mask shape mismatch after resize"
                        )));
                    }
                    Some(m)
                }
                None => None,
            };
            ImageSample::new(id, pixels, mask)
        })
        .collect::<Result<Vec<_>>>()?;

    if samples.is_empty() {
        return Err(Error::config(format!(
            "no PNG images found for split {split} under {}",
            root.display()
        )));
    }
    let channels = samples[0].pixels.channels();
    for s in &samples {
        if s.pixels.channels() != channels {
            return Err(Error::data(format!(
                "sample {}: channel count {} differs from dataset channel count {channels}",
                s.id,
                s.pixels.channels()
            )));
        }
    }
    DatasetManifest::new(split, samples, channels, resolution)
}

fn encode_png(pixels: &ImageBuffer, path: &Path) -> Result<()> {
    let (h, w, c) = (pixels.height() as u32, pixels.width() as u32, pixels.channels());
    let bytes: Vec<u8> = pixels
        .as_slice()
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    match c {
        1 => image::GrayImage::from_raw(w, h, bytes)
            .expect("buffer sized from dims")
            .save(path)?,
        3 => image::RgbImage::from_raw(w, h, bytes)
            .expect("buffer sized from dims")
            .save(path)?,
        other => return Err(Error::data(format!("cannot export {other}-channel PNG"))),
    }
    Ok(())
}

fn encode_mask_png(mask: &Mask, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = mask.as_slice().iter().map(|&v| v * 255).collect();
    image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, bytes)
        .expect("buffer sized from dims")
        .save(path)?;
    Ok(())
}

/// Write a manifest to the standard layout plus a plain-text index file.
pub fn save_dataset(manifest: &DatasetManifest, root: &Path) -> Result<()> {
    manifest.validate()?;
    let (img_dir, mask_dir) = match manifest.split {
        Split::Train => (root.join("train").join("normal"), None),
        Split::Test => (
            root.join("test").join("images"),
            Some(root.join("test").join("masks")),
        ),
    };
    fs::create_dir_all(&img_dir)?;
    if let Some(d) = &mask_dir {
        fs::create_dir_all(d)?;
    }

    let mut index = String::new();
    index.push_str(INDEX_VERSION);
    index.push('\n');
    index.push_str(&format!(
        "split={} channels={} height={} width={}\n",
        manifest.split, manifest.channels, manifest.resolution.0, manifest.resolution.1
    ));
    for s in &manifest.samples {
        let img_path = img_dir.join(format!("{}.png", s.id));
        encode_png(&s.pixels, &img_path)?;
        let rel_img = img_path.strip_prefix(root).unwrap_or(&img_path).to_string_lossy();
        let mask_field = match (&s.mask, &mask_dir) {
            (Some(mask), Some(dir)) => {
                let mask_path = dir.join(format!("{}.png", s.id));
                encode_mask_png(mask, &mask_path)?;
                mask_path.strip_prefix(root).unwrap_or(&mask_path).to_string_lossy().into_owned()
            }
            _ => "-".to_string(),
        };
        index.push_str(&format!("{}\t{}\t{}\n", s.id, rel_img, mask_field));
    }
    fs::write(root.join(format!("{}.index", manifest.split)), index)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize_dataset;

    fn kinds(list: &[AnomalyKind]) -> AnomalyKinds {
        list.iter().copied().collect()
    }

    #[test]
    fn missing_directory_is_config_error() {
        let err = load_dataset(Path::new("/nonexistent-vqad"), Split::Train, (64, 64))
            .expect_err("missing dir must fail");
        assert_eq!(err.category(), "config-error");
    }

    #[test]
    fn save_load_round_trips_manifest() {
        let (train, test) =
            synthesize_dataset(11, 3, 4, &kinds(&[AnomalyKind::TexturePatch])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&train, dir.path()).unwrap();
        save_dataset(&test, dir.path()).unwrap();

        let train2 = load_dataset(dir.path(), Split::Train, train.resolution).unwrap();
        assert_eq!(train2.len(), 3);
        let ids: Vec<_> = train.samples.iter().map(|s| s.id.clone()).collect();
        let ids2: Vec<_> = train2.samples.iter().map(|s| s.id.clone()).collect();
        assert_eq!(ids, ids2);
        assert!(train2.samples.iter().all(|s| s.mask.is_none()));

        let test2 = load_dataset(dir.path(), Split::Test, test.resolution).unwrap();
        assert_eq!(test2.len(), 4);
        for (a, b) in test.samples.iter().zip(test2.samples.iter()) {
            assert_eq!(a.id, b.id);
            assert_eq!(
                (a.pixels.height(), a.pixels.width(), a.pixels.channels()),
                (b.pixels.height(), b.pixels.width(), b.pixels.channels())
            );
            // Masks survive the 8-bit round trip exactly.
            assert_eq!(
                a.mask.as_ref().map(|m| m.as_slice().to_vec()),
                b.mask.as_ref().map(|m| m.as_slice().to_vec())
            );
        }

        // Second save: index is reproducible byte for byte.
        let idx1 = fs::read(dir.path().join("test.index")).unwrap();
        save_dataset(&test, dir.path()).unwrap();
        let idx2 = fs::read(dir.path().join("test.index")).unwrap();
        assert_eq!(idx1, idx2);
    }

    #[test]
    fn all_zero_mask_loads_as_normal_sample() {
        let (_, test) = synthesize_dataset(5, 1, 3, &AnomalyKinds::new()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&test, dir.path()).unwrap();
        let loaded = load_dataset(dir.path(), Split::Test, test.resolution).unwrap();
        for s in &loaded.samples {
            let mask = s.mask.as_ref().expect("synthetic test samples carry masks");
            assert!(!mask.any(), "sample {} should be normal", s.id);
        }
    }

    #[test]
    fn resize_on_load_matches_requested_resolution() {
        let mut img = ImageBuffer::zeros(240, 240, 1);
        for y in 0..240 {
            for x in 0..240 {
                img.set(y, x, 0, ((x * 7 + y * 3) % 256) as f32 / 255.0);
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let train_dir = dir.path().join("train").join("normal");
        fs::create_dir_all(&train_dir).unwrap();
        encode_png(&img, &train_dir.join("a.png")).unwrap();

        let manifest = load_dataset(dir.path(), Split::Train, (128, 128)).unwrap();
        let s = &manifest.samples[0];
        assert_eq!((s.pixels.height(), s.pixels.width()), (128, 128));
        let lo = s.pixels.as_slice().iter().copied().fold(f32::INFINITY, f32::min);
        let hi = s.pixels.as_slice().iter().copied().fold(f32::NEG_INFINITY, f32::max);
        assert!(lo >= 0.0 && hi <= 1.0);
    }

    #[test]
    fn train_split_rejects_nonzero_masks() {
        let img = ImageBuffer::zeros(8, 8, 1);
        let mut mask = Mask::zeros(8, 8);
        mask.set(1, 1, 1);
        let sample = ImageSample::new("bad", img, Some(mask)).unwrap();
        let err = DatasetManifest::new(Split::Train, vec![sample], 1, (8, 8))
            .expect_err("nonzero train mask must be rejected");
        assert_eq!(err.category(), "data-error");
    }
}
