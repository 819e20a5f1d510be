//! Synthetic desk-scale datasets with ground-truth anomaly masks.
//!
//! Normal images are a bordered 8x8 grid of textured cells. The cell layout
//! is drawn once per dataset seed and shared by every image, so the family is
//! globally consistent; per-image variation is a single brightness factor.
//! Two anomaly kinds are generated for test splits:
//!
//! - `texture_patch`: one interior cell replaced by out-of-family noise, a
//!   purely local defect;
//! - `structure_swap`: two structurally distinct cells exchanged, so each
//!   texture stays locally valid but sits at a globally wrong position.
//!
//! Generation is a pure function of the seed: equal seeds give bit-identical
//! datasets.

use rand::Rng;

use crate::dataset::{AnomalyKind, AnomalyKinds, DatasetManifest, Split};
use crate::error::{Error, Result};
use crate::image_data::{ImageBuffer, ImageSample, Mask};
use crate::seeds::{self, stream};

/// Synthetic image side length in pixels.
pub const RESOLUTION: usize = 64;
/// Side length of one textured cell in pixels.
pub const CELL: usize = 8;
/// Cells per image side.
pub const GRID: usize = RESOLUTION / CELL;

const N_TEXTURES: u8 = 7;
const FRAME: u8 = 0;

/// Value of texture `kind` at cell-local coordinates `(u, v)`, before the
/// per-image brightness factor.
fn texture(kind: u8, u: usize, v: usize) -> f32 {
    match kind {
        FRAME => {
            if u == 0 || u == CELL - 1 || v == 0 || v == CELL - 1 {
                0.90
            } else {
                0.30
            }
        }
        1 => {
            if (u / 2) % 2 == 0 {
                0.85
            } else {
                0.25
            }
        }
        2 => {
            if (v / 2) % 2 == 0 {
                0.85
            } else {
                0.25
            }
        }
        3 => {
            if (u / 2 + v / 2) % 2 == 0 {
                0.80
            } else {
                0.20
            }
        }
        4 => {
            if (u + v) % 4 < 2 {
                0.75
            } else {
                0.30
            }
        }
        5 => {
            let on = |t: usize| t % 4 == 1 || t % 4 == 2;
            if on(u) && on(v) {
                0.90
            } else {
                0.20
            }
        }
        _ => 0.55,
    }
}

/// Per-dataset cell layout: border cells are frames, interior cells draw from
/// the six structured textures.
fn draw_layout(seed: u64) -> Vec<u8> {
    let mut rng = seeds::rng(seed, &[stream::SYNTH_LAYOUT]);
    loop {
        let mut layout = vec![FRAME; GRID * GRID];
        for gy in 1..GRID - 1 {
            for gx in 1..GRID - 1 {
                layout[gy * GRID + gx] = rng.gen_range(1..N_TEXTURES);
            }
        }
        let first = layout[GRID + 1];
        let distinct = layout
            .iter()
            .enumerate()
            .any(|(i, &t)| interior_of_index(i).is_some() && t != first);
        if distinct {
            return layout;
        }
    }
}

fn interior_of_index(i: usize) -> Option<(usize, usize)> {
    let (gy, gx) = (i / GRID, i % GRID);
    if gy >= 1 && gy < GRID - 1 && gx >= 1 && gx < GRID - 1 {
        Some((gy, gx))
    } else {
        None
    }
}

fn render_normal(layout: &[u8], brightness: f32) -> ImageBuffer {
    let mut img = ImageBuffer::zeros(RESOLUTION, RESOLUTION, 1);
    for y in 0..RESOLUTION {
        for x in 0..RESOLUTION {
            let kind = layout[(y / CELL) * GRID + (x / CELL)];
            let value = (brightness * texture(kind, y % CELL, x % CELL)).clamp(0.0, 1.0);
            img.set(y, x, 0, value);
        }
    }
    img
}

fn brightness_for(seed: u64, split_stream: u64, index: usize) -> f32 {
    let mut rng = seeds::rng(seed, &[split_stream, index as u64, 0]);
    rng.gen_range(0.82..1.0)
}

fn pick_interior_cell(rng: &mut impl Rng) -> (usize, usize) {
    (rng.gen_range(1..GRID - 1), rng.gen_range(1..GRID - 1))
}

fn mark_cell(mask: &mut Mask, gy: usize, gx: usize) {
    for u in 0..CELL {
        for v in 0..CELL {
            mask.set(gy * CELL + u, gx * CELL + v, 1);
        }
    }
}

fn apply_texture_patch(img: &mut ImageBuffer, mask: &mut Mask, rng: &mut impl Rng) {
    let (gy, gx) = pick_interior_cell(rng);
    for u in 0..CELL {
        for v in 0..CELL {
            img.set(gy * CELL + u, gx * CELL + v, 0, rng.gen::<f32>());
        }
    }
    mark_cell(mask, gy, gx);
}

fn apply_structure_swap(img: &mut ImageBuffer, mask: &mut Mask, layout: &[u8], rng: &mut impl Rng) {
    let (ay, ax) = pick_interior_cell(rng);
    let (by, bx) = loop {
        let (gy, gx) = pick_interior_cell(rng);
        if layout[gy * GRID + gx] != layout[ay * GRID + ax] {
            break (gy, gx);
        }
    };
    for u in 0..CELL {
        for v in 0..CELL {
            let pa = img.get(ay * CELL + u, ax * CELL + v, 0);
            let pb = img.get(by * CELL + u, bx * CELL + v, 0);
            img.set(ay * CELL + u, ax * CELL + v, 0, pb);
            img.set(by * CELL + u, bx * CELL + v, 0, pa);
        }
    }
    mark_cell(mask, ay, ax);
    mark_cell(mask, by, bx);
}

/// Anomaly kind assigned to test sample `index`: enabled kinds in order, then
/// one normal sample, repeating. An empty kind set yields an all-normal split.
fn kind_for_index(kinds: &AnomalyKinds, index: usize) -> Option<AnomalyKind> {
    let ordered: Vec<AnomalyKind> = kinds.iter().copied().collect();
    let cycle = ordered.len() + 1;
    let slot = index % cycle;
    ordered.get(slot).copied()
}

/// Pre-anomaly render of test sample `index` for dataset `seed`; used to
/// verify that anomalies touch exactly the masked pixels.
pub(crate) fn test_sample_normal_render(seed: u64, index: usize) -> ImageBuffer {
    let layout = draw_layout(seed);
    render_normal(&layout, brightness_for(seed, stream::SYNTH_TEST, index))
}

/// Generate a train and a test manifest. Pure function of `seed`.
pub fn synthesize_dataset(
    seed: u64,
    n_train: usize,
    n_test: usize,
    kinds: &AnomalyKinds,
) -> Result<(DatasetManifest, DatasetManifest)> {
    if n_train == 0 || n_test == 0 {
        return Err(Error::config("n_train and n_test must each be at least 1".to_string()));
    }
    let layout = draw_layout(seed);

    let mut train_samples = Vec::with_capacity(n_train);
    for i in 0..n_train {
        let img = render_normal(&layout, brightness_for(seed, stream::SYNTH_TRAIN, i));
        train_samples.push(ImageSample::new(format!("train_{i:04}"), img, None)?);
    }

    let mut test_samples = Vec::with_capacity(n_test);
    for i in 0..n_test {
        let mut img = render_normal(&layout, brightness_for(seed, stream::SYNTH_TEST, i));
        let mut mask = Mask::zeros(RESOLUTION, RESOLUTION);
        match kind_for_index(kinds, i) {
            Some(kind) => {
                let mut rng = seeds::rng(seed, &[stream::SYNTH_TEST, i as u64, 1]);
                match kind {
                    AnomalyKind::TexturePatch => apply_texture_patch(&mut img, &mut mask, &mut rng),
                    AnomalyKind::StructureSwap => {
                        apply_structure_swap(&mut img, &mut mask, &layout, &mut rng)
                    }
                }
            }
            None => {}
        }
        test_samples.push(ImageSample::new(format!("test_{i:04}"), img, Some(mask))?);
    }

    let train =
        DatasetManifest::new(Split::Train, train_samples, 1, (RESOLUTION, RESOLUTION))?;
    let test = DatasetManifest::new(Split::Test, test_samples, 1, (RESOLUTION, RESOLUTION))?;
    Ok((train, test))
}

/// Kind of the synthetic test sample `index`, mirroring [`synthesize_dataset`].
pub fn synthetic_kind_for_index(kinds: &AnomalyKinds, index: usize) -> Option<AnomalyKind> {
    kind_for_index(kinds, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(list: &[AnomalyKind]) -> AnomalyKinds {
        list.iter().copied().collect()
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let ks = kinds(&[AnomalyKind::TexturePatch, AnomalyKind::StructureSwap]);
        let (tr1, te1) = synthesize_dataset(42, 4, 6, &ks).unwrap();
        let (tr2, te2) = synthesize_dataset(42, 4, 6, &ks).unwrap();
        for (a, b) in tr1.samples.iter().zip(tr2.samples.iter()) {
            assert_eq!(a.id, b.id);
            let bits_a: Vec<u32> = a.pixels.as_slice().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u32> = b.pixels.as_slice().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
        for (a, b) in te1.samples.iter().zip(te2.samples.iter()) {
            let bits_a: Vec<u32> = a.pixels.as_slice().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u32> = b.pixels.as_slice().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
            assert_eq!(a.mask.as_ref().unwrap().as_slice(), b.mask.as_ref().unwrap().as_slice());
        }
    }

    #[test]
    fn empty_kinds_gives_all_zero_masks() {
        let (_, test) = synthesize_dataset(9, 2, 5, &AnomalyKinds::new()).unwrap();
        for s in &test.samples {
            assert!(!s.mask.as_ref().unwrap().any());
        }
    }

    #[test]
    fn structure_swap_mask_covers_exactly_two_cells() {
        let ks = kinds(&[AnomalyKind::StructureSwap]);
        let (_, test) = synthesize_dataset(7, 1, 8, &ks).unwrap();
        for (i, s) in test.samples.iter().enumerate() {
            if kind_for_index(&ks, i) == Some(AnomalyKind::StructureSwap) {
                assert_eq!(s.mask.as_ref().unwrap().count_ones(), 2 * CELL * CELL);
            }
        }
    }

    #[test]
    fn anomalies_touch_only_masked_pixels() {
        let ks = kinds(&[AnomalyKind::TexturePatch, AnomalyKind::StructureSwap]);
        let (_, test) = synthesize_dataset(13, 1, 9, &ks).unwrap();
        for (i, s) in test.samples.iter().enumerate() {
            let normal = test_sample_normal_render(13, i);
            let mask = s.mask.as_ref().unwrap();
            let mut altered_outside = 0usize;
            let mut altered_inside = 0usize;
            for y in 0..RESOLUTION {
                for x in 0..RESOLUTION {
                    let differs = s.pixels.get(y, x, 0) != normal.get(y, x, 0);
                    if differs && mask.get(y, x) == 0 {
                        altered_outside += 1;
                    }
                    if differs && mask.get(y, x) == 1 {
                        altered_inside += 1;
                    }
                }
            }
            assert_eq!(altered_outside, 0, "sample {} altered outside mask", s.id);
            if mask.any() {
                assert!(altered_inside > 0, "abnormal sample {} unchanged", s.id);
            }
        }
    }

    #[test]
    fn swap_cells_are_structurally_distinct() {
        // The swapped regions must contain genuinely different textures, or the
        // anomaly would be invisible by construction.
        let ks = kinds(&[AnomalyKind::StructureSwap]);
        let (_, test) = synthesize_dataset(21, 1, 4, &ks).unwrap();
        for (i, s) in test.samples.iter().enumerate() {
            if kind_for_index(&ks, i) != Some(AnomalyKind::StructureSwap) {
                continue;
            }
            let normal = test_sample_normal_render(21, i);
            let mask = s.mask.as_ref().unwrap();
            let diff: f32 = (0..RESOLUTION)
                .flat_map(|y| (0..RESOLUTION).map(move |x| (y, x)))
                .filter(|&(y, x)| mask.get(y, x) == 1)
                .map(|(y, x)| (s.pixels.get(y, x, 0) - normal.get(y, x, 0)).abs())
                .sum();
            assert!(diff > 1.0, "swapped cells barely differ (sum abs diff {diff})");
        }
    }
}
