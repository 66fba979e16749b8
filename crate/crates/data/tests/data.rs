use han_data::{
    augment, bicubic_resize, decode_png, degrade, encode_png, gaussian_blur, gaussian_kernel, rgb_to_ycbcr,
    sample_patches, y_channel, write_png, Colorspace, DataError, Dataset, DegradationSpec, Dihedral, Image,
    PatchSampler,
};
use proptest::prelude::*;

fn raw_png(w: u32, h: u32, color: png::ColorType, data: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, w, h);
    enc.set_color(color);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().unwrap();
    writer.write_image_data(data).unwrap();
    writer.finish().unwrap();
    out
}

fn pixels(image: &Image) -> Vec<u8> {
    let mut v = Vec::new();
    for i in 0..image.width() * image.height() {
        for c in 0..3 {
            v.push((image.plane(c)[i] * 255.0).round() as u8);
        }
    }
    v
}

fn textured(w: usize, h: usize) -> Image {
    Image::from_fn(w, h, |c, x, y| {
        0.5 + 0.4 * ((x as f64 * 0.7 + c as f64).sin() * (y as f64 * 0.45 - c as f64 * 0.3).cos())
    })
}

#[test]
fn white_pixel_decodes_to_ones() {
    let im = decode_png(&raw_png(1, 1, png::ColorType::Rgb, &[255, 255, 255])).unwrap();
    assert_eq!((im.width(), im.height()), (1, 1));
    for c in 0..3 {
        assert_eq!(im.plane(c), &[1.0]);
    }
}

#[test]
fn truncated_stream_is_a_decode_error() {
    let bytes = raw_png(8, 8, png::ColorType::Rgb, &[7; 192]);
    for cut in [4, 20, bytes.len() / 2, bytes.len() - 13] {
        assert!(matches!(decode_png(&bytes[..cut]), Err(DataError::Decode(_))), "cut at {cut}");
    }
}

#[test]
fn non_rgb_is_unsupported() {
    let gray = raw_png(2, 2, png::ColorType::Grayscale, &[0, 1, 2, 3]);
    let rgba = raw_png(1, 1, png::ColorType::Rgba, &[1, 2, 3, 4]);
    assert!(matches!(decode_png(&gray), Err(DataError::Unsupported(_))));
    assert!(matches!(decode_png(&rgba), Err(DataError::Unsupported(_))));
}

proptest! {
    #[test]
    fn png_round_trip_is_lossless(w in 1u32..12, h in 1u32..12, seed in any::<u64>()) {
        let mut state = seed;
        let data: Vec<u8> = (0..w * h * 3).map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 56) as u8
        }).collect();
        let decoded = decode_png(&raw_png(w, h, png::ColorType::Rgb, &data)).unwrap();
        prop_assert_eq!(pixels(&decoded), data.clone());
        let again = decode_png(&encode_png(&decoded).unwrap()).unwrap();
        prop_assert_eq!(&again, &decoded);
    }
}

#[test]
fn luma_of_white_black_and_gray() {
    let white = y_channel(&Image::constant(2, 2, [1.0, 1.0, 1.0]));
    let black = y_channel(&Image::constant(2, 2, [0.0, 0.0, 0.0]));
    assert!(white.iter().all(|&v| (v - 235.0 / 255.0).abs() < 1e-12));
    assert!(black.iter().all(|&v| (v - 16.0 / 255.0).abs() < 1e-12));
    for g in [0.0, 0.2, 0.5, 1.0] {
        let ycc = rgb_to_ycbcr(&Image::constant(3, 1, [g, g, g])).unwrap();
        assert_eq!(ycc.colorspace(), Colorspace::YCbCr);
        for c in 1..3 {
            assert!(ycc.plane(c).iter().all(|&v| (v - 128.0 / 255.0).abs() < 1e-12), "gray {g}");
        }
    }
}

#[test]
fn ycbcr_input_is_rejected_and_y_is_passed_through() {
    let ycc = rgb_to_ycbcr(&textured(5, 4)).unwrap();
    assert!(matches!(rgb_to_ycbcr(&ycc), Err(DataError::Contract(_))));
    assert_eq!(y_channel(&ycc), ycc.plane(0));
    assert_eq!(y_channel(&textured(5, 4)), ycc.plane(0));
}

// Keys kernel written in expanded polynomial form for a = -0.5.
fn keys(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        1.5 * x.powi(3) - 2.5 * x * x + 1.0
    } else if x < 2.0 {
        -0.5 * x.powi(3) + 2.5 * x * x - 4.0 * x + 2.0
    } else {
        0.0
    }
}

// Full 2-D sum over every source pixel, borders handled by clamping the tap position.
fn bicubic_oracle(src: &Image, c: usize, w: usize, h: usize) -> Vec<f64> {
    let (sw, sh) = (src.width(), src.height());
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let sx = (x as f64 + 0.5) * sw as f64 / w as f64 - 0.5;
            let sy = (y as f64 + 0.5) * sh as f64 / h as f64 - 0.5;
            let mut acc = 0.0;
            for ty in (sy.floor() as i64 - 1)..=(sy.floor() as i64 + 2) {
                for tx in (sx.floor() as i64 - 1)..=(sx.floor() as i64 + 2) {
                    let v = src.get(c, tx.clamp(0, sw as i64 - 1) as usize, ty.clamp(0, sh as i64 - 1) as usize);
                    acc += keys(sx - tx as f64) * keys(sy - ty as f64) * v;
                }
            }
            out.push(acc.clamp(0.0, 1.0));
        }
    }
    out
}

#[test]
fn bicubic_ramp_matches_direct_oracle() {
    let ramp = Image::from_fn(24, 10, |_, x, _| x as f64 / 23.0);
    for (w, h) in [(12, 5), (8, 10), (6, 3), (48, 20), (17, 7)] {
        let out = bicubic_resize(&ramp, w, h);
        for c in 0..3 {
            let oracle = bicubic_oracle(&ramp, c, w, h);
            for (a, b) in out.plane(c).iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-6, "{w}x{h}: {a} vs {b}");
            }
            if w <= 24 {
                assert!(out.plane(c).iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }
    let textured = textured(13, 11);
    let out = bicubic_resize(&textured, 7, 5);
    let oracle = bicubic_oracle(&textured, 1, 7, 5);
    for (a, b) in out.plane(1).iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn bicubic_identity_at_same_size() {
    let im = textured(9, 6);
    assert_eq!(bicubic_resize(&im, 9, 6), im);
}

#[test]
fn gaussian_impulse_matches_closed_form() {
    let (n, ksize, sigma) = (15, 7, 1.6);
    let impulse = Image::from_fn(n, n, |c, x, y| if c == 0 && x == 7 && y == 7 { 1.0 } else { 0.0 });
    let out = gaussian_blur(&impulse, ksize, sigma).unwrap();
    let norm: f64 = (-3..=3).map(|d: i32| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp()).sum();
    let g = |d: i64| if d.abs() > 3 { 0.0 } else { (-(d * d) as f64 / (2.0 * sigma * sigma)).exp() / norm };
    for y in 0..n {
        for x in 0..n {
            let expect = g(x as i64 - 7) * g(y as i64 - 7);
            assert!((out.get(0, x, y) - expect).abs() < 1e-9);
            assert_eq!(out.get(1, x, y), 0.0);
        }
    }
    let sum: f64 = gaussian_kernel(ksize, sigma).unwrap().iter().sum();
    assert!((sum - 1.0).abs() < 1e-9);
}

#[test]
fn gaussian_delta_limit_and_constants() {
    let im = textured(10, 8);
    assert_eq!(gaussian_blur(&im, 7, 0.0).unwrap(), im);
    let blurred = gaussian_blur(&im, 7, 1e-3).unwrap();
    assert!(blurred.plane(0).iter().zip(im.plane(0)).all(|(a, b)| (a - b).abs() < 1e-12));
}

proptest! {
    #[test]
    fn filters_preserve_constants(
        w in 1usize..20, h in 1usize..20, tw in 1usize..30, th in 1usize..30,
        v in 0.0f64..=1.0, k in 1usize..5, sigma in 0.1f64..4.0,
    ) {
        let im = Image::constant(w, h, [v, 1.0 - v, v * 0.5]);
        let r = bicubic_resize(&im, tw, th);
        let b = gaussian_blur(&im, 2 * k + 1, sigma).unwrap();
        for c in 0..3 {
            let want = im.plane(c)[0];
            prop_assert!(r.plane(c).iter().all(|x| (x - want).abs() < 1e-9));
            prop_assert!(b.plane(c).iter().all(|x| (x - want).abs() < 1e-9));
        }
    }

    #[test]
    fn outputs_stay_in_unit_range(w in 2usize..16, h in 2usize..16, tw in 1usize..24, th in 1usize..24, seed in any::<u64>()) {
        let mut state = seed;
        let im = Image::from_fn(w, h, |_, _, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            if (state >> 63) == 1 { 1.0 } else { 0.0 }
        });
        let outs = [bicubic_resize(&im, tw, th), gaussian_blur(&im, 5, 1.2).unwrap(), rgb_to_ycbcr(&im).unwrap()];
        for o in &outs {
            for c in 0..3 {
                prop_assert!(o.plane(c).iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }
}

#[test]
fn degrade_shapes_and_constants() {
    for s in [2, 3, 4, 8] {
        let hr = textured(8 * s + s / 2 + 1, 4 * s + 1);
        for spec in [DegradationSpec::bi(s), DegradationSpec::bd(s)] {
            let lr = degrade(&hr, &spec).unwrap();
            assert_eq!((lr.width(), lr.height()), (8 + (s / 2 + 1) / s, 4), "{spec:?}");
        }
        let flat = Image::constant(6 * s, 5 * s, [0.3, 0.6, 0.9]);
        let lr = degrade(&flat, &DegradationSpec::bi(s)).unwrap();
        for (c, want) in [0.3, 0.6, 0.9].into_iter().enumerate() {
            assert!(lr.plane(c).iter().all(|v| (v - want).abs() < 1e-9));
        }
    }
}

#[test]
fn bd_differs_from_bi_on_texture() {
    let hr = textured(36, 30);
    let bi = degrade(&hr, &DegradationSpec::bi(3)).unwrap();
    let bd = degrade(&hr, &DegradationSpec::bd(3)).unwrap();
    let diff = bi.plane(0).iter().zip(bd.plane(0)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff > 1e-3, "max difference {diff}");
}

#[test]
fn invalid_specs_are_rejected() {
    let hr = textured(12, 12);
    assert!(degrade(&hr, &DegradationSpec::bi(5)).is_err());
    let mut bd = DegradationSpec::bd(2);
    bd.sigma = 0.0;
    assert!(degrade(&hr, &bd).is_err());
    bd.sigma = 1.0;
    bd.kernel_size = 1;
    assert!(degrade(&hr, &bd).is_err());
    assert!("bx".parse::<han_data::DegradationKind>().is_err());
    assert_eq!("BD".parse::<han_data::DegradationKind>().unwrap(), han_data::DegradationKind::Bd);
}

#[test]
fn patch_sampling_is_deterministic_and_aligned() {
    let hr = textured(50, 41);
    let spec = DegradationSpec::bi(2);
    let a = sample_patches(&hr, &spec, 8, 12, 99).unwrap();
    assert_eq!(a, sample_patches(&hr, &spec, 8, 12, 99).unwrap());
    assert_ne!(a, sample_patches(&hr, &spec, 8, 12, 100).unwrap());
    let lr_full = degrade(&hr, &spec).unwrap();
    let hr_full = hr.crop_to_multiple(2).unwrap();
    for p in &a {
        let (x, y) = p.lr_top_left;
        assert_eq!(p.hr_top_left(), (2 * x, 2 * y));
        assert_eq!((p.hr.width(), p.hr.height()), (16, 16));
        assert_eq!(p.lr, lr_full.crop(x, y, 8, 8).unwrap());
        assert_eq!(p.hr, hr_full.crop(2 * x, 2 * y, 16, 16).unwrap());
    }
}

#[test]
fn image_smaller_than_patch_is_a_sampling_error() {
    let hr = textured(30, 30);
    assert!(matches!(sample_patches(&hr, &DegradationSpec::bi(2), 16, 1, 0), Err(DataError::Sampling(_))));
}

#[test]
fn augmentation_commutes_with_degradation_on_constants() {
    let hr = Image::constant(16, 8, [0.2, 0.4, 0.8]);
    let spec = DegradationSpec::bi(2);
    for d in Dihedral::ALL {
        assert_eq!(degrade(&d.apply(&hr), &spec).unwrap(), d.apply(&degrade(&hr, &spec).unwrap()));
    }
}

#[test]
fn augmented_pairs_stay_consistent() {
    let hr = textured(40, 40);
    let spec = DegradationSpec::bi(2);
    let mut sampler = PatchSampler::new(std::slice::from_ref(&hr), &spec, 6, 3).unwrap().with_augmentation(true);
    for p in sampler.batch(32) {
        let inv = p.transform.inverse();
        let (x, y) = p.lr_top_left;
        let lr_full = degrade(&hr, &spec).unwrap();
        assert_eq!(inv.apply(&p.lr), lr_full.crop(x, y, 6, 6).unwrap());
        assert_eq!(inv.apply(&p.hr), hr.crop(2 * x, 2 * y, 12, 12).unwrap());
    }
}

#[test]
fn dihedral_coverage_over_many_draws() {
    let hr = textured(20, 20);
    let pair = sample_patches(&hr, &DegradationSpec::bi(2), 4, 1, 0).unwrap().remove(0);
    let mut counts = [0usize; 8];
    for seed in 0..10_000 {
        counts[augment(&pair, seed).transform.index()] += 1;
    }
    // expected 1250 each; 1000..1500 is more than 7 standard deviations wide
    assert!(counts.iter().all(|&n| (1000..1500).contains(&n)), "{counts:?}");
}

#[test]
fn dataset_lists_sorted_and_caches_lr() {
    let dir = tempfile::tempdir().unwrap();
    let hr_dir = dir.path().join("HR");
    std::fs::create_dir(&hr_dir).unwrap();
    for (name, shift) in [("b.png", 0.1), ("a.png", 0.2), ("c.PNG", 0.3)] {
        write_png(&hr_dir.join(name), &Image::from_fn(13, 9, |c, x, y| shift + (c + x + y) as f64 / 40.0)).unwrap();
    }
    std::fs::write(hr_dir.join("notes.txt"), "skip me").unwrap();
    let ds = Dataset::load(dir.path()).unwrap();
    assert_eq!(ds.names(), ["a.png", "b.png", "c.PNG"]);

    let spec = DegradationSpec::bi(3);
    let fresh = ds.pairs(&spec, false).unwrap();
    assert!(!Dataset::lr_dir(dir.path(), &spec).exists());
    let written = ds.pairs(&spec, true).unwrap();
    let cached = ds.pairs(&spec, false).unwrap();
    assert_eq!(fresh, written);
    assert_eq!(fresh, cached);
    assert!(Dataset::lr_dir(dir.path(), &spec).join("a.png").is_file());
    assert_eq!((fresh[0].0.width(), fresh[0].1.width()), (4, 12));
}

#[test]
fn missing_dataset_dir_reports_path() {
    let err = Dataset::load(std::path::Path::new("/nonexistent/han-data")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/han-data"));
}
