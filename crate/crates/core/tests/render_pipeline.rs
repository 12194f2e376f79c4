use boltid_core::geometry::{arc_length, region_rect, trace_contour, warp_to_upright};
use boltid_core::identify::{enroll, find_collisions, nearest_match, COLLISION_FRAC};
use boltid_core::imagecore::{connected_components, filter_min_area, BinaryImage, PixelPoint};
use boltid_core::pipeline::{extract_features, measure_frame, PipelineConfig};
use boltid_core::synth::{add_noise, render_bolt, render_frame, standard_catalog, BoltSpec, Placement, RenderParams};

fn spec(name: &str) -> BoltSpec {
    standard_catalog().into_iter().find(|s| s.name == name).unwrap()
}

fn render(name: &str, angle: f64) -> BinaryImage {
    render_bolt(&spec(name), &RenderParams::centered(1100, 1100, angle))
        .unwrap()
        .0
}

#[test]
fn rotated_warp_keeps_the_pixel_count() {
    for name in ["M8x35_HT", "M5x12_FT", "M12x70_HT"] {
        let (_, flat) = render_bolt(&spec(name), &RenderParams::centered(1100, 1100, 0.0)).unwrap();
        let img = render(name, 30.0);
        let upright = warp_to_upright(&img, &region_rect(&img).unwrap()).unwrap();
        let (got, want) = (upright.count_white() as f64, flat.white_count as f64);
        assert!((got - want).abs() <= 0.02 * want, "{name}: {got} vs {want}");
    }
}

#[test]
fn head_side_does_not_matter() {
    let cfg = PipelineConfig::default();
    for name in ["M10x50_HT", "M6x30_FT"] {
        let a = extract_features(&render(name, 0.0), &cfg).unwrap();
        let b = extract_features(&render(name, 180.0), &cfg).unwrap();
        assert_eq!(a.threading, b.threading);
        assert!((a.major_px - b.major_px).abs() <= 1.0);
        assert!((a.minor_px - b.minor_px).abs() <= 1.0);
        assert!((a.pitch_px.unwrap() - b.pitch_px.unwrap()).abs() <= 0.5);
    }
}

#[test]
fn integer_translation_gives_identical_features() {
    let s = spec("M8x25_HT");
    let cfg = PipelineConfig::default();
    let at = |x, y| {
        let mut p = RenderParams::centered(900, 900, 37.0);
        p.center = PixelPoint::new(x, y);
        let (img, _) = render_bolt(&s, &p).unwrap();
        let comps = connected_components(&img);
        assert_eq!(comps.len(), 1);
        extract_features(&comps[0].mask, &cfg).unwrap()
    };
    assert_eq!(at(450, 450), at(300, 520));
}

#[test]
fn frame_components_match_placements() {
    let cat = standard_catalog();
    let names = ["M4x20_FT", "M6x40_HT", "M8x45_FT", "M10x25_FT", "M5x60_FT", "M12x40_HT"];
    let placements: Vec<Placement> = names
        .iter()
        .enumerate()
        .map(|(i, n)| Placement {
            spec: cat.iter().find(|s| s.name == *n).unwrap().clone(),
            center: PixelPoint::new(600 + 1200 * (i % 2), 350 + 700 * (i / 2)),
            angle_deg: 20.0 + 47.0 * i as f64,
        })
        .collect();
    let (img, truths) = render_frame(2400, 2100, &placements, 12.42, 0.0, 1).unwrap();
    let bolts = measure_frame(&img, &PipelineConfig::default());
    assert_eq!(bolts.len(), placements.len());
    for b in &bolts {
        let t = truths
            .iter()
            .find(|t| t.placement == b.component.rect)
            .expect("component matches a placement");
        assert_eq!(b.component.area, t.white_count);
        let f = b.features.as_ref().unwrap();
        assert_eq!(f.threading, t.spec.threading, "{}", t.spec.name);
        assert!((f.major_px - t.major_px()).abs() <= 2.0, "{}", t.spec.name);
    }
}

#[test]
fn noise_flips_stay_within_three_sigma() {
    let img = render("M10x65_FT", 12.0);
    let n = (img.width() * img.height()) as f64;
    for (rate, seed) in [(0.002, 1u64), (0.005, 2), (0.02, 3)] {
        let noisy = add_noise(&img, rate, seed).unwrap();
        let flips = img
            .as_slice()
            .iter()
            .zip(noisy.as_slice())
            .filter(|(a, b)| a != b)
            .count() as f64;
        let (mean, sigma) = (n * rate, (n * rate * (1.0 - rate)).sqrt());
        assert!(
            (flips - mean).abs() <= 3.0 * sigma,
            "rate {rate}: {flips} flips, expected {mean}±{sigma}"
        );
    }
}

#[test]
fn min_area_filter_removes_noise_specks() {
    let noisy = add_noise(&render("M6x55_FT", 64.0), 0.002, 9).unwrap();
    let comps = filter_min_area(connected_components(&noisy), 50);
    assert_eq!(comps.len(), 1);
}

#[test]
fn perimeter_scales_with_size() {
    let disc = |r: f64| {
        let n = (2.0 * r) as usize + 8;
        let c = n as f64 / 2.0;
        let mut img = BinaryImage::black(n, n);
        for y in 0..n {
            for x in 0..n {
                if (x as f64 + 0.5 - c).hypot(y as f64 + 0.5 - c) <= r {
                    img.set(x, y, true);
                }
            }
        }
        arc_length(&trace_contour(&img).unwrap())
    };
    for r in [20.0, 45.0, 80.0] {
        let ratio = disc(2.0 * r) / disc(r);
        assert!((ratio - 2.0).abs() < 0.04, "r {r}: ratio {ratio}");
    }
}

#[test]
fn catalog_self_identifies() {
    let cfg = PipelineConfig::default();
    let samples: Vec<(String, BinaryImage)> = standard_catalog()
        .iter()
        .map(|s| {
            (
                s.name.clone(),
                render_bolt(s, &RenderParams::centered(1100, 1100, 0.0)).unwrap().0,
            )
        })
        .collect();
    let enrolled = enroll(&samples, &cfg, 12.42).unwrap();
    assert!(enrolled.collisions.is_empty());
    assert_eq!(find_collisions(&enrolled.table, COLLISION_FRAC), enrolled.collisions);
    for (name, img) in &samples {
        let m = nearest_match(&extract_features(img, &cfg).unwrap(), &enrolled.table).unwrap();
        assert_eq!(&m.name, name);
        assert!(m.distance_px <= 2.0);
    }

    // one entry, re-rendered at another angle
    let s = spec("M8x35_HT");
    let one = enroll(&[(s.name.clone(), render("M8x35_HT", 0.0))], &cfg, 12.42).unwrap();
    for angle in [33.0, 118.0, 251.0] {
        let f = extract_features(&render("M8x35_HT", angle), &cfg).unwrap();
        let m = nearest_match(&f, &one.table).unwrap();
        assert_eq!(m.name, s.name);
        assert!(m.distance_px <= 0.02 * f.major_px, "{angle}: {}", m.distance_px);
    }
}

#[test]
fn close_bolts_enroll_with_a_collision() {
    let a = spec("M8x35_HT");
    let mut b = a.clone();
    b.name = "M8x35_HT_alt".into();
    b.length_mm *= 1.005;
    let samples = vec![
        (
            a.name.clone(),
            render_bolt(&a, &RenderParams::centered(700, 700, 0.0)).unwrap().0,
        ),
        (
            b.name.clone(),
            render_bolt(&b, &RenderParams::centered(700, 700, 0.0)).unwrap().0,
        ),
    ];
    let enrolled = enroll(&samples, &PipelineConfig::default(), 12.42).unwrap();
    assert_eq!(enrolled.table.len(), 2);
    assert_eq!(enrolled.collisions.len(), 1);
}
