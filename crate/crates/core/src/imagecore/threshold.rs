use serde::{Deserialize, Serialize};

use super::{BinaryImage, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ThresholdMethod {
    /// White iff intensity > level.
    FixedLevel(u8),
    /// Level chosen by maximizing between-class variance.
    #[default]
    Otsu,
}

pub fn threshold(img: &GrayImage, method: ThresholdMethod) -> BinaryImage {
    let level = match method {
        ThresholdMethod::FixedLevel(t) => t,
        ThresholdMethod::Otsu => otsu_level(img),
    };
    let pixels = img.as_raw().iter().map(|&v| v > level).collect();
    BinaryImage::new(img.width(), img.height(), pixels).expect("dimensions come from a valid image")
}

/// Otsu level over the 256-bin histogram.
///
/// Class 0 holds intensities `<= t`. Levels leaving a class empty score zero.
/// Ties resolve to the lowest level, so a two-valued image always thresholds
/// at level 0 when its darker value is 0.
pub fn otsu_level(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.as_raw() {
        hist[v as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(i, &h)| i as u64 * h).sum();

    let mut best_level = 0u8;
    let mut best_score = -1.0f64;
    let (mut n0, mut s0) = (0u64, 0u64);
    for (t, &h) in hist.iter().enumerate() {
        n0 += h;
        s0 += t as u64 * h;
        let n1 = total - n0;
        // N^2 * sigma_b^2 = (S*n0 - N*s0)^2 / (n0*n1); the common N^2 factor is dropped.
        let score = if n0 == 0 || n1 == 0 {
            0.0
        } else {
            let diff = (total_sum as i128 * n0 as i128 - total as i128 * s0 as i128) as f64;
            diff * diff / (n0 as f64 * n1 as f64)
        };
        if score > best_score {
            best_score = score;
            best_level = t as u8;
        }
    }
    best_level
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct between-class variance from class weights and means.
    fn between_class_variance(values: &[u8], level: u8) -> f64 {
        let (lo, hi): (Vec<f64>, Vec<f64>) = {
            let lo = values
                .iter()
                .filter(|&&v| v <= level)
                .map(|&v| v as f64)
                .collect::<Vec<_>>();
            let hi = values
                .iter()
                .filter(|&&v| v > level)
                .map(|&v| v as f64)
                .collect::<Vec<_>>();
            (lo, hi)
        };
        if lo.is_empty() || hi.is_empty() {
            return 0.0;
        }
        let n = values.len() as f64;
        let (w0, w1) = (lo.len() as f64 / n, hi.len() as f64 / n);
        let m0 = lo.iter().sum::<f64>() / lo.len() as f64;
        let m1 = hi.iter().sum::<f64>() / hi.len() as f64;
        w0 * w1 * (m0 - m1).powi(2)
    }

    fn brute_force_level(values: &[u8]) -> u8 {
        let mut best = (0u8, -1.0f64);
        for t in 0..=255u8 {
            let v = between_class_variance(values, t);
            if v > best.1 + 1e-9 * best.1.abs().max(1.0) {
                best = (t, v);
            }
        }
        best.0
    }

    #[test]
    fn fixed_level_extremes() {
        let bright = GrayImage::filled(4, 4, 200).unwrap();
        assert_eq!(threshold(&bright, ThresholdMethod::FixedLevel(128)).count_white(), 16);
        let dark = GrayImage::filled(4, 4, 0).unwrap();
        assert_eq!(threshold(&dark, ThresholdMethod::FixedLevel(128)).count_white(), 0);
    }

    #[test]
    fn otsu_bimodal_matches_fixed_124() {
        let data: Vec<u8> = (0..64).map(|i| if i % 2 == 0 { 40 } else { 210 }).collect();
        let img = GrayImage::new(8, 8, data.clone()).unwrap();
        // exhaustive scan; every level in [40, 209] ties and the lowest wins
        assert_eq!(brute_force_level(&data), 40);
        assert_eq!(otsu_level(&img), 40);
        assert_eq!(
            threshold(&img, ThresholdMethod::Otsu),
            threshold(&img, ThresholdMethod::FixedLevel(124))
        );
    }

    #[test]
    fn otsu_on_binary_encoding_is_zero() {
        let img = GrayImage::new(2, 2, vec![0, 255, 255, 0]).unwrap();
        assert_eq!(otsu_level(&img), 0);
        assert_eq!(threshold(&img, ThresholdMethod::Otsu).count_white(), 2);
    }

    proptest! {
        #[test]
        fn otsu_matches_exhaustive_scan(data in proptest::collection::vec(any::<u8>(), 1..64)) {
            let img = GrayImage::new(data.len(), 1, data.clone()).unwrap();
            let got = otsu_level(&img);
            let want = brute_force_level(&data);
            // both maximize the same objective; allow float noise between exact ties
            let (vg, vw) = (between_class_variance(&data, got), between_class_variance(&data, want));
            prop_assert!((vg - vw).abs() <= 1e-9 * vw.max(1.0), "got {got} ({vg}) want {want} ({vw})");
        }

        #[test]
        fn fixed_threshold_is_monotone(data in proptest::collection::vec(any::<u8>(), 1..64), t in 0u8..255) {
            let img = GrayImage::new(data.len(), 1, data).unwrap();
            let lo = threshold(&img, ThresholdMethod::FixedLevel(t));
            let hi = threshold(&img, ThresholdMethod::FixedLevel(t + 1));
            for (a, b) in lo.as_slice().iter().zip(hi.as_slice()) {
                prop_assert!(!(*b && !*a));
            }
        }
    }
}
