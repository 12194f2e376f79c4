use super::{BoltSpec, SynthError};
use crate::pipeline::ThreadingType;

const HEADER: &str =
    "name,length_mm,diameter_mm,head_width_mm,head_length_mm,pitch_mm,thread_depth_mm,threading,half_thread_frac";

/// Per nominal size: diameter, head across flats, head height, coarse pitch.
const SIZES: [(u32, f64, f64, f64); 6] = [
    (4, 7.0, 2.8, 0.7),
    (5, 8.0, 3.5, 0.8),
    (6, 10.0, 4.0, 1.0),
    (8, 13.0, 5.3, 1.25),
    (10, 16.0, 6.4, 1.5),
    (12, 18.0, 7.5, 1.75),
];

const GRID: [(u32, u32, ThreadingType); 33] = {
    use ThreadingType::{FullThread as F, HalfThread as H};
    [
        (4, 12, F),
        (4, 16, F),
        (4, 20, F),
        (4, 30, H),
        (4, 40, H),
        (4, 50, F),
        (4, 75, F),
        (5, 12, F),
        (5, 16, H),
        (5, 20, F),
        (5, 25, H),
        (5, 35, F),
        (5, 45, H),
        (5, 60, F),
        (6, 16, F),
        (6, 20, H),
        (6, 30, F),
        (6, 40, H),
        (6, 55, F),
        (6, 70, H),
        (8, 20, F),
        (8, 25, H),
        (8, 35, H),
        (8, 45, F),
        (8, 60, H),
        (10, 25, F),
        (10, 35, F),
        (10, 50, H),
        (10, 65, F),
        (12, 30, F),
        (12, 40, H),
        (12, 55, F),
        (12, 70, H),
    ]
};

/// Depth of a 60° thread with a pitch/8 crest flat and a sharp root:
/// `(7/8)·(√3/2)`.
const DEPTH_PER_PITCH: f64 = 0.757_772_228_311_384;

/// The 33 built-in bolts, M4 to M12.
///
/// Nominal metric dimensions with coarse pitch. Heads are capped at 15% of
/// the length so short bolts keep a body. `M5x12_FT` carries the measured
/// 4.90 mm diameter and 12.06 mm length of a physical reference part; the
/// other reference names (`M8x35_HT`, `M10x50_HT`, `M10x35_FT`, `M4x75_FT`,
/// `M8x20_FT`, `M5x25_HT`) use nominal values and the rest fill the grid.
pub fn standard_catalog() -> Vec<BoltSpec> {
    GRID.iter()
        .map(|&(m, len, threading)| {
            let &(_, head_width, head_height, pitch) = SIZES.iter().find(|s| s.0 == m).expect("size table covers grid");
            let name = format!("M{m}x{len}_{}", threading.code());
            let (diameter, length) = if name == "M5x12_FT" {
                (4.90, 12.06)
            } else {
                (m as f64, len as f64)
            };
            BoltSpec {
                name,
                length_mm: length,
                diameter_mm: diameter,
                head_width_mm: head_width,
                head_length_mm: head_height.min(0.15 * length),
                pitch_mm: pitch,
                thread_depth_mm: DEPTH_PER_PITCH * pitch,
                threading,
                half_thread_frac: 0.38,
            }
        })
        .collect()
}

pub fn save_catalog(specs: &[BoltSpec]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for s in specs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            s.name,
            s.length_mm,
            s.diameter_mm,
            s.head_width_mm,
            s.head_length_mm,
            s.pitch_mm,
            s.thread_depth_mm,
            s.threading.code(),
            s.half_thread_frac
        ));
    }
    out
}

/// Parses catalog CSV; every spec is validated. Line numbers are 1-based.
pub fn load_catalog(text: &str) -> Result<Vec<BoltSpec>, SynthError> {
    let err = |line: usize, message: String| SynthError::Format { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == HEADER => {}
        Some((n, h)) => return Err(err(n, format!("expected header `{HEADER}`, got `{h}`"))),
        None => return Err(err(1, "empty catalog".into())),
    }
    let mut specs: Vec<BoltSpec> = Vec::new();
    for (n, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(err(n, format!("expected 9 fields, got {}", f.len())));
        }
        let num = |i: usize| {
            f[i].parse::<f64>()
                .map_err(|_| err(n, format!("field {} is not a number: `{}`", i + 1, f[i])))
        };
        let threading = ThreadingType::from_code(f[7])
            .ok_or_else(|| err(n, format!("threading must be FT or HT, got `{}`", f[7])))?;
        let spec = BoltSpec {
            name: f[0].to_string(),
            length_mm: num(1)?,
            diameter_mm: num(2)?,
            head_width_mm: num(3)?,
            head_length_mm: num(4)?,
            pitch_mm: num(5)?,
            thread_depth_mm: num(6)?,
            threading,
            half_thread_frac: num(8)?,
        };
        spec.validate().map_err(|e| err(n, e.to_string()))?;
        if specs.iter().any(|s| s.name == spec.name) {
            return Err(err(n, format!("duplicate name `{}`", spec.name)));
        }
        specs.push(spec);
    }
    Ok(specs)
}
