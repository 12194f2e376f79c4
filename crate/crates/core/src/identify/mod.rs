//! Lookup-table identification.
//!
//! A [`LookupTable`] holds one [`TemplateEntry`] per known bolt: its
//! measured minor and major axes in pixels and its threading. A query is
//! identified by Euclidean distance in (major, minor) pixel space.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imagecore::BinaryImage;
use crate::pipeline::{
    classify_threading, measure_axes, orient, remove_head, BoltFeatures, PipelineConfig, PipelineError, ThreadingType,
};

/// Queries farther than this fraction of their major axis from every entry
/// are reported as unknown.
pub const DEFAULT_REJECT_FRAC: f64 = 0.1;

/// Relative closeness below which two enrolled entries are flagged.
pub const COLLISION_FRAC: f64 = 0.014;

/// Conversion factor assumed when a table file carries none.
pub const DEFAULT_PX_PER_MM: f64 = 12.42;

const HEADER: &str = "name,width_px,height_px,threading";
const FACTOR_PREFIX: &str = "# px_per_mm=";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentifyError {
    #[error("lookup table is empty")]
    EmptyTable,
    #[error("invalid entry {name:?}: {reason}")]
    InvalidEntry { name: String, reason: String },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("px_per_mm must be finite and positive, got {0}")]
    InvalidFactor(f64),
    #[error("enrolling {name:?} failed: {source}")]
    Enrollment { name: String, source: PipelineError },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateEntry {
    pub name: String,
    /// Minor axis in pixels.
    pub width_px: f64,
    /// Major axis in pixels.
    pub height_px: f64,
    pub threading: ThreadingType,
}

impl TemplateEntry {
    pub fn validate(&self) -> Result<(), IdentifyError> {
        let bad = |reason: &str| {
            Err(IdentifyError::InvalidEntry {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.name.is_empty() {
            return bad("empty name");
        }
        if self.name.contains([',', '\n', '\r']) || self.name.starts_with('#') || self.name.trim() != self.name {
            return bad("name must not contain commas, line breaks, a leading '#' or surrounding spaces");
        }
        if !(self.width_px.is_finite() && self.height_px.is_finite()) {
            return bad("non-finite dimension");
        }
        if self.width_px <= 0.0 {
            return bad("width_px must be positive");
        }
        if self.height_px < self.width_px {
            return bad("height_px must be at least width_px");
        }
        Ok(())
    }

    fn distance_to(&self, major: f64, minor: f64) -> f64 {
        (major - self.height_px).hypot(minor - self.width_px)
    }
}

/// Immutable set of reference bolts plus the pixel/mm factor they were
/// measured at.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    entries: Vec<TemplateEntry>,
    px_per_mm: f64,
}

impl LookupTable {
    pub fn new(entries: Vec<TemplateEntry>, px_per_mm: f64) -> Result<Self, IdentifyError> {
        if !(px_per_mm.is_finite() && px_per_mm > 0.0) {
            return Err(IdentifyError::InvalidFactor(px_per_mm));
        }
        if entries.is_empty() {
            return Err(IdentifyError::EmptyTable);
        }
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            e.validate()?;
            if !seen.insert(e.name.as_str()) {
                return Err(IdentifyError::DuplicateName(e.name.clone()));
            }
        }
        Ok(Self { entries, px_per_mm })
    }

    pub fn entries(&self) -> &[TemplateEntry] {
        &self.entries
    }

    pub fn px_per_mm(&self) -> f64 {
        self.px_per_mm
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&TemplateEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Nearest entry, reported even when `known` is false.
    pub name: String,
    pub index: usize,
    pub distance_px: f64,
    /// Measured (major, minor) in millimeters.
    pub dims_mm: (f64, f64),
    pub threading_agreed: bool,
    /// False when the nearest entry is beyond the reject distance.
    pub known: bool,
}

pub fn px_to_mm(v: f64, table: &LookupTable) -> f64 {
    v / table.px_per_mm
}

/// Nearest entry with the default reject rule.
pub fn nearest_match(features: &BoltFeatures, table: &LookupTable) -> Result<MatchResult, IdentifyError> {
    nearest_match_with(features, table, DEFAULT_REJECT_FRAC)
}

/// Nearest entry in (major, minor) pixel space.
///
/// Among entries at exactly the minimal distance, one with the measured
/// threading wins, then the lowest index. The result is marked unknown when
/// the distance exceeds `reject_frac · major_px`; pass infinity to never
/// reject.
pub fn nearest_match_with(
    features: &BoltFeatures,
    table: &LookupTable,
    reject_frac: f64,
) -> Result<MatchResult, IdentifyError> {
    let (major, minor) = (features.major_px, features.minor_px);
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in table.entries.iter().enumerate() {
        let d = e.distance_to(major, minor);
        best = match best {
            None => Some((i, d)),
            Some((_, bd)) if d < bd => Some((i, d)),
            Some((bi, bd))
                if d == bd
                    && e.threading == features.threading
                    && table.entries[bi].threading != features.threading =>
            {
                Some((i, d))
            }
            keep => keep,
        };
    }
    let (index, distance_px) = best.ok_or(IdentifyError::EmptyTable)?;
    let entry = &table.entries[index];
    Ok(MatchResult {
        name: entry.name.clone(),
        index,
        distance_px,
        dims_mm: (px_to_mm(major, table), px_to_mm(minor, table)),
        threading_agreed: entry.threading == features.threading,
        known: distance_px <= reject_frac * major,
    })
}

/// Two entries whose axes both agree within [`COLLISION_FRAC`].
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub first: String,
    pub second: String,
}

pub fn find_collisions(table: &LookupTable, frac: f64) -> Vec<Collision> {
    let close = |x: f64, y: f64| (x - y).abs() < frac * x.max(y);
    let mut out = Vec::new();
    for (i, a) in table.entries.iter().enumerate() {
        for b in &table.entries[i + 1..] {
            if close(a.width_px, b.width_px) && close(a.height_px, b.height_px) {
                out.push(Collision {
                    first: a.name.clone(),
                    second: b.name.clone(),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enrollment {
    pub table: LookupTable,
    pub collisions: Vec<Collision>,
}

/// Measures one entry from a single-bolt image.
pub fn measure_template(name: &str, img: &BinaryImage, cfg: &PipelineConfig) -> Result<TemplateEntry, IdentifyError> {
    let wrap = |source| IdentifyError::Enrollment {
        name: name.to_string(),
        source,
    };
    let bolt = orient(img).map_err(wrap)?;
    let (major, minor) = measure_axes(&bolt).map_err(wrap)?;
    let cut = remove_head(&bolt, minor, cfg.thresh, cfg.head_frac).map_err(wrap)?;
    let threading = classify_threading(&cut.body, minor, cfg).map_err(wrap)?;
    Ok(TemplateEntry {
        name: name.to_string(),
        width_px: minor,
        height_px: major,
        threading,
    })
}

/// Builds a table from named single-bolt images.
///
/// Entries keep the sample order. Pairs closer than [`COLLISION_FRAC`] on
/// both axes are accepted but logged and returned as collisions.
pub fn enroll(
    samples: &[(String, BinaryImage)],
    cfg: &PipelineConfig,
    px_per_mm: f64,
) -> Result<Enrollment, IdentifyError> {
    let mut seen = std::collections::HashSet::new();
    for (name, _) in samples {
        if !seen.insert(name.as_str()) {
            return Err(IdentifyError::DuplicateName(name.clone()));
        }
    }
    let entries = samples
        .iter()
        .map(|(name, img)| measure_template(name, img, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let table = LookupTable::new(entries, px_per_mm)?;
    let collisions = find_collisions(&table, COLLISION_FRAC);
    for c in &collisions {
        log::warn!(
            "{} and {} are within {}% on both axes",
            c.first,
            c.second,
            COLLISION_FRAC * 100.0
        );
    }
    Ok(Enrollment { table, collisions })
}

pub fn save_table(table: &LookupTable) -> String {
    let mut out = format!("{FACTOR_PREFIX}{}\n{HEADER}\n", table.px_per_mm);
    for e in &table.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.name,
            e.width_px,
            e.height_px,
            e.threading.code()
        ));
    }
    out
}

/// Parses the table CSV. The `# px_per_mm=` line is optional and defaults
/// to [`DEFAULT_PX_PER_MM`].
pub fn load_table(text: &str) -> Result<LookupTable, IdentifyError> {
    let fmt_err = |line: usize, message: String| IdentifyError::Format { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let mut px_per_mm = DEFAULT_PX_PER_MM;
    if let Some((n, l)) = lines.peek().copied() {
        if let Some(v) = l.strip_prefix(FACTOR_PREFIX) {
            px_per_mm = v
                .trim()
                .parse()
                .map_err(|_| fmt_err(n, format!("px_per_mm {v:?} is not a number")))?;
            if !(px_per_mm.is_finite() && px_per_mm > 0.0) {
                return Err(fmt_err(n, format!("px_per_mm must be positive, got {v}")));
            }
            lines.next();
        }
    }
    match lines.next() {
        Some((_, l)) if l.trim_end() == HEADER => {}
        Some((n, l)) => return Err(fmt_err(n, format!("expected header {HEADER:?}, got {l:?}"))),
        None => return Err(fmt_err(1, "missing header".into())),
    }
    let mut entries: Vec<TemplateEntry> = Vec::new();
    for (n, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 4 {
            return Err(fmt_err(n, format!("expected 4 fields, got {}", fields.len())));
        }
        let num = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| fmt_err(n, format!("{what} {s:?} is not a number")))
        };
        let threading = ThreadingType::from_code(fields[3].trim())
            .ok_or_else(|| fmt_err(n, format!("threading {:?} is not FT or HT", fields[3])))?;
        let e = TemplateEntry {
            name: fields[0].to_string(),
            width_px: num(fields[1], "width_px")?,
            height_px: num(fields[2], "height_px")?,
            threading,
        };
        e.validate().map_err(|err| fmt_err(n, err.to_string()))?;
        if entries.iter().any(|x| x.name == e.name) {
            return Err(fmt_err(n, format!("duplicate name {:?}", e.name)));
        }
        entries.push(e);
    }
    LookupTable::new(entries, px_per_mm).map_err(|e| match e {
        IdentifyError::EmptyTable => fmt_err(text.lines().count().max(1), "table has no entries".into()),
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(major: f64, minor: f64, threading: ThreadingType) -> BoltFeatures {
        BoltFeatures {
            major_px: major,
            minor_px: minor,
            threading,
            pitch_px: None,
            area_px: 0.0,
            perimeter_px: 0.0,
            shoulder_found: true,
        }
    }

    fn entry(name: &str, w: f64, h: f64, t: ThreadingType) -> TemplateEntry {
        TemplateEntry {
            name: name.into(),
            width_px: w,
            height_px: h,
            threading: t,
        }
    }

    const TABLE_I: &str = "name,width_px,height_px,threading\n\
                           M8x35_HT,147,407,HT\n\
                           M10x50_HT,181,577,HT\n\
                           M10x35_FT,179,426,FT\n\
                           M4x75_FT,75,781,FT\n";

    #[test]
    fn reference_query() {
        let t = LookupTable::new(
            vec![
                entry("M8x35_HT", 147.0, 407.0, ThreadingType::HalfThread),
                entry("M10x50_HT", 181.0, 577.0, ThreadingType::HalfThread),
            ],
            12.42,
        )
        .unwrap();
        let m = nearest_match(&features(410.0, 148.0, ThreadingType::HalfThread), &t).unwrap();
        assert_eq!(m.name, "M8x35_HT");
        assert_eq!(m.distance_px, 10f64.sqrt());
        assert!(m.known && m.threading_agreed);

        let m = nearest_match(&features(577.0, 181.0, ThreadingType::FullThread), &t).unwrap();
        assert_eq!((m.index, m.distance_px), (1, 0.0));
        assert!(!m.threading_agreed);
    }

    #[test]
    fn threading_breaks_exact_ties() {
        let t = LookupTable::new(
            vec![
                entry("A_FT", 100.0, 400.0, ThreadingType::FullThread),
                entry("A_HT", 100.0, 400.0, ThreadingType::HalfThread),
            ],
            10.0,
        )
        .unwrap();
        let m = nearest_match(&features(401.0, 100.0, ThreadingType::HalfThread), &t).unwrap();
        assert_eq!(m.name, "A_HT");
        let m = nearest_match(&features(401.0, 100.0, ThreadingType::FullThread), &t).unwrap();
        assert_eq!(m.name, "A_FT");
        // equal distance on opposite sides with the same threading: lowest index
        let t = LookupTable::new(
            vec![
                entry("B", 100.0, 410.0, ThreadingType::FullThread),
                entry("C", 100.0, 390.0, ThreadingType::FullThread),
            ],
            10.0,
        )
        .unwrap();
        assert_eq!(
            nearest_match(&features(400.0, 100.0, ThreadingType::FullThread), &t)
                .unwrap()
                .name,
            "B"
        );
    }

    #[test]
    fn far_queries_are_unknown() {
        let t = LookupTable::new(vec![entry("A", 100.0, 400.0, ThreadingType::FullThread)], 10.0).unwrap();
        let q = features(400.0, 141.0, ThreadingType::FullThread);
        assert!(!nearest_match(&q, &t).unwrap().known);
        assert!(nearest_match_with(&q, &t, f64::INFINITY).unwrap().known);
        assert!(
            nearest_match(&features(400.0, 140.0, ThreadingType::FullThread), &t)
                .unwrap()
                .known
        );
    }

    #[test]
    fn conversion() {
        let t = LookupTable::new(vec![entry("A", 1.0, 2.0, ThreadingType::FullThread)], 12.42).unwrap();
        assert_eq!(px_to_mm(0.0, &t), 0.0);
        assert_eq!(px_to_mm(12.42, &t), 1.0);
        assert!((px_to_mm(407.0, &t) - 32.77).abs() < 0.005);
    }

    #[test]
    fn table_invariants() {
        let a = entry("A", 1.0, 2.0, ThreadingType::FullThread);
        assert_eq!(LookupTable::new(vec![], 1.0), Err(IdentifyError::EmptyTable));
        assert_eq!(
            LookupTable::new(vec![a.clone(), a.clone()], 1.0),
            Err(IdentifyError::DuplicateName("A".into()))
        );
        assert_eq!(
            LookupTable::new(vec![a.clone()], 0.0),
            Err(IdentifyError::InvalidFactor(0.0))
        );
        for bad in [
            entry("", 1.0, 2.0, ThreadingType::FullThread),
            entry("B", 3.0, 2.0, ThreadingType::FullThread),
            entry("x,y", 1.0, 2.0, ThreadingType::FullThread),
            entry("C", 0.0, 2.0, ThreadingType::FullThread),
        ] {
            assert!(matches!(
                LookupTable::new(vec![bad], 1.0),
                Err(IdentifyError::InvalidEntry { .. })
            ));
        }
    }

    #[test]
    fn reference_csv_fixture() {
        let t = load_table(TABLE_I).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.px_per_mm(), DEFAULT_PX_PER_MM);
        assert_eq!(
            t.get("M4x75_FT").unwrap(),
            &entry("M4x75_FT", 75.0, 781.0, ThreadingType::FullThread)
        );
        assert_eq!(load_table(&save_table(&t)).unwrap(), t);
        assert!(save_table(&t).starts_with("# px_per_mm=12.42\nname,width_px,height_px,threading\n"));
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let line = |r: Result<LookupTable, IdentifyError>| match r {
            Err(IdentifyError::Format { line, .. }) => line,
            other => panic!("expected format error, got {other:?}"),
        };
        assert_eq!(line(load_table("name,width_px,height_px\nA,1,2\n")), 1);
        assert_eq!(
            line(load_table("# px_per_mm=abc\nname,width_px,height_px,threading\n")),
            1
        );
        assert_eq!(
            line(load_table(
                "# px_per_mm=2\nname,width_px,height_px,threading\nA,1,2,FT\nB,x,2,FT\n"
            )),
            4
        );
        assert_eq!(line(load_table(&format!("{TABLE_I}M8x35_HT,1,2,HT\n"))), 6);
        assert_eq!(line(load_table("name,width_px,height_px,threading\nA,1,2,XT\n")), 2);
        assert_eq!(line(load_table("name,width_px,height_px,threading\nA,1,2\n")), 2);
        assert_eq!(line(load_table("")), 1);
    }

    #[test]
    fn near_entries_collide() {
        let t = LookupTable::new(
            vec![
                entry("A", 100.0, 400.0, ThreadingType::FullThread),
                entry("B", 101.0, 404.0, ThreadingType::FullThread),
                entry("C", 110.0, 404.0, ThreadingType::FullThread),
            ],
            10.0,
        )
        .unwrap();
        assert_eq!(
            find_collisions(&t, COLLISION_FRAC),
            vec![Collision {
                first: "A".into(),
                second: "B".into()
            }]
        );
    }
}
