//! `file,name[,angle_deg,noise]` manifests.
//!
//! An optional header line starting with `file,` is skipped. Blank lines
//! are ignored.

use serde::{Deserialize, Serialize};

pub const HEADER: &str = "file,name,angle_deg,noise";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub name: String,
    pub angle_deg: Option<f64>,
    pub noise: Option<f64>,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() || (n == 1 && line.starts_with("file,")) {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if !(2..=4).contains(&f.len()) {
            return Err(format!("line {n}: expected 2 to 4 fields, got {}", f.len()));
        }
        if f[0].is_empty() || f[1].is_empty() {
            return Err(format!("line {n}: empty file or name"));
        }
        let opt = |idx: usize, what: &str| -> Result<Option<f64>, String> {
            match f.get(idx) {
                None => Ok(None),
                Some(&"") => Ok(None),
                Some(s) => s
                    .parse()
                    .map(Some)
                    .map_err(|_| format!("line {n}: {what} {s:?} is not a number")),
            }
        };
        out.push(ManifestEntry {
            file: f[0].to_string(),
            name: f[1].to_string(),
            angle_deg: opt(2, "angle_deg")?,
            noise: opt(3, "noise")?,
        });
    }
    Ok(out)
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = format!("{HEADER}\n");
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.file,
            e.name,
            opt(e.angle_deg),
            opt(e.noise)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_and_long_rows() {
        let m = parse_manifest("file,name\na.pgm,M8x35_HT\n\nb.pgm, M4x12_FT ,30,0.002\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].angle_deg, None);
        assert_eq!(
            (m[1].name.as_str(), m[1].angle_deg, m[1].noise),
            ("M4x12_FT", Some(30.0), Some(0.002))
        );
        assert_eq!(parse_manifest(&write_manifest(&m)).unwrap(), m);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(parse_manifest("a.pgm\n").unwrap_err().starts_with("line 1"));
        assert!(parse_manifest("a.pgm,A\nb.pgm,B,x\n")
            .unwrap_err()
            .starts_with("line 2"));
        assert!(parse_manifest("a.pgm,\n").is_err());
    }
}
