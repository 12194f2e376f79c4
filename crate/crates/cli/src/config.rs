//! Flat `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the
//! [`PipelineConfig`] fields plus `threshold` (`otsu` or a 0–255 level),
//! `px_per_mm` and `reject_frac`.

use std::path::PathBuf;

use boltid_core::identify::DEFAULT_REJECT_FRAC;
use boltid_core::imagecore::ThresholdMethod;
use boltid_core::pipeline::PipelineConfig;
use clap::Args;

use crate::CliError;

pub const KEYS: [&str; 12] = [
    "thresh",
    "nudge",
    "perim_ratio",
    "fill_frac",
    "head_frac",
    "thread_slice_frac",
    "min_pitch_len_px",
    "min_component_area",
    "convex_tol",
    "threshold",
    "px_per_mm",
    "reject_frac",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pipeline: PipelineConfig,
    pub threshold: ThresholdMethod,
    /// Unset: millimeters come from the table, or are not reported.
    pub px_per_mm: Option<f64>,
    pub reject_frac: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            threshold: ThresholdMethod::Otsu,
            px_per_mm: None,
            reject_frac: DEFAULT_REJECT_FRAC,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key}: {value:?} is not a valid value"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        let p = &mut self.pipeline;
        match key {
            "thresh" => p.thresh = num(key, value)?,
            "nudge" => p.nudge = num(key, value)?,
            "perim_ratio" => p.perim_ratio = num(key, value)?,
            "fill_frac" => p.fill_frac = num(key, value)?,
            "head_frac" => p.head_frac = num(key, value)?,
            "thread_slice_frac" => p.thread_slice_frac = num(key, value)?,
            "min_pitch_len_px" => p.min_pitch_len_px = num(key, value)?,
            "min_component_area" => p.min_component_area = num(key, value)?,
            "convex_tol" => p.convex_tol = num(key, value)?,
            "threshold" => {
                self.threshold = if value.eq_ignore_ascii_case("otsu") {
                    ThresholdMethod::Otsu
                } else {
                    ThresholdMethod::FixedLevel(num(key, value)?)
                }
            }
            "px_per_mm" => self.px_per_mm = Some(num(key, value)?),
            "reject_frac" => self.reject_frac = num(key, value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies a config document on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            self.set(k.trim(), v).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = &self.pipeline;
        let frac = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(format!("{name} must be in (0, 1], got {v}"))
            }
        };
        frac("fill_frac", p.fill_frac)?;
        frac("head_frac", p.head_frac)?;
        frac("thread_slice_frac", p.thread_slice_frac)?;
        if !(p.perim_ratio.is_finite() && p.perim_ratio > 0.0) {
            return Err(format!("perim_ratio must be positive, got {}", p.perim_ratio));
        }
        if p.min_pitch_len_px.is_nan() || p.min_pitch_len_px < 0.0 {
            return Err(format!(
                "min_pitch_len_px must be non-negative, got {}",
                p.min_pitch_len_px
            ));
        }
        if p.convex_tol.is_nan() || p.convex_tol < 0.0 {
            return Err(format!("convex_tol must be non-negative, got {}", p.convex_tol));
        }
        if let Some(k) = self.px_per_mm {
            if !(k.is_finite() && k > 0.0) {
                return Err(format!("px_per_mm must be positive, got {k}"));
            }
        }
        if self.reject_frac.is_nan() || self.reject_frac < 0.0 {
            return Err(format!("reject_frac must be non-negative, got {}", self.reject_frac));
        }
        Ok(())
    }

    /// Canonical document: every key in [`KEYS`] order, `px_per_mm` only
    /// when set. Parsing it back gives an equal config.
    pub fn to_text(&self) -> String {
        let p = &self.pipeline;
        let threshold = match self.threshold {
            ThresholdMethod::Otsu => "otsu".to_string(),
            ThresholdMethod::FixedLevel(t) => t.to_string(),
        };
        let mut out = format!(
            "thresh={}\nnudge={}\nperim_ratio={}\nfill_frac={}\nhead_frac={}\nthread_slice_frac={}\n\
             min_pitch_len_px={}\nmin_component_area={}\nconvex_tol={}\nthreshold={threshold}\n",
            p.thresh,
            p.nudge,
            p.perim_ratio,
            p.fill_frac,
            p.head_frac,
            p.thread_slice_frac,
            p.min_pitch_len_px,
            p.min_component_area,
            p.convex_tol,
        );
        if let Some(k) = self.px_per_mm {
            out.push_str(&format!("px_per_mm={k}\n"));
        }
        out.push_str(&format!("reject_frac={}\n", self.reject_frac));
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }
}

/// Config file plus per-key overrides. Precedence: flag, file, default.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat key=value config file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub thresh: Option<usize>,
    #[arg(long)]
    pub nudge: Option<usize>,
    #[arg(long)]
    pub perim_ratio: Option<f64>,
    #[arg(long)]
    pub fill_frac: Option<f64>,
    #[arg(long)]
    pub head_frac: Option<f64>,
    #[arg(long)]
    pub thread_slice_frac: Option<f64>,
    #[arg(long)]
    pub min_pitch_len_px: Option<f64>,
    #[arg(long)]
    pub min_component_area: Option<usize>,
    #[arg(long)]
    pub convex_tol: Option<f64>,
    /// `otsu` or a fixed gray level
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub px_per_mm: Option<f64>,
    /// Reject distance as a fraction of the major axis (`inf` never rejects)
    #[arg(long)]
    pub reject_frac: Option<f64>,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut put = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        put("thresh", self.thresh.map(|v| v.to_string()));
        put("nudge", self.nudge.map(|v| v.to_string()));
        put("perim_ratio", self.perim_ratio.map(|v| v.to_string()));
        put("fill_frac", self.fill_frac.map(|v| v.to_string()));
        put("head_frac", self.head_frac.map(|v| v.to_string()));
        put("thread_slice_frac", self.thread_slice_frac.map(|v| v.to_string()));
        put("min_pitch_len_px", self.min_pitch_len_px.map(|v| v.to_string()));
        put("min_component_area", self.min_component_area.map(|v| v.to_string()));
        put("convex_tol", self.convex_tol.map(|v| v.to_string()));
        put("threshold", self.threshold.clone());
        put("px_per_mm", self.px_per_mm.map(|v| v.to_string()));
        put("reject_frac", self.reject_frac.map(|v| v.to_string()));
        out
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_text(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        for (k, v) in self.overrides() {
            cfg.set(k, &v)
                .map_err(|e| CliError::Usage(format!("--{}: {e}", k.replace('_', "-"))))?;
        }
        cfg.validate().map_err(CliError::Usage)?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);
        assert!(c.to_text().starts_with("thresh=5\nnudge=2\n"));
    }

    #[test]
    fn every_key_parses() {
        let mut c = RunConfig::default();
        for (k, v) in KEYS.iter().zip([
            "0", "3", "1.2", "0.9", "0.25", "0.4", "150", "10", "2", "128", "10.5", "inf",
        ]) {
            c.set(k, v).unwrap();
        }
        assert_eq!(c.pipeline.thresh, 0);
        assert_eq!(c.threshold, ThresholdMethod::FixedLevel(128));
        assert_eq!(c.px_per_mm, Some(10.5));
        assert_eq!(c.reject_frac, f64::INFINITY);
        assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn bad_documents() {
        assert!(RunConfig::from_text("thresh 5").unwrap_err().contains("line 1"));
        assert!(RunConfig::from_text("# c\n\nnudge=x").unwrap_err().contains("line 3"));
        assert!(RunConfig::from_text("colour=red").unwrap_err().contains("unknown key"));
        assert!(RunConfig::from_text("thresh=-1").is_err());
        let mut c = RunConfig::default();
        c.pipeline.head_frac = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn flags_beat_file_beats_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "thresh=3\nnudge=4\n").unwrap();
        let args = ConfigArgs {
            config: Some(path),
            nudge: Some(1),
            ..Default::default()
        };
        let c = args.resolve().unwrap();
        assert_eq!((c.pipeline.thresh, c.pipeline.nudge, c.pipeline.head_frac), (3, 1, 0.2));
        let missing = ConfigArgs {
            config: Some(dir.path().join("nope.cfg")),
            ..Default::default()
        };
        assert!(matches!(missing.resolve(), Err(CliError::Usage(_))));
    }
}
