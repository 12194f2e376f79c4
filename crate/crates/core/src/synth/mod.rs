//! Parametric bolt silhouettes with known ground truth.
//!
//! A bolt is drawn in its own frame: `s` runs along the axis from the head
//! end (`0`) to the tip (`length`), `t` across it. The head is a
//! `head_length × head_width` rectangle, the body a `diameter`-wide band
//! whose edges carry a thread over the threaded extent: 60° flanks meeting
//! in a sharp root, with whatever is left of each pitch as a flat crest on
//! the nominal diameter. The bottom edge is offset by half a pitch, as a
//! helix would be. Rendering samples each pixel center through the inverse
//! rotation.

mod catalog;

pub use catalog::{load_catalog, save_catalog, standard_catalog};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imagecore::{AxisRect, BinaryImage, PixelPoint};
use crate::pipeline::ThreadingType;

/// Default pixels per millimeter of the reference camera setup.
pub const DEFAULT_PX_PER_MM: f64 = 12.42;
/// Largest accepted salt-and-pepper rate.
pub const MAX_NOISE_RATE: f64 = 0.05;
/// Free pixels required between a bolt and the canvas border.
pub const MARGIN_PX: f64 = 2.0;
/// Axial run of a 60° flank per unit of thread depth (tan 30°).
const FLANK_RUN_PER_DEPTH: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid bolt spec {name}: {reason}")]
    InvalidSpec { name: String, reason: String },
    #[error("bolt {name} does not fit the {canvas_w}x{canvas_h} canvas")]
    DoesNotFit {
        name: String,
        canvas_w: usize,
        canvas_h: usize,
    },
    #[error("bolts {first} and {second} overlap")]
    Overlap { first: String, second: String },
    #[error("noise rate {0} outside [0, 0.05]")]
    NoiseRate(f64),
    #[error("invalid render parameter: {0}")]
    Params(String),
    #[error("catalog line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Physical description of one bolt, in millimeters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltSpec {
    pub name: String,
    /// Overall length, head included.
    pub length_mm: f64,
    pub diameter_mm: f64,
    /// Across flats.
    pub head_width_mm: f64,
    pub head_length_mm: f64,
    pub pitch_mm: f64,
    pub thread_depth_mm: f64,
    pub threading: ThreadingType,
    /// Threaded share of the length for half-thread bolts.
    pub half_thread_frac: f64,
}

impl BoltSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |reason: &str| {
            Err(SynthError::InvalidSpec {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        let dims = [
            self.length_mm,
            self.diameter_mm,
            self.head_width_mm,
            self.head_length_mm,
            self.pitch_mm,
            self.thread_depth_mm,
            self.half_thread_frac,
        ];
        if self.name.is_empty() || self.name.contains(',') || self.name.contains(char::is_whitespace) {
            return bad("name must be nonempty without commas or whitespace");
        }
        if dims.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return bad("dimensions must be positive");
        }
        if self.head_width_mm <= self.diameter_mm {
            return bad("head must be wider than the body");
        }
        if self.head_length_mm > 0.2 * self.length_mm {
            return bad("head longer than 20% of the length");
        }
        if self.thread_depth_mm >= self.diameter_mm / 2.0 {
            return bad("thread depth reaches the axis");
        }
        if self.thread_depth_mm * FLANK_RUN_PER_DEPTH > self.pitch_mm / 2.0 + 1e-12 {
            return bad("thread deeper than a sharp 60° V of this pitch");
        }
        if !(0.35..=0.40).contains(&self.half_thread_frac) {
            return bad("half-thread fraction outside [0.35, 0.40]");
        }
        Ok(())
    }
}

/// Where and how a bolt is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderParams {
    pub px_per_mm: f64,
    pub canvas_w: usize,
    pub canvas_h: usize,
    /// Pixel whose center the middle of the bolt lands on.
    pub center: PixelPoint,
    /// Rotation of the head-to-tip axis from +x toward +y.
    pub angle_deg: f64,
    pub noise: f64,
    pub seed: u64,
}

impl RenderParams {
    /// Noise-free render centered on the canvas.
    pub fn centered(canvas_w: usize, canvas_h: usize, angle_deg: f64) -> Self {
        Self {
            px_per_mm: DEFAULT_PX_PER_MM,
            canvas_w,
            canvas_h,
            center: PixelPoint::new(canvas_w / 2, canvas_h / 2),
            angle_deg,
            noise: 0.0,
            seed: 0,
        }
    }

    /// Uniform angle and a uniform center among those that fit the canvas.
    pub fn random_fit(
        spec: &BoltSpec,
        px_per_mm: f64,
        canvas_w: usize,
        canvas_h: usize,
        rng: &mut impl Rng,
    ) -> Result<Self, SynthError> {
        let angle_deg = rng.random_range(0.0..360.0);
        let (hx, hy) = half_extents(spec, px_per_mm, angle_deg);
        let pad = MARGIN_PX + 2.0;
        let range = |half: f64, size: usize| {
            let lo = (half + pad).ceil() as usize;
            let hi = (size as f64 - half - pad).floor() as isize - 1;
            (hi >= lo as isize).then_some(lo..=hi as usize)
        };
        let (Some(xr), Some(yr)) = (range(hx, canvas_w), range(hy, canvas_h)) else {
            return Err(SynthError::DoesNotFit {
                name: spec.name.clone(),
                canvas_w,
                canvas_h,
            });
        };
        Ok(Self {
            px_per_mm,
            canvas_w,
            canvas_h,
            center: PixelPoint::new(rng.random_range(xr), rng.random_range(yr)),
            angle_deg,
            noise: 0.0,
            seed: rng.random(),
        })
    }
}

/// Half width and half height of a bolt's axis-aligned footprint.
pub fn half_extents(spec: &BoltSpec, px_per_mm: f64, angle_deg: f64) -> (f64, f64) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let (hl, hw) = (spec.length_mm * px_per_mm / 2.0, spec.head_width_mm * px_per_mm / 2.0);
    (c.abs() * hl + s.abs() * hw, s.abs() * hl + c.abs() * hw)
}

/// What the renderer knows about a drawn bolt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: BoltSpec,
    pub px_per_mm: f64,
    /// First body column of the noise-free upright render, counted from its
    /// leftmost white column.
    pub shoulder_column_px: usize,
    /// White pixels of the emitted image (single-bolt renders) or of this
    /// bolt alone before noise (frames).
    pub white_count: usize,
    /// Bounding rect of the bolt's pixels before noise.
    pub placement: AxisRect,
}

impl GroundTruth {
    pub fn major_px(&self) -> f64 {
        self.spec.length_mm * self.px_per_mm
    }

    pub fn minor_px(&self) -> f64 {
        self.spec.diameter_mm * self.px_per_mm
    }

    pub fn pitch_px(&self) -> f64 {
        self.spec.pitch_mm * self.px_per_mm
    }
}

/// A spec scaled to pixels.
struct Silhouette {
    length: f64,
    head_length: f64,
    head_half: f64,
    radius: f64,
    pitch: f64,
    depth: f64,
    thread_from: f64,
}

impl Silhouette {
    fn new(spec: &BoltSpec, k: f64) -> Self {
        let length = spec.length_mm * k;
        let head_length = spec.head_length_mm * k;
        let thread_from = match spec.threading {
            ThreadingType::FullThread => head_length,
            ThreadingType::HalfThread => length * (1.0 - spec.half_thread_frac),
        };
        Self {
            length,
            head_length,
            head_half: spec.head_width_mm * k / 2.0,
            radius: spec.diameter_mm * k / 2.0,
            pitch: spec.pitch_mm * k,
            depth: spec.thread_depth_mm * k,
            thread_from,
        }
    }

    /// Body half-width at `s`; `offset` shifts the thread phase. Crest
    /// centers sit at `thread_from + k·pitch`.
    fn edge(&self, s: f64, offset: f64) -> f64 {
        if s < self.thread_from {
            return self.radius;
        }
        let phase = ((s - self.thread_from) / self.pitch + offset).rem_euclid(1.0);
        let from_crest = phase.min(1.0 - phase) * self.pitch;
        let flank_run = self.depth * FLANK_RUN_PER_DEPTH;
        let half_crest = self.pitch / 2.0 - flank_run;
        if from_crest <= half_crest {
            self.radius
        } else {
            self.radius - self.depth * (from_crest - half_crest) / flank_run
        }
    }

    fn contains(&self, s: f64, t: f64) -> bool {
        if !(0.0..=self.length).contains(&s) {
            return false;
        }
        if s <= self.head_length {
            return t.abs() <= self.head_half;
        }
        if t < 0.0 {
            -t <= self.edge(s, 0.0)
        } else {
            t <= self.edge(s, 0.5)
        }
    }
}

/// Draws one bolt into `img`; returns its clean pixel count and bounds.
fn rasterize(
    img: &mut BinaryImage,
    spec: &BoltSpec,
    k: f64,
    center: PixelPoint,
    angle_deg: f64,
) -> Result<(usize, AxisRect), SynthError> {
    let shape = Silhouette::new(spec, k);
    let (hx, hy) = half_extents(spec, k, angle_deg);
    let (cx, cy) = (center.x as f64 + 0.5, center.y as f64 + 0.5);
    let (x0, x1) = ((cx - hx).floor(), (cx + hx).ceil());
    let (y0, y1) = ((cy - hy).floor(), (cy + hy).ceil());
    let (w, h) = (img.width() as f64, img.height() as f64);
    if x0 < MARGIN_PX || y0 < MARGIN_PX || x1 > w - MARGIN_PX || y1 > h - MARGIN_PX {
        return Err(SynthError::DoesNotFit {
            name: spec.name.clone(),
            canvas_w: img.width(),
            canvas_h: img.height(),
        });
    }
    let (sin, cos) = angle_deg.to_radians().sin_cos();
    let mut count = 0;
    let (mut bx0, mut by0, mut bx1, mut by1) = (usize::MAX, usize::MAX, 0, 0);
    for y in y0 as usize..y1 as usize {
        let dy = y as f64 + 0.5 - cy;
        for x in x0 as usize..x1 as usize {
            let dx = x as f64 + 0.5 - cx;
            let s = shape.length / 2.0 + dx * cos + dy * sin;
            let t = -dx * sin + dy * cos;
            if shape.contains(s, t) {
                img.set(x, y, true);
                count += 1;
                bx0 = bx0.min(x);
                bx1 = bx1.max(x);
                by0 = by0.min(y);
                by1 = by1.max(y);
            }
        }
    }
    if count == 0 {
        return Err(SynthError::InvalidSpec {
            name: spec.name.clone(),
            reason: "renders no pixels".into(),
        });
    }
    Ok((count, AxisRect::new(bx0, by0, bx1 - bx0 + 1, by1 - by0 + 1)))
}

/// Shoulder column measured on a tight upright render: the first column
/// whose white run is closer to the body width than to the head width.
fn shoulder_column(spec: &BoltSpec, k: f64) -> usize {
    let (hx, hy) = half_extents(spec, k, 0.0);
    let (w, h) = (2 * (hx.ceil() as usize) + 8, 2 * (hy.ceil() as usize) + 8);
    let mut img = BinaryImage::black(w, h);
    let (_, bounds) = rasterize(&mut img, spec, k, PixelPoint::new(w / 2, h / 2), 0.0).expect("tight canvas fits");
    let split = (spec.head_width_mm + spec.diameter_mm) * k / 2.0;
    (bounds.x..bounds.x + bounds.w)
        .find(|&x| ((0..h).filter(|&y| img.get(x, y)).count() as f64) < split)
        .map_or(0, |x| x - bounds.x)
}

fn check_params(spec: &BoltSpec, params: &RenderParams) -> Result<(), SynthError> {
    spec.validate()?;
    if !(params.px_per_mm.is_finite() && params.px_per_mm > 0.0) {
        return Err(SynthError::Params(format!("px_per_mm {}", params.px_per_mm)));
    }
    if !params.angle_deg.is_finite() {
        return Err(SynthError::Params(format!("angle {}", params.angle_deg)));
    }
    Ok(())
}

pub fn render_bolt(spec: &BoltSpec, params: &RenderParams) -> Result<(BinaryImage, GroundTruth), SynthError> {
    check_params(spec, params)?;
    if params.canvas_w == 0 || params.canvas_h == 0 {
        return Err(SynthError::Params("empty canvas".into()));
    }
    let mut img = BinaryImage::black(params.canvas_w, params.canvas_h);
    let (_, placement) = rasterize(&mut img, spec, params.px_per_mm, params.center, params.angle_deg)?;
    let img = add_noise(&img, params.noise, params.seed)?;
    let truth = GroundTruth {
        spec: spec.clone(),
        px_per_mm: params.px_per_mm,
        shoulder_column_px: shoulder_column(spec, params.px_per_mm),
        white_count: img.count_white(),
        placement,
    };
    Ok((img, truth))
}

/// One bolt of a multi-bolt frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub spec: BoltSpec,
    pub center: PixelPoint,
    pub angle_deg: f64,
}

/// Several bolts on one canvas, then noise over the whole frame.
///
/// Footprints (axis-aligned, grown by one pixel) must not intersect, so the
/// bolts stay separate 8-connected components.
pub fn render_frame(
    canvas_w: usize,
    canvas_h: usize,
    bolts: &[Placement],
    px_per_mm: f64,
    noise: f64,
    seed: u64,
) -> Result<(BinaryImage, Vec<GroundTruth>), SynthError> {
    if canvas_w == 0 || canvas_h == 0 {
        return Err(SynthError::Params("empty canvas".into()));
    }
    let mut img = BinaryImage::black(canvas_w, canvas_h);
    let mut truths: Vec<GroundTruth> = Vec::with_capacity(bolts.len());
    let mut footprints: Vec<(f64, f64, f64, f64)> = Vec::new();
    for b in bolts {
        let params = RenderParams {
            px_per_mm,
            canvas_w,
            canvas_h,
            center: b.center,
            angle_deg: b.angle_deg,
            noise,
            seed,
        };
        check_params(&b.spec, &params)?;
        let (hx, hy) = half_extents(&b.spec, px_per_mm, b.angle_deg);
        let (cx, cy) = (b.center.x as f64 + 0.5, b.center.y as f64 + 0.5);
        let fp = (cx - hx - 1.0, cy - hy - 1.0, cx + hx + 1.0, cy + hy + 1.0);
        if let Some(i) = footprints
            .iter()
            .position(|o| fp.0 < o.2 && o.0 < fp.2 && fp.1 < o.3 && o.1 < fp.3)
        {
            return Err(SynthError::Overlap {
                first: bolts[i].spec.name.clone(),
                second: b.spec.name.clone(),
            });
        }
        footprints.push(fp);
        let (white_count, placement) = rasterize(&mut img, &b.spec, px_per_mm, b.center, b.angle_deg)?;
        truths.push(GroundTruth {
            spec: b.spec.clone(),
            px_per_mm,
            shoulder_column_px: shoulder_column(&b.spec, px_per_mm),
            white_count,
            placement,
        });
    }
    Ok((add_noise(&img, noise, seed)?, truths))
}

/// Salt-and-pepper noise: every pixel flips independently with probability
/// `rate`, drawn in row-major order from ChaCha8 seeded with `seed`.
pub fn add_noise(img: &BinaryImage, rate: f64, seed: u64) -> Result<BinaryImage, SynthError> {
    if !(0.0..=MAX_NOISE_RATE).contains(&rate) {
        return Err(SynthError::NoiseRate(rate));
    }
    if rate == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pixels = img.as_slice().iter().map(|&p| p ^ rng.random_bool(rate)).collect();
    Ok(BinaryImage::new(img.width(), img.height(), pixels).expect("same dimensions"))
}
