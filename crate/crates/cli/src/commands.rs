use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use boltid_core::identify::{
    enroll, load_table, nearest_match_with, save_table, Enrollment, LookupTable, DEFAULT_PX_PER_MM,
};
use boltid_core::imagecore::{
    connected_components, filter_min_area, read_pgm, threshold, write_binary_pgm, BinaryImage, Component, GrayImage,
};
use boltid_core::pipeline::{extract_features_timed, PipelineError, Stage};
use boltid_core::synth::{load_catalog, render_bolt, standard_catalog, BoltSpec, RenderParams, MAX_NOISE_RATE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::manifest::{parse_manifest, write_manifest, ManifestEntry};
use crate::report::{
    BenchReport, BenchRow, ComponentRecord, FeaturesMm, ImageRecord, ImageTimings, RunReport, Summary, TruthSummary,
};
use crate::{BenchArgs, CliError, EnrollArgs, GenArgs, IdentifyArgs, MeasureArgs};

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn read_gray(path: &Path) -> Result<GrayImage, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    read_pgm(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Thresholded image and its components above the min area, row-major.
fn components(gray: &GrayImage, cfg: &RunConfig) -> Vec<Component> {
    filter_min_area(
        connected_components(&threshold(gray, cfg.threshold)),
        cfg.pipeline.min_component_area,
    )
}

/// Expands directories to their `.pgm` files, sorted by name.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::Usage(format!("cannot list {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
    parse_manifest(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

struct Labels<'a> {
    by_file: HashMap<String, String>,
    table: Option<&'a LookupTable>,
}

fn file_key(path: &str) -> String {
    Path::new(path)
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string())
}

/// Measures (and with a table, identifies) every component of one image.
fn process_image(
    path: &Path,
    cfg: &RunConfig,
    table: Option<&LookupTable>,
    labels: Option<&Labels>,
) -> (ImageRecord, ImageTimings) {
    let shown = path.display().to_string();
    let mut timing = ImageTimings {
        path: shown.clone(),
        read_ms: 0.0,
        threshold_ms: 0.0,
        components_ms: 0.0,
        stages: Vec::new(),
    };
    let t0 = Instant::now();
    let gray = match read_gray(path) {
        Ok(g) => g,
        Err(e) => {
            let rec = ImageRecord {
                path: shown,
                error: Some(e),
                components: Vec::new(),
            };
            return (rec, timing);
        }
    };
    timing.read_ms = ms(t0.elapsed());
    let t1 = Instant::now();
    let bin = threshold(&gray, cfg.threshold);
    timing.threshold_ms = ms(t1.elapsed());
    let t2 = Instant::now();
    let comps = filter_min_area(connected_components(&bin), cfg.pipeline.min_component_area);
    timing.components_ms = ms(t2.elapsed());
    if comps.is_empty() {
        log::warn!("{shown}: no components");
    }

    let k = cfg.px_per_mm.or(table.map(|t| t.px_per_mm()));
    let label = labels.and_then(|l| l.by_file.get(&file_key(&shown)));
    let largest = comps
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (c.area, usize::MAX - i))
        .map(|(i, _)| i);
    let mut records = Vec::with_capacity(comps.len());
    for (index, comp) in comps.iter().enumerate() {
        let mut rec = ComponentRecord {
            index,
            rect: comp.rect,
            area_px: comp.area,
            features: None,
            features_mm: None,
            error: None,
            match_result: None,
            truth: if Some(index) == largest { label.cloned() } else { None },
        };
        match extract_features_timed(&comp.mask, &cfg.pipeline) {
            Ok((f, t)) => {
                timing
                    .stages
                    .push(t.named().iter().map(|(s, d)| (s.to_string(), ms(*d))).collect());
                rec.features_mm = k.map(|k| FeaturesMm {
                    major: f.major_px / k,
                    minor: f.minor_px / k,
                    pitch: f.pitch_px.map(|p| p / k),
                });
                if let Some(t) = table {
                    rec.match_result = Some(nearest_match_with(&f, t, cfg.reject_frac).expect("tables are nonempty"));
                }
                rec.features = Some(f);
            }
            Err(e) => {
                timing.stages.push(Vec::new());
                rec.error = Some(e.to_string());
            }
        }
        records.push(rec);
    }
    let rec = ImageRecord {
        path: shown,
        error: None,
        components: records,
    };
    (rec, timing)
}

fn summarize(images: &[ImageRecord], labels: Option<&Labels>) -> Summary {
    let mut s = Summary {
        images: images.len(),
        ..Default::default()
    };
    let mut truth = labels.map(|_| TruthSummary::default());
    for img in images {
        if img.error.is_some() {
            s.unreadable_images += 1;
        }
        for c in &img.components {
            s.components += 1;
            if c.features.is_some() {
                s.measured += 1;
            } else {
                s.failed += 1;
            }
            if let Some(m) = &c.match_result {
                if m.known {
                    s.known += 1;
                } else {
                    s.unknown += 1;
                }
            }
            let (Some(t), Some(name)) = (truth.as_mut(), &c.truth) else {
                continue;
            };
            t.labeled += 1;
            let expected = labels.and_then(|l| l.table).and_then(|tb| tb.get(name));
            if let (Some(f), Some(e)) = (&c.features, expected) {
                if f.threading == e.threading {
                    t.threading_correct += 1;
                }
            }
            let Some(m) = c.match_result.as_ref().filter(|m| m.known) else {
                continue;
            };
            if &m.name == name {
                t.true_positives += 1;
            } else {
                t.false_positives += 1;
            }
            let got = labels.and_then(|l| l.table).map(|tb| &tb.entries()[m.index]);
            if let (Some(g), Some(e)) = (got, expected) {
                if g.width_px == e.width_px && g.height_px == e.height_px {
                    t.dims_true_positives += 1;
                }
            }
        }
    }
    s.truth = truth;
    s
}

fn run_images(
    command: &str,
    paths: &[PathBuf],
    cfg: &RunConfig,
    table: Option<(&LookupTable, String)>,
    labels: Option<&Labels>,
    timings: bool,
) -> RunReport {
    let tbl = table.as_ref().map(|(t, _)| *t);
    let results: Vec<(ImageRecord, ImageTimings)> =
        paths.par_iter().map(|p| process_image(p, cfg, tbl, labels)).collect();
    let (images, times): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    RunReport {
        command: command.to_string(),
        config: cfg.to_text(),
        table: table.map(|(_, p)| p),
        summary: summarize(&images, labels),
        images,
        timings: timings.then_some(times),
    }
}

fn write_out(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if path == Path::new("-") {
        use std::io::Write;
        std::io::stdout()
            .write_all(contents)
            .map_err(|e| CliError::Runtime(format!("cannot write stdout: {e}")))
    } else {
        std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn cmd_enroll(args: &EnrollArgs) -> Result<Enrollment, CliError> {
    let cfg = args.config.resolve()?;
    let entries = read_manifest(&args.manifest)?;
    let dir = args
        .images
        .clone()
        .or_else(|| args.manifest.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let mut seen = std::collections::HashSet::new();
    for e in &entries {
        if !dir.join(&e.file).is_file() {
            return Err(CliError::Usage(format!(
                "manifest names missing file {}",
                dir.join(&e.file).display()
            )));
        }
        if !seen.insert(e.name.as_str()) {
            return Err(CliError::Usage(format!("duplicate name {:?} in manifest", e.name)));
        }
    }
    if entries.is_empty() {
        return Err(CliError::Usage("manifest has no entries".into()));
    }
    let samples = entries
        .par_iter()
        .map(|e| {
            let path = dir.join(&e.file);
            let gray = read_gray(&path).map_err(CliError::Runtime)?;
            let comps = components(&gray, &cfg);
            if comps.len() > 1 {
                log::warn!("{}: {} components, enrolling the largest", path.display(), comps.len());
            }
            let mask = comps
                .into_iter()
                .max_by_key(|c| c.area)
                .map(|c| c.mask)
                .ok_or_else(|| CliError::Runtime(format!("{}: no bolt found", path.display())))?;
            Ok((e.name.clone(), mask))
        })
        .collect::<Result<Vec<(String, BinaryImage)>, CliError>>()?;
    let k = cfg.px_per_mm.unwrap_or(DEFAULT_PX_PER_MM);
    let enrolled = enroll(&samples, &cfg.pipeline, k).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_out(&args.out, save_table(&enrolled.table).as_bytes())?;
    Ok(enrolled)
}

pub fn cmd_identify(args: &IdentifyArgs) -> Result<RunReport, CliError> {
    let cfg = args.config.resolve()?;
    let text = std::fs::read_to_string(&args.table)
        .map_err(|e| CliError::Usage(format!("cannot read table {}: {e}", args.table.display())))?;
    let table = load_table(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.table.display())))?;
    let labels = match &args.truth {
        Some(p) => Some(Labels {
            by_file: read_manifest(p)?
                .into_iter()
                .map(|e| (file_key(&e.file), e.name))
                .collect(),
            table: Some(&table),
        }),
        None => None,
    };
    let paths = expand_inputs(&args.images)?;
    let report = run_images(
        "identify",
        &paths,
        &cfg,
        Some((&table, args.table.display().to_string())),
        labels.as_ref(),
        !args.no_timings,
    );
    if let Some(out) = &args.json {
        write_out(out, crate::report::to_json(&report).as_bytes())?;
    }
    if !paths.is_empty() && report.summary.unreadable_images == paths.len() {
        return Err(CliError::Runtime(format!("all {} images failed to load", paths.len())));
    }
    Ok(report)
}

pub fn cmd_measure(args: &MeasureArgs) -> Result<RunReport, CliError> {
    let cfg = args.config.resolve()?;
    let paths = vec![args.image.clone()];
    let mut report = run_images("measure", &paths, &cfg, None, None, !args.no_timings);
    let img = &mut report.images[0];
    if img.error.is_none() && img.components.is_empty() {
        img.error = Some(PipelineError::EmptyInput(Stage::Orient).to_string());
    }
    if let Some(out) = &args.json {
        write_out(out, crate::report::to_json(&report).as_bytes())?;
    }
    let img = &report.images[0];
    if let Some(e) = img
        .error
        .clone()
        .or_else(|| img.components.iter().find_map(|c| c.error.clone()))
    {
        return Err(CliError::Runtime(e));
    }
    Ok(report)
}

fn parse_canvas(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("canvas {s:?} is not WxH"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let (w, h) = (w.parse().map_err(|_| bad())?, h.parse().map_err(|_| bad())?);
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn parse_angles(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("angle {a:?} is not a number")))
        })
        .collect()
}

/// Writes renders plus `manifest.csv` into `out`; returns the manifest.
pub fn cmd_gen(args: &GenArgs) -> Result<Vec<ManifestEntry>, CliError> {
    let specs: Vec<BoltSpec> = if args.catalog == "builtin" {
        standard_catalog()
    } else {
        let text = std::fs::read_to_string(&args.catalog)
            .map_err(|e| CliError::Usage(format!("cannot read catalog {}: {e}", args.catalog)))?;
        load_catalog(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.catalog)))?
    };
    if specs.is_empty() {
        return Err(CliError::Usage("catalog is empty".into()));
    }
    if !(0.0..=MAX_NOISE_RATE).contains(&args.noise) {
        return Err(CliError::Usage(format!(
            "noise {} outside [0, {MAX_NOISE_RATE}]",
            args.noise
        )));
    }
    if !(args.px_per_mm.is_finite() && args.px_per_mm > 0.0) {
        return Err(CliError::Usage(format!(
            "px_per_mm must be positive, got {}",
            args.px_per_mm
        )));
    }
    let (w, h) = parse_canvas(&args.canvas)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut jobs: Vec<(String, BoltSpec, RenderParams)> = Vec::new();
    match (args.count, &args.angles) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--count and --angles are exclusive".into())),
        (Some(n), None) => {
            for i in 0..n {
                let spec = specs[rng.random_range(0..specs.len())].clone();
                let mut p = RenderParams::random_fit(&spec, args.px_per_mm, w, h, &mut rng)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                p.noise = args.noise;
                jobs.push((format!("{i:04}_{}.pgm", spec.name), spec, p));
            }
        }
        (None, angles) => {
            let angles = parse_angles(
                angles
                    .as_deref()
                    .unwrap_or("0,30,60,90,120,150,180,210,240,270,300,330"),
            )?;
            for spec in &specs {
                for &a in &angles {
                    let mut p = RenderParams::centered(w, h, a);
                    p.px_per_mm = args.px_per_mm;
                    p.noise = args.noise;
                    p.seed = rng.random();
                    jobs.push((format!("{}_{a:03}.pgm", spec.name), spec.clone(), p));
                }
            }
        }
    }
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let manifest = jobs
        .par_iter()
        .map(|(file, spec, p)| {
            let (img, _) = render_bolt(spec, p).map_err(|e| CliError::Usage(format!("{file}: {e}")))?;
            write_out(&args.out.join(file), &write_binary_pgm(&img))?;
            Ok(ManifestEntry {
                file: file.clone(),
                name: spec.name.clone(),
                angle_deg: Some(p.angle_deg),
                noise: Some(p.noise),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_out(&args.out.join("manifest.csv"), write_manifest(&manifest).as_bytes())?;
    Ok(manifest)
}

fn mean_p95(samples: &mut [f64]) -> (f64, f64) {
    samples.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let rank = ((0.95 * samples.len() as f64).ceil() as usize).clamp(1, samples.len());
    (mean, samples[rank - 1])
}

/// Times threshold, labeling and every pipeline stage, single-threaded.
pub fn cmd_bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    if args.reps < 1 {
        return Err(CliError::Usage("repetitions must be at least 1".into()));
    }
    let cfg = args.config.resolve()?;
    let paths = expand_inputs(&args.images)?;
    if paths.is_empty() {
        return Err(CliError::Usage("no images to benchmark".into()));
    }
    let grays = paths
        .iter()
        .map(|p| read_gray(p).map_err(CliError::Runtime))
        .collect::<Result<Vec<_>, _>>()?;
    let stage_names: Vec<&str> = ["threshold", "components"]
        .into_iter()
        .chain(boltid_core::pipeline::StageTimings::default().named().map(|(n, _)| n))
        .collect();
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); stage_names.len() + 1];
    for rep in 0..=args.reps {
        for gray in &grays {
            let start = Instant::now();
            let bin = threshold(gray, cfg.threshold);
            let t_thr = start.elapsed();
            let comps = filter_min_area(connected_components(&bin), cfg.pipeline.min_component_area);
            let t_cc = start.elapsed() - t_thr;
            let mut per_stage = vec![0.0; stage_names.len()];
            per_stage[0] = ms(t_thr);
            per_stage[1] = ms(t_cc);
            for c in &comps {
                if let Ok((_, t)) = extract_features_timed(&c.mask, &cfg.pipeline) {
                    for (i, (_, d)) in t.named().iter().enumerate() {
                        per_stage[2 + i] += ms(*d);
                    }
                }
            }
            let total = ms(start.elapsed());
            // the first pass only warms caches
            if rep > 0 {
                for (i, v) in per_stage.into_iter().enumerate() {
                    samples[i].push(v);
                }
                samples[stage_names.len()].push(total);
            }
        }
    }
    let rows = stage_names
        .iter()
        .copied()
        .chain(["total"])
        .zip(samples.iter_mut())
        .map(|(stage, s)| {
            let (mean_ms, p95_ms) = mean_p95(s);
            BenchRow {
                stage: stage.to_string(),
                mean_ms,
                p95_ms,
            }
        })
        .collect();
    let report = BenchReport {
        config: cfg.to_text(),
        images: paths.iter().map(|p| p.display().to_string()).collect(),
        repetitions: args.reps,
        rows,
    };
    if let Some(out) = &args.json {
        let mut s = serde_json::to_string_pretty(&report).expect("bench report serializes");
        s.push('\n');
        write_out(out, s.as_bytes())?;
    }
    Ok(report)
}
