use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gesture_rps::config::Settings;
use gesture_rps::geometry::{Hull, HullFeatures, Point};
use gesture_rps::i18n::PhraseTable;
use gesture_rps::imaging::{self, BinaryImage, Frame, GrayImage, Plane};
use gesture_rps::pnm::{self, PnmError};
use gesture_rps::recognition::{self, Calibration, DecisionRule};
use gesture_rps::{pipeline, Gesture};
use serde::Serialize;

use crate::Failure;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Gray,
    Otsu,
    Subtract,
    Sobel,
    Hull,
    Features,
    Classify,
}

impl Stage {
    fn artifact(self) -> &'static str {
        match self {
            Stage::Gray => "gray.pgm",
            Stage::Otsu => "otsu.pgm",
            Stage::Subtract => "subtract.pgm",
            Stage::Sobel => "sobel.pgm",
            Stage::Hull => "hull.ppm",
            Stage::Features => "features.pgm",
            Stage::Classify => "classify.ppm",
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Input image (binary PPM or PGM).
    #[arg(long)]
    input: PathBuf,
    /// Background image of the same size; needed by `subtract`.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Comma-separated stages. Defaults to every stage the other flags allow.
    #[arg(long, value_delimiter = ',')]
    stages: Vec<Stage>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Summed RGB difference for background subtraction.
    #[arg(long, value_parser = clap::value_parser!(u16).range(0..=imaging::MAX_SUBTRACTION_K as i64))]
    threshold_k: Option<u16>,
    /// Sobel magnitude at which a pixel becomes an edge.
    #[arg(long)]
    edge_level: Option<u8>,
    /// Rock hull extent in pixels, standing in for interactive calibration.
    #[arg(long)]
    calib_extent: Option<f64>,
}

/// Sorts stages into pipeline order and checks each one's inputs.
pub fn plan(
    requested: &[Stage],
    has_background: bool,
    has_calibration: bool,
) -> Result<Vec<Stage>, Failure> {
    let mut stages = requested.to_vec();
    if stages.is_empty() {
        stages = vec![Stage::Gray, Stage::Otsu];
        if has_background {
            stages.push(Stage::Subtract);
        }
        stages.extend([Stage::Sobel, Stage::Hull, Stage::Features]);
        if has_calibration {
            stages.push(Stage::Classify);
        }
    }
    stages.sort();
    stages.dedup();
    let has = |s| stages.contains(&s);
    if has(Stage::Subtract) && !has_background {
        return Err(Failure::new("stage `subtract` needs --background"));
    }
    if has(Stage::Sobel) && !has(Stage::Otsu) && !has(Stage::Subtract) {
        return Err(Failure::new("stage `sobel` needs `otsu` or `subtract`"));
    }
    if has(Stage::Hull) && !has(Stage::Sobel) {
        return Err(Failure::new("stage `hull` needs `sobel`"));
    }
    if has(Stage::Features) && !has(Stage::Hull) {
        return Err(Failure::new("stage `features` needs `hull`"));
    }
    if has(Stage::Classify) && !has(Stage::Features) {
        return Err(Failure::new("stage `classify` needs `features`"));
    }
    if has(Stage::Classify) && !has_calibration {
        return Err(Failure::new("stage `classify` needs --calib-extent"));
    }
    Ok(stages)
}

#[derive(Debug, Serialize)]
pub struct HullReport {
    pub vertices: Vec<Point>,
    pub source_points: usize,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub schema: u32,
    pub width: usize,
    pub height: usize,
    pub stages: Vec<Stage>,
    pub artifacts: Vec<String>,
    pub threshold_k: u16,
    pub edge_level: u8,
    pub otsu_k: Option<u8>,
    pub foreground_pixels: Option<usize>,
    pub edge_pixels: Option<usize>,
    pub hull: Option<HullReport>,
    pub total_area: Option<f64>,
    pub white_area: Option<u64>,
    pub ratio: Option<f64>,
    pub extent: Option<f64>,
    pub calib_extent: Option<f64>,
    pub label: Option<Gesture>,
    pub label_text: Option<String>,
    pub rule: Option<DecisionRule>,
}

fn read_image(path: &Path) -> Result<Frame, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::new(format!("{}: {e}", path.display())))?;
    let decoded = match pnm::decode_ppm(&bytes) {
        Err(PnmError::BadMagic { .. }) => pnm::decode_pgm(&bytes).map(|g| gray_frame(&g)),
        other => other,
    };
    decoded.map_err(|e| Failure::new(format!("{}: {e}", path.display())))
}

fn gray_frame(img: &GrayImage) -> Frame {
    let rgb: Vec<u8> = img.values().iter().flat_map(|&v| [v, v, v]).collect();
    Frame::from_rgb(img.width(), img.height(), &rgb).expect("sizes agree")
}

const HULL_COLOR: [u8; 4] = [255, 0, 0, 255];

fn label_color(label: Gesture) -> [u8; 4] {
    match label {
        Gesture::Rock => [255, 64, 64, 255],
        Gesture::Paper => [64, 255, 64, 255],
        Gesture::Scissors => [64, 128, 255, 255],
        Gesture::Unknown => [128, 128, 128, 255],
    }
}

/// Draws the closed hull polygon onto a copy of `frame`.
fn overlay(frame: &Frame, hull: Option<&Hull>, color: [u8; 4]) -> Frame {
    let mut canvas = frame.clone();
    let Some(hull) = hull else {
        return canvas;
    };
    let v = &hull.vertices;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        let steps = (b.x - a.x).abs().max((b.y - a.y).abs()).max(1);
        for s in 0..=steps {
            let x = a.x + ((b.x - a.x) * s + steps / 2).div_euclid(steps);
            let y = a.y + ((b.y - a.y) * s + steps / 2).div_euclid(steps);
            if x >= 0 && y >= 0 && (x as usize) < canvas.width() && (y as usize) < canvas.height() {
                canvas.set_pixel(x as usize, y as usize, color);
            }
        }
    }
    canvas
}

fn write(out: &Path, stage: Stage, bytes: Vec<u8>, report: &mut Report) -> Result<(), Failure> {
    let path = out.join(stage.artifact());
    fs::write(&path, bytes).map_err(|e| Failure::new(format!("{}: {e}", path.display())))?;
    report.artifacts.push(stage.artifact().to_owned());
    Ok(())
}

/// Runs the planned stages, writing artifacts into `out`, and returns the
/// report.
pub fn execute(
    input: &Frame,
    background: Option<&Frame>,
    stages: &[Stage],
    settings: &Settings,
    calib_extent: Option<f64>,
    phrases: &PhraseTable,
    out: &Path,
) -> Result<Report, Failure> {
    let cfg = &settings.pipeline;
    let has = |s| stages.contains(&s);
    let mut report = Report {
        schema: REPORT_SCHEMA,
        width: input.width(),
        height: input.height(),
        stages: stages.to_vec(),
        threshold_k: cfg.subtraction_k,
        edge_level: cfg.edge_level,
        calib_extent,
        ..Report::default()
    };

    let gray = imaging::to_grayscale(input);
    if has(Stage::Gray) {
        write(out, Stage::Gray, pnm::encode_pgm(&gray), &mut report)?;
    }
    let otsu = if has(Stage::Otsu) {
        let k = imaging::otsu_level_or_fallback(&gray).map_err(Failure::new)?;
        report.otsu_k = Some(k);
        let mask = imaging::binarize(&gray, k);
        write(out, Stage::Otsu, pnm::encode_pgm(&mask), &mut report)?;
        Some(mask)
    } else {
        None
    };
    let subtraction = match (has(Stage::Subtract), background) {
        (true, Some(bg)) => {
            let mask =
                imaging::background_subtract(bg, input, cfg.subtraction_k).map_err(Failure::new)?;
            write(out, Stage::Subtract, pnm::encode_pgm(&mask), &mut report)?;
            Some(mask)
        }
        _ => None,
    };
    let foreground: Option<BinaryImage> = match (otsu, subtraction) {
        (Some(a), Some(b)) => Some(b.and(&a).map_err(Failure::new)?),
        (a, b) => a.or(b),
    };
    if !has(Stage::Sobel) {
        return Ok(report);
    }
    let foreground = foreground.expect("plan guarantees a mask before sobel");
    report.foreground_pixels = Some(foreground.count_white());
    let edges = imaging::sobel(&foreground, cfg.edge_level).map_err(Failure::new)?;
    report.edge_pixels = Some(edges.count_white());
    write(out, Stage::Sobel, pnm::encode_pgm(&edges), &mut report)?;

    if !has(Stage::Hull) {
        return Ok(report);
    }
    let (hull, features) = pipeline::measure(&edges, &foreground);
    report.hull = hull.as_ref().map(|h| HullReport {
        vertices: h.vertices.clone(),
        source_points: h.source_count,
    });
    write(
        out,
        Stage::Hull,
        pnm::encode_ppm(&overlay(input, hull.as_ref(), HULL_COLOR)),
        &mut report,
    )?;

    if !has(Stage::Features) {
        return Ok(report);
    }
    let HullFeatures {
        total_area,
        white_area,
        ratio,
        extent,
    } = features;
    report.total_area = Some(total_area);
    report.white_area = Some(white_area);
    report.ratio = Some(ratio);
    report.extent = Some(extent);
    let inside = BinaryImage::from_fn(foreground.width(), foreground.height(), |x, y| {
        foreground.is_white(x, y)
            && hull
                .as_ref()
                .is_some_and(|h| h.contains(Point::new(x as i32, y as i32)))
    });
    write(out, Stage::Features, pnm::encode_pgm(&inside), &mut report)?;

    if let (true, Some(rock_extent)) = (has(Stage::Classify), calib_extent) {
        let calib = Calibration {
            rock_extent,
            captured_at: 0,
            valid: true,
        };
        let reading = recognition::classify(&features, &calib, &settings.recognition)
            .map_err(Failure::new)?;
        report.label = Some(reading.label);
        report.label_text = Some(phrases.lookup(reading.label.phrase_key()).to_owned());
        report.rule = Some(reading.rule);
        let canvas = overlay(input, hull.as_ref(), label_color(reading.label));
        write(out, Stage::Classify, pnm::encode_ppm(&canvas), &mut report)?;
    }
    Ok(report)
}

pub fn run(args: &RunArgs, settings: &Settings, phrases: &PhraseTable) -> Result<(), Failure> {
    if let Some(e) = args.calib_extent {
        if !(e.is_finite() && e > 0.0) {
            return Err(Failure::new("--calib-extent must be a positive number"));
        }
    }
    let stages = plan(
        &args.stages,
        args.background.is_some(),
        args.calib_extent.is_some(),
    )?;
    let input = read_image(&args.input)?;
    let background = args.background.as_deref().map(read_image).transpose()?;
    let mut settings = settings.clone();
    if let Some(k) = args.threshold_k {
        settings.pipeline.subtraction_k = k;
    }
    if let Some(level) = args.edge_level {
        settings.pipeline.edge_level = level;
    }
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::new(format!("{}: {e}", args.out.display())))?;
    let report = execute(
        &input,
        background.as_ref(),
        &stages,
        &settings,
        args.calib_extent,
        phrases,
        &args.out,
    )?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let path = args.out.join("report.json");
    fs::write(&path, json).map_err(|e| Failure::new(format!("{}: {e}", path.display())))?;
    println!("{}", path.display());
    Ok(())
}
