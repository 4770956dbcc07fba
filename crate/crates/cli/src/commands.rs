//! The five subcommands plus manifest-driven re-execution. Every command
//! materializes its full configuration into `manifest.txt` next to its
//! outputs, and `rerun` replays a manifest byte-for-byte.

use std::path::{Path, PathBuf};

use ptd_core::detector::{moving_abs_diff, moving_sum, rank_transitions};
use ptd_core::dimest::{geodesic_distances, residual_curve_with};
use ptd_core::geometry::{
    analytic_arc_covariance, empirical_covariance, generate_sombrero, ratio_approx,
    ratio_small_angle, sample_arc, shape_operator, ArcSpec, Label, Plane, Saddle, Sphere,
};
use ptd_core::neighbors::FrameMatrix;
use ptd_core::raster::{frames_to_matrix, rasterize_trajectory, Frame, RasterConfig};
use ptd_core::spectra::{ratio_series_with, SpectraConfig};
use ptd_core::vicsek::{simulate, NoiseBand, SwarmConfig};

use crate::error::{io_at, CliError, Result};
use crate::kv::KvDoc;
use crate::{csvio, fmat, pgm, svg};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn ensure_dir(dir: &Path) -> Result<()> {
    io_at(dir, std::fs::create_dir_all(dir))
}

fn schedule_to_string(bands: &[NoiseBand]) -> String {
    bands
        .iter()
        .map(|b| format!("{}:{}:{}", b.start, b.end, b.sigma))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_schedule(text: &str) -> Result<Vec<NoiseBand>> {
    let mut bands = Vec::new();
    for part in text.split(',') {
        let fields: Vec<&str> = part.trim().split(':').collect();
        if fields.len() != 3 {
            return Err(CliError::usage(format!(
                "schedule entry `{part}`: expected start:end:sigma"
            )));
        }
        let parse_count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| CliError::usage(format!("schedule entry `{part}`: bad step `{s}`")))
        };
        let sigma = fields[2].parse::<f64>().map_err(|_| {
            CliError::usage(format!(
                "schedule entry `{part}`: bad sigma `{}`",
                fields[2]
            ))
        })?;
        bands.push(NoiseBand {
            start: parse_count(fields[0])?,
            end: parse_count(fields[1])?,
            sigma,
        });
    }
    Ok(bands)
}

const SWARM_KEYS: [&str; 8] = [
    "particles",
    "steps",
    "delta",
    "speed",
    "radius",
    "box_side",
    "schedule",
    "seed",
];

fn swarm_config_from_kv(doc: &KvDoc) -> Result<SwarmConfig> {
    for key in doc.keys() {
        if !SWARM_KEYS.contains(&key) {
            return Err(CliError::usage(format!("unknown config key `{key}`")));
        }
    }
    let mut cfg = SwarmConfig::default();
    if let Some(v) = doc.parse_usize("particles")? {
        cfg.particles = v;
    }
    if let Some(v) = doc.parse_usize("steps")? {
        cfg.steps = v;
        // A custom step count needs a schedule covering it; keep the stock
        // one only when it still fits.
        if cfg.schedule.last().map(|b| b.end) != Some(v) {
            cfg.schedule = vec![NoiseBand {
                start: 1,
                end: v,
                sigma: 0.25,
            }];
        }
    }
    if let Some(v) = doc.parse_f64("delta")? {
        cfg.delta = v;
    }
    if let Some(v) = doc.parse_f64("speed")? {
        cfg.speed = v;
    }
    if let Some(v) = doc.parse_f64("radius")? {
        cfg.radius = v;
    }
    if let Some(v) = doc.parse_f64("box_side")? {
        cfg.box_side = v;
    }
    if let Some(v) = doc.get("schedule") {
        cfg.schedule = parse_schedule(v)?;
    }
    if let Some(v) = doc.parse_u64("seed")? {
        cfg.seed = v;
    }
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(cfg)
}

fn swarm_config_to_kv(cfg: &SwarmConfig) -> KvDoc {
    let mut doc = KvDoc::new();
    doc.push("particles", cfg.particles);
    doc.push("steps", cfg.steps);
    doc.push("delta", cfg.delta);
    doc.push("speed", cfg.speed);
    doc.push("radius", cfg.radius);
    doc.push("box_side", cfg.box_side);
    doc.push("schedule", schedule_to_string(&cfg.schedule));
    doc.push("seed", cfg.seed);
    doc
}

// ---------------------------------------------------------------- simulate

pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => swarm_config_from_kv(&KvDoc::read_file(path)?)?,
        None => SwarmConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    run_simulate(&cfg, &args.out)
}

fn run_simulate(cfg: &SwarmConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let traj = simulate(cfg).map_err(|e| CliError::usage(e.to_string()))?;
    csvio::write_trajectory(&out.join("trajectory.csv"), &traj)?;

    let mut manifest = KvDoc::new();
    manifest.push("command", "simulate");
    manifest.push("version", VERSION);
    manifest.push("out", out.display());
    let cfg_doc = swarm_config_to_kv(cfg);
    for key in cfg_doc.keys() {
        manifest.push(key, cfg_doc.get(key).unwrap_or_default());
    }
    manifest.write_file(&out.join("manifest.txt"))?;
    println!(
        "wrote {} steps x {} particles to {}",
        cfg.steps,
        cfg.particles,
        out.display()
    );
    Ok(())
}

// --------------------------------------------------------------- rasterize

pub struct RasterizeArgs {
    pub trajectory: PathBuf,
    pub out: PathBuf,
    pub resolution: usize,
    pub kernel_size: usize,
    pub kernel_std: f64,
    pub box_side: f64,
}

pub fn cmd_rasterize(args: &RasterizeArgs) -> Result<()> {
    let rcfg = RasterConfig {
        resolution: args.resolution,
        kernel_size: args.kernel_size,
        kernel_std: args.kernel_std,
        box_side: args.box_side,
    };
    rcfg.validate()
        .map_err(|e| CliError::usage(e.to_string()))?;

    // When the trajectory sits next to a simulate manifest, its recorded box
    // side must agree with ours.
    if let Some(parent) = args.trajectory.parent() {
        let sibling = parent.join("manifest.txt");
        if sibling.exists() {
            let doc = KvDoc::read_file(&sibling)?;
            if doc.get("command") == Some("simulate") {
                if let Some(recorded) = doc.parse_f64("box_side")? {
                    if recorded != args.box_side {
                        return Err(CliError::usage(format!(
                            "box side mismatch: trajectory manifest records {recorded}, raster config uses {}",
                            args.box_side
                        )));
                    }
                }
            }
        }
    }

    let traj = csvio::read_trajectory(&args.trajectory, args.box_side)?;
    for state in &traj.states {
        for p in &state.positions {
            if !(p[0] >= 0.0 && p[0] < args.box_side && p[1] >= 0.0 && p[1] < args.box_side) {
                return Err(CliError::data(format!(
                    "step {}: position ({}, {}) outside [0, {}) - box side mismatch?",
                    state.step, p[0], p[1], args.box_side
                )));
            }
        }
    }

    ensure_dir(&args.out)?;
    let frames = rasterize_trajectory(&traj, &rcfg)?;
    for (i, frame) in frames.iter().enumerate() {
        pgm::write(&args.out.join(pgm::frame_name(i + 1)), frame)?;
    }
    let d = frames_to_matrix(&frames)?;
    fmat::write(&args.out.join("frames.fmat"), &d)?;

    let mut manifest = KvDoc::new();
    manifest.push("command", "rasterize");
    manifest.push("version", VERSION);
    manifest.push("trajectory", args.trajectory.display());
    manifest.push("out", args.out.display());
    manifest.push("resolution", args.resolution);
    manifest.push("kernel_size", args.kernel_size);
    manifest.push("kernel_std", args.kernel_std);
    manifest.push("box_side", args.box_side);
    manifest.write_file(&args.out.join("manifest.txt"))?;
    println!(
        "wrote {} frames ({0} pgm + frames.fmat) to {}",
        frames.len(),
        args.out.display()
    );
    Ok(())
}

// ------------------------------------------------------------------ detect

pub struct DetectArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub alpha: Option<usize>,
    pub alpha_sweep: Option<(usize, usize)>,
    pub k: usize,
    pub suppression: Option<usize>,
    pub center: bool,
}

fn simple_glob_matches(pattern: &str, name: &str) -> bool {
    // '*' wildcards only.
    let parts: Vec<&str> = pattern.split('*').collect();
    let mut rest = name;
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        match rest.find(part) {
            Some(pos) => {
                if i == 0 && pos != 0 {
                    return false;
                }
                rest = &rest[pos + part.len()..];
            }
            None => return false,
        }
    }
    if let Some(last) = parts.last() {
        if !last.is_empty() && !name.ends_with(last) {
            return false;
        }
    }
    parts.first().map_or(true, |f| name.starts_with(f))
}

fn load_pgm_frames(dir: &Path, pattern: &str) -> Result<Vec<Frame>> {
    let mut names: Vec<String> = Vec::new();
    for entry in io_at(dir, std::fs::read_dir(dir))? {
        let entry = io_at(dir, entry)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if simple_glob_matches(pattern, &name) {
            names.push(name);
        }
    }
    names.sort();
    if names.is_empty() {
        return Err(CliError::data(format!(
            "no frames matching `{pattern}` in {}",
            dir.display()
        )));
    }
    names.iter().map(|n| pgm::read(&dir.join(n))).collect()
}

/// Loads a detection input: an `.fmat` file, a directory of `frame_*.pgm`
/// files, or a glob with `*` over PGM names.
pub fn load_frame_matrix(input: &Path) -> Result<FrameMatrix> {
    let text = input.to_string_lossy();
    if text.contains('*') {
        let dir = input.parent().filter(|p| !p.as_os_str().is_empty());
        let pattern = input
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::usage(format!("bad glob `{text}`")))?;
        let frames = load_pgm_frames(dir.unwrap_or(Path::new(".")), &pattern)?;
        return Ok(frames_to_matrix(&frames)?);
    }
    if input.is_dir() {
        let frames = load_pgm_frames(input, "frame_*.pgm")?;
        return Ok(frames_to_matrix(&frames)?);
    }
    match input.extension().and_then(|e| e.to_str()) {
        Some("fmat") => fmat::read(input),
        Some("pgm") => Err(CliError::usage(
            "detect needs a frame sequence: pass the directory or a frame_*.pgm glob",
        )),
        _ => fmat::read(input),
    }
}

fn run_detect_one(
    d: &FrameMatrix,
    alpha: usize,
    k: usize,
    suppression: usize,
    center: bool,
    out: &Path,
) -> Result<()> {
    let cfg = SpectraConfig { center };
    let rs = ratio_series_with(d, alpha, cfg)?;
    let ds = moving_abs_diff(&rs);
    let w = alpha.div_ceil(2);
    let ss = moving_sum(&ds, alpha).map_err(|e| match e {
        ptd_core::Error::SeriesTooShort { .. } => CliError::data(format!(
            "{} frames are too few for alpha = {alpha}: the moving sum needs more than {} differences (at least {} frames)",
            d.rows(),
            2 * w,
            2 * w + 2
        )),
        other => other.into(),
    })?;
    let report = rank_transitions(&ss, k, suppression)?;

    ensure_dir(out)?;
    io_at(
        &out.join("report.txt"),
        std::fs::write(out.join("report.txt"), csvio::report_document(&report)),
    )?;
    csvio::write_ratio_series(&out.join("ratio.csv"), &rs)?;
    csvio::write_sum_series(&out.join("sumseries.csv"), &ss)?;
    csvio::write_top_list(&out.join("top20.csv"), &report)?;
    let frames: Vec<usize> = (1..=rs.ratios.len()).collect();
    svg::write_line_plot(
        &out.join("ratio.svg"),
        &format!("singular value ratio per frame (alpha = {alpha})"),
        &frames,
        &rs.ratios,
    )?;
    let sum_x: Vec<usize> = (0..ss.values.len()).map(|i| ss.index_at(i)).collect();
    svg::write_line_plot(
        &out.join("sumseries.svg"),
        &format!("moving sum of ratio changes (alpha = {alpha})"),
        &sum_x,
        &ss.values,
    )?;
    for peak in &report.selected {
        println!(
            "alpha {alpha}: transition at frame {} (magnitude {:.6e})",
            peak.frame, peak.magnitude
        );
    }
    if report.truncated {
        println!("alpha {alpha}: warning: fewer than k = {k} peaks survived suppression");
    }
    Ok(())
}

pub fn cmd_detect(args: &DetectArgs) -> Result<()> {
    if args.alpha.is_none() == args.alpha_sweep.is_none() {
        return Err(CliError::usage(
            "pass exactly one of --alpha or --alpha-sweep",
        ));
    }
    if args.k < 1 {
        return Err(CliError::usage("k must be at least 1"));
    }
    let d = load_frame_matrix(&args.input)?;
    ensure_dir(&args.out)?;

    if let Some(alpha) = args.alpha {
        if alpha < 2 {
            return Err(CliError::usage("alpha must be at least 2"));
        }
        let suppression = args.suppression.unwrap_or(alpha);
        run_detect_one(&d, alpha, args.k, suppression, args.center, &args.out)?;
    } else if let Some((lo, hi)) = args.alpha_sweep {
        if lo < 2 || hi < lo {
            return Err(CliError::usage(format!(
                "bad sweep range {lo}..{hi}: need 2 <= lo <= hi"
            )));
        }
        for alpha in lo..=hi {
            let suppression = args.suppression.unwrap_or(alpha);
            let sub = args.out.join(format!("alpha_{alpha:02}"));
            run_detect_one(&d, alpha, args.k, suppression, args.center, &sub)?;
        }
    }

    let mut manifest = KvDoc::new();
    manifest.push("command", "detect");
    manifest.push("version", VERSION);
    manifest.push("input", args.input.display());
    manifest.push("out", args.out.display());
    if let Some(alpha) = args.alpha {
        manifest.push("alpha", alpha);
    }
    if let Some((lo, hi)) = args.alpha_sweep {
        manifest.push("alpha_sweep", format!("{lo}..{hi}"));
    }
    manifest.push("k", args.k);
    if let Some(s) = args.suppression {
        manifest.push("suppression", s);
    }
    manifest.push("center", args.center);
    manifest.write_file(&args.out.join("manifest.txt"))?;
    Ok(())
}

// ------------------------------------------------------------------ dimest

pub struct DimestArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub ranges: String,
    pub alpha: usize,
    pub dmax: usize,
    pub tau: f64,
}

fn parse_ranges(text: &str, rows: usize) -> Result<Vec<(usize, usize)>> {
    let mut ranges = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let (lo, hi) = part
            .split_once('-')
            .ok_or_else(|| CliError::usage(format!("range `{part}`: expected lo-hi")))?;
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("range `{part}`: bad start")))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("range `{part}`: bad end")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::usage(format!("range `{part}` is empty")));
        }
        if hi > rows {
            return Err(CliError::usage(format!(
                "range `{part}` exceeds the {rows} available frames"
            )));
        }
        ranges.push((lo, hi));
    }
    if ranges.is_empty() {
        return Err(CliError::usage("no ranges given"));
    }
    let mut sorted = ranges.clone();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[1].0 <= pair[0].1 {
            return Err(CliError::usage(format!(
                "ranges {}-{} and {}-{} overlap",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }
    Ok(ranges)
}

pub fn cmd_dimest(args: &DimestArgs) -> Result<()> {
    let d = load_frame_matrix(&args.input)?;
    let ranges = parse_ranges(&args.ranges, d.rows())?;
    ensure_dir(&args.out)?;

    let mut summary = String::new();
    summary.push_str(&format!(
        "alpha: {}\ndmax: {}\ntau: {}\n",
        args.alpha, args.dmax, args.tau
    ));
    for &(lo, hi) in &ranges {
        let g = geodesic_distances(&d, lo, hi, args.alpha)?;
        let curve = residual_curve_with(&g, args.dmax, args.tau)?;
        let name = format!("residual_{lo:04}-{hi:04}.csv");
        csvio::write_residual_curve(&args.out.join(&name), &curve)?;
        let line = format!(
            "range {lo}-{hi}: elbow={} kept={} dropped={} disconnected={}",
            curve.elbow, g.n, g.dropped, g.disconnected
        );
        println!("{line}");
        summary.push_str(&line);
        summary.push('\n');
    }
    io_at(
        &args.out.join("summary.txt"),
        std::fs::write(args.out.join("summary.txt"), summary),
    )?;

    let mut manifest = KvDoc::new();
    manifest.push("command", "dimest");
    manifest.push("version", VERSION);
    manifest.push("input", args.input.display());
    manifest.push("out", args.out.display());
    manifest.push("ranges", &args.ranges);
    manifest.push("alpha", args.alpha);
    manifest.push("dmax", args.dmax);
    manifest.push("tau", args.tau);
    manifest.write_file(&args.out.join("manifest.txt"))?;
    Ok(())
}

// ------------------------------------------------------------------ verify

pub struct VerifyArgs {
    pub suite: String,
    pub out: Option<PathBuf>,
}

struct SuiteReport {
    lines: Vec<String>,
    failures: usize,
}

impl SuiteReport {
    fn new() -> Self {
        SuiteReport {
            lines: Vec::new(),
            failures: 0,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        self.lines.push(format!(
            "{} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        ));
    }
}

fn verify_theorem(report: &mut SuiteReport) {
    for &r in &[0.5f64, 1.0, 2.0] {
        for &t in &[0.05f64, 0.1, 0.2] {
            let cloud = sample_arc(&ArcSpec::new(r, t, 2001).unwrap());
            let cov = empirical_covariance(&cloud).unwrap();
            let ratio = (cov.lambda2 / cov.lambda1).sqrt();
            let linear = ratio_small_angle(t);
            let fourth = ratio_approx(t);
            let err_linear = (ratio - linear).abs() / linear;
            let err_fourth = (ratio - fourth).abs() / fourth;
            report.check(
                &format!("arc ratio r={r} T={t} vs T/sqrt(15)"),
                err_linear <= 0.02,
                format!("relative error {err_linear:.3e} (tolerance 2e-2)"),
            );
            report.check(
                &format!("arc ratio r={r} T={t} vs fourth-order form"),
                err_fourth <= 0.005,
                format!("relative error {err_fourth:.3e} (tolerance 5e-3)"),
            );
        }
    }
    let full = analytic_arc_covariance(1.0, std::f64::consts::PI).unwrap();
    let analytic_ratio = full.lambda2 / full.lambda1;
    report.check(
        "full circle analytic lambda2/lambda1",
        (analytic_ratio - 1.0).abs() <= 1e-12,
        format!("ratio {analytic_ratio}"),
    );
    let cloud = sample_arc(&ArcSpec::new(1.0, std::f64::consts::PI, 2001).unwrap());
    let emp = empirical_covariance(&cloud).unwrap();
    let emp_ratio = emp.lambda2 / emp.lambda1;
    report.check(
        "full circle empirical lambda2/lambda1",
        (emp_ratio - 1.0).abs() <= 1e-3,
        format!("ratio {emp_ratio}"),
    );
}

fn verify_shape(report: &mut SuiteReport) {
    match shape_operator(&Saddle, 1.0, 0.0) {
        Ok(res) => {
            let expect = [[0.6, 0.0], [0.0, -6.0 / 10.0f64.sqrt()]];
            let mut max_err = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    max_err = max_err.max((res.shape[i][j] - expect[i][j]).abs());
                }
            }
            report.check(
                "saddle shape operator at (1, 0, 1)",
                max_err <= 1e-4,
                format!(
                    "S = [[{:.6}, {:.6}], [{:.6}, {:.6}]] vs diag(3/5, -6/sqrt(10)), max entry error {max_err:.3e}",
                    res.shape[0][0], res.shape[0][1], res.shape[1][0], res.shape[1][1]
                ),
            );
            let eig_ok = (res.curvatures[0] - 0.6).abs() <= 1e-4
                && (res.curvatures[1] + 6.0 / 10.0f64.sqrt()).abs() <= 1e-4
                && res.tangent_directions[0][0].abs() > 0.999_9
                && res.tangent_directions[1][1].abs() > 0.999_9;
            report.check(
                "saddle eigenpairs",
                eig_ok,
                format!(
                    "curvatures ({:.6}, {:.6}), directions ({:.4}, {:.4}) and ({:.4}, {:.4})",
                    res.curvatures[0],
                    res.curvatures[1],
                    res.tangent_directions[0][0],
                    res.tangent_directions[0][1],
                    res.tangent_directions[1][0],
                    res.tangent_directions[1][1]
                ),
            );
        }
        Err(e) => report.check("saddle shape operator at (1, 0, 1)", false, e.to_string()),
    }
    match shape_operator(&Plane, 0.7, -1.3) {
        Ok(res) => {
            let max_entry = res
                .shape
                .iter()
                .flatten()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            report.check(
                "plane is flat",
                max_entry <= 1e-9,
                format!("max |entry| {max_entry:.3e}"),
            );
        }
        Err(e) => report.check("plane is flat", false, e.to_string()),
    }
    match shape_operator(&Sphere, std::f64::consts::FRAC_PI_2, 0.4) {
        Ok(res) => {
            let ok =
                (res.curvatures[0] + 1.0).abs() <= 1e-4 && (res.curvatures[1] + 1.0).abs() <= 1e-4;
            report.check(
                "unit sphere equator curvatures",
                ok,
                format!(
                    "curvatures ({:.6}, {:.6}) with outward normal",
                    res.curvatures[0], res.curvatures[1]
                ),
            );
        }
        Err(e) => report.check("unit sphere equator curvatures", false, e.to_string()),
    }
}

fn verify_sombrero(report: &mut SuiteReport, out: Option<&Path>) -> Result<()> {
    let cloud = generate_sombrero(2000, 7).map_err(CliError::from)?;
    let mut counts = [0usize; 3];
    let mut max_height_err = 0.0f64;
    let mut locus_ok = true;
    for i in 0..cloud.len() {
        let p = cloud.point(i);
        let r2 = p[0] * p[0] + p[1] * p[1];
        max_height_err = max_height_err.max((p[2] - (4.0 - r2).max(0.0)).abs());
        match cloud.label(i) {
            Label::Crown => counts[0] += 1,
            Label::Brim => counts[1] += 1,
            Label::Locus => {
                counts[2] += 1;
                let radial = r2.sqrt();
                if (radial - 2.0).abs() > 0.1 + 1e-9 || p[2] > 0.41 {
                    locus_ok = false;
                }
            }
            Label::None => locus_ok = false,
        }
    }
    report.check(
        "surface constraint x3 = max(0, 4 - R^2)",
        max_height_err <= 1e-12,
        format!("max |error| {max_height_err:.3e}"),
    );
    report.check(
        "label partition",
        counts.iter().sum::<usize>() == 2000 && counts.iter().all(|&c| c > 0),
        format!("crown {} brim {} locus {}", counts[0], counts[1], counts[2]),
    );
    report.check(
        "locus band bounds",
        locus_ok,
        "all locus points within the band and below height 0.41".to_string(),
    );
    let again = generate_sombrero(2000, 7).map_err(CliError::from)?;
    report.check(
        "determinism",
        cloud == again,
        "same seed, same cloud".to_string(),
    );

    if let Some(dir) = out {
        csvio::write_point_cloud(&dir.join("sombrero.csv"), &cloud)?;
        for (label, name) in [
            (Label::Brim, "brim"),
            (Label::Crown, "crown"),
            (Label::Locus, "locus"),
        ] {
            let sub = cloud.filter_by_label(label);
            let rows: Vec<Vec<f64>> = (0..sub.len()).map(|i| sub.point(i).to_vec()).collect();
            let d = FrameMatrix::from_rows(&rows).map_err(CliError::from)?;
            fmat::write(&dir.join(format!("{name}.fmat")), &d)?;
        }
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let mut report = SuiteReport::new();
    if let Some(out) = &args.out {
        ensure_dir(out)?;
    }
    match args.suite.as_str() {
        "theorem" => verify_theorem(&mut report),
        "shape" => verify_shape(&mut report),
        "sombrero" => verify_sombrero(&mut report, args.out.as_deref())?,
        other => {
            return Err(CliError::usage(format!(
                "unknown suite `{other}` (expected theorem, shape, or sombrero)"
            )))
        }
    }
    let text = report.lines.join("\n") + "\n";
    print!("{text}");
    if let Some(out) = &args.out {
        io_at(
            &out.join("report.txt"),
            std::fs::write(out.join("report.txt"), &text),
        )?;
        let mut manifest = KvDoc::new();
        manifest.push("command", "verify");
        manifest.push("version", VERSION);
        manifest.push("suite", &args.suite);
        manifest.push("out", out.display());
        manifest.write_file(&out.join("manifest.txt"))?;
    }
    if report.failures > 0 {
        return Err(CliError::data(format!(
            "{} verification check(s) failed",
            report.failures
        )));
    }
    Ok(())
}

// ------------------------------------------------------------------- rerun

pub fn cmd_rerun(manifest_path: &Path) -> Result<()> {
    let doc = KvDoc::read_file(manifest_path)?;
    let command = doc.require("command")?;
    match command {
        "simulate" => {
            let out = PathBuf::from(doc.require("out")?);
            // Rebuild the swarm config from the manifest's own keys.
            let mut cfg_doc = KvDoc::new();
            for key in SWARM_KEYS {
                if let Some(v) = doc.get(key) {
                    cfg_doc.push(key, v);
                }
            }
            let cfg = swarm_config_from_kv(&cfg_doc)?;
            run_simulate(&cfg, &out)
        }
        "rasterize" => cmd_rasterize(&RasterizeArgs {
            trajectory: PathBuf::from(doc.require("trajectory")?),
            out: PathBuf::from(doc.require("out")?),
            resolution: doc
                .parse_usize("resolution")?
                .ok_or_else(|| CliError::usage("missing key `resolution`"))?,
            kernel_size: doc
                .parse_usize("kernel_size")?
                .ok_or_else(|| CliError::usage("missing key `kernel_size`"))?,
            kernel_std: doc
                .parse_f64("kernel_std")?
                .ok_or_else(|| CliError::usage("missing key `kernel_std`"))?,
            box_side: doc
                .parse_f64("box_side")?
                .ok_or_else(|| CliError::usage("missing key `box_side`"))?,
        }),
        "detect" => {
            let sweep = match doc.get("alpha_sweep") {
                Some(text) => {
                    let (lo, hi) = text
                        .split_once("..")
                        .ok_or_else(|| CliError::usage(format!("bad alpha_sweep `{text}`")))?;
                    Some((
                        lo.parse().map_err(|_| CliError::usage("bad sweep lo"))?,
                        hi.parse().map_err(|_| CliError::usage("bad sweep hi"))?,
                    ))
                }
                None => None,
            };
            cmd_detect(&DetectArgs {
                input: PathBuf::from(doc.require("input")?),
                out: PathBuf::from(doc.require("out")?),
                alpha: doc.parse_usize("alpha")?,
                alpha_sweep: sweep,
                k: doc
                    .parse_usize("k")?
                    .ok_or_else(|| CliError::usage("missing key `k`"))?,
                suppression: doc.parse_usize("suppression")?,
                center: doc.get("center") == Some("true"),
            })
        }
        "dimest" => cmd_dimest(&DimestArgs {
            input: PathBuf::from(doc.require("input")?),
            out: PathBuf::from(doc.require("out")?),
            ranges: doc.require("ranges")?.to_string(),
            alpha: doc
                .parse_usize("alpha")?
                .ok_or_else(|| CliError::usage("missing key `alpha`"))?,
            dmax: doc
                .parse_usize("dmax")?
                .ok_or_else(|| CliError::usage("missing key `dmax`"))?,
            tau: doc
                .parse_f64("tau")?
                .ok_or_else(|| CliError::usage("missing key `tau`"))?,
        }),
        "verify" => cmd_verify(&VerifyArgs {
            suite: doc.require("suite")?.to_string(),
            out: doc.get("out").map(PathBuf::from),
        }),
        other => Err(CliError::usage(format!(
            "manifest names unknown command `{other}`"
        ))),
    }
}
