//! `gazeforge` command-line front end.
//!
//! Exit status: 0 on success, 1 when processing fails, 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use gazeforge::detect::parse_cascade;
use gazeforge::gazefeat::{
    extract_features, read_dataset, synth_dataset, synth_trace, write_dataset_to, FeatureConfig, GazeDataset, TraceKind,
};
use gazeforge::intent::{
    feature_histograms, infer, read_inferences, relative_interest_table, render_face_scene, run_pipeline, write_frames,
    write_histograms, write_importance, write_inferences, write_relative_interest, Cascades, FaceSceneSpec, PipelineConfig,
};
use gazeforge::learn::{
    evaluate, gini_importance, grid_search, make_cv_plan, train, CvPlan, Family, Params, TrainedModel,
};
use gazeforge::pupiltrack::{read_trace, write_trace, Eye, GazeTrace};
use gazeforge::Label;

#[derive(Parser)]
#[command(name = "gazeforge", version, about = "Gaze-intention analysis from webcam frames or gaze traces")]
struct Cli {
    /// Seed for every random choice (synthesis, CV shuffles, forests).
    #[arg(long, global = true, env = "GAZEFORGE_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic traces, datasets or face frames.
    Synth(SynthArgs),
    /// Frames or a trace pair to one feature row.
    Featurize(FeaturizeArgs),
    /// Fit a classifier on a labeled feature CSV.
    Train(TrainArgs),
    /// Cross-validated evaluation report.
    Eval(EvalArgs),
    /// Label feature rows or a trace pair with a trained model.
    Infer(InferArgs),
    /// Relative interest, feature histograms or forest importances.
    Report(ReportArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[command(subcommand)]
    what: SynthWhat,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Reading,
    Viewing,
}

#[derive(Subcommand)]
enum SynthWhat {
    /// One pair of trace CSVs (`trace_right.csv`, `trace_left.csv`).
    Traces {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Labeled feature CSV of reading (TEXT) and viewing (IMAGE) traces.
    Dataset {
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rendered face frames plus `truth.csv` with the scripted iris centers.
    Frames {
        #[arg(long, default_value_t = 150)]
        frames: usize,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["frames", "right"])))]
struct FeaturizeArgs {
    /// Directory of PGM/PNG frames, processed in file-name order.
    #[arg(long, requires = "face_cascade")]
    frames: Option<PathBuf>,
    #[arg(long)]
    face_cascade: Option<PathBuf>,
    #[arg(long)]
    right_eye_cascade: Option<PathBuf>,
    #[arg(long)]
    left_eye_cascade: Option<PathBuf>,
    /// Write per-frame artifacts here.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Right-eye trace CSV (`frame,x,y,valid`).
    #[arg(long, requires = "left")]
    right: Option<PathBuf>,
    #[arg(long, requires = "right")]
    left: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    #[arg(long, value_parser = parse_label)]
    label: Option<Label>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the row to an existing feature CSV instead of replacing it.
    #[arg(long, requires = "out")]
    append: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// knn, gnb, logreg, svm or rf.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Regularization strength for svm and logreg.
    #[arg(long)]
    c: Option<f64>,
    /// Neighbours for knn.
    #[arg(long)]
    k: Option<usize>,
    /// Trees for rf.
    #[arg(long)]
    trees: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Pick parameters by cross-validated accuracy over the family's grid.
    #[arg(long)]
    grid: bool,
    /// Folds x repeats for `--grid`.
    #[arg(long, value_parser = parse_cv, default_value = "10x5")]
    cv: (usize, usize),
    /// Grid-search table as JSON.
    #[arg(long, requires = "grid")]
    grid_report: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = parse_cv, default_value = "10x5")]
    cv: (usize, usize),
    /// Leave wall-clock timing out of the report.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["data", "right"])))]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV; labels, if any, are ignored.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, requires = "left")]
    right: Option<PathBuf>,
    #[arg(long, requires = "right")]
    left: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    /// Group tag attached to every inference.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["inferences", "dataset", "model"])))]
struct ReportArgs {
    /// Inference CSV → relative-interest table per group.
    #[arg(long)]
    inferences: Option<PathBuf>,
    /// Feature CSV → per-feature, per-class histograms.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 20, requires = "dataset")]
    bins: usize,
    /// Random-forest model → feature importances.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_label(s: &str) -> Result<Label, String> {
    s.parse::<Label>().map_err(|e| e.to_string())
}

fn parse_cv(s: &str) -> Result<(usize, usize), String> {
    let (k, r) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected FOLDSxREPEATS, got `{s}`"))?;
    let k = k.trim().parse().map_err(|_| format!("bad fold count `{k}`"))?;
    let r = r.trim().parse().map_err(|_| format!("bad repeat count `{r}`"))?;
    Ok((k, r))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Synth(a) => synth(a.what, seed),
        Command::Featurize(a) => featurize(a),
        Command::Train(a) => train_cmd(a, seed),
        Command::Eval(a) => eval_cmd(a, seed),
        Command::Infer(a) => infer_cmd(a),
        Command::Report(a) => report(a),
    }
}

/// Runs `body` against the file at `out`, or stdout.
fn emit(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn load_dataset(path: &Path) -> Result<GazeDataset> {
    read_dataset(path).with_context(|| format!("reading dataset {}", path.display()))
}

fn labeled(ds: &GazeDataset, path: &Path) -> Result<(Vec<Vec<f64>>, Vec<Label>)> {
    if ds.is_empty() {
        bail!("dataset {} has no rows", path.display());
    }
    let labels = ds.labels().ok_or_else(|| anyhow!("dataset {} has unlabeled rows", path.display()))?;
    Ok((ds.features(), labels))
}

fn load_trace(path: &Path, eye: Eye, fps: f64) -> Result<GazeTrace> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_trace(io::BufReader::new(file), eye, fps).with_context(|| format!("reading trace {}", path.display()))
}

fn feature_config(fps: f64) -> FeatureConfig {
    let mut cfg = FeatureConfig::default();
    cfg.fixation.fps = fps;
    cfg
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn synth(what: SynthWhat, seed: u64) -> Result<()> {
    match what {
        SynthWhat::Traces { kind, duration, fps, out } => {
            let kind = match kind {
                KindArg::Reading => TraceKind::Reading,
                KindArg::Viewing => TraceKind::Viewing,
            };
            let (left, right) = synth_trace(kind, duration, fps, seed);
            for (name, trace) in [("trace_right.csv", &right), ("trace_left.csv", &left)] {
                emit(Some(&out.join(name)), |w| Ok(write_trace(trace, w)?))?;
            }
        }
        SynthWhat::Dataset { per_class, duration, fps, out } => {
            let ds = synth_dataset(per_class, duration, fps, seed, &feature_config(fps))?;
            emit(out.as_deref(), |w| Ok(write_dataset_to(&ds, w)?))?;
        }
        SynthWhat::Frames { frames, fps, out } => {
            let scene = render_face_scene(&FaceSceneSpec { frames, fps, seed, ..FaceSceneSpec::default() });
            write_frames(&scene.frames, &out)?;
            emit(Some(&out.join("truth.csv")), |w| {
                writeln!(w, "frame,right_x,right_y,left_x,left_y,blink")?;
                for i in 0..scene.frames.len() {
                    let (r, l) = (scene.truth_right[i], scene.truth_left[i]);
                    writeln!(w, "{i},{},{},{},{},{}", r.0, r.1, l.0, l.1, scene.blink[i] as u8)?;
                }
                Ok(())
            })?;
        }
    }
    Ok(())
}

fn load_cascade(path: &Path) -> Result<gazeforge::detect::HaarCascade> {
    let xml = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_cascade(&xml).with_context(|| format!("parsing cascade {}", path.display()))
}

fn featurize(a: FeaturizeArgs) -> Result<()> {
    let fv = if let Some(frames) = &a.frames {
        let face = a.face_cascade.as_deref().expect("clap enforces --face-cascade");
        let cascades = Cascades {
            face: load_cascade(face)?,
            right_eye: a.right_eye_cascade.as_deref().map(load_cascade).transpose()?,
            left_eye: a.left_eye_cascade.as_deref().map(load_cascade).transpose()?,
        };
        let cfg = PipelineConfig { fps: a.fps, dump_dir: a.dump.clone(), ..PipelineConfig::default() };
        run_pipeline(frames, &cascades, &cfg)?.features
    } else {
        let (right, left) = (a.right.as_deref().unwrap(), a.left.as_deref().unwrap());
        let right = load_trace(right, Eye::Right, a.fps)?;
        let left = load_trace(left, Eye::Left, a.fps)?;
        extract_features(&left, &right, &feature_config(a.fps))?
    };
    let fv = match a.label {
        Some(l) => fv.with_label(l),
        None => fv,
    };
    let mut ds = match (&a.out, a.append) {
        (Some(path), true) if path.exists() => load_dataset(path)?,
        _ => GazeDataset::default(),
    };
    ds.rows.push(fv);
    emit(a.out.as_deref(), |w| Ok(write_dataset_to(&ds, w)?))
}

fn params_for(m: &ModelArgs, seed: u64) -> Result<Params> {
    let mut p = Params::default_for(m.family, seed);
    if let Some(c) = m.c {
        match p {
            Params::Logreg { .. } | Params::SvmLinear { .. } => p = p.with_c(c),
            _ => bail!("--c applies to svm and logreg only"),
        }
    }
    if let Some(k) = m.k {
        match &mut p {
            Params::Knn { k: slot } => *slot = k,
            _ => bail!("--k applies to knn only"),
        }
    }
    if let Some(n) = m.trees {
        match &mut p {
            Params::RandomForest { n_trees, .. } => *n_trees = n,
            _ => bail!("--trees applies to rf only"),
        }
    }
    Ok(p)
}

fn plan(labels: &[Label], (k, repeats): (usize, usize), seed: u64) -> Result<CvPlan> {
    make_cv_plan(labels, k, repeats, seed).with_context(|| format!("building {k}x{repeats} cross-validation plan"))
}

fn train_cmd(a: TrainArgs, seed: u64) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let (rows, labels) = labeled(&ds, &a.data)?;
    let params = if a.grid {
        let grid = match (a.model.c, a.model.k, a.model.trees) {
            (None, None, None) => Params::default_grid(a.model.family, seed),
            _ => vec![params_for(&a.model, seed)?],
        };
        let search = grid_search(&grid, &rows, &labels, &plan(&labels, a.cv, seed)?)?;
        for g in &search.table {
            eprintln!("grid {}: accuracy {:.4} ± {:.4}", serde_json::to_string(&g.params)?, g.accuracy.mean, g.accuracy.std);
        }
        if let Some(path) = &a.grid_report {
            emit(Some(path), |w| {
                serde_json::to_writer_pretty(&mut *w, &search)?;
                writeln!(w)?;
                Ok(())
            })?;
        }
        search.best
    } else {
        params_for(&a.model, seed)?
    };
    let model = train(&params, &rows, &labels)?;
    let correct = rows
        .iter()
        .zip(&labels)
        .map(|(r, &l)| model.predict(r).map(|p| p == l))
        .collect::<Result<Vec<bool>, _>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count();
    eprintln!("training accuracy: {:.4} ({correct}/{})", correct as f64 / rows.len() as f64, rows.len());
    let json = model.to_json()?;
    emit(a.out.as_deref(), |w| {
        writeln!(w, "{json}")?;
        Ok(())
    })
}

fn eval_cmd(a: EvalArgs, seed: u64) -> Result<()> {
    let ds = load_dataset(&a.data)?;
    let (rows, labels) = labeled(&ds, &a.data)?;
    let params = params_for(&a.model, seed)?;
    let report = evaluate(&params, &rows, &labels, &plan(&labels, a.cv, seed)?, !a.no_timing)?;
    eprintln!(
        "{}: accuracy {:.4} ± {:.4}, AUC {:.4} ± {:.4}",
        report.family, report.accuracy.mean, report.accuracy.std, report.auc.mean, report.auc.std
    );
    emit(a.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    TrainedModel::from_json(&text).with_context(|| format!("parsing model {}", path.display()))
}

fn infer_cmd(a: InferArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let group = a.group.as_deref();
    let inferences = if let Some(data) = &a.data {
        let ds = load_dataset(data)?;
        if ds.is_empty() {
            bail!("dataset {} has no rows", data.display());
        }
        let name = file_name(data);
        ds.rows
            .iter()
            .enumerate()
            .map(|(i, fv)| infer(&model, fv, &format!("{name}:{}", i + 1), group))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let (rp, lp) = (a.right.as_deref().unwrap(), a.left.as_deref().unwrap());
        let right = load_trace(rp, Eye::Right, a.fps)?;
        let left = load_trace(lp, Eye::Left, a.fps)?;
        let fv = extract_features(&left, &right, &feature_config(a.fps))?;
        vec![infer(&model, &fv, &file_name(rp), group)?]
    };
    emit(a.out.as_deref(), |w| Ok(write_inferences(&inferences, w)?))
}

fn report(a: ReportArgs) -> Result<()> {
    if let Some(path) = &a.inferences {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let infs = read_inferences(io::BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
        if infs.is_empty() {
            bail!("{} holds no inferences", path.display());
        }
        let table = relative_interest_table(&infs);
        emit(a.out.as_deref(), |w| Ok(write_relative_interest(&table, w)?))
    } else if let Some(path) = &a.dataset {
        let hists = feature_histograms(&load_dataset(path)?, a.bins)?;
        emit(a.out.as_deref(), |w| Ok(write_histograms(&hists, w)?))
    } else {
        let path = a.model.as_deref().unwrap();
        let importance = gini_importance(&load_model(path)?)?;
        emit(a.out.as_deref(), |w| Ok(write_importance(&importance, w)?))
    }
}
