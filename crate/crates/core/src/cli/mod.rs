//! Command-line front end: argument parsing, run directories and the
//! subcommand drivers. The `roadkg` binary only calls [`run`].

mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

pub use config::{LlmConfig, Mode, Preset, RunConfig};

use crate::bayes::{Calibration, Prediction};
use crate::error::{Error, Result};
use crate::eval::{
    classification_report, discretize_pedestrians, discretize_vehicles, embedded_rules, fit_frames, horizon_sweep,
    labeled_predictions, split_groups, FittedModel, VEHICLE_REPORT_LABELS,
};
use crate::explain::{
    build_query, chunk_corpus, corpus_from_frames, generate, render_template, Embedder, HashingEmbedder,
    HttpBackend, LlmBackend, PromptBundle, RemoteEmbedder, StubBackend, VectorStore,
};
use crate::fuzzy::attach_rules;
use crate::ingest::{
    generate_synthetic, read_pedestrian_features, read_vehicle_tracks, write_pedestrian_csv, write_vehicle_csv,
    PedestrianFrameRecord, ScenarioCounts, ScenarioSpec, SyntheticData, VehicleFrameRecord,
};
use crate::kg::{build_graph, export_triples, GraphMode, LinguisticFrame, Ontology, TripleStore};
use crate::kge::{load_checkpoint, save_checkpoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "roadkg", version, about = "Knowledge-graph behavior prediction for road users")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML). Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Parent directory of run directories.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Input CSV (vehicle tracks or pedestrian features).
    #[arg(long, global = true, value_name = "FILE")]
    pub data: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub ontology: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub thresholds: Option<PathBuf>,
    /// Fuzzy rules; pedestrian graphs use them when given.
    #[arg(long, global = true, value_name = "FILE")]
    pub rules: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    /// Plain-text corpus for retrieval.
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Prediction horizons in seconds, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "SECONDS")]
    pub horizons: Option<Vec<f64>>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretize the data and write the knowledge graph.
    BuildKg,
    /// Train embeddings on the training tracks and save a checkpoint.
    Train(TrainArgs),
    /// Posterior over labels for one frame or every frame of --data.
    Predict(PredictArgs),
    /// Train on a track split and report on held-out tracks, or score a checkpoint.
    Evaluate(TrainArgs),
    /// Write a synthetic data set with planted rules.
    Synth(SynthArgs),
    /// Retrieval-augmented answer to a free-text question.
    Explain(ExplainArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Maximum number of epochs.
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Frame as `RELATION=instance,...`.
    #[arg(long, value_name = "ASSIGNMENTS")]
    pub frame: Option<String>,
    /// Also produce a retrieval-augmented explanation.
    #[arg(long)]
    pub rag: bool,
    /// Retrieved chunks per query.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Frames per label.
    #[arg(long, default_value_t = 300)]
    pub per_label: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub query: String,
    #[arg(long)]
    pub k: Option<usize>,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    error: Error,
}

fn usage(error: Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::Config(_) => EXIT_USAGE,
            _ => EXIT_RUNTIME,
        };
        Failure { code, error }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code: 0 on success, 1 on a runtime failure, 2 on a usage or configuration
/// error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging(cli.global.verbose);
    match dispatch(&cli) {
        Ok(dir) => {
            println!("{}", dir.display());
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.error);
            f.code
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

/// File config merged with flags.
pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut c = match &g.config {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            Error::Io { .. } => Error::Config(e.to_string()),
            e => e,
        })?,
        None => RunConfig::default(),
    };
    if let Some(m) = g.mode {
        c.mode = m;
    }
    if let Some(s) = g.seed {
        c.seed = s;
    }
    if let Some(o) = &g.out {
        c.out = o.clone();
    }
    if let Some(h) = &g.horizons {
        c.horizons = h.clone();
    }
    let paths = [
        (&g.data, &mut c.data),
        (&g.ontology, &mut c.ontology),
        (&g.thresholds, &mut c.thresholds),
        (&g.rules, &mut c.rules),
        (&g.checkpoint, &mut c.checkpoint),
        (&g.corpus, &mut c.corpus),
    ];
    for (flag, slot) in paths {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    c.validate()?;
    Ok(c)
}

/// `{out}/{timestamp}-seed{seed}`, suffixed when taken.
pub fn create_run_dir(out: &Path, seed: u64) -> Result<PathBuf> {
    let stamp = chrono::Local::now().format("%Y%m%dT%H%M%S");
    let base = format!("{stamp}-seed{seed}");
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for n in 0.. {
        let name = if n == 0 { base.clone() } else { format!("{base}-{n}") };
        let dir = out.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    unreachable!("run directory suffixes exhausted")
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    write_file(path, text + "\n")
}

fn dispatch(cli: &Cli) -> std::result::Result<PathBuf, Failure> {
    let mut cfg = resolve_config(&cli.global).map_err(usage)?;
    if let Command::Train(t) | Command::Evaluate(t) = &cli.command {
        if let Some(p) = t.preset {
            let mut pipe = p.pipeline(cfg.mode);
            if let Some(old) = &cfg.pipeline {
                pipe.split.train_fraction = old.split.train_fraction;
            }
            cfg.pipeline = Some(pipe);
        }
        if let Some(n) = t.epochs {
            let mut pipe = cfg.pipeline();
            pipe.train.max_epochs = n;
            cfg.pipeline = Some(pipe);
        }
        cfg.pipeline().validate().map_err(usage)?;
    }
    let dir = create_run_dir(&cfg.out, cfg.seed)?;
    info!("writing to {}", dir.display());
    match &cli.command {
        Command::BuildKg => build_kg(&cfg, &dir)?,
        Command::Train(_) => train_cmd(&cfg, &dir)?,
        Command::Predict(a) => predict_cmd(&cfg, a, &dir)?,
        Command::Evaluate(_) => evaluate_cmd(&cfg, &dir)?,
        Command::Synth(a) => synth_cmd(&cfg, a, &dir)?,
        Command::Explain(a) => explain_cmd(&cfg, a, &dir)?,
    }
    Ok(dir)
}

/// Discretized input with the grouping key (track or pedestrian id) of each frame.
struct Dataset {
    frames: Vec<LinguisticFrame>,
    groups: Vec<String>,
    vehicles: Vec<VehicleFrameRecord>,
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.data()?;
    let thresholds = cfg.thresholds()?;
    thresholds.validate(&cfg.ontology()?)?;
    match cfg.mode {
        Mode::Vehicle => {
            let recs = read_vehicle_tracks(path, &cfg.horizons)?;
            if recs.is_empty() {
                return Err(Error::InvalidInput(format!("{} yields no samples", path.display())));
            }
            Ok(Dataset {
                frames: discretize_vehicles(&recs, &thresholds)?,
                groups: recs.iter().map(|r| r.track_id.clone()).collect(),
                vehicles: recs,
            })
        }
        Mode::Pedestrian => {
            let recs: Vec<PedestrianFrameRecord> = read_pedestrian_features(path)?;
            if recs.is_empty() {
                return Err(Error::InvalidInput(format!("{} holds no rows", path.display())));
            }
            Ok(Dataset {
                frames: discretize_pedestrians(&recs, &thresholds)?,
                groups: recs.iter().map(|r| r.ped_id.clone()).collect(),
                vehicles: Vec::new(),
            })
        }
    }
}

fn graph_mode(cfg: &RunConfig) -> GraphMode {
    match (cfg.mode, cfg.rules.is_some()) {
        (Mode::Vehicle, _) => GraphMode::Vehicle,
        (Mode::Pedestrian, false) => GraphMode::PedFeat,
        (Mode::Pedestrian, true) => GraphMode::PedFeatRules,
    }
}

fn write_store(store: &TripleStore, dir: &Path) -> Result<()> {
    export_triples(store, dir.join("triples.tsv"))?;
    let s = store.stats();
    write_json(&dir.join("stats.json"), &s)?;
    write_file(
        &dir.join("stats.txt"),
        format!("triples\t{}\nentities\t{}\nrelations\t{}\n", s.triples, s.entities, s.relations),
    )
}

fn build_kg(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let ontology = cfg.ontology()?;
    let data = load_dataset(cfg)?;
    let mode = graph_mode(cfg);
    let mut store = build_graph(&data.frames, &ontology, mode)?;
    if mode.uses_rules() {
        store = attach_rules(store, &cfg.rules(&ontology)?, &data.frames, &ontology)?;
    }
    write_store(&store, dir)?;
    let s = store.stats();
    eprintln!("{} triples, {} entities, {} relations", s.triples, s.entities, s.relations);
    Ok(())
}

/// Frames of the first `train_fraction` of groups and of the rest.
fn split_dataset(data: &Dataset, train_fraction: f64) -> (Vec<LinguisticFrame>, Vec<LinguisticFrame>) {
    let indexed: Vec<usize> = (0..data.frames.len()).collect();
    let (a, b) = split_groups(&indexed, |&i| data.groups[i].clone(), train_fraction);
    let pick = |v: Vec<&usize>| v.into_iter().map(|&i| data.frames[i].clone()).collect();
    (pick(a), pick(b))
}

fn fit(cfg: &RunConfig, frames: &[LinguisticFrame]) -> Result<FittedModel> {
    let ontology = cfg.ontology()?;
    let rules = cfg.rules(&ontology)?;
    fit_frames(frames, &ontology, graph_mode(cfg), &rules, &cfg.pipeline())
}

fn save_model(model: &FittedModel, cfg: &RunConfig, dir: &Path) -> Result<()> {
    let pipe = cfg.pipeline();
    save_checkpoint(&model.table, &pipe.train, dir.join("checkpoint.rkge"))?;
    write_json(&dir.join("train_report.json"), &model.report)?;
    write_json(&dir.join("calibration.json"), &model.calibration)?;
    write_json(&dir.join("stats.json"), &model.stats)?;
    let resolved = RunConfig {
        pipeline: Some(pipe),
        ..cfg.clone()
    };
    write_file(&dir.join("config.toml"), resolved.to_toml())
}

fn train_cmd(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let data = load_dataset(cfg)?;
    let (train, test) = split_dataset(&data, cfg.pipeline().split.train_fraction);
    info!("{} training frames, {} held out", train.len(), test.len());
    let model = fit(cfg, &train)?;
    save_model(&model, cfg, dir)?;
    eprintln!(
        "trained {} epochs on {} triples (best validation MRR {})",
        model.report.epochs_run,
        model.stats.triples,
        model.report.best_metric.map_or("n/a".to_string(), |m| format!("{m:.4}"))
    );
    Ok(())
}

/// Checkpointed model with its calibration and the current rules.
fn load_model(cfg: &RunConfig) -> Result<FittedModel> {
    let path = cfg
        .checkpoint
        .as_deref()
        .ok_or_else(|| Error::Config("no checkpoint given (--checkpoint)".into()))?;
    let (table, _) = load_checkpoint(path)?;
    let cal_path = path.with_file_name("calibration.json");
    let calibration = if cal_path.is_file() {
        let text = fs::read_to_string(&cal_path).map_err(|e| Error::io(&cal_path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Checkpoint(format!("{}: {e}", cal_path.display())))?
    } else {
        Calibration::default()
    };
    let ontology = cfg.ontology()?;
    let rules = if graph_mode(cfg).uses_rules() {
        embedded_rules(&cfg.rules(&ontology)?, &table)
    } else {
        Vec::new()
    };
    Ok(FittedModel {
        ontology,
        rules,
        table,
        calibration,
        report: Default::default(),
        stats: Default::default(),
        valid: Vec::new(),
    })
}

/// `REL=inst,REL=inst` into a validated unlabeled frame.
pub fn parse_frame(spec: &str, ontology: &Ontology) -> Result<LinguisticFrame> {
    let mut frame = LinguisticFrame::new("query", 0);
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (rel, inst) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("frame item `{part}` is not RELATION=instance")))?;
        frame = frame.with(rel.trim(), inst.trim());
    }
    if frame.assignments.is_empty() {
        return Err(Error::Config("empty --frame".into()));
    }
    frame.validate(ontology).map_err(|e| Error::Config(e.to_string()))?;
    Ok(frame)
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    user_id: &'a str,
    frame: u64,
    true_label: Option<&'a str>,
    predicted: &'a str,
    posteriors: Vec<(String, f64)>,
    explanation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rag_answer: Option<String>,
}

fn embedder(cfg: &RunConfig) -> Box<dyn Embedder> {
    match &cfg.llm.embed_endpoint {
        Some(url) => {
            let mut e = RemoteEmbedder::new(url.clone(), cfg.llm.embed_model.clone(), cfg.llm.embed_dim);
            e.token_env.clone_from(&cfg.llm.token_env);
            Box::new(e)
        }
        None => Box::new(HashingEmbedder::default()),
    }
}

fn backend(cfg: &RunConfig) -> Box<dyn LlmBackend> {
    match &cfg.llm.endpoint {
        Some(url) => {
            let mut b = HttpBackend::new(url.clone(), cfg.llm.model.clone());
            b.token_env.clone_from(&cfg.llm.token_env);
            Box::new(b)
        }
        None => Box::new(StubBackend),
    }
}

/// Retrieval index over `--corpus`, else over sentences built from `--data`.
fn build_index(cfg: &RunConfig, embedder: &dyn Embedder, ontology: &Ontology) -> Result<VectorStore> {
    let doc = match (&cfg.corpus, &cfg.data) {
        (Some(p), _) => fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        (None, Some(_)) => corpus_from_frames(&load_dataset(cfg)?.frames, ontology),
        (None, None) => return Err(Error::Config("retrieval needs --corpus or --data".into())),
    };
    let chunks = chunk_corpus(&doc, cfg.llm.chunk_tokens)?;
    VectorStore::build(&chunks, embedder)
}

fn predict_cmd(cfg: &RunConfig, a: &PredictArgs, dir: &Path) -> Result<()> {
    let model = load_model(cfg)?;
    let frames = match &a.frame {
        Some(spec) => vec![parse_frame(spec, &model.ontology)?],
        None if cfg.data.is_some() => load_dataset(cfg)?.frames,
        None => return Err(Error::Config("predict needs --frame or --data".into())),
    };
    let preds: Vec<Prediction> = model.predict_all(&frames)?;
    let rag = if a.rag {
        let emb = embedder(cfg);
        let index = build_index(cfg, emb.as_ref(), &model.ontology)?;
        Some((emb, index, backend(cfg)))
    } else {
        None
    };
    let k = a.k.unwrap_or(cfg.llm.top_k);
    let path = dir.join("predictions.jsonl");
    let mut out = std::io::BufWriter::new(fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
    for (f, p) in frames.iter().zip(&preds) {
        let rag_answer = match &rag {
            Some((emb, index, llm)) => {
                let bundle = PromptBundle::assemble(index, emb.as_ref(), &build_query(f, p, &model.ontology), k)?;
                Some(generate(&bundle, llm.as_ref())?)
            }
            None => None,
        };
        let line = PredictionLine {
            user_id: &f.user_id,
            frame: f.frame,
            true_label: f.label.as_deref(),
            predicted: &p.label,
            posteriors: p.normalized(),
            explanation: render_template(p, f, &model.ontology),
            rag_answer,
        };
        let json = serde_json::to_string(&line).map_err(|e| Error::InvalidInput(e.to_string()))?;
        writeln!(out, "{json}").map_err(|e| Error::io(&path, e))?;
    }
    out.flush().map_err(|e| Error::io(&path, e))?;
    if let [p] = preds.as_slice() {
        write_file(&dir.join("trace.json"), p.to_json() + "\n")?;
        println!("{}", p.to_json());
        println!("{}", render_template(p, &frames[0], &model.ontology));
    } else {
        let (y_true, y_pred) = labeled_predictions(&model, &frames)?;
        if !y_true.is_empty() {
            let labels = model.ontology.labels().to_vec();
            let report = classification_report(&y_true, &y_pred, &labels)?;
            eprint!("{}", report.to_table());
        }
    }
    Ok(())
}

fn evaluate_cmd(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let data = load_dataset(cfg)?;
    let have_ckpt = cfg.checkpoint.is_some();
    match cfg.mode {
        Mode::Vehicle if !have_ckpt => {
            let thresholds = cfg.thresholds()?;
            let out = horizon_sweep(&data.vehicles, &cfg.horizons, &thresholds, &cfg.pipeline())?;
            write_file(&dir.join("horizon.tsv"), out.table.to_tsv())?;
            write_file(&dir.join("horizon.json"), out.table.to_json() + "\n")?;
            write_file(&dir.join("horizon.txt"), out.table.to_formatted())?;
            if let Some(r) = &out.train_report {
                write_json(&dir.join("train_report.json"), r)?;
            }
            print!("{}", out.table.to_formatted());
        }
        _ => {
            let (model, test) = if have_ckpt {
                (load_model(cfg)?, data.frames.clone())
            } else {
                let (train, test) = split_dataset(&data, cfg.pipeline().split.train_fraction);
                let m = fit(cfg, &train)?;
                save_model(&m, cfg, dir)?;
                (m, test)
            };
            let labels: Vec<String> = match cfg.mode {
                Mode::Vehicle => VEHICLE_REPORT_LABELS.map(String::from).to_vec(),
                Mode::Pedestrian => model.ontology.labels().to_vec(),
            };
            let (y_true, y_pred) = labeled_predictions(&model, &test)?;
            let report = classification_report(&y_true, &y_pred, &labels)?;
            write_json(&dir.join("report.json"), &report)?;
            write_file(&dir.join("report.txt"), report.to_table())?;
            print!("{}", report.to_table());
        }
    }
    Ok(())
}

fn synth_cmd(cfg: &RunConfig, a: &SynthArgs, dir: &Path) -> Result<()> {
    let n = a.per_label;
    let counts = match cfg.mode {
        Mode::Vehicle => ScenarioCounts::Vehicle { llc: n, lk: n, rlc: n },
        Mode::Pedestrian => ScenarioCounts::Pedestrian { cross: n, no_cross: n },
    };
    let spec = ScenarioSpec {
        seed: cfg.seed,
        counts,
        noise: a.noise,
    };
    spec.validate().map_err(|e| Error::Config(e.to_string()))?;
    let path = dir.join("synthetic.csv");
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    match generate_synthetic(&spec)? {
        SyntheticData::Vehicle(v) => write_vehicle_csv(file, &v)?,
        SyntheticData::Pedestrian(p) => write_pedestrian_csv(file, &p)?,
    }
    write_json(&dir.join("spec.json"), &spec)
}

fn explain_cmd(cfg: &RunConfig, a: &ExplainArgs, dir: &Path) -> Result<()> {
    let ontology = cfg.ontology()?;
    let emb = embedder(cfg);
    let index = build_index(cfg, emb.as_ref(), &ontology)?;
    let bundle = PromptBundle::assemble(&index, emb.as_ref(), &a.query, a.k.unwrap_or(cfg.llm.top_k))?;
    write_json(&dir.join("prompt.json"), &bundle)?;
    let answer = generate(&bundle, backend(cfg).as_ref())?;
    write_file(&dir.join("answer.txt"), format!("{answer}\n"))?;
    println!("{answer}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn help_lists_every_flag() {
        let help = Cli::command().render_long_help().to_string();
        for flag in [
            "--config", "--seed", "--out", "--mode", "--data", "--ontology", "--thresholds", "--rules",
            "--checkpoint", "--corpus", "--horizons", "--verbose",
        ] {
            assert!(help.contains(flag), "{flag} missing from help");
        }
        for sub in ["build-kg", "train", "predict", "evaluate", "synth", "explain"] {
            assert!(help.contains(sub), "{sub} missing from help");
        }
        let train = Cli::command().find_subcommand_mut("train").unwrap().render_long_help().to_string();
        assert!(train.contains("--preset") && train.contains("--epochs"));
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["roadkg", "--help"]), EXIT_OK);
        assert_eq!(run(["roadkg", "--version"]), EXIT_OK);
        assert_eq!(run(["roadkg", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["roadkg", "build-kg", "--ontology", "/nonexistent/o.toml"]), EXIT_USAGE);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        // Missing --data is a configuration error.
        assert_eq!(run(["roadkg", "build-kg", "--out", out]), EXIT_USAGE);
        // Unreadable CSV content is a runtime failure.
        let bad = dir.path().join("bad.csv");
        fs::write(&bad, "not,a,vehicle,table\n").unwrap();
        assert_eq!(
            run(["roadkg", "build-kg", "--out", out, "--data", bad.to_str().unwrap()]),
            EXIT_RUNTIME
        );
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        fs::write(&p, "seed = 4\nout = \"elsewhere\"\nhorizons = [2.0]\n").unwrap();
        let g = GlobalArgs {
            config: Some(p),
            seed: Some(7),
            horizons: Some(vec![1.0, 3.0]),
            ..GlobalArgs::default()
        };
        let c = resolve_config(&g).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.out, PathBuf::from("elsewhere"));
        assert_eq!(c.horizons, [1.0, 3.0]);
    }

    #[test]
    fn run_dirs_do_not_collide() {
        let dir = tempfile::tempdir().unwrap();
        let a = create_run_dir(dir.path(), 1).unwrap();
        let b = create_run_dir(dir.path(), 1).unwrap();
        assert_ne!(a, b);
        assert!(a.file_name().unwrap().to_str().unwrap().contains("-seed1"));
    }

    #[test]
    fn frame_flag_parsing() {
        let o = Ontology::pedestrian();
        let f = parse_frame("MOTION=Run, LOCATION=NearFromCurb", &o).unwrap();
        assert_eq!(f.get("MOTION"), Some("Run"));
        assert!(parse_frame("MOTION", &o).is_err());
        assert!(parse_frame("NOPE=x", &o).is_err());
        assert!(parse_frame("", &o).is_err());
    }
}
