use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use s2r_core::app_sim::{explore_dft, extract_declared_model, DEFAULT_STEP_CAP};
use s2r_core::bundle::{build_models, load_spec, load_traces, read_file, replay_entities, write_atomic, BuildOptions};
use s2r_core::gui_model::GuiModel;
use s2r_core::ngram::DEFAULT_DISCOUNT;
use s2r_core::predictor::{compare_models, AppCorpus, ModelKind};
use s2r_core::resolver::RankingParams;
use s2r_core::service::{serve, ServiceConfig};
use s2r_core::session::ReportStore;
use s2r_core::traces::{refine_model, to_gat, to_get};

#[derive(Parser)]
#[command(name = "s2r", version, about = "Build, evaluate and serve interactive steps-to-reproduce models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explore the app from its initial screen and write the dynamic model.
    Explore {
        #[arg(long)]
        app: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the model of declared-only screens, elements and transitions.
    Static {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge a static and a dynamic model.
    Union {
        #[arg(long = "static")]
        static_model: PathBuf,
        #[arg(long)]
        dynamic: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add the transitions observed in usage traces to a model.
    Refine {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the GUI model and both prediction models for one app.
    BuildModels {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, env = "S2R_MODELS_DIR")]
        models_dir: PathBuf,
        /// Fixed n-gram order (1-10).
        #[arg(long)]
        order: Option<usize>,
        /// Fixed suggestion count (1-10).
        #[arg(long)]
        sn: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DISCOUNT)]
        discount: f64,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: usize,
    },
    /// Compare n-gram and AKOM predictors on trace corpora.
    Eval {
        /// Trace directory, optionally named as NAME=DIR. Repeatable.
        #[arg(long = "traces", required = true)]
        traces: Vec<String>,
        #[arg(long, value_enum, default_value_t = KindArg::Both)]
        kind: KindArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the validated steps of a stored report in the simulator.
    Replay {
        report_id: String,
        #[arg(long, env = "S2R_APPS_DIR")]
        apps_dir: PathBuf,
        #[arg(long, env = "S2R_REPORTS_DIR")]
        reports_dir: PathBuf,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "S2R_APPS_DIR")]
    apps_dir: PathBuf,
    #[arg(long, env = "S2R_MODELS_DIR")]
    models_dir: PathBuf,
    #[arg(long, env = "S2R_REPORTS_DIR")]
    reports_dir: PathBuf,
    #[arg(long, env = "S2R_VECTORS")]
    vectors: PathBuf,
    #[arg(long, env = "S2R_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "S2R_UI_DIR")]
    ui_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Treat unreachable screens as one step past the farthest reachable one.
    #[arg(long)]
    unreachable_as_max: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Gapm,
    Gepm,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_model(out: Option<&Path>, gm: &GuiModel) -> Result<()> {
    emit(out, &(gm.to_json() + "\n"))
}

fn load_model(path: &Path) -> Result<GuiModel> {
    GuiModel::from_json(&read_file(path)?).with_context(|| format!("reading model {}", path.display()))
}

/// `NAME=DIR`, or a bare dir named after itself (or its parent when the
/// dir is literally `traces`).
fn corpus_arg(arg: &str) -> Result<AppCorpus> {
    let (name, dir) = match arg.split_once('=') {
        Some((n, d)) => (n.to_string(), PathBuf::from(d)),
        None => {
            let dir = PathBuf::from(arg);
            let base = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned());
            let name = match base(&dir) {
                Some(n) if n == "traces" => dir.parent().and_then(base).unwrap_or(n),
                Some(n) => n,
                None => bail!("cannot name corpus from `{arg}`; use NAME=DIR"),
            };
            (name, dir)
        }
    };
    let traces = load_traces(&dir)?;
    if traces.is_empty() {
        bail!("no .trace files in {}", dir.display());
    }
    Ok(AppCorpus {
        app: name,
        gat: traces.iter().map(|t| to_gat(t)).collect(),
        get: traces.iter().map(|t| to_get(t)).collect(),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Explore { app, step_cap, out } => {
            let spec = load_spec(&app)?;
            emit_model(out.as_deref(), &explore_dft(&spec, step_cap)?)
        }
        Command::Static { app, out } => {
            let spec = load_spec(&app)?;
            emit_model(out.as_deref(), &extract_declared_model(&spec)?)
        }
        Command::Union { static_model, dynamic, out } => {
            let gm = GuiModel::union(&load_model(&static_model)?, &load_model(&dynamic)?);
            emit_model(out.as_deref(), &gm)
        }
        Command::Refine { model, traces, out } => {
            let mut gm = refine_model(&load_model(&model)?, &load_traces(&traces)?);
            gm.finalize();
            emit_model(out.as_deref(), &gm)
        }
        Command::BuildModels { app, traces, models_dir, order, sn, discount, step_cap } => {
            let spec = load_spec(&app)?;
            let traces = load_traces(&traces)?;
            let opts = BuildOptions { order, suggestion_len: sn, discount, step_cap };
            let built = build_models(&spec, &traces, &opts)?;
            let dir = built.write(&models_dir)?;
            println!("wrote {}", dir.display());
            for kind in [ModelKind::Gapm, ModelKind::Gepm] {
                let s = built.selection.get(kind);
                let wes = s.wes.map_or("-".to_string(), |w| format!("{w:.3}"));
                println!("{kind}: order {} SN {} wes {wes} ({})", s.order, s.suggestion_len, s.source);
            }
            Ok(())
        }
        Command::Eval { traces, kind, format, out } => {
            let corpora = traces.iter().map(|t| corpus_arg(t)).collect::<Result<Vec<_>>>()?;
            let kinds = match kind {
                KindArg::Gapm => vec![ModelKind::Gapm],
                KindArg::Gepm => vec![ModelKind::Gepm],
                KindArg::Both => vec![ModelKind::Gapm, ModelKind::Gepm],
            };
            let report = compare_models(&corpora, &kinds)?;
            let text = match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
            };
            emit(out.as_deref(), &text)
        }
        Command::Replay { report_id, apps_dir, reports_dir } => {
            let store = ReportStore::open(&reports_dir)?;
            let report = store.get(&report_id)?.with_context(|| format!("no report `{report_id}` in {}", reports_dir.display()))?;
            let spec = load_spec(&apps_dir.join(format!("{}.json", report.app_id)))?;
            let outcome = replay_entities(&spec, &report.entities);
            let steps = report.entities.iter().filter(|e| e.validated()).count();
            let failures: Vec<&str> = outcome.triggered_failures.iter().map(String::as_str).collect();
            let rejected = outcome.rejected_at.map_or(String::new(), |i| format!(" rejected at action {}", i + 1));
            println!(
                "report {report_id}: replayed {steps} of {} steps, final screen {}{rejected}, triggered failures: {}",
                report.entities.len(),
                outcome.final_screen,
                if failures.is_empty() { "none".into() } else { failures.join(", ") }
            );
            Ok(())
        }
        Command::Serve(a) => {
            let config = ServiceConfig {
                apps_dir: a.apps_dir,
                models_dir: a.models_dir,
                reports_dir: a.reports_dir,
                vectors: a.vectors,
                port: a.port,
                params: RankingParams { alpha: a.alpha, beta: a.beta, unreachable_as_max: a.unreachable_as_max },
                ui_dir: a.ui_dir,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let handle = serve(&config).await?;
                eprintln!("listening on http://{}", handle.addr);
                handle.wait().await?;
                anyhow::Ok(())
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
