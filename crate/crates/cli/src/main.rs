//! `sparse-pauli`: generate synthetic channels, build designs, run recoveries
//! and noise sweeps.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 recovery incomplete (the
//! result is still written).

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use sparse_pauli::channel::{
    load_channel, load_eigenvalues, plant_paulis, random_sparse_channel, save_channel, TailProfile,
};
use sparse_pauli::design::{design_to_json, local_stabilizer_design, type2_count, type2_design, type2_distinct_count};
use sparse_pauli::oracle::TableOracle;
use sparse_pauli::pipeline::{recover, HeuristicDesign, Mode, RecoverConfig};
use sparse_pauli::{compare, BoundParams, ChannelOracle, PauliLabel, SparsePauliChannel, Status};

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

const SEED_ENV: &str = "SPARSE_PAULI_SEED";

#[derive(Parser)]
#[command(name = "sparse-pauli", version, about = "Sparse Pauli-channel estimation from noisy eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic channel as JSON.
    GenChannel(GenChannelArgs),
    /// Recover a channel from eigenvalue queries.
    Recover(RecoverArgs),
    /// Repeat a recovery over noise levels and noise draws.
    Sweep(SweepArgs),
    /// Write a local stabilizer design and its experiment count.
    Design(DesignArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum Profile {
    /// About 200 rates above 1e-5 and 2000 above 1e-8.
    DeviceLike,
    /// Rates spread over 1e-3 to 1e-7 with a tail below.
    FourDecades,
}

#[derive(Args, Serialize)]
struct GenChannelArgs {
    #[arg(long)]
    n: usize,
    /// Identity plus `s - 1` random labels, log-uniform rates. Without it the
    /// tail profile is used.
    #[arg(long)]
    s: Option<usize>,
    /// Smallest rate for `--s` channels.
    #[arg(long, default_value_t = 1e-4)]
    eps0: f64,
    /// Identity mass.
    #[arg(long = "p-id", default_value_t = 0.86)]
    p_id: f64,
    #[arg(long, value_enum, default_value_t = Profile::DeviceLike)]
    profile: Profile,
    /// Extra label and rate, `LABEL:RATE` (repeatable).
    #[arg(long = "plant", value_parser = parse_plant)]
    plants: Vec<(String, f64)>,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    Provable,
    Heuristic,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum HeuristicArg {
    /// `C` local stabilizer groups.
    Type1,
    /// One fully resolved pair per group.
    Type2,
    /// Random hashes of `b` bits.
    Random,
}

#[derive(Args, Clone, Serialize)]
struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Provable)]
    mode: ModeArg,
    /// Heuristic-mode groups.
    #[arg(long, value_enum, default_value_t = HeuristicArg::Type1)]
    design: HeuristicArg,
    /// Hash bits per group (provable and random designs).
    #[arg(long, default_value_t = 10)]
    b: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 16)]
    p1: usize,
    /// Repetitions per index bit.
    #[arg(long = "rep", default_value_t = 9)]
    rep: usize,
    #[arg(long)]
    eps0: Option<f64>,
    /// Expected number of nonzero rates.
    #[arg(long)]
    sparsity: Option<usize>,
    #[arg(long, default_value_t = 0.4)]
    gamma: f64,
    /// Design seed.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
}

impl DecoderArgs {
    fn config(&self) -> RecoverConfig {
        RecoverConfig {
            mode: match self.mode {
                ModeArg::Provable => Mode::Provable,
                ModeArg::Heuristic => Mode::Heuristic,
            },
            b: self.b,
            c: self.c,
            p1: self.p1,
            repetitions: self.rep,
            heuristic_design: match self.design {
                HeuristicArg::Type1 => HeuristicDesign::TypeOne,
                HeuristicArg::Type2 => HeuristicDesign::TypeTwo,
                HeuristicArg::Random => HeuristicDesign::Random,
            },
            eps0: self.eps0,
            sparsity: self.sparsity,
            gamma: self.gamma,
            hash_check: true,
            seed: self.seed,
        }
    }
}

#[derive(Args, Serialize)]
struct RecoverArgs {
    /// Known channel to query through a simulated noisy oracle.
    #[arg(long, conflicts_with = "eigenvalues", required_unless_present = "eigenvalues")]
    channel: Option<PathBuf>,
    /// Measured eigenvalues as `index,value` rows (index in x|z form).
    #[arg(long)]
    eigenvalues: Option<PathBuf>,
    /// Noise level added to (or assumed for) each eigenvalue.
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Seed of the simulated noise; derived from the design seed if unset.
    #[arg(long = "noise-seed")]
    noise_seed: Option<u64>,
    /// Result JSON.
    #[arg(long)]
    out: PathBuf,
    /// Per-label CSV of the comparison with the known channel.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record wall-clock time (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long)]
    channel: PathBuf,
    /// Comma-separated noise levels.
    #[arg(long = "xi-list", value_delimiter = ',', required = true, num_args = 1..)]
    xi_list: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    decoder: DecoderArgs,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
enum DesignTypeArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Args, Serialize)]
struct DesignArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long = "type", value_enum, default_value_t = DesignTypeArg::One)]
    kind: DesignTypeArg,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_plant(s: &str) -> Result<(String, f64), String> {
    let (label, rate) = s.rsplit_once(':').ok_or_else(|| format!("expected LABEL:RATE, got {s:?}"))?;
    let rate: f64 = rate.parse().map_err(|e| format!("bad rate in {s:?}: {e}"))?;
    Ok((label.to_string(), rate))
}

/// Tool name, version and the arguments that produced an artifact.
fn run_meta<T: Serialize>(command: &str, args: &T) -> CliResult<Value> {
    Ok(json!({
        "tool": env!("CARGO_BIN_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": serde_json::to_value(args)?,
    }))
}

fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}

const DECADES: [f64; 6] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

fn gen_channel(args: &GenChannelArgs) -> CliResult<ExitCode> {
    let base = match args.s {
        Some(s) => random_sparse_channel(args.n, s, args.eps0, args.p_id, args.seed)?,
        None => {
            let mut profile = match args.profile {
                Profile::DeviceLike => TailProfile::device_like(),
                Profile::FourDecades => TailProfile::four_decades(args.p_id),
            };
            profile.identity = args.p_id;
            profile.sample(args.n, args.seed)?
        }
    };
    let plants = args
        .plants
        .iter()
        .map(|(label, rate)| Ok((label.parse::<PauliLabel>()?, *rate)))
        .collect::<CliResult<Vec<_>>>()?;
    let ch = if plants.is_empty() { base } else { plant_paulis(&base, &plants)? };
    save_channel(&args.out, &ch, Some(run_meta("gen-channel", args)?))?;

    println!("n = {}, {} rates, identity {:.6}", ch.num_qubits(), ch.sparsity(), ch.identity_rate());
    for d in DECADES {
        println!("  above {d:.0e}: {}", ch.count_above(d));
    }
    Ok(ExitCode::SUCCESS)
}

fn noise_seed(seed: u64, explicit: Option<u64>) -> u64 {
    explicit.unwrap_or(seed ^ 0x9e37_79b9_7f4a_7c15)
}

fn recover_cmd(args: &RecoverArgs) -> CliResult<ExitCode> {
    let cfg = args.decoder.config();
    let noise = noise_seed(cfg.seed, args.noise_seed);
    let truth = args.channel.as_deref().map(load_channel).transpose()?;
    let rec = match (&truth, &args.eigenvalues) {
        (Some(ch), _) => recover(&ChannelOracle::new(ch, args.xi, noise)?, &cfg)?,
        (None, Some(path)) => {
            let rows = load_eigenvalues(path)?;
            let n = rows.first().map(|r| r.0.num_qubits()).ok_or("eigenvalue file is empty")?;
            recover(&TableOracle::new(n, &rows, args.xi)?, &cfg)?
        }
        (None, None) => return Err("one of --channel or --eigenvalues is required".into()),
    };
    let report = match &truth {
        Some(ch) => {
            let bounds = BoundParams { xi: args.xi, bins: rec.design.num_bins(), sparsity: cfg.sparsity.unwrap_or(ch.sparsity()) };
            let mut report = compare(ch, &rec.result, cfg.eps0, Some(bounds))?;
            if args.timing {
                report.wall_time_secs = Some(rec.wall_time_secs);
            }
            Some(report)
        }
        None => None,
    };

    let mut meta = run_meta("recover", args)?;
    meta["config"]["noise_seed"] = json!(noise);
    let mut out = json!({ "meta": meta, "result": rec.result });
    if let Some(report) = &report {
        out["report"] = serde_json::to_value(report)?;
    }
    if args.timing {
        out["wall_time_secs"] = json!(rec.wall_time_secs);
    }
    write_json(&args.out, &out)?;
    if let (Some(path), Some(report)) = (&args.csv, &report) {
        report.write_csv(BufWriter::new(fs::File::create(path)?))?;
    }

    let r = &rec.result;
    println!(
        "{:?}: {} labels, total rate {:.9}, {} sweeps, {} queries",
        r.status,
        r.estimates.len(),
        r.total_rate(),
        r.iterations,
        r.queries
    );
    if let Some(rep) = &report {
        println!(
            "linf {:.3e} (bound {:.3e}), TV {:.3e} (bound {:.3e}), {} missed, {} spurious",
            rep.linf,
            rep.linf_bound.unwrap_or(f64::NAN),
            rep.tv,
            rep.tv_bound.unwrap_or(f64::NAN),
            rep.false_negatives,
            rep.false_positives
        );
    }
    Ok(if r.status == Status::Complete { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

struct TrialOutcome {
    rates: Vec<(PauliLabel, f64, f64)>,
    tv: f64,
    linf: f64,
    complete: bool,
    found: usize,
}

fn sweep_trial(ch: &SparsePauliChannel, xi: f64, seed: u64, cfg: &RecoverConfig) -> sparse_pauli::Result<TrialOutcome> {
    let rec = recover(&ChannelOracle::new(ch, xi, seed)?, cfg)?;
    let report = compare(ch, &rec.result, cfg.eps0, None)?;
    let rates = report.labels.iter().map(|l| (l.pauli, l.truth, l.estimate)).collect();
    Ok(TrialOutcome {
        rates,
        tv: report.tv,
        linf: report.linf,
        complete: rec.result.status == Status::Complete,
        found: rec.result.estimates.len(),
    })
}

fn sweep(args: &SweepArgs) -> CliResult<ExitCode> {
    if args.xi_list.is_empty() {
        return Err("--xi-list needs at least one value".into());
    }
    if let Some(bad) = args.xi_list.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return Err(format!("noise levels must be finite and non-negative, got {bad}").into());
    }
    let ch = load_channel(&args.channel)?;
    let cfg = args.decoder.config();
    fs::create_dir_all(&args.out_dir)?;

    let mut rates_csv = String::from("xi,trial,label,weight,true_rate,recovered_rate\n");
    let mut tv_csv = String::from("xi,trial,tv,linf,complete,found\n");
    for &xi in &args.xi_list {
        info!("xi = {xi:e}: {} trials", args.trials);
        // The design is fixed; each trial draws fresh oracle noise.
        let outcomes: Vec<TrialOutcome> = (0..args.trials)
            .into_par_iter()
            .map(|t| sweep_trial(&ch, xi, noise_seed(cfg.seed, None).wrapping_add(t as u64), &cfg))
            .collect::<Result<_, _>>()?;
        for (t, o) in outcomes.iter().enumerate() {
            tv_csv.push_str(&format!("{xi:e},{t},{:e},{:e},{},{}\n", o.tv, o.linf, o.complete, o.found));
            for (label, truth, est) in &o.rates {
                rates_csv.push_str(&format!("{xi:e},{t},{},{},{truth:e},{est:e}\n", label.to_word(), label.weight()));
            }
        }
        let mean_tv = outcomes.iter().map(|o| o.tv).sum::<f64>() / outcomes.len().max(1) as f64;
        println!(
            "xi {xi:.0e}: mean TV {mean_tv:.3e}, {}/{} complete",
            outcomes.iter().filter(|o| o.complete).count(),
            outcomes.len()
        );
    }
    fs::write(args.out_dir.join("rates.csv"), rates_csv)?;
    fs::write(args.out_dir.join("tv.csv"), tv_csv)?;
    write_json(&args.out_dir.join("run.json"), &run_meta("sweep", args)?)?;
    Ok(ExitCode::SUCCESS)
}

fn design_cmd(args: &DesignArgs) -> CliResult<ExitCode> {
    let (design, experiments) = match args.kind {
        DesignTypeArg::One => local_stabilizer_design(args.n, args.c, args.seed)?,
        DesignTypeArg::Two => type2_design(args.n, args.seed)?,
    };
    if let Some(path) = &args.out {
        let text = design_to_json(&design, Some(&experiments), Some(run_meta("design", args)?))?;
        fs::write(path, text + "\n")?;
    }
    println!("{}", experiments.count);
    if let DesignTypeArg::Two = args.kind {
        eprintln!(
            "note: {} counts the base setting plus 4 x 4 switches for every pair of qubit pairs (1 + 8n(n-2)); \
             only {} of these settings are distinct (1 + 2n(n-1))",
            type2_count(args.n),
            type2_distinct_count(args.n)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let outcome = match &cli.command {
        Command::GenChannel(args) => gen_channel(args),
        Command::Recover(args) => recover_cmd(args),
        Command::Sweep(args) => sweep(args),
        Command::Design(args) => design_cmd(args),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
