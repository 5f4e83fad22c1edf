// Copyright 2026 The SQEM Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Command-line front end.
//!
//! Every subcommand reads declared input files, writes its artifacts into the
//! output directory through temp-file-and-rename, and finishes with a
//! `manifest.json` recording digests of everything it read and wrote.

pub mod output;
pub mod schema;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::circuit::Circuit;
use crate::cut::{cut_wires, enumerate_variants, execute_and_reconstruct, Backend, CutPoint};
use crate::distribution::Distribution;
use crate::error::Error;
use crate::pauli::Hamiltonian;
use crate::recombine::{recombine, RecombinationConfig};
use crate::sim::{self, ExecutionMode, NoiseModel};
use crate::sqem::{self, CampaignConfig, CheckFrame, JobCost, TerminalPlacement};
use crate::vqe::{self, AnsatzSpec, ComparisonConfig, ParameterSet};
use crate::{pcs, seed};

use output::{sha256_hex, OutputDir, RunManifest, RunStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_EXECUTION: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SQEM_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "sqem", version, about = "Simulated quantum error mitigation pipeline")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "sqem-out")]
    out: PathBuf,

    /// Worker thread cap.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    /// Print a published output schema; without a name, list them.
    #[arg(long, value_name = "NAME", num_args = 0..=1, default_missing_value = "")]
    schema: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a circuit on the simulator.
    Simulate(SimulateArgs),
    /// Cut wires, run both fragments and reconstruct the joint distribution.
    Cut(CutArgs),
    /// Wrap a circuit in Z check pairs and optionally run it with post-selection.
    Pcs(PcsArgs),
    /// Per-qubit simulated error mitigation.
    #[command(subcommand)]
    Sqem(SqemCommand),
    /// Merge per-qubit mitigated distributions into one.
    Recombine(RecombineArgs),
    /// Variational energy evaluation.
    #[command(subcommand)]
    Vqe(VqeCommand),
}

#[derive(Debug, Subcommand)]
enum SqemCommand {
    /// Unmitigated run plus one cut-and-check job per protected qubit.
    Run(SqemRunArgs),
}

#[derive(Debug, Subcommand)]
enum VqeCommand {
    /// Energy estimates for every method over a seed sweep.
    Compare(VqeCompareArgs),
}

#[derive(Debug, Args)]
struct ExecArgs {
    /// Noise model JSON; noiseless when omitted.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Sample this many shots.
    #[arg(long, conflicts_with = "exact", value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Exact distribution instead of sampling (the default without `--shots`).
    #[arg(long)]
    exact: bool,
    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ExecArgs {
    fn mode(&self) -> ExecutionMode {
        match self.shots {
            Some(shots) => ExecutionMode::Sampled { shots },
            None => ExecutionMode::Exact,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Circuit text file.
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Debug, Args)]
struct CutArgs {
    /// Circuit text file.
    #[arg(long)]
    circuit: PathBuf,
    /// Cut location `q<k>@<pos>`: on qubit k before gate pos.
    #[arg(long = "cut", required = true, value_parser = parse_cut)]
    cuts: Vec<CutPoint>,
    /// Noise model JSON for the hardware-side fragment; noiseless when omitted.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Shots per fragment configuration; exact when omitted.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    shots_per_variant: Option<u64>,
    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrameArg {
    /// Z framed by the single-qubit gates at the ends of the wire.
    Auto,
    /// Bare Z.
    Plain,
}

impl From<FrameArg> for CheckFrame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Auto => CheckFrame::Auto,
            FrameArg::Plain => CheckFrame::Plain,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlacementArg {
    /// Preparation and measurement of the protected qubit run noiselessly with the checks.
    Mitigation,
    /// Preparation and measurement stay with the noisy circuit body.
    Main,
}

impl From<PlacementArg> for TerminalPlacement {
    fn from(p: PlacementArg) -> Self {
        match p {
            PlacementArg::Mitigation => TerminalPlacement::Mitigation,
            PlacementArg::Main => TerminalPlacement::Main,
        }
    }
}

#[derive(Debug, Args)]
struct PcsArgs {
    /// Circuit text file.
    #[arg(long)]
    circuit: PathBuf,
    /// Qubit to protect with a Z check pair; repeatable.
    #[arg(long = "check-qubit", required = true)]
    check_qubits: Vec<usize>,
    /// How the check unitaries are chosen.
    #[arg(long, value_enum, default_value_t = FrameArg::Auto)]
    frame: FrameArg,
    /// Execute the sandwich and post-select on the ancillas.
    #[arg(long)]
    run: bool,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Debug, Args)]
struct SqemRunArgs {
    /// Circuit text file.
    #[arg(long)]
    circuit: PathBuf,
    /// Noise model JSON for the hardware side.
    #[arg(long)]
    noise: PathBuf,
    /// Protected qubits; all when omitted.
    #[arg(long, value_delimiter = ',')]
    qubits: Vec<usize>,
    /// Sample this many shots.
    #[arg(long, conflicts_with = "exact", value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Exact evaluation (the default without `--shots`).
    #[arg(long)]
    exact: bool,
    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How the check unitaries are chosen.
    #[arg(long, value_enum, default_value_t = FrameArg::Auto)]
    frame: FrameArg,
    /// Fragment holding the protected qubit's preparation and measurement.
    #[arg(long, value_enum, default_value_t = PlacementArg::Mitigation)]
    placement: PlacementArg,
}

#[derive(Debug, Args)]
struct RecombineArgs {
    /// Unmitigated distribution JSON.
    #[arg(long)]
    unmitigated: PathBuf,
    /// Mitigated distribution for one protected qubit, `k=file`.
    #[arg(long = "mitigated", required = true, value_parser = parse_mitigated)]
    mitigated: Vec<(usize, PathBuf)>,
    /// Stop when the Hellinger distance between iterations falls below this.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Iteration cap; exceeding it exits with status 5.
    #[arg(long, default_value_t = 10_000)]
    max_iterations: usize,
}

#[derive(Debug, Args)]
struct VqeCompareArgs {
    /// Ansatz description JSON.
    #[arg(long)]
    ansatz: PathBuf,
    /// Ansatz parameter JSON.
    #[arg(long)]
    params: PathBuf,
    /// Hamiltonian text file.
    #[arg(long)]
    ham: PathBuf,
    /// Noise model JSON for the hardware side.
    #[arg(long)]
    noise: PathBuf,
    /// Shots per circuit configuration.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    /// Number of seeds in the sweep.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    seeds: u64,
    /// Root seed of the sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Protected qubits; all when omitted.
    #[arg(long, value_delimiter = ',')]
    qubits: Vec<usize>,
    /// How the check unitaries are chosen.
    #[arg(long, value_enum, default_value_t = FrameArg::Auto)]
    frame: FrameArg,
    /// Stop when the Hellinger distance between iterations falls below this.
    #[arg(long, default_value_t = 1e-4)]
    threshold: f64,
    /// Skip running the checks on the noisy backend.
    #[arg(long)]
    no_pcs: bool,
}

fn parse_cut(s: &str) -> Result<CutPoint, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mitigated(s: &str) -> Result<(usize, PathBuf), String> {
    let (k, path) = s
        .split_once('=')
        .ok_or_else(|| format!("'{s}' is not of the form k=file"))?;
    let k = k.trim().parse().map_err(|_| format!("'{k}' is not a qubit index"))?;
    Ok((k, PathBuf::from(path)))
}

/// A failed invocation: exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() {
            EXIT_VALIDATION
        } else {
            EXIT_EXECUTION
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_EXECUTION,
            message: e.to_string(),
        }
    }
}

/// What a subcommand reports back for the manifest.
struct Outcome {
    status: RunStatus,
    config: serde_json::Value,
    seeds: BTreeMap<String, u64>,
    failures: Vec<String>,
    code: i32,
}

impl Outcome {
    fn ok(config: serde_json::Value, seeds: BTreeMap<String, u64>) -> Self {
        Outcome {
            status: RunStatus::Ok,
            config,
            seeds,
            failures: Vec::new(),
            code: EXIT_OK,
        }
    }
}

/// Reads declared inputs and remembers their digests.
#[derive(Default)]
struct Inputs {
    digests: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure {
            code: EXIT_VALIDATION,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        self.digests
            .insert(path.display().to_string(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn circuit(&mut self, path: &Path) -> Result<Circuit, Failure> {
        Ok(Circuit::parse(&self.read(path)?)?)
    }

    fn noise(&mut self, path: &Path) -> Result<NoiseModel, Failure> {
        Ok(NoiseModel::from_json(&self.read(path)?)?)
    }

    fn distribution(&mut self, path: &Path) -> Result<Distribution, Failure> {
        Ok(Distribution::from_json(&self.read(path)?)?)
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(name) = &cli.schema {
        return print_schema(name);
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return EXIT_USAGE;
    };
    let run = || dispatch(&command, &cli.out);
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure {
                code: EXIT_EXECUTION,
                message: e.to_string(),
            }),
        },
        None => run(),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn print_schema(name: &str) -> i32 {
    if name.is_empty() {
        for (n, _) in schema::SCHEMAS {
            println!("{n}");
        }
        return EXIT_OK;
    }
    match schema::schema(name) {
        Some(text) => {
            print!("{text}");
            EXIT_OK
        }
        None => {
            eprintln!("error: unknown schema '{name}'");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: &Command, out_dir: &Path) -> Result<i32, Failure> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let mut out = OutputDir::create(out_dir)?;
    let (name, outcome) = match command {
        Command::Simulate(a) => ("simulate", simulate(a, &mut inputs, &mut out)?),
        Command::Cut(a) => ("cut", cut(a, &mut inputs, &mut out)?),
        Command::Pcs(a) => ("pcs", pcs_cmd(a, &mut inputs, &mut out)?),
        Command::Sqem(SqemCommand::Run(a)) => ("sqem run", sqem_run(a, &mut inputs, &mut out)?),
        Command::Recombine(a) => ("recombine", recombine_cmd(a, &mut inputs, &mut out)?),
        Command::Vqe(VqeCommand::Compare(a)) => ("vqe compare", vqe_compare(a, &mut inputs, &mut out)?),
    };
    let manifest = RunManifest {
        tool: "sqem".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        status: outcome.status,
        config: outcome.config,
        seeds: outcome.seeds,
        inputs: inputs.digests,
        outputs: out.written().clone(),
        failures: outcome.failures.clone(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    out.write_json("manifest.json", &manifest)?;
    for f in &outcome.failures {
        eprintln!("error: {f}");
    }
    Ok(outcome.code)
}

fn noise_arg(inputs: &mut Inputs, path: Option<&PathBuf>) -> Result<Option<NoiseModel>, Failure> {
    path.map(|p| inputs.noise(p)).transpose()
}

fn simulate(a: &SimulateArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let c = inputs.circuit(&a.circuit)?;
    let noise = noise_arg(inputs, a.exec.noise.as_ref())?;
    let report = sim::execute(&c, noise.as_ref(), a.exec.mode(), a.exec.seed)?;
    out.write_json("distribution.json", &report.distribution)?;
    out.write_json("report.json", &report)?;
    Ok(Outcome::ok(
        json!({ "mode": a.exec.mode(), "noise": noise }),
        BTreeMap::from([("root".into(), a.exec.seed)]),
    ))
}

fn cut(a: &CutArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let c = inputs.circuit(&a.circuit)?;
    let noise = noise_arg(inputs, a.noise.as_ref())?;
    let mode = match a.shots_per_variant {
        Some(shots) => ExecutionMode::Sampled { shots },
        None => ExecutionMode::Exact,
    };
    let fragments = cut_wires(&c, &a.cuts)?;
    let variants = enumerate_variants(&fragments)?;
    let backend = Backend::new(noise.clone(), mode);
    let result = execute_and_reconstruct(&fragments, &variants, &[backend.clone(), backend], a.seed)?;
    out.write_json("reconstruction.json", &result)?;
    out.write_json("distribution.json", &result.joint.normalize()?)?;
    let cuts: Vec<String> = a.cuts.iter().map(|c| c.to_string()).collect();
    Ok(Outcome::ok(
        json!({ "cuts": cuts, "mode": mode, "noise": noise, "variants": variants.len() }),
        BTreeMap::from([("root".into(), a.seed)]),
    ))
}

fn pcs_cmd(a: &PcsArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let c = inputs.circuit(&a.circuit)?;
    let noise = noise_arg(inputs, a.exec.noise.as_ref())?;
    let pairs = a
        .check_qubits
        .iter()
        .map(|&k| sqem::build_check(&c, k, a.frame.into()))
        .collect::<crate::Result<Vec<_>>>()?;
    let sandwich = pcs::wrap(&c, &pairs)?;
    out.write_json("sandwich.json", &sandwich)?;
    let mut seeds = BTreeMap::new();
    if a.run {
        seeds.insert("root".into(), a.exec.seed);
        let raw = sim::execute(&sandwich.circuit, noise.as_ref(), a.exec.mode(), a.exec.seed)?;
        let selected = pcs::post_select(&raw.distribution, &sandwich.ancilla_bits)?;
        out.write_json("post_selection.json", &selected)?;
    }
    let frame: CheckFrame = a.frame.into();
    Ok(Outcome::ok(
        json!({ "check_qubits": a.check_qubits, "frame": frame, "run": a.run, "mode": a.exec.mode(), "noise": noise }),
        seeds,
    ))
}

#[derive(Serialize)]
struct JobSummary {
    qubit: usize,
    retained_fraction: f64,
    clipped_mass: f64,
    negativity: f64,
    cost: JobCost,
    distribution_file: String,
}

#[derive(Serialize)]
struct CampaignSummary {
    qubits: Vec<usize>,
    shots: Option<u64>,
    unmitigated_file: String,
    hardware_configurations: usize,
    jobs: Vec<JobSummary>,
}

fn sqem_run(a: &SqemRunArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let circuit = inputs.circuit(&a.circuit)?;
    let noise = inputs.noise(&a.noise)?;
    let qubits = if a.qubits.is_empty() {
        (0..circuit.num_qubits()).collect()
    } else {
        a.qubits.clone()
    };
    let cfg = CampaignConfig {
        circuit,
        noise,
        qubits,
        shots: a.shots,
        seed: a.seed,
        frame: a.frame.into(),
        placement: a.placement.into(),
    };
    cfg.validate()?;
    let mut seeds = BTreeMap::from([
        ("root".to_string(), cfg.seed),
        ("unmitigated".to_string(), cfg.unmitigated_seed()),
    ]);
    for &k in &cfg.qubits {
        seeds.insert(format!("job/q{k}"), cfg.job(k).seed);
    }
    let config = json!({
        "qubits": cfg.qubits,
        "shots": cfg.shots,
        "noise": cfg.noise,
        "frame": cfg.frame,
        "placement": cfg.placement,
    });

    let mut failures = Vec::new();
    let mut code = EXIT_OK;
    let mut record = |e: Error, what: String| {
        let f = Failure::from(e);
        code = code.max(f.code);
        failures.push(format!("{what}: {}", f.message));
    };
    let unmitigated = match sqem::run_unmitigated(&cfg) {
        Ok(r) => {
            out.write_json("unmitigated.json", &r.distribution)?;
            true
        }
        Err(e) => {
            record(e, "unmitigated run".into());
            false
        }
    };
    let mut jobs = Vec::new();
    for (k, r) in sqem::run_jobs(&cfg) {
        match r {
            Ok(job) => {
                let file = format!("mitigated_q{k}.json");
                out.write_json(&file, &job.distribution)?;
                jobs.push(JobSummary {
                    qubit: k,
                    retained_fraction: job.retained_fraction,
                    clipped_mass: job.clipped_mass,
                    negativity: job.negativity,
                    cost: job.cost,
                    distribution_file: file,
                });
            }
            Err(e) => record(e, format!("job for qubit {k}")),
        }
    }
    let summary = CampaignSummary {
        qubits: cfg.qubits.clone(),
        shots: cfg.shots,
        unmitigated_file: if unmitigated {
            "unmitigated.json".into()
        } else {
            String::new()
        },
        hardware_configurations: usize::from(unmitigated)
            + jobs.iter().map(|j| j.cost.hardware_configurations).sum::<usize>(),
        jobs,
    };
    out.write_json("campaign.json", &summary)?;
    let mut outcome = Outcome::ok(config, seeds);
    if !failures.is_empty() {
        outcome.status = RunStatus::Partial;
        outcome.failures = failures;
        outcome.code = code;
    }
    Ok(outcome)
}

fn recombine_cmd(a: &RecombineArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let unmitigated = inputs.distribution(&a.unmitigated)?;
    let mut mitigated = BTreeMap::new();
    for (k, path) in &a.mitigated {
        if mitigated.insert(*k, inputs.distribution(path)?).is_some() {
            return Err(Error::validation(format!("qubit {k} given more than once")).into());
        }
    }
    let cfg = RecombinationConfig {
        threshold: a.threshold,
        max_iterations: a.max_iterations,
    };
    let result = recombine(&unmitigated, &mitigated, &cfg)?;
    out.write_json("recombined.json", &result.distribution)?;
    out.write_json("recombination.json", &result)?;
    out.write_text("trace.csv", &result.trace_csv())?;
    let mut outcome = Outcome::ok(json!({ "recombination": cfg }), BTreeMap::new());
    if !result.converged {
        outcome.status = RunStatus::NotConverged;
        outcome.code = EXIT_NOT_CONVERGED;
        outcome.failures.push(format!(
            "recombination did not converge in {} iterations (last step {:e})",
            result.iterations, result.final_step
        ));
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct SeedRun {
    seed: u64,
    #[serde(flatten)]
    comparison: vqe::Comparison,
}

fn vqe_compare(a: &VqeCompareArgs, inputs: &mut Inputs, out: &mut OutputDir) -> Result<Outcome, Failure> {
    let spec = AnsatzSpec::from_json(&inputs.read(&a.ansatz)?)?;
    let params = ParameterSet::from_json(&inputs.read(&a.params)?)?;
    let h = Hamiltonian::parse(&inputs.read(&a.ham)?)?;
    let noise = inputs.noise(&a.noise)?;
    let circuit = vqe::build_ansatz(&spec, &params, &spec.occupation)?;
    let recombination = RecombinationConfig {
        threshold: a.threshold,
        ..RecombinationConfig::default()
    };
    recombination.validate()?;
    let mut seeds = BTreeMap::from([("root".to_string(), a.seed)]);
    let mut runs = Vec::new();
    for i in 0..a.seeds {
        let s = seed::derive_seed(a.seed, &format!("seed{i}"));
        seeds.insert(format!("seed{i}"), s);
        let cfg = ComparisonConfig {
            shots: a.shots,
            seed: s,
            qubits: (!a.qubits.is_empty()).then(|| a.qubits.clone()),
            frame: a.frame.into(),
            recombination,
            include_pcs: !a.no_pcs,
        };
        runs.push(SeedRun {
            seed: s,
            comparison: vqe::run_comparison(&circuit, &h, &noise, &cfg)?,
        });
    }
    out.write_json("energy_reports.json", &runs)?;
    let comparisons: Vec<vqe::Comparison> = runs.into_iter().map(|r| r.comparison).collect();
    out.write_text("summary.csv", &vqe::summary_csv(&vqe::summarize(&comparisons)))?;
    let frame: CheckFrame = a.frame.into();
    let mut outcome = Outcome::ok(
        json!({
            "shots": a.shots,
            "seeds": a.seeds,
            "qubits": a.qubits,
            "frame": frame,
            "recombination": recombination,
            "include_pcs": !a.no_pcs,
            "noise": noise,
        }),
        seeds,
    );
    let stalled: Vec<String> = comparisons
        .iter()
        .zip(outcome.seeds.keys().filter(|k| k.starts_with("seed")))
        .flat_map(|(c, label)| {
            c.recombination
                .iter()
                .filter(|g| !g.converged)
                .map(move |g| format!("{label}: group {} recombination did not converge", g.group))
        })
        .collect();
    if !stalled.is_empty() {
        outcome.status = RunStatus::NotConverged;
        outcome.code = EXIT_NOT_CONVERGED;
        outcome.failures = stalled;
    }
    Ok(outcome)
}
