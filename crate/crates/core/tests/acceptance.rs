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

//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqem::circuit::Gate;
use sqem::cut::{cut_wires, enumerate_variants, execute_and_reconstruct, Backend, CutPoint};
use sqem::distribution::total_variation;
use sqem::pcs::{self, CheckPair};
use sqem::recombine::{bitwise_marginal, recombine, RecombinationConfig};
use sqem::sim::{self, ExecutionMode, NoiseScope, SimConfig};
use sqem::sqem::{run_campaign, run_job, CampaignConfig, CheckFrame, SqemJob, TerminalPlacement};
use sqem::vqe::{run_comparison, ComparisonConfig};
use sqem::{Circuit, Distribution, NoiseModel};

const CUT_TV_TOL: f64 = 1e-9;
const CUT_BUDGET_SECS: f64 = 60.0;
const CHECK_CASES: usize = 100;
const PCS_TOL: f64 = 1e-9;
const DECAY_TOL: f64 = 1e-9;
const RECOMBINE_THRESHOLD: f64 = 1e-4;
const DELTA_FACTOR: f64 = 10.0;
const FIXED_POINT_TOL: f64 = 1e-12;
const E2E_SHOTS: u64 = 10_000;
const E2E_SEEDS: usize = 20;
const E2E_IMPROVED_FRACTION: f64 = 0.9;
const CHEMICAL_ACCURACY: f64 = 0.0016;
const E2E_BUDGET_SECS: f64 = 600.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn mild_noise() -> NoiseModel {
    NoiseModel::depolarizing(0.001, 0.01)
}

fn fully_measured(c: &Circuit) -> bool {
    c.measured_qubits() == (0..c.num_qubits()).collect::<Vec<_>>().as_slice()
}

// 1
fn cut_reconstruction_oracle() -> Verdict {
    let start = Instant::now();
    let mut placements = 0usize;
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for (name, c) in common::corpus().into_iter().filter(|(_, c)| c.num_qubits() <= 6) {
        let ideal = sim::exact_distribution(&c, None).unwrap();
        let points: Vec<CutPoint> = (0..c.num_qubits())
            .flat_map(|q| {
                common::canonical_positions(&c, q)
                    .into_iter()
                    .map(move |p| CutPoint::new(q, p))
            })
            .collect();
        let mut sets: Vec<Vec<CutPoint>> = points.iter().map(|&p| vec![p]).collect();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                sets.push(vec![points[i], points[j]]);
            }
        }
        for cuts in sets {
            let Ok(fs) = cut_wires(&c, &cuts) else { continue };
            let variants = enumerate_variants(&fs).unwrap();
            let r = execute_and_reconstruct(&fs, &variants, &[Backend::exact(), Backend::exact()], 0).unwrap();
            let tv = total_variation(&r.joint, &ideal).unwrap();
            placements += 1;
            if tv > worst {
                worst = tv;
                worst_at = format!("{name} {cuts:?}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= CUT_TV_TOL && secs < CUT_BUDGET_SECS && placements > 0,
        format!("{placements} placements, max TV {worst:.2e} ({worst_at}), {secs:.1}s"),
    )
}

fn random_one_qubit(rng: &mut ChaCha8Rng, q: usize) -> Gate {
    let theta = rng.random_range(-3.2..3.2);
    match rng.random_range(0..8) {
        0 => Gate::h(q),
        1 => Gate::x(q),
        2 => Gate::z(q),
        3 => Gate::s(q),
        4 => Gate::rx(q, theta),
        5 => Gate::ry(q, theta),
        _ => Gate::rz(q, theta),
    }
}

fn random_circuit(rng: &mut ChaCha8Rng, n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..rng.random_range(1..=8) {
        let g = if n > 1 && rng.random_bool(0.35) {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            if rng.random_bool(0.6) {
                Gate::cz(a, b)
            } else {
                Gate::cx(a, b)
            }
        } else if rng.random_bool(0.5) {
            Gate::rz(rng.random_range(0..n), rng.random_range(-3.2..3.2))
        } else {
            let q = rng.random_range(0..n);
            random_one_qubit(rng, q)
        };
        c.push(g).unwrap();
    }
    c.measure_all()
}

// 2
fn check_condition_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut agree, mut holds) = (0, 0);
    let mut disagreements = Vec::new();
    for case in 0..CHECK_CASES {
        let n = rng.random_range(1..=3);
        let c = random_circuit(&mut rng, n);
        let k = rng.random_range(0..n);
        let pair = match case % 4 {
            0 => CheckPair::z(k),
            1 => sqem::sqem::build_check(&c, k, CheckFrame::Auto).unwrap_or_else(|_| CheckPair::z(k)),
            2 => {
                let mut p = sqem::sqem::build_check(&c, k, CheckFrame::Auto).unwrap_or_else(|_| CheckPair::z(k));
                p.right.push(random_one_qubit(&mut rng, k));
                p
            }
            _ => CheckPair {
                target: k,
                left: (0..rng.random_range(1..3))
                    .map(|_| random_one_qubit(&mut rng, k))
                    .collect(),
                right: (0..rng.random_range(1..3))
                    .map(|_| random_one_qubit(&mut rng, k))
                    .collect(),
            },
        };
        let claimed = pcs::verify_check_condition(&c, &pair).unwrap();
        let u = common::oracle_sequence(c.gates(), n);
        let lhs = common::oracle_sequence(&pair.right, n) * &u * common::oracle_sequence(&pair.left, n);
        let oracle = common::max_diff_up_to_phase(&lhs, &u) < 1e-10;
        if claimed == oracle {
            agree += 1;
        } else {
            disagreements.push(case);
        }
        holds += usize::from(oracle);
    }
    verdict(
        disagreements.is_empty(),
        format!(
            "{agree}/{CHECK_CASES} agree ({holds} satisfied, {} violated), disagreements {disagreements:?}",
            CHECK_CASES - holds
        ),
    )
}

// 3
fn pcs_error_removal() -> Verdict {
    let c = Circuit::parse(&common::read("circuits/z_commuting2.txt")).unwrap();
    let ideal = sim::exact_distribution(&c, None).unwrap();
    let mut worst_xy = 0.0f64;
    let mut worst_z = 0.0f64;
    let mut cases = 0;
    let channels = |p: f64| [(p, 0.0, 0.0), (0.0, p, 0.0), (p / 2.0, p / 2.0, 0.0)];
    for p in [0.05, 0.2, 0.5] {
        for (px, py, pz) in channels(p) {
            let noise = NoiseModel::pauli_on(0, px, py, pz);
            // Cut and reconstructed, checks on the noiseless path.
            let job = SqemJob {
                circuit: c.clone(),
                protected_qubit: 0,
                noise: noise.clone(),
                mode: ExecutionMode::Exact,
                seed: 0,
                frame: CheckFrame::Plain,
                placement: TerminalPlacement::Mitigation,
            };
            let r = run_job(&job).unwrap();
            worst_xy = worst_xy.max(total_variation(&r.distribution, &ideal).unwrap());
            // Uncut sandwich with noise confined to the body.
            let s = pcs::wrap(&c, &[CheckPair::z(0)]).unwrap();
            let raw = sim::exact_distribution_scoped(
                &s.circuit,
                Some(&noise),
                &NoiseScope::Gates(s.body.clone()),
                &SimConfig::default(),
            )
            .unwrap();
            let ps = pcs::post_select(&raw, &s.ancilla_bits).unwrap();
            worst_xy = worst_xy.max(total_variation(&ps.distribution, &ideal).unwrap());
            cases += 2;
        }
        let z_noise = NoiseModel::pauli_on(0, 0.0, 0.0, p);
        let unmitigated = sim::exact_distribution(&c, Some(&z_noise)).unwrap();
        let job = SqemJob {
            circuit: c.clone(),
            protected_qubit: 0,
            noise: z_noise,
            mode: ExecutionMode::Exact,
            seed: 0,
            frame: CheckFrame::Plain,
            placement: TerminalPlacement::Mitigation,
        };
        let r = run_job(&job).unwrap();
        worst_z = worst_z.max(total_variation(&r.distribution, &unmitigated).unwrap());
        cases += 1;
    }
    verdict(
        worst_xy <= PCS_TOL && worst_z <= PCS_TOL,
        format!("{cases} runs, X/Y channels max TV to noiseless {worst_xy:.2e}, Z channel max TV to unmitigated {worst_z:.2e}"),
    )
}

// 4
fn post_selection_decay() -> Verdict {
    let p = 0.1;
    let c = Circuit::parse("qubits 3\nprep q0 +\nprep q2 +i\nRZ(0.3) q0\nRZ(0.5) q1\nRZ(0.7) q2\nmeasure all").unwrap();
    let mut noise = NoiseModel::default();
    for q in 0..3 {
        noise.per_qubit_pauli.insert(q, [p, 0.0, 0.0]);
    }
    let mut worst = 0.0f64;
    let mut seen = Vec::new();
    for k in 1..=3 {
        let pairs: Vec<CheckPair> = (0..k).map(CheckPair::z).collect();
        let s = pcs::wrap(&c, &pairs).unwrap();
        let raw = sim::exact_distribution_scoped(
            &s.circuit,
            Some(&noise),
            &NoiseScope::Gates(s.body.clone()),
            &SimConfig::default(),
        )
        .unwrap();
        let r = pcs::post_select(&raw, &s.ancilla_bits).unwrap();
        let expected = (1.0 - p).powi(k as i32);
        worst = worst.max((r.retained_fraction - expected).abs());
        seen.push(format!("k={k}: {:.12}", r.retained_fraction));
    }
    verdict(
        worst <= DECAY_TOL,
        format!("{} vs (1-p)^k, max error {worst:.2e}", seen.join(", ")),
    )
}

struct Comparisons {
    /// Per Hamiltonian: (recombined error, unmitigated error) per seed.
    errors: BTreeMap<&'static str, Vec<(f64, f64)>>,
    /// Every group recombination's marginal deviation.
    deltas: Vec<(String, f64)>,
    secs: f64,
}

fn run_comparisons() -> Comparisons {
    let start = Instant::now();
    let mut errors = BTreeMap::new();
    let mut deltas = Vec::new();
    for name in ["h4a", "h4b", "h4c"] {
        let c = common::ansatz(name);
        let h = common::hamiltonian(name);
        let mut rows = Vec::new();
        for i in 0..E2E_SEEDS {
            let mut cfg = ComparisonConfig::new(E2E_SHOTS, sqem::seed::derive_seed(0, &format!("seed{i}")));
            cfg.recombination.threshold = RECOMBINE_THRESHOLD;
            cfg.include_pcs = false;
            let cmp = run_comparison(&c, &h, &mild_noise(), &cfg).unwrap();
            let e = |m: &str| cmp.report(m).unwrap().energy;
            let e0 = e("noiseless");
            rows.push(((e("recombined") - e0).abs(), (e("unmitigated") - e0).abs()));
            for g in &cmp.recombination {
                deltas.push((format!("{name}/seed{i}/group{}", g.group), g.delta));
            }
        }
        errors.insert(name, rows);
    }
    Comparisons {
        errors,
        deltas,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn max_abs_diff(a: &Distribution, b: &Distribution) -> f64 {
    a.iter()
        .map(|(k, w)| (w - b.get(k)).abs())
        .chain(b.iter().map(|(k, w)| (w - a.get(k)).abs()))
        .fold(0.0, f64::max)
}

// 5
fn recombination_contract(cmp: &Comparisons) -> Verdict {
    let cfg = RecombinationConfig {
        threshold: RECOMBINE_THRESHOLD,
        ..RecombinationConfig::default()
    };
    let mut deltas = cmp.deltas.clone();
    let mut fixed_point = 0.0f64;
    let mut campaigns = 0;
    for (name, c) in common::corpus().into_iter().filter(|(_, c)| fully_measured(c)) {
        let qubits: Vec<usize> = (0..c.num_qubits())
            .filter(|&k| sqem::sqem::build_check(&c, k, CheckFrame::Auto).is_ok())
            .collect();
        if qubits.is_empty() {
            continue;
        }
        let campaign = run_campaign(&CampaignConfig {
            circuit: c,
            noise: mild_noise(),
            qubits,
            shots: Some(E2E_SHOTS),
            seed: 0,
            frame: CheckFrame::Auto,
            placement: TerminalPlacement::Mitigation,
        })
        .unwrap();
        campaigns += 1;
        let pum = &campaign.unmitigated.distribution;
        let r = recombine(pum, &campaign.mitigated, &cfg).unwrap();
        deltas.push((format!("corpus/{name}"), r.delta));
        let same: BTreeMap<usize, Distribution> = campaign.mitigated.keys().map(|&k| (k, pum.clone())).collect();
        let fp = recombine(pum, &same, &cfg).unwrap();
        fixed_point = fixed_point.max(max_abs_diff(&fp.distribution, pum));
        for (&k, m) in &campaign.mitigated {
            let dev = (bitwise_marginal(&r.distribution, k, 0).unwrap() - bitwise_marginal(m, k, 0).unwrap()).abs();
            assert!(dev <= r.delta + 1e-15, "reported delta understates qubit {k} deviation");
        }
    }
    let gate = DELTA_FACTOR * RECOMBINE_THRESHOLD;
    let over: Vec<String> = deltas
        .iter()
        .filter(|(_, d)| *d > gate)
        .map(|(n, d)| format!("{n}={d:.2e}"))
        .collect();
    let (worst_name, worst) = deltas
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap_or_default();
    let shown: Vec<&String> = over.iter().take(4).collect();
    verdict(
        over.is_empty() && fixed_point <= FIXED_POINT_TOL,
        format!(
            "{} recombinations ({campaigns} corpus campaigns + {} comparison groups), max delta {worst:.2e} at {worst_name}, \
             {} above {gate:.0e} {shown:?}; fixed point max diff {fixed_point:.1e}",
            deltas.len(),
            cmp.deltas.len(),
            over.len(),
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// 6
fn end_to_end_improvement(cmp: &Comparisons) -> Verdict {
    let mut pass = cmp.secs < E2E_BUDGET_SECS;
    let mut parts = Vec::new();
    for (name, rows) in &cmp.errors {
        let improved = rows.iter().filter(|(rec, um)| rec < um).count();
        let med = median(rows.iter().map(|r| r.0).collect());
        let ok = improved as f64 >= E2E_IMPROVED_FRACTION * rows.len() as f64 && med <= CHEMICAL_ACCURACY;
        pass &= ok;
        parts.push(format!(
            "{name}: improved {improved}/{}, median error {med:.5} (unmitigated {:.5})",
            rows.len(),
            median(rows.iter().map(|r| r.1).collect())
        ));
    }
    verdict(pass, format!("{}; {:.1}s", parts.join("; "), cmp.secs))
}

// 7
fn scaling_accounting() -> Verdict {
    let c = common::ansatz("h6a");
    let mut counts = Vec::new();
    for n in 2..=6 {
        let campaign = run_campaign(&CampaignConfig {
            circuit: c.clone(),
            noise: mild_noise(),
            qubits: (0..n).collect(),
            shots: None,
            seed: 0,
            frame: CheckFrame::Auto,
            placement: TerminalPlacement::Mitigation,
        })
        .unwrap();
        counts.push((n, campaign.hardware_configurations));
    }
    let per_qubit = (counts[0].1 - 1) / counts[0].0;
    let exact = counts.iter().all(|&(n, count)| count == n * per_qubit + 1);
    verdict(exact, format!("counts {counts:?}, model n*{per_qubit}+1"))
}

fn sqem_bin(args: &[&str], out: &Path, jobs: &str) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_sqem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--jobs")
        .arg(jobs)
        .env_remove(sqem::cli::OUT_DIR_ENV)
        .status()
        .expect("spawn sqem");
    status.code().unwrap_or(-1)
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().to_string_lossy().into_owned();
        let mut bytes = std::fs::read(entry.path()).unwrap();
        if name == "manifest.json" {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
            v.as_object_mut().unwrap().remove("wall_clock_seconds");
            bytes = serde_json::to_vec(&v).unwrap();
        }
        out.insert(name, bytes);
    }
    out
}

// 8
fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let data = common::data_dir();
    let d = |rel: &str| data.join(rel).to_string_lossy().into_owned();
    let first_run: PathBuf = tmp.path().join("a/sqem");
    let mitigated: Vec<String> = (0..4)
        .map(|k| format!("{k}={}", first_run.join(format!("mitigated_q{k}.json")).display()))
        .collect();
    let unmitigated = first_run.join("unmitigated.json").display().to_string();
    let mut recombine_args = vec!["recombine", "--unmitigated", unmitigated.as_str()];
    for m in &mitigated {
        recombine_args.extend(["--mitigated", m.as_str()]);
    }
    let (circuit, bell, noise) = (
        d("circuits/ansatz_h4b.txt"),
        d("circuits/bell.txt"),
        d("noise/device_like.json"),
    );
    let (ans, params, ham) = (d("ansatz/h4b.json"), d("params/h4b.json"), d("hamiltonians/h4b.txt"));
    let mixed = d("circuits/mixed3.txt");
    let invocations: Vec<(&str, Vec<&str>)> = vec![
        (
            "simulate",
            vec!["simulate", "--circuit", &bell, "--shots", "100", "--seed", "1"],
        ),
        (
            "simulate_noisy",
            vec![
                "simulate",
                "--circuit",
                &circuit,
                "--noise",
                &noise,
                "--shots",
                "5000",
                "--seed",
                "9",
            ],
        ),
        (
            "cut",
            vec![
                "cut",
                "--circuit",
                &mixed,
                "--cut",
                "q1@3",
                "--shots-per-variant",
                "2000",
                "--seed",
                "4",
            ],
        ),
        (
            "pcs",
            vec![
                "pcs",
                "--circuit",
                &circuit,
                "--check-qubit",
                "1",
                "--check-qubit",
                "3",
                "--run",
                "--noise",
                &noise,
                "--shots",
                "4000",
                "--seed",
                "5",
            ],
        ),
        (
            "sqem",
            vec![
                "sqem",
                "run",
                "--circuit",
                &circuit,
                "--noise",
                &noise,
                "--qubits",
                "0,1,2,3",
                "--shots",
                "3000",
                "--seed",
                "6",
            ],
        ),
        ("recombine", recombine_args.clone()),
        (
            "vqe",
            vec![
                "vqe", "compare", "--ansatz", &ans, "--params", &params, "--ham", &ham, "--noise", &noise, "--shots",
                "2000", "--seeds", "2", "--seed", "7",
            ],
        ),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (label, args) in &invocations {
        let a = tmp.path().join("a").join(label);
        let b = tmp.path().join("b").join(label);
        let (ca, cb) = (sqem_bin(args, &a, "1"), sqem_bin(args, &b, "4"));
        if ca != 0 || cb != 0 {
            mismatches.push(format!("{label}: exit codes {ca}/{cb}"));
            continue;
        }
        let (fa, fb) = (artifacts(&a), artifacts(&b));
        if fa.keys().ne(fb.keys()) {
            mismatches.push(format!("{label}: different file sets"));
        }
        for (name, bytes) in &fa {
            compared += 1;
            if fb.get(name) != Some(bytes) {
                mismatches.push(format!("{label}/{name}"));
            }
        }
    }
    verdict(
        mismatches.is_empty() && compared > 0,
        format!(
            "{} invocations, {compared} artifacts byte-identical across 1 and 4 worker threads (manifest wall-clock excluded); mismatches {mismatches:?}",
            invocations.len()
        ),
    )
}

fn guarded(f: impl FnOnce() -> Verdict + std::panic::UnwindSafe) -> Verdict {
    std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        verdict(false, format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let cmp = std::panic::catch_unwind(run_comparisons).ok();
    let cmp_ref = cmp.as_ref();
    let missing = || verdict(false, "comparison sweep panicked");
    let results = [
        (
            "cut reconstruction matches uncut simulation",
            guarded(cut_reconstruction_oracle),
        ),
        (
            "check condition agrees with dense oracle",
            guarded(check_condition_soundness),
        ),
        ("checks remove X/Y errors, leave Z errors", guarded(pcs_error_removal)),
        ("post-selection retains (1-p)^k", guarded(post_selection_decay)),
        (
            "recombination reaches protected marginals",
            cmp_ref.map_or_else(missing, |c| guarded(|| recombination_contract(c))),
        ),
        (
            "recombined energy beats unmitigated and reaches chemical accuracy",
            cmp_ref.map_or_else(missing, |c| guarded(|| end_to_end_improvement(c))),
        ),
        ("hardware configurations grow linearly", guarded(scaling_accounting)),
        ("repeated runs are byte-identical", guarded(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{name}]: {tag} ({})", i + 1, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
