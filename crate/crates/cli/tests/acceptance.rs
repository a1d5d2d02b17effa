//! Acceptance suite.
//!
//! Prints one PASS/FAIL line per criterion, preceded by its individual
//! checks. Criteria listed in `KNOWN_DEVIATIONS` are still evaluated and
//! reported as FAIL when they fail; the process exits non-zero only when
//! some other criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cvqkd_cli::pipeline::classify_at;
use cvqkd_cli::ExperimentConfig;
use cvqkd_core::metrics::{complexity_classical, complexity_quantum, roc_macro};
use cvqkd_core::optics::{generate_dataset, ChannelModel, Constellation, Dataset};
use cvqkd_core::qknn::{
    amplitude_estimate, classical_knn_predict, compute_similarity_table, grover_initial_state,
    grover_iteration, qknn_predict, register_size, Mode, QknnConfig, SimilarityMetric, TrainingSet,
};
use cvqkd_core::qsim::{Span, StateVector};
use cvqkd_core::rng::{stage_stream, stream, ExperimentRng};
use cvqkd_core::secrate::{key_rate, KeyRateInputs, Scheme};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

include!("../../core/tests/data/keyrate_cases.rs");

const SEED: u64 = 0x5eed_acce;

/// Criteria expected to fail; see the README.
const KNOWN_DEVIATIONS: &[u8] = &[4, 5];

struct Check {
    pass: bool,
    what: String,
}

fn check(pass: bool, what: impl Into<String>) -> Check {
    Check {
        pass,
        what: what.into(),
    }
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn random_state(n: usize, rng: &mut ExperimentRng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_unnormalized(amps).unwrap()
}

fn criterion_1() -> Vec<Check> {
    let mut rng = stream(SEED, stage_stream(10, 0));
    let mut worst = 0.0f64;
    for i in 0..500 {
        let n = 1 + i % 4;
        let a = random_state(n, &mut rng);
        let b = random_state(n, &mut rng);
        let overlap: Complex64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| x.conj() * y)
            .sum();
        let f = overlap.norm_sqr();
        let mut s = StateVector::new(1)
            .unwrap()
            .tensor(&a)
            .unwrap()
            .tensor(&b)
            .unwrap();
        s.cswap_test(0, Span::new(1, n), Span::new(1 + n, n))
            .unwrap();
        let p0 = s.probability_of(Span::single(0), 0).unwrap();
        worst = worst.max((p0 - (1.0 + f) / 2.0).abs());
    }

    let mut cmp_ok = true;
    let mut cases = 0;
    for w in 1..=4usize {
        let (iv, mv, flag) = (Span::new(0, w), Span::new(w, w), 2 * w);
        let anc = Span::new(2 * w + 1, w.saturating_sub(1));
        let n = 2 * w + 1 + anc.width;
        for i in 0..1usize << w {
            for m in 0..1usize << w {
                for f0 in 0..2usize {
                    let start = i | m << w | f0 << flag;
                    let want = start ^ (usize::from(i > m) << flag);
                    let mut direct = StateVector::basis(n, start).unwrap();
                    direct.apply_cmp(iv, mv, flag).unwrap();
                    let mut cascade = StateVector::basis(n, start).unwrap();
                    cascade.apply_cmp_cascade(iv, mv, flag, anc).unwrap();
                    cmp_ok &= (direct.amplitude(want).re - 1.0).abs() < 1e-12;
                    cmp_ok &= (cascade.amplitude(want).re - 1.0).abs() < 1e-12;
                    cases += 1;
                }
            }
        }
    }
    vec![
        check(
            worst <= 1e-10,
            format!("swap test P(0) = (1+F)/2 on 500 random pairs, max error {worst:.1e}"),
        ),
        check(
            cmp_ok,
            format!(
                "CMP (direct and gate cascade) equals i > M on all {cases} basis inputs, m <= 4"
            ),
        ),
    ]
}

fn criterion_2() -> Vec<Check> {
    let mut rng = stream(SEED, stage_stream(11, 0));
    let mut worst_p = 0.0f64;
    let mut worst_amp = 0.0f64;
    for m in [16usize, 64, 128] {
        for t in [1usize, 2, 4] {
            let marked: Vec<usize> = sample(&mut rng, m, t).into_vec();
            let is_marked = |j: usize| marked.contains(&j);
            let theta = (t as f64 / m as f64).sqrt().asin();
            let l = (PI / (4.0 * theta)).floor() as u64;
            let (mut s, span) = grover_initial_state(m).unwrap();
            for _ in 0..l {
                grover_iteration(&mut s, span, m, &is_marked).unwrap();
            }
            let p: f64 = marked
                .iter()
                .map(|&j| s.amplitude(span.deposit(0, j + 1)).norm_sqr())
                .sum();
            worst_p = worst_p.max((p - ((2 * l + 1) as f64 * theta).sin().powi(2)).abs());

            let (mut s, span) = grover_initial_state(m).unwrap();
            grover_iteration(&mut s, span, m, &is_marked).unwrap();
            let (mf, tf) = (m as f64, t as f64);
            for j in 0..m {
                let want = if is_marked(j) {
                    3.0 * mf - 4.0 * tf
                } else {
                    mf - 4.0 * tf
                } / (mf * mf.sqrt());
                worst_amp = worst_amp.max((s.amplitude(span.deposit(0, j + 1)) - want).norm());
            }
        }
    }
    vec![
        check(worst_p <= 1e-10, format!("marked probability after floor(pi/4theta) iterations, max error {worst_p:.1e}")),
        check(worst_amp <= 1e-12, format!("one iteration gives (3M-4t)/M/sqrt(M) and (M-4t)/M/sqrt(M), max error {worst_amp:.1e}")),
    ]
}

fn criterion_3() -> Vec<Check> {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for r in [16usize, 64, 131] {
        let bound = PI / r as f64 + (PI / r as f64).powi(2);
        for i in 0..=10 {
            let a = i as f64 / 10.0;
            let est = amplitude_estimate(a, r).unwrap().estimate;
            let err = (a - est).abs();
            ok &= err <= bound;
            worst = worst.max(err / bound);
        }
    }
    vec![
        check(
            ok,
            format!(
                "|a - a~| <= pi/R + pi^2/R^2 for 33 (a, R) pairs, worst error/bound {worst:.3}"
            ),
        ),
        check(register_size(0.1) == Some(131), "delta = 0.1 gives R = 131"),
    ]
}

/// Training set of `m` points and one query, both from 8PSK at 5 km.
fn scene(m: usize, i: u64) -> (TrainingSet, Vec<f64>) {
    let c = Constellation::new(8, 31.95).unwrap();
    let d = generate_dataset(m + 1, &ChannelModel::at(5.0), &c, SEED ^ i, 4).unwrap();
    let mut samples = d.samples.clone();
    let q = samples.pop().unwrap();
    let train = Dataset { samples, ..d }.to_training_set().unwrap();
    let v0 = train.normalize_query(&q.distances);
    (train, v0)
}

fn boundary_gap(train: &TrainingSet, v0: &[f64], k: usize) -> bool {
    let table = compute_similarity_table(train, v0, 131, Mode::Analytic, None).unwrap();
    let mut s: Vec<u32> = table.sims().collect();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s[k - 1] > s[k]
}

fn criterion_4() -> Vec<Check> {
    let analytic = QknnConfig::default();
    let (mut qualifying, mut attempts, mut agree) = (0, 0u64, 0);
    while qualifying < 500 {
        let (train, v0) = scene(64, attempts);
        let mut rng = stream(SEED, stage_stream(12, attempts));
        attempts += 1;
        if !boundary_gap(&train, &v0, 15) {
            continue;
        }
        qualifying += 1;
        let q = qknn_predict(&train, &v0, 15, &analytic, None, &mut rng).unwrap();
        let c = classical_knn_predict(&train, &v0, 15, SimilarityMetric::Fidelity).unwrap();
        let (mut a, mut b) = (q.neighbors.clone(), c.neighbors.clone());
        a.sort_unstable();
        b.sort_unstable();
        agree += usize::from(a == b && q.label == c.label);
    }

    let gate = QknnConfig {
        mode: Mode::Gate,
        ..analytic
    };
    let n = 1000u64;
    let (mut gate_agree, mut gap_total, mut gap_agree, mut analytic_agree) = (0, 0, 0, 0);
    for i in 0..n {
        let (train, v0) = scene(16, 1 << 32 | i);
        let mut rng = stream(SEED, stage_stream(13, i));
        let g = qknn_predict(&train, &v0, 3, &gate, None, &mut rng).unwrap();
        let a = qknn_predict(&train, &v0, 3, &analytic, None, &mut rng).unwrap();
        let c = classical_knn_predict(&train, &v0, 3, SimilarityMetric::Fidelity).unwrap();
        let ok = g.label == c.label;
        gate_agree += usize::from(ok);
        analytic_agree += usize::from(a.label == c.label);
        if boundary_gap(&train, &v0, 3) {
            gap_total += 1;
            gap_agree += usize::from(ok);
        }
    }
    let rate = gate_agree as f64 / n as f64;
    vec![
        check(
            agree == 500,
            format!("analytic M=64 k=15: {agree}/500 qualifying queries agree (set and label), {attempts} drawn"),
        ),
        check(
            rate >= 0.99,
            format!(
                "gate M=16 k=3 R=131: {gate_agree}/{n} labels agree ({:.1}%); analytic on the same queries \
                 {analytic_agree}/{n}; gate with a strict Sim gap at k {gap_agree}/{gap_total}",
                100.0 * rate
            ),
        ),
    ]
}

fn criterion_5() -> Vec<Check> {
    let c = complexity_classical(8, 128, 15);
    let q = complexity_quantum(8, 128, 15, 0.1).unwrap().quantum_total;
    // U M + M log2 M + k and M log2^2 U + R + sqrt(kM) + k
    let want_c = 8.0 * 128.0 + 128.0 * 7.0 + 15.0;
    let want_q = 128.0 * 9.0 + 131.0 + (15.0f64 * 128.0).sqrt() + 15.0;
    let losing: Vec<usize> = (32..=4096)
        .filter(|&m| {
            let r = complexity_quantum(8, m, 15, 0.1).unwrap();
            r.quantum_total >= r.classical_total
        })
        .collect();
    vec![
        check(
            c == 1935.0 && c == want_c,
            format!("classical(8, 128, 15) = {c}"),
        ),
        check(
            (q - 1341.8).abs() <= 0.1 && (q - want_q).abs() < 1e-9,
            format!("quantum(8, 128, 15, 0.1) = {q:.4}"),
        ),
        check(
            losing.is_empty(),
            if losing.is_empty() {
                "quantum < classical for every M in 32..=4096".to_string()
            } else {
                format!(
                    "quantum >= classical for M in {}..={} ({} values); first winning M is {}",
                    losing[0],
                    losing[losing.len() - 1],
                    losing.len(),
                    losing[losing.len() - 1] + 1
                )
            },
        ),
    ]
}

fn distance_config() -> ExperimentConfig {
    let mut cfg =
        ExperimentConfig::load(&repo_root().join("configs/precision_vs_distance.toml")).unwrap();
    let cl = cfg.classification.as_mut().unwrap();
    cl.k = vec![15];
    cfg
}

fn precision_auc(cfg: &ExperimentConfig, v_m: f64, km: f64) -> (f64, f64) {
    let mut cfg = cfg.clone();
    cfg.constellation.v_m = v_m;
    let cl = cfg.classification.clone().unwrap();
    let r = classify_at(&cfg, &cl, km, &[15]).unwrap();
    (r.per_k[0].precision.average, r.per_k[0].roc.auc)
}

/// Bisects `V_m` so that the 5 km precision at k = 15 meets the reference
/// value 0.9541.
fn calibrate(cfg: &ExperimentConfig) -> (f64, f64) {
    let (mut lo, mut hi) = (5.0, 80.0);
    let mut best = (cfg.constellation.v_m, f64::NAN);
    for _ in 0..10 {
        let mid = 0.5 * (lo + hi);
        let (p, _) = precision_auc(cfg, mid, 5.0);
        best = (mid, p);
        if (p - 0.9541).abs() < 0.002 {
            break;
        }
        if p < 0.9541 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

fn criterion_6(v_m: &mut f64) -> Vec<Check> {
    let cfg = distance_config();
    let (cal, p_cal) = calibrate(&cfg);
    *v_m = cal;
    let distances = [5.0, 10.0, 20.0, 30.0, 40.0, 50.0];
    let rows: Vec<(f64, f64)> = distances
        .iter()
        .map(|&d| precision_auc(&cfg, cal, d))
        .collect();
    let precision: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let decreasing = precision.windows(2).all(|w| w[1] < w[0]);
    let (auc5, auc50) = (rows[0].1, rows[5].1);

    let mut rng = stream(SEED, stage_stream(14, 0));
    let truth: Vec<usize> = (0..2000).map(|_| rng.random_range(0..8)).collect();
    let scores: Vec<Vec<f64>> = (0..2000)
        .map(|_| (0..8).map(|_| rng.random()).collect())
        .collect();
    let random_auc = roc_macro(&scores, &truth).unwrap().auc;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    vec![
        check(
            (0.90..=0.99).contains(&precision[0]),
            format!(
                "V_m calibrated to {cal:.3} (5 km precision {p_cal:.4}); precision at 5 km {:.4}",
                precision[0]
            ),
        ),
        check(
            decreasing,
            format!(
                "precision at 5,10,20,30,40,50 km decreases: {}",
                fmt(&precision)
            ),
        ),
        check(auc5 >= 0.97, format!("AUC at 5 km {auc5:.4}")),
        check(
            (0.70..=0.90).contains(&auc50),
            format!("AUC at 50 km {auc50:.4}"),
        ),
        check(
            (random_auc - 0.5).abs() <= 0.02,
            format!("random-score AUC {random_auc:.4}"),
        ),
    ]
}

fn rate(n: usize, v_m: f64, loss: f64, lambda: f64, scheme: Scheme) -> f64 {
    let inputs = KeyRateInputs {
        lambda_q: lambda,
        ..KeyRateInputs::new(n, v_m).at_loss_db(loss)
    };
    key_rate(&inputs, scheme).unwrap().k
}

fn criterion_7(v_m: f64) -> Vec<Check> {
    let cfg = distance_config();
    let losses: Vec<f64> = (0..=25).map(f64::from).collect();
    let lambda: Vec<f64> = losses
        .iter()
        .map(|&l| precision_auc(&cfg, v_m, l / 0.2).1)
        .collect();

    let mut beats = true;
    let mut closest = f64::INFINITY;
    let mut chi_ok = true;
    for (&loss, &lam) in losses.iter().zip(&lambda) {
        let q = rate(8, 0.38, loss, lam, Scheme::Qknn);
        let c = rate(8, 0.38, loss, 1.0, Scheme::Conventional);
        beats &= q > c;
        closest = closest.min(q - c);
        let chi8 = key_rate(
            &KeyRateInputs::new(8, 0.38).at_loss_db(loss),
            Scheme::Conventional,
        )
        .unwrap()
        .chi_be;
        let chi4 = key_rate(
            &KeyRateInputs::new(4, 0.33).at_loss_db(loss),
            Scheme::Conventional,
        )
        .unwrap()
        .chi_be;
        chi_ok &= chi8 / 8.0 < chi4 / 4.0;
    }

    let lam2 = lambda[2];
    let qknn: Vec<f64> = (1..=20)
        .map(|i| rate(8, i as f64 / 10.0, 2.0, lam2, Scheme::Qknn))
        .collect();
    let increasing = qknn.windows(2).all(|w| w[1] > w[0]);
    let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    let interior = |n: usize| {
        let k: Vec<f64> = grid
            .iter()
            .map(|&v| rate(n, v, 2.0, 1.0, Scheme::Conventional))
            .collect();
        let arg = k
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        (arg > 0 && arg + 1 < k.len(), grid[arg])
    };
    let (qpsk_ok, qpsk_at) = interior(4);
    let (psk8_ok, psk8_at) = interior(8);

    let mut worst = 0.0f64;
    for &(n, v_m, db, i_ab, _z, lambda, chi) in CASES {
        let r = key_rate(
            &KeyRateInputs::new(n, v_m).at_loss_db(db),
            Scheme::Conventional,
        )
        .unwrap();
        worst = worst.max((r.i_ab - i_ab).abs()).max((r.chi_be - chi).abs());
        for (got, want) in r.spectrum.lambda.iter().zip(lambda) {
            worst = worst.max((got - want).abs());
        }
    }
    vec![
        check(
            beats,
            format!(
                "K_qknn > K_8PSK at 0..25 dB with measured AUC ({:.4} at 0 dB .. {:.4} at 25 dB), min margin {closest:.3e}",
                lambda[0], lambda[25]
            ),
        ),
        check(increasing, format!("K_qknn increases on V_m = 0.1..2.0 at 2 dB (AUC {lam2:.4})")),
        check(qpsk_ok, format!("conventional QPSK has an interior maximum at V_m = {qpsk_at:.2}")),
        check(psk8_ok, format!("conventional 8PSK has an interior maximum at V_m = {psk8_at:.2}")),
        check(chi_ok, "chi_BE/8 (8PSK) < chi_BE/4 (QPSK) at every loss"),
        check(worst <= 1e-8, format!("I_AB, lambda_i, chi_BE match the scripted oracle, max error {worst:.1e}")),
    ]
}

fn cvqkd(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_cvqkd"))
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn csv_files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn criterion_8() -> Vec<Check> {
    let tmp = tempfile::tempdir().unwrap();
    let root = repo_root();
    let cfg = |name: &str| {
        root.join("configs")
            .join(name)
            .to_string_lossy()
            .into_owned()
    };
    let commands: [(&str, Vec<String>); 3] = [
        (
            "run complexity",
            vec!["run".into(), "--config".into(), cfg("complexity.toml")],
        ),
        (
            "run auc_and_keyrate",
            vec!["run".into(), "--config".into(), cfg("auc_and_keyrate.toml")],
        ),
        (
            "sweep keyrate_vs_modulation over v_m",
            vec![
                "sweep".into(),
                "--config".into(),
                cfg("keyrate_vs_modulation.toml"),
                "--param".into(),
                "v_m".into(),
                "--range".into(),
                "0.05:2.0:0.05".into(),
            ],
        ),
    ];
    let mut checks = Vec::new();
    for (i, (name, args)) in commands.iter().enumerate() {
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        let run = |out: &Path, threads: &str| {
            let mut v: Vec<&str> = args.iter().map(String::as_str).collect();
            let out = out.to_string_lossy().into_owned();
            v.extend(["--out", &out, "--threads", threads]);
            cvqkd(&v)
        };
        let ran = run(&a, "1") && run(&b, "3");
        let (fa, fb) = (csv_files(&a), csv_files(&b));
        let same = ran && !fa.is_empty() && fa == fb;
        checks.push(check(
            same,
            format!(
                "{name}: {} CSV files byte-identical across two runs (1 and 3 threads)",
                fa.len()
            ),
        ));
    }
    checks
}

type Criterion = (
    u8,
    &'static str,
    u64,
    Box<dyn FnOnce(&mut f64) -> Vec<Check>>,
);

fn main() {
    let mut failed = Vec::new();
    let mut v_m = 31.95;
    let criteria: Vec<Criterion> = vec![
        (1, "circuit exactness", 60, Box::new(|_| criterion_1())),
        (2, "Grover closed form", 120, Box::new(|_| criterion_2())),
        (3, "amplitude estimation", 180, Box::new(|_| criterion_3())),
        (4, "oracle equivalence", 300, Box::new(|_| criterion_4())),
        (5, "complexity reproduction", 1, Box::new(|_| criterion_5())),
        (6, "metrics calibration band", 300, Box::new(criterion_6)),
        (7, "key-rate properties", 120, Box::new(|v| criterion_7(*v))),
        (8, "determinism", 600, Box::new(|_| criterion_8())),
    ];
    for (id, title, limit, f) in criteria {
        let t = Instant::now();
        let mut checks = f(&mut v_m);
        let elapsed = t.elapsed();
        checks.push(check(
            elapsed <= Duration::from_secs(limit),
            format!("runtime {:.1} s (limit {limit} s)", elapsed.as_secs_f64()),
        ));
        for c in &checks {
            println!("    {} {}", if c.pass { "ok  " } else { "FAIL" }, c.what);
        }
        let pass = checks.iter().all(|c| c.pass);
        let note = if !pass && KNOWN_DEVIATIONS.contains(&id) {
            " (known deviation)"
        } else {
            ""
        };
        println!(
            "{} criterion {id}: {title}{note}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass && !KNOWN_DEVIATIONS.contains(&id) {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("unexpected failures: {failed:?}");
        std::process::exit(1);
    }
}
