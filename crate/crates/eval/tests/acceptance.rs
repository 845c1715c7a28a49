//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any line fails.
//!
//! Real-dataset criteria read bundles from `$GEBT_DATA_DIR/<name>` (default
//! `<workspace>/data/<name>`). Lines tagged `[SBM proxy]` rerun the same
//! accuracy and cost checks on the synthetic fixture.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use gebt::pipeline::train_gcn;
use gebt::{load_bundle, run_baseline, run_geb, run_joint_eb, run_random_prune, save_bundle, RunConfig, RunRecord};
use gebt_core::flops::{inference_flops, stored_entries, CONVENTION};
use gebt_core::sparsify::{derive_mask, derive_weight_mask, kept_count};
use gebt_core::train::{weight_epoch, Problem};
use gebt_core::{
    apply_weight_prune, gen_synthetic, init_params, mask_distance, normalize_adjacency, pairwise_distance_matrix,
    DetectorConfig, EbDetector, GraphDataset, PruneMask, TrainConfig,
};
use gebt_eval::{data_dir, find_bundle, mean, sbm_config, sbm_fixture, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::gradcheck;

/// When set, this binary behaves as the `gebt` CLI so that determinism can be
/// checked across separate processes.
const AS_CLI: &str = "GEBT_ACCEPTANCE_AS_CLI";

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const GEB_RATIOS: [f64; 3] = [0.1, 0.3, 0.5];
const TIME_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<(bool, String), String>;

fn verdict(id: &str, outcome: Outcome) -> Verdict {
    match outcome {
        Ok((pass, detail)) => Verdict::new(id, pass, detail),
        Err(e) => Verdict::new(id, false, format!("run failed: {e}")),
    }
}

/// Runs on one dataset, cached by (kind, p_g, p_w, seed).
struct Lab {
    ds: GraphDataset,
    cfg: RunConfig,
    runs: HashMap<(&'static str, u64, u64, u64), RunRecord>,
    plain: HashMap<u64, f64>,
}

impl Lab {
    fn new(ds: GraphDataset, cfg: RunConfig) -> Self {
        Self { ds, cfg, runs: HashMap::new(), plain: HashMap::new() }
    }

    fn run(&mut self, kind: &'static str, p_g: f64, p_w: f64, seed: u64) -> Result<&RunRecord, String> {
        let key = (kind, p_g.to_bits(), p_w.to_bits(), seed);
        if !self.runs.contains_key(&key) {
            let cfg = RunConfig { p_g, p_w, seed, ..self.cfg.clone() };
            let rec = match kind {
                // The baseline draws its ticket at the last graph epoch.
                "baseline" => run_baseline(&self.ds, &cfg),
                "geb" => run_geb(&self.ds, &cfg),
                "joint" => run_joint_eb(&self.ds, &cfg),
                "random" => run_random_prune(&self.ds, &cfg),
                _ => unreachable!("unknown run kind {kind}"),
            }
            .map_err(|e| e.to_string())?;
            if let Some(e) = &rec.error {
                return Err(e.clone());
            }
            self.runs.insert(key, rec);
        }
        Ok(&self.runs[&key])
    }

    fn acc(&mut self, kind: &'static str, p_g: f64, p_w: f64, seed: u64) -> Result<f64, String> {
        Ok(self.run(kind, p_g, p_w, seed)?.final_test_acc)
    }

    /// Test accuracy of the unpruned GCN at its best validation epoch.
    fn plain_acc(&mut self, seed: u64) -> Result<f64, String> {
        if let Some(&a) = self.plain.get(&seed) {
            return Ok(a);
        }
        let cfg = RunConfig { seed, ..self.cfg.clone() };
        let (_, best, _) = train_gcn(&self.ds, &cfg).map_err(|e| e.to_string())?;
        self.plain.insert(seed, best.test);
        Ok(best.test)
    }

    fn mean_plain(&mut self) -> Result<f64, String> {
        let accs = SEEDS.iter().map(|&s| self.plain_acc(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(mean(accs))
    }

    fn dense_inference(&self) -> Result<u64, String> {
        let ds = &self.ds;
        let dims = [ds.feature_dim(), self.cfg.hidden, ds.num_classes()];
        let f = inference_flops(ds.num_nodes(), stored_entries(ds.num_nodes(), ds.num_edges()), &dims, 0.0)
            .map_err(|e| e.to_string())?;
        Ok(f.total())
    }
}

fn pts(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn c1_gradients() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut n_w, mut n_e, mut worst_w, mut worst_e) = (0, 0, 0.0f64, 0.0f64);
    while n_w < 100 || n_e < 100 {
        let inst = support::random_instance(&mut rng, 10, 4);
        if inst.min_abs_preactivation() < 1e-3 {
            continue;
        }
        if n_w < 100 {
            let wd = if n_w % 2 == 0 { 0.0 } else { 5e-4 };
            worst_w = worst_w.max(gradcheck::weight_gradient_error(&inst, wd));
            n_w += 1;
        }
        if n_e < 100 && !inst.edges.is_empty() {
            let lambda = if n_e % 2 == 0 { 0.0 } else { 0.01 };
            worst_e = worst_e.max(gradcheck::edge_gradient_error(&inst, lambda));
            n_e += 1;
        }
    }
    let took = start.elapsed();
    Verdict::new(
        "C1 gradient correctness",
        worst_w < 1e-5 && worst_e < 1e-4 && took < TIME_LIMIT,
        format!(
            "max rel err weights {worst_w:.2e} (< 1e-5, {n_w} instances), edges {worst_e:.2e} (< 1e-4, {n_e} \
             instances), {:.2}s (< 60s)",
            took.as_secs_f64()
        ),
    )
}

fn c2_baseline(labs: &mut HashMap<&str, Lab>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, target, tol) in [("cora", 0.809, 0.020), ("citeseer", 0.694, 0.025), ("pubmed", 0.790, 0.020)] {
        let lab = labs.get_mut(name).expect("caller checked presence");
        let start = Instant::now();
        let acc = lab.mean_plain()?;
        let ok = (acc - target).abs() <= tol;
        pass &= ok;
        parts.push(format!(
            "{name} {} (target {} ± {}, {:.0}s)",
            pts(acc),
            pts(target),
            pts(tol),
            start.elapsed().as_secs_f64()
        ));
    }
    Ok((pass, parts.join("; ")))
}

/// Detector-drawn ticket against the ticket drawn at the last epoch, paired
/// by seed.
fn geb_vs_late(lab: &mut Lab) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut parts = Vec::new();
    for p in GEB_RATIOS {
        let mut diffs = Vec::new();
        for s in SEEDS {
            diffs.push(lab.acc("geb", p, 0.0, s)? - lab.acc("baseline", p, 0.0, s)?);
        }
        let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.min(min);
        parts.push(format!("p_g {p}: worst paired diff {} pts", pts(min)));
    }
    Ok((worst >= -0.02, format!("{} (need >= -2.00 for every seed)", parts.join(", "))))
}

fn early_emergence(labs: &mut [&mut Lab]) -> Outcome {
    let limit = 40;
    let mut pass = true;
    let mut parts = Vec::new();
    for lab in labs.iter_mut() {
        let epochs = lab.cfg.epochs;
        for p in GEB_RATIOS {
            let mut ts = Vec::new();
            for s in SEEDS {
                ts.push(lab.run("geb", p, 0.0, s)?.t_eb);
            }
            pass &= ts.iter().all(|t| t.is_some_and(|t| t <= limit));
            let shown: Vec<String> = ts.iter().map(|t| t.map_or("none".into(), |t| t.to_string())).collect();
            parts.push(format!("{} p_g {p}: t_EB [{}]", lab.ds.name(), shown.join(",")));
        }
        parts.push(format!("of {epochs} epochs"));
    }
    Ok((pass, format!("{} (need <= {limit})", parts.join("; "))))
}

fn joint_savings(lab: &mut Lab) -> Outcome {
    let (p_g, p_w) = (0.3, 0.9);
    let dense = lab.dense_inference()?;
    let mut worst_ratio = 0.0f64;
    let mut worst_infer = 1.0f64;
    let mut accs = Vec::new();
    for s in SEEDS {
        let base = lab.run("baseline", p_g, 0.0, s)?.train_flops;
        let joint = lab.run("joint", p_g, p_w, s)?;
        worst_ratio = worst_ratio.max(joint.train_flops as f64 / base as f64);
        worst_infer = worst_infer.min(1.0 - joint.infer_flops as f64 / dense as f64);
        accs.push(joint.final_test_acc);
    }
    let joint_acc = mean(accs);
    let plain = lab.mean_plain()?;
    let drop = plain - joint_acc;
    let pass = worst_ratio <= 0.5 && drop <= 0.025 && worst_infer >= 0.6;
    Ok((
        pass,
        format!(
            "train FLOPs joint/baseline max {worst_ratio:.3} (<= 0.5); acc {} vs unpruned {} (drop {} <= 2.50 pts); \
             inference reduction min {:.1}% (>= 60%)",
            pts(joint_acc),
            pts(plain),
            pts(drop),
            100.0 * worst_infer
        ),
    ))
}

fn random_dominance(lab: &mut Lab) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.3, 0.5] {
        let mut geb = Vec::new();
        let mut rnd = Vec::new();
        for s in SEEDS {
            geb.push(lab.acc("geb", p, 0.0, s)?);
            rnd.push(lab.acc("random", p, 0.0, s)?);
        }
        let (g, r) = (mean(geb), mean(rnd));
        pass &= g > r;
        parts.push(format!("p_g {p}: GEB {} vs random {}", pts(g), pts(r)));
    }
    Ok((pass, format!("{} (need GEB > random)", parts.join(", "))))
}

/// All vectors over `0..base` of length `len`.
fn words(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..base.pow(len as u32)).map(move |mut k| {
        (0..len)
            .map(|_| {
                let d = k % base;
                k /= base;
                d
            })
            .collect()
    })
}

fn masks(len: usize) -> Vec<PruneMask> {
    words(2, len).map(|w| PruneMask::from_bits(w.into_iter().map(|b| b == 1).collect(), 0.0)).collect()
}

/// Keep set by a full sort: magnitude descending, lower index first on ties.
fn reference_mask(m: &[f64], p: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.sort_by(|&a, &b| m[b].abs().total_cmp(&m[a].abs()).then(a.cmp(&b)));
    let mut out = vec![false; m.len()];
    for &i in &order[..((1.0 - p) * m.len() as f64).round() as usize] {
        out[i] = true;
    }
    out
}

/// Firing epoch of a FIFO of capacity `l` fed `dists[i]` at epoch `first + i`.
fn reference_fire(dists: &[f64], first: usize, l: usize, eta: f64) -> Option<usize> {
    (l..=dists.len()).find(|&n| dists[n - l..n].iter().all(|&d| d < eta)).map(|n| first + n - 1)
}

fn mask_and_detector_suites() -> Result<String, String> {
    let ratios: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).chain([0.3, 0.7, 0.9]).collect();
    let mut cases = 0usize;

    // Popcount, tie-breaking and nesting, over every magnitude vector on {0,1,2} up to length 7.
    for len in 1..=7 {
        for w in words(3, len) {
            let m: Vec<f64> = w.iter().map(|&d| d as f64).collect();
            let built: Vec<PruneMask> = ratios.iter().map(|&p| derive_mask(&m, p).unwrap()).collect();
            for (mask, &p) in built.iter().zip(&ratios) {
                if mask.popcount() != kept_count(len, p) || mask.bits() != &reference_mask(&m, p)[..] {
                    return Err(format!("mask of {m:?} at p={p} is {:?}", mask.bits()));
                }
                for (other, &q) in built.iter().zip(&ratios) {
                    if q >= p && other.bits().iter().zip(mask.bits()).any(|(t, l)| *t && !*l) {
                        return Err(format!("mask at p={q} not nested in p={p} for {m:?}"));
                    }
                }
                cases += 1;
            }
        }
    }

    // Metric axioms over every triple of masks up to length 4.
    for len in 1..=4 {
        let all = masks(len);
        for a in &all {
            for b in &all {
                let ab = mask_distance(a, b).unwrap();
                if (ab == 0.0) != (a == b) || ab != mask_distance(b, a).unwrap() || !(0.0..=1.0).contains(&ab) {
                    return Err(format!("metric axioms fail for {:?} {:?}", a.bits(), b.bits()));
                }
                for c in &all {
                    if ab > mask_distance(a, c).unwrap() + mask_distance(c, b).unwrap() + 1e-12 {
                        return Err("triangle inequality".into());
                    }
                    cases += 1;
                }
            }
        }
    }

    // FIFO semantics on every distance sequence over a small alphabet.
    let alphabet = [0.0, 0.05, 0.1 - 1e-12, 0.1, 0.2];
    for len in 1..=6 {
        for w in words(alphabet.len(), len) {
            let dists: Vec<f64> = w.iter().map(|&i| alphabet[i]).collect();
            for l in 1..=3 {
                let mut det = EbDetector::new(DetectorConfig { queue_len: l, eta: 0.1, ..Default::default() }).unwrap();
                let mut fired = None;
                for (i, &d) in dists.iter().enumerate() {
                    if det.push_distance(d, i + 1).unwrap() {
                        fired = Some(i + 1);
                        if det.push_distance(0.0, i + 2).is_ok() {
                            return Err("detector accepted a push after firing".into());
                        }
                        break;
                    }
                }
                if fired != reference_fire(&dists, 1, l, 0.1) || det.fired_at() != fired {
                    return Err(format!("queue {l} on {dists:?} fired at {fired:?}"));
                }
                cases += 1;
            }
        }
    }

    // Graph steps: the first epoch seeds, warm-up epochs are not queued.
    let all = masks(2);
    for len in 1..=6 {
        for w in words(all.len(), len) {
            for (l, skip) in [(1, 0), (2, 0), (3, 0), (1, 2), (2, 1)] {
                let cfg = DetectorConfig { queue_len: l, eta: 0.5, warmup_skip: skip, ..Default::default() };
                let mut det = EbDetector::new(cfg).unwrap();
                let mut fired = None;
                for (i, &k) in w.iter().enumerate() {
                    if det.geb_step(&all[k], i + 1).unwrap() {
                        fired = Some(i + 1);
                        break;
                    }
                }
                let first = skip.max(1) + 1;
                let queued: Vec<f64> =
                    (first..=len).map(|t| mask_distance(&all[w[t - 1]], &all[w[t - 2]]).unwrap()).collect();
                if fired != reference_fire(&queued, first, l, 0.5) {
                    return Err(format!("geb steps {w:?} (l={l}, skip={skip}) fired at {fired:?}"));
                }
                cases += 1;
            }
        }
    }

    // Pairwise distance matrices over every history of up to four 3-bit masks.
    let all = masks(3);
    for len in 1..=4 {
        for w in words(all.len(), len) {
            let hist: Vec<PruneMask> = w.iter().map(|&k| all[k].clone()).collect();
            let d = pairwise_distance_matrix(&hist).unwrap();
            for i in 0..len {
                for j in 0..len {
                    if d.get(i, j) != d.get(j, i) || d.get(i, j) != mask_distance(&hist[i], &hist[j]).unwrap() {
                        return Err(format!("pairwise matrix wrong for {w:?}"));
                    }
                }
            }
            cases += 1;
        }
    }

    // Pruned weights stay zero through real training epochs.
    let ds = gen_synthetic(1, 3, 20, 0.3, 0.02, 8).unwrap();
    let x = ds.feature_matrix(true);
    let adj = normalize_adjacency(&ds, &vec![1.0; ds.num_edges()], None).unwrap();
    let prob = Problem::new(&ds, &x);
    let train = TrainConfig::default();
    for seed in 0..20 {
        let mut params = init_params(8, train.hidden, 3, seed).unwrap();
        let mask = derive_weight_mask(&params, 0.05 * seed as f64, seed % 2 == 1).unwrap();
        apply_weight_prune(&mut params, &mask).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..30 {
            weight_epoch(&adj, &prob, &mut params, &train, &mut rng).unwrap();
        }
        if params.flat().iter().zip(mask.bits()).any(|(w, keep)| !keep && *w != 0.0) {
            return Err(format!("pruned weight revived (seed {seed})"));
        }
        cases += 1;
    }
    Ok(format!("{cases} exhaustive cases"))
}

fn c7_suites() -> Verdict {
    let start = Instant::now();
    let outcome = mask_and_detector_suites();
    let took = start.elapsed();
    let secs = took.as_secs_f64();
    match outcome {
        Ok(d) => Verdict::new("C7 mask/detector suites", took < TIME_LIMIT, format!("{d}, {secs:.2}s (< 60s)")),
        Err(e) => Verdict::new("C7 mask/detector suites", false, e),
    }
}

/// Drops the value of `wall_time_s` from a JSONL line.
fn without_wall_time(line: &str) -> Option<String> {
    let key = "\"wall_time_s\":";
    let at = line.find(key)? + key.len();
    let rest = &line[at..];
    let end = rest.find([',', '}']).unwrap_or(rest.len());
    Some(format!("{}{}", &line[..at], &rest[end..]))
}

fn only_file(dir: &Path, suffix: &str) -> Result<PathBuf, String> {
    let found: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(suffix))
        .collect();
    match found.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(format!("expected one *{suffix} in {}, found {}", dir.display(), found.len())),
    }
}

fn c8_determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let data = tmp.path().join("sbm");
    let ds = gen_synthetic(3, 3, 30, 0.2, 0.01, 24).map_err(|e| e.to_string())?;
    save_bundle(&ds, &data).map_err(|e| e.to_string())?;
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let mut checked = Vec::new();
    for (cmd, pw) in [("train-baseline", "0"), ("find-geb", "0"), ("find-joint-eb", "0.9"), ("random-prune", "0")] {
        let mut seen = Vec::new();
        for k in 0..2 {
            let out = tmp.path().join(format!("{cmd}-{k}"));
            let status = Command::new(&exe)
                .env(AS_CLI, "1")
                .arg(cmd)
                .args(["--dataset", data.to_str().unwrap(), "--pg", "0.3", "--pw", pw, "--seed", "1"])
                .args(["--out", out.to_str().unwrap()])
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{cmd}: {}", String::from_utf8_lossy(&status.stderr)));
            }
            let jsonl = fs::read_to_string(only_file(&out, ".jsonl")?).map_err(|e| e.to_string())?;
            let trace = fs::read(only_file(&out, ".trace.csv")?).map_err(|e| e.to_string())?;
            let stripped = without_wall_time(&jsonl).ok_or(format!("{cmd}: record has no wall_time_s"))?;
            seen.push((stripped, trace));
        }
        if seen[0] != seen[1] {
            return Ok((false, format!("{cmd}: records differ between invocations")));
        }
        checked.push(cmd);
    }
    Ok((
        true,
        format!("byte-identical JSONL (wall time excluded) and traces across two processes for {}", checked.join(", ")),
    ))
}

fn c9_flops(cora: Option<&Lab>) -> Outcome {
    let target = 140.3e6;
    let shapes = inference_flops(2708, stored_entries(2708, 5429), &[1433, 16, 7], 0.0).map_err(|e| e.to_string())?;
    let rel = shapes.total() as f64 / target - 1.0;
    let mut pass = rel.abs() <= 0.25;
    let mut detail = format!(
        "Cora shapes N=2708 M=5429 C=1433 H=16 F=7: {} FLOPs ({:+.1}% vs 140.3M, need within ±25%)",
        shapes.total(),
        100.0 * rel
    );
    if let Some(lab) = cora {
        let from_bundle = lab.dense_inference()?;
        let rel = from_bundle as f64 / target - 1.0;
        pass &= rel.abs() <= 0.25;
        detail.push_str(&format!("; bundle: {from_bundle} ({:+.1}%)", 100.0 * rel));
    } else {
        detail.push_str("; no Cora bundle, shapes only");
    }
    Ok((pass, detail))
}

fn report(all: &mut Vec<Verdict>, v: Verdict) {
    println!("{v}");
    let _ = std::io::stdout().flush();
    all.push(v);
}

fn main() {
    if std::env::var_os(AS_CLI).is_some() {
        std::process::exit(gebt::cli::main_with(std::env::args_os()));
    }
    let mut all = Vec::new();
    let root = data_dir();
    let mut labs: HashMap<&str, Lab> = HashMap::new();
    let mut load_errors = Vec::new();
    for name in ["cora", "citeseer", "pubmed"] {
        if let Some(dir) = find_bundle(&root, name) {
            match load_bundle(&dir) {
                Ok(ds) => {
                    labs.insert(name, Lab::new(ds, RunConfig::default()));
                }
                Err(e) => load_errors.push(format!("{name}: {e}")),
            }
        }
    }
    for e in &load_errors {
        eprintln!("warning: {e}");
    }
    let missing = |names: &[&'static str], labs: &HashMap<&str, Lab>| -> Vec<&'static str> {
        names.iter().copied().filter(|n| !labs.contains_key(n)).collect()
    };

    report(&mut all, c1_gradients());

    let need = missing(&["cora", "citeseer", "pubmed"], &labs);
    let v = if need.is_empty() {
        verdict("C2 baseline accuracy", c2_baseline(&mut labs))
    } else {
        Verdict::blocked("C2 baseline accuracy", &need, &root)
    };
    report(&mut all, v);

    let v = match labs.get_mut("cora") {
        Some(lab) => verdict("C3 GEB existence", geb_vs_late(lab)),
        None => Verdict::blocked("C3 GEB existence", &["cora"], &root),
    };
    report(&mut all, v);

    let need = missing(&["cora", "citeseer"], &labs);
    let v = if need.is_empty() {
        let mut cora = labs.remove("cora").unwrap();
        let mut citeseer = labs.remove("citeseer").unwrap();
        let out = early_emergence(&mut [&mut cora, &mut citeseer]);
        labs.insert("cora", cora);
        labs.insert("citeseer", citeseer);
        verdict("C4 early emergence", out)
    } else {
        Verdict::blocked("C4 early emergence", &need, &root)
    };
    report(&mut all, v);

    let v = match labs.get_mut("cora") {
        Some(lab) => verdict("C5 joint-EB savings", joint_savings(lab)),
        None => Verdict::blocked("C5 joint-EB savings", &["cora"], &root),
    };
    report(&mut all, v);

    let v = match labs.get_mut("cora") {
        Some(lab) => verdict("C6 random-pruning dominance", random_dominance(lab)),
        None => Verdict::blocked("C6 random-pruning dominance", &["cora"], &root),
    };
    report(&mut all, v);

    report(&mut all, c7_suites());
    report(&mut all, verdict("C8 determinism", c8_determinism()));

    println!("# {CONVENTION}");
    report(&mut all, verdict("C9 FLOPs calibration", c9_flops(labs.get("cora"))));

    let mut sbm = Lab::new(sbm_fixture(), sbm_config());
    report(&mut all, verdict("[SBM proxy] C3 GEB existence", geb_vs_late(&mut sbm)));
    report(&mut all, verdict("[SBM proxy] C4 early emergence", early_emergence(&mut [&mut sbm])));
    report(&mut all, verdict("[SBM proxy] C5 joint-EB savings", joint_savings(&mut sbm)));
    report(&mut all, verdict("[SBM proxy] C6 random-pruning dominance", random_dominance(&mut sbm)));

    let failed = all.iter().filter(|v| !v.pass).count();
    println!("acceptance: {} passed, {failed} failed", all.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
