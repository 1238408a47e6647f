//! Batch experiment manifests: validation, execution, and the CSV/JSON
//! output formats shared with the CLI subcommands.
//!
//! A manifest is validated in full before anything executes; no files are
//! written on validation errors. Each experiment writes its own output
//! files (derived from its `output` stem), so partial failures never leave
//! half-written shared files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ratio;
use crate::experiments::{simulate_traces, spanning_experiment, SimTrace, SpanningRow};
use crate::mixing::{verify_mutation_bound, BoundRow, FitReport};
use crate::mutate::verify_for_family;
use crate::perm::Permutation;
use crate::process::quotient::{QuotWash, QuotWashLong};
use crate::process::walks::{AdjKernel, CycleKernel, RtrKernel};
use crate::process::{Family, ProcessSpec};
use crate::stopping::{tail_curve, CombiningRow, StoppingRule, TailEstimate};

pub const MANIFEST_VERSION: &str = "1";

const KNOWN_SUBCOMMANDS: [&str; 9] = [
    "simulate",
    "stopping",
    "mixing-exact",
    "scaling",
    "mutate-verify",
    "counterexample",
    "factorize",
    "spanning",
    "suite",
];

const STOCHASTIC: [&str; 4] = ["simulate", "stopping", "scaling", "spanning"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub version: String,
    pub experiments: Vec<ExperimentEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ExperimentEntry {
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    /// Family parameter `p` as "num/den" or a decimal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output stem; each experiment derives its file names from it.
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentStatus {
    pub index: usize,
    pub subcommand: String,
    pub output: String,
    pub status: String,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub artifact_version: String,
    pub manifest_hash: String,
    pub wall_clock_secs: f64,
    pub experiments: Vec<ExperimentStatus>,
    pub all_ok: bool,
}

pub fn parse_manifest(bytes: &[u8]) -> Result<ExperimentManifest> {
    let manifest: ExperimentManifest = serde_json::from_slice(bytes)?;
    Ok(manifest)
}

/// FNV-1a 64 over the manifest bytes; an identifier, not a security hash.
pub fn manifest_hash(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Validate everything up front: unknown subcommands or families, missing
/// seeds on stochastic experiments, and duplicate outputs all fail before
/// any execution.
pub fn validate(manifest: &ExperimentManifest) -> Result<()> {
    if manifest.version != MANIFEST_VERSION {
        return Err(Error::Validation(format!(
            "unsupported manifest version {:?} (expected {MANIFEST_VERSION:?})",
            manifest.version
        )));
    }
    let mut outputs = std::collections::HashSet::new();
    for (k, e) in manifest.experiments.iter().enumerate() {
        let at = |msg: String| Error::Validation(format!("experiment {k}: {msg}"));
        if !KNOWN_SUBCOMMANDS.contains(&e.subcommand.as_str()) {
            return Err(at(format!("unknown subcommand {:?}", e.subcommand)));
        }
        if let Some(f) = &e.family {
            Family::parse(f).map_err(|err| at(err.to_string()))?;
        }
        if let Some(r) = &e.rule {
            parse_rule(r).map_err(|err| at(err.to_string()))?;
        }
        if STOCHASTIC.contains(&e.subcommand.as_str()) && e.seed.is_none() {
            return Err(at("stochastic experiment needs an explicit seed".into()));
        }
        if !outputs.insert(e.output.clone()) {
            return Err(at(format!("duplicate output path {:?}", e.output)));
        }
    }
    Ok(())
}

/// Accepts both the stopping-rule names and the mutation-map aliases.
pub fn parse_rule(s: &str) -> Result<StoppingRule> {
    match s {
        "fast" => Ok(StoppingRule::AllPairs),
        "slow" => Ok(StoppingRule::Sequential),
        other => StoppingRule::parse(other),
    }
}

/// Parse "a/b" or a decimal into an exact rational pair.
pub fn parse_p(s: &str) -> Result<(i64, i64)> {
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad rational {s:?}")))?;
        let b: i64 = b
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad rational {s:?}")))?;
        return Ok((a, b));
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Validation(format!("bad parameter {s:?}")))?;
    // Decimals become exact over a power-of-ten denominator.
    let scaled = (x * 1_000_000.0).round() as i64;
    Ok((scaled, 1_000_000))
}

pub fn build_spec(
    family: Family,
    n: usize,
    p: Option<&str>,
    dim: Option<usize>,
) -> Result<ProcessSpec> {
    let mut spec = ProcessSpec::new(family, n);
    if let Some(p) = p {
        let (a, b) = parse_p(p)?;
        spec = spec.with_p(a, b);
    }
    if let Some(d) = dim {
        spec = spec.with_dim(d);
    }
    spec.validate()?;
    Ok(spec)
}

/// Execute the whole manifest, writing outputs under `base_dir`.
pub fn run_manifest(
    manifest: &ExperimentManifest,
    raw_bytes: &[u8],
    base_dir: &Path,
) -> Result<RunMetadata> {
    validate(manifest)?;
    let t0 = Instant::now();
    let mut statuses = Vec::new();
    let mut all_ok = true;
    for (index, entry) in manifest.experiments.iter().enumerate() {
        let outcome = execute_entry(entry);
        let status = match outcome {
            Ok(files) => {
                let mut written = Vec::new();
                let mut failure = None;
                for (suffix, content) in files {
                    let path: PathBuf = base_dir.join(format!("{}{suffix}", entry.output));
                    if let Some(parent) = path.parent() {
                        std::fs::create_dir_all(parent)?;
                    }
                    match std::fs::write(&path, content) {
                        Ok(()) => written.push(path.display().to_string()),
                        Err(e) => {
                            failure = Some(format!("write {}: {e}", path.display()));
                            break;
                        }
                    }
                }
                ExperimentStatus {
                    index,
                    subcommand: entry.subcommand.clone(),
                    output: entry.output.clone(),
                    status: failure.clone().unwrap_or_else(|| "ok".into()),
                    files: written,
                }
            }
            Err(e) => ExperimentStatus {
                index,
                subcommand: entry.subcommand.clone(),
                output: entry.output.clone(),
                status: format!("error: {e}"),
                files: Vec::new(),
            },
        };
        all_ok &= status.status == "ok";
        statuses.push(status);
    }
    Ok(RunMetadata {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        manifest_hash: manifest_hash(raw_bytes),
        wall_clock_secs: t0.elapsed().as_secs_f64(),
        experiments: statuses,
        all_ok,
    })
}

/// Produce each output file's (suffix, contents) for one experiment.
pub fn execute_entry(entry: &ExperimentEntry) -> Result<Vec<(String, String)>> {
    let need = |what: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "{} requires {what}",
                entry.subcommand
            )))
        }
    };
    match entry.subcommand.as_str() {
        "simulate" => {
            need("family/n/steps/replicas/seed", entry.family.is_some() && entry.n.is_some())?;
            let spec = build_spec(
                Family::parse(entry.family.as_ref().unwrap())?,
                entry.n.unwrap(),
                entry.p.as_deref(),
                entry.dim,
            )?;
            let traces = simulate_traces(
                &spec,
                entry.steps.unwrap_or(100),
                entry.replicas.unwrap_or(1),
                entry.seed.unwrap_or(0),
            )?;
            Ok(vec![
                (".events.csv".into(), csv_events(&traces)),
                (".projections.csv".into(), csv_projections(&traces)),
            ])
        }
        "stopping" => {
            need("family and n", entry.family.is_some() && entry.n.is_some())?;
            let family = Family::parse(entry.family.as_ref().unwrap())?;
            let spec = build_spec(family, entry.n.unwrap(), entry.p.as_deref(), entry.dim)?;
            let rule = parse_rule(entry.rule.as_deref().unwrap_or("all-pairs"))?;
            let grid = entry
                .t_grid
                .clone()
                .unwrap_or_else(|| vec![1, 2, 5, 10, 20, 50, 100]);
            let curve = tail_curve(
                &spec,
                rule,
                &grid,
                entry.replicas.unwrap_or(1000),
                entry.seed.unwrap_or(0),
            )?;
            let mut files = vec![(".tail.csv".into(), csv_tail(spec.n, &curve))];
            if let Some(n_list) = &entry.n_list {
                let rows = crate::stopping::combininglog_report(
                    |n| {
                        let mut s = spec.clone();
                        s.n = n;
                        s
                    },
                    n_list,
                    entry.replicas.unwrap_or(1000),
                    entry.seed.unwrap_or(0),
                )?;
                files.push((".ratio.csv".into(), csv_ratio(&rows)));
            }
            Ok(files)
        }
        "mixing-exact" => {
            need("family and n", entry.family.is_some() && entry.n.is_some())?;
            let family = Family::parse(entry.family.as_ref().unwrap())?;
            let t_max = entry
                .t_max
                .or_else(|| entry.t_grid.as_ref().and_then(|g| g.iter().max().copied()))
                .unwrap_or(8);
            let rows = mixing_rows(family, entry.n.unwrap(), entry.p.as_deref(), entry.dim, t_max)?;
            Ok(vec![(".csv".into(), csv_mixing(&rows))])
        }
        "scaling" => {
            need(
                "family and n_list",
                entry.family.is_some() && entry.n_list.is_some(),
            )?;
            let family = Family::parse(entry.family.as_ref().unwrap())?;
            let p = entry.p.clone();
            let dim = entry.dim;
            let study = crate::experiments::run_pair_time_study(
                |n| {
                    build_spec(family, n, p.as_deref(), dim).expect("validated spec")
                },
                entry.n_list.as_ref().unwrap(),
                entry.replicas.unwrap_or(1000),
                entry.seed.unwrap_or(0),
            )?;
            let fit = study.fit()?;
            Ok(vec![
                (".csv".into(), csv_scaling(&study.scaling_points())),
                (".fit.json".into(), serde_json::to_string_pretty(&fit)? + "\n"),
            ])
        }
        "mutate-verify" => {
            need(
                "family, n, t, rule",
                entry.family.is_some() && entry.n.is_some() && entry.t.is_some(),
            )?;
            let family = Family::parse(entry.family.as_ref().unwrap())?;
            let rule = parse_rule(entry.rule.as_deref().unwrap_or("fast"))?;
            let report = verify_for_family(family, entry.n.unwrap(), entry.t.unwrap(), rule)?;
            Ok(vec![(".json".into(), serde_json::to_string_pretty(&report)? + "\n")])
        }
        "counterexample" => {
            let (dist, mass) = crate::suite::counterexample_report()?;
            let mut out = String::from(
                "# exact conditional deck distribution, one-card wash, n=3, t=3,\n\
                 # given every pair of cards has interacted\n",
            );
            out.push_str(&format!("conditioning_mass,{mass}\n"));
            for (perm, prob) in dist {
                out.push_str(&format!("{perm},{prob}\n"));
            }
            Ok(vec![(".txt".into(), out)])
        }
        "factorize" => {
            need("perm", entry.perm.is_some())?;
            let perm: Permutation = entry.perm.as_ref().unwrap().parse()?;
            let json = factorize_json(&perm, entry.seq.as_deref())?;
            Ok(vec![(".json".into(), json)])
        }
        "spanning" => {
            need("n_list", entry.n_list.is_some())?;
            let mut rows = Vec::new();
            for &n in entry.n_list.as_ref().unwrap() {
                rows.extend(spanning_experiment(
                    n,
                    entry.replicas.unwrap_or(10_000),
                    entry.seed.unwrap_or(0),
                )?);
            }
            Ok(vec![(".csv".into(), csv_spanning(&rows))])
        }
        "suite" => {
            let outcomes = crate::suite::run_all();
            let mut out = String::new();
            for o in &outcomes {
                out.push_str(&o.line());
                out.push('\n');
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Err(Error::Validation("verification suite failed".into()));
            }
            Ok(vec![(".txt".into(), out)])
        }
        other => Err(Error::Validation(format!("unknown subcommand {other:?}"))),
    }
}

/// Exact mixing rows for any family with an event-certified chain.
pub fn mixing_rows(
    family: Family,
    n: usize,
    p: Option<&str>,
    dim: Option<usize>,
    t_max: usize,
) -> Result<Vec<BoundRow>> {
    match family {
        Family::Wash1d => verify_mutation_bound(&QuotWash::line(n), t_max),
        Family::WashGrid => verify_mutation_bound(&QuotWash::grid(n, dim.unwrap_or(1)), t_max),
        Family::Wash1dLong => {
            let (a, b) = p.map(parse_p).transpose()?.unwrap_or((1, 2));
            verify_mutation_bound(&QuotWashLong::new(n, ratio(a, b)), t_max)
        }
        Family::AdjTransposition => verify_mutation_bound(&AdjKernel { n }, t_max),
        Family::CycleTransposition => verify_mutation_bound(&CycleKernel { n }, t_max),
        Family::RandomToRandom => verify_mutation_bound(&RtrKernel { n }, t_max),
        Family::RandomToTop => Err(Error::Validation(
            "random-to-top has no interaction detector; its stopping tail is undefined".into(),
        )),
    }
}

pub fn factorize_json(perm: &Permutation, seq: Option<&str>) -> Result<String> {
    use crate::factor::{greedy_subsequence_factor, star_factor, TranspositionSequence};
    match seq {
        None => {
            let star = star_factor(perm);
            Ok(serde_json::to_string_pretty(&star)? + "\n")
        }
        Some(s) => {
            let seq = parse_seq(perm.n(), s)?;
            let mask = greedy_subsequence_factor(&seq, perm)?;
            #[derive(Serialize)]
            struct Out<'a> {
                sequence: &'a TranspositionSequence,
                mask: Vec<u8>,
            }
            Ok(serde_json::to_string_pretty(&Out {
                sequence: &seq,
                mask: mask.eps.iter().map(|&b| u8::from(b)).collect(),
            })? + "\n")
        }
    }
}

/// Parse "1-2,1-3,2-3" into a transposition sequence.
pub fn parse_seq(n: usize, s: &str) -> Result<crate::factor::TranspositionSequence> {
    let mut seq = Vec::new();
    for tok in s.split(',') {
        let (a, b) = tok
            .trim()
            .split_once('-')
            .ok_or_else(|| Error::Validation(format!("bad transposition {tok:?}")))?;
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad label in {tok:?}")))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("bad label in {tok:?}")))?;
        seq.push(crate::perm::Transposition::new(a, b)?);
    }
    crate::factor::TranspositionSequence::new(n, seq)
}

// ---------------------------------------------------------------------------
// CSV renderers
// ---------------------------------------------------------------------------

pub fn csv_events(traces: &[SimTrace]) -> String {
    let mut out = String::from("replica,t,event_pair,event_kind\n");
    for tr in traces {
        for ev in &tr.events {
            let phase = match ev.phase {
                None => String::new(),
                Some(p) => format!(
                    ":{}",
                    match p {
                        crate::process::Phase::RightSweep => "right-sweep",
                        crate::process::Phase::LeftSweep => "left-sweep",
                    }
                ),
            };
            out.push_str(&format!(
                "{},{}{},{}-{},{}\n",
                tr.replica, ev.time, phase, ev.pair.i, ev.pair.j, ev.kind
            ));
        }
    }
    out
}

pub fn csv_projections(traces: &[SimTrace]) -> String {
    let mut out = String::from("replica,t,permutation\n");
    for tr in traces {
        for (t, p) in &tr.projections {
            out.push_str(&format!("{},{},\"{}\"\n", tr.replica, t, p));
        }
    }
    out
}

pub fn csv_tail(n: usize, curve: &[TailEstimate]) -> String {
    let mut out = String::from("n,t,estimate,ci_lo,ci_hi\n");
    for e in curve {
        out.push_str(&format!(
            "{n},{},{:.6},{:.6},{:.6}\n",
            e.t, e.estimate, e.ci_lo, e.ci_hi
        ));
    }
    out
}

pub fn csv_ratio(rows: &[CombiningRow]) -> String {
    // The log term in the ratio denominator is ln C(n,2), replaced by 1
    // when there is a single pair.
    let mut out = String::from("n,pair_mean_time,all_pairs_median,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.4},{:.1},{:.6}\n",
            r.n, r.pair_mean_time, r.all_pairs_median, r.ratio
        ));
    }
    out
}

pub fn csv_scaling(points: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("n,stat,stderr\n");
    for (n, stat, se) in points {
        out.push_str(&format!("{n},{stat:.6},{se:.6}\n"));
    }
    out
}

pub fn csv_mixing(rows: &[BoundRow]) -> String {
    let mut out = String::from("t,sep,tv,p_T_gt_t\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.t, r.sep, r.tv, r.p_t_gt_t));
    }
    out
}

pub fn csv_spanning(rows: &[SpanningRow]) -> String {
    let mut out = String::from("n,seed,min_spanning_prefix,coupon_collector_steps\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n, r.seed, r.min_spanning_prefix, r.coupon_collector_steps
        ));
    }
    out
}

pub fn fit_json(fit: &FitReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(fit)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(subcommand: &str, output: &str) -> ExperimentEntry {
        ExperimentEntry {
            subcommand: subcommand.into(),
            output: output.into(),
            seed: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn empty_manifest_is_valid() {
        let m = ExperimentManifest {
            version: "1".into(),
            experiments: vec![],
        };
        validate(&m).unwrap();
        let meta = run_manifest(&m, b"{}", Path::new("/tmp")).unwrap();
        assert!(meta.all_ok);
        assert!(meta.experiments.is_empty());
    }

    #[test]
    fn validation_rejects_bad_manifests() {
        let m = ExperimentManifest {
            version: "2".into(),
            experiments: vec![],
        };
        assert!(validate(&m).is_err());

        let m = ExperimentManifest {
            version: "1".into(),
            experiments: vec![entry("no-such", "a")],
        };
        assert!(validate(&m).is_err());

        let m = ExperimentManifest {
            version: "1".into(),
            experiments: vec![entry("counterexample", "a"), entry("counterexample", "a")],
        };
        assert!(matches!(validate(&m), Err(Error::Validation(msg)) if msg.contains("duplicate")));

        let mut e = entry("scaling", "a");
        e.seed = None;
        let m = ExperimentManifest {
            version: "1".into(),
            experiments: vec![e],
        };
        assert!(matches!(validate(&m), Err(Error::Validation(msg)) if msg.contains("seed")));
    }

    #[test]
    fn counterexample_entry_writes_exact_rationals() {
        let files = execute_entry(&entry("counterexample", "x")).unwrap();
        assert_eq!(files.len(), 1);
        let content = &files[0].1;
        assert!(content.contains("conditioning_mass,1/27"));
        assert!(content.contains("[1,2,3],5/32"));
    }

    #[test]
    fn factorize_entry_star_and_mask() {
        let mut e = entry("factorize", "f");
        e.perm = Some("[2,3,1]".into());
        let files = execute_entry(&e).unwrap();
        assert!(files[0].1.contains("\"a\""));

        e.seq = Some("1-2,1-3,2-3".into());
        let files = execute_entry(&e).unwrap();
        assert!(files[0].1.contains("\"mask\""));
    }

    #[test]
    fn parse_p_accepts_rationals_and_decimals() {
        assert_eq!(parse_p("1/2").unwrap(), (1, 2));
        assert_eq!(parse_p("0.25").unwrap(), (250_000, 1_000_000));
        assert!(parse_p("x").is_err());
    }
}
