//! The corpus verification suite and golden summaries.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use spreadkit::corpus::{standard_corpus, InputKind};
use spreadkit::decomposition::{spread_approximation, verify_decomposition};
use spreadkit::oracle::{ekr_verdict, UNLIMITED};
use spreadkit::rng::Prng;
use spreadkit::spreadness::{lemma_spread_check, local_lym_check, restriction_bound_check};
use spreadkit::{Complex, Face, Rational, SetFamily};

use crate::commands::{read_file, read_input, usage, CliResult, Input};
use crate::report::{to_value, Report, Violation};

/// Largest `k` used for the complete-complex extremal checks.
pub const COMPLETE_MAX_K: usize = 4;

pub struct VerifyArgs {
    pub inputs: Vec<PathBuf>,
    pub force_graph: bool,
    pub k_range: Option<(usize, usize)>,
    pub t_range: (usize, usize),
    pub samples: usize,
    pub seed: u64,
}

/// `LO..=HI` or a single integer.
pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad range {s:?}"))
    };
    let (lo, hi) = match s.split_once("..=") {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

/// Instance files (`.facets`, `.graph`) in a directory, sorted by name.
pub fn corpus_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| usage(e.to_string()))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if InputKind::from_extension(ext).is_some() {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(usage(format!(
            "no .facets or .graph files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn golden_path(path: &Path) -> PathBuf {
    path.with_file_name(format!("{}.expect.json", instance_name(path)))
}

/// Structural facts recorded in `<name>.expect.json`.
pub fn summary(cx: &Complex) -> Value {
    let rank = cx.rank();
    let layer_sizes: Vec<usize> = (1..=rank).map(|k| cx.layer(k).len()).collect();
    let worst_lym: Vec<String> = (1..=rank)
        .map(|k| {
            local_lym_check(cx, k)
                .map(|l| l.worst_ratio.to_string())
                .unwrap_or_default()
        })
        .collect();
    json!({
        "ground_n": cx.ground_n(),
        "rank": rank,
        "num_facets": cx.facets().len(),
        "facets": cx.facets().members(),
        "layer_sizes": layer_sizes,
        "worst_lym": worst_lym,
    })
}

fn is_complete(cx: &Complex) -> bool {
    let f = cx.facets().members();
    f.len() == 1 && f[0] == Face::prefix(cx.ground_n())
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

struct Outcome {
    results: Value,
    violations: Vec<Violation>,
}

fn check_instance(input: &Input, index: usize, args: &VerifyArgs) -> CliResult<Outcome> {
    let name = instance_name(&input.path);
    let cx = &input.complex;
    let rank = cx.rank();
    let mut violations = Vec::new();
    let mut violate = |check: &str, witness: Value, details: String| {
        let mut w = json!({"instance": name});
        if !witness.is_null() {
            w["detail"] = witness;
        }
        violations.push(Violation::new(check, w, details));
    };
    let (k_lo, k_hi) = args.k_range.unwrap_or((1, rank));
    let ks: Vec<usize> = (k_lo.max(1)..=k_hi.min(rank)).collect();

    // Layer spreadness and local LYM for each k.
    let complete = is_complete(cx);
    for &k in &ks {
        let lemma = lemma_spread_check(cx, k)?;
        if !lemma.holds {
            violate(
                "lemma_spread",
                json!({"k": k, "S_X": lemma.witness}),
                format!("layer {k} is not ({}, {k})-spread", lemma.r),
            );
        }
        let lym = local_lym_check(cx, k)?;
        if !lym.holds {
            violate(
                "local_lym",
                json!({"k": k, "element": lym.witness}),
                format!("worst ratio {} exceeds {}", lym.worst_ratio, lym.bound),
            );
        }
        if complete && lym.worst_ratio != Rational::new(k as u64, rank as u64) {
            violate(
                "local_lym_complete",
                json!({"k": k}),
                format!("worst ratio {} differs from {k}/{rank}", lym.worst_ratio),
            );
        }
    }

    // Sampled restriction bounds.
    let mut rng = Prng::stream(args.seed, index as u64);
    let mut restriction = 0usize;
    let ground: Vec<u32> = (1..=cx.ground_n()).collect();
    if rank >= 2 {
        for _ in 0..args.samples {
            let k = rng.range_inclusive(1, rank as u64 - 1) as usize;
            let t = rng.range_inclusive(1, k as u64) as usize;
            let s = rng.range_inclusive(0, (rank - k - 1) as u64) as usize;
            let facets = cx.facets().members();
            let facet = facets[rng.below(facets.len() as u64) as usize];
            let facet_elems: Vec<u32> = facet.elements().collect();
            let center = Face::from_elements(rng.sample(&facet_elems, t))?;
            let rest: Vec<u32> = ground
                .iter()
                .copied()
                .filter(|&e| !center.contains(e))
                .collect();
            let avoid = Face::from_elements(rng.sample(&rest, s))?;
            let check = restriction_bound_check(cx, k, t, center, avoid)?;
            restriction += 1;
            if !check.holds {
                violate(
                    "restriction_bound",
                    json!({"k": k, "t": t, "T": center, "F": avoid, "lhs": check.lhs, "rhs": check.rhs}),
                    "restricted star below its lower bound".into(),
                );
            }
        }
    }

    // Decomposition invariants on a star plus a random half of the layer.
    let mut decompositions = 0usize;
    for &k in &ks {
        let layer = cx.layer(k);
        let star = cx.best_star(k, 1)?;
        let members = layer
            .iter()
            .copied()
            .filter(|f| f.is_superset(star.center) || rng.bernoulli(0.5));
        let family = SetFamily::new(layer.ground_n(), members)?;
        let r = Rational::new(rank as u64, k as u64);
        let d = spread_approximation(&family, &layer, r, k - 1)?;
        let v = verify_decomposition(&d, &family, &layer, 1, Some(r))?;
        decompositions += 1;
        let bound_ok = v
            .remainder_bound
            .as_ref()
            .is_none_or(|rb| !rb.preconditions || rb.holds);
        if !(v.procedure_ok() && bound_ok) {
            violate(
                "decomposition",
                json!({"k": k, "spread_violation": v.spread_violation}),
                format!(
                    "partition {} containment {} cover_sizes {} pieces_spread {} remainder_bound {}",
                    v.partition, v.containment, v.cover_sizes, v.pieces_spread, bound_ok
                ),
            );
        }
    }

    // Stars are optimal on complete complexes above the threshold.
    let mut extremal = 0usize;
    if complete {
        let n = rank;
        for t in args.t_range.0.max(1)..=args.t_range.1 {
            for k in t..=COMPLETE_MAX_K.min(n) {
                if n < (t + 1) * (k - t + 1) || !ks.contains(&k) {
                    continue;
                }
                let res = ekr_verdict(cx, k, t, UNLIMITED)?;
                let expected = binomial(n - t, k - t) as usize;
                extremal += 1;
                if res.max_size != expected || res.best_star_size != expected {
                    violate(
                        "complete_extremal",
                        json!({"k": k, "t": t, "max": res.max_size, "star": res.best_star_size}),
                        format!("expected C({}, {}) = {expected}", n - t, k - t),
                    );
                }
            }
        }
    }

    // Golden summary, when one ships next to the instance.
    let golden = golden_path(&input.path);
    let golden_checked = golden.exists();
    if golden_checked {
        let text = read_file(&golden)?;
        let expected: Value = serde_json::from_slice(&text)
            .map_err(|e| usage(format!("{}: {e}", golden.display())))?;
        let actual = summary(cx);
        let (Value::Object(exp), Value::Object(act)) = (&expected, &actual) else {
            return Err(usage(format!(
                "{}: expected a JSON object",
                golden.display()
            )));
        };
        let mut keys: Vec<&String> = exp.keys().chain(act.keys()).collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            if exp.get(key) != act.get(key) {
                violate(
                    &format!("golden:{key}"),
                    json!({"expected": exp.get(key), "actual": act.get(key)}),
                    format!("{} disagrees with the computed value", golden.display()),
                );
            }
        }
    }

    Ok(Outcome {
        results: json!({
            "name": name,
            "kind": input.kind,
            "rank": rank,
            "complete": complete,
            "layers_checked": ks.len(),
            "restriction_samples": restriction,
            "decompositions": decompositions,
            "complete_extremal_checks": extremal,
            "golden_checked": golden_checked,
        }),
        violations,
    })
}

pub fn verify(args: &VerifyArgs) -> CliResult<Report> {
    if args.inputs.is_empty() {
        return Err(usage("no instances to verify"));
    }
    let inputs = args
        .inputs
        .iter()
        .map(|p| read_input(p, args.force_graph))
        .collect::<CliResult<Vec<_>>>()?;
    let mut digest_parts: Vec<Vec<u8>> = Vec::new();
    for input in &inputs {
        digest_parts.push(
            input
                .path
                .file_name()
                .unwrap_or_default()
                .as_encoded_bytes()
                .to_vec(),
        );
        digest_parts.push(input.bytes.clone());
        let golden = golden_path(&input.path);
        if golden.exists() {
            digest_parts.push(read_file(&golden)?);
        }
    }
    let parts: Vec<&[u8]> = digest_parts.iter().map(|v| v.as_slice()).collect();
    let mut report = Report::new("verify", &parts);
    report.param("instances", inputs.len());
    report.param("k_range", args.k_range.map(|(a, b)| format!("{a}..={b}")));
    report.param(
        "t_range",
        format!("{}..={}", args.t_range.0, args.t_range.1),
    );
    report.param("samples", args.samples);
    report.seed = Some(args.seed);

    let outcomes = inputs
        .par_iter()
        .enumerate()
        .map(|(i, input)| check_instance(input, i, args))
        .collect::<CliResult<Vec<_>>>()?;
    let mut instances = Vec::new();
    let mut totals = [0u64; 4];
    for o in outcomes {
        for (slot, key) in totals.iter_mut().zip([
            "layers_checked",
            "restriction_samples",
            "decompositions",
            "complete_extremal_checks",
        ]) {
            *slot += o.results[key].as_u64().unwrap_or(0);
        }
        instances.push(o.results);
        for v in o.violations {
            report.violate(v);
        }
    }
    report.results = json!({
        "instances": instances,
        "totals": {
            "instances": inputs.len(),
            "layers_checked": totals[0],
            "restriction_samples": totals[1],
            "decompositions": totals[2],
            "complete_extremal_checks": totals[3],
            "violations": report.violations.len(),
        },
    });
    Ok(report)
}

/// Writes the standard corpus and, optionally, golden summaries into `dir`.
pub fn gen_corpus(dir: &Path, expect: bool) -> CliResult<Report> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let corpus = standard_corpus()?;
    let mut written = Vec::new();
    for inst in &corpus {
        let path = dir.join(inst.file_name());
        write(&path, inst.text().as_bytes())?;
        written.push(inst.file_name());
        if expect {
            let golden = golden_path(&path);
            let mut text = String::new();
            crate::report::write_canonical(&summary(&inst.complex()), &mut text);
            text.push('\n');
            write(&golden, text.as_bytes())?;
            written.push(golden.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let mut report = Report::new("gen-corpus", &[]);
    report.param("expect", expect);
    report.param("seed", spreadkit::corpus::CORPUS_SEED);
    report.results = json!({"instances": corpus.len(), "files": to_value(&written)});
    Ok(report)
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Resolves `--corpus` and positional inputs to a file list.
pub fn collect_inputs(inputs: &[PathBuf], corpus: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let mut files = inputs.to_vec();
    if let Some(dir) = corpus {
        files.extend(corpus_files(dir)?);
    }
    Ok(files)
}
