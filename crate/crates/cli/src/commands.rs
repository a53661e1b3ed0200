//! One function per subcommand. Each returns a finished [`Report`].

use std::path::{Path, PathBuf};

use serde_json::json;
use spreadkit::corpus::{load_text, InputKind};
use spreadkit::decomposition::{
    parameter_plan, spread_approximation_with, verify_decomposition, Selection,
};
use spreadkit::ingest::parse_family;
use spreadkit::oracle::{ekr_verdict, max_nontrivial_t_intersecting, UNLIMITED};
use spreadkit::prob::{spread_cover_probability, two_coloring_experiment};
use spreadkit::rational::parse_rational;
use spreadkit::spreadness::{lemma_spread_check, local_lym_check, spread_value};
use spreadkit::{Complex, Error, Face, Rational, SetFamily};

use crate::report::{to_value, Report, Status, Violation};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(u64),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => f.write_str(m),
            CliError::Budget(b) => write!(f, "search budget of {b} nodes exhausted"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted { budget } => CliError::Budget(budget),
            Error::Invariant(m) => CliError::Internal(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub struct Input {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
    pub kind: InputKind,
    pub complex: Complex,
}

pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn utf8<'a>(path: &Path, bytes: &'a [u8]) -> CliResult<&'a str> {
    std::str::from_utf8(bytes).map_err(|_| usage(format!("{}: not UTF-8", path.display())))
}

pub fn kind_of(path: &Path, force_graph: bool) -> InputKind {
    if force_graph {
        return InputKind::Graph;
    }
    path.extension()
        .and_then(|e| e.to_str())
        .and_then(InputKind::from_extension)
        .unwrap_or(InputKind::Facets)
}

pub fn read_input(path: &Path, force_graph: bool) -> CliResult<Input> {
    let bytes = read_file(path)?;
    let kind = kind_of(path, force_graph);
    let complex = load_text(kind, utf8(path, &bytes)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(Input {
        path: path.to_path_buf(),
        bytes,
        kind,
        complex,
    })
}

pub fn read_family(path: &Path) -> CliResult<(Vec<u8>, SetFamily)> {
    let bytes = read_file(path)?;
    let fam =
        parse_family(utf8(path, &bytes)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok((bytes, fam))
}

pub fn rational_arg(name: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| usage(format!("--{name}: {e}")))
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn input_params(report: &mut Report, input: &Input) {
    report.param("input", file_label(&input.path));
    report.param("input_kind", input.kind);
}

/// Layer statistics for one `k`: size, `r*`, and the two counting checks.
pub fn analyze_layer(cx: &Complex, k: usize, report: &mut Report) -> CliResult<serde_json::Value> {
    if k == 0 {
        return Ok(json!({
            "k": 0,
            "layer_size": 1,
            "note": "layer is {∅}; both checks hold vacuously",
        }));
    }
    let layer = cx.layer(k);
    let spread = spread_value(&layer)?;
    let lemma = lemma_spread_check(cx, k)?;
    let lym = local_lym_check(cx, k)?;
    if !lemma.holds {
        report.violate(Violation::new(
            "lemma_spread",
            json!({"k": k, "S_X": lemma.witness}),
            format!("layer {k} is not ({}, {k})-spread", lemma.r),
        ));
    }
    if !lym.holds {
        report.violate(Violation::new(
            "local_lym",
            json!({"k": k, "element": lym.witness}),
            format!("worst ratio {} exceeds {}", lym.worst_ratio, lym.bound),
        ));
    }
    Ok(json!({
        "k": k,
        "layer_size": layer.len(),
        "r_star": spread.r_star,
        "r_star_witness": spread.witness,
        "lemma_spread": lemma,
        "local_lym": lym,
    }))
}

pub fn analyze(path: &Path, force_graph: bool, k: Option<usize>) -> CliResult<Report> {
    let input = read_input(path, force_graph)?;
    let cx = &input.complex;
    let mut report = Report::new("analyze", &[&input.bytes]);
    input_params(&mut report, &input);
    report.param("k", k);
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..=cx.rank()).collect(),
    };
    let mut warnings = Vec::new();
    let mut layers = Vec::new();
    for k in ks {
        if k > cx.rank() {
            warnings.push(format!("k = {k} exceeds rank {}; layer skipped", cx.rank()));
            continue;
        }
        layers.push(analyze_layer(cx, k, &mut report)?);
    }
    report.results = json!({
        "ground_n": cx.ground_n(),
        "num_facets": cx.facets().len(),
        "rank": cx.rank(),
        "layers": layers,
        "warnings": warnings,
    });
    Ok(report)
}

pub struct DecomposeArgs<'a> {
    pub input: &'a Path,
    pub force_graph: bool,
    pub k: usize,
    pub t: usize,
    pub r: Rational,
    pub q: Option<usize>,
    pub r0: Option<Rational>,
    pub family: Option<&'a Path>,
    pub exhaustive: bool,
}

pub fn decompose(a: &DecomposeArgs) -> CliResult<Report> {
    let input = read_input(a.input, a.force_graph)?;
    let cx = &input.complex;
    if a.k == 0 || a.k > cx.rank() {
        return Err(usage(format!(
            "need 1 <= k <= rank = {}, got k = {}",
            cx.rank(),
            a.k
        )));
    }
    if a.t == 0 || a.t > a.k {
        return Err(usage(format!("need 1 <= t <= k, got t = {}", a.t)));
    }
    let ambient = cx.layer(a.k);
    let (family_bytes, family, family_source) = match a.family {
        Some(p) => {
            let (bytes, fam) = read_family(p)?;
            if let Some(f) = fam.iter().find(|f| !ambient.contains(**f)) {
                return Err(usage(format!("family member {f} is not in layer {}", a.k)));
            }
            let fam = SetFamily::new(ambient.ground_n(), fam.into_members())?;
            (bytes, fam, file_label(p))
        }
        None => {
            let star = cx.best_star(a.k, a.t)?;
            (
                Vec::new(),
                ambient.containing(star.center),
                "best_star".to_string(),
            )
        }
    };
    let r0 =
        a.r0.unwrap_or_else(|| Rational::new(cx.rank() as u64, a.k as u64));
    let q = a.q.unwrap_or(usize::MAX);
    let selection = if a.exhaustive {
        Selection::Exhaustive
    } else {
        Selection::Greedy
    };
    let mut report = Report::new("decompose", &[&input.bytes, &family_bytes]);
    input_params(&mut report, &input);
    report.param("k", a.k);
    report.param("t", a.t);
    report.param("r", a.r.to_string());
    report.param("q", a.q);
    report.param("r0", r0.to_string());
    report.param("family", &family_source);
    report.param(
        "selection",
        if a.exhaustive { "exhaustive" } else { "greedy" },
    );
    let d = spread_approximation_with(&family, &ambient, a.r, q, selection)?;
    let v = verify_decomposition(&d, &family, &ambient, a.t, Some(r0))?;
    for (check, ok, details) in [
        (
            "partition",
            v.partition,
            "pieces and remainder do not partition the family",
        ),
        (
            "containment",
            v.containment,
            "a piece member misses its cover set",
        ),
        ("cover_sizes", v.cover_sizes, "a cover set exceeds q"),
    ] {
        if !ok {
            report.violate(Violation::new(check, serde_json::Value::Null, details));
        }
    }
    if !v.pieces_spread {
        report.violate(Violation::new(
            "pieces_spread",
            v.spread_violation,
            format!("a peeled trace is not {}-spread", a.r),
        ));
    }
    if let Some(rb) = &v.remainder_bound {
        if rb.preconditions && !rb.holds {
            report.violate(Violation::new(
                "remainder_bound",
                json!({"remainder": rb.remainder, "bound": rb.bound}),
                "remainder exceeds the bound while its preconditions hold",
            ));
        }
    }
    report.results = json!({
        "family_size": family.len(),
        "decomposition": d,
        "verification": v,
    });
    Ok(report)
}

pub fn extremal(
    path: &Path,
    force_graph: bool,
    k: usize,
    t: usize,
    budget: Option<u64>,
    nontrivial: bool,
) -> CliResult<Report> {
    let input = read_input(path, force_graph)?;
    let mut report = Report::new("extremal", &[&input.bytes]);
    input_params(&mut report, &input);
    report.param("k", k);
    report.param("t", t);
    report.param("budget", budget);
    report.param("nontrivial", nontrivial);
    let budget = budget.unwrap_or(UNLIMITED);
    let outcome = ekr_verdict(&input.complex, k, t, budget).and_then(|res| {
        let nt = if nontrivial {
            Some(max_nontrivial_t_intersecting(
                &input.complex.layer(k),
                t,
                budget,
            )?)
        } else {
            None
        };
        Ok((res, nt))
    });
    match outcome {
        Ok((res, nt)) => {
            if res.counterexample_candidate {
                report.violations.push(Violation::new(
                    "counterexample_candidate",
                    &res.witness,
                    format!(
                        "maximum {} exceeds the best star {} above the threshold",
                        res.max_size, res.best_star_size
                    ),
                ));
                report.status = Status::CounterexampleCandidate;
            }
            report.results = json!({
                "verdict": res,
                "nontrivial": nt.map(|e| json!({
                    "max_size": e.size,
                    "witness": e.witness,
                    "nodes": e.nodes,
                })),
            });
        }
        Err(Error::BudgetExhausted { budget }) => {
            report.violations.push(Violation::new(
                "budget",
                budget,
                "search stopped before optimality was proven",
            ));
            report.status = Status::BudgetExhausted;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

pub struct MonteCarloArgs<'a> {
    pub input: &'a Path,
    pub r: Option<Rational>,
    pub m: f64,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub two_color: Option<&'a Path>,
    pub excluded: Face,
}

pub fn montecarlo(a: &MonteCarloArgs) -> CliResult<Report> {
    let (bytes, fam) = read_family(a.input)?;
    match a.two_color {
        None => {
            let r =
                a.r.ok_or_else(|| usage("--r is required unless --two-color is given"))?;
            let mut report = Report::new("montecarlo", &[&bytes]);
            report.param("input", file_label(a.input));
            report.param("mode", "spread_cover");
            report.param("r", r.to_string());
            report.param("m", a.m);
            report.param("delta", a.delta);
            report.param("trials", a.trials);
            report.seed = Some(a.seed);
            let out = spread_cover_probability(&fam, r, a.m, a.delta, a.trials, a.seed)?;
            let margin = out.estimate.estimate + 3.0 * out.estimate.std_err - out.bound;
            if !out.vacuous && margin < 0.0 {
                report.violate(Violation::new(
                    "cover_bound",
                    json!({"estimate": out.estimate.estimate, "bound": out.bound}),
                    "estimate + 3 std_err falls below the guaranteed bound",
                ));
            }
            report.results = json!({
                "outcome": out,
                "estimate_plus_3se_minus_bound": margin,
            });
            Ok(report)
        }
        Some(g2_path) => {
            let (g2_bytes, g2) = read_family(g2_path)?;
            let mut report = Report::new("montecarlo", &[&bytes, &g2_bytes]);
            report.param("input", file_label(a.input));
            report.param("mode", "two_coloring");
            report.param("g2", file_label(g2_path));
            report.param("excluded", a.excluded);
            report.param("trials", a.trials);
            report.seed = Some(a.seed);
            let out = two_coloring_experiment(&fam, &g2, a.excluded, a.trials, a.seed)?;
            report.results = to_value(out);
            Ok(report)
        }
    }
}

pub fn plan(n: u64, k: u64, t: u64) -> CliResult<Report> {
    let mut report = Report::new("plan", &[]);
    report.param("n", n);
    report.param("k", k);
    report.param("t", t);
    report.results = to_value(parameter_plan(n, k, t)?);
    Ok(report)
}
