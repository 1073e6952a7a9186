use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use qec_core::cone::{self, DEFAULT_MEMBERSHIP_TOL, DEFAULT_SATURATION_TOL};
use qec_core::constructions::{self, ConstructionResult, FamilyParams, DEFAULT_AUX_DIM};
use qec_core::entropy::{entropy_vector, format_row, format_sig17, EntropyVector};
use qec_core::io::{self, State, StateJson};
use qec_core::lemma_lab::{self, DEFAULT_PRODUCT_TOL};
use qec_core::linalg::C64;
use qec_core::qstate::{PartyDims, SubsystemMask, DEFAULT_DIM_CAP};
use qec_core::tip_probe::{self, ProbeConfig, DEFAULT_H_MIN};
use qec_core::QecError;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const CLAIM_TOL: f64 = 1e-8;
const LEMMA_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "qec", version, about = "Entropy vectors, entropy cones and tip bounds for multipartite quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionName {
    #[value(name = "vN")]
    VN,
    #[value(name = "wN")]
    WN,
    #[value(name = "tilde-v4")]
    TildeV4,
    Family,
}

#[derive(Subcommand)]
enum Command {
    /// Print the entropy vector of a state file.
    EntropyVector {
        state: PathBuf,
        /// Trace out a party before evaluating (1-based, repeatable).
        #[arg(long = "trace-out")]
        trace_out: Vec<usize>,
        /// Order pairs as (BC, AC, AB) for three parties.
        #[arg(long)]
        paper_order: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Prefix the CSV row with a header of subset labels.
        #[arg(long)]
        header: bool,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        cap: usize,
    },
    /// Build a named state, verify it, and print the report.
    Construct {
        #[arg(value_enum)]
        name: ConstructionName,
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated coefficients; `re:im` for complex entries.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_AUX_DIM)]
        aux_dim: usize,
        /// Write the state as JSON to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cone membership, three-party branch and tip-bound evaluation.
    ConeCheck {
        /// Comma-separated entropy vector.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "state")]
        vector: Option<String>,
        #[arg(long)]
        state: Option<PathBuf>,
        /// Read `--vector` in (A, B, C, BC, AC, AB, ABC) order.
        #[arg(long)]
        paper_order: bool,
        #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_SATURATION_TOL)]
        saturation_tol: f64,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        cap: usize,
    },
    /// Lemma margins and the sum bound for a pure state.
    VerifyLemmas {
        state: PathBuf,
        /// Party treated as the first one (1-based).
        #[arg(long, default_value_t = 1)]
        party: usize,
        #[arg(long, default_value_t = DEFAULT_PRODUCT_TOL)]
        product_tol: f64,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        cap: usize,
    },
    /// Run a theorem or scale probe described by a JSON config.
    Probe { config: PathBuf },
    /// Emit the three-parameter face of the three-party cone as a CSV point cloud.
    Figure2 {
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        /// Largest coordinate value on each axis.
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Verification(String),
    Input(String),
    Numerical(String),
}

impl From<QecError> for Failure {
    fn from(e: QecError) -> Self {
        match e {
            QecError::EigenFailure | QecError::EigenvalueOutOfRange { .. } | QecError::Degenerate(_) => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::EntropyVector { state, trace_out, paper_order, format, header, cap } => {
            cmd_entropy_vector(&state, &trace_out, paper_order, format, header, cap)
        }
        Command::Construct { name, n, a, alpha, beta, gamma, delta, aux_dim, output } => {
            cmd_construct(name, n, a.as_deref(), [alpha, beta, gamma, delta], aux_dim, output.as_deref())
        }
        Command::ConeCheck { vector, state, paper_order, tol, saturation_tol, cap } => {
            cmd_cone_check(vector.as_deref(), state.as_deref(), paper_order, tol, saturation_tol, cap)
        }
        Command::VerifyLemmas { state, party, product_tol, cap } => cmd_verify_lemmas(&state, party, product_tol, cap),
        Command::Probe { config } => cmd_probe(&config),
        Command::Figure2 { resolution, max, output } => cmd_figure2(resolution, max, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path, cap: usize) -> Result<State, Failure> {
    let text = read_file(path)?;
    io::parse_state(&text, cap).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json output"));
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn parse_coefficient(s: &str) -> Result<C64, Failure> {
    let bad = || Failure::Input(format!("cannot parse coefficient `{s}`"));
    match s.split_once(':') {
        Some((re, im)) => Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?)),
        None => Ok(C64::new(s.trim().parse().map_err(|_| bad())?, 0.0)),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Failure::Input(format!("cannot parse number `{x}`"))))
        .collect()
}

fn cmd_entropy_vector(path: &Path, trace_out: &[usize], paper_order: bool, format: Format, header: bool, cap: usize) -> CmdResult {
    let state = load_state(path, cap)?;
    let full = entropy_vector(state.as_marginals())?;
    let n = full.party_count();
    let mut removed = SubsystemMask::EMPTY;
    for &p in trace_out {
        if p == 0 || p > n {
            return Err(Failure::Input(format!("--trace-out {p} is not a party of a {n}-party state")));
        }
        removed = removed.union(SubsystemMask::single(p - 1));
    }
    let keep = SubsystemMask::full(n).difference(removed);
    if keep.is_empty() {
        return Err(Failure::Input("cannot trace out every party".into()));
    }
    let v = full.restrict(keep)?;
    if paper_order && v.party_count() != 3 {
        return Err(Failure::Input("--paper-order needs a three-party vector".into()));
    }
    let (labels, values) = if paper_order {
        (vec!["A", "B", "C", "BC", "AC", "AB", "ABC"].into_iter().map(String::from).collect(), v.to_paper_order()?)
    } else {
        (v.labels(), v.values().to_vec())
    };
    match format {
        Format::Csv => {
            if header {
                println!("{}", labels.join(","));
            }
            println!("{}", format_row(&values));
        }
        Format::Json => print_json(&json!({ "parties": v.party_count(), "labels": labels, "values": values })),
    }
    Ok(())
}

fn paper_view(v: &EntropyVector) -> Option<Vec<f64>> {
    match v.party_count() {
        3 => v.to_paper_order().ok(),
        4 => v.restrict(SubsystemMask::full(3)).ok()?.to_paper_order().ok(),
        _ => None,
    }
}

fn cmd_construct(
    name: ConstructionName,
    n: Option<usize>,
    a: Option<&str>,
    targets: [Option<f64>; 4],
    aux_dim: usize,
    output: Option<&Path>,
) -> CmdResult {
    let mut warnings: Vec<String> = Vec::new();
    let (result, params): (ConstructionResult, Value) = match name {
        ConstructionName::VN => {
            let n = n.ok_or_else(|| Failure::Input("vN needs --n".into()))?;
            (constructions::v_state(n)?, json!({ "n": n }))
        }
        ConstructionName::WN => {
            let n = n.ok_or_else(|| Failure::Input("wN needs --n".into()))?;
            (constructions::w_state(n)?, json!({ "n": n }))
        }
        ConstructionName::TildeV4 => {
            let a = a.ok_or_else(|| Failure::Input("tilde-v4 needs --a".into()))?;
            let coeffs: Vec<C64> = a.split(',').map(parse_coefficient).collect::<Result<_, _>>()?;
            let coeffs: [C64; 4] = coeffs
                .try_into()
                .map_err(|v: Vec<C64>| Failure::Input(format!("--a needs 4 coefficients, got {}", v.len())))?;
            let alpha = constructions::coefficient_entropy(&coeffs);
            if alpha <= lemma_lab::MIN_CONSTRAINED_ENTROPY {
                warnings.push(format!("H(X_4) = {alpha}: the fourth party is pure, so the sum-bound hypotheses fail"));
            }
            (constructions::tilde_v4(&coeffs)?, json!({ "a": coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(), "alpha": alpha }))
        }
        ConstructionName::Family => {
            let [alpha, beta, gamma, delta] = targets;
            let get = |x: Option<f64>, flag: &str| x.ok_or_else(|| Failure::Input(format!("family needs --{flag}")));
            let p = FamilyParams::from_entropies(
                get(alpha, "alpha")?,
                get(beta, "beta")?,
                get(gamma, "gamma")?,
                get(delta, "delta")?,
                aux_dim,
            )?;
            if p.alpha <= cone::NONZERO_THRESHOLD {
                warnings.push("alpha = 0: H(ABC) vanishes and the corollary conditions fail".into());
            }
            let params = json!({ "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "delta": p.delta, "aux_dim": aux_dim });
            (constructions::four_param_family(&p)?, params)
        }
    };
    if let Some(path) = output {
        write_file(path, &io::pure_to_json(&result.state))?;
    }
    let residual = result.vector_residual();
    let mut report = json!({
        "name": result.name,
        "parameters": params,
        "dims": result.state.dims().as_slice(),
        "claimed": result.claimed.values(),
        "verified": result.verified.values(),
        "labels": result.verified.labels(),
        "vector_residual": residual,
        "max_marginal_residual": result.max_marginal_residual,
        "warnings": warnings,
    });
    if let (Some(c), Some(v)) = (paper_view(&result.claimed), paper_view(&result.verified)) {
        report["abc_claimed_paper_order"] = json!(c);
        report["abc_verified_paper_order"] = json!(v);
    }
    print_json(&report);
    if residual > CLAIM_TOL {
        return Err(Failure::Verification(format!("claimed and verified vectors differ by {residual:e}")));
    }
    Ok(())
}

fn cmd_cone_check(
    vector: Option<&str>,
    state: Option<&Path>,
    paper_order: bool,
    tol: f64,
    saturation_tol: f64,
    cap: usize,
) -> CmdResult {
    let v = match (vector, state) {
        (Some(text), None) => {
            let values = parse_reals(text)?;
            if paper_order {
                EntropyVector::from_paper_order(&values)?
            } else {
                EntropyVector::from_values(values)?
            }
        }
        (None, Some(path)) => entropy_vector(load_state(path, cap)?.as_marginals())?,
        _ => return Err(Failure::Input("give exactly one of --vector or --state".into())),
    };
    let report = cone::membership_with(&v, tol, saturation_tol)?;
    let tip = cone::tip_bounds(&v, tol);
    let mut out = json!({
        "labels": v.labels(),
        "values": v.values(),
        "margins": to_value(&report.margins),
        "inside": report.inside,
        "violated": report.violated,
        "saturated": report.saturated,
        "branch": to_value(&report.sigma3_branch),
        "tip": to_value(&tip),
    });
    if v.party_count() == 3 {
        out["line_ell"] = to_value(&cone::line_ell_check(&v, tol)?);
        out["paper_order"] = json!(v.to_paper_order()?);
    }
    if v.party_count() == 4 && tip.isolated_party == Some(0) {
        out["ordering"] = to_value(&cone::n4_ordering_bounds(&v, tol)?);
    }
    print_json(&out);
    if !report.inside {
        return Err(Failure::Verification(format!("violated: {}", report.violated.join(", "))));
    }
    Ok(())
}

fn cmd_verify_lemmas(path: &Path, party: usize, product_tol: f64, cap: usize) -> CmdResult {
    let psi = match load_state(path, cap)? {
        State::Pure(p) => p,
        State::Mixed(_) => {
            return Err(Failure::Input("lemma checks need a pure state; purify the density matrix first".into()))
        }
    };
    let n = psi.party_count();
    if party == 0 || party > n {
        return Err(Failure::Input(format!("--party {party} is not a party of a {n}-party state")));
    }
    let r = lemma_lab::verify_lemmas(&psi, party - 1, product_tol)?;
    let mut margins = json!({
        "lemma1": r.epsilons.lemma1,
        "lemma2": r.epsilons.lemma2,
        "lemma3": r.epsilons.lemma3,
        "entropy_bounds": to_value(&r.entropy_bounds),
    });
    if let Some(t) = &r.theorem {
        margins["theorem_sum"] = json!(t.entropy_sum);
        margins["sum_margin"] = json!(t.sum_margin);
        margins["eps_margin"] = json!(t.eps_margin);
        margins["proof_margin"] = json!(t.proof_margin);
    }
    print_json(&json!({
        "party": party,
        "margins": margins,
        "epsilons": r.epsilons.eps_i,
        "eps_total": r.epsilons.eps_total,
        "v111_sq": r.epsilons.v111_sq,
        "tail_sum": r.epsilons.tail_sum,
        "degenerate": r.epsilons.degenerate,
        "hypotheses": to_value(&r.hypotheses),
    }));
    let mut failed: Vec<String> = Vec::new();
    let mut check = |name: &str, m: f64| {
        if m < -LEMMA_TOL {
            failed.push(format!("{name} = {m:e}"));
        }
    };
    check("lemma1", r.epsilons.lemma1);
    check("lemma3", r.epsilons.lemma3);
    if let Some(t) = &r.theorem {
        check("lemma2", t.lemma2);
        check("proof", t.proof_margin);
        check("sum bound", if t.sum_margin > 0.0 { 0.0 } else { -1.0 });
    }
    for b in &r.entropy_bounds {
        check(&format!("entropy bound (party {})", b.party + 1), b.upper);
        if let Some(l) = b.lower {
            check(&format!("linear bound (party {})", b.party + 1), l);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join("; ")))
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProbeMode {
    Theorem,
    Scale,
}

#[derive(Deserialize)]
struct ProbeFile {
    mode: ProbeMode,
    /// Theorem mode: constrained party, 1-based.
    #[serde(default = "one")]
    constrained_party: usize,
    #[serde(default = "default_h_min")]
    h_min: f64,
    /// Scale mode: explicit target, or `scale` times the unit ℓ vector.
    #[serde(default)]
    target: Option<Vec<f64>>,
    #[serde(default)]
    scale: Option<f64>,
    #[serde(default)]
    paper_order: bool,
    /// Scale mode: start restart 0 from `Tr_D |V_4><V_4|`.
    #[serde(default)]
    witness_v4: bool,
    #[serde(flatten)]
    probe: ProbeConfig,
}

fn one() -> usize {
    1
}

fn default_h_min() -> f64 {
    DEFAULT_H_MIN
}

fn cmd_probe(path: &Path) -> CmdResult {
    let text = read_file(path)?;
    let file: ProbeFile =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    match file.mode {
        ProbeMode::Theorem => {
            let n = file.probe.dims.len();
            if file.constrained_party == 0 || file.constrained_party > n {
                return Err(Failure::Input(format!("constrained_party {} out of range", file.constrained_party)));
            }
            let r = tip_probe::minimize(&file.probe, file.constrained_party - 1, file.h_min)?;
            let mut out = json!({
                "mode": "theorem",
                "config": to_value(&file.probe),
                "result": to_value(&r),
                "feasible_objectives": r.feasible_objectives(),
            });
            if let Some(psi) = &r.best_state {
                let v = entropy_vector(psi)?;
                out["best_state"] = to_value(&StateJson::from(psi));
                out["best_vector"] = json!(v.values());
                out["bounds"] = to_value(&cone::tip_bounds(&v, DEFAULT_MEMBERSHIP_TOL));
            }
            print_json(&out);
            let bad: Vec<f64> = r.feasible_objectives().into_iter().filter(|&s| s <= 1.0).collect();
            if !bad.is_empty() {
                return Err(Failure::Verification(format!("feasible entropy sums not above 1: {bad:?}")));
            }
            Ok(())
        }
        ProbeMode::Scale => {
            let target = match (&file.target, file.scale) {
                (Some(t), None) if file.paper_order => EntropyVector::from_paper_order(t)?,
                (Some(t), None) => EntropyVector::from_values(t.clone())?,
                (None, Some(c)) => EntropyVector::from_paper_order(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 1.0])?.scaled(c),
                _ => return Err(Failure::Input("scale mode needs exactly one of `target` or `scale`".into())),
            };
            let dims = PartyDims::with_cap(file.probe.dims.clone(), DEFAULT_DIM_CAP)?;
            let mut cfg = file.probe.clone();
            if file.witness_v4 {
                if dims.as_slice() != [4, 4, 4, 4] {
                    return Err(Failure::Input("witness_v4 needs dims [4, 4, 4, 4]".into()));
                }
                cfg = cfg.with_warm_start(&constructions::v_state(4)?.state);
            }
            let r = tip_probe::scale_feasibility(&target, &dims, &cfg)?;
            print_json(&json!({
                "mode": "scale",
                "config": to_value(&file.probe),
                "result": to_value(&r),
                "best_state": to_value(&r.best_state_json()),
                "exclusion_advisories": r.target_bounds.exclusion_advisories,
            }));
            Ok(())
        }
    }
}

fn cmd_figure2(resolution: usize, max: f64, output: Option<&Path>) -> CmdResult {
    if resolution < 2 {
        return Err(Failure::Input("resolution must be at least 2".into()));
    }
    if !(max > 0.0) {
        return Err(Failure::Input("max must be positive".into()));
    }
    let grid: Vec<f64> = (0..resolution).map(|k| max * k as f64 / (resolution - 1) as f64).collect();
    let mut csv = String::from("hA,hC,hABC,inside_sigma3,excluded_by_corollary\n");
    for &a in &grid {
        for &c in &grid {
            for &t in &grid {
                let v = figure2_vector(a, c, t)?;
                let inside = cone::membership(&v, DEFAULT_MEMBERSHIP_TOL)?.inside;
                let excluded = inside && !cone::tip_bounds(&v, DEFAULT_MEMBERSHIP_TOL).exclusion_advisories.is_empty();
                csv.push_str(&format!("{},{},{},{},{}\n", format_sig17(a), format_sig17(c), format_sig17(t), inside, excluded));
            }
        }
    }
    match output {
        Some(path) => write_file(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// The face `III_XY = 0` for all pairs with `H(A) = H(B)`, in canonical order.
fn figure2_vector(a: f64, c: f64, t: f64) -> Result<EntropyVector, Failure> {
    Ok(EntropyVector::new(3, vec![a, a, c, c + t, a + t, a + t, t])?)
}
