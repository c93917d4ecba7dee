//! `hsd`: batch front end for mask analysis, construction, refinement,
//! cascade evaluation and factorization.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsd_core::cascade::{build_initial, cascade_run};
use hsd_core::catalog::builtin;
use hsd_core::convergence::{decide, smoothness_estimate, Norm, DEFAULT_LEVELS, DEFAULT_MARGIN};
use hsd_core::mask_file::{MaskDocument, Metadata};
use hsd_core::normal_form::{factorize, verify};
use hsd_core::samples::DyadicSamples;
use hsd_core::subdivision::{basis_samples, hermite_refine};
use hsd_core::sum_rules::{
    construct_hermite_mask, hermite_mask_check, sum_rules_order, ConstructOptions,
};
use hsd_core::{CMat, Error, Jet, MatSeq};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "hsd",
    version,
    about = "Exact analysis of vector and Hermite subdivision masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sum rules, Hermite verdict, smoothness estimate and decision.
    Analyze(AnalyzeArgs),
    /// Solve for a Hermite mask with prescribed accuracy and support.
    Construct(ConstructArgs),
    /// Hermite refinement samples on a dyadic grid.
    Subdivide(SubdivideArgs),
    /// Cascade algorithm from the built-in interpolating initial function.
    Cascade(CascadeArgs),
    /// Normal form transform and factorization artifacts.
    Factor(FactorArgs),
}

#[derive(Args)]
struct MaskArg {
    /// Mask file path, or the name of a built-in mask.
    mask: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    mask: MaskArg,
    /// Highest sum-rule order probed.
    #[arg(long)]
    max_order: Option<usize>,
    /// Number of ρ levels.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
    /// Norm exponent: `inf` or a number ≥ 1.
    #[arg(long, default_value = "inf")]
    p: Norm,
    /// Smoothness target of the headline decision (default r − 1).
    #[arg(long)]
    m_target: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    m: usize,
    /// Support window `lo:hi`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    support: (i64, i64),
    #[arg(long)]
    interpolatory: bool,
    #[arg(long, default_value = "constructed")]
    name: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SubdivideArgs {
    #[command(flatten)]
    mask: MaskArg,
    #[arg(long)]
    levels: usize,
    /// `delta` for `w₀ = δ I_r`, or a mask file holding the initial data.
    #[arg(long, default_value = "delta")]
    input: String,
    /// Output window `lo:hi` in x.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    /// 17-significant-digit decimals instead of exact rationals.
    #[arg(long)]
    float: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CascadeArgs {
    #[command(flatten)]
    mask: MaskArg,
    #[arg(long)]
    levels: usize,
    /// Grid level of the initial samples (0 = integers).
    #[arg(long, default_value_t = 0)]
    sample_level: usize,
    /// Degree parameter of the initial function (default: sum-rule order − 1,
    /// at least r − 1).
    #[arg(long)]
    m: Option<usize>,
    /// Convolve each component with the reciprocal of its matching factor.
    #[arg(long)]
    correction: bool,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    #[arg(long)]
    float: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FactorArgs {
    #[command(flatten)]
    mask: MaskArg,
    /// Sum-rule order `m + 1` extracted into `V`.
    #[arg(long)]
    order: usize,
    /// Write `U.json`, `U_inv.json`, `a_ring.json`, `V.json`, `b.json` and
    /// `report.json` here instead of one document on stdout.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo = lo
        .trim()
        .parse::<i64>()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi = hi
        .trim()
        .parse::<i64>()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Parse(_) | Error::Infeasible(_) | Error::SupportTooShort { .. } => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn load_document(arg: &str) -> Outcome<MaskDocument> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        return Ok(MaskDocument::from_json(&text)?);
    }
    let name = arg.strip_prefix("builtin:").unwrap_or(arg);
    builtin(name).ok_or_else(|| Failure {
        code: 2,
        message: format!("{arg}: no such file or built-in mask"),
    })
}

fn load_mask(arg: &str) -> Outcome<(String, MatSeq)> {
    let doc = load_document(arg)?;
    let a = doc.to_seq()?;
    if a.rows() != a.cols() || a.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "mask must be square, got {}×{}",
            a.rows(),
            a.cols()
        ))
        .into());
    }
    Ok((doc.name, a))
}

fn emit(text: &str, output: Option<&Path>) -> Outcome<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn mat_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| Value::String(m[(i, j)].to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn jet_json(j: &Jet) -> Value {
    Value::Array(j.derivs().iter().map(mat_json).collect())
}

fn analyze(args: &AnalyzeArgs) -> Outcome<()> {
    let (name, a) = load_mask(&args.mask.mask)?;
    let r = a.rows();
    let sr = sum_rules_order(&a, args.max_order).map_err(|e| e.at("sum rules"))?;
    let sm = smoothness_estimate(&a, args.levels.max(1), args.p)?;
    let hermite = sr.order > 0 && hermite_mask_check(&a, sr.order).is_ok();
    let top = (r - 1).max(sr.order.saturating_sub(1));
    let decisions: Vec<Value> = (r - 1..=top)
        .map(|m| json!({ "m_target": m, "decision": decide(&a, m, sm.sm_estimate, args.margin).to_string() }))
        .collect();
    let m_target = args.m_target.unwrap_or(r - 1);
    let doc = json!({
        "mask": name,
        "r": r,
        "sum_rules": {
            "order": sr.order,
            "failure": sr.failure.as_ref().map(|f| f.to_string()),
            "matching_jet": sr.matching.as_ref().map(jet_json),
        },
        "hermite": { "accuracy": sr.order, "is_hermite_mask": hermite },
        "eigencheck": {
            "m": sm.eigencheck.m,
            "simple_one": sm.eigencheck.simple_one,
            "other_moduli": sm.eigencheck.others.iter().map(|z| z.norm()).collect::<Vec<_>>(),
            "pass": sm.eigencheck.pass,
        },
        "smoothness": {
            "p": sm.p.to_string(),
            "rho": sm.rho_estimates,
            "sm_levels": sm.sm_levels,
            "sm_estimate": sm.sm_estimate,
        },
        "decision": {
            "m_target": m_target,
            "margin": args.margin,
            "verdict": decide(&a, m_target, sm.sm_estimate, args.margin).to_string(),
        },
        "decisions": decisions,
    });
    emit(&pretty(&doc), args.output.as_deref())
}

fn construct(args: &ConstructArgs) -> Outcome<()> {
    let opts = ConstructOptions {
        interpolatory: args.interpolatory,
        ..Default::default()
    };
    let c = construct_hermite_mask(args.r, args.m, args.support, &opts)?;
    let (lo, hi) = args.support;
    let meta = Metadata {
        source: Some(format!(
            "construct --r {} --m {} --support {lo}:{hi}{}",
            args.r,
            args.m,
            if args.interpolatory {
                " --interpolatory"
            } else {
                ""
            }
        )),
        accuracy: Some(args.m + 1),
        notes: Vec::new(),
    };
    let doc = MaskDocument::from_seq(&args.name, &c.mask, meta);
    emit(&doc.to_json(), args.output.as_deref())?;
    let jet = serde_json::to_string(&jet_json(&c.matching)).expect("json values serialize");
    if args.output.is_some() {
        println!("matching jet: {jet}");
    } else {
        eprintln!("matching jet: {jet}");
    }
    Ok(())
}

fn samples_of(level: usize, seq: &MatSeq, window: Option<(i64, i64)>) -> DyadicSamples {
    let window = window.unwrap_or_else(|| {
        let (lo, hi) = seq.support().unwrap_or((0, 0));
        (lo.div_euclid(1 << level), -(-hi).div_euclid(1 << level))
    });
    DyadicSamples::from_fn(level, window, |k| seq.at(k))
}

fn subdivide(args: &SubdivideArgs) -> Outcome<()> {
    let (_, a) = load_mask(&args.mask.mask)?;
    let samples = if args.input == "delta" {
        basis_samples(&a, args.levels, args.window)?
    } else {
        let w0 = load_document(&args.input)?.to_seq()?;
        let w = hermite_refine(&a, &w0, args.levels)?;
        samples_of(args.levels, &w.values, args.window)
    };
    emit(&samples.to_csv(args.float), args.output.as_deref())
}

fn cascade(args: &CascadeArgs) -> Outcome<()> {
    let (_, a) = load_mask(&args.mask.mask)?;
    let r = a.rows();
    let sr = sum_rules_order(&a, None).map_err(|e| e.at("sum rules"))?;
    let m = args
        .m
        .unwrap_or_else(|| (r - 1).max(sr.order.saturating_sub(1)));
    let matching = if args.correction {
        Some(hermite_mask_check(&a, m + 1).map_err(|e| {
            Error::PreconditionViolated(format!("not a Hermite mask of accuracy {}: {e}", m + 1))
        })?)
    } else {
        None
    };
    let h = build_initial(r, m, matching.as_ref()).map_err(|e| e.at("initial function"))?;
    let f0 = h.samples(args.sample_level, r);
    let out = cascade_run(&a, &f0, args.levels, args.window)?;
    emit(&out.to_csv(args.float), args.output.as_deref())
}

fn factor(args: &FactorArgs) -> Outcome<()> {
    let (name, a) = load_mask(&args.mask.mask)?;
    let nf = factorize(&a, args.order)?;
    let matching = sum_rules_order(&a, None)?
        .matching
        .ok_or(Error::InsufficientSumRules {
            have: 0,
            need: args.order,
        })?;
    let check = verify(&a, &nf, &matching)?;
    let meta = |what: &str| Metadata {
        source: Some(format!("factor {name} --order {}", args.order)),
        accuracy: None,
        notes: vec![what.to_string()],
    };
    let parts = [
        ("U", &nf.u, "normal form transform"),
        ("U_inv", &nf.u_inv, "inverse transform"),
        ("a_ring", &nf.a_ring, "transformed mask"),
        ("V", &nf.v, "difference factor"),
        ("b", &nf.b, "derived mask"),
    ];
    let report = json!({
        "mask": name,
        "order": args.order,
        "swapped_column": nf.swapped,
        "verification": {
            "inverse": check.inverse,
            "conjugation": check.conjugation,
            "factorization": check.factorization,
            "normal_form": check.normal_form,
            "dual_space": check.dual_space,
        },
    });
    match &args.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            for (file, seq, what) in parts {
                let doc = MaskDocument::from_seq(file, seq, meta(what));
                let path = dir.join(format!("{file}.json"));
                fs::write(&path, doc.to_json()).map_err(|e| io_failure(&path, e))?;
            }
            let path = dir.join("report.json");
            fs::write(&path, pretty(&report)).map_err(|e| io_failure(&path, e))?;
        }
        None => {
            let mut doc = report;
            for (file, seq, what) in parts {
                let d = MaskDocument::from_seq(file, seq, meta(what));
                doc[file] = serde_json::to_value(d).expect("documents serialize");
            }
            emit(&pretty(&doc), None)?;
        }
    }
    if check.all() {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            message: "factorization failed verification".into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Construct(a) => construct(a),
        Command::Subdivide(a) => subdivide(a),
        Command::Cascade(a) => cascade(a),
        Command::Factor(a) => factor(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hsd: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
