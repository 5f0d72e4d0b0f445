use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::One;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use mvtangent::geometry::{build_c_simplex, ExactFrame, Simplex};
use mvtangent::mcnaughton::{leq_scalar_multiple, ZMap};
use mvtangent::tangents::{
    check_rationally_outgoing, detect_k_tangent, tangent_simplex_search, ClosedSet, PointSequence,
    TangentCertificate, DEFAULT_TOL,
};
use mvtangent::triangulation::{
    regularize, subdivide_with_subpolyhedron, Polyhedron, SimplicialComplex,
};
use mvtangent::witness::{
    build_witness, pullback_tangent, refute_ideal_membership, verify_crux, PullbackInput,
    WitnessPair,
};
use mvtangent::{svg, Point, Rational};

#[derive(Parser)]
#[command(
    name = "mvtangent",
    version,
    about = "Exact polyhedral tools for McNaughton functions and outgoing tangents"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Numeric tolerance for tangent detection.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Largest multiple tried when refuting ideal membership.
    #[arg(long, global = true, default_value_t = mvtangent::witness::DEFAULT_M_MAX)]
    m_max: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Let plot2d draw the first two coordinates of higher-dimensional input.
    #[arg(long, global = true)]
    force_projection: bool,
    /// Tie-break seed; every algorithm is deterministic, so 0 is the only mode.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Refine a complex until every cell is regular.
    Regularize { complex: PathBuf },
    /// Regular subdivision of a complex in which a polyhedron is a union of cells.
    Subdivide {
        complex: PathBuf,
        polyhedron: PathBuf,
    },
    /// Regularity of a simplex or of every cell of a complex.
    CheckRegular { input: PathBuf },
    /// Build a Z-map from vertex values on a regular carrier.
    ExtendZmap { input: PathBuf },
    /// Evaluate a Z-map at points given as comma-separated rationals.
    Eval {
        zmap: PathBuf,
        #[arg(required = true)]
        points: Vec<String>,
    },
    /// Zero set of a Z-map, as a polyhedron.
    ZeroSet { zmap: PathBuf },
    /// Preimage of a polyhedron under a Z-map.
    Preimage { zmap: PathBuf, polyhedron: PathBuf },
    /// Decide f ≤ m·g on a closed set.
    Leq {
        f: PathBuf,
        g: PathBuf,
        set: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Detect a k-tangent of a sequence (or of a sample of a closed set).
    TangentDetect {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Sample to use when the input is a closed set.
        #[arg(long, default_value_t = 0)]
        sample: usize,
    },
    /// Find lengths λ with C_{x,u,λ} inside a polyhedron.
    TangentSimplex { input: PathBuf },
    /// Check a rationally outgoing tangent certificate against a closed set.
    CheckOutgoing { set: PathBuf, cert: PathBuf },
    /// Build the McNaughton pair (f, g) of a certificate.
    Witness {
        cert: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Check the zero-set chain of a witness pair and refute f ∈ ⟨g⟩.
    VerifyWitness { pair: PathBuf, set: PathBuf },
    /// Pull a 1-tangent of η(X) back to a tangent certificate of X.
    Pullback { input: PathBuf },
    /// SVG drawing of a planar closed set and optional certificate.
    Plot2d {
        set: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

enum Failure {
    /// A verified negative verdict; the artifact is still written.
    Negative,
    Input(String),
}

impl From<mvtangent::Error> for Failure {
    fn from(e: mvtangent::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    parse(path, &read_text(path)?)
}

/// Whether the top-level JSON object in `text` has `key`.
fn has_key(path: &Path, text: &str, key: &str) -> std::result::Result<bool, Failure> {
    let v: Value = parse(path, text)?;
    Ok(v.get(key).is_some())
}

fn parse_point(s: &str) -> std::result::Result<Point, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    Point::parse(&parts).map_err(|e| Failure::Input(format!("point {s:?}: {e}")))
}

struct Output<'a> {
    out: Option<&'a Path>,
}

impl Output<'_> {
    fn text(&self, s: &str) -> Outcome {
        match self.out {
            Some(p) => fs::write(p, s).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(s.as_bytes()).and_then(|()| stdout.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                        Err(Failure::Input(format!("stdout: {e}")))
                    }
                    _ => Ok(()),
                }
            }
        }
    }

    fn json<T: Serialize>(&self, v: &T) -> Outcome {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Input(e.to_string()))?;
        s.push('\n');
        self.text(&s)
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn check_regular(cells: Vec<Simplex>) -> (Value, bool) {
    let mut rows = Vec::new();
    let mut first_bad: Option<BigInt> = None;
    for s in &cells {
        let divisors = s.elementary_divisors();
        let worst = divisors.iter().max().cloned().unwrap_or_else(BigInt::one);
        if !worst.is_one() && first_bad.is_none() {
            first_bad = Some(worst.clone());
        }
        rows.push(json!({
            "simplex": s,
            "elementary_divisors": divisors.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            "regular": worst.is_one(),
        }));
    }
    let summary = match &first_bad {
        Some(d) => format!("non-regular: elementary divisor {d}"),
        None => "regular".to_string(),
    };
    (
        json!({ "regular": first_bad.is_none(), "cells": rows, "summary": summary }),
        first_bad.is_none(),
    )
}

fn pieces_json(z: &ZMap) -> Value {
    let rows: Vec<Value> = z
        .carrier()
        .cells()
        .iter()
        .zip(z.pieces())
        .map(|(cell, p)| {
            json!({
                "cell": cell,
                "matrix": p.matrix.iter().map(|r| r.iter().map(BigInt::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "offset": p.offset.iter().map(BigInt::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(rows)
}

#[derive(Deserialize)]
struct TangentSimplexInput {
    polyhedron: Polyhedron,
    x: Point,
    frame: ExactFrame,
}

#[derive(Deserialize)]
struct PullbackFile {
    eta: ZMap,
    #[serde(rename = "X")]
    x_set: ClosedSet,
    /// Preimage sequence in X; defaults to the first sample.
    #[serde(default)]
    sequence: Option<PointSequence>,
    u: Point,
    #[serde(with = "mvtangent::rational::rational_str")]
    eps: Rational,
    x: Point,
}

fn run(cli: Cli) -> Outcome {
    let opts = &cli.opts;
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Failure::Input("--tol must be positive".into()));
    }
    let out = Output {
        out: opts.out.as_deref(),
    };
    match &cli.command {
        Command::Regularize { complex } => {
            let k: SimplicialComplex = read(complex)?;
            out.json(&regularize(&k)?)
        }
        Command::Subdivide {
            complex,
            polyhedron,
        } => {
            let k: SimplicialComplex = read(complex)?;
            let q: Polyhedron = read(polyhedron)?;
            out.json(&subdivide_with_subpolyhedron(&k, &q)?)
        }
        Command::CheckRegular { input } => {
            let text = read_text(input)?;
            let cells = if has_key(input, &text, "cells")? {
                parse::<SimplicialComplex>(input, &text)?.cells()
            } else {
                vec![parse::<Simplex>(input, &text)?]
            };
            let (report, ok) = check_regular(cells);
            out.json(&report)?;
            if !ok {
                eprintln!("{}", report["summary"].as_str().unwrap_or_default());
            }
            verdict(ok)
        }
        Command::ExtendZmap { input } => {
            let z: ZMap = read(input)?;
            out.json(&json!({ "carrier": z.carrier(), "values": json!(z)["values"], "pieces": pieces_json(&z) }))
        }
        Command::Eval { zmap, points } => {
            let z: ZMap = read(zmap)?;
            let mut rows = Vec::new();
            for s in points {
                let p = parse_point(s)?;
                let v = z.evaluate(&p)?;
                rows.push(json!({ "point": p, "value": v }));
            }
            out.json(&rows)
        }
        Command::ZeroSet { zmap } => {
            let z: ZMap = read(zmap)?;
            out.json(&z.zero_set())
        }
        Command::Preimage { zmap, polyhedron } => {
            let z: ZMap = read(zmap)?;
            let r: Polyhedron = read(polyhedron)?;
            out.json(&z.preimage_polyhedron(&r)?)
        }
        Command::Leq { f, g, set, m } => {
            let (f, g): (ZMap, ZMap) = (read(f)?, read(g)?);
            let x: ClosedSet = read(set)?;
            let (holds, witness) = leq_scalar_multiple(&f, &g, *m, &x)?;
            out.json(&json!({ "m": m, "holds": holds, "witness": witness }))?;
            verdict(holds)
        }
        Command::TangentDetect { input, k, sample } => {
            let text = read_text(input)?;
            let seq = if has_key(input, &text, "limit")? {
                parse::<PointSequence>(input, &text)?
            } else {
                parse::<ClosedSet>(input, &text)?
                    .samples()
                    .get(*sample)
                    .cloned()
                    .ok_or_else(|| {
                        Failure::Input(format!("the closed set has no sample {sample}"))
                    })?
            };
            let est = detect_k_tangent(&seq, *k, opts.tol)?;
            out.json(&est)?;
            verdict(est.converged)
        }
        Command::TangentSimplex { input } => {
            let inp: TangentSimplexInput = read(input)?;
            let found = tangent_simplex_search(&inp.polyhedron, &inp.x, &inp.frame)?;
            let c = build_c_simplex(&found.spec)?;
            out.json(&json!({
                "x": found.spec.apex,
                "frame": found.spec.frame,
                "lambda": found.spec.lengths.iter().map(mvtangent::rational::format_rational).collect::<Vec<_>>(),
                "steps": found.steps.iter().map(mvtangent::rational::format_rational).collect::<Vec<_>>(),
                "generator": found.generator,
                "c_simplex": c,
            }))
        }
        Command::CheckOutgoing { set, cert } => {
            let x: ClosedSet = read(set)?;
            let cert: TangentCertificate = read(cert)?;
            let seq = x.samples().iter().find(|s| s.limit() == &cert.x);
            let report = check_rationally_outgoing(&cert, &x, seq, opts.tol)?;
            out.json(&report)?;
            eprintln!("{}", report.summary);
            verdict(report.verdict)
        }
        Command::Witness { cert, n } => {
            let cert: TangentCertificate = read(cert)?;
            out.json(&build_witness(&cert, *n)?)
        }
        Command::VerifyWitness { pair, set } => {
            let pair: WitnessPair = read(pair)?;
            let x: ClosedSet = read(set)?;
            let crux = verify_crux(&pair, &x)?;
            let refutation = refute_ideal_membership(&pair, &x, opts.m_max)?;
            let ok = crux.verdict && refutation.refuted_up_to_m_max;
            let summary = format!("{}\n{}", crux.summary, refutation.summary);
            out.json(&json!({ "crux": crux, "refutation": refutation, "verdict": ok, "summary": summary }))?;
            eprintln!("{summary}");
            verdict(ok)
        }
        Command::Pullback { input } => {
            let inp: PullbackFile = read(input)?;
            let seq = match &inp.sequence {
                Some(s) => s.clone(),
                None => inp.x_set.samples().first().cloned().ok_or_else(|| {
                    Failure::Input("no preimage sequence given and X has no samples".into())
                })?,
            };
            let result = pullback_tangent(&PullbackInput {
                eta: &inp.eta,
                x_set: &inp.x_set,
                seq: &seq,
                u: &inp.u,
                eps: &inp.eps,
                x: &inp.x,
            })?;
            out.json(&result)?;
            eprintln!("{}", result.note);
            verdict(result.certificate.is_some())
        }
        Command::Plot2d { set, cert } => {
            let x: ClosedSet = read(set)?;
            let cert: Option<TangentCertificate> = cert.as_deref().map(read).transpose()?;
            if x.dim() != 2 && opts.force_projection {
                eprintln!("warning: drawing the projection of a {}-dimensional set onto its first two coordinates", x.dim());
            }
            out.text(&svg::plot2d(&x, cert.as_ref(), opts.force_projection)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
