use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use injfactor::analysis::{check_certificate, coimage_census, trace_orbit, window_census, Verdict};
use injfactor::conjugacy::conjugator;
use injfactor::describe::map_from_description;
use injfactor::dot::graph_window;
use injfactor::element::parse_element_list;
use injfactor::pipeline::{extract_witnesses, synthesize, verify_witness, FactorizationWitness, VerifyReport};
use injfactor::{default_window, CycleType, Error, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "injfactor", version, about = "Factor injective endomaps into conjugates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build f, g, h of the given types and write the witness bundle.
    Synthesize {
        #[arg(long)]
        tf: PathBuf,
        #[arg(long)]
        tg: PathBuf,
        #[arg(long)]
        th: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Verify the witness on this many points before exiting.
        #[arg(long)]
        verify: Option<usize>,
    },
    /// Replay a bundle and check the witness identity and certificates.
    Verify {
        plan: PathBuf,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        fmt: Format,
    },
    /// Trace orbits of a map at given points or over a window.
    Cycles {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, conflicts_with = "window", allow_hyphen_values = true)]
        points: Option<String>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        fmt: Format,
    },
    /// Write the graph of a map on a window as DOT.
    Graph {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find a permutation a with g = a f a⁻¹ and write its description.
    Conjugate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        verify: Option<usize>,
    },
}

#[derive(Args)]
struct Format {
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Error(Error),
    Io(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Mismatch(_) => 3,
            Failure::Error(e) => match e {
                Error::Malformed(_) | Error::OutOfCarrier(_) => 1,
                Error::VerificationFailed(_) => 3,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Error(e) => e.to_string(),
            Failure::Io(m) | Failure::Mismatch(m) => m.clone(),
        }
    }
}

fn read_json(p: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())).into())
}

fn write(p: &Path, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
}

fn read_type(p: &Path) -> Result<CycleType, Failure> {
    Ok(CycleType::from_json(&read_json(p)?)?)
}

fn print_report(r: &VerifyReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(r).unwrap());
        return;
    }
    println!("{:<14} {:>10}", "check", "result");
    println!("{:<14} {:>10}", "window", r.window);
    println!("{:<14} {:>10}", "identity", format!("{}/{}", r.checked - r.mismatches.len(), r.checked));
    println!("{:<14} {:>10}", "certificates", if r.violations.is_empty() { "ok".to_string() } else { r.violations.len().to_string() });
    println!("{:<14} {:>10}", "elapsed_ms", r.elapsed_ms);
    if let Some(m) = r.mismatches.first() {
        println!("first mismatch at {}: expected {}, got {}", m.element, m.expected, m.got);
    }
    for (name, v) in r.violations.iter().take(5) {
        println!("violation in {name} at {}: {}", v.element, v.law);
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Synthesize { tf, tg, th, out, verify } => {
            let (tf, tg, th) = (read_type(&tf)?, read_type(&tg)?, read_type(&th)?);
            let state = synthesize(&tf, &tg, &th)?;
            let w = extract_witnesses(state, &tf, &tg, &th)?;
            write(&out, &serde_json::to_string_pretty(&w.bundle()).unwrap())?;
            if let Some(n) = verify {
                let r = verify_witness(&w, n);
                if !r.ok() {
                    print_report(&r, false);
                    return Err(Failure::Mismatch(format!("verification failed on {}/{}", r.mismatches.len(), r.checked)));
                }
                println!("verified {}/{}", r.checked, r.checked);
            }
            Ok(())
        }
        Cmd::Verify { plan, window, budget, fmt } => {
            let n = window.unwrap_or_else(default_window);
            let w = FactorizationWitness::from_bundle(&read_json(&plan)?)?;
            let r = verify_witness(&w, n);
            print_report(&r, fmt.json);
            if !fmt.json && n > 0 {
                println!();
                println!("{:<4} {:>8} {:>8} {:>8} {:>12}  certified", "map", "forward", "open", "finite", "inconclusive");
                for (name, m) in [("f", &w.state.f), ("g", &w.state.g), ("h", &w.state.h)] {
                    let c = window_census(m, n, budget);
                    let finite: u64 = c.finite.values().sum();
                    let cert = m.census().map_or("-".to_string(), |t| t.to_json().to_string());
                    println!("{name:<4} {:>8} {:>8} {:>8} {:>12}  {cert}", c.forward, c.open, finite, c.inconclusive);
                }
            }
            if r.ok() {
                Ok(())
            } else {
                Err(Failure::Mismatch(format!("{} mismatches, {} violations", r.mismatches.len(), r.violations.len())))
            }
        }
        Cmd::Cycles { map, points, window, budget, fmt } => {
            let f = map_from_description(&read_json(&map)?)?;
            if let Some(p) = points {
                let pts = parse_element_list(&p)?;
                let reports = pts.iter().map(|x| trace_orbit(&f, x, budget)).collect::<Result<Vec<_>, _>>()?;
                if fmt.json {
                    println!("{}", serde_json::to_string_pretty(&reports).unwrap());
                    return Ok(());
                }
                println!("{:<24} {:<16} {:<24} {:>6}", "point", "verdict", "detail", "steps");
                for r in reports {
                    let (v, d) = match &r.verdict {
                        Verdict::Finite { length } => ("finite", format!("length {length}")),
                        Verdict::Forward { initial, offset } => ("forward", format!("{initial} + {offset}")),
                        Verdict::OpenCertified { cycle } => ("open_certified", cycle.0.to_string()),
                        Verdict::Inconclusive { budget } => ("inconclusive", format!("budget {budget}")),
                    };
                    println!("{:<24} {:<16} {:<24} {:>6}", r.subject.to_string(), v, d, r.trace_len);
                }
                return Ok(());
            }
            let n = window.unwrap_or_else(default_window);
            let c = window_census(&f, n, budget);
            let coimage = coimage_census(&f, n);
            if fmt.json {
                let mut v = serde_json::to_value(&c).unwrap();
                v["coimage"] = coimage.into();
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
                return Ok(());
            }
            println!("window: {n}");
            for (len, k) in &c.finite {
                println!("{len}-cycles seen: {k}");
            }
            println!("open cycles seen: {}", c.open);
            println!("inconclusive points: {}", c.inconclusive);
            println!("forward cycles seen: {}; coimage in window: {coimage}", c.forward);
            Ok(())
        }
        Cmd::Graph { map, rows, cols, out } => {
            let f = map_from_description(&read_json(&map)?)?;
            let g = graph_window(&f, rows, cols)?;
            let name = map.file_stem().and_then(|s| s.to_str()).unwrap_or("map");
            write(&out, &g.to_dot(name))?;
            println!("{} nodes, {} edges", g.nodes.len() + g.outside.len(), g.edges.len());
            Ok(())
        }
        Cmd::Conjugate { f, g, out, verify } => {
            let f = map_from_description(&read_json(&f)?)?;
            let g = map_from_description(&read_json(&g)?)?;
            let a = conjugator(&f, &g)?;
            write(&out, &serde_json::to_string_pretty(a.description()).unwrap())?;
            let n = verify.unwrap_or_else(default_window);
            let window = g.carrier().window(n);
            for x in &window {
                let y = a.backward(&f.eval(&a.forward(x)));
                if y != g.eval(x) {
                    return Err(Failure::Mismatch(format!("mismatch at {x}: expected {}, got {y}", g.eval(x))));
                }
            }
            let bad = check_certificate(&g, n).len() + check_certificate(&f, n).len();
            if bad > 0 {
                return Err(Failure::Mismatch(format!("{bad} certificate violations")));
            }
            println!("verified {}/{}", window.len(), window.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
