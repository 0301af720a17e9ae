//! Command-line front end for the g2q engine: verification suites, dimension
//! queries, invariant construction, diagram evaluation and kernel caches.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use g2q::algebra::{self, AlgElem};
use g2q::diagrams::{self, Diagram};
use g2q::invariants::{self, InvariantValue};
use g2q::{rep, Check};

#[derive(Parser)]
#[command(name = "g2q", version, about = "Exact verification engine for U_q(G_2) diagram categories and invariants")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Number of bands m for invariant and spanning suites.
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Largest single-band degree (kernel caches, classical limit).
    #[arg(long, global = true, default_value_t = 4)]
    max_degree: usize,
    /// Largest total multidegree for the spanning suite.
    #[arg(long, global = true, default_value_t = 4)]
    max_total_degree: usize,
    /// Worker threads (affects timing only, never results).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write a JSON report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Directory for kernel caches.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict the commutation suite to a single lemma
        /// (ppp, two-two, ijij, phipsi, xpsi, xu, theta, zeta).
        #[arg(long)]
        only: Option<String>,
    },
    /// Print a dimension.
    Dim {
        #[arg(value_enum)]
        space: Space,
        /// Homogeneous degree (sqv, invariants).
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated multidegree (component).
        #[arg(long)]
        d: Option<String>,
    },
    /// Construct an invariant, verify its invariance, optionally print it.
    Invariant {
        #[arg(value_enum)]
        family: Family,
        /// Comma-separated band indices.
        #[arg(long)]
        indices: String,
        /// Print the canonical coordinates.
        #[arg(long)]
        print: bool,
    },
    /// Evaluate a diagram given in the slice DSL.
    Eval {
        #[arg(long)]
        diagram: String,
    },
    /// Build or clear the kernel caches.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Suite {
    Rep,
    Functor,
    Sqv,
    PreAm,
    Commute,
    Fft,
    Classical,
    All,
}

#[derive(Copy, Clone, ValueEnum)]
enum Space {
    Sqv,
    Invariants,
    Component,
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    Phi,
    Psi,
    Upsilon,
    Theta,
}

#[derive(Copy, Clone, ValueEnum)]
enum CacheAction {
    Build,
    Clear,
}

#[derive(Serialize)]
struct ReportCheck {
    id: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    time_ms: u64,
}

#[derive(Serialize)]
struct Environment {
    max_degree: usize,
    m: Option<usize>,
    cache_dir: Option<String>,
}

#[derive(Serialize)]
struct Report {
    suite: String,
    checks: Vec<ReportCheck>,
    environment: Environment,
}

/// A named batch of checks; batches are timed as units and their elapsed time
/// is shared evenly across their checks in the report.
struct Unit {
    name: &'static str,
    run: Box<dyn Fn() -> Vec<Check> + Send + Sync>,
}

fn unit(name: &'static str, run: impl Fn() -> Vec<Check> + Send + Sync + 'static) -> Unit {
    Unit {
        name,
        run: Box::new(run),
    }
}

fn suite_units(suite: Suite, common: &Common, only: Option<&str>) -> Result<Vec<Unit>, String> {
    let m = common.m;
    let dmax = common.max_degree;
    let tmax = common.max_total_degree;
    let mut units = Vec::new();
    let add_rep = |units: &mut Vec<Unit>| {
        units.push(unit("representation", rep::rep_suite));
        units.push(unit("structure-maps", rep::gamma_p_suite));
    };
    let add_functor = |units: &mut Vec<Unit>| {
        units.push(unit("functor-relations", diagrams::relation_suite));
        units.push(unit("cycle-reduction", || diagrams::reduction_suite(200)));
    };
    let add_sqv = |units: &mut Vec<Unit>| {
        units.push(unit("sqv-presentation", algebra::verify_presentation_sq));
        units.push(unit("quasi-commutation", algebra::verify_vartheta));
    };
    let add_pre_am = |units: &mut Vec<Unit>| {
        units.push(unit("pre-am-products", algebra::verify_prop_pre_am));
    };
    let add_commute = |units: &mut Vec<Unit>, only: Option<&str>| -> Result<(), String> {
        match only {
            None => {
                units.push(unit("constructions", invariants::verify_constructions));
                for name in invariants::COMMUTATION_SUITES {
                    units.push(unit(
                        commutation_unit_name(name),
                        move || invariants::verify_commutation(name).expect("known suite"),
                    ));
                }
            }
            Some(name) => {
                let name = name.to_owned();
                invariants::verify_commutation(&name)
                    .ok_or_else(|| format!("unknown commutation suite '{name}'"))?;
                units.push(unit(
                    commutation_unit_name(&name),
                    move || invariants::verify_commutation(&name).expect("known suite"),
                ));
            }
        }
        Ok(())
    };
    let add_fft = |units: &mut Vec<Unit>| {
        let top = m.unwrap_or(4).min(4);
        for bands in 1..=top.min(3) {
            units.push(unit(fft_unit_name(bands), move || {
                invariants::fft_span_check(bands, tmax)
            }));
        }
        if top >= 4 {
            units.push(unit("fft-m4", || {
                vec![invariants::fft_check_one(4, &[1, 1, 1, 1])]
            }));
        }
    };
    let add_classical = |units: &mut Vec<Unit>| {
        units.push(unit("classical-limit", move || {
            algebra::classical_limit_check(dmax.min(4))
        }));
    };
    match suite {
        Suite::Rep => add_rep(&mut units),
        Suite::Functor => add_functor(&mut units),
        Suite::Sqv => add_sqv(&mut units),
        Suite::PreAm => add_pre_am(&mut units),
        Suite::Commute => add_commute(&mut units, only)?,
        Suite::Fft => add_fft(&mut units),
        Suite::Classical => add_classical(&mut units),
        Suite::All => {
            add_rep(&mut units);
            add_functor(&mut units);
            add_sqv(&mut units);
            add_pre_am(&mut units);
            add_commute(&mut units, only)?;
            add_fft(&mut units);
            add_classical(&mut units);
        }
    }
    Ok(units)
}

fn commutation_unit_name(name: &str) -> &'static str {
    match name {
        "ppp" => "commute-ppp",
        "two-two" => "commute-two-two",
        "ijij" => "commute-ijij",
        "phipsi" => "commute-phipsi",
        "xpsi" => "commute-xpsi",
        "xu" => "commute-xu",
        "theta" => "commute-theta",
        "zeta" => "commute-zeta",
        _ => "commute",
    }
}

fn fft_unit_name(m: usize) -> &'static str {
    match m {
        1 => "fft-m1",
        2 => "fft-m2",
        _ => "fft-m3",
    }
}

fn run_units(units: Vec<Unit>, jobs: Option<usize>) -> Vec<(&'static str, Vec<Check>, u64)> {
    let work = |units: Vec<Unit>| -> Vec<(&'static str, Vec<Check>, u64)> {
        use rayon::prelude::*;
        units
            .into_par_iter()
            .map(|u| {
                let start = Instant::now();
                let checks = (u.run)();
                (u.name, checks, start.elapsed().as_millis() as u64)
            })
            .collect()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| work(units)),
        None => work(units),
    }
}

fn emit_report(
    path: &PathBuf,
    suite: &str,
    results: &[(&'static str, Vec<Check>, u64)],
    common: &Common,
) -> Result<(), String> {
    let mut checks = Vec::new();
    for (name, batch, ms) in results {
        let share = ms / (batch.len().max(1) as u64);
        for c in batch {
            checks.push(ReportCheck {
                id: format!("{name}/{}", c.id),
                status: if c.pass { "pass" } else { "fail" },
                witness: c.witness.clone(),
                time_ms: share,
            });
        }
    }
    let report = Report {
        suite: suite.to_owned(),
        checks,
        environment: Environment {
            max_degree: common.max_degree,
            m: common.m,
            cache_dir: common
                .cache_dir
                .as_ref()
                .map(|p| p.display().to_string()),
        },
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    std::fs::write(path, text).map_err(|e| format!("cannot write report: {e}"))
}

fn cmd_verify(suite: Suite, only: Option<&str>, common: &Common) -> Result<bool, String> {
    let suite_name = match suite {
        Suite::Rep => "rep",
        Suite::Functor => "functor",
        Suite::Sqv => "sqv",
        Suite::PreAm => "pre-am",
        Suite::Commute => "commute",
        Suite::Fft => "fft",
        Suite::Classical => "classical",
        Suite::All => "all",
    };
    let units = suite_units(suite, common, only)?;
    let results = run_units(units, common.jobs);
    let mut ok = true;
    for (name, checks, _) in &results {
        let fails: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        println!("{name}: {} checks, {} failures", checks.len(), fails.len());
        for f in &fails {
            println!("  FAIL {}: {}", f.id, f.witness.as_deref().unwrap_or(""));
        }
        ok &= fails.is_empty();
    }
    if let Some(path) = &common.report {
        emit_report(path, suite_name, &results, common)?;
    }
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid index '{p}'"))
        })
        .collect()
}

fn cmd_dim(space: Space, n: Option<usize>, d: Option<&str>, common: &Common) -> Result<(), String> {
    match space {
        Space::Sqv => {
            let n = n.ok_or("dim sqv requires --n")?;
            println!("{}", algebra::sq_dim_oracle(n));
        }
        Space::Invariants => {
            let n = n.ok_or("dim invariants requires --n")?;
            println!("{}", rep::invariant_space(n).dim());
        }
        Space::Component => {
            let d = parse_usize_list(d.ok_or("dim component requires --d")?)?;
            let m = common.m.unwrap_or(d.len());
            if d.len() != m {
                return Err(format!("multidegree has {} entries but m = {m}", d.len()));
            }
            println!("{}", invariants::invariant_dim(m, &d));
        }
    }
    Ok(())
}

fn print_elem(e: &AlgElem) {
    for (d, t) in e.components() {
        let digits: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        println!("degree ({})", digits.join(","));
        for (idx, c) in t.iter() {
            let labels: Vec<String> = idx.labels().iter().map(|x| x.to_string()).collect();
            println!("  [{}] {}", labels.join(","), c);
        }
    }
}

fn cmd_invariant(family: Family, indices: &str, print: bool, common: &Common) -> Result<bool, String> {
    let idx = parse_usize_list(indices)?;
    let top = idx.iter().copied().max().unwrap_or(1);
    let m = common.m.unwrap_or(top).max(top);
    let value: InvariantValue = match (family, idx.as_slice()) {
        (Family::Phi, &[i, j]) => invariants::phi(i, j, m),
        (Family::Psi, &[i, j, k]) => invariants::psi(i, j, k, m),
        (Family::Upsilon, &[i, j, k, l]) => invariants::upsilon(i, j, k, l, m),
        (Family::Theta, &[i, j, r, s, t]) => invariants::theta(i, j, r, s, t, m),
        _ => return Err("wrong number of indices for this family".into()),
    };
    let witness = invariants::invariance_witness(&value.elem);
    match &witness {
        None => println!("invariant: yes"),
        Some(w) => println!("invariant: NO ({w})"),
    }
    if print {
        print_elem(&value.elem);
    }
    Ok(witness.is_none())
}

fn cmd_eval(src: &str) -> Result<(), String> {
    let d = Diagram::parse(src).map_err(|e| format!("cannot parse diagram: {e:?}"))?;
    let f = diagrams::evaluate(&d);
    if d.bottom() == 0 && d.top() == 0 {
        println!("{}", f.column(&g2q::LegIndex::empty()).scalar_value());
    } else {
        for (idx, col) in f.iter_columns() {
            let from: Vec<String> = idx.labels().iter().map(|x| x.to_string()).collect();
            for (out, c) in col.iter() {
                let to: Vec<String> = out.labels().iter().map(|x| x.to_string()).collect();
                println!("[{}] -> [{}] {}", from.join(","), to.join(","), c);
            }
        }
    }
    Ok(())
}

fn cmd_cache(action: CacheAction, common: &Common) -> Result<(), String> {
    let dir = common
        .cache_dir
        .clone()
        .ok_or("cache commands require --cache-dir")?;
    match action {
        CacheAction::Build => {
            for n in 2..=common.max_degree {
                algebra::degree_data_cached(n, &dir).map_err(|e| e.to_string())?;
                println!("kernel-n{n}.txt");
            }
        }
        CacheAction::Clear => {
            for n in 2..=common.max_degree {
                let path = dir.join(format!("kernel-n{n}.txt"));
                if path.exists() {
                    std::fs::remove_file(&path).map_err(|e| e.to_string())?;
                    println!("removed kernel-n{n}.txt");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, String> = match &cli.cmd {
        Cmd::Verify { suite, only } => cmd_verify(*suite, only.as_deref(), &cli.common),
        Cmd::Dim { space, n, d } => cmd_dim(*space, *n, d.as_deref(), &cli.common).map(|()| true),
        Cmd::Invariant {
            family,
            indices,
            print,
        } => cmd_invariant(*family, indices, *print, &cli.common),
        Cmd::Eval { diagram } => cmd_eval(diagram).map(|()| true),
        Cmd::Cache { action } => cmd_cache(*action, &cli.common).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
