//! Command-line interface: `run`, `gallery` and `validate`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::gallery;
use crate::output::write_outcome;
use crate::runner::{self, Options, RunError};
use crate::scenario::{self, Scenario};

#[derive(Debug, Parser)]
#[command(name = "fixlab", version, about = "Fixed-point iteration and contraction-condition checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file or gallery entry.
    Run {
        /// Path to a scenario TOML file, or a gallery entry name.
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// List the gallery, or run entries of it with --run.
    Gallery {
        /// Run the named entries (all when none are named).
        #[arg(long)]
        run: bool,
        names: Vec<String>,
        #[command(flatten)]
        common: Common,
        /// Scenarios run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a scenario file without running it.
    Validate { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory; each scenario writes into its own subdirectory.
    #[arg(long, default_value = "fixlab-out")]
    pub out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiply horizons and sample counts of the budget.
    #[arg(long, default_value_t = 1.0)]
    pub budget_scale: f64,
    /// Exit with 3 when the worst verdict is inconclusive.
    #[arg(long)]
    pub strict: bool,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            seed: self.seed,
            budget_scale: self.budget_scale,
            strict: self.strict,
        }
    }
}

fn load(arg: &str) -> Result<Scenario, String> {
    let path = Path::new(arg);
    if path.is_file() {
        let src = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
        return scenario::parse(&src).map_err(|d| {
            let lines: Vec<String> = d.iter().map(|d| d.to_string()).collect();
            format!("{}: {}", path.display(), lines.join("; "))
        });
    }
    gallery::find(arg)
        .map(|e| e.scenario)
        .ok_or_else(|| format!("'{}' is neither a file nor a gallery entry", arg))
}

/// Runs one scenario, writes its artifacts and prints a summary; returns
/// the exit code.
pub fn run_one(sc: &Scenario, common: &Common) -> (i32, String) {
    let mut log = String::new();
    let outcome = match runner::run(sc, &common.options()) {
        Ok(o) => o,
        Err(e) => {
            let code = match e {
                RunError::Invalid(_) | RunError::Input(_) => 1,
            };
            return (code, format!("{}: error: {}\n", sc.name, e));
        }
    };
    let dir = match write_outcome(&outcome, &common.out) {
        Ok(d) => d,
        Err(e) => return (1, format!("{}: error: {:#}\n", sc.name, e)),
    };
    let r = &outcome.report;
    for sec in &r.sections {
        for rep in &sec.reports {
            log.push_str(&format!(
                "{}  {:<8} {:<22} {}\n",
                r.scenario,
                sec.run.name(),
                rep.condition_id.to_string(),
                rep.verdict
            ));
        }
        for route in &sec.routes {
            log.push_str(&format!(
                "{}  {:<8} {:<22} {}\n",
                r.scenario,
                sec.run.name(),
                format!("route:{:?}", route.route),
                route.verdict
            ));
        }
    }
    for e in &r.expectations {
        log.push_str(&format!(
            "{}  expect   {} -> {} ({})\n",
            r.scenario,
            e.what,
            if e.met { "met" } else { "VIOLATED" },
            e.detail
        ));
    }
    log.push_str(&format!(
        "{}  overall {} -> exit {} ({})\n",
        r.scenario,
        r.verdict,
        r.exit_code,
        dir.display()
    ));
    (r.exit_code, log)
}

/// Combined exit code of a batch: configuration errors dominate, then
/// failures, then strict inconclusives.
pub fn combine(codes: &[i32]) -> i32 {
    for c in [1, 2, 3] {
        if codes.contains(&c) {
            return c;
        }
    }
    0
}

/// Runs scenarios on `jobs` threads; logs are printed in input order.
pub fn run_batch(scenarios: &[Scenario], common: &Common, jobs: usize) -> i32 {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(i32, String)>>> = Mutex::new(vec![None; scenarios.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, scenarios.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= scenarios.len() {
                    break;
                }
                let r = run_one(&scenarios[k], common);
                results.lock().expect("result lock")[k] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("result lock");
    let mut codes = Vec::new();
    for (code, log) in results.into_iter().flatten() {
        print!("{}", log);
        codes.push(code);
    }
    combine(&codes)
}

pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { scenario, common } => match load(&scenario) {
            Ok(sc) => {
                let (code, log) = run_one(&sc, &common);
                if code == 1 {
                    eprint!("{}", log);
                } else {
                    print!("{}", log);
                }
                code
            }
            Err(e) => {
                eprintln!("error: {}", e);
                1
            }
        },
        Command::Gallery {
            run,
            names,
            common,
            jobs,
        } => {
            let all = gallery::list_gallery();
            if !run {
                for e in &all {
                    println!("{:<20} {}", e.name, e.description());
                }
                return 0;
            }
            let mut picked = Vec::new();
            if names.is_empty() {
                picked.extend(all.into_iter().map(|e| e.scenario));
            } else {
                for n in &names {
                    match all.iter().find(|e| e.name == n) {
                        Some(e) => picked.push(e.scenario.clone()),
                        None => {
                            eprintln!("error: no gallery entry '{}'", n);
                            return 1;
                        }
                    }
                }
            }
            run_batch(&picked, &common, jobs)
        }
        Command::Validate { file } => {
            let src = match fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}: {}", file.display(), e);
                    return 1;
                }
            };
            let diags = scenario::validate_source(&src);
            if diags.is_empty() {
                println!("{}: ok", file.display());
                0
            } else {
                for d in &diags {
                    println!("{}: {}", file.display(), d);
                }
                1
            }
        }
    }
}
