use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use fixdim::certify;
use fixdim::convex::{helly_fuzz, helly_trial, TrialReport};
use fixdim::duplication::{family_claims, lemma_count_verify, render_table1, render_table1_machine, table1, ClaimReport, Family};

#[derive(Parser)]
#[command(name = "fixdim", version, about = "Exact checks behind fixed-point dimension bounds")]
struct Cli {
    /// Print the report envelope as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print the elapsed time on stderr.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of g_n(k) = (k-1)⌊n/(k+1)⌋ with monotonicity failures circled.
    Table1 {
        /// One `n k value circled` line per entry.
        #[arg(long)]
        machine: bool,
    },
    /// Brute-force check of the two-part counting lemma.
    LemmaCount {
        #[arg(long, default_value_t = 200)]
        nmax: u64,
    },
    /// Condition (2) claims for one family.
    Ample {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        param: u64,
    },
    /// Check a certificate file or a builtin certificate.
    Verify {
        file: Option<PathBuf>,
        /// FAMILY:PARAM, e.g. aut:9
        #[arg(long)]
        builtin: Option<String>,
        /// Print the certificate text before checking.
        #[arg(long)]
        print: bool,
        /// Report every node.
        #[arg(long)]
        verbose: bool,
    },
    /// FixDim lower bound from a builtin certificate.
    Bounds {
        #[arg(long)]
        family: String,
        #[arg(long)]
        param: i64,
        /// Assumption flags to grant, comma separated.
        #[arg(long, value_delimiter = ',')]
        assume: Vec<String>,
    },
    /// Random polytope families checked against the Helly-type corollaries.
    HellyFuzz {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        sets: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = all cores); results do not depend on it.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Rerun the single trial with this per-trial seed.
        #[arg(long)]
        replay: Option<u64>,
    },
}

#[derive(Serialize)]
struct VerdictLine {
    name: String,
    pass: bool,
    detail: String,
}

/// Everything a run reports, apart from timings.
#[derive(Serialize)]
struct Envelope {
    command: String,
    parameters: BTreeMap<String, String>,
    version: String,
    seed: Option<u64>,
    verdicts: Vec<VerdictLine>,
    #[serde(skip)]
    text: String,
}

impl Envelope {
    fn new(command: &str) -> Self {
        Envelope {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            verdicts: Vec::new(),
            text: String::new(),
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.parameters.insert(k.to_string(), v.to_string());
    }

    fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(VerdictLine {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn claim_line(c: &ClaimReport) -> String {
    let failing = match c.first_failing_k {
        Some(k) => format!(" first failing k={k} (all: {:?})", c.failing_ks),
        None => String::new(),
    };
    format!(
        "{} param={} holds={} expected={} {}{}",
        c.claim,
        c.parameter,
        c.holds,
        c.expected,
        if c.agrees() { "AGREES" } else { "DISAGREES" },
        failing
    )
}

fn run_table1(machine: bool) -> Envelope {
    let mut env = Envelope::new("table1");
    env.param("machine", machine);
    let rows = table1();
    env.text = if machine {
        render_table1_machine(&rows)
    } else {
        render_table1(&rows)
    };
    let circled = rows.iter().flat_map(|r| &r.entries).filter(|e| e.circled).count();
    env.verdict("table1", true, format!("{} rows, {circled} circled entries", rows.len()));
    env
}

fn run_lemma_count(nmax: u64) -> Envelope {
    let mut env = Envelope::new("lemma-count");
    env.param("nmax", nmax);
    let report = lemma_count_verify(nmax);
    env.line(format!("part (1) equalities: {:?}", report.part1_equalities));
    env.line(format!("part (2) equalities: {} pairs", report.part2_equalities.len()));
    for c in report.claims() {
        env.line(claim_line(&c));
        env.verdict(c.claim.clone(), c.agrees(), claim_line(&c));
    }
    env
}

fn run_ample(family: Family, param: u64) -> Envelope {
    let mut env = Envelope::new("ample");
    env.param("family", format!("{family:?}").to_lowercase());
    env.param("param", param);
    match family_claims(family, param) {
        Ok(claims) => {
            for c in claims {
                env.line(claim_line(&c));
                env.verdict(c.claim.clone(), c.agrees(), claim_line(&c));
            }
        }
        Err(e) => env.verdict("parameter", false, e),
    }
    env
}

fn parse_builtin(spec: &str) -> Result<(String, i64), String> {
    let (f, p) = spec
        .split_once(':')
        .ok_or_else(|| format!("expected FAMILY:PARAM, found {spec:?}"))?;
    let p = p.parse().map_err(|_| format!("bad parameter in {spec:?}"))?;
    Ok((f.to_string(), p))
}

fn verify_one(env: &mut Envelope, label: &str, cert: &certify::Certificate, print: bool, verbose: bool) {
    if print {
        env.text.push_str(&certify::print(cert));
        env.line("");
    }
    let v = certify::check(cert);
    if verbose {
        for n in &v.nodes {
            let dim = n.dim.map_or("any".to_string(), |d| d.to_string());
            let status = if n.ok { "ok" } else { "FAIL" };
            env.line(format!("  {} {} dim={dim} {status}: {}", n.path, n.rule, n.message));
            for note in &n.notes {
                env.line(format!("    note: {note}"));
            }
        }
    }
    let status = if v.verified { "verified" } else { "rejected" };
    env.line(format!("{label}: {status}, {}", v.conclusion()));
    env.verdict(label, v.verified, v.conclusion());
}

fn run_verify(file: Option<PathBuf>, builtin: Option<String>, print: bool, verbose: bool) -> Envelope {
    let mut env = Envelope::new("verify");
    if file.is_none() && builtin.is_none() {
        env.verdict("arguments", false, "give a certificate file or --builtin FAMILY:PARAM");
        return env;
    }
    let mut reference = None;
    if let Some(spec) = &builtin {
        env.param("builtin", spec);
        match parse_builtin(spec).and_then(|(f, p)| certify::builtin(&f, p).map_err(|e| e.to_string())) {
            Ok(cert) => reference = Some(cert),
            Err(e) => {
                env.verdict("builtin", false, e);
                return env;
            }
        }
    }
    match &file {
        Some(path) => {
            env.param("file", path.display());
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|src| certify::parse(&src).map_err(|e| e.to_string()));
            match parsed {
                Ok(cert) => {
                    if let Some(r) = &reference {
                        let same = *r == cert;
                        let detail = if same { "file matches the builtin" } else { "file differs from the builtin" };
                        env.line(detail);
                        env.verdict("matches-builtin", same, detail);
                    }
                    verify_one(&mut env, &cert.name.clone(), &cert, print, verbose);
                }
                Err(e) => env.verdict("parse", false, e),
            }
        }
        None => {
            let cert = reference.expect("builtin present");
            verify_one(&mut env, &cert.name.clone(), &cert, print, verbose);
        }
    }
    env
}

fn run_bounds(family: &str, param: i64, assume: &[String]) -> Envelope {
    let mut env = Envelope::new("bounds");
    env.param("family", family);
    env.param("param", param);
    env.param("assume", assume.join(","));
    match certify::bounds(family, param, assume) {
        Ok(b) => {
            env.line(format!("{}: {}", b.certificate, b.statement));
            if let Some(d) = b.fixdim_lower_bound() {
                env.line(format!("FixDim ≥ {d}"));
            }
            for n in &b.notes {
                env.line(format!("note: {n}"));
            }
            let detail = if b.conditional_on.is_empty() {
                b.statement.clone()
            } else {
                format!("{} [conditional on: {}]", b.statement, b.conditional_on.join(", "))
            };
            env.verdict(b.certificate.clone(), b.holds(), detail);
        }
        Err(e) => env.verdict("bounds", false, e.to_string()),
    }
    env
}

fn trial_text(r: &TrialReport) -> String {
    format!(
        "seed={} nerve faces={} nerve dim={} empty simplices={} violations={:?}",
        r.seed,
        r.nerve_faces,
        r.nerve_dim,
        r.empty_simplices.len(),
        r.violations
    )
}

fn run_helly(dim: usize, sets: usize, trials: u64, seed: u64, jobs: usize, replay: Option<u64>) -> Envelope {
    let mut env = Envelope::new("helly-fuzz");
    env.param("dim", dim);
    env.param("sets", sets);
    if let Some(s) = replay {
        env.param("replay", s);
        env.seed = Some(s);
        match helly_trial(dim, sets, s) {
            Ok(r) => {
                env.line(trial_text(&r));
                env.verdict("trial", r.passed(), trial_text(&r));
            }
            Err(e) => env.verdict("trial", false, e.to_string()),
        }
        return env;
    }
    env.param("trials", trials);
    env.seed = Some(seed);
    let s = helly_fuzz(dim, sets, trials, seed, jobs);
    env.line(format!("{}/{} pass", s.passed, s.trials));
    if let Some(top) = s.max_empty_simplex_dim {
        env.line(format!("largest empty simplex dimension: {top}"));
    }
    for (i, r) in &s.failures {
        let replay = format!("fixdim helly-fuzz --dim {dim} --sets {sets} --replay {}", r.seed);
        env.line(format!("trial {i} FAILED: {}; replay with `{replay}`", trial_text(r)));
        env.verdict(format!("trial {i}"), false, replay);
    }
    for (i, s, e) in &s.errors {
        env.line(format!("trial {i} (seed {s}) refused: {e}"));
        env.verdict(format!("trial {i}"), false, e.clone());
    }
    env.verdict("helly-fuzz", s.all_passed(), format!("{}/{} pass", s.passed, s.trials));
    env
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let env = match cli.command {
        Command::Table1 { machine } => run_table1(machine),
        Command::LemmaCount { nmax } => run_lemma_count(nmax),
        Command::Ample { family, param } => run_ample(family, param),
        Command::Verify {
            file,
            builtin,
            print,
            verbose,
        } => run_verify(file, builtin, print, verbose),
        Command::Bounds { family, param, assume } => run_bounds(&family, param, &assume),
        Command::HellyFuzz {
            dim,
            sets,
            trials,
            seed,
            jobs,
            replay,
        } => run_helly(dim, sets, trials, seed, jobs, replay),
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&env).expect("envelope serializes"));
    } else {
        print!("{}", env.text);
    }
    if cli.timings {
        eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    }
    if let Some(first) = env.verdicts.iter().find(|v| !v.pass) {
        eprintln!("FAIL {}: {}", first.name, first.detail);
    }
    if env.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
