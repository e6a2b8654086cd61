//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | pass, valid, separated |
//! | 1 | fail, invalid, counterexample found |
//! | 2 | input or usage error |
//! | 3 | inconclusive |
//! | 4 | resource bound reached |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use markov_hull::axioms::{build_certificate, CandidateOSet, Certificate, Verdict, DEFAULT_GEN_BOUND};
use markov_hull::entropy::{entropy, DEFAULT_TOLERANCE};
use markov_hull::explorer::{
    conjecture_scan, scan_matrices, search_osets, separate_hulls, ScanBounds, Separation,
    DEFAULT_FINGERPRINT_DEPTH,
};
use markov_hull::oracle::{verify_suite, DEFAULT_DEPTH};
use markov_hull::semilattice::{export_dot, fingerprint, fingerprint_json, IdempotentIndex};
use markov_hull::{Hull, HullError, TransitionMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "markov-hull", version, about = "Exact computation in inverse hulls of Markov shifts")]
struct Cli {
    /// JSON object of default flag values, keyed by long flag name.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DiagramFormat {
    Dot,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral radius of a transition matrix.
    Entropy {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Hasse diagram of idempotents, or the up-set fingerprint.
    Semilattice {
        matrix: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Dot)]
        format: DiagramFormat,
        /// Largest up-set size counted by the fingerprint.
        #[arg(short = 'K', long = "k", default_value_t = DEFAULT_FINGERPRINT_DEPTH)]
        k: usize,
        /// O-set whose members are highlighted in the diagram.
        #[arg(long)]
        oset: Option<PathBuf>,
    },
    /// Checks an O-set and builds its certificate.
    Check {
        matrix: PathBuf,
        oset: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GEN_BOUND)]
        gen_bound: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the certificate JSON here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Replays a certificate file.
    Replay { certificate: PathBuf },
    /// Searches for valid O-sets.
    FindOsets {
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_word_len: usize,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, default_value_t = DEFAULT_GEN_BOUND)]
        gen_bound: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Writes one certificate file per result into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Tries to tell two hulls apart by their fingerprints.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(short = 'K', long = "k", default_value_t = DEFAULT_FINGERPRINT_DEPTH)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compares alphabet sizes over every valid O-set of small matrices.
    Conjecture {
        #[arg(long)]
        max_n: Option<usize>,
        /// Scans these matrices instead of (or besides) the enumerated ones.
        #[arg(long = "matrix")]
        matrices: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        max_word_len: usize,
        #[arg(long, default_value_t = DEFAULT_GEN_BOUND)]
        gen_bound: usize,
        /// Stops after this many candidates and exits with code 4.
        #[arg(long)]
        max_candidates: Option<usize>,
        #[arg(long, default_value = "conjecture-partial.json")]
        partial_report: PathBuf,
        /// Writes the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Cross-checks the algebra against brute-force partial bijections.
    Verify {
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        max_word_len: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<HullError> for Failure {
    fn from(e: HullError) -> Self {
        let code = match e {
            HullError::Input(_)
            | HullError::Usage(_)
            | HullError::UnknownLetter(_)
            | HullError::ZeroElement
            | HullError::Depth { .. } => EXIT_INPUT,
            HullError::NoConvergence { .. } => EXIT_RESOURCE,
            HullError::AxiomFailure(_) | HullError::Internal(_) => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<TransitionMatrix, Failure> {
    TransitionMatrix::from_json(&read(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// Splices config values in front of the subcommand's own arguments, so
/// flags given on the command line win.
fn apply_config(args: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut config = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    if let Some(program) = iter.next() {
        rest.push(program);
    }
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            config = Some(iter.next().ok_or_else(|| input_error("--config needs a file"))?);
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = read(Path::new(&path))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input_error(format!("{path}: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| input_error(format!("{path}: config must be a JSON object")))?;
    let mut flags = Vec::new();
    for (key, value) in object {
        let flag = format!("--{key}");
        match value {
            serde_json::Value::Bool(true) => flags.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::Array(items) => {
                for item in items {
                    flags.push(flag.clone());
                    flags.push(scalar(item, key)?);
                }
            }
            other => {
                flags.push(flag);
                flags.push(scalar(other, key)?);
            }
        }
    }
    let position = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(rest.len());
    rest.splice(position..position, flags);
    Ok(rest)
}

fn scalar(value: &serde_json::Value, key: &str) -> Result<String, Failure> {
    match value {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(input_error(format!("config key `{key}` has an unsupported value"))),
    }
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match apply_config(args) {
        Ok(a) => a,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            return f.code;
        }
    };
    let command = Cli::command()
        .args_override_self(true)
        .mut_subcommands(|s| s.args_override_self(true));
    let cli = match command
        .try_get_matches_from(&args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Entropy { matrix, tol } => {
            let t = load_matrix(&matrix)?;
            writeln!(out, "{:.6}", entropy(&t, tol)?)?;
            Ok(EXIT_OK)
        }
        Command::Semilattice {
            matrix,
            depth,
            format,
            k,
            oset,
        } => {
            let t = load_matrix(&matrix)?;
            let hull = Hull::new(t);
            let members = match &oset {
                Some(p) => CandidateOSet::from_json(&hull, &read(p)?)?.elements().to_vec(),
                None => Vec::new(),
            };
            match format {
                DiagramFormat::Dot => {
                    let index = IdempotentIndex::build(hull.matrix(), depth);
                    write!(out, "{}", export_dot(&hull, &index, &members))?;
                }
                DiagramFormat::Json => {
                    if k == 0 {
                        return Err(input_error("--k must be at least 1"));
                    }
                    writeln!(out, "{}", fingerprint_json(&fingerprint(hull.matrix(), k)))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            matrix,
            oset,
            gen_bound,
            format,
            certificate,
        } => {
            let t = load_matrix(&matrix)?;
            let oset_text = read(&oset)?;
            let hull = Hull::new(t);
            let o = CandidateOSet::from_json(&hull, &oset_text)
                .map_err(|e| input_error(format!("{}: {e}", oset.display())))?;
            let cert = build_certificate(&hull, &o, gen_bound)?;
            if let Some(path) = certificate {
                write_file(&path, &cert.to_json())?;
            }
            match format {
                Format::Json => writeln!(out, "{}", cert.to_json())?,
                Format::Text => write!(out, "{}", describe_certificate(&cert))?,
            }
            Ok(verdict_code(cert.verdict))
        }
        Command::Replay { certificate } => {
            let cert = Certificate::from_json(&read(&certificate)?)?;
            let verdict = cert.replay()?;
            writeln!(out, "replayed: {}", verdict_name(verdict))?;
            Ok(verdict_code(verdict))
        }
        Command::FindOsets {
            matrix,
            max_word_len,
            limit,
            gen_bound,
            format,
            out_dir,
        } => {
            let t = load_matrix(&matrix)?;
            let hull = Hull::new(t);
            let certs = search_osets(&hull, max_word_len, limit, gen_bound)?;
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir)?;
                for (i, c) in certs.iter().enumerate() {
                    write_file(&dir.join(format!("certificate-{}.json", i + 1)), &c.to_json())?;
                }
            }
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&certs).expect("certificates serialize")
                )?,
                Format::Text => {
                    writeln!(out, "{} valid O-set(s)", certs.len())?;
                    for (i, c) in certs.iter().enumerate() {
                        writeln!(out, "\n#{}", i + 1)?;
                        write!(out, "{}", describe_certificate(c))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Compare {
            first,
            second,
            k,
            format,
        } => {
            let a = load_matrix(&first)?;
            let b = load_matrix(&second)?;
            if k == 0 {
                return Err(input_error("--k must be at least 1"));
            }
            let outcome = separate_hulls(&a, &b, k);
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string(&outcome).expect("separation serializes")
                )?,
                Format::Text => match &outcome {
                    Separation::Separated { k, counts } => writeln!(
                        out,
                        "SEPARATED at k={k}: {} vs {} idempotents with exactly {k} strict upper bounds",
                        counts.0, counts.1
                    )?,
                    Separation::Indistinguishable { max_k } => writeln!(
                        out,
                        "INDISTINGUISHABLE up to k={max_k} (not a proof of isomorphism)"
                    )?,
                },
            }
            Ok(match outcome {
                Separation::Separated { .. } => EXIT_OK,
                Separation::Indistinguishable { .. } => EXIT_INCONCLUSIVE,
            })
        }
        Command::Conjecture {
            max_n,
            matrices,
            max_word_len,
            gen_bound,
            max_candidates,
            partial_report,
            report,
            format,
        } => {
            let files = matrices
                .iter()
                .map(|p| load_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            if max_n.is_none() && files.is_empty() {
                return Err(input_error("give --max-n, --matrix, or both"));
            }
            let mut bounds = ScanBounds::new(max_word_len, gen_bound);
            bounds.max_candidates = max_candidates;
            let mut result = match max_n {
                Some(n) => Some(conjecture_scan(n, &bounds)?),
                None => None,
            };
            if !files.is_empty() && result.as_ref().map_or(true, |r| r.complete) {
                if let Some(r) = &result {
                    if let Some(cap) = bounds.max_candidates.as_mut() {
                        *cap = cap.saturating_sub(r.candidates_checked);
                    }
                }
                let extra = scan_matrices(&files, &bounds)?;
                result = Some(match result {
                    Some(r) => merge(r, extra),
                    None => extra,
                });
            }
            let result = result.expect("at least one scan ran");
            if !result.complete {
                write_file(&partial_report, &result.to_json())?;
                writeln!(
                    err,
                    "candidate limit reached; partial report written to {}",
                    partial_report.display()
                )?;
                write!(out, "{}", result.summary())?;
                return Ok(EXIT_RESOURCE);
            }
            if let Some(path) = report {
                write_file(&path, &result.to_json())?;
            }
            match format {
                Format::Json => writeln!(out, "{}", result.to_json())?,
                Format::Text => write!(out, "{}", result.summary())?,
            }
            Ok(if result.counterexamples.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Verify {
            matrix,
            depth,
            seed,
            pairs,
            max_word_len,
            format,
        } => {
            let t = load_matrix(&matrix)?;
            let hull = Hull::new(t);
            let report = verify_suite(&hull, depth, seed, pairs, max_word_len)?;
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                )?,
                Format::Text => {
                    writeln!(out, "depth {depth}, seed {seed}")?;
                    writeln!(
                        out,
                        "random products: {}/{} agree ({} nonzero and visible)",
                        report.random_agreements, report.random_pairs, report.random_informative
                    )?;
                    writeln!(
                        out,
                        "generator products: {}/{} agree; cases {:?}",
                        report.generator_agreements, report.generator_pairs, report.generator_case_counts
                    )?;
                    writeln!(
                        out,
                        "normal forms: {}/{} agree",
                        report.normal_form_agreements, report.normal_form_checks
                    )?;
                    for d in &report.disagreements {
                        writeln!(out, "disagreement: {d}")?;
                    }
                }
            }
            Ok(if report.all_agree() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn merge(mut a: markov_hull::explorer::ScanResult, b: markov_hull::explorer::ScanResult) -> markov_hull::explorer::ScanResult {
    a.complete &= b.complete;
    a.matrices_scanned += b.matrices_scanned;
    a.candidates_checked += b.candidates_checked;
    a.census.extend(b.census);
    a.certificates.extend(b.certificates);
    a.gap_pairs.extend(b.gap_pairs);
    a.counterexamples.extend(b.counterexamples);
    a.near_misses.extend(b.near_misses);
    a.separations.extend(b.separations);
    a
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Valid => EXIT_OK,
        Verdict::Invalid => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Valid => "VALID",
        Verdict::Invalid => "INVALID",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

/// Plain-text rendering of a certificate.
pub fn describe_certificate(cert: &Certificate) -> String {
    let mut s = String::new();
    let o: Vec<String> = cert
        .oset
        .iter()
        .map(|e| format!("{}|{}|{}", unit(&e.s), e.x.join(","), unit(&e.s)))
        .collect();
    s.push_str(&format!("O-set: {}\n", o.join("  ")));
    match &cert.failed_at {
        Some(axiom) => s.push_str(&format!("verdict: INVALID at {axiom}\n")),
        None => s.push_str(&format!("verdict: {}\n", verdict_name(cert.verdict))),
    }
    for r in &cert.checks {
        if r.passed {
            s.push_str(&format!("  {} pass\n", r.axiom));
        } else {
            s.push_str(&format!("  {} FAIL ({} violations)\n", r.axiom, r.violation_count));
            for v in r.violations.iter().take(5) {
                s.push_str(&format!("    {v}\n"));
            }
        }
    }
    if !cert.alphabet.is_empty() {
        s.push_str("alphabet:\n");
        for a in &cert.alphabet {
            s.push_str(&format!("  {} = {}\n", a.name, a.element));
        }
    }
    if let Some(m) = &cert.induced_matrix {
        s.push_str("induced matrix:\n");
        s.push_str(&format!("    {}\n", m.alphabet.join(" ")));
        for (name, row) in m.alphabet.iter().zip(&m.matrix) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
            s.push_str(&format!("  {name} {}\n", cells.join(" ")));
        }
    }
    if !cert.witnesses.is_empty() {
        s.push_str("witnesses:\n");
        for w in &cert.witnesses {
            s.push_str(&format!("  theta_{} = {}\n", w.generator, w.expression));
        }
    }
    if cert.failed_at.is_none() {
        s.push_str(&format!(
            "generation bound {}, closure size {}\n",
            cert.gen_bound, cert.closure_size
        ));
    }
    s
}

fn unit(word: &str) -> &str {
    if word.is_empty() {
        "-"
    } else {
        word
    }
}
