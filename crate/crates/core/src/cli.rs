//! The `pslab` command-line tool.
//!
//! Exit codes: 0 on success, 2 for usage, parse and precondition errors, 3
//! when a checked identity or inequality fails. Diagnostics go to stderr;
//! reports go to stdout or `--output`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use serde_json::Value;

use crate::diophantine::{convergents, dirichlet_approx, qh_range_audit, AlphaSpec, Convergent, DiophantineError};
use crate::experiment::{
    derive_params, gamma_sums, scaling_report, solution_search, ExperimentError, ExperimentParams, SCALING_COLUMNS,
};
use crate::expsums::{
    ghosh_bound, omega_bound, omega_sum, precision_for, prime_phase_sum, sargos_check, sigma_sum, weighted_partial_sums,
    wvdc_check, ExpSumError, PhaseSpec,
};
use crate::numerics::{decimal_to_fixed, e_turns, parse_decimal, parse_rational, FixedReal, NumericsError, Rational};
use crate::primes::{ps_count, ps_witnesses, sieve_monolithic, AmbiguityPolicy, PrimesError, PS_FRAC_BITS};
use crate::report::{int, num, Format, Report};
use crate::vaughan::{theta_sums, VaughanError, IDENTITY_TOLERANCE};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "PSLAB_WORKERS";

/// Fractional bits for `β`.
const BETA_BITS: u32 = 256;

#[derive(Parser, Debug)]
#[command(name = "pslab", version, about = "Desk-scale laboratory for αp² + β mod 1 over Piatetski-Shapiro primes")]
struct Cli {
    /// Worker threads for data-parallel sums (0 = one per core).
    #[arg(long, global = true, env = WORKERS_ENV, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// N, Δ, H, M and ϑ for one convergent.
    Params(TheoremArgs),
    /// Piatetski-Shapiro primes up to a limit.
    PsPrimes(PsArgs),
    /// Piatetski-Shapiro primes p ≤ N with ‖αp² + β‖ < Δ.
    Search(SearchArgs),
    /// Γ and its split Γ₁ + Γ₂.
    Gamma(TheoremArgs),
    /// One exponential sum per (h, N).
    Expsum(ExpsumArgs),
    /// Vaughan's four sums against the direct sum.
    VaughanCheck(VaughanArgs),
    /// Measured ratios for every bound used at one convergent.
    BoundsReport(TheoremArgs),
    /// One row per convergent: N, Δ, |Γ| and pass counts.
    ScalingReport(TheoremArgs),
    /// Dirichlet denominators q_h for h ≤ H.
    QhAudit(QhArgs),
}

#[derive(Args, Debug, Clone)]
struct ConvArgs {
    /// Convergent denominator(s) q, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "conv_index")]
    conv_q: Vec<String>,
    /// Convergent index (0-based), comma separated.
    #[arg(long, value_delimiter = ',')]
    conv_index: Vec<usize>,
}

#[derive(Args, Debug, Clone)]
struct TheoremArgs {
    /// `sqrt:D`, `dec:<digits>` or `rat:a/b`.
    #[arg(long, default_value = "sqrt:2")]
    alpha: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta: String,
    /// Exact rational in (13/14, 1), e.g. `19/20`.
    #[arg(long)]
    gamma: String,
    #[arg(long, default_value = "1")]
    c: String,
    #[arg(long, default_value = "0")]
    eps: String,
    #[command(flatten)]
    conv: ConvArgs,
}

#[derive(Args, Debug)]
struct PsArgs {
    /// Exact rational in (0, 1).
    #[arg(long)]
    gamma: String,
    #[arg(long)]
    limit: u64,
    /// List `p,n` pairs instead of the count.
    #[arg(long)]
    list: bool,
    /// Skip primes whose floors stay ambiguous instead of failing.
    #[arg(long)]
    skip_ambiguous: bool,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    theorem: TheoremArgs,
    /// Also list primes that miss the target interval.
    #[arg(long)]
    all: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SumKind {
    #[value(name = "S")]
    S,
    #[value(name = "Sigma")]
    Sigma,
    #[value(name = "frakS")]
    FrakS,
    #[value(name = "G")]
    G,
    #[value(name = "Omega")]
    Omega,
}

#[derive(Args, Debug)]
struct ExpsumArgs {
    #[arg(long, value_enum)]
    kind: SumKind,
    #[arg(long, default_value = "sqrt:2")]
    alpha: String,
    /// Summation limit(s) N, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<u64>,
    /// Frequencies h (S, Sigma), cutoffs u (frakS, G) or H (Omega).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    h: Vec<u64>,
    /// Exact rational γ (Sigma, frakS, G).
    #[arg(long)]
    gamma: Option<String>,
    /// β (Omega).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    beta: String,
    /// Δ (Omega).
    #[arg(long)]
    delta: Option<String>,
    #[command(flatten)]
    conv: ConvArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PhaseKind {
    Zero,
    Monomial,
    Bilinear,
}

#[derive(Args, Debug)]
struct VaughanArgs {
    #[arg(long)]
    n1: u64,
    #[arg(long)]
    n2: u64,
    #[arg(long)]
    theta: u64,
    #[arg(long, value_enum, default_value_t = PhaseKind::Zero)]
    phase: PhaseKind,
    /// Monomial coefficient σ in σx^k.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    sigma: String,
    /// Monomial degree k.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value = "sqrt:2")]
    alpha: String,
    #[arg(long, default_value_t = 1)]
    h: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    #[arg(long, default_value = "19/20")]
    gamma: String,
    /// The fixed variable of a bilinear phase.
    #[arg(long, default_value_t = 1)]
    fixed: u64,
}

#[derive(Args, Debug)]
struct QhArgs {
    #[arg(long, default_value = "sqrt:2")]
    alpha: String,
    #[command(flatten)]
    conv: ConvArgs,
    /// Largest h (default ⌊q^{1/2}⌋).
    #[arg(long)]
    big_h: Option<u64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Invariant(m) | CliError::Io(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        usage(e)
    }
}

impl From<DiophantineError> for CliError {
    fn from(e: DiophantineError) -> Self {
        usage(e)
    }
}

impl From<PrimesError> for CliError {
    fn from(e: PrimesError) -> Self {
        usage(e)
    }
}

impl From<ExpSumError> for CliError {
    fn from(e: ExpSumError) -> Self {
        match e {
            ExpSumError::InequalityViolated { .. } => CliError::Invariant(e.to_string()),
            other => usage(other),
        }
    }
}

impl From<VaughanError> for CliError {
    fn from(e: VaughanError) -> Self {
        match e {
            VaughanError::ExpSum(inner) => inner.into(),
            VaughanError::RangeError(_) => usage(e),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::ExpSum(inner) => inner.into(),
            other => usage(other),
        }
    }
}

/// Run the tool on `argv` (including the program name), writing the report
/// to `out` unless `--output` is given. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {} workers: {e}", cli.workers);
            return 2;
        }
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let mut warnings = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut warnings));
    for w in &warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    let report = match result {
        Ok(report) => report,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            return e.exit_code();
        }
    };
    let text = report.render(format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    match command {
        Command::Params(a) => cmd_params(a, warnings),
        Command::PsPrimes(a) => cmd_ps_primes(a, warnings),
        Command::Search(a) => cmd_search(a, warnings),
        Command::Gamma(a) => cmd_gamma(a, warnings),
        Command::Expsum(a) => cmd_expsum(a),
        Command::VaughanCheck(a) => cmd_vaughan(a),
        Command::BoundsReport(a) => cmd_bounds(a, warnings),
        Command::ScalingReport(a) => cmd_scaling(a, warnings),
        Command::QhAudit(a) => cmd_qh_audit(a),
    }
}

fn parse_alpha(text: &str) -> Result<AlphaSpec, CliError> {
    text.parse::<AlphaSpec>().map_err(|e| usage(format!("--alpha: {e}")))
}

fn parse_gamma(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| usage(format!("--gamma: {e}")))
}

/// A decimal knob such as `C` or `ε`, validated as plain decimal digits.
fn parse_real(flag: &str, text: &str) -> Result<f64, CliError> {
    parse_decimal(text).map_err(|e| usage(format!("--{flag}: {e}")))?;
    text.parse::<f64>().map_err(|e| usage(format!("--{flag}: {e}")))
}

fn parse_beta(text: &str) -> Result<FixedReal, CliError> {
    decimal_to_fixed(text, BETA_BITS).map_err(|e| usage(format!("--beta: {e}")))
}

/// Convergents named by `--conv-q` or `--conv-index`, in the order given.
fn resolve_convergents(alpha: &AlphaSpec, conv: &ConvArgs) -> Result<Vec<Convergent>, CliError> {
    let table = |count: usize| -> Result<Vec<Convergent>, CliError> {
        match convergents(alpha, count) {
            Ok(list) => Ok(list),
            Err(DiophantineError::RationalAlpha { convergents }) => Ok(convergents),
            Err(e) => Err(e.into()),
        }
    };
    if !conv.conv_index.is_empty() {
        let max = *conv.conv_index.iter().max().expect("nonempty");
        let list = table(max + 1)?;
        return conv
            .conv_index
            .iter()
            .map(|&i| {
                list.get(i)
                    .cloned()
                    .ok_or_else(|| usage(format!("alpha has only {} convergents", list.len())))
            })
            .collect();
    }
    if conv.conv_q.is_empty() {
        return Err(usage("one of --conv-q or --conv-index is required"));
    }
    let qs: Vec<BigInt> = conv
        .conv_q
        .iter()
        .map(|s| {
            s.parse::<BigInt>()
                .ok()
                .filter(|q| q > &BigInt::from(0))
                .ok_or_else(|| usage(format!("--conv-q: `{s}` is not a positive integer")))
        })
        .collect::<Result<_, _>>()?;
    let max = qs.iter().max().expect("nonempty");
    // Denominators grow at least like Fibonacci numbers.
    let list = table(2 * max.bits() as usize + 4)?;
    qs.iter()
        .map(|q| {
            list.iter()
                .find(|c| &c.q == q)
                .cloned()
                .ok_or_else(|| usage(format!("{q} is not a convergent denominator of {alpha}")))
        })
        .collect()
}

fn single_convergent(alpha: &AlphaSpec, conv: &ConvArgs) -> Result<Convergent, CliError> {
    let mut list = resolve_convergents(alpha, conv)?;
    if list.len() != 1 {
        return Err(usage("this command takes exactly one convergent"));
    }
    Ok(list.pop().expect("one"))
}

struct Theorem {
    alpha: AlphaSpec,
    beta: FixedReal,
    gamma: Rational,
    c: f64,
    eps: f64,
}

fn theorem_inputs(a: &TheoremArgs) -> Result<Theorem, CliError> {
    Ok(Theorem {
        alpha: parse_alpha(&a.alpha)?,
        beta: parse_beta(&a.beta)?,
        gamma: parse_gamma(&a.gamma)?,
        c: parse_real("c", &a.c)?,
        eps: parse_real("eps", &a.eps)?,
    })
}

fn theorem_params(a: &TheoremArgs, warnings: &mut Vec<String>) -> Result<ExperimentParams, CliError> {
    let t = theorem_inputs(a)?;
    let conv = single_convergent(&t.alpha, &a.conv)?;
    let p = derive_params(&t.alpha, &t.beta, &t.gamma, t.c, t.eps, &conv)?;
    warn_clamp(&p, warnings);
    Ok(p)
}

fn warn_clamp(p: &ExperimentParams, warnings: &mut Vec<String>) {
    if p.delta_clamped {
        warnings.push(format!(
            "q = {}: Delta formula gives {} >= 1/2; clamped to {}",
            p.conv.q, p.delta_formula, p.delta
        ));
    }
}

fn theorem_meta(r: &mut Report, a: &TheoremArgs, p: &ExperimentParams) {
    r.meta("alpha", &p.alpha)
        .meta("beta", &a.beta)
        .meta("gamma", p.gamma)
        .meta("C", &a.c)
        .meta("eps", &a.eps)
        .meta("convergent", format!("{}/{}", p.conv.a, p.conv.q))
        .meta("N", p.n)
        .meta("Delta", p.delta)
        .meta("Delta_clamped", p.delta_clamped)
        .meta("H", p.h)
        .meta("M", p.m)
        .meta("theta", p.theta_v)
        .meta("ps_precision_bits", PS_FRAC_BITS)
        .meta("phase_precision_bits", precision_for(p.n as u128 * p.n as u128));
}

fn cmd_params(a: &TheoremArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let p = theorem_params(a, warnings)?;
    let mut r = Report::new(
        "params",
        &["q", "a", "N", "Delta", "Delta_formula", "Delta_clamped", "H", "M", "theta"],
    );
    r.meta("alpha", &p.alpha)
        .meta("beta", &a.beta)
        .meta("gamma", p.gamma)
        .meta("C", &a.c)
        .meta("eps", &a.eps)
        .meta("N_precision_bits", "128,256");
    r.push(vec![
        int(&p.conv.q),
        int(&p.conv.a),
        int(p.n),
        num(p.delta),
        num(p.delta_formula),
        Value::Bool(p.delta_clamped),
        int(p.h),
        int(p.m),
        int(p.theta_v),
    ]);
    Ok(r)
}

fn cmd_ps_primes(a: &PsArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let gamma = parse_gamma(&a.gamma)?;
    if gamma <= Rational::from_integer(0) || gamma >= Rational::from_integer(1) {
        return Err(usage(format!("--gamma {gamma} outside (0, 1)")));
    }
    if a.limit < 2 {
        return Err(usage("--limit must be at least 2"));
    }
    let policy = if a.skip_ambiguous {
        AmbiguityPolicy::SkipAndLog
    } else {
        AmbiguityPolicy::Fail
    };
    let mut r;
    let skipped;
    if a.list {
        let (found, s) = ps_witnesses(a.limit, &gamma, policy)?;
        r = Report::new("ps-primes", &["p", "n"]);
        for w in found {
            r.push(vec![int(w.p), int(w.n)]);
        }
        skipped = s;
    } else {
        let count = ps_count(a.limit, &gamma, policy)?;
        r = Report::new("ps-primes", &["limit", "count", "scale", "ratio"]);
        r.push(vec![int(count.limit), int(count.count), num(count.scale), num(count.ratio)]);
        skipped = count.skipped;
    }
    r.meta("gamma", gamma)
        .meta("limit", a.limit)
        .meta("precision_bits", PS_FRAC_BITS)
        .meta("skipped", skipped.len());
    if !skipped.is_empty() {
        warnings.push(format!("skipped {} primes with ambiguous floors: {skipped:?}", skipped.len()));
    }
    Ok(r)
}

fn cmd_search(a: &SearchArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let p = theorem_params(&a.theorem, warnings)?;
    let result = solution_search(&p)?;
    let mut r = Report::new("search", &["p", "n", "dist", "passes"]);
    theorem_meta(&mut r, &a.theorem, &p);
    let s = &result.summary;
    r.meta("ps_count", s.ps_count)
        .meta("pass_count", s.pass_count)
        .meta("pass_mass", s.pass_mass)
        .meta("expectation", s.expectation)
        .meta("ratio", s.ratio);
    for rec in result.records.iter().filter(|rec| a.all || rec.passes) {
        r.push(vec![int(rec.p), int(rec.n), num(rec.dist.to_f64()), Value::Bool(rec.passes)]);
    }
    Ok(r)
}

fn cmd_gamma(a: &TheoremArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let p = theorem_params(a, warnings)?;
    let s = gamma_sums(&p)?;
    let tolerance = 1e-9 * s.prime_count as f64;
    if s.residual > tolerance {
        return Err(CliError::Invariant(format!(
            "Gamma decomposition residual {} exceeds {tolerance}",
            s.residual
        )));
    }
    let mut r = Report::new(
        "gamma",
        &["N", "prime_count", "Gamma", "Gamma1", "Gamma2", "residual", "gamma_norm"],
    );
    theorem_meta(&mut r, a, &p);
    r.push(vec![
        int(p.n),
        int(s.prime_count),
        num(s.gamma),
        num(s.gamma1),
        num(s.gamma2),
        num(s.residual),
        num(s.gamma.abs() / p.gamma_scale()),
    ]);
    Ok(r)
}

fn gamma_scale(gamma: &Rational, n: u64) -> f64 {
    let g = *gamma.numer() as f64 / *gamma.denom() as f64;
    (n as f64).powf((15.0 * g + 13.0) / 29.0)
}

fn cmd_expsum(a: &ExpsumArgs) -> Result<Report, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let need_gamma = || -> Result<Rational, CliError> {
        let g = a.gamma.as_deref().ok_or_else(|| usage("--gamma is required for this kind"))?;
        parse_gamma(g)
    };
    let has_conv = !a.conv.conv_q.is_empty() || !a.conv.conv_index.is_empty();
    let conv = if has_conv {
        Some(single_convergent(&alpha, &a.conv)?)
    } else {
        None
    };
    let kind = format!("{:?}", a.kind);
    let mut r = Report::new("expsum", &["kind", "h", "N", "value", "bound", "ratio"]);
    r.meta("kind", &kind).meta("alpha", &alpha);
    if let Some(c) = &conv {
        r.meta("convergent", format!("{}/{}", c.a, c.q));
    }
    let push = |r: &mut Report, h: u64, n: u64, value: f64, bound: Option<f64>| {
        let (b, ratio) = match bound {
            Some(b) => (num(b), num(value / b)),
            None => (Value::Null, Value::Null),
        };
        r.push(vec![Value::String(kind.clone()), int(h), int(n), num(value), b, ratio]);
    };
    match a.kind {
        SumKind::S => {
            for &n in &a.n {
                for &h in &a.h {
                    let value = prime_phase_sum(&alpha, h, n)?.norm();
                    let bound = match &conv {
                        Some(c) => Some(ghosh_bound(n, dirichlet_approx(&alpha, h, &c.q)?.q_h_f64())),
                        None => None,
                    };
                    push(&mut r, h, n, value, bound);
                }
            }
        }
        SumKind::Sigma => {
            let gamma = need_gamma()?;
            r.meta("gamma", gamma).meta("ps_precision_bits", PS_FRAC_BITS);
            for &n in &a.n {
                for &h in &a.h {
                    let value = sigma_sum(&alpha, h, &gamma, n)?.norm();
                    push(&mut r, h, n, value, Some(gamma_scale(&gamma, n)));
                }
            }
        }
        SumKind::FrakS | SumKind::G => {
            let gamma = need_gamma()?;
            r.meta("gamma", gamma).meta("ps_precision_bits", PS_FRAC_BITS);
            for &n in &a.n {
                for &u in &a.h {
                    let w = weighted_partial_sums(&alpha, &gamma, n, u as f64)?;
                    let value = if matches!(a.kind, SumKind::FrakS) { w.frak_s } else { w.g };
                    push(&mut r, u, n, value, Some(u as f64 * gamma_scale(&gamma, n)));
                }
            }
        }
        SumKind::Omega => {
            let c = conv.as_ref().ok_or_else(|| usage("Omega needs --conv-q or --conv-index"))?;
            let beta = parse_beta(&a.beta)?;
            let delta_text = a.delta.as_deref().ok_or_else(|| usage("--delta is required for Omega"))?;
            let delta = parse_real("delta", delta_text)?;
            r.meta("beta", &a.beta).meta("Delta", delta);
            let qf = num_traits::ToPrimitive::to_f64(&c.q).unwrap_or(f64::INFINITY);
            for &n in &a.n {
                for &big_h in &a.h {
                    let value = omega_sum(&alpha, &beta, delta, big_h, n)?;
                    push(&mut r, big_h, n, value, Some(omega_bound(n, big_h, qf)));
                }
            }
        }
    }
    Ok(r)
}

fn complex_cells(z: Complex64) -> [Value; 2] {
    [num(z.re), num(z.im)]
}

fn cmd_vaughan(a: &VaughanArgs) -> Result<Report, CliError> {
    let phase = match a.phase {
        PhaseKind::Zero => PhaseSpec::Zero,
        PhaseKind::Monomial => PhaseSpec::Monomial {
            sigma: parse_real("sigma", &a.sigma)?,
            k: a.k,
        },
        PhaseKind::Bilinear => PhaseSpec::Bilinear {
            alpha: parse_alpha(&a.alpha)?,
            h: a.h,
            m: a.m,
            gamma: parse_gamma(&a.gamma)?,
            fixed: a.fixed,
        },
    };
    let mut r = Report::new(
        "vaughan-check",
        &[
            "theta1_re", "theta1_im", "theta2_re", "theta2_im", "theta3_re", "theta3_im", "theta4_re", "theta4_im",
            "phi_re", "phi_im", "residual", "tolerance",
        ],
    );
    r.meta("N1", a.n1)
        .meta("N2", a.n2)
        .meta("theta", a.theta)
        .meta("phase", format!("{phase:?}"));
    let tolerance = IDENTITY_TOLERANCE * (a.n2.saturating_sub(a.n1) + 1) as f64;
    if a.n1 >= a.n2 {
        let zero = Complex64::new(0.0, 0.0);
        let mut row: Vec<Value> = (0..5).flat_map(|_| complex_cells(zero)).collect();
        row.extend([num(0.0), num(tolerance)]);
        r.push(row);
        return Ok(r);
    }
    let s = theta_sums(a.n1, a.n2, a.theta, &phase)?;
    let residual = s.residual();
    if residual > tolerance {
        return Err(VaughanError::IdentityViolated { residual, tolerance }.into());
    }
    let mut row = Vec::new();
    for z in [s.theta1, s.theta2, s.theta3, s.theta4, s.phi_direct] {
        row.extend(complex_cells(z));
    }
    row.extend([num(residual), num(tolerance)]);
    r.push(row);
    Ok(r)
}

fn cmd_bounds(a: &TheoremArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let p = theorem_params(a, warnings)?;
    let mut r = Report::new("bounds-report", &["kind", "h", "N", "value", "bound", "ratio"]);
    theorem_meta(&mut r, a, &p);
    let n = p.n;
    let push = |r: &mut Report, kind: &str, h: u64, value: f64, bound: f64| {
        r.push(vec![
            Value::String(kind.into()),
            int(h),
            int(n),
            num(value),
            num(bound),
            num(value / bound),
        ]);
    };
    let scale = p.gamma_scale();
    for h in 1..=p.h.max(1) {
        let approx = dirichlet_approx(&p.alpha, h, &p.conv.q)?;
        push(&mut r, "S", h, prime_phase_sum(&p.alpha, h, n)?.norm(), ghosh_bound(n, approx.q_h_f64()));
    }
    for h in 1..=p.h.max(1) {
        push(&mut r, "Sigma", h, sigma_sum(&p.alpha, h, &p.gamma, n)?.norm(), scale);
    }
    let w = weighted_partial_sums(&p.alpha, &p.gamma, n, p.h.max(1) as f64)?;
    push(&mut r, "frakS", p.h, w.frak_s, p.h as f64 * scale);
    push(&mut r, "G", p.h, w.g, p.h as f64 * scale);
    let omega = omega_sum(&p.alpha, &p.beta, p.delta, p.h.max(1), n)?;
    let qf = num_traits::ToPrimitive::to_f64(&p.conv.q).unwrap_or(f64::INFINITY);
    push(&mut r, "Omega", p.h, omega, omega_bound(n, p.h.max(1), qf));
    push(&mut r, "Omega_scale", p.h, omega, p.omega_scale());

    // Third-derivative test on αd²l² - d^γl^γ with l = 1 over (N/2, N].
    let phase = PhaseSpec::Bilinear {
        alpha: p.alpha.clone(),
        h: 1,
        m: 1,
        gamma: p.gamma,
        fixed: 1,
    };
    let sargos = sargos_check(&phase, n / 2, n)?;
    push(&mut r, "Sargos", 1, sargos.value, sargos.bound);

    // Weyl-van der Corput on a(n) = Λ(n)e(αn²) over (N/2, N] with Q = H.
    let table = sieve_monolithic(n);
    let prepared = PhaseSpec::Bilinear {
        alpha: p.alpha.clone(),
        h: 1,
        m: 0,
        gamma: p.gamma,
        fixed: 1,
    }
    .prepare(n)?;
    let seq: Vec<Complex64> = (n / 2 + 1..=n)
        .map(|k| e_turns(prepared.turns(k)).value() * table.lambda(k))
        .collect();
    let (lhs, rhs) = wvdc_check(&seq, p.h.max(1) as usize)?;
    push(&mut r, "WvdC", p.h, lhs, rhs);
    Ok(r)
}

fn cmd_scaling(a: &TheoremArgs, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let t = theorem_inputs(a)?;
    let convs = resolve_convergents(&t.alpha, &a.conv)?;
    for conv in &convs {
        warn_clamp(&derive_params(&t.alpha, &t.beta, &t.gamma, t.c, t.eps, conv)?, warnings);
    }
    let rows = scaling_report(&t.alpha, &t.beta, &t.gamma, t.c, t.eps, &convs)?;
    let mut r = Report::new("scaling-report", &SCALING_COLUMNS);
    r.meta("alpha", &t.alpha)
        .meta("beta", &a.beta)
        .meta("gamma", t.gamma)
        .meta("C", &a.c)
        .meta("eps", &a.eps)
        .meta("ps_precision_bits", PS_FRAC_BITS)
        .meta(
            "Delta_clamped_q",
            rows.iter()
                .filter(|row| row.delta_clamped)
                .map(|row| row.q.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        )
        .meta(
            "max_gamma_residual",
            format!("{:e}", rows.iter().map(|row| row.residual).fold(0.0, f64::max)),
        );
    for row in rows {
        r.push(vec![
            int(&row.q),
            int(row.n),
            num(row.delta),
            int(row.h),
            int(row.m),
            int(row.theta_v),
            num(row.abs_gamma),
            num(row.gamma_norm),
            int(row.pass_count),
            num(row.expectation),
            num(row.ratio),
            num(row.omega_ratio),
        ]);
    }
    Ok(r)
}

fn cmd_qh_audit(a: &QhArgs) -> Result<Report, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let conv = single_convergent(&alpha, &a.conv)?;
    let big_h = match a.big_h {
        Some(h) => h,
        None => num_traits::ToPrimitive::to_u64(&conv.q.sqrt()).unwrap_or(u64::MAX),
    };
    if big_h == 0 {
        return Err(usage("H must be at least 1"));
    }
    let audit = qh_range_audit(&alpha, &conv, big_h)?;
    let mut r = Report::new("qh-audit", &["h", "a_h", "q_h", "in_range"]);
    r.meta("alpha", &alpha)
        .meta("convergent", format!("{}/{}", conv.a, conv.q))
        .meta("H", big_h)
        .meta("violations", audit.violations);
    for row in &audit.rows {
        r.push(vec![int(row.h), int(&row.a_h), int(&row.q_h), Value::Bool(row.in_range)]);
    }
    Ok(r)
}
