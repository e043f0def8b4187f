//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input, 2 numerical failure.
//! Polynomial coefficients are read in ascending order, constant first.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::birkhoff::{perron_frobenius, EngineOptions, PerronResult};
use crate::cones::{chain_iterate, dual_cone, extremal_rays, separate, ConeChain, PolyhedralCone};
use crate::error::{Error, Result};
use crate::linalg::{asymmetry, Matrix, SymmetricMatrix};
use crate::oracle::{
    sturm_isolate, symmetric_spectrum_oracle, verify_factorization, ORACLE_MAX_DIM,
};
use crate::poly::Polynomial;
use crate::polyfactor::{factor_completely, roots_of, FactorList, FactorOptions, RootReport};
use crate::spectral::{eigen_decomposition, spectral_eigenvalue, SpectralCertificate, SpectralOptions};

/// Above this degree the congruence space is large enough to be slow.
pub const DEGREE_WARNING: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub output_format: OutputFormat,
    pub verify: bool,
    pub perturb_seed: Option<u64>,
}

impl CliConfig {
    fn validate(&self) -> Result<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidInput("--tol must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("--max-iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn engine(&self) -> EngineOptions {
        EngineOptions {
            tol: self.tolerance,
            max_iter: self.max_iterations,
            perturb_seed: self.perturb_seed,
            ..EngineOptions::default()
        }
    }

    pub fn spectral(&self) -> SpectralOptions {
        SpectralOptions {
            engine: self.engine(),
            ..SpectralOptions::default()
        }
    }

    pub fn factor(&self) -> FactorOptions {
        FactorOptions::with_engine(self.engine())
    }
}

#[derive(Parser, Debug)]
#[command(name = "cone-spectra", version, about = "Cone fixed points, symmetric spectra and real factorization")]
struct Cli {
    #[arg(long, global = true, env = "CONE_SPECTRA_TOL", default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Append an independent oracle check.
    #[arg(long, global = true)]
    verify: bool,
    /// Read one input per line from this file.
    #[arg(long, global = true)]
    batch: Option<String>,
    #[arg(long, global = true)]
    perturb_seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue of a symmetric matrix with its certificate.
    Eig {
        /// JSON `[[..],..]`, a whitespace grid, or `@file`.
        #[arg(allow_hyphen_values = true)]
        matrix: Option<String>,
        /// Full decomposition.
        #[arg(long)]
        all: bool,
    },
    /// Factor into real linear and irreducible quadratic factors.
    Factor {
        /// Ascending coefficients `a0,a1,..` or `@file`.
        #[arg(allow_hyphen_values = true)]
        coeffs: Option<String>,
    },
    /// Real roots and conjugate pairs.
    Roots {
        #[arg(allow_hyphen_values = true)]
        coeffs: Option<String>,
    },
    /// Perron eigenvector of a nonnegative matrix.
    Pf {
        #[arg(allow_hyphen_values = true)]
        matrix: Option<String>,
    },
    /// Polyhedral cone operations on `{"dim": d, "generators": [..]}`.
    Cone {
        #[command(subcommand)]
        action: ConeAction,
    },
}

#[derive(Subcommand, Debug)]
enum ConeAction {
    Dual {
        cone: Option<String>,
    },
    Extremal {
        cone: Option<String>,
    },
    Separate {
        cone: Option<String>,
        /// Point outside the cone, JSON array.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    Chain {
        cone: Option<String>,
        /// Matrix mapping the cone into itself.
        #[arg(long, allow_hyphen_values = true)]
        op: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
}

/// A report with its JSON value and its text rendering.
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String) -> Self {
        Report {
            json: serde_json::to_value(value).expect("reports serialize"),
            text,
        }
    }

    fn with_verification<T: Serialize>(self, block: &T, text: String) -> Self {
        Report {
            json: json!({ "result": self.json, "verification": block }),
            text: format!("{}\nverification\n{}", self.text, text),
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let cfg = CliConfig {
        tolerance: cli.tol,
        max_iterations: cli.max_iter,
        output_format: cli.format,
        verify: cli.verify,
        perturb_seed: cli.perturb_seed,
    };
    if let Err(e) = cfg.validate() {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    match &cli.batch {
        None => {
            let input = match primary_input(&cli.command) {
                Some(s) => s.to_string(),
                None => {
                    let _ = writeln!(err, "error: missing input");
                    return 1;
                }
            };
            match dispatch(&cli.command, &input, &cfg, err) {
                Ok(r) => {
                    emit(&r, &cfg, false, out);
                    0
                }
                Err(e) => report_error(&e, err),
            }
        }
        Some(path) => {
            let body = match std::fs::read_to_string(path) {
                Ok(b) => b,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot read {path}: {e}");
                    return 1;
                }
            };
            let mut worst = 0;
            for (i, line) in body.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                if cfg.output_format == OutputFormat::Text {
                    let _ = writeln!(out, "# line {}", i + 1);
                }
                match dispatch(&cli.command, line, &cfg, err) {
                    Ok(r) => emit(&r, &cfg, true, out),
                    Err(e) => {
                        let _ = write!(err, "line {}: ", i + 1);
                        worst = worst.max(report_error(&e, err));
                        if cfg.output_format == OutputFormat::Json {
                            let _ = writeln!(out, "{}", json!({ "line": i + 1, "error": e.to_string() }));
                        }
                    }
                }
            }
            worst
        }
    }
}

fn report_error(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if e.is_numerical() {
        2
    } else {
        1
    }
}

fn emit(r: &Report, cfg: &CliConfig, compact: bool, out: &mut dyn Write) {
    let _ = match cfg.output_format {
        OutputFormat::Json if compact => writeln!(out, "{}", r.json),
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("json")),
        OutputFormat::Text => writeln!(out, "{}", r.text.trim_end()),
    };
}

fn primary_input(cmd: &Command) -> Option<&str> {
    match cmd {
        Command::Eig { matrix, .. } | Command::Pf { matrix } => matrix.as_deref(),
        Command::Factor { coeffs } | Command::Roots { coeffs } => coeffs.as_deref(),
        Command::Cone { action } => match action {
            ConeAction::Dual { cone }
            | ConeAction::Extremal { cone }
            | ConeAction::Separate { cone, .. }
            | ConeAction::Chain { cone, .. } => cone.as_deref(),
        },
    }
}

fn dispatch(cmd: &Command, input: &str, cfg: &CliConfig, err: &mut dyn Write) -> Result<Report> {
    match cmd {
        Command::Eig { all, .. } => cmd_eig(input, *all, cfg),
        Command::Factor { .. } => cmd_factor(input, cfg, err),
        Command::Roots { .. } => cmd_roots(input, cfg, err),
        Command::Pf { .. } => cmd_pf(input, cfg),
        Command::Cone { action } => match action {
            ConeAction::Dual { .. } => cmd_cone_dual(input),
            ConeAction::Extremal { .. } => cmd_cone_extremal(input),
            ConeAction::Separate { point, .. } => cmd_cone_separate(input, point),
            ConeAction::Chain { op, n, .. } => cmd_cone_chain(input, op, *n),
        },
    }
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

/// JSON `[[..],..]` or rows of whitespace-separated numbers.
pub fn parse_matrix(s: &str) -> Result<Matrix> {
    let body = read_arg(s)?;
    let body = body.trim();
    let rows: Vec<Vec<f64>> = if body.starts_with('[') {
        serde_json::from_str(body).map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))?
    } else {
        body.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::InvalidInput(format!("not a number: {t:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    if rows.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    Matrix::from_rows(&rows)
}

/// Ascending coefficients, comma-separated or as a JSON array.
pub fn parse_polynomial(s: &str) -> Result<Polynomial> {
    let body = read_arg(s)?;
    let body = body.trim();
    let coeffs: Vec<f64> = if body.starts_with('[') {
        serde_json::from_str(body).map_err(|e| Error::InvalidInput(format!("coefficient JSON: {e}")))?
    } else {
        body.split(',')
            .map(|t| {
                let t = t.trim().replace('\u{2212}', "-");
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("not a number: {t:?}")))
            })
            .collect::<Result<_>>()?
    };
    let p = Polynomial::try_new(coeffs)?;
    if p.degree() == 0 {
        return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
    }
    Ok(p)
}

pub fn parse_cone(s: &str) -> Result<PolyhedralCone> {
    let body = read_arg(s)?;
    serde_json::from_str(body.trim()).map_err(|e| Error::InvalidInput(format!("cone JSON: {e}")))
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let body = read_arg(s)?;
    serde_json::from_str(body.trim()).map_err(|e| Error::InvalidInput(format!("vector JSON: {e}")))
}

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", x + 0.0);
    }
    let sci = format!("{x:.11e}");
    let mag: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent");
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, x)
    } else {
        sci
    }
}

fn vector_text(v: &[f64]) -> String {
    v.iter().map(|x| format!("{:>20}", num(*x))).collect::<Vec<_>>().join("")
}

fn matrix_text(m: &Matrix) -> String {
    m.rows().iter().map(|r| format!("  {}\n", vector_text(r))).collect()
}

pub fn cmd_eig(input: &str, all: bool, cfg: &CliConfig) -> Result<Report> {
    let m = parse_matrix(input)?;
    let asym = asymmetry(&m);
    if asym > 1e-12 * m.frobenius_norm() {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let u = SymmetricMatrix::symmetrize(&m);
    let report = if all {
        let dec = eigen_decomposition(&u, &cfg.spectral())?;
        let text = format!(
            "eigenvalues\n  {}\neigenvectors (columns)\n{}",
            vector_text(&dec.eigenvalues),
            matrix_text(&dec.eigenvectors)
        );
        let found = dec.eigenvalues.clone();
        let r = Report::new(&dec, text);
        if cfg.verify {
            verify_spectrum(r, &u, &found)?
        } else {
            r
        }
    } else {
        let cert = spectral_eigenvalue(&u, &cfg.spectral())?;
        let text = certificate_text(&cert);
        let found = vec![cert.eigenvalue];
        let r = Report::new(&cert, text);
        if cfg.verify {
            verify_spectrum(r, &u, &found)?
        } else {
            r
        }
    };
    Ok(report)
}

fn certificate_text(c: &SpectralCertificate) -> String {
    format!(
        "eigenvalue          {}\nlambda_sq           {}\nsigma_min(u - r I)  {}\nsigma_min(u + r I)  {}\nambiguous           {}\niterations          {}\nwitness form\n{}",
        num(c.eigenvalue),
        num(c.lambda_sq),
        num(c.sigma_min_minus),
        num(c.sigma_min_plus),
        c.ambiguous,
        c.iterations,
        matrix_text(c.witness_form.as_matrix())
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumVerification {
    pub oracle_spectrum: Vec<f64>,
    /// Largest distance from a reported eigenvalue to the oracle spectrum.
    pub max_deviation: f64,
}

fn verify_spectrum(r: Report, u: &SymmetricMatrix, found: &[f64]) -> Result<Report> {
    if u.dim() > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: u.dim(),
            max: ORACLE_MAX_DIM,
        }
        .context("--verify"));
    }
    let spec = symmetric_spectrum_oracle(u)?;
    let max_deviation = found
        .iter()
        .map(|x| spec.iter().map(|s| (s - x).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let block = SpectrumVerification {
        oracle_spectrum: spec,
        max_deviation,
    };
    let text = format!(
        "  oracle spectrum  {}\n  max deviation    {}",
        vector_text(&block.oracle_spectrum),
        num(max_deviation)
    );
    Ok(r.with_verification(&block, text))
}

fn warn_degree(p: &Polynomial, err: &mut dyn Write) {
    if p.degree() > DEGREE_WARNING {
        let _ = writeln!(
            err,
            "warning: degree {} exceeds {DEGREE_WARNING}; expect a slow run",
            p.degree()
        );
    }
}

pub fn cmd_factor(input: &str, cfg: &CliConfig, err: &mut dyn Write) -> Result<Report> {
    let p = parse_polynomial(input)?;
    warn_degree(&p, err);
    let fl = factor_completely(&p, &cfg.factor())?;
    let r = Report::new(&fl, fl.to_string());
    if !cfg.verify {
        return Ok(r);
    }
    let v = verify_factorization(&p, &fl);
    let text = format!(
        "  deviation        {}\n  degree matches   {}\n  irreducible      {}",
        num(v.deviation),
        v.degree_matches,
        v.factors.iter().all(|f| f.ok)
    );
    Ok(r.with_verification(&v, text))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootsVerification {
    /// Distinct real roots located by Sturm isolation.
    pub sturm_roots: Vec<f64>,
    /// Largest distance from a Sturm root to the nearest reported real root.
    pub max_deviation: f64,
    /// Same number of distinct real roots on both sides.
    pub count_matches: bool,
    pub factorization_deviation: f64,
}

pub fn cmd_roots(input: &str, cfg: &CliConfig, err: &mut dyn Write) -> Result<Report> {
    let p = parse_polynomial(input)?;
    warn_degree(&p, err);
    let fl = factor_completely(&p, &cfg.factor())?;
    let rr = roots_of(&fl);
    let r = Report::new(&rr, roots_text(&rr));
    if !cfg.verify {
        return Ok(r);
    }
    let block = verify_roots(&p, &fl, &rr)?;
    let text = format!(
        "  sturm roots      {}\n  max deviation    {}\n  count matches    {}",
        vector_text(&block.sturm_roots),
        num(block.max_deviation),
        block.count_matches
    );
    Ok(r.with_verification(&block, text))
}

fn verify_roots(p: &Polynomial, fl: &FactorList, rr: &RootReport) -> Result<RootsVerification> {
    let b = p.cauchy_bound();
    let sq = squarefree_of(fl);
    let brackets = sturm_isolate(&sq, -b, b)?;
    let sturm: Vec<f64> = brackets.iter().map(|x| x.refined_root).collect();
    let max_deviation = sturm
        .iter()
        .map(|s| {
            rr.real
                .iter()
                .map(|r| (r.value - s).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(RootsVerification {
        count_matches: sturm.len() == rr.real.len(),
        sturm_roots: sturm,
        max_deviation,
        factorization_deviation: verify_factorization(p, fl).deviation,
    })
}

/// Product of the distinct factors; Sturm sequences need a squarefree input.
fn squarefree_of(fl: &FactorList) -> Polynomial {
    fl.factors
        .iter()
        .fold(Polynomial::one(), |acc, f| &acc * &f.coeffs)
}

fn roots_text(rr: &RootReport) -> String {
    let mut s = String::new();
    for r in &rr.real {
        let _ = writeln!(s, "real  {:>20}  x{}", num(r.value), r.multiplicity);
    }
    for p in &rr.pairs {
        let _ = writeln!(s, "pair  {:>20} ± {}i  x{}", num(p.re), num(p.im), p.multiplicity);
    }
    s
}

pub fn cmd_pf(input: &str, cfg: &CliConfig) -> Result<Report> {
    let a = parse_matrix(input)?;
    let res: PerronResult = perron_frobenius(&a, &cfg.engine())?;
    let fp = &res.fixed_point;
    let text = format!(
        "eigenvalue  {}\nvector      {}\nbracket     {}\nresidual    {}\niterations  {}",
        num(fp.eigenvalue),
        vector_text(&fp.vector),
        vector_text(&res.bracket),
        num(fp.residual),
        fp.iterations
    );
    Ok(Report::new(&res, text))
}

fn cone_text(c: &PolyhedralCone) -> String {
    let mut s = format!("dim {}\n", c.ambient_dim());
    for g in c.generators() {
        let _ = writeln!(s, "  {}", vector_text(g));
    }
    s
}

pub fn cmd_cone_dual(input: &str) -> Result<Report> {
    let d = dual_cone(&parse_cone(input)?)?;
    Ok(Report::new(&d, cone_text(&d)))
}

pub fn cmd_cone_extremal(input: &str) -> Result<Report> {
    let c = parse_cone(input)?;
    let rays = extremal_rays(&c)?;
    let out = PolyhedralCone::new(c.ambient_dim(), rays)?;
    Ok(Report::new(&out, cone_text(&out)))
}

pub fn cmd_cone_separate(input: &str, point: &str) -> Result<Report> {
    let c = parse_cone(input)?;
    let a = parse_vector(point)?;
    let f = separate(&c, &a)?;
    let text = format!("functional  {}\nvalue at point  {}", vector_text(&f.coefficients), num(f.eval(&a)));
    Ok(Report::new(&f, text))
}

pub fn cmd_cone_chain(input: &str, op: &str, n: usize) -> Result<Report> {
    let c = parse_cone(input)?;
    let u = parse_matrix(op)?;
    let chain: ConeChain = chain_iterate(&u, &c, n)?;
    let mut text = String::from("step                 gap  nested\n");
    for (k, s) in chain.steps.iter().enumerate() {
        let _ = writeln!(text, "{:>4}  {:>20}  {}", k + 1, num(s.gap), s.nested);
    }
    text.push_str("last cone\n");
    text.push_str(&cone_text(chain.last()));
    Ok(Report::new(&chain, text))
}
