//! Command-line front end for the lab: argument parsing, dispatch, output and the disk cache.

mod cache;
mod render;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::{cyclotomic_polynomial, rational_to_string, CyclotomicNumber, Rational};
use crate::characters::{embed, factor_cyclotomic_mod_p, teichmuller, DirichletCharacter, EmbeddingSigma};
use crate::eisenstein::{
    eisenstein_level1, hecke_eisenstein_chi, jacobi_eisenstein, jacobi_order_for_lift,
};
use crate::error::Error;
use crate::lab::{
    build_g_km, convergence_report, lemma2_check, theorem1_product_run, unit_congruence_check,
    Check, Outcome, Report, Theorem2Config, UnitCongruence, DEFAULT_M_MAX_LIMIT,
};
use crate::lvalues::{
    bernoulli, cohen_h, dirichlet_l_neg, generalized_bernoulli, kronecker_l_neg, kummer_check,
};
use crate::maass::maass_lift;
use crate::qseries::{JacobiSeries, RingTag, SiegelSeries};

pub use cache::{resolve_cache_dir, CacheEntry, CacheManifest, EntryKind, CACHE_DIR_ENV};
pub use render::{render_report, Format};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "padic-siegel-lab", version, about = "p-adic limits of Siegel Eisenstein-type forms with character")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// p-adic precision M.
    #[arg(long, global = true, default_value_t = 10)]
    pub prec: u32,
    /// Truncation: Siegel n, l <= N, or the q-order of elliptic and Jacobi series.
    #[arg(long, global = true, default_value_t = 2)]
    pub trunc: usize,
    /// Persistent value cache; falls back to the PADIC_SIEGEL_CACHE_DIR variable.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of the cyclotomic polynomial mod p and the Teichmüller values.
    Embeddings {
        #[arg(long)]
        p: u64,
    },
    /// Bernoulli numbers, L(1-k, χ), Cohen's H and Kummer congruences.
    Lvalue(LvalueArgs),
    /// Level-1 Eisenstein series E_k.
    Eisenstein {
        #[arg(long)]
        k: usize,
    },
    /// Hecke's Eisenstein series E_{k,χ} on Γ_0(p).
    HeckeEisenstein {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        chi: DirichletCharacter,
    },
    /// Index-1 Jacobi Eisenstein series.
    JacobiEisenstein {
        #[arg(long)]
        k: usize,
        /// q-order; defaults to what a lift at --trunc needs.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Maass lift of a serialized Jacobi series.
    Lift {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        chi: DirichletCharacter,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Convergence run for the sequence G_{k_m}.
    Theorem2(RunArgs),
    /// Product run F · G_{k_m} against F.
    Theorem1 {
        #[command(flatten)]
        run: RunArgs,
        /// F as a serialized Siegel series; defaults to G_{k_1} for the inverse character.
        #[arg(long)]
        f: Option<PathBuf>,
    },
    /// Valuations of the level-1 middle weights l_m.
    Lemma2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 3)]
        mmax: u32,
    },
    /// Whether G^σ ≡ 1 mod p for a serialized Siegel series.
    Unitcong {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        sigma: String,
    },
}

#[derive(Debug, Args)]
pub struct LvalueArgs {
    #[arg(long)]
    pub k: usize,
    /// Dirichlet character p:t.
    #[arg(long, conflicts_with = "disc")]
    pub chi: Option<DirichletCharacter>,
    /// Fundamental or non-fundamental discriminant D for the Kronecker character.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
    /// Also report σ(L(1-k, χ)) for this embedding p:i.
    #[arg(long, requires = "chi")]
    pub sigma: Option<String>,
    /// Report Cohen's H(k, N) for this N.
    #[arg(long, conflicts_with_all = ["chi", "disc"])]
    pub cohen: Option<u64>,
    /// Compare with this k' in the Kummer congruence mod p^M.
    #[arg(long, requires = "p", conflicts_with_all = ["chi", "disc", "cohen"])]
    pub kummer: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub chi: DirichletCharacter,
    #[arg(long, default_value_t = 1)]
    pub sigma: usize,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub mmax: u32,
    /// Permit m_max above the default limit.
    #[arg(long)]
    pub allow_large: bool,
}

enum Output {
    Report(Report),
    Data { json: Value, text: String },
}

impl Output {
    fn exit_code(&self) -> i32 {
        match self {
            Output::Report(r) => r.outcome.exit_code(),
            Output::Data { .. } => EXIT_PASS,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_USAGE,
            };
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let cache_dir = resolve_cache_dir(cli.global.cache_dir.as_deref());
    if let Some(dir) = &cache_dir {
        match CacheManifest::load(dir) {
            Ok(Some(m)) => m.apply(),
            Ok(None) => {}
            Err(e) => log::warn!("cache not loaded: {e}"),
        }
    }
    let output = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return error_exit_code(&e);
        }
    };
    if let Some(dir) = &cache_dir {
        if let Err(e) = CacheManifest::capture().save(dir) {
            log::warn!("cache not saved: {e}");
        }
    }
    let text = match (&output, cli.global.format) {
        (Output::Report(r), f) => render_report(r, f),
        (Output::Data { json, .. }, Format::Json) => {
            let mut s = serde_json::to_string_pretty(json).expect("json value");
            s.push('\n');
            s
        }
        (Output::Data { text, .. }, Format::Text) => text.clone(),
        (Output::Data { .. }, Format::Csv) => {
            eprintln!("error: csv output is only available for run reports");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = write_output(cli.global.out.as_deref(), &text) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    output.exit_code()
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionLoss(_) => EXIT_PRECISION,
        Error::Consistency(_) | Error::Truncation(_) | Error::SupportMismatch(_) => EXIT_FAIL,
        Error::Morphism { source, .. } => error_exit_code(source),
        _ => EXIT_USAGE,
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn execute(cli: &Cli) -> crate::Result<Output> {
    let g = &cli.global;
    match &cli.command {
        Command::Embeddings { p } => embeddings(*p, g.prec),
        Command::Lvalue(args) => lvalue(args, g.prec),
        Command::Eisenstein { k } => {
            let s = eisenstein_level1(*k, g.trunc)?;
            Ok(series_output(s.to_json()))
        }
        Command::HeckeEisenstein { k, chi } => {
            let s = hecke_eisenstein_chi(*k, chi, g.trunc)?;
            Ok(series_output(s.to_json()))
        }
        Command::JacobiEisenstein { k, order } => {
            let s = jacobi_eisenstein(*k, order.unwrap_or_else(|| jacobi_order_for_lift(g.trunc)))?;
            Ok(series_output(s.to_json()))
        }
        Command::Lift { phi, k, chi, p } => {
            let phi = read_jacobi(phi, chi.value_conductor())?;
            let lifted = maass_lift(&phi, *k, chi, p.unwrap_or(chi.p()), g.trunc)?;
            Ok(series_output(lifted.to_json()))
        }
        Command::Theorem2(run) => {
            let cfg = run_config(run, g)?;
            Ok(Output::Report(convergence_report(&cfg)?))
        }
        Command::Theorem1 { run, f } => {
            let cfg = run_config(run, g)?;
            let f = match f {
                Some(path) => read_siegel(path)?,
                None => {
                    let mut forward = cfg.clone();
                    forward.chi = cfg.chi.inverse();
                    forward.a = None;
                    build_g_km(&forward.resolve()?, 1)?.g
                }
            };
            Ok(Output::Report(theorem1_product_run(&f, &cfg)?))
        }
        Command::Lemma2 { p, a, mmax } => Ok(Output::Report(lemma2_check(*p, *a, *mmax)?)),
        Command::Unitcong { g: path, sigma } => {
            let series = read_siegel(path)?;
            let sigma = EmbeddingSigma::parse(sigma, g.prec)?;
            let result = unit_congruence_check(&series, &sigma)?;
            let (outcome, check) = match &result {
                UnitCongruence::Holds => (Outcome::Pass, Check::new("G^σ ≡ 1 mod p", true, "")),
                UnitCongruence::Fails { index } => (
                    Outcome::Fail,
                    Check::new("G^σ ≡ 1 mod p", false, format!("unit coefficient at {index:?}")),
                ),
                UnitCongruence::NonIntegral { index, valuation } => (
                    Outcome::Fail,
                    Check::new(
                        "σ-image integral",
                        false,
                        format!("valuation {valuation} at {index:?}"),
                    ),
                ),
            };
            Ok(Output::Report(Report::new(
                "unitcong",
                json!({"sigma": sigma.spec(), "prec": g.prec, "trunc": series.trunc()}),
                Vec::new(),
                vec![check],
                outcome,
            )))
        }
    }
}

fn run_config(run: &RunArgs, g: &GlobalOpts) -> crate::Result<Theorem2Config> {
    if run.mmax > DEFAULT_M_MAX_LIMIT && !run.allow_large {
        return Err(Error::Precondition(format!(
            "--mmax {} exceeds {DEFAULT_M_MAX_LIMIT}; pass --allow-large to run it anyway",
            run.mmax
        )));
    }
    Ok(Theorem2Config {
        p: run.p,
        chi: run.chi.clone(),
        sigma_index: run.sigma,
        a: run.a,
        m_max: run.mmax,
        trunc: g.trunc,
        prec: g.prec,
    })
}

fn series_output(json: Value) -> Output {
    let text = series_text(&json);
    Output::Data { json, text }
}

fn series_text(v: &Value) -> String {
    let mut out = String::new();
    if let Some(meta) = v.get("meta") {
        out.push_str(&format!("{meta}\n"));
    }
    for row in v["coeffs"].as_array().into_iter().flatten() {
        let cells: Vec<String> = row
            .as_array()
            .into_iter()
            .flatten()
            .map(|c| match c {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

fn read_json(path: &Path) -> crate::Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn ring_of(v: &Value) -> crate::Result<RingTag> {
    Ok(serde_json::from_value(v["meta"]["ring"].clone())?)
}

/// Reads a Jacobi series over Q or Q(ζ) and returns it over Q(ζ_m).
fn read_jacobi(path: &Path, conductor: u32) -> crate::Result<JacobiSeries<CyclotomicNumber>> {
    let v = read_json(path)?;
    match ring_of(&v)? {
        RingTag::Rational => JacobiSeries::<Rational>::from_json(&v)?
            .map_coefficients(conductor, |q| Ok(CyclotomicNumber::from_rational(conductor, q.clone()))),
        RingTag::Cyclotomic { .. } => JacobiSeries::from_json(&v),
        other => Err(Error::RingMismatch(format!("cannot lift a series over {other:?}"))),
    }
}

fn read_siegel(path: &Path) -> crate::Result<SiegelSeries<CyclotomicNumber>> {
    SiegelSeries::from_json(&read_json(path)?)
}

fn embeddings(p: u64, prec: u32) -> crate::Result<Output> {
    let roots = factor_cyclotomic_mod_p(p)?;
    let m = (p - 1) as u32;
    let phi = cyclotomic_polynomial(m);
    let factors: String = roots.iter().map(|d| format!("(X-{d})")).collect();
    let mut text = format!(
        "Phi_{m} = {} ≡ {factors} mod {p}\nroots: {roots:?}\n",
        poly_string(&phi)
    );
    let mut list = Vec::new();
    for (i, d) in roots.iter().enumerate() {
        let sigma = EmbeddingSigma::new(p, i + 1, prec)?;
        text.push_str(&format!(
            "sigma_{}: zeta -> omega({d}) = {} mod {p}^{prec}\n",
            i + 1,
            sigma.image_of_zeta().residue()
        ));
        list.push(json!({
            "index": i + 1,
            "root": d,
            "zeta_image": sigma.image_of_zeta().residue().to_string(),
        }));
    }
    let omega: Vec<String> = (1..p as i64)
        .map(|a| teichmuller(a, p, prec).map(|w| w.residue().to_string()))
        .collect::<crate::Result<_>>()?;
    text.push_str(&format!("omega(1..{}) mod {p}^{prec}: {}\n", p - 1, omega.join(" ")));
    Ok(Output::Data {
        json: json!({
            "p": p,
            "prec": prec,
            "cyclotomic_polynomial": *phi,
            "factorization": factors,
            "roots": roots,
            "embeddings": list,
            "teichmuller": omega,
        }),
        text,
    })
}

fn poly_string(c: &[i64]) -> String {
    let mut terms = Vec::new();
    for (i, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => "X".into(),
            _ => format!("X^{i}"),
        };
        let coef = match (a, i) {
            (1, 0) | (-1, 0) => "1".to_string(),
            (1, _) | (-1, _) => String::new(),
            _ => a.abs().to_string(),
        };
        let sign = if a < 0 { "-" } else { "+" };
        terms.push((sign, format!("{coef}{mono}")));
    }
    let mut s = String::new();
    for (i, (sign, t)) in terms.iter().enumerate() {
        if i == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(t);
    }
    s
}

fn lvalue(args: &LvalueArgs, prec: u32) -> crate::Result<Output> {
    let k = args.k;
    if let Some(n) = args.cohen {
        let h = rational_to_string(&cohen_h(k, n)?);
        return Ok(Output::Data {
            text: format!("H({k}, {n}) = {h}\n"),
            json: json!({"r": k, "n": n, "cohen_h": h}),
        });
    }
    if let Some(k2) = args.kummer {
        let p = args.p.expect("clap enforces --p");
        let c = kummer_check(k, k2, p, prec)?;
        return Ok(Output::Data {
            text: format!(
                "k={k} k'={k2} mod {p}^{prec}: {} vs {} -> {}\n",
                c.left.residue(),
                c.right.residue(),
                if c.holds { "congruent" } else { "not congruent" }
            ),
            json: json!({
                "k": k,
                "k_prime": k2,
                "p": p,
                "prec": prec,
                "left": c.left.residue().to_string(),
                "right": c.right.residue().to_string(),
                "holds": c.holds,
            }),
        });
    }
    if let Some(d) = args.disc {
        let l = rational_to_string(&kronecker_l_neg(k, d)?);
        return Ok(Output::Data {
            text: format!("L(1-{k}, chi_{d}) = {l}\n"),
            json: json!({"k": k, "disc": d, "l_value": l}),
        });
    }
    if let Some(chi) = &args.chi {
        let b = generalized_bernoulli(k, chi);
        let l = dirichlet_l_neg(k, chi)?;
        let mut json = json!({
            "k": k,
            "chi": chi.spec(),
            "generalized_bernoulli": b.encode(),
            "l_value": l.value.encode(),
            "parity_mismatch": l.parity_mismatch,
        });
        let mut text = format!("B_{{{k},{}}} = {}\nL(1-{k}) = {}\n", chi.spec(), b, l.value);
        if let Some(s) = &args.sigma {
            let sigma = EmbeddingSigma::parse(s, prec)?;
            let image = embed(&l.value, &sigma)?;
            text.push_str(&format!("sigma image: {image}\n"));
            json["sigma"] = json!(sigma.spec());
            json["l_value_sigma"] = image.to_json();
        }
        return Ok(Output::Data { json, text });
    }
    if let Some(p) = args.p {
        return Err(Error::Precondition(format!("--p {p} needs --kummer")));
    }
    let b = rational_to_string(&bernoulli(k));
    Ok(Output::Data {
        text: format!("B_{k} = {b}\n"),
        json: json!({"k": k, "bernoulli": b}),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_strings() {
        assert_eq!(poly_string(&[1, 0, 1]), "X^2 + 1");
        assert_eq!(poly_string(&[1, -1, 1]), "X^2 - X + 1");
        assert_eq!(poly_string(&[-1, 1]), "X - 1");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(parse_and_dispatch(["lab", "theorem2", "--p", "5"]), EXIT_USAGE);
        assert_eq!(parse_and_dispatch(["lab", "nonsense"]), EXIT_USAGE);
        assert_eq!(
            parse_and_dispatch(["lab", "theorem2", "--p", "5", "--chi", "5:1", "--mmax", "4"]),
            EXIT_USAGE
        );
    }
}
