//! Experiment pipelines: the convergent sequence G_{k_m}, the product run that
//! multiplies a fixed form by it, the constant-term valuation check and the
//! unit-congruence tester.

mod report;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{
    rational_valuation, require_odd_prime, valuation_u64, CyclotomicNumber, PadicApprox, Rational,
    Valuation,
};
use crate::characters::{
    embed, find_alpha, select_a, teichmuller, DirichletCharacter, EmbeddingSigma, WeightX,
};
use crate::eisenstein::{eisenstein_level1, hecke_eisenstein_chi, jacobi_eisenstein, jacobi_order_for_lift};
use crate::error::{Error, Result};
use crate::lvalues::{constant_term_valuation, dirichlet_l_neg, global_bernoulli_cache};
use crate::maass::maass_lift;
use crate::qseries::{JacobiSeries, PadicRing, SiegelSeries};

pub use report::{monotone_outcome, Check, Delta, Outcome, Report, Stage, TableEntry, WeightInX};

/// Largest m_max accepted without an explicit opt-in.
pub const DEFAULT_M_MAX_LIMIT: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Config {
    pub p: u64,
    pub chi: DirichletCharacter,
    /// 1-based index into the sorted roots of the cyclotomic polynomial mod p.
    pub sigma_index: usize,
    /// Overrides the smallest admissible a.
    pub a: Option<u64>,
    pub m_max: u32,
    pub trunc: usize,
    pub prec: u32,
}

impl Theorem2Config {
    /// p = 5, χ = 5:1, σ_1, N = 2, M = 10, m <= 3.
    pub fn flagship() -> Self {
        Self {
            p: 5,
            chi: DirichletCharacter::new(5, 1).expect("5 is prime"),
            sigma_index: 1,
            a: None,
            m_max: 3,
            trunc: 2,
            prec: 10,
        }
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        require_odd_prime(self.p)?;
        if self.chi.p() != self.p {
            return Err(Error::PrimeMismatch(self.chi.p(), self.p));
        }
        if self.m_max < 1 {
            return Err(Error::Precondition("m_max must be >= 1".into()));
        }
        if self.prec < 1 {
            return Err(Error::Precondition("precision must be >= 1".into()));
        }
        let sigma = EmbeddingSigma::new(self.p, self.sigma_index, self.prec)?;
        let alpha = find_alpha(&self.chi, &sigma)?;
        let a = match self.a {
            None => select_a(alpha, self.p, self.chi.parity())?,
            Some(a) => {
                let m = self.p - 1;
                if a < 2 || (a + alpha) % m != 0 {
                    return Err(Error::Precondition(format!(
                        "a = {a} must be >= 2 and ≡ -{alpha} mod {m}"
                    )));
                }
                let sign = if a % 2 == 0 { 1 } else { -1 };
                if sign != self.chi.parity() {
                    return Err(Error::ParityMismatch {
                        weight: a as i64,
                        chi_sign: self.chi.parity(),
                        weight_sign: sign,
                    });
                }
                a
            }
        };
        Ok(ResolvedConfig {
            cfg: self.clone(),
            sigma,
            alpha,
            a,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub cfg: Theorem2Config,
    pub sigma: EmbeddingSigma,
    pub alpha: u64,
    pub a: u64,
}

impl ResolvedConfig {
    pub fn p(&self) -> u64 {
        self.cfg.p
    }

    /// k_m = a p^m.
    pub fn weight(&self, m: u32) -> u64 {
        self.a * self.p().pow(m)
    }

    /// Weight of the level-1 middle factor: a p (p^{m-1} - 1).
    pub fn middle_weight(&self, m: u32) -> u64 {
        self.a * self.p() * (self.p().pow(m - 1) - 1)
    }

    pub fn limit_class(&self) -> u64 {
        let m = self.p() - 1;
        (m - self.alpha % m) % m
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p(),
            "chi": self.cfg.chi.spec(),
            "sigma": self.sigma.spec(),
            "alpha": self.alpha,
            "a": self.a,
            "m_max": self.cfg.m_max,
            "trunc": self.cfg.trunc,
            "prec": self.cfg.prec,
        })
    }
}

fn to_cyclotomic(m: u32) -> impl Fn(&Rational) -> Result<CyclotomicNumber> {
    move |q| Ok(CyclotomicNumber::from_rational(m, q.clone()))
}

/// φ_{k_m} = E_{a(p-2),χ} · E_{a p (p^{m-1}-1)} · E^J_{2a}, to the elliptic order a lift at N needs.
pub fn build_phi_km(res: &ResolvedConfig, m: u32) -> Result<JacobiSeries<CyclotomicNumber>> {
    if m < 1 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let p = res.p();
    let order = jacobi_order_for_lift(res.cfg.trunc);
    let conductor = res.cfg.chi.value_conductor();
    let hecke = hecke_eisenstein_chi((res.a * (p - 2)) as usize, &res.cfg.chi, order)?;
    let middle = eisenstein_level1(res.middle_weight(m) as usize, order)?
        .map_coefficients(conductor, to_cyclotomic(conductor))?;
    let jacobi = jacobi_eisenstein(2 * res.a as usize, order)?
        .map_coefficients(conductor, to_cyclotomic(conductor))?;
    let phi = jacobi.mul_elliptic(&hecke.try_mul(&middle)?)?;
    if phi.meta().weight != res.weight(m) as i64 {
        return Err(Error::Consistency(format!(
            "φ has weight {}, expected {}",
            phi.meta().weight,
            res.weight(m)
        )));
    }
    Ok(phi)
}

/// One member of the sequence, exact in Q(ζ_{p-1}).
#[derive(Clone, Debug)]
pub struct GStage {
    pub m: u32,
    pub k_m: u64,
    pub phi: JacobiSeries<CyclotomicNumber>,
    /// 2 L(1-k_m, χ)^{-1} times the lift of φ.
    pub g: SiegelSeries<CyclotomicNumber>,
}

impl GStage {
    pub fn sigma_image(&self, sigma: &EmbeddingSigma) -> Result<SiegelSeries<PadicApprox>> {
        embed_series(&self.g, sigma)
    }
}

pub fn embed_series(
    s: &SiegelSeries<CyclotomicNumber>,
    sigma: &EmbeddingSigma,
) -> Result<SiegelSeries<PadicApprox>> {
    let ring = PadicRing {
        p: sigma.p(),
        relprec: sigma.precision(),
    };
    s.map_coefficients(ring, |c| embed(c, sigma))
}

pub fn build_g_km(res: &ResolvedConfig, m: u32) -> Result<GStage> {
    let phi = build_phi_km(res, m)?;
    let k = res.weight(m) as usize;
    let chi = &res.cfg.chi;
    let lifted = maass_lift(&phi, k, chi, res.p(), res.cfg.trunc)?;
    let l = dirichlet_l_neg(k, chi)?;
    if l.value.is_zero() {
        return Err(Error::Consistency(format!("L(1-{k}, χ) vanishes")));
    }
    let factor = l.value.inverse()?.scale(&Rational::from_integer(2.into()));
    let g = lifted.scale(&factor)?;
    if !g.coeff(0, 0, 0).is_some_and(|c| c.is_one()) {
        return Err(Error::Consistency("constant term of G is not 1".into()));
    }
    Ok(GStage { m, k_m: k as u64, phi, g })
}

/// Valuations of σ(d(T)) for an exact difference series d, capped at the precision.
pub fn valuation_table(
    diff: &SiegelSeries<CyclotomicNumber>,
    sigma: &EmbeddingSigma,
) -> Result<Vec<TableEntry>> {
    let cap = sigma.precision() as i64;
    diff.iter()
        .map(|(&(n, r, l), c)| {
            let v = if c.is_zero() {
                Valuation::Infinite
            } else {
                embed(c, sigma)?.valuation()
            };
            Ok(TableEntry {
                index: vec![n, r, l],
                valuation: Delta::capped(v, cap),
            })
        })
        .collect()
}

fn unit_series(like: &SiegelSeries<CyclotomicNumber>) -> Result<SiegelSeries<CyclotomicNumber>> {
    let m = *like.ring();
    SiegelSeries::from_fn(m, like.meta().clone(), like.trunc(), |n, r, l| {
        Ok(if (n, r, l) == (0, 0, 0) {
            CyclotomicNumber::one(m)
        } else {
            CyclotomicNumber::zero(m)
        })
    })
}

fn weight_in_x(res: &ResolvedConfig, k: u64, prec: u32) -> WeightInX {
    let w = WeightX::of_integer(&BigInt::from(k), res.p(), prec);
    WeightInX {
        s_residue: w.s_component.residue().to_string(),
        s_valuation: w.s_valuation(),
        class: w.class_component,
        limit: (0, res.limit_class()),
    }
}

/// The l = 0 row of G^σ from the divisor-sum formula alone, compared with the lifted row.
fn row_zero_two_path(res: &ResolvedConfig, stage: &GStage, g_sigma: &SiegelSeries<PadicApprox>) -> Result<Check> {
    let p = res.p();
    let prec = res.sigma.precision();
    let wide = res.sigma.with_precision(prec + 24);
    let k = stage.k_m as usize;
    let half_l = dirichlet_l_neg(k, &res.cfg.chi)?
        .value
        .scale(&Rational::new(1.into(), 2.into()));
    let inv = embed(&half_l, &wide)?.inverse()?;
    let mut bad = Vec::new();
    for n in 1..=res.cfg.trunc as u64 {
        let mut sum = PadicApprox::exact_zero(p);
        for d in crate::arith::divisors(n) {
            if d % p == 0 {
                continue;
            }
            let omega = teichmuller(d as i64, p, prec + 24)?.pow(res.alpha);
            let term = PadicApprox::from_parts(p, 0, omega.residue(), prec + 24)
                .try_mul(&PadicApprox::from_integer(&BigInt::from(d).pow((k - 1) as u32), p, prec + 24))?;
            sum = sum.try_add(&term)?;
        }
        let independent = inv.try_mul(&sum)?;
        let lifted = g_sigma.coeff(n as i64, 0, 0).expect("row zero stored");
        let agrees = match (lifted.valuation(), independent.try_sub(lifted)?.valuation()) {
            (Valuation::Exact(v), diff) => diff >= Valuation::AtLeast(v + prec as i64),
            (_, diff) => diff >= Valuation::AtLeast(prec as i64),
        } && independent.relprec() >= prec.min(lifted.relprec());
        if !agrees {
            bad.push(n);
        }
    }
    Ok(Check::new(
        format!("m={} row l=0 matches divisor-sum formula", stage.m),
        bad.is_empty(),
        if bad.is_empty() {
            String::new()
        } else {
            format!("disagreement at n = {bad:?}")
        },
    ))
}

/// Σ ω(d)^α d^{k-1} against Σ d^{k+α-1}, which agree mod p since ω(d) ≡ d.
fn shifted_exponent_mod_p(res: &ResolvedConfig, stage: &GStage) -> Result<Check> {
    let p = res.p();
    let k = stage.k_m;
    let mut ok = true;
    for n in 1..=res.cfg.trunc as u64 {
        let mut literal = BigInt::zero();
        let mut shifted = BigInt::zero();
        for d in crate::arith::divisors(n).into_iter().filter(|d| d % p != 0) {
            let omega = teichmuller(d as i64, p, 1)?.pow(res.alpha);
            let dp = BigInt::from(d);
            literal += omega.residue() * dp.modpow(&BigInt::from(k - 1), &BigInt::from(p));
            shifted += dp.modpow(&BigInt::from(k + res.alpha - 1), &BigInt::from(p));
        }
        ok &= (literal - shifted) % BigInt::from(p) == BigInt::zero();
    }
    Ok(Check::new(
        format!("m={} shifted-exponent divisor sums agree mod p", stage.m),
        ok,
        "",
    ))
}

/// min_{1<=n<=10} v_p(a_{l_{m+1}}(n) - a_{l_m}(n)) for the level-1 middle factors.
pub fn middle_factor_differences(res: &ResolvedConfig) -> Result<Vec<(u32, Valuation)>> {
    let p = res.p();
    let mut out = Vec::new();
    for m in 1..res.cfg.m_max {
        let e0 = eisenstein_level1(res.middle_weight(m) as usize, 10)?;
        let e1 = eisenstein_level1(res.middle_weight(m + 1) as usize, 10)?;
        let mut best = Valuation::Infinite;
        for n in 1..=10 {
            let d = e1.coeff(n).unwrap() - e0.coeff(n).unwrap();
            let v = rational_valuation(&d, p).map_or(Valuation::Infinite, Valuation::Exact);
            best = best.min(v);
        }
        out.push((m, best));
    }
    Ok(out)
}

fn strictly_increasing(vals: &[Valuation]) -> bool {
    vals.windows(2).all(|w| w[1] > w[0])
}

/// Runs the stages for m = 1..=m_max and checks that min_T v_p(G^σ(T) - [T=O]) increases strictly.
pub fn convergence_report(cfg: &Theorem2Config) -> Result<Report> {
    if cfg.m_max < 2 {
        return Err(Error::Precondition("convergence needs m_max >= 2".into()));
    }
    let res = cfg.resolve()?;
    global_bernoulli_cache().ensure(res.weight(cfg.m_max) as usize);
    let stages = (1..=cfg.m_max)
        .map(|m| build_g_km(&res, m))
        .collect::<Result<Vec<_>>>()?;
    let first = evaluate_convergence(&res, &stages)?;
    if first.outcome == Outcome::Pass {
        return Ok(first);
    }
    let mut wider = res.clone();
    wider.cfg.prec += 4;
    wider.sigma = res.sigma.with_precision(wider.cfg.prec);
    let mut second = evaluate_convergence(&wider, &stages)?;
    second.checks.push(Check::new(
        "precision retry",
        second.outcome == Outcome::Pass,
        format!("retried at M = {} after {:?} at M = {}", wider.cfg.prec, first.outcome, cfg.prec),
    ));
    Ok(second)
}

fn evaluate_convergence(res: &ResolvedConfig, stages: &[GStage]) -> Result<Report> {
    let prec = res.sigma.precision();
    let mut out = Vec::new();
    let mut checks = Vec::new();
    for st in stages {
        let diff = st.g.try_sub(&unit_series(&st.g)?)?;
        let mut stage = Stage::from_table(st.m, st.k_m, valuation_table(&diff, &res.sigma)?, prec as i64);
        let w = weight_in_x(res, st.k_m, prec);
        checks.push(Check::new(
            format!("m={} weight tends to (0, {}) in X", st.m, res.limit_class()),
            w.class == res.limit_class() && w.s_valuation >= st.m.min(prec),
            format!("k_m = {}, v_p = {}, class = {}", st.k_m, w.s_valuation, w.class),
        ));
        stage.weight = Some(w);
        checks.push(Check::new(
            format!("m={} constant term exactly 1", st.m),
            st.g.coeff(0, 0, 0).is_some_and(|c| c.is_one()),
            "",
        ));
        checks.push(Check::new(
            format!("m={} lift symmetric", st.m),
            st.g.symmetry_violation().is_none(),
            "",
        ));
        let g_sigma = st.sigma_image(&res.sigma)?;
        checks.push(row_zero_two_path(res, st, &g_sigma)?);
        checks.push(shifted_exponent_mod_p(res, st)?);
        out.push(stage);
    }
    let diffs = middle_factor_differences(res)?;
    let vals: Vec<Valuation> = diffs.iter().map(|d| d.1).collect();
    checks.push(Check::new(
        "level-1 factor differences increase",
        strictly_increasing(&vals),
        diffs
            .iter()
            .map(|(m, v)| format!("m={m}: {}", Delta::capped(*v, i64::MAX)))
            .collect::<Vec<_>>()
            .join(", "),
    ));
    let mins: Vec<Delta> = out.iter().map(|s| s.min_val).collect();
    let mut outcome = monotone_outcome(&mins);
    if outcome == Outcome::Pass && checks.iter().any(|c| !c.pass) {
        outcome = Outcome::Fail;
    }
    let mut config = res.to_json();
    config["prec"] = json!(prec);
    let mut report = Report::new("theorem2", config, out, checks, outcome);
    report.label = format!(
        "consistent with G^σ → 1 to precision {prec}, truncation {}",
        res.cfg.trunc
    );
    Ok(report)
}

/// Stages for v_p((F·G_m)^σ(T) - F^σ(T)), with the product bookkeeping checks.
pub fn product_stages(
    f: &SiegelSeries<CyclotomicNumber>,
    sequence: &[(u32, u64, SiegelSeries<CyclotomicNumber>)],
    sigma: &EmbeddingSigma,
) -> Result<(Vec<Stage>, Vec<Check>)> {
    let mut stages = Vec::new();
    let mut checks = Vec::new();
    for (m, k_m, g) in sequence {
        let product = f.try_mul(g)?;
        let meta = product.meta();
        checks.push(Check::new(
            format!("m={m} product character trivial"),
            meta.has_trivial_character(),
            meta.character.as_ref().map(|c| c.spec()).unwrap_or_default(),
        ));
        checks.push(Check::new(
            format!("m={m} product weight even"),
            meta.weight % 2 == 0,
            format!("weight {}", meta.weight),
        ));
        let diff = product.try_sub(&f.truncate(product.trunc()))?;
        stages.push(Stage::from_table(
            *m,
            *k_m,
            valuation_table(&diff, sigma)?,
            sigma.precision() as i64,
        ));
    }
    Ok((stages, checks))
}

/// Multiplies F (character χ) by the sequence built for `cfg_inv` (character χ^{-1}).
pub fn theorem1_product_run(
    f: &SiegelSeries<CyclotomicNumber>,
    cfg_inv: &Theorem2Config,
) -> Result<Report> {
    let f_char = f
        .meta()
        .character
        .clone()
        .ok_or_else(|| Error::CharacterMismatch("F carries no character".into()))?;
    if f_char.inverse() != cfg_inv.chi {
        return Err(Error::CharacterMismatch(format!(
            "F has character {}, sequence is configured for {}",
            f_char.spec(),
            cfg_inv.chi.spec()
        )));
    }
    let res = cfg_inv.resolve()?;
    global_bernoulli_cache().ensure(res.weight(cfg_inv.m_max) as usize);
    let sequence = (1..=cfg_inv.m_max)
        .map(|m| build_g_km(&res, m).map(|st| (st.m, st.k_m, st.g)))
        .collect::<Result<Vec<_>>>()?;
    let run = |sigma: &EmbeddingSigma| -> Result<Report> {
        let (stages, checks) = product_stages(f, &sequence, sigma)?;
        let mins: Vec<Delta> = stages.iter().map(|s| s.min_val).collect();
        let mut outcome = monotone_outcome(&mins);
        if outcome == Outcome::Pass && checks.iter().any(|c| !c.pass) {
            outcome = Outcome::Fail;
        }
        let mut config = res.to_json();
        config["prec"] = json!(sigma.precision());
        config["f_weight"] = json!(f.meta().weight);
        config["f_character"] = json!(f_char.spec());
        let mut report = Report::new("theorem1", config, stages, checks, outcome);
        report.label = format!(
            "consistent with F^σ G^σ → F^σ to precision {}, truncation {}",
            sigma.precision(),
            f.trunc().min(cfg_inv.trunc)
        );
        Ok(report)
    };
    let first = run(&res.sigma)?;
    if first.outcome == Outcome::Pass {
        return Ok(first);
    }
    let mut second = run(&res.sigma.with_precision(cfg_inv.prec + 4))?;
    second.checks.push(Check::new(
        "precision retry",
        second.outcome == Outcome::Pass,
        format!("retried at M = {} after {:?}", cfg_inv.prec + 4, first.outcome),
    ));
    Ok(second)
}

/// For 2 <= m <= m_max: v_p(l_m) = 1, (p-1) | l_m and v_p(B_{l_m}/2l_m) = -2.
pub fn lemma2_check(p: u64, a: u64, m_max: u32) -> Result<Report> {
    require_odd_prime(p)?;
    if m_max < 2 {
        return Err(Error::Precondition("lemma2 needs m_max >= 2".into()));
    }
    let mut checks = Vec::new();
    for m in 2..=m_max {
        let l = a * p * (p.pow(m - 1) - 1);
        let v_l = valuation_u64(l, p);
        let divisible = l.is_multiple_of(p - 1);
        let v_b = constant_term_valuation(l as usize, p)?;
        checks.push(Check::new(
            format!("m={m} l={l}"),
            v_l == 1 && divisible && v_b == -2,
            format!("v_p(l) = {v_l}, (p-1) | l: {divisible}, v_p(B_l/2l) = {v_b}"),
        ));
    }
    let outcome = if checks.iter().all(|c| c.pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    Ok(Report::new(
        "lemma2",
        json!({"p": p, "a": a, "m_max": m_max}),
        Vec::new(),
        checks,
        outcome,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitCongruence {
    Holds,
    /// First T ≠ O with v_p(G^σ(T) - [T=O]) = 0.
    Fails { index: (i64, i64, i64) },
    /// First coefficient whose σ-image is not p-integral.
    NonIntegral { index: (i64, i64, i64), valuation: i64 },
}

/// Whether G^σ ≡ 1 mod p on the stored support.
pub fn unit_congruence_check(
    g: &SiegelSeries<CyclotomicNumber>,
    sigma: &EmbeddingSigma,
) -> Result<UnitCongruence> {
    let one = CyclotomicNumber::one(*g.ring());
    let mut failure = None;
    for (&idx, c) in g.iter() {
        let diff = if idx == (0, 0, 0) { c.try_sub(&one)? } else { c.clone() };
        if diff.is_zero() {
            continue;
        }
        match embed(&diff, sigma)?.valuation() {
            Valuation::Exact(v) if v < 0 => {
                return Ok(UnitCongruence::NonIntegral {
                    index: idx,
                    valuation: v,
                })
            }
            Valuation::Exact(0) if failure.is_none() => failure = Some(idx),
            _ => {}
        }
    }
    Ok(match failure {
        Some(index) => UnitCongruence::Fails { index },
        None => UnitCongruence::Holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::qseries::{FormMeta, SeriesKind};

    fn flagship() -> ResolvedConfig {
        Theorem2Config::flagship().resolve().unwrap()
    }

    #[test]
    fn resolution() {
        let res = flagship();
        assert_eq!((res.alpha, res.a), (1, 3));
        assert_eq!(res.weight(2), 75);
        assert_eq!(res.middle_weight(1), 0);
        assert_eq!(res.middle_weight(2), 60);
        let mut bad = Theorem2Config::flagship();
        bad.a = Some(5);
        assert!(bad.resolve().is_err());
        bad.a = Some(7);
        assert_eq!(bad.resolve().unwrap().a, 7);
        bad.p = 4;
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn phi_bookkeeping() {
        let res = flagship();
        for m in 1..=2 {
            let phi = build_phi_km(&res, m).unwrap();
            assert_eq!(phi.meta().weight, 3 * 5i64.pow(m));
            assert!(phi.coeff(0, 0).unwrap().is_one());
            assert_eq!(phi.trunc(), 4);
            assert!(phi.discriminant_violation().is_none());
        }
    }

    #[test]
    fn g_row_one_is_scaled_input() {
        let res = flagship();
        let st = build_g_km(&res, 1).unwrap();
        let l = dirichlet_l_neg(15, &res.cfg.chi).unwrap().value;
        let factor = l.inverse().unwrap().scale(&rat(2, 1));
        for (&(n, r), c) in st.g.row_one().unwrap().iter() {
            assert_eq!(c, &st.phi.coeff(n, r).unwrap().try_mul(&factor).unwrap());
        }
    }

    #[test]
    fn lemma2_examples() {
        let r = lemma2_check(5, 3, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.checks[0].name, "m=2 l=60");
        assert_eq!(r.checks[1].name, "m=3 l=360");
        let r7 = lemma2_check(7, 4, 2).unwrap();
        assert!(r7.pass);
        assert_eq!(r7.checks[0].name, "m=2 l=168");
    }

    #[test]
    fn product_with_unit_sequence() {
        let res = flagship();
        let f = build_g_km(&res, 1).unwrap().g;
        let one = unit_series(&f).unwrap().with_meta(FormMeta::new(SeriesKind::Siegel2, 0, None));
        let (stages, checks) = product_stages(&f, &[(1, 0, one)], &res.sigma).unwrap();
        assert!(stages[0].table.iter().all(|e| e.valuation == Delta::AtLeast(10)));
        // χ · trivial is χ, not trivial, and 15 is odd
        assert!(checks.iter().all(|c| !c.pass));
    }

    #[test]
    fn product_run_rejects_wrong_character() {
        let res = flagship();
        let f = build_g_km(&res, 1).unwrap().g;
        assert!(matches!(
            theorem1_product_run(&f, &Theorem2Config::flagship()),
            Err(Error::CharacterMismatch(_))
        ));
    }

    #[test]
    fn unit_congruence() {
        let res = flagship();
        let meta = FormMeta::new(SeriesKind::Siegel2, 0, None);
        let one = SiegelSeries::from_fn(4, meta.clone(), 1, |n, r, l| {
            Ok(CyclotomicNumber::from_integer(4, ((n, r, l) == (0, 0, 0)) as i64))
        })
        .unwrap();
        assert_eq!(unit_congruence_check(&one, &res.sigma).unwrap(), UnitCongruence::Holds);
        let bumped = SiegelSeries::from_fn(4, meta.clone(), 1, |n, r, l| {
            Ok(CyclotomicNumber::from_integer(4, ((n, r, l) == (0, 0, 0) || (n, r, l) == (1, 1, 1)) as i64))
        })
        .unwrap();
        assert_eq!(
            unit_congruence_check(&bumped, &res.sigma).unwrap(),
            UnitCongruence::Fails { index: (1, 1, 1) }
        );
        let fractional = SiegelSeries::from_fn(4, meta, 1, |n, _, _| {
            Ok(CyclotomicNumber::from_rational(4, rat(1, if n == 1 { 25 } else { 1 })))
        })
        .unwrap();
        assert!(matches!(
            unit_congruence_check(&fractional, &res.sigma).unwrap(),
            UnitCongruence::NonIntegral { valuation: -2, .. }
        ));
        let g1 = build_g_km(&res, 1).unwrap().g;
        assert_eq!(unit_congruence_check(&g1, &res.sigma).unwrap(), UnitCongruence::Holds);
    }
}
