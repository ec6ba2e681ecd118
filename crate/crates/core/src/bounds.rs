//! Event-probability bounds, generalization-error tail bounds, sample
//! complexity and expected-generalization-error formulas.
//!
//! Every bound function returns a `BoundReport` holding the raw bound value
//! together with the exact event probabilities under the joint and under the
//! product of the marginals, plus a `holds` verdict with `HOLDS_SLACK`
//! tolerance. Raw values above 1 are vacuous but analytically meaningful;
//! `clamped` is the display value.

use crate::dist::{esssup_fiber_prob, event_prob, Event, JointDist};
use crate::error::{Error, Result};
use crate::measures::{
    f_mutual_information, leakage_sum_from_joint, renyi_divergence_joint_product, sibson_mi,
    Alpha, CustomF, FKind,
};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Numerical slack for the holds verdict: `holds` iff
/// `exact_joint_prob <= bound + HOLDS_SLACK`.
pub const HOLDS_SLACK: f64 = 1e-9;

/// Shared parameters of the tail-bound and sample-complexity family.
#[derive(Debug, Clone, Copy)]
pub struct BoundParams {
    pub sigma: f64,
    pub n: u64,
    pub eta: f64,
    pub delta: f64,
}

impl BoundParams {
    /// Defaults to sigma = 1/2, the sub-Gaussian parameter of the 0-1 loss.
    pub fn new(n: u64, eta: f64, delta: f64) -> Result<Self> {
        Self::with_sigma(n, eta, delta, 0.5)
    }

    pub fn with_sigma(n: u64, eta: f64, delta: f64, sigma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eta must lie in (0,1), got {eta}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            n,
            eta,
            delta,
        })
    }

    /// n * eta^2 / (2 sigma^2), the Hoeffding exponent.
    fn exponent(&self) -> f64 {
        self.n as f64 * self.eta * self.eta / (2.0 * self.sigma * self.sigma)
    }
}

/// One bound family's outcome on a concrete (joint, event) instance.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub family: String,
    /// Raw bound value (may exceed 1).
    pub bound: f64,
    /// Display value, bound clamped to [0, 1].
    pub clamped: f64,
    pub exact_joint_prob: f64,
    pub exact_product_prob: f64,
    pub params: BTreeMap<String, String>,
    pub extras: BTreeMap<String, f64>,
    pub holds: bool,
    pub note: Option<String>,
}

impl BoundReport {
    pub(crate) fn raw(family: &str, bound: f64, p: f64, q: f64) -> Self {
        Self::new(family, bound, p, q)
    }

    fn new(family: &str, bound: f64, p: f64, q: f64) -> Self {
        Self {
            family: family.to_string(),
            bound,
            clamped: bound.clamp(0.0, 1.0),
            exact_joint_prob: p,
            exact_product_prob: q,
            params: BTreeMap::new(),
            extras: BTreeMap::new(),
            holds: p <= bound + HOLDS_SLACK,
            note: None,
        }
    }

    fn with_param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// bound - exact_joint_prob; non-negative whenever the bound holds
    /// exactly.
    pub fn slack(&self) -> f64 {
        self.bound - self.exact_joint_prob
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::SCHEMA,
            "family": self.family,
            "bound": json_f64(self.bound),
            "bound_clamped": json_f64(self.clamped),
            "exact_joint_prob": json_f64(self.exact_joint_prob),
            "exact_product_prob": json_f64(self.exact_product_prob),
            "params": self.params,
            "extras": self.extras.iter().map(|(k, v)| (k.clone(), json_f64(*v))).collect::<serde_json::Map<_,_>>(),
            "holds": self.holds,
            "note": self.note,
        })
    }
}

/// JSON has no infinities; encode them as strings.
pub fn json_f64(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x == f64::INFINITY {
        serde_json::json!("inf")
    } else if x == f64::NEG_INFINITY {
        serde_json::json!("-inf")
    } else {
        serde_json::json!("nan")
    }
}

fn exact_probs(j: &JointDist, e: &Event) -> Result<(f64, f64, JointDist)> {
    let q_dist = j.product_of_marginals();
    let p = event_prob(j, e)?;
    let q = event_prob(&q_dist, e)?;
    Ok((p, q, q_dist))
}

/// For finite joints the product-null set always carries zero joint mass;
/// the check guards hand-built pathological inputs.
fn check_abs_continuity(j: &JointDist) -> Result<()> {
    let q = j.product_of_marginals();
    for (pv, qv) in j.flat().iter().zip(q.flat()) {
        if *pv > 0.0 && *qv == 0.0 {
            return Err(Error::AbsoluteContinuityViolated);
        }
    }
    Ok(())
}

/// Four-parameter bound with two Hoelder-conjugate pairs
/// (1/alpha + 1/gamma = 1/alpha' + 1/gamma' = 1):
///   E^{1/g'}_{P_Y}[P_X(E_Y)^{g'/g}] * E^{1/a'}_{P_Y}[ E^{a'/a}_{P_X}[r^a] ],
/// where r is the joint/product likelihood ratio.
pub fn four_param_bound(j: &JointDist, e: &Event, alpha: f64, alpha_prime: f64) -> Result<BoundReport> {
    if !(alpha > 1.0) || !(alpha_prime > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "four_param_bound needs alpha, alpha' > 1, got {alpha}, {alpha_prime}"
        )));
    }
    check_abs_continuity(j)?;
    let (p, q, _) = exact_probs(j, e)?;
    let gamma = alpha / (alpha - 1.0);
    let gamma_prime = alpha_prime / (alpha_prime - 1.0);
    let px = j.marginal_x();
    let py = j.marginal_y();

    let mut a_sum = 0.0;
    let mut b_sum = 0.0;
    for y in 0..j.ny() {
        let w = py.prob(y);
        if w == 0.0 {
            continue;
        }
        let fiber: f64 = (0..j.nx())
            .filter(|&x| e.contains(x, y))
            .map(|x| px.prob(x))
            .sum();
        if fiber > 0.0 {
            a_sum += w * fiber.powf(gamma_prime / gamma);
        }
        let mut inner = 0.0;
        for x in 0..j.nx() {
            let wx = px.prob(x);
            if wx > 0.0 {
                let r = j.prob(x, y) / (wx * w);
                if r > 0.0 {
                    inner += wx * r.powf(alpha);
                }
            }
        }
        if inner > 0.0 {
            b_sum += w * inner.powf(alpha_prime / alpha);
        }
    }
    let bound = a_sum.powf(1.0 / gamma_prime) * b_sum.powf(1.0 / alpha_prime);
    Ok(BoundReport::new("four_param", bound, p, q)
        .with_param("alpha", alpha)
        .with_param("alpha_prime", alpha_prime))
}

/// (esssup_y P_X(E_y))^{1/gamma} * exp(((alpha-1)/alpha) I_alpha).
/// At `Infinity` this is exactly the maximal-leakage bound.
pub fn sibson_bound(j: &JointDist, e: &Event, alpha: Alpha) -> Result<BoundReport> {
    match alpha {
        Alpha::Infinity => {
            let mut rep = ml_bound(j, e)?;
            rep.family = "sibson".into();
            rep.params.insert("alpha".into(), "inf".into());
            Ok(rep)
        }
        Alpha::Finite(a) if a > 1.0 => {
            check_abs_continuity(j)?;
            let (p, q, _) = exact_probs(j, e)?;
            let ess = esssup_fiber_prob(j, e)?;
            let i_alpha = sibson_mi(j, alpha)?;
            let coef = (a - 1.0) / a;
            let bound = ess.powf(coef) * (coef * i_alpha).exp();
            Ok(BoundReport::new("sibson", bound, p, q)
                .with_param("alpha", a)
                .with_extra("esssup_fiber", ess)
                .with_extra("sibson_mi", i_alpha))
        }
        other => Err(Error::InvalidParameter(format!(
            "sibson_bound needs alpha > 1 or Infinity, got {other}"
        ))),
    }
}

/// Maximal-leakage bound (esssup_y P_X(E_y)) * exp(L(X->Y)). The product is
/// formed from the pre-log leakage sum, so the equality instances hold to
/// machine precision.
pub fn ml_bound(j: &JointDist, e: &Event) -> Result<BoundReport> {
    let (p, q, _) = exact_probs(j, e)?;
    let ess = esssup_fiber_prob(j, e)?;
    let leak_sum = leakage_sum_from_joint(j)?;
    let bound = ess * leak_sum;
    Ok(BoundReport::new("ml", bound, p, q)
        .with_extra("esssup_fiber", ess)
        .with_extra("leakage_nats", leak_sum.ln().max(0.0)))
}

/// Q(E)^{(alpha-1)/alpha} * exp(((alpha-1)/alpha) D_alpha(P || Q)).
pub fn alpha_div_bound(j: &JointDist, e: &Event, alpha: f64) -> Result<BoundReport> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha_div_bound needs alpha > 1, got {alpha}"
        )));
    }
    check_abs_continuity(j)?;
    let (p, q, _) = exact_probs(j, e)?;
    let d = renyi_divergence_joint_product(j, Alpha::Finite(alpha))?;
    let coef = (alpha - 1.0) / alpha;
    let bound = if q == 0.0 { 0.0 } else { q.powf(coef) * (coef * d).exp() };
    Ok(BoundReport::new("alpha_div", bound, p, q)
        .with_param("alpha", alpha)
        .with_extra("renyi_divergence", d))
}

/// Generator bundle for the f-divergence bound: the divergence kind, its
/// generalized inverse on the branch where the bound evaluates it
/// (arguments are always >= 0 = f(1)), and the conjugate value at 0.
#[derive(Clone)]
pub struct FdivGenerator {
    pub name: String,
    pub kind: FKind,
    inverse: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub star_zero: f64,
}

impl fmt::Debug for FdivGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FdivGenerator({})", self.name)
    }
}

impl FdivGenerator {
    /// phi_p(t) = (t^p - 1)/(p - 1) with p > 1; the inverse is
    /// ((p-1) t + 1)^{1/p} and phi*(0) = 1/(p-1).
    pub fn hellinger_p(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "hellinger generator needs p > 1, got {p}"
            )));
        }
        Ok(Self {
            name: format!("hellinger_p({p})"),
            kind: FKind::HellingerP(p),
            inverse: Arc::new(move |t| ((p - 1.0) * t + 1.0).powf(1.0 / p)),
            star_zero: 1.0 / (p - 1.0),
        })
    }

    /// chi^2 = Hellinger of order 2.
    pub fn chi_squared() -> Self {
        Self::hellinger_p(2.0).expect("2 > 1")
    }

    /// phi(t) = (sqrt(t) - 1)^2 with the branch inverse t + 1 + 2 sqrt(t)
    /// (valid on ratios >= 1) and phi*(0) = 0.
    pub fn squared_hellinger() -> Self {
        Self {
            name: "squared_hellinger".into(),
            kind: FKind::SquaredHellinger,
            inverse: Arc::new(|t| t + 1.0 + 2.0 * t.sqrt()),
            star_zero: 0.0,
        }
    }

    /// User-supplied generator. The generator must be non-decreasing on
    /// [1, inf), where its inverse is evaluated; spot-checked on a grid.
    pub fn custom(
        custom: CustomF,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        star_zero: f64,
    ) -> Result<Self> {
        let mut prev = custom.eval(1.0);
        for t in [1.5, 2.0, 4.0, 16.0, 256.0, 1e4, 1e6] {
            let v = custom.eval(t);
            if v < prev - 1e-12 {
                return Err(Error::NonMonotoneGenerator);
            }
            prev = v;
        }
        Ok(Self {
            name: format!("custom({})", custom.name()),
            kind: FKind::Custom(custom),
            inverse: Arc::new(inverse),
            star_zero,
        })
    }

    pub fn inverse_at(&self, t: f64) -> f64 {
        (self.inverse)(t)
    }
}

/// f-divergence bound
///   Q(E) * phi^{-1}((I_phi + (1 - Q(E)) phi*(0)) / Q(E)),
/// simplified to Q(E) * phi^{-1}(I_phi / Q(E)) when phi*(0) <= 0.
pub fn fdiv_bound(j: &JointDist, e: &Event, gen: &FdivGenerator) -> Result<BoundReport> {
    check_abs_continuity(j)?;
    let (p, q, _) = exact_probs(j, e)?;
    let i_phi = f_mutual_information(j, &gen.kind)?;
    let (bound, simplified) = if q == 0.0 {
        (0.0, false)
    } else if gen.star_zero <= 0.0 {
        (q * gen.inverse_at(i_phi / q), true)
    } else {
        (q * gen.inverse_at((i_phi + (1.0 - q) * gen.star_zero) / q), false)
    };
    Ok(BoundReport::new("fdiv", bound, p, q)
        .with_param("generator", &gen.name)
        .with_param("simplified_form", simplified)
        .with_extra("f_mutual_information", i_phi)
        .with_extra("star_zero", gen.star_zero))
}

/// Q(E)^{(p-1)/p} * ((p-1) H_p + 1)^{1/p}. At p = 2 the report also carries
/// the relaxed value sqrt(exp(L) Q(E)) obtained from chi^2 <= exp(L) - 1.
pub fn hellinger_p_bound(j: &JointDist, e: &Event, p_order: f64) -> Result<BoundReport> {
    if !(p_order > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "hellinger_p_bound needs p > 1, got {p_order}"
        )));
    }
    check_abs_continuity(j)?;
    let (p, q, _) = exact_probs(j, e)?;
    let h_p = f_mutual_information(j, &FKind::HellingerP(p_order))?;
    let bound = q.powf((p_order - 1.0) / p_order) * ((p_order - 1.0) * h_p + 1.0).powf(1.0 / p_order);
    let mut rep = BoundReport::new("hellinger_p", bound, p, q)
        .with_param("p", p_order)
        .with_extra("hellinger_p_divergence", h_p);
    if p_order == 2.0 {
        let leak_sum = leakage_sum_from_joint(j)?;
        rep = rep
            .with_extra("chi_squared", h_p)
            .with_extra("leakage_relaxed_bound", (leak_sum * q).sqrt())
            .with_note("at p=2 the relaxation chi^2 <= exp(leakage) - 1 gives the leakage_relaxed_bound extra");
    }
    Ok(rep)
}

/// Squared-Hellinger difference bound, valid when P(E) >= Q(E):
///   P(E) - Q(E) <= H^2 + 2 H sqrt(Q(E)).
/// The report's `bound` is the equivalent right side Q + H^2 + 2 H sqrt(Q).
pub fn hellinger_sq_bound(j: &JointDist, e: &Event) -> Result<BoundReport> {
    let (p, q, _) = exact_probs(j, e)?;
    if p < q {
        return Err(Error::AssumptionViolated(format!(
            "hellinger_sq_bound requires P(E) >= Q(E); got P={p} < Q={q}"
        )));
    }
    let h2 = f_mutual_information(j, &FKind::SquaredHellinger)?;
    let h = h2.sqrt();
    let bound = q + h2 + 2.0 * h * q.sqrt();
    Ok(BoundReport::new("hellinger_sq", bound, p, q)
        .with_extra("squared_hellinger", h2)
        .with_extra("difference_bound", h2 + 2.0 * h * q.sqrt()))
}

/// Tail-bound family; the measure argument of `tail_bound` is interpreted
/// per variant (Sibson MI, maximal leakage, Hellinger-p divergence, chi^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailFamily {
    SibsonAlpha(Alpha),
    MaximalLeakage,
    HellingerP(f64),
    ChiSquared,
}

impl TailFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TailFamily::SibsonAlpha(_) => "sibson",
            TailFamily::MaximalLeakage => "ml",
            TailFamily::HellingerP(_) => "hellinger_p",
            TailFamily::ChiSquared => "chi_squared",
        }
    }
}

/// Generalization-error tail bound P(|gen-err| > eta) for the given family.
/// Returns the raw formula value; clamp at 1 for reporting.
///
/// - Sibson:  2 exp(((a-1)/a) (I - n eta^2 / 2 sigma^2)), a > 1 or Infinity
/// - Leakage: 2 exp(L - n eta^2 / 2 sigma^2)
/// - Hellinger-p: 2^{(p-1)/p} exp((1/p)(log((p-1) H_p + 1) - n eta^2 / 2 sigma^2))
/// - chi^2:  sqrt(2) exp((1/2)(log(chi^2 + 1) - n eta^2 / 2 sigma^2))
pub fn tail_bound(measure_value: f64, params: &BoundParams, family: TailFamily) -> Result<f64> {
    if !(measure_value >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "measure value must be >= 0, got {measure_value}"
        )));
    }
    let x = params.exponent();
    let v = match family {
        TailFamily::SibsonAlpha(alpha) => {
            let coef = match alpha {
                Alpha::Infinity => 1.0,
                Alpha::Finite(a) if a > 1.0 => (a - 1.0) / a,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "tail_bound Sibson family needs alpha > 1 or Infinity, got {other}"
                    )))
                }
            };
            2.0 * (coef * (measure_value - x)).exp()
        }
        TailFamily::MaximalLeakage => 2.0 * (measure_value - x).exp(),
        TailFamily::HellingerP(p) => {
            if !(p > 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "tail_bound Hellinger family needs p > 1, got {p}"
                )));
            }
            2.0_f64.powf((p - 1.0) / p)
                * ((1.0 / p) * (((p - 1.0) * measure_value + 1.0).ln() - x)).exp()
        }
        TailFamily::ChiSquared => {
            std::f64::consts::SQRT_2 * (0.5 * ((measure_value + 1.0).ln() - x)).exp()
        }
    };
    Ok(v)
}

/// Smallest sample count m satisfying the family's sample-complexity
/// inequality at accuracy eta and confidence delta:
///
/// - Leakage:  m >= (2 sigma^2/eta^2) (L + log(2/delta))
/// - Sibson:   m >= (2 sigma^2/eta^2) (I + log 2 + (a/(a-1)) log(1/delta))
/// - chi^2:    m >= (2 sigma^2/eta^2) log(chi^2+1) + 2 log(sqrt(2)/delta)
/// - Hellinger-p: tail-bound inversion,
///   m >= (2 sigma^2/eta^2) (log((p-1)H_p+1) + (p-1) log 2 + p log(1/delta))
pub fn sample_complexity(
    measure_value: f64,
    eta: f64,
    delta: f64,
    sigma: f64,
    family: TailFamily,
) -> Result<u64> {
    if !(measure_value >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "measure value must be >= 0, got {measure_value}"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) || !(delta > 0.0 && delta < 1.0) || !(sigma > 0.0) {
        return Err(Error::InvalidParameter(
            "sample_complexity needs eta, delta in (0,1) and sigma > 0".into(),
        ));
    }
    let base = 2.0 * sigma * sigma / (eta * eta);
    let required = match family {
        TailFamily::MaximalLeakage => base * (measure_value + (2.0 / delta).ln()),
        TailFamily::SibsonAlpha(alpha) => {
            let gamma = match alpha {
                Alpha::Infinity => 1.0,
                Alpha::Finite(a) if a > 1.0 => a / (a - 1.0),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "sample_complexity Sibson family needs alpha > 1 or Infinity, got {other}"
                    )))
                }
            };
            base * (measure_value + std::f64::consts::LN_2 + gamma * (1.0 / delta).ln())
        }
        TailFamily::ChiSquared => {
            base * (measure_value + 1.0).ln() + 2.0 * (std::f64::consts::SQRT_2 / delta).ln()
        }
        TailFamily::HellingerP(p) => {
            if !(p > 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "sample_complexity Hellinger family needs p > 1, got {p}"
                )));
            }
            base * (((p - 1.0) * measure_value + 1.0).ln()
                + (p - 1.0) * std::f64::consts::LN_2
                + p * (1.0 / delta).ln())
        }
    };
    Ok((required.max(0.0).ceil() as u64).max(1))
}

/// Expected-generalization-error bound and the two companion comparison
/// values.
#[derive(Debug, Clone, Copy)]
pub struct ExpectedGenErr {
    /// sqrt(8 sigma^2 (log 2 + I) / n).
    pub bound: f64,
    /// 3 sqrt(2 sigma^2 I / n), the order-infinity comparison value.
    pub leakage_comparison: f64,
    /// sqrt(2 sigma^2 I / n), the mutual-information benchmark.
    pub mi_benchmark: f64,
}

pub fn expected_generr_bound(i_alpha: f64, n: u64, sigma: f64) -> Result<ExpectedGenErr> {
    if n < 1 || !(sigma > 0.0) || !(i_alpha >= 0.0) {
        return Err(Error::InvalidParameter(
            "expected_generr_bound needs n >= 1, sigma > 0, measure >= 0".into(),
        ));
    }
    let nf = n as f64;
    Ok(ExpectedGenErr {
        bound: (8.0 * sigma * sigma * (std::f64::consts::LN_2 + i_alpha) / nf).sqrt(),
        leakage_comparison: 3.0 * (2.0 * sigma * sigma * i_alpha / nf).sqrt(),
        mi_benchmark: (2.0 * sigma * sigma * i_alpha / nf).sqrt(),
    })
}

/// a * min(3 sqrt(log b), 2 sqrt(log 2b)): expected absolute deviation of a
/// random variable with a 2b exp(-eta^2/a^2) tail, b >= e.
pub fn expected_abs_deviation(a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0) || !(b >= std::f64::consts::E) {
        return Err(Error::InvalidParameter(
            "expected_abs_deviation needs a >= 0 and b >= e".into(),
        ));
    }
    Ok(a * (3.0 * b.ln().sqrt()).min(2.0 * (2.0 * b).ln().sqrt()))
}

/// False-discovery bound for a data-dependent test selection:
/// min(1, exp(leakage) * significance).
pub fn hyp_test_bound(leakage: f64, significance: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&significance) {
        return Err(Error::InvalidParameter(format!(
            "significance must lie in [0,1], got {significance}"
        )));
    }
    if !(leakage >= 0.0) {
        return Err(Error::NegativeLeakage(leakage));
    }
    Ok((leakage.exp() * significance).min(1.0))
}

/// Inverse mode: the largest significance level guaranteeing a false
/// discovery probability of at most delta, delta / exp(leakage).
pub fn hyp_test_significance(leakage: f64, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0,1], got {delta}"
        )));
    }
    if !(leakage >= 0.0) {
        return Err(Error::NegativeLeakage(leakage));
    }
    Ok(delta / leakage.exp())
}
