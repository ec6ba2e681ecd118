//! Divergences and dependence measures on finite distributions.
//!
//! Values are in nats. Conventions for boundary atoms follow the standard
//! measure-theoretic limits: `0 * log(0/0) = 0`, `0 * f(0/0) = 0`, and atoms
//! with `p_i = 0` contribute `q_i * f(0)` to f-divergences. `f64::INFINITY`
//! is a legitimate return value (for example Renyi divergence of order
//! `alpha > 1` without absolute continuity).

use crate::dist::{Channel, FiniteDist, JointDist};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Order of a Renyi divergence or Sibson mutual information. `One` and
/// `Infinity` are explicit variants with their own code paths, never
/// sentinel reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    One,
    Infinity,
}

/// Finite orders this close to 1 are rejected: the 1/(alpha-1) factor blows
/// up and callers should use `Alpha::One`.
pub const DEGENERATE_ALPHA_WINDOW: f64 = 1e-9;

impl Alpha {
    /// Validated finite order in (0,1) or (1,inf).
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive real, got {value}"
            )));
        }
        if (value - 1.0).abs() < DEGENERATE_ALPHA_WINDOW {
            return Err(Error::DegenerateAlpha { alpha: value });
        }
        Ok(Alpha::Finite(value))
    }

    /// Parses "inf"/"infinity", "1"/"one", or a finite order.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "oo" => Ok(Alpha::Infinity),
            "1" | "1.0" | "one" => Ok(Alpha::One),
            other => {
                let v: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse alpha {s:?}")))?;
                if v == 1.0 {
                    Ok(Alpha::One)
                } else {
                    Alpha::finite(v)
                }
            }
        }
    }

    fn check(&self) -> Result<()> {
        if let Alpha::Finite(v) = self {
            Alpha::finite(*v)?;
        }
        Ok(())
    }

    /// (alpha - 1) / alpha, the reciprocal Hoelder conjugate exponent.
    /// 0 at `One`, 1 at `Infinity`.
    pub fn one_over_gamma(&self) -> f64 {
        match self {
            Alpha::Finite(a) => (a - 1.0) / a,
            Alpha::One => 0.0,
            Alpha::Infinity => 1.0,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::One => write!(f, "1"),
            Alpha::Infinity => write!(f, "inf"),
        }
    }
}

/// Convex generator of an f-divergence, normalized so f(1) = 0.
#[derive(Clone)]
pub enum FKind {
    /// f(t) = t log t.
    Kl,
    /// f(t) = |t - 1| / 2.
    TotalVariation,
    /// f(t) = (sqrt(t) - 1)^2.
    SquaredHellinger,
    /// f(t) = (t - 1)^2.
    ChiSquared,
    /// f(t) = (t^p - 1) / (p - 1), p > 0, p != 1.
    HellingerP(f64),
    Custom(CustomF),
}

impl fmt::Debug for FKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FKind::Kl => write!(f, "Kl"),
            FKind::TotalVariation => write!(f, "TotalVariation"),
            FKind::SquaredHellinger => write!(f, "SquaredHellinger"),
            FKind::ChiSquared => write!(f, "ChiSquared"),
            FKind::HellingerP(p) => write!(f, "HellingerP({p})"),
            FKind::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

/// User-supplied convex generator.
#[derive(Clone)]
pub struct CustomF {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomF {
    /// Checks f(1) = 0 and a midpoint convexity probe around 1.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if f(1.0).abs() > 1e-9 {
            return Err(Error::NotConvexAtOne);
        }
        for (a, b) in [(0.5, 2.0), (1.0, 3.0)] {
            let mid = (a + b) / 2.0;
            if f(mid) > (f(a) + f(b)) / 2.0 + 1e-9 {
                return Err(Error::NotConvexAtOne);
            }
        }
        Ok(Self {
            name: name.into(),
            f: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

enum Slope {
    Finite(f64),
    Infinite,
}

impl FKind {
    fn validate(&self) -> Result<()> {
        if let FKind::HellingerP(p) = self {
            if !(*p > 0.0) || *p == 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "Hellinger order must be positive and != 1, got {p}"
                )));
            }
        }
        Ok(())
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            FKind::Kl => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            FKind::TotalVariation => 0.5 * (t - 1.0).abs(),
            FKind::SquaredHellinger => {
                let d = t.sqrt() - 1.0;
                d * d
            }
            FKind::ChiSquared => (t - 1.0) * (t - 1.0),
            FKind::HellingerP(p) => (t.powf(*p) - 1.0) / (p - 1.0),
            FKind::Custom(c) => c.eval(t),
        }
    }

    fn at_zero(&self) -> f64 {
        match self {
            FKind::Kl => 0.0,
            FKind::Custom(c) => {
                let v = c.eval(0.0);
                if v.is_nan() {
                    c.eval(1e-15)
                } else {
                    v
                }
            }
            other => other.eval(0.0),
        }
    }

    /// lim_{t -> inf} f(t)/t, the price of a q-null atom with p-mass.
    fn slope_at_infinity(&self) -> Slope {
        match self {
            FKind::Kl | FKind::ChiSquared => Slope::Infinite,
            FKind::TotalVariation => Slope::Finite(0.5),
            FKind::SquaredHellinger => Slope::Finite(1.0),
            FKind::HellingerP(p) => {
                if *p > 1.0 {
                    Slope::Infinite
                } else {
                    Slope::Finite(0.0)
                }
            }
            FKind::Custom(c) => {
                let s1 = c.eval(1e9) / 1e9;
                let s2 = c.eval(1e12) / 1e12;
                if !s2.is_finite() || s2 > s1 * (1.0 + 1e-6) + 1e-12 {
                    Slope::Infinite
                } else {
                    Slope::Finite(s2)
                }
            }
        }
    }
}

fn check_same_labels(p: &FiniteDist, q: &FiniteDist) -> Result<()> {
    if p.labels() != q.labels() {
        return Err(Error::LabelMismatch {
            context: "divergences require identical label sets".into(),
        });
    }
    Ok(())
}

/// Renyi divergence D_alpha(P || Q) = log(sum p^alpha q^(1-alpha)) / (alpha-1).
/// `One` is Kullback-Leibler, `Infinity` is log of the maximal ratio. Returns
/// `f64::INFINITY` when alpha >= 1 and P is not absolutely continuous
/// w.r.t. Q.
pub fn renyi_divergence(p: &FiniteDist, q: &FiniteDist, alpha: Alpha) -> Result<f64> {
    check_same_labels(p, q)?;
    alpha.check()?;
    Ok(renyi_core(p.probs(), q.probs(), alpha))
}

fn renyi_core(p: &[f64], q: &[f64], alpha: Alpha) -> f64 {
    match alpha {
        Alpha::One => {
            let mut acc = 0.0;
            for (&pi, &qi) in p.iter().zip(q) {
                if pi > 0.0 {
                    if qi == 0.0 {
                        return f64::INFINITY;
                    }
                    acc += pi * (pi / qi).ln();
                }
            }
            acc
        }
        Alpha::Infinity => {
            let mut max_ratio = 0.0_f64;
            for (&pi, &qi) in p.iter().zip(q) {
                if qi == 0.0 {
                    if pi > 0.0 {
                        return f64::INFINITY;
                    }
                } else {
                    max_ratio = max_ratio.max(pi / qi);
                }
            }
            max_ratio.ln()
        }
        Alpha::Finite(a) => {
            let mut acc = 0.0;
            for (&pi, &qi) in p.iter().zip(q) {
                if pi == 0.0 {
                    continue;
                }
                if qi == 0.0 {
                    if a > 1.0 {
                        return f64::INFINITY;
                    }
                    continue; // alpha < 1: q^(1-alpha) -> 0
                }
                acc += pi.powf(a) * qi.powf(1.0 - a);
            }
            acc.ln() / (a - 1.0)
        }
    }
}

/// D_alpha between a joint and the product of its marginals,
/// computed atom-wise without label plumbing.
pub fn renyi_divergence_joint_product(j: &JointDist, alpha: Alpha) -> Result<f64> {
    alpha.check()?;
    let q = j.product_of_marginals();
    Ok(renyi_core(j.flat(), q.flat(), alpha))
}

/// f-divergence D_f(P || Q) = sum q f(p/q) with the boundary conventions
/// listed in the module docs.
pub fn f_divergence(p: &FiniteDist, q: &FiniteDist, kind: &FKind) -> Result<f64> {
    check_same_labels(p, q)?;
    kind.validate()?;
    f_core(p.probs(), q.probs(), kind)
}

fn f_core(p: &[f64], q: &[f64], kind: &FKind) -> Result<f64> {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if qi > 0.0 {
            if pi == 0.0 {
                acc += qi * kind.at_zero();
            } else {
                acc += qi * kind.eval(pi / qi);
            }
        } else if pi > 0.0 {
            match kind.slope_at_infinity() {
                Slope::Infinite => return Ok(f64::INFINITY),
                Slope::Finite(s) => acc += pi * s,
            }
        }
    }
    Ok(acc)
}

/// f-mutual information: the f-divergence of the joint from the product of
/// its marginals.
pub fn f_mutual_information(j: &JointDist, kind: &FKind) -> Result<f64> {
    kind.validate()?;
    let q = j.product_of_marginals();
    f_core(j.flat(), q.flat(), kind)
}

/// Shannon mutual information in nats.
pub fn shannon_mi(j: &JointDist) -> f64 {
    let px = j.marginal_x();
    let py = j.marginal_y();
    let mut acc = 0.0;
    for x in 0..j.nx() {
        for y in 0..j.ny() {
            let p = j.prob(x, y);
            if p > 0.0 {
                acc += p * (p / (px.prob(x) * py.prob(y))).ln();
            }
        }
    }
    acc
}

/// Sibson mutual information of order alpha, via the closed formulation
///   I_alpha = alpha/(alpha-1) * log sum_y ( sum_x P_X(x) P(y|x)^alpha )^(1/alpha).
/// `One` is Shannon mutual information, `Infinity` is maximal leakage.
/// Clamped below at 0 (the measure is non-negative; tiny negatives are
/// floating-point noise on independent joints).
pub fn sibson_mi(j: &JointDist, alpha: Alpha) -> Result<f64> {
    alpha.check()?;
    match alpha {
        Alpha::One => Ok(shannon_mi(j).max(0.0)),
        Alpha::Infinity => maximal_leakage(j),
        Alpha::Finite(a) => {
            let px = j.marginal_x_raw();
            let mut outer = 0.0;
            for y in 0..j.ny() {
                let mut inner = 0.0;
                for x in 0..j.nx() {
                    if px[x] > 0.0 {
                        let cond = j.prob(x, y) / px[x];
                        if cond > 0.0 {
                            inner += px[x] * cond.powf(a);
                        }
                    }
                }
                if inner > 0.0 {
                    outer += inner.powf(1.0 / a);
                }
            }
            Ok((a / (a - 1.0) * outer.ln()).max(0.0))
        }
    }
}

/// Maximal leakage of a joint: log sum_y max_{x: P_X(x)>0} P(y|x).
pub fn maximal_leakage(j: &JointDist) -> Result<f64> {
    let px = j.marginal_x_raw();
    let support: Vec<usize> = (0..j.nx()).filter(|&x| px[x] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::NoSupport);
    }
    let mut sum = 0.0;
    for y in 0..j.ny() {
        let mut best = 0.0_f64;
        for &x in &support {
            best = best.max(j.prob(x, y) / px[x]);
        }
        sum += best;
    }
    Ok(sum.ln().max(0.0))
}

/// Maximal leakage of a channel, all inputs in support.
pub fn maximal_leakage_channel(c: &Channel) -> f64 {
    let all: Vec<usize> = (0..c.nx()).collect();
    maximal_leakage_channel_with_support(c, &all).expect("non-empty support")
}

/// Maximal leakage of a channel restricted to the given input support.
pub fn maximal_leakage_channel_with_support(c: &Channel, support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::NoSupport);
    }
    let mut sum = 0.0;
    for y in 0..c.ny() {
        let mut best = 0.0_f64;
        for &x in support {
            best = best.max(c.prob(x, y));
        }
        sum += best;
    }
    Ok(sum.ln().max(0.0))
}

/// Pre-multiplied form of the channel leakage: sum_y max_x P(y|x), without
/// the log. Used where log/exp round trips would spoil exact equalities.
pub(crate) fn leakage_sum_from_joint(j: &JointDist) -> Result<f64> {
    let px = j.marginal_x_raw();
    let support: Vec<usize> = (0..j.nx()).filter(|&x| px[x] > 0.0).collect();
    if support.is_empty() {
        return Err(Error::NoSupport);
    }
    let mut sum = 0.0;
    for y in 0..j.ny() {
        let mut best = 0.0_f64;
        for &x in &support {
            best = best.max(j.prob(x, y) / px[x]);
        }
        sum += best;
    }
    Ok(sum)
}

/// Conditional maximal leakage
///   log max_{z in supp} sum_y max_{x: P_{X|Z}(x|z)>0} P_{Y|XZ}(y|x,z).
/// `slices[z][x]` is the conditional output distribution given (x, z);
/// `support_x_given_z[z]` lists the x with positive conditional mass.
pub fn conditional_maximal_leakage(
    slices: &[Vec<FiniteDist>],
    support_x_given_z: &[Vec<usize>],
    support_z: &[usize],
) -> Result<f64> {
    if support_z.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut best = f64::NEG_INFINITY;
    for &z in support_z {
        let slice = slices
            .get(z)
            .ok_or_else(|| Error::InvalidParameter(format!("no slice for z={z}")))?;
        let sup_x = support_x_given_z
            .get(z)
            .ok_or_else(|| Error::InvalidParameter(format!("no x-support for z={z}")))?;
        if sup_x.is_empty() {
            return Err(Error::EmptySupport);
        }
        let ny = slice
            .first()
            .map(FiniteDist::len)
            .ok_or(Error::EmptySupport)?;
        let mut sum = 0.0;
        for y in 0..ny {
            let mut m = 0.0_f64;
            for &x in sup_x {
                m = m.max(slice[x].prob(y));
            }
            sum += m;
        }
        best = best.max(sum);
    }
    Ok(best.ln().max(0.0))
}

/// Max-information: log of the supremal joint/product atom ratio,
/// i.e. the order-infinity Renyi divergence between joint and product.
pub fn max_information(j: &JointDist) -> f64 {
    renyi_core(j.flat(), j.product_of_marginals().flat(), Alpha::Infinity)
}

/// beta-approximate max-information
///   log sup_{O : P(O) > beta} (P(O) - beta) / Q(O)
/// computed by the prefix sweep over ratio-sorted atoms (ratio descending,
/// q-null atoms with mass first, ties broken by larger p). Near-maximal
/// prefixes are re-summed in ascending atom order, so the result is
/// bit-identical to a direct subset enumeration that maximizes over the
/// same sets. Returns `NEG_INFINITY` when no set qualifies.
pub fn beta_approx_max_information(j: &JointDist, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0,1), got {beta}"
        )));
    }
    let q_dist = j.product_of_marginals();
    let p_flat = j.flat();
    let q_flat = q_dist.flat();
    let ratio = |i: usize| -> f64 {
        if q_flat[i] > 0.0 {
            p_flat[i] / q_flat[i]
        } else if p_flat[i] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let mut order: Vec<usize> = (0..p_flat.len()).collect();
    order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)).then(p_flat[b].total_cmp(&p_flat[a])));

    let mut cp = 0.0;
    let mut cq = 0.0;
    let mut running = Vec::with_capacity(order.len());
    let mut best_running = f64::NEG_INFINITY;
    for &i in &order {
        cp += p_flat[i];
        cq += q_flat[i];
        let v = if cp > beta {
            if cq == 0.0 {
                return Ok(f64::INFINITY);
            }
            let r = (cp - beta) / cq;
            if r > 0.0 {
                r.ln()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            f64::NEG_INFINITY
        };
        best_running = best_running.max(v);
        running.push(v);
    }
    if best_running == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    // Canonical evaluation of every near-maximal prefix: running sums and
    // index-ordered sums differ by rounding only, so the true maximizer is
    // always inside the window.
    let mut best = f64::NEG_INFINITY;
    for (k, &v) in running.iter().enumerate() {
        if v >= best_running - 1e-9 {
            let mut idx: Vec<usize> = order[..=k].to_vec();
            idx.sort_unstable();
            let (mut sp, mut sq) = (0.0, 0.0);
            for i in idx {
                sp += p_flat[i];
                sq += q_flat[i];
            }
            best = best.max(((sp - beta) / sq).ln());
        }
    }
    Ok(best)
}
