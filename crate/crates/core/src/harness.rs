//! Oracles and experiments: instance generators, brute-force verifiers,
//! tightness constructions, the noisy empirical-risk-minimization
//! experiment, and the bound verification suite.
//!
//! Everything is deterministic: per-instance and per-trial seeds are pure
//! functions of the master seed, parallel work is collected in index order,
//! and aggregates are sums and maxima only, so identical seeds produce
//! byte-identical reports.

use crate::bounds::{
    alpha_div_bound, four_param_bound, hellinger_p_bound, hellinger_sq_bound, ml_bound,
    sibson_bound, FdivGenerator,
};
use crate::dist::{joint_from, Channel, Event, FiniteDist, JointDist};
use crate::error::{Error, Result};
use crate::measures::Alpha;
use crate::mechanisms::{noisy_erm_leakage, polynomial_noise_schedule};
use crate::numeric::derive_seed;
use crate::orlicz::{theorem1_bound, theorem2_bound, OrliczFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Deterministic Dirichlet-style random joint with the requested fraction
/// of structurally zero cells. Identical seeds give bit-identical matrices.
pub fn random_joint(seed: u64, nx: usize, ny: usize, sparsity: f64) -> Result<JointDist> {
    if nx < 1 || ny < 1 {
        return Err(Error::InvalidParameter("alphabet sizes must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidParameter(format!(
            "sparsity must lie in [0,1), got {sparsity}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = nx * ny;
    let mut weights: Vec<f64> = (0..cells)
        .map(|_| {
            let u: f64 = rng.gen::<f64>();
            -(1.0 - u).ln() // Exp(1), the Dirichlet(1,...,1) recipe
        })
        .collect();
    let zeros = (sparsity * cells as f64).floor() as usize;
    if zeros > 0 {
        let mut idx: Vec<usize> = (0..cells).collect();
        for i in 0..zeros {
            let j = rng.gen_range(i..cells);
            idx.swap(i, j);
        }
        for &i in &idx[..zeros] {
            weights[i] = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|x| (0..ny).map(|y| weights[x * ny + y] / total).collect())
        .collect();
    JointDist::new(
        (0..nx).map(|i| format!("x{i}")).collect(),
        (0..ny).map(|i| format!("y{i}")).collect(),
        rows,
    )
}

/// Deterministic random channel with strictly positive rows. Labels are
/// plain indices, matching `FiniteDist::uniform`.
pub fn random_channel(seed: u64, nx: usize, ny: usize) -> Channel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|_| {
            let w: Vec<f64> = (0..ny).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect();
    Channel::new(
        (0..nx).map(|i| i.to_string()).collect(),
        (0..ny).map(|i| i.to_string()).collect(),
        rows,
    )
    .expect("normalized rows")
}

/// Pseudo-random event with roughly the given cell density.
pub fn random_event(seed: u64, nx: usize, ny: usize, density: f64) -> Event {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Event::from_fn(nx, ny, |_, _| rng.gen::<f64>() < density)
}

/// The leakage-bound tightness construction for a channel: pick
/// f(y) in argmax_x P(y|x), put the uniform prior on the image of f, and
/// take the event {(x, y) : x = f(y)}. The leakage bound then meets the
/// event probability with equality.
#[derive(Debug, Clone)]
pub struct TightnessInstance {
    pub prior: FiniteDist,
    pub event: Event,
}

pub fn tightness_instance(c: &Channel) -> TightnessInstance {
    let (nx, ny) = (c.nx(), c.ny());
    let f: Vec<usize> = (0..ny)
        .map(|y| {
            let mut best = 0usize;
            for x in 1..nx {
                if c.prob(x, y) > c.prob(best, y) {
                    best = x;
                }
            }
            best
        })
        .collect();
    let mut image: Vec<usize> = f.clone();
    image.sort_unstable();
    image.dedup();
    let m = image.len() as f64;
    let probs: Vec<f64> = (0..nx)
        .map(|x| if image.contains(&x) { 1.0 / m } else { 0.0 })
        .collect();
    let prior = FiniteDist::new(c.x_labels().to_vec(), probs).expect("uniform on the image");
    let event = Event::from_fn(nx, ny, |x, y| x == f[y]);
    TightnessInstance { prior, event }
}

/// Independent test-only oracle for `event_prob`: direct atom summation.
pub fn brute_force_event_prob(j: &JointDist, e: &Event) -> Result<f64> {
    if j.nx() != e.nx() || j.ny() != e.ny() {
        return Err(Error::ShapeMismatch {
            expected: (j.nx(), j.ny()),
            found: (e.nx(), e.ny()),
        });
    }
    let mut total = 0.0;
    for x in 0..j.nx() {
        for y in 0..j.ny() {
            if e.contains(x, y) {
                total += j.prob(x, y);
            }
        }
    }
    Ok(total)
}

const BETA_BRUTE_FORCE_CAP: usize = 20;

/// Exact beta-approximate max-information by full subset enumeration,
/// capped at 2^20 atoms. Reference oracle for the prefix sweep.
pub fn beta_mi_brute_force(j: &JointDist, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0,1), got {beta}"
        )));
    }
    let atoms = j.nx() * j.ny();
    if atoms > BETA_BRUTE_FORCE_CAP {
        return Err(Error::TooManyAtoms {
            atoms,
            cap: BETA_BRUTE_FORCE_CAP,
        });
    }
    let p = j.flat();
    let q_dist = j.product_of_marginals();
    let q = q_dist.flat();
    let mut best = f64::NEG_INFINITY;
    for mask in 1u64..(1u64 << atoms) {
        let mut sp = 0.0;
        let mut sq = 0.0;
        for (i, (&pv, &qv)) in p.iter().zip(q).enumerate() {
            if mask >> i & 1 == 1 {
                sp += pv;
                sq += qv;
            }
        }
        if sp > beta {
            if sq == 0.0 {
                return Ok(f64::INFINITY);
            }
            let v = (sp - beta) / sq;
            if v > 0.0 {
                best = best.max(v.ln());
            }
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------
// Curated joint builders used across tests and the verification suite.
// ---------------------------------------------------------------------

/// X = Y uniform on `[n]`.
pub fn identity_joint(n: usize) -> JointDist {
    joint_from(&FiniteDist::uniform(n), &Channel::identity(n)).expect("identity coupling")
}

/// Uniform bit through a binary symmetric channel with crossover p.
pub fn dsbs_joint(p: f64) -> Result<JointDist> {
    joint_from(&FiniteDist::uniform(2), &Channel::bsc(p)?)
}

/// Uniform bit through a binary erasure channel with erasure probability a.
pub fn erasure_joint(a: f64) -> Result<JointDist> {
    joint_from(&FiniteDist::uniform(2), &Channel::erasure(a)?)
}

/// Product joint of two explicit marginals.
pub fn independent_joint(px: &FiniteDist, py: &FiniteDist) -> JointDist {
    let rows: Vec<Vec<f64>> = (0..px.len())
        .map(|x| (0..py.len()).map(|y| px.prob(x) * py.prob(y)).collect())
        .collect();
    JointDist::new(px.labels().to_vec(), py.labels().to_vec(), rows).expect("product joint")
}

/// Joint of X and the pair (Y, Z) for a two-step composition: the first
/// step is a channel X -> Y, the second a per-y channel X -> Z.
pub fn two_step_joint(prior: &FiniteDist, a1: &Channel, a2_per_y: &[Channel]) -> Result<JointDist> {
    if a2_per_y.len() != a1.ny() {
        return Err(Error::ShapeMismatch {
            expected: (a1.ny(), 0),
            found: (a2_per_y.len(), 0),
        });
    }
    let nx = a1.nx();
    let ny = a1.ny();
    let nz = a2_per_y[0].ny();
    let mut rows = vec![vec![0.0; ny * nz]; nx];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                rows[x][y * nz + z] = prior.prob(x) * a1.prob(x, y) * a2_per_y[y].prob(x, z);
            }
        }
    }
    let yz_labels: Vec<String> = (0..ny)
        .flat_map(|y| {
            let zl = a2_per_y[0].y_labels().to_vec();
            let yl = a1.y_labels()[y].clone();
            zl.into_iter()
                .map(move |z| format!("{yl}*{z}"))
                .collect::<Vec<_>>()
        })
        .collect();
    JointDist::new(prior.labels().to_vec(), yz_labels, rows)
}

// ---------------------------------------------------------------------
// Noisy empirical-risk-minimization experiment.
// ---------------------------------------------------------------------

/// Configuration of the noisy-ERM experiment. The data space is
/// Z = D x C with atom index z = d * c_size + c; hypothesis i labels point
/// d with digit d of i in base c_size, so hypotheses are distinct whenever
/// c_size^d_size >= hypothesis_count.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub hypothesis_count: usize,
    pub d_size: usize,
    pub c_size: usize,
    /// Distribution over Z = D x C, atom index z = d * c_size + c.
    #[serde(skip)]
    pub data_dist: FiniteDist,
    pub noise_schedule: Vec<f64>,
    pub eta_grid: Vec<f64>,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Uniform data over D x {0,1} (so every hypothesis has true risk 1/2),
    /// the polynomial noise schedule, and the standard eta grid.
    pub fn uniform_binary(n: usize, k: usize, trials: usize, master_seed: u64) -> Self {
        let mut d_size = 1usize;
        while 2usize.pow(d_size as u32) < k {
            d_size += 1;
        }
        let z = d_size * 2;
        Self {
            n,
            trials,
            hypothesis_count: k,
            d_size,
            c_size: 2,
            data_dist: FiniteDist::uniform(z),
            noise_schedule: polynomial_noise_schedule(n as u64, k),
            eta_grid: vec![0.05, 0.1, 0.2],
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.trials < 1 || self.hypothesis_count < 1 {
            return Err(Error::InvalidParameter(
                "n, trials, hypothesis_count must be >= 1".into(),
            ));
        }
        if self.c_size < 2 {
            return Err(Error::InvalidParameter("c_size must be >= 2".into()));
        }
        if self.data_dist.len() != self.d_size * self.c_size {
            return Err(Error::ShapeMismatch {
                expected: (self.d_size * self.c_size, 1),
                found: (self.data_dist.len(), 1),
            });
        }
        if self.noise_schedule.len() != self.hypothesis_count
            || self.noise_schedule.iter().any(|b| !(*b > 0.0))
        {
            return Err(Error::InvalidParameter(
                "noise schedule must list one positive mean per hypothesis".into(),
            ));
        }
        if self.eta_grid.is_empty() || self.eta_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::InvalidParameter("eta grid must lie in (0,1)".into()));
        }
        Ok(())
    }

    /// Hypothesis i's label for point d: digit d of i in base c_size.
    fn hypothesis_label(&self, i: usize, d: usize) -> usize {
        (i / self.c_size.pow(d as u32)) % self.c_size
    }

    /// Exact true risk of each hypothesis under the data distribution.
    fn true_risks(&self) -> Vec<f64> {
        (0..self.hypothesis_count)
            .map(|i| {
                let mut risk = 0.0;
                for z in 0..self.data_dist.len() {
                    let (d, c) = (z / self.c_size, z % self.c_size);
                    if self.hypothesis_label(i, d) != c {
                        risk += self.data_dist.prob(z);
                    }
                }
                risk
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EtaResult {
    pub eta: f64,
    /// Fraction of trials with generalization error >= eta.
    pub empirical_tail: f64,
    /// min(1, 2 exp(sum_i log(1 + 1/b_i) - 2 n eta^2)).
    pub bound: f64,
    /// For the polynomial schedule only: min(1, 2 exp(-n (2 eta^2 - 11/n^{2/3}))).
    pub relaxed_bound: Option<f64>,
    /// Monte-Carlo standard error of the empirical tail.
    pub stderr: f64,
    pub holds: bool,
    /// The clamped bound is 1: the claim is vacuous at this eta.
    pub vacuous: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub schema: String,
    pub n: usize,
    pub trials: usize,
    pub hypothesis_count: usize,
    pub master_seed: u64,
    /// sum_i log(1 + 1/b_i), the selection leakage budget.
    pub leakage_budget: f64,
    pub per_eta: Vec<EtaResult>,
}

/// Runs the experiment: per trial, draw an i.i.d. sample, add exponential
/// noise (inverse CDF from the trial's stream) to each empirical risk, pick
/// the noisy minimizer, and record |true risk - empirical risk| of the
/// selected hypothesis. True risks are computed exactly from the data
/// distribution. Trials run in parallel and are collected in index order.
pub fn noisy_erm_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let true_risks = cfg.true_risks();
    let leakage_budget = noisy_erm_leakage(&cfg.noise_schedule)?;
    let k = cfg.hypothesis_count;

    // cumulative distribution for inverse-CDF sampling
    let mut cdf = Vec::with_capacity(cfg.data_dist.len());
    let mut acc = 0.0;
    for z in 0..cfg.data_dist.len() {
        acc += cfg.data_dist.prob(z);
        cdf.push(acc);
    }

    let gen_errs: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, trial as u64));
            // per-(d,c) sample counts
            let mut counts = vec![0u32; cfg.data_dist.len()];
            for _ in 0..cfg.n {
                let u: f64 = rng.gen();
                let z = cdf.partition_point(|&c| c <= u).min(cfg.data_dist.len() - 1);
                counts[z] += 1;
            }
            // empirical risks from the counts
            let mut emp = vec![0u32; k];
            for z in 0..cfg.data_dist.len() {
                if counts[z] == 0 {
                    continue;
                }
                let (d, c) = (z / cfg.c_size, z % cfg.c_size);
                for (i, e) in emp.iter_mut().enumerate() {
                    if cfg.hypothesis_label(i, d) != c {
                        *e += counts[z];
                    }
                }
            }
            // noisy selection
            let mut best = 0usize;
            let mut best_score = f64::INFINITY;
            for i in 0..k {
                let u: f64 = rng.gen();
                let noise = -cfg.noise_schedule[i] * (1.0 - u).ln();
                let score = emp[i] as f64 / cfg.n as f64 + noise;
                if score < best_score {
                    best_score = score;
                    best = i;
                }
            }
            (true_risks[best] - emp[best] as f64 / cfg.n as f64).abs()
        })
        .collect();

    let is_polynomial = cfg.noise_schedule == polynomial_noise_schedule(cfg.n as u64, k);
    let per_eta = cfg
        .eta_grid
        .iter()
        .map(|&eta| {
            let hits = gen_errs.iter().filter(|&&g| g >= eta).count();
            let tail = hits as f64 / cfg.trials as f64;
            let raw = 2.0 * (leakage_budget - 2.0 * cfg.n as f64 * eta * eta).exp();
            let bound = raw.min(1.0);
            let relaxed_bound = is_polynomial.then(|| {
                let nf = cfg.n as f64;
                (2.0 * (-nf * (2.0 * eta * eta - 11.0 / nf.powf(2.0 / 3.0))).exp()).min(1.0)
            });
            let stderr = (tail * (1.0 - tail) / cfg.trials as f64).sqrt();
            EtaResult {
                eta,
                empirical_tail: tail,
                bound,
                relaxed_bound,
                stderr,
                holds: tail <= bound + 3.0 * stderr,
                vacuous: bound >= 1.0,
            }
        })
        .collect();

    Ok(ExperimentReport {
        schema: crate::SCHEMA.to_string(),
        n: cfg.n,
        trials: cfg.trials,
        hypothesis_count: k,
        master_seed: cfg.master_seed,
        leakage_budget,
        per_eta,
    })
}

/// Exact joint distribution of (sample, selected hypothesis) for small
/// configurations: the sample space is enumerated (|Z|^n atoms) and the
/// selection probabilities under exponential noise are integrated in closed
/// form piecewise between the score kinks. Useful as a realized-leakage
/// audit and for divergence checks against the Monte-Carlo run.
pub fn exact_noisy_erm_joint(cfg: &ExperimentConfig) -> Result<JointDist> {
    cfg.validate()?;
    let z_count = cfg.data_dist.len();
    let atoms = (z_count as f64).powi(cfg.n as i32);
    if atoms > 65536.0 {
        return Err(Error::TooManyAtoms {
            atoms: atoms as usize,
            cap: 65536,
        });
    }
    let s_count = atoms as usize;
    let k = cfg.hypothesis_count;
    let mut rows = Vec::with_capacity(s_count);
    for s in 0..s_count {
        // decode the sample tuple in base z_count
        let mut p_s = 1.0;
        let mut emp = vec![0u32; k];
        let mut rest = s;
        for _ in 0..cfg.n {
            let z = rest % z_count;
            rest /= z_count;
            p_s *= cfg.data_dist.prob(z);
            let (d, c) = (z / cfg.c_size, z % cfg.c_size);
            for (i, e) in emp.iter_mut().enumerate() {
                if cfg.hypothesis_label(i, d) != c {
                    *e += 1;
                }
            }
        }
        let losses: Vec<f64> = emp.iter().map(|&e| e as f64 / cfg.n as f64).collect();
        let select = exp_argmin_probs(&losses, &cfg.noise_schedule);
        rows.push(select.into_iter().map(|p| p * p_s).collect::<Vec<f64>>());
    }
    JointDist::new(
        (0..s_count).map(|s| format!("s{s}")).collect(),
        (0..k).map(|i| format!("h{i}")).collect(),
        rows,
    )
}

/// P(argmin_i (c_i + N_i) = j) for independent exponential noises N_i with
/// means b_i: piecewise-exact integration between the kinks c_i - c_j.
fn exp_argmin_probs(costs: &[f64], means: &[f64]) -> Vec<f64> {
    let k = costs.len();
    let mut out = vec![0.0; k];
    for j in 0..k {
        // kinks where competitor i's survival switches from 1 to exponential
        let mut kinks: Vec<f64> = (0..k)
            .filter(|&i| i != j)
            .map(|i| costs[i] - costs[j])
            .filter(|&t| t > 0.0)
            .collect();
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        let mut prob = 0.0;
        let mut lo = 0.0;
        let segments = kinks.iter().copied().chain([f64::INFINITY]);
        for hi in segments {
            // active competitors on (lo, hi): those with c_i - c_j <= lo
            let mut rate = 1.0 / means[j];
            let mut shift = 0.0;
            for i in 0..k {
                if i != j {
                    let kink = costs[i] - costs[j];
                    if kink <= lo {
                        rate += 1.0 / means[i];
                        shift += kink / means[i];
                    }
                }
            }
            // integrand: (1/b_j) exp(shift) exp(-t * rate) on (lo, hi)
            let coef = shift.exp() / (means[j] * rate);
            let upper = if hi.is_finite() { (-hi * rate).exp() } else { 0.0 };
            prob += coef * ((-lo * rate).exp() - upper);
            if !hi.is_finite() {
                break;
            }
            lo = hi;
        }
        out[j] = prob;
    }
    out
}

// ---------------------------------------------------------------------
// Bound verification suite.
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct FamilyStats {
    pub checked: u64,
    pub violations: u64,
    pub max_slack: f64,
    pub equality_cases: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub schema: String,
    pub seed: u64,
    pub instances: u64,
    pub curated_instances: u64,
    pub families: BTreeMap<String, FamilyStats>,
    pub total_violations: u64,
}

const EQUALITY_TOL: f64 = 1e-12;

struct Outcome {
    family: &'static str,
    bound: f64,
    exact: f64,
    holds: bool,
}

fn run_families(j: &JointDist, e: &Event) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut push = |family: &'static str, rep: crate::bounds::BoundReport| {
        out.push(Outcome {
            family,
            bound: rep.bound,
            exact: rep.exact_joint_prob,
            holds: rep.holds,
        });
    };

    push("ml", ml_bound(j, e).expect("ml bound"));
    for a in [1.5, 2.0, 4.0] {
        push("sibson", sibson_bound(j, e, Alpha::Finite(a)).expect("sibson"));
        push("alpha_div", alpha_div_bound(j, e, a).expect("alpha_div"));
    }
    push("sibson", sibson_bound(j, e, Alpha::Infinity).expect("sibson inf"));
    for (a, ap) in [(2.0, 2.0), (2.0, 3.0), (1.5, 4.0)] {
        push("four_param", four_param_bound(j, e, a, ap).expect("four_param"));
    }
    for p in [1.5, 2.0, 3.0] {
        push("hellinger_p", hellinger_p_bound(j, e, p).expect("hellinger_p"));
        push(
            "fdiv",
            crate::bounds::fdiv_bound(j, e, &FdivGenerator::hellinger_p(p).unwrap()).expect("fdiv"),
        );
    }
    push(
        "fdiv",
        crate::bounds::fdiv_bound(j, e, &FdivGenerator::squared_hellinger()).expect("fdiv sq"),
    );
    if let Ok(rep) = hellinger_sq_bound(j, e) {
        push("hellinger_sq", rep);
    }
    for psi in ["power:alpha=1.5", "power:alpha=2", "exp-minus-one"] {
        let psi = OrliczFn::from_registry(psi).unwrap();
        push("theorem2", theorem2_bound(j, e, &psi).expect("theorem2"));
    }
    for (phi, psi) in [("power:alpha=2", "power:alpha=2"), ("power:alpha=1.5", "power:alpha=3")] {
        let phi = OrliczFn::from_registry(phi).unwrap();
        let psi = OrliczFn::from_registry(psi).unwrap();
        push("theorem1", theorem1_bound(j, e, &phi, &psi).expect("theorem1"));
    }
    out
}

/// Runs every bound family over seeded random (joint, event) instances plus
/// curated equality cases; zero violations are expected on release suites.
pub fn bound_verification_suite(master_seed: u64, n_instances: usize) -> Result<VerificationReport> {
    if n_instances < 1 {
        return Err(Error::InvalidParameter("n_instances must be >= 1".into()));
    }
    let mut instances: Vec<(JointDist, Event)> = Vec::new();
    for i in 0..n_instances {
        let s = derive_seed(master_seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let nx = rng.gen_range(2..=8);
        let ny = rng.gen_range(2..=8);
        let sparsity = match i % 3 {
            0 => 0.0,
            1 => 0.15,
            _ => 0.3,
        };
        let j = random_joint(derive_seed(s, 1), nx, ny, sparsity)?;
        let e = match i % 5 {
            0 if nx == ny => Event::diagonal(nx),
            1 => Event::full(nx, ny),
            _ => random_event(derive_seed(s, 2), nx, ny, 0.4),
        };
        instances.push((j, e));
    }

    // curated equality cases for the leakage bound
    let mut curated: Vec<(JointDist, Event)> = Vec::new();
    for n in [2usize, 4, 8, 16] {
        curated.push((identity_joint(n), Event::diagonal(n)));
    }
    for p in [0.1, 0.25, 0.4] {
        curated.push((dsbs_joint(p)?, Event::diagonal(2)));
    }
    {
        // independent joint with constant fibers
        let px = FiniteDist::new(
            (0..4).map(|i| format!("x{i}")).collect(),
            vec![0.15, 0.35, 0.3, 0.2],
        )?;
        let py = FiniteDist::new((0..3).map(|i| format!("y{i}")).collect(), vec![0.2, 0.5, 0.3])?;
        curated.push((independent_joint(&px, &py), Event::from_fn(4, 3, |x, _| x < 2)));
    }
    for t in 0..20u64 {
        let c = random_channel(derive_seed(master_seed, 10_000 + t), 4, 5);
        let ti = tightness_instance(&c);
        curated.push((joint_from(&ti.prior, &c)?, ti.event));
    }
    let curated_count = curated.len() as u64;
    instances.extend(curated);

    let per_instance: Vec<Vec<Outcome>> = instances
        .par_iter()
        .map(|(j, e)| run_families(j, e))
        .collect();

    let mut families: BTreeMap<String, FamilyStats> = BTreeMap::new();
    for outcomes in &per_instance {
        for o in outcomes {
            let stats = families.entry(o.family.to_string()).or_default();
            stats.checked += 1;
            if !o.holds {
                stats.violations += 1;
            }
            let slack = o.bound - o.exact;
            if slack > stats.max_slack {
                stats.max_slack = slack;
            }
            if (o.bound - o.exact).abs() <= EQUALITY_TOL {
                stats.equality_cases += 1;
            }
        }
    }
    let total_violations = families.values().map(|s| s.violations).sum();
    Ok(VerificationReport {
        schema: crate::SCHEMA.to_string(),
        seed: master_seed,
        instances: instances.len() as u64,
        curated_instances: curated_count,
        families,
        total_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::CompositionLedger;
    use crate::bounds::HOLDS_SLACK;
    use crate::dist::event_prob;
    use crate::measures::{
        beta_approx_max_information, f_mutual_information, maximal_leakage,
        maximal_leakage_channel_with_support, FKind,
    };

    #[test]
    fn random_joint_is_deterministic_and_valid() {
        let a = random_joint(7, 3, 4, 0.25).unwrap();
        let b = random_joint(7, 3, 4, 0.25).unwrap();
        assert_eq!(a, b);
        let c = random_joint(8, 3, 4, 0.25).unwrap();
        assert_ne!(a, c);
        // sparsity zero keeps full support
        let full = random_joint(7, 2, 2, 0.0).unwrap();
        assert!(full.flat().iter().all(|&p| p > 0.0));
        // requested zero fraction appears
        let sparse = random_joint(3, 4, 5, 0.4).unwrap();
        let zeros = sparse.flat().iter().filter(|&&p| p == 0.0).count();
        assert_eq!(zeros, 8);
    }

    #[test]
    fn tightness_instance_reaches_equality() {
        for (name, c) in [
            ("identity", Channel::identity(5)),
            ("bsc", Channel::bsc(0.25).unwrap()),
            ("constant", Channel::constant(3, 4, 1)),
        ] {
            let ti = tightness_instance(&c);
            let j = joint_from(&ti.prior, &c).unwrap();
            let rep = ml_bound(&j, &ti.event).unwrap();
            assert!(
                (rep.bound - rep.exact_joint_prob).abs() <= 1e-12,
                "{name}: {} vs {}",
                rep.bound,
                rep.exact_joint_prob
            );
        }
        for seed in 0..50u64 {
            let c = random_channel(seed, 4, 6);
            let ti = tightness_instance(&c);
            let j = joint_from(&ti.prior, &c).unwrap();
            let rep = ml_bound(&j, &ti.event).unwrap();
            assert!((rep.bound - rep.exact_joint_prob).abs() <= 1e-12, "seed={seed}");
        }
    }

    #[test]
    fn brute_force_event_prob_agrees() {
        for seed in 0..200u64 {
            let j = random_joint(seed, 3, 4, 0.1).unwrap();
            let e = random_event(seed + 1, 3, 4, 0.5);
            let a = event_prob(&j, &e).unwrap();
            let b = brute_force_event_prob(&j, &e).unwrap();
            assert!((a - b).abs() < 1e-15, "seed={seed}");
        }
        let j = identity_joint(4);
        assert!((brute_force_event_prob(&j, &Event::full(4, 4)).unwrap() - 1.0).abs() < 1e-12);
        assert!((brute_force_event_prob(&j, &Event::diagonal(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beta_brute_force_examples() {
        let j = joint_from(&FiniteDist::bernoulli(0.2).unwrap(), &Channel::identity(2)).unwrap();
        let v = beta_mi_brute_force(&j, 0.1).unwrap();
        assert!((v - 2.5f64.ln()).abs() < 1e-12);
        // cap
        let big = random_joint(1, 5, 5, 0.0).unwrap();
        assert!(matches!(
            beta_mi_brute_force(&big, 0.1),
            Err(Error::TooManyAtoms { .. })
        ));
    }

    #[test]
    fn prefix_sweep_matches_brute_force_exactly() {
        for seed in 0..200u64 {
            let (nx, ny) = match seed % 3 {
                0 => (3, 4),
                1 => (4, 3),
                _ => (2, 6),
            };
            let j = random_joint(derive_seed(99, seed), nx, ny, 0.0).unwrap();
            let beta = [0.05, 0.1, 0.3][(seed % 3) as usize];
            let sweep = beta_approx_max_information(&j, beta).unwrap();
            let brute = beta_mi_brute_force(&j, beta).unwrap();
            assert!(
                sweep.to_bits() == brute.to_bits(),
                "seed={seed} beta={beta}: {sweep} vs {brute}"
            );
        }
    }

    #[test]
    fn erasure_beta_mi_matches_formula_and_brute_force() {
        for a in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            for beta in [0.01, 0.1] {
                let j = erasure_joint(a).unwrap();
                let brute = beta_mi_brute_force(&j, beta).unwrap();
                let formula =
                    (2.0 * ((1.0 - a - beta) / (1.0 - a)).max((1.0 - beta) / (1.0 + a))).ln();
                assert!((brute - formula).abs() < 1e-12, "a={a} beta={beta}");
            }
        }
    }

    #[test]
    fn exp_argmin_probs_sum_to_one() {
        let costs = [0.2, 0.35, 0.1, 0.5];
        let means = [0.3, 0.7, 1.1, 0.5];
        let p = exp_argmin_probs(&costs, &means);
        let total: f64 = p.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
        assert!(p.iter().all(|&v| v > 0.0));
        // equal costs and equal means: symmetric selection
        let p = exp_argmin_probs(&[0.1, 0.1], &[0.5, 0.5]);
        assert!((p[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_joint_matches_monte_carlo_selection() {
        let mut cfg = ExperimentConfig::uniform_binary(4, 3, 40_000, 11);
        cfg.eta_grid = vec![0.25];
        let exact = exact_noisy_erm_joint(&cfg).unwrap();
        // marginal over hypotheses from the exact joint vs a Monte-Carlo run
        let exact_h = exact.marginal_y();
        let mc = {
            let mut counts = vec![0u64; cfg.hypothesis_count];
            for trial in 0..cfg.trials {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, trial as u64));
                let mut cdfv = Vec::new();
                let mut acc = 0.0;
                for z in 0..cfg.data_dist.len() {
                    acc += cfg.data_dist.prob(z);
                    cdfv.push(acc);
                }
                let mut emp = vec![0u32; cfg.hypothesis_count];
                for _ in 0..cfg.n {
                    let u: f64 = rng.gen();
                    let z = cdfv.partition_point(|&c| c <= u).min(cfg.data_dist.len() - 1);
                    let (d, c) = (z / cfg.c_size, z % cfg.c_size);
                    for (i, e) in emp.iter_mut().enumerate() {
                        if cfg.hypothesis_label(i, d) != c {
                            *e += 1;
                        }
                    }
                }
                let mut best = 0usize;
                let mut score = f64::INFINITY;
                for i in 0..cfg.hypothesis_count {
                    let u: f64 = rng.gen();
                    let s = emp[i] as f64 / cfg.n as f64
                        - cfg.noise_schedule[i] * (1.0 - u).ln();
                    if s < score {
                        score = s;
                        best = i;
                    }
                }
                counts[best] += 1;
            }
            counts
        };
        for i in 0..cfg.hypothesis_count {
            let mc_p = mc[i] as f64 / cfg.trials as f64;
            let se = (exact_h.prob(i) * (1.0 - exact_h.prob(i)) / cfg.trials as f64).sqrt();
            assert!(
                (mc_p - exact_h.prob(i)).abs() <= 5.0 * se + 1e-3,
                "h{i}: mc {mc_p} vs exact {}",
                exact_h.prob(i)
            );
        }
    }

    #[test]
    fn exact_joint_respects_selection_leakage_budget() {
        let cfg = ExperimentConfig::uniform_binary(4, 3, 10, 5);
        let exact = exact_noisy_erm_joint(&cfg).unwrap();
        let realized = maximal_leakage(&exact).unwrap();
        let budget = noisy_erm_leakage(&cfg.noise_schedule).unwrap();
        assert!(realized <= budget + 1e-9, "{realized} > {budget}");
    }

    #[test]
    fn hellinger_tail_formula_bounds_the_exact_and_empirical_tails() {
        // small exactly-solvable instance; sigma = 1/2 exponents
        let cfg = ExperimentConfig {
            eta_grid: vec![0.2, 0.3],
            ..ExperimentConfig::uniform_binary(4, 3, 30_000, 23)
        };
        let exact = exact_noisy_erm_joint(&cfg).unwrap();
        let h2 = f_mutual_information(&exact, &FKind::SquaredHellinger).unwrap();
        let h = h2.sqrt();
        let true_risks = cfg.true_risks();
        let report = noisy_erm_experiment(&cfg).unwrap();
        for (idx, &eta) in cfg.eta_grid.iter().enumerate() {
            // the gen-err event over (sample, hypothesis) atoms
            let event = Event::from_fn(exact.nx(), exact.ny(), |s, i| {
                let mut rest = s;
                let mut mism = 0u32;
                for _ in 0..cfg.n {
                    let z = rest % cfg.data_dist.len();
                    rest /= cfg.data_dist.len();
                    let (d, c) = (z / cfg.c_size, z % cfg.c_size);
                    if cfg.hypothesis_label(i, d) != c {
                        mism += 1;
                    }
                }
                (true_risks[i] - mism as f64 / cfg.n as f64).abs() >= eta
            });
            let exact_tail = event_prob(&exact, &event).unwrap();
            let nf = cfg.n as f64;
            let rhs = 2.0 * (-2.0 * nf * eta * eta).exp()
                + h2
                + 2.0f64.powf(1.5) * h * (-nf * eta * eta).exp();
            assert!(
                exact_tail <= rhs + 1e-12,
                "eta={eta}: exact {exact_tail} > {rhs}"
            );
            let r = &report.per_eta[idx];
            assert!(
                r.empirical_tail <= rhs + 3.0 * r.stderr,
                "eta={eta}: empirical {} > {rhs}",
                r.empirical_tail
            );
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = ExperimentConfig::uniform_binary(60, 5, 400, 99);
        let a = noisy_erm_experiment(&cfg).unwrap();
        let b = noisy_erm_experiment(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let mut cfg2 = cfg.clone();
        cfg2.master_seed = 100;
        let c = noisy_erm_experiment(&cfg2).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn single_hypothesis_obeys_hoeffding_envelope() {
        // k = 1: no selection effect; the empirical tail sits under the
        // Hoeffding tail plus the Monte-Carlo cushion
        let mut cfg = ExperimentConfig::uniform_binary(200, 1, 4000, 3);
        cfg.eta_grid = vec![0.05, 0.1];
        let report = noisy_erm_experiment(&cfg).unwrap();
        assert!((report.leakage_budget - (1.0 + 1.0 / cfg.noise_schedule[0]).ln()).abs() < 1e-12);
        for r in &report.per_eta {
            let nf = cfg.n as f64;
            let hoeffding = 2.0 * (-2.0 * nf * r.eta * r.eta).exp();
            assert!(r.empirical_tail <= hoeffding + 3.0 * r.stderr + 1e-12);
        }
    }

    #[test]
    fn verification_suite_small_run_is_clean_and_deterministic() {
        let a = bound_verification_suite(42, 12).unwrap();
        assert_eq!(a.total_violations, 0);
        assert!(a.families.len() >= 8);
        for (name, stats) in &a.families {
            assert!(stats.checked > 0, "{name} unchecked");
            assert!(stats.max_slack >= 0.0);
        }
        assert!(a.families["ml"].equality_cases >= a.curated_instances);
        let b = bound_verification_suite(42, 12).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn ledger_total_never_under_reports_two_step_systems() {
        for seed in 0..100u64 {
            let prior = FiniteDist::uniform(3);
            let a1 = random_channel(seed * 2 + 1, 3, 3);
            let a2: Vec<Channel> = (0..3)
                .map(|y| random_channel(seed * 5 + 31 + y as u64, 3, 2))
                .collect();
            let supp = [0usize, 1, 2];
            let j1 = maximal_leakage_channel_with_support(&a1, &supp).unwrap();
            let j2 = a2
                .iter()
                .map(|c| maximal_leakage_channel_with_support(c, &supp).unwrap())
                .fold(0.0f64, f64::max);
            let ledger = CompositionLedger::new()
                .compose(j1, "a1")
                .unwrap()
                .compose_conditional(j2, "a2")
                .unwrap();
            let realized =
                maximal_leakage(&two_step_joint(&prior, &a1, &a2).unwrap()).unwrap();
            assert!(realized <= ledger.total() + HOLDS_SLACK, "seed={seed}");
        }
    }
}
