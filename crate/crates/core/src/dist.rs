//! Exact finite-alphabet probability objects: distributions, joints,
//! channels, events and their fibers.
//!
//! All values are validated on construction and immutable afterwards.
//! Probability vectors within `NORMALIZATION_TOL` of total mass 1 are
//! renormalized; anything further off is rejected, because the bounds
//! downstream are inequalities that are sensitive to mass leaks.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Absolute tolerance on total probability mass.
pub const NORMALIZATION_TOL: f64 = 1e-12;

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidParameter("empty label set".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel { label: l.clone() });
        }
    }
    Ok(())
}

fn check_mass(probs: &[f64]) -> Result<f64> {
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) {
            return Err(Error::NegativeProbability { index: i, value: p });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(sum)
}

/// A probability vector over labeled outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl FiniteDist {
    /// Validates and renormalizes (inputs within `NORMALIZATION_TOL` only).
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        check_labels(&labels)?;
        if labels.len() != probs.len() {
            return Err(Error::ShapeMismatch {
                expected: (labels.len(), 1),
                found: (probs.len(), 1),
            });
        }
        let sum = check_mass(&probs)?;
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { labels, probs })
    }

    /// Construction that keeps the entries bit-exact (no renormalization).
    /// Mass must already be within tolerance; used where exactness of the
    /// stored entries matters (marginals, products).
    pub(crate) fn from_exact(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        check_labels(&labels)?;
        if labels.len() != probs.len() {
            return Err(Error::ShapeMismatch {
                expected: (labels.len(), 1),
                found: (probs.len(), 1),
            });
        }
        check_mass(&probs)?;
        Ok(Self { labels, probs })
    }

    pub fn uniform(n: usize) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let probs = vec![1.0 / n as f64; n];
        Self { labels, probs }
    }

    /// Two-outcome distribution with `P(1) = p_one`, labels "0", "1".
    pub fn bernoulli(p_one: f64) -> Result<Self> {
        Self::new(
            vec!["0".into(), "1".into()],
            vec![1.0 - p_one, p_one],
        )
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Indices with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }
}

/// Row-major joint probability matrix over X x Y.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    probs: Vec<f64>, // row-major, nx * ny
}

#[derive(Serialize, Deserialize)]
struct JointFile {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    probs: Vec<Vec<f64>>,
}

impl JointDist {
    /// Validates and renormalizes the whole matrix.
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&x_labels)?;
        check_labels(&y_labels)?;
        let (nx, ny) = (x_labels.len(), y_labels.len());
        if rows.len() != nx || rows.iter().any(|r| r.len() != ny) {
            let found = (rows.len(), rows.first().map_or(0, |r| r.len()));
            return Err(Error::ShapeMismatch {
                expected: (nx, ny),
                found,
            });
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let sum = check_mass(&flat)?;
        let probs = flat.into_iter().map(|p| p / sum).collect();
        Ok(Self {
            x_labels,
            y_labels,
            probs,
        })
    }

    /// Bit-exact construction (no renormalization); mass must already be
    /// within tolerance by construction.
    pub(crate) fn from_exact(
        x_labels: Vec<String>,
        y_labels: Vec<String>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        check_labels(&x_labels)?;
        check_labels(&y_labels)?;
        if probs.len() != x_labels.len() * y_labels.len() {
            return Err(Error::ShapeMismatch {
                expected: (x_labels.len(), y_labels.len()),
                found: (probs.len(), 1),
            });
        }
        check_mass(&probs)?;
        Ok(Self {
            x_labels,
            y_labels,
            probs,
        })
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.ny() + y]
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn marginal_x_raw(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        (0..nx)
            .map(|x| (0..ny).map(|y| self.probs[x * ny + y]).sum())
            .collect()
    }

    pub(crate) fn marginal_y_raw(&self) -> Vec<f64> {
        let (nx, ny) = (self.nx(), self.ny());
        (0..ny)
            .map(|y| (0..nx).map(|x| self.probs[x * ny + y]).sum())
            .collect()
    }

    pub fn marginal_x(&self) -> FiniteDist {
        FiniteDist::from_exact(self.x_labels.clone(), self.marginal_x_raw())
            .expect("marginal of a valid joint is valid")
    }

    pub fn marginal_y(&self) -> FiniteDist {
        FiniteDist::from_exact(self.y_labels.clone(), self.marginal_y_raw())
            .expect("marginal of a valid joint is valid")
    }

    /// Joint with entries `P_X(x) * P_Y(y)`, bit-exact products of the
    /// raw marginal sums.
    pub fn product_of_marginals(&self) -> JointDist {
        let px = self.marginal_x_raw();
        let py = self.marginal_y_raw();
        let mut probs = Vec::with_capacity(px.len() * py.len());
        for &a in &px {
            for &b in &py {
                probs.push(a * b);
            }
        }
        JointDist::from_exact(self.x_labels.clone(), self.y_labels.clone(), probs)
            .expect("product of marginals of a valid joint is valid")
    }

    /// Conditional channel P_{Y|X}. Rows with `P_X(x) = 0` have no defined
    /// conditional and are filled with the uniform row; `joint_from` with
    /// the marginal reproduces the joint either way since those rows carry
    /// zero mass.
    pub fn conditional_of(&self) -> Channel {
        let (nx, ny) = (self.nx(), self.ny());
        let px = self.marginal_x_raw();
        let mut rows = Vec::with_capacity(nx);
        for x in 0..nx {
            if px[x] > 0.0 {
                rows.push((0..ny).map(|y| self.prob(x, y) / px[x]).collect());
            } else {
                rows.push(vec![1.0 / ny as f64; ny]);
            }
        }
        Channel::new(self.x_labels.clone(), self.y_labels.clone(), rows)
            .expect("conditional rows of a valid joint are valid")
    }

    /// Radon-Nikodym derivative of the joint w.r.t. the product of the
    /// marginals at one atom; 0 on product-null atoms (where the joint is
    /// null as well).
    pub fn likelihood_ratio(&self, x: usize, y: usize) -> f64 {
        let px = self.marginal_x_raw();
        let py = self.marginal_y_raw();
        let q = px[x] * py[y];
        if q > 0.0 {
            self.prob(x, y) / q
        } else {
            0.0
        }
    }

    /// Push the Y coordinate through a channel Y -> Y'.
    pub fn compose_output(&self, post: &Channel) -> Result<JointDist> {
        if post.x_labels() != self.y_labels() {
            return Err(Error::LabelMismatch {
                context: "post-processing channel input must match the joint's Y alphabet".into(),
            });
        }
        let (nx, ny) = (self.nx(), self.ny());
        let nz = post.ny();
        let mut probs = vec![0.0; nx * nz];
        for x in 0..nx {
            for y in 0..ny {
                let p = self.prob(x, y);
                if p > 0.0 {
                    for z in 0..nz {
                        probs[x * nz + z] += p * post.prob(y, z);
                    }
                }
            }
        }
        JointDist::from_exact(self.x_labels.clone(), post.y_labels().to_vec(), probs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<f64>> = (0..self.nx())
            .map(|x| (0..self.ny()).map(|y| self.prob(x, y)).collect())
            .collect();
        serde_json::json!({
            "x_labels": self.x_labels,
            "y_labels": self.y_labels,
            "probs": rows,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: JointFile = serde_json::from_str(s)
            .map_err(|e| Error::InvalidParameter(format!("joint JSON: {e}")))?;
        JointDist::new(f.x_labels, f.y_labels, f.probs)
    }
}

/// Conditional distribution P_{Y|X}: one probability row over Y per x.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    rows: Vec<f64>, // row-major, nx * ny, every row a valid FiniteDist
}

impl Channel {
    pub fn new(x_labels: Vec<String>, y_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        check_labels(&x_labels)?;
        check_labels(&y_labels)?;
        let (nx, ny) = (x_labels.len(), y_labels.len());
        if rows.len() != nx || rows.iter().any(|r| r.len() != ny) {
            let found = (rows.len(), rows.first().map_or(0, |r| r.len()));
            return Err(Error::ShapeMismatch {
                expected: (nx, ny),
                found,
            });
        }
        let mut flat = Vec::with_capacity(nx * ny);
        for row in rows {
            let sum = check_mass(&row)?;
            flat.extend(row.into_iter().map(|p| p / sum));
        }
        Ok(Self {
            x_labels,
            y_labels,
            rows: flat,
        })
    }

    pub fn identity(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1.0;
        }
        Self {
            x_labels: labels.clone(),
            y_labels: labels,
            rows,
        }
    }

    /// Channel that ignores its input and emits `target` surely.
    pub fn constant(n_in: usize, n_out: usize, target: usize) -> Self {
        let x_labels = (0..n_in).map(|i| i.to_string()).collect();
        let y_labels = (0..n_out).map(|i| i.to_string()).collect();
        let mut rows = vec![0.0; n_in * n_out];
        for x in 0..n_in {
            rows[x * n_out + target] = 1.0;
        }
        Self {
            x_labels,
            y_labels,
            rows,
        }
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        )
    }

    /// Binary erasure channel with erasure probability `a`; outputs 0, 1, e.
    pub fn erasure(a: f64) -> Result<Self> {
        Self::new(
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into(), "e".into()],
            vec![vec![1.0 - a, 0.0, a], vec![0.0, 1.0 - a, a]],
        )
    }

    pub fn nx(&self) -> usize {
        self.x_labels.len()
    }

    pub fn ny(&self) -> usize {
        self.y_labels.len()
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[String] {
        &self.y_labels
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.ny() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.ny()..(x + 1) * self.ny()]
    }

    /// Cascade: `(self; other)[x][z] = sum_y self[x][y] * other[y][z]`.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        if other.x_labels() != self.y_labels() {
            return Err(Error::LabelMismatch {
                context: "cascaded channel input must match the first channel's output".into(),
            });
        }
        let rows = (0..self.nx())
            .map(|x| {
                (0..other.ny())
                    .map(|z| (0..self.ny()).map(|y| self.prob(x, y) * other.prob(y, z)).sum())
                    .collect()
            })
            .collect();
        Channel::new(self.x_labels.clone(), other.y_labels().to_vec(), rows)
    }
}

/// Realizes P_XY(x, y) = prior(x) * channel(y|x). Entries are the bit-exact
/// products; the X marginal equals the prior up to one rounding per row.
pub fn joint_from(prior: &FiniteDist, channel: &Channel) -> Result<JointDist> {
    if prior.labels() != channel.x_labels() {
        return Err(Error::LabelMismatch {
            context: "prior labels must match the channel input alphabet".into(),
        });
    }
    let (nx, ny) = (channel.nx(), channel.ny());
    let mut probs = Vec::with_capacity(nx * ny);
    for x in 0..nx {
        for y in 0..ny {
            probs.push(prior.prob(x) * channel.prob(x, y));
        }
    }
    JointDist::from_exact(
        channel.x_labels().to_vec(),
        channel.y_labels().to_vec(),
        probs,
    )
}

/// Boolean mask over X x Y supporting per-y fibers E_y.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    nx: usize,
    ny: usize,
    mask: Vec<bool>, // row-major
}

#[derive(Serialize, Deserialize)]
struct EventFile {
    pairs: Vec<(usize, usize)>,
}

impl Event {
    pub fn new(nx: usize, ny: usize, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != nx * ny {
            return Err(Error::ShapeMismatch {
                expected: (nx, ny),
                found: (mask.len(), 1),
            });
        }
        Ok(Self { nx, ny, mask })
    }

    pub fn from_pairs(nx: usize, ny: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut mask = vec![false; nx * ny];
        for &(x, y) in pairs {
            if x >= nx || y >= ny {
                return Err(Error::ShapeMismatch {
                    expected: (nx, ny),
                    found: (x, y),
                });
            }
            mask[x * ny + y] = true;
        }
        Ok(Self { nx, ny, mask })
    }

    pub fn from_fn(nx: usize, ny: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = vec![false; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                mask[x * ny + y] = f(x, y);
            }
        }
        Self { nx, ny, mask }
    }

    pub fn full(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            mask: vec![true; nx * ny],
        }
    }

    pub fn empty(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            mask: vec![false; nx * ny],
        }
    }

    pub fn diagonal(n: usize) -> Self {
        Self::from_fn(n, n, |x, y| x == y)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.mask[x * self.ny + y]
    }

    /// The fiber E_y = { x : (x, y) in E }.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        (0..self.nx).filter(|&x| self.contains(x, y)).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.nx {
            for y in 0..self.ny {
                if self.contains(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "pairs": self.pairs() })
    }

    pub fn from_json_str(s: &str, nx: usize, ny: usize) -> Result<Self> {
        let f: EventFile = serde_json::from_str(s)
            .map_err(|e| Error::InvalidParameter(format!("event JSON: {e}")))?;
        Self::from_pairs(nx, ny, &f.pairs)
    }
}

fn check_shapes(j: &JointDist, e: &Event) -> Result<()> {
    if j.nx() != e.nx() || j.ny() != e.ny() {
        return Err(Error::ShapeMismatch {
            expected: (j.nx(), j.ny()),
            found: (e.nx(), e.ny()),
        });
    }
    Ok(())
}

/// P(E) under the joint: the sum over masked atoms, row-major order.
pub fn event_prob(measure: &JointDist, event: &Event) -> Result<f64> {
    check_shapes(measure, event)?;
    let ny = measure.ny();
    let mut total = 0.0;
    for (i, &p) in measure.flat().iter().enumerate() {
        if event.contains(i / ny, i % ny) {
            total += p;
        }
    }
    Ok(total)
}

/// P_X(E_y) for each y.
pub fn fiber_probs(dist_x: &FiniteDist, event: &Event) -> Result<Vec<f64>> {
    if dist_x.len() != event.nx() {
        return Err(Error::ShapeMismatch {
            expected: (dist_x.len(), event.ny()),
            found: (event.nx(), event.ny()),
        });
    }
    Ok((0..event.ny())
        .map(|y| (0..event.nx()).filter(|&x| event.contains(x, y)).map(|x| dist_x.prob(x)).sum())
        .collect())
}

/// Essential supremum over y of P_X(E_y): the max over y with P_Y(y) > 0,
/// exact on finite alphabets.
pub fn esssup_fiber_prob(j: &JointDist, event: &Event) -> Result<f64> {
    check_shapes(j, event)?;
    let px = j.marginal_x_raw();
    let py = j.marginal_y_raw();
    let mut best = 0.0_f64;
    for y in 0..j.ny() {
        if py[y] > 0.0 {
            let f: f64 = (0..j.nx()).filter(|&x| event.contains(x, y)).map(|x| px[x]).sum();
            best = best.max(f);
        }
    }
    Ok(best)
}
