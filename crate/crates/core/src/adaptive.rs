//! Adaptive data analysis accounting: post-processing robustness, the
//! chain rule, and additive composition of leakage budgets.

use crate::dist::{Channel, JointDist};
use crate::error::{Error, Result};
use crate::measures::maximal_leakage;

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerStep {
    pub name: String,
    pub leakage_bound: f64,
    pub conditional: bool,
}

/// Append-only ledger of declared per-step leakage bounds; the total is
/// their sum. The ledger stores declared budgets, not realized leakages;
/// exact audits on fully specified small systems live in the harness.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompositionLedger {
    steps: Vec<LedgerStep>,
    total: f64,
}

impl CompositionLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns a new ledger with the step appended; the original is
    /// untouched.
    pub fn compose(&self, step_leakage: f64, name: &str) -> Result<Self> {
        self.compose_step(step_leakage, name, false)
    }

    /// As `compose`, for a step whose budget is a conditional leakage given
    /// the previous outputs.
    pub fn compose_conditional(&self, step_leakage: f64, name: &str) -> Result<Self> {
        self.compose_step(step_leakage, name, true)
    }

    fn compose_step(&self, step_leakage: f64, name: &str, conditional: bool) -> Result<Self> {
        if !(step_leakage >= 0.0) {
            return Err(Error::NegativeLeakage(step_leakage));
        }
        let mut next = self.clone();
        next.steps.push(LedgerStep {
            name: name.to_string(),
            leakage_bound: step_leakage,
            conditional,
        });
        next.total += step_leakage;
        Ok(next)
    }

    pub fn steps(&self) -> &[LedgerStep] {
        &self.steps
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Chain rule: L(X -> (Y, Z)) <= L(X -> Y) + L(X -> Z | Y).
pub fn chain_rule_bound(ml_y: f64, cond_ml_z_given_y: f64) -> f64 {
    debug_assert!(ml_y >= 0.0 && cond_ml_z_given_y >= 0.0);
    ml_y + cond_ml_z_given_y
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostprocessCheck {
    pub before: f64,
    pub after: f64,
}

/// Leakage before and after post-processing the output through a channel;
/// post-processing can never increase it.
pub fn postprocess_check(j: &JointDist, post: &Channel) -> Result<PostprocessCheck> {
    let before = maximal_leakage(j)?;
    let after = maximal_leakage(&j.compose_output(post)?)?;
    Ok(PostprocessCheck { before, after })
}

/// Significance level to use after spending the ledger:
/// delta / exp(total).
pub fn budget_significance(ledger: &CompositionLedger, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    Ok(delta / ledger.total().exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{joint_from, FiniteDist};
    use crate::harness::{random_channel, two_step_joint};
    use crate::measures::{maximal_leakage_channel_with_support, conditional_maximal_leakage};

    #[test]
    fn compose_adds_budgets() {
        let ledger = CompositionLedger::new()
            .compose(2.0f64.ln(), "first")
            .unwrap()
            .compose_conditional(3.0f64.ln(), "second")
            .unwrap();
        assert!((ledger.total() - 6.0f64.ln()).abs() < 1e-12);
        assert_eq!(ledger.steps().len(), 2);
        assert!(ledger.steps()[1].conditional);

        let zeros = (0..5).fold(CompositionLedger::new(), |l, i| {
            l.compose(0.0, &format!("s{i}")).unwrap()
        });
        assert_eq!(zeros.total(), 0.0);

        assert!(matches!(
            CompositionLedger::new().compose(-0.1, "bad"),
            Err(Error::NegativeLeakage(_))
        ));
    }

    #[test]
    fn chain_rule_examples() {
        assert!((chain_rule_bound(2.0f64.ln(), 2.0f64.ln()) - 4.0f64.ln()).abs() < 1e-15);
        assert_eq!(chain_rule_bound(0.0, 0.7), 0.7);
    }

    #[test]
    fn chain_rule_holds_on_random_triples() {
        for seed in 0..200u64 {
            let nx = 2 + (seed % 2) as usize;
            let ny = 2 + ((seed / 2) % 2) as usize;
            let nz = 2 + ((seed / 4) % 2) as usize;
            let prior = FiniteDist::uniform(nx);
            let a1 = random_channel(3 * seed + 1, nx, ny);
            let a2: Vec<Channel> = (0..ny)
                .map(|y| random_channel(7 * seed + 100 + y as u64, nx, nz))
                .collect();

            let joint_xy = joint_from(&prior, &a1).unwrap();
            let ml_y = maximal_leakage(&joint_xy).unwrap();

            // conditional leakage of Z given the realized Y
            let py = joint_xy.marginal_y();
            let support_y: Vec<usize> = py.support();
            let slices: Vec<Vec<FiniteDist>> = (0..ny)
                .map(|y| {
                    (0..nx)
                        .map(|x| {
                            FiniteDist::new(
                                (0..nz).map(|k| k.to_string()).collect(),
                                a2[y].row(x).to_vec(),
                            )
                            .unwrap()
                        })
                        .collect()
                })
                .collect();
            let px = joint_xy.marginal_x();
            let support_x: Vec<Vec<usize>> = (0..ny)
                .map(|y| {
                    (0..nx)
                        .filter(|&x| px.prob(x) > 0.0 && joint_xy.prob(x, y) > 0.0)
                        .collect()
                })
                .collect();
            let cond = conditional_maximal_leakage(&slices, &support_x, &support_y).unwrap();

            let joint_xyz = two_step_joint(&prior, &a1, &a2).unwrap();
            let lhs = maximal_leakage(&joint_xyz).unwrap();
            assert!(
                lhs <= chain_rule_bound(ml_y, cond) + 1e-9,
                "seed={seed}: {lhs} > {} + {}",
                ml_y,
                cond
            );
        }
    }

    #[test]
    fn postprocess_examples() {
        let j = joint_from(&FiniteDist::uniform(2), &Channel::bsc(0.25).unwrap()).unwrap();
        let ident = Channel::identity(2);
        let chk = postprocess_check(&j, &ident).unwrap();
        assert!((chk.before - chk.after).abs() < 1e-12);

        let constant = Channel::constant(2, 2, 0);
        let chk = postprocess_check(&j, &constant).unwrap();
        assert!(chk.after.abs() < 1e-12);
    }

    #[test]
    fn postprocess_never_gains_on_random_instances() {
        let dsbs = joint_from(&FiniteDist::uniform(2), &Channel::bsc(0.25).unwrap()).unwrap();
        for seed in 0..1000u64 {
            let post = {
                let c = random_channel(seed, 2, 3);
                Channel::new(
                    dsbs.y_labels().to_vec(),
                    c.y_labels().to_vec(),
                    (0..2).map(|x| c.row(x).to_vec()).collect(),
                )
                .unwrap()
            };
            let chk = postprocess_check(&dsbs, &post).unwrap();
            assert!(chk.after <= chk.before + 1e-9, "seed={seed}");
            assert!(chk.after <= 1.5f64.ln() + 1e-9);
        }
    }

    #[test]
    fn exhaustive_small_systems_respect_ledger_totals() {
        // realized leakage of a two-step composition never exceeds the
        // declared per-step budgets summed
        for seed in 0..300u64 {
            let nx = 2 + (seed % 2) as usize;
            let ny = 2 + ((seed / 3) % 2) as usize;
            let nz = 3;
            let prior = FiniteDist::uniform(nx);
            let a1 = random_channel(seed * 11 + 5, nx, ny);
            let a2: Vec<Channel> = (0..ny)
                .map(|y| random_channel(seed * 13 + 201 + y as u64, nx, nz))
                .collect();
            let supp: Vec<usize> = (0..nx).collect();
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
            let realized = maximal_leakage(&two_step_joint(&prior, &a1, &a2).unwrap()).unwrap();
            assert!(
                realized <= ledger.total() + 1e-9,
                "seed={seed}: {realized} > {}",
                ledger.total()
            );
        }
    }

    #[test]
    fn budget_significance_examples() {
        let empty = CompositionLedger::new();
        assert_eq!(budget_significance(&empty, 0.05).unwrap(), 0.05);
        let l = empty.compose(10.0f64.ln(), "s").unwrap();
        assert!((budget_significance(&l, 0.05).unwrap() - 0.005).abs() < 1e-15);
        // adding any positive step strictly shrinks the budget
        let l2 = l.compose(0.1, "t").unwrap();
        assert!(budget_significance(&l2, 0.05).unwrap() < budget_significance(&l, 0.05).unwrap());
    }
}
