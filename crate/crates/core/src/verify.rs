//! Randomized verification harness for the dimension bound, the
//! characterization of the equality case, and the decomposition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instance::{IffReport, LinearInstance, TorsionCheck, ValidInstance};
use crate::random::{random_graph_instance, random_linear_instance};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 7,
            count: 500,
            max_dim: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Linear,
    Graph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub index: usize,
    pub kind: InstanceKind,
    pub reason: String,
    pub instance: LinearInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
    pub linear_instances: usize,
    pub graph_instances: usize,
    pub equality_cases: usize,
    pub condition_i_cases: usize,
    pub decompositions: usize,
    pub violations: usize,
    pub first_failure: Option<Failure>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Independent stream for instance `index`.
fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn generate(
    seed: u64,
    index: usize,
    max_dim: usize,
) -> (InstanceKind, LinearInstance, ChaCha8Rng) {
    let mut rng = instance_rng(seed, index);
    if index % 4 == 3 {
        let inst = random_graph_instance(&mut rng, max_dim);
        (InstanceKind::Graph, inst, rng)
    } else {
        let inst = random_linear_instance(&mut rng, max_dim);
        (InstanceKind::Linear, inst, rng)
    }
}

fn random_combination<R: Rng>(rng: &mut R, basis: &[Vec<Rat>], len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for b in basis {
        let c = Rat::new(rng.gen_range(-5..=5), rng.gen_range(1..=3));
        for (o, x) in out.iter_mut().zip(b) {
            *o += &c * x;
        }
    }
    out
}

#[derive(Debug, Default)]
struct Tally {
    equality: bool,
    condition_i: bool,
    decomposed: bool,
}

/// Runs every check on one instance; `Err` carries the first violated
/// property.
fn check_instance<R: Rng>(
    inst: &LinearInstance,
    rng: &mut R,
    condition_ii: &dyn Fn(&ValidInstance) -> bool,
) -> Result<Tally, String> {
    let valid = inst
        .clone()
        .into_valid()
        .map_err(|r| format!("generator produced an invalid instance: {r}"))?;
    let iff: IffReport = valid.verify_iff_with(condition_ii);
    if !iff.bound_holds {
        return Err(format!("bound violated: dim {} > md {}", iff.dim, iff.md));
    }
    if !iff.iff_holds {
        return Err(format!(
            "iff violated: dim {} md {} (i) {} (ii) {}",
            iff.dim, iff.md, iff.condition_i, iff.condition_ii
        ));
    }
    let mut tally = Tally {
        equality: iff.dim == iff.md,
        condition_i: iff.condition_i,
        decomposed: false,
    };
    if !iff.condition_i {
        return Ok(tally);
    }
    if valid.check_commutation() != Ok(true) {
        return Err("generators do not commute on Ũ".into());
    }
    if let Ok(TorsionCheck::Checked { holds: false, .. }) = valid.check_torsion_trivial() {
        return Err("finite-order generator moves Ũ".into());
    }
    let basis = valid.kernel().basis_vectors();
    let ujk = valid
        .find_ujk(&basis)
        .map_err(|e| format!("find_ujk failed: {e}"))?;
    if ujk.is_some() != iff.condition_ii {
        return Err(format!(
            "find_ujk {} but condition (ii) is {}",
            if ujk.is_some() { "succeeded" } else { "failed" },
            iff.condition_ii
        ));
    }
    let Some(ujk) = ujk else { return Ok(tally) };

    let q = valid.oracle_quotient_dim();
    let w = random_combination(rng, &q.pi_u_invariant.basis_vectors(), inst.dim_w);
    let dec = valid
        .decompose(&w, &ujk, &basis)
        .map_err(|e| format!("decompose failed: {e}"))?;
    let fixed = valid.invariant_subspace_u().basis_vectors();
    for _ in 0..2 {
        let shifted: Vec<Vec<Vec<Rat>>> = ujk
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let s = random_combination(rng, &fixed, inst.dim_u);
                        x.iter().zip(&s).map(|(a, b)| a + b).collect()
                    })
                    .collect()
            })
            .collect();
        let again = valid
            .decompose(&w, &shifted, &basis)
            .map_err(|e| format!("decompose with shifted u_jk failed: {e}"))?;
        if again.coefficients != dec.coefficients {
            return Err("coefficients depend on the choice of u_jk".into());
        }
    }
    tally.decomposed = true;
    Ok(tally)
}

/// Drops generators while the failure persists.
fn minimize(
    inst: &LinearInstance,
    seed: u64,
    index: usize,
    condition_ii: &dyn Fn(&ValidInstance) -> bool,
) -> (LinearInstance, String) {
    let fails = |candidate: &LinearInstance| {
        let mut rng = instance_rng(seed, index);
        check_instance(candidate, &mut rng, condition_ii).err()
    };
    let mut current = inst.clone();
    let mut reason = fails(&current).unwrap_or_default();
    let mut i = 0;
    while i < current.generators.len() {
        let mut smaller = current.clone();
        smaller.generators.remove(i);
        match fails(&smaller) {
            Some(r) => {
                current = smaller;
                reason = r;
            }
            None => i += 1,
        }
    }
    (current, reason)
}

pub fn run(config: VerifyConfig) -> VerifySummary {
    run_with(config, &|v: &ValidInstance| v.check_condition_ii())
}

/// Runs the harness with a substitute condition (ii) check.
pub fn run_with(
    config: VerifyConfig,
    condition_ii: &dyn Fn(&ValidInstance) -> bool,
) -> VerifySummary {
    let mut summary = VerifySummary {
        seed: config.seed,
        count: config.count,
        max_dim: config.max_dim,
        linear_instances: 0,
        graph_instances: 0,
        equality_cases: 0,
        condition_i_cases: 0,
        decompositions: 0,
        violations: 0,
        first_failure: None,
    };
    for index in 0..config.count {
        let (kind, inst, mut rng) = generate(config.seed, index, config.max_dim);
        match kind {
            InstanceKind::Linear => summary.linear_instances += 1,
            InstanceKind::Graph => summary.graph_instances += 1,
        }
        match check_instance(&inst, &mut rng, condition_ii) {
            Ok(t) => {
                summary.equality_cases += usize::from(t.equality);
                summary.condition_i_cases += usize::from(t.condition_i);
                summary.decompositions += usize::from(t.decomposed);
            }
            Err(_) => {
                summary.violations += 1;
                if summary.first_failure.is_none() {
                    let (instance, reason) = minimize(&inst, config.seed, index, condition_ii);
                    summary.first_failure = Some(Failure {
                        index,
                        kind,
                        reason,
                        instance,
                    });
                }
            }
        }
    }
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_passes() {
        let s = run(VerifyConfig {
            seed: 1,
            count: 0,
            max_dim: 6,
        });
        assert!(s.passed());
        assert_eq!(s.linear_instances + s.graph_instances, 0);
    }

    #[test]
    fn small_run_passes_and_hits_both_outcomes() {
        let s = run(VerifyConfig {
            seed: 3,
            count: 80,
            max_dim: 5,
        });
        assert!(s.passed(), "{:?}", s.first_failure);
        assert!(s.equality_cases > 0);
        assert!(s.decompositions > 0);
    }

    #[test]
    fn inverted_condition_is_caught() {
        let s = run_with(
            VerifyConfig {
                seed: 7,
                count: 40,
                max_dim: 4,
            },
            &|v: &ValidInstance| !v.check_condition_ii(),
        );
        assert!(s.violations > 0);
        let f = s.first_failure.unwrap();
        assert!(
            f.reason.contains("iff") || f.reason.contains("find_ujk"),
            "{}",
            f.reason
        );
    }
}
