//! Quick self-check of the numerical invariants at small sizes.
//!
//! The concurrence formula is injectable so a deliberately broken version can
//! be shown to fail the relevant checks.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DVector;

use crate::basis::SectorBasis;
use crate::couplings::{sample_couplings, CouplingModel};
use crate::ensembles::{self, Ensemble, EnsembleKind, EnsembleSpec};
use crate::entanglement::{all_pair_rdms, DefiniteParticleState, PairRdm};
use crate::error::Result;
use crate::fitting::{fit, DataPoint, Family, FitOptions};
use crate::ladder::{classify, Label, LadderTolerance, PromotionMap};
use crate::oracle::{jacobi_eigenvalues, partial_trace_pair, wootters_concurrence_of_state};
use crate::rng;
use crate::sector::{assemble, full_space_hamiltonian, sector_block};
use crate::spectrum::{diagonalize, symmetric_eigen};
use crate::VERSION;

pub type ConcurrenceFn = fn(&PairRdm<f64>) -> f64;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed deviation or a short note.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("spinglass {VERSION} verify (seed {})\n", self.seed);
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        let failed = self.failures().len();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:e} (tol {tol:e})"),
    }
}

fn run(name: &'static str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check {
        name,
        passed: false,
        detail: format!("error: {e}"),
    })
}

const MODELS: [CouplingModel; 3] = [
    CouplingModel::InfiniteRange,
    CouplingModel::NearestNeighbour,
    CouplingModel::PowerLaw { sigma: 1.5 },
];

pub fn run_checks(seed: u64) -> VerifyReport {
    run_checks_with(seed, crate::entanglement::concurrence::<f64>)
}

pub fn run_checks_with(seed: u64, concurrence: ConcurrenceFn) -> VerifyReport {
    let checks = vec![
        run("sector_blocks_match_full_space", || {
            let mut worst = 0.0f64;
            for (k, l) in [4usize, 5, 6].into_iter().enumerate() {
                let j = sample_couplings::<f64>(MODELS[k], l, rng::derive_seed(seed, k as u64))?;
                let full = full_space_hamiltonian(&j)?;
                for m in 0..=l {
                    let basis = Arc::new(SectorBasis::new(l, m)?);
                    let h = assemble(&j, basis.clone())?;
                    worst = worst.max((h.matrix() - sector_block(&full, &basis)).amax());
                }
            }
            Ok(check("sector_blocks_match_full_space", worst, 1e-12))
        }),
        run("all_one_state_is_eigenstate", || {
            let mut worst = 0.0f64;
            for (k, model) in MODELS.iter().enumerate() {
                let j = sample_couplings::<f64>(*model, 9, rng::derive_seed(seed, 10 + k as u64))?;
                for m in 1..=3 {
                    let basis = Arc::new(SectorBasis::new(9, m)?);
                    let h = assemble(&j, basis.clone())?;
                    let u = DefiniteParticleState::<f64>::uniform(basis);
                    let r = h.apply(u.coefficients()) - u.coefficients() * j.coupling_sum();
                    worst = worst.max(r.norm());
                }
            }
            Ok(check("all_one_state_is_eigenstate", worst, 1e-10))
        }),
        run("eigensolver_matches_jacobi", || {
            let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, 7, rng::derive_seed(seed, 20))?;
            let h = assemble(&j, Arc::new(SectorBasis::new(7, 3)?))?;
            let (fast, _) = symmetric_eigen(h.matrix())?;
            let slow = jacobi_eigenvalues(h.matrix());
            let worst = fast.iter().zip(&slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Ok(check("eigensolver_matches_jacobi", worst, 1e-10))
        }),
        run("promotion_preserves_eigenpairs", || {
            let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, 8, rng::derive_seed(seed, 30))?;
            let one = Arc::new(SectorBasis::new(8, 1)?);
            let map = PromotionMap::new(one.clone())?;
            let h1 = assemble(&j, one.clone())?;
            let h2 = assemble(&j, map.target().clone())?;
            let s = diagonalize(&h1)?;
            let mut worst = 0.0f64;
            for k in 0..s.len() {
                let st = DefiniteParticleState::normalized(one.clone(), s.eigenvector(k).into_owned())?;
                let p = map.promote(&st)?;
                let r = h2.apply(p.coefficients()) - p.coefficients() * s.eigenvalues()[k];
                worst = worst.max(r.norm());
            }
            Ok(check("promotion_preserves_eigenpairs", worst, 1e-9))
        }),
        run("ladder_counts", || {
            let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, 8, rng::derive_seed(seed, 40))?;
            let mut s = diagonalize(&assemble(&j, Arc::new(SectorBasis::new(8, 2)?))?)?;
            let c = classify(&mut s, LadderTolerance::default())?;
            let ok = c.count(Label::Promoted) == 8 && c.count(Label::New) == 20;
            Ok(Check {
                name: "ladder_counts",
                passed: ok,
                detail: format!(
                    "promoted {} new {} ambiguous {}",
                    c.count(Label::Promoted),
                    c.count(Label::New),
                    c.count(Label::Ambiguous)
                ),
            })
        }),
        run("concurrence_matches_wootters", || {
            let mut worst = 0.0f64;
            for k in 0..40u64 {
                let l = 4 + (k as usize % 4);
                let m = 1 + (k as usize % 3);
                let basis = Arc::new(SectorBasis::new(l, m)?);
                let raw = rng::standard_normals(&mut rng::sample_stream(seed ^ 0x5eed, k), basis.dim());
                let st = DefiniteParticleState::normalized(basis, DVector::from_vec(raw))?;
                for r in all_pair_rdms(&st) {
                    let rho = partial_trace_pair(&st, r.i, r.j);
                    worst = worst.max((r.to_matrix() - rho).amax());
                    worst = worst.max((concurrence(&r) - wootters_concurrence_of_state(&st, r.i, r.j)).abs());
                }
            }
            Ok(check("concurrence_matches_wootters", worst, 1e-10))
        }),
        run("all_one_concurrence_closed_forms", || {
            let mut worst = 0.0f64;
            for l in 3..=24 {
                for (m, want) in [(1, 2.0 / l as f64), (2, ensembles::all_one_two_particle_concurrence(l))] {
                    let st = DefiniteParticleState::<f64>::uniform(Arc::new(SectorBasis::new(l, m)?));
                    let rdms = all_pair_rdms(&st);
                    let mean = rdms.iter().map(concurrence).sum::<f64>() / rdms.len() as f64;
                    worst = worst.max((mean - want).abs());
                }
            }
            Ok(check("all_one_concurrence_closed_forms", worst, 1e-12))
        }),
        run("promoted_ipr_identity", || {
            let mut worst = 0.0f64;
            for (k, l) in [8usize, 11, 16].into_iter().enumerate() {
                let one = Arc::new(SectorBasis::new(l, 1)?);
                let map = PromotionMap::new(one.clone())?;
                let mut a = rng::standard_normals(&mut rng::sample_stream(seed, 50 + k as u64), l);
                let mean = a.iter().sum::<f64>() / l as f64;
                a.iter_mut().for_each(|x| *x -= mean);
                let st = DefiniteParticleState::normalized(one, DVector::from_vec(a))?;
                let p = map.promote(&st)?;
                let ipr1 = crate::entanglement::inverse_participation_ratio(&st);
                let ipr2 = crate::entanglement::inverse_participation_ratio(&p);
                worst = worst.max((ipr2 - ensembles::promoted_ipr(l, ipr1)).abs());
                if l == 8 {
                    worst = worst.max((ipr2 - 1.0 / 12.0).abs());
                }
            }
            Ok(check("promoted_ipr_identity", worst, 1e-12))
        }),
        run("fit_recovers_generator", || {
            let truth = [0.834, 0.402, 21.891];
            let data: Vec<_> = (8..=40)
                .map(|l| DataPoint::new(l as f64, Family::ExpSaturation.eval(&truth, l as f64)))
                .collect();
            let r = fit(Family::ExpSaturation, &data, &FitOptions::default())?;
            let worst = r.parameters.iter().zip(truth).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Ok(check("fit_recovers_generator", worst, 1e-6))
        }),
        run("ensemble_is_reproducible", || {
            let spec = EnsembleSpec::new(EnsembleKind::RandomPromoted2p, 12, 200, seed);
            let a = Ensemble::new(spec)?.estimate()?;
            let b = Ensemble::new(spec)?.estimate()?;
            Ok(Check {
                name: "ensemble_is_reproducible",
                passed: a == b,
                detail: format!("P(C>0) = {:e}", a[0].mean),
            })
        }),
    ];
    VerifyReport { seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let r = run_checks(1);
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.render(), run_checks(1).render());
    }

    #[test]
    fn broken_concurrence_is_named() {
        fn missing_factor(r: &PairRdm<f64>) -> f64 {
            (r.z.abs() - (r.v * r.y).sqrt()).max(0.0)
        }
        let r = run_checks_with(1, missing_factor);
        assert!(!r.passed());
        assert!(r.failures().contains(&"concurrence_matches_wootters"));
        assert!(r.render().contains("[FAIL] concurrence_matches_wootters"));
    }
}
