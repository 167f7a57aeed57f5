//! Random definite-particle states and Monte Carlo estimates of their pair
//! entanglement and localization.
//!
//! Coefficients are i.i.d. standard normals, normalized afterwards, which is
//! the isotropic real ensemble on the unit sphere. Random promoted states are
//! promotions of random one-particle states; the zero-sum constraint of the
//! analytic treatment is off by default and available as a flag.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::basis::SectorBasis;
use crate::entanglement::{
    concurrence, concurrence_summary, inverse_participation_ratio, pair_rdm, DefiniteParticleState,
};
use crate::error::{Error, Result};
use crate::ladder::{localized_promotion_bound, PromotionMap};
use crate::rng;
use crate::stats::{mean_stderr, MeanEstimate};

/// Smallest sample count accepted by [`Ensemble::estimate`].
pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Random1p,
    Random2p,
    RandomPromoted2p,
}

impl EnsembleKind {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Random1p => "random_1p",
            EnsembleKind::Random2p => "random_2p",
            EnsembleKind::RandomPromoted2p => "random_promoted_2p",
        }
    }

    pub fn particles(self) -> usize {
        match self {
            EnsembleKind::Random1p => 1,
            _ => 2,
        }
    }
}

/// Which pairs enter the per-sample concurrence statistics. The ensembles
/// are permutation invariant, so the single pair `(0, 1)` is an unbiased and
/// much cheaper estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairPolicy {
    #[default]
    SinglePair,
    AllPairs,
}

impl PairPolicy {
    pub fn name(self) -> &'static str {
        match self {
            PairPolicy::SinglePair => "single",
            PairPolicy::AllPairs => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub qubits: usize,
    pub samples: usize,
    pub seed: u64,
    pub pairs: PairPolicy,
    /// Project one-particle coefficients onto `Σ a_i = 0` before use.
    #[serde(default)]
    pub zero_sum: bool,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, qubits: usize, samples: usize, seed: u64) -> Self {
        EnsembleSpec {
            kind,
            qubits,
            samples,
            seed,
            pairs: PairPolicy::SinglePair,
            zero_sum: false,
        }
    }

    pub fn with_pairs(mut self, pairs: PairPolicy) -> Self {
        self.pairs = pairs;
        self
    }

    pub fn with_zero_sum(mut self, zero_sum: bool) -> Self {
        self.zero_sum = zero_sum;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let min_qubits = if self.kind == EnsembleKind::Random1p { 2 } else { 3 };
        if self.qubits < min_qubits {
            return Err(Error::InvalidConfig(format!(
                "{} needs at least {min_qubits} qubits, got {}",
                self.kind.name(),
                self.qubits
            )));
        }
        if self.zero_sum && self.kind == EnsembleKind::Random2p {
            return Err(Error::InvalidConfig("zero-sum applies to one-particle coefficients only".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    ProbPositiveC,
    MeanC,
    MeanIpr,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::ProbPositiveC, Quantity::MeanC, Quantity::MeanIpr];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::ProbPositiveC => "prob_positive_c",
            Quantity::MeanC => "mean_c",
            Quantity::MeanIpr => "mean_ipr",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub quantity: Quantity,
    pub qubits: usize,
    pub kind: EnsembleKind,
    pub pairs: PairPolicy,
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl McEstimate {
    pub const CSV_HEADER: &'static str = "L,quantity,estimate,stderr,n_samples,kind,pair_policy";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{},{},{}",
            self.qubits,
            self.quantity,
            self.mean,
            self.stderr,
            self.n_samples,
            self.kind.name(),
            self.pairs.name()
        )
    }
}

/// Per-sample observables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStats {
    /// Fraction of the examined pairs with positive concurrence.
    pub positive: f64,
    pub mean_concurrence: f64,
    pub ipr: f64,
}

/// A validated spec with its bases and promotion table prepared.
#[derive(Clone, Debug)]
pub struct Ensemble {
    spec: EnsembleSpec,
    one: Arc<SectorBasis>,
    target: Arc<SectorBasis>,
    promotion: Option<PromotionMap>,
}

impl Ensemble {
    pub fn new(spec: EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let one = Arc::new(SectorBasis::new(spec.qubits, 1)?);
        let (target, promotion) = match spec.kind {
            EnsembleKind::Random1p => (one.clone(), None),
            EnsembleKind::Random2p => (Arc::new(SectorBasis::new(spec.qubits, 2)?), None),
            EnsembleKind::RandomPromoted2p => {
                let map = PromotionMap::new(one.clone())?;
                (map.target().clone(), Some(map))
            }
        };
        Ok(Ensemble {
            spec,
            one,
            target,
            promotion,
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    /// Sample `index`, a pure function of `(seed, index)`.
    pub fn sample(&self, index: usize) -> DefiniteParticleState<f64> {
        let mut stream = rng::sample_stream(self.spec.seed, index as u64);
        let draw = |n: usize, stream: &mut rng::Stream| {
            let mut a = rng::standard_normals(stream, n);
            if self.spec.zero_sum {
                let mean = a.iter().sum::<f64>() / n as f64;
                a.iter_mut().for_each(|x| *x -= mean);
            }
            DVector::from_vec(a)
        };
        let normalized = |basis: &Arc<SectorBasis>, a| {
            DefiniteParticleState::normalized(basis.clone(), a).expect("gaussian draw is nonzero")
        };
        match self.spec.kind {
            EnsembleKind::Random1p => normalized(&self.one, draw(self.one.dim(), &mut stream)),
            EnsembleKind::Random2p => {
                let a = DVector::from_vec(rng::standard_normals(&mut stream, self.target.dim()));
                normalized(&self.target, a)
            }
            EnsembleKind::RandomPromoted2p => {
                let single = normalized(&self.one, draw(self.one.dim(), &mut stream));
                self.promotion
                    .as_ref()
                    .expect("promotion table")
                    .promote(&single)
                    .expect("a one-particle state cannot be annihilated by promotion")
            }
        }
    }

    pub fn sample_stats(&self, index: usize) -> SampleStats {
        let state = self.sample(index);
        let ipr = inverse_participation_ratio(&state);
        match self.spec.pairs {
            PairPolicy::SinglePair => {
                let c = concurrence(&pair_rdm(&state, 0, 1).expect("valid pair"));
                SampleStats {
                    positive: if c > 0.0 { 1.0 } else { 0.0 },
                    mean_concurrence: c,
                    ipr,
                }
            }
            PairPolicy::AllPairs => {
                let (mean, positive) = concurrence_summary(&state);
                SampleStats {
                    positive,
                    mean_concurrence: mean,
                    ipr,
                }
            }
        }
    }

    /// All three quantities from one pass over the samples.
    pub fn estimate(&self) -> Result<[McEstimate; 3]> {
        if self.spec.samples < MIN_SAMPLES {
            return Err(Error::InvalidConfig(format!(
                "at least {MIN_SAMPLES} samples required, got {}",
                self.spec.samples
            )));
        }
        let stats: Vec<SampleStats> = (0..self.spec.samples)
            .into_par_iter()
            .map(|k| self.sample_stats(k))
            .collect();
        let column = |f: fn(&SampleStats) -> f64| mean_stderr(&stats.iter().map(f).collect::<Vec<_>>());
        let p = column(|s| s.positive);
        let c = column(|s| s.mean_concurrence);
        let i = column(|s| s.ipr);
        Ok([
            self.wrap(Quantity::ProbPositiveC, p),
            self.wrap(Quantity::MeanC, c),
            self.wrap(Quantity::MeanIpr, i),
        ])
    }

    fn wrap(&self, quantity: Quantity, m: MeanEstimate) -> McEstimate {
        McEstimate {
            quantity,
            qubits: self.spec.qubits,
            kind: self.spec.kind,
            pairs: self.spec.pairs,
            mean: m.mean,
            stderr: m.stderr,
            n_samples: m.n,
        }
    }
}

/// Estimate a single quantity.
pub fn estimate(spec: EnsembleSpec, quantity: Quantity) -> Result<McEstimate> {
    let all = Ensemble::new(spec)?.estimate()?;
    Ok(*all.iter().find(|e| e.quantity == quantity).expect("all quantities estimated"))
}

/// `erf²(1/√2) + erfc²(1/√2)`: probability that `(1 − x₁²)(1 − x₂²) > 0` for
/// independent standard normals.
pub fn asymptotic_positive_probability() -> f64 {
    erf(FRAC_1_SQRT_2).powi(2) + erfc(FRAC_1_SQRT_2).powi(2)
}

/// `L⟨C⟩` of random promoted states in the large-`L` limit.
pub const PROMOTED_CONCURRENCE_CONSTANT: f64 = 0.465;

/// Reference values at a given `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub qubits: usize,
    pub prob_positive_promoted: f64,
    pub mean_c_promoted: f64,
    pub mean_c_random_2p: f64,
    pub mean_z2_random_2p: f64,
    pub ipr_random_1p: f64,
    pub ipr_promoted_2p: f64,
    pub all_one_1p: f64,
    pub all_one_2p: f64,
    pub localized_positive_fraction: f64,
    pub localized_mean_c: f64,
}

pub fn closed_forms(qubits: usize) -> Result<ClosedForms> {
    let bound = localized_promotion_bound(qubits)?;
    let l = qubits as f64;
    Ok(ClosedForms {
        qubits,
        prob_positive_promoted: asymptotic_positive_probability(),
        mean_c_promoted: PROMOTED_CONCURRENCE_CONSTANT / l,
        mean_c_random_2p: 16.0 / (l * l * PI.powf(1.5)),
        mean_z2_random_2p: 4.0 / (l * l * l),
        ipr_random_1p: 3.0 / l,
        ipr_promoted_2p: 6.0 / (l * l),
        all_one_1p: 2.0 / l,
        all_one_2p: all_one_two_particle_concurrence(qubits),
        localized_positive_fraction: bound.positive_fraction,
        localized_mean_c: bound.mean_concurrence,
    })
}

/// Pair concurrence of the uniform two-particle state.
pub fn all_one_two_particle_concurrence(qubits: usize) -> f64 {
    let l = qubits as f64;
    let pairs = l * (l - 1.0) / 2.0;
    2.0 / pairs * (l - 2.0 - ((l * l - 5.0 * l + 6.0) / 2.0).sqrt())
}

/// Promoted-state IPR from the one-particle IPR, valid when `Σ a_i = 0`.
pub fn promoted_ipr(qubits: usize, ipr_one: f64) -> f64 {
    let l = qubits as f64;
    ((l - 8.0) * ipr_one + 3.0) / ((l - 2.0) * (l - 2.0))
}

/// Leading-order pair `(0, 1)` elements of a state promoted from a zero-sum
/// one-particle state: both-particle population, coherence and
/// both-empty population.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingOrder {
    pub both_up: f64,
    pub coherence: f64,
    pub both_down: f64,
}

pub fn promoted_leading_order(qubits: usize, a1: f64, a2: f64) -> LeadingOrder {
    let l = qubits as f64;
    LeadingOrder {
        both_up: (a1 + a2).powi(2) / l,
        coherence: (1.0 + l * a1 * a2) / l,
        both_down: 1.0,
    }
}

/// One CSV document of estimates.
pub fn estimates_csv(estimates: &[McEstimate]) -> String {
    let mut out = String::from(McEstimate::CSV_HEADER);
    out.push('\n');
    for e in estimates {
        out.push_str(&e.csv_row());
        out.push('\n');
    }
    out
}
