//! Collective ladder operators `σ± = Σ_i σ±_i` between neighbouring
//! particle-number sectors, and the promoted/new classification of
//! eigenstates.
//!
//! Since `[H, σ±] = 0`, every eigenstate in sector `m` is either the
//! promotion of an eigenstate of sector `m − 1` or annihilated by `σ−`. On an
//! eigenstate `σ+σ−` has an integer eigenvalue: zero for new states and at
//! least two for promoted ones.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::SectorBasis;
use crate::entanglement::DefiniteParticleState;
use crate::error::{Error, Result};
use crate::spectrum::{symmetric_eigen, Spectrum};
use crate::Real;

/// Index table for `σ+` from sector `m` (source) to `m + 1` (target): row `k`
/// lists, for each occupied site `b` of target state `k` in ascending order,
/// the source state with `b` removed.
#[derive(Clone, Debug)]
pub struct PromotionMap {
    source: Arc<SectorBasis>,
    target: Arc<SectorBasis>,
    table: Vec<usize>,
}

impl PromotionMap {
    pub fn new(source: Arc<SectorBasis>) -> Result<Self> {
        let target = Arc::new(SectorBasis::new(source.qubits(), source.particles() + 1)?);
        Self::between(source, target)
    }

    pub fn between(source: Arc<SectorBasis>, target: Arc<SectorBasis>) -> Result<Self> {
        if source.qubits() != target.qubits() || target.particles() != source.particles() + 1 {
            return Err(Error::InvalidConfig(format!(
                "no promotion from ({}, {}) to ({}, {})",
                source.qubits(),
                source.particles(),
                target.qubits(),
                target.particles()
            )));
        }
        let stride = target.particles();
        let mut table = Vec::with_capacity(target.dim() * stride);
        for &p in target.states() {
            for b in p.ones() {
                table.push(source.rank_unchecked(p.without_bit(b)));
            }
        }
        Ok(PromotionMap { source, target, table })
    }

    pub fn source(&self) -> &Arc<SectorBasis> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SectorBasis> {
        &self.target
    }

    fn rows(&self) -> std::slice::ChunksExact<'_, usize> {
        self.table.chunks_exact(self.target.particles())
    }

    /// Unnormalized `σ+`: `out(p) = Σ_{b∈p} in(p \ b)`.
    pub fn raise<T: Num + Clone>(&self, source: &[T]) -> Vec<T> {
        assert_eq!(source.len(), self.source.dim(), "source length");
        self.rows()
            .map(|row| row.iter().fold(T::zero(), |acc, &s| acc + source[s].clone()))
            .collect()
    }

    /// Unnormalized `σ−`, the adjoint of [`raise`](Self::raise).
    pub fn lower<T: Num + Clone>(&self, target: &[T]) -> Vec<T> {
        assert_eq!(target.len(), self.target.dim(), "target length");
        let mut out = vec![T::zero(); self.source.dim()];
        for (row, t) in self.rows().zip(target) {
            for &s in row {
                out[s] = out[s].clone() + t.clone();
            }
        }
        out
    }

    /// Normalized promotion of a state into the target sector.
    pub fn promote<T: Real>(&self, state: &DefiniteParticleState<T>) -> Result<DefiniteParticleState<T>> {
        self.check_source(state.basis())?;
        let raised = self.raise(state.coefficients().as_slice());
        DefiniteParticleState::normalized(self.target.clone(), DVector::from_vec(raised))
            .map_err(|_| Error::ZeroVector("state is annihilated by the raising operator"))
    }

    /// Unnormalized lowering of a target-sector state.
    pub fn lower_state<T: Real>(&self, state: &DefiniteParticleState<T>) -> Result<DVector<T>> {
        if **state.basis() != *self.target {
            return Err(Error::DimensionMismatch {
                expected: self.target.dim(),
                found: state.basis().dim(),
            });
        }
        Ok(DVector::from_vec(self.lower(state.coefficients().as_slice())))
    }

    fn check_source(&self, basis: &SectorBasis) -> Result<()> {
        if *basis != *self.source {
            return Err(Error::DimensionMismatch {
                expected: self.source.dim(),
                found: basis.dim(),
            });
        }
        Ok(())
    }

    fn lower_columns<T: Real>(&self, v: &DMatrix<T>) -> DMatrix<T> {
        let cols: Vec<Vec<T>> = (0..v.ncols())
            .into_par_iter()
            .map(|c| self.lower(v.column(c).as_slice()))
            .collect();
        DMatrix::from_fn(self.source.dim(), v.ncols(), |r, c| cols[c][r])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Promoted,
    New,
    Ambiguous,
}

impl Label {
    /// `1` promoted, `0` new, `-1` ambiguous.
    pub fn code(self) -> i8 {
        match self {
            Label::Promoted => 1,
            Label::New => 0,
            Label::Ambiguous => -1,
        }
    }
}

/// Decision rule on the `σ+σ−` expectation value: new below
/// `threshold − band`, promoted above `threshold + band`, ambiguous in
/// between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderTolerance {
    pub threshold: f64,
    pub band: f64,
}

impl Default for LadderTolerance {
    fn default() -> Self {
        LadderTolerance {
            threshold: 0.5,
            band: 0.25,
        }
    }
}

impl LadderTolerance {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.band.is_finite() && self.band >= 0.0 && self.threshold > self.band) {
            return Err(Error::InvalidConfig(format!(
                "ladder tolerance needs 0 <= band < threshold, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn label(&self, ladder_eigenvalue: f64) -> Label {
        if ladder_eigenvalue < self.threshold - self.band {
            Label::New
        } else if ladder_eigenvalue > self.threshold + self.band {
            Label::Promoted
        } else {
            Label::Ambiguous
        }
    }
}

#[derive(Clone, Debug)]
pub struct Classification<T: Real = f64> {
    pub labels: Vec<Label>,
    /// `‖σ− v‖` per eigenstate.
    pub lowering_norms: Vec<T>,
    /// `⟨v|σ+σ−|v⟩` per eigenstate.
    pub ladder_eigenvalues: Vec<T>,
}

impl<T: Real> Classification<T> {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn indices(&self, label: Label) -> Vec<usize> {
        (0..self.labels.len()).filter(|&k| self.labels[k] == label).collect()
    }
}

/// Labels every eigenstate of `spectrum` as promoted or new. Inside each
/// degeneracy group the eigenvectors are first rotated to diagonalize
/// `σ+σ−`, so the stored basis of that eigenspace changes.
pub fn classify<T: Real>(spectrum: &mut Spectrum<T>, tol: LadderTolerance) -> Result<Classification<T>> {
    tol.validate()?;
    let basis = spectrum.basis().clone();
    if basis.particles() == 0 {
        return Err(Error::InvalidConfig("the empty sector has no lowering".into()));
    }
    let down = Arc::new(SectorBasis::new(basis.qubits(), basis.particles() - 1)?);
    let map = PromotionMap::between(down, basis)?;

    let n = spectrum.len();
    let mut ladder = vec![T::zero(); n];
    let groups: Vec<Range<usize>> = spectrum.degeneracy_groups().to_vec();
    for g in &groups {
        let v = spectrum.eigenvectors().columns(g.start, g.len()).into_owned();
        let w = map.lower_columns(&v);
        if g.len() == 1 {
            ladder[g.start] = w.column(0).norm_squared();
            continue;
        }
        let k = w.transpose() * &w;
        let (vals, rot) = symmetric_eigen(&k)?;
        spectrum.replace_group(g, &(v * rot));
        for (c, idx) in g.clone().enumerate() {
            ladder[idx] = vals[c].max(T::zero());
        }
    }
    let labels = ladder.iter().map(|&e| tol.label(e.to_f64())).collect();
    let lowering_norms = ladder.iter().map(|&e| e.sqrt()).collect();
    Ok(Classification {
        labels,
        lowering_norms,
        ladder_eigenvalues: ladder,
    })
}

/// Statistics of a promoted single-site excitation: pairs not touching the
/// excited site carry concurrence `2/(L−1)`, the others none.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizedPromotion {
    pub positive_fraction: f64,
    pub pair_concurrence: f64,
    pub mean_concurrence: f64,
}

pub fn localized_promotion_bound(qubits: usize) -> Result<LocalizedPromotion> {
    if qubits < 3 {
        return Err(Error::InvalidConfig(format!("need at least 3 qubits, got {qubits}")));
    }
    let l = qubits as f64;
    let positive_fraction = (l - 2.0) / l;
    let pair_concurrence = 2.0 / (l - 1.0);
    Ok(LocalizedPromotion {
        positive_fraction,
        pair_concurrence,
        mean_concurrence: positive_fraction * pair_concurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::couplings::{sample_couplings, CouplingMatrix, CouplingModel};
    use crate::entanglement::{concurrence_summary, DefiniteParticleState};
    use crate::sector::assemble;
    use crate::spectrum::diagonalize;
    use num_rational::Rational64;

    fn basis(l: usize, m: usize) -> Arc<SectorBasis> {
        Arc::new(SectorBasis::new(l, m).unwrap())
    }

    #[test]
    fn raise_and_lower_are_adjoint() {
        let map = PromotionMap::new(basis(7, 2)).unwrap();
        let a: Vec<f64> = (0..map.source().dim()).map(|k| (k as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..map.target().dim()).map(|k| (k as f64 * 0.11).cos()).collect();
        let lhs: f64 = map.raise(&a).iter().zip(&b).map(|(x, y)| x * y).sum();
        let rhs: f64 = a.iter().zip(map.lower(&b)).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn raise_uniform_exactly() {
        // σ+ maps the all-one vector of sector m to (m+1) times the all-one
        // vector of sector m+1
        let map = PromotionMap::new(basis(8, 3)).unwrap();
        let ones = vec![Rational64::from_integer(1); map.source().dim()];
        assert!(map.raise(&ones).iter().all(|&x| x == Rational64::from_integer(4)));
        let down = map.lower(&vec![Rational64::from_integer(1); map.target().dim()]);
        assert!(down.iter().all(|&x| x == Rational64::from_integer(5)));
    }

    #[test]
    fn promotion_commutes_with_hamiltonian() {
        let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, 7, 11).unwrap();
        let h2 = assemble(&j, basis(7, 2)).unwrap();
        let h3 = assemble(&j, basis(7, 3)).unwrap();
        let map = PromotionMap::new(basis(7, 2)).unwrap();
        let v = DVector::from_fn(h2.dim(), |k, _| ((k * 7 + 3) as f64).sin());
        let lhs = DVector::from_vec(map.raise(h2.apply(&v).as_slice()));
        let rhs = h3.apply(&DVector::from_vec(map.raise(v.as_slice())));
        assert!((lhs - rhs).amax() < 1e-11);
    }

    #[test]
    fn sector_counts_and_integer_ladder_values() {
        for (l, m, seed) in [(6, 1, 1), (6, 2, 2), (7, 3, 3), (8, 2, 4), (8, 4, 5)] {
            let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, l, seed).unwrap();
            let mut s = diagonalize(&assemble(&j, basis(l, m)).unwrap()).unwrap();
            let c = classify(&mut s, LadderTolerance::default()).unwrap();
            let promoted = SectorBasis::new(l, m - 1).unwrap().dim();
            assert_eq!(c.count(Label::Promoted), promoted, "L={l} m={m}");
            assert_eq!(c.count(Label::New), s.len() - promoted);
            for &e in &c.ladder_eigenvalues {
                assert!((e - e.round()).abs() < 1e-8);
                assert!(!(1e-8..=2.0 - 1e-8).contains(&e));
            }
        }
    }

    #[test]
    fn degenerate_uniform_couplings_are_separated() {
        // all equal couplings: huge degeneracies, spin multiplets
        let l = 6;
        let pairs: Vec<_> = (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j, 1.0))).collect();
        let j = CouplingMatrix::from_pairs(l, &pairs).unwrap();
        let mut s = diagonalize(&assemble(&j, basis(l, 3)).unwrap()).unwrap();
        assert!(s.degeneracy_groups().iter().any(|g| g.len() > 1));
        let before = s.eigenvalues().to_vec();
        let c = classify(&mut s, LadderTolerance::default()).unwrap();
        assert_eq!(c.count(Label::Promoted), 15);
        assert_eq!(c.count(Label::New), 5);
        assert_eq!(c.count(Label::Ambiguous), 0);
        // still orthonormal eigenvectors of the same eigenvalues
        let h = assemble(&j, basis(l, 3)).unwrap();
        let v = s.eigenvectors();
        assert!((v.transpose() * v - DMatrix::identity(20, 20)).amax() < 1e-10);
        for (k, &e) in before.iter().enumerate() {
            let r = h.apply(&v.column(k).into_owned()) - v.column(k) * e;
            assert!(r.amax() < 1e-10);
        }
    }

    #[test]
    fn one_particle_sector_has_one_promoted_state() {
        let j = sample_couplings::<f64>(CouplingModel::NearestNeighbour, 9, 0).unwrap();
        let mut s = diagonalize(&assemble(&j, basis(9, 1)).unwrap()).unwrap();
        let c = classify(&mut s, LadderTolerance::default()).unwrap();
        let idx = c.indices(Label::Promoted);
        assert_eq!(idx.len(), 1);
        assert!((s.eigenvalues()[idx[0]] - j.coupling_sum()).abs() < 1e-10);
        assert!((c.ladder_eigenvalues[idx[0]] - 9.0).abs() < 1e-9);
    }

    #[test]
    fn localized_promotion_matches_direct_computation() {
        for l in [3usize, 5, 10, 17] {
            let bound = localized_promotion_bound(l).unwrap();
            let map = PromotionMap::new(basis(l, 1)).unwrap();
            let site = DefiniteParticleState::<f64>::basis_state(map.source().clone(), l / 2).unwrap();
            let promoted = map.promote(&site).unwrap();
            let (mean, frac) = concurrence_summary(&promoted);
            assert!((mean - bound.mean_concurrence).abs() < 1e-14);
            assert!((frac - bound.positive_fraction).abs() < 1e-14);
        }
        assert!(localized_promotion_bound(2).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let j = sample_couplings::<f64>(CouplingModel::InfiniteRange, 4, 0).unwrap();
        let mut s = diagonalize(&assemble(&j, basis(4, 0)).unwrap()).unwrap();
        assert!(classify(&mut s, LadderTolerance::default()).is_err());
        let mut s = diagonalize(&assemble(&j, basis(4, 2)).unwrap()).unwrap();
        let bad = LadderTolerance {
            threshold: 0.1,
            band: 0.2,
        };
        assert!(classify(&mut s, bad).is_err());
        assert!(PromotionMap::between(basis(4, 1), basis(4, 3)).is_err());
        assert!(PromotionMap::new(basis(4, 4)).is_err());
        let map = PromotionMap::new(basis(4, 1)).unwrap();
        let wrong = DefiniteParticleState::<f64>::uniform(basis(4, 2));
        assert!(map.promote(&wrong).is_err());
    }

    #[test]
    fn labels_and_codes() {
        let t = LadderTolerance::default();
        assert_eq!(t.label(0.0), Label::New);
        assert_eq!(t.label(0.5), Label::Ambiguous);
        assert_eq!(t.label(2.0), Label::Promoted);
        assert_eq!(Label::Ambiguous.code(), -1);
    }
}
