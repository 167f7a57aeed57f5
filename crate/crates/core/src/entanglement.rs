//! Two-spin reduced density matrices, concurrence and participation ratio of
//! definite-particle states.
//!
//! For a state of fixed particle number the reduced density matrix of qubits
//! `(i, j)` in the ordered basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` is
//!
//! ```text
//! ⎡ v 0 0 0 ⎤
//! ⎢ 0 w z 0 ⎥
//! ⎢ 0 z x 0 ⎥
//! ⎣ 0 0 0 y ⎦
//! ```
//!
//! and the concurrence reduces to `C = max(2(|z| − √(v y)), 0)`.

use std::sync::Arc;

use nalgebra::{DVector, Matrix4};
use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::stats::pairwise_sum;
use crate::Real;

/// Normalized real state over a definite-particle basis.
#[derive(Clone, Debug)]
pub struct DefiniteParticleState<T: Real = f64> {
    basis: Arc<SectorBasis>,
    coeffs: DVector<T>,
}

impl<T: Real> DefiniteParticleState<T> {
    /// Wraps coefficients that are already normalized.
    pub fn new(basis: Arc<SectorBasis>, coeffs: DVector<T>) -> Result<Self> {
        check_len(&basis, coeffs.len())?;
        let norm = coeffs.norm();
        if (norm - T::one()).abs() > T::norm_tolerance() {
            return Err(Error::NotNormalized(norm.to_f64()));
        }
        Ok(DefiniteParticleState { basis, coeffs })
    }

    /// Normalizes `coeffs` first.
    pub fn normalized(basis: Arc<SectorBasis>, coeffs: DVector<T>) -> Result<Self> {
        check_len(&basis, coeffs.len())?;
        let norm = coeffs.norm();
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::ZeroVector("cannot normalize"));
        }
        Ok(DefiniteParticleState {
            basis,
            coeffs: coeffs / norm,
        })
    }

    /// The all-one state: equal coefficients on every basis state.
    pub fn uniform(basis: Arc<SectorBasis>) -> Self {
        let n = basis.dim();
        let c = T::one() / T::of_usize(n).sqrt();
        DefiniteParticleState {
            basis,
            coeffs: DVector::from_element(n, c),
        }
    }

    pub fn basis_state(basis: Arc<SectorBasis>, k: usize) -> Result<Self> {
        let n = basis.dim();
        if k >= n {
            return Err(Error::DimensionMismatch { expected: n, found: k });
        }
        let mut coeffs = DVector::zeros(n);
        coeffs[k] = T::one();
        Ok(DefiniteParticleState { basis, coeffs })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &DVector<T> {
        &self.coeffs
    }

    pub fn qubits(&self) -> usize {
        self.basis.qubits()
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }
}

fn check_len(basis: &SectorBasis, len: usize) -> Result<()> {
    if len != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: len,
        });
    }
    Ok(())
}

/// Nonzero elements of a two-spin reduced density matrix. `w` is the
/// population of (`i` up, `j` down) and `x` of (`i` down, `j` up).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairRdm<T: Real = f64> {
    pub i: usize,
    pub j: usize,
    pub v: T,
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> PairRdm<T> {
    pub fn trace(&self) -> T {
        self.v + self.w + self.x + self.y
    }

    pub fn concurrence(&self) -> T {
        concurrence(self)
    }

    pub fn to_matrix(&self) -> Matrix4<T> {
        let o = T::zero();
        Matrix4::new(
            self.v, o, o, o, //
            o, self.w, self.z, o, //
            o, self.z, self.x, o, //
            o, o, o, self.y,
        )
    }
}

/// `C = max(2(|z| − √(v y)), 0)`.
pub fn concurrence<T: Real>(r: &PairRdm<T>) -> T {
    let c = T::of(2.0) * (r.z.abs() - (r.v * r.y).sqrt());
    c.max(T::zero())
}

/// Reduced density matrix of qubits `i` and `j`, accumulated state by state:
/// both-up weight goes to `v`, both-down to `y`, mixed weights to `w`/`x`, and
/// each swap-connected pair of basis states contributes `a_k a_l` to `z` once.
pub fn pair_rdm<T: Real>(state: &DefiniteParticleState<T>, i: usize, j: usize) -> Result<PairRdm<T>> {
    let basis = state.basis();
    basis.check_pair(i, j)?;
    let a = state.coefficients();
    let (mut v, mut w, mut x, mut y, mut z) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for (k, p) in basis.states().iter().enumerate() {
        let ak = a[k];
        let w2 = ak * ak;
        match (p.bit(i), p.bit(j)) {
            (true, true) => v += w2,
            (false, false) => y += w2,
            (true, false) => {
                w += w2;
                for (l, _) in basis.pair_partners(k, i, j)? {
                    z += ak * a[l];
                }
            }
            (false, true) => x += w2,
        }
    }
    Ok(PairRdm { i, j, v, w, x, y, z })
}

/// Index of pair `(i, j)`, `i < j`, in lexicographic pair order.
pub fn pair_index(qubits: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < qubits);
    i * (2 * qubits - i - 1) / 2 + (j - i - 1)
}

/// Every pair RDM in lexicographic `(i, j)` order from a single sweep over
/// the basis.
pub fn all_pair_rdms<T: Real>(state: &DefiniteParticleState<T>) -> Vec<PairRdm<T>> {
    let basis = state.basis();
    let l = basis.qubits();
    let a = state.coefficients();
    let npairs = l * (l.saturating_sub(1)) / 2;
    // Single-site up weights, coherences, and the both-up or both-down pair
    // weight, whichever involves fewer sites. The other one follows by
    // subtraction; accumulating the rarer one keeps structural zeros (v for
    // m = 1, y for m = L − 1) exact, which matters because C takes √(v y).
    let count_down = 2 * basis.particles() > l;
    let mut up1 = vec![T::zero(); l];
    let mut both = vec![T::zero(); npairs];
    let mut coh = vec![T::zero(); npairs];
    let mut ups = Vec::with_capacity(l);
    let mut downs = Vec::with_capacity(l);
    for (k, &p) in basis.states().iter().enumerate() {
        let ak = a[k];
        if ak == T::zero() {
            continue;
        }
        let w2 = ak * ak;
        ups.clear();
        downs.clear();
        for s in 0..l {
            if p.bit(s) {
                ups.push(s)
            } else {
                downs.push(s)
            }
        }
        let same = if count_down { &downs } else { &ups };
        for (t, &i) in same.iter().enumerate() {
            for &j in &same[t + 1..] {
                both[pair_index(l, i, j)] += w2;
            }
        }
        for &i in &ups {
            up1[i] += w2;
            // count each swap-connected pair from the side where the lower
            // qubit is up
            for &j in downs.iter().filter(|&&j| j > i) {
                let partner = basis.rank_unchecked(p.with_swapped(i, j));
                coh[pair_index(l, i, j)] += ak * a[partner];
            }
        }
    }
    let total = a.norm_squared();
    let mut out = Vec::with_capacity(npairs);
    for i in 0..l {
        for j in i + 1..l {
            let q = pair_index(l, i, j);
            let (v, y) = if count_down {
                ((up1[i] + up1[j] - total + both[q]).max(T::zero()), both[q])
            } else {
                (both[q], (total - up1[i] - up1[j] + both[q]).max(T::zero()))
            };
            let w = (up1[i] - v).max(T::zero());
            let x = (up1[j] - v).max(T::zero());
            out.push(PairRdm {
                i,
                j,
                v,
                w,
                x,
                y,
                z: coh[q],
            });
        }
    }
    out
}

pub fn pair_concurrences<T: Real>(state: &DefiniteParticleState<T>) -> Vec<T> {
    all_pair_rdms(state).iter().map(concurrence).collect()
}

/// Mean concurrence over all `C(L, 2)` pairs.
pub fn average_concurrence<T: Real>(state: &DefiniteParticleState<T>) -> T {
    let cs = pair_concurrences(state);
    if cs.is_empty() {
        return T::zero();
    }
    pairwise_sum(&cs) / T::of_usize(cs.len())
}

/// Average concurrence and the fraction of pairs with nonzero concurrence.
pub fn concurrence_summary<T: Real>(state: &DefiniteParticleState<T>) -> (T, T) {
    let cs = pair_concurrences(state);
    if cs.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = T::of_usize(cs.len());
    let positive = cs.iter().filter(|&&c| c > T::zero()).count();
    (pairwise_sum(&cs) / n, T::of_usize(positive) / n)
}

/// `Σ a⁴ / (Σ a²)²`; exact over any numeric field, so it also works on
/// unnormalized or rational coefficient vectors.
pub fn ipr_of<T: Num + Clone>(coeffs: &[T]) -> T {
    let mut s2 = T::zero();
    let mut s4 = T::zero();
    for c in coeffs {
        let sq = c.clone() * c.clone();
        s4 = s4 + sq.clone() * sq.clone();
        s2 = s2 + sq;
    }
    s4 / (s2.clone() * s2)
}

/// Inverse participation ratio `Σ a⁴` in the bit basis.
pub fn inverse_participation_ratio<T: Real>(state: &DefiniteParticleState<T>) -> T {
    let fourth: Vec<T> = state.coefficients().iter().map(|&c| (c * c) * (c * c)).collect();
    pairwise_sum(&fourth)
}

pub fn participation_ratio<T: Real>(state: &DefiniteParticleState<T>) -> T {
    T::one() / inverse_participation_ratio(state)
}

/// One row of a per-eigenstate report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub index: usize,
    pub eigenvalue: Option<f64>,
    pub energy_offset: Option<f64>,
    pub avg_concurrence: f64,
    pub participation_ratio: f64,
    /// `1` promoted, `0` new, `-1` ambiguous; `None` when not classified.
    pub promoted: Option<i8>,
    pub degenerate: bool,
}

impl StateReport {
    pub const CSV_HEADER: &'static str = "index,eigenvalue,E_minus_SJ,avg_concurrence,PR,promoted,degenerate";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        format!(
            "{},{},{},{:e},{:e},{},{}",
            self.index,
            opt(self.eigenvalue),
            opt(self.energy_offset),
            self.avg_concurrence,
            self.participation_ratio,
            self.promoted.map(|p| p.to_string()).unwrap_or_default(),
            u8::from(self.degenerate),
        )
    }
}

/// Average concurrence and PR for every column of `vectors`, in parallel with
/// index-ordered output.
pub fn column_statistics<T: Real>(basis: &Arc<SectorBasis>, vectors: &nalgebra::DMatrix<T>) -> Vec<(T, T)> {
    (0..vectors.ncols())
        .into_par_iter()
        .map(|k| {
            let state = DefiniteParticleState {
                basis: basis.clone(),
                coeffs: vectors.column(k).into_owned(),
            };
            (average_concurrence(&state), participation_ratio(&state))
        })
        .collect()
}
