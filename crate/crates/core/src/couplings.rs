//! Disorder realizations `J_ij` for the infinite-range, nearest-neighbour and
//! power-law decay models.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::Real;

/// Disorder model family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CouplingModel {
    /// `J_ij ~ N(0, 1)` for every pair.
    InfiniteRange,
    /// `J_ij ~ N(0, 1)` on the periodic ring of adjacent pairs, zero elsewhere.
    NearestNeighbour,
    /// `J_ij ~ N(0, 1 / r_ij^sigma)` with `r_ij` the chord distance.
    PowerLaw { sigma: f64 },
}

impl CouplingModel {
    /// Power-law model for a decay exponent; `sigma = +inf` selects the strict
    /// nearest-neighbour model.
    pub fn power_law(sigma: f64) -> Result<Self> {
        if sigma == f64::INFINITY {
            return Ok(CouplingModel::NearestNeighbour);
        }
        let model = CouplingModel::PowerLaw { sigma };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CouplingModel::PowerLaw { sigma } if !(sigma.is_finite() && sigma >= 0.0) => Err(
                Error::InvalidConfig(format!("power-law exponent must be finite and >= 0, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    /// Decay exponent, with `0` for infinite range and `inf` for nearest neighbour.
    pub fn sigma(&self) -> f64 {
        match *self {
            CouplingModel::InfiniteRange => 0.0,
            CouplingModel::NearestNeighbour => f64::INFINITY,
            CouplingModel::PowerLaw { sigma } => sigma,
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            CouplingModel::InfiniteRange => "ir",
            CouplingModel::NearestNeighbour => "nn",
            CouplingModel::PowerLaw { .. } => "pl",
        }
    }
}

impl fmt::Display for CouplingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingModel::InfiniteRange => write!(f, "infinite-range"),
            CouplingModel::NearestNeighbour => write!(f, "nearest-neighbour"),
            CouplingModel::PowerLaw { sigma } => write!(f, "power-law(sigma={sigma})"),
        }
    }
}

/// Chord length between sites `i` and `j` of a ring of `qubits` sites,
/// `(L/π) sin(π|i−j|/L)`. Sites are labelled `1..=L`.
pub fn chord_distance(qubits: usize, i: usize, j: usize) -> Result<f64> {
    for s in [i, j] {
        if s == 0 || s > qubits {
            return Err(Error::QubitOutOfRange {
                index: s,
                qubits,
            });
        }
    }
    if i == j {
        return Err(Error::SameQubit(i));
    }
    let l = qubits as f64;
    let d = i.abs_diff(j) as f64;
    Ok(l / PI * (PI * d / l).sin())
}

/// Symmetric coupling matrix with zero diagonal, tagged with the model and
/// seed that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix<T: Real = f64> {
    model: CouplingModel,
    seed: u64,
    couplings: DMatrix<T>,
}

/// JSON header accompanying a coupling CSV dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingHeader {
    pub model: CouplingModel,
    pub sigma: Option<f64>,
    pub qubits: usize,
    pub seed: u64,
    pub coupling_sum: f64,
}

impl<T: Real> CouplingMatrix<T> {
    /// Wraps an explicit matrix; it must be square, symmetric and zero on the
    /// diagonal.
    pub fn from_matrix(model: CouplingModel, seed: u64, couplings: DMatrix<T>) -> Result<Self> {
        let n = couplings.nrows();
        if n < 2 || couplings.ncols() != n {
            return Err(Error::InvalidCouplings(format!(
                "expected a square matrix with at least 2 sites, got {}x{}",
                n,
                couplings.ncols()
            )));
        }
        for i in 0..n {
            if couplings[(i, i)] != T::zero() {
                return Err(Error::InvalidCouplings(format!("nonzero diagonal at site {i}")));
            }
            for j in 0..i {
                if couplings[(i, j)] != couplings[(j, i)] {
                    return Err(Error::InvalidCouplings(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(CouplingMatrix {
            model,
            seed,
            couplings,
        })
    }

    /// Builds a matrix from `(i, j, J_ij)` triples with 0-based sites.
    pub fn from_pairs(qubits: usize, pairs: &[(usize, usize, T)]) -> Result<Self> {
        let mut m = DMatrix::zeros(qubits, qubits);
        for &(i, j, c) in pairs {
            if i >= qubits || j >= qubits {
                return Err(Error::QubitOutOfRange {
                    index: i.max(j),
                    qubits,
                });
            }
            if i == j {
                return Err(Error::SameQubit(i));
            }
            m[(i, j)] = c;
            m[(j, i)] = c;
        }
        Self::from_matrix(CouplingModel::InfiniteRange, 0, m)
    }

    pub fn qubits(&self) -> usize {
        self.couplings.nrows()
    }

    pub fn model(&self) -> CouplingModel {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.couplings
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.couplings[(i, j)]
    }

    /// `S_J = Σ_{i<j} J_ij`, the eigenvalue of every all-one state.
    pub fn coupling_sum(&self) -> T {
        let n = self.qubits();
        let mut s = T::zero();
        for j in 1..n {
            for i in 0..j {
                s += self.couplings[(i, j)];
            }
        }
        s
    }

    /// Upper-triangle entries `(i, j, J_ij)` with `i < j`, in row-major order.
    pub fn upper_pairs(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.qubits();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.couplings[(i, j)])))
    }

    pub fn nonzero_count(&self) -> usize {
        self.upper_pairs().filter(|&(_, _, c)| c != T::zero()).count()
    }

    /// Rescaled copy `c·J`.
    pub fn scaled(&self, c: T) -> Self {
        CouplingMatrix {
            model: self.model,
            seed: self.seed,
            couplings: &self.couplings * c,
        }
    }

    /// Writes `i,j,J_ij` rows (1-based sites) for every upper-triangle pair.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,j,J_ij")?;
        for (i, j, c) in self.upper_pairs() {
            writeln!(out, "{},{},{:e}", i + 1, j + 1, c.to_f64())?;
        }
        Ok(())
    }

    pub fn header(&self) -> CouplingHeader {
        CouplingHeader {
            model: self.model,
            sigma: match self.model {
                CouplingModel::PowerLaw { sigma } => Some(sigma),
                _ => None,
            },
            qubits: self.qubits(),
            seed: self.seed,
            coupling_sum: self.coupling_sum().to_f64(),
        }
    }
}

/// Draws a disorder realization. Each coupled pair consumes one standard
/// normal from the seeded stream in row-major upper-triangle order, so
/// `PowerLaw { sigma: 0 }` reproduces `InfiniteRange` exactly for the same
/// seed.
pub fn sample_couplings<T: Real>(model: CouplingModel, qubits: usize, seed: u64) -> Result<CouplingMatrix<T>> {
    model.validate()?;
    if qubits < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 qubits, got {qubits}")));
    }
    let mut rng = rng::stream(seed);
    let mut m = DMatrix::<T>::zeros(qubits, qubits);
    let mut put = |i: usize, j: usize, value: f64| {
        m[(i, j)] = T::of(value);
        m[(j, i)] = T::of(value);
    };
    match model {
        CouplingModel::InfiniteRange => {
            for i in 0..qubits {
                for j in i + 1..qubits {
                    put(i, j, rng::standard_normal(&mut rng));
                }
            }
        }
        CouplingModel::NearestNeighbour => {
            let bonds = if qubits == 2 { 1 } else { qubits };
            for i in 0..bonds {
                let j = (i + 1) % qubits;
                put(i.min(j), i.max(j), rng::standard_normal(&mut rng));
            }
        }
        CouplingModel::PowerLaw { sigma } => {
            for i in 0..qubits {
                for j in i + 1..qubits {
                    let r = chord_distance(qubits, i + 1, j + 1)?;
                    let scale = if sigma == 0.0 { 1.0 } else { r.powf(-0.5 * sigma) };
                    put(i, j, rng::standard_normal(&mut rng) * scale);
                }
            }
        }
    }
    CouplingMatrix::from_matrix(model, seed, m)
}

/// A batch of disorder samples sharing a model and a master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderPlan {
    pub model: CouplingModel,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
}

impl DisorderPlan {
    /// Seed of sample `index` at system size `qubits`. Pure in its inputs.
    pub fn sample_seed(&self, qubits: usize, index: usize) -> u64 {
        rng::derive_seed(rng::derive_seed(self.master_seed, qubits as u64), index as u64)
    }

    pub fn realize<T: Real>(&self, qubits: usize, index: usize) -> Result<CouplingMatrix<T>> {
        sample_couplings(self.model, qubits, self.sample_seed(qubits, index))
    }
}
