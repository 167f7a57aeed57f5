//! Dense Hamiltonian of one definite-particle sector.
//!
//! With `σ_i·σ_j = 2 S_ij − 1` the matrix elements in the bit basis are
//!
//! * diagonal: `Σ_{i<j} J_ij s_i s_j`, `s = +1` up and `−1` down, which equals
//!   `S_J − 2 Σ_{i up, j down} J_ij`;
//! * off-diagonal: `2 J_ij` between states related by exchanging an up spin
//!   at `i` with a down spin at `j`; zero otherwise.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::SectorBasis;
use crate::couplings::CouplingMatrix;
use crate::error::{Error, Result};
use crate::Real;

/// Largest qubit count accepted by [`full_space_hamiltonian`].
pub const FULL_SPACE_MAX_QUBITS: usize = 12;

#[derive(Clone, Debug)]
pub struct SectorMatrix<T: Real = f64> {
    basis: Arc<SectorBasis>,
    hamiltonian: DMatrix<T>,
    coupling_sum: T,
}

pub fn assemble<T: Real>(couplings: &CouplingMatrix<T>, basis: Arc<SectorBasis>) -> Result<SectorMatrix<T>> {
    let l = basis.qubits();
    if couplings.qubits() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            found: couplings.qubits(),
        });
    }
    let dim = basis.dim();
    let s_j = couplings.coupling_sum();
    let two = T::of(2.0);
    let mut h = DMatrix::<T>::zeros(dim, dim);
    let mut up = Vec::with_capacity(l);
    let mut down = Vec::with_capacity(l);
    for k in 0..dim {
        let p = basis.pattern(k);
        up.clear();
        down.clear();
        for s in 0..l {
            if p.bit(s) {
                up.push(s)
            } else {
                down.push(s)
            }
        }
        let mut mixed = T::zero();
        for &i in &up {
            for &j in &down {
                let c = couplings.get(i, j);
                if c == T::zero() {
                    continue;
                }
                mixed += c;
                let partner = basis.rank_unchecked(p.with_swapped(i, j));
                h[(k, partner)] = two * c;
            }
        }
        h[(k, k)] = s_j - two * mixed;
    }
    Ok(SectorMatrix {
        basis,
        hamiltonian: h,
        coupling_sum: s_j,
    })
}

impl<T: Real> SectorMatrix<T> {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// `S_J`, the eigenvalue of the sector's all-one state.
    pub fn coupling_sum(&self) -> T {
        self.coupling_sum
    }

    pub fn apply(&self, v: &DVector<T>) -> DVector<T> {
        &self.hamiltonian * v
    }

    pub fn frobenius_norm(&self) -> T {
        self.hamiltonian.norm()
    }

    /// Dense dump, one matrix row per CSV line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.hamiltonian.row_iter() {
            let line: Vec<String> = row.iter().map(|x| format!("{:e}", x.to_f64())).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.hamiltonian[(k, k)]).collect()
    }

    /// Structurally nonzero entries above the diagonal.
    pub fn offdiagonal_nonzeros(&self) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .flat_map(|r| (r + 1..n).map(move |c| (r, c)))
            .map(|(r, c)| self.hamiltonian[(r, c)])
            .filter(|&x| x != T::zero())
            .collect()
    }
}

/// `Σ_{i<j} J_ij (X_i X_j + Y_i Y_j + Z_i Z_j)` on the full `2^L` space, built
/// from explicit Kronecker products of single-site Pauli matrices. Full index
/// `b` is the bit pattern of the state (qubit 0 least significant).
///
/// `Y` is imaginary; `Y_i Y_j = −A_i A_j` with the real matrix `A = iY`, so the
/// whole construction stays real.
pub fn full_space_hamiltonian<T: Real>(couplings: &CouplingMatrix<T>) -> Result<DMatrix<T>> {
    let l = couplings.qubits();
    if l > FULL_SPACE_MAX_QUBITS {
        return Err(Error::InvalidConfig(format!(
            "full-space construction limited to {FULL_SPACE_MAX_QUBITS} qubits, got {l}"
        )));
    }
    let o = T::zero();
    let e = T::one();
    // single-site ordering (down, up): index = bit value
    let ident = DMatrix::from_row_slice(2, 2, &[e, o, o, e]);
    let x = DMatrix::from_row_slice(2, 2, &[o, e, e, o]);
    let z = DMatrix::from_row_slice(2, 2, &[-e, o, o, e]);
    let a = DMatrix::from_row_slice(2, 2, &[o, -e, e, o]);

    let string = |ops: &[(usize, &DMatrix<T>)]| -> DMatrix<T> {
        // qubit L-1 is the leftmost factor
        let mut acc = DMatrix::from_element(1, 1, T::one());
        for site in (0..l).rev() {
            let op = ops
                .iter()
                .find(|(s, _)| *s == site)
                .map(|(_, m)| *m)
                .unwrap_or(&ident);
            acc = acc.kronecker(op);
        }
        acc
    };

    let size = 1usize << l;
    let mut h = DMatrix::<T>::zeros(size, size);
    for (i, j, c) in couplings.upper_pairs() {
        if c == T::zero() {
            continue;
        }
        let xx = string(&[(i, &x), (j, &x)]);
        let aa = string(&[(i, &a), (j, &a)]);
        let zz = string(&[(i, &z), (j, &z)]);
        h += (xx - aa + zz) * c;
    }
    Ok(h)
}

/// Restriction of a full-space operator to the states of `basis`.
pub fn sector_block<T: Real>(full: &DMatrix<T>, basis: &SectorBasis) -> DMatrix<T> {
    let idx: Vec<usize> = basis
        .states()
        .iter()
        .map(|p| p.to_u128().expect("full-space patterns fit in 128 bits") as usize)
        .collect();
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])])
}
