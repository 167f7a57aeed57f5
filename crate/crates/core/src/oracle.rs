//! Slow, independent reference implementations used to cross-check the fast
//! paths: a cyclic Jacobi eigenvalue solver, reduced density matrices by
//! explicit partial trace over the full `2^L` space, and the general
//! spin-flip concurrence formula for arbitrary two-qubit states.

use nalgebra::{DMatrix, Matrix4};

use crate::entanglement::DefiniteParticleState;

/// Largest `L` the full-space partial trace accepts.
pub const ORACLE_MAX_QUBITS: usize = 20;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    let mut a = m.clone();
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|k| a[(k, k)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Amplitudes of the full `2^L` embedding reshaped as a `4 × 2^(L−2)`
/// matrix: rows are the pair configurations (i up, j up), (i up, j down),
/// (i down, j up), (i down, j down); columns are the remaining qubits.
pub fn pair_amplitudes(state: &DefiniteParticleState<f64>, i: usize, j: usize) -> DMatrix<f64> {
    let l = state.qubits();
    assert!(l <= ORACLE_MAX_QUBITS, "oracle limited to {ORACLE_MAX_QUBITS} qubits");
    assert!(i < l && j < l && i != j);
    let (lo, hi) = (i.min(j), i.max(j));
    let mut psi = DMatrix::zeros(4, 1usize << (l - 2));
    for (k, p) in state.basis().states().iter().enumerate() {
        let s = p.to_u128().expect("narrow pattern") as usize;
        let row = 2 * (1 - ((s >> i) & 1)) + (1 - ((s >> j) & 1));
        // squeeze out bits lo and hi
        let below = s & ((1 << lo) - 1);
        let mid = (s >> (lo + 1)) & ((1 << (hi - lo - 1)) - 1);
        let above = s >> (hi + 1);
        let col = below | (mid << lo) | (above << (hi - 1));
        psi[(row, col)] = state.coefficients()[k];
    }
    psi
}

/// Two-qubit reduced density matrix of `(i, j)` by explicit partial trace,
/// `ρ = Ψ Ψᵀ` with `Ψ` from [`pair_amplitudes`].
pub fn partial_trace_pair(state: &DefiniteParticleState<f64>, i: usize, j: usize) -> Matrix4<f64> {
    let psi = pair_amplitudes(state, i, j);
    let rho = &psi * psi.transpose();
    Matrix4::from_fn(|r, c| rho[(r, c)])
}

#[rustfmt::skip]
fn spin_flip() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
    )
}

fn concurrence_from_lambdas(mut lam: Vec<f64>) -> f64 {
    lam.resize(4.max(lam.len()), 0.0);
    lam.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
}

/// Concurrence of a real symmetric two-qubit density matrix,
/// `max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ` the decreasing eigenvalues of
/// `R = √(√ρ ρ̃ √ρ)` and `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`. For real `ρ`,
/// `√ρ ρ̃ √ρ = A Aᵀ` with the symmetric `A = √ρ (σy⊗σy) √ρ`, so the `λ` are
/// the absolute eigenvalues of `A`.
pub fn wootters_concurrence(rho: &Matrix4<f64>) -> f64 {
    let e = rho.symmetric_eigen();
    let sqrt_vals = e.eigenvalues.map(|x| x.max(0.0).sqrt());
    let sqrt_rho = e.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * e.eigenvectors.transpose();
    let a = sqrt_rho * spin_flip() * sqrt_rho;
    let a = (a + a.transpose()) * 0.5;
    concurrence_from_lambdas(a.symmetric_eigenvalues().iter().map(|x| x.abs()).collect())
}

/// The same formula evaluated from the purification. With `Ψ = U Σ Vᵀ`,
/// `ρ = B Bᵀ` for `B = U Σ`, and the `λ` are the absolute eigenvalues of
/// `Bᵀ (σy⊗σy) B`. Taking `B` from the SVD of the amplitudes avoids the
/// square root of a nearly singular `ρ`, which costs about half the digits
/// whenever the pair state is rank deficient.
pub fn wootters_concurrence_of_state(state: &DefiniteParticleState<f64>, i: usize, j: usize) -> f64 {
    let svd = pair_amplitudes(state, i, j).svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let b = u * DMatrix::from_diagonal(&svd.singular_values);
    let y = DMatrix::from_fn(4, 4, |r, c| spin_flip()[(r, c)]);
    let k = b.transpose() * y * &b;
    let k = (&k + k.transpose()) * 0.5;
    concurrence_from_lambdas(jacobi_eigenvalues(&k).into_iter().map(f64::abs).collect())
}

/// `2 E[(|1 + x₁x₂| − |x₁ + x₂|)₊]` for independent standard normals, by the
/// midpoint rule on `[-8, 8]²` with `n` cells per axis.
pub fn promoted_concurrence_integral(n: usize) -> f64 {
    let half = 8.0;
    let h = 2.0 * half / n as f64;
    let grid: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let x = -half + (k as f64 + 0.5) * h;
            (x, (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt())
        })
        .collect();
    let mut total = 0.0;
    for &(x1, w1) in &grid {
        let mut row = 0.0;
        for &(x2, w2) in &grid {
            let g = (1.0 + x1 * x2).abs() - (x1 + x2).abs();
            if g > 0.0 {
                row += g * w2;
            }
        }
        total += row * w1;
    }
    2.0 * total * h * h
}
