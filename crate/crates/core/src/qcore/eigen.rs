//! Cyclic Jacobi eigenvalue routine for the small Hermitian matrices used here.
//!
//! A Hermitian `n×n` matrix `H = A + iB` is embedded into the real symmetric
//! `2n×2n` matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled. The real symmetric problem is then solved by classic
//! cyclic Jacobi rotations.

use super::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix given as rows, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = a.iter().flatten().map(|v| v * v).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }

        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (upper, lower) = a.split_at_mut(q);
                for (apk, aqk) in upper[p].iter_mut().zip(lower[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending. The anti-Hermitian part is ignored.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.dim();
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            // symmetrize so round-off asymmetry cannot leak in
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            real[i][j] = z.re;
            real[i + n][j + n] = z.re;
            real[i][j + n] = -z.im;
            real[i + n][j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(real);
    doubled
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}
