//! Real symmetric eigensolvers.
//!
//! Ground states of narrow-band matrices go through a banded route: Sylvester
//! inertia counts from an `LDLᵀ` factorisation bracket the lowest eigenvalue,
//! then shifted inverse iteration from just below it converges the vector and
//! a Rayleigh quotient gives the value. Everything else, and every full
//! spectrum, is a dense decomposition.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl EigenPair {
    /// `‖A v − λ v‖₂`.
    pub fn residual(&self, a: &SymmetricMatrix) -> f64 {
        a.mul_vec(&self.vector)
            .iter()
            .zip(&self.vector)
            .map(|(av, v)| (av - self.value * v).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Relative residual target of the iterative route.
const RESIDUAL_TOL: f64 = 1e-10;
/// Accepted distance of the Rayleigh quotient above the certified lower bound
/// when (near-)degenerate levels keep the iterate from certifying.
const ENERGY_TOL: f64 = 1e-10;

fn use_banded(a: &SymmetricMatrix) -> bool {
    4 * (a.capacity() + 1) <= a.dim()
}

/// Lowest eigenvalue and its unit eigenvector, sign-fixed so the first
/// largest-magnitude component is positive.
pub fn ground_state(a: &SymmetricMatrix) -> Result<EigenPair> {
    ground_state_from(a, None)
}

/// [`ground_state`] warm-started from an approximate ground vector, e.g. the
/// solution at a nearby parameter value. The start only affects speed: the
/// result is still certified to be the lowest eigenpair.
pub fn ground_state_from(a: &SymmetricMatrix, start: Option<&[f64]>) -> Result<EigenPair> {
    let mut pair = if use_banded(a) {
        banded_ground_state(a, start)?
    } else {
        dense_ground_state(a)?
    };
    fix_sign(&mut pair.vector);
    Ok(pair)
}

/// Lowest eigenvalue only.
pub fn lowest_eigenvalue(a: &SymmetricMatrix) -> Result<f64> {
    Ok(ground_state(a)?.value)
}

/// All eigenvalues in nondecreasing order.
pub fn full_spectrum(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(dense_eigen(a)?.0)
}

/// Full dense decomposition: ascending eigenvalues and matching columns.
pub fn dense_eigen(a: &SymmetricMatrix) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.dim();
    let max_iter = (10 * n).max(100);
    let eig =
        SymmetricEigen::try_new(a.to_dense(), f64::EPSILON, max_iter).ok_or(Error::Solver {
            dim: n,
            iterations: max_iter,
            residual: f64::NAN,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

fn dense_ground_state(a: &SymmetricMatrix) -> Result<EigenPair> {
    let (values, vectors) = dense_eigen(a)?;
    Ok(EigenPair {
        value: values[0],
        vector: vectors.column(0).iter().copied().collect(),
    })
}

pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-10)) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Banded `LDLᵀ` of `A − σI` without pivoting.
struct BandLdl {
    n: usize,
    b: usize,
    // Strictly-lower band of L once factored, same layout as SymmetricMatrix.
    w: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdl {
    fn new(a: &SymmetricMatrix) -> Self {
        let n = a.dim();
        let b = a.capacity();
        Self {
            n,
            b,
            w: vec![0.0; (b + 1) * n],
            d: vec![0.0; n],
        }
    }

    /// Factorises `A − σI` and returns the number of negative pivots, which by
    /// Sylvester's law is the number of eigenvalues below `σ`.
    fn factor(&mut self, a: &SymmetricMatrix, sigma: f64, pivmin: f64) -> usize {
        let (n, b) = (self.n, self.b);
        for d in 0..=b {
            self.w[d * n..d * n + n - d].copy_from_slice(a.diagonal_band(d));
        }
        let mut negatives = 0;
        for k in 0..n {
            let mut piv = self.w[k] - sigma;
            if piv.abs() < pivmin {
                piv = -pivmin;
            }
            if piv < 0.0 {
                negatives += 1;
            }
            self.d[k] = piv;
            let reach = b.min(n - 1 - k);
            for i in 1..=reach {
                let lik = self.w[i * n + k];
                if lik == 0.0 {
                    continue;
                }
                let f = lik / piv;
                for j in i..=reach {
                    // A[k+j][k+i] -= A[k+i][k] A[k+j][k] / d_k
                    self.w[(j - i) * n + k + i] -= f * self.w[j * n + k];
                }
            }
            for i in 1..=reach {
                self.w[i * n + k] /= piv;
            }
        }
        negatives
    }

    /// Solves `L D Lᵀ x = y` in place using the last factorisation.
    fn solve(&self, y: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for k in 0..n {
            let yk = y[k];
            for i in 1..=b.min(n - 1 - k) {
                y[k + i] -= self.w[i * n + k] * yk;
            }
        }
        for (yk, dk) in y.iter_mut().zip(&self.d) {
            *yk /= dk;
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for i in 1..=b.min(n - 1 - k) {
                s -= self.w[i * n + k] * y[k + i];
            }
            y[k] = s;
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm
}

fn banded_ground_state(a: &SymmetricMatrix, start: Option<&[f64]>) -> Result<EigenPair> {
    let n = a.dim();
    let scale = a.norm_inf().max(1.0);
    let pivmin = f64::MIN_POSITIVE.sqrt() * scale;
    let max_iter = 10 * n;
    let bracket_tol = 1e-7 * scale;
    let mut ldl = BandLdl::new(a);

    let mut v: Vec<f64> = match start {
        Some(s) if s.len() == n && s.iter().any(|x| *x != 0.0) => s.to_vec(),
        _ => generic_vector(n),
    };
    normalize(&mut v);
    let mut av = vec![0.0; n];
    let (mut value, mut residual) = rayleigh(a, &v, &mut av);

    // Invariant: `lo` has been certified (zero negative pivots) to lie below λ₀.
    let (g_lo, g_hi) = a.gershgorin_bounds();
    let mut lo = g_lo - 1e-12 * scale;
    let mut hi = (g_hi + 1e-12 * scale).min(value);
    // Inertia of a shift closer than this to an eigenvalue is not trusted.
    let margin = 8.0 * n as f64 * f64::EPSILON * scale;
    let mut factored_at = f64::NAN;
    let mut previous = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        // Some eigenvalue lies within `residual` of the Rayleigh quotient; if
        // nothing lies below `value − residual`, that eigenvalue is λ₀.
        let candidate = value - residual - margin;
        if candidate > lo && candidate < hi {
            iterations += 1;
            if ldl.factor(a, candidate, pivmin) == 0 {
                lo = candidate;
                factored_at = candidate;
            } else {
                hi = candidate;
            }
        }
        let certified = lo >= candidate;
        let stalled =
            residual <= 1e-9 * scale && (value - previous).abs() <= 4.0 * f64::EPSILON * scale;
        if certified && (residual <= RESIDUAL_TOL * scale || stalled) {
            // The shift now sits within `residual` of λ₀: one more solve with
            // the factorisation in hand removes near-degenerate admixtures.
            if factored_at == lo {
                let mut w = v.clone();
                ldl.solve(&mut w);
                normalize(&mut w);
                let (polished, r) = rayleigh(a, &w, &mut av);
                if w.iter().all(|x| x.is_finite()) && r <= residual {
                    return Ok(EigenPair {
                        value: polished,
                        vector: w,
                    });
                }
            }
            return Ok(EigenPair { value, vector: v });
        }

        // Far from λ₀, or converging to an excited state: bisect until a shift
        // just below λ₀ makes inverse iteration fast.
        if !certified {
            // Converged to an eigenvector above λ₀: either a level degenerate
            // with λ₀ to within the bracket, or a block the iterate has no
            // weight in (exact zeros survive block-diagonal solves).
            let stuck = residual <= RESIDUAL_TOL * scale;
            let target = if stuck {
                0.25 * ENERGY_TOL * scale
            } else {
                bracket_tol
            };
            while hi - lo > target && iterations < max_iter {
                iterations += 1;
                let mid = 0.5 * (lo + hi);
                if ldl.factor(a, mid, pivmin) == 0 {
                    lo = mid;
                    factored_at = mid;
                } else {
                    hi = mid;
                }
            }
            if stuck {
                if value - lo <= ENERGY_TOL * scale {
                    return Ok(EigenPair { value, vector: v });
                }
                for (x, g) in v.iter_mut().zip(generic_vector(n)) {
                    *x += 1e-3 * g;
                }
                normalize(&mut v);
            }
        }

        if factored_at != lo {
            ldl.factor(a, lo, pivmin);
            factored_at = lo;
        }
        iterations += 1;
        ldl.solve(&mut v);
        normalize(&mut v);
        previous = value;
        (value, residual) = rayleigh(a, &v, &mut av);
        hi = hi.min(value);
    }
    Err(Error::Solver {
        dim: n,
        iterations,
        residual,
    })
}

/// Dense start vector with no special alignment to any basis state or block.
fn generic_vector(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64 / 13.0)
        .collect()
}

/// Rayleigh quotient of a unit vector and its residual norm.
fn rayleigh(a: &SymmetricMatrix, v: &[f64], av: &mut [f64]) -> (f64, f64) {
    a.mul_vec_into(v, av);
    let rq: f64 = v.iter().zip(av.iter()).map(|(x, y)| x * y).sum();
    let r = av
        .iter()
        .zip(v)
        .map(|(y, x)| (y - rq * x).powi(2))
        .sum::<f64>()
        .sqrt();
    (rq, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_mean_field_matrix_in, Basis, ModelParams, Ordering};

    fn check_pair(a: &SymmetricMatrix, pair: &EigenPair) {
        let norm: f64 = pair.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!(
            pair.residual(a) <= 1e-9 * a.norm_inf().max(1.0),
            "residual {}",
            pair.residual(a)
        );
    }

    #[test]
    fn one_by_one() {
        let a = SymmetricMatrix::from_lower_rows(&[vec![5.0]]);
        let g = ground_state(&a).unwrap();
        assert_eq!(g.value, 5.0);
        assert_eq!(g.vector, vec![1.0]);
    }

    #[test]
    fn two_by_two_sign_rule() {
        let a = SymmetricMatrix::from_lower_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let g = ground_state(&a).unwrap();
        assert!((g.value + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.vector[0] - h).abs() < 1e-12);
        assert!((g.vector[1] + h).abs() < 1e-12);
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let a = SymmetricMatrix::from_lower_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        assert_eq!(full_spectrum(&a).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn banded_route_matches_dense() {
        for (atoms, omega, kappa, mu_rel, psi) in [
            (2, 10.0, 0.05, -0.3, 0.9),
            (2, 0.5, 0.2, -0.8, 2.0),
            (5, 3.0, 0.01, 0.4, 0.2),
            (10, 10.0, 0.02, -0.1, 1.5),
            (1, 1.0, 0.0, -0.5, 0.0),
        ] {
            let params = ModelParams::resonant(atoms, omega)
                .with_kappa(kappa)
                .with_mu_rel(mu_rel)
                .with_psi(psi);
            let basis = Basis::new(atoms, params.n_max, Ordering::PhotonMajor);
            let a = build_mean_field_matrix_in(&params, &basis).unwrap();
            assert!(use_banded(&a));
            let banded = ground_state(&a).unwrap();
            let dense = dense_ground_state(&a).unwrap();
            check_pair(&a, &banded);
            let scale = a.norm_inf();
            assert!(
                (banded.value - dense.value).abs() <= 1e-12 * scale,
                "{} vs {}",
                banded.value,
                dense.value
            );
            let overlap: f64 = banded
                .vector
                .iter()
                .zip(dense.vector.iter())
                .map(|(x, y)| x * y)
                .sum();
            assert!((overlap.abs() - 1.0).abs() < 1e-8, "overlap {overlap}");
        }
    }

    #[test]
    fn degenerate_ground_state_still_converges() {
        // Two decoupled identical blocks.
        let mut a = SymmetricMatrix::zeros(40, 1);
        for i in 0..40 {
            a.set(i, i, (i % 20) as f64);
            if i % 20 != 19 && i + 1 < 40 {
                a.set(i + 1, i, 0.3);
            }
        }
        let g = ground_state(&a).unwrap();
        let dense = full_spectrum(&a).unwrap();
        assert!((g.value - dense[0]).abs() < 1e-12);
        check_pair(&a, &g);
    }

    #[test]
    fn trace_identity() {
        let params = ModelParams::resonant(3, 2.0)
            .with_kappa(0.3)
            .with_psi(1.1)
            .with_mu(1.7)
            .with_n_max(12);
        let a = crate::hamiltonian::build_mean_field_matrix(&params).unwrap();
        let spec = full_spectrum(&a).unwrap();
        let sum: f64 = spec.iter().sum();
        assert!((sum - a.trace()).abs() <= 1e-8 * a.dim() as f64 * a.norm_inf());
        assert!(spec.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn inertia_counts() {
        let a = SymmetricMatrix::from_lower_rows(&[
            vec![2.0, 0.0, 0.0, 0.0],
            vec![1.0, 2.0, 0.0, 0.0],
            vec![0.0, 1.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0, 2.0],
        ])
        .shrink_to_fit();
        let spec = full_spectrum(&a).unwrap();
        let mut ldl = BandLdl::new(&a);
        for s in [-1.0, 0.5, 1.0, 2.0, 3.0, 5.0] {
            let expected = spec.iter().filter(|&&l| l < s).count();
            assert_eq!(ldl.factor(&a, s, 1e-150), expected, "shift {s}");
        }
    }

    #[test]
    fn warm_start_from_excited_state_still_finds_ground() {
        let params = ModelParams::resonant(2, 10.0)
            .with_kappa(0.05)
            .with_mu_rel(-0.25)
            .with_psi(1.0);
        let basis = Basis::new(2, params.n_max, Ordering::PhotonMajor);
        let a = build_mean_field_matrix_in(&params, &basis).unwrap();
        let (values, vectors) = dense_eigen(&a).unwrap();
        let scale = a.norm_inf();
        for k in [1, 2, 7, 40] {
            let start: Vec<f64> = vectors.column(k).iter().copied().collect();
            let g = ground_state_from(&a, Some(&start)).unwrap();
            check_pair(&a, &g);
            assert!(
                (g.value - values[0]).abs() <= 1e-12 * scale,
                "start {k}: {} vs {}",
                g.value,
                values[0]
            );
        }
    }

    #[test]
    fn start_outside_the_ground_block_still_finds_ground() {
        // No hopping: block-diagonal by excitation number, so a start confined
        // to one block has exact zeros everywhere else.
        let params = ModelParams::resonant(2, 0.5).with_mu_rel(-1.1);
        let basis = Basis::new(2, params.n_max, Ordering::PhotonMajor);
        let a = build_mean_field_matrix_in(&params, &basis).unwrap();
        let (values, vectors) = dense_eigen(&a).unwrap();
        for k in [1, 3, 10] {
            let start: Vec<f64> = vectors.column(k).iter().copied().collect();
            let g = ground_state_from(&a, Some(&start)).unwrap();
            assert!(
                (g.value - values[0]).abs() <= 1e-10 * a.norm_inf(),
                "start {k}: {} vs {}",
                g.value,
                values[0]
            );
        }
    }

    #[test]
    fn degenerate_blocks_at_a_crossing() {
        let p = ModelParams::resonant(2, 10.0);
        let mu = crate::dressed::manifold_crossing(&p, 0, 5).unwrap();
        let basis = Basis::new(2, p.n_max, Ordering::PhotonMajor);
        for offset in [0.0, 1e-12, -1e-12, 3e-11] {
            let a = build_mean_field_matrix_in(&p.with_mu(mu + offset), &basis).unwrap();
            let want = full_spectrum(&a).unwrap()[0];
            let g = ground_state(&a).unwrap();
            assert!(
                (g.value - want).abs() <= 1e-10 * a.norm_inf(),
                "offset {offset}"
            );
        }
    }

    #[test]
    fn warm_start_along_psi_matches_cold() {
        let params = ModelParams::resonant(5, 10.0)
            .with_kappa(0.1)
            .with_mu_rel(-0.5);
        let basis = Basis::new(5, params.n_max, Ordering::PhotonMajor);
        let mut warm: Option<Vec<f64>> = None;
        for k in 0..60 {
            let a = build_mean_field_matrix_in(&params.with_psi(0.09 * k as f64), &basis).unwrap();
            let hot = ground_state_from(&a, warm.as_deref()).unwrap();
            let cold = ground_state(&a).unwrap();
            assert!((hot.value - cold.value).abs() <= 1e-12 * a.norm_inf());
            warm = Some(hot.vector);
        }
    }

    #[test]
    fn mismatched_or_zero_start_is_ignored() {
        let a = SymmetricMatrix::from_lower_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        for start in [vec![0.0, 0.0], vec![1.0]] {
            assert!((ground_state_from(&a, Some(&start)).unwrap().value + 1.0).abs() < 1e-14);
        }
    }
}
