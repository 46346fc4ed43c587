//! Two-atom resonant analytics and zero-hopping Mott boundaries.
//!
//! On resonance (`ε = ω = x β`) each `N = 2` excitation manifold `n ≥ 2` is a
//! 3×3 block whose spectrum splits into a lower, centre and upper dressed
//! branch, `E∓ = ((2n + 1)x ∓ R(n, x))/2` and `E₀ = n x`, separated by the
//! effective Rabi frequency `R(n, x) = √(8(2n − 1) + x²)`.
//!
//! At zero hopping the chemical potential enters every manifold as `−nμ`, so
//! the ground manifold changes where two block ground energies cross.

use crate::eig::{dense_eigen, fix_sign, lowest_eigenvalue};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_dicke_block, ModelParams};

fn check_frequency(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "omega/beta must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

/// Effective Rabi frequency `R(n, x) = √(8(2n − 1) + x²)`.
pub fn rabi(n: usize, x: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("Rabi frequency needs n >= 1".into()));
    }
    check_frequency(x)?;
    Ok(rabi_unchecked(n, x))
}

fn rabi_unchecked(n: usize, x: f64) -> f64 {
    (8.0 * (2 * n - 1) as f64 + x * x).sqrt()
}

/// Dressed energies and states of one resonant two-atom manifold.
///
/// Vectors are over `(|0,e⊗²⟩|n−2⟩, |g,e⟩|n−1⟩, |g⊗²,0⟩|n⟩)`; components of
/// states that do not exist in low manifolds are zero. The `n = 1` manifold
/// has no centre branch and `n = 0` holds only the ground state `|0,0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedTriple {
    pub n: usize,
    pub e_minus: f64,
    pub e_zero: Option<f64>,
    pub e_plus: Option<f64>,
    pub v_minus: [f64; 3],
    pub v_zero: Option<[f64; 3]>,
    pub v_plus: Option<[f64; 3]>,
}

fn resonant_pair(x: f64) -> ModelParams {
    ModelParams {
        atoms: 2,
        epsilon: x,
        omega: x,
        beta: 1.0,
        mu: 0.0,
        ..Default::default()
    }
}

pub fn dressed_triple(n: usize, x: f64) -> Result<DressedTriple> {
    check_frequency(x)?;
    if n == 0 {
        return Ok(DressedTriple {
            n,
            e_minus: 0.0,
            e_zero: None,
            e_plus: None,
            v_minus: [0.0, 0.0, 1.0],
            v_zero: None,
            v_plus: None,
        });
    }

    let block = build_dicke_block(n, &resonant_pair(x))?;
    let (_, vectors) = dense_eigen(&block)?;
    let dim = block.dim();
    let column = |c: usize| {
        let mut v: Vec<f64> = vectors.column(c).iter().copied().collect();
        fix_sign(&mut v);
        // n = 1 lacks the |0,e⊗²⟩ state, so its two components are right-aligned.
        let mut out = [0.0; 3];
        out[3 - dim..].copy_from_slice(&v);
        out
    };

    let r = rabi_unchecked(n, x);
    let sum = (2 * n + 1) as f64 * x;
    let e_minus = 0.5 * (sum - r);
    let e_plus = 0.5 * (sum + r);
    if n == 1 {
        return Ok(DressedTriple {
            n,
            e_minus,
            e_zero: None,
            e_plus: Some(e_plus),
            v_minus: column(0),
            v_zero: None,
            v_plus: Some(column(1)),
        });
    }
    Ok(DressedTriple {
        n,
        e_minus,
        e_zero: Some(n as f64 * x),
        e_plus: Some(e_plus),
        v_minus: column(0),
        v_zero: Some(column(1)),
        v_plus: Some(column(2)),
    })
}

/// The dressed vectors in their commonly quoted closed form, `[minus, zero, plus]`.
///
/// This form carries `√n` on `|0,e⊗²⟩|n−2⟩` and `√(n−1)` on `|g⊗²,0⟩|n⟩`.
/// Diagonalising the block itself puts them the other way round, so these
/// are *not* eigenvectors of [`build_dicke_block`]; [`dressed_triple`] is the
/// self-consistent source. Kept for comparison.
pub fn quoted_dressed_vectors(n: usize, x: f64) -> Result<[[f64; 3]; 3]> {
    if n < 2 {
        return Err(Error::Domain(
            "closed-form dressed vectors need n >= 2".into(),
        ));
    }
    check_frequency(x)?;
    let (a, b) = ((n as f64).sqrt(), ((n - 1) as f64).sqrt());
    let r = rabi_unchecked(n, x);
    let zero_norm = ((2 * n - 1) as f64).sqrt();
    let branch = |sign: f64| {
        let mid = (x + sign * r) / (2.0 * std::f64::consts::SQRT_2);
        let norm = ((2 * n - 1) as f64 + mid * mid).sqrt();
        [a / norm, mid / norm, b / norm]
    };
    Ok([
        branch(-1.0),
        [-b / zero_norm, 0.0, a / zero_norm],
        branch(1.0),
    ])
}

/// Closed-form critical chemical potential, valid for `n ≥ 2`:
///
/// ```text
/// μ_c = [(√(n−1) − √n) x − (√(n−1) R(n+1, x) − √n R(n, x))] / (2 √(2n(n−1)))
/// ```
pub fn critical_mu_formula(n: usize, x: f64) -> Result<f64> {
    if n <= 1 {
        return Err(Error::Domain(format!(
            "closed-form critical chemical potential is singular for n = {n}; use lobe_boundary_zero_hopping"
        )));
    }
    check_frequency(x)?;
    let (s0, s1) = (((n - 1) as f64).sqrt(), (n as f64).sqrt());
    let numerator = (s0 - s1) * x - (s0 * rabi_unchecked(n + 1, x) - s1 * rabi_unchecked(n, x));
    Ok(numerator / (2.0 * (2.0 * (n * (n - 1)) as f64).sqrt()))
}

/// Lowest energy of the fixed-excitation manifold `n` at the given parameters
/// (hopping ignored).
pub fn manifold_ground_energy(params: &ModelParams, n: usize) -> Result<f64> {
    lowest_eigenvalue(&build_dicke_block(n, params)?)
}

/// Scan step of the bracketing search in μ/β.
const SCAN_STEP: f64 = 0.01;
const ROOT_TOL: f64 = 1e-13;

/// Chemical potential `μ/β` where manifolds `lower` and `upper` have equal
/// ground energy at zero hopping.
///
/// The search bracket comes from Gershgorin bounds on both blocks; it is
/// scanned for a sign change and the root is then bisected.
pub fn manifold_crossing(params: &ModelParams, lower: usize, upper: usize) -> Result<f64> {
    if upper <= lower {
        return Err(Error::Domain(format!(
            "manifold crossing needs upper > lower, got {lower}, {upper}"
        )));
    }
    let at_zero = ModelParams {
        mu: 0.0,
        kappa: 0.0,
        psi: 0.0,
        ..*params
    };
    let lo_block = build_dicke_block(lower, &at_zero)?.gershgorin_bounds();
    let hi_block = build_dicke_block(upper, &at_zero)?.gershgorin_bounds();
    let dn = (upper - lower) as f64;
    let pad = 1e-9 * (1.0 + lo_block.1.abs() + hi_block.1.abs());
    let bracket_lo = (hi_block.0 - lo_block.1) / dn - pad;
    let bracket_hi = (hi_block.1 - lo_block.0) / dn + pad;

    let gap = |mu: f64| -> Result<f64> {
        let p = ModelParams { mu, ..at_zero };
        Ok(manifold_ground_energy(&p, upper)? - manifold_ground_energy(&p, lower)?)
    };
    let not_found = Error::BoundaryNotFound {
        lower,
        upper,
        lo: bracket_lo,
        hi: bracket_hi,
    };

    let steps = (((bracket_hi - bracket_lo) / SCAN_STEP).ceil() as usize).clamp(1, 4096);
    let step = (bracket_hi - bracket_lo) / steps as f64;
    let mut a = bracket_lo;
    let mut fa = gap(a)?;
    let mut found = None;
    for k in 1..=steps {
        let b = bracket_lo + k as f64 * step;
        let fb = gap(b)?;
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            found = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut b, mut fa) = found.ok_or(not_found)?;
    while b - a > ROOT_TOL * (1.0 + a.abs()) {
        let mid = 0.5 * (a + b);
        let fm = gap(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Zero-hopping boundary between manifolds `n` and `n + 1` for general parameters.
pub fn lobe_boundary(params: &ModelParams, n: usize) -> Result<f64> {
    manifold_crossing(params, n, n + 1)
}

/// Zero-hopping boundary between manifolds `n` and `n + 1` for two resonant
/// atoms at `ω/β = x`.
pub fn lobe_boundary_zero_hopping(n: usize, x: f64) -> Result<f64> {
    check_frequency(x)?;
    lobe_boundary(&resonant_pair(x), n)
}

/// A change of the zero-hopping ground manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub mu: f64,
    pub from: usize,
    pub to: usize,
}

/// Ground manifold at zero hopping, chemical potential `mu`, among manifolds `0..=n_top`.
pub fn zero_hopping_ground_manifold(params: &ModelParams, mu: f64, n_top: usize) -> Result<usize> {
    let at_zero = ModelParams {
        mu: 0.0,
        kappa: 0.0,
        psi: 0.0,
        ..*params
    };
    let mut best = (0, f64::INFINITY);
    for n in 0..=n_top {
        let e = manifold_ground_energy(&at_zero, n)? - n as f64 * mu;
        if e < best.1 {
            best = (n, e);
        }
    }
    Ok(best.0)
}

/// Sequence of zero-hopping ground-manifold changes for `μ/β` in `[mu_lo, mu_hi]`,
/// considering manifolds `0..=n_top`.
///
/// Manifold ground energies are exactly linear in `μ` (`E_n(μ) = E_n(0) − nμ`),
/// so the ground manifold follows the lower convex hull of `(n, E_n(0))`.
/// Manifolds that never touch the hull have no Mott lobe; a jump by more than
/// one excitation signals such an absent lobe. Each crossing is refined with
/// [`manifold_crossing`].
pub fn zero_hopping_transitions(
    params: &ModelParams,
    mu_lo: f64,
    mu_hi: f64,
    n_top: usize,
) -> Result<Vec<Transition>> {
    let at_zero = ModelParams {
        mu: 0.0,
        kappa: 0.0,
        psi: 0.0,
        ..*params
    };
    let energies = (0..=n_top)
        .map(|n| manifold_ground_energy(&at_zero, n))
        .collect::<Result<Vec<_>>>()?;
    let mut current = zero_hopping_ground_manifold(params, mu_lo, n_top)?;
    let mut out = Vec::new();
    loop {
        // Earliest crossing to a larger manifold; exact ties go to the largest.
        let mut next: Option<(f64, usize)> = None;
        for k in current + 1..=n_top {
            let mu = (energies[k] - energies[current]) / (k - current) as f64;
            let tie = 1e-12 * (1.0 + mu.abs());
            match next {
                Some((best, _)) if mu > best + tie => {}
                Some((best, _)) if mu >= best - tie => next = Some((best.min(mu), k)),
                _ => next = Some((mu, k)),
            }
        }
        match next {
            Some((mu, k)) if mu <= mu_hi => {
                let mu = manifold_crossing(&at_zero, current, k)?;
                out.push(Transition {
                    mu,
                    from: current,
                    to: k,
                });
                current = k;
            }
            _ => break,
        }
    }
    Ok(out)
}
