//! Self-consistent mean-field solution at a single parameter point.
//!
//! The ground energy `E(ψ)` of the decoupled site Hamiltonian is minimised
//! over the real order parameter on `[0, √n_max]`: a uniform coarse scan
//! picks the best bracket, golden-section search refines it.

use serde::{Deserialize, Serialize};

use crate::eig::{dense_eigen, ground_state_from, EigenPair};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_mean_field_matrix_in, Basis, ModelParams, Ordering};

/// `ψ` above which a point counts as superfluid.
pub const PSI_THRESHOLD: f64 = 1e-4;
/// Largest ground-state weight allowed on the photon cutoff `p = n_max`.
pub const TRUNCATION_GUARD: f64 = 1e-6;
pub const COARSE_POINTS: usize = 200;
pub const PSI_TOL: f64 = 1e-8;
/// Half-width of the central difference in `μ/β` used for `ρ`.
pub const RHO_STEP: f64 = 1e-4;
/// Jump in `ψ_min` across the difference stencil that flags a phase boundary.
pub const PSI_JUMP: f64 = 0.1;
/// Energy change between successive cutoffs regarded as converged.
pub const CUTOFF_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    MottInsulator,
    Superfluid,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::MottInsulator => "MI",
            Phase::Superfluid => "SF",
        }
    }

    pub fn classify(psi: f64) -> Self {
        if psi > PSI_THRESHOLD {
            Phase::Superfluid
        } else {
            Phase::MottInsulator
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldSolution {
    pub psi_min: f64,
    pub e_ground: f64,
    /// Mean excitations `⟨a†a + m⟩` in the ground state at `psi_min`, which
    /// equals `−∂E_g/∂μ` there.
    pub rho: f64,
    pub phase: Phase,
    pub n_max_used: usize,
    pub converged: bool,
    /// Ground-state probability on the photon cutoff `p = n_max`.
    pub top_manifold_weight: f64,
}

/// On-site problem with the order parameter left free. Successive solves are
/// warm-started from the previous ground vector.
struct Site {
    params: ModelParams,
    basis: Basis,
    warm: Option<Vec<f64>>,
}

impl Site {
    fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: ModelParams {
                psi: 0.0,
                ..*params
            },
            basis: Basis::new(params.atoms, params.n_max, Ordering::PhotonMajor),
            warm: None,
        })
    }

    fn solve(&mut self, psi: f64) -> Result<EigenPair> {
        let h = build_mean_field_matrix_in(&self.params.with_psi(psi), &self.basis)?;
        let ground = ground_state_from(&h, self.warm.as_deref())?;
        self.warm = Some(ground.vector.clone());
        Ok(ground)
    }

    fn energy(&mut self, psi: f64) -> Result<f64> {
        Ok(self.solve(psi)?.value)
    }

    fn solution_at(&mut self, psi: f64) -> Result<MeanFieldSolution> {
        let ground = self.solve(psi)?;
        let mut rho = 0.0;
        let mut top = 0.0;
        for (i, v) in ground.vector.iter().enumerate() {
            let s = self.basis.state(i);
            let w = v * v;
            rho += w * s.excitations() as f64;
            if s.p == self.basis.n_max {
                top += w;
            }
        }
        Ok(MeanFieldSolution {
            psi_min: psi,
            e_ground: ground.value,
            rho,
            phase: Phase::classify(psi),
            n_max_used: self.basis.n_max,
            converged: top <= TRUNCATION_GUARD,
            top_manifold_weight: top,
        })
    }
}

/// Smallest eigenvalue of the mean-field matrix at the given `ψ`, including
/// the `zκψ²` shift.
pub fn ground_energy_at_psi(params: &ModelParams) -> Result<f64> {
    Site::new(params)?.energy(params.psi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimises the ground energy over `ψ ∈ [0, √n_max]`; `params.psi` is ignored.
///
/// Returns the smallest minimiser when `E(ψ)` is flat, so a point is only
/// called superfluid when a finite `ψ` actually lowers the energy.
pub fn minimize_over_psi(params: &ModelParams) -> Result<MeanFieldSolution> {
    let mut site = Site::new(params)?;
    let psi_max = (params.n_max as f64).sqrt();
    if params.kappa == 0.0 || params.n_max == 0 {
        return site.solution_at(0.0);
    }

    let step = psi_max / (COARSE_POINTS - 1) as f64;
    let mut best = (0.0, site.energy(0.0)?);
    let e_zero = best.1;
    let mut best_k = 0;
    for k in 1..COARSE_POINTS {
        let psi = k as f64 * step;
        let e = site.energy(psi)?;
        if e < best.1 {
            best = (psi, e);
            best_k = k;
        }
    }

    let mut a = best_k.saturating_sub(1) as f64 * step;
    let mut b = ((best_k + 1).min(COARSE_POINTS - 1)) as f64 * step;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = site.energy(c)?;
    let mut fd = site.energy(d)?;
    let consider = |psi: f64, e: f64, best: &mut (f64, f64)| {
        if e < best.1 || (e == best.1 && psi < best.0) {
            *best = (psi, e);
        }
    };
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    while b - a > PSI_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = site.energy(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = site.energy(d)?;
            consider(d, fd, &mut best);
        }
    }

    // Energy gains below eigensolver noise do not make a superfluid.
    let tie = 1e-12 * e_zero.abs().max(1.0);
    let psi = if e_zero <= best.1 + tie { 0.0 } else { best.0 };
    site.solution_at(psi)
}

/// Central-difference estimate of `ρ = −∂E_g/∂μ` with `ψ` re-minimised at
/// both stencil points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitationEstimate {
    pub rho: f64,
    /// The stencil straddles a first-order boundary: `ψ_min` jumps by more
    /// than [`PSI_JUMP`] and the jump survives refinement.
    pub discontinuous: bool,
}

pub fn mean_excitations(params: &ModelParams) -> Result<ExcitationEstimate> {
    let below = minimize_over_psi(&params.with_mu(params.mu - RHO_STEP))?;
    let above = minimize_over_psi(&params.with_mu(params.mu + RHO_STEP))?;
    let jump = (above.psi_min - below.psi_min).abs();
    let discontinuous =
        jump > PSI_JUMP && persists_under_halving(params, below.psi_min, above.psi_min, jump)?;
    Ok(ExcitationEstimate {
        rho: (below.e_ground - above.e_ground) / (2.0 * RHO_STEP),
        discontinuous,
    })
}

/// Follows the larger half of the `ψ` step a few times: a true jump keeps
/// its size, a steep continuous rise (even a square-root onset) does not.
fn persists_under_halving(
    params: &ModelParams,
    psi_lo: f64,
    psi_hi: f64,
    jump: f64,
) -> Result<bool> {
    let (mut a, mut b) = (
        (params.mu - RHO_STEP, psi_lo),
        (params.mu + RHO_STEP, psi_hi),
    );
    for _ in 0..4 {
        let mid = 0.5 * (a.0 + b.0);
        let m = (mid, minimize_over_psi(&params.with_mu(mid))?.psi_min);
        if (m.1 - a.1).abs() >= (b.1 - m.1).abs() {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((b.1 - a.1).abs() >= 0.5 * jump)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    /// `(n_max, E_g)` per cutoff.
    pub points: Vec<(usize, f64)>,
    /// First cutoff whose energy moved by less than [`CUTOFF_TOL`] from the previous one.
    pub converged_at: Option<usize>,
}

/// Hopping at which the `ψ = 0` state becomes locally unstable, from second
/// order in the hopping field: `E(ψ) ≈ E₀ + zκψ²(1 + zκS)` with
/// `S = Σₘ |⟨m|a + a†|0⟩|² / (E₀ − Eₘ) < 0`, so `κ_c = −1/(zS)`.
///
/// Where the transition is continuous this is the Mott-lobe boundary at the
/// given `μ`; a first-order transition can happen at smaller `κ`. Returns 0
/// when the decoupled ground state is degenerate. `kappa` and `psi` in
/// `params` are ignored.
pub fn mott_instability_hopping(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let basis = Basis::new(params.atoms, params.n_max, Ordering::PhotonMajor);
    let h = build_mean_field_matrix_in(
        &ModelParams {
            kappa: 0.0,
            psi: 0.0,
            ..*params
        },
        &basis,
    )?;
    let (values, vectors) = dense_eigen(&h)?;
    if values.len() > 1 && values[1] - values[0] <= 1e-12 * h.norm_inf().max(1.0) {
        return Ok(0.0);
    }
    // (a + a†)|0⟩ in the bare basis.
    let ground = vectors.column(0);
    let mut x_ground = vec![0.0; basis.dim()];
    for (i, s) in basis.states().enumerate() {
        if s.p < basis.n_max {
            let up = basis.index(crate::hamiltonian::BasisState { m: s.m, p: s.p + 1 });
            let amp = ((s.p + 1) as f64).sqrt();
            x_ground[up] += amp * ground[i];
            x_ground[i] += amp * ground[up];
        }
    }
    let mut susceptibility = 0.0;
    for k in 1..values.len() {
        let overlap: f64 = vectors
            .column(k)
            .iter()
            .zip(&x_ground)
            .map(|(a, b)| a * b)
            .sum();
        susceptibility += overlap * overlap / (values[0] - values[k]);
    }
    Ok(-1.0 / (params.z as f64 * susceptibility))
}

/// Minimised ground energy as a function of the photon cutoff.
pub fn convergence_study(params: &ModelParams, cutoffs: &[usize]) -> Result<ConvergenceStudy> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cutoffs must be strictly increasing".into()));
    }
    let mut points: Vec<(usize, f64)> = Vec::with_capacity(cutoffs.len());
    let mut converged_at = None;
    for &k in cutoffs {
        let e = minimize_over_psi(&params.with_n_max(k))?.e_ground;
        if let Some(&(_, prev)) = points.last() {
            if converged_at.is_none() && (e - prev).abs() < CUTOFF_TOL {
                converged_at = Some(k);
            }
        }
        points.push((k, e));
    }
    Ok(ConvergenceStudy {
        points,
        converged_at,
    })
}
