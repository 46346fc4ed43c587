//! Truncated on-site mean-field Hamiltonian for `N` two-level atoms in a
//! single cavity mode.
//!
//! Product basis states `|m⟩|p⟩` pair the permutation-symmetric Dicke state
//! with `m` excited atoms and a Fock state with `p` photons. In that basis
//!
//! ```text
//! H = ε J⁺J⁻ + ω a†a + β (a J⁺ + a† J⁻) − zκψ (a + a†) + zκψ² − μ N_exc
//! ```
//!
//! with `J⁺J⁻|m⟩ = m(N − m + 1)|m⟩` and `N_exc = a†a + m` the excitation
//! number conserved by the atom-photon coupling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Physical and numerical knobs. Energies are in units of `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub atoms: usize,
    pub epsilon: f64,
    pub omega: f64,
    pub beta: f64,
    pub kappa: f64,
    pub mu: f64,
    pub psi: f64,
    pub n_max: usize,
    /// Coordination number multiplying the hopping decoupling term.
    pub z: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            atoms: 2,
            epsilon: 10.0,
            omega: 10.0,
            beta: 1.0,
            kappa: 0.0,
            mu: 0.0,
            psi: 0.0,
            n_max: 30,
            z: 1,
        }
    }
}

impl ModelParams {
    /// Resonant (`ε = ω`) parameters for `atoms` atoms, everything else default.
    pub fn resonant(atoms: usize, omega: f64) -> Self {
        Self {
            atoms,
            epsilon: omega,
            omega,
            ..Self::default()
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn with_mu(self, mu: f64) -> Self {
        Self { mu, ..self }
    }

    /// Sets `μ` through the relative chemical potential `(μ − ω)/β`.
    pub fn with_mu_rel(self, mu_rel: f64) -> Self {
        Self {
            mu: self.omega + mu_rel * self.beta,
            ..self
        }
    }

    pub fn with_psi(self, psi: f64) -> Self {
        Self { psi, ..self }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    pub fn with_z(self, z: usize) -> Self {
        Self { z, ..self }
    }

    pub fn with_atoms(self, atoms: usize) -> Self {
        Self { atoms, ..self }
    }

    /// Relative chemical potential `(μ − ω)/β`.
    pub fn mu_rel(&self) -> f64 {
        (self.mu - self.omega) / self.beta
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidParams {
                field,
                reason: reason.into(),
            })
        };
        if self.atoms < 1 {
            return bad("atoms", "must be at least 1");
        }
        if self.z < 1 {
            return bad("z", "must be at least 1");
        }
        for (field, v) in [
            ("epsilon", self.epsilon),
            ("omega", self.omega),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("mu", self.mu),
            ("psi", self.psi),
        ] {
            if !v.is_finite() {
                return bad(field, "must be finite");
            }
        }
        if self.beta <= 0.0 {
            return bad("beta", "must be positive");
        }
        if self.kappa < 0.0 {
            return bad("kappa", "must be non-negative");
        }
        if self.psi < 0.0 {
            return bad("psi", "must be non-negative");
        }
        Ok(())
    }
}

/// `|m⟩|p⟩`: symmetric Dicke state with `m` excited atoms times `p` photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub m: usize,
    pub p: usize,
}

impl BasisState {
    /// Eigenvalue of `J⁺J⁻` on this state.
    pub fn jpjm(&self, atoms: usize) -> f64 {
        dicke_jpjm(self.m, atoms)
    }

    /// Eigenvalue of `a†a + J⁺J⁻`.
    pub fn photon_plus_jpjm(&self, atoms: usize) -> f64 {
        self.p as f64 + self.jpjm(atoms)
    }

    /// Conserved excitation number `p + m`.
    pub fn excitations(&self) -> usize {
        self.p + self.m
    }
}

#[inline]
fn dicke_jpjm(m: usize, atoms: usize) -> f64 {
    (m * (atoms + 1 - m)) as f64
}

/// `J⁺J⁻` eigenvalue `m(N − m + 1)` of the symmetric Dicke state with `m` excitations.
pub fn jpjm_eigenvalue(m: usize, atoms: usize) -> Result<f64> {
    if m > atoms {
        return Err(Error::Domain(format!(
            "excitation count m = {m} exceeds atom number N = {atoms}"
        )));
    }
    Ok(dicke_jpjm(m, atoms))
}

/// Index layout of the truncated `(N + 1)(n_max + 1)` product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `index = m (n_max + 1) + p`; half-bandwidth `n_max`.
    AtomMajor,
    /// `index = p (N + 1) + m`; half-bandwidth `N + 1`, used by the solvers.
    PhotonMajor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub atoms: usize,
    pub n_max: usize,
    pub ordering: Ordering,
}

impl Basis {
    pub fn new(atoms: usize, n_max: usize, ordering: Ordering) -> Self {
        Self {
            atoms,
            n_max,
            ordering,
        }
    }

    pub fn dim(&self) -> usize {
        (self.atoms + 1) * (self.n_max + 1)
    }

    pub fn index(&self, s: BasisState) -> usize {
        debug_assert!(s.m <= self.atoms && s.p <= self.n_max);
        match self.ordering {
            Ordering::AtomMajor => s.m * (self.n_max + 1) + s.p,
            Ordering::PhotonMajor => s.p * (self.atoms + 1) + s.m,
        }
    }

    pub fn state(&self, index: usize) -> BasisState {
        match self.ordering {
            Ordering::AtomMajor => BasisState {
                m: index / (self.n_max + 1),
                p: index % (self.n_max + 1),
            },
            Ordering::PhotonMajor => BasisState {
                m: index % (self.atoms + 1),
                p: index / (self.atoms + 1),
            },
        }
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(|i| self.state(i))
    }

    fn half_bandwidth(&self) -> usize {
        match self.ordering {
            Ordering::AtomMajor => self.n_max,
            Ordering::PhotonMajor => self.atoms + 1,
        }
    }
}

/// Diagonal energy of `|m⟩|p⟩` without the mean-field shift.
#[inline]
fn bare_energy(params: &ModelParams, s: BasisState) -> f64 {
    params.epsilon * dicke_jpjm(s.m, params.atoms) + params.omega * s.p as f64
        - params.mu * s.excitations() as f64
}

/// `β ⟨m, p| a J⁺ |m − 1, p + 1⟩ = β √(p + 1) √(m(N − m + 1))`.
#[inline]
fn atom_photon_coupling(params: &ModelParams, s: BasisState) -> f64 {
    params.beta * ((s.p + 1) as f64).sqrt() * dicke_jpjm(s.m, params.atoms).sqrt()
}

/// States of the fixed-excitation manifold `n`, ordered by decreasing `m`.
///
/// For `N = 2` and `n ≥ 2` this is `|0,e⊗²⟩|n−2⟩, |g,e⟩|n−1⟩, |g⊗²,0⟩|n⟩`.
pub fn manifold_states(n: usize, atoms: usize) -> Vec<BasisState> {
    (0..=n.min(atoms))
        .rev()
        .map(|m| BasisState { m, p: n - m })
        .collect()
}

/// One fixed-excitation block of the Dicke Hamiltonian (hopping absent).
pub fn build_dicke_block(n: usize, params: &ModelParams) -> Result<SymmetricMatrix> {
    params.validate()?;
    let states = manifold_states(n, params.atoms);
    let mut block = SymmetricMatrix::zeros(states.len(), 1);
    for (k, &s) in states.iter().enumerate() {
        block.set(k, k, bare_energy(params, s));
        // states[k + 1] = |m − 1⟩|p + 1⟩
        if k + 1 < states.len() {
            block.set(k + 1, k, atom_photon_coupling(params, s));
        }
    }
    Ok(block)
}

/// Mean-field matrix in the atom-major basis `index = m (n_max + 1) + p`.
pub fn build_mean_field_matrix(params: &ModelParams) -> Result<SymmetricMatrix> {
    params.validate()?;
    Ok(assemble(
        params,
        &Basis::new(params.atoms, params.n_max, Ordering::AtomMajor),
    ))
}

/// Mean-field matrix in an arbitrary basis layout.
pub fn build_mean_field_matrix_in(params: &ModelParams, basis: &Basis) -> Result<SymmetricMatrix> {
    params.validate()?;
    if basis.atoms != params.atoms || basis.n_max != params.n_max {
        return Err(Error::Domain(
            "basis does not match model parameters".into(),
        ));
    }
    Ok(assemble(params, basis))
}

// No validation: the gauge-symmetry tests feed a negative psi through here.
pub(crate) fn assemble(params: &ModelParams, basis: &Basis) -> SymmetricMatrix {
    let z = params.z as f64;
    let shift = z * params.kappa * params.psi * params.psi;
    let hop = -z * params.kappa * params.psi;
    let mut h = SymmetricMatrix::zeros(basis.dim(), basis.half_bandwidth());
    for s in basis.states() {
        let i = basis.index(s);
        h.set(i, i, bare_energy(params, s) + shift);
        if s.p < basis.n_max {
            let up = BasisState { m: s.m, p: s.p + 1 };
            if hop != 0.0 {
                h.set(basis.index(up), i, hop * ((s.p + 1) as f64).sqrt());
            }
            if s.m >= 1 {
                let down = BasisState {
                    m: s.m - 1,
                    p: s.p + 1,
                };
                h.set(basis.index(down), i, atom_photon_coupling(params, s));
            }
        }
    }
    h
}
