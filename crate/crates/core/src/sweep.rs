//! Sweeps over hopping `κ/β` and relative chemical potential `(μ−ω)/β`.
//!
//! Every cell is an independent mean-field solve, run on a worker pool and
//! gathered by index, so results do not depend on the number of workers.
//! Mott lobes are the connected regions of insulating cells with a common
//! integer occupation; each gets its own contour of `ψ_min` at the
//! superfluid threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{iso_lines, Polyline};
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::meanfield::{
    mean_excitations, minimize_over_psi, MeanFieldSolution, Phase, PSI_THRESHOLD,
};

/// Floor added to `ψ` before taking logarithms for contouring.
pub const PSI_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub params_base: ModelParams,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub mu_rel_min: f64,
    pub mu_rel_max: f64,
    pub nk: usize,
    pub nmu: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::new(ModelParams::default())
    }
}

impl GridSpec {
    /// 200×200 cells over `κ/β ∈ [0, 0.2]`, `(μ−ω)/β ∈ [−1, 0]`.
    pub fn new(params_base: ModelParams) -> Self {
        Self {
            params_base,
            kappa_min: 0.0,
            kappa_max: 0.2,
            mu_rel_min: -1.0,
            mu_rel_max: 0.0,
            nk: 200,
            nmu: 200,
        }
    }

    pub fn with_kappa_range(self, kappa_min: f64, kappa_max: f64, nk: usize) -> Self {
        Self {
            kappa_min,
            kappa_max,
            nk,
            ..self
        }
    }

    pub fn with_mu_rel_range(self, mu_rel_min: f64, mu_rel_max: f64, nmu: usize) -> Self {
        Self {
            mu_rel_min,
            mu_rel_max,
            nmu,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params_base.validate()?;
        let bad = |reason: String| Err(Error::InvalidGrid(reason));
        if self.nk < 2 || self.nmu < 2 {
            return bad(format!(
                "need at least 2×2 cells, got {}×{}",
                self.nk, self.nmu
            ));
        }
        let ends = [
            self.kappa_min,
            self.kappa_max,
            self.mu_rel_min,
            self.mu_rel_max,
        ];
        if ends.iter().any(|x| !x.is_finite()) {
            return bad("axis limits must be finite".into());
        }
        if self.kappa_min < 0.0 || self.kappa_min > self.kappa_max {
            return bad(format!(
                "need 0 ≤ kappa_min ≤ kappa_max, got [{}, {}]",
                self.kappa_min, self.kappa_max
            ));
        }
        if self.mu_rel_min > self.mu_rel_max {
            return bad(format!(
                "need mu_rel_min ≤ mu_rel_max, got [{}, {}]",
                self.mu_rel_min, self.mu_rel_max
            ));
        }
        Ok(())
    }

    pub fn kappas(&self) -> Vec<f64> {
        linspace(self.kappa_min, self.kappa_max, self.nk)
    }

    pub fn mu_rels(&self) -> Vec<f64> {
        linspace(self.mu_rel_min, self.mu_rel_max, self.nmu)
    }

    pub fn len(&self) -> usize {
        self.nk * self.nmu
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameters of cell `(i, j)`: `i` indexes `κ`, `j` indexes `μ`.
    pub fn params_at(&self, i: usize, j: usize) -> ModelParams {
        let kappa = axis_value(self.kappa_min, self.kappa_max, self.nk, i);
        let mu_rel = axis_value(self.mu_rel_min, self.mu_rel_max, self.nmu, j);
        self.params_base.with_kappa(kappa).with_mu_rel(mu_rel)
    }
}

fn axis_value(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
    if k + 1 == n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| axis_value(lo, hi, n, k)).collect()
}

/// A failed cell keeps the solver's message.
pub type Cell = std::result::Result<MeanFieldSolution, String>;

/// Contour of one Mott lobe in `(κ/β, (μ−ω)/β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeBoundary {
    /// Integer excitation number inside the lobe.
    pub occupation: usize,
    pub lines: Vec<Polyline>,
    /// Largest `κ/β` reached by the contour.
    pub kappa_tip: f64,
    /// The contour turns back before `kappa_max`, so `kappa_tip` is a real tip.
    pub tip_resolved: bool,
    /// `(μ−ω)/β` where the contour meets the `kappa_min` edge, ascending.
    pub intercepts: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LobeTip {
    pub n: usize,
    pub kappa_tip: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub spec: GridSpec,
    /// Row-major in `κ`: cell `(i, j)` is `cells[i * nmu + j]`.
    pub cells: Vec<Cell>,
    pub boundaries: Vec<LobeBoundary>,
    pub lobe_tips: Vec<LobeTip>,
}

impl PhaseGrid {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * self.spec.nmu + j]
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.is_err()).count()
    }

    pub fn unconverged_cells(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c, Ok(s) if !s.converged))
            .count()
    }
}

fn run_cells(
    spec: &GridSpec,
    jobs: usize,
    solve: impl Fn(&ModelParams) -> Result<MeanFieldSolution> + Sync,
) -> Result<Vec<Cell>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let nmu = spec.nmu;
    Ok(pool.install(|| {
        (0..spec.len())
            .into_par_iter()
            .map(|idx| solve(&spec.params_at(idx / nmu, idx % nmu)).map_err(|e| e.to_string()))
            .collect()
    }))
}

fn finish(spec: GridSpec, cells: Vec<Cell>) -> Result<PhaseGrid> {
    let mut grid = PhaseGrid {
        spec,
        cells,
        boundaries: Vec::new(),
        lobe_tips: Vec::new(),
    };
    grid.boundaries = extract_lobe_boundary(&grid)?;
    grid.lobe_tips = grid
        .boundaries
        .iter()
        .filter(|b| b.tip_resolved)
        .map(|b| LobeTip {
            n: b.occupation,
            kappa_tip: b.kappa_tip,
        })
        .collect();
    Ok(grid)
}

/// Minimises over `ψ` in every cell, with `jobs` worker threads.
pub fn run_phase_diagram(spec: &GridSpec, jobs: usize) -> Result<PhaseGrid> {
    let cells = run_cells(spec, jobs, minimize_over_psi)?;
    finish(*spec, cells)
}

/// As [`run_phase_diagram`], with each cell's `rho` replaced by the
/// finite-difference `−∂E_g/∂μ`.
pub fn run_density_map(spec: &GridSpec, jobs: usize) -> Result<PhaseGrid> {
    let cells = run_cells(spec, jobs, |p| {
        let mut s = minimize_over_psi(p)?;
        s.rho = mean_excitations(p)?.rho;
        Ok(s)
    })?;
    finish(*spec, cells)
}

/// `log10(ψ + floor) − log10(threshold)`, with failed cells filled in from
/// their neighbours.
fn log_psi_field(grid: &PhaseGrid) -> Result<Vec<f64>> {
    let (nk, nmu) = (grid.spec.nk, grid.spec.nmu);
    let shift = PSI_THRESHOLD.log10();
    let mut g: Vec<Option<f64>> = grid
        .cells
        .iter()
        .map(|c| {
            c.as_ref()
                .ok()
                .map(|s| (s.psi_min + PSI_FLOOR).log10() - shift)
        })
        .collect();
    if g.iter().all(Option::is_none) {
        return Err(Error::InvalidGrid("every cell failed".into()));
    }
    // Sweep until every hole has a known neighbour; each pass fills at least one.
    while g.iter().any(Option::is_none) {
        let snapshot = g.clone();
        for i in 0..nk {
            for j in 0..nmu {
                if snapshot[i * nmu + j].is_some() {
                    continue;
                }
                let mut neighbours = Vec::new();
                if i > 0 {
                    neighbours.push(snapshot[(i - 1) * nmu + j]);
                }
                if i + 1 < nk {
                    neighbours.push(snapshot[(i + 1) * nmu + j]);
                }
                if j > 0 {
                    neighbours.push(snapshot[i * nmu + j - 1]);
                }
                if j + 1 < nmu {
                    neighbours.push(snapshot[i * nmu + j + 1]);
                }
                let known: Vec<f64> = neighbours.into_iter().flatten().collect();
                if !known.is_empty() {
                    g[i * nmu + j] = Some(known.iter().sum::<f64>() / known.len() as f64);
                }
            }
        }
    }
    Ok(g.into_iter().map(|x| x.unwrap_or_default()).collect())
}

/// Labels connected insulating regions (4-neighbour) with a common rounded
/// occupation; returns per-cell labels and each label's occupation.
fn label_lobes(grid: &PhaseGrid) -> (Vec<Option<usize>>, Vec<usize>) {
    let (nk, nmu) = (grid.spec.nk, grid.spec.nmu);
    let occupation = |idx: usize| match &grid.cells[idx] {
        Ok(s) if s.phase == Phase::MottInsulator => Some(s.rho.round().max(0.0) as usize),
        _ => None,
    };
    let mut labels = vec![None; nk * nmu];
    let mut occupations = Vec::new();
    for seed in 0..nk * nmu {
        let Some(n) = occupation(seed) else { continue };
        if labels[seed].is_some() {
            continue;
        }
        let label = occupations.len();
        occupations.push(n);
        labels[seed] = Some(label);
        let mut stack = vec![seed];
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx / nmu, idx % nmu);
            let mut visit = |k: usize| {
                if labels[k].is_none() && occupation(k) == Some(n) {
                    labels[k] = Some(label);
                    stack.push(k);
                }
            };
            if i > 0 {
                visit(idx - nmu);
            }
            if i + 1 < nk {
                visit(idx + nmu);
            }
            if j > 0 {
                visit(idx - 1);
            }
            if j + 1 < nmu {
                visit(idx + 1);
            }
        }
    }
    (labels, occupations)
}

/// One contour per Mott lobe, ordered by `(μ−ω)/β` at the smallest `κ`.
///
/// For each lobe the field is `−g` on its own cells and `−|g|` elsewhere, with
/// `g = log10(ψ + floor) − log10(threshold)`: the zero level follows the
/// superfluid threshold and falls midway between neighbouring lobes.
/// Returns nothing when no cell is superfluid.
pub fn extract_lobe_boundary(grid: &PhaseGrid) -> Result<Vec<LobeBoundary>> {
    if grid.cells.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.cells.len() != grid.spec.len() {
        return Err(Error::InvalidGrid(format!(
            "{} cells for a {}×{} grid",
            grid.cells.len(),
            grid.spec.nk,
            grid.spec.nmu
        )));
    }
    let any_superfluid = grid
        .cells
        .iter()
        .any(|c| matches!(c, Ok(s) if s.phase == Phase::Superfluid));
    if !any_superfluid {
        return Ok(Vec::new());
    }
    let g = log_psi_field(grid)?;
    let (labels, occupations) = label_lobes(grid);
    let (kappas, mu_rels) = (grid.spec.kappas(), grid.spec.mu_rels());
    let nmu = grid.spec.nmu;

    let mut lobes = Vec::new();
    for (label, &occupation) in occupations.iter().enumerate() {
        let field: Vec<f64> = labels
            .iter()
            .zip(&g)
            .map(|(l, &v)| if *l == Some(label) { -v } else { -v.abs() })
            .collect();
        let lines = iso_lines(&kappas, &mu_rels, &field, 0.0);
        if lines.is_empty() {
            continue;
        }
        let kappa_tip = lines
            .iter()
            .flatten()
            .map(|p| p[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut intercepts: Vec<f64> = lines
            .iter()
            .flat_map(|l| [l[0], l[l.len() - 1]])
            .filter(|p| p[0] == kappas[0])
            .map(|p| p[1])
            .collect();
        intercepts.sort_by(f64::total_cmp);
        intercepts.dedup();
        let first = labels
            .iter()
            .position(|l| *l == Some(label))
            .expect("label has cells");
        let key = (first / nmu, first % nmu);
        lobes.push((
            key,
            LobeBoundary {
                occupation,
                lines,
                kappa_tip,
                tip_resolved: kappa_tip < kappas[kappas.len() - 1],
                intercepts,
            },
        ));
    }
    lobes.sort_by_key(|(key, _)| *key);
    Ok(lobes.into_iter().map(|(_, b)| b).collect())
}

/// Tip of the lobe with occupation `n_lobe` for one atom number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipEntry {
    pub atoms: usize,
    pub n_lobe: usize,
    /// `None` when the lobe is absent or runs past `kappa_max`.
    pub kappa_tip: Option<f64>,
}

/// Runs `template` once per atom number and reports the tip of lobe `n_lobe`.
/// When several disconnected regions share the occupation, the one reaching
/// furthest in `κ` counts.
pub fn lobe_tip_scaling(
    atoms_list: &[usize],
    n_lobe: usize,
    template: &GridSpec,
    jobs: usize,
) -> Result<Vec<TipEntry>> {
    atoms_list
        .iter()
        .map(|&atoms| {
            let spec = GridSpec {
                params_base: template.params_base.with_atoms(atoms),
                ..*template
            };
            let grid = run_phase_diagram(&spec, jobs)?;
            let lobe = grid
                .boundaries
                .iter()
                .filter(|b| b.occupation == n_lobe)
                .max_by(|a, b| a.kappa_tip.total_cmp(&b.kappa_tip));
            let kappa_tip = lobe.filter(|b| b.tip_resolved).map(|b| b.kappa_tip);
            Ok(TipEntry {
                atoms,
                n_lobe,
                kappa_tip,
            })
        })
        .collect()
}
