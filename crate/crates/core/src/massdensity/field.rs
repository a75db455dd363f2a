// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mass-density mean 𝓜, variance 𝓥 and accessibility ratio 𝓡.
//!
//! All moments are taken of cell- (or region-) integrated mass operators
//! `M_c = Σ_k m_k · 1[x_k ∈ c]`, whose distribution is read off the
//! state's configuration probabilities. The reported density is
//! `E[M_c] / width_c`; the ratio is the dimensionless `√Var(M_c) / E[M_c]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BranchState, SpatialGrid, State, WaveFunction};

/// CAM threshold used when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Cells whose integrated mass is at most this fraction of the total are
/// excluded from classification (ratio undefined).
pub const MASS_FLOOR_FRACTION: f64 = 1e-12;

/// Geometry of the cells (or regions) a field is reported on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub labels: Vec<String>,
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
}

impl Layout {
    pub fn of_grid(grid: &SpatialGrid) -> Self {
        Self {
            labels: (0..grid.cell_count()).map(|i| i.to_string()).collect(),
            centers: grid.centers(),
            widths: vec![grid.cell_width(); grid.cell_count()],
        }
    }

    pub fn of_regions(state: &BranchState) -> Self {
        let regions = state.regions();
        Self {
            labels: regions.iter().map(|r| r.name.clone()).collect(),
            centers: regions.iter().map(|r| r.center).collect(),
            widths: regions.iter().map(|r| r.width).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// First and second moments of the integrated mass in each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMoments {
    pub layout: Layout,
    /// `E[M_c]`, mass units.
    pub mass: Vec<f64>,
    /// `Var(M_c)`, mass² units.
    pub variance: Vec<f64>,
    pub total_mass: f64,
}

impl MassMoments {
    /// `E[M_c] / width_c`.
    pub fn density(&self) -> Vec<f64> {
        self.mass
            .iter()
            .zip(&self.layout.widths)
            .map(|(m, w)| m / w)
            .collect()
    }
}

pub fn moments(state: &State) -> MassMoments {
    match state {
        State::WaveFunction(wf) => wave_moments(wf),
        State::Branch(bs) => branch_moments(bs),
    }
}

/// Mass density 𝓜 per cell (wavefunction) or region (branch state).
pub fn mass_density(state: &State) -> Vec<f64> {
    moments(state).density()
}

/// Variance 𝓥 of the integrated mass per cell or region.
pub fn mass_variance(state: &State) -> Vec<f64> {
    moments(state).variance
}

/// Per-cell moments of a wavefunction.
pub fn wave_moments(wf: &WaveFunction) -> MassMoments {
    let cells = wf.grid().cell_count();
    let sets: Vec<Vec<usize>> = (0..cells).map(|c| vec![c]).collect();
    let (mass, variance) = set_moments(wf, &sets);
    MassMoments {
        layout: Layout::of_grid(wf.grid()),
        mass,
        variance,
        total_mass: wf.total_mass(),
    }
}

/// Moments of the mass inside each named set of cells.
pub fn wave_region_moments(wf: &WaveFunction, regions: &[(String, Vec<usize>)]) -> Result<MassMoments> {
    let grid = wf.grid();
    let mut layout = Layout {
        labels: Vec::new(),
        centers: Vec::new(),
        widths: Vec::new(),
    };
    for (name, cells) in regions {
        if cells.is_empty() {
            return Err(Error::Parameter(format!("region {name} has no cells")));
        }
        if let Some(&bad) = cells.iter().find(|&&c| c >= grid.cell_count()) {
            return Err(Error::Index {
                index: bad,
                len: grid.cell_count(),
            });
        }
        let center = cells.iter().map(|&c| grid.center(c)).sum::<f64>() / cells.len() as f64;
        layout.labels.push(name.clone());
        layout.centers.push(center);
        layout.widths.push(cells.len() as f64 * grid.cell_width());
    }
    let sets: Vec<Vec<usize>> = regions.iter().map(|(_, c)| c.clone()).collect();
    let (mass, variance) = set_moments(wf, &sets);
    Ok(MassMoments {
        layout,
        mass,
        variance,
        total_mass: wf.total_mass(),
    })
}

/// `Var(Σ_k m_k X_k) = Σ_k m_k² P_k(1−P_k) + Σ_{k≠l} m_k m_l (P_kl − P_k P_l)`
/// with `X_k = 1[x_k ∈ S]`.
fn set_moments(wf: &WaveFunction, sets: &[Vec<usize>]) -> (Vec<f64>, Vec<f64>) {
    let n = wf.particle_count();
    let cells = wf.grid().cell_count();
    let masses: Vec<f64> = wf.particles().iter().map(|p| p.mass).collect();
    let marginals: Vec<Vec<f64>> = (0..n)
        .map(|k| wf.marginal_probabilities(k).expect("k < n"))
        .collect();
    let mut pairs = Vec::new();
    for k in 0..n {
        for l in (k + 1)..n {
            pairs.push((k, l, wf.pair_probabilities(k, l).expect("k, l < n")));
        }
    }

    let mut mean = Vec::with_capacity(sets.len());
    let mut variance = Vec::with_capacity(sets.len());
    for set in sets {
        let p: Vec<f64> = marginals
            .iter()
            .map(|m| set.iter().map(|&c| m[c]).sum::<f64>())
            .collect();
        let mu: f64 = masses.iter().zip(&p).map(|(m, p)| m * p).sum();
        let mut var: f64 = masses
            .iter()
            .zip(&p)
            .map(|(m, p)| m * m * p * (1.0 - p))
            .sum();
        for (k, l, joint) in &pairs {
            let mut p_kl = 0.0;
            for &a in set {
                for &b in set {
                    p_kl += joint[a * cells + b];
                }
            }
            var += 2.0 * masses[*k] * masses[*l] * (p_kl - p[*k] * p[*l]);
        }
        mean.push(mu);
        variance.push(var.max(0.0));
    }
    (mean, variance)
}

/// Per-region moments of a branch state (two-pass over branches).
pub fn branch_moments(bs: &BranchState) -> MassMoments {
    let m = bs.particle_mass();
    let regions = bs.regions().len();
    let mut mass = vec![0.0; regions];
    for b in bs.branches() {
        let w = b.weight();
        for (acc, &n) in mass.iter_mut().zip(&b.occupancy) {
            *acc += w * n as f64 * m;
        }
    }
    let mut variance = vec![0.0; regions];
    for b in bs.branches() {
        let w = b.weight();
        for ((acc, &n), mu) in variance.iter_mut().zip(&b.occupancy).zip(&mass) {
            let d = n as f64 * m - mu;
            *acc += w * d * d;
        }
    }
    MassMoments {
        layout: Layout::of_regions(bs),
        mass,
        variance,
        total_mass: bs.total_mass(),
    }
}

/// `𝓡 = √𝓥 / 𝓜` on integrated masses; `None` where the mass is at or
/// below `mass_floor`.
pub fn accessibility_ratio(mass: &[f64], variance: &[f64], mass_floor: f64) -> Vec<Option<f64>> {
    mass.iter()
        .zip(variance)
        .map(|(&mu, &var)| (mu > mass_floor).then(|| var.max(0.0).sqrt() / mu))
        .collect()
}

/// CAM with threshold η: accessible iff the ratio is defined and `< η`.
pub fn classify_accessible(ratio: &[Option<f64>], threshold: f64) -> Result<Vec<bool>> {
    check_threshold(threshold)?;
    Ok(ratio
        .iter()
        .map(|r| matches!(r, Some(r) if *r < threshold))
        .collect())
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::Parameter(format!(
            "accessibility threshold must be positive and finite, got {threshold}"
        )));
    }
    Ok(())
}

/// 𝓜, 𝓥, 𝓡 and the CAM mask over one layout, with the threshold used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassDensityField {
    pub layout: Layout,
    /// 𝓜, mass per unit length.
    pub density: Vec<f64>,
    /// 𝓜 integrated over each cell.
    pub mass: Vec<f64>,
    pub variance: Vec<f64>,
    pub ratio: Vec<Option<f64>>,
    pub accessible: Vec<bool>,
    pub threshold: f64,
    pub mass_floor: f64,
    pub total_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smeared_density: Option<Vec<f64>>,
}

impl MassDensityField {
    pub fn from_moments(moments: MassMoments, threshold: f64) -> Result<Self> {
        let mass_floor = MASS_FLOOR_FRACTION * moments.total_mass;
        let ratio = accessibility_ratio(&moments.mass, &moments.variance, mass_floor);
        let accessible = classify_accessible(&ratio, threshold)?;
        Ok(Self {
            density: moments.density(),
            layout: moments.layout,
            mass: moments.mass,
            variance: moments.variance,
            ratio,
            accessible,
            threshold,
            mass_floor,
            total_mass: moments.total_mass,
            smeared_density: None,
        })
    }

    /// Same moments classified under another threshold.
    pub fn reclassified(&self, threshold: f64) -> Result<Self> {
        Ok(Self {
            accessible: classify_accessible(&self.ratio, threshold)?,
            threshold,
            ..self.clone()
        })
    }

    /// Attach a Gaussian-smeared copy of the density (width `alpha`).
    pub fn with_smearing(mut self, alpha: f64) -> Result<Self> {
        self.smeared_density = Some(smear_density(
            &self.density,
            &self.layout.centers,
            &self.layout.widths,
            alpha,
        )?);
        Ok(self)
    }

    pub fn integrated_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn accessible_count(&self) -> usize {
        self.accessible.iter().filter(|&&a| a).count()
    }

    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.layout.labels.iter().position(|l| l == label)
    }
}

/// Full field of a state under threshold η.
pub fn analyze(state: &State, threshold: f64) -> Result<MassDensityField> {
    MassDensityField::from_moments(moments(state), threshold)
}

/// Convolution of a density with a normalized Gaussian of width `alpha`;
/// preserves `Σ density · width`.
pub fn smear_density(density: &[f64], centers: &[f64], widths: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("smearing width must be positive, got {alpha}")));
    }
    let n = density.len();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let mass = density[j] * widths[j];
        if mass == 0.0 {
            continue;
        }
        let kernel: Vec<f64> = (0..n)
            .map(|i| {
                let d = (centers[i] - centers[j]) / alpha;
                (-0.5 * d * d).exp()
            })
            .collect();
        let norm: f64 = kernel.iter().zip(widths).map(|(k, w)| k * w).sum();
        for i in 0..n {
            out[i] += mass * kernel[i] / norm;
        }
    }
    Ok(out)
}
