// Copyright 2026 The grwm Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact N-particle wavefunctions (N ≤ 3) sampled on a 1D grid.
//!
//! Amplitudes are stored row-major over the N-fold product of grid cells,
//! particle 0 being the slowest-varying index. The normalization
//! convention is `Σ |ψ|² · dx^N = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{ParticleSpec, SpatialGrid};
use crate::error::{Error, Result};

pub const MAX_PARTICLES: usize = 3;

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WaveFunctionDoc", into = "WaveFunctionDoc")]
pub struct WaveFunction {
    grid: SpatialGrid,
    particles: Vec<ParticleSpec>,
    amplitudes: Vec<Complex64>,
    time: f64,
}

#[derive(Serialize, Deserialize)]
struct WaveFunctionDoc {
    grid: SpatialGrid,
    particles: Vec<ParticleSpec>,
    amplitudes: Vec<(f64, f64)>,
    #[serde(default)]
    time: f64,
}

impl TryFrom<WaveFunctionDoc> for WaveFunction {
    type Error = Error;

    fn try_from(doc: WaveFunctionDoc) -> Result<Self> {
        let raw = doc
            .amplitudes
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        Ok(normalize(raw, doc.grid, doc.particles)?.at_time(doc.time))
    }
}

impl From<WaveFunction> for WaveFunctionDoc {
    fn from(wf: WaveFunction) -> Self {
        WaveFunctionDoc {
            grid: wf.grid,
            particles: wf.particles,
            amplitudes: wf.amplitudes.iter().map(|a| (a.re, a.im)).collect(),
            time: wf.time,
        }
    }
}

/// Scales `raw` by a single positive real so that it satisfies the
/// normalization convention.
pub fn normalize(
    raw: Vec<Complex64>,
    grid: SpatialGrid,
    particles: Vec<ParticleSpec>,
) -> Result<WaveFunction> {
    let n = particles.len();
    if n == 0 || n > MAX_PARTICLES {
        return Err(Error::Parameter(format!(
            "wavefunctions hold 1..={MAX_PARTICLES} particles, got {n}; use BranchState for more"
        )));
    }
    for p in &particles {
        p.validate()?;
    }
    let expected = grid.cell_count().pow(n as u32);
    if raw.len() != expected {
        return Err(Error::InvalidState(format!(
            "amplitude array has {} entries, expected {} ({}^{})",
            raw.len(),
            expected,
            grid.cell_count(),
            n
        )));
    }
    if raw.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidState("non-finite amplitude".into()));
    }
    let volume = grid.cell_width().powi(n as i32);
    let norm_sq = raw.iter().map(|a| a.norm_sqr()).sum::<f64>() * volume;
    if !(norm_sq > 0.0) || !norm_sq.is_finite() {
        return Err(Error::ZeroState(format!("norm² = {norm_sq}")));
    }
    let scale = norm_sq.sqrt().recip();
    if !scale.is_finite() {
        return Err(Error::ZeroState(format!("norm² = {norm_sq} underflows")));
    }
    let amplitudes = raw.into_iter().map(|a| a * scale).collect();
    Ok(WaveFunction {
        grid,
        particles,
        amplitudes,
        time: 0.0,
    })
}

/// Pointwise linear combination `Σ c_i ψ_i`, renormalized.
pub fn superpose(terms: &[(Complex64, &WaveFunction)]) -> Result<WaveFunction> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::Parameter("superpose needs at least one term".into()))?;
    for (_, wf) in &terms[1..] {
        first.check_compatible(wf)?;
    }
    let mut raw = vec![Complex64::new(0.0, 0.0); first.amplitudes.len()];
    for (c, wf) in terms {
        for (acc, a) in raw.iter_mut().zip(&wf.amplitudes) {
            *acc += c * a;
        }
    }
    Ok(normalize(raw, first.grid.clone(), first.particles.clone())?.at_time(first.time))
}

/// Tensor product of single-particle factors.
pub fn product_state(factors: &[WaveFunction]) -> Result<WaveFunction> {
    let first = factors.first().ok_or(Error::EmptyProduct)?;
    for f in factors {
        if f.particle_count() != 1 {
            return Err(Error::IncompatibleState(
                "product_state factors must be single-particle states".into(),
            ));
        }
        if f.grid != first.grid {
            return Err(Error::IncompatibleState(
                "product_state factors live on different grids".into(),
            ));
        }
    }
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| f.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    let particles = factors
        .iter()
        .map(|f| f.particles[0].clone())
        .collect::<Vec<_>>();
    normalize(amplitudes, first.grid.clone(), particles).map(|wf| wf.at_time(first.time))
}

impl WaveFunction {
    /// Single-particle state from a sampled amplitude function.
    pub fn from_fn(
        grid: SpatialGrid,
        particle: ParticleSpec,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let raw = grid.centers().into_iter().map(f).collect();
        normalize(raw, grid, vec![particle])
    }

    /// Real Gaussian packet whose probability density has standard
    /// deviation `sigma` around `center`.
    pub fn gaussian(grid: SpatialGrid, particle: ParticleSpec, center: f64, sigma: f64) -> Result<Self> {
        Self::gaussian_with_momentum(grid, particle, center, sigma, 0.0)
    }

    pub fn gaussian_with_momentum(
        grid: SpatialGrid,
        particle: ParticleSpec,
        center: f64,
        sigma: f64,
        momentum: f64,
    ) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Parameter(format!("packet width must be positive, got {sigma}")));
        }
        Self::from_fn(grid, particle, |x| {
            let d = x - center;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), momentum * x)
        })
    }

    /// Particle sitting in exactly one cell.
    pub fn cell_eigenstate(grid: SpatialGrid, particle: ParticleSpec, cell: usize) -> Result<Self> {
        if cell >= grid.cell_count() {
            return Err(Error::Index {
                index: cell,
                len: grid.cell_count(),
            });
        }
        let mut raw = vec![Complex64::new(0.0, 0.0); grid.cell_count()];
        raw[cell] = Complex64::new(1.0, 0.0);
        normalize(raw, grid, vec![particle])
    }

    /// Uniform single-particle state over the given cells.
    pub fn uniform_over(grid: SpatialGrid, particle: ParticleSpec, cells: &[usize]) -> Result<Self> {
        let mut raw = vec![Complex64::new(0.0, 0.0); grid.cell_count()];
        for &c in cells {
            let slot = raw.get_mut(c).ok_or(Error::Index {
                index: c,
                len: grid.cell_count(),
            })?;
            *slot = Complex64::new(1.0, 0.0);
        }
        normalize(raw, grid, vec![particle])
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn particles(&self) -> &[ParticleSpec] {
        &self.particles
    }

    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    pub fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `dx^N`, the configuration-space volume element.
    pub fn volume_element(&self) -> f64 {
        self.grid.cell_width().powi(self.particle_count() as i32)
    }

    /// `Σ |ψ|² dx^N`; 1 up to rounding for every stored state.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.volume_element()
    }

    /// Probability of each configuration, `|ψ|² dx^N`.
    pub fn probabilities(&self) -> Vec<f64> {
        let v = self.volume_element();
        self.amplitudes.iter().map(|a| a.norm_sqr() * v).collect()
    }

    /// Stride of particle `k`'s cell index in the flat amplitude array.
    pub fn stride(&self, k: usize) -> usize {
        self.grid
            .cell_count()
            .pow((self.particle_count() - 1 - k) as u32)
    }

    /// Cell index of particle `k` in configuration `index`.
    pub fn cell_of_particle(&self, index: usize, k: usize) -> usize {
        (index / self.stride(k)) % self.grid.cell_count()
    }

    /// Marginal probability density of particle `k` (per unit length).
    pub fn marginal_density(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.particle_count();
        if k >= n {
            return Err(Error::Index { index: k, len: n });
        }
        let cells = self.grid.cell_count();
        let stride = self.stride(k);
        let weight = self.grid.cell_width().powi(n as i32 - 1);
        let mut out = vec![0.0; cells];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            out[(idx / stride) % cells] += a.norm_sqr();
        }
        for v in &mut out {
            *v *= weight;
        }
        Ok(out)
    }

    /// Marginal cell probabilities of particle `k` (density times width).
    pub fn marginal_probabilities(&self, k: usize) -> Result<Vec<f64>> {
        let dx = self.grid.cell_width();
        Ok(self.marginal_density(k)?.into_iter().map(|d| d * dx).collect())
    }

    /// Joint cell probabilities of particles `k` and `l`, as an
    /// `L × L` row-major matrix indexed `[cell_k * L + cell_l]`.
    pub fn pair_probabilities(&self, k: usize, l: usize) -> Result<Vec<f64>> {
        let n = self.particle_count();
        for &i in &[k, l] {
            if i >= n {
                return Err(Error::Index { index: i, len: n });
            }
        }
        let cells = self.grid.cell_count();
        let (sk, sl) = (self.stride(k), self.stride(l));
        let v = self.volume_element();
        let mut out = vec![0.0; cells * cells];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let ck = (idx / sk) % cells;
            let cl = (idx / sl) % cells;
            out[ck * cells + cl] += a.norm_sqr() * v;
        }
        Ok(out)
    }

    pub(crate) fn check_compatible(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleState("states live on different grids".into()));
        }
        if self.particles != other.particles {
            return Err(Error::IncompatibleState(
                "states carry different particle lists".into(),
            ));
        }
        Ok(())
    }

    /// Rebuild from raw amplitudes on the same grid and particles.
    pub(crate) fn with_raw_amplitudes(&self, raw: Vec<Complex64>, time: f64) -> Result<Self> {
        Ok(normalize(raw, self.grid.clone(), self.particles.clone())?.at_time(time))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= NORM_TOLERANCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid(n: usize, w: f64) -> SpatialGrid {
        SpatialGrid::new(n, w, 0.0).unwrap()
    }

    #[test]
    fn uniform_state_is_already_normalized() {
        let wf = normalize(vec![c(1.0); 10], grid(10, 0.1), vec![ParticleSpec::nucleon("p")]).unwrap();
        for a in wf.amplitudes() {
            assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_cell_normalization() {
        let wf = normalize(vec![c(2.0), c(0.0)], grid(2, 0.5), vec![ParticleSpec::nucleon("p")]).unwrap();
        assert_abs_diff_eq!(wf.amplitudes()[0].re, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(wf.amplitudes()[1], c(0.0));
    }

    #[test]
    fn zero_state_is_rejected() {
        let err = normalize(vec![c(0.0); 4], grid(4, 1.0), vec![ParticleSpec::nucleon("p")]).unwrap_err();
        assert!(matches!(err, Error::ZeroState(_)));
    }

    #[test]
    fn too_many_particles_rejected() {
        let ps = vec![ParticleSpec::nucleon("p"); 4];
        assert!(normalize(vec![c(1.0); 16], grid(2, 1.0), ps).is_err());
    }

    #[test]
    fn superpose_disjoint_supports_halves_probability() {
        let g = grid(8, 0.25);
        let p = ParticleSpec::nucleon("p");
        let a = WaveFunction::uniform_over(g.clone(), p.clone(), &[0, 1]).unwrap();
        let b = WaveFunction::uniform_over(g, p, &[5, 6]).unwrap();
        let s = 0.5f64.sqrt();
        let sup = superpose(&[(c(s), &a), (c(s), &b)]).unwrap();
        let probs = sup.marginal_probabilities(0).unwrap();
        assert_abs_diff_eq!(probs[0] + probs[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[5] + probs[6], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn superpose_identity_and_collinear() {
        let g = grid(8, 0.25);
        let p = ParticleSpec::nucleon("p");
        let psi = WaveFunction::gaussian(g.clone(), p.clone(), 1.0, 0.3).unwrap();
        let phi = WaveFunction::cell_eigenstate(g, p, 2).unwrap();
        let same = superpose(&[(c(1.0), &psi), (c(0.0), &phi)]).unwrap();
        let doubled = superpose(&[(c(1.0), &psi), (c(1.0), &psi)]).unwrap();
        for ((a, b), d) in psi.amplitudes().iter().zip(same.amplitudes()).zip(doubled.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((a - d).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn superpose_rejects_mismatched_grids() {
        let p = ParticleSpec::nucleon("p");
        let a = WaveFunction::cell_eigenstate(grid(4, 1.0), p.clone(), 0).unwrap();
        let b = WaveFunction::cell_eigenstate(grid(5, 1.0), p, 0).unwrap();
        assert!(matches!(
            superpose(&[(c(1.0), &a), (c(1.0), &b)]),
            Err(Error::IncompatibleState(_))
        ));
    }

    #[test]
    fn product_marginals_equal_factors() {
        let g = grid(16, 0.5);
        let a = WaveFunction::gaussian(g.clone(), ParticleSpec::nucleon("a"), 2.0, 0.6).unwrap();
        let b = WaveFunction::gaussian(g, ParticleSpec::nucleon("b"), 6.0, 0.8).unwrap();
        let prod = product_state(&[a.clone(), b.clone()]).unwrap();
        assert!(prod.is_normalized());
        for (k, f) in [a, b].iter().enumerate() {
            let m = prod.marginal_density(k).unwrap();
            let expected = f.marginal_density(0).unwrap();
            for (x, y) in m.iter().zip(&expected) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn product_edge_cases() {
        let p = ParticleSpec::nucleon("p");
        let a = WaveFunction::gaussian(grid(8, 0.5), p.clone(), 2.0, 0.5).unwrap();
        assert_eq!(product_state(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(product_state(&[]), Err(Error::EmptyProduct));
        let b = WaveFunction::gaussian(grid(9, 0.5), p, 2.0, 0.5).unwrap();
        assert!(matches!(product_state(&[a, b]), Err(Error::IncompatibleState(_))));
    }

    #[test]
    fn bell_state_marginals_split_evenly() {
        // (|AA> + |BB>)/sqrt2 with A = cell 0, B = cell 1 on a 2-cell grid.
        let g = grid(2, 1.0);
        let ps = vec![ParticleSpec::nucleon("a"), ParticleSpec::nucleon("b")];
        let s = 0.5f64.sqrt();
        let wf = normalize(vec![c(s), c(0.0), c(0.0), c(s)], g, ps).unwrap();
        for k in 0..2 {
            let m = wf.marginal_density(k).unwrap();
            assert_abs_diff_eq!(m[0], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(m[1], 0.5, epsilon = 1e-12);
        }
        assert!(matches!(wf.marginal_density(2), Err(Error::Index { .. })));
    }

    #[test]
    fn json_round_trip() {
        let g = grid(4, 0.5);
        let wf = WaveFunction::gaussian_with_momentum(g, ParticleSpec::nucleon("p"), 1.0, 0.4, 2.0)
            .unwrap()
            .at_time(0.25);
        let text = serde_json::to_string(&wf).unwrap();
        let back: WaveFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back.time(), 0.25);
        for (a, b) in wf.amplitudes().iter().zip(back.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }
}
