//! Classical Wiener space instantiation: Karhunen–Loève basis of the
//! Cameron–Martin space, exact coefficient sampling of Brownian paths,
//! density reweighting, finite-dimensional projections, and the dimension
//! ladder checking that projected transport costs converge and saturate.

use crate::measures::DiscreteMeasure;
use crate::num::compensated_sum;
use crate::ot::{duality_gap, solve_kantorovich, CostKind, OtError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum WienerError {
    #[error("dimension {d} exceeds truncation {d_max}")]
    DimensionOutOfRange { d: usize, d_max: usize },
    #[error("density value {value} exceeds declared bound {bound}")]
    DensityAboveBound { value: f64, bound: f64 },
    #[error("all importance weights vanished")]
    ZeroWeight,
    #[error("ladder must be nonempty and strictly ascending")]
    BadLadder,
    #[error("ensemble cache: {0}")]
    BadCache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Ot(#[from] OtError),
}

/// Karhunen–Loève basis of H¹₀([0,1]):
/// e_k(t) = √2·sin((k−½)πt)/((k−½)π), k ≥ 1, with ‖e_k‖_H = 1, whose
/// Wiener coefficients are independent standard Gaussians.
#[derive(Debug, Clone, Copy)]
pub struct CameronMartinBasis {
    pub d_max: usize,
}

impl CameronMartinBasis {
    pub fn new(d_max: usize) -> Self {
        assert!(d_max >= 1);
        CameronMartinBasis { d_max }
    }

    fn omega(k: usize) -> f64 {
        (k as f64 - 0.5) * std::f64::consts::PI
    }

    /// e_k(t), k = 1, 2, …
    pub fn eval(&self, k: usize, t: f64) -> f64 {
        let w = Self::omega(k);
        std::f64::consts::SQRT_2 * (w * t).sin() / w
    }

    /// e_k′(t) = √2·cos((k−½)πt)
    pub fn eval_deriv(&self, k: usize, t: f64) -> f64 {
        std::f64::consts::SQRT_2 * (Self::omega(k) * t).cos()
    }

    /// ⟨e_j, e_k⟩_H = ∫₀¹ e_j′ e_k′ dt by trapezoid quadrature.
    pub fn h_inner(&self, j: usize, k: usize, nodes: usize) -> f64 {
        let h = 1.0 / (nodes - 1) as f64;
        compensated_sum((0..nodes).map(|i| {
            let t = h * i as f64;
            let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            w * h * self.eval_deriv(j, t) * self.eval_deriv(k, t)
        }))
    }

    /// The pairing ⟨ê_k, x⟩ extracting the k-th coefficient from a path
    /// sampled on a uniform grid: ((k−½)π)²·∫₀¹ x(t)e_k(t) dt.
    pub fn coeff(&self, k: usize, path: &[f64]) -> f64 {
        let nodes = path.len();
        let h = 1.0 / (nodes - 1) as f64;
        let w2 = Self::omega(k) * Self::omega(k);
        w2 * compensated_sum((0..nodes).map(|i| {
            let t = h * i as f64;
            let w = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
            w * h * path[i] * self.eval(k, t)
        }))
    }

    /// Path values Σ_k c_k e_k(t) on a uniform grid.
    pub fn reconstruct(&self, coeffs: &[f64], nodes: usize) -> Vec<f64> {
        let h = 1.0 / (nodes - 1) as f64;
        (0..nodes)
            .map(|i| {
                let t = h * i as f64;
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * self.eval(k + 1, t))
                    .sum()
            })
            .collect()
    }
}

/// A weighted ensemble of Brownian paths represented by their first `d_max`
/// KL coefficients. Coefficients are sampled exactly (no time-grid error).
#[derive(Debug, Clone)]
pub struct PathEnsemble {
    /// n × d_max, row-major
    pub coeffs: Vec<Vec<f64>>,
    /// importance weights, nonnegative, summing to 1
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl PathEnsemble {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn d_max(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }
}

/// Draws n i.i.d. standard-Gaussian coefficient vectors of length d_trunc;
/// deterministic per seed.
pub fn sample_paths(n: usize, d_trunc: usize, seed: u64) -> PathEnsemble {
    assert!(n >= 1 && d_trunc >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Vec<f64>> =
        (0..n).map(|_| (0..d_trunc).map(|_| rng.sample(StandardNormal)).collect()).collect();
    PathEnsemble { coeffs, weights: vec![1.0 / n as f64; n], seed }
}

/// Reweights the ensemble by a density ρ of the first m coefficients,
/// bounded by `bound`. Because ρ depends on m coordinates only, the
/// projected density equals ρ exactly for every d ≥ m.
pub fn reweight(
    ensemble: &PathEnsemble,
    rho: impl Fn(&[f64]) -> f64,
    m: usize,
    bound: f64,
) -> Result<PathEnsemble, WienerError> {
    assert!(m <= ensemble.d_max());
    let mut weights = Vec::with_capacity(ensemble.len());
    for (row, &w) in ensemble.coeffs.iter().zip(&ensemble.weights) {
        let value = rho(&row[..m]);
        if value > bound + 1e-12 * bound.max(1.0) {
            return Err(WienerError::DensityAboveBound { value, bound });
        }
        weights.push(w * value.max(0.0));
    }
    let total = compensated_sum(weights.iter().copied());
    if total <= 0.0 {
        return Err(WienerError::ZeroWeight);
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(PathEnsemble { coeffs: ensemble.coeffs.clone(), weights, seed: ensemble.seed })
}

/// The projected measure P_{d♯}: the weighted cloud of first-d coefficient
/// vectors. Cameron–Martin distance between projected paths is the Euclidean
/// distance of these vectors.
pub fn project_measure(ensemble: &PathEnsemble, d: usize) -> Result<DiscreteMeasure, WienerError> {
    if d == 0 || d > ensemble.d_max() {
        return Err(WienerError::DimensionOutOfRange { d, d_max: ensemble.d_max() });
    }
    let points: Vec<Vec<f64>> = ensemble.coeffs.iter().map(|row| row[..d].to_vec()).collect();
    DiscreteMeasure::probability(points, ensemble.weights.clone())
        .map_err(|e| WienerError::BadCache(e.to_string()))
}

/// Systematic resampling: `target` equal-weight draws, deterministic per
/// seed, with low variance (one uniform offset, stratified thresholds).
pub fn systematic_resample(weights: &[f64], target: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: f64 = rng.gen_range(0.0..1.0);
    let total = compensated_sum(weights.iter().copied());
    let mut indices = Vec::with_capacity(target);
    let mut cum = 0.0;
    let mut i = 0usize;
    for k in 0..target {
        let level = (k as f64 + offset) / target as f64 * total;
        while cum + weights[i] < level && i + 1 < weights.len() {
            cum += weights[i];
            i += 1;
        }
        indices.push(i);
    }
    indices
}

#[derive(Debug, Clone)]
pub struct LadderEntry {
    pub d: usize,
    pub n_effective: usize,
    pub cost: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct LadderReport {
    pub entries: Vec<LadderEntry>,
    pub m: usize,
    /// c_d nondecreasing within solver tolerance
    pub monotone: bool,
    /// c_d constant for d ≥ m within solver tolerance
    pub saturated: bool,
}

impl LadderReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,n_effective,cost,gap\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", e.d, e.n_effective, e.cost, e.gap));
        }
        out
    }
}

/// Specification of one side of the ladder problem: a bounded density of the
/// first m KL coefficients.
pub struct DensitySpec<'a> {
    pub rho: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    pub bound: f64,
}

/// Solves the projected transport problem for each dimension in `ladder`.
///
/// One common coefficient ensemble backs both measures; the m leading
/// coordinates are resampled to equal weights per measure, and for d > m the
/// discrete measures are built as (m-dim resampled heads) ⊗ (one shared tail
/// cloud). Both measures then factor with the same tail factor, so the
/// product coupling gives c_d ≤ c_m while the projection inequality gives
/// c_d ≥ c_m: saturation is exact up to solver tolerance, mirroring the
/// saturation of the continuum problem.
pub fn dimension_ladder(
    mu_spec: &DensitySpec,
    nu_spec: &DensitySpec,
    m: usize,
    ladder: &[usize],
    n: usize,
    head_count: usize,
    tail_count: usize,
    seed: u64,
) -> Result<LadderReport, WienerError> {
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WienerError::BadLadder);
    }
    let d_top = *ladder.last().unwrap();
    let d_max = d_top.max(m);
    let ensemble = sample_paths(n, d_max, seed);
    let mu_w = reweight(&ensemble, &mu_spec.rho, m, mu_spec.bound)?;
    let nu_w = reweight(&ensemble, &nu_spec.rho, m, nu_spec.bound)?;

    // the same resample indices serve every dimension, so the d-indexed
    // measures are prefix-nested and monotonicity is deterministic; common
    // random numbers on both sides keep identical densities identical
    let mu_idx = systematic_resample(&mu_w.weights, head_count, seed ^ 0x9e37_79b9);
    let nu_idx = systematic_resample(&nu_w.weights, head_count, seed ^ 0x9e37_79b9);
    // shared tail cloud: leading ensemble rows, coordinates m..d
    let tail_rows: Vec<&Vec<f64>> = ensemble.coeffs.iter().take(tail_count).collect();

    let cloud = |idx: &[usize], d: usize| -> Result<DiscreteMeasure, WienerError> {
        let points: Vec<Vec<f64>> = if d <= m {
            idx.iter().map(|&i| ensemble.coeffs[i][..d].to_vec()).collect()
        } else {
            idx.iter()
                .flat_map(|&i| {
                    let head = &ensemble.coeffs[i][..m];
                    tail_rows.iter().map(move |tail| {
                        head.iter().chain(&tail[m..d]).copied().collect::<Vec<f64>>()
                    })
                })
                .collect()
        };
        let k = points.len();
        DiscreteMeasure::probability(points, vec![1.0 / k as f64; k])
            .map_err(|e| WienerError::BadCache(e.to_string()))
    };

    let mut entries = Vec::new();
    for &d in ladder {
        let mu_d = cloud(&mu_idx, d)?;
        let nu_d = cloud(&nu_idx, d)?;
        let (plan, duals) = solve_kantorovich(&mu_d, &nu_d, CostKind::Euclidean)?;
        let gap = duality_gap(&plan, &duals);
        entries.push(LadderEntry {
            d,
            n_effective: mu_d.len(),
            cost: plan.cost,
            gap: gap.gap.abs(),
        });
    }

    let tol = |c: f64| 1e-9 * (1.0 + c.abs());
    let monotone = entries.windows(2).all(|w| w[1].cost >= w[0].cost - tol(w[0].cost));
    let at_m: Option<f64> = entries.iter().find(|e| e.d >= m).map(|e| e.cost);
    let saturated = match at_m {
        Some(cm) => entries
            .iter()
            .filter(|e| e.d >= m)
            .all(|e| (e.cost - cm).abs() <= tol(cm)),
        None => true,
    };
    Ok(LadderReport { entries, m, monotone, saturated })
}

const CACHE_MAGIC: &[u8; 8] = b"GOTENS01";

/// Writes the coefficient matrix with a 32-byte header
/// (magic, n, d, seed), little-endian f64 rows. Weights are not cached: the
/// cache holds raw (uniform-weight) ensembles.
pub fn save_ensemble(path: &Path, ensemble: &PathEnsemble) -> Result<(), WienerError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(CACHE_MAGIC)?;
    f.write_all(&(ensemble.len() as u64).to_le_bytes())?;
    f.write_all(&(ensemble.d_max() as u64).to_le_bytes())?;
    f.write_all(&ensemble.seed.to_le_bytes())?;
    let mut buf = Vec::with_capacity(ensemble.len() * ensemble.d_max() * 8);
    for row in &ensemble.coeffs {
        for &c in row {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    f.write_all(&buf)?;
    Ok(())
}

pub fn load_ensemble(path: &Path) -> Result<PathEnsemble, WienerError> {
    let mut f = std::fs::File::open(path)?;
    let mut header = [0u8; 32];
    f.read_exact(&mut header)?;
    if &header[..8] != CACHE_MAGIC {
        return Err(WienerError::BadCache("bad magic".to_string()));
    }
    let word = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().unwrap());
    let (n, d, seed) = (word(8) as usize, word(16) as usize, word(24));
    let mut body = Vec::new();
    f.read_to_end(&mut body)?;
    if body.len() != n * d * 8 {
        return Err(WienerError::BadCache(format!(
            "expected {} bytes of coefficients, found {}",
            n * d * 8,
            body.len()
        )));
    }
    let coeffs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let off = (i * d + j) * 8;
                    f64::from_le_bytes(body[off..off + 8].try_into().unwrap())
                })
                .collect()
        })
        .collect();
    Ok(PathEnsemble { coeffs, weights: vec![1.0 / n as f64; n], seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::cm_distance;

    #[test]
    fn basis_orthonormal_by_quadrature() {
        let basis = CameronMartinBasis::new(6);
        for j in 1..=6 {
            for k in 1..=6 {
                let ip = basis.h_inner(j, k, 40_001);
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-8, "<e{j},e{k}> = {ip}");
            }
        }
    }

    #[test]
    fn basis_paths_vanish_at_zero() {
        let basis = CameronMartinBasis::new(8);
        for k in 1..=8 {
            assert_eq!(basis.eval(k, 0.0), 0.0);
        }
    }

    #[test]
    fn coeff_pairing_recovers_coefficients() {
        let basis = CameronMartinBasis::new(4);
        let coeffs = [0.8, -1.3, 0.4, 2.1];
        let path = basis.reconstruct(&coeffs, 20_001);
        for (k, &c) in coeffs.iter().enumerate() {
            let got = basis.coeff(k + 1, &path);
            assert!((got - c).abs() < 1e-5, "coeff {k}: {got} vs {c}");
        }
    }

    #[test]
    fn sampling_deterministic_and_standardized() {
        let n = 100_000;
        let a = sample_paths(n, 2, 42);
        let b = sample_paths(n, 2, 42);
        assert_eq!(a.coeffs, b.coeffs);

        let mean = a.coeffs.iter().map(|r| r[0]).sum::<f64>() / n as f64;
        let var = a.coeffs.iter().map(|r| (r[0] - mean) * (r[0] - mean)).sum::<f64>()
            / (n as f64 - 1.0);
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt(), "var {var}");

        let corr = a.coeffs.iter().map(|r| r[0] * r[1]).sum::<f64>() / n as f64;
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr {corr}");
    }

    #[test]
    fn reweight_uniform_density_is_noop() {
        let e = sample_paths(1_000, 3, 1);
        let r = reweight(&e, |_| 1.0, 1, 1.0).unwrap();
        assert_eq!(r.weights, e.weights);
    }

    #[test]
    fn reweight_half_line() {
        let n = 100_000;
        let e = sample_paths(n, 1, 2);
        let r = reweight(&e, |x| if x[0] > 0.0 { 2.0 } else { 0.0 }, 1, 2.0).unwrap();
        let carried = r.weights.iter().filter(|&&w| w > 0.0).count() as f64 / n as f64;
        assert!((carried - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt(), "fraction {carried}");
    }

    #[test]
    fn reweight_radial_bump_matches_chi_square() {
        let n = 100_000;
        let r2 = 1.5f64;
        let e = sample_paths(n, 3, 3);
        let rho = |x: &[f64]| if x[0] * x[0] + x[1] * x[1] <= r2 { 1.0 } else { 0.0 };
        let w = reweight(&e, rho, 2, 1.0).unwrap();
        let carried = w.weights.iter().filter(|&&v| v > 0.0).count() as f64 / n as f64;
        let expected = 1.0 - (-r2 / 2.0).exp(); // chi-square(2) CDF
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((carried - expected).abs() < 4.0 * se, "{carried} vs {expected}");
    }

    #[test]
    fn reweight_rejects_bound_violation() {
        let e = sample_paths(100, 1, 4);
        assert!(matches!(
            reweight(&e, |_| 3.0, 1, 2.0),
            Err(WienerError::DensityAboveBound { .. })
        ));
    }

    #[test]
    fn projections_are_prefix_nested() {
        let e = sample_paths(50, 4, 5);
        let p2 = project_measure(&e, 2).unwrap();
        let p4 = project_measure(&e, 4).unwrap();
        for (a, b) in p2.points().iter().zip(p4.points()) {
            assert_eq!(a.as_slice(), &b[..2]);
        }
        assert!(project_measure(&e, 5).is_err());
    }

    #[test]
    fn projected_distance_is_euclidean() {
        let x = vec![1.0, 2.0];
        let y = vec![4.0, 6.0]; // difference (3, 4)
        assert_eq!(cm_distance(&x, &y).unwrap(), 5.0);
    }

    #[test]
    fn systematic_resample_tracks_weights() {
        let weights = vec![0.5, 0.25, 0.25];
        let idx = systematic_resample(&weights, 1_000, 9);
        let count0 = idx.iter().filter(|&&i| i == 0).count();
        assert!((count0 as f64 / 1_000.0 - 0.5).abs() < 0.01);
        assert_eq!(idx, systematic_resample(&weights, 1_000, 9));
    }

    #[test]
    fn ladder_identical_measures_zero_cost() {
        let spec = DensitySpec { rho: Box::new(|_| 1.0), bound: 1.0 };
        let rep =
            dimension_ladder(&spec, &spec, 1, &[1, 2, 4], 2_000, 32, 2, 7).unwrap();
        for e in &rep.entries {
            assert!(e.cost.abs() < 1e-12, "d={} cost {}", e.d, e.cost);
        }
        assert!(rep.monotone && rep.saturated);
    }

    #[test]
    fn ladder_m1_saturates() {
        let mu = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] > 0.0 { 2.0 } else { 0.0 }),
            bound: 2.0,
        };
        let nu = DensitySpec {
            rho: Box::new(|x: &[f64]| if x[0] <= 0.0 { 2.0 } else { 0.0 }),
            bound: 2.0,
        };
        let rep = dimension_ladder(&mu, &nu, 1, &[1, 2, 4, 8], 4_000, 48, 3, 11).unwrap();
        assert!(rep.monotone, "{:?}", rep.entries);
        assert!(rep.saturated, "{:?}", rep.entries);
        assert!(rep.entries[0].cost > 0.5, "moving between half-lines costs ~1.6");
    }

    #[test]
    fn ladder_rejects_unsorted() {
        let spec = DensitySpec { rho: Box::new(|_| 1.0), bound: 1.0 };
        assert!(matches!(
            dimension_ladder(&spec, &spec, 1, &[2, 1], 100, 8, 2, 1),
            Err(WienerError::BadLadder)
        ));
    }

    #[test]
    fn ensemble_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ens.bin");
        let e = sample_paths(64, 3, 77);
        save_ensemble(&path, &e).unwrap();
        let back = load_ensemble(&path).unwrap();
        assert_eq!(back.coeffs, e.coeffs);
        assert_eq!(back.seed, 77);
        assert_eq!(back.weights, e.weights);
    }

    #[test]
    fn ensemble_cache_rejects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ens.bin");
        let e = sample_paths(8, 2, 1);
        save_ensemble(&path, &e).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(load_ensemble(&path), Err(WienerError::BadCache(_))));
    }
}
