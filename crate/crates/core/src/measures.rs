//! Discrete measures on ℝ^d and the one-dimensional quantile machinery.
//!
//! A [`DiscreteMeasure`] is a weighted point cloud; the transport layers treat
//! it as a (sub-)probability measure. [`OneDimMeasure`] is the conditional
//! measure living on a single transport ray, parametrized by the ray
//! coordinate.

use crate::num::{compensated_sum, Real};
use std::collections::HashMap;

/// Weights produced by arithmetic below this threshold are pruned.
pub const WEIGHT_PRUNE: f64 = 1e-15;

#[derive(Debug, thiserror::Error)]
pub enum MeasureError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point {index} has length {got}, expected {expected}")]
    PointLength { index: usize, got: usize, expected: usize },
    #[error("non-finite coordinate or weight at atom {0}")]
    NonFinite(usize),
    #[error("negative weight at atom {0}")]
    NegativeWeight(usize),
    #[error("measure has no mass")]
    ZeroMass,
    #[error("quantile level {0} outside [0, 1]")]
    QuantileOutOfRange(f64),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Weighted point cloud in ℝ^d.
///
/// `probability` normalizes the total mass to 1; `with_mass` keeps the raw
/// weights so that sub-measures (common mass, remainders) recombine exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<F: Real = f64> {
    points: Vec<Vec<F>>,
    weights: Vec<F>,
    dim: usize,
    /// Factor the raw weights were divided by on construction (1 for `with_mass`).
    renormalization: F,
}

impl<F: Real> DiscreteMeasure<F> {
    /// Builds a probability measure: validates, drops zero atoms, normalizes.
    pub fn probability(points: Vec<Vec<F>>, weights: Vec<F>) -> Result<Self, MeasureError> {
        let m = Self::with_mass(points, weights)?;
        let total = m.total_mass();
        if total <= F::zero() {
            return Err(MeasureError::ZeroMass);
        }
        Ok(DiscreteMeasure {
            weights: m.weights.iter().map(|&w| w / total).collect(),
            renormalization: total,
            ..m
        })
    }

    /// Builds a (sub-)measure keeping the raw weights.
    pub fn with_mass(points: Vec<Vec<F>>, weights: Vec<F>) -> Result<Self, MeasureError> {
        if points.len() != weights.len() {
            return Err(MeasureError::DimensionMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Ok(DiscreteMeasure { points, weights, dim: 0, renormalization: F::one() });
        }
        let dim = points[0].len();
        let mut kept_points = Vec::with_capacity(points.len());
        let mut kept_weights = Vec::with_capacity(points.len());
        for (i, (p, &w)) in points.iter().zip(weights.iter()).enumerate() {
            if p.len() != dim {
                return Err(MeasureError::PointLength { index: i, got: p.len(), expected: dim });
            }
            if !w.is_finite() || p.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::NonFinite(i));
            }
            if w < F::zero() {
                return Err(MeasureError::NegativeWeight(i));
            }
            if w > F::of(WEIGHT_PRUNE) {
                kept_points.push(p.clone());
                kept_weights.push(w);
            }
        }
        Ok(DiscreteMeasure {
            points: kept_points,
            weights: kept_weights,
            dim,
            renormalization: F::one(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<F>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[F] {
        &self.points[i]
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> F {
        self.weights[i]
    }

    pub fn total_mass(&self) -> F {
        compensated_sum(self.weights.iter().copied())
    }

    /// Factor the weights were divided by when the measure was normalized.
    pub fn renormalization(&self) -> F {
        self.renormalization
    }

    /// Rescales into a probability measure, returning the previous total mass.
    pub fn normalized(&self) -> Result<(Self, F), MeasureError> {
        let total = self.total_mass();
        if total <= F::zero() {
            return Err(MeasureError::ZeroMass);
        }
        Ok((
            DiscreteMeasure {
                points: self.points.clone(),
                weights: self.weights.iter().map(|&w| w / total).collect(),
                dim: self.dim,
                renormalization: total,
            },
            total,
        ))
    }

    /// Columnar CSV: one row per atom, weight then coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            out.push_str(&format!("{}", w));
            for c in p {
                out.push_str(&format!(",{}", c));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let w = parse_field::<F>(fields.next(), ln)?;
            let coords: Result<Vec<F>, _> = fields.map(|f| parse_field(Some(f), ln)).collect();
            weights.push(w);
            points.push(coords?);
        }
        Self::with_mass(points, weights)
    }

    /// Structured-text form equivalent to the CSV.
    pub fn to_text(&self) -> String {
        let mut out = format!("measure dim={} atoms={}\n", self.dim, self.points.len());
        for (p, w) in self.points.iter().zip(&self.weights) {
            out.push_str(&format!("atom {}", w));
            for c in p {
                out.push_str(&format!(" {}", c));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("measure") {
                continue;
            }
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("atom") => {}
                _ => {
                    return Err(MeasureError::Parse { line: ln, reason: "expected 'atom'".into() })
                }
            }
            let w = parse_field::<F>(fields.next(), ln)?;
            let coords: Result<Vec<F>, _> = fields.map(|f| parse_field(Some(f), ln)).collect();
            weights.push(w);
            points.push(coords?);
        }
        Self::with_mass(points, weights)
    }
}

fn parse_field<F: Real>(field: Option<&str>, line: usize) -> Result<F, MeasureError> {
    let s = field.ok_or(MeasureError::Parse { line, reason: "missing field".into() })?;
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| MeasureError::Parse { line, reason: format!("{e}: {s:?}") })?;
    F::from_f64(v).ok_or(MeasureError::Parse { line, reason: "unrepresentable".into() })
}

/// Cameron–Martin distance of projected coordinates: plain Euclidean norm of
/// the difference.
pub fn cm_distance<F: Real>(x: &[F], y: &[F]) -> Result<F, MeasureError> {
    if x.len() != y.len() {
        return Err(MeasureError::DimensionMismatch(x.len(), y.len()));
    }
    Ok(cm_distance_unchecked(x, y))
}

pub(crate) fn cm_distance_unchecked<F: Real>(x: &[F], y: &[F]) -> F {
    let mut s = F::zero();
    for (&a, &b) in x.iter().zip(y.iter()) {
        let d = a - b;
        s = s + d * d;
    }
    s.sqrt()
}

fn bits_key<F: Real>(p: &[F]) -> Vec<u64> {
    p.iter().map(|c| c.to_f64_lossy().to_bits()).collect()
}

/// Atomwise μ ∧ ν and the two remainders.
///
/// Coincidence is exact coordinate equality; the outputs are unnormalized so
/// that `μ = common + mu_rem` holds at the bit level atom by atom.
pub fn common_mass_split<F: Real>(
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
) -> Result<(DiscreteMeasure<F>, DiscreteMeasure<F>, DiscreteMeasure<F>), MeasureError> {
    if !mu.is_empty() && !nu.is_empty() && mu.dim() != nu.dim() {
        return Err(MeasureError::DimensionMismatch(mu.dim(), nu.dim()));
    }
    let nu_index: HashMap<Vec<u64>, usize> = nu
        .points()
        .iter()
        .enumerate()
        .map(|(j, p)| (bits_key(p), j))
        .collect();

    let mut common_pts = Vec::new();
    let mut common_w = Vec::new();
    let mut mu_rem_pts = Vec::new();
    let mut mu_rem_w = Vec::new();
    let mut nu_taken = vec![F::zero(); nu.len()];

    for (i, p) in mu.points().iter().enumerate() {
        let wi = mu.weight(i);
        match nu_index.get(&bits_key(p)) {
            Some(&j) => {
                let shared = wi.min(nu.weight(j));
                nu_taken[j] = shared;
                if shared > F::zero() {
                    common_pts.push(p.clone());
                    common_w.push(shared);
                }
                let rem = wi - shared;
                if rem > F::zero() {
                    mu_rem_pts.push(p.clone());
                    mu_rem_w.push(rem);
                }
            }
            None => {
                mu_rem_pts.push(p.clone());
                mu_rem_w.push(wi);
            }
        }
    }

    let mut nu_rem_pts = Vec::new();
    let mut nu_rem_w = Vec::new();
    for (j, p) in nu.points().iter().enumerate() {
        let rem = nu.weight(j) - nu_taken[j];
        if rem > F::zero() {
            nu_rem_pts.push(p.clone());
            nu_rem_w.push(rem);
        }
    }

    Ok((
        DiscreteMeasure::with_mass(common_pts, common_w)?,
        DiscreteMeasure::with_mass(mu_rem_pts, mu_rem_w)?,
        DiscreteMeasure::with_mass(nu_rem_pts, nu_rem_w)?,
    ))
}

/// Probability measure on ℝ with strictly increasing support.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDimMeasure<F: Real = f64> {
    positions: Vec<F>,
    weights: Vec<F>,
    cumulative: Vec<F>,
}

impl<F: Real> OneDimMeasure<F> {
    /// Merges duplicate positions, sorts, and normalizes to total mass 1.
    pub fn new(positions: Vec<F>, weights: Vec<F>) -> Result<Self, MeasureError> {
        if positions.len() != weights.len() {
            return Err(MeasureError::DimensionMismatch(positions.len(), weights.len()));
        }
        for (i, (&p, &w)) in positions.iter().zip(weights.iter()).enumerate() {
            if !p.is_finite() || !w.is_finite() {
                return Err(MeasureError::NonFinite(i));
            }
            if w < F::zero() {
                return Err(MeasureError::NegativeWeight(i));
            }
        }
        let mut order: Vec<usize> = (0..positions.len()).collect();
        order.sort_by(|&a, &b| positions[a].partial_cmp(&positions[b]).unwrap());
        let mut pos: Vec<F> = Vec::new();
        let mut wts: Vec<F> = Vec::new();
        for &i in &order {
            if weights[i] <= F::of(WEIGHT_PRUNE) {
                continue;
            }
            if let Some(&last) = pos.last() {
                if last == positions[i] {
                    let lw = wts.last_mut().unwrap();
                    *lw = *lw + weights[i];
                    continue;
                }
            }
            pos.push(positions[i]);
            wts.push(weights[i]);
        }
        let total = compensated_sum(wts.iter().copied());
        if total <= F::zero() {
            return Err(MeasureError::ZeroMass);
        }
        for w in &mut wts {
            *w = *w / total;
        }
        let mut cumulative = Vec::with_capacity(wts.len());
        let mut acc = F::zero();
        for &w in &wts {
            acc = acc + w;
            cumulative.push(acc);
        }
        // pin the final cumulative value; summation error otherwise leaks
        // into quantile inversion at q = 1
        if let Some(last) = cumulative.last_mut() {
            *last = F::one();
        }
        Ok(OneDimMeasure { positions: pos, weights: wts, cumulative })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[F] {
        &self.positions
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn cumulative(&self) -> &[F] {
        &self.cumulative
    }

    /// CDF at `x`: mass of (−∞, x].
    pub fn cdf(&self, x: F) -> F {
        match self.positions.iter().rposition(|&p| p <= x) {
            Some(i) => self.cumulative[i],
            None => F::zero(),
        }
    }
}

/// Right-continuous generalized inverse CDF: inf{x : F(x) ≥ q}.
///
/// Ties at atom boundaries resolve toward the smaller position.
pub fn quantile_function<F: Real>(m: &OneDimMeasure<F>, q: F) -> Result<F, MeasureError> {
    if !(q >= F::zero() && q <= F::one()) {
        return Err(MeasureError::QuantileOutOfRange(q.to_f64_lossy()));
    }
    let slack = F::of(1e-12);
    for (i, &c) in m.cumulative.iter().enumerate() {
        if c >= q - slack {
            return Ok(m.positions[i]);
        }
    }
    Ok(*m.positions.last().expect("nonempty measure"))
}
