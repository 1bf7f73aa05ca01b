//! Transport-ray decomposition of an optimal plan's support.
//!
//! From the support Γ of an exact optimal plan with distance cost we build
//! the cycle closure Γ′ (pairs that close zero-cost cycles), the oriented
//! ray relation G (points between some Γ′ pair along its segment), the
//! maximal chains (rays) with their 1D arc-length coordinates, endpoint
//! sets, and the disintegration of a measure along the rays.
//!
//! With a strictly convex ambient norm rays cannot branch; a detected branch
//! is reported as a tolerance failure with the witness triple.

use crate::measures::{cm_distance_unchecked, DiscreteMeasure, MeasureError, OneDimMeasure};
use crate::num::{compensated_sum, Real};
use crate::ot::TransportPlan;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Relative tolerance (scaled by instance diameter) for zero-cycle and
/// distance-additivity tests.
pub const ALIGNMENT_TOL: f64 = 1e-9;
/// Absolute slack for ray-coordinate vs pairwise-distance consistency.
pub const COORD_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum RayError {
    #[error("branching at point {point}: not collinear with axis {axis_a}-{axis_b} (residual {residual})")]
    Branching { point: usize, axis_a: usize, axis_b: usize, residual: f64 },
    #[error("ray coordinates inconsistent between points {a} and {b}: gap {gap}, distance {dist}")]
    CoordinateMismatch { a: usize, b: usize, gap: f64, dist: f64 },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Deduplicated union of a plan's source and target support points, with the
/// plan support Γ as combined-point-id pairs.
#[derive(Debug, Clone)]
pub struct PlanSupport<F: Real = f64> {
    pub points: Vec<Vec<F>>,
    pub pairs: BTreeSet<(usize, usize)>,
    /// source atom index -> combined point id
    pub source_point: Vec<usize>,
    /// target atom index -> combined point id
    pub target_point: Vec<usize>,
}

fn bits_key<F: Real>(p: &[F]) -> Vec<u64> {
    p.iter().map(|c| c.to_f64_lossy().to_bits()).collect()
}

impl<F: Real> PlanSupport<F> {
    pub fn from_plan(plan: &TransportPlan<F>) -> Self {
        let mut points: Vec<Vec<F>> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut intern = |p: &[F], points: &mut Vec<Vec<F>>| -> usize {
            *index.entry(bits_key(p)).or_insert_with(|| {
                points.push(p.to_vec());
                points.len() - 1
            })
        };
        let source_point: Vec<usize> =
            (0..plan.source.len()).map(|i| intern(plan.source.point(i), &mut points)).collect();
        let target_point: Vec<usize> =
            (0..plan.target.len()).map(|j| intern(plan.target.point(j), &mut points)).collect();
        let pairs = plan
            .pairs
            .iter()
            .map(|&(i, j, _)| (source_point[i], target_point[j]))
            .collect();
        PlanSupport { points, pairs, source_point, target_point }
    }

    pub fn diameter(&self) -> F {
        let mut d = F::zero();
        for a in &self.points {
            for b in &self.points {
                d = d.max(cm_distance_unchecked(a, b));
            }
        }
        d
    }
}

fn zero_tol<F: Real>(points: &[Vec<F>]) -> F {
    let mut diam = F::zero();
    for a in points {
        for b in points {
            diam = diam.max(cm_distance_unchecked(a, b));
        }
    }
    F::of(ALIGNMENT_TOL) * (F::one() + diam)
}

/// Cycle closure Γ′ ⊇ Γ: adds (w_0, z_I) whenever a chain of Γ pairs closes a
/// zero-cost cycle of length at most `max_cycle_len`.
pub fn build_gamma_prime<F: Real>(
    points: &[Vec<F>],
    gamma: &BTreeSet<(usize, usize)>,
    max_cycle_len: usize,
) -> BTreeSet<(usize, usize)> {
    assert!(max_cycle_len >= 1);
    let tol = zero_tol(points);
    let dist = |a: usize, b: usize| cm_distance_unchecked(&points[a], &points[b]);

    let mut closure: BTreeSet<(usize, usize)> = gamma.clone();
    // tuple = (w_0, z_0), ..., (w_I, z_I); partial = Σ_{i<I} d(w_{i+1}, z_i) - Σ_i d(w_i, z_i)
    let mut stack: Vec<usize> = Vec::new();
    fn recurse<F: Real>(
        pairs: &[(usize, usize)],
        stack: &mut Vec<usize>,
        partial: F,
        max_len: usize,
        tol: F,
        dist: &impl Fn(usize, usize) -> F,
        closure: &mut BTreeSet<(usize, usize)>,
    ) {
        let first = pairs[stack[0]];
        let last = pairs[*stack.last().unwrap()];
        // close the cycle: w_{I+1} = w_0
        let total = partial + dist(first.0, last.1) - dist(last.0, last.1);
        if total.abs() <= tol {
            closure.insert((first.0, last.1));
        }
        if stack.len() == max_len {
            return;
        }
        for (k, &(w, _z)) in pairs.iter().enumerate() {
            // extend: previous tail z_I connects to new head w_{I+1} = w
            let step = partial + dist(w, last.1) - dist(last.0, last.1);
            stack.push(k);
            recurse(pairs, stack, step, max_len, tol, dist, closure);
            stack.pop();
        }
    }
    // added pairs can close further cycles, so iterate to a fixed point
    loop {
        let pairs: Vec<(usize, usize)> = closure.iter().copied().collect();
        let before = closure.len();
        for k in 0..pairs.len() {
            stack.push(k);
            recurse(&pairs, &mut stack, F::zero(), max_cycle_len, tol, &dist, &mut closure);
            stack.pop();
        }
        if closure.len() == before {
            return closure;
        }
    }
}

/// One maximal chain of the ray relation.
#[derive(Debug, Clone)]
pub struct Ray<F: Real = f64> {
    /// Combined point ids ordered by the ray coordinate.
    pub point_ids: Vec<usize>,
    /// Arc-length coordinate per point, zero at the base.
    pub coords_t: Vec<F>,
    /// Cross-section representative: the minimal point in the G-order.
    pub base_id: usize,
}

/// Rays, endpoint sets, and the fixed set of a plan support.
#[derive(Debug, Clone)]
pub struct RayDecomposition<F: Real = f64> {
    pub rays: Vec<Ray<F>>,
    pub points: Vec<Vec<F>>,
    /// point id -> ray id, for every point lying on a ray
    pub point_to_ray: BTreeMap<usize, usize>,
    /// ray minima (no nontrivial incoming ray edge)
    pub initial_points: BTreeSet<usize>,
    /// ray maxima (no nontrivial outgoing ray edge)
    pub final_points: BTreeSet<usize>,
    /// interior transport set: points with both incoming and outgoing edges
    pub interior: BTreeSet<usize>,
    /// points touched only by degenerate pairs {x = y}
    pub unassigned: BTreeSet<usize>,
}

impl<F: Real> RayDecomposition<F> {
    /// Per-ray rows `ray_id,point_id,t,weight` for plotting; weights are
    /// looked up in `m` by exact coordinates (0 when absent).
    pub fn dump_csv(&self, m: &DiscreteMeasure<F>) -> String {
        let lookup: HashMap<Vec<u64>, F> = m
            .points()
            .iter()
            .zip(m.weights())
            .map(|(p, &w)| (bits_key(p), w))
            .collect();
        let mut out = String::from("ray_id,point_id,t,weight\n");
        for (rid, ray) in self.rays.iter().enumerate() {
            for (pid, t) in ray.point_ids.iter().zip(&ray.coords_t) {
                let w = lookup.get(&bits_key(&self.points[*pid])).copied().unwrap_or(F::zero());
                out.push_str(&format!("{},{},{},{}\n", rid, pid, t, w));
            }
        }
        out
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
        }
    }
}

/// Builds the oriented ray relation G, the maximal chains, and the endpoint
/// sets from a cyclically monotone Γ′.
pub fn build_rays<F: Real>(
    points: &[Vec<F>],
    gamma_prime: &BTreeSet<(usize, usize)>,
) -> Result<RayDecomposition<F>, RayError> {
    let tol = zero_tol(points);
    let n = points.len();
    let dist = |a: usize, b: usize| cm_distance_unchecked(&points[a], &points[b]);

    // G restricted to the finite point set: (x, y) with x strictly before y
    // on the segment of some (w, z) in Γ′
    let mut g_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut degenerate_only: BTreeSet<usize> = BTreeSet::new();
    for &(w, z) in gamma_prime {
        if dist(w, z) <= tol {
            degenerate_only.insert(w);
            degenerate_only.insert(z);
            continue;
        }
        let dwz = dist(w, z);
        // points on the segment [w, z]
        let mut on_seg: Vec<(F, usize)> = Vec::new();
        for x in 0..n {
            let detour = dist(w, x) + dist(x, z) - dwz;
            if detour.abs() <= tol {
                on_seg.push((dist(w, x), x));
            }
        }
        on_seg.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for i in 0..on_seg.len() {
            for j in (i + 1)..on_seg.len() {
                let (x, y) = (on_seg[i].1, on_seg[j].1);
                if dist(x, y) > tol {
                    g_edges.insert((x, y));
                    touched.insert(x);
                    touched.insert(y);
                }
            }
        }
    }
    let unassigned: BTreeSet<usize> =
        degenerate_only.difference(&touched).copied().collect();

    // components of R = G ∪ G⁻¹
    let mut uf = UnionFind::new(n);
    for &(x, y) in &g_edges {
        uf.union(x, y);
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &p in &touched {
        components.entry(uf.find(p)).or_default().push(p);
    }

    let mut incoming: BTreeMap<usize, usize> = BTreeMap::new();
    let mut outgoing: BTreeMap<usize, usize> = BTreeMap::new();
    for &(x, y) in &g_edges {
        *outgoing.entry(x).or_default() += 1;
        *incoming.entry(y).or_default() += 1;
    }

    let mut rays = Vec::new();
    let mut point_to_ray = BTreeMap::new();
    let mut initial_points = BTreeSet::new();
    let mut final_points = BTreeSet::new();
    let mut interior = BTreeSet::new();

    for (_, members) in components {
        // axis: the G-edge of largest span inside this component
        let (mut axis_a, mut axis_b, mut span) = (members[0], members[0], F::zero());
        for &x in &members {
            for &y in &members {
                if g_edges.contains(&(x, y)) && dist(x, y) > span {
                    span = dist(x, y);
                    axis_a = x;
                    axis_b = y;
                }
            }
        }
        let dir: Vec<F> = points[axis_b]
            .iter()
            .zip(&points[axis_a])
            .map(|(&b, &a)| (b - a) / span)
            .collect();

        // collinearity and 1D coordinates along the axis
        let mut chain: Vec<(F, usize)> = Vec::with_capacity(members.len());
        for &p in &members {
            let rel: Vec<F> = points[p]
                .iter()
                .zip(&points[axis_a])
                .map(|(&c, &a)| c - a)
                .collect();
            let t = compensated_sum(rel.iter().zip(&dir).map(|(&r, &e)| r * e));
            let mut res_sq = F::zero();
            for (r, &e) in rel.iter().zip(&dir) {
                let d = *r - t * e;
                res_sq = res_sq + d * d;
            }
            let residual = res_sq.sqrt();
            if residual > tol {
                return Err(RayError::Branching {
                    point: p,
                    axis_a,
                    axis_b,
                    residual: residual.to_f64_lossy(),
                });
            }
            chain.push((t, p));
        }
        chain.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let base_t = chain[0].0;
        let coords_t: Vec<F> = chain.iter().map(|&(t, _)| t - base_t).collect();
        let point_ids: Vec<usize> = chain.iter().map(|&(_, p)| p).collect();
        for k in 1..point_ids.len() {
            let gap = coords_t[k] - coords_t[k - 1];
            let d = dist(point_ids[k - 1], point_ids[k]);
            if (gap - d).abs() > F::of(COORD_TOL) * (F::one() + d) {
                return Err(RayError::CoordinateMismatch {
                    a: point_ids[k - 1],
                    b: point_ids[k],
                    gap: gap.to_f64_lossy(),
                    dist: d.to_f64_lossy(),
                });
            }
        }

        let ray_id = rays.len();
        for (k, &p) in point_ids.iter().enumerate() {
            point_to_ray.insert(p, ray_id);
            let has_in = incoming.get(&p).copied().unwrap_or(0) > 0;
            let has_out = outgoing.get(&p).copied().unwrap_or(0) > 0;
            debug_assert!(has_in || has_out);
            if !has_in {
                initial_points.insert(p);
            }
            if !has_out {
                final_points.insert(p);
            }
            if has_in && has_out {
                interior.insert(p);
            }
            let _ = k;
        }
        let base_id = point_ids[0];
        rays.push(Ray { point_ids, coords_t, base_id });
    }

    Ok(RayDecomposition {
        rays,
        points: points.to_vec(),
        point_to_ray,
        initial_points,
        final_points,
        interior,
        unassigned,
    })
}

/// Conditional measures of `m` along the rays of a decomposition.
#[derive(Debug, Clone)]
pub struct Disintegration<F: Real = f64> {
    /// ray id -> conditional probability measure in ray coordinates
    pub conditionals: BTreeMap<usize, OneDimMeasure<F>>,
    /// ray id -> (atom index in `m`, ray coordinate, weight), sorted by t
    pub atoms: BTreeMap<usize, Vec<(usize, F, F)>>,
    /// quotient measure: ray id -> mass carried by that ray
    pub quotient: BTreeMap<usize, F>,
    /// atoms of `m` lying on no ray: (atom index, weight)
    pub unassigned: Vec<(usize, F)>,
}

impl<F: Real> Disintegration<F> {
    pub fn assigned_mass(&self) -> F {
        compensated_sum(self.quotient.values().copied())
    }

    pub fn unassigned_mass(&self) -> F {
        compensated_sum(self.unassigned.iter().map(|&(_, w)| w))
    }
}

/// Splits `m` into per-ray conditionals plus the quotient measure.
///
/// Atoms are matched to ray points by exact coordinates; an atom on no ray is
/// reported in `unassigned` rather than failing (the full-mass property only
/// holds under the non-degeneracy assumption).
pub fn disintegrate_along_rays<F: Real>(
    m: &DiscreteMeasure<F>,
    decomp: &RayDecomposition<F>,
) -> Result<Disintegration<F>, RayError> {
    let point_index: HashMap<Vec<u64>, usize> = decomp
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (bits_key(p), i))
        .collect();
    let coord_of: BTreeMap<usize, (usize, F)> = decomp
        .rays
        .iter()
        .enumerate()
        .flat_map(|(rid, ray)| {
            ray.point_ids
                .iter()
                .zip(&ray.coords_t)
                .map(move |(&pid, &t)| (pid, (rid, t)))
        })
        .collect();

    let mut atoms: BTreeMap<usize, Vec<(usize, F, F)>> = BTreeMap::new();
    let mut unassigned = Vec::new();
    for (idx, p) in m.points().iter().enumerate() {
        let w = m.weight(idx);
        match point_index.get(&bits_key(p)).and_then(|pid| coord_of.get(pid)) {
            Some(&(rid, t)) => atoms.entry(rid).or_default().push((idx, t, w)),
            None => unassigned.push((idx, w)),
        }
    }

    let mut conditionals = BTreeMap::new();
    let mut quotient = BTreeMap::new();
    for (rid, entries) in &mut atoms {
        entries.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mass = compensated_sum(entries.iter().map(|&(_, _, w)| w));
        let cond = OneDimMeasure::new(
            entries.iter().map(|&(_, t, _)| t).collect(),
            entries.iter().map(|&(_, _, w)| w).collect(),
        )?;
        conditionals.insert(*rid, cond);
        quotient.insert(*rid, mass);
    }

    Ok(Disintegration { conditionals, atoms, quotient, unassigned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::DiscreteMeasure;
    use crate::ot::{solve_kantorovich, CostKind};

    fn pts1d(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    fn pairs(ps: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        ps.iter().copied().collect()
    }

    #[test]
    fn gamma_prime_single_pair_unchanged() {
        let points = pts1d(&[0.0, 2.0]);
        let gamma = pairs(&[(0, 1)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        assert_eq!(closure, gamma);
    }

    #[test]
    fn gamma_prime_chain_closes() {
        // Γ = {(0,2), (2,4)} on the line: cycle sum d(2,2)+d(0,4)-d(0,2)-d(2,4) = 0
        let points = pts1d(&[0.0, 2.0, 4.0]);
        let gamma = pairs(&[(0, 1), (1, 2)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        assert!(closure.contains(&(0, 2)), "long pair added");
        assert!(closure.contains(&(1, 1)), "degenerate pair added");
        assert!(closure.is_superset(&gamma));
    }

    #[test]
    fn gamma_prime_generic_2d_unchanged() {
        let points = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 0.0], vec![6.0, -1.0]];
        let gamma = pairs(&[(0, 1), (2, 3)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        assert_eq!(closure, gamma);
    }

    #[test]
    fn gamma_prime_idempotent() {
        let points = pts1d(&[0.0, 2.0, 4.0]);
        let gamma = pairs(&[(0, 1), (1, 2)]);
        let once = build_gamma_prime(&points, &gamma, 3);
        let twice = build_gamma_prime(&points, &once, 3);
        assert_eq!(once, twice);
    }

    #[test]
    fn chain_ray_endpoints_and_interior() {
        let points = pts1d(&[0.0, 2.0, 4.0]);
        let gamma = pairs(&[(0, 1), (1, 2)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        let decomp = build_rays(&points, &closure).unwrap();
        assert_eq!(decomp.rays.len(), 1);
        let ray = &decomp.rays[0];
        assert_eq!(ray.point_ids, vec![0, 1, 2]);
        assert_eq!(ray.coords_t, vec![0.0, 2.0, 4.0]);
        assert_eq!(ray.base_id, 0);
        assert_eq!(decomp.initial_points.iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(decomp.final_points.iter().copied().collect::<Vec<_>>(), vec![2]);
        assert_eq!(decomp.interior.iter().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn parallel_segments_two_rays() {
        let points = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 5.0], vec![1.0, 5.0]];
        let gamma = pairs(&[(0, 1), (2, 3)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        let decomp = build_rays(&points, &closure).unwrap();
        assert_eq!(decomp.rays.len(), 2);
        let all: BTreeSet<usize> =
            decomp.rays.iter().flat_map(|r| r.point_ids.iter().copied()).collect();
        assert_eq!(all.len(), 4, "no shared points");
    }

    #[test]
    fn all_degenerate_pairs_empty_decomposition() {
        let points = pts1d(&[0.0, 1.0]);
        let gamma = pairs(&[(0, 0), (1, 1)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        let decomp = build_rays(&points, &closure).unwrap();
        assert!(decomp.rays.is_empty());
        assert_eq!(decomp.unassigned.len(), 2);
    }

    #[test]
    fn branching_detected() {
        // forced branch: two non-collinear segments sharing interior point 1
        let points = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0]];
        let gamma = pairs(&[(0, 2), (1, 3)]);
        // both segments pass through point 1: [0,2] contains it; [1,3] starts there
        let err = build_rays(&points, &gamma);
        assert!(matches!(err, Err(RayError::Branching { .. })), "{err:?}");
    }

    #[test]
    fn disintegrate_chain_example() {
        let points = pts1d(&[0.0, 2.0, 4.0]);
        let gamma = pairs(&[(0, 1), (1, 2)]);
        let closure = build_gamma_prime(&points, &gamma, 3);
        let decomp = build_rays(&points, &closure).unwrap();
        let mu: DiscreteMeasure =
            DiscreteMeasure::probability(pts1d(&[0.0, 2.0]), vec![0.5, 0.5]).unwrap();
        let dis = disintegrate_along_rays(&mu, &decomp).unwrap();
        assert_eq!(dis.conditionals.len(), 1);
        let cond = &dis.conditionals[&0];
        assert_eq!(cond.positions(), &[0.0, 2.0]);
        assert_eq!(cond.weights(), &[0.5, 0.5]);
        assert!((dis.quotient[&0] - 1.0).abs() < 1e-12);
        assert!(dis.unassigned.is_empty());
    }

    #[test]
    fn disintegrate_two_rays_even_split() {
        let points = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 5.0], vec![1.0, 5.0]];
        let gamma = pairs(&[(0, 1), (2, 3)]);
        let decomp = build_rays(&points, &build_gamma_prime(&points, &gamma, 3)).unwrap();
        let mu: DiscreteMeasure = DiscreteMeasure::probability(
            vec![vec![0.0, 0.0], vec![0.0, 5.0]],
            vec![0.5, 0.5],
        )
        .unwrap();
        let dis = disintegrate_along_rays(&mu, &decomp).unwrap();
        let q: Vec<f64> = dis.quotient.values().copied().collect();
        assert_eq!(q, vec![0.5, 0.5]);
    }

    #[test]
    fn off_ray_atom_reported_unassigned() {
        let points = pts1d(&[0.0, 2.0]);
        let gamma = pairs(&[(0, 1)]);
        let decomp = build_rays(&points, &gamma).unwrap();
        let mu: DiscreteMeasure =
            DiscreteMeasure::probability(pts1d(&[0.0, 77.0]), vec![0.5, 0.5]).unwrap();
        let dis = disintegrate_along_rays(&mu, &decomp).unwrap();
        assert_eq!(dis.unassigned.len(), 1);
        assert!((dis.assigned_mass() + dis.unassigned_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generic_random_data_rays_are_single_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cloud = |rng: &mut rand_chacha::ChaCha8Rng| {
            let pts: Vec<Vec<f64>> =
                (0..8).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            DiscreteMeasure::probability(pts, vec![0.125; 8]).unwrap()
        };
        let mu = cloud(&mut rng);
        let nu = cloud(&mut rng);
        let (plan, _) = solve_kantorovich(&mu, &nu, CostKind::Euclidean).unwrap();
        let support = PlanSupport::from_plan(&plan);
        let closure = build_gamma_prime(&support.points, &support.pairs, 3);
        let decomp = build_rays(&support.points, &closure).unwrap();
        for ray in &decomp.rays {
            assert_eq!(ray.point_ids.len(), 2, "generic data: rays are single pairs");
        }
    }

    #[test]
    fn g_is_total_order_on_each_ray() {
        // transitivity of the chain order holds exhaustively on the 1D chain
        let points = pts1d(&[0.0, 1.0, 3.0, 6.0]);
        let gamma = pairs(&[(0, 1), (1, 2), (2, 3)]);
        let closure = build_gamma_prime(&points, &gamma, 4);
        let decomp = build_rays(&points, &closure).unwrap();
        assert_eq!(decomp.rays.len(), 1);
        let ray = &decomp.rays[0];
        for k in 1..ray.coords_t.len() {
            assert!(ray.coords_t[k] > ray.coords_t[k - 1]);
        }
    }
}
