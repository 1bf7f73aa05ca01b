//! Gluing the one-dimensional monotone rearrangements along transport rays
//! into a single transport map, extended by the identity on fixed mass.

use crate::measures::{DiscreteMeasure, MeasureError, OneDimMeasure, WEIGHT_PRUNE};
use crate::num::{compensated_sum, Real};
use crate::ot::{CostKind, TransportPlan};
use crate::rays::{
    build_gamma_prime, build_rays, disintegrate_along_rays, PlanSupport, RayDecomposition,
    RayError,
};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum GlueError {
    #[error("ray {ray}: source mass {mu_mass} and target mass {nu_mass} disagree")]
    RayMassMismatch { ray: usize, mu_mass: f64, nu_mass: f64 },
    #[error("unassigned mass {0} off all rays")]
    UnassignedMass(f64),
    #[error("coupling requires equal masses: {0} vs {1}")]
    MassMismatch(f64, f64),
    #[error(transparent)]
    Ray(#[from] RayError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Quantile coupling between two 1D measures: indices into the two supports
/// plus the mass shared at matching quantile levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling1d<F: Real = f64> {
    pub pairs: Vec<(usize, usize, F)>,
    pub cost_abs: F,
    pub cost_sq: F,
}

/// Two-pointer sweep over cumulative masses. Entries must be sorted by
/// position; masses must agree within 1e-12.
fn quantile_coupling<F: Real>(
    mu: &[(F, F)],
    nu: &[(F, F)],
) -> Result<Coupling1d<F>, GlueError> {
    let mu_total = compensated_sum(mu.iter().map(|&(_, w)| w));
    let nu_total = compensated_sum(nu.iter().map(|&(_, w)| w));
    if (mu_total - nu_total).abs().to_f64_lossy() > 1e-12 * (1.0 + mu_total.to_f64_lossy()) {
        return Err(GlueError::MassMismatch(mu_total.to_f64_lossy(), nu_total.to_f64_lossy()));
    }
    let prune = F::of(WEIGHT_PRUNE);
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let mut ri = mu.first().map(|&(_, w)| w).unwrap_or(F::zero());
    let mut rj = nu.first().map(|&(_, w)| w).unwrap_or(F::zero());
    while i < mu.len() && j < nu.len() {
        let m = ri.min(rj);
        if m > prune {
            pairs.push((i, j, m));
        }
        ri = ri - m;
        rj = rj - m;
        if ri <= prune {
            i += 1;
            if i < mu.len() {
                ri = mu[i].1;
            }
        }
        if rj <= prune {
            j += 1;
            if j < nu.len() {
                rj = nu[j].1;
            }
        }
    }
    let cost_abs =
        compensated_sum(pairs.iter().map(|&(a, b, w)| w * (mu[a].0 - nu[b].0).abs()));
    let cost_sq = compensated_sum(pairs.iter().map(|&(a, b, w)| {
        let d = mu[a].0 - nu[b].0;
        w * d * d
    }));
    Ok(Coupling1d { pairs, cost_abs, cost_sq })
}

/// The monotone (quantile) coupling between two probability measures on ℝ.
///
/// Mass at quantile level q moves from the μ-quantile to the ν-quantile;
/// atoms split proportionally when levels straddle them.
pub fn monotone_coupling_1d<F: Real>(
    mu: &OneDimMeasure<F>,
    nu: &OneDimMeasure<F>,
) -> Result<Coupling1d<F>, GlueError> {
    let mu_entries: Vec<(F, F)> =
        mu.positions().iter().copied().zip(mu.weights().iter().copied()).collect();
    let nu_entries: Vec<(F, F)> =
        nu.positions().iter().copied().zip(nu.weights().iter().copied()).collect();
    quantile_coupling(&mu_entries, &nu_entries)
}

/// The glued transport map: per-ray monotone couplings plus identity on the
/// fixed mass, expressed over source/target atom indices.
#[derive(Debug, Clone)]
pub struct GluedMap<F: Real = f64> {
    /// source atom -> [(target atom, mass)], including fixed mass
    pub assignment: BTreeMap<usize, Vec<(usize, F)>>,
    /// ray id -> coupling in ray coordinates over that ray's atom lists
    pub per_ray: BTreeMap<usize, Coupling1d<F>>,
    /// identity-mapped mass: (source atom, target atom at the same point, mass)
    pub fixed: Vec<(usize, usize, F)>,
    /// transport cost of the glued map under `cost_kind`
    pub cost: F,
    pub cost_kind: CostKind,
}

impl<F: Real> GluedMap<F> {
    /// Push-forward of the source weights through the map.
    pub fn pushforward(&self, target_len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); target_len];
        for targets in self.assignment.values() {
            for &(j, w) in targets {
                out[j] = out[j] + w;
            }
        }
        out
    }

    /// True when every source atom maps to a single target and no target is
    /// hit twice.
    pub fn is_bijection(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.assignment.values().all(|targets| {
            targets.len() == 1 && seen.insert(targets[0].0)
        })
    }

    /// CSV rows `source,target,mass,ray` with `FIXED` for identity mass.
    pub fn to_csv(&self, ray_of_pair: &BTreeMap<(usize, usize), usize>) -> String {
        let mut out = String::from("source,target,mass,ray\n");
        let fixed: BTreeSet<(usize, usize)> =
            self.fixed.iter().map(|&(i, j, _)| (i, j)).collect();
        for (&i, targets) in &self.assignment {
            for &(j, w) in targets {
                let tag = if fixed.contains(&(i, j)) {
                    "FIXED".to_string()
                } else {
                    ray_of_pair.get(&(i, j)).map(|r| r.to_string()).unwrap_or_default()
                };
                out.push_str(&format!("{},{},{},{}\n", i, j, w, tag));
            }
        }
        out
    }
}

/// Per-ray inputs to [`glue`]: atom lists in ray coordinates.
pub type RayAtoms<F> = BTreeMap<usize, Vec<(usize, F, F)>>;

/// Glues the per-ray monotone couplings with the fixed identity mass.
///
/// `mu_atoms`/`nu_atoms` hold, per ray, the (atom index, ray coordinate,
/// weight) entries sorted by coordinate, as produced by
/// [`disintegrate_along_rays`].
pub fn glue<F: Real>(
    decomp: &RayDecomposition<F>,
    mu_atoms: &RayAtoms<F>,
    nu_atoms: &RayAtoms<F>,
    fixed: Vec<(usize, usize, F)>,
    cost_kind: CostKind,
) -> Result<GluedMap<F>, GlueError> {
    let mut assignment: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
    let mut per_ray = BTreeMap::new();
    let mut costs: Vec<F> = Vec::new();

    let rays: BTreeSet<usize> = mu_atoms.keys().chain(nu_atoms.keys()).copied().collect();
    for ray in rays {
        let empty = Vec::new();
        let mu_e = mu_atoms.get(&ray).unwrap_or(&empty);
        let nu_e = nu_atoms.get(&ray).unwrap_or(&empty);
        let mu_mass = compensated_sum(mu_e.iter().map(|&(_, _, w)| w));
        let nu_mass = compensated_sum(nu_e.iter().map(|&(_, _, w)| w));
        if (mu_mass - nu_mass).abs().to_f64_lossy() > 1e-10 {
            return Err(GlueError::RayMassMismatch {
                ray,
                mu_mass: mu_mass.to_f64_lossy(),
                nu_mass: nu_mass.to_f64_lossy(),
            });
        }
        if mu_mass <= F::of(WEIGHT_PRUNE) {
            continue;
        }
        // couple normalized conditionals, then scale back by the ray mass
        let mu_n: Vec<(F, F)> = mu_e.iter().map(|&(_, t, w)| (t, w / mu_mass)).collect();
        let nu_n: Vec<(F, F)> = nu_e.iter().map(|&(_, t, w)| (t, w / nu_mass)).collect();
        let coupling = quantile_coupling(&mu_n, &nu_n)?;
        for &(a, b, w) in &coupling.pairs {
            let mass = w * mu_mass;
            let (src, dst) = (mu_e[a].0, nu_e[b].0);
            assignment.entry(src).or_default().push((dst, mass));
            let d = (mu_e[a].1 - nu_e[b].1).abs();
            costs.push(match cost_kind {
                CostKind::Euclidean => mass * d,
                CostKind::SqEuclidean => mass * d * d,
            });
        }
        per_ray.insert(ray, coupling);
    }
    let _ = decomp;

    for &(i, j, w) in &fixed {
        assignment.entry(i).or_default().push((j, w));
    }
    let cost = compensated_sum(costs.into_iter());
    Ok(GluedMap { assignment, per_ray, fixed, cost, cost_kind })
}

/// Diagnostics comparing a glued map against the inputs and the plan it was
/// derived from.
#[derive(Debug, Clone)]
pub struct VerifyReport<F: Real = f64> {
    /// worst per-atom deviation of the push-forward from ν
    pub pushforward_residual: F,
    pub map_cost: F,
    pub plan_cost: F,
    pub cost_difference: F,
    /// within-ray order inversions, with witnesses
    pub monotonicity_violations: Vec<(usize, (usize, usize), (usize, usize))>,
    pub bijective: bool,
}

impl<F: Real> VerifyReport<F> {
    pub fn passed(&self) -> bool {
        self.pushforward_residual.to_f64_lossy() <= 1e-10
            && self.cost_difference.abs().to_f64_lossy()
                <= 1e-9 * (1.0 + self.plan_cost.to_f64_lossy().abs())
            && self.monotonicity_violations.is_empty()
    }
}

/// Checks push-forward, cost agreement with the plan, per-ray monotonicity,
/// and bijectivity.
pub fn verify_map<F: Real>(
    map: &GluedMap<F>,
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
    plan: &TransportPlan<F>,
) -> VerifyReport<F> {
    let push = map.pushforward(nu.len());
    let mut residual = F::zero();
    for (p, &w) in push.iter().zip(nu.weights()) {
        residual = residual.max((*p - w).abs());
    }
    // also check total source mass is preserved
    let mapped: F = compensated_sum(
        map.assignment.values().flat_map(|ts| ts.iter().map(|&(_, w)| w)),
    );
    residual = residual.max((mapped - mu.total_mass()).abs());

    let mut violations = Vec::new();
    for (&ray, coupling) in &map.per_ray {
        for (k, &(a, b, _)) in coupling.pairs.iter().enumerate() {
            for &(a2, b2, _) in coupling.pairs.iter().skip(k + 1) {
                if a < a2 && b > b2 {
                    violations.push((ray, (a, b), (a2, b2)));
                }
            }
        }
    }

    VerifyReport {
        pushforward_residual: residual,
        map_cost: map.cost,
        plan_cost: plan.cost,
        cost_difference: map.cost - plan.cost,
        monotonicity_violations: violations,
        bijective: map.is_bijection(),
    }
}

/// Everything produced by the ray pipeline for one instance.
#[derive(Debug)]
pub struct MongeResult<F: Real = f64> {
    pub support: PlanSupport<F>,
    pub gamma_prime: BTreeSet<(usize, usize)>,
    pub decomposition: RayDecomposition<F>,
    pub map: GluedMap<F>,
    pub report: VerifyReport<F>,
}

/// Full pipeline: plan support -> Γ′ -> rays -> disintegrations -> glued map.
///
/// Degenerate plan pairs (x = y) become fixed identity mass before the ray
/// machinery runs; remaining mass must disintegrate fully or the instance is
/// rejected.
pub fn build_monge_map<F: Real>(
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
    plan: &TransportPlan<F>,
    max_cycle_len: usize,
) -> Result<MongeResult<F>, GlueError> {
    let support = PlanSupport::from_plan(plan);

    // split off degenerate (fixed) plan mass
    let mut fixed: Vec<(usize, usize, F)> = Vec::new();
    let mut moving: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut mu_rem: Vec<F> = mu.weights().to_vec();
    let mut nu_rem: Vec<F> = nu.weights().to_vec();
    for &(i, j, w) in &plan.pairs {
        if support.source_point[i] == support.target_point[j] {
            fixed.push((i, j, w));
            mu_rem[i] = mu_rem[i] - w;
            nu_rem[j] = nu_rem[j] - w;
        } else {
            moving.insert((support.source_point[i], support.target_point[j]));
        }
    }

    let gamma_prime = build_gamma_prime(&support.points, &moving, max_cycle_len);
    let decomposition = build_rays(&support.points, &gamma_prime)?;

    // residual measures keep their original atom indices
    let keep = |weights: &[F], points: &DiscreteMeasure<F>| -> (Vec<usize>, DiscreteMeasure<F>) {
        let mut idx = Vec::new();
        let mut pts = Vec::new();
        let mut ws = Vec::new();
        for (k, &w) in weights.iter().enumerate() {
            if w > F::of(WEIGHT_PRUNE) {
                idx.push(k);
                pts.push(points.point(k).to_vec());
                ws.push(w);
            }
        }
        (idx, DiscreteMeasure::with_mass(pts, ws).expect("validated atoms"))
    };
    let (mu_idx, mu_res) = keep(&mu_rem, mu);
    let (nu_idx, nu_res) = keep(&nu_rem, nu);

    let relabel = |dis_atoms: RayAtoms<F>, idx: &[usize]| -> RayAtoms<F> {
        dis_atoms
            .into_iter()
            .map(|(ray, entries)| {
                (ray, entries.into_iter().map(|(a, t, w)| (idx[a], t, w)).collect())
            })
            .collect()
    };

    let (mu_atoms, nu_atoms, off_mass) = if mu_res.is_empty() && nu_res.is_empty() {
        (BTreeMap::new(), BTreeMap::new(), F::zero())
    } else {
        let mu_dis = disintegrate_along_rays(&mu_res, &decomposition)?;
        let nu_dis = disintegrate_along_rays(&nu_res, &decomposition)?;
        let off = mu_dis.unassigned_mass() + nu_dis.unassigned_mass();
        (relabel(mu_dis.atoms, &mu_idx), relabel(nu_dis.atoms, &nu_idx), off)
    };
    if off_mass.to_f64_lossy() > 1e-10 {
        return Err(GlueError::UnassignedMass(off_mass.to_f64_lossy()));
    }

    let map = glue(&decomposition, &mu_atoms, &nu_atoms, fixed, plan.cost_kind)?;
    let report = verify_map(&map, mu, nu, plan);
    Ok(MongeResult { support, gamma_prime, decomposition, map, report })
}
