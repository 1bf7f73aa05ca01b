//! Exact Kantorovich solver for discrete measures with distance cost.
//!
//! The solver is a bipartite transportation simplex: exact optimizer support
//! is required downstream (the ray construction consumes the support of a
//! true optimizer, which entropic regularization would blur). Pivoting is
//! deterministic: entering arc is the most negative reduced cost with
//! lexicographic tie-break, leaving arc is the minimum-flow backward arc with
//! lexicographic tie-break, and a Bland fallback guards against cycling on
//! degenerate instances.

use crate::measures::{cm_distance_unchecked, DiscreteMeasure, MeasureError};
use crate::num::{compensated_sum, Real};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which power of the Euclidean/Cameron–Martin distance the plan optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// ‖x − y‖: the Monge distance cost.
    Euclidean,
    /// ‖x − y‖²: the p = 2 surrogate whose optimal maps have diagonalizable
    /// nonnegative-eigenvalue differentials.
    SqEuclidean,
}

impl CostKind {
    pub fn eval<F: Real>(self, x: &[F], y: &[F]) -> F {
        let d = cm_distance_unchecked(x, y);
        match self {
            CostKind::Euclidean => d,
            CostKind::SqEuclidean => d * d,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CostKind::Euclidean => "euclidean",
            CostKind::SqEuclidean => "sqeuclidean",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OtError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("mass mismatch: source {0}, target {1}")]
    MassMismatch(f64, f64),
    #[error("empty measure")]
    Empty,
    #[error("simplex did not terminate within {0} pivots")]
    NoTermination(usize),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Sparse coupling between two discrete measures.
#[derive(Debug, Clone)]
pub struct TransportPlan<F: Real = f64> {
    pub pairs: Vec<(usize, usize, F)>,
    pub cost: F,
    pub source: DiscreteMeasure<F>,
    pub target: DiscreteMeasure<F>,
    pub cost_kind: CostKind,
}

impl<F: Real> TransportPlan<F> {
    /// Recomputes Σ mass·cost from the support pairs.
    pub fn recompute_cost(&self) -> F {
        compensated_sum(self.pairs.iter().map(|&(i, j, w)| {
            w * self.cost_kind.eval(self.source.point(i), self.target.point(j))
        }))
    }

    /// Row and column marginals of the plan.
    pub fn marginals(&self) -> (Vec<F>, Vec<F>) {
        let mut row = vec![F::zero(); self.source.len()];
        let mut col = vec![F::zero(); self.target.len()];
        for &(i, j, w) in &self.pairs {
            row[i] = row[i] + w;
            col[j] = col[j] + w;
        }
        (row, col)
    }

    /// Largest deviation of the plan marginals from the input weights.
    pub fn marginal_residual(&self) -> F {
        let (row, col) = self.marginals();
        let mut worst = F::zero();
        for (r, &w) in row.iter().zip(self.source.weights()) {
            worst = worst.max((*r - w).abs());
        }
        for (c, &w) in col.iter().zip(self.target.weights()) {
            worst = worst.max((*c - w).abs());
        }
        worst
    }

    /// Triplet CSV rows `i,j,mass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for &(i, j, w) in &self.pairs {
            out.push_str(&format!("{},{},{}\n", i, j, w));
        }
        out
    }
}

/// Kantorovich potentials certifying optimality.
#[derive(Debug, Clone)]
pub struct DualPotentials<F: Real = f64> {
    pub phi: Vec<F>,
    pub psi: Vec<F>,
}

/// Outcome of checking a (plan, potentials) pair.
#[derive(Debug, Clone)]
pub struct GapReport<F: Real = f64> {
    pub primal: F,
    pub dual: F,
    /// primal − dual; meaningful only when `feasible`.
    pub gap: F,
    /// Worst violation of φ_i + ψ_j ≤ c_ij over all pairs (0 if none).
    pub feasibility_violation: F,
    pub feasible: bool,
}

const FEASIBILITY_SLACK: f64 = 1e-9;

/// Solves the discrete Kantorovich problem exactly.
///
/// Returns an optimal plan together with feasible dual potentials whose value
/// matches the primal cost up to solver tolerance.
pub fn solve_kantorovich<F: Real>(
    mu: &DiscreteMeasure<F>,
    nu: &DiscreteMeasure<F>,
    cost: CostKind,
) -> Result<(TransportPlan<F>, DualPotentials<F>), OtError> {
    if mu.is_empty() || nu.is_empty() {
        return Err(OtError::Empty);
    }
    if mu.dim() != nu.dim() {
        return Err(OtError::DimensionMismatch(mu.dim(), nu.dim()));
    }
    let (total_mu, total_nu) = (mu.total_mass(), nu.total_mass());
    if (total_mu - total_nu).abs().to_f64_lossy() > 1e-9 * (1.0 + total_mu.to_f64_lossy()) {
        return Err(OtError::MassMismatch(total_mu.to_f64_lossy(), total_nu.to_f64_lossy()));
    }
    let (mu_n, _) = mu.normalized()?;
    let (nu_n, _) = nu.normalized()?;

    let m = mu_n.len();
    let n = nu_n.len();
    let mut cost_matrix = vec![F::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            cost_matrix[i * n + j] = cost.eval(mu_n.point(i), nu_n.point(j));
        }
    }

    let solution = transportation_simplex(mu_n.weights(), nu_n.weights(), &cost_matrix, m, n)?;

    // scale flows back to the (sub-)measure mass
    let scale = total_mu;
    let pairs: Vec<(usize, usize, F)> = solution
        .flows
        .into_iter()
        .filter(|&(_, _, w)| w > F::of(crate::measures::WEIGHT_PRUNE))
        .map(|(i, j, w)| (i, j, w * scale))
        .collect();

    let plan_cost =
        compensated_sum(pairs.iter().map(|&(i, j, w)| w * cost_matrix[i * n + j]));
    let plan = TransportPlan {
        pairs,
        cost: plan_cost,
        source: mu.clone(),
        target: nu.clone(),
        cost_kind: cost,
    };
    let duals = DualPotentials { phi: solution.u, psi: solution.v };
    Ok((plan, duals))
}

/// Primal-minus-dual certification.
pub fn duality_gap<F: Real>(plan: &TransportPlan<F>, duals: &DualPotentials<F>) -> GapReport<F> {
    let n = plan.target.len();
    let mut worst = F::zero();
    for i in 0..plan.source.len() {
        for j in 0..n {
            let c = plan.cost_kind.eval(plan.source.point(i), plan.target.point(j));
            let v = duals.phi[i] + duals.psi[j] - c;
            worst = worst.max(v);
        }
    }
    let dual = compensated_sum(
        duals
            .phi
            .iter()
            .zip(plan.source.weights())
            .map(|(&p, &w)| p * w)
            .chain(duals.psi.iter().zip(plan.target.weights()).map(|(&p, &w)| p * w)),
    );
    // scale dual value when the inputs are sub-measures of equal mass
    let feasible = worst.to_f64_lossy() <= FEASIBILITY_SLACK;
    GapReport {
        primal: plan.cost,
        dual,
        gap: plan.cost - dual,
        feasibility_violation: worst,
        feasible,
    }
}

/// One checked tuple of support pairs and its cycle slack.
#[derive(Debug, Clone)]
pub struct MonotonicityReport<F: Real = f64> {
    pub tuples_checked: usize,
    pub violations: usize,
    /// Most negative cycle slack seen (Σ c(x_{i+1}, y_i) − Σ c(x_i, y_i)).
    pub worst_slack: F,
    pub worst_tuple: Vec<(usize, usize)>,
}

impl<F: Real> MonotonicityReport<F> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn cycle_slack<F: Real>(plan: &TransportPlan<F>, tuple: &[(usize, usize)]) -> F {
    let k = tuple.len();
    let mut kept = F::zero();
    let mut swapped = F::zero();
    for t in 0..k {
        let (i, j) = tuple[t];
        let (i_next, _) = tuple[(t + 1) % k];
        kept = kept + plan.cost_kind.eval(plan.source.point(i), plan.target.point(j));
        swapped =
            swapped + plan.cost_kind.eval(plan.source.point(i_next), plan.target.point(j));
    }
    swapped - kept
}

/// Samples random tuples of support pairs and checks the c-cyclical
/// monotonicity inequality on each.
pub fn check_cyclical_monotonicity<F: Real>(
    plan: &TransportPlan<F>,
    max_cycle: usize,
    samples: usize,
    seed: u64,
) -> MonotonicityReport<F> {
    assert!(max_cycle >= 2, "cycles shorter than 2 are vacuous");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: Vec<(usize, usize)> = plan.pairs.iter().map(|&(i, j, _)| (i, j)).collect();
    let mut report = MonotonicityReport {
        tuples_checked: 0,
        violations: 0,
        worst_slack: F::infinity(),
        worst_tuple: Vec::new(),
    };
    if support.len() < 2 {
        report.worst_slack = F::zero();
        return report;
    }
    let slack = F::of(-1e-9);
    for _ in 0..samples {
        let len = rng.gen_range(2..=max_cycle);
        let tuple: Vec<(usize, usize)> =
            (0..len).map(|_| support[rng.gen_range(0..support.len())]).collect();
        let s = cycle_slack(plan, &tuple);
        report.tuples_checked += 1;
        if s < report.worst_slack {
            report.worst_slack = s;
            report.worst_tuple = tuple.clone();
        }
        if s < slack {
            report.violations += 1;
        }
    }
    report
}

/// Exhaustively checks every tuple of support pairs up to `max_cycle`.
pub fn check_cyclical_monotonicity_exhaustive<F: Real>(
    plan: &TransportPlan<F>,
    max_cycle: usize,
) -> MonotonicityReport<F> {
    assert!(max_cycle >= 2);
    let support: Vec<(usize, usize)> = plan.pairs.iter().map(|&(i, j, _)| (i, j)).collect();
    let mut report = MonotonicityReport {
        tuples_checked: 0,
        violations: 0,
        worst_slack: F::zero(),
        worst_tuple: Vec::new(),
    };
    let slack = F::of(-1e-9);
    let mut tuple: Vec<(usize, usize)> = Vec::new();
    // depth-first enumeration of ordered tuples with repetition
    fn recurse<F: Real>(
        plan: &TransportPlan<F>,
        support: &[(usize, usize)],
        tuple: &mut Vec<(usize, usize)>,
        max_cycle: usize,
        slack: F,
        report: &mut MonotonicityReport<F>,
    ) {
        if tuple.len() >= 2 {
            let s = cycle_slack(plan, tuple);
            report.tuples_checked += 1;
            if s < report.worst_slack {
                report.worst_slack = s;
                report.worst_tuple = tuple.clone();
            }
            if s < slack {
                report.violations += 1;
            }
        }
        if tuple.len() == max_cycle {
            return;
        }
        for &p in support {
            tuple.push(p);
            recurse(plan, support, tuple, max_cycle, slack, report);
            tuple.pop();
        }
    }
    recurse(plan, &support, &mut tuple, max_cycle, slack, &mut report);
    report
}

struct SimplexSolution<F> {
    flows: Vec<(usize, usize, F)>,
    u: Vec<F>,
    v: Vec<F>,
}

/// Bipartite transportation simplex. Supplies and demands must each sum to 1.
fn transportation_simplex<F: Real>(
    supply: &[F],
    demand: &[F],
    cost: &[F],
    m: usize,
    n: usize,
) -> Result<SimplexSolution<F>, OtError> {
    let nodes = m + n;
    let max_cost = cost.iter().fold(F::zero(), |a, &c| a.max(c.abs()));
    let tol = F::of(1e-12) * (F::one() + max_cost);

    // north-west corner initial basis: exactly m + n - 1 arcs
    let mut arcs: Vec<(usize, usize, F)> = Vec::with_capacity(nodes - 1);
    let mut in_basis = vec![false; m * n];
    {
        let mut ra: Vec<F> = supply.to_vec();
        let mut rb: Vec<F> = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let t = ra[i].min(rb[j]);
            arcs.push((i, j, t));
            in_basis[i * n + j] = true;
            ra[i] = ra[i] - t;
            rb[j] = rb[j] - t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && ra[i] <= rb[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        debug_assert_eq!(arcs.len(), nodes - 1);
    }

    // adjacency: node -> indices into `arcs`; source nodes are 0..m, target m..m+n
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (k, &(i, j, _)) in arcs.iter().enumerate() {
        adj[i].push(k);
        adj[m + j].push(k);
    }

    let mut u = vec![F::zero(); m];
    let mut v = vec![F::zero(); n];
    let max_pivots = 2000 * (m + n).max(64) + 40 * m * n;
    let bland_after = max_pivots / 2;

    for pivot in 0..max_pivots {
        // potentials from the tree, rooted at source 0
        {
            let mut seen = vec![false; nodes];
            let mut stack = vec![0usize];
            seen[0] = true;
            u[0] = F::zero();
            while let Some(node) = stack.pop() {
                for &k in &adj[node] {
                    let (i, j, _) = arcs[k];
                    let other = if node == i { m + j } else { i };
                    if !seen[other] {
                        seen[other] = true;
                        if other >= m {
                            v[other - m] = cost[i * n + j] - u[i];
                        } else {
                            u[other] = cost[i * n + j] - v[j];
                        }
                        stack.push(other);
                    }
                }
            }
        }

        // entering arc
        let mut entering: Option<(usize, usize)> = None;
        if pivot < bland_after {
            let mut best = -tol;
            for i in 0..m {
                for j in 0..n {
                    if in_basis[i * n + j] {
                        continue;
                    }
                    let r = cost[i * n + j] - u[i] - v[j];
                    if r < best {
                        best = r;
                        entering = Some((i, j));
                    }
                }
            }
        } else {
            'outer: for i in 0..m {
                for j in 0..n {
                    if !in_basis[i * n + j] && cost[i * n + j] - u[i] - v[j] < -tol {
                        entering = Some((i, j));
                        break 'outer;
                    }
                }
            }
        }
        let (ei, ej) = match entering {
            Some(e) => e,
            None => {
                let flows = arcs
                    .iter()
                    .filter(|&&(_, _, f)| f > F::zero())
                    .map(|&(i, j, f)| (i, j, f))
                    .collect();
                return Ok(SimplexSolution { flows, u, v });
            }
        };

        // tree path from source ei to target ej
        let path_arcs = {
            let mut parent_arc = vec![usize::MAX; nodes];
            let mut seen = vec![false; nodes];
            let mut stack = vec![ei];
            seen[ei] = true;
            while let Some(node) = stack.pop() {
                if node == m + ej {
                    break;
                }
                for &k in &adj[node] {
                    let (i, j, _) = arcs[k];
                    let other = if node == i { m + j } else { i };
                    if !seen[other] {
                        seen[other] = true;
                        parent_arc[other] = k;
                        stack.push(other);
                    }
                }
            }
            let mut path = Vec::new();
            let mut node = m + ej;
            while node != ei {
                let k = parent_arc[node];
                debug_assert_ne!(k, usize::MAX, "tree is connected");
                path.push(k);
                let (i, j, _) = arcs[k];
                node = if node == i { m + j } else { i };
            }
            path.reverse();
            path
        };

        // alternate signs along the cycle; entering arc is +
        let mut backward: Vec<usize> = Vec::new();
        for (pos, &k) in path_arcs.iter().enumerate() {
            if pos % 2 == 0 {
                backward.push(k);
            }
        }
        let mut theta = F::infinity();
        let mut leaving = usize::MAX;
        for &k in &backward {
            let (i, j, f) = arcs[k];
            let better = f < theta
                || (f == theta
                    && leaving != usize::MAX
                    && (i, j) < (arcs[leaving].0, arcs[leaving].1));
            if better {
                theta = f;
                leaving = k;
            }
        }
        debug_assert_ne!(leaving, usize::MAX);

        for (pos, &k) in path_arcs.iter().enumerate() {
            if pos % 2 == 0 {
                arcs[k].2 = (arcs[k].2 - theta).max(F::zero());
            } else {
                arcs[k].2 = arcs[k].2 + theta;
            }
        }

        // swap leaving arc for entering arc
        let (li, lj, _) = arcs[leaving];
        in_basis[li * n + lj] = false;
        in_basis[ei * n + ej] = true;
        adj[li].retain(|&k| k != leaving);
        adj[m + lj].retain(|&k| k != leaving);
        arcs[leaving] = (ei, ej, theta);
        adj[ei].push(leaving);
        adj[m + ej].push(leaving);
    }
    Err(OtError::NoTermination(max_pivots))
}
