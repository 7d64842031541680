//! Bound-state solver for radial equations u″(ρ) + [ε − U(ρ)]u(ρ) = 0 on a
//! uniform grid.
//!
//! Method: single-direction outward Numerov integration (global O(h⁴)) with
//! node-count bracketing followed by terminal-value sign bisection. All the
//! potentials in this laboratory are single-well at the ground state, so
//! outward shooting with a divergence-tail cut is sufficient and simple.
//!
//! Two guards make the sweep robust against the singular centrifugal term
//! (ℓ²−¼)/ρ² of the planar problems:
//!
//! * the recurrence starts at the first grid index where h²|ε−U|/12 falls
//!   below a threshold (0.1), seeding with the regular power law ρ^{ℓ+1/2}
//!   (planar) or ρ^{ℓ+1} (spatial) — Numerov's local expansion is invalid
//!   where the potential varies by orders of magnitude per step;
//! * node counts are taken relative to the count at the bracket's lower
//!   edge, which removes ε-independent sign flips contributed by the
//!   near-singular region.

use thiserror::Error;

/// Numerov stability threshold: the recurrence is only started once
/// h²|ε−U|/12 ≤ NUMEROV_START_TAU. 0.1 keeps the one-step amplification
/// factor within a few percent of the exact propagator.
const NUMEROV_START_TAU: f64 = 0.1;

/// Renormalization guard for the growing solution in forbidden regions.
const RENORM_LIMIT: f64 = 1e250;

/// Coarse-scan resolution across the requested eigenvalue bracket.
const COARSE_SCAN_STEPS: usize = 200;

/// Bisection iteration cap (a bracket halves below any tolerance long
/// before this).
const MAX_BISECTIONS: usize = 200;

/// Relative bracket-width stop. Tighter than the guaranteed 1e-9·max(1,|ε|)
/// so that grid-refinement studies measure the Numerov order rather than the
/// bisection floor.
const BISECTION_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("invalid grid: rho_min={rho_min}, rho_max={rho_max}, n={n} (need 0 < rho_min < rho_max and n >= 1000)")]
    InvalidGrid { rho_min: f64, rho_max: f64, n: usize },
    #[error("effective potential sample {index} is not finite")]
    PotentialNotFinite { index: usize },
    #[error("potential length {got} does not match grid size {expected}")]
    PotentialLength { got: usize, expected: usize },
    #[error("no node-count transition inside [{eps_lo}, {eps_hi}] for node target {node_target}")]
    NoEigenvalueInBracket {
        eps_lo: f64,
        eps_hi: f64,
        node_target: usize,
    },
    #[error("bisection failed to converge after {0} iterations")]
    NoConvergence(usize),
    #[error("cannot normalize: input has zero norm")]
    ZeroNorm,
}

/// Uniformly spaced radial grid on [rho_min, rho_max].
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub rho_min: f64,
    pub rho_max: f64,
    pub n: usize,
    pub h: f64,
}

impl RadialGrid {
    /// A uniform grid with n points; requires 0 < rho_min < rho_max and
    /// n ≥ 1000 (coarser grids cannot carry the O(h⁴) accuracy the
    /// downstream tolerances assume).
    pub fn new(rho_min: f64, rho_max: f64, n: usize) -> Result<Self, EigenError> {
        if !(rho_min > 0.0) || !(rho_max > rho_min) || n < 1000 {
            return Err(EigenError::InvalidGrid { rho_min, rho_max, n });
        }
        let h = (rho_max - rho_min) / (n - 1) as f64;
        Ok(RadialGrid { rho_min, rho_max, n, h })
    }

    /// ρ at grid index i.
    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        self.rho_min + self.h * i as f64
    }

    /// All grid points as a vector.
    pub fn samples(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.rho(i)).collect()
    }
}

/// Dimensionality of the radial reduction, fixing the centrifugal term and
/// the regular small-ρ exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// 2D: centrifugal (ℓ²−¼)/ρ² after u = √ρ·ψ; regular exponent ℓ+½.
    Planar,
    /// 3D: centrifugal ℓ(ℓ+1)/ρ²; regular exponent ℓ+1.
    Spatial,
}

impl Dimension {
    /// Centrifugal contribution at radius rho for angular momentum ell.
    #[inline]
    pub fn centrifugal(self, ell: u32, rho: f64) -> f64 {
        let l = ell as f64;
        match self {
            Dimension::Planar => (l * l - 0.25) / (rho * rho),
            Dimension::Spatial => l * (l + 1.0) / (rho * rho),
        }
    }

    /// Exponent of the regular solution u ~ ρ^p at small ρ.
    #[inline]
    pub fn seed_exponent(self, ell: u32) -> f64 {
        let l = ell as f64;
        match self {
            Dimension::Planar => l + 0.5,
            Dimension::Spatial => l + 1.0,
        }
    }
}

/// A fully assembled radial problem: grid plus the effective potential
/// (bare potential + centrifugal term) sampled at every grid point.
#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub grid: RadialGrid,
    pub effective_potential: Vec<f64>,
    pub angular_momentum: u32,
    pub dimension: Dimension,
}

impl RadialProblem {
    /// Assemble from a bare potential function; the centrifugal term for
    /// (dimension, ell) is added here.
    pub fn from_bare_potential(
        grid: RadialGrid,
        dimension: Dimension,
        ell: u32,
        bare: impl Fn(f64) -> f64,
    ) -> Result<Self, EigenError> {
        let u_eff: Vec<f64> = (0..grid.n)
            .map(|i| {
                let rho = grid.rho(i);
                bare(rho) + dimension.centrifugal(ell, rho)
            })
            .collect();
        Self::from_effective_samples(grid, dimension, ell, u_eff)
    }

    /// Assemble from pre-sampled effective-potential values (must already
    /// include the centrifugal term).
    pub fn from_effective_samples(
        grid: RadialGrid,
        dimension: Dimension,
        ell: u32,
        effective_potential: Vec<f64>,
    ) -> Result<Self, EigenError> {
        if effective_potential.len() != grid.n {
            return Err(EigenError::PotentialLength {
                got: effective_potential.len(),
                expected: grid.n,
            });
        }
        if let Some(idx) = effective_potential.iter().position(|v| !v.is_finite()) {
            return Err(EigenError::PotentialNotFinite { index: idx });
        }
        Ok(RadialProblem {
            grid,
            effective_potential,
            angular_momentum: ell,
            dimension,
        })
    }
}

/// Result of one outward Numerov pass at a fixed trial ε.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Unnormalized samples; entries before the stable start index are the
    /// seeding power law's leading zeros region (identically zero).
    pub u: Vec<f64>,
    /// Count of strict interior sign changes past the start index.
    pub node_count: usize,
    /// Final sample value (after any renormalizations).
    pub terminal_value: f64,
    /// True if the overflow guard rescaled the running pair.
    pub renormalized: bool,
    /// First index at which the recurrence was applied.
    pub start_index: usize,
}

/// Converged eigenstate.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalue in the ε = 2E convention of the assembled problem.
    pub epsilon: f64,
    /// Normalized samples, ∫u²dρ = 1 (trapezoidal); divergent shooting tail
    /// replaced by zeros past the outermost classical turning point.
    pub u: Vec<f64>,
    /// Interior nodes of the returned state (relative to the ε-independent
    /// baseline count of the bracket's lower edge).
    pub nodes: usize,
    pub converged: bool,
    /// Final eigenvalue bracket width.
    pub bracket_width: f64,
}

/// Stable start index: first grid point where the Numerov step factor
/// h²|ε−U|/12 is at most tau.
fn start_index(problem: &RadialProblem, eps: f64) -> usize {
    let c = problem.grid.h * problem.grid.h / 12.0;
    let n = problem.grid.n;
    let mut i0 = 0;
    while i0 < n - 2 && c * (eps - problem.effective_potential[i0]).abs() > NUMEROV_START_TAU {
        i0 += 1;
    }
    i0
}

/// One outward Numerov pass, counting nodes but storing only the running
/// pair (cheap; used by the scan and bisection).
///
/// The recurrence is evaluated in the additive form
/// w_{i+1} = 2w_i − w_{i−1} − h²g_i u_i with w = u·(1 + h²g/12), g = ε − U,
/// which avoids the `1 ± tiny` coefficient rounding of the textbook form
/// (that rounding acts like an ε perturbation of size eps_machine·12/h²,
/// destroying the O(h⁴) signature on fine grids).
fn sweep_count(problem: &RadialProblem, eps: f64) -> (usize, f64, usize, bool) {
    let grid = &problem.grid;
    let pot = &problem.effective_potential;
    let h2 = grid.h * grid.h;
    let c = h2 / 12.0;
    let i0 = start_index(problem, eps);
    let p = problem.dimension.seed_exponent(problem.angular_momentum);
    let ua = grid.rho(i0).powf(p);
    let mut ub = grid.rho(i0 + 1).powf(p);
    let ga = eps - pot[i0];
    let mut gb = eps - pot[i0 + 1];
    let mut wa = ua * (1.0 + c * ga);
    let mut wb = ub * (1.0 + c * gb);
    let mut nodes = 0usize;
    let mut renorm = false;
    let last = grid.n - 1;
    for i in (i0 + 2)..grid.n {
        let gc = eps - pot[i];
        let wc = 2.0 * wb - wa - h2 * gb * ub;
        let uc = wc / (1.0 + c * gc);
        // Strict interior sign changes only: the final sample may sit on a
        // boundary node and must not contribute.
        if i < last && ub != 0.0 && uc * ub < 0.0 {
            nodes += 1;
        }
        if uc.abs() > RENORM_LIMIT {
            let s = uc.abs();
            wa = wb / s;
            wb = wc / s;
            ub = uc / s;
            renorm = true;
        } else {
            wa = wb;
            wb = wc;
            ub = uc;
        }
        gb = gc;
    }
    (nodes, ub, i0, renorm)
}

/// One outward Numerov pass at trial ε, returning the full sample vector,
/// the interior node count, and the terminal value.
pub fn numerov_sweep(problem: &RadialProblem, eps: f64) -> SweepOutcome {
    let grid = &problem.grid;
    let pot = &problem.effective_potential;
    let h2 = grid.h * grid.h;
    let c = h2 / 12.0;
    let i0 = start_index(problem, eps);
    let p = problem.dimension.seed_exponent(problem.angular_momentum);
    let mut u = vec![0.0; grid.n];
    u[i0] = grid.rho(i0).powf(p);
    u[i0 + 1] = grid.rho(i0 + 1).powf(p);
    let mut gb = eps - pot[i0 + 1];
    let mut wa = u[i0] * (1.0 + c * (eps - pot[i0]));
    let mut wb = u[i0 + 1] * (1.0 + c * gb);
    let mut nodes = 0usize;
    let mut renorm = false;
    let last = grid.n - 1;
    for i in (i0 + 2)..grid.n {
        let gc = eps - pot[i];
        let wc = 2.0 * wb - wa - h2 * gb * u[i - 1];
        u[i] = wc / (1.0 + c * gc);
        // Interior sign changes only; a boundary node at the final sample is
        // part of the boundary condition, not an extra oscillation.
        if i < last && u[i - 1] != 0.0 && u[i] * u[i - 1] < 0.0 {
            nodes += 1;
        }
        if u[i].abs() > RENORM_LIMIT {
            let scale = u[i].abs();
            for v in u[..=i].iter_mut() {
                *v /= scale;
            }
            wa = wb / scale;
            wb = wc / scale;
            renorm = true;
        } else {
            wa = wb;
            wb = wc;
        }
        gb = gc;
    }
    SweepOutcome {
        terminal_value: u[grid.n - 1],
        u,
        node_count: nodes,
        renormalized: renorm,
        start_index: i0,
    }
}

/// Normalize samples to ∫u²dρ = 1 by the composite trapezoidal rule, with
/// the sign fixed so the first antinode (first interior extremum of |u|
/// above the noise floor) is positive.
pub fn normalize(u: &[f64], grid: &RadialGrid) -> Result<Vec<f64>, EigenError> {
    let norm2 = trapezoid_u2(u, grid.h);
    if norm2 <= 0.0 || !norm2.is_finite() {
        return Err(EigenError::ZeroNorm);
    }
    let scale = norm2.sqrt();
    let mut out: Vec<f64> = u.iter().map(|v| v / scale).collect();
    let max_abs = out.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Err(EigenError::ZeroNorm);
    }
    let floor = 1e-8 * max_abs;
    let mut flip = false;
    for i in 1..out.len() - 1 {
        let a = out[i].abs();
        if a > floor && a >= out[i - 1].abs() && a >= out[i + 1].abs() {
            flip = out[i] < 0.0;
            break;
        }
    }
    if flip {
        for v in out.iter_mut() {
            *v = -*v;
        }
    }
    Ok(out)
}

fn trapezoid_u2(u: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut s = 0.5 * (u[0] * u[0] + u[n - 1] * u[n - 1]);
    for v in &u[1..n - 1] {
        s += v * v;
    }
    s * h
}

/// Trapezoidal integral of an arbitrary sampled integrand.
fn trapezoid(vals: impl ExactSizeIterator<Item = f64> + Clone, h: f64) -> f64 {
    let n = vals.len();
    let mut s = 0.0;
    for (i, v) in vals.enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += w * v;
    }
    s * h
}

/// Mean radius of a normalized state under both bookkeeping conventions.
///
/// `mean_rho` integrates u²ρ directly (u normalized by ∫u²dρ = 1); the
/// second value evaluates ∫(u/√ρ)²ρ²dρ through the amplitude ψ = u/√ρ.
/// The two coincide analytically; both are computed from their own
/// formulas as a consistency probe.
pub fn expectation_rho(u: &[f64], grid: &RadialGrid) -> (f64, f64) {
    let mean = trapezoid(
        (0..grid.n).map(|i| u[i] * u[i] * grid.rho(i)),
        grid.h,
    );
    let literal = trapezoid(
        (0..grid.n).map(|i| {
            let r = grid.rho(i);
            let psi = u[i] / r.sqrt();
            psi * psi * r * r
        }),
        grid.h,
    );
    (mean, literal)
}

/// Find the eigenvalue with `node_target` interior nodes inside
/// [eps_lo, eps_hi].
///
/// A 200-step coarse scan locates the node-count transition (counts taken
/// relative to the count at eps_lo, which cancels ε-independent sign flips
/// from the singular region); bisection then tightens the bracket, switching
/// to the terminal-value sign once the bracket is a single node step wide,
/// until the width is ≤ 1e-9·max(1, |ε|). The returned state is normalized
/// and its divergent shooting tail (past the outermost classical turning
/// point) is cut at the sample of smallest magnitude and zeroed.
pub fn solve_state(
    problem: &RadialProblem,
    node_target: usize,
    eps_lo: f64,
    eps_hi: f64,
) -> Result<EigenResult, EigenError> {
    let (base_nodes, term_lo, _, _) = sweep_count(problem, eps_lo);
    let want = base_nodes + node_target;

    // Coarse scan for the first step crossing want → want+1.
    let mut lo = eps_lo;
    let mut hi = f64::NAN;
    let mut prev_nodes = base_nodes;
    let mut prev_eps = eps_lo;
    let mut lo_sign = if term_lo != 0.0 { term_lo.signum() } else { 1.0 };
    let mut found = false;
    for k in 1..=COARSE_SCAN_STEPS {
        let e = eps_lo + (eps_hi - eps_lo) * k as f64 / COARSE_SCAN_STEPS as f64;
        let (nodes, term, _, _) = sweep_count(problem, e);
        if prev_nodes <= want && nodes > want {
            lo = prev_eps;
            hi = e;
            found = true;
            break;
        }
        if nodes <= want && term != 0.0 {
            lo_sign = term.signum();
        }
        prev_nodes = nodes;
        prev_eps = e;
    }
    if !found {
        return Err(EigenError::NoEigenvalueInBracket {
            eps_lo,
            eps_hi,
            node_target,
        });
    }

    // Bisection: node count first, terminal sign once counts are exact.
    let mut converged = false;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let (nodes, term, _, _) = sweep_count(problem, mid);
        let is_high = if nodes > want {
            true
        } else if nodes < want {
            false
        } else {
            // Exact node count: the diverging tail flips sign once the
            // eigenvalue is crossed.
            term != 0.0 && term.signum() != lo_sign
        };
        if is_high {
            hi = mid;
        } else {
            lo = mid;
            if nodes == want && term != 0.0 {
                lo_sign = term.signum();
            }
        }
        if hi - lo <= BISECTION_REL_TOL * mid.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(EigenError::NoConvergence(MAX_BISECTIONS));
    }

    let eps = 0.5 * (lo + hi);
    let sweep = numerov_sweep(problem, eps);
    let mut u = sweep.u;

    // Outward shooting diverges beyond the outer turning point: cut at the
    // |u| minimum past the last classically allowed sample and zero the tail.
    let pot = &problem.effective_potential;
    let last_allowed = (0..problem.grid.n).rev().find(|&i| eps - pot[i] > 0.0);
    if let Some(it) = last_allowed {
        if it < problem.grid.n - 2 {
            let mut icut = it;
            let mut best = f64::INFINITY;
            for (i, v) in u.iter().enumerate().skip(it) {
                if v.abs() < best {
                    best = v.abs();
                    icut = i;
                }
            }
            for v in u[icut..].iter_mut() {
                *v = 0.0;
            }
        }
    }

    let u = normalize(&u, &problem.grid)?;
    let final_nodes = count_sign_changes(&u).saturating_sub(base_nodes);

    Ok(EigenResult {
        epsilon: eps,
        u,
        nodes: final_nodes,
        converged,
        bracket_width: hi - lo,
    })
}

/// Count sign changes between samples whose magnitude clears a small
/// relative floor. Residual boundary values (|u| ≈ rounding noise at an
/// endpoint node) would otherwise register phantom oscillations.
fn count_sign_changes(u: &[f64]) -> usize {
    let max_abs = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_abs == 0.0 {
        return 0;
    }
    let floor = 1e-9 * max_abs;
    let mut nodes = 0;
    let mut prev = 0.0f64;
    for &v in u {
        if v.abs() > floor {
            if prev != 0.0 && v * prev < 0.0 {
                nodes += 1;
            }
            prev = v;
        }
    }
    nodes
}
