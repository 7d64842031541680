//! Two-center integrals between displaced single-center orbitals: the
//! overlap Δ, the direct integral D, and the exchange integral E, plus the
//! bonding/antibonding level pair W± = η + (D±E)/(1±Δ) assembled from them.
//!
//! Quadrature runs in confocal elliptic coordinates (planar) or prolate
//! spheroidal coordinates (spatial) with the substitution ξ = cosh s,
//! ν = cos t. In the planar case that substitution absorbs the inverse-root
//! metric factors exactly, so the area element becomes
//! (R²/4)(cosh²s − cos²t)·ds·dt (times 2: t ∈ [0, π] covers a half-plane).
//! In the spatial case the volume element keeps the sinh·sin Jacobian and a
//! 2π revolution factor. Both orbital cusps and the kernel singularity sit
//! at the foci, where geometrically graded Gauss–Legendre panels concentrate
//! points without ever evaluating the (integrable) endpoints themselves.

use crate::constants::{PotentialModel, C_LIGHT};
use crate::eigensolver::Dimension;
use crate::specfun;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

use crate::atomic::OrbitalFit;

/// Monotonic count of adaptive quadrature evaluations in this process.
/// Instrumentation for cache verification: a table served from cache must
/// leave the counter untouched.
static QUADRATURE_CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of adaptive two-center quadrature solves performed so far.
pub fn quadrature_call_count() -> u64 {
    QUADRATURE_CALLS.load(Ordering::Relaxed)
}

/// Level branch selected from the two-center pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn tag(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }

    pub fn parse(s: &str) -> Option<Branch> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" => Some(Branch::Plus),
            "minus" | "-" => Some(Branch::Minus),
            _ => None,
        }
    }
}

/// Quadrature policy for the two-center integrals.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Starting number of graded panels per axis (doubled until converged).
    pub panels: usize,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Relative agreement required between successive panel doublings.
    pub target_rel_err: f64,
    /// Domain truncation: ξ_max = 1 + decay_lengths·b/R, from the bound
    /// e^{−R(ξ−1)/b} < e^{−decay_lengths} on the orbital tail.
    pub xi_decay_lengths: f64,
    /// Hard cap on panel count before reporting non-convergence.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: 6,
            order: 24,
            target_rel_err: 1e-7,
            xi_decay_lengths: 100.0,
            max_panels: 96,
        }
    }
}

/// One tabulated separation.
#[derive(Clone, Copy, Debug)]
pub struct TwoCenterPoint {
    pub r: f64,
    pub delta: f64,
    pub direct: f64,
    pub exchange: f64,
    pub w_plus: f64,
    pub w_minus: f64,
}

/// Two-center integrals over a log-spaced separation grid, with enough
/// metadata to rebuild or cache the table.
#[derive(Clone, Debug)]
pub struct TwoCenterTable {
    pub model: PotentialModel,
    pub lambda: f64,
    pub m3: f64,
    pub eta: f64,
    /// Orbital decay length and normalized amplitude behind the table.
    pub b: f64,
    pub c: f64,
    pub points: Vec<TwoCenterPoint>,
    pub target_rel_err: f64,
}

#[derive(Debug, Error)]
pub enum TwoCenterError {
    #[error("quadrature did not converge at R = {r} (last relative change {last_rel_change:e})")]
    QuadratureNoConvergence { r: f64, last_rel_change: f64 },
    #[error("separation {r} outside table range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("table needs at least 4 points for cubic interpolation, got {got}")]
    TableTooSmall { got: usize },
    #[error("invalid separation R = {r}; R must be positive and finite")]
    BadSeparation { r: f64 },
}

// ---------------------------------------------------------------------------
// Gauss–Legendre panels
// ---------------------------------------------------------------------------

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P'_n(x) via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x.abs(), w);
        rule[n - 1 - i] = (x.abs(), w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// Panel edges on [0, 1], geometrically refined toward 0 starting at 1e-7.
fn graded_unit_edges(panels: usize) -> Vec<f64> {
    let mut edges = Vec::with_capacity(panels + 1);
    edges.push(0.0);
    if panels == 1 {
        edges.push(1.0);
        return edges;
    }
    let ratio = (1.0f64 / 1e-7).powf(1.0 / (panels - 1) as f64);
    let mut e = 1e-7;
    for _ in 0..panels - 1 {
        edges.push(e);
        e *= ratio;
    }
    edges.push(1.0);
    edges
}

/// Quadrature rule on [a, b]: graded toward a, or (symmetric) toward both
/// endpoints so that the rule is invariant under x → a + b − x.
fn axis_rule(a: f64, b: f64, panels: usize, order: usize, symmetric: bool) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(order);
    let unit = graded_unit_edges(panels);
    let mut edges: Vec<f64> = Vec::new();
    if symmetric {
        // Left half graded toward a, mirrored about the midpoint.
        for &u in &unit {
            edges.push(a + 0.5 * (b - a) * u);
        }
        for &u in unit.iter().rev().skip(1) {
            edges.push(b - 0.5 * (b - a) * u);
        }
    } else {
        for &u in &unit {
            edges.push(a + (b - a) * u);
        }
    }
    let mut rule = Vec::with_capacity((edges.len() - 1) * order);
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, w) in &gl {
            rule.push((mid + half * x, half * w));
        }
    }
    rule
}

// ---------------------------------------------------------------------------
// Kernels and integrand evaluation
// ---------------------------------------------------------------------------

/// Particle–nucleus pair kernel as a function of distance.
fn kernel_value(model: PotentialModel, lambda: f64, m3: f64, x: f64) -> f64 {
    let x = x.max(1e-300);
    match model {
        PotentialModel::ChernSimons => {
            -(m3 / PI) * specfun::k0(lambda * C_LIGHT * x).unwrap_or(f64::NAN)
        }
        PotentialModel::Logarithmic => m3 * x.ln(),
        PotentialModel::Coulomb3d => -m3 / x,
    }
}

/// Raw (Δ, D, E) on a fixed mesh.
fn eval_on_mesh(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    panels: usize,
    order: usize,
    xi_decay_lengths: f64,
) -> (f64, f64, f64) {
    let b = fit.b;
    let xi_max = 1.0 + xi_decay_lengths * b / r_sep;
    let s_max = (xi_max + (xi_max * xi_max - 1.0).sqrt()).ln();
    let s_rule = axis_rule(0.0, s_max, panels, order, false);
    let t_rule = axis_rule(0.0, PI, panels, order, true);

    let planar = fit.dimension == Dimension::Planar;
    // Squared normalized amplitude: c² = 2/(πb³) planar, 1/(πb³) spatial.
    let c2 = fit.c * fit.c;

    let mut delta = 0.0;
    let mut direct = 0.0;
    let mut exchange = 0.0;
    for &(s, ws) in &s_rule {
        // ξ − 1 = 2·sinh²(s/2) stays accurate where cosh(s) rounds to 1;
        // near the focus r_b ∝ (ξ − 1) + (1 − ν) must not cancel to zero or
        // the 1/r_b kernel sample overflows against the zero Jacobian.
        let xi_m1 = 2.0 * (0.5 * s).sinh().powi(2);
        let sinh_s = s.sinh();
        for &(t, wt) in &t_rule {
            let one_m_nu = 2.0 * (0.5 * t).sin().powi(2);
            let xi_p_nu = 2.0 + xi_m1 - one_m_nu;
            let xi_minus_nu = xi_m1 + one_m_nu;
            let ra = 0.5 * r_sep * xi_p_nu;
            let rb = 0.5 * r_sep * xi_minus_nu;
            let jac = xi_p_nu * xi_minus_nu; // ξ² − ν²
            let w = ws * wt;
            let (measure, pa2, papb) = if planar {
                // dA = 2·(R²/4)(ξ² − ν²) ds dt (t ∈ [0, π] is a half-plane).
                let da = 2.0 * (r_sep * r_sep / 4.0) * jac * w;
                let pa2 = c2 * ra * (-2.0 * ra / b).exp();
                let papb = c2 * (ra * rb).max(0.0).sqrt() * (-(ra + rb) / b).exp();
                (da, pa2, papb)
            } else {
                // dV = 2π·(R³/8)(ξ² − ν²)·sinh s·sin t ds dt.
                let dv = 2.0
                    * PI
                    * (r_sep * r_sep * r_sep / 8.0)
                    * jac
                    * sinh_s
                    * t.sin()
                    * w;
                let pa2 = c2 * (-2.0 * ra / b).exp();
                let papb = c2 * (-(ra + rb) / b).exp();
                (dv, pa2, papb)
            };
            let ker = kernel_value(model, lambda, m3, rb);
            delta += papb * measure;
            direct += ker * pa2 * measure;
            exchange += ker * papb * measure;
        }
    }
    (delta, direct, exchange)
}

fn rel_change(new: f64, old: f64) -> f64 {
    (new - old).abs() / new.abs().max(1e-300)
}

/// All three relative changes at or below the target. Written as three
/// explicit comparisons so a NaN (which `f64::max` would silently drop)
/// can never pass as converged.
fn all_converged(cur: (f64, f64, f64), prev: (f64, f64, f64), target: f64) -> bool {
    rel_change(cur.0, prev.0) <= target
        && rel_change(cur.1, prev.1) <= target
        && rel_change(cur.2, prev.2) <= target
}

/// (Δ, D, E) at separation R, with panel doubling until all three agree to
/// the target relative error between successive refinements.
pub fn integrals(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64, f64), TwoCenterError> {
    if !(r_sep > 0.0) || !r_sep.is_finite() {
        return Err(TwoCenterError::BadSeparation { r: r_sep });
    }
    QUADRATURE_CALLS.fetch_add(1, Ordering::Relaxed);
    let mut panels = quad.panels.max(2);
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut last_rel = f64::INFINITY;
    while panels <= quad.max_panels {
        let cur = eval_on_mesh(
            fit,
            model,
            lambda,
            m3,
            r_sep,
            panels,
            quad.order,
            quad.xi_decay_lengths,
        );
        if let Some(p) = prev {
            last_rel = rel_change(cur.0, p.0)
                .max(rel_change(cur.1, p.1))
                .max(rel_change(cur.2, p.2));
            if all_converged(cur, p, quad.target_rel_err) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
        panels *= 2;
    }
    Err(TwoCenterError::QuadratureNoConvergence {
        r: r_sep,
        last_rel_change: last_rel,
    })
}

/// Overlap Δ(R) = ∫φ_a·φ_b over the full plane/space.
pub fn overlap(fit: &OrbitalFit, r_sep: f64, quad: &QuadratureSpec) -> Result<f64, TwoCenterError> {
    // The overlap has no kernel; any model gives the same Δ column.
    integrals(fit, PotentialModel::Coulomb3d, 0.0, 1.0, r_sep, quad).map(|t| t.0)
}

/// Direct integral D(R) = ∫kernel(|r − R_b|)·φ_a(r)².
pub fn direct(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    quad: &QuadratureSpec,
) -> Result<f64, TwoCenterError> {
    integrals(fit, model, lambda, m3, r_sep, quad).map(|t| t.1)
}

/// Exchange integral E(R) = ∫kernel(|r − R_b|)·φ_a(r)·φ_b(r).
pub fn exchange(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    quad: &QuadratureSpec,
) -> Result<f64, TwoCenterError> {
    integrals(fit, model, lambda, m3, r_sep, quad).map(|t| t.2)
}

/// Same integrals with the two centers exchanged (φ_a ↔ φ_b). For the
/// homonuclear systems treated here this must agree with [`integrals`] to
/// rounding; it exists as the symmetry check.
pub fn integrals_swapped(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64, f64), TwoCenterError> {
    if !(r_sep > 0.0) || !r_sep.is_finite() {
        return Err(TwoCenterError::BadSeparation { r: r_sep });
    }
    QUADRATURE_CALLS.fetch_add(1, Ordering::Relaxed);
    let mut panels = quad.panels.max(2);
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut last_rel = f64::INFINITY;
    while panels <= quad.max_panels {
        let cur = eval_on_mesh_swapped(
            fit,
            model,
            lambda,
            m3,
            r_sep,
            panels,
            quad.order,
            quad.xi_decay_lengths,
        );
        if let Some(p) = prev {
            last_rel = rel_change(cur.0, p.0)
                .max(rel_change(cur.1, p.1))
                .max(rel_change(cur.2, p.2));
            if all_converged(cur, p, quad.target_rel_err) {
                return Ok(cur);
            }
        }
        prev = Some(cur);
        panels *= 2;
    }
    Err(TwoCenterError::QuadratureNoConvergence {
        r: r_sep,
        last_rel_change: last_rel,
    })
}

fn eval_on_mesh_swapped(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    r_sep: f64,
    panels: usize,
    order: usize,
    xi_decay_lengths: f64,
) -> (f64, f64, f64) {
    let b = fit.b;
    let xi_max = 1.0 + xi_decay_lengths * b / r_sep;
    let s_max = (xi_max + (xi_max * xi_max - 1.0).sqrt()).ln();
    let s_rule = axis_rule(0.0, s_max, panels, order, false);
    let t_rule = axis_rule(0.0, PI, panels, order, true);
    let planar = fit.dimension == Dimension::Planar;
    let c2 = fit.c * fit.c;
    let mut delta = 0.0;
    let mut direct = 0.0;
    let mut exchange = 0.0;
    for &(s, ws) in &s_rule {
        // Same focus-stable coordinates as the primary mesh.
        let xi_m1 = 2.0 * (0.5 * s).sinh().powi(2);
        let sinh_s = s.sinh();
        for &(t, wt) in &t_rule {
            let one_m_nu = 2.0 * (0.5 * t).sin().powi(2);
            let xi_p_nu = 2.0 + xi_m1 - one_m_nu;
            let xi_minus_nu = xi_m1 + one_m_nu;
            // Roles exchanged: the density sits on center b, the kernel on a.
            let rb = 0.5 * r_sep * xi_p_nu;
            let ra = 0.5 * r_sep * xi_minus_nu;
            let jac = xi_p_nu * xi_minus_nu;
            let w = ws * wt;
            let (measure, pb2, papb) = if planar {
                let da = 2.0 * (r_sep * r_sep / 4.0) * jac * w;
                let pb2 = c2 * rb * (-2.0 * rb / b).exp();
                let papb = c2 * (ra * rb).max(0.0).sqrt() * (-(ra + rb) / b).exp();
                (da, pb2, papb)
            } else {
                let dv = 2.0
                    * PI
                    * (r_sep * r_sep * r_sep / 8.0)
                    * jac
                    * sinh_s
                    * t.sin()
                    * w;
                let pb2 = c2 * (-2.0 * rb / b).exp();
                let papb = c2 * (-(ra + rb) / b).exp();
                (dv, pb2, papb)
            };
            let ker = kernel_value(model, lambda, m3, ra);
            delta += papb * measure;
            direct += ker * pb2 * measure;
            exchange += ker * papb * measure;
        }
    }
    (delta, direct, exchange)
}

// ---------------------------------------------------------------------------
// Level pair, tabulation, interpolation
// ---------------------------------------------------------------------------

/// Smallest separation worth tabulating for a planar orbital of decay
/// length b.
///
/// Below R ≈ 0.125·b the even/odd level pair crosses: E − Δ·D changes sign,
/// so the usual ordering W+ ≤ W− inverts. This is a genuine short-range
/// property of the cusped planar orbital with a logarithmic-type kernel (the
/// criterion is invariant under additive kernel constants, hence independent
/// of the screening mass), not a quadrature artifact. Both orbitals have
/// collapsed onto one center there and the two-center picture carries no
/// information, so tables start at 0.15·b and consumers clamp to the first
/// table value below it.
pub fn min_tabulated_separation(b: f64) -> f64 {
    0.15 * b
}

/// Bonding/antibonding level pair W± = η + (D±E)/(1±Δ). The minus branch is
/// singular as Δ → 1 (coincident centers) and is flagged with infinity.
pub fn w_pm(eta: f64, d: f64, e: f64, delta: f64) -> (f64, f64) {
    let w_plus = eta + (d + e) / (1.0 + delta);
    let w_minus = if (1.0 - delta).abs() < 1e-14 {
        f64::INFINITY
    } else {
        eta + (d - e) / (1.0 - delta)
    };
    (w_plus, w_minus)
}

/// n log-spaced values over [lo, hi], inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let l0 = lo.ln();
    let l1 = hi.ln();
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Evaluate every separation in `r_grid` (concurrently; the result is
/// ordered by the input grid and independent of scheduling).
pub fn tabulate(
    fit: &OrbitalFit,
    model: PotentialModel,
    lambda: f64,
    m3: f64,
    eta: f64,
    r_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<TwoCenterTable, TwoCenterError> {
    let points: Result<Vec<TwoCenterPoint>, TwoCenterError> = r_grid
        .par_iter()
        .map(|&r| {
            let (delta, d, e) = integrals(fit, model, lambda, m3, r, quad)?;
            let (w_plus, w_minus) = w_pm(eta, d, e, delta);
            Ok(TwoCenterPoint {
                r,
                delta,
                direct: d,
                exchange: e,
                w_plus,
                w_minus,
            })
        })
        .collect();
    Ok(TwoCenterTable {
        model,
        lambda,
        m3,
        eta,
        b: fit.b,
        c: fit.c,
        points: points?,
        target_rel_err: quad.target_rel_err,
    })
}

/// Natural cubic spline through (ln R, W) for fast repeated evaluation.
pub struct WInterp {
    x: Vec<f64>,
    y: Vec<f64>,
    y2: Vec<f64>,
}

impl WInterp {
    pub fn new(table: &TwoCenterTable, branch: Branch) -> Result<WInterp, TwoCenterError> {
        let n = table.points.len();
        if n < 4 {
            return Err(TwoCenterError::TableTooSmall { got: n });
        }
        let x: Vec<f64> = table.points.iter().map(|p| p.r.ln()).collect();
        let y: Vec<f64> = table
            .points
            .iter()
            .map(|p| match branch {
                Branch::Plus => p.w_plus,
                Branch::Minus => p.w_minus,
            })
            .collect();
        // Natural spline second derivatives by the Thomas algorithm.
        let mut y2 = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
            u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
        }
        for i in (0..n - 1).rev() {
            y2[i] = y2[i] * y2[i + 1] + u[i];
        }
        Ok(WInterp { x, y, y2 })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0].exp(), self.x[self.x.len() - 1].exp())
    }

    pub fn eval(&self, r: f64) -> Result<f64, TwoCenterError> {
        let xl = *self.x.first().unwrap();
        let xh = *self.x.last().unwrap();
        let xq = r.ln();
        // Tolerate endpoint rounding from the ln/exp round trip.
        if !(r > 0.0) || xq < xl - 1e-12 || xq > xh + 1e-12 {
            return Err(TwoCenterError::OutOfRange {
                r,
                lo: xl.exp(),
                hi: xh.exp(),
            });
        }
        let xq = xq.clamp(xl, xh);
        let mut lo = 0usize;
        let mut hi = self.x.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] > xq {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let h = self.x[hi] - self.x[lo];
        let a = (self.x[hi] - xq) / h;
        let b = (xq - self.x[lo]) / h;
        Ok(a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.y2[lo] + (b * b * b - b) * self.y2[hi]) * (h * h) / 6.0)
    }
}

/// Convenience single-shot interpolation on a table.
pub fn interp_w(table: &TwoCenterTable, r: f64, branch: Branch) -> Result<f64, TwoCenterError> {
    WInterp::new(table, branch)?.eval(r)
}

/// Closed-form 1s two-center integrals for the spatial −1/x kernel with
/// orbital decay length b (unit kernel strength): the quadrature oracle.
///
/// With ρ = R/b:
///   Δ = e^{−ρ}(1 + ρ + ρ²/3)
///   D = −1/R + e^{−2R/b}(1/R + 1/b)
///   E = −e^{−ρ}(1 + ρ)/b
pub fn coulomb3d_closed(b: f64, r_sep: f64) -> (f64, f64, f64) {
    let rho = r_sep / b;
    let delta = (-rho).exp() * (1.0 + rho + rho * rho / 3.0);
    let d = -1.0 / r_sep + (-2.0 * rho).exp() * (1.0 / r_sep + 1.0 / b);
    let e = -(-rho).exp() * (1.0 + rho) / b;
    (delta, d, e)
}
