//! Single-center (one nucleus + one light particle) radial ground states,
//! plus the exponential orbital fit that supplies the two-center basis.
//!
//! The bound-state problem is solved on the scaled radial form
//! u″ + [η − U(ρ)]u = 0 with the model potential selected by
//! [`PotentialModel`]: a screened planar kernel (−K0), a confining planar
//! logarithm (+ln ρ), or the three-dimensional −2/ρ benchmark. The solved
//! profile is then fitted to u(ρ) = a·ρ·e^{−ρ/b}, whose normalized amplitude
//! c = A·a is the quantity consumed downstream (the raw amplitude a depends
//! on solver scale and is reported only for completeness).

use crate::constants::{AtomLabel, PotentialModel, C_LIGHT, LAMBDA_HI, LAMBDA_LO};
use crate::eigensolver::{
    solve_state, Dimension, EigenError, RadialGrid, RadialProblem,
};
use crate::specfun;
use std::f64::consts::PI;
use thiserror::Error;

/// How the light-particle mass enters the single-center equation.
///
/// - `A` (default): mass-independent kernel, V = −(Z/π)·K0(λcρ).
/// - `B`: mass-weighted strength, V = −(Z·m3/π)·K0(λcρ).
/// - `C`: reduced-mass–scaled argument, V = −(Z/π)·K0(λcρ/√ζ_atom).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingConvention {
    A,
    B,
    C,
}

impl ScalingConvention {
    pub fn tag(self) -> &'static str {
        match self {
            ScalingConvention::A => "a",
            ScalingConvention::B => "b",
            ScalingConvention::C => "c",
        }
    }

    pub fn all() -> [ScalingConvention; 3] {
        [
            ScalingConvention::A,
            ScalingConvention::B,
            ScalingConvention::C,
        ]
    }

    pub fn parse(s: &str) -> Option<ScalingConvention> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Some(ScalingConvention::A),
            "b" => Some(ScalingConvention::B),
            "c" => Some(ScalingConvention::C),
            _ => None,
        }
    }
}

/// Full description of a single-center problem.
#[derive(Clone, Copy, Debug)]
pub struct AtomSpec {
    pub label: AtomLabel,
    /// Light-particle mass in electron masses.
    pub m3: f64,
    /// Nucleus–light-particle reduced mass in electron masses.
    pub zeta_atom: f64,
    /// Nuclear charge (1 for every tabulated system; 0 is a degenerate
    /// free-particle input used to exercise the no-bound-state path).
    pub z: i32,
    /// Screening-mass ratio; the kernel argument is λ·c·ρ.
    pub lambda: f64,
    pub model: PotentialModel,
    pub convention: ScalingConvention,
}

impl AtomSpec {
    pub fn new(
        label: AtomLabel,
        lambda: f64,
        model: PotentialModel,
        convention: ScalingConvention,
    ) -> AtomSpec {
        let m3 = label.lepton().mass();
        let m_nuc = label.nucleus().mass();
        AtomSpec {
            label,
            m3,
            zeta_atom: m_nuc * m3 / (m_nuc + m3),
            z: 1,
            lambda,
            model,
            convention,
        }
    }

    /// The tabulated reproduction range for λ; values outside it are legal
    /// but callers should surface a warning.
    pub fn lambda_in_reference_range(&self) -> bool {
        self.lambda >= LAMBDA_LO && self.lambda <= LAMBDA_HI
    }

    /// Multiplier on ρ inside the screened kernel.
    pub fn kernel_argument_scale(&self) -> f64 {
        let base = self.lambda * C_LIGHT;
        match self.convention {
            ScalingConvention::A | ScalingConvention::B => base,
            ScalingConvention::C => base / self.zeta_atom.sqrt(),
        }
    }

    /// Prefactor of the screened kernel (the 1/π is applied separately).
    pub fn kernel_strength(&self) -> f64 {
        let z = f64::from(self.z);
        match self.convention {
            ScalingConvention::A | ScalingConvention::C => z,
            ScalingConvention::B => z * self.m3,
        }
    }
}

/// Exponential orbital parameters fitted to a solved radial profile:
/// u(ρ) ≈ a·ρ·e^{−ρ/b}. `a_norm` (written A in reports) rescales the raw
/// amplitude so the wave function has unit norm; `c = a_norm·a` is the
/// scale-free normalized amplitude.
#[derive(Clone, Copy, Debug)]
pub struct OrbitalFit {
    pub a: f64,
    pub b: f64,
    pub a_norm: f64,
    pub c: f64,
    /// RMS of (u − fit) over the fitted range, in units of the input u.
    pub residual_rms: f64,
    pub dimension: Dimension,
}

/// A solved single-center ground state.
#[derive(Clone, Debug)]
pub struct AtomSolution {
    pub spec: AtomSpec,
    /// Ground energy in the scaled (doubled-energy) units.
    pub eta: f64,
    pub grid: RadialGrid,
    /// Normalized radial profile (∫u²dρ = 1), tail-cleaned.
    pub u: Vec<f64>,
    pub fit: OrbitalFit,
}

#[derive(Debug, Error)]
pub enum AtomError {
    #[error("no bound state for {label} (model {model}, lambda {lambda:e})")]
    NoBoundState {
        label: &'static str,
        model: &'static str,
        lambda: f64,
    },
    #[error("orbital fit is degenerate: profile has {nodes} interior sign changes")]
    FitDegenerate { nodes: usize },
    #[error(transparent)]
    Solver(#[from] EigenError),
}

/// Default radial grid for a spec: 40 decay-length–scaled units, 40001
/// samples. The mass-weighted convention shrinks the orbital by √m3, so the
/// domain shrinks with it (exactly no-op when m3 = 1).
pub fn default_grid(spec: &AtomSpec) -> RadialGrid {
    let scale = match (spec.model, spec.convention) {
        (PotentialModel::ChernSimons, ScalingConvention::B) => spec.m3.sqrt(),
        _ => 1.0,
    };
    RadialGrid::new(1e-5 / scale, 40.0 / scale, 40_001).expect("default grid parameters are valid")
}

fn bare_potential(spec: &AtomSpec) -> impl Fn(f64) -> f64 + Copy + '_ {
    let model = spec.model;
    let strength = spec.kernel_strength();
    let arg_scale = spec.kernel_argument_scale();
    let z = f64::from(spec.z);
    move |rho: f64| match model {
        PotentialModel::ChernSimons => {
            -(strength / PI) * specfun::k0(arg_scale * rho).unwrap_or(f64::NAN)
        }
        PotentialModel::Logarithmic => z * rho.ln(),
        PotentialModel::Coulomb3d => -2.0 * z / rho,
    }
}

/// Dimensionality of the radial reduction for a model: the screened and
/// logarithmic kernels are planar, the −2/ρ benchmark is spatial.
pub fn model_dimension(model: PotentialModel) -> Dimension {
    match model {
        PotentialModel::Coulomb3d => Dimension::Spatial,
        _ => Dimension::Planar,
    }
}

/// Assemble the radial problem (ℓ = 0) for a spec on its default grid.
pub fn build_atomic_problem(spec: &AtomSpec) -> Result<RadialProblem, AtomError> {
    build_atomic_problem_on(spec, default_grid(spec))
}

/// Assemble the radial problem for a spec on a caller-chosen grid.
pub fn build_atomic_problem_on(
    spec: &AtomSpec,
    grid: RadialGrid,
) -> Result<RadialProblem, AtomError> {
    let pot = bare_potential(spec);
    let dim = model_dimension(spec.model);
    Ok(RadialProblem::from_bare_potential(grid, dim, 0, pot)?)
}

/// Energy bracket guaranteed to contain the ground state: from just below
/// the deepest sampled bare-potential value up to the continuum edge (zero
/// for the decaying kernels) or the confining wall value at the outer edge.
fn ground_bracket(spec: &AtomSpec, grid: &RadialGrid) -> (f64, f64) {
    let pot = bare_potential(spec);
    let v_min = pot(grid.rho(0));
    match spec.model {
        PotentialModel::Logarithmic => (v_min - 10.0, pot(grid.rho(grid.n - 1))),
        _ => (v_min - 10.0, 0.0),
    }
}

/// Solve the ground state and attach the orbital fit.
pub fn solve_atom(spec: &AtomSpec) -> Result<AtomSolution, AtomError> {
    solve_atom_on(spec, default_grid(spec))
}

/// Solve the ground state on a caller-chosen grid.
pub fn solve_atom_on(spec: &AtomSpec, grid: RadialGrid) -> Result<AtomSolution, AtomError> {
    let problem = build_atomic_problem_on(spec, grid)?;
    let (lo, hi) = ground_bracket(spec, &problem.grid);
    let result = solve_state(&problem, 0, lo, hi).map_err(|e| match e {
        EigenError::NoEigenvalueInBracket { .. } => AtomError::NoBoundState {
            label: spec.label.tag(),
            model: spec.model.tag(),
            lambda: spec.lambda,
        },
        other => AtomError::Solver(other),
    })?;
    let fit = fit_orbital(&result.u, &problem.grid, problem.dimension)?;
    Ok(AtomSolution {
        spec: *spec,
        eta: result.epsilon,
        grid: problem.grid,
        u: result.u,
        fit,
    })
}

/// Least-squares fit of u ≈ a·ρ·e^{−ρ/b} over the full sampled range with
/// uniform weights. For each trial b the optimal a is linear and closed-form;
/// b itself is located by golden-section search on the profiled residual.
pub fn fit_orbital(
    u: &[f64],
    grid: &RadialGrid,
    dimension: Dimension,
) -> Result<OrbitalFit, AtomError> {
    let nodes = interior_sign_changes(u);
    if nodes > 0 {
        return Err(AtomError::FitDegenerate { nodes });
    }

    // First-moment scale estimate seeds the b bracket.
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &v) in u.iter().enumerate() {
        num += v * v * grid.rho(i);
        den += v * v;
    }
    if den == 0.0 {
        return Err(AtomError::FitDegenerate { nodes: 0 });
    }
    let mean_rho = num / den;
    // Exact-model identity: ⟨ρ⟩ = 3b/2.
    let b_guess = (2.0 / 3.0) * mean_rho;

    let rss = |b: f64| -> (f64, f64) {
        let mut gg = 0.0;
        let mut ug = 0.0;
        let mut uu = 0.0;
        for (i, &v) in u.iter().enumerate() {
            let rho = grid.rho(i);
            let g = rho * (-rho / b).exp();
            gg += g * g;
            ug += v * g;
            uu += v * v;
        }
        if gg == 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let a = ug / gg;
        (uu - 2.0 * a * ug + a * a * gg, a)
    };

    // Golden-section localization of the profiled-residual minimum. The
    // residual is flat near the optimum, so golden search alone stalls at
    // the rounding floor of the residual sums; it is only used to bracket.
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut lo = 0.02 * b_guess;
    let mut hi = 20.0 * b_guess;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = rss(x1).0;
    let mut f2 = rss(x2).0;
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = rss(x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = rss(x2).0;
        }
        if hi - lo < 1e-4 * b_guess.max(1e-300) {
            break;
        }
    }

    // Polish by root-finding the stationarity condition of the profiled
    // residual: d/db[(Σug)²/Σg²] = 0 ⇔ H(b) = Σugρ·Σg² − Σug·Σg²ρ = 0.
    // H has O(1) slope at the optimum, so bisection on it recovers b to
    // machine precision where the residual itself is rounding-flat.
    let stationarity = |b: f64| -> f64 {
        let mut gg = 0.0;
        let mut ug = 0.0;
        let mut ugr = 0.0;
        let mut ggr = 0.0;
        for (i, &v) in u.iter().enumerate() {
            let rho = grid.rho(i);
            let g = rho * (-rho / b).exp();
            gg += g * g;
            ug += v * g;
            ugr += v * g * rho;
            ggr += g * g * rho;
        }
        ugr * gg - ug * ggr
    };
    let mut b = 0.5 * (lo + hi);
    {
        let mut rl = lo - 5.0 * (hi - lo);
        let mut rh = hi + 5.0 * (hi - lo);
        let mut hl = stationarity(rl);
        let hh = stationarity(rh);
        if hl * hh < 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (rl + rh);
                let hm = stationarity(mid);
                if hm == 0.0 {
                    rl = mid;
                    rh = mid;
                    break;
                }
                if hl * hm < 0.0 {
                    rh = mid;
                } else {
                    rl = mid;
                    hl = hm;
                }
                if rh - rl <= f64::EPSILON * mid.abs() {
                    break;
                }
            }
            b = 0.5 * (rl + rh);
        }
    }
    let a = rss(b).1;
    // Direct residual sum (the expanded uu − 2a·ug + a²gg form cancels
    // catastrophically when the fit is near-exact).
    let mut rss_min = 0.0;
    for (i, &v) in u.iter().enumerate() {
        let rho = grid.rho(i);
        let d = v - a * rho * (-rho / b).exp();
        rss_min += d * d;
    }
    let (a_norm, c) = normalize_orbital(a, b, dimension);
    Ok(OrbitalFit {
        a,
        b,
        a_norm,
        c,
        residual_rms: (rss_min / u.len() as f64).sqrt(),
        dimension,
    })
}

fn interior_sign_changes(u: &[f64]) -> usize {
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

/// Closed-form normalization of the fitted orbital.
///
/// Planar wave function ψ = a√r·e^{−r/b}: ∫|Aψ|² dA = 1 gives
/// A = 1/(a·√(πb³/2)) and c = A·a = √(2/(πb³)).
/// Spatial wave function ψ = a·e^{−r/b}: ∫|Aψ|² dV = 1 gives
/// A = 1/(a·√(πb³)) and c = √(1/(πb³)).
pub fn normalize_orbital(a: f64, b: f64, dimension: Dimension) -> (f64, f64) {
    let norm2 = match dimension {
        Dimension::Planar => PI * b.powi(3) / 2.0,
        Dimension::Spatial => PI * b.powi(3),
    };
    let a_norm = 1.0 / (a * norm2.sqrt());
    (a_norm, a_norm * a)
}

/// Normalized orbital value at radius r: c·√r·e^{−r/b} (planar) or
/// c·e^{−r/b} (spatial).
pub fn eval_orbital(fit: &OrbitalFit, r: f64) -> f64 {
    match fit.dimension {
        Dimension::Planar => fit.c * r.sqrt() * (-r / fit.b).exp(),
        Dimension::Spatial => fit.c * (-r / fit.b).exp(),
    }
}

/// Bundled reference orbital parameters for a screened-kernel atom at the
/// two tabulated λ endpoints, normalized and ready for two-center use.
/// Returns None when λ is not one of the endpoints.
pub fn reference_fit(label: AtomLabel, lambda: f64) -> Option<OrbitalFit> {
    let idx = AtomLabel::all().iter().position(|&l| l == label)?;
    let col = if (lambda - LAMBDA_HI).abs() <= 1e-12 * LAMBDA_HI {
        0
    } else if (lambda - LAMBDA_LO).abs() <= 1e-12 * LAMBDA_LO {
        1
    } else {
        return None;
    };
    let (a, b) = crate::constants::reference::ORBITAL_FITS[idx][col];
    let (a_norm, c) = normalize_orbital(a, b, Dimension::Planar);
    Some(OrbitalFit {
        a,
        b,
        a_norm,
        c,
        residual_rms: 0.0,
        dimension: Dimension::Planar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::reference;

    #[test]
    fn effective_potential_examples() {
        // Screened kernel, convention A, λ at the low endpoint.
        let spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::ChernSimons,
            ScalingConvention::A,
        );
        let problem = build_atomic_problem(&spec).unwrap();
        let i = ((1.0 - 1e-5) / problem.grid.h).round() as usize;
        assert!((problem.grid.rho(i) - 1.0).abs() < 1e-4);
        assert!(
            (problem.effective_potential[i] - (-2.898)).abs() < 1e-3,
            "U(1) = {}",
            problem.effective_potential[i]
        );

        // Confining logarithm: U(1) = ln 1 − 1/4.
        let spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::Logarithmic,
            ScalingConvention::A,
        );
        let problem = build_atomic_problem(&spec).unwrap();
        assert!((problem.effective_potential[i] + 0.25).abs() < 1e-4);

        // Spatial benchmark: no centrifugal term at ℓ = 0.
        let spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::Coulomb3d,
            ScalingConvention::A,
        );
        let problem = build_atomic_problem(&spec).unwrap();
        assert!((problem.effective_potential[i] + 2.0).abs() < 1e-4);
    }

    #[test]
    fn spatial_benchmark_ground_state() {
        let spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::Coulomb3d,
            ScalingConvention::A,
        );
        let sol = solve_atom(&spec).unwrap();
        assert!((sol.eta + 1.0).abs() < 1e-4, "eta = {}", sol.eta);
        // Exact profile u = ρ·e^{−ρ}: the fit recovers b = 1.
        assert!((sol.fit.b - 1.0).abs() < 1e-4, "b = {}", sol.fit.b);
        assert!(sol.fit.residual_rms < 1e-5);
    }

    #[test]
    fn synthetic_fit_recovery() {
        let grid = RadialGrid::new(1e-5, 30.0, 20_001).unwrap();
        let u: Vec<f64> = grid
            .samples()
            .into_iter()
            .map(|rho| 3.7 * rho * (-rho / 1.5).exp())
            .collect();
        let fit = fit_orbital(&u, &grid, Dimension::Planar).unwrap();
        assert!((fit.a - 3.7).abs() < 1e-8, "a = {}", fit.a);
        assert!((fit.b - 1.5).abs() < 1e-8, "b = {}", fit.b);
        assert!(fit.residual_rms < 1e-8);
    }

    #[test]
    fn fit_rejects_profiles_with_nodes() {
        let grid = RadialGrid::new(1e-5, 10.0, 2_001).unwrap();
        let u: Vec<f64> = grid
            .samples()
            .into_iter()
            .map(|rho| (rho - 3.0) * (-rho).exp())
            .collect();
        assert!(matches!(
            fit_orbital(&u, &grid, Dimension::Planar),
            Err(AtomError::FitDegenerate { nodes: 1 })
        ));
    }

    #[test]
    fn normalization_worked_example() {
        let (a_norm, c) = normalize_orbital(12.8453, 1.72068, Dimension::Planar);
        assert!(
            (a_norm - reference::NORM_EXAMPLE_A).abs() < 1e-5,
            "A = {a_norm}"
        );
        assert!((c - reference::NORM_EXAMPLE_C).abs() < 1e-4, "c = {c}");
        // Scale-free identity: c depends on b alone.
        let (_, c2) = normalize_orbital(999.0, 1.72068, Dimension::Planar);
        assert!((c - c2).abs() < 1e-12);
        // b = 2 closed form.
        let (_, c3) = normalize_orbital(1.0, 2.0, Dimension::Planar);
        assert!((c3 - (2.0 / (8.0 * PI)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orbital_evaluation_properties() {
        let (a_norm, c) = normalize_orbital(5.0, 1.3, Dimension::Planar);
        let fit = OrbitalFit {
            a: 5.0,
            b: 1.3,
            a_norm,
            c,
            residual_rms: 0.0,
            dimension: Dimension::Planar,
        };
        assert_eq!(eval_orbital(&fit, 0.0), 0.0);
        // Stationary point of √r·e^{−r/b} at r = b/2.
        let r0 = 0.65;
        let d = 1e-6;
        let slope = (eval_orbital(&fit, r0 + d) - eval_orbital(&fit, r0 - d)) / (2.0 * d);
        assert!(slope.abs() < 1e-6);
        // Unit norm under the planar area measure, by trapezoid quadrature.
        let n = 200_000;
        let dr = 40.0 / n as f64;
        let mut norm = 0.0;
        for i in 0..=n {
            let r = i as f64 * dr;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let psi = eval_orbital(&fit, r);
            norm += w * psi * psi * 2.0 * PI * r * dr;
        }
        assert!((norm - 1.0).abs() < 1e-6, "norm = {norm}");
    }

    #[test]
    fn conventions_a_and_b_coincide_for_unit_mass() {
        let a = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::ChernSimons,
            ScalingConvention::A,
        );
        let b = AtomSpec {
            convention: ScalingConvention::B,
            ..a
        };
        let pa = build_atomic_problem(&a).unwrap();
        let pb = build_atomic_problem(&b).unwrap();
        for (x, y) in pa
            .effective_potential
            .iter()
            .zip(&pb.effective_potential)
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn degenerate_charge_has_no_bound_state() {
        let mut spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::ChernSimons,
            ScalingConvention::A,
        );
        spec.z = 0;
        assert!(matches!(
            solve_atom(&spec),
            Err(AtomError::NoBoundState { .. })
        ));
    }

    #[test]
    fn lambda_range_flag() {
        let mut spec = AtomSpec::new(
            AtomLabel::Pe,
            LAMBDA_LO,
            PotentialModel::ChernSimons,
            ScalingConvention::A,
        );
        assert!(spec.lambda_in_reference_range());
        spec.lambda = 1e-2;
        assert!(!spec.lambda_in_reference_range());
    }

    #[test]
    fn reference_fits_resolve_both_endpoints() {
        for label in AtomLabel::all() {
            for lambda in [LAMBDA_LO, LAMBDA_HI] {
                let fit = reference_fit(label, lambda).unwrap();
                assert!(fit.b > 1.7 && fit.b < 1.75);
                assert!((fit.c - (2.0 / (PI * fit.b.powi(3))).sqrt()).abs() < 1e-9);
            }
        }
        assert!(reference_fit(AtomLabel::Pe, 1e-4).is_none());
    }
}
