//! Numerical laboratory for planar (2D) three-body molecular ions bound by a
//! short-range modified-Bessel `K0` interaction, with logarithmic-2D and
//! Coulomb-3D comparison modes.
//!
//! The pipeline mirrors a Born-Oppenheimer treatment of homonuclear one-lepton
//! molecular ions (ppe, dde, ppμ, ddμ):
//!
//! 1. [`specfun`] — modified Bessel functions `K0`/`K1` (the planar photon
//!    kernel) to ~1e-10 relative accuracy.
//! 2. [`eigensolver`] — Numerov shooting solver for radial Schrödinger
//!    problems on a uniform grid, with node-count bracketing and bisection.
//! 3. [`atomic`] — single-nucleus ground states: energy `η` and the fitted
//!    radial profile `u(ρ) = a·ρ·e^{−ρ/b}` whose normalized wave function
//!    is the LCAO basis orbital.
//! 4. [`twocenter`] — overlap/direct/exchange integrals between two displaced
//!    orbitals by adaptive Gauss-Legendre quadrature in confocal elliptic
//!    (2D) or prolate-spheroidal (3D) coordinates; bonding/antibonding curves
//!    `W±(R) = η + (D±E)/(1±Δ)`.
//! 5. [`molecular`] — the effective internuclear potential
//!    `U(ρ) = repulsion + W₊(ρ/√ζ)/m3 + centrifugal`, its ground state `ε`,
//!    and the mean internuclear distance `⟨ρ⟩`.
//! 6. [`cli`] — configuration, orchestration, CSV/plot-data emission, table
//!    caching, and regression checks against the bundled reference values
//!    (see the `lab_cli` binary).
//!
//! All energies are quoted in the `ε = 2E` convention of the scaled radial
//! equations; lengths are in the lepton-coordinate unit (Bohr-radius scale).

pub mod atomic;
pub mod cli;
pub mod constants;
pub mod eigensolver;
pub mod molecular;
pub mod specfun;
pub mod twocenter;
