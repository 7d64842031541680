//! Physical constants, unit conventions, and the bundled reference datasets
//! used by the regression checks (`lab_cli reproduce …`).
//!
//! Unit system: Hartree atomic units (ħ = m_e = e = 1). The interaction range
//! is set by the effective photon mass m_γ = λ·m_e, so the kernel argument is
//! (λ/α)·ρ = λ·C_LIGHT·ρ with ρ in Bohr radii.

/// Speed of light in atomic units, c = 1/α, as used by the bundled
/// reference data (legacy fine-structure value).
pub const C_LIGHT: f64 = 137.0356;

/// Euler-Mascheroni constant γ (used by the small-argument K0/K1 series).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Proton/electron mass ratio (CODATA).
pub const MASS_P: f64 = 1_836.152_673_43;

/// Deuteron/electron mass ratio (CODATA).
pub const MASS_D: f64 = 3_670.482_967_88;

/// Muon/electron mass ratio (CODATA).
pub const MASS_MU: f64 = 206.768_283_0;

/// Reduced mass ζ = m_nuc/2 (electron masses) of the two-proton pair.
pub const ZETA_PP: f64 = 918.076_336_715;

/// Reduced mass ζ = m_nuc/2 (electron masses) of the two-deuteron pair.
pub const ZETA_DD: f64 = 1_835.241_483_94;

/// Lower endpoint of the reproduction range for the mass ratio λ = m_γ/m_e.
pub const LAMBDA_LO: f64 = 0.2e-5;

/// Upper endpoint of the reproduction range for λ.
pub const LAMBDA_HI: f64 = 0.2e-3;

/// The bound lepton: electron or muon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lepton {
    Electron,
    Muon,
}

impl Lepton {
    /// Lepton mass m3 in electron masses.
    pub fn mass(self) -> f64 {
        match self {
            Lepton::Electron => 1.0,
            Lepton::Muon => MASS_MU,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Lepton::Electron => "e",
            Lepton::Muon => "mu",
        }
    }
}

/// The nucleus species (both nuclei are identical in every system here).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nucleus {
    Proton,
    Deuteron,
}

impl Nucleus {
    /// Nuclear mass in electron masses.
    pub fn mass(self) -> f64 {
        match self {
            Nucleus::Proton => MASS_P,
            Nucleus::Deuteron => MASS_D,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Nucleus::Proton => "p",
            Nucleus::Deuteron => "d",
        }
    }
}

/// Interaction model for every stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PotentialModel {
    /// Planar topologically-massive kernel −(1/π)K0((λ/α)r), short-ranged.
    ChernSimons,
    /// Planar logarithmic kernel +ln r (2D electrostatics), confining.
    Logarithmic,
    /// Ordinary 3D Coulomb −2/r in the ε = 2E convention.
    Coulomb3d,
}

impl PotentialModel {
    pub fn tag(self) -> &'static str {
        match self {
            PotentialModel::ChernSimons => "cs",
            PotentialModel::Logarithmic => "log",
            PotentialModel::Coulomb3d => "coulomb3d",
        }
    }

    pub fn all() -> [PotentialModel; 3] {
        [
            PotentialModel::ChernSimons,
            PotentialModel::Logarithmic,
            PotentialModel::Coulomb3d,
        ]
    }

    pub fn parse(s: &str) -> Option<PotentialModel> {
        match s.to_ascii_lowercase().as_str() {
            "cs" => Some(PotentialModel::ChernSimons),
            "log" => Some(PotentialModel::Logarithmic),
            "coulomb3d" | "c3d" => Some(PotentialModel::Coulomb3d),
            _ => None,
        }
    }
}

/// Atom label: which nucleus binds which lepton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLabel {
    Pe,
    De,
    Pmu,
    Dmu,
}

impl AtomLabel {
    pub fn nucleus(self) -> Nucleus {
        match self {
            AtomLabel::Pe | AtomLabel::Pmu => Nucleus::Proton,
            AtomLabel::De | AtomLabel::Dmu => Nucleus::Deuteron,
        }
    }

    pub fn lepton(self) -> Lepton {
        match self {
            AtomLabel::Pe | AtomLabel::De => Lepton::Electron,
            AtomLabel::Pmu | AtomLabel::Dmu => Lepton::Muon,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            AtomLabel::Pe => "pe",
            AtomLabel::De => "de",
            AtomLabel::Pmu => "pmu",
            AtomLabel::Dmu => "dmu",
        }
    }

    pub fn all() -> [AtomLabel; 4] {
        [AtomLabel::Pe, AtomLabel::De, AtomLabel::Pmu, AtomLabel::Dmu]
    }

    pub fn parse(s: &str) -> Option<AtomLabel> {
        match s {
            "pe" => Some(AtomLabel::Pe),
            "de" => Some(AtomLabel::De),
            "pmu" => Some(AtomLabel::Pmu),
            "dmu" => Some(AtomLabel::Dmu),
            _ => None,
        }
    }
}

/// Molecule label: homonuclear pair plus the bound lepton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoleculeLabel {
    Ppe,
    Dde,
    Ppmu,
    Ddmu,
}

impl MoleculeLabel {
    pub fn nucleus(self) -> Nucleus {
        match self {
            MoleculeLabel::Ppe | MoleculeLabel::Ppmu => Nucleus::Proton,
            MoleculeLabel::Dde | MoleculeLabel::Ddmu => Nucleus::Deuteron,
        }
    }

    pub fn lepton(self) -> Lepton {
        match self {
            MoleculeLabel::Ppe | MoleculeLabel::Dde => Lepton::Electron,
            MoleculeLabel::Ppmu | MoleculeLabel::Ddmu => Lepton::Muon,
        }
    }

    /// Reduced nuclear mass ζ in electron masses.
    pub fn zeta(self) -> f64 {
        match self.nucleus() {
            Nucleus::Proton => ZETA_PP,
            Nucleus::Deuteron => ZETA_DD,
        }
    }

    /// Lepton mass m3 in electron masses.
    pub fn m3(self) -> f64 {
        self.lepton().mass()
    }

    /// The constituent atom whose orbital seeds the LCAO basis.
    pub fn atom(self) -> AtomLabel {
        match self {
            MoleculeLabel::Ppe => AtomLabel::Pe,
            MoleculeLabel::Dde => AtomLabel::De,
            MoleculeLabel::Ppmu => AtomLabel::Pmu,
            MoleculeLabel::Ddmu => AtomLabel::Dmu,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            MoleculeLabel::Ppe => "ppe",
            MoleculeLabel::Dde => "dde",
            MoleculeLabel::Ppmu => "ppmu",
            MoleculeLabel::Ddmu => "ddmu",
        }
    }

    pub fn all() -> [MoleculeLabel; 4] {
        [
            MoleculeLabel::Ppe,
            MoleculeLabel::Dde,
            MoleculeLabel::Ppmu,
            MoleculeLabel::Ddmu,
        ]
    }

    pub fn parse(s: &str) -> Option<MoleculeLabel> {
        match s {
            "ppe" => Some(MoleculeLabel::Ppe),
            "dde" => Some(MoleculeLabel::Dde),
            "ppmu" => Some(MoleculeLabel::Ppmu),
            "ddmu" => Some(MoleculeLabel::Ddmu),
            _ => None,
        }
    }
}

/// Bundled reference values for regression checks.
///
/// These are the published table cells the `reproduce` subcommands compare
/// against. Layout of the per-molecule rows: `[cs λ=0.2e-3, cs λ=0.2e-5,
/// logarithmic, coulomb3d]`. Row order: ppe, dde, ppmu, ddmu (for molecular
/// tables) or pe, de, pmu, dmu (for the atomic fit table).
pub mod reference {
    /// Fitted orbital parameters (a, b) per atom; columns are
    /// `[(a,b) at λ=0.2e-3, (a,b) at λ=0.2e-5]`.
    pub const ORBITAL_FITS: [[(f64, f64); 2]; 4] = [
        [(12.6765, 1.74095), (12.8453, 1.72068)], // pe
        [(12.6772, 1.74082), (12.7106, 1.7383)],  // de
        [(12.8302, 1.72352), (12.8298, 1.71609)], // pmu
        [(12.8373, 1.71479), (12.8285, 1.71633)], // dmu
    ];

    /// Molecular ground energies ε (hartree, ε = 2E convention).
    pub const EPSILON: [[f64; 4]; 4] = [
        [52.2987, 5.5253, 0.08835, -0.6067],  // ppe
        [57.9003, 5.5117, 0.01619, -1.2797],  // dde
        [62.9664, 6.8929, 18.5543, -129.3342], // ppmu
        [63.6303, 6.8760, 3.1897, -261.1241], // ddmu
    ];

    /// Mean internuclear distances ⟨ρ⟩ (Bohr radii).
    pub const MEAN_RHO: [[f64; 4]; 4] = [
        [0.5308, 0.0636, 2.0087, 1.9441], // ppe
        [0.3795, 0.0436, 1.4332, 1.4169], // dde
        [0.4917, 0.0537, 0.0105, 0.0101], // ppmu
        [0.3432, 0.0355, 0.0076, 0.0073], // ddmu
    ];

    /// Atomic ground energy anchor: pe at λ = 0.2e-5 (plotted wave-function
    /// caption value).
    pub const ETA_PE_LAMBDA_LO: f64 = -2.2417;

    /// Worked normalization example: (a, b) = (12.8453, 1.72068) gives
    /// A = 0.0275237 and c = A·a = 0.353501.
    pub const NORM_EXAMPLE_A: f64 = 0.0275237;
    pub const NORM_EXAMPLE_C: f64 = 0.353501;
}
