//! Declarative job configuration (versioned JSON schema, fail-closed).

use num_complex::Complex64;
use serde::Deserialize;

use cornerspec::geometry::{
    circle_cross_section, make_grid, BoundaryCondition, CornerModel, CornerPotential,
    CrossSectionSpectrum, GaussianTerm, HalfLineGrid, PotentialProfile,
};
use cornerspec::scaling::{CutoffProfile, DilationParameter};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisKind {
    Spectrum,
    Resonances,
    Numrange,
    Weyl,
    Resolvent,
    Ichinose,
}

impl AnalysisKind {
    pub fn name(self) -> &'static str {
        match self {
            AnalysisKind::Spectrum => "spectrum",
            AnalysisKind::Resonances => "resonances",
            AnalysisKind::Numrange => "numrange",
            AnalysisKind::Weyl => "weyl",
            AnalysisKind::Resolvent => "resolvent",
            AnalysisKind::Ichinose => "ichinose",
        }
    }

    pub fn all() -> Vec<AnalysisKind> {
        vec![
            AnalysisKind::Spectrum,
            AnalysisKind::Resonances,
            AnalysisKind::Numrange,
            AnalysisKind::Weyl,
            AnalysisKind::Resolvent,
            AnalysisKind::Ichinose,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cylinder,
    Corner,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSectionConfig {
    pub modes: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum BcConfig {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub u_max: f64,
    pub n: usize,
    pub bc0: BcConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub terms: Vec<TermConfig>,
    pub support_end: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CornerPotentialConfig {
    pub depth: f64,
    pub center: f64,
    pub width: f64,
    pub support_end: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub k: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub cross_section: CrossSectionConfig,
    #[serde(default)]
    pub profile: Option<ProfileConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub grid2: Option<GridConfig>,
    #[serde(default)]
    pub end_potential: Option<PotentialConfig>,
    #[serde(default)]
    pub end_potential2: Option<PotentialConfig>,
    #[serde(default)]
    pub corner_potential: Option<CornerPotentialConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Ray/discrete classification tolerance; `None` selects the
    /// `20 h^2 (1 + |mu_max|)` default per run.
    #[serde(default)]
    pub classification: Option<f64>,
    #[serde(default = "d_match")]
    pub match_tol: f64,
    #[serde(default = "d_ray")]
    pub ray_distance: f64,
    #[serde(default = "d_ray_top")]
    pub ray_top: usize,
    #[serde(default = "d_theta_agreement")]
    pub theta_agreement: f64,
    #[serde(default = "d_holomorphy")]
    pub holomorphy: f64,
    #[serde(default = "d_sector_k")]
    pub sector_k_min: f64,
    #[serde(default = "d_slope")]
    pub slope_max: f64,
    #[serde(default = "d_ich_rand")]
    pub ichinose_random: f64,
    #[serde(default = "d_ich_block")]
    pub ichinose_blocks: f64,
}

fn d_match() -> f64 {
    1e-4
}
fn d_ray() -> f64 {
    0.05
}
fn d_ray_top() -> usize {
    10
}
fn d_theta_agreement() -> f64 {
    1e-6
}
fn d_holomorphy() -> f64 {
    1e-8
}
fn d_sector_k() -> f64 {
    0.2
}
fn d_slope() -> f64 {
    -0.8
}
fn d_ich_rand() -> f64 {
    1e-8
}
fn d_ich_block() -> f64 {
    1e-7
}

impl Default for Tolerances {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn d_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema_version: u32,
    pub model: ModelConfig,
    /// Dilation parameters as `[re, im]` pairs.
    pub thetas: Vec<[f64; 2]>,
    #[serde(default)]
    pub analyses: Vec<AnalysisKind>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "d_seed")]
    pub seed: u64,
}

/// Validated, constructed model objects ready for the analyses.
pub struct Job {
    pub profile: CutoffProfile<f64>,
    pub cross_section: CrossSectionSpectrum<f64>,
    pub grid: HalfLineGrid<f64>,
    pub corner: Option<CornerModel<f64>>,
    pub end_potential: PotentialProfile<f64>,
    pub thetas: Vec<DilationParameter<f64>>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub kind: ModelKind,
}

fn build_potential(
    cfg: &Option<PotentialConfig>,
    profile: &CutoffProfile<f64>,
    errors: &mut Vec<String>,
    which: &str,
) -> PotentialProfile<f64> {
    match cfg {
        None => PotentialProfile::zero(),
        Some(p) => {
            let terms = p
                .terms
                .iter()
                .map(|t| GaussianTerm {
                    amplitude: t.amplitude,
                    center: t.center,
                    width: t.width,
                })
                .collect();
            match PotentialProfile::from_terms(terms, p.support_end, profile) {
                Ok(v) => v,
                Err(e) => {
                    errors.push(format!("{which}: {e}"));
                    PotentialProfile::zero()
                }
            }
        }
    }
}

/// Validate the configuration and construct the model; all problems are
/// collected and reported together.
pub fn validate(config: &JobConfig) -> Result<Job, Vec<String>> {
    let mut errors = Vec::new();
    if config.schema_version != SCHEMA_VERSION {
        errors.push(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            config.schema_version
        ));
    }
    let profile = match &config.model.profile {
        None => CutoffProfile::default(),
        Some(p) => match CutoffProfile::new(p.k, p.r) {
            Ok(pr) => pr,
            Err(e) => {
                errors.push(format!("profile: {e}"));
                CutoffProfile::default()
            }
        },
    };
    let cross_section = match circle_cross_section(
        config.model.cross_section.modes,
        config.model.cross_section.radius,
    ) {
        Ok(cs) => cs,
        Err(e) => {
            errors.push(format!("cross_section: {e}"));
            circle_cross_section(1, 1.0).expect("fallback cross-section")
        }
    };
    let to_bc = |b: &BcConfig| match b {
        BcConfig::Dirichlet => BoundaryCondition::Dirichlet,
        BcConfig::Neumann => BoundaryCondition::Neumann,
    };
    let grid = match make_grid(
        config.model.grid.u_max,
        config.model.grid.n,
        to_bc(&config.model.grid.bc0),
    ) {
        Ok(g) => g,
        Err(e) => {
            errors.push(format!("grid: {e}"));
            make_grid(16.0, 100, BoundaryCondition::Dirichlet).expect("fallback grid")
        }
    };
    if grid.u_max() <= profile.outer_radius() {
        errors.push(format!(
            "grid u_max {} must exceed the profile radius {}",
            grid.u_max(),
            profile.outer_radius()
        ));
    }
    let end_potential = build_potential(&config.model.end_potential, &profile, &mut errors, "end_potential");
    let mut thetas = Vec::new();
    for &[re, im] in &config.thetas {
        match DilationParameter::new(Complex64::new(re, im)) {
            Ok(t) => thetas.push(t),
            Err(e) => errors.push(format!("theta [{re}, {im}]: {e}")),
        }
    }
    if thetas.is_empty() {
        errors.push("at least one theta is required".into());
    }
    let corner = if config.model.kind == ModelKind::Corner {
        let grid2 = match &config.model.grid2 {
            Some(g) => match make_grid(g.u_max, g.n, to_bc(&g.bc0)) {
                Ok(g) => g,
                Err(e) => {
                    errors.push(format!("grid2: {e}"));
                    grid
                }
            },
            None => grid,
        };
        let end2 = build_potential(&config.model.end_potential2, &profile, &mut errors, "end_potential2");
        let corner_potential = match &config.model.corner_potential {
            None => None,
            Some(c) => match CornerPotential::new(c.depth, c.center, c.width, c.support_end, &profile) {
                Ok(v) => Some(v),
                Err(e) => {
                    errors.push(format!("corner_potential: {e}"));
                    None
                }
            },
        };
        Some(CornerModel {
            cross_section: cross_section.clone(),
            grid1: grid,
            grid2,
            end_potential1: end_potential.clone(),
            end_potential2: end2,
            corner_potential,
        })
    } else {
        if config.model.grid2.is_some() || config.model.end_potential2.is_some() || config.model.corner_potential.is_some() {
            errors.push("grid2/end_potential2/corner_potential require a corner model".into());
        }
        None
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(Job {
        profile,
        cross_section,
        grid,
        corner,
        end_potential,
        thetas,
        tolerances: config.tolerances.clone(),
        seed: config.seed,
        kind: config.model.kind,
    })
}
