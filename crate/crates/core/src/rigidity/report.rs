use serde::{Deserialize, Serialize};

use super::bounds::{
    arithmetic_grid_step, interior_lower, rigidity_lower_grid, rigidity_lower_main1, rigidity_lower_measure,
    univariate_grid_lower, Bound, Provenance,
};
use super::smooth::SmoothFunction;
use super::witness::{construct_upper_witness, UpperWitness};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, PointSet};
use crate::remez::{remez_constant, remez_upper_from_omega, RemezEstimate, RemezOptions, RemezStatus};
use crate::vitushkin::{omega, OmegaOptions, OmegaResult, COVERING_CONVENTION};

pub const DERIVATIVE_CONVENTION: &str = "distinct-multi-indices";

/// Relative slack allowed between certified lower and upper bounds.
pub const SANDWICH_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityConfig {
    pub remez: RemezOptions,
    pub omega: OmegaOptions,
    /// Lattice step for derivative norms of the witness.
    pub derivative_resolution: f64,
    /// Caller asserts that `Z` has interior.
    pub interior: bool,
    pub include_witness: bool,
}

impl Default for RigidityConfig {
    fn default() -> Self {
        RigidityConfig {
            remez: RemezOptions {
                oracle: true,
                ..Default::default()
            },
            omega: OmegaOptions::default(),
            derivative_resolution: 1.0 / 64.0,
            interior: false,
            include_witness: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    /// From `R̂ ≥ 1 / R_upper` with `R_upper` from the certified `ω`.
    pub main1_certified: Option<Bound>,
    pub main1_oracle: Option<Bound>,
    /// From the search value, which overestimates `R̂`.
    pub main1_estimate: Option<Bound>,
    pub main3: Option<Bound>,
    pub cor5_measure: Option<Bound>,
    pub interior: Option<Bound>,
    pub univariate_grid: Option<Bound>,
}

impl LowerBounds {
    pub fn all(&self) -> impl Iterator<Item = &Bound> {
        [
            &self.main1_certified,
            &self.main1_oracle,
            &self.main1_estimate,
            &self.main3,
            &self.cor5_measure,
            &self.interior,
            &self.univariate_grid,
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UpperBounds {
    /// Measured `M_{d+1}(f̂)` of the constructed witness.
    pub construction: Option<Bound>,
    /// `C(n,d)/ρ^{d+1} · r/(1 − r)`.
    pub theorem: Option<Bound>,
}

impl UpperBounds {
    pub fn all(&self) -> impl Iterator<Item = &Bound> {
        [&self.construction, &self.theorem].into_iter().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub bump_constant: Option<f64>,
    pub rho: Option<f64>,
    pub rho_inf: Option<f64>,
    pub size: usize,
    pub omega: Option<f64>,
    pub lambda_bar: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub covering: String,
    pub derivative_norm: String,
    pub bump_exponent: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// `r = max_Z |P|` with `M_0(P) = 1`.
    pub max_on_z: f64,
    pub m0: f64,
    /// `1 / (1 − r)`, the worst case of `1 / M_0(f)`.
    pub factor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub n: usize,
    pub d: usize,
    pub status: RemezStatus,
    pub degenerate: bool,
    pub remez: RemezEstimate,
    pub omega: Option<OmegaResult>,
    pub lower: LowerBounds,
    pub upper: UpperBounds,
    pub constants: Constants,
    pub conventions: Conventions,
    pub normalization: Option<Normalization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SmoothFunction>,
}

impl RigidityReport {
    /// Largest certified lower bound; zero when none applies.
    pub fn best_lower(&self) -> f64 {
        self.lower
            .all()
            .filter(|b| b.is_certified())
            .map(|b| b.value)
            .fold(0.0, f64::max)
    }

    /// Smallest upper bound entry.
    pub fn best_upper(&self) -> Option<f64> {
        self.upper.all().map(|b| b.value).reduce(f64::min)
    }

    /// Fails when a certified lower bound exceeds an upper bound by more
    /// than [`SANDWICH_TOLERANCE`].
    pub fn check_sandwich(&self) -> Result<()> {
        for lo in self.lower.all().filter(|b| b.is_certified()) {
            for up in self.upper.all().filter(|b| b.value.is_finite()) {
                if lo.value > up.value * (1.0 + SANDWICH_TOLERANCE) + 1e-12 {
                    return Err(Error::SandwichViolation(format!(
                        "{} lower bound {} exceeds {} upper bound {}",
                        lo.source, lo.value, up.source, up.value
                    )));
                }
            }
        }
        Ok(())
    }
}

fn certified(value: f64, source: &str) -> Option<Bound> {
    Some(Bound::new(value, Provenance::Certified, source))
}

/// Rank test, Remez search and `ω` route, lower bounds, witness and upper
/// bounds, with every number labeled.
pub fn build_report(z: &PointSet, d: usize, config: &RigidityConfig) -> Result<RigidityReport> {
    let n = z.n();
    let remez_opts = RemezOptions {
        omega: None,
        ..config.remez.clone()
    };
    // ω is defined for d ≥ 1 only.
    let (remez, om) = rayon::join(
        || remez_constant(z, d, &remez_opts),
        || (d >= 1).then(|| omega(z, d, &config.omega)).transpose(),
    );
    let mut remez = remez?;
    let om = om?;
    let certified_omega = om.as_ref().map(|o| o.certified);
    let upper_omega = certified_omega.and_then(|w| remez_upper_from_omega(n, d, w));
    remez.upper_omega = upper_omega;
    let lambda_bar = certified_omega.filter(|w| *w > 0.0).map(|w| w / unit_ball_volume(n));

    let mut lower = LowerBounds::default();
    let mut upper = UpperBounds::default();
    let mut normalization = None;
    let mut witness = None;
    let mut bump_constant = None;
    let degenerate = remez.status == RemezStatus::Infinite;

    if degenerate {
        lower.main1_certified = certified(0.0, "rank-deficient");
        upper.construction = Some(Bound::new(0.0, Provenance::Certified, "vanishing-polynomial"));
    } else {
        if let Some(r) = upper_omega {
            lower.main1_certified = Some(Bound {
                source: "inverse-remez-omega".into(),
                ..rigidity_lower_main1(1.0 / r, Provenance::Certified, d)
            });
        }
        if let Some(lb) = lambda_bar.filter(|l| *l <= 1.0) {
            let (_, v) = rigidity_lower_measure(0.0, lb, d, n)?;
            lower.cor5_measure = certified(v, "measure-omega");
        }
        if let Some(o) = remez.oracle_upper {
            lower.main1_oracle = Some(Bound {
                source: "inverse-remez-oracle".into(),
                ..rigidity_lower_main1(1.0 / o, Provenance::Certified, d)
            });
        }
        if remez.status == RemezStatus::Finite {
            lower.main1_estimate = Some(Bound {
                source: "inverse-remez-search".into(),
                ..rigidity_lower_main1(1.0 / remez.lower, Provenance::Estimate, d)
            });
        }
        if let Some(v) = rigidity_lower_grid(z, d) {
            lower.main3 = certified(v, "grid-cardinality");
        }
        if let Some(h) = arithmetic_grid_step(z) {
            lower.univariate_grid = certified(univariate_grid_lower(d, h), "univariate-grid");
        }

        if let Some(p) = remez.witness_poly.as_ref().filter(|_| remez.status == RemezStatus::Finite) {
            let w: UpperWitness = construct_upper_witness(z, d, p, config.derivative_resolution)?;
            upper.construction = Some(Bound::new(w.derivative_norm, Provenance::Estimate, "bump-witness"));
            upper.theorem = w
                .theorem_bound
                .map(|t| Bound::new(t, Provenance::Estimate, "bump-theorem"));
            bump_constant = Some(w.bump_constant);
            normalization = Some(Normalization {
                max_on_z: w.max_on_z,
                m0: w.m0_unnormalized,
                factor: (w.max_on_z < 1.0).then(|| 1.0 / (1.0 - w.max_on_z)),
            });
            if config.include_witness {
                witness = Some(w.function);
            }
        }
    }
    if config.interior {
        lower.interior = certified(interior_lower(d), "interior");
    }

    let report = RigidityReport {
        n,
        d,
        status: remez.status,
        degenerate,
        remez,
        constants: Constants {
            bump_constant,
            rho: z.rho(),
            rho_inf: z.linf_min_separation().ok(),
            size: z.len(),
            omega: certified_omega,
            lambda_bar,
        },
        omega: om,
        lower,
        upper,
        conventions: Conventions {
            covering: COVERING_CONVENTION.into(),
            derivative_norm: DERIVATIVE_CONVENTION.into(),
            bump_exponent: d + 2,
        },
        normalization,
        witness,
    };
    report.check_sandwich()?;
    Ok(report)
}
