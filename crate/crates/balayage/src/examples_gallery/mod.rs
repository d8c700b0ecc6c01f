//! Parametric generators for the named examples and counterexamples of
//! the calculus, each a finite instance with declared truncation
//! semantics, plus runners that reproduce their qualitative behaviour.

mod clouds;
mod params;
mod series_families;
mod trees;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{Instance, InstanceDoc};

pub use clouds::{figure_cloud, unit_cloud, xy_space, P_NOT_B_MARKERS, R_NOT_P_MARKERS, S1_NOT_R_MARKERS};
pub use params::{Params, Sequence};
pub use series_families::{
    fh_failure, fh_failure_ratio_bound, fh_failure_report, series_by_steps, shift_example, shift_series,
    star_example, star_series, unbounded_row_example, unbounded_row_series, ExistentialGap, FhFailureReport,
    ShiftSeries,
};
pub use trees::{
    adversarial_kernel, adversarial_stage_depth, adversarial_tree, good_sweep_tree, run_adversarial_tree,
    run_good_sweep_tree, AdversarialRun, AdversarialStage, GammaTable, GoodSweepRun, GoodSweepStage, TREE_SITE_CAP,
};

/// A built gallery instance.
#[derive(Debug, Clone)]
pub struct GalleryInstance {
    /// Family name.
    pub family: String,
    /// Resolved parameters (defaults included).
    pub params: BTreeMap<String, String>,
    /// The instance; sweep orders are stored as point profiles.
    pub instance: Instance,
    /// Which quantities are exact and which are truncated.
    pub truncation: String,
}

impl GalleryInstance {
    fn new(family: &str, instance: Instance, truncation: String) -> Self {
        Self { family: family.to_string(), params: BTreeMap::new(), instance, truncation }
    }

    /// The instance document, with the family, parameters and truncation
    /// semantics in `notes`.
    pub fn to_doc(&self) -> Result<InstanceDoc> {
        let mut doc = self.instance.to_doc()?;
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        doc.notes = Some(format!("{} [{}]: {}", self.family, params.join(" "), self.truncation));
        Ok(doc)
    }
}

/// One documented parameter of a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDoc {
    /// Parameter name.
    pub name: &'static str,
    /// Default value.
    pub default: &'static str,
    /// Meaning.
    pub meaning: &'static str,
}

/// A parametric family of finite instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedFamily {
    /// Family name, as accepted by [`build`].
    pub name: &'static str,
    /// What the family demonstrates.
    pub summary: &'static str,
    /// Parameters with defaults.
    pub parameters: Vec<ParamDoc>,
}

const fn p(name: &'static str, default: &'static str, meaning: &'static str) -> ParamDoc {
    ParamDoc { name, default, meaning }
}

/// All families, in a fixed order.
pub fn list() -> Vec<TruncatedFamily> {
    vec![
        TruncatedFamily {
            name: "star_example",
            summary: "α_{0j} = 1: Σ c(I_ΛαI_Λ)^k w grows like M while f_1 = f_2 = χ_Λ gives ‖c‖_1",
            parameters: vec![p("m", "10", "number of leaves M")],
        },
        TruncatedFamily {
            name: "unbounded_row_example",
            summary: "α_{x_i y_j} = 1 for j ≤ i: (αw)_{x_i} = i is finite but unbounded relative to w",
            parameters: vec![p("m", "10", "number of pairs M")],
        },
        TruncatedFamily {
            name: "adversarial_tree",
            summary: "tree kernel with c α^k w = ρ_k on which the order 0, A_L1, B_1, A_L2, … accumulates dirt",
            parameters: vec![
                p("rho", "1", "ρ_0, ρ_1, … (one value: constant)"),
                p("depth", "6", "number of branches kept"),
                p("stages", "depth", "stage depths L_1 < L_2 < … of the sweep order"),
            ],
        },
        TruncatedFamily {
            name: "good_sweep_tree",
            summary: "γ-weighted tree on which the branch-by-branch order drives the dirt to 0",
            parameters: vec![
                p("rho", "1", "ρ_0, ρ_1, … (one value: constant)"),
                p("depth", "40", "number of branches kept"),
                p("sigma", "harmonic", "σ_1, σ_2, … or `harmonic` for σ_ℓ = 1/ℓ"),
            ],
        },
        TruncatedFamily {
            name: "shift_example",
            summary: "right shift with w_j = 1/j²: Σ c α^k w = H_M diverges, Σ c T_ν^k w stays bounded",
            parameters: vec![p("m", "16", "number of sites M")],
        },
        TruncatedFamily {
            name: "fh_failure",
            summary: "every finite block contracts, yet a subinvariant w needs w_1/w_2 ≥ 2^(M−1) − 1",
            parameters: vec![p("m", "8", "number of sites M"), p("eps", "0", "α_11 = ε ∈ [0, 1)")],
        },
        TruncatedFamily {
            name: "cloud_P_not_B",
            summary: "two-site cloud in 𝒫 but not a combination of β-products",
            parameters: vec![],
        },
        TruncatedFamily {
            name: "cloud_R_not_P",
            summary: "two-site cloud in ℛ but not 𝒫 (witness xyx vs xx)",
            parameters: vec![],
        },
        TruncatedFamily {
            name: "cloud_S1_not_R",
            summary: "two-site cloud in 𝒮_1 but not ℛ (witness xy)",
            parameters: vec![],
        },
    ]
}

/// Builds a family member.  Unknown families and parameters are contract
/// errors.
pub fn build(name: &str, mut params: Params) -> Result<GalleryInstance> {
    let mut g = match name {
        "star_example" => star_example(&mut params)?,
        "unbounded_row_example" => unbounded_row_example(&mut params)?,
        "adversarial_tree" => adversarial_tree(&mut params)?,
        "good_sweep_tree" => good_sweep_tree(&mut params)?,
        "shift_example" => shift_example(&mut params)?,
        "fh_failure" => fh_failure(&mut params)?,
        "cloud_P_not_B" => clouds::build(name, "in 𝒫, not in ℬ")?,
        "cloud_R_not_P" => clouds::build(name, "in ℛ, not in 𝒫")?,
        "cloud_S1_not_R" => clouds::build(name, "in 𝒮_1, not in ℛ")?,
        _ => {
            let known: Vec<&str> = list().iter().map(|f| f.name).collect();
            return Err(Error::contract(format!("unknown gallery family `{name}`; known: {}", known.join(", "))));
        }
    };
    g.params = params.finish(name)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_builds_with_defaults() {
        for f in list() {
            let g = build(f.name, Params::default()).unwrap();
            let doc = g.to_doc().unwrap();
            let back = Instance::from_doc(&doc).unwrap();
            assert_eq!(back.space().len(), g.instance.space().len(), "{}", f.name);
        }
    }

    #[test]
    fn truncation_grows_site_count() {
        for name in ["star_example", "unbounded_row_example", "shift_example", "fh_failure"] {
            let a = build(name, Params::parse(&["m=5"]).unwrap()).unwrap();
            let b = build(name, Params::parse(&["m=9"]).unwrap()).unwrap();
            assert!(b.instance.space().len() > a.instance.space().len());
        }
        let a = build("adversarial_tree", Params::parse(&["depth=3"]).unwrap()).unwrap();
        let b = build("adversarial_tree", Params::parse(&["depth=4"]).unwrap()).unwrap();
        assert!(b.instance.space().len() > a.instance.space().len());
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(build("nope", Params::default()).is_err());
        assert!(build("star_example", Params::parse(&["depth=3"]).unwrap()).is_err());
    }
}
