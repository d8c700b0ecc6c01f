//! JSON instance documents.
//!
//! ```json
//! {
//!   "sites": ["x", "y", "z"],
//!   "entries": [["x", "y", 0.5], ["y", "z", 1.0]],
//!   "lambda": ["x", "y"],
//!   "c": {"x": 1.0},
//!   "w": {"x": 1.0, "y": 1.0, "z": 1.0},
//!   "profiles": [{"x": 1.0}, {"y": 0.5}],
//!   "cloud": {"markers": [{"path": ["x", "y"], "w": 1.0}], "level_bound": 1}
//! }
//! ```
//!
//! Only `sites` and `entries` are required.  Vectors are `{site: value}`
//! maps; absent sites take value 0 (dirt, profiles) or 1 (weights).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cloud_algebra::{Cloud, CloudLiteral};
use crate::error::{Error, Result};
use crate::kernel_core::{DirtVector, Kernel, Profile, SiteSet, SiteSpace, WeightVector};

/// The serialized form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    /// Site identifiers, in index order.
    pub sites: Vec<String>,
    /// Kernel entries `[row, col, value]`.
    pub entries: Vec<(String, String, f64)>,
    /// Region `Λ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    /// Dirt vector `c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<BTreeMap<String, f64>>,
    /// Weight vector `w`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<BTreeMap<String, f64>>,
    /// Cleaning profiles of a schedule.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profiles: Vec<BTreeMap<String, f64>>,
    /// A finite cloud.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<CloudLiteral>,
    /// Free-form description (truncation semantics, parameters).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A parsed instance: a kernel with optional region, vectors, profiles
/// and cloud.
#[derive(Debug, Clone)]
pub struct Instance {
    /// The kernel `α` (its space is the instance's site space).
    pub kernel: Kernel,
    /// Region `Λ`.
    pub lambda: Option<SiteSet>,
    /// Dirt `c`.
    pub c: Option<DirtVector>,
    /// Weight `w`.
    pub w: Option<WeightVector>,
    /// Schedule profiles.
    pub profiles: Vec<Profile>,
    /// A finite cloud.
    pub cloud: Option<Cloud<f64>>,
    /// Description.
    pub notes: Option<String>,
}

impl Instance {
    /// An instance holding only a kernel.
    pub fn new(kernel: Kernel) -> Self {
        Self { kernel, lambda: None, c: None, w: None, profiles: Vec::new(), cloud: None, notes: None }
    }

    /// The site space.
    pub fn space(&self) -> &SiteSpace {
        self.kernel.space()
    }

    /// Parses and validates a document.
    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let space = SiteSpace::new(doc.sites.iter())?;
        let kernel = Kernel::from_named(&space, doc.entries.iter().map(|(r, c, v)| (r.as_str(), c.as_str(), *v)))?;
        let lambda = doc.lambda.as_ref().map(|l| SiteSet::from_names(&space, l)).transpose()?;
        let c = doc.c.as_ref().map(|m| DirtVector::from_map(&space, m)).transpose()?;
        let w = doc.w.as_ref().map(|m| WeightVector::from_map(&space, m)).transpose()?;
        let profiles = doc.profiles.iter().map(|m| Profile::from_map(&space, m)).collect::<Result<_>>()?;
        let cloud = doc.cloud.as_ref().map(|l| Cloud::from_literal(&space, l)).transpose()?;
        Ok(Self { kernel, lambda, c, w, profiles, cloud, notes: doc.notes.clone() })
    }

    /// The serialized form.
    pub fn to_doc(&self) -> Result<InstanceDoc> {
        let space = self.space();
        Ok(InstanceDoc {
            sites: space.sites().to_vec(),
            entries: self
                .kernel
                .entries()
                .map(|(i, j, v)| (space.name(i).to_string(), space.name(j).to_string(), v))
                .collect(),
            lambda: self.lambda.as_ref().map(SiteSet::names),
            c: self.c.as_ref().map(DirtVector::to_map),
            w: self.w.as_ref().map(WeightVector::to_map),
            profiles: self.profiles.iter().map(Profile::to_map).collect(),
            cloud: self.cloud.as_ref().map(Cloud::to_literal).transpose()?,
            notes: self.notes.clone(),
        })
    }

    /// Parses a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Pretty-printed JSON.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_doc()?).map_err(|e| Error::Parse(e.to_string()))
    }

    /// The region, or a contract error naming `what` needs it.
    pub fn require_lambda(&self, what: &str) -> Result<&SiteSet> {
        self.lambda.as_ref().ok_or_else(|| Error::contract(format!("{what} needs a region `lambda`")))
    }

    /// The dirt vector, or a contract error.
    pub fn require_c(&self, what: &str) -> Result<&DirtVector> {
        self.c.as_ref().ok_or_else(|| Error::contract(format!("{what} needs a dirt vector `c`")))
    }

    /// The weight, defaulting to `w ≡ 1`.
    pub fn weight_or_ones(&self) -> WeightVector {
        self.w.clone().unwrap_or_else(|| WeightVector::ones(self.space()))
    }
}
