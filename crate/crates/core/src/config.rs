//! Instance configuration for the command-line driver.
//!
//! A config file pins one concrete instance: the skew field, the total
//! subring, the coset scale, the hyperbolic rank, and the sampling budget.
//! Verification runs compare their verdicts against the `expect` map, so a
//! negative-control config can declare that a named check is supposed to
//! fail and still exit cleanly when it does.

use crate::epimorphism::StructureSummary;
use crate::error::{Error, Result};
use crate::geometry::FormKind;
use crate::pqspace::PseudoQuadraticSpace;
use crate::scalar::{parse_scalar, FieldTag, SkewScalar};
use crate::subring::{SubringKind, TotalSubring};
use serde::Deserialize;
use std::collections::BTreeMap;

fn default_l() -> usize {
    2
}

fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub field: FieldTag,
    /// Total subring selector: `inert-p3`, `ramified-p2`, or `split-p5`.
    pub subring: String,
    /// Scalar literal naming the coset scale, e.g. `1`, `2`, or `1+i`.
    pub scale: String,
    /// Hyperbolic rank of the source space.
    #[serde(default = "default_l")]
    pub l: usize,
    pub seed: u64,
    /// Rounds per sampled check.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Expected verdict per check name (`pass` or `fail`); checks not listed
    /// are expected to pass.
    #[serde(default)]
    pub expect: BTreeMap<String, String>,
    /// Frozen residue structure the survey must reproduce.
    #[serde(default)]
    pub expected_structure: Option<ExpectedStructure>,
}

/// Shape of the residue structure a config pins down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedStructure {
    pub residue_size: usize,
    pub base_size: usize,
    pub module_size: usize,
    pub sigma_is_identity: bool,
    pub sigma_is_frobenius: bool,
    pub form_kind: FormKind,
}

impl ExpectedStructure {
    pub fn matches(&self, s: &StructureSummary) -> bool {
        self.residue_size == s.residue_size
            && self.base_size == s.base_size
            && self.module_size == s.module_size
            && self.sigma_is_identity == s.sigma_is_identity
            && self.sigma_is_frobenius == s.sigma_is_frobenius
            && self.form_kind == s.form_kind
    }
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: InstanceConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let kind = self.subring_kind()?;
        if kind.field() != self.field {
            return Err(Error::Config(format!(
                "subring {} lives over {}, not {}",
                self.subring,
                kind.field(),
                self.field
            )));
        }
        if self.l < 2 {
            return Err(Error::Config(format!(
                "rank must be at least 2, got {}",
                self.l
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        parse_scalar(self.field, &self.scale)
            .map_err(|e| Error::Config(format!("bad scale literal {:?}: {e}", self.scale)))?;
        for (check, verdict) in &self.expect {
            if verdict != "pass" && verdict != "fail" {
                return Err(Error::Config(format!(
                    "expect[{check}] must be \"pass\" or \"fail\", got {verdict:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn subring_kind(&self) -> Result<SubringKind> {
        match self.subring.as_str() {
            "inert-p3" => Ok(SubringKind::InertGaussian),
            "ramified-p2" => Ok(SubringKind::RamifiedQuaternion),
            "split-p5" => Ok(SubringKind::SplitGaussian),
            other => Err(Error::Config(format!("unknown subring {other:?}"))),
        }
    }

    /// Materializes the configured instance. `l` may be overridden by a
    /// command-line flag.
    pub fn build(&self, l: usize) -> Result<(PseudoQuadraticSpace, TotalSubring, SkewScalar)> {
        if l < 2 {
            return Err(Error::Config(format!("rank must be at least 2, got {l}")));
        }
        let space = PseudoQuadraticSpace::standard(self.field, l)?;
        let sub = TotalSubring::new(self.subring_kind()?);
        let scale = parse_scalar(self.field, &self.scale)?;
        Ok((space, sub, scale))
    }

    /// `field/subring/s=scale`, matching the label the epimorphism reports.
    pub fn instance_label(&self) -> String {
        let field = match self.field {
            FieldTag::Rational => "rational",
            FieldTag::GaussianRational => "gaussian",
            FieldTag::RationalQuaternion => "quaternion",
        };
        format!("{field}/{}/s={}", self.subring, self.scale)
    }
}

/// The configs shipped with the binary, in the order `selftest` runs them.
pub fn embedded_configs() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "gaussian-p3-s1",
            include_str!("../configs/gaussian-p3-s1.json"),
        ),
        (
            "quaternion-p2-s1+i",
            include_str!("../configs/quaternion-p2-s1+i.json"),
        ),
        (
            "quaternion-p2-s2",
            include_str!("../configs/quaternion-p2-s2.json"),
        ),
        (
            "split-gaussian-negative-control",
            include_str!("../configs/split-gaussian-negative-control.json"),
        ),
    ]
}
