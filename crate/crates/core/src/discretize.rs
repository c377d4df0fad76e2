//! Linguistic transformation: numeric feature records to [`LinguisticFrame`]s.
//!
//! Numeric features use half-open intervals `[low, high)` between increasing
//! breakpoints; a value exactly at a breakpoint falls in the upper category
//! and the last category extends to +∞. Orientation is binned around quadrant
//! centers. Categorical features map raw labels through a lookup table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PedestrianFrameRecord, VehicleFrameRecord};
use crate::kg::{LinguisticFrame, Ontology};

pub const VEHICLE_FEATURES: [&str; 7] = [
    "latVelocity",
    "latAcceleration",
    "ttcP",
    "ttcLP",
    "ttcRP",
    "ttcLF",
    "ttcRF",
];

pub const PEDESTRIAN_FEATURES: [&str; 5] =
    ["activity", "distEgo", "distCurb", "orientationDeg", "gaze"];

pub const VEHICLE_THRESHOLDS: &str = include_str!("../data/vehicle_thresholds.toml");
pub const PEDESTRIAN_THRESHOLDS: &str = include_str!("../data/pedestrian_thresholds.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureRule {
    Numeric {
        name: String,
        relation: String,
        unit: String,
        breakpoints: Vec<f64>,
        categories: Vec<String>,
        /// Category for an absent value (no interacting vehicle).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        missing: Option<String>,
    },
    Circular {
        name: String,
        relation: String,
        unit: String,
        centers: Vec<f64>,
        categories: Vec<String>,
    },
    Categorical {
        name: String,
        relation: String,
        map: BTreeMap<String, String>,
    },
}

impl FeatureRule {
    pub fn name(&self) -> &str {
        match self {
            FeatureRule::Numeric { name, .. }
            | FeatureRule::Circular { name, .. }
            | FeatureRule::Categorical { name, .. } => name,
        }
    }

    pub fn relation(&self) -> &str {
        match self {
            FeatureRule::Numeric { relation, .. }
            | FeatureRule::Circular { relation, .. }
            | FeatureRule::Categorical { relation, .. } => relation,
        }
    }

    /// Category of a numeric or angular value; `None` selects the `missing`
    /// category.
    pub fn categorize(&self, value: Option<f64>) -> Result<&str> {
        match (self, value) {
            (FeatureRule::Numeric { missing, name, .. }, None) => missing
                .as_deref()
                .ok_or_else(|| Error::InvalidInput(format!("`{name}` has no value"))),
            (FeatureRule::Numeric { missing: Some(m), .. }, Some(v)) if !v.is_finite() => Ok(m),
            (
                FeatureRule::Numeric {
                    breakpoints,
                    categories,
                    name,
                    ..
                },
                Some(v),
            ) => {
                if v.is_nan() {
                    return Err(Error::InvalidInput(format!("`{name}` is NaN")));
                }
                Ok(&categories[breakpoints.partition_point(|b| *b <= v)])
            }
            (
                FeatureRule::Circular {
                    centers,
                    categories,
                    name,
                    ..
                },
                Some(v),
            ) => {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!("`{name}` is not finite")));
                }
                Ok(&categories[circular_bin(centers, v)])
            }
            (rule, _) => Err(Error::InvalidInput(format!(
                "`{}` cannot categorize a numeric value",
                rule.name()
            ))),
        }
    }

    pub fn categorize_label(&self, raw: &str) -> Result<&str> {
        match self {
            FeatureRule::Categorical { map, name, .. } => map
                .get(raw)
                .map(String::as_str)
                .ok_or_else(|| Error::InvalidInput(format!("`{name}` has no category for `{raw}`"))),
            _ => Err(Error::InvalidInput(format!(
                "`{}` is not categorical",
                self.name()
            ))),
        }
    }

    fn categories(&self) -> Vec<&str> {
        match self {
            FeatureRule::Numeric {
                categories,
                missing,
                ..
            } => categories
                .iter()
                .chain(missing.iter())
                .map(String::as_str)
                .collect(),
            FeatureRule::Circular { categories, .. } => {
                categories.iter().map(String::as_str).collect()
            }
            FeatureRule::Categorical { map, .. } => map.values().map(String::as_str).collect(),
        }
    }
}

/// Index of the center whose sector `[mid(prev, c), mid(c, next))` contains
/// `angle`, wrapping at 360°.
fn circular_bin(centers: &[f64], angle: f64) -> usize {
    let n = centers.len();
    if n == 1 {
        return 0;
    }
    let a = angle.rem_euclid(360.0);
    for i in 0..n {
        let prev = centers[(i + n - 1) % n];
        let next = centers[(i + 1) % n];
        let c = centers[i];
        let lo = c - (c - prev).rem_euclid(360.0) / 2.0;
        let hi = c + (next - c).rem_euclid(360.0) / 2.0;
        if (a - lo).rem_euclid(360.0) < hi - lo {
            return i;
        }
    }
    unreachable!("sectors cover the circle")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub name: String,
    #[serde(rename = "feature")]
    pub features: Vec<FeatureRule>,
}

impl ThresholdConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            context: "threshold config".into(),
            line: e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("threshold config serializes")
    }

    /// Shipped vehicle defaults: lateral velocity ±0.2 m/s, lateral
    /// acceleration ±0.1 m/s², TTC high < 3 s ≤ medium < 6 s ≤ low.
    pub fn vehicle_default() -> Self {
        Self::from_toml_str(VEHICLE_THRESHOLDS).expect("bundled vehicle thresholds parse")
    }

    pub fn pedestrian_default() -> Self {
        Self::from_toml_str(PEDESTRIAN_THRESHOLDS).expect("bundled pedestrian thresholds parse")
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureRule> {
        self.features.iter().find(|f| f.name() == name)
    }

    pub fn validate(&self, ontology: &Ontology) -> Result<()> {
        for rule in &self.features {
            let name = rule.name();
            let bad = |m: String| Error::Config(format!("feature `{name}`: {m}"));
            match rule {
                FeatureRule::Numeric {
                    breakpoints,
                    categories,
                    ..
                } => {
                    if breakpoints.iter().any(|b| !b.is_finite())
                        || breakpoints.windows(2).any(|w| w[0] >= w[1])
                    {
                        return Err(bad("breakpoints must be finite and strictly increasing".into()));
                    }
                    if categories.len() != breakpoints.len() + 1 {
                        return Err(bad(format!(
                            "{} breakpoints need {} categories, found {}",
                            breakpoints.len(),
                            breakpoints.len() + 1,
                            categories.len()
                        )));
                    }
                }
                FeatureRule::Circular {
                    centers,
                    categories,
                    ..
                } => {
                    if centers.is_empty()
                        || centers.iter().any(|c| !(0.0..360.0).contains(c))
                        || centers.windows(2).any(|w| w[0] >= w[1])
                    {
                        return Err(bad("centers must be strictly increasing in [0, 360)".into()));
                    }
                    if categories.len() != centers.len() {
                        return Err(bad("one category per center".into()));
                    }
                }
                FeatureRule::Categorical { map, .. } => {
                    if map.is_empty() {
                        return Err(bad("empty category map".into()));
                    }
                }
            }
            let range = ontology.range_instances(rule.relation());
            if range.is_empty() {
                return Err(bad(format!(
                    "relation `{}` has no instances in ontology `{}`",
                    rule.relation(),
                    ontology.name()
                )));
            }
            for c in rule.categories() {
                if !range.contains(&c) {
                    return Err(bad(format!(
                        "category `{c}` is not an instance of `{}` in the ontology",
                        rule.relation()
                    )));
                }
            }
        }
        Ok(())
    }

    fn require(&self, names: &[&str]) -> Result<()> {
        for n in names {
            if self.feature(n).is_none() {
                return Err(Error::Config(format!(
                    "threshold config `{}` does not cover feature `{n}`",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn rule<'a>(cfg: &'a ThresholdConfig, name: &str) -> Result<&'a FeatureRule> {
    cfg.feature(name)
        .ok_or_else(|| Error::Config(format!("no rule for feature `{name}`")))
}

/// The frame's user id is the per-frame child id `{trackId}-{frame}`.
pub fn discretize_vehicle(rec: &VehicleFrameRecord, cfg: &ThresholdConfig) -> Result<LinguisticFrame> {
    cfg.require(&VEHICLE_FEATURES)?;
    let mut frame = LinguisticFrame::new(format!("{}-{}", rec.track_id, rec.frame), rec.frame);
    for name in VEHICLE_FEATURES {
        let r = rule(cfg, name)?;
        let value = rec.feature(name).expect("known vehicle feature");
        frame = frame.with(r.relation(), r.categorize(value)?);
    }
    frame.label = Some(rec.label.clone());
    Ok(frame)
}

pub fn discretize_pedestrian(
    rec: &PedestrianFrameRecord,
    cfg: &ThresholdConfig,
) -> Result<LinguisticFrame> {
    cfg.require(&PEDESTRIAN_FEATURES)?;
    let mut frame = LinguisticFrame::new(rec.ped_id.clone(), rec.frame);
    for name in PEDESTRIAN_FEATURES {
        let r = rule(cfg, name)?;
        let category = match r {
            FeatureRule::Categorical { .. } => r.categorize_label(&rec.activity)?,
            _ => r.categorize(rec.feature(name))?,
        };
        frame = frame.with(r.relation(), category);
    }
    frame.label = Some(rec.label().to_string());
    Ok(frame)
}
