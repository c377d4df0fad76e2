//! Entity and relation names used when rules are reified into the graph.

pub const ANTECEDENT_CLASS: &str = "ruleAntecedent";
pub const CONSEQUENT_CLASS: &str = "ruleConsequent";
pub const WEIGHT_CLASS: &str = "ruleWeight";

/// Weight bands with upper breakpoints 0.33 and 0.66.
pub const WEIGHT_BANDS: [&str; 3] = ["lowRW", "midRW", "highRW"];
pub const WEIGHT_BREAKPOINTS: [f64; 2] = [0.33, 0.66];

pub const ANTECEDENT_OF: &str = "ANTECEDENT_OF";
pub const IMPLIES: &str = "IMPLIES";
pub const CONSEQUENT_LABEL: &str = "CONSEQUENT_LABEL";
pub const RULE_WEIGHT: &str = "RULE_WEIGHT";
pub const ACTIVATES_RULE: &str = "ACTIVATES_RULE";

pub fn antecedent_entity(rule_id: &str) -> String {
    format!("{rule_id}-ante")
}

pub fn consequent_entity(rule_id: &str) -> String {
    format!("{rule_id}-cons")
}

pub fn weight_band(weight: f64) -> &'static str {
    let i = WEIGHT_BREAKPOINTS.partition_point(|b| *b <= weight);
    WEIGHT_BANDS[i]
}
