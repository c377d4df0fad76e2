use crate::bayes::Prediction;
use crate::kg::{LinguisticFrame, Ontology, OntologyKind};

/// Readable phrase for an ontology instance. Unknown names fall back to
/// their camel-case words in lower case.
pub fn phrase(instance: &str) -> String {
    let fixed = match instance {
        "movingLeft" => "moving left",
        "movingStraight" => "moving straight",
        "movingRight" => "moving right",
        "leftAcceleration" => "accelerating to the left",
        "zeroAcceleration" => "without lateral acceleration",
        "rightAcceletion" => "accelerating to the right",
        "Stand" => "standing",
        "Walk" => "walking",
        "Wave" => "waving",
        "Run" => "running",
        "Na" => "with no recognised activity",
        "NearFromCurb" => "near the curb",
        "MiddleDisFromCurb" => "a few meters from the curb",
        "FarFromCurb" => "far from the curb",
        "TooNearToEgoVeh" => "very close to the ego vehicle",
        "NearToEgoVeh" => "close to the ego vehicle",
        "MiddleDisToEgoVeh" => "at a medium distance from the ego vehicle",
        "FarToEgoVeh" => "far from the ego vehicle",
        "TooFarToEgoVeh" => "very far from the ego vehicle",
        "VehDirection" => "facing the same way as the vehicle",
        "LeftDirection" => "facing left",
        "OppositeVehDirection" => "facing the vehicle",
        "RigthDirection" => "facing right",
        "Looking" => "looking at the vehicle",
        "NotLooking" => "not looking at the vehicle",
        _ => return ttc_phrase(instance).unwrap_or_else(|| split_camel(instance)),
    };
    fixed.to_string()
}

fn ttc_phrase(instance: &str) -> Option<String> {
    let (risk, rest) = ["high", "medium", "low"]
        .iter()
        .find_map(|r| instance.strip_prefix(&format!("{r}Risk")).map(|rest| (*r, rest)))?;
    Some(format!("{risk} collision risk with the {} vehicle", split_camel(rest)))
}

fn split_camel(s: &str) -> String {
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if c.is_uppercase() && i > 0 {
            out.push(' ');
        }
        out.extend(c.to_lowercase());
    }
    out
}

fn outcome(label: &str) -> String {
    match label {
        "LLC" => "change to the left lane".into(),
        "LK" => "keep its lane".into(),
        "RLC" => "change to the right lane".into(),
        "crossRoad" => "cross the road".into(),
        "noCrossRoad" => "stay off the road".into(),
        other => format!("end in `{other}`"),
    }
}

fn subject(kind: OntologyKind) -> &'static str {
    match kind {
        OntologyKind::Vehicle => "The vehicle",
        OntologyKind::Pedestrian => "The pedestrian",
    }
}

/// Explanation for `label` from the frame's categories (ontology order) and
/// the ids of activated rules.
pub fn describe(frame: &LinguisticFrame, label: &str, ontology: &Ontology, rules: &[&str]) -> String {
    let evidence: Vec<String> = frame
        .ordered_assignments(ontology)
        .into_iter()
        .map(|(_, inst)| phrase(inst))
        .collect();
    let mut s = format!("{} is expected to {}", subject(ontology.kind()), outcome(label));
    if !evidence.is_empty() {
        s.push_str("; observed: ");
        s.push_str(&evidence.join("; "));
    }
    s.push('.');
    if !rules.is_empty() {
        s.push_str(" Activated rules: ");
        s.push_str(&rules.join(", "));
        s.push('.');
    }
    s
}

pub fn render_template(pred: &Prediction, frame: &LinguisticFrame, ontology: &Ontology) -> String {
    describe(frame, &pred.label, ontology, &pred.activated_rules())
}

/// Retrieval query: the frame's linguistic inputs plus the predicted label.
pub fn build_query(frame: &LinguisticFrame, pred: &Prediction, ontology: &Ontology) -> String {
    let inputs: Vec<String> = frame
        .ordered_assignments(ontology)
        .into_iter()
        .map(|(rel, inst)| format!("{rel}={inst}"))
        .collect();
    format!(
        "{} with {} was predicted as {}. Why?",
        subject(ontology.kind()),
        inputs.join(", "),
        pred.label
    )
}

/// One explanation sentence per labeled frame, newline separated.
pub fn corpus_from_frames(frames: &[LinguisticFrame], ontology: &Ontology) -> String {
    let mut out = String::new();
    for f in frames {
        if let Some(label) = &f.label {
            out.push_str(&describe(f, label, ontology, &[]));
            out.push('\n');
        }
    }
    out
}
