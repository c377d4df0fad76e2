pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow for large |x|.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub value: f64,
    /// ∂L/∂s_pos.
    pub d_pos: f64,
    /// ∂L/∂s_neg per negative.
    pub d_neg: Vec<f64>,
    /// Self-adversarial weights, treated as constants.
    pub weights: Vec<f64>,
}

/// `L = −ln σ(γ + s_pos) − Σ wᵢ ln σ(−s_i − γ)` with `w = softmax(α·s_neg)`.
pub fn self_adversarial_loss(pos: f64, negs: &[f64], margin: f64, temperature: f64) -> LossOutput {
    assert!(!negs.is_empty(), "at least one negative score");
    let max = negs
        .iter()
        .map(|s| temperature * s)
        .fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = negs.iter().map(|s| (temperature * s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let weights: Vec<f64> = exps.iter().map(|e| e / z).collect();

    let mut value = -log_sigmoid(margin + pos);
    let d_pos = -sigmoid(-(margin + pos));
    let mut d_neg = Vec::with_capacity(negs.len());
    for (s, w) in negs.iter().zip(&weights) {
        value -= w * log_sigmoid(-s - margin);
        d_neg.push(w * sigmoid(s + margin));
    }
    LossOutput {
        value,
        d_pos,
        d_neg,
        weights,
    }
}
