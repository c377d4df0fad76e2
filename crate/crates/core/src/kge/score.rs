use super::Scorer;

/// Score of one triple from raw vectors. ComplEx vectors are interleaved
/// `(re, im)` pairs.
pub fn score_slices(scorer: Scorer, h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    match scorer {
        Scorer::TransE => -h
            .iter()
            .zip(r)
            .zip(t)
            .map(|((h, r), t)| (h + r - t).abs())
            .sum::<f64>(),
        Scorer::ComplEx => {
            let mut s = 0.0;
            for i in (0..h.len()).step_by(2) {
                let (a, b) = (h[i], h[i + 1]);
                let (c, d) = (r[i], r[i + 1]);
                let (e, f) = (t[i], t[i + 1]);
                s += (a * c - b * d) * e + (a * d + b * c) * f;
            }
            s
        }
    }
}

/// Adds `coeff · ∂score/∂x` into `gh`, `gr`, `gt`. TransE uses the
/// subgradient 0 at a zero residual.
#[allow(clippy::too_many_arguments)]
pub fn score_grad(
    scorer: Scorer,
    h: &[f64],
    r: &[f64],
    t: &[f64],
    coeff: f64,
    gh: &mut [f64],
    gr: &mut [f64],
    gt: &mut [f64],
) {
    match scorer {
        Scorer::TransE => {
            for i in 0..h.len() {
                let d = h[i] + r[i] - t[i];
                let s = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                gh[i] -= coeff * s;
                gr[i] -= coeff * s;
                gt[i] += coeff * s;
            }
        }
        Scorer::ComplEx => {
            for i in (0..h.len()).step_by(2) {
                let (a, b) = (h[i], h[i + 1]);
                let (c, d) = (r[i], r[i + 1]);
                let (e, f) = (t[i], t[i + 1]);
                gh[i] += coeff * (c * e + d * f);
                gh[i + 1] += coeff * (c * f - d * e);
                gr[i] += coeff * (a * e + b * f);
                gr[i + 1] += coeff * (a * f - b * e);
                gt[i] += coeff * (a * c - b * d);
                gt[i + 1] += coeff * (a * d + b * c);
            }
        }
    }
}
