use super::{DiscreteDistribution, InfoError, JointDistribution};

/// PSNR reported for a lossless reconstruction.
pub const PSNR_CAP_DB: f64 = 100.0;

/// `p log2 p` with `0 log 0 = 0`.
#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits of a raw probability slice.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let h = -probs.iter().map(|&p| plogp(p)).sum::<f64>();
    h.max(0.0)
}

pub fn entropy(d: &DiscreteDistribution) -> f64 {
    entropy_of(d.probs())
}

/// `sum_i p_i log2(p_i / q_i)` over raw slices of equal length.
pub fn kl_divergence_of(p: &[f64], q: &[f64]) -> Result<f64, InfoError> {
    if p.len() != q.len() {
        return Err(InfoError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut acc = 0.0;
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(InfoError::AbsoluteContinuityViolation { index });
            }
            acc += pi * (pi / qi).log2();
        }
    }
    Ok(acc.max(0.0))
}

/// KL divergence `D(p || q)` in bits. Both distributions must share an
/// alphabet.
pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64, InfoError> {
    if !p.same_alphabet(q) {
        return Err(InfoError::SupportMismatch);
    }
    kl_divergence_of(p.probs(), q.probs())
}

/// `I(X;Y) = sum j(x,y) log2 [ j(x,y) / (p(x) r(y)) ]`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let px = j.marginal_x_probs();
    let py = j.marginal_y_probs();
    let mut acc = 0.0;
    for (x, &pxv) in px.iter().enumerate() {
        for (y, &pyv) in py.iter().enumerate() {
            let v = j.get(x, y);
            if v > 0.0 {
                acc += v * (v / (pxv * pyv)).log2();
            }
        }
    }
    acc.max(0.0)
}

/// `H(Y|X) = sum_x p(x) H(Y | X = x)`, with rows of `j` indexing `X`.
pub fn conditional_entropy(j: &JointDistribution) -> f64 {
    (0..j.n_rows())
        .map(|x| {
            let row = j.row(x);
            let px: f64 = row.iter().sum();
            if px > 0.0 {
                let h: f64 = -row.iter().map(|&v| plogp(v / px)).sum::<f64>();
                px * h
            } else {
                0.0
            }
        })
        .sum::<f64>()
        .max(0.0)
}

/// `|H(X) - H(S) - H(X|S) + H(S|X)|` for a joint over `(S, X)` (rows index
/// `S`). The conditional entropies are evaluated from the conditional rows
/// directly, so a non-zero residual points at a defect in the entropy code.
pub fn chain_identity_residual(joint_sx: &JointDistribution) -> f64 {
    let h_s = entropy_of(&joint_sx.marginal_x_probs());
    let h_x = entropy_of(&joint_sx.marginal_y_probs());
    let h_x_given_s = conditional_entropy(joint_sx);
    let h_s_given_x = conditional_entropy(&joint_sx.transpose());
    (h_x - h_s - h_x_given_s + h_s_given_x).abs()
}

/// Peak signal-to-noise ratio `10 log10(peak^2 / MSE)` in dB, capped at
/// [`PSNR_CAP_DB`].
pub fn psnr(reference: &[f64], reconstruction: &[f64], peak: f64) -> Result<f64, InfoError> {
    if reference.len() != reconstruction.len() {
        return Err(InfoError::LengthMismatch {
            left: reference.len(),
            right: reconstruction.len(),
        });
    }
    if reference.is_empty() {
        return Err(InfoError::Empty);
    }
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(InfoError::InvalidPeak(peak));
    }
    let mse = reference
        .iter()
        .zip(reconstruction)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    Ok(psnr_from_mse(mse, peak))
}

pub(crate) fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse <= 0.0 {
        return PSNR_CAP_DB;
    }
    (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
}
