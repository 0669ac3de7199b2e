use super::{InfoError, NORMALIZATION_TOLERANCE, RENORMALIZE_TOLERANCE};

/// Validates a probability vector and rescales it to unit mass.
///
/// Entries must be finite and non-negative. Mass within
/// [`RENORMALIZE_TOLERANCE`] of one is renormalised, anything further off is
/// rejected.
fn normalize(mut probs: Vec<f64>) -> Result<Vec<f64>, InfoError> {
    if probs.is_empty() {
        return Err(InfoError::Empty);
    }
    for (index, &value) in probs.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(InfoError::InvalidProbability { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
        return Err(InfoError::NotNormalized { sum });
    }
    if sum != 1.0 {
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= NORMALIZATION_TOLERANCE);
    Ok(probs)
}

fn check_alphabet(alphabet: &[f64]) -> Result<(), InfoError> {
    if alphabet.is_empty() {
        return Err(InfoError::Empty);
    }
    for (index, window) in alphabet.windows(2).enumerate() {
        if !(window[0] < window[1]) {
            return Err(InfoError::AlphabetNotIncreasing { index: index + 1 });
        }
    }
    if alphabet.iter().any(|x| !x.is_finite()) {
        return Err(InfoError::AlphabetNotIncreasing { index: 0 });
    }
    Ok(())
}

fn index_alphabet(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64).collect()
}

/// Probability vector over a finite, strictly increasing, real-valued
/// alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    alphabet: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(alphabet: Vec<f64>, probs: Vec<f64>) -> Result<Self, InfoError> {
        check_alphabet(&alphabet)?;
        if alphabet.len() != probs.len() {
            return Err(InfoError::ShapeMismatch {
                alphabet: alphabet.len(),
                probs: probs.len(),
            });
        }
        let probs = normalize(probs)?;
        Ok(Self { alphabet, probs })
    }

    /// Distribution over the index alphabet `0, 1, .., n-1`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, InfoError> {
        Self::new(index_alphabet(probs.len()), probs)
    }

    pub fn uniform(alphabet: Vec<f64>) -> Result<Self, InfoError> {
        check_alphabet(&alphabet)?;
        let n = alphabet.len();
        Ok(Self {
            alphabet,
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(alphabet: Vec<f64>, index: usize) -> Result<Self, InfoError> {
        let mut probs = vec![0.0; alphabet.len()];
        match probs.get_mut(index) {
            Some(p) => *p = 1.0,
            None => {
                return Err(InfoError::LengthMismatch {
                    left: index,
                    right: alphabet.len(),
                })
            }
        }
        Self::new(alphabet, probs)
    }

    pub fn alphabet(&self) -> &[f64] {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Probability of the symbol with the given value, or zero when the value
    /// is not part of the alphabet.
    pub fn prob_of(&self, symbol: f64) -> f64 {
        self.alphabet
            .binary_search_by(|s| s.total_cmp(&symbol))
            .map(|i| self.probs[i])
            .unwrap_or(0.0)
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn same_alphabet(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mixture(&self, other: &Self, lambda: f64) -> Result<Self, InfoError> {
        if !self.same_alphabet(other) {
            return Err(InfoError::SupportMismatch);
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Self::new(self.alphabet.clone(), probs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_normalized(alphabet: Vec<f64>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(alphabet.len(), probs.len());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self { alphabet, probs }
    }
}

/// Row-stochastic matrix `q(y | x)` sharing one output alphabet across rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    data: Vec<f64>,
}

impl ConditionalDistribution {
    pub fn new(
        inputs: Vec<f64>,
        outputs: Vec<f64>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, InfoError> {
        check_alphabet(&inputs)?;
        check_alphabet(&outputs)?;
        if rows.len() != inputs.len() {
            return Err(InfoError::ShapeMismatch {
                alphabet: inputs.len(),
                probs: rows.len(),
            });
        }
        let mut data = Vec::with_capacity(inputs.len() * outputs.len());
        for row in rows {
            if row.len() != outputs.len() {
                return Err(InfoError::ShapeMismatch {
                    alphabet: outputs.len(),
                    probs: row.len(),
                });
            }
            data.extend(normalize(row)?);
        }
        Ok(Self {
            inputs,
            outputs,
            data,
        })
    }

    pub fn identity(alphabet: Vec<f64>) -> Result<Self, InfoError> {
        let n = alphabet.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(alphabet.clone(), alphabet, rows)
    }

    /// Every row equals `row`, i.e. the output is independent of the input.
    pub fn constant(inputs: Vec<f64>, row: &DiscreteDistribution) -> Result<Self, InfoError> {
        let rows = vec![row.probs().to_vec(); inputs.len()];
        Self::new(inputs, row.alphabet().to_vec(), rows)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn row(&self, input: usize) -> &[f64] {
        let m = self.outputs.len();
        &self.data[input * m..(input + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.outputs.len())
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.data[input * self.outputs.len() + output]
    }

    /// Largest deviation of any row sum from one.
    pub fn max_row_defect(&self) -> f64 {
        self.rows()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_normalized(inputs: Vec<f64>, outputs: Vec<f64>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), inputs.len() * outputs.len());
        let cond = Self {
            inputs,
            outputs,
            data,
        };
        debug_assert!(cond.max_row_defect() <= NORMALIZATION_TOLERANCE);
        cond
    }
}

/// Joint probability mass over `(x, y)` pairs, stored row-major with `x`
/// indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    x_alphabet: Vec<f64>,
    y_alphabet: Vec<f64>,
    data: Vec<f64>,
}

impl JointDistribution {
    pub fn new(
        x_alphabet: Vec<f64>,
        y_alphabet: Vec<f64>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, InfoError> {
        check_alphabet(&x_alphabet)?;
        check_alphabet(&y_alphabet)?;
        if rows.len() != x_alphabet.len() {
            return Err(InfoError::ShapeMismatch {
                alphabet: x_alphabet.len(),
                probs: rows.len(),
            });
        }
        let cols = y_alphabet.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(InfoError::ShapeMismatch {
                alphabet: cols,
                probs: bad.len(),
            });
        }
        let data = normalize(rows.into_iter().flatten().collect())?;
        Ok(Self {
            x_alphabet,
            y_alphabet,
            data,
        })
    }

    /// Joint over index alphabets.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self, InfoError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        Self::new(index_alphabet(n), index_alphabet(m), rows)
    }

    /// `p(x) q(y|x)`.
    pub fn from_source_and_channel(
        source: &DiscreteDistribution,
        channel: &ConditionalDistribution,
    ) -> Result<Self, InfoError> {
        if source.alphabet() != channel.inputs() {
            return Err(InfoError::SupportMismatch);
        }
        let data = source
            .probs()
            .iter()
            .zip(channel.rows())
            .flat_map(|(&p, row)| row.iter().map(move |&q| p * q))
            .collect();
        Ok(Self {
            x_alphabet: channel.inputs().to_vec(),
            y_alphabet: channel.outputs().to_vec(),
            data,
        })
    }

    /// Product of two independent marginals.
    pub fn product(px: &DiscreteDistribution, py: &DiscreteDistribution) -> Self {
        let data = px
            .probs()
            .iter()
            .flat_map(|&a| py.probs().iter().map(move |&b| a * b))
            .collect();
        Self {
            x_alphabet: px.alphabet().to_vec(),
            y_alphabet: py.alphabet().to_vec(),
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.x_alphabet.len()
    }

    pub fn n_cols(&self) -> usize {
        self.y_alphabet.len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.n_cols() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let m = self.n_cols();
        &self.data[x * m..(x + 1) * m]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn marginal_x_probs(&self) -> Vec<f64> {
        self.data
            .chunks_exact(self.n_cols())
            .map(|r| r.iter().sum())
            .collect()
    }

    pub(crate) fn marginal_y_probs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols()];
        for row in self.data.chunks_exact(self.n_cols()) {
            out.iter_mut().zip(row).for_each(|(o, v)| *o += v);
        }
        out
    }

    pub fn marginal_x(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_normalized(self.x_alphabet.clone(), self.marginal_x_probs())
    }

    pub fn marginal_y(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_normalized(self.y_alphabet.clone(), self.marginal_y_probs())
    }

    pub fn transpose(&self) -> Self {
        let (n, m) = (self.n_rows(), self.n_cols());
        let data = (0..m)
            .flat_map(|y| (0..n).map(move |x| (x, y)))
            .map(|(x, y)| self.data[x * m + y])
            .collect();
        Self {
            x_alphabet: self.y_alphabet.clone(),
            y_alphabet: self.x_alphabet.clone(),
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes_small_defects_and_rejects_large_ones() {
        let d = DiscreteDistribution::from_probs(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(matches!(
            DiscreteDistribution::from_probs(vec![0.5, 0.6]),
            Err(InfoError::NotNormalized { .. })
        ));
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(DiscreteDistribution::from_probs(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::from_probs(vec![f64::NAN, 1.0]).is_err());
        assert_eq!(
            DiscreteDistribution::from_probs(vec![]),
            Err(InfoError::Empty)
        );
    }

    #[test]
    fn alphabet_must_increase() {
        let err = DiscreteDistribution::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap_err();
        assert_eq!(err, InfoError::AlphabetNotIncreasing { index: 1 });
        assert!(DiscreteDistribution::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn conditional_rows_are_normalized() {
        let q = ConditionalDistribution::new(
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![vec![0.7, 0.3], vec![0.2, 0.8]],
        )
        .unwrap();
        assert!(q.max_row_defect() <= 1e-12);
        assert_eq!(q.row(1), &[0.2, 0.8]);
        assert!(
            ConditionalDistribution::new(vec![0.0], vec![0.0, 1.0], vec![vec![0.7, 0.7]]).is_err()
        );
    }

    #[test]
    fn joint_marginals_and_transpose() {
        let j = JointDistribution::from_matrix(vec![vec![0.1, 0.2, 0.3], vec![0.0, 0.15, 0.25]])
            .unwrap();
        let px = j.marginal_x();
        let py = j.marginal_y();
        assert!((px.prob(0) - 0.6).abs() < 1e-15);
        assert!((py.prob(2) - 0.55).abs() < 1e-15);
        let t = j.transpose();
        assert_eq!(t.get(2, 1), j.get(1, 2));
        assert_eq!(t.marginal_x(), py);
    }

    #[test]
    fn prob_of_looks_up_symbol_values() {
        let d = DiscreteDistribution::new(vec![-1.0, 0.5, 2.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(d.prob_of(0.5), 0.3);
        assert_eq!(d.prob_of(0.4), 0.0);
    }
}
