use super::PipelineError;

/// Which features of a frame are intended for the receiver.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectionMask(Vec<bool>);

impl SelectionMask {
    pub fn all(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn none(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// Mask of length `len` with exactly `indices` selected. Out-of-range
    /// indices are ignored.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &i in indices {
            if let Some(b) = bits.get_mut(i) {
                *b = true;
            }
        }
        Self(bits)
    }

    /// The first `count` features selected.
    pub fn first(len: usize, count: usize) -> Self {
        Self((0..len).map(|i| i < count).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_selected(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_selected(&self, index: usize) -> bool {
        self.0.get(index).copied().unwrap_or(false)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn selected_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }
}

/// A selection rule that adapts to the frame length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    First(usize),
    Indices(Vec<usize>),
}

impl Selection {
    pub fn mask(&self, len: usize) -> SelectionMask {
        match self {
            Self::All => SelectionMask::all(len),
            Self::First(n) => SelectionMask::first(len, *n),
            Self::Indices(ix) => SelectionMask::from_indices(len, ix),
        }
    }
}

impl std::str::FromStr for Selection {
    type Err = String;

    /// `all`, `first:N`, or a comma-separated index list such as `0,3,7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::All);
        }
        if let Some(n) = s.strip_prefix("first:") {
            return n
                .trim()
                .parse()
                .map(Self::First)
                .map_err(|_| format!("invalid count in {s:?}"));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("invalid feature index {t:?}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::Indices)
    }
}

impl From<Vec<bool>> for SelectionMask {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// A disentangled feature vector together with its selection mask.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    frame_id: u64,
    features: Vec<f32>,
    mask: SelectionMask,
    quantized: bool,
}

impl FeatureFrame {
    pub fn new(
        frame_id: u64,
        features: Vec<f32>,
        mask: SelectionMask,
    ) -> Result<Self, PipelineError> {
        if features.is_empty() {
            return Err(PipelineError::EmptyFrame);
        }
        if features.len() > u32::MAX as usize {
            return Err(PipelineError::FrameTooLarge(features.len()));
        }
        if mask.len() != features.len() {
            return Err(PipelineError::MaskLengthMismatch {
                mask: mask.len(),
                features: features.len(),
            });
        }
        Ok(Self {
            frame_id,
            features,
            mask,
            quantized: false,
        })
    }

    pub fn fully_selected(frame_id: u64, features: Vec<f32>) -> Result<Self, PipelineError> {
        let mask = SelectionMask::all(features.len());
        Self::new(frame_id, features, mask)
    }

    pub fn with_mask(mut self, mask: SelectionMask) -> Result<Self, PipelineError> {
        if mask.len() != self.features.len() {
            return Err(PipelineError::MaskLengthMismatch {
                mask: mask.len(),
                features: self.features.len(),
            });
        }
        self.mask = mask;
        Ok(self)
    }

    pub fn with_quantized(mut self, quantized: bool) -> Self {
        self.quantized = quantized;
        self
    }

    pub fn frame_id(&self) -> u64 {
        self.frame_id
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn mask(&self) -> &SelectionMask {
        &self.mask
    }

    pub fn quantized(&self) -> bool {
        self.quantized
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// The selected features, in index order.
pub fn select_features(frame: &FeatureFrame) -> Result<Vec<f32>, PipelineError> {
    let out: Vec<f32> = frame
        .mask
        .selected_indices()
        .map(|i| frame.features[i])
        .collect();
    if out.is_empty() {
        return Err(PipelineError::EmptySelection);
    }
    Ok(out)
}
