use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{FeatureFrame, PipelineError, SelectionMask};
use crate::channel::{stream_rng, Stream};

/// How the receiver fills features that were not transmitted.
///
/// JSON form: `{"mode": "prior_mean"}` or `{"mode": "prior_sample", "seed": 7}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CompletionPolicy {
    /// Zero, the mean of the `N(0, I)` prior.
    #[default]
    PriorMean,
    /// A standard normal draw from the `(seed, frame_id)` completion stream.
    PriorSample { seed: u64 },
}

impl fmt::Display for CompletionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PriorMean => f.write_str("prior-mean"),
            Self::PriorSample { seed } => write!(f, "prior-sample:{seed}"),
        }
    }
}

impl FromStr for CompletionPolicy {
    type Err = String;

    /// Accepts `prior-mean` (or `mean`) and `prior-sample[:SEED]` (or
    /// `sample[:SEED]`). A missing seed means 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        let (mode, seed) = match s.split_once(':') {
            Some((m, v)) => (m.to_string(), Some(v.to_string())),
            None => (s.clone(), None),
        };
        match (mode.as_str(), seed) {
            ("prior-mean" | "mean", None) => Ok(Self::PriorMean),
            ("prior-sample" | "sample", seed) => {
                let seed = match seed {
                    Some(v) => v
                        .parse()
                        .map_err(|_| format!("invalid completion seed {v:?}"))?,
                    None => 0,
                };
                Ok(Self::PriorSample { seed })
            }
            _ => Err(format!("unknown completion policy {s:?}")),
        }
    }
}

/// Rebuilds a full feature vector from the received selected values.
pub fn complete_features(
    received: &[f32],
    mask: &SelectionMask,
    policy: CompletionPolicy,
    frame_id: u64,
) -> Result<FeatureFrame, PipelineError> {
    let expected = mask.count_selected();
    if received.len() != expected {
        return Err(PipelineError::LengthMismatch {
            expected,
            got: received.len(),
        });
    }

    let mut filler: Box<dyn FnMut() -> f32> = match policy {
        CompletionPolicy::PriorMean => Box::new(|| 0.0),
        CompletionPolicy::PriorSample { seed } => {
            let mut rng = stream_rng(seed, frame_id, Stream::Completion);
            Box::new(move || StandardNormal.sample(&mut rng))
        }
    };

    let mut values = received.iter();
    let features = mask
        .as_slice()
        .iter()
        .map(|&sel| {
            if sel {
                *values.next().expect("count checked")
            } else {
                filler()
            }
        })
        .collect();
    FeatureFrame::new(frame_id, features, mask.clone())
}
