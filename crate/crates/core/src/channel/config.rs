use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ChannelError, Quantizer, SemanticNoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fading {
    #[default]
    None,
    /// Slow Rayleigh fading, one gain per frame with `E[g^2] = sigma_h2`.
    Rayleigh { sigma_h2: f64 },
}

/// Midrise quantizer applied to the transmitted values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    pub levels: usize,
    pub min: f64,
    pub max: f64,
}

impl QuantizerConfig {
    pub fn build(&self) -> Result<Quantizer, ChannelError> {
        Quantizer::midrise(self.levels, self.min, self.max)
    }
}

/// Channel parameters, also the JSON config file schema:
///
/// ```json
/// {
///   "noise": {"a": -1.0, "b": 1.0, "sigma_p2": 0.01},
///   "fading": {"kind": "rayleigh", "sigma_h2": 1.0},
///   "snr_db": 8.0,
///   "seed": 42,
///   "quantizer": {"levels": 16, "min": -3.0, "max": 3.0}
/// }
/// ```
///
/// `fading` defaults to none, `snr_db` to `"inf"` (noiseless), `seed` to 0 and
/// `quantizer` to absent. `snr_db` accepts a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub noise: SemanticNoiseModel,
    #[serde(default)]
    pub fading: Fading,
    #[serde(default = "infinite_snr", with = "snr_db_serde")]
    pub snr_db: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantizer: Option<QuantizerConfig>,
}

fn infinite_snr() -> f64 {
    f64::INFINITY
}

impl ChannelConfig {
    pub fn new(noise: SemanticNoiseModel, snr_db: f64, seed: u64) -> Self {
        Self {
            noise,
            fading: Fading::None,
            snr_db,
            seed,
            quantizer: None,
        }
    }

    pub fn with_fading(mut self, fading: Fading) -> Self {
        self.fading = fading;
        self
    }

    pub fn with_quantizer(mut self, quantizer: QuantizerConfig) -> Self {
        self.quantizer = Some(quantizer);
        self
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(ChannelError::InvalidSnr(self.snr_db));
        }
        if let Fading::Rayleigh { sigma_h2 } = self.fading {
            if !(sigma_h2 > 0.0) || !sigma_h2.is_finite() {
                return Err(ChannelError::InvalidFading(sigma_h2));
            }
        }
        if let Some(q) = &self.quantizer {
            q.build()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, crate::Error> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

pub(crate) mod snr_db_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| serde::de::Error::custom(format!("invalid snr_db {t:?}"))),
            },
        }
    }
}
