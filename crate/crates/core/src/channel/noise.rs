use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::ChannelError;

/// Composite semantic noise `N_s = N_Q + N_P` with `N_Q ~ U(a, b)` and
/// `N_P ~ N(0, sigma_p2)`, independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise", into = "RawNoise")]
pub struct SemanticNoiseModel {
    a: f64,
    b: f64,
    sigma_p2: f64,
}

#[derive(Serialize, Deserialize)]
struct RawNoise {
    a: f64,
    b: f64,
    sigma_p2: f64,
}

impl TryFrom<RawNoise> for SemanticNoiseModel {
    type Error = ChannelError;

    fn try_from(raw: RawNoise) -> Result<Self, Self::Error> {
        Self::new(raw.a, raw.b, raw.sigma_p2)
    }
}

impl From<SemanticNoiseModel> for RawNoise {
    fn from(m: SemanticNoiseModel) -> Self {
        Self {
            a: m.a,
            b: m.b,
            sigma_p2: m.sigma_p2,
        }
    }
}

impl SemanticNoiseModel {
    pub fn new(a: f64, b: f64, sigma_p2: f64) -> Result<Self, ChannelError> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(ChannelError::InvalidBounds { a, b });
        }
        if !(sigma_p2 > 0.0) || !sigma_p2.is_finite() {
            return Err(ChannelError::InvalidVariance(sigma_p2));
        }
        Ok(Self { a, b, sigma_p2 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma_p2(&self) -> f64 {
        self.sigma_p2
    }

    pub fn sigma_p(&self) -> f64 {
        self.sigma_p2.sqrt()
    }

    /// Variance of the uniform component, `(b - a)^2 / 12`.
    pub fn quantization_variance(&self) -> f64 {
        let w = self.b - self.a;
        w * w / 12.0
    }

    /// `sigma_s^2 = sigma_p2 + (b - a)^2 / 12`.
    pub fn variance(&self) -> f64 {
        self.sigma_p2 + self.quantization_variance()
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// The same noise shape with every sample multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ChannelError> {
        Self::new(
            self.a * factor,
            self.b * factor,
            self.sigma_p2 * factor * factor,
        )
    }

    pub(crate) fn uniform(&self) -> Uniform<f64> {
        Uniform::new(self.a, self.b).expect("bounds validated at construction")
    }

    pub(crate) fn gaussian(&self) -> Normal<f64> {
        Normal::new(0.0, self.sigma_p()).expect("variance validated at construction")
    }

    /// One composite draw: a uniform sample plus an independent Gaussian one.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.uniform().sample(rng) + self.gaussian().sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let (u, g) = (self.uniform(), self.gaussian());
        (0..n).map(|_| u.sample(rng) + g.sample(rng)).collect()
    }
}

/// `n` composite noise samples from the noise stream of `seed`.
pub fn sample_noise(model: &SemanticNoiseModel, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = super::stream_rng(seed, 0, super::Stream::Noise);
    model.sample(n, &mut rng)
}
