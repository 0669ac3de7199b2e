use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{stream_rng, ChannelConfig, ChannelError, Fading, SemanticNoiseModel, Stream};

/// Output of one frame through the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub received: Vec<f64>,
    pub gains: Vec<f64>,
}

/// Factor applied to unit-scale noise draws so that
/// `mean(x^2) / (factor^2 sigma_s^2)` equals the linear SNR.
///
/// Returns 0 for an infinite SNR or an all-zero frame.
pub fn noise_scale(model: &SemanticNoiseModel, snr_db: f64, signal_power: f64) -> f64 {
    if snr_db == f64::INFINITY || signal_power <= 0.0 {
        return 0.0;
    }
    let snr = 10f64.powf(snr_db / 10.0);
    (signal_power / (snr * model.variance())).sqrt()
}

fn rayleigh_gain<R: Rng + ?Sized>(sigma_h2: f64, rng: &mut R) -> f64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    (0.5 * sigma_h2 * (re * re + im * im)).sqrt()
}

/// Transmits frame 0 with the configured seed. See [`transmit_frame`].
pub fn transmit(cfg: &ChannelConfig, x: &[f64]) -> Result<Transmission, ChannelError> {
    transmit_frame(cfg, x, 0)
}

/// Sends `x` through the channel: `received = g * Quan(x) + n`.
///
/// The gain `g` is 1 without fading and one Rayleigh draw per frame
/// otherwise. The noise has the configured shape, scaled so the frame's
/// signal power to noise variance ratio equals `cfg.snr_db`. With a quantizer
/// configured, the actual quantization error takes the place of the uniform
/// component and only the Gaussian part is drawn.
///
/// Randomness comes from the `(cfg.seed, frame_id)` noise and fading streams.
pub fn transmit_frame(
    cfg: &ChannelConfig,
    x: &[f64],
    frame_id: u64,
) -> Result<Transmission, ChannelError> {
    cfg.validate()?;
    let n = x.len();
    let gain = match cfg.fading {
        Fading::None => 1.0,
        Fading::Rayleigh { sigma_h2 } => {
            let mut rng = stream_rng(cfg.seed, frame_id, Stream::Fading);
            rayleigh_gain(sigma_h2, &mut rng)
        }
    };

    let signal_power = if n == 0 {
        0.0
    } else {
        x.iter().map(|v| v * v).sum::<f64>() / n as f64
    };
    let scale = noise_scale(&cfg.noise, cfg.snr_db, signal_power);

    let quantizer = cfg.quantizer.as_ref().map(|q| q.build()).transpose()?;
    let sent: Vec<f64> = match &quantizer {
        Some(q) => q.quantize(x),
        None => x.to_vec(),
    };

    let mut rng = stream_rng(cfg.seed, frame_id, Stream::Noise);
    let (uniform, gaussian) = (cfg.noise.uniform(), cfg.noise.gaussian());
    let received = sent
        .iter()
        .map(|&s| {
            let noise = match quantizer {
                Some(_) => gaussian.sample(&mut rng),
                None => uniform.sample(&mut rng) + gaussian.sample(&mut rng),
            };
            gain * s + scale * noise
        })
        .collect();

    Ok(Transmission {
        received,
        gains: vec![gain; n],
    })
}

/// Undoes the fading gain element-wise.
pub fn equalize(received: &[f64], gains: &[f64]) -> Result<Vec<f64>, ChannelError> {
    if received.len() != gains.len() {
        return Err(ChannelError::LengthMismatch {
            left: received.len(),
            right: gains.len(),
        });
    }
    received
        .iter()
        .zip(gains)
        .enumerate()
        .map(|(index, (&y, &g))| {
            if g > 0.0 && g.is_finite() {
                Ok(y / g)
            } else {
                Err(ChannelError::ZeroGain { index, value: g })
            }
        })
        .collect()
}

/// One element of a noise trace export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub frame_id: u64,
    pub index: usize,
    pub sent: f64,
    pub gain: f64,
    pub received: f64,
    /// `received - gain * sent`.
    pub noise: f64,
}

impl TraceRow {
    pub fn from_transmission(frame_id: u64, sent: &[f64], tx: &Transmission) -> Vec<Self> {
        sent.iter()
            .zip(&tx.received)
            .zip(&tx.gains)
            .enumerate()
            .map(|(index, ((&s, &y), &g))| Self {
                frame_id,
                index,
                sent: s,
                gain: g,
                received: y,
                noise: y - g * s,
            })
            .collect()
    }
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], writer: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}
