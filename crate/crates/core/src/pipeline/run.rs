use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{
    complete_features, decode_frame, encode_frame, select_features, CompletionPolicy, DecodedFrame,
    FeatureFrame, FrameReader, PipelineError, Selection,
};
use crate::channel::{
    equalize, snr_db_serde, transmit_frame, ChannelConfig, Fading, TraceRow, Transmission,
};
use crate::info::psnr_from_mse;

/// Aggregate metrics of a pipeline run.
///
/// `raw_bytes` counts the full feature vectors as 32-bit floats without any
/// framing; `payload_bytes` counts every `SFF1` byte actually sent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub frames_sent: usize,
    pub frames_failed: usize,
    pub payload_bytes: u64,
    pub raw_bytes: u64,
    pub compression_ratio: f64,
    /// Feature-space PSNR over all delivered frames, peak = largest input
    /// magnitude, capped at 100 dB.
    pub psnr_db: f64,
    #[serde(with = "snr_db_serde")]
    pub snr_db: f64,
    /// Transmitted-feature power over post-equalisation error power, `None`
    /// when the error is exactly zero.
    pub measured_snr_db: Option<f64>,
    #[serde(rename = "wall_time_ms", serialize_with = "as_millis")]
    pub wall_time: Duration,
}

fn as_millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameFailure {
    /// `None` when the frame could not be decoded far enough to read its id.
    pub frame_id: Option<u64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Delivered frames in input order; failed frames are left out.
    pub frames: Vec<FeatureFrame>,
    pub report: RunReport,
    pub failures: Vec<FrameFailure>,
}

fn channel_pass(
    cfg: &ChannelConfig,
    values: &[f32],
    frame_id: u64,
) -> Result<(Vec<f32>, Transmission), PipelineError> {
    let x: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    let tx = transmit_frame(cfg, &x, frame_id)?;
    let y = match cfg.fading {
        Fading::None => tx.received.clone(),
        Fading::Rayleigh { .. } => equalize(&tx.received, &tx.gains)?,
    };
    Ok((y.into_iter().map(|v| v as f32).collect(), tx))
}

/// Runs one frame end to end, returning the completed frame and the number
/// of bytes put on the wire.
pub fn process_frame(
    frame: &FeatureFrame,
    cfg: &ChannelConfig,
    policy: CompletionPolicy,
) -> Result<(FeatureFrame, usize), PipelineError> {
    select_features(frame)?;
    let frame = frame.clone().with_quantized(cfg.quantizer.is_some());
    let bytes = encode_frame(&frame);
    let (decoded, _) = decode_frame(&bytes)?;
    let (received, _) = channel_pass(cfg, &decoded.values, frame.frame_id())?;
    let mut out = complete_features(&received, &decoded.mask, policy, frame.frame_id())?;
    out = out.with_quantized(decoded.quantized);
    Ok((out, bytes.len()))
}

#[derive(Default)]
struct Totals {
    sent: usize,
    payload: u64,
    raw: u64,
    peak: f64,
    sq_err: f64,
    count: u64,
    signal: f64,
    noise: f64,
}

impl Totals {
    fn add(&mut self, input: &FeatureFrame, output: &FeatureFrame, payload: usize) {
        self.sent += 1;
        self.payload += payload as u64;
        self.raw += 4 * input.len() as u64;
        for (i, (&x, &y)) in input.features().iter().zip(output.features()).enumerate() {
            let (x, y) = (x as f64, y as f64);
            self.peak = self.peak.max(x.abs());
            let e = (y - x) * (y - x);
            self.sq_err += e;
            self.count += 1;
            if input.mask().is_selected(i) {
                self.signal += x * x;
                self.noise += e;
            }
        }
    }
}

fn db_ratio(signal: f64, noise: f64) -> Option<f64> {
    (noise > 0.0).then(|| 10.0 * (signal / noise).log10())
}

fn run_items(
    items: Vec<Result<FeatureFrame, FrameFailure>>,
    cfg: &ChannelConfig,
    policy: CompletionPolicy,
) -> PipelineOutput {
    let start = Instant::now();
    let results: Vec<_> = items
        .into_par_iter()
        .map(|item| {
            let input = item?;
            match process_frame(&input, cfg, policy) {
                Ok((out, bytes)) => Ok((input, out, bytes)),
                Err(e) => Err(FrameFailure {
                    frame_id: Some(input.frame_id()),
                    error: e.to_string(),
                }),
            }
        })
        .collect();

    let mut totals = Totals::default();
    let mut frames = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((input, out, bytes)) => {
                totals.add(&input, &out, bytes);
                frames.push(out);
            }
            Err(f) => {
                log::warn!("frame {:?} failed: {}", f.frame_id, f.error);
                failures.push(f);
            }
        }
    }

    let peak = if totals.peak > 0.0 { totals.peak } else { 1.0 };
    let mse = if totals.count > 0 {
        totals.sq_err / totals.count as f64
    } else {
        0.0
    };
    let report = RunReport {
        frames_sent: totals.sent,
        frames_failed: failures.len(),
        payload_bytes: totals.payload,
        raw_bytes: totals.raw,
        compression_ratio: if totals.payload > 0 {
            totals.raw as f64 / totals.payload as f64
        } else {
            0.0
        },
        psnr_db: psnr_from_mse(mse, peak),
        snr_db: cfg.snr_db,
        measured_snr_db: db_ratio(totals.signal, totals.noise),
        wall_time: start.elapsed(),
    };
    PipelineOutput {
        frames,
        report,
        failures,
    }
}

/// Runs every frame through select, encode, decode, channel, equalise and
/// complete. Frames are processed in parallel; a failing frame is reported
/// and skipped.
pub fn run_pipeline(
    frames: &[FeatureFrame],
    cfg: &ChannelConfig,
    policy: CompletionPolicy,
) -> PipelineOutput {
    run_items(frames.iter().cloned().map(Ok).collect(), cfg, policy)
}

impl DecodedFrame {
    /// The frame with absent features set to zero, keeping the mask.
    pub fn into_feature_frame(self) -> Result<FeatureFrame, PipelineError> {
        let mut values = self.values.into_iter();
        let features = self
            .mask
            .as_slice()
            .iter()
            .map(|&sel| {
                if sel {
                    values.next().unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(FeatureFrame::new(self.frame_id, features, self.mask)?.with_quantized(self.quantized))
    }
}

fn read_frames(
    bytes: &[u8],
    select: Option<&Selection>,
) -> Vec<Result<FeatureFrame, FrameFailure>> {
    FrameReader::new(bytes)
        .map(|r| {
            let frame = r
                .map_err(PipelineError::from)
                .and_then(DecodedFrame::into_feature_frame);
            let frame = match (frame, select) {
                (Ok(f), Some(rule)) => {
                    let mask = rule.mask(f.len());
                    f.with_mask(mask)
                }
                (f, _) => f,
            };
            frame.map_err(|e| FrameFailure {
                frame_id: None,
                error: e.to_string(),
            })
        })
        .collect()
}

/// Runs the pipeline over a concatenated `SFF1` stream. Each input frame's
/// own mask decides what is sent unless `select` overrides it.
pub fn run_pipeline_stream(
    bytes: &[u8],
    cfg: &ChannelConfig,
    policy: CompletionPolicy,
    select: Option<&Selection>,
) -> PipelineOutput {
    run_items(read_frames(bytes, select), cfg, policy)
}

/// Metrics of a raw channel pass over an `SFF1` stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub frames: usize,
    pub frames_failed: usize,
    pub symbols: u64,
    #[serde(with = "snr_db_serde")]
    pub snr_db: f64,
    pub measured_snr_db: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamOutput {
    /// The received stream: same masks, selected values replaced by the
    /// equalised channel output.
    pub bytes: Vec<u8>,
    pub report: ChannelReport,
    pub failures: Vec<FrameFailure>,
    /// Per-symbol trace, filled only when requested.
    pub trace: Vec<TraceRow>,
}

/// Passes the selected values of every frame in `bytes` through the channel.
pub fn transmit_stream(bytes: &[u8], cfg: &ChannelConfig, trace: bool) -> StreamOutput {
    let items = read_frames(bytes, None);
    let results: Vec<_> = items
        .into_par_iter()
        .map(|item| {
            let frame = item?;
            let id = frame.frame_id();
            let values = select_features(&frame).map_err(|e| FrameFailure {
                frame_id: Some(id),
                error: e.to_string(),
            })?;
            let (received, tx) = channel_pass(cfg, &values, id).map_err(|e| FrameFailure {
                frame_id: Some(id),
                error: e.to_string(),
            })?;
            let rows = if trace {
                let sent: Vec<f64> = values.iter().map(|&v| v as f64).collect();
                TraceRow::from_transmission(id, &sent, &tx)
            } else {
                Vec::new()
            };
            let out = complete_features(&received, frame.mask(), CompletionPolicy::PriorMean, id)
                .expect("lengths match by construction")
                .with_quantized(cfg.quantizer.is_some());
            Ok::<_, FrameFailure>((values, received, out, rows))
        })
        .collect();

    let mut out = StreamOutput {
        bytes: Vec::new(),
        report: ChannelReport {
            frames: 0,
            frames_failed: 0,
            symbols: 0,
            snr_db: cfg.snr_db,
            measured_snr_db: None,
            seed: cfg.seed,
        },
        failures: Vec::new(),
        trace: Vec::new(),
    };
    let (mut signal, mut noise) = (0.0, 0.0);
    for r in results {
        match r {
            Ok((sent, received, frame, rows)) => {
                for (&x, &y) in sent.iter().zip(&received) {
                    let (x, y) = (x as f64, y as f64);
                    signal += x * x;
                    noise += (y - x) * (y - x);
                }
                out.report.frames += 1;
                out.report.symbols += sent.len() as u64;
                super::encode_frame_into(&frame, &mut out.bytes);
                out.trace.extend(rows);
            }
            Err(f) => {
                log::warn!("frame {:?} failed: {}", f.frame_id, f.error);
                out.failures.push(f);
            }
        }
    }
    out.report.frames_failed = out.failures.len();
    out.report.measured_snr_db = db_ratio(signal, noise);
    out
}
