//! C ABI for the `semcom` toolkit.
//!
//! Every fallible function returns a [`SemcomStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! read with [`semcom_last_error_message`]. Objects are opaque handles that
//! must be released with their matching `*_free` function. Byte buffers
//! returned by the library are released with [`semcom_buffer_free`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::{ptr, slice};

use semcom::capacity::{capacity_lower, kl_gap, CapacityError, QuadratureConfig};
use semcom::channel::{transmit_frame, ChannelConfig, Fading, SemanticNoiseModel};
use semcom::info::{
    entropy, kl_divergence, mutual_information, DiscreteDistribution, JointDistribution,
};
use semcom::pipeline::{
    decode_frame, encode_frame, encode_frame_into, run_pipeline_stream, CompletionPolicy,
    FeatureFrame, SelectionMask,
};
use semcom::rdp::{solve, RdpError, RdpProblem, SolverConfig};
use semcom::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemcomStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Overflow, vanishing marginal or quadrature that did not settle.
    Numeric = 3,
    /// Malformed `SFF1` bytes.
    Wire = 4,
    /// Malformed JSON input.
    Parse = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> SemcomStatus {
    match err {
        Error::Rdp(RdpError::ZeroMarginal { .. } | RdpError::NumericOverflow { .. }) => {
            SemcomStatus::Numeric
        }
        Error::Capacity(
            CapacityError::GridTooCoarse { .. } | CapacityError::InvalidVariance(_),
        ) => SemcomStatus::Numeric,
        Error::Wire(_) | Error::Pipeline(semcom::pipeline::PipelineError::Wire(_)) => {
            SemcomStatus::Wire
        }
        Error::Json(_) => SemcomStatus::Parse,
        _ => SemcomStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> SemcomStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SemcomStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SemcomStatus::Internal
        }
    }
}

struct Failure(SemcomStatus, String);

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e = e.into();
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SemcomStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SemcomStatus::InvalidArgument, msg.into())
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn semcom_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Bytes owned by the library.
#[repr(C)]
#[derive(Debug)]
pub struct SemcomBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl SemcomBuffer {
    fn from_vec(v: Vec<u8>) -> Self {
        let mut b = v.into_boxed_slice();
        let out = Self {
            data: b.as_mut_ptr(),
            len: b.len(),
        };
        std::mem::forget(b);
        out
    }
}

#[no_mangle]
pub unsafe extern "C" fn semcom_buffer_free(buffer: SemcomBuffer) {
    if !buffer.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buffer.data,
            buffer.len,
        )));
    }
}

/// Entropy in bits of a probability vector.
#[no_mangle]
pub unsafe extern "C" fn semcom_entropy(
    probs: *const f64,
    len: usize,
    out: *mut f64,
) -> SemcomStatus {
    guard(|| {
        let d = DiscreteDistribution::from_probs(input(probs, len, "probs")?.to_vec())?;
        *output(out, "out")? = entropy(&d);
        Ok(())
    })
}

/// `KL(p || q)` in bits over a shared index alphabet.
#[no_mangle]
pub unsafe extern "C" fn semcom_kl_divergence(
    p: *const f64,
    q: *const f64,
    len: usize,
    out: *mut f64,
) -> SemcomStatus {
    guard(|| {
        let p = DiscreteDistribution::from_probs(input(p, len, "p")?.to_vec())?;
        let q = DiscreteDistribution::from_probs(input(q, len, "q")?.to_vec())?;
        *output(out, "out")? = kl_divergence(&p, &q)?;
        Ok(())
    })
}

/// Mutual information in bits of a row-major `rows x cols` joint pmf.
#[no_mangle]
pub unsafe extern "C" fn semcom_mutual_information(
    joint: *const f64,
    rows: usize,
    cols: usize,
    out: *mut f64,
) -> SemcomStatus {
    guard(|| {
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| invalid("rows * cols overflows"))?;
        let data = input(joint, n, "joint")?;
        let matrix: Vec<Vec<f64>> = data.chunks(cols.max(1)).map(<[f64]>::to_vec).collect();
        let j = JointDistribution::from_matrix(matrix)?;
        *output(out, "out")? = mutual_information(&j);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SemcomRdpPoint {
    pub rate_bits: f64,
    pub distortion: f64,
    pub perception_bits: f64,
    pub alpha: f64,
    pub mu: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Solves one rate-distortion-perception point. `recon` may be NULL to use
/// the source alphabet. `tolerance <= 0` or `max_iterations == 0` select the
/// defaults.
#[no_mangle]
pub unsafe extern "C" fn semcom_rdp_solve(
    alphabet: *const f64,
    probs: *const f64,
    len: usize,
    recon: *const f64,
    recon_len: usize,
    alpha: f64,
    mu: f64,
    tolerance: f64,
    max_iterations: u64,
    out: *mut SemcomRdpPoint,
) -> SemcomStatus {
    guard(|| {
        let src = DiscreteDistribution::new(
            input(alphabet, len, "alphabet")?.to_vec(),
            input(probs, len, "probs")?.to_vec(),
        )?;
        let problem = if recon.is_null() {
            RdpProblem::with_source_alphabet(src, alpha, mu)?
        } else {
            RdpProblem::new(src, input(recon, recon_len, "recon")?.to_vec(), alpha, mu)?
        };
        let mut config = SolverConfig::default();
        if tolerance > 0.0 {
            config.tolerance = tolerance;
        }
        if max_iterations > 0 {
            config.max_iterations = usize::try_from(max_iterations).unwrap_or(usize::MAX);
        }
        let p = solve(&problem, &config)?;
        *output(out, "out")? = SemcomRdpPoint {
            rate_bits: p.rate,
            distortion: p.distortion,
            perception_bits: p.perception,
            alpha: p.alpha,
            mu: p.mu,
            iterations: p.iterations as u64,
            converged: p.converged,
        };
        Ok(())
    })
}

/// `1/2 log2(1 + SNR)` in bits per channel use.
#[no_mangle]
pub extern "C" fn semcom_capacity_lower(snr_db: f64) -> f64 {
    capacity_lower(snr_db)
}

/// KL gap in bits between the semantic noise and its equivalent Gaussian.
#[no_mangle]
pub unsafe extern "C" fn semcom_kl_gap(
    a: f64,
    b: f64,
    sigma_p2: f64,
    out: *mut f64,
) -> SemcomStatus {
    guard(|| {
        let m = SemanticNoiseModel::new(a, b, sigma_p2)?;
        *output(out, "out")? = kl_gap(&m, &QuadratureConfig::default())?;
        Ok(())
    })
}

/// Opaque channel configuration.
pub struct SemcomChannel {
    config: ChannelConfig,
}

/// Channel without fading or quantizer. An infinite `snr_db` is noiseless.
#[no_mangle]
pub unsafe extern "C" fn semcom_channel_new(
    a: f64,
    b: f64,
    sigma_p2: f64,
    snr_db: f64,
    seed: u64,
    out: *mut *mut SemcomChannel,
) -> SemcomStatus {
    guard(|| {
        let out = output(out, "out")?;
        let config = ChannelConfig::new(SemanticNoiseModel::new(a, b, sigma_p2)?, snr_db, seed);
        config.validate()?;
        *out = Box::into_raw(Box::new(SemcomChannel { config }));
        Ok(())
    })
}

/// Channel from a NUL-terminated ChannelConfig JSON document.
#[no_mangle]
pub unsafe extern "C" fn semcom_channel_from_json(
    json: *const c_char,
    out: *mut *mut SemcomChannel,
) -> SemcomStatus {
    guard(|| {
        let out = output(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        let config = ChannelConfig::from_json(text)?;
        *out = Box::into_raw(Box::new(SemcomChannel { config }));
        Ok(())
    })
}

/// Enables slow Rayleigh fading with `E[g^2] = sigma_h2`.
#[no_mangle]
pub unsafe extern "C" fn semcom_channel_set_rayleigh(
    channel: *mut SemcomChannel,
    sigma_h2: f64,
) -> SemcomStatus {
    guard(|| {
        let ch = output(channel, "channel")?;
        let mut cfg = ch.config.clone();
        cfg.fading = Fading::Rayleigh { sigma_h2 };
        cfg.validate()?;
        ch.config = cfg;
        Ok(())
    })
}

/// Sends `len` symbols as frame `frame_id`. `received` must hold `len`
/// values; `gains` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn semcom_channel_transmit(
    channel: *const SemcomChannel,
    x: *const f64,
    len: usize,
    frame_id: u64,
    received: *mut f64,
    gains: *mut f64,
) -> SemcomStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        let x = input(x, len, "x")?;
        if len > 0 && received.is_null() {
            return Err(null("received"));
        }
        let tx = transmit_frame(&ch.config, x, frame_id)?;
        if len > 0 {
            slice::from_raw_parts_mut(received, len).copy_from_slice(&tx.received);
            if !gains.is_null() {
                slice::from_raw_parts_mut(gains, len).copy_from_slice(&tx.gains);
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn semcom_channel_free(channel: *mut SemcomChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Opaque feature frame.
pub struct SemcomFrame {
    frame: FeatureFrame,
}

/// Frame of `len` features. `mask` holds one byte per feature (non-zero =
/// selected) and may be NULL to select all.
#[no_mangle]
pub unsafe extern "C" fn semcom_frame_new(
    frame_id: u64,
    features: *const f32,
    len: usize,
    mask: *const u8,
    out: *mut *mut SemcomFrame,
) -> SemcomStatus {
    guard(|| {
        let out = output(out, "out")?;
        let features = input(features, len, "features")?.to_vec();
        let mask = if mask.is_null() {
            SelectionMask::all(len)
        } else {
            SelectionMask::from(
                input(mask, len, "mask")?
                    .iter()
                    .map(|&b| b != 0)
                    .collect::<Vec<_>>(),
            )
        };
        let frame = FeatureFrame::new(frame_id, features, mask)?;
        *out = Box::into_raw(Box::new(SemcomFrame { frame }));
        Ok(())
    })
}

/// Encodes a frame as `SFF1`.
#[no_mangle]
pub unsafe extern "C" fn semcom_frame_encode(
    frame: *const SemcomFrame,
    out: *mut SemcomBuffer,
) -> SemcomStatus {
    guard(|| {
        let f = frame.as_ref().ok_or_else(|| null("frame"))?;
        *output(out, "out")? = SemcomBuffer::from_vec(encode_frame(&f.frame));
        Ok(())
    })
}

/// Decodes the first `SFF1` frame of `bytes`. Features that were not
/// transmitted read as 0. `consumed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn semcom_frame_decode(
    bytes: *const u8,
    len: usize,
    out: *mut *mut SemcomFrame,
    consumed: *mut usize,
) -> SemcomStatus {
    guard(|| {
        let out = output(out, "out")?;
        let (decoded, used) = decode_frame(input(bytes, len, "bytes")?)?;
        let frame = decoded.into_feature_frame()?;
        if let Some(c) = consumed.as_mut() {
            *c = used;
        }
        *out = Box::into_raw(Box::new(SemcomFrame { frame }));
        Ok(())
    })
}

/// Number of features, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn semcom_frame_len(frame: *const SemcomFrame) -> usize {
    frame.as_ref().map_or(0, |f| f.frame.len())
}

#[no_mangle]
pub unsafe extern "C" fn semcom_frame_id(frame: *const SemcomFrame) -> u64 {
    frame.as_ref().map_or(0, |f| f.frame.frame_id())
}

#[no_mangle]
pub unsafe extern "C" fn semcom_frame_is_selected(frame: *const SemcomFrame, index: usize) -> bool {
    frame
        .as_ref()
        .is_some_and(|f| f.frame.mask().is_selected(index))
}

/// Copies the features into `out`, which must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn semcom_frame_features(
    frame: *const SemcomFrame,
    out: *mut f32,
    len: usize,
) -> SemcomStatus {
    guard(|| {
        let f = frame.as_ref().ok_or_else(|| null("frame"))?;
        if len != f.frame.len() {
            return Err(invalid(format!(
                "buffer holds {len} values, frame has {}",
                f.frame.len()
            )));
        }
        if len > 0 {
            if out.is_null() {
                return Err(null("out"));
            }
            slice::from_raw_parts_mut(out, len).copy_from_slice(f.frame.features());
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn semcom_frame_free(frame: *mut SemcomFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemcomCompletion {
    PriorMean = 0,
    PriorSample = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SemcomRunReport {
    pub frames_sent: u64,
    pub frames_failed: u64,
    pub payload_bytes: u64,
    pub raw_bytes: u64,
    pub compression_ratio: f64,
    pub psnr_db: f64,
    /// NaN when the run was error free.
    pub measured_snr_db: f64,
    pub wall_time_ms: f64,
}

/// Runs the pipeline over an `SFF1` stream. The completed frames are written
/// to `frames_out` as a fully selected stream (may be NULL). Per-frame
/// failures are counted in the report, not returned as an error.
#[no_mangle]
pub unsafe extern "C" fn semcom_pipeline_run(
    channel: *const SemcomChannel,
    bytes: *const u8,
    len: usize,
    completion: SemcomCompletion,
    completion_seed: u64,
    frames_out: *mut SemcomBuffer,
    report: *mut SemcomRunReport,
) -> SemcomStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        let bytes = input(bytes, len, "bytes")?;
        let report = output(report, "report")?;
        let policy = match completion {
            SemcomCompletion::PriorMean => CompletionPolicy::PriorMean,
            SemcomCompletion::PriorSample => CompletionPolicy::PriorSample {
                seed: completion_seed,
            },
        };
        let out = run_pipeline_stream(bytes, &ch.config, policy, None);
        if let Some(buf) = frames_out.as_mut() {
            let mut v = Vec::new();
            for f in &out.frames {
                let full = FeatureFrame::fully_selected(f.frame_id(), f.features().to_vec())?;
                encode_frame_into(&full.with_quantized(f.quantized()), &mut v);
            }
            *buf = SemcomBuffer::from_vec(v);
        }
        let r = &out.report;
        *report = SemcomRunReport {
            frames_sent: r.frames_sent as u64,
            frames_failed: r.frames_failed as u64,
            payload_bytes: r.payload_bytes,
            raw_bytes: r.raw_bytes,
            compression_ratio: r.compression_ratio,
            psnr_db: r.psnr_db,
            measured_snr_db: r.measured_snr_db.unwrap_or(f64::NAN),
            wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
        };
        Ok(())
    })
}
