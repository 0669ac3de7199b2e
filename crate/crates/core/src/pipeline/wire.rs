//! `SFF1` frame format. All multi-byte fields are little-endian.
//!
//! ```text
//! offset  size            field
//! 0       4               magic "SFF1"
//! 4       1               version (1)
//! 5       1               flags, bit 0 = values quantized
//! 6       2               reserved, zero
//! 8       4               L, feature count (u32)
//! 12      4               frame id, low 32 bits (u32)
//! 16      ceil(L/8)       selection mask, LSB first, feature 0 = byte 0 bit 0
//! ..      4 * popcount    selected values as IEEE-754 f32, index order
//! ```
//!
//! Frames are self-delimiting, so a stream is plain concatenation.

use super::{FeatureFrame, SelectionMask, WireError};

pub const MAGIC: [u8; 4] = *b"SFF1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;
pub const FLAG_QUANTIZED: u8 = 0x01;

/// Encoded size of a frame with `len` features of which `selected` are sent.
pub fn encoded_len(len: usize, selected: usize) -> usize {
    HEADER_LEN + len.div_ceil(8) + 4 * selected
}

pub fn encode_frame(frame: &FeatureFrame) -> Vec<u8> {
    let mut out = Vec::with_capacity(encoded_len(frame.len(), frame.mask().count_selected()));
    encode_frame_into(frame, &mut out);
    out
}

pub fn encode_frame_into(frame: &FeatureFrame, out: &mut Vec<u8>) {
    let len = frame.len();
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(if frame.quantized() { FLAG_QUANTIZED } else { 0 });
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&(len as u32).to_le_bytes());
    out.extend_from_slice(&(frame.frame_id() as u32).to_le_bytes());

    let mask_start = out.len();
    out.resize(mask_start + len.div_ceil(8), 0);
    for i in frame.mask().selected_indices() {
        out[mask_start + i / 8] |= 1 << (i % 8);
    }
    for i in frame.mask().selected_indices() {
        out.extend_from_slice(&frame.features()[i].to_le_bytes());
    }
}

pub fn encode_stream<'a>(frames: impl IntoIterator<Item = &'a FeatureFrame>) -> Vec<u8> {
    let mut out = Vec::new();
    for f in frames {
        encode_frame_into(f, &mut out);
    }
    out
}

/// A frame as seen by the receiver: the mask and the selected values only.
/// Unselected slots are absent until completion fills them.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedFrame {
    /// Low 32 bits of the sender's frame id.
    pub frame_id: u64,
    pub mask: SelectionMask,
    pub values: Vec<f32>,
    pub quantized: bool,
}

impl DecodedFrame {
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    /// Value for feature `index`, `None` when it was not transmitted.
    pub fn feature(&self, index: usize) -> Option<f32> {
        if !self.mask.is_selected(index) {
            return None;
        }
        let rank = self.mask.as_slice()[..index].iter().filter(|&&b| b).count();
        Some(self.values[rank])
    }
}

fn need(bytes: &[u8], needed: usize) -> Result<(), WireError> {
    if bytes.len() < needed {
        Err(WireError::TruncatedFrame {
            needed,
            available: bytes.len(),
        })
    } else {
        Ok(())
    }
}

/// Decodes one frame from the front of `bytes`, returning it with the number
/// of bytes consumed.
pub fn decode_frame(bytes: &[u8]) -> Result<(DecodedFrame, usize), WireError> {
    need(bytes, MAGIC.len())?;
    let magic: [u8; 4] = bytes[..4].try_into().expect("length checked");
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    need(bytes, HEADER_LEN)?;
    if bytes[4] != VERSION {
        return Err(WireError::VersionUnsupported(bytes[4]));
    }
    let flags = bytes[5];
    let len = u32::from_le_bytes(bytes[8..12].try_into().expect("length checked")) as usize;
    let frame_id = u32::from_le_bytes(bytes[12..16].try_into().expect("length checked")) as u64;
    if len == 0 {
        return Err(WireError::EmptyFrame);
    }

    let mask_end = HEADER_LEN + len.div_ceil(8);
    need(bytes, mask_end)?;
    let mask_bytes = &bytes[HEADER_LEN..mask_end];
    let bits: Vec<bool> = (0..len)
        .map(|i| mask_bytes[i / 8] >> (i % 8) & 1 == 1)
        .collect();
    let selected = bits.iter().filter(|&&b| b).count();

    let end = mask_end + 4 * selected;
    need(bytes, end)?;
    let values = bytes[mask_end..end]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")))
        .collect();

    Ok((
        DecodedFrame {
            frame_id,
            mask: SelectionMask::from(bits),
            values,
            quantized: flags & FLAG_QUANTIZED != 0,
        },
        end,
    ))
}

/// Iterates over the frames of a concatenated stream. Iteration ends after
/// the first malformed frame since the remaining bytes cannot be re-aligned.
pub struct FrameReader<'a> {
    bytes: &'a [u8],
    failed: bool,
}

impl<'a> FrameReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self {
            bytes,
            failed: false,
        }
    }
}

impl Iterator for FrameReader<'_> {
    type Item = Result<DecodedFrame, WireError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.bytes.is_empty() {
            return None;
        }
        match decode_frame(self.bytes) {
            Ok((frame, used)) => {
                self.bytes = &self.bytes[used..];
                Some(Ok(frame))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

pub fn decode_stream(bytes: &[u8]) -> Result<Vec<DecodedFrame>, WireError> {
    FrameReader::new(bytes).collect()
}
