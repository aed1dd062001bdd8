//! Filters over bit-packed dictionary keys without unpacking them into a
//! buffer first. Keys are processed 64 at a time: a block of 64 keys at
//! width `W` is exactly `W` little-endian u64 words, so the block loop is
//! monomorphized per width and each block yields one output word.

use crate::bitvec::BitVector;
use crate::encode::bitpack::{packed_len, unpack_at};
use crate::encode::KeyPredicate;
use crate::error::{Error, Result};

/// Widest key the block kernel handles.
pub const MAX_KERNEL_WIDTH: u8 = 32;

/// Reference implementation: unpack each key, then compare.
pub fn filter_packed_scalar(payload: &[u8], width: u8, count: usize, kp: KeyPredicate) -> Result<BitVector> {
    check_len(payload, width, count)?;
    let mut out = BitVector::zeros(count);
    for i in 0..count {
        if kp.matches(unpack_at(payload, width, i) as u32) {
            out.set(i);
        }
    }
    Ok(out)
}

fn check_len(payload: &[u8], width: u8, count: usize) -> Result<()> {
    if payload.len() < packed_len(count, width) {
        return Err(Error::corrupt_chunk(format!(
            "{count} keys at width {width} need {} bytes, page has {}",
            packed_len(count, width),
            payload.len()
        )));
    }
    Ok(())
}

#[inline(always)]
fn block_mask<const W: usize>(words: &[u64; W], lo: u32, span: u32) -> u64 {
    let m: u64 = (1u64 << W) - 1;
    let mut out = 0u64;
    for i in 0..64 {
        let bit = i * W;
        let w = bit / 64;
        let shift = bit % 64;
        let mut v = words[w] >> shift;
        if shift + W > 64 {
            v |= words[w + 1] << (64 - shift);
        }
        let k = (v & m) as u32;
        out |= ((k.wrapping_sub(lo) <= span) as u64) << i;
    }
    out
}

fn run<const W: usize>(payload: &[u8], count: usize, lo: u32, span: u32) -> BitVector {
    let block_bytes = 8 * W;
    let full = count / 64;
    let mut out = Vec::with_capacity(count.div_ceil(64));
    let mut words = [0u64; W];
    for b in 0..full {
        let bytes = &payload[b * block_bytes..(b + 1) * block_bytes];
        for (w, c) in words.iter_mut().zip(bytes.chunks_exact(8)) {
            *w = u64::from_le_bytes(c.try_into().unwrap());
        }
        out.push(block_mask::<W>(&words, lo, span));
    }
    let rest = count - full * 64;
    if rest > 0 {
        let mut buf = vec![0u8; block_bytes];
        let tail = &payload[full * block_bytes..full * block_bytes + packed_len(rest, W as u8)];
        buf[..tail.len()].copy_from_slice(tail);
        for (w, c) in words.iter_mut().zip(buf.chunks_exact(8)) {
            *w = u64::from_le_bytes(c.try_into().unwrap());
        }
        out.push(block_mask::<W>(&words, lo, span));
    }
    // from_words clears bits past `count` in the last word
    BitVector::from_words(count, out)
}

macro_rules! dispatch {
    ($width:expr, $payload:expr, $count:expr, $lo:expr, $span:expr; $($w:literal)*) => {
        match $width {
            $($w => run::<$w>($payload, $count, $lo, $span),)*
            _ => unreachable!(),
        }
    };
}

/// Evaluates `kp` over `count` keys packed at `width` bits. Bit-identical to
/// [`filter_packed_scalar`]; widths above 32 are rejected.
pub fn filter_packed(payload: &[u8], width: u8, count: usize, kp: KeyPredicate) -> Result<BitVector> {
    if width > MAX_KERNEL_WIDTH {
        return Err(Error::Unsupported(format!("packed kernel handles widths up to {MAX_KERNEL_WIDTH}, got {width}")));
    }
    check_len(payload, width, count)?;
    let Some((lo, hi)) = kp.inclusive_range() else {
        return Ok(BitVector::zeros(count));
    };
    if width == 0 {
        // a one-entry dictionary: every key is 0
        return Ok(if kp.matches(0) { BitVector::ones(count) } else { BitVector::zeros(count) });
    }
    let max_key = ((1u64 << width) - 1) as u32;
    if lo > max_key {
        return Ok(BitVector::zeros(count));
    }
    let span = hi.min(max_key) - lo;
    Ok(dispatch!(width, payload, count, lo, span;
        1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16 17 18 19 20 21 22 23 24 25 26 27 28 29 30 31 32))
}
