//! LSB-first bit packing: value `i` occupies bits `i*w .. (i+1)*w` of a
//! little-endian byte stream, padded with zeros to a byte boundary.

/// Number of bits needed to represent `v` (0 for 0).
#[inline]
pub fn bits_needed(v: u64) -> u8 {
    (64 - v.leading_zeros()) as u8
}

#[inline]
fn mask(width: u8) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub fn packed_len(count: usize, width: u8) -> usize {
    (count * width as usize).div_ceil(8)
}

/// Packs `values`, each of which must fit in `width` bits.
pub fn pack(values: impl IntoIterator<Item = u64>, width: u8, out: &mut Vec<u8>) {
    debug_assert!(width <= 64);
    if width == 0 {
        return;
    }
    let mut acc: u128 = 0;
    let mut nbits: u32 = 0;
    for v in values {
        debug_assert!(v & !mask(width) == 0, "{v} does not fit in {width} bits");
        acc |= ((v & mask(width)) as u128) << nbits;
        nbits += width as u32;
        while nbits >= 8 {
            out.push(acc as u8);
            acc >>= 8;
            nbits -= 8;
        }
    }
    if nbits > 0 {
        out.push(acc as u8);
    }
}

/// Reads value `i`. The caller guarantees `bytes` holds at least `i + 1` values.
#[inline]
pub fn unpack_at(bytes: &[u8], width: u8, i: usize) -> u64 {
    if width == 0 {
        return 0;
    }
    let bit = i * width as usize;
    let start = bit / 8;
    let shift = bit % 8;
    let mut buf = [0u8; 16];
    let end = (start + 9).min(bytes.len());
    buf[..end - start].copy_from_slice(&bytes[start..end]);
    let word = u128::from_le_bytes(buf);
    ((word >> shift) as u64) & mask(width)
}

/// Unpacks `count` values sequentially into `out`.
pub fn unpack(bytes: &[u8], width: u8, count: usize, out: &mut Vec<u64>) {
    out.reserve(count);
    if width == 0 {
        out.extend(std::iter::repeat(0).take(count));
        return;
    }
    let m = mask(width);
    let mut acc: u128 = 0;
    let mut nbits: u32 = 0;
    let mut pos = 0;
    for _ in 0..count {
        while nbits < width as u32 {
            acc |= (bytes[pos] as u128) << nbits;
            pos += 1;
            nbits += 8;
        }
        out.push((acc as u64) & m);
        acc >>= width;
        nbits -= width as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn width3_layout() {
        let mut out = Vec::new();
        pack(0..8u64, 3, &mut out);
        assert_eq!(out, vec![0b1000_1000, 0b1100_0110, 0b1111_1010]);
        let mut back = Vec::new();
        unpack(&out, 3, 8, &mut back);
        assert_eq!(back, (0..8).collect::<Vec<u64>>());
        assert_eq!(unpack_at(&out, 3, 5), 5);
    }

    #[test]
    fn width_minimality_matches_log2() {
        for v in 1u64..5000 {
            let oracle = (v as f64).log2().floor() as u8 + 1;
            assert_eq!(bits_needed(v), oracle);
        }
        assert_eq!(bits_needed(0), 0);
        assert_eq!(bits_needed(u64::MAX), 64);
    }

    proptest! {
        #[test]
        fn pack_round_trip(width in 0u8..=64, raw in proptest::collection::vec(any::<u64>(), 0..200)) {
            let vals: Vec<u64> = raw.iter().map(|v| v & mask(width)).collect();
            let mut out = Vec::new();
            pack(vals.iter().copied(), width, &mut out);
            prop_assert_eq!(out.len(), packed_len(vals.len(), width));
            let mut back = Vec::new();
            unpack(&out, width, vals.len(), &mut back);
            prop_assert_eq!(&back, &vals);
            for (i, v) in vals.iter().enumerate() {
                prop_assert_eq!(unpack_at(&out, width, i), *v);
            }
        }
    }
}
