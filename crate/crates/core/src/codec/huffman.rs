//! Canonical, length-limited Huffman coding of `u32` symbol streams.
//!
//! Section layout (little-endian): `u64` symbol count, `u32` number of coded
//! symbols, that many `(u32 symbol, u8 code length)` pairs, then the
//! MSB-first bitstream padded with zero bits to a byte boundary.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};

pub const MAX_CODE_LEN: u8 = 24;

fn code_lengths(freq: &[(u32, u64)]) -> Vec<u8> {
    let n = freq.len();
    if n == 1 {
        return vec![1];
    }
    // Plain Huffman tree on (weight, node id); ids break ties deterministically.
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = freq
        .iter()
        .enumerate()
        .map(|(k, &(_, f))| Reverse((f, k)))
        .collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((fa, a)) = heap.pop().unwrap();
        let Reverse((fb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((fa + fb, next)));
        next += 1;
    }
    let root = next - 1;
    let mut depth = vec![0u32; 2 * n - 1];
    for k in (0..root).rev() {
        depth[k] = depth[parent[k]] + 1;
    }
    let max = depth[..n].iter().copied().max().unwrap_or(0) as usize;
    let mut bl_count = vec![0u64; max.max(MAX_CODE_LEN as usize) + 1];
    for &d in &depth[..n] {
        bl_count[d as usize] += 1;
    }
    // Move overlong codes up (JPEG Annex K.3 adjustment).
    let limit = MAX_CODE_LEN as usize;
    for i in (limit + 1..bl_count.len()).rev() {
        while bl_count[i] > 0 {
            let mut j = i - 2;
            while bl_count[j] == 0 {
                j -= 1;
            }
            bl_count[i] -= 2;
            bl_count[i - 1] += 1;
            bl_count[j + 1] += 2;
            bl_count[j] -= 1;
        }
    }
    // Hand the shortest lengths to the most frequent symbols.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (Reverse(freq[k].1), freq[k].0));
    let mut lens = vec![0u8; n];
    let mut it = order.into_iter();
    for (len, &count) in bl_count.iter().enumerate().take(limit + 1) {
        for _ in 0..count {
            lens[it.next().unwrap()] = len as u8;
        }
    }
    lens
}

/// `(symbol, code, length)` in canonical order.
fn canonical(mut table: Vec<(u32, u8)>) -> Vec<(u32, u32, u8)> {
    table.sort_by_key(|&(s, l)| (l, s));
    let mut code = 0u32;
    let mut prev_len = 0u8;
    let mut out = Vec::with_capacity(table.len());
    for (s, l) in table {
        code <<= l - prev_len;
        out.push((s, code, l));
        code += 1;
        prev_len = l;
    }
    out
}

struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    #[inline]
    fn put(&mut self, code: u32, len: u8) {
        self.acc = (self.acc << len) | code as u64;
        self.nbits += len as u32;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.out.push((self.acc >> self.nbits) as u8);
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.out.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.out
    }
}

/// Encodes `symbols` into a self-describing section.
pub fn encode(symbols: &[u32]) -> Vec<u8> {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for &s in symbols {
        *counts.entry(s).or_default() += 1;
    }
    let mut freq: Vec<(u32, u64)> = counts.into_iter().collect();
    freq.sort_unstable();
    let mut out = Vec::new();
    out.extend_from_slice(&(symbols.len() as u64).to_le_bytes());
    out.extend_from_slice(&(freq.len() as u32).to_le_bytes());
    if freq.is_empty() {
        return out;
    }
    let lens = code_lengths(&freq);
    let table: Vec<(u32, u8)> = freq.iter().zip(&lens).map(|(&(s, _), &l)| (s, l)).collect();
    for &(s, l) in &table {
        out.extend_from_slice(&s.to_le_bytes());
        out.push(l);
    }
    let codes = canonical(table);
    let mut w = BitWriter {
        out,
        acc: 0,
        nbits: 0,
    };
    let max_sym = freq.last().unwrap().0 as usize;
    if max_sym < 1 << 20 {
        // dense lookup: every stream the codec writes has a small alphabet
        let mut dense = vec![(0u32, 0u8); max_sym + 1];
        for &(s, c, l) in &codes {
            dense[s as usize] = (c, l);
        }
        for &s in symbols {
            let (c, l) = dense[s as usize];
            w.put(c, l);
        }
    } else {
        let map: HashMap<u32, (u32, u8)> = codes.into_iter().map(|(s, c, l)| (s, (c, l))).collect();
        for s in symbols {
            let (c, l) = map[s];
            w.put(c, l);
        }
    }
    w.finish()
}

/// Lazy decoder over an encoded section.
pub struct Decoder<'a> {
    bits: &'a [u8],
    pos: usize,
    remaining: u64,
    /// codes per length, index 1..=MAX_CODE_LEN
    count: [u32; MAX_CODE_LEN as usize + 1],
    /// symbols in canonical order
    symbols: Vec<u32>,
}

fn take<'a>(buf: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if buf.len() < n {
        return Err(Error::Huffman("truncated table".into()));
    }
    let (head, tail) = buf.split_at(n);
    *buf = tail;
    Ok(head)
}

impl<'a> Decoder<'a> {
    /// Parses the table; symbols above `max_symbol` are rejected.
    pub fn new(section: &'a [u8], max_symbol: u32) -> Result<Self> {
        let mut buf = section;
        let n = u64::from_le_bytes(take(&mut buf, 8)?.try_into().unwrap());
        let m = u32::from_le_bytes(take(&mut buf, 4)?.try_into().unwrap()) as usize;
        if m as u64 > max_symbol as u64 + 1 {
            return Err(Error::Huffman(format!("{m} symbols exceed alphabet")));
        }
        let mut table = Vec::with_capacity(m);
        let mut count = [0u32; MAX_CODE_LEN as usize + 1];
        for _ in 0..m {
            let e = take(&mut buf, 5)?;
            let s = u32::from_le_bytes(e[..4].try_into().unwrap());
            let l = e[4];
            if s > max_symbol {
                return Err(Error::Huffman(format!("symbol {s} exceeds {max_symbol}")));
            }
            if l == 0 || l > MAX_CODE_LEN {
                return Err(Error::Huffman(format!("bad code length {l}")));
            }
            count[l as usize] += 1;
            table.push((s, l));
        }
        table.sort_by_key(|&(s, l)| (l, s));
        let mut syms: Vec<u32> = table.iter().map(|x| x.0).collect();
        syms.sort_unstable();
        if syms.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Huffman("duplicate symbol".into()));
        }
        // Kraft sum must not exceed 1
        let kraft: u64 = (1..=MAX_CODE_LEN as usize)
            .map(|l| (count[l] as u64) << (MAX_CODE_LEN as usize - l))
            .sum();
        if kraft > 1u64 << MAX_CODE_LEN {
            return Err(Error::Huffman("oversubscribed code".into()));
        }
        if n > 0 && m == 0 {
            return Err(Error::Huffman("symbols present but table empty".into()));
        }
        let min_bits = n.saturating_mul(table.first().map_or(0, |t| t.1) as u64);
        if (buf.len() as u64).saturating_mul(8) < min_bits {
            return Err(Error::StreamLength {
                section: "huffman bitstream",
                expected: min_bits.div_ceil(8),
                actual: buf.len() as u64,
            });
        }
        Ok(Self {
            bits: buf,
            pos: 0,
            remaining: n,
            count,
            symbols: table.into_iter().map(|t| t.0).collect(),
        })
    }

    pub fn len(&self) -> u64 {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }

    #[inline]
    fn bit(&mut self) -> Result<u32> {
        let byte = self.bits.get(self.pos >> 3).ok_or(Error::StreamLength {
            section: "huffman bitstream",
            expected: (self.pos as u64 >> 3) + 1,
            actual: self.bits.len() as u64,
        })?;
        let b = (byte >> (7 - (self.pos & 7))) & 1;
        self.pos += 1;
        Ok(b as u32)
    }

    /// Next symbol; errors past the end of the stream.
    pub fn next_symbol(&mut self) -> Result<u32> {
        if self.remaining == 0 {
            return Err(Error::Huffman("read past last symbol".into()));
        }
        self.remaining -= 1;
        let mut code = 0u32;
        let mut first = 0u32;
        let mut index = 0u32;
        for len in 1..=MAX_CODE_LEN as usize {
            code |= self.bit()?;
            let c = self.count[len];
            if code.wrapping_sub(first) < c {
                return Ok(self.symbols[(index + code - first) as usize]);
            }
            index += c;
            first = (first + c) << 1;
            code <<= 1;
        }
        Err(Error::Huffman("invalid code".into()))
    }

    pub fn decode_all(mut self) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.remaining as usize);
        while self.remaining > 0 {
            out.push(self.next_symbol()?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn round_trip(s: &[u32]) -> Vec<u32> {
        let enc = encode(s);
        Decoder::new(&enc, u32::MAX).unwrap().decode_all().unwrap()
    }

    #[test]
    fn small_streams() {
        assert_eq!(round_trip(&[]), Vec::<u32>::new());
        assert_eq!(round_trip(&[7, 7, 7]), vec![7, 7, 7]);
        assert_eq!(
            round_trip(&[1, 2, 1, 3, 1, 1, 0]),
            vec![1, 2, 1, 3, 1, 1, 0]
        );
    }

    #[test]
    fn dyadic_lengths_are_optimal() {
        let mut s = vec![0u32; 8];
        s.extend([1; 4]);
        s.extend([2, 2, 3, 3]);
        let enc = encode(&s);
        // 16 symbols at 1.75 bits = 28 bits = 4 bytes of payload
        assert_eq!(enc.len(), 8 + 4 + 4 * 5 + 4);
    }

    #[test]
    fn fibonacci_weights_are_length_limited() {
        let mut s = Vec::new();
        let (mut a, mut b) = (1u64, 1u64);
        for sym in 0..40u32 {
            for _ in 0..a.min(200_000) {
                s.push(sym);
            }
            (a, b) = (b, a + b);
        }
        let freq: Vec<(u32, u64)> = (0..40u32)
            .map(|k| (k, s.iter().filter(|&&x| x == k).count() as u64))
            .collect();
        let lens = code_lengths(&freq);
        assert!(lens.iter().all(|&l| l <= MAX_CODE_LEN));
        let kraft: f64 = lens.iter().map(|&l| 2f64.powi(-(l as i32))).sum();
        assert!(kraft <= 1.0 + 1e-12);
        assert_eq!(round_trip(&s), s);
    }

    #[test]
    fn corrupt_tables_are_rejected() {
        let enc = encode(&[1, 2, 3, 3]);
        assert!(matches!(Decoder::new(&enc, 2), Err(Error::Huffman(_))));
        assert!(Decoder::new(&enc[..10], 10).is_err());
        let mut bad = enc.clone();
        bad[12 + 4] = 0;
        assert!(Decoder::new(&bad, 10).is_err());
        let truncated = &enc[..enc.len() - 1];
        let r = Decoder::new(truncated, 10).and_then(|d| d.decode_all());
        assert!(r.is_err());
    }

    proptest! {
        #[test]
        fn round_trips(s in proptest::collection::vec(0u32..300, 0..2000)) {
            prop_assert_eq!(round_trip(&s), s);
        }

        #[test]
        fn skewed_round_trips(s in proptest::collection::vec(prop_oneof![10 => Just(1u32), 1 => 0u32..65536], 0..3000)) {
            prop_assert_eq!(round_trip(&s), s);
        }
    }
}
