//! graph6 codec.
//!
//! A line is `N(n)` followed by the upper triangle of the adjacency matrix in
//! column order, six bits per byte (most significant first), each byte offset
//! by 63 and the final byte zero-padded. `N(n)` is the single byte `n + 63`
//! for `n <= 62`, otherwise `126` followed by three six-bit bytes.

use std::io::{self, BufRead};

use thiserror::Error;

use super::graph::{Graph, MAX_VERTICES};

const HEADER: &str = ">>graph6<<";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 line")]
    Empty,
    #[error("malformed graph6 size header")]
    BadHeader,
    #[error("byte {byte:#04x} at offset {offset} is outside the printable range 63..=126")]
    IllegalByte { byte: u8, offset: usize },
    #[error("graph on {0} vertices is not supported (1..={MAX_VERTICES})")]
    Unsupported(usize),
    #[error("expected {expected} data bytes for n={n}, found {found}")]
    Length { n: usize, expected: usize, found: usize },
    #[error("nonzero padding bits in final byte")]
    TrailingBits,
}

/// Packs bits six to a byte, offset by 63.
pub(crate) fn pack_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(6)
        .map(|chunk| {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 1 << (5 - i);
                }
            }
            byte + 63
        })
        .collect()
}

fn encode_size(n: usize, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        out.extend([(n >> 12) as u8 & 63, (n >> 6) as u8 & 63, n as u8 & 63].map(|b| b + 63));
    }
}

pub fn write_graph6(g: &Graph) -> String {
    let mut bytes = Vec::new();
    encode_size(g.n(), &mut bytes);
    bytes.extend(pack_bits(&g.upper_triangle()));
    String::from_utf8(bytes).expect("graph6 is ascii")
}

pub fn parse_graph6(line: &str) -> Result<Graph, Graph6Error> {
    let line = line.trim_end_matches(['\n', '\r']);
    let line = line.strip_prefix(HEADER).unwrap_or(line);
    let bytes = line.as_bytes();
    if bytes.is_empty() {
        return Err(Graph6Error::Empty);
    }
    if let Some((offset, &byte)) = bytes.iter().enumerate().find(|(_, &b)| !(63..=126).contains(&b)) {
        return Err(Graph6Error::IllegalByte { byte, offset });
    }
    let (n, body) = if bytes[0] != 126 {
        ((bytes[0] - 63) as usize, &bytes[1..])
    } else {
        if bytes.len() < 4 || bytes[1] == 126 {
            // 126 126 introduces the 36-bit form, far beyond any supported size
            return Err(Graph6Error::BadHeader);
        }
        let n = bytes[1..4].iter().fold(0usize, |acc, &b| acc << 6 | (b - 63) as usize);
        if n <= 62 {
            return Err(Graph6Error::BadHeader);
        }
        (n, &bytes[4..])
    };
    if n == 0 || n > MAX_VERTICES {
        return Err(Graph6Error::Unsupported(n));
    }
    let nbits = n * (n - 1) / 2;
    let expected = nbits.div_ceil(6);
    if body.len() != expected {
        return Err(Graph6Error::Length {
            n,
            expected,
            found: body.len(),
        });
    }
    let mut g = Graph::empty(n).expect("size checked");
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = body[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                g.add_edge(i, j).expect("indices in range");
            }
            k += 1;
        }
    }
    if nbits % 6 != 0 {
        let last = body[expected - 1] - 63;
        let pad = 6 - nbits % 6;
        if last & ((1 << pad) - 1) != 0 {
            return Err(Graph6Error::TrailingBits);
        }
    }
    Ok(g)
}

/// Reads graph6 lines, skipping blank lines. Errors carry the 1-based line number.
pub fn read_graph6<R: BufRead>(reader: R) -> impl Iterator<Item = io::Result<Graph>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e)),
        Ok(line) if line.trim().is_empty() => None,
        Ok(line) => Some(parse_graph6(line.trim()).map_err(|e| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
        })),
    })
}
