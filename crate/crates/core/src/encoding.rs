//! File bytes → blocks of Z_p → chunks of `s` blocks.
//!
//! A block is `block_bytes` consecutive file bytes read as a big-endian
//! integer (31 bytes by default, so every block is below the 254-bit group
//! order). Chunk `i` holds blocks `i·s .. i·s + s` and is read as the
//! coefficient vector of `M_i(x) = m_{i,0} + m_{i,1}·x + … + m_{i,s-1}·x^{s-1}`.

use ark_ff::{BigInteger, PrimeField, Zero};
use rayon::prelude::*;

use crate::algebra::{Scalar, WireFormat, WireReader, REFERENCE_SUITE};
use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_BYTES: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingParams {
    /// Blocks per chunk.
    pub s: usize,
    pub block_bytes: usize,
}

impl EncodingParams {
    pub fn new(s: usize) -> Result<Self> {
        Self::with_block_bytes(s, DEFAULT_BLOCK_BYTES)
    }

    pub fn with_block_bytes(s: usize, block_bytes: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("s must be at least 1".into()));
        }
        if block_bytes == 0 || block_bytes * 8 >= Scalar::MODULUS_BIT_SIZE as usize {
            return Err(Error::InvalidParams(format!("block width {block_bytes} bytes does not fit below p")));
        }
        Ok(Self { s, block_bytes })
    }

    /// Block count for a file of `len` bytes.
    pub fn block_count(&self, len: u64) -> u64 {
        len.div_ceil(self.block_bytes as u64)
    }

    /// Chunk count for a file of `len` bytes.
    pub fn chunk_count(&self, len: u64) -> u64 {
        self.block_count(len).div_ceil(self.s as u64)
    }

    /// Authenticator bytes per data byte: one G1 tag per chunk.
    pub fn tag_overhead_ratio(&self) -> f64 {
        REFERENCE_SUITE.g1_bytes as f64 / (self.s * self.block_bytes) as f64
    }
}

/// A file laid out as `d` chunks of `s` scalars, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileEncoding {
    pub name: Scalar,
    pub params: EncodingParams,
    /// Number of data blocks before chunk padding.
    pub n: u64,
    pub original_length: u64,
    blocks: Vec<Scalar>,
}

impl FileEncoding {
    /// Builds an encoding from an explicit chunk matrix, e.g. one recovered by an attacker.
    pub fn from_chunks(
        name: Scalar,
        params: EncodingParams,
        n: u64,
        original_length: u64,
        chunks: &[Vec<Scalar>],
    ) -> Result<Self> {
        if chunks.iter().any(|c| c.len() != params.s) {
            return Err(Error::ParamMismatch(format!("every chunk must have {} blocks", params.s)));
        }
        if n > (chunks.len() * params.s) as u64 {
            return Err(Error::InvalidParams(format!("{n} blocks do not fit in {} chunks", chunks.len())));
        }
        Ok(Self { name, params, n, original_length, blocks: chunks.concat() })
    }

    pub fn s(&self) -> usize {
        self.params.s
    }

    pub fn d(&self) -> usize {
        self.blocks.len() / self.params.s
    }

    pub fn chunk(&self, i: usize) -> &[Scalar] {
        let s = self.params.s;
        &self.blocks[i * s..(i + 1) * s]
    }

    pub fn chunk_mut(&mut self, i: usize) -> &mut [Scalar] {
        let s = self.params.s;
        &mut self.blocks[i * s..(i + 1) * s]
    }

    pub fn chunks(&self) -> std::slice::ChunksExact<'_, Scalar> {
        self.blocks.chunks_exact(self.params.s)
    }

    pub fn par_chunks(&self) -> rayon::slice::ChunksExact<'_, Scalar> {
        self.blocks.par_chunks_exact(self.params.s)
    }

    pub fn blocks(&self) -> &[Scalar] {
        &self.blocks
    }

    /// `suite ‖ s (4 BE) ‖ block_bytes (1) ‖ name ‖ original_length (8 BE) ‖ n (8 BE) ‖ blocks`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(54 + 32 * self.blocks.len());
        out.push(REFERENCE_SUITE.id);
        out.extend_from_slice(&(self.params.s as u32).to_be_bytes());
        out.push(self.params.block_bytes as u8);
        self.name.write_wire(&mut out);
        out.extend_from_slice(&self.original_length.to_be_bytes());
        out.extend_from_slice(&self.n.to_be_bytes());
        for b in &self.blocks {
            b.write_wire(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = WireReader::new(bytes);
        r.read_suite()?;
        let s = r.read_u32()? as usize;
        let block_bytes = r.read_u8()? as usize;
        let params = EncodingParams::with_block_bytes(s, block_bytes)?;
        let name = r.read::<Scalar>()?;
        let original_length = r.read_u64()?;
        let n = r.read_u64()?;
        let d = n.div_ceil(s as u64) as usize;
        let mut blocks = Vec::with_capacity(d * s);
        for _ in 0..d * s {
            blocks.push(r.read::<Scalar>()?);
        }
        r.finish()?;
        Ok(Self { name, params, n, original_length, blocks })
    }
}

fn block_to_scalar(window: &[u8]) -> Scalar {
    Scalar::from_be_bytes_mod_order(window)
}

pub fn encode_file(data: &[u8], params: EncodingParams, name: Scalar) -> Result<FileEncoding> {
    if data.is_empty() {
        return Err(Error::EmptyFile);
    }
    let bb = params.block_bytes;
    let n = params.block_count(data.len() as u64);
    let d = params.chunk_count(data.len() as u64) as usize;
    let mut blocks: Vec<Scalar> = data
        .par_chunks(bb)
        .map(|w| {
            if w.len() == bb {
                block_to_scalar(w)
            } else {
                let mut padded = vec![0u8; bb];
                padded[..w.len()].copy_from_slice(w);
                block_to_scalar(&padded)
            }
        })
        .collect();
    blocks.resize(d * params.s, Scalar::zero());
    Ok(FileEncoding { name, params, n, original_length: data.len() as u64, blocks })
}

pub fn decode_file(enc: &FileEncoding, params: EncodingParams) -> Result<Vec<u8>> {
    if enc.params != params {
        return Err(Error::ParamMismatch(format!("encoding uses {:?}, asked to decode with {params:?}", enc.params)));
    }
    let bb = params.block_bytes;
    let capacity = enc.n * bb as u64;
    if enc.original_length > capacity {
        return Err(Error::InconsistentLength { original_length: enc.original_length, capacity });
    }
    let mut out = Vec::with_capacity(capacity as usize);
    for (i, block) in enc.blocks[..enc.n as usize].iter().enumerate() {
        let be = block.into_bigint().to_bytes_be();
        let (high, low) = be.split_at(be.len() - bb);
        if high.iter().any(|&b| b != 0) {
            return Err(Error::InvalidEncoding { offset: i * bb, reason: "block value wider than the block width" });
        }
        out.extend_from_slice(low);
    }
    out.truncate(enc.original_length as usize);
    Ok(out)
}

/// Horner evaluation of `chunk[0] + chunk[1]·x + … + chunk[s-1]·x^{s-1}`.
pub fn chunk_polynomial_eval(chunk: &[Scalar], x: &Scalar) -> Scalar {
    chunk.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
}
