//! Binary network snapshots.
//!
//! Layout (integers little-endian):
//!
//! ```text
//! "GBCN" | version: u16 | c: u32 | l: u32 | learned_count: u64 | adjacency bits
//! ```
//!
//! The adjacency holds one bit per possible inter-cluster connection: cluster
//! pairs `(c1 < c2)` in lexicographic order, and within a pair the fanal pairs
//! `(l1, l2)` row-major. Bit `i` lives in byte `i / 8` at position `i % 8`
//! (least significant first). The last byte is zero-padded.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::clique::{CliqueNetwork, ClusterTopology};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GBCN";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 4 + 8;

impl CliqueNetwork {
    /// Serializes the network into snapshot bytes.
    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let t = self.topology();
        let (c, l) = (t.clusters(), t.fanals());
        let nbits = t.max_edges() as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + nbits.div_ceil(8));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(c as u32).to_le_bytes());
        out.extend_from_slice(&(l as u32).to_le_bytes());
        out.extend_from_slice(&self.learned_count().to_le_bytes());

        let mut bits = vec![0u8; nbits.div_ceil(8)];
        let mut i = 0usize;
        for c1 in 0..c {
            for c2 in c1 + 1..c {
                for l1 in 0..l as u32 {
                    for l2 in 0..l as u32 {
                        if self.has_edge(c1, l1, c2, l2) {
                            bits[i / 8] |= 1 << (i % 8);
                        }
                        i += 1;
                    }
                }
            }
        }
        out.extend_from_slice(&bits);
        out
    }

    /// Parses snapshot bytes. The buffer must contain exactly one snapshot.
    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "snapshot truncated: {} bytes, header needs {HEADER_LEN}",
                bytes.len()
            )));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Format("bad snapshot magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported snapshot version {version}"
            )));
        }
        let c = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let l = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        let learned = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
        let topology = ClusterTopology::new(c, l)
            .map_err(|e| Error::Format(format!("snapshot topology: {e}")))?;

        let nbits = topology.max_edges() as usize;
        let body = &bytes[HEADER_LEN..];
        if body.len() != nbits.div_ceil(8) {
            return Err(Error::Format(format!(
                "snapshot body is {} bytes, expected {}",
                body.len(),
                nbits.div_ceil(8)
            )));
        }
        if !nbits.is_multiple_of(8) && body[body.len() - 1] >> (nbits % 8) != 0 {
            return Err(Error::Format("nonzero padding bits in snapshot".into()));
        }

        let mut net = CliqueNetwork::new(topology);
        let mut i = 0usize;
        for c1 in 0..c {
            for c2 in c1 + 1..c {
                for l1 in 0..l as u32 {
                    for l2 in 0..l as u32 {
                        if body[i / 8] >> (i % 8) & 1 == 1 {
                            net.connect(c1, l1, c2, l2);
                        }
                        i += 1;
                    }
                }
            }
        }
        net.set_learned_count(learned);
        Ok(net)
    }

    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_snapshot_bytes())?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        Self::from_snapshot_bytes(&buf)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_snapshot_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_snapshot_bytes(&fs::read(path)?)
    }
}
