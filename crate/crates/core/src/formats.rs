//! Text formats: message files and retrieval probes.
//!
//! A message file holds one message per line as `⌈k/4⌉` hex digits, high bits
//! first. `#` starts a comment; blank lines are skipped.
//!
//! A probe lists one hex chunk per cluster separated by `:`, with `?` for an
//! erased cluster, e.g. `?:72:61:69:6e`. The ASCII form (`?rain`) maps each
//! byte to a cluster of 256 fanals.

use std::fmt::Write as _;

use crate::clique::{ClusterTopology, FanalPattern, Message};
use crate::error::{Error, Result};

/// Parses a message file for messages of `bits` bits.
pub fn parse_messages(text: &str, bits: usize) -> Result<Vec<Message>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let m = Message::from_hex(line, bits).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        out.push(m);
    }
    Ok(out)
}

pub fn format_messages<'a>(messages: impl IntoIterator<Item = &'a Message>) -> String {
    let mut s = String::new();
    for m in messages {
        s.push_str(&m.to_hex());
        s.push('\n');
    }
    s
}

/// Parses a `:`-separated probe. Each non-erased chunk must be a hex value below `l`.
pub fn parse_probe(probe: &str, topology: &ClusterTopology) -> Result<FanalPattern> {
    let chunks: Vec<&str> = probe.trim().split(':').collect();
    if chunks.len() != topology.clusters() {
        return Err(Error::Format(format!(
            "probe has {} chunks, network has {} clusters",
            chunks.len(),
            topology.clusters()
        )));
    }
    let fanals = chunks
        .iter()
        .enumerate()
        .map(|(cluster, chunk)| {
            let chunk = chunk.trim();
            if chunk == "?" {
                return Ok(None);
            }
            let v = u32::from_str_radix(chunk, 16)
                .map_err(|_| Error::Format(format!("chunk {cluster}: invalid hex {chunk:?}")))?;
            if v as usize >= topology.fanals() {
                return Err(Error::Format(format!(
                    "chunk {cluster}: value {v:#x} exceeds cluster size {}",
                    topology.fanals()
                )));
            }
            Ok(Some(v))
        })
        .collect::<Result<_>>()?;
    Ok(FanalPattern::new(fanals))
}

/// Writes a pattern in probe syntax, with hex chunks padded to `⌈κ/4⌉` digits.
pub fn format_probe(pattern: &FanalPattern, topology: &ClusterTopology) -> String {
    let width = (topology.bits_per_cluster() as usize).div_ceil(4);
    let mut s = String::new();
    for (i, f) in pattern.entries().iter().enumerate() {
        if i > 0 {
            s.push(':');
        }
        match f {
            Some(v) => write!(s, "{v:0width$x}").unwrap(),
            None => s.push('?'),
        }
    }
    s
}

fn check_ascii_topology(topology: &ClusterTopology) -> Result<()> {
    if topology.fanals() != 256 {
        return Err(Error::Format(format!(
            "ASCII mode needs 256 fanals per cluster, network has {}",
            topology.fanals()
        )));
    }
    Ok(())
}

/// Parses an ASCII word, one byte per cluster, `?` marking an erased position.
pub fn parse_ascii_probe(text: &str, topology: &ClusterTopology) -> Result<FanalPattern> {
    check_ascii_topology(topology)?;
    if !text.is_ascii() {
        return Err(Error::Format("ASCII probe contains non-ASCII characters".into()));
    }
    if text.len() != topology.clusters() {
        return Err(Error::Format(format!(
            "ASCII probe has {} characters, network has {} clusters",
            text.len(),
            topology.clusters()
        )));
    }
    Ok(FanalPattern::new(
        text.bytes()
            .map(|b| if b == b'?' { None } else { Some(u32::from(b)) })
            .collect(),
    ))
}

/// Parses ASCII words, one per line, into complete patterns.
pub fn parse_ascii_messages(text: &str, topology: &ClusterTopology) -> Result<Vec<FanalPattern>> {
    check_ascii_topology(topology)?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = parse_ascii_probe(line, topology).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if !p.is_complete() {
            return Err(Error::parse(i + 1, "'?' is not allowed in a learnt word"));
        }
        out.push(p);
    }
    Ok(out)
}

/// Renders a pattern as ASCII; erased or non-printable clusters become `?`.
pub fn format_ascii(pattern: &FanalPattern) -> String {
    pattern
        .entries()
        .iter()
        .map(|f| match f {
            Some(v) if (0x20..0x7f).contains(v) => char::from(*v as u8),
            _ => '?',
        })
        .collect()
}
