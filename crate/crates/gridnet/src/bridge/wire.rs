//! Length-prefixed packet frames.
//!
//! ```text
//! frame   := length:u32be payload
//! payload := seq:u64be created_at_us:u64be size:u64be
//!            src_len:u16be src_utf8 dst_len:u16be dst_utf8
//! ```

use std::io::{Read, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("incomplete frame: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("malformed frame: {0}")]
    Malformed(String),
}

/// A packet in transit between simulator and peer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirePacket {
    pub seq: u64,
    pub created_at_us: u64,
    pub size: u64,
    pub src: String,
    pub dst: String,
}

const FIXED_LEN: usize = 8 + 8 + 8;
/// Frames beyond this are rejected as malformed rather than allocated.
const MAX_FRAME: usize = 1 << 20;

/// Encodes a packet as one length-prefixed frame.
pub fn encode_frame(pkt: &WirePacket) -> Vec<u8> {
    let payload_len = FIXED_LEN + 2 + pkt.src.len() + 2 + pkt.dst.len();
    let mut out = Vec::with_capacity(4 + payload_len);
    out.extend_from_slice(&(payload_len as u32).to_be_bytes());
    out.extend_from_slice(&pkt.seq.to_be_bytes());
    out.extend_from_slice(&pkt.created_at_us.to_be_bytes());
    out.extend_from_slice(&pkt.size.to_be_bytes());
    out.extend_from_slice(&(pkt.src.len() as u16).to_be_bytes());
    out.extend_from_slice(pkt.src.as_bytes());
    out.extend_from_slice(&(pkt.dst.len() as u16).to_be_bytes());
    out.extend_from_slice(pkt.dst.as_bytes());
    out
}

/// Decodes one frame from the front of `buf`, returning the packet and the
/// bytes consumed.
pub fn decode_frame(buf: &[u8]) -> Result<(WirePacket, usize), FrameError> {
    if buf.len() < 4 {
        return Err(FrameError::Truncated { need: 4, have: buf.len() });
    }
    let payload_len = u32::from_be_bytes(buf[0..4].try_into().unwrap()) as usize;
    if payload_len > MAX_FRAME {
        return Err(FrameError::Malformed(format!("frame of {payload_len} bytes")));
    }
    if buf.len() < 4 + payload_len {
        return Err(FrameError::Truncated { need: 4 + payload_len, have: buf.len() });
    }
    let payload = &buf[4..4 + payload_len];
    let pkt = decode_payload(payload)?;
    Ok((pkt, 4 + payload_len))
}

fn decode_payload(payload: &[u8]) -> Result<WirePacket, FrameError> {
    if payload.len() < FIXED_LEN + 4 {
        return Err(FrameError::Malformed(format!(
            "payload of {} bytes is below the fixed header",
            payload.len()
        )));
    }
    let seq = u64::from_be_bytes(payload[0..8].try_into().unwrap());
    let created_at_us = u64::from_be_bytes(payload[8..16].try_into().unwrap());
    let size = u64::from_be_bytes(payload[16..24].try_into().unwrap());
    let mut at = FIXED_LEN;
    let mut take_str = |what: &str| -> Result<String, FrameError> {
        if payload.len() < at + 2 {
            return Err(FrameError::Malformed(format!("{what} length missing")));
        }
        let len = u16::from_be_bytes(payload[at..at + 2].try_into().unwrap()) as usize;
        at += 2;
        if payload.len() < at + len {
            return Err(FrameError::Malformed(format!("{what} shorter than declared")));
        }
        let s = std::str::from_utf8(&payload[at..at + len])
            .map_err(|_| FrameError::Malformed(format!("{what} is not utf-8")))?
            .to_string();
        at += len;
        Ok(s)
    };
    let src = take_str("src id")?;
    let dst = take_str("dst id")?;
    if at != payload.len() {
        return Err(FrameError::Malformed(format!(
            "{} trailing bytes",
            payload.len() - at
        )));
    }
    Ok(WirePacket { seq, created_at_us, size, src, dst })
}

/// Writes one frame to a stream.
pub fn write_frame(w: &mut impl Write, pkt: &WirePacket) -> std::io::Result<()> {
    w.write_all(&encode_frame(pkt))
}

/// Reads exactly one frame from a stream. A clean EOF before any byte
/// returns `Ok(None)`.
pub fn read_frame(r: &mut impl Read) -> std::io::Result<Option<WirePacket>> {
    let mut len_buf = [0u8; 4];
    match r.read(&mut len_buf)? {
        0 => return Ok(None),
        mut got => {
            while got < 4 {
                let n = r.read(&mut len_buf[got..])?;
                if n == 0 {
                    return Err(truncated_io(4, got));
                }
                got += n;
            }
        }
    }
    let payload_len = u32::from_be_bytes(len_buf) as usize;
    if payload_len > MAX_FRAME {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            FrameError::Malformed(format!("frame of {payload_len} bytes")),
        ));
    }
    let mut payload = vec![0u8; payload_len];
    let mut got = 0;
    while got < payload_len {
        let n = r.read(&mut payload[got..])?;
        if n == 0 {
            return Err(truncated_io(payload_len, got));
        }
        got += n;
    }
    decode_payload(&payload)
        .map(Some)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

fn truncated_io(need: usize, have: usize) -> std::io::Error {
    std::io::Error::new(
        std::io::ErrorKind::UnexpectedEof,
        FrameError::Truncated { need, have },
    )
}
