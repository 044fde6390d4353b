//! LiDAR datagram wire layout (little-endian):
//!
//! ```text
//! frame_id u32 | packet_seq u16 | packets_in_frame u16 | timestamp_ns u64 |
//! point_count u16 | point_count × { x f32 | y f32 | z f32 | intensity u8 }
//! ```
//!
//! A packet file is a plain concatenation of packets.

use serde::{Deserialize, Serialize};

pub const HEADER_LEN: usize = 4 + 2 + 2 + 8 + 2;
pub const POINT_LEN: usize = 4 * 3 + 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PacketError {
    #[error("packet at byte {offset} truncated: need {needed} bytes, have {available}")]
    Truncated { offset: usize, needed: usize, available: usize },
    #[error("packet at byte {offset}: sequence {seq} not below packet count {count}")]
    SeqOutOfRange { offset: usize, seq: u16, count: u16 },
    #[error("packet at byte {offset} carries no points")]
    EmptyPayload { offset: usize },
    #[error("packet has {0} points, more than fit in a u16 count")]
    TooManyPoints(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketPoint {
    pub x: f32,
    pub y: f32,
    pub z: f32,
    pub intensity: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarPacket {
    pub frame_id: u32,
    pub packet_seq: u16,
    pub packets_in_frame: u16,
    pub timestamp_ns: u64,
    pub payload: Vec<PacketPoint>,
}

impl LidarPacket {
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + POINT_LEN * self.payload.len()
    }

    pub fn encode_into(&self, out: &mut Vec<u8>) -> Result<(), PacketError> {
        let count = u16::try_from(self.payload.len()).map_err(|_| PacketError::TooManyPoints(self.payload.len()))?;
        out.reserve(self.encoded_len());
        out.extend_from_slice(&self.frame_id.to_le_bytes());
        out.extend_from_slice(&self.packet_seq.to_le_bytes());
        out.extend_from_slice(&self.packets_in_frame.to_le_bytes());
        out.extend_from_slice(&self.timestamp_ns.to_le_bytes());
        out.extend_from_slice(&count.to_le_bytes());
        for p in &self.payload {
            out.extend_from_slice(&p.x.to_le_bytes());
            out.extend_from_slice(&p.y.to_le_bytes());
            out.extend_from_slice(&p.z.to_le_bytes());
            out.push(p.intensity);
        }
        Ok(())
    }

    pub fn encode(&self) -> Result<Vec<u8>, PacketError> {
        let mut out = Vec::new();
        self.encode_into(&mut out)?;
        Ok(out)
    }

    /// Decodes one packet from the front of `buf`; returns it with the number
    /// of bytes consumed. `offset` is only used in error reports.
    pub fn decode(buf: &[u8], offset: usize) -> Result<(LidarPacket, usize), PacketError> {
        let truncated = |needed| PacketError::Truncated { offset, needed, available: buf.len() };
        if buf.len() < HEADER_LEN {
            return Err(truncated(HEADER_LEN));
        }
        let u16_at = |i: usize| u16::from_le_bytes([buf[i], buf[i + 1]]);
        let frame_id = u32::from_le_bytes(buf[0..4].try_into().expect("4 bytes"));
        let packet_seq = u16_at(4);
        let packets_in_frame = u16_at(6);
        let timestamp_ns = u64::from_le_bytes(buf[8..16].try_into().expect("8 bytes"));
        let count = u16_at(16) as usize;
        let total = HEADER_LEN + count * POINT_LEN;
        if buf.len() < total {
            return Err(truncated(total));
        }
        if packet_seq >= packets_in_frame {
            return Err(PacketError::SeqOutOfRange { offset, seq: packet_seq, count: packets_in_frame });
        }
        if count == 0 {
            return Err(PacketError::EmptyPayload { offset });
        }
        let f32_at = |i: usize| f32::from_le_bytes(buf[i..i + 4].try_into().expect("4 bytes"));
        let payload = (0..count)
            .map(|k| {
                let base = HEADER_LEN + k * POINT_LEN;
                PacketPoint { x: f32_at(base), y: f32_at(base + 4), z: f32_at(base + 8), intensity: buf[base + 12] }
            })
            .collect();
        Ok((LidarPacket { frame_id, packet_seq, packets_in_frame, timestamp_ns, payload }, total))
    }
}

/// Iterates the packets of a packet file, stopping after the first error.
pub fn read_packets(bytes: &[u8]) -> impl Iterator<Item = Result<LidarPacket, PacketError>> + '_ {
    let mut offset = 0;
    let mut failed = false;
    std::iter::from_fn(move || {
        if failed || offset >= bytes.len() {
            return None;
        }
        match LidarPacket::decode(&bytes[offset..], offset) {
            Ok((p, used)) => {
                offset += used;
                Some(Ok(p))
            }
            Err(e) => {
                failed = true;
                Some(Err(e))
            }
        }
    })
}
