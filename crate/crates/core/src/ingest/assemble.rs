//! Reassembly of LiDAR frames from a lossy, possibly reordered packet stream.
//!
//! Frames are keyed by `frame_id`. A frame is emitted once every sequence
//! number `0..packets_in_frame` has arrived, and frames leave the assembler
//! in increasing `frame_id` order. An incomplete frame is dropped when it
//! falls more than `frame_timeout_ns` behind the newest packet timestamp, or
//! when more than `reorder_window` frames are pending and it is the oldest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::packet::LidarPacket;
use crate::cloud::{CloudPoint, PointCloudFrame};
use crate::geometry::Point3D;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedFrame {
    pub frame_id: u32,
    pub received: u16,
    pub expected: u16,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblyStats {
    pub frames_emitted: u64,
    pub frames_dropped: u64,
    pub duplicate_packets: u64,
    /// Packets for frames already emitted or dropped.
    pub late_packets: u64,
    /// Packets whose `packets_in_frame` disagrees with earlier packets of the
    /// same frame.
    pub inconsistent_packets: u64,
    pub dropped: Vec<DroppedFrame>,
}

#[derive(Debug)]
struct Partial {
    expected: u16,
    first_ts: u64,
    parts: BTreeMap<u16, LidarPacket>,
}

impl Partial {
    fn is_complete(&self) -> bool {
        self.parts.len() == self.expected as usize
    }

    fn into_frame(self) -> PointCloudFrame {
        let points = self
            .parts
            .into_values()
            .flat_map(|p| p.payload)
            .map(|p| CloudPoint::new(Point3D::new(p.x as f64, p.y as f64, p.z as f64), p.intensity))
            .collect();
        PointCloudFrame::new(self.first_ts, points)
    }
}

#[derive(Debug)]
pub struct FrameAssembler {
    reorder_window: usize,
    frame_timeout_ns: u64,
    pending: BTreeMap<u32, Partial>,
    /// Highest frame id already emitted or dropped.
    floor: Option<u32>,
    newest_ts: u64,
    stats: AssemblyStats,
}

impl FrameAssembler {
    /// `reorder_window` is clamped to at least one pending frame.
    pub fn new(reorder_window: usize, frame_timeout_ns: u64) -> Self {
        Self {
            reorder_window: reorder_window.max(1),
            frame_timeout_ns,
            pending: BTreeMap::new(),
            floor: None,
            newest_ts: 0,
            stats: AssemblyStats::default(),
        }
    }

    pub fn stats(&self) -> &AssemblyStats {
        &self.stats
    }

    pub fn pending_frames(&self) -> usize {
        self.pending.len()
    }

    /// Feeds one packet and returns any frames that became ready.
    pub fn push(&mut self, packet: LidarPacket) -> Vec<PointCloudFrame> {
        self.newest_ts = self.newest_ts.max(packet.timestamp_ns);
        let id = packet.frame_id;
        if let Some(partial) = self.pending.get_mut(&id) {
            if partial.expected != packet.packets_in_frame {
                self.stats.inconsistent_packets += 1;
            } else if partial.parts.contains_key(&packet.packet_seq) {
                self.stats.duplicate_packets += 1;
            } else {
                partial.first_ts = partial.first_ts.min(packet.timestamp_ns);
                partial.parts.insert(packet.packet_seq, packet);
            }
        } else if self.floor.is_some_and(|f| id <= f) {
            self.stats.late_packets += 1;
        } else if packet.packet_seq < packet.packets_in_frame {
            let mut parts = BTreeMap::new();
            let (expected, first_ts) = (packet.packets_in_frame, packet.timestamp_ns);
            parts.insert(packet.packet_seq, packet);
            self.pending.insert(id, Partial { expected, first_ts, parts });
        } else {
            self.stats.inconsistent_packets += 1;
        }
        self.release()
    }

    /// Emits remaining complete frames and drops the rest.
    pub fn finish(&mut self) -> Vec<PointCloudFrame> {
        let mut out = Vec::new();
        while let Some((id, partial)) = self.pending.pop_first() {
            self.retire(id, partial, &mut out);
        }
        out
    }

    fn retire(&mut self, id: u32, partial: Partial, out: &mut Vec<PointCloudFrame>) {
        self.floor = Some(self.floor.map_or(id, |f| f.max(id)));
        if partial.is_complete() {
            self.stats.frames_emitted += 1;
            out.push(partial.into_frame());
        } else {
            self.drop_frame(id, &partial);
        }
    }

    fn drop_frame(&mut self, id: u32, partial: &Partial) {
        self.stats.frames_dropped += 1;
        self.stats.dropped.push(DroppedFrame { frame_id: id, received: partial.parts.len() as u16, expected: partial.expected });
    }

    fn release(&mut self) -> Vec<PointCloudFrame> {
        let mut out = Vec::new();

        let newest = self.newest_ts;
        let timeout = self.frame_timeout_ns;
        let stale: Vec<u32> = self
            .pending
            .iter()
            .filter(|(_, p)| !p.is_complete() && newest.saturating_sub(p.first_ts) > timeout)
            .map(|(id, _)| *id)
            .collect();
        for id in stale {
            let partial = self.pending.remove(&id).expect("listed above");
            self.floor = Some(self.floor.map_or(id, |f| f.max(id)));
            self.drop_frame(id, &partial);
        }

        while self.pending.len() > self.reorder_window {
            let (id, partial) = self.pending.pop_first().expect("non-empty");
            self.retire(id, partial, &mut out);
        }

        while self.pending.first_key_value().is_some_and(|(_, p)| p.is_complete()) {
            let (id, partial) = self.pending.pop_first().expect("non-empty");
            self.retire(id, partial, &mut out);
        }
        out
    }
}

/// Runs a whole packet stream through a [`FrameAssembler`].
pub fn assemble_frames(
    packets: impl IntoIterator<Item = LidarPacket>,
    reorder_window: usize,
    frame_timeout_ns: u64,
) -> (Vec<PointCloudFrame>, AssemblyStats) {
    let mut asm = FrameAssembler::new(reorder_window, frame_timeout_ns);
    let mut frames = Vec::new();
    for p in packets {
        frames.extend(asm.push(p));
    }
    frames.extend(asm.finish());
    (frames, asm.stats.clone())
}

/// Splits a frame into `packets` datagrams of near-equal size, all stamped
/// with the frame timestamp plus `spacing_ns` per packet.
pub fn packetize(frame_id: u32, frame: &PointCloudFrame, packets: u16, spacing_ns: u64) -> Vec<LidarPacket> {
    let packets = packets.max(1) as usize;
    let per = frame.points.len().div_ceil(packets).max(1);
    frame
        .points
        .chunks(per)
        .enumerate()
        .map(|(seq, chunk)| LidarPacket {
            frame_id,
            packet_seq: seq as u16,
            packets_in_frame: frame.points.len().div_ceil(per).max(1) as u16,
            timestamp_ns: frame.timestamp_ns + seq as u64 * spacing_ns,
            payload: chunk
                .iter()
                .map(|p| super::packet::PacketPoint {
                    x: p.position.x as f32,
                    y: p.position.y as f32,
                    z: p.position.z as f32,
                    intensity: p.intensity,
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::packet::PacketPoint;

    const MS: u64 = 1_000_000;

    fn packet(frame_id: u32, seq: u16, count: u16, ts: u64) -> LidarPacket {
        LidarPacket {
            frame_id,
            packet_seq: seq,
            packets_in_frame: count,
            timestamp_ns: ts,
            payload: vec![PacketPoint { x: seq as f32, y: frame_id as f32, z: 1.0, intensity: seq as u8 }],
        }
    }

    fn frame_of(frame_id: u32, ts: u64) -> Vec<LidarPacket> {
        (0..4).map(|s| packet(frame_id, s, 4, ts + s as u64 * MS)).collect()
    }

    #[test]
    fn in_order_frame() {
        let (frames, stats) = assemble_frames(frame_of(7, 1000), 4, 50 * MS);
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].timestamp_ns, 1000);
        let xs: Vec<f64> = frames[0].points.iter().map(|p| p.position.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(stats.frames_emitted, 1);
    }

    #[test]
    fn duplicates_are_ignored() {
        let mut pkts = frame_of(7, 1000);
        pkts.insert(3, pkts[2].clone());
        let (frames, stats) = assemble_frames(pkts, 4, 50 * MS);
        assert_eq!(frames, assemble_frames(frame_of(7, 1000), 4, 50 * MS).0);
        assert_eq!(stats.duplicate_packets, 1);
    }

    #[test]
    fn reordered_packets_concatenate_in_sequence_order() {
        let mut pkts = frame_of(1, 0);
        pkts.reverse();
        let (frames, _) = assemble_frames(pkts, 4, 50 * MS);
        let xs: Vec<f64> = frames[0].points.iter().map(|p| p.position.x).collect();
        assert_eq!(xs, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(frames[0].timestamp_ns, 0);
    }

    #[test]
    fn stale_incomplete_frame_is_dropped() {
        // frame A loses seq 2; B and C arrive 100 ms and 200 ms later
        let mut trace: Vec<LidarPacket> = frame_of(1, 0).into_iter().filter(|p| p.packet_seq != 2).collect();
        trace.extend(frame_of(2, 100 * MS));
        trace.extend(frame_of(3, 200 * MS));
        let mut asm = FrameAssembler::new(8, 50 * MS);
        let mut emitted = Vec::new();
        for p in trace {
            emitted.extend(asm.push(p));
        }
        emitted.extend(asm.finish());
        let ids: Vec<f64> = emitted.iter().map(|f| f.points[0].position.y).collect();
        assert_eq!(ids, vec![2.0, 3.0]);
        assert_eq!(asm.stats().frames_dropped, 1);
        assert_eq!(asm.stats().dropped, vec![DroppedFrame { frame_id: 1, received: 3, expected: 4 }]);
    }

    #[test]
    fn complete_frames_wait_behind_older_incomplete_ones() {
        let mut asm = FrameAssembler::new(8, 500 * MS);
        for p in frame_of(1, 0).into_iter().take(3) {
            assert!(asm.push(p).is_empty());
        }
        for p in frame_of(2, 100 * MS) {
            assert!(asm.push(p).is_empty());
        }
        // the missing packet of frame 1 arrives late but within the timeout
        let out = asm.push(packet(1, 3, 4, 3 * MS));
        assert_eq!(out.iter().map(|f| f.points[0].position.y).collect::<Vec<_>>(), vec![1.0, 2.0]);
        // anything for frame 1 now is late
        assert!(asm.push(packet(1, 0, 4, 0)).is_empty());
        assert_eq!(asm.stats().late_packets, 1);
    }

    #[test]
    fn reorder_window_bounds_pending_frames() {
        let mut asm = FrameAssembler::new(2, u64::MAX);
        let mut out = Vec::new();
        for id in 1..=5 {
            out.extend(asm.push(packet(id, 0, 2, id as u64)));
        }
        assert!(out.is_empty());
        assert_eq!(asm.pending_frames(), 2);
        assert_eq!(asm.stats().frames_dropped, 3);
    }

    #[test]
    fn inconsistent_packet_counts() {
        let mut asm = FrameAssembler::new(4, u64::MAX);
        asm.push(packet(1, 0, 4, 0));
        asm.push(packet(1, 1, 3, 0));
        assert_eq!(asm.stats().inconsistent_packets, 1);
    }

    #[test]
    fn conservation_without_loss() {
        let frame = PointCloudFrame::from_positions(10, (0..1500).map(|i| Point3D::new(i as f64, 0.5, -0.25)));
        let mut pkts = Vec::new();
        for id in 0..5u32 {
            let mut f = frame.clone();
            f.timestamp_ns = 100 * MS * id as u64;
            pkts.extend(packetize(id, &f, 12, 10_000));
        }
        let total_in: usize = pkts.iter().map(|p| p.payload.len()).sum();
        let (frames, stats) = assemble_frames(pkts, 4, 50 * MS);
        assert_eq!(frames.len(), 5);
        assert_eq!(frames.iter().map(|f| f.len()).sum::<usize>(), total_in);
        assert_eq!(frames[0].points, frame.points);
        assert_eq!(stats.frames_dropped, 0);
    }
}
