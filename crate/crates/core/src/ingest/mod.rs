//! Sensor ingestion: NMEA GPS sentences, LiDAR datagrams, the `TBAG`
//! recording container and LiDAR-clocked time synchronization.

mod assemble;
mod bag;
mod messages;
mod nmea;
mod packet;
mod pipeline;
mod sync;

pub use assemble::{assemble_frames, packetize, AssemblyStats, DroppedFrame, FrameAssembler};
pub use bag::{read_bag, write_bag, BagError, BagReader, BagRecord, BagWriter, Topic, MAGIC, RECORD_HEADER_LEN, VERSION};
pub use messages::{
    decode_nmea, decode_point_cloud, encode_point_cloud, MessageError, TYPE_IMAGE_PNG, TYPE_NMEA, TYPE_POINT_CLOUD,
};
pub use nmea::{checksum, parse_nmea, with_checksum, FixQuality, GgaFix, NmeaError, NmeaSentence, RmcFix};
pub use packet::{read_packets, LidarPacket, PacketError, PacketPoint, HEADER_LEN as PACKET_HEADER_LEN, POINT_LEN};
pub use pipeline::{Producer, Recorder, RecorderClosed};
pub use sync::{nearest, synchronize, StreamMatch, SyncError, SyncResult, SyncedSample, TimedStream};
