//! Recording pipeline: many producers, one bounded queue, one bag writer.
//!
//! Producers block when the queue is full, so nothing is dropped under
//! back-pressure. [`Recorder::shutdown`] drains whatever is queued before the
//! file is flushed.

use std::io::Write;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TrySendError};
use std::thread::JoinHandle;

use super::bag::{BagError, BagRecord, BagWriter, Topic};

enum Msg {
    Record(BagRecord),
    Shutdown,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("recorder is closed")]
pub struct RecorderClosed;

/// Cloneable handle used by one sensor thread.
#[derive(Clone)]
pub struct Producer {
    tx: SyncSender<Msg>,
}

impl Producer {
    /// Blocks while the queue is full.
    pub fn send(&self, record: BagRecord) -> Result<(), RecorderClosed> {
        self.tx.send(Msg::Record(record)).map_err(|_| RecorderClosed)
    }

    /// Returns the record back when the queue is full.
    pub fn try_send(&self, record: BagRecord) -> Result<(), Result<BagRecord, RecorderClosed>> {
        match self.tx.try_send(Msg::Record(record)) {
            Ok(()) => Ok(()),
            Err(TrySendError::Full(Msg::Record(r))) => Err(Ok(r)),
            Err(_) => Err(Err(RecorderClosed)),
        }
    }
}

pub struct Recorder<W: Write + Send + 'static> {
    tx: SyncSender<Msg>,
    handle: JoinHandle<Result<(W, u64), BagError>>,
}

fn run<W: Write>(mut writer: BagWriter<W>, rx: Receiver<Msg>) -> Result<(W, u64), BagError> {
    // Ends on the shutdown message or when every sender is gone.
    while let Ok(msg) = rx.recv() {
        match msg {
            Msg::Record(r) => writer.write(&r)?,
            Msg::Shutdown => {
                while let Ok(Msg::Record(r)) = rx.try_recv() {
                    writer.write(&r)?;
                }
                break;
            }
        }
    }
    let n = writer.records_written();
    Ok((writer.finish()?, n))
}

impl<W: Write + Send + 'static> Recorder<W> {
    /// Writes the bag header and starts the writer thread.
    pub fn spawn(inner: W, topics: &[Topic], capacity: usize) -> Result<Self, BagError> {
        let writer = BagWriter::new(inner, topics)?;
        let (tx, rx) = sync_channel(capacity.max(1));
        let handle = std::thread::spawn(move || run(writer, rx));
        Ok(Self { tx, handle })
    }

    pub fn producer(&self) -> Producer {
        Producer { tx: self.tx.clone() }
    }

    /// Flushes the queue, closes the file and returns the writer and the
    /// number of records written.
    pub fn shutdown(self) -> Result<(W, u64), BagError> {
        // The writer may already have exited on an I/O error.
        let _ = self.tx.send(Msg::Shutdown);
        drop(self.tx);
        self.handle.join().expect("bag writer thread panicked")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bag::read_bag;

    #[test]
    fn producers_block_and_nothing_is_lost() {
        let topics: Vec<Topic> = (0..4).map(|i| Topic::new(i, format!("/s{i}"), "raw")).collect();
        let rec = Recorder::spawn(Vec::new(), &topics, 2).unwrap();
        let threads: Vec<_> = (0..4u16)
            .map(|id| {
                let p = rec.producer();
                std::thread::spawn(move || {
                    for k in 0..250u64 {
                        p.send(BagRecord::new(id, k, vec![id as u8; (k % 7) as usize])).unwrap();
                    }
                })
            })
            .collect();
        for t in threads {
            t.join().unwrap();
        }
        let (bytes, n) = rec.shutdown().unwrap();
        assert_eq!(n, 1000);
        let (_, records) = read_bag(&bytes).unwrap();
        assert_eq!(records.len(), 1000);
        for id in 0..4u16 {
            // per-producer order is preserved
            let ts: Vec<u64> = records.iter().filter(|r| r.topic_id == id).map(|r| r.timestamp_ns).collect();
            assert_eq!(ts, (0..250).collect::<Vec<_>>());
        }
    }

    #[test]
    fn shutdown_flushes_queued_records_and_closes_producers() {
        let rec = Recorder::spawn(Vec::new(), &[Topic::new(1, "/a", "raw")], 16).unwrap();
        let p = rec.producer();
        for k in 0..10 {
            p.send(BagRecord::new(1, k, vec![])).unwrap();
        }
        let (bytes, n) = rec.shutdown().unwrap();
        assert_eq!(n, 10);
        assert_eq!(read_bag(&bytes).unwrap().1.len(), 10);
        assert_eq!(p.send(BagRecord::new(1, 0, vec![])), Err(RecorderClosed));
    }

    #[test]
    fn writer_errors_surface_at_shutdown() {
        let rec = Recorder::spawn(Vec::new(), &[Topic::new(1, "/a", "raw")], 4).unwrap();
        rec.producer().send(BagRecord::new(2, 0, vec![])).unwrap();
        assert!(matches!(rec.shutdown(), Err(BagError::UnknownTopicId { topic_id: 2, .. })));
    }
}
