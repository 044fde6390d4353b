//! Multi-topic recording container.
//!
//! All integers little-endian.
//!
//! ```text
//! header:  "TBAG" | version u8 = 1 | topic_count u16
//!          topic_count × { topic_id u16 | name_len u8 | name | type_len u8 | type }
//! records: { topic_id u16 | timestamp_ns u64 | payload_len u32 | payload }*
//! ```
//!
//! Records follow the header until end of file, in write order.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

pub const MAGIC: &[u8; 4] = b"TBAG";
pub const VERSION: u8 = 1;
pub const RECORD_HEADER_LEN: usize = 2 + 8 + 4;

#[derive(Debug, thiserror::Error)]
pub enum BagError {
    #[error("not a bag file (bad magic)")]
    BadMagic,
    #[error("unsupported bag version {0}")]
    UnsupportedVersion(u8),
    #[error("header truncated at byte {offset}")]
    TruncatedHeader { offset: u64 },
    #[error("record starting at byte {offset} is truncated")]
    TruncatedRecord { offset: u64 },
    #[error("record at byte {offset} uses unregistered topic id {topic_id}")]
    UnknownTopicId { topic_id: u16, offset: u64 },
    #[error("topic id {0} registered twice")]
    DuplicateTopicId(u16),
    #[error("topic name or type longer than 255 bytes: `{0}`")]
    NameTooLong(String),
    #[error("topic name or type is not UTF-8 (header byte {offset})")]
    InvalidName { offset: u64 },
    #[error("payload of {0} bytes exceeds the u32 length field")]
    PayloadTooLarge(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub id: u16,
    pub name: String,
    pub type_name: String,
}

impl Topic {
    pub fn new(id: u16, name: impl Into<String>, type_name: impl Into<String>) -> Self {
        Self { id, name: name.into(), type_name: type_name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BagRecord {
    pub topic_id: u16,
    pub timestamp_ns: u64,
    pub payload: Vec<u8>,
}

impl BagRecord {
    pub fn new(topic_id: u16, timestamp_ns: u64, payload: Vec<u8>) -> Self {
        Self { topic_id, timestamp_ns, payload }
    }
}

pub struct BagWriter<W: Write> {
    inner: W,
    topics: BTreeMap<u16, Topic>,
    records: u64,
}

impl<W: Write> BagWriter<W> {
    /// Writes the header with every topic the file will use.
    pub fn new(mut inner: W, topics: &[Topic]) -> Result<Self, BagError> {
        let mut table = BTreeMap::new();
        for t in topics {
            for s in [&t.name, &t.type_name] {
                if s.len() > u8::MAX as usize {
                    return Err(BagError::NameTooLong(s.clone()));
                }
            }
            if table.insert(t.id, t.clone()).is_some() {
                return Err(BagError::DuplicateTopicId(t.id));
            }
        }
        let count = u16::try_from(topics.len()).map_err(|_| BagError::NameTooLong("too many topics".into()))?;
        let mut header = Vec::new();
        header.extend_from_slice(MAGIC);
        header.push(VERSION);
        header.extend_from_slice(&count.to_le_bytes());
        for t in topics {
            header.extend_from_slice(&t.id.to_le_bytes());
            header.push(t.name.len() as u8);
            header.extend_from_slice(t.name.as_bytes());
            header.push(t.type_name.len() as u8);
            header.extend_from_slice(t.type_name.as_bytes());
        }
        inner.write_all(&header)?;
        Ok(Self { inner, topics: table, records: 0 })
    }

    pub fn topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.values()
    }

    pub fn write(&mut self, record: &BagRecord) -> Result<(), BagError> {
        if !self.topics.contains_key(&record.topic_id) {
            return Err(BagError::UnknownTopicId { topic_id: record.topic_id, offset: 0 });
        }
        let len = u32::try_from(record.payload.len()).map_err(|_| BagError::PayloadTooLarge(record.payload.len()))?;
        let mut head = [0u8; RECORD_HEADER_LEN];
        head[0..2].copy_from_slice(&record.topic_id.to_le_bytes());
        head[2..10].copy_from_slice(&record.timestamp_ns.to_le_bytes());
        head[10..14].copy_from_slice(&len.to_le_bytes());
        self.inner.write_all(&head)?;
        self.inner.write_all(&record.payload)?;
        self.records += 1;
        Ok(())
    }

    pub fn records_written(&self) -> u64 {
        self.records
    }

    /// Flushes and returns the underlying writer.
    pub fn finish(mut self) -> Result<W, BagError> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Reads until `buf` is full or EOF; returns the byte count.
fn fill<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(n)
}

/// Streaming reader. Iterates records in file order; iteration ends after
/// the first error.
pub struct BagReader<R: Read> {
    inner: R,
    topics: BTreeMap<u16, Topic>,
    offset: u64,
    done: bool,
}

impl<R: Read> BagReader<R> {
    pub fn new(mut inner: R) -> Result<Self, BagError> {
        let mut offset = 0u64;
        let exact = |inner: &mut R, buf: &mut [u8], offset: &mut u64| -> Result<(), BagError> {
            let n = fill(inner, buf)?;
            *offset += n as u64;
            if n < buf.len() {
                return Err(BagError::TruncatedHeader { offset: *offset });
            }
            Ok(())
        };
        let mut magic = [0u8; 4];
        let n = fill(&mut inner, &mut magic)?;
        offset += n as u64;
        if n < 4 {
            return Err(if magic[..n] == MAGIC[..n] { BagError::TruncatedHeader { offset } } else { BagError::BadMagic });
        }
        if &magic != MAGIC {
            return Err(BagError::BadMagic);
        }
        let mut b1 = [0u8; 1];
        exact(&mut inner, &mut b1, &mut offset)?;
        if b1[0] != VERSION {
            return Err(BagError::UnsupportedVersion(b1[0]));
        }
        let mut b2 = [0u8; 2];
        exact(&mut inner, &mut b2, &mut offset)?;
        let count = u16::from_le_bytes(b2);
        let mut topics = BTreeMap::new();
        for _ in 0..count {
            exact(&mut inner, &mut b2, &mut offset)?;
            let id = u16::from_le_bytes(b2);
            let mut strings = Vec::with_capacity(2);
            for _ in 0..2 {
                exact(&mut inner, &mut b1, &mut offset)?;
                let mut s = vec![0u8; b1[0] as usize];
                let start = offset;
                exact(&mut inner, &mut s, &mut offset)?;
                strings.push(String::from_utf8(s).map_err(|_| BagError::InvalidName { offset: start })?);
            }
            let type_name = strings.pop().expect("two strings");
            let name = strings.pop().expect("two strings");
            if topics.insert(id, Topic { id, name, type_name }).is_some() {
                return Err(BagError::DuplicateTopicId(id));
            }
        }
        Ok(Self { inner, topics, offset, done: false })
    }

    pub fn topics(&self) -> impl Iterator<Item = &Topic> {
        self.topics.values()
    }

    pub fn topic(&self, id: u16) -> Option<&Topic> {
        self.topics.get(&id)
    }

    pub fn topic_by_name(&self, name: &str) -> Option<&Topic> {
        self.topics.values().find(|t| t.name == name)
    }

    /// Byte offset of the next record.
    pub fn offset(&self) -> u64 {
        self.offset
    }

    fn next_record(&mut self) -> Result<Option<BagRecord>, BagError> {
        let start = self.offset;
        let mut head = [0u8; RECORD_HEADER_LEN];
        let n = fill(&mut self.inner, &mut head)?;
        if n == 0 {
            return Ok(None);
        }
        if n < RECORD_HEADER_LEN {
            return Err(BagError::TruncatedRecord { offset: start });
        }
        let topic_id = u16::from_le_bytes([head[0], head[1]]);
        let timestamp_ns = u64::from_le_bytes(head[2..10].try_into().expect("8 bytes"));
        let len = u32::from_le_bytes(head[10..14].try_into().expect("4 bytes")) as usize;
        if !self.topics.contains_key(&topic_id) {
            return Err(BagError::UnknownTopicId { topic_id, offset: start });
        }
        let mut payload = Vec::new();
        let got = (&mut self.inner).take(len as u64).read_to_end(&mut payload)?;
        if got < len {
            return Err(BagError::TruncatedRecord { offset: start });
        }
        self.offset = start + (RECORD_HEADER_LEN + len) as u64;
        Ok(Some(BagRecord { topic_id, timestamp_ns, payload }))
    }
}

impl<R: Read> Iterator for BagReader<R> {
    type Item = Result<BagRecord, BagError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Serializes a whole bag into memory.
pub fn write_bag(topics: &[Topic], records: &[BagRecord]) -> Result<Vec<u8>, BagError> {
    let mut w = BagWriter::new(Vec::new(), topics)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Reads a whole bag, failing on the first bad record.
pub fn read_bag(bytes: &[u8]) -> Result<(Vec<Topic>, Vec<BagRecord>), BagError> {
    let reader = BagReader::new(bytes)?;
    let topics = reader.topics().cloned().collect();
    let records = reader.collect::<Result<Vec<_>, _>>()?;
    Ok((topics, records))
}
