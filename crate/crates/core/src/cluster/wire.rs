//! Wire protocol: 4-byte big-endian payload length, then the payload as
//! UTF-8 JSON encoding a single object with a `kind` field. Payloads above
//! 16 MiB are a protocol violation and drop the connection.

use std::fmt;
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};

use crate::ga::WeightKind;
use crate::solver::SearchLimits;

pub const PROTOCOL_VERSION: u32 = 1;
pub const MAX_FRAME_BYTES: u32 = 16 * 1024 * 1024;

/// A chromosome evaluation order for a worker.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct EvalTask {
    pub task_id: u64,
    pub child_index: u32,
    pub weight_kind: WeightKind,
    pub alleles: Vec<i64>,
    /// The currently-not-optimized weight set, held at its original values.
    pub fixed_other: Vec<i64>,
    /// 0 = static rank fitness; 1..=4 = dynamic fitness variants.
    pub fitness_mode: u8,
    pub limits: SearchLimits,
    /// Hex of the corpus hash the task was built against.
    pub corpus_hash: String,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct EvalResult {
    pub task_id: u64,
    pub child_index: u32,
    pub raw_fitness: f64,
    /// Full training set in corpus order when status is ok.
    pub per_problem: Vec<(String, u64)>,
    pub worker_id: String,
    pub status: ResultStatus,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStatus {
    Ok,
    Error(String),
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WireMessage {
    Hello {
        protocol: u32,
        corpus_hash: String,
        worker_id: String,
    },
    HelloAck {
        ok: bool,
        error: Option<String>,
        protocol: u32,
    },
    Task(EvalTask),
    Result(EvalResult),
    Shutdown,
    Heartbeat,
}

#[derive(Debug)]
pub enum FrameError {
    /// Declared payload length exceeds the 16 MiB cap.
    TooLarge(u32),
    Io(io::Error),
    Parse(String),
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::TooLarge(len) => write!(f, "frame of {len} bytes exceeds the cap"),
            FrameError::Io(e) => write!(f, "io error: {e}"),
            FrameError::Parse(msg) => write!(f, "bad payload: {msg}"),
        }
    }
}

impl std::error::Error for FrameError {}

pub fn write_frame(writer: &mut impl Write, msg: &WireMessage) -> io::Result<()> {
    let payload = serde_json::to_vec(msg).expect("wire messages always serialize");
    if payload.len() > MAX_FRAME_BYTES as usize {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "payload exceeds the frame cap",
        ));
    }
    writer.write_all(&(payload.len() as u32).to_be_bytes())?;
    writer.write_all(&payload)?;
    writer.flush()
}

pub fn read_frame(reader: &mut impl Read) -> Result<WireMessage, FrameError> {
    let mut len_buf = [0u8; 4];
    reader.read_exact(&mut len_buf).map_err(FrameError::Io)?;
    let len = u32::from_be_bytes(len_buf);
    if len > MAX_FRAME_BYTES {
        return Err(FrameError::TooLarge(len));
    }
    let mut payload = vec![0u8; len as usize];
    reader.read_exact(&mut payload).map_err(FrameError::Io)?;
    serde_json::from_slice(&payload).map_err(|e| FrameError::Parse(e.to_string()))
}
