//! Master/worker distribution of chromosome evaluation.
//!
//! One task is one chromosome evaluated over the full training set; there is
//! no parallelism inside a task. Results are reassembled in child order and
//! carry no scheduling artifacts, so any pool produces byte-identical output
//! to sequential local evaluation — the GA's seed determinism rests on this.

mod pool;
mod wire;
mod worker;

pub use pool::{
    evaluate_children, execute_task, EvalMode, EvalSpec, InProcessPool, PendingPool,
    PoolEvaluator, SocketPool, WorkerPool,
};
pub use wire::{
    read_frame, write_frame, EvalResult, EvalTask, FrameError, ResultStatus, WireMessage,
    MAX_FRAME_BYTES, PROTOCOL_VERSION,
};
pub use worker::{worker_loop, WorkerError};

use std::fmt;
use std::io;

#[derive(Debug)]
pub enum ClusterError {
    /// Every worker died before the batch completed.
    AllWorkersLost,
    /// A worker connected with a different corpus.
    CorpusMismatch { worker: String },
    /// A worker violated the wire protocol.
    Protocol { worker: String, msg: String },
    /// A worker reported an evaluation failure.
    Evaluation(String),
    Io(io::Error),
}

impl fmt::Display for ClusterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterError::AllWorkersLost => write!(f, "all workers lost"),
            ClusterError::CorpusMismatch { worker } => {
                write!(f, "worker {worker} loaded a different corpus")
            }
            ClusterError::Protocol { worker, msg } => {
                write!(f, "protocol error from worker {worker}: {msg}")
            }
            ClusterError::Evaluation(msg) => write!(f, "evaluation failed: {msg}"),
            ClusterError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for ClusterError {}

impl From<io::Error> for ClusterError {
    fn from(e: io::Error) -> ClusterError {
        ClusterError::Io(e)
    }
}
