//! The worker side: load the corpus, dial the master, answer tasks until
//! shutdown. Stateless between tasks except the read-only corpus and the
//! cached reference leaves.

use std::fmt;
use std::io;
use std::net::TcpStream;
use std::path::{Path, PathBuf};

use super::wire::{read_frame, write_frame, FrameError, WireMessage, PROTOCOL_VERSION};
use crate::cluster::pool::{execute_task, EvalMode};
use crate::fitness::ReferenceLeaves;
use crate::problems::{load_corpus, CorpusError};
use crate::solver::Solver;

#[derive(Debug)]
pub enum WorkerError {
    Corpus(CorpusError),
    Connect(io::Error),
    /// The master rejected the handshake (version or corpus mismatch).
    Rejected(String),
    Protocol(String),
}

impl fmt::Display for WorkerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkerError::Corpus(e) => write!(f, "corpus: {e}"),
            WorkerError::Connect(e) => write!(f, "connect: {e}"),
            WorkerError::Rejected(msg) => write!(f, "handshake rejected: {msg}"),
            WorkerError::Protocol(msg) => write!(f, "protocol: {msg}"),
        }
    }
}

impl std::error::Error for WorkerError {}

/// Where a corpus caches its reference leaf counts.
pub(crate) fn reference_cache_path(corpus_path: &Path) -> PathBuf {
    let mut name = corpus_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    name.push_str(".refleaves");
    corpus_path.with_file_name(name)
}

/// Connect to the master and serve evaluation tasks until a shutdown frame
/// arrives.
pub fn worker_loop(connect: &str, corpus_path: &Path) -> Result<(), WorkerError> {
    let corpus = load_corpus(corpus_path).map_err(WorkerError::Corpus)?;
    let stream = TcpStream::connect(connect).map_err(WorkerError::Connect)?;
    let mut reader = stream.try_clone().map_err(WorkerError::Connect)?;
    let mut writer = stream;

    write_frame(
        &mut writer,
        &WireMessage::Hello {
            protocol: PROTOCOL_VERSION,
            corpus_hash: format!("{:016x}", corpus.corpus_hash),
            worker_id: format!("w{}", std::process::id()),
        },
    )
    .map_err(WorkerError::Connect)?;
    match read_frame(&mut reader) {
        Ok(WireMessage::HelloAck { ok: true, .. }) => {}
        Ok(WireMessage::HelloAck { error, .. }) => {
            return Err(WorkerError::Rejected(
                error.unwrap_or_else(|| "no reason given".into()),
            ))
        }
        Ok(other) => return Err(WorkerError::Protocol(format!("expected ack, got {other:?}"))),
        Err(e) => return Err(WorkerError::Protocol(e.to_string())),
    }

    let cache_path = reference_cache_path(corpus_path);
    let mut solver = Solver::new();
    let mut reference: Option<ReferenceLeaves> = None;
    loop {
        match read_frame(&mut reader) {
            Ok(WireMessage::Task(task)) => {
                let needs_reference = matches!(
                    EvalMode::from_wire(task.fitness_mode),
                    Some(EvalMode::Dynamic(v)) if v.needs_reference()
                );
                if needs_reference {
                    let stale = reference
                        .as_ref()
                        .map(|r| !r.matches(corpus.corpus_hash, task.limits))
                        .unwrap_or(true);
                    if stale {
                        reference = Some(ReferenceLeaves::load_or_compute(
                            &cache_path,
                            &corpus.problems,
                            corpus.corpus_hash,
                            task.limits,
                        ));
                    }
                }
                let mut result = execute_task(&task, &corpus, reference.as_ref(), &mut solver);
                result.worker_id = format!("w{}", std::process::id());
                write_frame(&mut writer, &WireMessage::Result(result))
                    .map_err(|e| WorkerError::Protocol(e.to_string()))?;
            }
            Ok(WireMessage::Heartbeat) => {
                write_frame(&mut writer, &WireMessage::Heartbeat)
                    .map_err(|e| WorkerError::Protocol(e.to_string()))?;
            }
            Ok(WireMessage::Shutdown) => return Ok(()),
            Ok(other) => {
                return Err(WorkerError::Protocol(format!(
                    "unexpected message {other:?}"
                )))
            }
            Err(FrameError::Io(e)) => {
                return Err(WorkerError::Protocol(format!("connection lost: {e}")))
            }
            Err(e) => return Err(WorkerError::Protocol(e.to_string())),
        }
    }
}
