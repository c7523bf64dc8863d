//! Worker pools. The in-process pool runs tasks on local threads and needs
//! no network; the socket pool drives remote workers over the wire protocol.
//! Both produce results that are bit-identical to sequential evaluation.

use std::collections::{HashMap, VecDeque};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use super::wire::{
    read_frame, write_frame, EvalResult, EvalTask, ResultStatus, WireMessage,
    PROTOCOL_VERSION,
};
use super::ClusterError;
use crate::fitness::{
    dynamic_fitness, static_fitness, FitnessReport, FitnessVariant, ReferenceLeaves,
};
use crate::ga::{ChildEvaluator, Chromosome, GaError, WeightKind};
use crate::heuristics::{DynamicWeights, StaticWeights};
use crate::problems::Corpus;
use crate::solver::{SearchLimits, Solver};

/// What a task evaluates: root-move ranking or a full solve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EvalMode {
    StaticRank,
    Dynamic(FitnessVariant),
}

impl EvalMode {
    pub fn to_wire(self) -> u8 {
        match self {
            EvalMode::StaticRank => 0,
            EvalMode::Dynamic(v) => v.number(),
        }
    }

    pub fn from_wire(mode: u8) -> Option<EvalMode> {
        if mode == 0 {
            Some(EvalMode::StaticRank)
        } else {
            FitnessVariant::from_number(mode).map(EvalMode::Dynamic)
        }
    }
}

/// Everything a batch of tasks shares.
#[derive(Clone, Debug)]
pub struct EvalSpec {
    pub weight_kind: WeightKind,
    /// The currently-not-optimized weight set, at its original values.
    pub fixed_other: Vec<i64>,
    pub mode: EvalMode,
    pub limits: SearchLimits,
    pub corpus_hash: u64,
}

pub trait WorkerPool {
    fn evaluate(&mut self, tasks: Vec<EvalTask>) -> Result<Vec<EvalResult>, ClusterError>;
    fn worker_count(&self) -> usize;
}

/// Evaluate every child exactly once and return results in child order.
///
/// Worker provenance is scrubbed from the returned list so the output is
/// byte-identical for any pool shape and interleaving.
pub fn evaluate_children(
    children: &[Chromosome],
    spec: &EvalSpec,
    pool: &mut dyn WorkerPool,
) -> Result<Vec<EvalResult>, ClusterError> {
    let tasks: Vec<EvalTask> = children
        .iter()
        .enumerate()
        .map(|(i, child)| EvalTask {
            task_id: i as u64,
            child_index: i as u32,
            weight_kind: spec.weight_kind,
            alleles: child.alleles.clone(),
            fixed_other: spec.fixed_other.clone(),
            fitness_mode: spec.mode.to_wire(),
            limits: spec.limits,
            corpus_hash: format!("{:016x}", spec.corpus_hash),
        })
        .collect();
    let mut results = pool.evaluate(tasks)?;
    results.sort_by_key(|r| r.child_index);
    if results.len() != children.len()
        || results
            .iter()
            .enumerate()
            .any(|(i, r)| r.child_index as usize != i)
    {
        return Err(ClusterError::Evaluation(
            "pool returned an incomplete result set".into(),
        ));
    }
    for result in &mut results {
        result.worker_id = "-".into();
    }
    Ok(results)
}

/// Run one evaluation task against a loaded corpus.
pub fn execute_task(
    task: &EvalTask,
    corpus: &Corpus,
    reference: Option<&ReferenceLeaves>,
    solver: &mut Solver,
) -> EvalResult {
    let mut result = EvalResult {
        task_id: task.task_id,
        child_index: task.child_index,
        raw_fitness: 0.0,
        per_problem: Vec::new(),
        worker_id: String::new(),
        status: ResultStatus::Ok,
    };
    let expected_hash = format!("{:016x}", corpus.corpus_hash);
    if task.corpus_hash != expected_hash {
        result.status = ResultStatus::Error(format!(
            "task built against corpus {}, worker has {expected_hash}",
            task.corpus_hash
        ));
        return result;
    }
    match run_fitness(task, corpus, reference, solver) {
        Ok(report) => {
            result.raw_fitness = report.raw;
            result.per_problem = report.per_problem;
        }
        Err(msg) => result.status = ResultStatus::Error(msg),
    }
    result
}

fn run_fitness(
    task: &EvalTask,
    corpus: &Corpus,
    reference: Option<&ReferenceLeaves>,
    solver: &mut Solver,
) -> Result<FitnessReport, String> {
    let (sw, dw) = match task.weight_kind {
        WeightKind::Static => (
            StaticWeights::from_alleles(&task.alleles).map_err(|e| e.to_string())?,
            DynamicWeights::from_alleles(&task.fixed_other).map_err(|e| e.to_string())?,
        ),
        WeightKind::Dynamic => (
            StaticWeights::from_alleles(&task.fixed_other).map_err(|e| e.to_string())?,
            DynamicWeights::from_alleles(&task.alleles).map_err(|e| e.to_string())?,
        ),
    };
    let mode = EvalMode::from_wire(task.fitness_mode)
        .ok_or_else(|| format!("unknown fitness mode {}", task.fitness_mode))?;
    match mode {
        EvalMode::StaticRank => {
            static_fitness(task.task_id, &sw, &corpus.problems, &dw).map_err(|e| e.to_string())
        }
        EvalMode::Dynamic(variant) => dynamic_fitness(
            task.task_id,
            solver,
            &sw,
            &dw,
            &corpus.problems,
            variant,
            reference,
            task.limits,
        )
        .map_err(|e| e.to_string()),
    }
}

/// Local pool: the corpus is shared read-only and each thread owns a solver.
pub struct InProcessPool {
    corpus: Arc<Corpus>,
    threads: usize,
    references: HashMap<(u64, u32), Arc<ReferenceLeaves>>,
}

impl InProcessPool {
    pub fn new(corpus: Arc<Corpus>, threads: usize) -> InProcessPool {
        InProcessPool {
            corpus,
            threads: threads.max(1),
            references: HashMap::new(),
        }
    }

    fn reference_for(&mut self, limits: SearchLimits) -> Arc<ReferenceLeaves> {
        let key = (limits.node_budget, limits.max_depth);
        if let Some(reference) = self.references.get(&key) {
            return Arc::clone(reference);
        }
        let reference = Arc::new(ReferenceLeaves::compute(
            &self.corpus.problems,
            self.corpus.corpus_hash,
            limits,
        ));
        self.references.insert(key, Arc::clone(&reference));
        reference
    }
}

impl WorkerPool for InProcessPool {
    fn evaluate(&mut self, tasks: Vec<EvalTask>) -> Result<Vec<EvalResult>, ClusterError> {
        // Reference leaves are computed once, before the batch fans out.
        let mut references: HashMap<(u64, u32), Arc<ReferenceLeaves>> = HashMap::new();
        for task in &tasks {
            if matches!(EvalMode::from_wire(task.fitness_mode), Some(EvalMode::Dynamic(v)) if v.needs_reference())
            {
                let key = (task.limits.node_budget, task.limits.max_depth);
                if !references.contains_key(&key) {
                    references.insert(key, self.reference_for(task.limits));
                }
            }
        }

        let workers = self.threads.min(tasks.len()).max(1);
        let slots: Mutex<Vec<Option<EvalResult>>> = Mutex::new(vec![None; tasks.len()]);
        let cursor = AtomicUsize::new(0);
        let corpus = &self.corpus;
        let tasks = &tasks;
        let references = &references;
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| {
                    let mut solver = Solver::new();
                    loop {
                        let i = cursor.fetch_add(1, Ordering::Relaxed);
                        if i >= tasks.len() {
                            break;
                        }
                        let task = &tasks[i];
                        let key = (task.limits.node_budget, task.limits.max_depth);
                        let reference = references.get(&key).map(Arc::as_ref);
                        let mut result = execute_task(task, corpus, reference, &mut solver);
                        result.worker_id = "local".into();
                        slots.lock().expect("no poisoned locks")[i] = Some(result);
                    }
                });
            }
        });
        Ok(slots
            .into_inner()
            .expect("no poisoned locks")
            .into_iter()
            .map(|slot| slot.expect("every task was executed"))
            .collect())
    }

    fn worker_count(&self) -> usize {
        self.threads
    }
}

enum WorkerEvent {
    Finished {
        worker: usize,
        result: Box<EvalResult>,
    },
    Died {
        worker: usize,
        reason: String,
        in_flight: Option<Box<EvalTask>>,
    },
}

struct RemoteWorker {
    id: String,
    sender: mpsc::Sender<IoCommand>,
    alive: bool,
    handle: Option<JoinHandle<()>>,
}

enum IoCommand {
    Run(Box<EvalTask>),
    Shutdown,
}

/// Pool of remote workers connected over TCP. The master binds, workers dial
/// in and handshake; each live connection is owned by one io thread that
/// funnels results into the pool's event channel.
pub struct SocketPool {
    workers: Vec<RemoteWorker>,
    events: mpsc::Receiver<WorkerEvent>,
    /// Workers dropped so far, with reasons; kept for diagnostics.
    failures: Vec<(String, String)>,
}

/// A bound listener whose port is known but whose workers have not yet
/// attached.
pub struct PendingPool {
    listener: TcpListener,
}

impl PendingPool {
    pub fn bind(addr: &str) -> std::io::Result<PendingPool> {
        Ok(PendingPool {
            listener: TcpListener::bind(addr)?,
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accept handshakes until `expected_workers` workers are attached.
    pub fn accept_workers(
        self,
        expected_workers: usize,
        corpus_hash: u64,
    ) -> Result<SocketPool, ClusterError> {
        assert!(expected_workers >= 1, "need at least one worker");
        let expected_hash = format!("{corpus_hash:016x}");
        let (event_tx, events) = mpsc::channel();
        let mut workers = Vec::with_capacity(expected_workers);
        while workers.len() < expected_workers {
            let (stream, _) = self.listener.accept()?;
            match handshake(&stream, &expected_hash) {
                Ok(worker_id) => {
                    let (sender, commands) = mpsc::channel();
                    let handle = spawn_io_thread(workers.len(), stream, commands, event_tx.clone());
                    workers.push(RemoteWorker {
                        id: worker_id,
                        sender,
                        alive: true,
                        handle: Some(handle),
                    });
                }
                Err(error) => return Err(error),
            }
        }
        Ok(SocketPool {
            workers,
            events,
            failures: Vec::new(),
        })
    }
}

impl SocketPool {
    /// Bind `addr` and accept handshakes until `expected_workers` workers
    /// are attached.
    pub fn bind(
        addr: &str,
        expected_workers: usize,
        corpus_hash: u64,
    ) -> Result<(SocketPool, SocketAddr), ClusterError> {
        let pending = PendingPool::bind(addr)?;
        let local = pending.local_addr()?;
        let pool = pending.accept_workers(expected_workers, corpus_hash)?;
        Ok((pool, local))
    }

    pub fn failed_workers(&self) -> &[(String, String)] {
        &self.failures
    }

    pub fn shutdown(mut self) {
        self.shutdown_workers();
    }

    fn shutdown_workers(&mut self) {
        for worker in &mut self.workers {
            if worker.alive {
                let _ = worker.sender.send(IoCommand::Shutdown);
            }
            if let Some(handle) = worker.handle.take() {
                let _ = handle.join();
            }
        }
    }

    fn alive_count(&self) -> usize {
        self.workers.iter().filter(|w| w.alive).count()
    }
}

impl Drop for SocketPool {
    fn drop(&mut self) {
        self.shutdown_workers();
    }
}

fn handshake(stream: &TcpStream, expected_hash: &str) -> Result<String, ClusterError> {
    let mut reader = stream.try_clone().map_err(ClusterError::Io)?;
    let hello = read_frame(&mut reader).map_err(|e| ClusterError::Protocol {
        worker: "unknown".into(),
        msg: e.to_string(),
    })?;
    let WireMessage::Hello {
        protocol,
        corpus_hash,
        worker_id,
    } = hello
    else {
        return Err(ClusterError::Protocol {
            worker: "unknown".into(),
            msg: "expected hello".into(),
        });
    };
    let mut writer = stream.try_clone().map_err(ClusterError::Io)?;
    let mut reject = |msg: String| {
        let _ = write_frame(
            &mut writer,
            &WireMessage::HelloAck {
                ok: false,
                error: Some(msg),
                protocol: PROTOCOL_VERSION,
            },
        );
    };
    if protocol != PROTOCOL_VERSION {
        reject(format!(
            "protocol {protocol} not supported, need {PROTOCOL_VERSION}"
        ));
        return Err(ClusterError::Protocol {
            worker: worker_id,
            msg: format!("protocol version {protocol}"),
        });
    }
    if corpus_hash != expected_hash {
        reject(format!("corpus {corpus_hash}, master has {expected_hash}"));
        return Err(ClusterError::CorpusMismatch { worker: worker_id });
    }
    write_frame(
        &mut writer,
        &WireMessage::HelloAck {
            ok: true,
            error: None,
            protocol: PROTOCOL_VERSION,
        },
    )
    .map_err(ClusterError::Io)?;
    Ok(worker_id)
}

fn spawn_io_thread(
    index: usize,
    stream: TcpStream,
    commands: mpsc::Receiver<IoCommand>,
    events: mpsc::Sender<WorkerEvent>,
) -> JoinHandle<()> {
    std::thread::spawn(move || {
        let mut reader = match stream.try_clone() {
            Ok(reader) => reader,
            Err(e) => {
                let _ = events.send(WorkerEvent::Died {
                    worker: index,
                    reason: e.to_string(),
                    in_flight: None,
                });
                return;
            }
        };
        let mut writer = stream;
        while let Ok(command) = commands.recv() {
            let task = match command {
                IoCommand::Shutdown => {
                    let _ = write_frame(&mut writer, &WireMessage::Shutdown);
                    return;
                }
                IoCommand::Run(task) => task,
            };
            if let Err(e) = write_frame(&mut writer, &WireMessage::Task((*task).clone())) {
                let _ = events.send(WorkerEvent::Died {
                    worker: index,
                    reason: e.to_string(),
                    in_flight: Some(task),
                });
                return;
            }
            loop {
                match read_frame(&mut reader) {
                    Ok(WireMessage::Result(result)) => {
                        let _ = events.send(WorkerEvent::Finished {
                            worker: index,
                            result: Box::new(result),
                        });
                        break;
                    }
                    Ok(WireMessage::Heartbeat) => continue,
                    Ok(other) => {
                        let _ = events.send(WorkerEvent::Died {
                            worker: index,
                            reason: format!("unexpected message {other:?}"),
                            in_flight: Some(task),
                        });
                        return;
                    }
                    Err(e) => {
                        let _ = events.send(WorkerEvent::Died {
                            worker: index,
                            reason: e.to_string(),
                            in_flight: Some(task),
                        });
                        return;
                    }
                }
            }
        }
    })
}

/// Reassignment attempts per task before giving up.
const MAX_REASSIGNMENTS: u32 = 2;

impl WorkerPool for SocketPool {
    fn evaluate(&mut self, tasks: Vec<EvalTask>) -> Result<Vec<EvalResult>, ClusterError> {
        let total = tasks.len();
        let mut pending: VecDeque<EvalTask> = tasks.into();
        let mut attempts: HashMap<u64, u32> = HashMap::new();
        let mut results: HashMap<u64, EvalResult> = HashMap::new();
        let mut busy: Vec<bool> = vec![false; self.workers.len()];

        while results.len() < total {
            // Hand pending tasks to idle live workers.
            while let Some(task) = pending.pop_front() {
                let Some(slot) = self
                    .workers
                    .iter()
                    .enumerate()
                    .position(|(i, w)| w.alive && !busy[i])
                else {
                    pending.push_front(task);
                    break;
                };
                if self.workers[slot]
                    .sender
                    .send(IoCommand::Run(Box::new(task.clone())))
                    .is_err()
                {
                    self.workers[slot].alive = false;
                    pending.push_front(task);
                    continue;
                }
                busy[slot] = true;
            }
            if self.alive_count() == 0 {
                return Err(ClusterError::AllWorkersLost);
            }
            match self.events.recv() {
                Ok(WorkerEvent::Finished { worker, result }) => {
                    busy[worker] = false;
                    // Deduplicate by task id in case a presumed-dead worker
                    // answered after reassignment.
                    results.entry(result.task_id).or_insert(*result);
                }
                Ok(WorkerEvent::Died {
                    worker,
                    reason,
                    in_flight,
                }) => {
                    self.workers[worker].alive = false;
                    busy[worker] = false;
                    self.failures
                        .push((self.workers[worker].id.clone(), reason));
                    if let Some(task) = in_flight {
                        let tries = attempts.entry(task.task_id).or_insert(0);
                        *tries += 1;
                        if *tries > MAX_REASSIGNMENTS {
                            return Err(ClusterError::AllWorkersLost);
                        }
                        pending.push_front(*task);
                    }
                }
                Err(_) => return Err(ClusterError::AllWorkersLost),
            }
        }
        let mut out: Vec<EvalResult> = results.into_values().collect();
        out.sort_by_key(|r| r.child_index);
        Ok(out)
    }

    fn worker_count(&self) -> usize {
        self.workers.len()
    }
}

/// Adapter that lets the GA evaluate children through any pool.
pub struct PoolEvaluator<'a> {
    pub spec: EvalSpec,
    pub pool: &'a mut dyn WorkerPool,
}

impl ChildEvaluator for PoolEvaluator<'_> {
    fn evaluate(&mut self, children: &[Chromosome]) -> Result<Vec<FitnessReport>, GaError> {
        let results = evaluate_children(children, &self.spec, self.pool)
            .map_err(|e| GaError::EvaluatorFailure(e.to_string()))?;
        results
            .into_iter()
            .map(|result| match result.status {
                ResultStatus::Ok => Ok(FitnessReport {
                    chromosome_id: 0, // reassigned by the GA
                    raw: result.raw_fitness,
                    normalized: None,
                    per_problem: result.per_problem,
                }),
                ResultStatus::Error(msg) => Err(GaError::EvaluatorFailure(msg)),
            })
            .collect()
    }
}
