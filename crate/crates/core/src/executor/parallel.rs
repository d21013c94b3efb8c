//! Worker-per-wire execution.
//!
//! Wires are split into contiguous runs, one run per worker. The worker
//! owning a comparator's low wire applies it. When the high wire lives on
//! another worker, its block travels to the executing worker and the upper
//! output travels back, each over a direct channel between the two workers.
//! There is no coordinator in the data path, and a worker starts a
//! comparator as soon as both operands are present, so stages pipeline.
//!
//! Blocks move by ownership and at most `width` of them exist at any time,
//! so every channel is bounded by `width` slots and a send never waits on a
//! full channel.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, SyncSender};
use std::thread;
use std::time::{Duration, Instant};

use super::{apply_comparator, check_shape, Application, BlockFrame, ExecError, RunMetrics, RunOptions};
use crate::comparators::{Block, BlockComparator, Key};
use crate::network::{Comparator, Network};

const POLL: Duration = Duration::from_millis(20);

struct Packet<K> {
    stage: usize,
    wire: usize,
    block: Block<K>,
}

enum Slot<K> {
    Held(Block<K>),
    /// Sent to the worker applying the current comparator.
    Away,
}

struct Wire<K> {
    index: usize,
    cursor: usize,
    slot: Slot<K>,
}

struct Output<K> {
    lanes: Vec<(usize, Block<K>)>,
    applied: Vec<Application>,
    peak_residency: usize,
}

enum Failure {
    Own(ExecError),
    /// Stopped because another worker failed.
    Aborted,
}

struct Worker<'a, K, C: ?Sized> {
    me: usize,
    workers: usize,
    width: usize,
    schedule: &'a [Vec<(usize, Comparator)>],
    ce: &'a C,
    options: &'a RunOptions,
    clock: Instant,
    abort: &'a AtomicBool,
    wires: Vec<Wire<K>>,
    local: Vec<Option<usize>>,
    inbox: Receiver<Packet<K>>,
    outboxes: Vec<SyncSender<Packet<K>>>,
    pending: HashMap<(usize, usize), Block<K>>,
    applied: Vec<Application>,
    peak_residency: usize,
}

fn owner_of(wire: usize, workers: usize, width: usize) -> usize {
    wire * workers / width
}

impl<K: Key, C: BlockComparator<K> + ?Sized> Worker<'_, K, C> {
    fn owner(&self, wire: usize) -> usize {
        owner_of(wire, self.workers, self.width)
    }

    fn held_keys(&self) -> usize {
        self.wires
            .iter()
            .map(|w| match &w.slot {
                Slot::Held(b) => b.len(),
                Slot::Away => 0,
            })
            .sum()
    }

    fn send(&self, to: usize, packet: Packet<K>) -> Result<(), Failure> {
        self.outboxes[to].send(packet).map_err(|_| Failure::Aborted)
    }

    fn done(&self) -> bool {
        self.wires
            .iter()
            .all(|w| w.cursor == self.schedule[w.index].len() && matches!(w.slot, Slot::Held(_)))
    }

    /// Advances wire `li` by one comparator if its operands are available.
    fn step(&mut self, li: usize) -> Result<bool, Failure> {
        let wire = self.wires[li].index;
        let Some(&(stage, c)) = self.schedule[wire].get(self.wires[li].cursor) else {
            return Ok(false);
        };

        if wire == c.hi {
            if self.owner(c.lo) == self.me {
                // Applied when the low wire steps.
                return Ok(false);
            }
            let slot = &mut self.wires[li].slot;
            return match std::mem::replace(slot, Slot::Away) {
                Slot::Held(block) => {
                    self.send(self.owner(c.lo), Packet { stage, wire, block })?;
                    Ok(true)
                }
                Slot::Away => match self.pending.remove(&(stage, wire)) {
                    Some(block) => {
                        self.wires[li].slot = Slot::Held(block);
                        self.wires[li].cursor += 1;
                        self.peak_residency = self.peak_residency.max(self.held_keys());
                        Ok(true)
                    }
                    None => Ok(false),
                },
            };
        }

        let hi_local = self.local[c.hi];
        let hi_block = match hi_local {
            Some(hj) => {
                let h = &mut self.wires[hj];
                let ready = self.schedule[c.hi].get(h.cursor).map(|&(s, _)| s) == Some(stage)
                    && matches!(h.slot, Slot::Held(_));
                if !ready {
                    return Ok(false);
                }
                match std::mem::replace(&mut h.slot, Slot::Away) {
                    Slot::Held(b) => b,
                    Slot::Away => unreachable!("checked above"),
                }
            }
            None => match self.pending.remove(&(stage, c.hi)) {
                Some(b) => b,
                None => return Ok(false),
            },
        };
        let lo_block = match std::mem::replace(&mut self.wires[li].slot, Slot::Away) {
            Slot::Held(b) => b,
            Slot::Away => unreachable!("a low wire never leaves its owner"),
        };

        let resident = self.held_keys() + lo_block.len() + hi_block.len();
        self.peak_residency = self.peak_residency.max(resident);
        let (out_lo, out_hi, record) =
            apply_comparator(self.ce, stage, c, &lo_block, &hi_block, self.options, self.clock)
                .map_err(Failure::Own)?;
        drop((lo_block, hi_block));
        self.applied.push(record);

        self.wires[li].slot = Slot::Held(out_lo);
        self.wires[li].cursor += 1;
        match hi_local {
            Some(hj) => {
                self.wires[hj].slot = Slot::Held(out_hi);
                self.wires[hj].cursor += 1;
            }
            None => self.send(
                self.owner(c.hi),
                Packet {
                    stage,
                    wire: c.hi,
                    block: out_hi,
                },
            )?,
        }
        Ok(true)
    }

    fn run(mut self) -> Result<Output<K>, Failure> {
        self.peak_residency = self.held_keys();
        loop {
            let mut progressed = false;
            for li in 0..self.wires.len() {
                while self.step(li)? {
                    progressed = true;
                }
            }
            if self.done() {
                break;
            }
            if !progressed {
                let packet = loop {
                    if self.abort.load(Ordering::Relaxed) {
                        return Err(Failure::Aborted);
                    }
                    match self.inbox.recv_timeout(POLL) {
                        Ok(p) => break p,
                        Err(RecvTimeoutError::Timeout) => continue,
                        Err(RecvTimeoutError::Disconnected) => return Err(Failure::Aborted),
                    }
                };
                self.pending.insert((packet.stage, packet.wire), packet.block);
                while let Ok(p) = self.inbox.try_recv() {
                    self.pending.insert((p.stage, p.wire), p.block);
                }
            }
        }
        let lanes = self
            .wires
            .into_iter()
            .map(|w| match w.slot {
                Slot::Held(b) => (w.index, b),
                Slot::Away => unreachable!("done() requires every wire to be held"),
            })
            .collect();
        Ok(Output {
            lanes,
            applied: self.applied,
            peak_residency: self.peak_residency,
        })
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "worker panicked".to_string()
    }
}

/// Runs `network` on `workers` threads (capped at the width). The output
/// frame is identical to [`super::run_sequential`] for every worker count.
pub fn run_parallel<K: Key, C: BlockComparator<K> + ?Sized>(
    network: &Network,
    ce: &C,
    frame: BlockFrame<K>,
    workers: usize,
    options: &RunOptions,
) -> Result<(BlockFrame<K>, RunMetrics), ExecError> {
    check_shape(network, frame.width())?;
    if workers == 0 {
        return Err(ExecError::ZeroWorkers);
    }
    let width = network.width;
    let workers = workers.min(width);
    let clock = Instant::now();

    let mut schedule: Vec<Vec<(usize, Comparator)>> = vec![Vec::new(); width];
    for (s, c) in network.comparators() {
        schedule[c.lo].push((s, *c));
        schedule[c.hi].push((s, *c));
    }
    let initial: Vec<usize> = frame.lanes().iter().map(Block::len).collect();

    let mut owned: Vec<Vec<Wire<K>>> = (0..workers).map(|_| Vec::new()).collect();
    let mut local = vec![None; width];
    for (index, block) in frame.into_lanes().into_iter().enumerate() {
        let w = owner_of(index, workers, width);
        local[index] = Some(owned[w].len());
        owned[w].push(Wire {
            index,
            cursor: 0,
            slot: Slot::Held(block),
        });
    }
    let (outboxes, inboxes): (Vec<_>, Vec<_>) = (0..workers).map(|_| mpsc::sync_channel(width)).unzip();
    let abort = AtomicBool::new(false);

    let results: Vec<Result<Output<K>, Failure>> = thread::scope(|scope| {
        let handles: Vec<_> = owned
            .into_iter()
            .zip(inboxes)
            .enumerate()
            .map(|(me, (wires, inbox))| {
                let local_map = local
                    .iter()
                    .enumerate()
                    .map(|(wire, slot)| slot.filter(|_| owner_of(wire, workers, width) == me))
                    .collect();
                let worker = Worker {
                    me,
                    workers,
                    width,
                    schedule: &schedule,
                    ce,
                    options,
                    clock,
                    abort: &abort,
                    wires,
                    local: local_map,
                    inbox,
                    outboxes: outboxes.clone(),
                    pending: HashMap::new(),
                    applied: Vec::new(),
                    peak_residency: 0,
                };
                let abort = &abort;
                scope.spawn(move || {
                    let result = panic::catch_unwind(AssertUnwindSafe(|| worker.run()))
                        .unwrap_or_else(|p| Err(Failure::Own(ExecError::WorkerFailed(panic_message(p)))));
                    if result.is_err() {
                        abort.store(true, Ordering::Relaxed);
                    }
                    result
                })
            })
            .collect();
        drop(outboxes);
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|p| Err(Failure::Own(ExecError::WorkerFailed(panic_message(p)))))
            })
            .collect()
    });

    let mut lanes: Vec<Option<Block<K>>> = (0..width).map(|_| None).collect();
    let mut applied = Vec::with_capacity(network.comparator_count());
    let mut peak_residency = 0;
    let mut first_error = None;
    let mut aborted = false;
    for result in results {
        match result {
            Ok(out) => {
                for (wire, block) in out.lanes {
                    lanes[wire] = Some(block);
                }
                applied.extend(out.applied);
                peak_residency = peak_residency.max(out.peak_residency);
            }
            Err(Failure::Own(e)) => {
                first_error.get_or_insert(e);
            }
            Err(Failure::Aborted) => aborted = true,
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if aborted {
        return Err(ExecError::WorkerFailed("worker stopped unexpectedly".into()));
    }

    let lanes = lanes
        .into_iter()
        .map(|b| b.ok_or_else(|| ExecError::WorkerFailed("lane missing after run".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut metrics = RunMetrics::from_applications(network, &initial, applied, None, options);
    metrics.peak_worker_residency = peak_residency;
    metrics.wall_ns = clock.elapsed().as_nanos() as u64;
    Ok((BlockFrame::new(lanes), metrics))
}
