use std::fmt::Write as _;

use super::RunOptions;
use crate::network::{Comparator, Network};

/// One comparator application.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Application {
    pub stage: usize,
    pub comparator: Comparator,
    /// Offsets from the start of the run.
    pub start_ns: u64,
    pub end_ns: u64,
    pub keys_crossed: u64,
    pub operand_keys: usize,
    pub out_lo: usize,
    pub out_hi: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageMetrics {
    pub comparators: usize,
    /// Sequential: time spent in the stage. Parallel: span from the first
    /// comparator start to the last comparator end of the stage (stages may
    /// overlap when workers pipeline).
    pub wall_ns: u64,
    /// Keys that left the lane they occupied before the stage.
    pub keys_crossed: u64,
    /// Largest block on any wire after the stage.
    pub max_block: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunMetrics {
    pub stages: Vec<StageMetrics>,
    pub comparator_applications: u64,
    pub initial_max_block: usize,
    /// Largest `|lo| + |hi|` handed to one comparator.
    pub peak_operand_keys: usize,
    /// Most keys held at once by one worker, counting its wires and the
    /// operands of the comparator it is applying. Blocks in transit on a
    /// channel are not attributed to either end.
    pub peak_worker_residency: usize,
    pub wall_ns: u64,
    /// Applications sorted by stage then low wire; only filled when
    /// [`RunOptions::record_trace`] is set.
    pub trace: Vec<Application>,
}

impl RunMetrics {
    pub(crate) fn from_applications(
        network: &Network,
        initial_sizes: &[usize],
        mut applied: Vec<Application>,
        stage_wall: Option<Vec<u64>>,
        options: &RunOptions,
    ) -> Self {
        applied.sort_by_key(|a| (a.stage, a.comparator.lo));
        let mut sizes = initial_sizes.to_vec();
        let mut stages: Vec<StageMetrics> = network
            .stages
            .iter()
            .map(|s| StageMetrics {
                comparators: s.len(),
                ..StageMetrics::default()
            })
            .collect();
        let mut spans: Vec<Option<(u64, u64)>> = vec![None; stages.len()];

        let mut i = 0;
        for (s, stage) in stages.iter_mut().enumerate() {
            while i < applied.len() && applied[i].stage == s {
                let a = &applied[i];
                sizes[a.comparator.lo] = a.out_lo;
                sizes[a.comparator.hi] = a.out_hi;
                stage.keys_crossed += a.keys_crossed;
                spans[s] = Some(match spans[s] {
                    Some((lo, hi)) => (lo.min(a.start_ns), hi.max(a.end_ns)),
                    None => (a.start_ns, a.end_ns),
                });
                i += 1;
            }
            stage.max_block = sizes.iter().copied().max().unwrap_or(0);
        }
        match stage_wall {
            Some(wall) => stages.iter_mut().zip(wall).for_each(|(s, w)| s.wall_ns = w),
            None => stages
                .iter_mut()
                .zip(&spans)
                .for_each(|(s, span)| s.wall_ns = span.map_or(0, |(lo, hi)| hi - lo)),
        }

        RunMetrics {
            stages,
            comparator_applications: applied.len() as u64,
            initial_max_block: initial_sizes.iter().copied().max().unwrap_or(0),
            peak_operand_keys: applied.iter().map(|a| a.operand_keys).max().unwrap_or(0),
            peak_worker_residency: 0,
            wall_ns: 0,
            trace: if options.record_trace { applied } else { Vec::new() },
        }
    }

    /// Largest block seen anywhere in the run, including the input.
    pub fn max_block(&self) -> usize {
        self.stages
            .iter()
            .map(|s| s.max_block)
            .fold(self.initial_max_block, usize::max)
    }

    pub fn keys_crossed(&self) -> u64 {
        self.stages.iter().map(|s| s.keys_crossed).sum()
    }

    /// The (stage, comparator) sequence, without timings.
    pub fn trace_shape(&self) -> Vec<(usize, Comparator)> {
        self.trace.iter().map(|a| (a.stage, a.comparator)).collect()
    }

    pub const CSV_HEADER: &'static str = "stage,comparators,wall_ns,keys_crossed,max_block";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (i, s) in self.stages.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                i, s.comparators, s.wall_ns, s.keys_crossed, s.max_block
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::bitonic_network;

    #[test]
    fn csv_has_one_row_per_stage() {
        let network = bitonic_network(2);
        let metrics = RunMetrics::from_applications(&network, &[1, 1, 1, 1], Vec::new(), None, &RunOptions::default());
        let csv = metrics.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RunMetrics::CSV_HEADER);
        assert_eq!(lines.len(), 1 + network.depth());
        assert_eq!(lines[1], "0,2,0,0,1");
    }
}
