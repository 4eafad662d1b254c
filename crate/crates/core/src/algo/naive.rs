//! Baseline: greedy MIS once, then plain counter maintenance forever.

use crate::graph::DynamicGraph;
use crate::meter::WorkMeter;
use crate::mis::{greedy_mis, naive_update, MisError, MisState};
use crate::stream::UpdateEvent;

use super::{EpochReport, MisAlgorithm, StepReport};

pub struct NaiveMis {
    graph: DynamicGraph,
    state: MisState,
    initialized: bool,
}

impl NaiveMis {
    pub fn new(n: usize) -> Self {
        Self {
            graph: DynamicGraph::new(n),
            state: MisState::new(n),
            initialized: false,
        }
    }
}

impl MisAlgorithm for NaiveMis {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    fn state(&self) -> &MisState {
        &self.state
    }

    fn initialize(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError> {
        let start = *meter;
        let order: Vec<_> = (0..self.graph.n()).collect();
        self.state = greedy_mis(&self.graph, &order, meter);
        self.initialized = true;
        Ok(EpochReport {
            index: 0,
            m0: self.graph.edge_count().max(1),
            length: None,
            work: meter.since(&start),
            fallbacks: Vec::new(),
        })
    }

    fn apply(&mut self, event: UpdateEvent, meter: &mut WorkMeter) -> Result<StepReport, MisError> {
        let mut report = StepReport::default();
        if !self.initialized {
            report.epochs.push(self.initialize(meter)?);
        }
        report.outcome = naive_update(&mut self.graph, &mut self.state, event, meter)?;
        Ok(report)
    }

    fn config(&self) -> Vec<(&'static str, String)> {
        Vec::new()
    }
}
