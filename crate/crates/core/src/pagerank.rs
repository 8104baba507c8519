//! Synchronous PageRank power iteration over in-links.
//!
//! Every iteration computes, for all nodes at once from the previous vector,
//!
//! ```text
//! P'(i) = (1 - d) / N + d * ( sum_{j -> i} P(j) / m(j) + dangling_share(i) )
//! ```
//!
//! where `m(j)` is the out-degree of `j` and `dangling_share` spreads the
//! total mass held by out-degree-zero nodes evenly, either over all `N` nodes
//! ([`DanglingMode::UniformAll`]) or over the `N - 1` nodes other than the
//! dangling node itself ([`DanglingMode::UniformOthers`]). The vector starts
//! at `1/N` everywhere and iteration stops once the L1 change between
//! consecutive vectors drops below `epsilon`.
//!
//! Results are bitwise reproducible for any rayon pool size: each node sums
//! its in-links in stored (ascending) order, and all global reductions run
//! over fixed-size chunks whose partial sums are combined sequentially.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIndex};

/// The five damping values of the reference sweep.
pub const DAMPING_SWEEP: [f64; 5] = [0.01, 0.15, 0.50, 0.85, 0.99];

/// Nodes per work unit. Fixed so reductions do not depend on thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DanglingMode {
    /// Dangling mass divided by `N`, the dangling node included.
    #[default]
    UniformAll,
    /// Dangling mass divided by `N - 1`, the dangling node excluded.
    UniformOthers,
}

impl FromStr for DanglingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform-all" => Ok(DanglingMode::UniformAll),
            "uniform-others" => Ok(DanglingMode::UniformOthers),
            other => Err(format!(
                "unknown dangling mode {other:?} (expected uniform-all or uniform-others)"
            )),
        }
    }
}

impl fmt::Display for DanglingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DanglingMode::UniformAll => "uniform-all",
            DanglingMode::UniformOthers => "uniform-others",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub dangling_mode: DanglingMode,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.5,
            epsilon: 1e-6,
            max_iterations: 1000,
            dangling_mode: DanglingMode::UniformAll,
        }
    }
}

impl PageRankParams {
    pub fn with_damping(damping: f64) -> Self {
        PageRankParams {
            damping,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParams(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageRankResult {
    #[serde(skip)]
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub final_delta: f64,
    pub converged: bool,
    pub params: PageRankParams,
}

impl PageRankResult {
    pub fn score(&self, node: NodeIndex) -> f64 {
        self.scores[node.index()]
    }

    pub fn damping(&self) -> f64 {
        self.params.damping
    }
}

/// Stepwise driver for the power iteration, double-buffered.
///
/// [`pagerank`] runs it to completion; stepping by hand exposes the vector
/// after every iteration.
pub struct PowerIteration<'g> {
    graph: &'g CitationGraph,
    params: PageRankParams,
    current: Vec<f64>,
    next: Vec<f64>,
    outflow: Vec<f64>,
    iterations: usize,
    last_delta: f64,
}

impl<'g> PowerIteration<'g> {
    pub fn new(graph: &'g CitationGraph, params: PageRankParams) -> Result<Self> {
        params.validate()?;
        if graph.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = graph.node_count();
        Ok(PowerIteration {
            graph,
            params,
            current: vec![1.0 / n as f64; n],
            next: vec![0.0; n],
            outflow: vec![0.0; n],
            iterations: 0,
            last_delta: f64::INFINITY,
        })
    }

    /// Performs one synchronous update and returns its L1 change.
    pub fn step(&mut self) -> f64 {
        let PowerIteration {
            graph,
            params,
            current,
            next,
            outflow,
            ..
        } = self;
        let graph: &CitationGraph = graph;
        let n = graph.node_count();
        let nf = n as f64;
        let d = params.damping;
        let teleport = (1.0 - d) / nf;

        let dangling_mass: f64 = graph
            .dangling_nodes()
            .iter()
            .map(|u| current[u.index()])
            .sum();

        {
            let current: &[f64] = current;
            outflow
                .par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * CHUNK;
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        let j = base + k;
                        let m = graph.out_degree(NodeIndex::from(j));
                        *slot = if m == 0 { 0.0 } else { current[j] / m as f64 };
                    }
                });
        }

        let mode = params.dangling_mode;
        let current_ro: &[f64] = current;
        let outflow: &[f64] = outflow;
        let partials: Vec<f64> = next
            .par_chunks_mut(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let base = c * CHUNK;
                let mut delta = 0.0;
                for (k, slot) in chunk.iter_mut().enumerate() {
                    let i = NodeIndex::from(base + k);
                    let mut inflow = 0.0;
                    for &j in graph.in_neighbors(i) {
                        inflow += outflow[j.index()];
                    }
                    let redistributed = match mode {
                        DanglingMode::UniformAll => dangling_mass / nf,
                        // A lone node has no others; its mass stays with it.
                        DanglingMode::UniformOthers if n == 1 => dangling_mass,
                        DanglingMode::UniformOthers => {
                            let own = if graph.is_dangling(i) {
                                current_ro[i.index()]
                            } else {
                                0.0
                            };
                            (dangling_mass - own) / (nf - 1.0)
                        }
                    };
                    let value = teleport + d * (inflow + redistributed);
                    delta += (value - current_ro[i.index()]).abs();
                    *slot = value;
                }
                delta
            })
            .collect();
        let delta = partials.iter().sum();

        std::mem::swap(current, next);
        self.iterations += 1;
        self.last_delta = delta;
        delta
    }

    pub fn scores(&self) -> &[f64] {
        &self.current
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Steps until the L1 change is below epsilon or the iteration cap is hit.
    pub fn run(mut self) -> PageRankResult {
        let mut converged = false;
        while self.iterations < self.params.max_iterations {
            if self.step() < self.params.epsilon {
                converged = true;
                break;
            }
        }
        PageRankResult {
            scores: self.current,
            iterations: self.iterations,
            final_delta: self.last_delta,
            converged,
            params: self.params,
        }
    }
}

/// Runs the power iteration to convergence. Hitting `max_iterations` is
/// reported through `converged == false`, not as an error.
pub fn pagerank(graph: &CitationGraph, params: &PageRankParams) -> Result<PageRankResult> {
    Ok(PowerIteration::new(graph, *params)?.run())
}

/// One independent run per damping value; all other settings from `base`.
pub fn pagerank_sweep(
    graph: &CitationGraph,
    damping_values: &[f64],
    base: &PageRankParams,
) -> Result<Vec<PageRankResult>> {
    let runs: Vec<PageRankParams> = damping_values
        .iter()
        .map(|&damping| PageRankParams { damping, ..*base })
        .collect();
    for p in &runs {
        p.validate()?;
    }
    runs.iter().map(|p| pagerank(graph, p)).collect()
}

/// L1 distance between two score vectors.
pub fn convergence_delta(prev: &[f64], next: &[f64]) -> Result<f64> {
    if prev.len() != next.len() {
        return Err(Error::LengthMismatch {
            left: prev.len(),
            right: next.len(),
        });
    }
    let partials: Vec<f64> = prev
        .par_chunks(CHUNK)
        .zip(next.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (y - x).abs()).sum::<f64>())
        .collect();
    Ok(partials.iter().sum())
}
