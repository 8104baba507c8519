//! Reference implementations and synthetic data for validation.
//!
//! [`dense_pagerank`] materializes the full transition matrix and runs plain
//! matrix-vector power iteration over out-links. It is deliberately naive
//! and independent of the sparse in-link engine in [`crate::pagerank`].
//!
//! [`generate_synthetic_dataset`] grows a citation network patent by patent
//! in grant-year order. Each patent draws a Poisson number of citations,
//! each aimed at one of:
//!
//! * an earlier patent of the same assignee (`self_citation_rate`),
//! * an earlier patent picked proportionally to its in-degree
//!   (`preferential_fraction`),
//! * an earlier patent from the last `recency_window_years` (`recency_bias`),
//! * any earlier patent.
//!
//! With a planted crossover, patents of the two source classes cite the
//! target class only through the planted rule: before the crossover year a
//! class-A patent cites one target-class patent with probability
//! `strong_rate` and a class-B patent with `weak_rate`; from the crossover
//! year on the rates swap. Their other citations avoid the target class.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, NodeIndex};
use crate::ingest::{assemble_dataset, PatentDataset, PatentMeta};
use crate::pagerank::{DanglingMode, PageRankParams};

pub const DENSE_LIMIT: usize = 2000;

/// Fixed point of the dense Google matrix, iterated to `epsilon / 10`.
pub fn dense_pagerank(graph: &CitationGraph, params: &PageRankParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = graph.node_count();
    if n > DENSE_LIMIT {
        return Err(Error::OracleTooLarge {
            node_count: n,
            limit: DENSE_LIMIT,
        });
    }
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let d = params.damping;
    let nf = n as f64;

    // matrix[i * n + j]: probability of moving from j to i.
    let mut matrix = vec![(1.0 - d) / nf; n * n];
    for j in 0..n {
        let targets = graph.out_neighbors(NodeIndex::from(j));
        if targets.is_empty() {
            for i in 0..n {
                let w = match params.dangling_mode {
                    DanglingMode::UniformAll => d / nf,
                    DanglingMode::UniformOthers if n == 1 => d,
                    DanglingMode::UniformOthers if i == j => 0.0,
                    DanglingMode::UniformOthers => d / (nf - 1.0),
                };
                matrix[i * n + j] += w;
            }
        } else {
            let w = d / targets.len() as f64;
            for t in targets {
                matrix[t.index() * n + j] += w;
            }
        }
    }

    let tolerance = params.epsilon / 10.0;
    let mut x = vec![1.0 / nf; n];
    let mut y = vec![0.0; n];
    for _ in 0..10_000_000 {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &matrix[i * n..(i + 1) * n];
            *yi = row.iter().zip(&x).map(|(a, b)| a * b).sum();
        }
        let change: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut y);
        if change < tolerance {
            break;
        }
    }
    Ok(x)
}

/// Uniformly random directed graph. Nodes whose index falls in the first
/// `dangling_fraction` of a random permutation get no out-links.
pub fn random_graph(
    node_count: usize,
    edge_count: usize,
    dangling_fraction: f64,
    seed: u64,
) -> CitationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if node_count == 0 {
        return CitationGraph::build(&[], 0).expect("empty graph").0;
    }
    let dangling_count = ((node_count as f64) * dangling_fraction).floor() as usize;
    let mut order: Vec<usize> = (0..node_count).collect();
    for i in (1..node_count).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let sources: Vec<usize> = order[dangling_count.min(node_count)..].to_vec();
    let mut edges = Vec::with_capacity(edge_count);
    if !sources.is_empty() {
        for _ in 0..edge_count {
            let u = sources[rng.random_range(0..sources.len())];
            let v = rng.random_range(0..node_count);
            edges.push((NodeIndex::from(u), NodeIndex::from(v)));
        }
    }
    CitationGraph::build(&edges, node_count)
        .expect("indices in range")
        .0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassShare {
    pub code: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssigneeShare {
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeModel {
    pub mean_out_degree: f64,
    pub preferential_fraction: f64,
    pub recency_bias: f64,
    pub recency_window_years: u32,
    pub self_citation_rate: f64,
}

impl Default for EdgeModel {
    fn default() -> Self {
        EdgeModel {
            mean_out_degree: 4.0,
            preferential_fraction: 0.4,
            recency_bias: 0.5,
            recency_window_years: 5,
            self_citation_rate: 0.0,
        }
    }
}

fn default_strong_rate() -> f64 {
    0.8
}

fn default_weak_rate() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCrossover {
    pub target_class: String,
    pub class_a: String,
    pub class_b: String,
    pub crossover_year: i32,
    #[serde(default = "default_strong_rate")]
    pub strong_rate: f64,
    #[serde(default = "default_weak_rate")]
    pub weak_rate: f64,
}

/// Parameters of a synthetic patent dataset. Loaded from JSON by the `gen`
/// command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub node_count: usize,
    pub classes: Vec<ClassShare>,
    pub year_range: (i32, i32),
    #[serde(default)]
    pub assignees: Vec<AssigneeShare>,
    #[serde(default)]
    pub edge_model: EdgeModel,
    #[serde(default)]
    pub planted_crossover: Option<PlantedCrossover>,
}

fn check_proportions<'a>(what: &str, weights: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "{what} weight {w} is not a proportion"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec(format!(
            "{what} proportions sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn check_rate(what: &str, r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{what} must lie in [0, 1], got {r}"
        )))
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidSpec("at least one class is required".into()));
        }
        check_proportions("class", self.classes.iter().map(|c| &c.weight))?;
        if !self.assignees.is_empty() {
            check_proportions("assignee", self.assignees.iter().map(|a| &a.weight))?;
        }
        let (start, end) = self.year_range;
        if start > end {
            return Err(Error::InvalidSpec(format!(
                "empty year range {start}..{end}"
            )));
        }
        let m = &self.edge_model;
        if !m.mean_out_degree.is_finite() || m.mean_out_degree < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "mean_out_degree must be non-negative, got {}",
                m.mean_out_degree
            )));
        }
        check_rate("preferential_fraction", m.preferential_fraction)?;
        check_rate("recency_bias", m.recency_bias)?;
        check_rate("self_citation_rate", m.self_citation_rate)?;
        if let Some(p) = &self.planted_crossover {
            if !(start..=end).contains(&p.crossover_year) {
                return Err(Error::InvalidSpec(format!(
                    "crossover year {} outside {start}..={end}",
                    p.crossover_year
                )));
            }
            for class in [&p.target_class, &p.class_a, &p.class_b] {
                if !self.classes.iter().any(|c| &c.code == class) {
                    return Err(Error::InvalidSpec(format!(
                        "planted class {class:?} not listed"
                    )));
                }
            }
            if p.class_a == p.class_b || p.target_class == p.class_a || p.target_class == p.class_b
            {
                return Err(Error::InvalidSpec(
                    "planted classes must be distinct".into(),
                ));
            }
            check_rate("strong_rate", p.strong_rate)?;
            check_rate("weak_rate", p.weak_rate)?;
            if p.strong_rate < 3.0 * p.weak_rate || p.strong_rate == 0.0 {
                return Err(Error::InvalidSpec(
                    "strong_rate must be positive and at least three times weak_rate".into(),
                ));
            }
        }
        Ok(())
    }
}

impl SyntheticSpec {
    /// Printer-technology flavored spec: target class 347 fed by 400 before
    /// `crossover_year` and by 358 from then on, over 1990..=2012, with a
    /// dominant self-citing assignee "Canon".
    pub fn crossover_demo(node_count: usize, crossover_year: i32) -> SyntheticSpec {
        let class = |code: &str, weight| ClassShare {
            code: code.into(),
            weight,
        };
        let assignee = |name: &str, weight| AssigneeShare {
            name: name.into(),
            weight,
        };
        SyntheticSpec {
            node_count,
            classes: vec![
                class("347", 0.25),
                class("400", 0.2),
                class("358", 0.2),
                class("435", 0.2),
                class("800", 0.15),
            ],
            year_range: (1990, 2012),
            assignees: vec![
                assignee("Canon", 0.2),
                assignee("Epson", 0.125),
                assignee("Hewlett-Packard", 0.125),
                assignee("Xerox", 0.125),
                assignee("Ricoh", 0.125),
                assignee("", 0.3),
            ],
            edge_model: EdgeModel {
                self_citation_rate: 0.8,
                ..Default::default()
            },
            planted_crossover: Some(PlantedCrossover {
                target_class: "347".into(),
                class_a: "400".into(),
                class_b: "358".into(),
                crossover_year,
                strong_rate: default_strong_rate(),
                weak_rate: default_weak_rate(),
            }),
        }
    }
}

fn pick<R: Rng>(rng: &mut R, pool: &[u32]) -> Option<u32> {
    (!pool.is_empty()).then(|| pool[rng.random_range(0..pool.len())])
}

/// Generates a dataset whose node `i` only cites nodes `j < i`, with grant
/// years non-decreasing in index. Deterministic for a given seed.
pub fn generate_synthetic_dataset(spec: &SyntheticSpec, seed: u64) -> Result<PatentDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.node_count;
    let (start, end) = spec.year_range;

    let mut years: Vec<i32> = (0..n).map(|_| rng.random_range(start..=end)).collect();
    years.sort_unstable();

    let class_dist = WeightedIndex::new(spec.classes.iter().map(|c| c.weight))
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let classes: Vec<usize> = (0..n).map(|_| class_dist.sample(&mut rng)).collect();
    let assignees: Vec<Option<usize>> = if spec.assignees.is_empty() {
        vec![None; n]
    } else {
        let dist = WeightedIndex::new(spec.assignees.iter().map(|a| a.weight))
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
        (0..n).map(|_| Some(dist.sample(&mut rng))).collect()
    };

    let class_index = |code: &str| spec.classes.iter().position(|c| c.code == code);
    let planted = spec.planted_crossover.as_ref().map(|p| {
        (
            p,
            class_index(&p.target_class).expect("validated"),
            class_index(&p.class_a).expect("validated"),
            class_index(&p.class_b).expect("validated"),
        )
    });

    // First index of each year, for the recency window.
    let mut first_of_year: HashMap<i32, usize> = HashMap::new();
    for (i, &y) in years.iter().enumerate() {
        first_of_year.entry(y).or_insert(i);
    }
    let window_start = |year: i32| -> usize {
        let from = year.saturating_sub(spec.edge_model.recency_window_years as i32);
        (from..=year)
            .find_map(|y| first_of_year.get(&y).copied())
            .unwrap_or(0)
    };

    let model = &spec.edge_model;
    let degree_dist = (model.mean_out_degree > 0.0)
        .then(|| Poisson::new(model.mean_out_degree).expect("positive mean"));
    let unnamed = |a: Option<usize>| a.is_none_or(|k| spec.assignees[k].name.trim().is_empty());

    let mut endpoints: Vec<u32> = Vec::new();
    let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); spec.classes.len()];
    let mut by_assignee: Vec<Vec<u32>> = vec![Vec::new(); spec.assignees.len()];
    let mut by_assignee_class: HashMap<(usize, usize), Vec<u32>> = HashMap::new();
    let mut edges: Vec<(usize, u32)> = Vec::new();
    let mut cited: Vec<u32> = Vec::new();

    for i in 0..n {
        cited.clear();
        let assignee = assignees[i];
        let can_self_cite = !unnamed(assignee);
        let mut avoid_class = None;

        if let Some((p, target, a, b)) = planted {
            if classes[i] == a || classes[i] == b {
                avoid_class = Some(target);
                let dominant = (classes[i] == a) == (years[i] < p.crossover_year);
                let rate = if dominant { p.strong_rate } else { p.weak_rate };
                if rng.random::<f64>() < rate {
                    let own = assignee
                        .filter(|_| can_self_cite && rng.random::<f64>() < model.self_citation_rate)
                        .and_then(|k| by_assignee_class.get(&(k, target)))
                        .and_then(|pool| pick(&mut rng, pool));
                    if let Some(t) = own.or_else(|| pick(&mut rng, &by_class[target])) {
                        cited.push(t);
                    }
                }
            }
        }

        let k = degree_dist
            .as_ref()
            .map(|dist| dist.sample(&mut rng) as usize)
            .unwrap_or(0)
            .min(i);
        for _ in 0..k {
            for _attempt in 0..16 {
                let candidate = if can_self_cite
                    && rng.random::<f64>() < model.self_citation_rate
                    && !by_assignee[assignee.expect("named")].is_empty()
                {
                    pick(&mut rng, &by_assignee[assignee.expect("named")])
                } else if !endpoints.is_empty() && rng.random::<f64>() < model.preferential_fraction
                {
                    pick(&mut rng, &endpoints)
                } else if rng.random::<f64>() < model.recency_bias {
                    let lo = window_start(years[i]).min(i - 1);
                    Some(rng.random_range(lo..i) as u32)
                } else {
                    Some(rng.random_range(0..i) as u32)
                };
                let Some(c) = candidate else { continue };
                if cited.contains(&c) || avoid_class == Some(classes[c as usize]) {
                    continue;
                }
                cited.push(c);
                break;
            }
        }

        for &c in &cited {
            endpoints.push(c);
            edges.push((i, c));
        }
        let node = i as u32;
        by_class[classes[i]].push(node);
        if let Some(k) = assignee {
            by_assignee[k].push(node);
            by_assignee_class
                .entry((k, classes[i]))
                .or_default()
                .push(node);
        }
    }

    let ids: Vec<String> = (0..n).map(|i| (1_000_000 + i).to_string()).collect();
    let metas: Vec<PatentMeta> = (0..n)
        .map(|i| PatentMeta {
            patent_id: ids[i].clone(),
            primary_class: Some(spec.classes[classes[i]].code.clone()),
            grant_year: Some(years[i]),
            assignee: assignees[i]
                .map(|k| spec.assignees[k].name.trim().to_owned())
                .unwrap_or_default(),
        })
        .collect();
    let edge_ids: Vec<(String, String)> = edges
        .iter()
        .map(|&(u, v)| (ids[u].clone(), ids[v as usize].clone()))
        .collect();
    Ok(assemble_dataset(&edge_ids, metas))
}
