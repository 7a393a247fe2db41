//! Integer-capacity flow networks, a blocking-flow max-flow solver, and
//! cycle-canceling rounding of fixed-denominator fractional flows.
//!
//! No floating point anywhere: a [`ScaledFlow`] stores per-edge numerators
//! over one shared denominator.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("node {node} out of range for {node_count} nodes")]
    InvalidNode { node: usize, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("source and sink must differ")]
    SourceIsSink,
    #[error("flow has {got} entries but network has {expected} edges")]
    SizeMismatch { expected: usize, got: usize },
    #[error("flow denominator must be positive")]
    ZeroDenominator,
    #[error("edge {edge} carries {numerator}/{denominator}, above capacity {capacity}")]
    CapacityExceeded {
        edge: usize,
        numerator: u64,
        denominator: u64,
        capacity: u64,
    },
    #[error("flow not conserved at node {node}: in {inflow}, out {outflow} (numerators)")]
    NotConserved {
        node: usize,
        inflow: u128,
        outflow: u128,
    },
    #[error("edge {0} touches a terminal but carries a fractional flow")]
    FractionalTerminalEdge(usize),
    #[error("arithmetic overflow in flow numerators")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    node_count: usize,
    source: usize,
    sink: usize,
    edges: Vec<Edge>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: usize, sink: usize) -> Result<Self, FlowError> {
        for node in [source, sink] {
            if node >= node_count {
                return Err(FlowError::InvalidNode { node, node_count });
            }
        }
        if source == sink {
            return Err(FlowError::SourceIsSink);
        }
        Ok(Self {
            node_count,
            source,
            sink,
            edges: Vec::new(),
        })
    }

    /// Adds a directed edge and returns its id.
    pub fn add_edge(&mut self, from: usize, to: usize, capacity: u64) -> Result<usize, FlowError> {
        for node in [from, to] {
            if node >= self.node_count {
                return Err(FlowError::InvalidNode {
                    node,
                    node_count: self.node_count,
                });
            }
        }
        if from == to {
            return Err(FlowError::SelfLoop(from));
        }
        self.edges.push(Edge { from, to, capacity });
        Ok(self.edges.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn is_terminal(&self, v: usize) -> bool {
        v == self.source || v == self.sink
    }
}

/// Edge flows `numerators[e] / denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledFlow {
    pub denominator: u64,
    pub numerators: Vec<u64>,
}

impl ScaledFlow {
    pub fn zero(net: &FlowNetwork) -> Self {
        Self {
            denominator: 1,
            numerators: vec![0; net.edges.len()],
        }
    }

    pub fn is_integral(&self) -> bool {
        self.denominator == 1 || self.numerators.iter().all(|f| f % self.denominator == 0)
    }

    /// Net outflow of the source, as a numerator over `self.denominator`.
    pub fn value_numerator(&self, net: &FlowNetwork) -> i128 {
        net.edges
            .iter()
            .zip(&self.numerators)
            .map(|(e, &f)| {
                let f = f as i128;
                match (e.from == net.source, e.to == net.source) {
                    (true, false) => f,
                    (false, true) => -f,
                    _ => 0,
                }
            })
            .sum()
    }

    /// Value when it is a whole number.
    pub fn integral_value(&self, net: &FlowNetwork) -> Option<u64> {
        let v = self.value_numerator(net);
        let d = self.denominator as i128;
        (v >= 0 && v % d == 0).then(|| (v / d) as u64)
    }

    /// Checks edge count, capacities and conservation at every non-terminal node.
    pub fn check_feasible(&self, net: &FlowNetwork) -> Result<(), FlowError> {
        if self.denominator == 0 {
            return Err(FlowError::ZeroDenominator);
        }
        if self.numerators.len() != net.edges.len() {
            return Err(FlowError::SizeMismatch {
                expected: net.edges.len(),
                got: self.numerators.len(),
            });
        }
        let mut inflow = vec![0u128; net.node_count];
        let mut outflow = vec![0u128; net.node_count];
        for (id, (e, &f)) in net.edges.iter().zip(&self.numerators).enumerate() {
            let limit = (e.capacity as u128) * (self.denominator as u128);
            if f as u128 > limit {
                return Err(FlowError::CapacityExceeded {
                    edge: id,
                    numerator: f,
                    denominator: self.denominator,
                    capacity: e.capacity,
                });
            }
            outflow[e.from] += f as u128;
            inflow[e.to] += f as u128;
        }
        for v in 0..net.node_count {
            if !net.is_terminal(v) && inflow[v] != outflow[v] {
                return Err(FlowError::NotConserved {
                    node: v,
                    inflow: inflow[v],
                    outflow: outflow[v],
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    residual: u64,
    rev: usize,
    edge: Option<usize>,
}

/// Maximum integral flow by Dinic's blocking-flow method.
pub fn max_flow_integral(net: &FlowNetwork) -> ScaledFlow {
    let n = net.node_count;
    let mut graph: Vec<Vec<Arc>> = vec![Vec::new(); n];
    for (id, e) in net.edges.iter().enumerate() {
        let (fi, ti) = (graph[e.from].len(), graph[e.to].len());
        graph[e.from].push(Arc {
            to: e.to,
            residual: e.capacity,
            rev: ti,
            edge: Some(id),
        });
        graph[e.to].push(Arc {
            to: e.from,
            residual: 0,
            rev: fi,
            edge: None,
        });
    }

    let mut level = vec![usize::MAX; n];
    let mut iter = vec![0usize; n];
    loop {
        level.fill(usize::MAX);
        level[net.source] = 0;
        let mut queue = VecDeque::from([net.source]);
        while let Some(v) = queue.pop_front() {
            for a in &graph[v] {
                if a.residual > 0 && level[a.to] == usize::MAX {
                    level[a.to] = level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
        if level[net.sink] == usize::MAX {
            break;
        }
        iter.fill(0);
        while augment(
            &mut graph,
            &level,
            &mut iter,
            net.source,
            net.sink,
            u64::MAX,
        ) > 0
        {}
    }

    let mut numerators = vec![0u64; net.edges.len()];
    for arcs in &graph {
        for a in arcs {
            if let Some(id) = a.edge {
                numerators[id] = net.edges[id].capacity - a.residual;
            }
        }
    }
    ScaledFlow {
        denominator: 1,
        numerators,
    }
}

fn augment(
    graph: &mut [Vec<Arc>],
    level: &[usize],
    iter: &mut [usize],
    v: usize,
    sink: usize,
    limit: u64,
) -> u64 {
    if v == sink {
        return limit;
    }
    while iter[v] < graph[v].len() {
        let Arc { to, residual, .. } = graph[v][iter[v]];
        if residual > 0 && level[to] == level[v] + 1 {
            let pushed = augment(graph, level, iter, to, sink, limit.min(residual));
            if pushed > 0 {
                let rev = graph[v][iter[v]].rev;
                graph[v][iter[v]].residual -= pushed;
                graph[to][rev].residual += pushed;
                return pushed;
            }
        }
        iter[v] += 1;
    }
    0
}

/// Rounds a feasible fractional flow to an integral one of the same value.
///
/// Edges touching the source or sink must already carry whole flows. Every
/// other node then has zero or at least two fractional incident edges, so the
/// fractional edges always contain an undirected cycle. Each cycle gets the
/// smaller of its two one-directional slacks pushed around it, which makes at
/// least one edge whole and changes no whole edge.
pub fn round_flow(net: &FlowNetwork, fractional: &ScaledFlow) -> Result<ScaledFlow, FlowError> {
    fractional.check_feasible(net)?;
    let d = fractional.denominator;
    for (id, (e, &f)) in net.edges.iter().zip(&fractional.numerators).enumerate() {
        if (net.is_terminal(e.from) || net.is_terminal(e.to)) && f % d != 0 {
            return Err(FlowError::FractionalTerminalEdge(id));
        }
    }
    if d == 1 {
        return Ok(fractional.clone());
    }

    let mut flow = fractional.numerators.clone();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); net.node_count];
    for (id, e) in net.edges.iter().enumerate() {
        if !flow[id].is_multiple_of(d) {
            adjacency[e.from].push((e.to, id));
            adjacency[e.to].push((e.from, id));
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let mut cursor = vec![0usize; net.node_count];
    let mut position: Vec<Option<usize>> = vec![None; net.node_count];
    // (node, edge used to reach it)
    let mut path: Vec<(usize, Option<usize>)> = Vec::new();

    for start in 0..net.node_count {
        if next_fractional(&adjacency, &mut cursor, &flow, d, start, None).is_none() {
            continue;
        }
        path.clear();
        path.push((start, None));
        position[start] = Some(0);
        while let Some(&(v, via)) = path.last() {
            let Some((w, e)) = next_fractional(&adjacency, &mut cursor, &flow, d, v, via) else {
                // Only the walk's start can run dry: any other node on the
                // path still has its arrival edge, hence a second one.
                debug_assert_eq!(path.len(), 1);
                position[v] = None;
                path.pop();
                break;
            };
            let Some(k) = position[w] else {
                position[w] = Some(path.len());
                path.push((w, Some(e)));
                continue;
            };
            let mut cycle: Vec<(usize, bool)> = Vec::with_capacity(path.len() - k);
            for &(node, via) in &path[k + 1..] {
                let edge = via.expect("non-initial path entries carry an edge");
                cycle.push((edge, net.edges[edge].to == node));
            }
            cycle.push((e, net.edges[e].to == w));
            cancel_cycle(&mut flow, d, &cycle);
            for &(node, _) in &path[k + 1..] {
                position[node] = None;
            }
            path.truncate(k + 1);
        }
    }

    let numerators = flow
        .iter()
        .map(|&f| {
            debug_assert_eq!(f % d, 0);
            f / d
        })
        .collect();
    let rounded = ScaledFlow {
        denominator: 1,
        numerators,
    };
    debug_assert!(rounded.check_feasible(net).is_ok());
    Ok(rounded)
}

/// Smallest-neighbour fractional edge at `v` other than `exclude`.
fn next_fractional(
    adjacency: &[Vec<(usize, usize)>],
    cursor: &mut [usize],
    flow: &[u64],
    d: u64,
    v: usize,
    exclude: Option<usize>,
) -> Option<(usize, usize)> {
    let list = &adjacency[v];
    while cursor[v] < list.len() && flow[list[cursor[v]].1].is_multiple_of(d) {
        cursor[v] += 1;
    }
    list[cursor[v]..]
        .iter()
        .copied()
        .find(|&(_, e)| Some(e) != exclude && !flow[e].is_multiple_of(d))
}

/// `cycle` lists `(edge, forward)` in traversal order.
fn cancel_cycle(flow: &mut [u64], d: u64, cycle: &[(usize, bool)]) {
    let up = |f: u64| d - f % d;
    let down = |f: u64| f % d;
    let push_forward = cycle
        .iter()
        .map(|&(e, fwd)| if fwd { up(flow[e]) } else { down(flow[e]) })
        .min()
        .expect("cycle is non-empty");
    let push_backward = cycle
        .iter()
        .map(|&(e, fwd)| if fwd { down(flow[e]) } else { up(flow[e]) })
        .min()
        .expect("cycle is non-empty");
    let (delta, along) = if push_forward <= push_backward {
        (push_forward, true)
    } else {
        (push_backward, false)
    };
    for &(e, fwd) in cycle {
        if fwd == along {
            flow[e] += delta;
        } else {
            flow[e] -= delta;
        }
    }
}
