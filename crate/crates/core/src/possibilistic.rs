//! Possibility-theory calculus on finite state sets, possibilistic
//! causal graphs, and a possibilistic semi-Markov switching simulator.
//!
//! A possibility distribution υ assigns each state a plausibility in
//! [0, 1] with max_s υ(s) = 1 (normality). Events combine by
//!
//! ```text
//! Υ(S₁ ∪ S₂) = max(Υ(S₁), Υ(S₂))            (maxitivity)
//! Υⁿᵉᶜ(S)    = 1 − Υ(Sᶜ)                     (duality)
//! Υⁿᵉᶜ(S₁ ∩ S₂) = min(Υⁿᵉᶜ(S₁), Υⁿᵉᶜ(S₂))   (minitivity)
//! ```
//!
//! Conditionals follow the quotient rule υ(s₁|s₂) = υ(s₁,s₂)/υ(s₂) with
//! the 0-denominator branch mapped to full possibility, and kernels chain
//! by max-product composition renormalized per row. The semi-Markov
//! simulator alternates linear-dynamics segments whose mode jumps are
//! drawn from a possibilistic kernel by α-cut sampling.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::channel::{spectral_radius, step_dynamics, LinearDynamics};
use crate::scalar::{as_f64, r, Real};

#[derive(Debug, Error)]
pub enum PossibilisticError {
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("invalid kernel: {0}")]
    BadKernel(String),
    #[error("kernel shapes are incompatible: {0}")]
    ShapeMismatch(String),
    #[error("invalid graph: {0}")]
    BadGraph(String),
    #[error("invalid assignment: {0}")]
    BadAssignment(String),
    #[error("invalid semi-markov spec: {0}")]
    BadSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

/// Normalized possibility distribution over a finite labeled state set.
#[derive(Debug, Clone)]
pub struct PossibilityDistribution<T> {
    labels: Vec<String>,
    values: Vec<T>,
}

impl<T: Real> PossibilityDistribution<T> {
    pub fn new(labels: Vec<String>, values: Vec<T>) -> Result<Self, PossibilisticError> {
        if labels.len() != values.len() {
            return Err(PossibilisticError::BadDistribution(format!(
                "{} labels vs {} values",
                labels.len(),
                values.len()
            )));
        }
        if values.is_empty() {
            return Err(PossibilisticError::BadDistribution("state set is empty".into()));
        }
        let mut peak = T::zero();
        for v in &values {
            if !(*v >= T::zero()) || !(*v <= T::one()) {
                return Err(PossibilisticError::BadDistribution(format!(
                    "value {v} outside [0, 1]"
                )));
            }
            peak = peak.max(*v);
        }
        if (peak - T::one()).abs() > r(1e-12) {
            return Err(PossibilisticError::BadDistribution(format!(
                "normality fails: max value is {peak}, not 1"
            )));
        }
        Ok(Self { labels, values })
    }

    pub fn from_values(values: Vec<T>) -> Result<Self, PossibilisticError> {
        let labels = (0..values.len()).map(|i| format!("s{i}")).collect();
        Self::new(labels, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn value(&self, state: usize) -> T {
        self.values[state]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Event possibility `Υ(S) = max_{s ∈ S} υ(s)`; the empty event has
    /// possibility 0.
    pub fn possibility_of(&self, subset: &[usize]) -> T {
        subset.iter().map(|&s| self.values[s]).fold(T::zero(), T::max)
    }

    /// Event necessity, the dual `1 − Υ(Sᶜ)`. (Formulations that write
    /// the axiom with an infimum over the complement coincide with this
    /// supremum convention only in the two-valued case; the supremum
    /// dual is what keeps necessity ≤ possibility on normalized
    /// distributions.)
    pub fn necessity_of(&self, subset: &[usize]) -> T {
        let complement: Vec<usize> =
            (0..self.values.len()).filter(|s| !subset.contains(s)).collect();
        T::one() - self.possibility_of(&complement)
    }
}

/// The plausibility calculus on the aged / middle-aged / young example.
#[derive(Debug, Clone, Copy)]
pub struct AgeReport<T> {
    /// Υ({aged} ∪ {middle-aged}).
    pub adult_via_aged_or_middle: T,
    /// Υ({middle-aged} ∪ {young}).
    pub adult_via_middle_or_young: T,
    /// min(Υ({aged}), Υ({middle-aged})), the minitive combination.
    pub aged_min_middle: T,
}

/// Evaluates the membership example υ = {aged: 1, middle-aged: 0.5,
/// young: 0}: calling the person an adult via aged-or-middle-aged is
/// fully possible, the maxitive union over the junior memberships only
/// reaches 0.5, and the minitive pairing of aged with middle-aged is
/// held down by the weaker membership.
pub fn age_example_check<T: Real>() -> AgeReport<T> {
    let dist = PossibilityDistribution::new(
        vec!["aged".into(), "middle-aged".into(), "young".into()],
        vec![T::one(), r(0.5), T::zero()],
    )
    .expect("the membership table is normalized");
    AgeReport {
        adult_via_aged_or_middle: dist.possibility_of(&[0, 1]),
        adult_via_middle_or_young: dist.possibility_of(&[1, 2]),
        aged_min_middle: dist.possibility_of(&[0]).min(dist.possibility_of(&[1])),
    }
}

/// Conditional possibility table υ(s′|s); row s holds the transition
/// possibilities out of s.
#[derive(Debug, Clone, PartialEq)]
pub struct PossibilisticKernel<T> {
    table: Array2<T>,
}

impl<T: Real> PossibilisticKernel<T> {
    pub fn new(table: Array2<T>) -> Result<Self, PossibilisticError> {
        if table.nrows() == 0 || table.ncols() == 0 {
            return Err(PossibilisticError::BadKernel("kernel must be non-empty".into()));
        }
        for v in table.iter() {
            if !(*v >= T::zero()) || !(*v <= T::one()) {
                return Err(PossibilisticError::BadKernel(format!("entry {v} outside [0, 1]")));
            }
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &Array2<T> {
        &self.table
    }

    pub fn n_from(&self) -> usize {
        self.table.nrows()
    }

    pub fn n_to(&self) -> usize {
        self.table.ncols()
    }

    /// Row normalization factor ϖ(s) = max_{s′} υ(s′|s).
    pub fn varpi(&self, s: usize) -> T {
        (0..self.table.ncols()).map(|j| self.table[[s, j]]).fold(T::zero(), T::max)
    }

    /// True when every row maxes to exactly 1.
    pub fn is_normalized(&self) -> bool {
        (0..self.table.nrows()).all(|s| self.varpi(s) == T::one())
    }

    /// Divides each row by its ϖ so the row max becomes 1; rows that are
    /// identically zero carry no plausibility and stay zero.
    pub fn normalize(&self) -> Self {
        let mut table = self.table.clone();
        for s in 0..table.nrows() {
            let w = self.varpi(s);
            if w > T::zero() {
                for j in 0..table.ncols() {
                    table[[s, j]] = table[[s, j]] / w;
                }
            }
        }
        Self { table }
    }
}

/// Conditions a two-variable joint possibility table on one axis:
/// υ(other|given) = υ(joint)/υ(given marginal), where the marginal is the
/// max over the other variable and a zero marginal yields full
/// possibility. Output rows are indexed by the given variable.
pub fn condition<T: Real>(
    joint: &Array2<T>,
    given_axis: usize,
) -> Result<PossibilisticKernel<T>, PossibilisticError> {
    if given_axis > 1 {
        return Err(PossibilisticError::BadAssignment(format!(
            "a two-variable joint has axes 0 and 1, got {given_axis}"
        )));
    }
    for v in joint.iter() {
        if !(*v >= T::zero()) || !(*v <= T::one()) {
            return Err(PossibilisticError::BadDistribution(format!(
                "joint entry {v} outside [0, 1]"
            )));
        }
    }
    let (rows, cols) = joint.dim();
    let (n_given, n_other) = if given_axis == 0 { (rows, cols) } else { (cols, rows) };
    let at = |g: usize, o: usize| if given_axis == 0 { joint[[g, o]] } else { joint[[o, g]] };
    let mut table = Array2::zeros((n_given, n_other));
    for g in 0..n_given {
        let marginal = (0..n_other).map(|o| at(g, o)).fold(T::zero(), T::max);
        for o in 0..n_other {
            table[[g, o]] = if marginal > T::zero() { at(g, o) / marginal } else { T::one() };
        }
    }
    PossibilisticKernel::new(table)
}

/// Chains two kernels by renormalized max-product composition:
///
/// ```text
/// υ(s₃|s₁) = (1/ϖ₃(s₁)) max_{s₂} υ(s₃|s₂) υ(s₂|s₁),  ϖ₃(s₁) = max_{s₂} υ(s₂|s₁)
/// ```
///
/// A row of `k21` with no plausible successor yields a zero output row.
pub fn max_chain<T: Real>(
    k32: &PossibilisticKernel<T>,
    k21: &PossibilisticKernel<T>,
) -> Result<PossibilisticKernel<T>, PossibilisticError> {
    if k21.n_to() != k32.n_from() {
        return Err(PossibilisticError::ShapeMismatch(format!(
            "first hop lands in {} states, second hop departs from {}",
            k21.n_to(),
            k32.n_from()
        )));
    }
    let (n1, n2, n3) = (k21.n_from(), k21.n_to(), k32.n_to());
    let mut table = Array2::zeros((n1, n3));
    for s1 in 0..n1 {
        let w = k21.varpi(s1);
        if !(w > T::zero()) {
            continue;
        }
        for s3 in 0..n3 {
            let mut best = T::zero();
            for s2 in 0..n2 {
                best = best.max(k32.table()[[s2, s3]] * k21.table()[[s1, s2]]);
            }
            table[[s1, s3]] = best / w;
        }
    }
    PossibilisticKernel::new(table)
}

/// Whitespace-separated rows, one conditioning state per line.
pub fn format_kernel<T: Real>(kernel: &PossibilisticKernel<T>) -> String {
    let mut out = String::new();
    for s in 0..kernel.n_from() {
        let row: Vec<String> =
            (0..kernel.n_to()).map(|j| format!("{:?}", kernel.table()[[s, j]])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_kernel<T: Real>(text: &str) -> Result<PossibilisticKernel<T>, PossibilisticError> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| {
                PossibilisticError::Parse(format!("line {}: bad number {tok}", lineno + 1))
            })?;
            row.push(r::<T>(v));
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(PossibilisticError::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PossibilisticError::Parse("no kernel rows found".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    let table = Array2::from_shape_fn((n, m), |(i, j)| rows[i][j]);
    PossibilisticKernel::new(table)
}

/// One node of a possibilistic causal graph: a named variable, its state
/// labels, its parents, and the stored sub-unity conditional entries.
/// Absent entries are fully possible (value 1).
#[derive(Debug, Clone)]
pub struct GraphNode<T> {
    pub name: String,
    pub states: Vec<String>,
    pub parents: Vec<usize>,
    exceptions: BTreeMap<(usize, Vec<usize>), T>,
}

/// Acyclic causal graph with per-node conditional possibility tables.
/// Parents must be declared before their children, which keeps every
/// edge pointing backwards and the graph a DAG by construction.
#[derive(Debug, Clone, Default)]
pub struct PossibilisticGraph<T> {
    nodes: Vec<GraphNode<T>>,
}

impl<T: Real> PossibilisticGraph<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn nodes(&self) -> &[GraphNode<T>] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn add_node(
        &mut self,
        name: &str,
        states: &[&str],
        parents: &[&str],
    ) -> Result<usize, PossibilisticError> {
        if states.is_empty() {
            return Err(PossibilisticError::BadGraph(format!("node {name} has no states")));
        }
        if self.node_index(name).is_some() {
            return Err(PossibilisticError::BadGraph(format!("duplicate node {name}")));
        }
        let mut parent_ids = Vec::with_capacity(parents.len());
        for p in parents {
            let id = self.node_index(p).ok_or_else(|| {
                PossibilisticError::BadGraph(format!(
                    "parent {p} of {name} is not declared yet (declare parents first)"
                ))
            })?;
            parent_ids.push(id);
        }
        self.nodes.push(GraphNode {
            name: name.to_string(),
            states: states.iter().map(|s| s.to_string()).collect(),
            parents: parent_ids,
            exceptions: BTreeMap::new(),
        });
        Ok(self.nodes.len() - 1)
    }

    /// Stores a conditional possibility below 1. Entries equal to 1 are
    /// never stored; a parent configuration whose every state is pushed
    /// below 1 would break per-configuration normality and is rejected.
    pub fn set_exception(
        &mut self,
        node: &str,
        state: &str,
        parent_states: &[(&str, &str)],
        alpha: T,
    ) -> Result<(), PossibilisticError> {
        if !(alpha >= T::zero()) || !(alpha < T::one()) {
            return Err(PossibilisticError::BadGraph(format!(
                "stored entries must satisfy 0 <= value < 1 (1 is implicit), got {alpha}"
            )));
        }
        let id = self
            .node_index(node)
            .ok_or_else(|| PossibilisticError::BadGraph(format!("unknown node {node}")))?;
        let state_idx = self.nodes[id]
            .states
            .iter()
            .position(|s| s == state)
            .ok_or_else(|| {
                PossibilisticError::BadGraph(format!("node {node} has no state {state}"))
            })?;
        let parents = self.nodes[id].parents.clone();
        if parent_states.len() != parents.len() {
            return Err(PossibilisticError::BadGraph(format!(
                "node {node} has {} parents, configuration names {}",
                parents.len(),
                parent_states.len()
            )));
        }
        let mut config = vec![usize::MAX; parents.len()];
        for (pname, pstate) in parent_states {
            let slot = parents
                .iter()
                .position(|&p| self.nodes[p].name == *pname)
                .ok_or_else(|| {
                    PossibilisticError::BadGraph(format!("{pname} is not a parent of {node}"))
                })?;
            let pid = parents[slot];
            config[slot] = self.nodes[pid]
                .states
                .iter()
                .position(|s| s == pstate)
                .ok_or_else(|| {
                    PossibilisticError::BadGraph(format!("node {pname} has no state {pstate}"))
                })?;
        }
        let n_states = self.nodes[id].states.len();
        let key = (state_idx, config.clone());
        self.nodes[id].exceptions.insert(key, alpha);
        let stored = self.nodes[id]
            .exceptions
            .keys()
            .filter(|(_, cfg)| *cfg == config)
            .count();
        if stored == n_states {
            self.nodes[id].exceptions.remove(&(state_idx, config));
            return Err(PossibilisticError::BadGraph(format!(
                "every state of {node} would fall below 1 for this parent configuration"
            )));
        }
        Ok(())
    }

    fn conditional(&self, node: usize, assignment: &[usize]) -> T {
        let config: Vec<usize> =
            self.nodes[node].parents.iter().map(|&p| assignment[p]).collect();
        self.nodes[node]
            .exceptions
            .get(&(assignment[node], config))
            .copied()
            .unwrap_or_else(T::one)
    }
}

/// Joint possibility of a full assignment: the product of each node's
/// conditional given its parents.
pub fn chain_joint<T: Real>(
    graph: &PossibilisticGraph<T>,
    assignment: &[usize],
) -> Result<T, PossibilisticError> {
    if assignment.len() != graph.nodes().len() {
        return Err(PossibilisticError::BadAssignment(format!(
            "assignment covers {} nodes, graph has {}",
            assignment.len(),
            graph.nodes().len()
        )));
    }
    for (i, node) in graph.nodes().iter().enumerate() {
        if assignment[i] >= node.states.len() {
            return Err(PossibilisticError::BadAssignment(format!(
                "state index {} out of range for node {}",
                assignment[i], node.name
            )));
        }
    }
    let mut product = T::one();
    for i in 0..graph.nodes().len() {
        product = product * graph.conditional(i, assignment);
    }
    Ok(product)
}

/// Text form: `node <name> : <states...> [| <parents...>]` lines followed
/// by `except <node>=<state> [| <parent>=<state> ...] : <value>` lines.
pub fn format_graph<T: Real>(graph: &PossibilisticGraph<T>) -> String {
    let mut out = String::new();
    for node in graph.nodes() {
        out.push_str(&format!("node {} : {}", node.name, node.states.join(" ")));
        if !node.parents.is_empty() {
            let names: Vec<&str> =
                node.parents.iter().map(|&p| graph.nodes()[p].name.as_str()).collect();
            out.push_str(&format!(" | {}", names.join(" ")));
        }
        out.push('\n');
    }
    for node in graph.nodes() {
        for ((state, config), alpha) in &node.exceptions {
            let mut line = format!("except {}={}", node.name, node.states[*state]);
            if !config.is_empty() {
                let parts: Vec<String> = node
                    .parents
                    .iter()
                    .zip(config.iter())
                    .map(|(&p, &c)| {
                        format!("{}={}", graph.nodes()[p].name, graph.nodes()[p].states[c])
                    })
                    .collect();
                line.push_str(&format!(" | {}", parts.join(" ")));
            }
            line.push_str(&format!(" : {:?}", *alpha));
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

pub fn parse_graph<T: Real>(text: &str) -> Result<PossibilisticGraph<T>, PossibilisticError> {
    let mut graph = PossibilisticGraph::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| PossibilisticError::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("node ") {
            let (head, tail) = rest
                .split_once(':')
                .ok_or_else(|| bad("node line needs `name : states`".into()))?;
            let name = head.trim();
            let (states_part, parents_part) = match tail.split_once('|') {
                Some((s, p)) => (s, Some(p)),
                None => (tail, None),
            };
            let states: Vec<&str> = states_part.split_whitespace().collect();
            let parents: Vec<&str> =
                parents_part.map(|p| p.split_whitespace().collect()).unwrap_or_default();
            graph
                .add_node(name, &states, &parents)
                .map_err(|e| bad(e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("except ") {
            let (head, value_part) = rest
                .rsplit_once(':')
                .ok_or_else(|| bad("except line needs a trailing `: value`".into()))?;
            let alpha: f64 = value_part
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad value {}", value_part.trim())))?;
            let (target, config_part) = match head.split_once('|') {
                Some((t, c)) => (t.trim(), Some(c)),
                None => (head.trim(), None),
            };
            let (node, state) = target
                .split_once('=')
                .ok_or_else(|| bad("except target must be node=state".into()))?;
            let mut config: Vec<(&str, &str)> = Vec::new();
            if let Some(cfg) = config_part {
                for tok in cfg.split_whitespace() {
                    let (p, s) = tok
                        .split_once('=')
                        .ok_or_else(|| bad(format!("bad parent assignment {tok}")))?;
                    config.push((p, s));
                }
            }
            graph
                .set_exception(node.trim(), state.trim(), &config, r::<T>(alpha))
                .map_err(|e| bad(e.to_string()))?;
        } else {
            return Err(bad(format!("unrecognized directive: {line}")));
        }
    }
    if graph.nodes().is_empty() {
        return Err(PossibilisticError::Parse("no nodes declared".into()));
    }
    Ok(graph)
}

/// Holding-time law of one mode.
#[derive(Debug, Clone, Copy)]
pub enum HoldingTime<T> {
    Deterministic(T),
    Exponential { mean: T },
}

impl<T: Real> HoldingTime<T> {
    fn validate(&self) -> Result<(), PossibilisticError> {
        let ok = match self {
            HoldingTime::Deterministic(h) => *h > T::zero() && h.is_finite(),
            HoldingTime::Exponential { mean } => *mean > T::zero() && mean.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(PossibilisticError::BadSpec("holding times must be strictly positive".into()))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> T {
        match self {
            HoldingTime::Deterministic(h) => *h,
            HoldingTime::Exponential { mean } => {
                let u: f64 = rng.random();
                *mean * r(-(1.0 - u).ln())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Stable,
    Unstable,
}

/// One switching mode: its plant and its holding-time law.
#[derive(Debug, Clone)]
pub struct ModeSpec<T> {
    pub dynamics: LinearDynamics<T>,
    pub holding: HoldingTime<T>,
}

/// Two-mode possibilistic semi-Markov switching system. Mode jumps are
/// drawn from a 2x2 possibilistic kernel; each visit holds for a random
/// duration while the active mode's dynamics run.
#[derive(Debug, Clone)]
pub struct SemiMarkovSpec<T> {
    stable: ModeSpec<T>,
    unstable: ModeSpec<T>,
    transition: PossibilisticKernel<T>,
    initial: ModeKind,
}

impl<T: Real> SemiMarkovSpec<T> {
    pub fn new(
        stable: ModeSpec<T>,
        unstable: ModeSpec<T>,
        transition: PossibilisticKernel<T>,
        initial: ModeKind,
    ) -> Result<Self, PossibilisticError> {
        stable.holding.validate()?;
        unstable.holding.validate()?;
        if stable.dynamics.dim() != unstable.dynamics.dim() {
            return Err(PossibilisticError::BadSpec(format!(
                "mode state dimensions differ: {} vs {}",
                stable.dynamics.dim(),
                unstable.dynamics.dim()
            )));
        }
        let (rho_s, _) = spectral_radius(&stable.dynamics)?;
        if rho_s > T::one() + r(1e-9) {
            return Err(PossibilisticError::BadSpec(format!(
                "stable mode has spectral radius {rho_s} > 1"
            )));
        }
        let (rho_u, unstable_flag) = spectral_radius(&unstable.dynamics)?;
        if !unstable_flag {
            return Err(PossibilisticError::BadSpec(format!(
                "unstable mode has spectral radius {rho_u} <= 1"
            )));
        }
        if transition.n_from() != 2 || transition.n_to() != 2 {
            return Err(PossibilisticError::BadSpec(
                "mode transition kernel must be 2x2".into(),
            ));
        }
        if (0..2).any(|s| !(transition.varpi(s) > T::zero())) {
            return Err(PossibilisticError::BadSpec(
                "every mode needs at least one plausible successor".into(),
            ));
        }
        Ok(Self { stable, unstable, transition: transition.normalize(), initial })
    }

    fn mode(&self, kind: ModeKind) -> &ModeSpec<T> {
        match kind {
            ModeKind::Stable => &self.stable,
            ModeKind::Unstable => &self.unstable,
        }
    }
}

/// One constant-mode stretch of a trajectory.
#[derive(Debug, Clone)]
pub struct Segment<T> {
    pub mode: ModeKind,
    pub start_time: T,
    pub holding: T,
    /// Plant states visited during the segment, entry state first.
    pub path: Vec<Array1<T>>,
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub segments: Vec<Segment<T>>,
    /// Cumulative switching instants t_1 < t_2 < ...
    pub jump_times: Vec<T>,
}

/// Draws a successor by α-cut sampling: u ~ uniform(0,1) trims the row
/// to {s : υ(s) ≥ u} and the survivor is picked uniformly. Normalized
/// rows keep the cut non-empty.
fn alpha_cut_sample<T: Real>(row: &[T], rng: &mut ChaCha8Rng) -> usize {
    let u: T = r(rng.random::<f64>());
    let cut: Vec<usize> =
        (0..row.len()).filter(|&j| row[j] >= u).collect();
    if cut.is_empty() {
        // only reachable for sub-normal rows: fall back to the plausibility peak
        let mut best = 0;
        for j in 1..row.len() {
            if row[j] > row[best] {
                best = j;
            }
        }
        return best;
    }
    cut[rng.random_range(0..cut.len())]
}

/// Simulates `jumps` mode visits. Each visit samples its holding time h,
/// steps the active mode's dynamics ⌈h⌉ times, and then draws the next
/// mode from the possibilistic kernel.
pub fn simulate_semi_markov<T: Real>(
    spec: &SemiMarkovSpec<T>,
    jumps: usize,
    seed: u64,
) -> Result<Trajectory<T>, PossibilisticError> {
    if jumps == 0 {
        return Err(PossibilisticError::BadSpec("need at least one segment".into()));
    }
    let mut rng = crate::rng::seeded(seed);
    let dim = spec.stable.dynamics.dim();
    let mut x = Array1::from_elem(dim, T::one());
    let mut mode = spec.initial;
    let mut clock = T::zero();
    let mut segments = Vec::with_capacity(jumps);
    let mut jump_times = Vec::with_capacity(jumps);
    for _ in 0..jumps {
        let active = spec.mode(mode);
        let holding = active.holding.sample(&mut rng);
        let steps = as_f64(holding).ceil().max(1.0) as usize;
        let mut path = Vec::with_capacity(steps + 1);
        path.push(x.clone());
        for _ in 0..steps {
            let (next, _, _) = step_dynamics(&x, &active.dynamics, &mut rng)?;
            x = next;
            path.push(x.clone());
        }
        segments.push(Segment { mode, start_time: clock, holding, path });
        clock += holding;
        jump_times.push(clock);
        let row: Vec<T> = (0..2)
            .map(|j| spec.transition.table()[[mode_index(mode), j]])
            .collect();
        mode = if alpha_cut_sample(&row, &mut rng) == 0 {
            ModeKind::Stable
        } else {
            ModeKind::Unstable
        };
    }
    Ok(Trajectory { segments, jump_times })
}

fn mode_index(mode: ModeKind) -> usize {
    match mode {
        ModeKind::Stable => 0,
        ModeKind::Unstable => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn dist(values: &[f64]) -> PossibilityDistribution<f64> {
        PossibilityDistribution::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(PossibilityDistribution::from_values(vec![0.3f64, 1.0, 0.7]).is_ok());
        assert!(PossibilityDistribution::from_values(vec![0.3f64, 0.9]).is_err());
        assert!(PossibilityDistribution::from_values(vec![1.0f64, 1.2]).is_err());
        assert!(PossibilityDistribution::from_values(vec![-0.1f64, 1.0]).is_err());
        assert!(PossibilityDistribution::from_values(Vec::<f64>::new()).is_err());
        assert!(PossibilityDistribution::new(vec!["a".into()], vec![1.0f64, 0.2]).is_err());
    }

    #[test]
    fn possibility_maxes_over_the_event() {
        let d = dist(&[0.3, 1.0, 0.7]);
        assert_eq!(d.possibility_of(&[0, 1, 2]), 1.0);
        assert_eq!(d.possibility_of(&[]), 0.0);
        assert_eq!(d.possibility_of(&[0, 2]), 0.7);
        // maxitivity on the quoted pair of events
        let d2 = dist(&[0.4, 0.9, 1.0]);
        let s1 = [0];
        let s2 = [1];
        assert_eq!(d2.possibility_of(&s1), 0.4);
        assert_eq!(d2.possibility_of(&s2), 0.9);
        assert_eq!(d2.possibility_of(&[0, 1]), 0.9);
    }

    #[test]
    fn necessity_duality_values() {
        let d = dist(&[1.0, 0.2]);
        assert_eq!(d.necessity_of(&[0, 1]), 1.0);
        assert!((d.necessity_of(&[0]) - 0.8).abs() < 1e-15);
        // complement holding a fully possible state kills necessity
        assert_eq!(d.necessity_of(&[1]), 0.0);
    }

    #[test]
    fn axioms_hold_exhaustively_on_small_state_sets() {
        let mut rng = crate::rng::seeded(2);
        for _ in 0..3 {
            let n = 5;
            let mut values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            values[rng.random_range(0..n)] = 1.0;
            let d = PossibilityDistribution::from_values(values).unwrap();
            let subsets: Vec<Vec<usize>> = (0..1usize << n)
                .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
                .collect();
            for s1 in &subsets {
                for s2 in &subsets {
                    let union: Vec<usize> =
                        (0..n).filter(|i| s1.contains(i) || s2.contains(i)).collect();
                    let inter: Vec<usize> =
                        (0..n).filter(|i| s1.contains(i) && s2.contains(i)).collect();
                    let max = d.possibility_of(s1).max(d.possibility_of(s2));
                    assert_eq!(d.possibility_of(&union), max, "maxitivity");
                    let min = d.necessity_of(s1).min(d.necessity_of(s2));
                    assert_eq!(d.necessity_of(&inter), min, "minitivity");
                    assert!(d.necessity_of(s1) <= d.possibility_of(s1) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn age_example_reproduces_the_membership_calculus() {
        let report = age_example_check::<f64>();
        assert_eq!(report.adult_via_aged_or_middle, 1.0);
        assert_eq!(report.adult_via_middle_or_young, 0.5);
        assert_eq!(report.aged_min_middle, 0.5);
    }

    #[test]
    fn kernel_validation_and_normalization() {
        assert!(PossibilisticKernel::new(arr2(&[[0.5f64, 1.2]])).is_err());
        assert!(PossibilisticKernel::new(Array2::<f64>::zeros((0, 2))).is_err());
        let k = PossibilisticKernel::new(arr2(&[[0.5f64, 0.25], [0.0, 0.0]])).unwrap();
        assert_eq!(k.varpi(0), 0.5);
        assert_eq!(k.varpi(1), 0.0);
        assert!(!k.is_normalized());
        let n = k.normalize();
        assert_eq!(n.table()[[0, 0]], 1.0);
        assert_eq!(n.table()[[0, 1]], 0.5);
        // a row with no plausibility stays zero
        assert_eq!(n.table()[[1, 0]], 0.0);
        assert_eq!(n.table()[[1, 1]], 0.0);
        assert!(!n.is_normalized());
    }

    #[test]
    fn conditioning_follows_the_quotient_rule() {
        // product joint: conditional rows reproduce the other marginal
        let a = [1.0f64, 0.4];
        let b = [0.7f64, 1.0];
        let joint = Array2::from_shape_fn((2, 2), |(i, j)| a[i] * b[j]);
        let k = condition(&joint, 1).unwrap();
        for g in 0..2 {
            for o in 0..2 {
                assert!((k.table()[[g, o]] - a[o]).abs() < 1e-15);
            }
        }
        // a certain given row is copied verbatim
        let k0 = condition(&joint, 0).unwrap();
        assert_eq!(k0.table()[[0, 0]], 0.7);
        assert_eq!(k0.table()[[0, 1]], 1.0);

        // zero marginal: the quotient convention grants full possibility
        let joint = arr2(&[[0.0f64, 0.8], [0.0, 1.0]]);
        let k = condition(&joint, 1).unwrap();
        assert_eq!(k.table()[[0, 0]], 1.0);
        assert_eq!(k.table()[[0, 1]], 1.0);

        assert!(condition(&joint, 2).is_err());
        assert!(condition(&arr2(&[[1.5f64]]), 0).is_err());
    }

    #[test]
    fn conditioning_and_row_normalization_diverge_only_on_zero_rows() {
        let joint = arr2(&[[0.0f64, 0.8, 0.2], [0.0, 1.0, 0.4]]);
        let quotient = condition(&joint, 1).unwrap();
        // same table renormalized: rows over the given variable
        let transposed = Array2::from_shape_fn((3, 2), |(i, j)| joint[[j, i]]);
        let renorm = PossibilisticKernel::new(transposed).unwrap().normalize();
        for g in 0..3 {
            for o in 0..2 {
                let q = quotient.table()[[g, o]];
                let n = renorm.table()[[g, o]];
                if g == 0 {
                    // zero marginal: quotient grants 1, renormalization keeps 0
                    assert_eq!(q, 1.0);
                    assert_eq!(n, 0.0);
                } else {
                    assert_eq!(q, n);
                }
            }
        }
    }

    #[test]
    fn max_chain_identity_and_deterministic_collapse() {
        let id = PossibilisticKernel::new(arr2(&[[1.0f64, 0.0], [0.0, 1.0]])).unwrap();
        let k = PossibilisticKernel::new(arr2(&[[1.0f64, 0.3], [0.6, 1.0]])).unwrap();
        assert_eq!(max_chain(&k, &id).unwrap().table(), k.table());
        assert_eq!(max_chain(&id, &k).unwrap(), k.normalize());

        // deterministic first hop picks out single rows of the second
        let det = PossibilisticKernel::new(arr2(&[[0.0f64, 1.0], [1.0, 0.0]])).unwrap();
        let out = max_chain(&k, &det).unwrap();
        assert_eq!(out.table()[[0, 0]], 0.6);
        assert_eq!(out.table()[[0, 1]], 1.0);
        assert_eq!(out.table()[[1, 0]], 1.0);
        assert_eq!(out.table()[[1, 1]], 0.3);

        let wide = PossibilisticKernel::new(Array2::<f64>::from_elem((2, 3), 1.0)).unwrap();
        assert!(max_chain(&k, &wide).is_err());
    }

    #[test]
    fn max_chain_matches_exhaustive_enumeration() {
        let mut rng = crate::rng::seeded(8);
        for _ in 0..20 {
            let mut t21 = Array2::<f64>::zeros((3, 3));
            let mut t32 = Array2::<f64>::zeros((3, 3));
            for i in 0..3 {
                for j in 0..3 {
                    t21[[i, j]] = rng.random::<f64>();
                    t32[[i, j]] = rng.random::<f64>();
                }
            }
            let k21 = PossibilisticKernel::new(t21.clone()).unwrap();
            let k32 = PossibilisticKernel::new(t32.clone()).unwrap();
            let out = max_chain(&k32, &k21).unwrap();
            for s1 in 0..3 {
                let varpi = (0..3).map(|s2| t21[[s1, s2]]).fold(0.0f64, f64::max);
                for s3 in 0..3 {
                    let mut best = 0.0f64;
                    for s2 in 0..3 {
                        best = best.max(t32[[s2, s3]] * t21[[s1, s2]]);
                    }
                    assert!((out.table()[[s1, s3]] - best / varpi).abs() < 1e-15);
                }
                assert!(out.varpi(s1) <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn max_chain_zero_row_propagates() {
        let k21 = PossibilisticKernel::new(arr2(&[[0.0f64, 0.0], [1.0, 0.2]])).unwrap();
        let k32 = PossibilisticKernel::new(arr2(&[[1.0f64, 0.5], [0.4, 1.0]])).unwrap();
        let out = max_chain(&k32, &k21).unwrap();
        assert_eq!(out.table()[[0, 0]], 0.0);
        assert_eq!(out.table()[[0, 1]], 0.0);
        assert!(out.varpi(1) > 0.0);
    }

    #[test]
    fn max_chain_is_associative_after_row_renormalization() {
        // associativity up to row scaling needs normalized inputs: an
        // unnormalized middle kernel injects per-s2 factors inside the
        // outer max and genuinely reorders it
        let mut rng = crate::rng::seeded(15);
        let normalize_rows = |k: &PossibilisticKernel<f64>| k.normalize();
        for _ in 0..10 {
            let mut tables = Vec::new();
            for _ in 0..3 {
                let t = Array2::from_shape_fn((4, 4), |_| rng.random::<f64>());
                tables.push(PossibilisticKernel::new(t).unwrap().normalize());
            }
            let left =
                max_chain(&tables[2], &max_chain(&tables[1], &tables[0]).unwrap()).unwrap();
            let right =
                max_chain(&max_chain(&tables[2], &tables[1]).unwrap(), &tables[0]).unwrap();
            let (l, r) = (normalize_rows(&left), normalize_rows(&right));
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (l.table()[[i, j]] - r.table()[[i, j]]).abs() < 1e-12,
                        "row {i} col {j}: {} vs {}",
                        l.table()[[i, j]],
                        r.table()[[i, j]]
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_text_roundtrip() {
        let k = PossibilisticKernel::new(arr2(&[[1.0f64, 0.25], [0.6, 1.0]])).unwrap();
        let text = format_kernel(&k);
        let back = parse_kernel::<f64>(&text).unwrap();
        assert_eq!(back, k);
        assert!(parse_kernel::<f64>("1.0 0.5\n0.3").is_err());
        assert!(parse_kernel::<f64>("").is_err());
        assert!(parse_kernel::<f64>("1.0 nope").is_err());
    }

    fn sprinkler_graph() -> PossibilisticGraph<f64> {
        let mut g = PossibilisticGraph::new();
        g.add_node("rain", &["no", "yes"], &[]).unwrap();
        g.add_node("sprinkler", &["off", "on"], &["rain"]).unwrap();
        g.add_node("wet", &["no", "yes"], &["rain", "sprinkler"]).unwrap();
        g.set_exception("rain", "yes", &[], 0.3).unwrap();
        g.set_exception("sprinkler", "on", &[("rain", "yes")], 0.1).unwrap();
        g.set_exception("wet", "yes", &[("rain", "no"), ("sprinkler", "off")], 0.05).unwrap();
        g.set_exception("wet", "no", &[("rain", "yes"), ("sprinkler", "on")], 0.2).unwrap();
        g
    }

    #[test]
    fn graph_construction_is_validated() {
        let mut g = PossibilisticGraph::<f64>::new();
        g.add_node("a", &["x", "y"], &[]).unwrap();
        assert!(g.add_node("a", &["x"], &[]).is_err());
        assert!(g.add_node("b", &[], &[]).is_err());
        // parents must exist already, so cycles cannot be declared
        assert!(g.add_node("b", &["x"], &["missing"]).is_err());
        g.add_node("b", &["u", "v"], &["a"]).unwrap();
        assert!(g.set_exception("b", "u", &[("a", "x")], 1.0).is_err());
        assert!(g.set_exception("b", "u", &[("a", "x")], -0.1).is_err());
        assert!(g.set_exception("b", "u", &[("b", "u")], 0.5).is_err());
        g.set_exception("b", "u", &[("a", "x")], 0.4).unwrap();
        // pushing every state of b below 1 for the same configuration
        assert!(g.set_exception("b", "v", &[("a", "x")], 0.7).is_err());
        // the rejected entry must not linger
        assert_eq!(chain_joint(&g, &[0, 1]).unwrap(), 1.0);
    }

    #[test]
    fn chain_joint_multiplies_conditionals() {
        let g = sprinkler_graph();
        // all-default assignment: every conditional is 1
        assert_eq!(chain_joint(&g, &[0, 0, 0]).unwrap(), 1.0);
        // rain=yes brings its stored 0.3
        assert!((chain_joint(&g, &[1, 0, 0]).unwrap() - 0.3).abs() < 1e-15);
        // rain=yes, sprinkler=on, wet=no: 0.3 * 0.1 * 0.2
        assert!((chain_joint(&g, &[1, 1, 0]).unwrap() - 0.006).abs() < 1e-15);
        assert!(chain_joint(&g, &[0, 0]).is_err());
        assert!(chain_joint(&g, &[0, 0, 5]).is_err());

        let mut chain = PossibilisticGraph::<f64>::new();
        chain.add_node("a", &["a0"], &[]).unwrap();
        chain.add_node("b", &["b0", "b1"], &["a"]).unwrap();
        chain.set_exception("b", "b1", &[("a", "a0")], 0.6).unwrap();
        assert!((chain_joint(&chain, &[0, 1]).unwrap() - 0.6).abs() < 1e-15);
        let mut zeroed = chain.clone();
        zeroed.set_exception("b", "b0", &[("a", "a0")], 0.0).unwrap_err();
        // a standalone zero conditional absorbs the product
        let mut g0 = PossibilisticGraph::<f64>::new();
        g0.add_node("a", &["x", "y"], &[]).unwrap();
        g0.set_exception("a", "y", &[], 0.0).unwrap();
        assert_eq!(chain_joint(&g0, &[1]).unwrap(), 0.0);
    }

    #[test]
    fn graph_text_roundtrip() {
        let g = sprinkler_graph();
        let text = format_graph(&g);
        let back = parse_graph::<f64>(&text).unwrap();
        assert_eq!(format_graph(&back), text);
        for assignment in [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 1], [1, 1, 1]] {
            assert_eq!(
                chain_joint(&back, &assignment).unwrap(),
                chain_joint(&g, &assignment).unwrap()
            );
        }
        assert!(parse_graph::<f64>("nonsense line").is_err());
        assert!(parse_graph::<f64>("").is_err());
        assert!(parse_graph::<f64>("except a=b : 0.5").is_err());
    }

    fn semi_markov_spec(
        stable_hold: HoldingTime<f64>,
        unstable_hold: HoldingTime<f64>,
        kernel: [[f64; 2]; 2],
        initial: ModeKind,
    ) -> SemiMarkovSpec<f64> {
        let stable = ModeSpec {
            dynamics: LinearDynamics::scalar(0.8, (0.0, 0.0, 0.0)).unwrap(),
            holding: stable_hold,
        };
        let unstable = ModeSpec {
            dynamics: LinearDynamics::scalar(1.2, (0.0, 0.0, 0.0)).unwrap(),
            holding: unstable_hold,
        };
        let transition = PossibilisticKernel::new(arr2(&kernel)).unwrap();
        SemiMarkovSpec::new(stable, unstable, transition, initial).unwrap()
    }

    #[test]
    fn spec_validation_enforces_mode_roles() {
        let ok_kernel = [[1.0, 0.5], [0.5, 1.0]];
        let stable = ModeSpec {
            dynamics: LinearDynamics::scalar(0.8f64, (0.0, 0.0, 0.0)).unwrap(),
            holding: HoldingTime::Deterministic(1.0),
        };
        let unstable = ModeSpec {
            dynamics: LinearDynamics::scalar(1.2f64, (0.0, 0.0, 0.0)).unwrap(),
            holding: HoldingTime::Deterministic(1.0),
        };
        let kernel = PossibilisticKernel::new(arr2(&ok_kernel)).unwrap();
        // swapped roles are rejected on both sides
        assert!(SemiMarkovSpec::new(
            unstable.clone(),
            stable.clone(),
            kernel.clone(),
            ModeKind::Stable
        )
        .is_err());
        assert!(SemiMarkovSpec::new(
            stable.clone(),
            stable.clone(),
            kernel.clone(),
            ModeKind::Stable
        )
        .is_err());
        let bad_hold = ModeSpec {
            dynamics: stable.dynamics.clone(),
            holding: HoldingTime::Deterministic(0.0),
        };
        assert!(SemiMarkovSpec::new(
            bad_hold,
            unstable.clone(),
            kernel.clone(),
            ModeKind::Stable
        )
        .is_err());
        let dead_row = PossibilisticKernel::new(arr2(&[[0.0f64, 0.0], [0.5, 1.0]])).unwrap();
        assert!(SemiMarkovSpec::new(stable.clone(), unstable.clone(), dead_row, ModeKind::Stable)
            .is_err());
        let wide = PossibilisticKernel::new(Array2::<f64>::from_elem((2, 3), 1.0)).unwrap();
        assert!(SemiMarkovSpec::new(stable, unstable, wide, ModeKind::Stable).is_err());
    }

    #[test]
    fn deterministic_holding_gives_periodic_jumps() {
        // self-loop kernel keeps the single active mode
        let spec = semi_markov_spec(
            HoldingTime::Deterministic(2.5),
            HoldingTime::Deterministic(1.0),
            [[1.0, 0.0], [0.0, 1.0]],
            ModeKind::Stable,
        );
        let traj = simulate_semi_markov(&spec, 4, 7).unwrap();
        assert_eq!(traj.jump_times.len(), 4);
        for (k, t) in traj.jump_times.iter().enumerate() {
            assert!((t - 2.5 * (k + 1) as f64).abs() < 1e-12);
        }
        assert!(traj.segments.iter().all(|s| s.mode == ModeKind::Stable));
        // ceil(2.5) = 3 steps per segment, entry state included
        assert!(traj.segments.iter().all(|s| s.path.len() == 4));
        assert!(simulate_semi_markov(&spec, 0, 7).is_err());
    }

    #[test]
    fn degenerate_kernel_locks_the_unstable_mode() {
        let spec = semi_markov_spec(
            HoldingTime::Deterministic(1.0),
            HoldingTime::Deterministic(1.0),
            [[0.0, 1.0], [0.0, 1.0]],
            ModeKind::Unstable,
        );
        let traj = simulate_semi_markov(&spec, 50, 3).unwrap();
        assert!(traj.segments.iter().all(|s| s.mode == ModeKind::Unstable));
        // noiseless unstable scalar plant compounds by 1.2 each step
        let last = traj.segments.last().unwrap();
        let first = &traj.segments[0];
        assert!(last.path.last().unwrap()[0] > first.path[0][0]);
    }

    #[test]
    fn simulation_is_bit_deterministic_under_a_seed() {
        let spec = semi_markov_spec(
            HoldingTime::Exponential { mean: 3.0 },
            HoldingTime::Exponential { mean: 2.0 },
            [[1.0, 0.7], [0.6, 1.0]],
            ModeKind::Stable,
        );
        let a = simulate_semi_markov(&spec, 200, 11).unwrap();
        let b = simulate_semi_markov(&spec, 200, 11).unwrap();
        assert_eq!(a.jump_times.len(), b.jump_times.len());
        for (x, y) in a.jump_times.iter().zip(b.jump_times.iter()) {
            assert_eq!(x, y);
        }
        for (s, t) in a.segments.iter().zip(b.segments.iter()) {
            assert_eq!(s.mode, t.mode);
            assert_eq!(s.path.last().unwrap()[0], t.path.last().unwrap()[0]);
        }
        let c = simulate_semi_markov(&spec, 200, 12).unwrap();
        assert!(a
            .jump_times
            .iter()
            .zip(c.jump_times.iter())
            .any(|(x, y)| (x - y).abs() > 1e-12));
    }

    #[test]
    fn holding_times_are_independent_of_the_destination_mode() {
        // both modes share the exponential law, so the (duration, next
        // mode) pairs form a contingency table with independent margins
        let spec = semi_markov_spec(
            HoldingTime::Exponential { mean: 5.0 },
            HoldingTime::Exponential { mean: 5.0 },
            [[1.0, 0.7], [0.6, 1.0]],
            ModeKind::Stable,
        );
        let jumps = 10_000;
        let traj = simulate_semi_markov(&spec, jumps + 1, 29).unwrap();
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(jumps);
        for k in 0..jumps {
            let h = traj.segments[k].holding;
            let dest = mode_index(traj.segments[k + 1].mode);
            pairs.push((h, dest));
        }
        let mut sorted: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[jumps / 2];
        let mut counts = [[0.0f64; 2]; 2];
        for (h, dest) in &pairs {
            let row = usize::from(*h > median);
            counts[row][*dest] += 1.0;
        }
        let total: f64 = counts.iter().flatten().sum();
        let mut chi2 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let row_sum: f64 = counts[i].iter().sum();
                let col_sum: f64 = counts[0][j] + counts[1][j];
                let expected = row_sum * col_sum / total;
                chi2 += (counts[i][j] - expected).powi(2) / expected;
            }
        }
        // df = 1 critical value at 5%
        assert!(chi2 < 3.841, "chi-square {chi2} flags dependence");
    }

    #[test]
    fn alpha_cut_sampling_respects_the_plausibility_order() {
        let mut rng = crate::rng::seeded(31);
        let row = [1.0f64, 0.3];
        let mut counts = [0usize; 2];
        for _ in 0..20_000 {
            counts[alpha_cut_sample(&row, &mut rng)] += 1;
        }
        // cut math: second state drawn only when u <= 0.3, then half the
        // time; expected share 0.15
        let share = counts[1] as f64 / 20_000.0;
        assert!((share - 0.15).abs() < 0.02, "share {share}");
        assert!(counts[0] > counts[1]);
    }
}
