//! Signal flow graphs of the recursions.
//!
//! A graph is built by running the recursion symbolically: every addition
//! becomes a node with two incoming edges, every multiplication by a
//! constant other than `±1` becomes a weighted edge, and permutations are
//! pure relabelings of wires. Nodes are created in topological order.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use crate::error::{log2_exact, DstError, Result};
use crate::TransformKind;

pub type NodeId = usize;

/// Structural class of an edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    /// `±1`
    Unit,
    /// `±√2`
    Scale,
    /// `±sin` / `±cos` of a rotation angle
    Trig,
}

/// Symbolic magnitude of an edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    One,
    Sqrt2,
    /// `sin(num·π / 2^pow)`
    Sin {
        num: u64,
        pow: u32,
    },
    /// `cos(num·π / 2^pow)`
    Cos {
        num: u64,
        pow: u32,
    },
}

impl Coefficient {
    pub fn kind(self) -> WeightKind {
        match self {
            Self::One => WeightKind::Unit,
            Self::Sqrt2 => WeightKind::Scale,
            Self::Sin { .. } | Self::Cos { .. } => WeightKind::Trig,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::One => 1.0,
            Self::Sqrt2 => SQRT_2,
            Self::Sin { num, pow } => (num as f64 * PI / (1u64 << pow) as f64).sin(),
            Self::Cos { num, pow } => (num as f64 * PI / (1u64 << pow) as f64).cos(),
        }
    }

    /// `2ε`, `S_{i,j}`, `C_{i,j}` with `ε = 1/√2`.
    pub fn symbol(self) -> String {
        match self {
            Self::One => "1".to_string(),
            Self::Sqrt2 => "2ε".to_string(),
            Self::Sin { num, pow } => format!("S_{{{num},{pow}}}"),
            Self::Cos { num, pow } => format!("C_{{{num},{pow}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    /// Longest path from any input.
    pub stage: usize,
    /// Position within the operator that produced the node.
    pub index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub negative: bool,
    pub coeff: Coefficient,
}

impl Edge {
    pub fn weight(&self) -> f64 {
        let v = self.coeff.value();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.coeff.kind()
    }
}

/// Weighted DAG of one transform instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowGraph {
    pub kind: TransformKind,
    pub n: usize,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
    /// Natural output index of each entry of `outputs`.
    pub output_indices: Vec<usize>,
}

impl FlowGraph {
    pub fn indegrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        self.edges.iter().for_each(|e| deg[e.dst] += 1);
        deg
    }

    /// Number of adder (indegree-2) nodes.
    pub fn additions(&self) -> u64 {
        self.indegrees().into_iter().filter(|&d| d == 2).count() as u64
    }

    /// Number of edges whose weight is not `±1`.
    pub fn multiplications(&self) -> u64 {
        self.edges
            .iter()
            .filter(|e| e.kind() != WeightKind::Unit)
            .count() as u64
    }

    /// Every edge points from a lower to a higher id, which (ids being a
    /// topological numbering) rules out cycles.
    pub fn is_acyclic(&self) -> bool {
        self.edges.iter().all(|e| e.src < e.dst)
    }

    /// Non-input nodes have indegree 1 or 2; inputs have none.
    pub fn has_valid_indegrees(&self) -> bool {
        let deg = self.indegrees();
        let mut is_input = vec![false; self.nodes.len()];
        self.inputs.iter().for_each(|&i| is_input[i] = true);
        deg.iter()
            .zip(&is_input)
            .all(|(&d, &inp)| if inp { d == 0 } else { d == 1 || d == 2 })
    }

    /// Whether every output depends on at least one input.
    pub fn outputs_reachable(&self) -> bool {
        let mut reach = vec![false; self.nodes.len()];
        self.inputs.iter().for_each(|&i| reach[i] = true);
        for e in &self.edges {
            if reach[e.src] {
                reach[e.dst] = true;
            }
        }
        self.outputs.iter().all(|&o| reach[o])
    }
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

type Term = (NodeId, bool, Coefficient);

impl Builder {
    fn node(&mut self, label: &str, index: usize, terms: &[Term]) -> NodeId {
        let id = self.nodes.len();
        let stage = terms
            .iter()
            .map(|&(src, _, _)| self.nodes[src].stage + 1)
            .max()
            .unwrap_or(0);
        self.nodes.push(Node {
            id,
            stage,
            index,
            label: format!("{label}[{index}]"),
        });
        for &(src, negative, coeff) in terms {
            self.edges.push(Edge {
                src,
                dst: id,
                negative,
                coeff,
            });
        }
        id
    }

    fn sum(
        &mut self,
        label: &str,
        index: usize,
        a: NodeId,
        b: NodeId,
        neg_a: bool,
        neg_b: bool,
    ) -> NodeId {
        use Coefficient::One;
        self.node(label, index, &[(a, neg_a, One), (b, neg_b, One)])
    }

    fn scale(&mut self, label: &str, index: usize, a: NodeId, negative: bool) -> NodeId {
        self.node(label, index, &[(a, negative, Coefficient::Sqrt2)])
    }
}

fn shuffle(ws: &[NodeId]) -> Vec<NodeId> {
    // P^T: out[2i] = w[i], out[2i+1] = w[evens + i]
    let evens = ws.len().div_ceil(2);
    let mut out = vec![0; ws.len()];
    for (i, &w) in ws.iter().enumerate() {
        let dst = if i < evens {
            2 * i
        } else {
            2 * (i - evens) + 1
        };
        out[dst] = w;
    }
    out
}

fn unshuffle(ws: &[NodeId]) -> Vec<NodeId> {
    ws.iter()
        .step_by(2)
        .chain(ws.iter().skip(1).step_by(2))
        .copied()
        .collect()
}

fn butterfly(b: &mut Builder, ws: &[NodeId]) -> Vec<NodeId> {
    let n = ws.len();
    let h = n / 2;
    let label = format!("H{n}");
    let mut out = vec![0; n];
    for k in 0..h {
        out[k] = b.sum(&label, k, ws[k], ws[n - 1 - k], false, false);
        out[h + k] = b.sum(&label, h + k, ws[k], ws[n - 1 - k], false, true);
    }
    out
}

fn butterfly_transpose(b: &mut Builder, ws: &[NodeId]) -> Vec<NodeId> {
    let n = ws.len();
    let h = n / 2;
    let label = format!("HT{n}");
    let mut out = vec![0; n];
    for k in 0..h {
        out[k] = b.sum(&label, k, ws[k], ws[h + k], false, false);
        out[n - 1 - k] = b.sum(&label, n - 1 - k, ws[k], ws[h + k], false, true);
    }
    out
}

fn hat_butterfly(b: &mut Builder, ws: &[NodeId]) -> Vec<NodeId> {
    let m = ws.len();
    let h = m.div_ceil(2);
    let label = format!("Hhat{m}");
    let mut out = vec![0; m];
    for k in 0..h - 1 {
        out[k] = b.sum(&label, k, ws[k], ws[m - 1 - k], false, false);
        out[h + k] = b.sum(&label, h + k, ws[k], ws[m - 1 - k], false, true);
    }
    out[h - 1] = b.scale(&label, h - 1, ws[h - 1], false);
    out
}

fn sqrt2_v(b: &mut Builder, ws: &[NodeId]) -> Vec<NodeId> {
    let n = ws.len();
    let h = n / 2;
    let label = format!("V{n}");
    let mut out = vec![0; n];
    out[0] = b.scale(&label, 0, ws[h - 1], false);
    for j in 0..h - 1 {
        let a = ws[h - 2 - j];
        let c = ws[h + j];
        // the D sign on the second half alternates with j
        let flip = j % 2 == 1;
        out[1 + j] = b.sum(&label, 1 + j, a, c, false, !flip);
        out[h + j] = b.sum(&label, h + j, a, c, true, !flip);
    }
    out[n - 1] = b.scale(&label, n - 1, ws[n - 1], h % 2 == 1);
    out
}

fn rotation(b: &mut Builder, ws: &[NodeId]) -> Vec<NodeId> {
    let n = ws.len();
    let pow = n.trailing_zeros() + 2;
    let label = format!("Q{n}");
    let mut out = vec![0; n];
    for k in 0..n / 2 {
        let num = 2 * k as u64 + 1;
        let s = Coefficient::Sin { num, pow };
        let c = Coefficient::Cos { num, pow };
        let (a, z) = (ws[k], ws[n - 1 - k]);
        let odd = k % 2 == 1;
        out[k] = b.node(&label, k, &[(a, odd, s), (z, odd, c)]);
        out[n - 1 - k] = b.node(&label, n - 1 - k, &[(a, true, c), (z, false, s)]);
    }
    out
}

fn base_pair(b: &mut Builder, ws: &[NodeId], label: &str) -> Vec<NodeId> {
    vec![
        b.sum(label, 0, ws[0], ws[1], false, false),
        b.sum(label, 1, ws[0], ws[1], false, true),
    ]
}

fn grow(b: &mut Builder, kind: TransformKind, ws: &[NodeId], natural: bool) -> Vec<NodeId> {
    use TransformKind::*;
    let m = ws.len();
    match kind {
        Dst1 if m == 1 => return vec![b.scale("MS1_1", 0, ws[0], false)],
        Dst2 | Dst3 if m == 2 => {
            return base_pair(b, ws, if kind == Dst2 { "MS2_2" } else { "MS3_2" })
        }
        Dst4 if m == 2 => {
            let s = Coefficient::Sin { num: 1, pow: 3 };
            let c = Coefficient::Cos { num: 1, pow: 3 };
            let r0 = b.node("MS4_2", 0, &[(ws[0], false, s), (ws[1], false, c)]);
            let r1 = b.node("MS4_2", 1, &[(ws[0], false, c), (ws[1], true, s)]);
            return vec![
                b.scale("MS4_2", 0, r0, false),
                b.scale("MS4_2", 1, r1, false),
            ];
        }
        _ => {}
    }
    let h = m.div_ceil(2);
    let join = |top: Vec<NodeId>, bottom: Vec<NodeId>| [top, bottom].concat();
    match kind {
        Dst2 => {
            let y = butterfly(b, ws);
            let top = grow(b, Dst4, &y[..h], natural);
            let bottom = grow(b, Dst2, &y[h..], natural);
            let z = join(top, bottom);
            if natural {
                shuffle(&z)
            } else {
                z
            }
        }
        Dst4 => {
            let y = rotation(b, ws);
            let top = grow(b, Dst2, &y[..h], true);
            let bottom = grow(b, Dst2, &y[h..], true);
            let z = sqrt2_v(b, &join(top, bottom));
            if natural {
                shuffle(&z)
            } else {
                z
            }
        }
        Dst3 => {
            let y = unshuffle(ws);
            let top = grow(b, Dst4, &y[..h], true);
            let bottom = grow(b, Dst3, &y[h..], true);
            butterfly_transpose(b, &join(top, bottom))
        }
        Dst1 => {
            let y = hat_butterfly(b, ws);
            let top = grow(b, Dst3, &y[..h], natural);
            let bottom = grow(b, Dst1, &y[h..], natural);
            let z = join(top, bottom);
            if natural {
                shuffle(&z)
            } else {
                z
            }
        }
    }
}

fn build(kind: TransformKind, n: usize, natural: bool) -> FlowGraph {
    let mut b = Builder {
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let len = kind.signal_len(n);
    let inputs: Vec<NodeId> = (0..len).map(|i| b.node("x", i, &[])).collect();
    let outputs = grow(&mut b, kind, &inputs, natural);
    FlowGraph {
        kind,
        n,
        nodes: b.nodes,
        edges: b.edges,
        inputs,
        output_indices: (0..len).collect(),
        outputs,
    }
}

/// Flow graph of the scaled transform `(kind, n)`.
///
/// With `bit_reversed`, every permutation that is not followed by more
/// arithmetic is left out, so outputs appear in the scrambled order the
/// butterfly network produces them; `output_indices` then records where
/// each one belongs.
pub fn build_flowgraph(kind: TransformKind, n: usize, bit_reversed: bool) -> Result<FlowGraph> {
    log2_exact(n).ok_or(DstError::Size {
        len: n,
        constraint: "transform size n must be a power of two >= 2",
    })?;
    let natural = build(kind, n, true);
    if !bit_reversed {
        return Ok(natural);
    }
    let mut scrambled = build(kind, n, false);
    let position: BTreeMap<NodeId, usize> = natural
        .outputs
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i))
        .collect();
    scrambled.output_indices = scrambled.outputs.iter().map(|id| position[id]).collect();
    Ok(scrambled)
}

/// Evaluates the graph on `x`; the result is listed in `g.outputs` order.
pub fn evaluate_flowgraph(g: &FlowGraph, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != g.inputs.len() {
        return Err(DstError::Dimension {
            expected: g.inputs.len(),
            found: x.len(),
        });
    }
    let mut values = vec![0.0; g.nodes.len()];
    for (&id, &v) in g.inputs.iter().zip(x) {
        values[id] = v;
    }
    // edges are stored grouped by destination in id order
    for e in &g.edges {
        values[e.dst] += e.weight() * values[e.src];
    }
    Ok(g.outputs.iter().map(|&o| values[o]).collect())
}

/// Graphviz rendering: one `rank=same` subgraph per stage, dashed edges
/// for `-1`, labels on every non-unit weight.
pub fn export_dot(g: &FlowGraph) -> String {
    let mut names: Vec<String> = g.nodes.iter().map(|n| format!("n{}", n.id)).collect();
    for (i, &id) in g.inputs.iter().enumerate() {
        names[id] = format!("x{i}");
    }
    for (pos, &id) in g.outputs.iter().enumerate() {
        names[id] = format!("y{pos}");
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph {}_{} {{", g.kind, g.n);
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle, width=0.2, fixedsize=true, label=\"\"];\n");

    let mut by_stage: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for n in &g.nodes {
        by_stage.entry(n.stage).or_default().push(n.id);
    }
    let out_pos: BTreeMap<NodeId, usize> = g
        .outputs
        .iter()
        .enumerate()
        .map(|(p, &id)| (id, p))
        .collect();
    for (stage, ids) in &by_stage {
        let _ = writeln!(out, "  subgraph stage_{stage} {{");
        out.push_str("    rank=same;\n");
        for &id in ids {
            let name = &names[id];
            if *stage == 0 {
                let _ = writeln!(
                    out,
                    "    {name} [shape=plaintext, fixedsize=false, label=\"{name}\"];"
                );
            } else if let Some(&p) = out_pos.get(&id) {
                let _ = writeln!(
                    out,
                    "    {name} [shape=doublecircle, xlabel=\"y{}\"];",
                    g.output_indices[p]
                );
            } else {
                let _ = writeln!(out, "    {name} [tooltip=\"{}\"];", g.nodes[id].label);
            }
        }
        out.push_str("  }\n");
    }
    for e in &g.edges {
        let (a, b) = (&names[e.src], &names[e.dst]);
        match (e.kind(), e.negative) {
            (WeightKind::Unit, false) => {
                let _ = writeln!(out, "  {a} -> {b};");
            }
            (WeightKind::Unit, true) => {
                let _ = writeln!(out, "  {a} -> {b} [style=dashed];");
            }
            (_, neg) => {
                let sign = if neg { "-" } else { "" };
                let _ = writeln!(
                    out,
                    "  {a} -> {b} [label=\"{sign}{} ({:.6})\"];",
                    e.coeff.symbol(),
                    e.weight()
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use TransformKind::*;

    #[test]
    fn dst2_base_graph() {
        let g = build_flowgraph(Dst2, 2, false).unwrap();
        assert_eq!(g.inputs.len(), 2);
        assert_eq!(g.additions(), 2);
        assert_eq!(g.multiplications(), 0);
        assert_eq!(evaluate_flowgraph(&g, &[1.0, 0.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn dst1_n4_counts() {
        let g = build_flowgraph(Dst1, 4, false).unwrap();
        assert_eq!(g.additions(), 4);
        assert_eq!(g.multiplications(), 2);
        let scale_edges = g
            .edges
            .iter()
            .filter(|e| e.kind() == WeightKind::Scale)
            .count();
        assert_eq!(scale_edges, 2);
    }

    #[test]
    fn structure_invariants() {
        for kind in TransformKind::ALL {
            for t in 1..=6 {
                for bit_reversed in [false, true] {
                    let g = build_flowgraph(kind, 1 << t, bit_reversed).unwrap();
                    assert!(g.is_acyclic());
                    assert!(g.has_valid_indegrees());
                    assert!(g.outputs_reachable());
                    let mut idx = g.output_indices.clone();
                    idx.sort_unstable();
                    assert_eq!(idx, (0..g.inputs.len()).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn scrambled_outputs_are_a_relabeling() {
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        for kind in TransformKind::ALL {
            let nat = build_flowgraph(kind, 16, false).unwrap();
            let scr = build_flowgraph(kind, 16, true).unwrap();
            let x = &x[..nat.inputs.len()];
            let a = evaluate_flowgraph(&nat, x).unwrap();
            let b = evaluate_flowgraph(&scr, x).unwrap();
            for (p, &i) in scr.output_indices.iter().enumerate() {
                assert_eq!(b[p], a[i]);
            }
            assert_eq!(nat.additions(), scr.additions());
            assert_eq!(nat.multiplications(), scr.multiplications());
        }
    }

    #[test]
    fn dot_base_case() {
        let dot = export_dot(&build_flowgraph(Dst2, 2, false).unwrap());
        assert!(dot.starts_with("digraph DST2_2 {"));
        let inputs = dot
            .lines()
            .filter(|l| l.trim_start().starts_with('x') && l.contains("[shape=plaintext"))
            .count();
        let outputs = dot
            .lines()
            .filter(|l| l.contains("shape=doublecircle"))
            .count();
        let dashed = dot
            .lines()
            .filter(|l| l.contains("->") && l.contains("style=dashed"))
            .count();
        assert_eq!((inputs, outputs, dashed), (2, 2, 1));
    }

    #[test]
    fn dot_trig_labels() {
        let dot = export_dot(&build_flowgraph(Dst4, 2, false).unwrap());
        assert!(dot.contains("S_{1,3}"));
        assert!(dot.contains("C_{1,3}"));
        assert!(dot.contains("2ε"));
    }

    #[test]
    fn dot_is_deterministic() {
        let a = export_dot(&build_flowgraph(Dst3, 32, false).unwrap());
        let b = export_dot(&build_flowgraph(Dst3, 32, false).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn size_errors() {
        assert!(build_flowgraph(Dst2, 12, false).is_err());
        let g = build_flowgraph(Dst2, 4, false).unwrap();
        assert!(evaluate_flowgraph(&g, &[1.0; 3]).is_err());
    }
}
