//! Positive dependency graph, strongly connected components and loop atoms.

use std::collections::BTreeSet;

use crate::program::{AtomId, Program};

/// Positive dependency graph. An edge `head -> a` is present for every rule
/// with `a` in its positive body. Loop membership does not depend on the
/// orientation, so head-to-body is used throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    succ: Vec<Vec<AtomId>>,
}

impl DepGraph {
    pub fn num_nodes(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, a: AtomId) -> &[AtomId] {
        &self.succ[a.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (AtomId, AtomId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| tos.iter().map(move |&to| (AtomId(from as u32), to)))
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, from: AtomId, to: AtomId) -> bool {
        self.succ[from.index()].binary_search(&to).is_ok()
    }

    /// Edge list with symbolic names, one `from to` pair per line.
    pub fn render_edges(&self, program: &Program) -> String {
        let mut out = String::new();
        for (from, to) in self.edges() {
            out.push_str(program.name(from));
            out.push(' ');
            out.push_str(program.name(to));
            out.push('\n');
        }
        out
    }
}

pub fn build_dep_graph(program: &Program) -> DepGraph {
    let mut succ: Vec<BTreeSet<AtomId>> = vec![BTreeSet::new(); program.num_atoms()];
    for r in program.rules() {
        succ[r.head.index()].extend(r.body.pos.iter().copied());
    }
    DepGraph {
        succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopInfo {
    /// SCC index per atom, in Tarjan completion order (sinks first).
    pub scc_of: Vec<u32>,
    pub num_sccs: usize,
    /// Sorted loop atoms.
    pub loop_atoms: Vec<AtomId>,
    is_loop: Vec<bool>,
}

impl LoopInfo {
    pub fn is_loop_atom(&self, a: AtomId) -> bool {
        self.is_loop[a.index()]
    }

    pub fn is_tight(&self) -> bool {
        self.loop_atoms.is_empty()
    }
}

/// Loop atoms are the atoms on a directed cycle: members of an SCC with at
/// least two atoms, or atoms with a self-edge. Iterative Tarjan, linear time.
pub fn compute_loop_atoms(graph: &DepGraph) -> LoopInfo {
    const UNVISITED: u32 = u32::MAX;
    let n = graph.num_nodes();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut scc_of = vec![0u32; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut scc_sizes: Vec<usize> = Vec::new();
    let mut next_index = 0u32;
    // (node, next successor position)
    let mut call: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            let succ = graph.successors(AtomId(v));
            if top.1 < succ.len() {
                let w = succ[top.1].0;
                top.1 += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                let id = scc_sizes.len() as u32;
                let mut size = 0;
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    scc_of[w as usize] = id;
                    size += 1;
                    if w == v {
                        break;
                    }
                }
                scc_sizes.push(size);
            }
        }
    }

    let is_loop: Vec<bool> = (0..n)
        .map(|v| {
            let a = AtomId(v as u32);
            scc_sizes[scc_of[v] as usize] >= 2 || graph.has_edge(a, a)
        })
        .collect();
    let loop_atoms = (0..n as u32)
        .filter(|&v| is_loop[v as usize])
        .map(AtomId)
        .collect();
    LoopInfo {
        scc_of,
        num_sccs: scc_sizes.len(),
        loop_atoms,
        is_loop,
    }
}

pub fn is_tight(info: &LoopInfo) -> bool {
    info.is_tight()
}

pub fn analyze(program: &Program) -> (DepGraph, LoopInfo) {
    let g = build_dep_graph(program);
    let info = compute_loop_atoms(&g);
    (g, info)
}
