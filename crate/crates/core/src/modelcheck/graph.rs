//! Product of a finite transition system with a Büchi automaton and its
//! emptiness check.

use alloc::vec;
use alloc::vec::Vec;

use super::buchi::BuchiAutomaton;

pub(crate) struct ProductGraph {
    automaton_states: usize,
    /// Dense index `p * Q + q` to product state.
    slot: Vec<u32>,
    succ: Vec<Vec<u32>>,
    /// Automaton component of each product state.
    aut: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl ProductGraph {
    /// Builds all product states `(p, q)` where position `p` satisfies
    /// the literals of automaton state `q`.
    pub(crate) fn build<S, L>(positions: usize, mut succ: S, a: &BuchiAutomaton, mut holds: L) -> Self
    where
        S: FnMut(usize) -> Vec<usize>,
        L: FnMut(usize, (usize, bool)) -> bool,
    {
        let q = a.state_count();
        let mut slot = vec![NONE; positions * q];
        let mut aut = Vec::new();
        let mut pos = Vec::new();
        for p in 0..positions {
            for s in 0..q {
                if a.labels[s].iter().all(|&l| holds(p, l)) {
                    slot[p * q + s] = aut.len() as u32;
                    aut.push(s as u32);
                    pos.push(p);
                }
            }
        }
        let mut edges = vec![Vec::new(); aut.len()];
        for (i, e) in edges.iter_mut().enumerate() {
            let s = aut[i] as usize;
            for p2 in succ(pos[i]) {
                for &s2 in &a.successors[s] {
                    let t = slot[p2 * q + s2];
                    if t != NONE {
                        e.push(t);
                    }
                }
            }
        }
        ProductGraph {
            automaton_states: q,
            slot,
            succ: edges,
            aut,
        }
    }

    pub(crate) fn state(&self, p: usize, q: usize) -> Option<usize> {
        match self.slot[p * self.automaton_states + q] {
            NONE => None,
            s => Some(s as usize),
        }
    }

    /// Marks the product states from which some run visits every
    /// acceptance set infinitely often.
    pub(crate) fn accepting_states(&self, a: &BuchiAutomaton) -> Vec<bool> {
        let n = self.aut.len();
        let comp = sccs(&self.succ);
        let count = comp.iter().copied().max().map_or(0, |c| c as usize + 1);
        let mut nontrivial = vec![false; count];
        let mut hits = vec![vec![false; a.acceptance.len()]; count];
        for v in 0..n {
            let c = comp[v] as usize;
            if self.succ[v].iter().any(|&w| comp[w as usize] as usize == c) {
                nontrivial[c] = true;
            }
            for (i, set) in a.acceptance.iter().enumerate() {
                if set[self.aut[v] as usize] {
                    hits[c][i] = true;
                }
            }
        }
        let good_comp: Vec<bool> = (0..count)
            .map(|c| nontrivial[c] && hits[c].iter().all(|&h| h))
            .collect();
        let mut pred = vec![Vec::new(); n];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                pred[w as usize].push(v as u32);
            }
        }
        let mut good = vec![false; n];
        let mut stack = Vec::new();
        for v in 0..n {
            if good_comp[comp[v] as usize] {
                good[v] = true;
                stack.push(v);
            }
        }
        while let Some(v) = stack.pop() {
            for &u in &pred[v] {
                if !good[u as usize] {
                    good[u as usize] = true;
                    stack.push(u as usize);
                }
            }
        }
        good
    }
}

/// Strongly connected components by an iterative Tarjan traversal.
/// Returns the component index of every vertex.
pub(crate) fn sccs(succ: &[Vec<u32>]) -> Vec<u32> {
    let n = succ.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![u32::MAX; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        call.push((root as u32, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let v = v as usize;
            if *i < succ[v].len() {
                let w = succ[v][*i] as usize;
                *i += 1;
                if index[w] == u32::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    let u = u as usize;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack") as usize;
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
