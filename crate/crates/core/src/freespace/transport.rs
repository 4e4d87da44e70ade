//! Exact network simplex for uncapacitated transshipment on a complete graph.
//!
//! Solves `min Σ c(i,j)·x(i,j)` subject to `out(i) − in(i) = supply(i)`,
//! `x ≥ 0`, with one arc in each direction between every pair of nodes. The
//! initial basis routes every supply through an artificial root with big-M arc
//! costs; pivots follow Bland's rule (lowest-index entering arc with negative
//! reduced cost, lowest-index leaving arc among ties), so degenerate pivots
//! cannot cycle.
//!
//! At optimality the node potentials `π` satisfy `π(i) − π(j) ≤ c(i,j)` on
//! every real arc, with equality on arcs carrying flow, and
//! `Σ supply(i)·π(i)` equals the optimal cost.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug)]
struct Arc {
    from: usize,
    to: usize,
    cost: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transshipment {
    pub cost: Rational,
    /// `(from, to, amount)` for every arc with positive flow.
    pub flows: Vec<(usize, usize, Rational)>,
    pub potential: Vec<Rational>,
    pub pivots: usize,
}

/// `cost` must be square with nonnegative off-diagonal entries and `supply`
/// must sum to zero.
pub fn solve(cost: &[Vec<Rational>], supply: &[Rational]) -> Result<Transshipment> {
    let n = supply.len();
    if cost.len() != n || cost.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            row: 0,
            expected: n,
            found: cost.len(),
        });
    }
    if !supply.iter().sum::<Rational>().is_zero() {
        return Err(Error::Precondition("supplies must balance".into()));
    }
    let root = n;
    let big_m = cost.iter().flatten().max().cloned().unwrap_or_default() + Rational::one();

    let mut arcs = Vec::with_capacity(n * n + n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                arcs.push(Arc {
                    from: i,
                    to: j,
                    cost: cost[i][j].clone(),
                });
            }
        }
    }
    let real_arcs = arcs.len();
    let mut flow = vec![Rational::zero(); real_arcs];
    let mut in_tree = vec![false; real_arcs];
    for (i, b) in supply.iter().enumerate() {
        let (from, to) = if b.is_negative() { (root, i) } else { (i, root) };
        arcs.push(Arc {
            from,
            to,
            cost: big_m.clone(),
        });
        flow.push(b.abs());
        in_tree.push(true);
    }

    let nodes = n + 1;
    let mut pivots = 0;
    loop {
        let tree = TreeView::build(nodes, root, &arcs, &in_tree);
        let reduced = |a: &Arc| &a.cost - &tree.potential[a.from] + &tree.potential[a.to];
        let entering = (0..arcs.len()).find(|&e| !in_tree[e] && reduced(&arcs[e]).is_negative());
        let Some(entering) = entering else {
            return finish(n, &arcs, &flow, real_arcs, tree.potential, pivots);
        };

        // Cycle: entering arc p→q, then the tree path q → lca → p.
        let (p, q) = (arcs[entering].from, arcs[entering].to);
        let mut along = Vec::new();
        let mut against = Vec::new();
        let (mut x, mut y) = (q, p);
        let mut down_side = Vec::new();
        while x != y {
            if tree.depth[x] >= tree.depth[y] {
                let (parent, arc) = tree.parent[x].expect("non-root node has a parent");
                // traversed x → parent
                if arcs[arc].from == x {
                    along.push(arc);
                } else {
                    against.push(arc);
                }
                x = parent;
            } else {
                let (parent, arc) = tree.parent[y].expect("non-root node has a parent");
                down_side.push((parent, y, arc));
                y = parent;
            }
        }
        for (parent, child, arc) in down_side {
            // traversed parent → child
            if arcs[arc].from == parent && arcs[arc].to == child {
                along.push(arc);
            } else {
                against.push(arc);
            }
        }
        let Some(theta) = against.iter().map(|&a| flow[a].clone()).min() else {
            return Err(Error::Precondition(
                "negative-cost cycle: distances do not form a metric".into(),
            ));
        };
        let leaving = *against
            .iter()
            .filter(|&&a| flow[a] == theta)
            .min()
            .expect("minimum is attained");
        flow[entering] += &theta;
        for &a in &along {
            flow[a] += &theta;
        }
        for &a in &against {
            flow[a] -= &theta;
        }
        in_tree[leaving] = false;
        in_tree[entering] = true;
        pivots += 1;
    }
}

fn finish(
    n: usize,
    arcs: &[Arc],
    flow: &[Rational],
    real_arcs: usize,
    mut potential: Vec<Rational>,
    pivots: usize,
) -> Result<Transshipment> {
    if flow[real_arcs..].iter().any(Rational::is_positive) {
        return Err(Error::Invariant("artificial arc carries flow at optimality".into()));
    }
    let flows: Vec<(usize, usize, Rational)> = (0..real_arcs)
        .filter(|&a| flow[a].is_positive())
        .map(|a| (arcs[a].from, arcs[a].to, flow[a].clone()))
        .collect();
    let cost = (0..real_arcs).map(|a| &arcs[a].cost * &flow[a]).sum();
    potential.truncate(n);
    Ok(Transshipment {
        cost,
        flows,
        potential,
        pivots,
    })
}

struct TreeView {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    potential: Vec<Rational>,
}

impl TreeView {
    fn build(nodes: usize, root: usize, arcs: &[Arc], in_tree: &[bool]) -> Self {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for (idx, arc) in arcs.iter().enumerate().filter(|(i, _)| in_tree[*i]) {
            adj[arc.from].push((arc.to, idx));
            adj[arc.to].push((arc.from, idx));
        }
        let mut parent = vec![None; nodes];
        let mut depth = vec![0; nodes];
        let mut potential = vec![Rational::zero(); nodes];
        let mut seen = vec![false; nodes];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, idx) in &adj[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = Some((x, idx));
                depth[y] = depth[x] + 1;
                // tree arcs have zero reduced cost: c(i,j) = π(i) − π(j)
                potential[y] = if arcs[idx].from == x {
                    &potential[x] - &arcs[idx].cost
                } else {
                    &potential[x] + &arcs[idx].cost
                };
                queue.push_back(y);
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "basis must span all nodes");
        TreeView {
            parent,
            depth,
            potential,
        }
    }
}
