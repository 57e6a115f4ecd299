use super::Hst;
use crate::metric::MetricSpace;
use std::fmt;

/// Floating-point slack when comparing tree distances to metric distances.
const EXPANSION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HstViolation {
    pub property: &'static str,
    pub detail: String,
}

impl fmt::Display for HstViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.property, self.detail)
    }
}

fn push(out: &mut Vec<HstViolation>, property: &'static str, detail: String) {
    out.push(HstViolation { property, detail });
}

/// Checks an HST against the embedding requirements: leaves are exactly
/// the terminals, siblings share an edge length, lengths are powers of two
/// that halve going down, every cut under an edge of length `2^(j-1)` has
/// metric diameter below `2^j`, tree distances dominate metric distances,
/// and the level-0 cuts are singletons. Returns every violation found.
pub fn validate_hst(t: &Hst, m: &MetricSpace) -> Vec<HstViolation> {
    let mut out = Vec::new();
    let terminals = t.terminals();
    if let Some(&p) = terminals.iter().find(|&&p| p >= m.n()) {
        push(&mut out, "leaves", format!("terminal {p} is not a point of the metric"));
        return out;
    }
    for v in 0..t.node_count() {
        let children = t.children(v);
        if let Some(&first) = children.first() {
            let len = t.nodes()[first].edge_len;
            if children.iter().any(|&c| t.nodes()[c].edge_len != len) {
                push(&mut out, "uniform children", format!("children of node {v} differ in length"));
            }
        }
    }
    for node in t.edges() {
        let v = node.id;
        if t.edge_level(v).is_none() {
            push(&mut out, "power of two", format!("edge above node {v} has length {}", node.edge_len));
            continue;
        }
        let parent = node.parent.expect("edges have parents");
        if t.nodes()[parent].parent.is_some() && t.nodes()[parent].edge_len != 2.0 * node.edge_len {
            push(&mut out, "halving", format!("edge above node {v} is not half of its parent edge"));
        }
        let cut = t.leaves_under(v);
        let diam = m.diameter_of(cut);
        if diam >= 2.0 * node.edge_len {
            push(
                &mut out,
                "cut diameter",
                format!(
                    "cut below node {v} (edge length {}) has diameter {diam}",
                    node.edge_len
                ),
            );
        }
    }
    for (i, &u) in terminals.iter().enumerate() {
        for &v in &terminals[i + 1..] {
            let tree = t.tree_distance(u, v).expect("terminals are leaves");
            let d = m.d(u, v);
            if tree < d * (1.0 - EXPANSION_SLACK) {
                push(&mut out, "expanding", format!("T({u},{v}) = {tree} < d({u},{v}) = {d}"));
            }
        }
    }
    match t.cuts_at_level(0) {
        Ok(cuts) => {
            if let Some(c) = cuts.iter().find(|c| c.len() != 1) {
                push(&mut out, "level-0 cuts", format!("level-0 cut {c:?} is not a singleton"));
            }
        }
        Err(e) => push(&mut out, "level-0 cuts", e.to_string()),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hst::tests::two_leaf;
    use crate::hst::HstNode;
    use std::collections::BTreeMap;

    fn unit_pair() -> MetricSpace {
        MetricSpace::from_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn minimal_tree_is_valid() {
        assert!(validate_hst(&two_leaf(), &unit_pair()).is_empty());
    }

    #[test]
    fn short_leaf_edges_break_expansion() {
        let nodes = vec![
            HstNode { id: 0, level: 1, parent: None, edge_len: 0.0 },
            HstNode { id: 1, level: 0, parent: Some(0), edge_len: 0.25 },
            HstNode { id: 2, level: 0, parent: Some(0), edge_len: 0.25 },
        ];
        let t = Hst::from_nodes(1, nodes, BTreeMap::from([(0, 1), (1, 2)])).unwrap();
        let report = validate_hst(&t, &unit_pair());
        assert!(report.iter().any(|v| v.property == "expanding"), "{report:?}");
        assert!(report.iter().any(|v| v.to_string().contains("expanding")));
    }

    #[test]
    fn wide_cut_breaks_diameter() {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        // Points 0 and 2 are 3 apart but share one length-1 edge.
        let nodes = vec![
            HstNode { id: 0, level: 2, parent: None, edge_len: 0.0 },
            HstNode { id: 1, level: 0, parent: Some(0), edge_len: 1.0 },
            HstNode { id: 2, level: -1, parent: Some(1), edge_len: 0.5 },
            HstNode { id: 3, level: -1, parent: Some(1), edge_len: 0.5 },
            HstNode { id: 4, level: 0, parent: Some(0), edge_len: 1.0 },
        ];
        let t = Hst::from_nodes(2, nodes, BTreeMap::from([(0, 2), (2, 3), (1, 4)])).unwrap();
        let report = validate_hst(&t, &m);
        assert!(report.iter().any(|v| v.to_string().contains("cut diameter")), "{report:?}");
    }

    #[test]
    fn uneven_children_are_flagged() {
        let nodes = vec![
            HstNode { id: 0, level: 1, parent: None, edge_len: 0.0 },
            HstNode { id: 1, level: 0, parent: Some(0), edge_len: 1.0 },
            HstNode { id: 2, level: 1, parent: Some(0), edge_len: 2.0 },
        ];
        let t = Hst::from_nodes(1, nodes, BTreeMap::from([(0, 1), (1, 2)])).unwrap();
        let report = validate_hst(&t, &unit_pair());
        assert!(report.iter().any(|v| v.property == "uniform children"));
    }
}
