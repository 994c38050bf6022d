//! Admissible graphs: vertices of the first type (inner), lower and upper
//! vertices of the second type, oriented edges and per-vertex label orders.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::GraphError;

/// Vertex of an admissible graph; indices are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Vertex {
    Inner(usize),
    Lower(usize),
    Upper(usize),
}

impl Vertex {
    pub fn is_inner(self) -> bool {
        matches!(self, Vertex::Inner(_))
    }

    pub fn token(self) -> String {
        match self {
            Vertex::Inner(k) => format!("i{k}"),
            Vertex::Lower(k) => format!("d{k}"),
            Vertex::Upper(k) => format!("u{k}"),
        }
    }

    pub fn parse(tok: &str) -> Option<Vertex> {
        let (kind, idx) = tok.split_at(1.min(tok.len()));
        let k: usize = idx.parse().ok()?;
        if k == 0 {
            return None;
        }
        match kind {
            "i" => Some(Vertex::Inner(k)),
            "d" => Some(Vertex::Lower(k)),
            "u" => Some(Vertex::Upper(k)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub src: Vertex,
    pub dst: Vertex,
}

impl Edge {
    pub fn new(src: Vertex, dst: Vertex) -> Self {
        Edge { src, dst }
    }

    pub fn class(&self) -> EdgeClass {
        if self.src.is_inner() && self.dst.is_inner() {
            EdgeClass::Inner
        } else {
            EdgeClass::External
        }
    }

    pub fn is_inner(&self) -> bool {
        self.class() == EdgeClass::Inner
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeClass {
    Inner,
    External,
}

/// Clause of the admissibility definition violated by a graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Clause {
    /// `3s + m + n >= 3`, vertex indices in range.
    Item1,
    /// Edge orientation and endpoint types.
    Item2,
    /// Loops and repeated external edges.
    Item3,
    /// Star/End label orders.
    Item4,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let item = match self.clause {
            Clause::Item1 => 1,
            Clause::Item2 => 2,
            Clause::Item3 => 3,
            Clause::Item4 => 4,
        };
        write!(f, "violation(item {item}): {}", self.detail)
    }
}

/// Labeled admissible graph.  `star[k-1]` lists indices into `edges` of the
/// out-edges of inner vertex `k` in label order, `end[k-1]` its in-edges.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AdmissibleGraph {
    pub s: usize,
    pub m: usize,
    pub n: usize,
    pub edges: Vec<Edge>,
    pub star: Vec<Vec<usize>>,
    pub end: Vec<Vec<usize>>,
}

/// `m + n + 3s - 3`, the weighted edge count `2#E_inner + #E_external` of
/// graphs whose form has top degree on `K(m,n;s)`.
pub fn edge_budget(m: usize, n: usize, s: usize) -> i64 {
    m as i64 + n as i64 + 3 * s as i64 - 3
}

impl AdmissibleGraph {
    /// Graph with the given edges and labels in edge-list order.
    pub fn with_default_labels(s: usize, m: usize, n: usize, edges: Vec<Edge>) -> Self {
        let mut star = vec![Vec::new(); s];
        let mut end = vec![Vec::new(); s];
        for (idx, e) in edges.iter().enumerate() {
            if let Vertex::Inner(k) = e.src {
                if k >= 1 && k <= s {
                    star[k - 1].push(idx);
                }
            }
            if let Vertex::Inner(k) = e.dst {
                if k >= 1 && k <= s {
                    end[k - 1].push(idx);
                }
            }
        }
        AdmissibleGraph { s, m, n, edges, star, end }
    }

    pub fn inner_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_inner()).count()
    }

    pub fn external_edge_count(&self) -> usize {
        self.edges.len() - self.inner_edge_count()
    }

    /// `2#E_inner + #E_external`.
    pub fn weighted_edge_count(&self) -> usize {
        2 * self.inner_edge_count() + self.external_edge_count()
    }

    /// Total valence of inner vertex `k` (1-based).
    pub fn valence(&self, k: usize) -> usize {
        self.star[k - 1].len() + self.end[k - 1].len()
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let v = |clause, detail: String| Err(Violation { clause, detail });
        if 3 * self.s + self.m + self.n < 3 {
            return v(Clause::Item1, format!("3s+m+n = {} < 3", 3 * self.s + self.m + self.n));
        }
        let in_range = |x: Vertex| match x {
            Vertex::Inner(k) => k >= 1 && k <= self.s,
            Vertex::Lower(k) => k >= 1 && k <= self.m,
            Vertex::Upper(k) => k >= 1 && k <= self.n,
        };
        for e in &self.edges {
            if !in_range(e.src) || !in_range(e.dst) {
                return v(Clause::Item1, format!("edge {} -> {} uses a vertex out of range", e.src.token(), e.dst.token()));
            }
        }
        for e in &self.edges {
            let src_ok = matches!(e.src, Vertex::Inner(_) | Vertex::Upper(_));
            let dst_ok = matches!(e.dst, Vertex::Inner(_) | Vertex::Lower(_));
            if !src_ok || !dst_ok {
                return v(Clause::Item2, format!("edge {} -> {} has a forbidden orientation", e.src.token(), e.dst.token()));
            }
            if !e.src.is_inner() && !e.dst.is_inner() {
                return v(Clause::Item2, format!("edge {} -> {} joins two second-type vertices", e.src.token(), e.dst.token()));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.src == e.dst {
                return v(Clause::Item3, format!("loop at {}", e.src.token()));
            }
            if !e.is_inner() && !seen.insert(*e) {
                return v(Clause::Item3, format!("repeated external edge {} -> {}", e.src.token(), e.dst.token()));
            }
        }
        if self.star.len() != self.s || self.end.len() != self.s {
            return v(Clause::Item4, "label blocks do not match the inner vertex count".into());
        }
        for k in 1..=self.s {
            let want_star: BTreeSet<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].src == Vertex::Inner(k)).collect();
            let want_end: BTreeSet<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].dst == Vertex::Inner(k)).collect();
            for (name, labels, want) in [("star", &self.star[k - 1], want_star), ("end", &self.end[k - 1], want_end)] {
                let got: BTreeSet<usize> = labels.iter().copied().collect();
                if got.len() != labels.len() || got != want {
                    return v(Clause::Item4, format!("{name} labels of i{k} are not a permutation of its edges"));
                }
            }
        }
        Ok(())
    }

    /// Equivalent graph with edges sorted and labels re-expressed; among
    /// reorderings of identical parallel edges the lexicographically least
    /// label data is chosen.
    pub fn canonical(&self) -> AdmissibleGraph {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| self.edges[i]);
        // groups of identical edges (positions in sorted order)
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for pos in 0..order.len() {
            if pos > 0 && self.edges[order[pos]] == self.edges[order[pos - 1]] {
                groups.last_mut().unwrap().push(pos);
            } else {
                groups.push(vec![pos]);
            }
        }
        let edges: Vec<Edge> = order.iter().map(|&i| self.edges[i]).collect();
        let mut best: Option<AdmissibleGraph> = None;
        // enumerate assignments of old parallel edges to new positions
        let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g.len())).collect();
        let mut choice = vec![0usize; groups.len()];
        loop {
            let mut new_of_old = vec![0usize; self.edges.len()];
            for (g, group) in groups.iter().enumerate() {
                let perm = &group_perms[g][choice[g]];
                for (j, &pos) in group.iter().enumerate() {
                    new_of_old[order[group[perm[j]]]] = pos;
                }
            }
            let relabel = |v: &Vec<usize>| v.iter().map(|&i| new_of_old[i]).collect::<Vec<_>>();
            let cand = AdmissibleGraph {
                s: self.s,
                m: self.m,
                n: self.n,
                edges: edges.clone(),
                star: self.star.iter().map(relabel).collect(),
                end: self.end.iter().map(relabel).collect(),
            };
            if best.as_ref().is_none_or(|b| (&cand.star, &cand.end) < (&b.star, &b.end)) {
                best = Some(cand);
            }
            let mut g = 0;
            loop {
                if g == groups.len() {
                    return best.unwrap();
                }
                choice[g] += 1;
                if choice[g] < group_perms[g].len() {
                    break;
                }
                choice[g] = 0;
                g += 1;
            }
        }
    }

    /// Canonical identity of `(s, m, n, edges, labels)`.
    pub fn canonical_key(&self) -> String {
        self.canonical().compact()
    }

    /// Key of the unlabeled edge multiset.
    pub fn shape_key(&self) -> String {
        let mut edges = self.edges.clone();
        edges.sort();
        let body: Vec<String> = edges.iter().map(|e| format!("{}{}", e.src.token(), e.dst.token())).collect();
        format!("{},{},{};{}", self.s, self.m, self.n, body.join(","))
    }

    fn compact(&self) -> String {
        let edges: Vec<String> = self.edges.iter().map(|e| format!("{}{}", e.src.token(), e.dst.token())).collect();
        let mut out = format!("{},{},{};{}", self.s, self.m, self.n, edges.join(","));
        for k in 0..self.s {
            let st: Vec<String> = self.star[k].iter().map(|i| i.to_string()).collect();
            let en: Vec<String> = self.end[k].iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(";s{}:{};e{}:{}", k + 1, st.join("."), k + 1, en.join(".")));
        }
        out
    }

    /// Sign of the label orders relative to sorted-edge order: the product over
    /// inner vertices of the signs of the Star and End permutations.  Well
    /// defined because parallel edges occur in one Star and one End block.
    pub fn label_sign(&self) -> i32 {
        let c = self.canonical();
        c.star.iter().chain(c.end.iter()).map(|v| perm_sign(v)).product()
    }

    /// The same shape with every label block in sorted-edge order.
    pub fn reference_labeling(&self) -> AdmissibleGraph {
        let mut edges = self.edges.clone();
        edges.sort();
        AdmissibleGraph::with_default_labels(self.s, self.m, self.n, edges)
    }

    /// Renames inner vertices: new vertex `j+1` is old vertex `perm[j]+1`.
    /// Edge order and label blocks travel with their vertices.
    pub fn relabel_inner(&self, perm: &[usize]) -> AdmissibleGraph {
        assert_eq!(perm.len(), self.s);
        let mut new_of_old = vec![0usize; self.s];
        for (j, &old) in perm.iter().enumerate() {
            new_of_old[old] = j;
        }
        let map = |v: Vertex| match v {
            Vertex::Inner(k) => Vertex::Inner(new_of_old[k - 1] + 1),
            other => other,
        };
        AdmissibleGraph {
            s: self.s,
            m: self.m,
            n: self.n,
            edges: self.edges.iter().map(|e| Edge::new(map(e.src), map(e.dst))).collect(),
            star: perm.iter().map(|&old| self.star[old].clone()).collect(),
            end: perm.iter().map(|&old| self.end[old].clone()).collect(),
        }
    }

    /// `#Star(k) + #End(k) − 2` for each inner vertex: the degree of the
    /// tensor that can sit there.
    pub fn vertex_degrees(&self) -> Vec<i64> {
        (1..=self.s).map(|k| self.valence(k) as i64 - 2).collect()
    }

    /// Serializes to the text graph format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.s, self.m, self.n);
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.src.token(), e.dst.token()));
        }
        for k in 0..self.s {
            let st: Vec<String> = self.star[k].iter().map(|i| format!("e{}", i + 1)).collect();
            out.push_str(&format!("star i{}: {}\n", k + 1, st.join(" ")));
            let en: Vec<String> = self.end[k].iter().map(|i| format!("e{}", i + 1)).collect();
            out.push_str(&format!("end i{}: {}\n", k + 1, en.join(" ")));
        }
        out
    }

    /// Parses one graph in the text format.  Missing label blocks default to
    /// edge-list order.
    pub fn from_text(text: &str) -> Result<AdmissibleGraph, GraphError> {
        let graphs = parse_graphs(text)?;
        match graphs.len() {
            1 => Ok(graphs.into_iter().next().unwrap()),
            k => Err(GraphError::Parse { line: 0, msg: format!("expected one graph, found {k}") }),
        }
    }
}

/// `(s, m, n, edges, star, end)` of a graph being read.
type PartialGraph = (usize, usize, usize, Vec<Edge>, Vec<Option<Vec<usize>>>, Vec<Option<Vec<usize>>>);

/// Parses a file holding one or more graphs separated by blank lines or `---`.
pub fn parse_graphs(text: &str) -> Result<Vec<AdmissibleGraph>, GraphError> {
    let mut out = Vec::new();
    let mut cur: Option<PartialGraph> = None;
    let finish = |c: Option<PartialGraph>, out: &mut Vec<AdmissibleGraph>| {
        if let Some((s, m, n, edges, star, end)) = c {
            let mut g = AdmissibleGraph::with_default_labels(s, m, n, edges);
            for k in 0..s {
                if let Some(v) = &star[k] {
                    g.star[k] = v.clone();
                }
                if let Some(v) = &end[k] {
                    g.end[k] = v.clone();
                }
            }
            out.push(g);
        }
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        let err = |msg: String| GraphError::Parse { line: lineno + 1, msg };
        if line.is_empty() || line == "---" {
            finish(cur.take(), &mut out);
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if cur.is_none() {
            if toks.len() != 3 {
                return Err(err("expected header 's m n'".into()));
            }
            let nums: Result<Vec<usize>, _> = toks.iter().map(|t| t.parse::<usize>()).collect();
            let nums = nums.map_err(|_| err("header must be three integers".into()))?;
            cur = Some((nums[0], nums[1], nums[2], Vec::new(), vec![None; nums[0]], vec![None; nums[0]]));
            continue;
        }
        let c = cur.as_mut().unwrap();
        if toks[0] == "star" || toks[0] == "end" {
            let rest = line[toks[0].len()..].trim();
            let (vtok, labels) = rest.split_once(':').ok_or_else(|| err("label block needs ':'".into()))?;
            let k = match Vertex::parse(vtok.trim()) {
                Some(Vertex::Inner(k)) if k <= c.0 => k,
                _ => return Err(err(format!("bad inner vertex '{}'", vtok.trim()))),
            };
            let mut idx = Vec::new();
            for l in labels.split_whitespace() {
                let e: usize = l
                    .strip_prefix('e')
                    .and_then(|x| x.parse().ok())
                    .filter(|&e: &usize| e >= 1 && e <= c.3.len())
                    .ok_or_else(|| err(format!("bad edge label '{l}'")))?;
                idx.push(e - 1);
            }
            if toks[0] == "star" {
                c.4[k - 1] = Some(idx);
            } else {
                c.5[k - 1] = Some(idx);
            }
            continue;
        }
        if toks.len() != 2 {
            return Err(err("expected edge 'src dst'".into()));
        }
        let src = Vertex::parse(toks[0]).ok_or_else(|| err(format!("bad vertex '{}'", toks[0])))?;
        let dst = Vertex::parse(toks[1]).ok_or_else(|| err(format!("bad vertex '{}'", toks[1])))?;
        c.3.push(Edge::new(src, dst));
    }
    finish(cur.take(), &mut out);
    Ok(out)
}

/// All admissible graphs with `2#E_inner + #E_external = budget`, with every
/// label ordering, deduplicated by canonical key and sorted by it.
pub fn enumerate(m: usize, n: usize, s: usize, budget: usize) -> Vec<AdmissibleGraph> {
    let mut keyed: Vec<(String, AdmissibleGraph)> = enumerate_shapes(m, n, s, budget)
        .into_iter()
        .flat_map(|edges| all_labelings(s, m, n, &edges))
        .map(|g| {
            let c = g.canonical();
            (c.compact(), c)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, g)| g).collect()
}

/// Sorted edge multisets with the requested weighted edge count.
pub fn enumerate_shapes(m: usize, n: usize, s: usize, budget: usize) -> Vec<Vec<Edge>> {
    if 3 * s + m + n < 3 {
        return Vec::new();
    }
    let mut slots: Vec<(Edge, usize, usize)> = Vec::new(); // edge, weight, max multiplicity
    for a in 1..=s {
        for b in 1..=s {
            if a != b {
                slots.push((Edge::new(Vertex::Inner(a), Vertex::Inner(b)), 2, budget / 2));
            }
        }
        for j in 1..=m {
            slots.push((Edge::new(Vertex::Inner(a), Vertex::Lower(j)), 1, 1));
        }
        for j in 1..=n {
            slots.push((Edge::new(Vertex::Upper(j), Vertex::Inner(a)), 1, 1));
        }
    }
    let mut out = Vec::new();
    let mut mult = vec![0usize; slots.len()];
    fn rec(i: usize, left: usize, slots: &[(Edge, usize, usize)], mult: &mut Vec<usize>, out: &mut Vec<Vec<Edge>>) {
        if i == slots.len() {
            if left == 0 {
                let mut edges = Vec::new();
                for (k, &c) in mult.iter().enumerate() {
                    edges.extend(std::iter::repeat_n(slots[k].0, c));
                }
                edges.sort();
                out.push(edges);
            }
            return;
        }
        let (_, w, cap) = slots[i];
        for c in 0..=cap {
            if c * w > left {
                break;
            }
            mult[i] = c;
            rec(i + 1, left - c * w, slots, mult, out);
        }
        mult[i] = 0;
    }
    rec(0, budget, &slots, &mut mult, &mut out);
    out.sort();
    out
}

/// Every Star/End label ordering of a fixed edge list.
pub fn all_labelings(s: usize, m: usize, n: usize, edges: &[Edge]) -> Vec<AdmissibleGraph> {
    let base = AdmissibleGraph::with_default_labels(s, m, n, edges.to_vec());
    let blocks: Vec<Vec<usize>> = base.star.iter().chain(base.end.iter()).cloned().collect();
    let perms: Vec<Vec<Vec<usize>>> = blocks.iter().map(|b| permutations(b.len())).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; blocks.len()];
    loop {
        let mut g = base.clone();
        for (bi, block) in blocks.iter().enumerate() {
            let labels: Vec<usize> = perms[bi][choice[bi]].iter().map(|&p| block[p]).collect();
            if bi < s {
                g.star[bi] = labels;
            } else {
                g.end[bi - s] = labels;
            }
        }
        out.push(g);
        let mut b = 0;
        loop {
            if b == blocks.len() {
                return out;
            }
            choice[b] += 1;
            if choice[b] < perms[b].len() {
                break;
            }
            choice[b] = 0;
            b += 1;
        }
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Sign of a sequence of distinct integers relative to its sorted order.
pub fn perm_sign(v: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma3() -> AdmissibleGraph {
        AdmissibleGraph::with_default_labels(
            1,
            2,
            1,
            vec![
                Edge::new(Vertex::Inner(1), Vertex::Lower(1)),
                Edge::new(Vertex::Inner(1), Vertex::Lower(2)),
                Edge::new(Vertex::Upper(1), Vertex::Inner(1)),
            ],
        )
    }

    #[test]
    fn budget_examples() {
        assert_eq!(edge_budget(2, 1, 1), 3);
        assert_eq!(edge_budget(1, 2, 1), 3);
        assert_eq!(edge_budget(2, 2, 2), 7);
    }

    #[test]
    fn gamma3_has_two_labelings() {
        let gs = enumerate(2, 1, 1, 3);
        assert_eq!(gs.len(), 2);
        assert!(gs.iter().all(|g| g.shape_key() == gamma3().shape_key()));
        assert_ne!(gs[0].canonical_key(), gs[1].canonical_key());
        assert_eq!(gs[0].label_sign() * gs[1].label_sign(), -1);
    }

    #[test]
    fn edgeless_product_graph() {
        let gs = enumerate(2, 1, 0, 0);
        assert_eq!(gs.len(), 1);
        assert!(gs[0].edges.is_empty());
        assert!(gs[0].validate().is_ok());
        assert!(enumerate(1, 1, 0, 0).is_empty());
        assert!(enumerate(1, 1, 0, 3).is_empty());
    }

    #[test]
    fn violations_name_the_clause() {
        let mut g = gamma3();
        g.edges.push(Edge::new(Vertex::Lower(1), Vertex::Upper(1)));
        assert_eq!(g.validate().unwrap_err().clause, Clause::Item2);

        let g = AdmissibleGraph::with_default_labels(
            1,
            0,
            1,
            vec![Edge::new(Vertex::Upper(1), Vertex::Inner(1)), Edge::new(Vertex::Upper(1), Vertex::Inner(1))],
        );
        assert_eq!(g.validate().unwrap_err().clause, Clause::Item3);

        let mut g = gamma3();
        g.star[0] = vec![0];
        assert_eq!(g.validate().unwrap_err().clause, Clause::Item4);
    }

    #[test]
    fn parallel_inner_edges_dedupe() {
        let e = Edge::new(Vertex::Inner(1), Vertex::Inner(2));
        let g = AdmissibleGraph::with_default_labels(2, 0, 1, vec![e, e]);
        let mut h = g.clone();
        h.star[0] = vec![1, 0];
        h.end[1] = vec![1, 0];
        assert_eq!(g.canonical_key(), h.canonical_key());
        assert_eq!(g.label_sign(), h.label_sign());
    }

    #[test]
    fn text_round_trip_keeps_key() {
        for g in enumerate(2, 1, 2, 6) {
            let back = AdmissibleGraph::from_text(&g.to_text()).unwrap();
            assert_eq!(back.canonical_key(), g.canonical_key());
        }
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
