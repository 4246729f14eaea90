//! Weighted undirected graphs, the two random families used in the
//! experiments, Laplacians and a plain-text edge-list format.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::rng;

/// Number of fresh draws attempted before a random family gives up on
/// producing a connected graph.
pub const MAX_CONNECT_RETRIES: u64 = 100;

/// A weighted, undirected, connected graph with dense adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    /// `(i, j, w)` with `i < j`, sorted lexicographically.
    edges: Vec<(usize, usize, f64)>,
    adjacency: SymmetricMatrix,
    /// Node positions for geometric graphs.
    coords: Option<Vec<[f64; 2]>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges may be given in either
    /// orientation but each unordered pair at most once.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("graph must have at least one node".into()));
        }
        let mut list = Vec::new();
        let mut adj = DMatrix::zeros(n, n);
        let mut seen = BTreeSet::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::Parameter(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Parameter(format!("self loop at node {a}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Parameter(format!("edge ({a}, {b}) has invalid weight {w}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::Parameter(format!("duplicate edge ({i}, {j})")));
            }
            adj[(i, j)] = w;
            adj[(j, i)] = w;
            list.push((i, j, w));
        }
        list.sort_by_key(|&(i, j, _)| (i, j));
        let graph = Graph {
            n,
            edges: list,
            adjacency: SymmetricMatrix::try_from_matrix(adj)?,
            coords: None,
        };
        if !graph.is_connected() {
            return Err(Error::Parameter("graph is not connected".into()));
        }
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &SymmetricMatrix {
        &self.adjacency
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    /// Number of positive-weight edges incident to each node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j, w) in &self.edges {
            if w > 0.0 {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
        deg
    }

    /// Weighted degree of each node.
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.adjacency.as_matrix().row(i).sum())
            .collect()
    }

    /// Single component under positive-weight edges.
    pub fn is_connected(&self) -> bool {
        connected(self.n, &self.edges)
    }

    pub fn laplacian(&self, kind: LaplacianKind) -> SymmetricMatrix {
        match kind {
            LaplacianKind::Combinatorial => combinatorial_laplacian(self),
            LaplacianKind::Normalized => normalized_laplacian(self),
        }
    }

    /// Writes `n <count>` followed by one `i j w` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(self.edge_list_string().as_bytes())
    }

    pub fn edge_list_string(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for &(i, j, w) in &self.edges {
            let _ = writeln!(s, "{i} {j} {w}");
        }
        s
    }

    /// Reads the format produced by [`Graph::write_edge_list`]. Blank lines
    /// and lines starting with `#` are ignored.
    pub fn read_edge_list<R: BufRead>(input: R, source: &str) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: source.to_string(),
            msg: format!("line {line}: {msg}"),
        };
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(source, e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (n, fields.as_slice()) {
                (None, ["n", count]) => {
                    n = Some(count.parse::<usize>().map_err(|e| perr(lineno, e.to_string()))?);
                }
                (None, _) => return Err(perr(lineno, "expected header `n <count>`".into())),
                (Some(_), [i, j, w]) => {
                    let i = i.parse::<usize>().map_err(|e| perr(lineno, e.to_string()))?;
                    let j = j.parse::<usize>().map_err(|e| perr(lineno, e.to_string()))?;
                    let w = w.parse::<f64>().map_err(|e| perr(lineno, e.to_string()))?;
                    edges.push((i, j, w));
                }
                (Some(_), _) => return Err(perr(lineno, "expected `i j w`".into())),
            }
        }
        let n = n.ok_or_else(|| perr(0, "missing header".into()))?;
        Graph::from_edges(n, edges)
    }
}

fn connected(n: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut nbrs = vec![Vec::new(); n];
    for &(i, j, w) in edges {
        if w > 0.0 {
            nbrs[i].push(j);
            nbrs[j].push(i);
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &nbrs[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaplacianKind {
    /// `D - A`
    #[default]
    Combinatorial,
    /// `I - D^{-1/2} A D^{-1/2}`
    Normalized,
}

/// Small-world graph: a ring lattice where every node links to
/// `mean_degree / 2` neighbours on each side, with each lattice edge rewired
/// with probability `rewire_prob` to a uniformly chosen new endpoint.
///
/// Disconnected draws are discarded and redrawn from the next substream of
/// `seed`, up to [`MAX_CONNECT_RETRIES`] times.
pub fn build_watts_strogatz(n: usize, mean_degree: usize, rewire_prob: f64, seed: u64) -> Result<Graph> {
    if mean_degree == 0 || !mean_degree.is_multiple_of(2) || mean_degree >= n {
        return Err(Error::Parameter(format!(
            "mean_degree must be even with 0 < k < n, got k = {mean_degree}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&rewire_prob) {
        return Err(Error::Parameter(format!("rewire_prob {rewire_prob} not in [0, 1]")));
    }
    for attempt in 0..MAX_CONNECT_RETRIES {
        let mut rng = rng::substream(seed, &[attempt]);
        let edges = watts_strogatz_edges(n, mean_degree / 2, rewire_prob, &mut rng);
        if connected(n, &edges) {
            return Graph::from_edges(n, edges);
        }
    }
    Err(Error::Construction(format!(
        "no connected Watts-Strogatz graph after {MAX_CONNECT_RETRIES} draws"
    )))
}

fn watts_strogatz_edges<R: Rng>(n: usize, half: usize, p: f64, rng: &mut R) -> Vec<(usize, usize, f64)> {
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=half {
            let v = (u + j) % n;
            nbrs[u].insert(v);
            nbrs[v].insert(u);
        }
    }
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if !nbrs[u].contains(&v) || rng.random::<f64>() >= p {
                continue;
            }
            if nbrs[u].len() >= n - 1 {
                continue;
            }
            let target = loop {
                let w = rng.random_range(0..n);
                if w != u && !nbrs[u].contains(&w) {
                    break w;
                }
            };
            nbrs[u].remove(&v);
            nbrs[v].remove(&u);
            nbrs[u].insert(target);
            nbrs[target].insert(u);
        }
    }
    let mut edges = Vec::new();
    for (u, set) in nbrs.iter().enumerate() {
        for &v in set.range((u + 1)..) {
            edges.push((u, v, 1.0));
        }
    }
    edges
}

/// Gaussian kernel weight `exp(-d^2 / sigma^2)`.
pub fn gaussian_kernel(distance: f64, sigma: f64) -> f64 {
    (-(distance * distance) / (sigma * sigma)).exp()
}

/// Random geometric graph on the unit square: nodes within `radius` of each
/// other are joined with weight [`gaussian_kernel`]. Disconnected placements
/// are redrawn as in [`build_watts_strogatz`].
pub fn build_random_geometric(n: usize, radius: f64, sigma: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Parameter(format!(
            "radius and sigma must be positive, got r = {radius}, sigma = {sigma}"
        )));
    }
    for attempt in 0..MAX_CONNECT_RETRIES {
        let mut rng = rng::substream(seed, &[attempt]);
        let points: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
        let edges = geometric_edges(&points, radius, sigma);
        if connected(n, &edges) {
            let mut g = Graph::from_edges(n, edges)?;
            g.coords = Some(points);
            return Ok(g);
        }
    }
    Err(Error::Construction(format!(
        "no connected random geometric graph after {MAX_CONNECT_RETRIES} draws"
    )))
}

fn geometric_edges(points: &[[f64; 2]], radius: f64, sigma: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = euclidean(points[i], points[j]);
            if d <= radius {
                edges.push((i, j, gaussian_kernel(d, sigma)));
            }
        }
    }
    edges
}

pub fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `L = D - A`.
pub fn combinatorial_laplacian(g: &Graph) -> SymmetricMatrix {
    let mut l = -g.adjacency.as_matrix().clone();
    for (i, s) in g.strengths().into_iter().enumerate() {
        l[(i, i)] = s;
    }
    SymmetricMatrix::try_from_matrix(l).expect("negated symmetric adjacency stays symmetric")
}

/// `I - D^{-1/2} A D^{-1/2}`; nodes of zero strength get a zero row.
pub fn normalized_laplacian(g: &Graph) -> SymmetricMatrix {
    let inv_sqrt: Vec<f64> = g
        .strengths()
        .into_iter()
        .map(|s| if s > 0.0 { 1.0 / s.sqrt() } else { 0.0 })
        .collect();
    let a = g.adjacency.as_matrix();
    let m = DMatrix::from_fn(g.n, g.n, |i, j| {
        let off = -a[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
        if i == j && inv_sqrt[i] > 0.0 {
            1.0 + off
        } else {
            off
        }
    });
    SymmetricMatrix::symmetrize(m).expect("square")
}
