//! Greedy min-fill triangulation over bitset adjacency.

use crate::network::Qcn;

/// A chordal supergraph of a set of known edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordalStructure {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    /// Edges added by the elimination, `i < j`, in the order they were added.
    pub fill_edges: Vec<(usize, usize)>,
    /// Elimination order that produced the fill.
    pub elimination_order: Vec<usize>,
}

fn bit(row: &[u64], v: usize) -> bool {
    row[v / 64] >> (v % 64) & 1 == 1
}

fn set_bit(row: &mut [u64], v: usize) {
    row[v / 64] |= 1 << (v % 64);
}

fn members(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + b)
        })
    })
}

impl ChordalStructure {
    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i != j && bit(self.row(i), j)
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        members(self.row(v))
    }

    /// Vertices adjacent to both `i` and `j`, ascending.
    pub fn common_neighbours(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = (self.row(i), self.row(j));
        (0..self.words).flat_map(move |w| {
            let mut x = a[w] & b[w];
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let t = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + t)
            })
        })
    }

    /// All edges of the chordal graph, `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| {
                self.neighbours(i)
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    /// Triangles `i < j < k` of the chordal graph.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for (i, j) in self.edges() {
            for k in self.common_neighbours(i, j).filter(|&k| k > j) {
                out.push([i, j, k]);
            }
        }
        out
    }

    /// Checks chordality with a maximum cardinality search followed by a
    /// perfect elimination ordering test.
    pub fn is_chordal(&self) -> bool {
        let n = self.n;
        let mut weight = vec![0usize; n];
        let mut numbered = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !numbered[v])
                .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
                .unwrap();
            numbered[v] = true;
            order.push(v);
            for u in self.neighbours(v) {
                if !numbered[u] {
                    weight[u] += 1;
                }
            }
        }
        // reverse of the search order is a perfect elimination order iff chordal
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (k, &v) in order.iter().enumerate() {
                p[v] = k;
            }
            p
        };
        for &v in &order {
            let earlier: Vec<usize> = self.neighbours(v).filter(|&u| pos[u] < pos[v]).collect();
            if let Some(&parent) = earlier.iter().max_by_key(|&&u| pos[u]) {
                for &u in &earlier {
                    if u != parent && !self.contains(u, parent) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Chordal supergraph of `known_edges` by greedy min-fill elimination. Ties
/// go to the lowest vertex index, so the result is deterministic.
pub fn triangulate(q: &Qcn, known_edges: &[(usize, usize)]) -> ChordalStructure {
    triangulate_n(q.n(), known_edges)
}

pub(crate) fn triangulate_n(n: usize, known_edges: &[(usize, usize)]) -> ChordalStructure {
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![0u64; n * words];
    for &(i, j) in known_edges {
        if i != j {
            set_bit(&mut adj[i * words..(i + 1) * words], j);
            set_bit(&mut adj[j * words..(j + 1) * words], i);
        }
    }
    let mut cs = ChordalStructure {
        n,
        words,
        adj,
        fill_edges: Vec::new(),
        elimination_order: Vec::with_capacity(n),
    };

    // working copy restricted to vertices not yet eliminated
    let mut alive = vec![0u64; words];
    for v in 0..n {
        set_bit(&mut alive, v);
    }
    let mut work = cs.adj.clone();
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for v in members(&alive) {
            let fill = fill_in(&work, words, &alive, v);
            if best.is_none_or(|(f, _)| fill < f) {
                best = Some((fill, v));
            }
            if fill == 0 {
                break;
            }
        }
        let (_, v) = best.expect("some vertex is alive");
        let nb: Vec<usize> = members(&work[v * words..(v + 1) * words])
            .filter(|&u| bit(&alive, u))
            .collect();
        for (x, &a) in nb.iter().enumerate() {
            for &b in &nb[x + 1..] {
                if !bit(&work[a * words..(a + 1) * words], b) {
                    set_bit(&mut work[a * words..(a + 1) * words], b);
                    set_bit(&mut work[b * words..(b + 1) * words], a);
                    set_bit(&mut cs.adj[a * words..(a + 1) * words], b);
                    set_bit(&mut cs.adj[b * words..(b + 1) * words], a);
                    cs.fill_edges.push((a.min(b), a.max(b)));
                }
            }
        }
        alive[v / 64] &= !(1 << (v % 64));
        cs.elimination_order.push(v);
    }
    cs
}

fn fill_in(work: &[u64], words: usize, alive: &[u64], v: usize) -> usize {
    let row = &work[v * words..(v + 1) * words];
    let nb: Vec<u64> = (0..words).map(|w| row[w] & alive[w]).collect();
    let mut missing = 0;
    for u in members(&nb) {
        let urow = &work[u * words..(u + 1) * words];
        // neighbours of v that u is not adjacent to, excluding u itself
        let cnt: u32 = (0..words).map(|w| (nb[w] & !urow[w]).count_ones()).sum();
        missing += cnt as usize - 1;
    }
    missing / 2
}
