//! Critical point trajectories and original-versus-reconstruction checks.
//!
//! Crossed faces are graph nodes; each tetrahedron with two crossed faces
//! links them. With consistent symbolic perturbation every tetrahedron has
//! zero or two crossed faces, so nodes have degree at most two and every
//! component is a simple path or a cycle.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{
    quality, to_fixed, to_fixed_with_scale, Dims, FieldSeries, FixedField, QualityReport, Scale,
};
use crate::mesh::{for_each_tet, tet_faces, FaceKey};
use crate::predicates::{face_has_cp_in, origin_barycentric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub face: FaceKey,
    /// Crossing location `(x, y, t)` in grid units (`x` = column, `y` = row).
    pub pos: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub faces: Vec<FaceKey>,
    pub points: Vec<[f64; 3]>,
    pub is_loop: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGraph {
    pub dims: Dims,
    /// Sorted by face.
    pub nodes: Vec<Node>,
    /// Each pair sorted, list sorted.
    pub edges: Vec<(FaceKey, FaceKey)>,
    pub components: Vec<Trajectory>,
}

impl TrajectoryGraph {
    pub fn slice_faces(&self) -> HashSet<FaceKey> {
        self.nodes
            .iter()
            .map(|n| n.face)
            .filter(|f| f.is_slice(&self.dims))
            .collect()
    }

    pub fn slab_faces(&self) -> HashSet<FaceKey> {
        self.nodes
            .iter()
            .map(|n| n.face)
            .filter(|f| !f.is_slice(&self.dims))
            .collect()
    }

    /// Identical node and edge sets.
    pub fn same_as(&self, other: &TrajectoryGraph) -> bool {
        self.dims == other.dims
            && self.edges == other.edges
            && self.nodes.len() == other.nodes.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| a.face == b.face)
    }

    /// One row per trajectory point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("component,point,x,y,t,loop\n");
        for (c, traj) in self.components.iter().enumerate() {
            for (k, p) in traj.points.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{c},{k},{},{},{},{}",
                    p[0], p[1], p[2], traj.is_loop as u8
                );
            }
        }
        s
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

fn crossing_position(dims: &Dims, u: &[i64], v: &[i64], f: FaceKey) -> [f64; 3] {
    let vs = f.vertices();
    let bary = origin_barycentric(
        [u[vs[0]], v[vs[0]]],
        [u[vs[1]], v[vs[1]]],
        [u[vs[2]], v[vs[2]]],
    );
    let pts = vs.map(|id| {
        let (t, i, j) = dims.coords(id);
        [j as f64, i as f64, t as f64]
    });
    bary.combine(pts)
}

pub fn extract_trajectories(ff: &FixedField) -> Result<TrajectoryGraph> {
    extract_trajectories_in(&ff.dims, &ff.u, &ff.v)
}

pub fn extract_trajectories_in(dims: &Dims, u: &[i64], v: &[i64]) -> Result<TrajectoryGraph> {
    let mut edges: Vec<(FaceKey, FaceKey)> = Vec::new();
    let mut bad: Option<(crate::mesh::Tet, usize)> = None;
    for_each_tet(dims, |tet| {
        if bad.is_some() {
            return;
        }
        let mut hit = [FaceKey::new(0, 1, 2); 4];
        let mut n = 0;
        for f in tet_faces(&tet) {
            if face_has_cp_in(f, u, v) {
                hit[n] = f;
                n += 1;
            }
        }
        match n {
            0 => {}
            2 => edges.push((hit[0].min(hit[1]), hit[0].max(hit[1]))),
            _ => bad = Some((tet, n)),
        }
    });
    if let Some((tet, n)) = bad {
        return Err(Error::Topology(format!(
            "tetrahedron {:?} has {n} crossed faces",
            tet.0
        )));
    }
    edges.sort_unstable();
    if edges.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Topology(
            "two tetrahedra share a pair of crossed faces".into(),
        ));
    }

    let mut faces: Vec<FaceKey> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    faces.sort_unstable();
    faces.dedup();
    let index: HashMap<FaceKey, usize> = faces.iter().enumerate().map(|(k, &f)| (f, k)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); faces.len()];
    let mut uf = UnionFind::new(faces.len());
    for &(a, b) in &edges {
        let (ia, ib) = (index[&a], index[&b]);
        adj[ia].push(ib);
        adj[ib].push(ia);
        uf.union(ia, ib);
    }
    if let Some(k) = adj.iter().position(|a| a.len() > 2) {
        return Err(Error::Topology(format!(
            "face {:?} has degree {}",
            faces[k],
            adj[k].len()
        )));
    }

    // Walk each component from its smallest endpoint, or from its smallest
    // face when it is a cycle. Faces are sorted, so the first member seen of
    // each root is the smallest.
    let mut start: HashMap<usize, usize> = HashMap::new();
    let mut first_face: HashMap<usize, usize> = HashMap::new();
    for k in 0..faces.len() {
        let r = uf.find(k);
        first_face.entry(r).or_insert(k);
        if adj[k].len() == 1 {
            start.entry(r).or_insert(k);
        }
    }
    let mut roots: Vec<usize> = first_face.keys().copied().collect();
    roots.sort_unstable_by_key(|r| first_face[r]);
    let mut components = Vec::with_capacity(roots.len());
    let mut seen = vec![false; faces.len()];
    for r in roots {
        let (s, is_loop) = match start.get(&r) {
            Some(&s) => (s, false),
            None => (first_face[&r], true),
        };
        let mut chain = vec![s];
        seen[s] = true;
        let mut cur = s;
        loop {
            // from a cycle's start either neighbour works; take the smaller
            let next = adj[cur]
                .iter()
                .copied()
                .filter(|&n| !seen[n])
                .min_by_key(|&n| faces[n]);
            match next {
                Some(n) => {
                    seen[n] = true;
                    chain.push(n);
                    cur = n;
                }
                None => break,
            }
        }
        components.push(Trajectory {
            faces: chain.iter().map(|&k| faces[k]).collect(),
            points: chain
                .iter()
                .map(|&k| crossing_position(dims, u, v, faces[k]))
                .collect(),
            is_loop,
        });
    }
    let walked: usize = components.iter().map(|c| c.faces.len()).sum();
    if walked != faces.len() {
        return Err(Error::Topology("component walk missed faces".into()));
    }
    let nodes = faces
        .iter()
        .map(|&f| Node {
            face: f,
            pos: crossing_position(dims, u, v, f),
        })
        .collect();
    Ok(TrajectoryGraph {
        dims: *dims,
        nodes,
        edges,
        components,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub cr: f64,
    pub quality: QualityReport,
    /// Slice faces whose predicate differs.
    pub fc_t: usize,
    /// Slab faces whose predicate differs.
    pub fc_s: usize,
    pub n_traj_orig: usize,
    pub n_traj_recon: usize,
    pub isomorphic: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.fc_t == 0 && self.fc_s == 0 && self.isomorphic
    }

    pub fn to_text(&self) -> String {
        format!(
            "cr={:.4}\npsnr_u={:.4}\npsnr_v={:.4}\npsnr={:.4}\nmax_abs_err={:e}\nfc_t={}\nfc_s={}\nn_traj_orig={}\nn_traj_recon={}\nisomorphic={}\n",
            self.cr,
            self.quality.psnr_u,
            self.quality.psnr_v,
            self.quality.psnr_joint,
            self.quality.max_abs_err,
            self.fc_t,
            self.fc_s,
            self.n_traj_orig,
            self.n_traj_recon,
            self.isomorphic
        )
    }
}

/// Converts both fields at `scale` (the scale recorded in the archive) or,
/// when `None`, at the original's natural scale.
fn convert_pair(
    orig: &FieldSeries,
    recon: &FieldSeries,
    scale: Option<Scale>,
) -> Result<(FixedField, FixedField)> {
    if orig.dims() != recon.dims() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            orig.dims(),
            recon.dims()
        )));
    }
    let natural = to_fixed(orig).scale;
    let scale = scale.unwrap_or(natural);
    let a = to_fixed_with_scale(orig, scale).map_err(|_| Error::ScaleMismatch {
        expected: natural.exponent,
        actual: scale.exponent,
    })?;
    let b = to_fixed_with_scale(recon, scale)?;
    Ok((a, b))
}

pub fn verify(
    orig: &FieldSeries,
    recon: &FieldSeries,
    archive_size: Option<usize>,
    scale: Option<Scale>,
) -> Result<VerifyReport> {
    let (a, b) = convert_pair(orig, recon, scale)?;
    let g = extract_trajectories(&a)?;
    verify_against(orig, &g, recon, &b, archive_size)
}

/// Like [`verify`], reusing a precomputed graph of the original; `recon_ff`
/// must be `recon` at the scale the graph was built with.
pub fn verify_against(
    orig: &FieldSeries,
    orig_graph: &TrajectoryGraph,
    recon: &FieldSeries,
    recon_ff: &FixedField,
    archive_size: Option<usize>,
) -> Result<VerifyReport> {
    let q = quality(orig, recon, archive_size)?;
    let g = extract_trajectories(recon_ff)?;
    let fc_t = orig_graph
        .slice_faces()
        .symmetric_difference(&g.slice_faces())
        .count();
    let fc_s = orig_graph
        .slab_faces()
        .symmetric_difference(&g.slab_faces())
        .count();
    Ok(VerifyReport {
        cr: q.cr,
        quality: q,
        fc_t,
        fc_s,
        n_traj_orig: orig_graph.components.len(),
        n_traj_recon: g.components.len(),
        isomorphic: orig_graph.same_as(&g),
    })
}

/// Distribution summaries of a residual symbol stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStats {
    pub total: u64,
    pub overflow: u64,
    /// `(index, probability)` ascending by index, over non-overflow symbols.
    pub pmf: Vec<(i64, f64)>,
    /// `(k, P(|index| ≥ k))`.
    pub tail_ccdf: Vec<(u64, f64)>,
    /// `(k, P(run ≥ k))` over maximal runs of index 0.
    pub run_ccdf: Vec<(u64, f64)>,
    pub run_mean: f64,
    /// 75th, 80th, 85th and 90th percentile run lengths (nearest rank).
    pub run_percentiles: [(u8, u64); 4],
}

pub fn residual_stats(symbols: &[u32]) -> ResidualStats {
    use crate::codec::quantize::symbol_index;
    let mut counts: HashMap<i64, u64> = HashMap::new();
    let mut overflow = 0u64;
    let mut runs: Vec<u64> = Vec::new();
    let mut run = 0u64;
    for &s in symbols {
        let idx = symbol_index(s);
        match idx {
            None => overflow += 1,
            Some(i) => *counts.entry(i).or_default() += 1,
        }
        if idx == Some(0) {
            run += 1;
        } else if run > 0 {
            runs.push(run);
            run = 0;
        }
    }
    if run > 0 {
        runs.push(run);
    }
    let valid = symbols.len() as u64 - overflow;
    let mut pmf: Vec<(i64, f64)> = counts
        .iter()
        .map(|(&i, &c)| (i, c as f64 / valid as f64))
        .collect();
    pmf.sort_by_key(|p| p.0);
    let max_abs = counts.keys().map(|i| i.unsigned_abs()).max().unwrap_or(0);
    let mut by_abs = vec![0u64; max_abs as usize + 2];
    for (&i, &c) in &counts {
        by_abs[i.unsigned_abs() as usize] += c;
    }
    let mut tail_ccdf = Vec::with_capacity(by_abs.len());
    let mut above = valid;
    for (k, &c) in by_abs.iter().enumerate() {
        if valid > 0 {
            tail_ccdf.push((k as u64, above as f64 / valid as f64));
        }
        above -= c;
    }
    runs.sort_unstable();
    let nr = runs.len();
    let max_run = runs.last().copied().unwrap_or(0);
    let mut run_ccdf = Vec::new();
    let mut p = 0;
    for k in 1..=max_run + 1 {
        while p < nr && runs[p] < k {
            p += 1;
        }
        run_ccdf.push((k, (nr - p) as f64 / nr as f64));
    }
    let run_mean = if nr == 0 {
        0.0
    } else {
        runs.iter().sum::<u64>() as f64 / nr as f64
    };
    let pct = |q: u8| -> (u8, u64) {
        if nr == 0 {
            return (q, 0);
        }
        let rank = ((q as f64 / 100.0) * nr as f64).ceil().max(1.0) as usize;
        (q, runs[rank.min(nr) - 1])
    };
    ResidualStats {
        total: symbols.len() as u64,
        overflow,
        pmf,
        tail_ccdf,
        run_ccdf,
        run_mean,
        run_percentiles: [pct(75), pct(80), pct(85), pct(90)],
    }
}

impl ResidualStats {
    /// Writes `pmf.csv`, `tail_ccdf.csv` and `run_ccdf.csv` into `dir`.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut f = std::fs::File::create(dir.join("pmf.csv"))?;
        writeln!(f, "index,probability")?;
        for (i, p) in &self.pmf {
            writeln!(f, "{i},{p}")?;
        }
        writeln!(
            f,
            "overflow,{}",
            if self.total == 0 {
                0.0
            } else {
                self.overflow as f64 / self.total as f64
            }
        )?;
        let mut f = std::fs::File::create(dir.join("tail_ccdf.csv"))?;
        writeln!(f, "k,p_abs_index_ge_k")?;
        for (k, p) in &self.tail_ccdf {
            writeln!(f, "{k},{p}")?;
        }
        let mut f = std::fs::File::create(dir.join("run_ccdf.csv"))?;
        writeln!(f, "k,p_run_ge_k")?;
        for (k, p) in &self.run_ccdf {
            writeln!(f, "{k},{p}")?;
        }
        writeln!(f, "# mean,{}", self.run_mean)?;
        for (q, v) in &self.run_percentiles {
            writeln!(f, "# p{q},{v}")?;
        }
        Ok(())
    }
}
