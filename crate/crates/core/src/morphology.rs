//! Thinning, exact Euclidean distance transform and centerline linearization.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::types::BinaryMask;

/// 8-neighbourhood offsets starting north and going clockwise
/// (P2..P9 in the usual thinning notation).
pub const NEIGHBORS_8: [(isize, isize); 8] =
    [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

/// Euclidean distance of every pixel to the nearest background pixel.
///
/// Pixels outside the raster count as background, so a foreground pixel on the
/// image edge has distance 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl DistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }
}

/// Ordered 8-connected centerline pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonPath {
    pub points: Vec<(usize, usize)>,
}

impl SkeletonPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Zhang-Suen thinning with 8-connectivity.
///
/// After the iteration converges, any 8-connected component of the input that
/// was erased entirely (a 2x2 block, for instance) gets back a single pixel: the
/// one deepest inside the component, first in row-major order on ties.
pub fn skeletonize(m: &BinaryMask) -> BinaryMask {
    skeletonize_traced(m, |_, _| {})
}

/// [`skeletonize`], calling `on_pass(pass, mask)` after every sub-iteration.
pub fn skeletonize_traced(m: &BinaryMask, mut on_pass: impl FnMut(usize, &BinaryMask)) -> BinaryMask {
    let mut skel = m.clone();
    let mut live: Vec<(usize, usize)> = m.foreground().collect();
    let mut pass = 0;
    loop {
        let mut changed = false;
        for first in [true, false] {
            let doomed: Vec<usize> = live
                .iter()
                .enumerate()
                .filter(|(_, &(x, y))| zhang_suen_deletable(&skel, x, y, first))
                .map(|(i, _)| i)
                .collect();
            for &i in &doomed {
                let (x, y) = live[i];
                skel.set(x, y, false);
            }
            if !doomed.is_empty() {
                changed = true;
                live.retain(|&(x, y)| skel.get(x, y));
            }
            on_pass(pass, &skel);
            pass += 1;
        }
        if !changed {
            break;
        }
    }
    restore_vanished_components(m, &mut skel);
    skel
}

fn zhang_suen_deletable(m: &BinaryMask, x: usize, y: usize, first: bool) -> bool {
    let (x, y) = (x as isize, y as isize);
    let mut p = [false; 8];
    for (k, (dx, dy)) in NEIGHBORS_8.iter().enumerate() {
        p[k] = m.get_or_bg(x + dx, y + dy);
    }
    let b = p.iter().filter(|&&v| v).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&k| !p[k] && p[(k + 1) % 8]).count();
    if a != 1 {
        return false;
    }
    // p[0]=N, p[2]=E, p[4]=S, p[6]=W
    let (n, e, s, w) = (p[0], p[2], p[4], p[6]);
    if first {
        !(n && e && s) && !(e && s && w)
    } else {
        !(n && e && w) && !(n && s && w)
    }
}

fn restore_vanished_components(original: &BinaryMask, skel: &mut BinaryMask) {
    let labels = label_components(original);
    if labels.count == 0 {
        return;
    }
    let mut has_skeleton = vec![false; labels.count];
    for (x, y) in skel.foreground() {
        let l = labels.get(x, y);
        has_skeleton[l - 1] = true;
    }
    if has_skeleton.iter().all(|&h| h) {
        return;
    }
    let dist = squared_distance_transform(original);
    let mut best: Vec<Option<(f64, usize)>> = vec![None; labels.count];
    for (i, &l) in labels.labels.iter().enumerate() {
        if l == 0 || has_skeleton[l as usize - 1] {
            continue;
        }
        let d = dist[i];
        let slot = &mut best[l as usize - 1];
        if slot.is_none_or(|(bd, _)| d > bd) {
            *slot = Some((d, i));
        }
    }
    for (_, i) in best.into_iter().flatten() {
        skel.set(i % original.width(), i / original.width(), true);
    }
}

/// 8-connected component labels; 0 is background, components are numbered
/// from 1 in order of their first pixel (row-major).
#[derive(Debug, Clone)]
pub struct ComponentLabels {
    pub width: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl ComponentLabels {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.labels[y * self.width + x] as usize
    }

    /// Pixel count per component, indexed by `label - 1`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            if l > 0 {
                sizes[l as usize - 1] += 1;
            }
        }
        sizes
    }
}

pub fn label_components(m: &BinaryMask) -> ComponentLabels {
    let (w, h) = (m.width(), m.height());
    let mut labels = vec![0u32; w * h];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !m.data()[start] || labels[start] != 0 {
            continue;
        }
        count += 1;
        labels[start] = count as u32;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if m.get_or_bg(nx, ny) {
                    let j = ny as usize * w + nx as usize;
                    if labels[j] == 0 {
                        labels[j] = count as u32;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    ComponentLabels { width: w, labels, count }
}

/// Exact Euclidean distance to the nearest background pixel, with a virtual
/// background frame around the raster.
pub fn distance_transform(m: &BinaryMask) -> DistanceMap {
    DistanceMap {
        width: m.width(),
        height: m.height(),
        data: squared_distance_transform(m).into_iter().map(f64::sqrt).collect(),
    }
}

/// Squared distances behind [`distance_transform`]. Values are exact integers.
pub fn squared_distance_transform(m: &BinaryMask) -> Vec<f64> {
    let (w, h) = (m.width(), m.height());
    let mut out = vec![0.0; w * h];
    let Some((x0, y0, x1, y1)) = m.foreground_bounds() else {
        return out;
    };
    // Work on the foreground bounds plus a one-pixel ring. Every ring pixel is
    // background (or the virtual frame), and any background pixel further out
    // projects onto a strictly closer ring pixel, so the result is exact.
    let sw = x1 - x0 + 3;
    let sh = y1 - y0 + 3;
    let sites: Vec<bool> = (0..sw * sh)
        .map(|i| {
            let (sx, sy) = ((i % sw) as isize, (i / sw) as isize);
            !m.get_or_bg(x0 as isize + sx - 1, y0 as isize + sy - 1)
        })
        .collect();
    let local = squared_edt_to_sites(sw, sh, &sites);
    for sy in 1..sh - 1 {
        for sx in 1..sw - 1 {
            out[(y0 + sy - 1) * w + (x0 + sx - 1)] = local[sy * sw + sx];
        }
    }
    out
}

/// Squared Euclidean distance from every cell to the nearest `true` site using
/// the separable lower-envelope-of-parabolas method. Cells get `f64::INFINITY`
/// when there are no sites at all.
pub fn squared_edt_to_sites(width: usize, height: usize, sites: &[bool]) -> Vec<f64> {
    assert_eq!(sites.len(), width * height);
    let mut grid: Vec<f64> =
        sites.iter().map(|&s| if s { 0.0 } else { f64::INFINITY }).collect();
    let n = width.max(height);
    let mut buf = EnvelopeBuffers::new(n);
    let mut col = vec![0.0; height];
    let mut res = vec![0.0; n];
    for x in 0..width {
        for y in 0..height {
            col[y] = grid[y * width + x];
        }
        lower_envelope(&col, &mut res[..height], &mut buf);
        for y in 0..height {
            grid[y * width + x] = res[y];
        }
    }
    let mut row = vec![0.0; width];
    for y in 0..height {
        row.copy_from_slice(&grid[y * width..(y + 1) * width]);
        lower_envelope(&row, &mut res[..width], &mut buf);
        grid[y * width..(y + 1) * width].copy_from_slice(&res[..width]);
    }
    grid
}

struct EnvelopeBuffers {
    v: Vec<usize>,
    z: Vec<f64>,
}

impl EnvelopeBuffers {
    fn new(n: usize) -> Self {
        Self { v: vec![0; n], z: vec![0.0; n + 1] }
    }
}

/// 1-D squared distance transform of a sampled function `f`.
fn lower_envelope(f: &[f64], out: &mut [f64], buf: &mut EnvelopeBuffers) {
    let n = f.len();
    let (v, z) = (&mut buf.v, &mut buf.z);
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        let mut s = f64::NEG_INFINITY;
        while k >= 0 {
            let p = v[k as usize];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k as usize] {
                k -= 1;
            } else {
                break;
            }
        }
        if k < 0 {
            s = f64::NEG_INFINITY;
        }
        k += 1;
        v[k as usize] = q;
        z[k as usize] = s;
        z[k as usize + 1] = f64::INFINITY;
    }
    if k < 0 {
        out.fill(f64::INFINITY);
        return;
    }
    let mut j = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Longest geodesic path through the largest 8-connected component of a skeleton.
///
/// Two breadth-first sweeps: the first from the component's first pixel builds a
/// spanning tree and finds its farthest pixel `a`; the second, restricted to the
/// tree, finds the pixel `b` farthest from `a`. The path runs from `a` to `b`.
pub fn longest_path(skel: &BinaryMask) -> Result<SkeletonPath> {
    let labels = label_components(skel);
    if labels.count == 0 {
        return Err(Error::EmptyMask);
    }
    let sizes = labels.sizes();
    let mut target = 0;
    for (i, &s) in sizes.iter().enumerate() {
        if s > sizes[target] {
            target = i;
        }
    }
    let target = target as u32 + 1;
    let w = skel.width();
    let start = labels.labels.iter().position(|&l| l == target).expect("component has pixels");

    // sweep 1 over the full 8-neighbour graph
    let (order, parent) = bfs(start, |i, out| {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for (dx, dy) in NEIGHBORS_8 {
            if skel.get_or_bg(x + dx, y + dy) {
                out.push((y + dy) as usize * w + (x + dx) as usize);
            }
        }
    });
    let a = *order.last().expect("start is visited");

    // adjacency of the spanning tree
    let mut tree: HashMap<usize, Vec<usize>> = HashMap::new();
    for &i in &order {
        if let Some(&p) = parent.get(&i) {
            tree.entry(i).or_default().push(p);
            tree.entry(p).or_default().push(i);
        }
    }
    for adj in tree.values_mut() {
        adj.sort_unstable();
    }
    let (order2, parent2) = bfs(a, |i, out| {
        if let Some(adj) = tree.get(&i) {
            out.extend_from_slice(adj);
        }
    });
    let b = *order2.last().expect("a is visited");
    let mut points = vec![(b % w, b / w)];
    let mut cur = b;
    while let Some(&p) = parent2.get(&cur) {
        points.push((p % w, p / w));
        cur = p;
    }
    points.reverse();
    Ok(SkeletonPath { points })
}

/// Plain BFS returning visit order and parent pointers. The last element of the
/// order is a farthest node (first reached among ties).
fn bfs(
    start: usize,
    mut neighbors: impl FnMut(usize, &mut Vec<usize>),
) -> (Vec<usize>, HashMap<usize, usize>) {
    let mut dist = HashMap::new();
    let mut parent = HashMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let mut scratch = Vec::with_capacity(8);
    dist.insert(start, 0usize);
    queue.push_back(start);
    let mut far = (0usize, start);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        let d = dist[&i];
        if d > far.0 {
            far = (d, i);
        }
        scratch.clear();
        neighbors(i, &mut scratch);
        for &j in &scratch {
            if let Entry::Vacant(e) = dist.entry(j) {
                e.insert(d + 1);
                parent.insert(j, i);
                queue.push_back(j);
            }
        }
    }
    // Move the first-reached farthest node to the end of the order.
    if let Some(pos) = order.iter().position(|&i| i == far.1) {
        let f = order.remove(pos);
        order.push(f);
    }
    (order, parent)
}
