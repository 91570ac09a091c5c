//! Brute-force reference implementations.
//!
//! Everything here is written straight from the metric or algorithm definition,
//! favouring obviousness over speed, and shares no code with `angio-core`
//! beyond its plain data types. Tests compare the optimized library paths
//! against these.

use std::collections::{BTreeSet, HashSet, VecDeque};

pub mod fixtures;

use angio_core::{BinaryMask, BoundingBox};

type Px = (i64, i64);

fn fg_set(m: &BinaryMask) -> BTreeSet<Px> {
    let mut s = BTreeSet::new();
    for y in 0..m.height() {
        for x in 0..m.width() {
            if m.get(x, y) {
                s.insert((x as i64, y as i64));
            }
        }
    }
    s
}

fn set_to_mask(w: usize, h: usize, s: &BTreeSet<Px>) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| s.contains(&(x as i64, y as i64)))
}

/// Squared distance from each pixel to the nearest background pixel, where the
/// ring of pixels just outside the raster also counts as background.
pub fn brute_force_squared_edt(m: &BinaryMask) -> Vec<i64> {
    let (w, h) = (m.width() as i64, m.height() as i64);
    let mut background = Vec::new();
    for y in -1..=h {
        for x in -1..=w {
            let inside = x >= 0 && y >= 0 && x < w && y < h;
            if !inside || !m.get(x as usize, y as usize) {
                background.push((x, y));
            }
        }
    }
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            if !m.get(x as usize, y as usize) {
                out.push(0);
                continue;
            }
            let best = background
                .iter()
                .map(|&(bx, by)| (bx - x) * (bx - x) + (by - y) * (by - y))
                .min()
                .expect("frame is never empty");
            out.push(best);
        }
    }
    out
}

pub fn brute_force_edt(m: &BinaryMask) -> Vec<f64> {
    brute_force_squared_edt(m).into_iter().map(|d| (d as f64).sqrt()).collect()
}

/// 8-connected components as sets of pixels, ordered by their smallest
/// row-major pixel.
pub fn components(m: &BinaryMask) -> Vec<BTreeSet<Px>> {
    let mut remaining = fg_set(m);
    let mut comps = Vec::new();
    // BTreeSet<(x,y)> orders by x first; we want row-major order of first pixels
    let mut order: Vec<Px> = remaining.iter().copied().collect();
    order.sort_by_key(|&(x, y)| (y, x));
    for seed in order {
        if !remaining.contains(&seed) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![seed];
        remaining.remove(&seed);
        while let Some((x, y)) = stack.pop() {
            comp.insert((x, y));
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let q = (x + dx, y + dy);
                    if remaining.remove(&q) {
                        stack.push(q);
                    }
                }
            }
        }
        comps.push(comp);
    }
    comps
}

pub fn component_count(m: &BinaryMask) -> usize {
    components(m).len()
}

/// Reference Zhang-Suen thinning.
///
/// Returns the state after every sub-iteration and the final skeleton. Fully
/// erased components get back their deepest pixel (largest brute-force
/// distance, first in row-major order on ties).
pub fn reference_zhang_suen(m: &BinaryMask) -> (Vec<BinaryMask>, BinaryMask) {
    let (w, h) = (m.width(), m.height());
    let mut on = fg_set(m);
    let mut passes = Vec::new();
    loop {
        let mut any = false;
        for step in 0..2 {
            let mut delete = Vec::new();
            for &(x, y) in &on {
                let at = |dx: i64, dy: i64| on.contains(&(x + dx, y + dy));
                let p2 = at(0, -1);
                let p3 = at(1, -1);
                let p4 = at(1, 0);
                let p5 = at(1, 1);
                let p6 = at(0, 1);
                let p7 = at(-1, 1);
                let p8 = at(-1, 0);
                let p9 = at(-1, -1);
                let ring = [p2, p3, p4, p5, p6, p7, p8, p9, p2];
                let b: usize = ring[..8].iter().map(|&v| v as usize).sum();
                let a = ring.windows(2).filter(|w| !w[0] && w[1]).count();
                let (c, d) = if step == 0 {
                    (p2 && p4 && p6, p4 && p6 && p8)
                } else {
                    (p2 && p4 && p8, p2 && p6 && p8)
                };
                if (2..=6).contains(&b) && a == 1 && !c && !d {
                    delete.push((x, y));
                }
            }
            any |= !delete.is_empty();
            for p in delete {
                on.remove(&p);
            }
            passes.push(set_to_mask(w, h, &on));
        }
        if !any {
            break;
        }
    }
    let sq = brute_force_squared_edt(m);
    for comp in components(m) {
        if comp.iter().any(|p| on.contains(p)) {
            continue;
        }
        let mut cells: Vec<Px> = comp.into_iter().collect();
        cells.sort_by_key(|&(x, y)| (y, x));
        let mut best = cells[0];
        for &(x, y) in &cells {
            let d = sq[y as usize * w + x as usize];
            let bd = sq[best.1 as usize * w + best.0 as usize];
            if d > bd {
                best = (x, y);
            }
        }
        on.insert(best);
    }
    let fin = set_to_mask(w, h, &on);
    (passes, fin)
}

fn bfs_hops(nodes: &BTreeSet<Px>, from: Px) -> Vec<(Px, usize)> {
    let mut seen = HashSet::new();
    let mut q = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(from);
    q.push_back((from, 0));
    while let Some((p, d)) = q.pop_front() {
        out.push((p, d));
        for dy in -1..=1 {
            for dx in -1..=1 {
                let n = (p.0 + dx, p.1 + dy);
                if nodes.contains(&n) && seen.insert(n) {
                    q.push_back((n, d + 1));
                }
            }
        }
    }
    out
}

/// Node count of the longest shortest path (graph diameter + 1) in the largest
/// 8-connected component, by BFS from every node.
pub fn diameter_nodes(m: &BinaryMask) -> usize {
    let comps = components(m);
    let Some(largest) = comps.iter().enumerate().max_by(|a, b| {
        a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0))
    }) else {
        return 0;
    };
    let nodes = largest.1;
    nodes
        .iter()
        .map(|&p| bfs_hops(nodes, p).into_iter().map(|(_, d)| d).max().unwrap_or(0))
        .max()
        .unwrap_or(0)
        + 1
}

/// Peak positions: every maximal run of equal values whose both outer
/// neighbours are strictly lower, reported at the run's (lower) middle index.
pub fn reference_local_maxima(x: &[f64]) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for i in 0..x.len() {
        let mut s = i;
        while s > 0 && x[s - 1] == x[i] {
            s -= 1;
        }
        let mut e = i;
        while e + 1 < x.len() && x[e + 1] == x[i] {
            e += 1;
        }
        if s > 0 && e + 1 < x.len() && x[s - 1] < x[i] && x[e + 1] < x[i] {
            out.insert((s + e) / 2);
        }
    }
    out.into_iter().collect()
}

/// Prominence by exhaustive search: the largest drop `h - max(left min, right
/// min)` over every window around the peak that holds no strictly higher sample.
pub fn exhaustive_prominence(x: &[f64], p: usize) -> f64 {
    let h = x[p];
    let mut best = f64::NEG_INFINITY;
    for a in 0..=p {
        if x[a..=p].iter().any(|&v| v > h) {
            continue;
        }
        let left = x[a..=p].iter().copied().fold(f64::INFINITY, f64::min);
        for b in p..x.len() {
            if x[p..=b].iter().any(|&v| v > h) {
                break;
            }
            let right = x[p..=b].iter().copied().fold(f64::INFINITY, f64::min);
            best = best.max(h - left.max(right));
        }
    }
    best
}

/// Peaks with prominence at least `min_prom`, then thinned so that kept peaks
/// are `min_sep` apart: repeatedly keep the highest remaining peak (earliest
/// on ties) and discard everything closer than `min_sep`.
pub fn reference_peaks(x: &[f64], min_prom: f64, min_sep: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = reference_local_maxima(x)
        .into_iter()
        .filter(|&p| exhaustive_prominence(x, p) >= min_prom)
        .collect();
    let mut kept = Vec::new();
    while !pool.is_empty() {
        let mut top = pool[0];
        for &p in &pool {
            if x[p] > x[top] {
                top = p;
            }
        }
        kept.push(top);
        pool.retain(|&p| p != top && (min_sep <= 1 || p.abs_diff(top) >= min_sep));
    }
    kept.sort_unstable();
    kept
}

fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = (a.x_max().min(b.x_max()) - a.x_min().max(b.x_min())).max(0.0);
    let iy = (a.y_max().min(b.y_max()) - a.y_min().max(b.y_min())).max(0.0);
    let inter = ix * iy;
    if inter == 0.0 {
        return 0.0;
    }
    inter / (a.width() * a.height() + b.width() * b.height() - inter)
}

/// Greedy matching: detections in descending confidence (input order on ties)
/// each take the still-free ground truth of highest IoU, if it reaches `thr`
/// (lowest index on IoU ties). Returns the ground-truth index per detection.
pub fn greedy_match(dets: &[(f64, BoundingBox)], gts: &[BoundingBox], thr: f64) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].0.partial_cmp(&dets[a].0).unwrap().then(a.cmp(&b)));
    let mut used = vec![false; gts.len()];
    let mut out = vec![None; dets.len()];
    for d in order {
        let mut pick: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if used[g] {
                continue;
            }
            let v = iou(&dets[d].1, gt);
            if v >= thr && pick.is_none_or(|(_, pv)| v > pv) {
                pick = Some((g, v));
            }
        }
        if let Some((g, _)) = pick {
            used[g] = true;
            out[d] = Some(g);
        }
    }
    out
}

/// 101-point interpolated AP from (confidence, is_tp) pairs, computed as the
/// mean over recall levels k/100 of the best precision reached at any cutoff
/// whose recall is at least k/100.
pub fn brute_force_ap(scored: &[(f64, bool)], npos: usize) -> f64 {
    let mut ranked: Vec<(usize, &(f64, bool))> = scored.iter().enumerate().collect();
    ranked.sort_by(|a, b| b.1 .0.partial_cmp(&a.1 .0).unwrap().then(a.0.cmp(&b.0)));
    let mut cut = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    for (_, &(_, hit)) in &ranked {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        cut.push((tp, tp as f64 / (tp + fp) as f64));
    }
    let mut sum = 0.0;
    for k in 0..=100usize {
        let mut best = 0.0f64;
        for &(t, prec) in &cut {
            if t * 100 >= k * npos {
                best = best.max(prec);
            }
        }
        sum += best;
    }
    sum / 101.0
}

/// Per-image input of [`reference_evaluator`]: scored detections and ground-truth boxes.
pub struct RefImage {
    pub dets: Vec<(f64, BoundingBox)>,
    pub gts: Vec<BoundingBox>,
}

/// `(mean, population sd, count)` of the defined per-image values.
pub type RefStat = Option<(f64, f64, usize)>;

#[derive(Debug)]
pub struct RefSummary {
    pub lesion_precision: Option<f64>,
    pub lesion_recall: Option<f64>,
    pub lesion_map50: Option<f64>,
    pub lesion_map5095: Option<f64>,
    pub image_precision: RefStat,
    pub image_recall: RefStat,
    pub image_map50: RefStat,
    pub image_map5095: RefStat,
}

fn mean_sd(v: &[f64]) -> RefStat {
    if v.is_empty() {
        return None;
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    Some((m, var.sqrt(), v.len()))
}

/// From-scratch evaluator: lesion-level totals pool every detection of every
/// image; image-level values average per-image metrics over the images where
/// each is defined (precision needs a detection, the rest need a lesion).
pub fn reference_evaluator(images: &[RefImage]) -> RefSummary {
    let thresholds: Vec<f64> = (0..10).map(|k| (50 + 5 * k) as f64 / 100.0).collect();
    let npos: usize = images.iter().map(|i| i.gts.len()).sum();
    let ndet: usize = images.iter().map(|i| i.dets.len()).sum();
    let mut pooled: Vec<Vec<(f64, bool)>> = vec![Vec::new(); thresholds.len()];
    let mut per_image_ap: Vec<Vec<f64>> = vec![Vec::new(); thresholds.len()];
    let (mut img_p, mut img_r) = (Vec::new(), Vec::new());
    let mut tp50 = 0;
    for img in images {
        for (t, &thr) in thresholds.iter().enumerate() {
            let m = greedy_match(&img.dets, &img.gts, thr);
            let scored: Vec<(f64, bool)> =
                img.dets.iter().zip(&m).map(|(d, g)| (d.0, g.is_some())).collect();
            if !img.gts.is_empty() {
                per_image_ap[t].push(brute_force_ap(&scored, img.gts.len()));
            }
            if t == 0 {
                let tp = m.iter().filter(|g| g.is_some()).count();
                tp50 += tp;
                if !img.dets.is_empty() {
                    img_p.push(tp as f64 / img.dets.len() as f64);
                }
                if !img.gts.is_empty() {
                    img_r.push(tp as f64 / img.gts.len() as f64);
                }
            }
            pooled[t].extend(scored);
        }
    }
    let lesion_aps: Option<Vec<f64>> =
        (npos > 0).then(|| pooled.iter().map(|s| brute_force_ap(s, npos)).collect());
    let image_5095: Vec<f64> = if per_image_ap[0].is_empty() {
        Vec::new()
    } else {
        (0..per_image_ap[0].len())
            .map(|i| per_image_ap.iter().map(|v| v[i]).sum::<f64>() / thresholds.len() as f64)
            .collect()
    };
    RefSummary {
        lesion_precision: (ndet > 0).then(|| tp50 as f64 / ndet as f64),
        lesion_recall: (npos > 0).then(|| tp50 as f64 / npos as f64),
        lesion_map50: lesion_aps.as_ref().map(|a| a[0]),
        lesion_map5095: lesion_aps.as_ref().map(|a| a.iter().sum::<f64>() / a.len() as f64),
        image_precision: mean_sd(&img_p),
        image_recall: mean_sd(&img_r),
        image_map50: mean_sd(&per_image_ap[0]),
        image_map5095: mean_sd(&image_5095),
    }
}

/// Mann-Whitney U (`#(x < y) + 0.5 #(x == y)`) and its exact two-sided p-value
/// by enumerating every split of the pooled sample into groups of sizes n and m.
pub fn permutation_mann_whitney(x: &[f64], y: &[f64]) -> (f64, f64) {
    let u_of = |a: &[f64], b: &[f64]| -> f64 {
        let mut u = 0.0;
        for &xi in a {
            for &yj in b {
                if xi < yj {
                    u += 1.0;
                } else if xi == yj {
                    u += 0.5;
                }
            }
        }
        u
    };
    let observed = u_of(x, y);
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let n = x.len();
    let total = pooled.len();
    let (mut le, mut ge, mut count) = (0u64, 0u64, 0u64);
    // iterate over all n-subsets by bitmask
    for mask in 0u64..(1u64 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let a: Vec<f64> = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| pooled[i]).collect();
        let b: Vec<f64> = (0..total).filter(|i| mask >> i & 1 == 0).map(|i| pooled[i]).collect();
        let u = u_of(&a, &b);
        count += 1;
        if u <= observed {
            le += 1;
        }
        if u >= observed {
            ge += 1;
        }
    }
    let p = (2.0 * (le.min(ge) as f64) / count as f64).min(1.0);
    (observed, p)
}

/// Modified Hausdorff distance by comparing every pair of foreground pixels.
pub fn all_pairs_mhd(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let pa: Vec<Px> = fg_set(a).into_iter().collect();
    let pb: Vec<Px> = fg_set(b).into_iter().collect();
    let directed = |from: &[Px], to: &[Px]| -> f64 {
        let mut sum = 0.0;
        for &(x, y) in from {
            let best = to
                .iter()
                .map(|&(u, v)| (((x - u) * (x - u) + (y - v) * (y - v)) as f64).sqrt())
                .fold(f64::INFINITY, f64::min);
            sum += best;
        }
        sum / from.len() as f64
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

/// `(tp, fp, fn, tn)` pixel counts.
pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> (usize, usize, usize, usize) {
    let mut c = (0, 0, 0, 0);
    for y in 0..pred.height() {
        for x in 0..pred.width() {
            match (pred.get(x, y), gt.get(x, y)) {
                (true, true) => c.0 += 1,
                (true, false) => c.1 += 1,
                (false, true) => c.2 += 1,
                (false, false) => c.3 += 1,
            }
        }
    }
    c
}
