//! Double-description conversion between vertex and halfspace form.
//!
//! Both directions reduce to the same primitive: the extreme rays of a
//! pointed cone `{r : G r ≥ 0}` with `G` of full column rank. Rows are
//! inserted one at a time; a new ray is created for every pair of rays on
//! opposite sides of the inserted row that pass the combinatorial adjacency
//! test (no third ray is tight on every row the pair shares).

use nalgebra::DMatrix;

use super::{dot, HRep, PolytopeError, VRep};

/// Sign tolerance for unit-norm rows and rays.
const RAY_TOL: f64 = 1e-9;
/// Singular values below this are treated as zero when finding the affine hull.
const RANK_TOL: f64 = 1e-9;
/// Residual allowed when validating facets against the input points.
const CHECK_TOL: f64 = 1e-7;

#[derive(Clone)]
struct Ray {
    v: Vec<f64>,
    zeros: Vec<u64>,
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1u64 << (i % 64);
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Extreme rays of `{r : g_i · r ≥ 0 for all i}`.
///
/// `rows` must span the full space (the cone is then pointed). Returned zero
/// sets index into `rows`.
fn extreme_rays(rows: &[Vec<f64>]) -> Result<Vec<Ray>, PolytopeError> {
    let dim = rows.first().map_or(0, Vec::len);
    let mut g: Vec<Vec<f64>> = rows.to_vec();
    for r in g.iter_mut() {
        normalize(r);
    }
    let words = g.len().div_ceil(64).max(1);

    // Greedy pivoted Gram–Schmidt to pick `dim` well-conditioned rows.
    let mut chosen: Vec<usize> = Vec::with_capacity(dim);
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut resid: Vec<Vec<f64>> = g.clone();
    while chosen.len() < dim {
        let (best, norm) = resid
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, r)| (i, dot(r, r).sqrt()))
            .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || norm < 1e-10 {
            return Err(PolytopeError::NumericalDegeneracy(
                "constraint rows do not span the space".into(),
            ));
        }
        let q: Vec<f64> = resid[best].iter().map(|x| x / norm).collect();
        for r in resid.iter_mut() {
            let c = dot(r, &q);
            r.iter_mut().zip(&q).for_each(|(x, qq)| *x -= c * qq);
        }
        chosen.push(best);
        ortho.push(q);
    }

    let m = DMatrix::from_fn(dim, dim, |i, j| g[chosen[i]][j]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| PolytopeError::NumericalDegeneracy("singular initial basis".into()))?;
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let mut v: Vec<f64> = (0..dim).map(|i| inv[(i, j)]).collect();
            normalize(&mut v);
            let mut zeros = vec![0u64; words];
            for (i, &ci) in chosen.iter().enumerate() {
                if i != j {
                    set_bit(&mut zeros, ci);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let min_common = dim.saturating_sub(2) as u32;
    let mut tight_lists: Vec<Vec<u32>> = vec![Vec::new(); g.len()];
    let mut candidates: Vec<(u32, u32)> = Vec::new();
    for (idx, row) in g.iter().enumerate() {
        if chosen.contains(&idx) {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > RAY_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < -RAY_TOL).collect();
        if neg.is_empty() {
            for (r, &val) in rays.iter_mut().zip(&vals) {
                if val.abs() <= RAY_TOL {
                    set_bit(&mut r.zeros, idx);
                }
            }
            continue;
        }

        for l in tight_lists.iter_mut() {
            l.clear();
        }
        for (k, r) in rays.iter().enumerate() {
            for_each_bit(&r.zeros, |b| tight_lists[b].push(k as u32));
        }
        let pos_z: Vec<u64> = pos.iter().flat_map(|&i| rays[i].zeros.iter().copied()).collect();
        let neg_z: Vec<u64> = neg.iter().flat_map(|&i| rays[i].zeros.iter().copied()).collect();
        candidates.clear();
        scan_pairs(&pos_z, &neg_z, words, min_common, &mut candidates);

        let mut fresh: Vec<Ray> = Vec::new();
        let mut common = vec![0u64; words];
        for &(pi, ni) in &candidates {
            let (p, n) = (pos[pi as usize], neg[ni as usize]);
            for (c, (a, b)) in common.iter_mut().zip(rays[p].zeros.iter().zip(&rays[n].zeros)) {
                *c = a & b;
            }
            // Only rays tight on every shared row can block the pair, so it
            // suffices to scan the shortest per-row list.
            let mut shortest: &[u32] = &[];
            let mut best_len = usize::MAX;
            for_each_bit(&common, |b| {
                if tight_lists[b].len() < best_len {
                    best_len = tight_lists[b].len();
                    shortest = &tight_lists[b];
                }
            });
            let blocked = shortest.iter().any(|&k| {
                let k = k as usize;
                k != p && k != n && is_subset(&common, &rays[k].zeros)
            });
            if blocked {
                continue;
            }
            let (gp, gn) = (vals[p], vals[n]);
            let mut v: Vec<f64> = rays[n]
                .v
                .iter()
                .zip(&rays[p].v)
                .map(|(vn, vp)| gp * vn - gn * vp)
                .collect();
            if normalize(&mut v) == 0.0 {
                continue;
            }
            let mut zeros = common.clone();
            set_bit(&mut zeros, idx);
            fresh.push(Ray { v, zeros });
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, &val) in rays.into_iter().zip(&vals) {
            if val < -RAY_TOL {
                continue;
            }
            if val <= RAY_TOL {
                set_bit(&mut r.zeros, idx);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    Ok(rays)
}

fn for_each_bit(bits: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &word) in bits.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            f(wi * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

/// Collects index pairs whose zero sets share at least `min_common` rows.
#[inline(always)]
fn scan_pairs_body(pos_z: &[u64], neg_z: &[u64], words: usize, min_common: u32, out: &mut Vec<(u32, u32)>) {
    for (pi, zp) in pos_z.chunks_exact(words).enumerate() {
        for (ni, zn) in neg_z.chunks_exact(words).enumerate() {
            let mut cnt = 0;
            for w in 0..words {
                cnt += (zp[w] & zn[w]).count_ones();
            }
            if cnt >= min_common {
                out.push((pi as u32, ni as u32));
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn scan_pairs_popcnt(pos_z: &[u64], neg_z: &[u64], words: usize, min_common: u32, out: &mut Vec<(u32, u32)>) {
    scan_pairs_body(pos_z, neg_z, words, min_common, out)
}

fn scan_pairs(pos_z: &[u64], neg_z: &[u64], words: usize, min_common: u32, out: &mut Vec<(u32, u32)>) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports the instruction set the function is compiled for.
        return unsafe { scan_pairs_popcnt(pos_z, neg_z, words, min_common, out) };
    }
    scan_pairs_body(pos_z, neg_z, words, min_common, out)
}

/// Converts a point set to the halfspaces of its convex hull.
///
/// The affine hull is found by an SVD of the centred points; each direction
/// orthogonal to it becomes a pair of opposite inequalities (for the joint
/// space these are the per-stratum simplex equalities). Facets of the
/// full-dimensional projection come from the extreme rays of the polar cone.
pub fn dual_conversion(v: &VRep) -> Result<HRep, PolytopeError> {
    if v.is_empty() {
        return Err(PolytopeError::Empty);
    }
    let d = v.dim;
    let n = v.len();
    let mut centroid = vec![0.0; d];
    for p in &v.points {
        if p.len() != d {
            return Err(PolytopeError::DimensionMismatch {
                expected: d,
                found: p.len(),
            });
        }
        centroid.iter_mut().zip(p).for_each(|(c, x)| *c += x / n as f64);
    }
    let rows = n.max(d);
    let centred = DMatrix::from_fn(rows, d, |i, j| {
        if i < n {
            v.points[i][j] - centroid[j]
        } else {
            0.0
        }
    });
    let svd = centred.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| PolytopeError::NumericalDegeneracy("svd failed".into()))?;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut complement: Vec<Vec<f64>> = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let row: Vec<f64> = (0..d).map(|j| v_t[(i, j)]).collect();
        if s > RANK_TOL {
            basis.push(row);
        } else {
            complement.push(row);
        }
    }
    let k = basis.len();

    let mut h = HRep::new(d);
    for u in &complement {
        let rhs = dot(u, &centroid);
        h.push(u.clone(), rhs);
        h.push(u.iter().map(|x| -x).collect(), -rhs);
    }
    if k == 0 {
        return Ok(h);
    }

    let proj: Vec<Vec<f64>> = v
        .points
        .iter()
        .map(|p| {
            let c: Vec<f64> = p.iter().zip(&centroid).map(|(a, b)| a - b).collect();
            basis.iter().map(|b| dot(b, &c)).collect()
        })
        .collect();

    let mut facets: Vec<(Vec<f64>, f64)> = Vec::new();
    if k == 1 {
        let lo = proj.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
        let hi = proj.iter().map(|y| y[0]).fold(f64::NEG_INFINITY, f64::max);
        facets.push((vec![1.0], hi));
        facets.push((vec![-1.0], -lo));
    } else {
        let cone: Vec<Vec<f64>> = proj
            .iter()
            .map(|y| std::iter::once(1.0).chain(y.iter().map(|x| -x)).collect())
            .collect();
        for r in extreme_rays(&cone)? {
            let t = r.v[0];
            if t <= RAY_TOL {
                return Err(PolytopeError::NumericalDegeneracy(
                    "polar cone ray at infinity".into(),
                ));
            }
            facets.push((r.v[1..].to_vec(), t));
        }
    }

    let mut seen: Vec<Vec<f64>> = Vec::new();
    for (a_proj, rhs) in facets {
        let mut normal = vec![0.0; d];
        for (coef, b) in a_proj.iter().zip(&basis) {
            normal.iter_mut().zip(b).for_each(|(nv, bv)| *nv += coef * bv);
        }
        let mut rhs = rhs + dot(&normal, &centroid);
        let scale = normalize(&mut normal);
        if scale == 0.0 {
            continue;
        }
        rhs /= scale;
        let mut key = normal.clone();
        key.push(rhs);
        if seen
            .iter()
            .any(|s| s.iter().zip(&key).all(|(a, b)| (a - b).abs() <= 1e-9))
        {
            continue;
        }
        let mut tight = 0usize;
        for p in &v.points {
            let slack = rhs - dot(&normal, p);
            if slack < -CHECK_TOL {
                return Err(PolytopeError::NumericalDegeneracy(format!(
                    "vertex violates facet by {:.3e}",
                    -slack
                )));
            }
            if slack <= CHECK_TOL {
                tight += 1;
            }
        }
        if tight < k {
            return Err(PolytopeError::NumericalDegeneracy(format!(
                "facet tight at {tight} vertices, expected at least {k}"
            )));
        }
        seen.push(key);
        h.push(normal, rhs);
    }
    Ok(h)
}

/// Enumerates the vertices of a bounded polyhedron `{x : A x ≤ b}`.
///
/// Used for round-trip checks of [`dual_conversion`]. Vertices closer than
/// `1e-9` are merged.
pub fn hrep_to_vrep(h: &HRep) -> Result<VRep, PolytopeError> {
    let d = h.dim;
    let mut cone: Vec<Vec<f64>> = Vec::with_capacity(h.n_rows() + 1);
    let mut t_row = vec![0.0; d + 1];
    t_row[0] = 1.0;
    cone.push(t_row);
    for (row, &rhs) in h.a.iter().zip(&h.b) {
        cone.push(std::iter::once(rhs).chain(row.iter().map(|x| -x)).collect());
    }
    let rays = extreme_rays(&cone)?;
    let mut out = VRep::new(d);
    for r in rays {
        let t = r.v[0];
        if t <= RAY_TOL {
            return Err(PolytopeError::NumericalDegeneracy(
                "polyhedron is unbounded".into(),
            ));
        }
        let p: Vec<f64> = r.v[1..].iter().map(|x| x / t).collect();
        if !out.contains_point(&p, 1e-9) {
            out.points.push(p);
        }
    }
    Ok(out)
}
