use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::GridMask;
use crate::linalg::{smallest_eigenpairs, EigenOptions};

use super::eigdata::{grid_norms, EigenData, Source};
use super::operator::{assemble_laplacian, elimination_order, DEFAULT_DOF_CAP};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Request {
    /// The `K` smallest eigenpairs.
    Count(usize),
    /// Every eigenpair with eigenvalue at most `t`.
    Threshold(f64),
}

/// Relative gap required between the last eigenvalue at or below a threshold and the next one.
pub const GAP_TOL: f64 = 1e-8;

struct ComponentPairs {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    /// Whether the component spectrum is exhausted (all of its eigenvalues are listed).
    exhausted: bool,
}

fn weyl_estimate(n_nodes: usize, h: f64, d: usize, t: f64) -> f64 {
    let volume = n_nodes as f64 * h.powi(d as i32);
    if d == 1 {
        volume * t.sqrt() / PI
    } else {
        volume * t / (4.0 * PI)
    }
}

fn solve_component(sub: &GridMask, request: Request, opts: &EigenOptions) -> Result<ComponentPairs> {
    let op = assemble_laplacian(sub)?;
    let perm = elimination_order(sub);
    let n = sub.len();
    match request {
        Request::Count(k) => {
            let k = k.min(n);
            let p = smallest_eigenpairs(&op.matrix, &perm, k, opts)?;
            Ok(ComponentPairs {
                values: p.values,
                vectors: p.vectors,
                residuals: p.residuals,
                exhausted: k == n,
            })
        }
        Request::Threshold(t) => {
            let target = 1.05 * t;
            let mut k = ((1.3 * weyl_estimate(n, sub.h, sub.dimension, target)).ceil() as usize + 10).min(n);
            loop {
                let p = smallest_eigenpairs(&op.matrix, &perm, k, opts)?;
                let top = p.values.last().copied().unwrap_or(f64::INFINITY);
                if top > target || k == n {
                    return Ok(ComponentPairs {
                        values: p.values,
                        vectors: p.vectors,
                        residuals: p.residuals,
                        exhausted: k == n,
                    });
                }
                k = (2 * k).min(n);
            }
        }
    }
}

/// Node offsets of a component relative to its first node; equal keys mean translated copies.
fn shape_key(mask: &GridMask, members: &[usize]) -> Vec<[i64; 2]> {
    let base = mask.nodes()[members[0]];
    members
        .iter()
        .map(|&k| {
            let n = mask.nodes()[k];
            [n[0] - base[0], n[1] - base[1]]
        })
        .collect()
}

/// Lowest Dirichlet eigenpairs of the lattice Laplacian on `mask`.
///
/// Each connected component is solved on its own and translated copies share one
/// solve, so disjoint congruent pieces give exactly repeated eigenvalues.
pub fn lowest_eigenpairs(mask: &GridMask, request: Request) -> Result<EigenData> {
    lowest_eigenpairs_with(mask, request, &EigenOptions::default(), DEFAULT_DOF_CAP)
}

pub fn lowest_eigenpairs_with(
    mask: &GridMask,
    request: Request,
    opts: &EigenOptions,
    cap: usize,
) -> Result<EigenData> {
    match request {
        Request::Count(0) => return Err(Error::Config("eigenpair count must be at least 1".into())),
        Request::Threshold(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(Error::Config(format!("threshold must be positive, got {t}")))
        }
        _ => {}
    }
    // Cap applies to the whole problem even though components are solved separately.
    if mask.len() > cap {
        return Err(Error::Resource {
            n_dof: mask.len(),
            cap,
        });
    }

    let comps = mask.components();
    let mut cache: HashMap<Vec<[i64; 2]>, usize> = HashMap::new();
    let mut solved: Vec<ComponentPairs> = Vec::new();
    let mut which = Vec::with_capacity(comps.len());
    for members in &comps {
        let key = shape_key(mask, members);
        let slot = match cache.get(&key) {
            Some(&s) => s,
            None => {
                let (sub, _) = mask.subset(|k| members.binary_search(&k).is_ok()).expect("nonempty component");
                let pairs = solve_component(&sub, request, opts)?;
                solved.push(pairs);
                cache.insert(key, solved.len() - 1);
                solved.len() - 1
            }
        };
        which.push(slot);
    }

    // (eigenvalue, component, local index)
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (c, &slot) in which.iter().enumerate() {
        for (i, &v) in solved[slot].values.iter().enumerate() {
            all.push((v, c, i));
        }
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let (chosen, complete_up_to) = match request {
        Request::Count(k) => {
            let k = k.min(all.len());
            (all[..k].to_vec(), None)
        }
        Request::Threshold(t) => {
            let below: Vec<_> = all.iter().copied().filter(|e| e.0 <= t).collect();
            let next_above = all.iter().map(|e| e.0).find(|&v| v > t);
            let last_below = below.last().map_or(0.0, |e| e.0);
            let complete = match next_above {
                Some(v) => v - last_below > GAP_TOL * t,
                None => which.iter().all(|&s| solved[s].exhausted),
            };
            (below, complete.then_some(t))
        }
    };

    let d = mask.dimension;
    let scale = mask.h.powf(-(d as f64) / 2.0);
    let w = mask.cell_volume();
    let mut data = EigenData {
        h: Some(mask.h),
        dimension: d,
        source: Source::Grid,
        label: String::new(),
        eigenvalues: Vec::with_capacity(chosen.len()),
        norms: Vec::with_capacity(chosen.len()),
        integrals: Vec::with_capacity(chosen.len()),
        components: Vec::with_capacity(chosen.len()),
        complete_up_to,
        volume: Some(mask.len() as f64 * w),
        residuals: Vec::with_capacity(chosen.len()),
        modes: Vec::new(),
        functions: Vec::with_capacity(chosen.len()),
        mask: Some(mask.clone()),
    };
    for (value, c, i) in chosen {
        let pairs = &solved[which[c]];
        let mut f = vec![0.0; mask.len()];
        for (&node, &v) in comps[c].iter().zip(&pairs.vectors[i]) {
            f[node] = v * scale;
        }
        fix_sign(&mut f);
        data.norms.push(grid_norms(&f, mask.h, d));
        data.integrals.push(w * f.iter().sum::<f64>());
        data.eigenvalues.push(value);
        data.components.push(c);
        data.residuals.push(pairs.residuals[i]);
        data.functions.push(f);
    }
    Ok(data)
}

/// Largest-magnitude entry positive; the first such entry on ties.
pub fn fix_sign(f: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &v in f.iter() {
        if v.abs() > best {
            best = v.abs();
            sign = v.signum();
        }
    }
    if sign < 0.0 {
        f.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Smallest eigenvalue of the lattice Laplacian on `mask`.
pub fn ground_state(mask: &GridMask) -> Result<f64> {
    let comps = mask.components();
    let mut cache: HashMap<Vec<[i64; 2]>, f64> = HashMap::new();
    let mut best = f64::INFINITY;
    for members in &comps {
        let key = shape_key(mask, members);
        let v = match cache.get(&key) {
            Some(&v) => v,
            None => {
                let (sub, _) = mask.subset(|k| members.binary_search(&k).is_ok()).expect("nonempty component");
                let op = assemble_laplacian(&sub)?;
                let perm = elimination_order(&sub);
                let p = smallest_eigenpairs(&op.matrix, &perm, 1, &EigenOptions::default())?;
                cache.insert(key, p.values[0]);
                p.values[0]
            }
        };
        best = best.min(v);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_domain, presets, rasterize};
    use crate::linalg::dot;
    use crate::spectral::counting_function;

    #[test]
    fn unit_interval_ground_state() {
        let mask = rasterize(&presets::unit_interval(), 1.0 / 512.0).unwrap();
        let e = lowest_eigenpairs(&mask, Request::Count(3)).unwrap();
        assert!((e.eigenvalues[0] / (PI * PI) - 1.0).abs() < 1e-3);
        for n in &e.norms {
            assert!((n.l2 - 1.0).abs() < 1e-10);
        }
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn unit_square_degenerate_pair() {
        let mask = rasterize(&presets::unit_square(), 1.0 / 64.0).unwrap();
        let e = lowest_eigenpairs(&mask, Request::Count(4)).unwrap();
        assert!((e.eigenvalues[0] / (2.0 * PI * PI) - 1.0).abs() < 3e-3);
        assert!((e.eigenvalues[1] / (5.0 * PI * PI) - 1.0).abs() < 3e-3);
        assert!((e.eigenvalues[2] / e.eigenvalues[1] - 1.0).abs() < 1e-9);
        let w = mask.cell_volume();
        for i in 0..4 {
            for j in 0..i {
                assert!((w * dot(&e.functions[i], &e.functions[j])).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn disjoint_copies_repeat_exactly() {
        let spec = parse_domain("dim=1; interval 0 1; interval 2 3; interval 5 6").unwrap();
        let mask = rasterize(&spec, 1.0 / 64.0).unwrap();
        let e = lowest_eigenpairs(&mask, Request::Threshold(50.0)).unwrap();
        assert_eq!(e.eigenvalues.len(), 6);
        assert_eq!(e.eigenvalues[0], e.eigenvalues[2]);
        assert_eq!(e.complete_up_to, Some(50.0));
        assert_eq!(counting_function(&e, e.eigenvalues[0]).unwrap(), 3);
        assert_eq!(e.components[..3], [0, 1, 2]);
    }

    #[test]
    fn sign_rule() {
        let mut f = vec![0.1, -0.5, 0.5, 0.2];
        fix_sign(&mut f);
        assert_eq!(f, vec![-0.1, 0.5, -0.5, -0.2]);
    }

    #[test]
    fn nested_masks_lower_the_ground_state() {
        let small = rasterize(&parse_domain("dim=2; rect 0 0 1 1").unwrap(), 1.0 / 16.0).unwrap();
        let big = rasterize(&parse_domain("dim=2; rect 0 0 1.5 1").unwrap(), 1.0 / 16.0).unwrap();
        assert!(ground_state(&big).unwrap() < ground_state(&small).unwrap());
    }
}
