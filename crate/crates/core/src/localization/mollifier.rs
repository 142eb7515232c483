use serde::{Deserialize, Serialize};

/// Radial bump `rho(x) = c exp(-1/(1 - |2x|^2))` supported in `B(0, 1/2)`, unit mass.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mollifier {
    pub dimension: usize,
    /// Samples per unit length of the stored grid.
    pub resolution: usize,
    /// Normalization constant `c`.
    pub c: f64,
    /// `||Delta rho||_1`
    pub laplacian_l1: f64,
    /// `max{1, ||Delta rho||_1}`
    pub m_d: f64,
    /// `rho` on the grid `(i/resolution)` restricted to the ball, row-major over
    /// `[-1/2, 1/2]^d` with `resolution + 1` points per axis.
    #[serde(skip)]
    pub samples: Vec<f64>,
}

/// Unnormalized radial profile and its first two derivatives at radius `r < 1/2`.
fn profile(r: f64) -> (f64, f64, f64) {
    let u = 1.0 - 4.0 * r * r;
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let g = (-1.0 / u).exp();
    let g1 = -8.0 * r * g / (u * u);
    let g2 = -8.0 * g / (u * u) + 64.0 * r * r * g / u.powi(4) - 128.0 * r * r * g / u.powi(3);
    (g, g1, g2)
}

/// Unnormalized `rho` at a point given by its squared radius.
pub(crate) fn bump(r2: f64) -> f64 {
    let u = 1.0 - 4.0 * r2;
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p1 - pm) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `int_a^b f` by composite Gauss-Legendre with `panels` equal panels.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let (lo, hi) = (a + p as f64 * w, a + (p + 1) as f64 * w);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += rule.iter().map(|&(x, wt)| wt * f(mid + half * x)).sum::<f64>() * half;
    }
    total
}

/// Roots of `f` on `(a, b)` located by sign changes on a uniform scan, refined by bisection.
fn sign_changes(f: &dyn Fn(f64) -> f64, a: f64, b: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (b - a) / scan as f64;
    let mut x0 = a + 1e-12;
    let mut f0 = f(x0);
    for i in 1..=scan {
        let x1 = if i == scan { b - 1e-9 } else { a + i as f64 * step };
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (f(mid) < 0.0) == (f0 < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn shell(d: usize, r: f64) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI * r,
        _ => 4.0 * std::f64::consts::PI * r * r,
    }
}

/// Build the mollifier; mass and `||Delta rho||_1` come from radial quadrature, and the
/// stored Cartesian samples use `resolution` points per unit.
pub fn build_mollifier(dimension: usize, resolution: usize) -> Mollifier {
    assert!(resolution >= 64, "mollifier resolution must be at least 64");
    assert!((1..=3).contains(&dimension));
    let rule = gauss_legendre(20);
    let d = dimension;
    let mass = integrate(&|r| shell(d, r) * profile(r).0, 0.0, 0.5, 64, &rule);
    let c = 1.0 / mass;
    let lap = |r: f64| {
        let (_, g1, g2) = profile(r);
        if r == 0.0 {
            d as f64 * g2
        } else {
            g2 + (d as f64 - 1.0) * g1 / r
        }
    };
    let mut cuts = vec![0.0];
    cuts.extend(sign_changes(&lap, 0.0, 0.5, 4000));
    cuts.push(0.5);
    let mut lap_l1 = 0.0;
    for w in cuts.windows(2) {
        lap_l1 += integrate(&|r| shell(d, r) * lap(r).abs(), w[0], w[1], 64, &rule).abs();
    }
    lap_l1 *= c;

    let per_axis = resolution + 1;
    let step = 1.0 / resolution as f64;
    let coord = |i: usize| -0.5 + i as f64 * step;
    let samples = match d {
        1 => (0..per_axis).map(|i| c * bump(coord(i).powi(2))).collect(),
        _ => {
            let mut s = Vec::with_capacity(per_axis * per_axis);
            for j in 0..per_axis {
                for i in 0..per_axis {
                    s.push(c * bump(coord(i).powi(2) + coord(j).powi(2)));
                }
            }
            s
        }
    };
    Mollifier {
        dimension: d,
        resolution,
        c,
        laplacian_l1: lap_l1,
        m_d: lap_l1.max(1.0),
        samples,
    }
}

impl Mollifier {
    pub fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().take(self.dimension).map(|v| v * v).sum();
        self.c * bump(r2)
    }

    /// Riemann sum of the stored samples; approximates the unit mass.
    pub fn sampled_mass(&self) -> f64 {
        let step = 1.0 / self.resolution as f64;
        self.samples.iter().sum::<f64>() * step.powi(self.dimension as i32)
    }

    /// Weights of `rho` on the lattice `h Z^d`, normalized to sum to one exactly
    /// in the order returned. Offsets are in lattice units.
    pub fn lattice_kernel(&self, h: f64) -> Vec<([i64; 2], f64)> {
        let reach = (0.5 / h).ceil() as i64;
        let mut out = Vec::new();
        let ys = if self.dimension == 1 { 0..=0 } else { -reach..=reach };
        for j in ys {
            for i in -reach..=reach {
                let r2 = (i * i + j * j) as f64 * h * h;
                let v = bump(r2);
                if v > 0.0 {
                    out.push(([i, j], v));
                }
            }
        }
        if out.is_empty() {
            out.push(([0, 0], 1.0));
        }
        let total: f64 = out.iter().map(|e| e.1).sum();
        out.iter_mut().for_each(|e| e.1 /= total);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mass_and_support() {
        for d in [1, 2] {
            let m = build_mollifier(d, 1024);
            assert!((m.sampled_mass() - 1.0).abs() < 1e-6, "{}", m.sampled_mass());
            assert_eq!(m.value(&[0.5, 0.0]), 0.0);
            assert_eq!(m.value(&[0.3, 0.4]), if d == 1 { m.value(&[0.3]) } else { 0.0 });
            assert_eq!(m.value(&[-0.6]), 0.0);
            assert!(m.value(&[0.1, 0.1]) > 0.0);
            assert!(m.m_d >= 1.0);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn lattice_kernel_sums_to_one() {
        let m = build_mollifier(2, 64);
        let k = m.lattice_kernel(0.05);
        let s: f64 = k.iter().map(|e| e.1).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert!(k.iter().all(|e| ((e.0[0].pow(2) + e.0[1].pow(2)) as f64) * 0.0025 < 0.25));
    }
}
