use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::domain::{DomainSpec, Primitive};
use super::parse::parse_number;

/// Names accepted by `preset`.
pub const PRESET_NAMES: [&str; 7] = [
    "dumbbell",
    "disjoint_balls",
    "interval_union",
    "packed_cubes",
    "tadpole",
    "unit_interval",
    "unit_square",
];

fn arg_error(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        column: 1,
        message: message.into(),
    }
}

/// Expand `name(args)`; arguments may be written `key=value`.
pub fn preset(expr: &str) -> Result<DomainSpec> {
    let expr = expr.trim();
    let (name, args) = match expr.find('(') {
        Some(k) => {
            let inner = expr[k + 1..]
                .strip_suffix(')')
                .ok_or_else(|| arg_error(format!("missing `)` in `{expr}`")))?;
            (expr[..k].trim(), inner)
        }
        None => (expr, ""),
    };
    let values: Vec<f64> = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| {
            let v = a.rsplit('=').next().unwrap_or(a).trim();
            parse_number(v).ok_or_else(|| arg_error(format!("invalid preset argument `{a}`")))
        })
        .collect::<Result<_>>()?;

    let count = |v: f64, what: &str| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 && v <= 1e6 {
            Ok(v as usize)
        } else {
            Err(arg_error(format!("{what} must be a positive integer, got {v}")))
        }
    };
    let arity = |n: usize| -> Result<()> {
        if values.len() == n {
            Ok(())
        } else {
            Err(arg_error(format!(
                "`{name}` takes {n} argument(s), found {}",
                values.len()
            )))
        }
    };

    match name {
        "dumbbell" => {
            arity(2)?;
            dumbbell(count(values[0], "m")?, values[1])
        }
        "disjoint_balls" => {
            arity(1)?;
            disjoint_balls(count(values[0], "m")?)
        }
        "interval_union" => {
            if values.is_empty() {
                return Err(arg_error("`interval_union` needs at least one length"));
            }
            interval_union(&values)
        }
        "packed_cubes" => {
            arity(1)?;
            packed_cubes(count(values[0], "K")?)
        }
        "tadpole" => {
            arity(0)?;
            Ok(tadpole())
        }
        "unit_interval" => {
            arity(0)?;
            Ok(unit_interval())
        }
        "unit_square" => {
            arity(0)?;
            Ok(unit_square())
        }
        other => Err(arg_error(format!(
            "unknown preset `{other}` (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn passage(a: [f64; 2], b: [f64; 2], eps: f64) -> Primitive {
    let tol = 1e-12 * (1.0 + a[0].abs().max(a[1].abs()));
    if (a[1] - b[1]).abs() < tol {
        Primitive::Rect {
            x0: a[0].min(b[0]),
            y0: a[1] - eps / 2.0,
            x1: a[0].max(b[0]),
            y1: a[1] + eps / 2.0,
        }
    } else if (a[0] - b[0]).abs() < tol {
        Primitive::Rect {
            x0: a[0] - eps / 2.0,
            y0: a[1].min(b[1]),
            x1: a[0] + eps / 2.0,
            y1: a[1].max(b[1]),
        }
    } else {
        Primitive::Passage {
            x0: a[0],
            y0: a[1],
            x1: b[0],
            y1: b[1],
            width: eps,
        }
    }
}

/// Centres of the dumbbell discs: corners of a regular m-gon with edge 3.
pub fn dumbbell_centres(m: usize) -> Vec<[f64; 2]> {
    if m == 1 {
        return vec![[0.0, 0.0]];
    }
    let radius = 3.0 / (2.0 * (PI / m as f64).sin());
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    (0..m)
        .map(|i| {
            let theta = PI / 2.0 - PI / m as f64 + 2.0 * PI * i as f64 / m as f64;
            [snap(radius * theta.cos()), snap(radius * theta.sin())]
        })
        .collect()
}

/// m unit discs on a regular m-gon of edge 3, neighbours joined by passages of width eps.
pub fn dumbbell(m: usize, eps: f64) -> Result<DomainSpec> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(arg_error(format!("dumbbell width must lie in (0, 1], got {eps}")));
    }
    let centres = dumbbell_centres(m);
    let mut pieces: Vec<Primitive> = centres
        .iter()
        .map(|c| Primitive::Disc {
            cx: c[0],
            cy: c[1],
            r: 1.0,
        })
        .collect();
    let edges = match m {
        1 => 0,
        2 => 1,
        _ => m,
    };
    for i in 0..edges {
        pieces.push(passage(centres[i], centres[(i + 1) % m], eps));
    }
    DomainSpec::new(2, pieces, format!("dumbbell({m}, {})", fmt_num(eps)))
}

/// m pairwise disjoint unit discs centred at (3i, 0).
pub fn disjoint_balls(m: usize) -> Result<DomainSpec> {
    let pieces = (0..m)
        .map(|i| Primitive::Disc {
            cx: 3.0 * i as f64,
            cy: 0.0,
            r: 1.0,
        })
        .collect();
    DomainSpec::new(2, pieces, format!("disjoint_balls({m})"))
}

/// Intervals of the given lengths laid out from 0 with unit gaps.
pub fn interval_union(lengths: &[f64]) -> Result<DomainSpec> {
    let mut a = 0.0;
    let mut pieces = Vec::with_capacity(lengths.len());
    for &l in lengths {
        pieces.push(Primitive::Interval { a, b: a + l });
        a += l + 1.0;
    }
    let label = lengths.iter().map(|&l| fmt_num(l)).collect::<Vec<_>>().join(", ");
    DomainSpec::new(1, pieces, format!("interval_union({label})"))
}

/// The first K squares of side 2^-k from a countable packing, placed side by side.
pub fn packed_cubes(k: usize) -> Result<DomainSpec> {
    let mut x = 0.0;
    let mut pieces = Vec::with_capacity(k);
    for i in 0..k {
        let side = 0.5f64.powi(i as i32);
        pieces.push(Primitive::Rect {
            x0: x,
            y0: 0.0,
            x1: x + side,
            y1: side,
        });
        x += side;
    }
    Ok(DomainSpec::new(2, pieces, format!("packed_cubes({k})"))?.with_note(format!(
        "countable family of cubes truncated to its first {k} members"
    )))
}

/// Unit disc with a long thin channel attached on the right.
pub fn tadpole() -> DomainSpec {
    DomainSpec {
        dimension: 2,
        pieces: vec![
            Primitive::Disc {
                cx: 0.0,
                cy: 0.0,
                r: 1.0,
            },
            Primitive::Rect {
                x0: 0.5,
                y0: -0.4167,
                x1: 15.0,
                y1: 0.4167,
            },
        ],
        label: "tadpole".into(),
        notes: Vec::new(),
    }
}

pub fn unit_interval() -> DomainSpec {
    DomainSpec {
        dimension: 1,
        pieces: vec![Primitive::Interval { a: 0.0, b: 1.0 }],
        label: "unit_interval".into(),
        notes: Vec::new(),
    }
}

pub fn unit_square() -> DomainSpec {
    DomainSpec {
        dimension: 2,
        pieces: vec![Primitive::Rect {
            x0: 0.0,
            y0: 0.0,
            x1: 1.0,
            y1: 1.0,
        }],
        label: "unit_square".into(),
        notes: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dumbbell_two_is_discs_and_a_bar() {
        let spec = preset("dumbbell(m=2, eps=0.2)").unwrap();
        assert_eq!(spec.pieces.len(), 3);
        assert_eq!(
            spec.pieces[0],
            Primitive::Disc {
                cx: 1.5,
                cy: 0.0,
                r: 1.0
            }
        );
        assert_eq!(
            spec.pieces[1],
            Primitive::Disc {
                cx: -1.5,
                cy: 0.0,
                r: 1.0
            }
        );
        match spec.pieces[2] {
            Primitive::Rect { x0, y0, x1, y1 } => {
                assert_eq!((x0, x1), (-1.5, 1.5));
                assert!((y1 - y0 - 0.2).abs() < 1e-15);
            }
            ref other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn polygon_edges_have_length_three() {
        for m in 3..8 {
            let c = dumbbell_centres(m);
            for i in 0..m {
                let (a, b) = (c[i], c[(i + 1) % m]);
                let len = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!((len - 3.0).abs() < 1e-12);
            }
        }
        let spec = dumbbell(3, 0.2).unwrap();
        assert_eq!(spec.pieces.len(), 6);
        assert!(spec.pieces.iter().any(|p| matches!(p, Primitive::Passage { .. })));
    }

    #[test]
    fn interval_union_layout() {
        let spec = preset("interval_union(1, 0.5, 0.25)").unwrap();
        assert_eq!(
            spec.disjoint_intervals().unwrap(),
            vec![(0.0, 1.0), (2.0, 2.5), (3.5, 3.75)]
        );
    }

    #[test]
    fn packed_cubes_carry_truncation_note() {
        let spec = preset("packed_cubes(3)").unwrap();
        assert_eq!(spec.pieces.len(), 3);
        assert_eq!(spec.notes.len(), 1);
    }

    #[test]
    fn bad_arguments() {
        assert!(preset("dumbbell(2)").is_err());
        assert!(preset("dumbbell(2, 0)").is_err());
        assert!(preset("disjoint_balls(1.5)").is_err());
        assert!(preset("pretzel(2)").is_err());
    }
}
