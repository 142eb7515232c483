use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane; 1D domains only use the first coordinate.
pub type Point = [f64; 2];

/// One building block of a domain. The domain is the union of its pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Interval { a: f64, b: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disc { cx: f64, cy: f64, r: f64 },
    /// Segment from `(x0, y0)` to `(x1, y1)` thickened to `width`.
    Passage {
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        width: f64,
    },
}

impl Primitive {
    pub fn dimension(&self) -> usize {
        match self {
            Primitive::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Strict interior test; `tol` shrinks the primitive before testing.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match *self {
            Primitive::Interval { a, b } => p[0] > a + tol && p[0] < b - tol,
            Primitive::Rect { x0, y0, x1, y1 } => {
                p[0] > x0 + tol && p[0] < x1 - tol && p[1] > y0 + tol && p[1] < y1 - tol
            }
            Primitive::Disc { cx, cy, r } => {
                let (dx, dy) = (p[0] - cx, p[1] - cy);
                (dx * dx + dy * dy).sqrt() < r - tol
            }
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => {
                let (s, n) = passage_coords(x0, y0, x1, y1, p);
                let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
                s > tol && s < len - tol && n.abs() < width / 2.0 - tol
            }
        }
    }

    /// Closed containment with tolerance `tol` added to the primitive.
    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        match *self {
            Primitive::Interval { a, b } => p[0] >= a - tol && p[0] <= b + tol,
            Primitive::Rect { x0, y0, x1, y1 } => {
                p[0] >= x0 - tol && p[0] <= x1 + tol && p[1] >= y0 - tol && p[1] <= y1 + tol
            }
            Primitive::Disc { cx, cy, r } => {
                let (dx, dy) = (p[0] - cx, p[1] - cy);
                (dx * dx + dy * dy).sqrt() <= r + tol
            }
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => {
                let (s, n) = passage_coords(x0, y0, x1, y1, p);
                let len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
                s >= -tol && s <= len + tol && n.abs() <= width / 2.0 + tol
            }
        }
    }

    /// Narrowest extent of the piece; a lattice must be finer than this.
    pub fn min_width(&self) -> f64 {
        match *self {
            Primitive::Interval { a, b } => b - a,
            Primitive::Rect { x0, y0, x1, y1 } => (x1 - x0).min(y1 - y0),
            Primitive::Disc { r, .. } => 2.0 * r,
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => width.min(((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()),
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match *self {
            Primitive::Interval { a, b } => ([a, 0.0], [b, 0.0]),
            Primitive::Rect { x0, y0, x1, y1 } => ([x0, y0], [x1, y1]),
            Primitive::Disc { cx, cy, r } => ([cx - r, cy - r], [cx + r, cy + r]),
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => {
                let w = width / 2.0;
                (
                    [x0.min(x1) - w, y0.min(y1) - w],
                    [x0.max(x1) + w, y0.max(y1) + w],
                )
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Primitive {
        match *self {
            Primitive::Interval { a, b } => Primitive::Interval { a: c * a, b: c * b },
            Primitive::Rect { x0, y0, x1, y1 } => Primitive::Rect {
                x0: c * x0,
                y0: c * y0,
                x1: c * x1,
                y1: c * y1,
            },
            Primitive::Disc { cx, cy, r } => Primitive::Disc {
                cx: c * cx,
                cy: c * cy,
                r: c * r,
            },
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => Primitive::Passage {
                x0: c * x0,
                y0: c * y0,
                x1: c * x1,
                y1: c * y1,
                width: c * width,
            },
        }
    }

    /// The statement this piece would be written as in a domain file.
    pub fn to_statement(&self) -> String {
        match *self {
            Primitive::Interval { a, b } => format!("interval {a} {b}"),
            Primitive::Rect { x0, y0, x1, y1 } => format!("rect {x0} {y0} {x1} {y1}"),
            Primitive::Disc { cx, cy, r } => format!("disc {cx} {cy} {r}"),
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => format!("passage {x0} {y0} {x1} {y1} {width}"),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |message: &str| {
            Err(Error::Validation {
                piece: self.to_statement(),
                message: message.to_string(),
            })
        };
        let finite = match *self {
            Primitive::Interval { a, b } => [a, b].iter().all(|v| v.is_finite()),
            Primitive::Rect { x0, y0, x1, y1 } => [x0, y0, x1, y1].iter().all(|v| v.is_finite()),
            Primitive::Disc { cx, cy, r } => [cx, cy, r].iter().all(|v| v.is_finite()),
            Primitive::Passage {
                x0,
                y0,
                x1,
                y1,
                width,
            } => [x0, y0, x1, y1, width].iter().all(|v| v.is_finite()),
        };
        if !finite {
            return bad("non-finite coordinate");
        }
        match *self {
            Primitive::Interval { a, b } if b <= a => bad("empty interval"),
            Primitive::Rect { x0, y0, x1, y1 } if x1 <= x0 || y1 <= y0 => bad("empty rectangle"),
            Primitive::Disc { r, .. } if r <= 0.0 => bad("empty disc"),
            Primitive::Passage { width, .. } if width <= 0.0 => bad("empty passage"),
            Primitive::Passage { x0, y0, x1, y1, .. } if x0 == x1 && y0 == y1 => {
                bad("passage of zero length")
            }
            _ => Ok(()),
        }
    }
}

fn passage_coords(x0: f64, y0: f64, x1: f64, y1: f64, p: Point) -> (f64, f64) {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    let (ux, uy) = (dx / len, dy / len);
    let (px, py) = (p[0] - x0, p[1] - y0);
    (px * ux + py * uy, -px * uy + py * ux)
}

/// Declarative description of an open set in one or two dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dimension: usize,
    pub pieces: Vec<Primitive>,
    pub label: String,
    /// Free-form remarks carried into reports, e.g. truncation of countable unions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DomainSpec {
    pub fn new(dimension: usize, pieces: Vec<Primitive>, label: impl Into<String>) -> Result<Self> {
        let spec = DomainSpec {
            dimension,
            pieces,
            label: label.into(),
            notes: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::Validation {
                piece: format!("dim={}", self.dimension),
                message: "dimension must be 1 or 2".into(),
            });
        }
        if self.pieces.is_empty() {
            return Err(Error::Validation {
                piece: self.label.clone(),
                message: "domain has no pieces".into(),
            });
        }
        for piece in &self.pieces {
            piece.validate()?;
            if piece.dimension() != self.dimension {
                return Err(Error::Validation {
                    piece: piece.to_statement(),
                    message: format!("piece is not {}-dimensional", self.dimension),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.pieces.iter().any(|q| q.contains(p, tol))
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for piece in &self.pieces {
            let (a, b) = piece.bounding_box();
            for k in 0..2 {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(b[k]);
            }
        }
        (lo, hi)
    }

    /// The dilated set `c * self`.
    pub fn scaled(&self, c: f64) -> DomainSpec {
        DomainSpec {
            dimension: self.dimension,
            pieces: self.pieces.iter().map(|p| p.scaled(c)).collect(),
            label: format!("{}*{}", c, self.label),
            notes: self.notes.clone(),
        }
    }

    /// Rendering in the domain text format; `parse_domain` reads it back.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim={}\n", self.dimension);
        for piece in &self.pieces {
            out.push_str(&piece.to_statement());
            out.push('\n');
        }
        out
    }

    /// Pieces are pairwise disjoint intervals (1D only).
    pub fn disjoint_intervals(&self) -> Option<Vec<(f64, f64)>> {
        if self.dimension != 1 {
            return None;
        }
        let mut iv: Vec<(f64, f64)> = self
            .pieces
            .iter()
            .filter_map(|p| match *p {
                Primitive::Interval { a, b } => Some((a, b)),
                _ => None,
            })
            .collect();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        if iv.windows(2).any(|w| w[1].0 < w[0].1) {
            return None;
        }
        Some(iv)
    }
}
