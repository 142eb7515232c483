//! Reader for the line-oriented domain format.
//!
//! ```text
//! dim=2
//! rect 0 0 1 1
//! disc 3 0 1
//! preset dumbbell(2, 0.2)
//! ```
//!
//! Statements are separated by newlines or `;`, `#` starts a comment.

use crate::error::{Error, Result};

use super::domain::{DomainSpec, Primitive};
use super::presets;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Decimal number with optional exponent; rejects `inf`, `nan` and hex forms.
pub(crate) fn parse_number(text: &str) -> Option<f64> {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(k) => (&body[..k], Some(&body[k + 1..])),
        None => (body, None),
    };
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    let dots = mantissa.chars().filter(|&c| c == '.').count();
    if digits == 0 || dots > 1 || mantissa.chars().any(|c| !c.is_ascii_digit() && c != '.') {
        return None;
    }
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !e.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
    }
    text.parse().ok()
}

fn tokens(statement: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in statement.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &statement[s..i],
                    column: offset + s + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &statement[s..],
            column: offset + s + 1,
        });
    }
    out
}

fn numbers(line: usize, args: &[Token<'_>], expected: usize, keyword: &str) -> Result<Vec<f64>> {
    if args.len() != expected {
        let column = args.get(expected).or(args.last()).map_or(1, |t| t.column);
        return Err(parse_error(
            line,
            column,
            format!("`{keyword}` takes {expected} numbers, found {}", args.len()),
        ));
    }
    args.iter()
        .map(|t| {
            parse_number(t.text)
                .ok_or_else(|| parse_error(line, t.column, format!("invalid number `{}`", t.text)))
        })
        .collect()
}

/// Parse a domain description. Preset expansions keep their position in the piece order.
pub fn parse_domain(text: &str) -> Result<DomainSpec> {
    let mut dimension: Option<(usize, usize, usize)> = None;
    let mut pieces: Vec<(Primitive, usize, usize)> = Vec::new();
    let mut label: Option<String> = None;
    let mut notes = Vec::new();
    let mut preset_dim: Option<usize> = None;

    for (line_no, raw_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for statement in line.split(';') {
            let here = offset;
            offset += statement.len() + 1;
            let toks = tokens(statement, here);
            let Some(head) = toks.first() else { continue };

            if let Some(rest) = head.text.strip_prefix("dim") {
                let value = rest.trim_start_matches('=');
                let value = if value.is_empty() {
                    toks.get(1)
                        .map(|t| t.text.trim_start_matches('='))
                        .unwrap_or("")
                } else {
                    value
                };
                let d = match value {
                    "1" => 1,
                    "2" => 2,
                    _ => {
                        return Err(parse_error(
                            line_no,
                            head.column,
                            format!("expected dim=1 or dim=2, found `{}`", statement.trim()),
                        ))
                    }
                };
                dimension = Some((d, line_no, head.column));
                continue;
            }

            match head.text {
                "interval" => {
                    let v = numbers(line_no, &toks[1..], 2, "interval")?;
                    pieces.push((Primitive::Interval { a: v[0], b: v[1] }, line_no, head.column));
                }
                "rect" => {
                    let v = numbers(line_no, &toks[1..], 4, "rect")?;
                    pieces.push((
                        Primitive::Rect {
                            x0: v[0],
                            y0: v[1],
                            x1: v[2],
                            y1: v[3],
                        },
                        line_no,
                        head.column,
                    ));
                }
                "disc" => {
                    let v = numbers(line_no, &toks[1..], 3, "disc")?;
                    pieces.push((
                        Primitive::Disc {
                            cx: v[0],
                            cy: v[1],
                            r: v[2],
                        },
                        line_no,
                        head.column,
                    ));
                }
                "passage" => {
                    let v = numbers(line_no, &toks[1..], 5, "passage")?;
                    pieces.push((
                        Primitive::Passage {
                            x0: v[0],
                            y0: v[1],
                            x1: v[2],
                            y1: v[3],
                            width: v[4],
                        },
                        line_no,
                        head.column,
                    ));
                }
                "label" => {
                    let start = toks.get(1).map_or(statement.len(), |t| t.column - here - 1);
                    label = Some(statement[start..].trim().to_string());
                }
                "preset" => {
                    let expr = statement[head.column - here - 1 + head.text.len()..].trim();
                    let column = toks.get(1).map_or(head.column, |t| t.column);
                    let spec = presets::preset(expr).map_err(|e| match e {
                        Error::Parse { message, .. } => parse_error(line_no, column, message),
                        other => other,
                    })?;
                    if let Some(d) = preset_dim {
                        if d != spec.dimension {
                            return Err(parse_error(
                                line_no,
                                column,
                                "presets of different dimension cannot be combined",
                            ));
                        }
                    }
                    preset_dim = Some(spec.dimension);
                    if label.is_none() {
                        label = Some(spec.label.clone());
                    }
                    notes.extend(spec.notes);
                    pieces.extend(spec.pieces.into_iter().map(|p| (p, line_no, column)));
                }
                other => {
                    return Err(parse_error(
                        line_no,
                        head.column,
                        format!("unknown statement `{other}`"),
                    ))
                }
            }
        }
    }

    let dim = match (dimension, preset_dim) {
        (Some((d, line, column)), Some(p)) if d != p => {
            return Err(parse_error(
                line,
                column,
                format!("dim={d} conflicts with a {p}-dimensional preset"),
            ))
        }
        (Some((d, ..)), _) => d,
        (None, Some(p)) => p,
        (None, None) => match pieces.first() {
            Some((p, ..)) => p.dimension(),
            None => return Err(parse_error(1, 1, "empty domain description")),
        },
    };
    if pieces.is_empty() {
        return Err(parse_error(
            text.lines().count().max(1),
            1,
            "domain description has no pieces",
        ));
    }
    for (piece, line, column) in &pieces {
        if piece.dimension() != dim {
            return Err(parse_error(
                *line,
                *column,
                format!("`{}` does not match dim={dim}", piece.to_statement()),
            ));
        }
    }

    let spec = DomainSpec {
        dimension: dim,
        pieces: pieces.into_iter().map(|(p, ..)| p).collect(),
        label: label.unwrap_or_else(|| "domain".to_string()),
        notes,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_intervals() {
        let spec = parse_domain("dim=1; interval 0 1; interval 2 4").unwrap();
        assert_eq!(spec.dimension, 1);
        assert_eq!(
            spec.pieces,
            vec![
                Primitive::Interval { a: 0.0, b: 1.0 },
                Primitive::Interval { a: 2.0, b: 4.0 }
            ]
        );
    }

    #[test]
    fn empty_interval_is_a_validation_error() {
        let err = parse_domain("dim=1; interval 1 1").unwrap_err();
        match err {
            Error::Validation { piece, message } => {
                assert_eq!(message, "empty interval");
                assert!(piece.contains("interval 1 1"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_radius_names_the_piece() {
        let err = parse_domain("dim=2\ndisc 0 0 -1").unwrap_err();
        assert!(matches!(err, Error::Validation { ref message, .. } if message == "empty disc"));
    }

    #[test]
    fn malformed_number_reports_position() {
        let err = parse_domain("dim=2\nrect 0 0 1x 1").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_arity_and_unknown_keyword() {
        assert!(matches!(
            parse_domain("dim=2; rect 0 0 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_domain("dim=2\n\nellipse 0 0 1 2"),
            Err(Error::Parse {
                line: 3,
                column: 1,
                ..
            })
        ));
        assert!(matches!(parse_domain("dim=3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn numbers_accept_exponents_only_in_decimal_form() {
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("-2.5E+2"), Some(-250.0));
        assert_eq!(parse_number(".5"), Some(0.5));
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number("nan"), None);
        assert_eq!(parse_number("1e"), None);
        assert_eq!(parse_number("0x10"), None);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(parse_domain("dim=1\nrect 0 0 1 1").is_err());
        assert!(parse_domain("dim=1\npreset dumbbell(2, 0.2)").is_err());
    }

    #[test]
    fn comments_and_labels() {
        let spec = parse_domain("# a square\ndim=2\nlabel my square\nrect 0 0 1 1 # unit").unwrap();
        assert_eq!(spec.label, "my square");
        assert_eq!(spec.pieces.len(), 1);
    }

    #[test]
    fn to_text_round_trips() {
        let spec = parse_domain("preset dumbbell(3, 0.25)").unwrap();
        let back = parse_domain(&spec.to_text()).unwrap();
        assert_eq!(back.pieces, spec.pieces);
    }
}
