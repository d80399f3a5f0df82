//! Plain-text curve files.
//!
//! One vertex per line as whitespace-separated decimal coordinates. `#`
//! starts a comment and blank lines are skipped. The first data line fixes
//! the dimension.

use std::fmt::Write as _;

use frechet_core::{Point, Polyline};

#[derive(Debug)]
pub enum ParseError {
    Number {
        line: usize,
        token: String,
    },
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    NonFinite {
        line: usize,
    },
    Empty,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Number { line, token } => {
                write!(f, "line {line}: `{token}` is not a number")
            }
            ParseError::Dimension {
                line,
                expected,
                found,
            } => {
                write!(
                    f,
                    "line {line}: expected {expected} coordinates, found {found}"
                )
            }
            ParseError::NonFinite { line } => write!(f, "line {line}: coordinate is not finite"),
            ParseError::Empty => write!(f, "no vertices"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Strips the comment and returns the numbers of one line, or `None` for a
/// line without data. Line numbers are 1-based.
pub fn parse_numbers(raw: &str, line: usize) -> Result<Option<Vec<f64>>, ParseError> {
    let data = raw.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    for tok in data.split_whitespace() {
        let v: f64 = tok.parse().map_err(|_| ParseError::Number {
            line,
            token: tok.to_string(),
        })?;
        if !v.is_finite() {
            return Err(ParseError::NonFinite { line });
        }
        out.push(v);
    }
    Ok(if out.is_empty() { None } else { Some(out) })
}

pub fn parse_curve(text: &str) -> Result<Polyline, ParseError> {
    let mut pts = Vec::new();
    let mut dim = None;
    for (k, raw) in text.lines().enumerate() {
        let Some(coords) = parse_numbers(raw, k + 1)? else {
            continue;
        };
        let expected = *dim.get_or_insert(coords.len());
        if coords.len() != expected {
            return Err(ParseError::Dimension {
                line: k + 1,
                expected,
                found: coords.len(),
            });
        }
        pts.push(Point::new(&coords).map_err(|_| ParseError::NonFinite { line: k + 1 })?);
    }
    Polyline::new(pts).map_err(|_| ParseError::Empty)
}

/// Shortest decimal form of every coordinate, so parsing the output gives
/// back the same bits.
pub fn emit_curve(z: &Polyline) -> String {
    let mut s = String::new();
    for p in z.vertices() {
        let line: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn comments_and_blank_lines() {
        let z = parse_curve("# header\n0 0\n\n1 2 # tail\n  3 4.5\n").unwrap();
        assert_eq!(z, Polyline::from_xy(&[(0.0, 0.0), (1.0, 2.0), (3.0, 4.5)]));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_curve("0 0\n1\n"),
            Err(ParseError::Dimension {
                line: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_curve("0 0\n1 x\n"),
            Err(ParseError::Number { line: 2, .. })
        ));
        assert!(matches!(
            parse_curve("0 inf\n"),
            Err(ParseError::NonFinite { line: 1 })
        ));
        assert!(matches!(parse_curve("# nothing\n"), Err(ParseError::Empty)));
    }

    #[test]
    fn three_dimensions() {
        let z = parse_curve("0 0 0\n1 1 1\n").unwrap();
        assert_eq!(z.dim(), 3);
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(pts in prop::collection::vec((any::<f64>(), any::<f64>()), 1..40)) {
            let pts: Vec<(f64, f64)> = pts.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
            prop_assume!(!pts.is_empty());
            let z = Polyline::from_xy(&pts);
            let back = parse_curve(&emit_curve(&z)).unwrap();
            for (p, q) in z.vertices().iter().zip(back.vertices()) {
                for (a, b) in p.coords().iter().zip(q.coords()) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
            prop_assert_eq!(z.len(), back.len());
        }
    }
}
