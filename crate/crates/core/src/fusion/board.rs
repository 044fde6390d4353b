use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::geometry::PixelCoord;

/// Image-space outline of a ground-truth board and its measured range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoardRegion {
    pub name: String,
    pub ground_truth_range_m: f64,
    pub polygon: Vec<PixelCoord>,
}

fn cross(o: PixelCoord, a: PixelCoord, b: PixelCoord) -> f64 {
    (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u)
}

impl BoardRegion {
    /// Validates a convex, non-degenerate polygon (either winding) and a
    /// positive ground-truth range.
    pub fn new(name: impl Into<String>, ground_truth_range_m: f64, polygon: Vec<PixelCoord>) -> Result<Self, FusionError> {
        let invalid = |m: &str| Err(FusionError::InvalidBoard(m.to_string()));
        if !(ground_truth_range_m.is_finite() && ground_truth_range_m > 0.0) {
            return invalid("ground-truth range must be positive");
        }
        if polygon.len() < 3 {
            return invalid("polygon needs at least three vertices");
        }
        if polygon.iter().any(|p| !p.is_finite()) {
            return invalid("polygon vertices must be finite");
        }
        let n = polygon.len();
        let mut sign = 0.0;
        let mut area2 = 0.0;
        for i in 0..n {
            let (a, b, c) = (polygon[i], polygon[(i + 1) % n], polygon[(i + 2) % n]);
            let turn = cross(a, b, c);
            area2 += a.u * b.v - b.u * a.v;
            if turn == 0.0 {
                continue;
            }
            if sign == 0.0 {
                sign = turn.signum();
            } else if turn.signum() != sign {
                return invalid("polygon is not convex");
            }
        }
        if area2.abs() <= f64::EPSILON || sign == 0.0 {
            return invalid("polygon has zero area");
        }
        // a convex turn sequence can still wind around twice
        let total: f64 = (0..n)
            .map(|i| {
                let (a, b, c) = (polygon[i], polygon[(i + 1) % n], polygon[(i + 2) % n]);
                let d1 = (b.u - a.u, b.v - a.v);
                let d2 = (c.u - b.u, c.v - b.v);
                (d1.0 * d2.1 - d1.1 * d2.0).atan2(d1.0 * d2.0 + d1.1 * d2.1)
            })
            .sum();
        if (total.abs() - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return invalid("polygon is self-intersecting");
        }
        Ok(Self { name: name.into(), ground_truth_range_m, polygon })
    }

    /// Point-in-polygon test; points on an edge count as inside.
    pub fn contains(&self, p: PixelCoord) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    /// As [`contains`](Self::contains) with every edge pushed outward by
    /// `margin` pixels.
    pub fn contains_with_margin(&self, p: PixelCoord, margin: f64) -> bool {
        let n = self.polygon.len();
        let orientation = {
            let area2: f64 = (0..n)
                .map(|i| {
                    let (a, b) = (self.polygon[i], self.polygon[(i + 1) % n]);
                    a.u * b.v - b.u * a.v
                })
                .sum();
            area2.signum()
        };
        (0..n).all(|i| {
            let (a, b) = (self.polygon[i], self.polygon[(i + 1) % n]);
            let len = ((b.u - a.u).powi(2) + (b.v - a.v).powi(2)).sqrt();
            // signed distance of p from the edge, positive inside
            cross(a, b, p) * orientation / len >= -margin
        })
    }
}

/// Board-region file: one board per line, `name ground_truth_m u1 v1 u2 v2 ...`.
pub fn parse_boards(text: &str) -> Result<Vec<BoardRegion>, FusionError> {
    let mut boards = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| FusionError::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() < 8 || !(fields.len() - 2).is_multiple_of(2) {
            return Err(parse_err("expected `name ground_truth_m u1 v1 u2 v2 u3 v3 ...`".into()));
        }
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(format!("`{f}` is not a number"))))
            .collect::<Result<_, _>>()?;
        let polygon = nums[1..].chunks(2).map(|c| PixelCoord::new(c[0], c[1])).collect();
        let board = BoardRegion::new(fields[0], nums[0], polygon).map_err(|e| parse_err(e.to_string()))?;
        boards.push(board);
    }
    Ok(boards)
}

impl std::fmt::Display for BoardRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.name, self.ground_truth_range_m)?;
        for p in &self.polygon {
            write!(f, " {} {}", p.u, p.v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<PixelCoord> {
        vec![PixelCoord::new(0.0, 0.0), PixelCoord::new(10.0, 0.0), PixelCoord::new(10.0, 10.0), PixelCoord::new(0.0, 10.0)]
    }

    #[test]
    fn boundary_points_are_inside() {
        let b = BoardRegion::new("sq", 5.0, square()).unwrap();
        assert!(b.contains(PixelCoord::new(5.0, 5.0)));
        assert!(b.contains(PixelCoord::new(0.0, 0.0)));
        assert!(b.contains(PixelCoord::new(10.0, 4.0)));
        assert!(!b.contains(PixelCoord::new(10.000001, 4.0)));
        assert!(b.contains_with_margin(PixelCoord::new(11.0, 4.0), 1.0));
        // winding does not matter
        let mut rev = square();
        rev.reverse();
        let r = BoardRegion::new("sq", 5.0, rev).unwrap();
        assert!(r.contains(PixelCoord::new(5.0, 5.0)) && !r.contains(PixelCoord::new(-1.0, 5.0)));
    }

    #[test]
    fn rejects_bad_regions() {
        assert!(BoardRegion::new("x", 0.0, square()).is_err());
        assert!(BoardRegion::new("x", 1.0, square()[..2].to_vec()).is_err());
        let collinear = vec![PixelCoord::new(0.0, 0.0), PixelCoord::new(1.0, 1.0), PixelCoord::new(2.0, 2.0)];
        assert!(BoardRegion::new("x", 1.0, collinear).is_err());
        let concave = vec![
            PixelCoord::new(0.0, 0.0),
            PixelCoord::new(10.0, 0.0),
            PixelCoord::new(5.0, 2.0),
            PixelCoord::new(10.0, 10.0),
            PixelCoord::new(0.0, 10.0),
        ];
        assert!(BoardRegion::new("x", 1.0, concave).is_err());
        let bowtie = vec![PixelCoord::new(0.0, 0.0), PixelCoord::new(10.0, 10.0), PixelCoord::new(10.0, 0.0), PixelCoord::new(0.0, 10.0)];
        assert!(BoardRegion::new("x", 1.0, bowtie).is_err());
    }

    #[test]
    fn parse_board_file() {
        let text = "# name gt u1 v1 ...\nposter 5.9 600 300 700 300 700 420 600 420\n";
        let boards = parse_boards(text).unwrap();
        assert_eq!(boards.len(), 1);
        assert_eq!(boards[0].ground_truth_range_m, 5.9);
        assert_eq!(parse_boards(&boards[0].to_string()).unwrap(), boards);
        assert!(matches!(parse_boards("a 1 0 0 1 1 2"), Err(FusionError::Parse { line: 1, .. })));
        assert!(matches!(parse_boards("\na 1 0 0 1 1 2 x"), Err(FusionError::Parse { line: 2, .. })));
    }
}
