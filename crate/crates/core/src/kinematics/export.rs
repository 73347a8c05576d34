use std::io::{self, Write};

pub const TRAJECTORY_HEADER: &str = "t,x_mm,y_mm";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x_mm: f64,
    pub y_mm: f64,
}

/// Writes `t,x_mm,y_mm` rows with LF endings and shortest round-trip decimals.
pub fn write_trajectory_csv<W: Write>(mut out: W, rows: &[TrajectoryRow]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.t, r.x_mm, r.y_mm)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let mut buf = Vec::new();
        let rows = [
            TrajectoryRow {
                t: 0.0,
                x_mm: -1.5,
                y_mm: 27.66182,
            },
            TrajectoryRow {
                t: 1000.25,
                x_mm: 2.0,
                y_mm: 0.0,
            },
        ];
        write_trajectory_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,x_mm,y_mm\n0,-1.5,27.66182\n1000.25,2,0\n"
        );
    }
}
