//! Discretized sets on a window that is periodic in `x` and truncated in
//! `x_d`, plus the plain-text grid format.

use crate::error::FracflowError;
use crate::Result;
use std::io::{BufRead, Write};

/// What the set looks like outside the sampled window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// The set tiles periodically in `x`; below the window it is full,
    /// above it is empty.
    Periodic,
    /// Outside the window the set equals the affine subgraph
    /// `{x_d < a x + b}`.
    Affine { a: f64, b: f64 },
    /// The set is empty outside the window (bounded-set variant).
    Empty,
}

/// Boolean occupancy on an `nx x nz` lattice of square cells with spacing
/// `h`. The window is centered at the origin: cell `(i, j)` has center
/// `((i + 0.5) h - nx h / 2, (j + 0.5) h - nz h / 2)`; row `j = 0` is the
/// lowest in `x_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorGrid {
    nx: usize,
    nz: usize,
    h: f64,
    occupancy: Vec<bool>,
    tail: Tail,
}

impl IndicatorGrid {
    pub fn new(nx: usize, nz: usize, h: f64, tail: Tail) -> Result<Self> {
        if nx == 0 || nz == 0 {
            return Err(FracflowError::config("nx/nz", "grid must be nonempty"));
        }
        if !(h > 0.0) {
            return Err(FracflowError::config("h", format!("must be > 0, got {h}")));
        }
        Ok(IndicatorGrid {
            nx,
            nz,
            h,
            occupancy: vec![false; nx * nz],
            tail,
        })
    }

    /// Fill from a characteristic function of physical coordinates.
    pub fn from_fn(
        nx: usize,
        nz: usize,
        h: f64,
        tail: Tail,
        f: impl Fn(f64, f64) -> bool,
    ) -> Result<Self> {
        let mut g = IndicatorGrid::new(nx, nz, h, tail)?;
        for j in 0..nz {
            for i in 0..nx {
                let (x, z) = g.cell_center(i, j);
                g.occupancy[j * nx + i] = f(x, z);
            }
        }
        Ok(g)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn tail(&self) -> Tail {
        self.tail
    }
    pub fn set_tail(&mut self, tail: Tail) {
        self.tail = tail;
    }

    /// Horizontal width of the window (the period in the periodic case).
    pub fn width(&self) -> f64 {
        self.nx as f64 * self.h
    }

    /// Vertical extent of the window.
    pub fn height(&self) -> f64 {
        self.nz as f64 * self.h
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            (i as f64 + 0.5) * self.h - 0.5 * self.width(),
            (j as f64 + 0.5) * self.h - 0.5 * self.height(),
        )
    }

    /// `x`-coordinate of column `i`'s center.
    pub fn column_x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h - 0.5 * self.width()
    }

    pub fn occupied(&self, i: usize, j: usize) -> bool {
        self.occupancy[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.occupancy[j * self.nx + i] = value;
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    /// Signed indicator at a cell index that may fall outside the window:
    /// `+1` in the set, `-1` in the complement. `ci` is a column index
    /// (wrapped when periodic), `cj` a signed row index.
    pub fn signed_at_cell(&self, ci: i64, cj: i64) -> f64 {
        let nxi = self.nx as i64;
        let nzi = self.nz as i64;
        match self.tail {
            Tail::Periodic => {
                if cj < 0 {
                    return 1.0;
                }
                if cj >= nzi {
                    return -1.0;
                }
                let i = ci.rem_euclid(nxi) as usize;
                if self.occupancy[cj as usize * self.nx + i] {
                    1.0
                } else {
                    -1.0
                }
            }
            Tail::Affine { a, b } => {
                if ci >= 0 && ci < nxi && cj >= 0 && cj < nzi {
                    if self.occupancy[cj as usize * self.nx + ci as usize] {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    let x = (ci as f64 + 0.5) * self.h - 0.5 * self.width();
                    let z = (cj as f64 + 0.5) * self.h - 0.5 * self.height();
                    if z < a * x + b {
                        1.0
                    } else {
                        -1.0
                    }
                }
            }
            Tail::Empty => {
                if ci >= 0 && ci < nxi && cj >= 0 && cj < nzi {
                    if self.occupancy[cj as usize * self.nx + ci as usize] {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    -1.0
                }
            }
        }
    }

    /// Membership test for a physical point, using the tail outside the
    /// window. Points on cell edges resolve to the cell above/right.
    pub fn contains(&self, x: f64, z: f64) -> bool {
        let ci = ((x + 0.5 * self.width()) / self.h).floor() as i64;
        let cj = ((z + 0.5 * self.height()) / self.h).floor() as i64;
        self.signed_at_cell(ci, cj) > 0.0
    }

    // ---------------------------------------------------------------- shapes

    /// Half-space `{x_d < level}` with affine tail `{x_d < level}`.
    pub fn half_space(nx: usize, nz: usize, h: f64, level: f64) -> Result<Self> {
        IndicatorGrid::from_fn(nx, nz, h, Tail::Affine { a: 0.0, b: level }, |_, z| z < level)
    }

    /// Disk of radius `r` centered at `(cx, cz)`; empty tail.
    pub fn disk(nx: usize, nz: usize, h: f64, r: f64, cx: f64, cz: f64) -> Result<Self> {
        IndicatorGrid::from_fn(nx, nz, h, Tail::Empty, |x, z| {
            (x - cx).powi(2) + (z - cz).powi(2) < r * r
        })
    }

    /// The two-hyperplane set `{x_d < -1} \cup {0 < x_d < 1}`.
    pub fn two_hyperplane(nx: usize, nz: usize, h: f64) -> Result<Self> {
        IndicatorGrid::from_fn(nx, nz, h, Tail::Affine { a: 0.0, b: -1.0 }, |_, z| {
            z < -1.0 || (z > 0.0 && z < 1.0)
        })
    }

    // ---------------------------------------------------------------- format

    /// Serialize in the `fracflow-grid v1` plain-text format.
    ///
    /// Header: `fracflow-grid v1 nx nz h tail_a tail_b`, then `nz` rows of
    /// `nx` characters from `{0,1}`, row 0 (lowest `x_d`) first. The tail
    /// fields encode the policy: finite `a b` is the affine descriptor,
    /// `nan nan` declares a periodic set, `0 -inf` an empty tail.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let (ta, tb) = match self.tail {
            Tail::Periodic => ("nan".to_string(), "nan".to_string()),
            Tail::Affine { a, b } => (format!("{a}"), format!("{b}")),
            Tail::Empty => ("0".to_string(), "-inf".to_string()),
        };
        writeln!(
            w,
            "fracflow-grid v1 {} {} {} {} {}",
            self.nx, self.nz, self.h, ta, tb
        )?;
        let mut row = String::with_capacity(self.nx + 1);
        for j in 0..self.nz {
            row.clear();
            for i in 0..self.nx {
                row.push(if self.occupancy[j * self.nx + i] { '1' } else { '0' });
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("grid text is ascii")
    }

    pub fn read_from(r: &mut impl BufRead) -> Result<Self> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 7 || fields[0] != "fracflow-grid" || fields[1] != "v1" {
            return Err(FracflowError::Parse(format!(
                "bad grid header: {}",
                header.trim_end()
            )));
        }
        let nx: usize = fields[2]
            .parse()
            .map_err(|_| FracflowError::Parse(format!("bad nx: {}", fields[2])))?;
        let nz: usize = fields[3]
            .parse()
            .map_err(|_| FracflowError::Parse(format!("bad nz: {}", fields[3])))?;
        let h: f64 = fields[4]
            .parse()
            .map_err(|_| FracflowError::Parse(format!("bad h: {}", fields[4])))?;
        let ta: f64 = fields[5]
            .parse()
            .map_err(|_| FracflowError::Parse(format!("bad tail_a: {}", fields[5])))?;
        let tb: f64 = fields[6]
            .parse()
            .map_err(|_| FracflowError::Parse(format!("bad tail_b: {}", fields[6])))?;
        let tail = if ta.is_nan() || tb.is_nan() {
            Tail::Periodic
        } else if tb == f64::NEG_INFINITY {
            Tail::Empty
        } else {
            Tail::Affine { a: ta, b: tb }
        };
        let mut grid = IndicatorGrid::new(nx, nz, h, tail)?;
        let mut line = String::new();
        for j in 0..nz {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(FracflowError::Parse(format!(
                    "grid truncated: expected {nz} rows, got {j}"
                )));
            }
            let row = line.trim_end();
            if row.len() != nx {
                return Err(FracflowError::Parse(format!(
                    "row {j} has {} cells, expected {nx}",
                    row.len()
                )));
            }
            for (i, ch) in row.chars().enumerate() {
                match ch {
                    '1' => grid.occupancy[j * nx + i] = true,
                    '0' => {}
                    other => {
                        return Err(FracflowError::Parse(format!(
                            "row {j} col {i}: unexpected char {other:?}"
                        )))
                    }
                }
            }
        }
        Ok(grid)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cursor = std::io::Cursor::new(text.as_bytes());
        IndicatorGrid::read_from(&mut cursor)
    }
}
