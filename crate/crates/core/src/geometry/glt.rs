use crate::error::GeometryError;

/// Zero-based source-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SrcPixel {
    pub line: u32,
    pub sample: u32,
}

impl SrcPixel {
    pub fn new(line: u32, sample: u32) -> Self {
        Self { line, sample }
    }
}

/// Geometric lookup table: one optional source pixel per ortho pixel,
/// row-major over the ortho grid. `None` means the ortho pixel is unmapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glt {
    ortho_rows: usize,
    ortho_cols: usize,
    src_rows: usize,
    src_cols: usize,
    entries: Vec<Option<SrcPixel>>,
}

impl Glt {
    pub fn new(
        ortho_rows: usize,
        ortho_cols: usize,
        src_rows: usize,
        src_cols: usize,
        entries: Vec<Option<SrcPixel>>,
    ) -> Result<Self, GeometryError> {
        if entries.len() != ortho_rows * ortho_cols {
            return Err(GeometryError::ShapeMismatch(format!(
                "{} GLT entries for a {ortho_rows}x{ortho_cols} grid",
                entries.len()
            )));
        }
        for (i, e) in entries.iter().enumerate() {
            if let Some(p) = e {
                if p.line as usize >= src_rows || p.sample as usize >= src_cols {
                    return Err(GeometryError::OutOfRangeEntry {
                        row: i / ortho_cols,
                        col: i % ortho_cols,
                    });
                }
            }
        }
        Ok(Self {
            ortho_rows,
            ortho_cols,
            src_rows,
            src_cols,
            entries,
        })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        let entries = (0..rows * cols)
            .map(|i| Some(SrcPixel::new((i / cols) as u32, (i % cols) as u32)))
            .collect();
        Self {
            ortho_rows: rows,
            ortho_cols: cols,
            src_rows: rows,
            src_cols: cols,
            entries,
        }
    }

    pub fn ortho_shape(&self) -> (usize, usize) {
        (self.ortho_rows, self.ortho_cols)
    }

    pub fn src_shape(&self) -> (usize, usize) {
        (self.src_rows, self.src_cols)
    }

    pub fn entries(&self) -> &[Option<SrcPixel>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<SrcPixel> {
        self.entries[row * self.ortho_cols + col]
    }

    pub fn mapped_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// True when every ortho pixel maps to a distinct source pixel and every
    /// source pixel is hit.
    pub fn is_bijective(&self) -> bool {
        if self.ortho_rows * self.ortho_cols != self.src_rows * self.src_cols {
            return false;
        }
        let mut hit = vec![false; self.src_rows * self.src_cols];
        for e in &self.entries {
            match e {
                Some(p) => {
                    let i = p.line as usize * self.src_cols + p.sample as usize;
                    if std::mem::replace(&mut hit[i], true) {
                        return false;
                    }
                }
                None => return false,
            }
        }
        true
    }

    /// Source pixels referenced by any entry, dilated by a square window of
    /// radius `margin`.
    pub fn footprint(&self, margin: usize) -> Vec<bool> {
        let (rows, cols) = (self.src_rows, self.src_cols);
        let mut hit = vec![false; rows * cols];
        for p in self.entries.iter().flatten() {
            hit[p.line as usize * cols + p.sample as usize] = true;
        }
        if margin == 0 {
            return hit;
        }
        // separable max filter: horizontal then vertical
        let mut horiz = vec![false; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                let lo = c.saturating_sub(margin);
                let hi = (c + margin).min(cols - 1);
                horiz[r * cols + c] = hit[r * cols + lo..=r * cols + hi].iter().any(|v| *v);
            }
        }
        let mut out = vec![false; rows * cols];
        for r in 0..rows {
            let lo = r.saturating_sub(margin);
            let hi = (r + margin).min(rows - 1);
            for c in 0..cols {
                out[r * cols + c] = (lo..=hi).any(|rr| horiz[rr * cols + c]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        let err = Glt::new(1, 2, 1, 1, vec![Some(SrcPixel::new(0, 0)), Some(SrcPixel::new(0, 1))]);
        assert_eq!(err.unwrap_err(), GeometryError::OutOfRangeEntry { row: 0, col: 1 });
        assert!(matches!(Glt::new(2, 2, 1, 1, vec![None]), Err(GeometryError::ShapeMismatch(_))));
    }

    #[test]
    fn identity_is_bijective() {
        assert!(Glt::identity(3, 4).is_bijective());
        let g = Glt::new(1, 2, 1, 2, vec![Some(SrcPixel::new(0, 0)); 2]).unwrap();
        assert!(!g.is_bijective());
    }

    #[test]
    fn footprint_dilation() {
        let g = Glt::new(1, 1, 5, 5, vec![Some(SrcPixel::new(2, 2))]).unwrap();
        assert_eq!(g.footprint(0).iter().filter(|v| **v).count(), 1);
        let fp = g.footprint(1);
        assert_eq!(fp.iter().filter(|v| **v).count(), 9);
        assert!(fp[5 + 1] && !fp[0]);
    }
}
