//! Gauss-Jordan elimination fed one row at a time.
//!
//! Pivot rows are kept fully reduced: each one stores only its entries at
//! columns that are not (yet) pivots. A column-to-rows occurrence list lets a
//! fresh pivot be cleared from earlier rows without scanning all of them.
//! For block-banded systems whose kernel is small, the stored rows stay
//! short and the total work is dominated by reducing each incoming row.

use super::{AffineSolution, Matrix};
use crate::field::{FieldElement, PrimeField};
use crate::opcount;

const NO_PIVOT: usize = usize::MAX;

#[derive(Clone, Debug)]
struct PivotRow {
    col: usize,
    entries: Vec<(usize, FieldElement)>,
    rhs: FieldElement,
}

#[derive(Clone, Debug)]
pub struct StreamingRref {
    field: PrimeField,
    ncols: usize,
    pivot_of: Vec<usize>,
    rows: Vec<PivotRow>,
    occ: Vec<Vec<usize>>,
    inconsistent: bool,
}

impl StreamingRref {
    pub fn new(field: PrimeField, ncols: usize) -> Self {
        StreamingRref {
            field,
            ncols,
            pivot_of: vec![NO_PIVOT; ncols],
            rows: Vec::new(),
            occ: vec![Vec::new(); ncols],
            inconsistent: false,
        }
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `row . x = rhs`. `row` holds the leading columns
    /// (missing ones are zero) and is used as scratch; it may grow.
    pub fn push_row(&mut self, row: &mut Vec<FieldElement>, mut rhs: FieldElement) {
        assert!(row.len() <= self.ncols, "row longer than the system");
        if self.inconsistent {
            return;
        }
        let f = self.field;
        let mut muls = 0u64;
        for c in 0..row.len() {
            let x = row[c];
            let r = self.pivot_of[c];
            if x.is_zero() || r == NO_PIVOT {
                continue;
            }
            row[c] = FieldElement::ZERO;
            let prow = &self.rows[r];
            for &(fc, v) in &prow.entries {
                if fc >= row.len() {
                    row.resize(fc + 1, FieldElement::ZERO);
                }
                row[fc] = f.sub(row[fc], f.mul_raw(x, v));
            }
            rhs = f.sub(rhs, f.mul_raw(x, prow.rhs));
            muls += prow.entries.len() as u64 + 1;
        }
        // the newest column makes the best pivot: earlier rows rarely touch it
        let Some(pc) = (0..row.len()).rev().find(|&c| !row[c].is_zero()) else {
            opcount::add(muls);
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = f.inv(row[pc]).expect("pivot is nonzero");
        let entries: Vec<(usize, FieldElement)> = (0..pc)
            .filter(|&c| !row[c].is_zero())
            .map(|c| (c, f.mul_raw(row[c], inv)))
            .collect();
        let rhs = f.mul_raw(rhs, inv);
        muls += entries.len() as u64 + 1;

        // clear column pc from earlier pivot rows
        let holders = std::mem::take(&mut self.occ[pc]);
        for r in holders {
            let target = &mut self.rows[r];
            let Some(pos) = target.entries.iter().position(|&(c, _)| c == pc) else {
                continue;
            };
            let x = target.entries.swap_remove(pos).1;
            for &(fc, v) in &entries {
                let d = f.mul_raw(x, v);
                match target.entries.iter_mut().find(|(c, _)| *c == fc) {
                    Some(e) => e.1 = f.sub(e.1, d),
                    None => {
                        target.entries.push((fc, f.neg(d)));
                        self.occ[fc].push(r);
                    }
                }
            }
            target.entries.retain(|(_, v)| !v.is_zero());
            target.rhs = f.sub(target.rhs, f.mul_raw(x, rhs));
            muls += entries.len() as u64 + 1;
        }
        opcount::add(muls);

        let id = self.rows.len();
        for &(c, _) in &entries {
            self.occ[c].push(id);
        }
        self.pivot_of[pc] = id;
        self.rows.push(PivotRow { col: pc, entries, rhs });
    }

    /// The particular solution (free variables zero) and the kernel basis,
    /// one column per free variable in increasing column order.
    pub fn finish(self) -> AffineSolution {
        if self.inconsistent {
            return AffineSolution::Inconsistent;
        }
        let f = self.field;
        let free: Vec<usize> = (0..self.ncols).filter(|&c| self.pivot_of[c] == NO_PIVOT).collect();
        let mut slot = vec![NO_PIVOT; self.ncols];
        for (j, &c) in free.iter().enumerate() {
            slot[c] = j;
        }
        let mut particular = Matrix::zeros(f, self.ncols, 1);
        let mut nullspace = Matrix::zeros(f, self.ncols, free.len());
        for (j, &c) in free.iter().enumerate() {
            nullspace.set(c, j, f.one());
        }
        for row in &self.rows {
            particular.set(row.col, 0, row.rhs);
            for &(c, v) in &row.entries {
                nullspace.set(row.col, slot[c], f.neg(v));
            }
        }
        AffineSolution::Solved { particular, nullspace }
    }
}
