//! Exact sparse Gauss–Jordan elimination over the integers.
//!
//! Rows are kept primitive (content 1, positive pivot), so every update
//! `row ← (p/g)·row − (c/g)·pivot_row` stays integral and numbers grow only
//! as far as the reduced echelon form itself requires. Pivot rows are fully
//! reduced: each is zero in every other pivot column.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::polyalg::Rational;

/// Sorted by column, no explicit zeros.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Clears denominators of a rational row and makes it primitive.
pub fn integer_row<'a, I>(entries: I) -> SparseRow
where
    I: IntoIterator<Item = (usize, &'a Rational)>,
{
    let entries: Vec<(usize, &Rational)> = entries.into_iter().filter(|(_, q)| !q.is_zero()).collect();
    let lcm = entries.iter().fold(BigInt::one(), |l, (_, q)| l.lcm(q.denom()));
    let mut row: SparseRow = entries
        .into_iter()
        .map(|(c, q)| (c, q.numer() * (&lcm / q.denom())))
        .collect();
    row.sort_by_key(|e| e.0);
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut SparseRow) {
    let g = row.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v /= &g;
    }
}

fn entry(row: &SparseRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

/// `a·dst − b·src` for rows, merged by column.
fn combine(dst: &SparseRow, a: &BigInt, src: &SparseRow, b: &BigInt) -> SparseRow {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j == src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i == dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push((dst[i].0, a * &dst[i].1));
            i += 1;
        } else if take_src {
            out.push((src[j].0, -(b * &src[j].1)));
            j += 1;
        } else {
            let v = a * &dst[i].1 - b * &src[j].1;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Eliminates `col` from `row` using `pivot`, whose entry at `col` is `p`.
fn eliminate(row: &SparseRow, pivot: &SparseRow, col: usize, p: &BigInt) -> Option<SparseRow> {
    let c = entry(row, col)?;
    let g = p.gcd(c);
    let mut out = combine(row, &(p / &g), pivot, &(c / &g));
    make_primitive(&mut out);
    Some(out)
}

/// A reduced row echelon basis that grows one row at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseRow>,
    pivot_col: Vec<usize>,
    row_of_col: Vec<Option<usize>>,
    weights: Option<Vec<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_col: Vec::new(), row_of_col: vec![None; ncols], weights: None }
    }

    /// Pivots prefer columns of small weight, typically the column's
    /// occurrence count, to limit fill.
    pub fn with_column_weights(weights: Vec<usize>) -> Self {
        let mut e = Echelon::new(weights.len());
        e.weights = Some(weights);
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivot_col
    }

    /// Remainder of `row` after elimination by every pivot; zero iff `row`
    /// lies in the row space.
    pub fn reduce(&self, row: &SparseRow) -> SparseRow {
        let mut r = row.clone();
        let mut k = 0;
        while k < r.len() {
            let col = r[k].0;
            match self.row_of_col[col] {
                Some(i) => {
                    let pivot = &self.rows[i];
                    let p = entry(pivot, col).expect("pivot entry");
                    r = eliminate(&r, pivot, col, p).expect("column present");
                    // Pivot rows vanish on other pivot columns, so columns
                    // before `k` stay clean; rescan from the start of the
                    // unprocessed region.
                    k = r.partition_point(|e| e.0 < col);
                }
                None => k += 1,
            }
        }
        r
    }

    pub fn contains(&self, row: &SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Adds `row` to the basis; false if it was already in the row space.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let r = self.reduce(row);
        if r.is_empty() {
            return false;
        }
        let (col, _) = r
            .iter()
            .min_by(|(ca, va), (cb, vb)| {
                let wa = self.weights.as_ref().map_or(0, |w| w[*ca]);
                let wb = self.weights.as_ref().map_or(0, |w| w[*cb]);
                (wa, va.bits(), *ca).cmp(&(wb, vb.bits(), *cb))
            })
            .map(|(c, v)| (*c, v.clone()))
            .expect("nonempty row");
        let mut r = r;
        if entry(&r, col).expect("pivot").is_negative() {
            for (_, v) in r.iter_mut() {
                *v = -v.clone();
            }
        }
        let p = entry(&r, col).expect("pivot").clone();
        self.rows.par_iter_mut().for_each(|other| {
            if let Some(new) = eliminate(other, &r, col, &p) {
                *other = new;
            }
        });
        self.row_of_col[col] = Some(self.rows.len());
        self.pivot_col.push(col);
        self.rows.push(r);
        true
    }

    /// Basis of `{v : M v = 0}` for the matrix whose rows were inserted,
    /// one vector per free column with that coordinate equal to 1.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        (0..self.ncols)
            .filter(|&c| self.row_of_col[c].is_none())
            .map(|free| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[free] = Rational::one();
                for (row, &pc) in self.rows.iter().zip(&self.pivot_col) {
                    if let Some(f) = entry(row, free) {
                        let p = entry(row, pc).expect("pivot");
                        v[pc] = -Rational::new(f.clone(), p.clone());
                    }
                }
                v
            })
            .collect()
    }
}

/// Null space of the matrix with the given rows, inserting sparsest rows
/// first and weighting pivots by column occupancy.
pub fn null_space(ncols: usize, rows: &[SparseRow]) -> (usize, Vec<Vec<Rational>>) {
    let mut counts = vec![0usize; ncols];
    for r in rows {
        for (c, _) in r {
            counts[*c] += 1;
        }
    }
    let mut order: Vec<&SparseRow> = rows.iter().filter(|r| !r.is_empty()).collect();
    order.sort_by_key(|r| r.len());
    let mut ech = Echelon::with_column_weights(counts);
    for r in order {
        if ech.rank() == ncols {
            break;
        }
        ech.insert(r);
    }
    (ech.rank(), ech.null_space())
}
