//! Exact dense row reduction. Prime fields get a delayed-reduction kernel
//! with batched, optionally parallel, row elimination.

use crate::exactalg::field::{inverse_mod, Field};
use crate::par::{self, Exec};

/// Reduced row echelon form: pivot entries are 1 and pivot columns are
/// otherwise zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Echelon<E> {
    pub ncols: usize,
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
}

impl<E: Clone> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ncols
    }

    /// Basis of `{x : M x = 0}` for the matrix whose rows were reduced.
    pub fn kernel<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for j in 0..self.ncols {
            if is_pivot[j] {
                continue;
            }
            let mut v = vec![f.zero(); self.ncols];
            v[j] = f.one();
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = f.neg(&r[j]);
            }
            out.push(v);
        }
        out
    }
}

impl<E: Clone> Echelon<E> {
    /// Representative of `v` modulo the row space with zeros in every pivot column.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Vec<E> {
        let mut out = v.to_vec();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (a, b) in out.iter_mut().zip(r) {
                if !f.is_zero(b) {
                    *a = f.sub(a, &f.mul(&c, b));
                }
            }
        }
        out
    }
}

/// Incrementally maintained row space.
pub trait RowReducer<E>: Send {
    fn ncols(&self) -> usize;
    fn rank(&self) -> usize;
    /// Adds rows to the span and returns how many of them raised the rank.
    fn insert(&mut self, rows: Vec<Vec<E>>) -> usize;
    /// The unique representative of `row` modulo the span with zeros in
    /// every pivot column.
    fn reduce(&self, row: &[E]) -> Vec<E>;
    fn pivots(&self) -> Vec<usize>;
    fn into_echelon(self: Box<Self>) -> Echelon<E>;
}

const BATCH: usize = 64;

/// Reducer over any field, using plain field operations.
pub struct GenericReducer<F: Field> {
    field: F,
    ncols: usize,
    exec: Exec,
    cols: Vec<usize>,
    rows: Vec<Vec<F::Elem>>,
}

impl<F: Field> GenericReducer<F> {
    pub fn new(field: F, ncols: usize, exec: Exec) -> Self {
        GenericReducer {
            field,
            ncols,
            exec,
            cols: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn reduce_from(&self, mut v: Vec<F::Elem>, start: usize) -> Vec<F::Elem> {
        let f = &self.field;
        for k in start..self.cols.len() {
            let pc = self.cols[k];
            if f.is_zero(&v[pc]) {
                continue;
            }
            let c = f.neg(&v[pc]);
            let pr = &self.rows[k];
            for j in pc..self.ncols {
                if !f.is_zero(&pr[j]) {
                    v[j] = f.mul_add(&v[j], &c, &pr[j]);
                }
            }
        }
        v
    }

    fn push(&mut self, v: Vec<F::Elem>) -> bool {
        let f = &self.field;
        let v = self.reduce_from(v, 0);
        let Some(lead) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[lead]).expect("nonzero pivot");
        let v: Vec<F::Elem> = v.iter().map(|x| f.mul(x, &inv)).collect();
        let pos = self.cols.partition_point(|&c| c < lead);
        self.cols.insert(pos, lead);
        self.rows.insert(pos, v);
        true
    }
}

impl<F: Field> RowReducer<F::Elem> for GenericReducer<F> {
    fn ncols(&self) -> usize {
        self.ncols
    }

    fn rank(&self) -> usize {
        self.cols.len()
    }

    fn insert(&mut self, rows: Vec<Vec<F::Elem>>) -> usize {
        let mut added = 0;
        for chunk in rows.chunks(BATCH) {
            let pre = par::map(self.exec, chunk, |r| self.reduce_from(r.clone(), 0));
            for r in pre {
                if self.push(r) {
                    added += 1;
                }
            }
        }
        added
    }

    fn reduce(&self, row: &[F::Elem]) -> Vec<F::Elem> {
        self.reduce_from(row.to_vec(), 0)
    }

    fn pivots(&self) -> Vec<usize> {
        self.cols.clone()
    }

    fn into_echelon(self: Box<Self>) -> Echelon<F::Elem> {
        let rows = par::map_range(self.exec, self.cols.len(), |k| {
            self.reduce_from(self.rows[k].clone(), k + 1)
        });
        Echelon {
            ncols: self.ncols,
            rows,
            pivots: self.cols,
        }
    }
}

/// Reducer over `F_p` with `u64` accumulation and delayed modular reduction.
pub struct FpReducer {
    p: u32,
    ncols: usize,
    exec: Exec,
    // number of multiply-adds an accumulator entry can absorb before overflow
    limit: u64,
    cols: Vec<usize>,
    rows: Vec<Vec<u32>>,
}

impl FpReducer {
    pub fn new(p: u32, ncols: usize, exec: Exec) -> Self {
        let sq = (p as u64 - 1) * (p as u64 - 1);
        let limit = ((u64::MAX - p as u64) / sq.max(1)).max(1);
        FpReducer {
            p,
            ncols,
            exec,
            limit,
            cols: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn reduce_from(&self, row: &[u32], start: usize) -> Vec<u32> {
        let p = self.p as u64;
        let mut acc: Vec<u64> = row.iter().map(|&x| x as u64).collect();
        let mut pending = 0u64;
        for k in start..self.cols.len() {
            let pc = self.cols[k];
            let c = acc[pc] % p;
            if c == 0 {
                acc[pc] = 0;
                continue;
            }
            let m = p - c;
            let pr = &self.rows[k][pc..];
            for (a, &b) in acc[pc..].iter_mut().zip(pr) {
                *a += m * b as u64;
            }
            pending += 1;
            if pending + 1 >= self.limit {
                for a in acc.iter_mut() {
                    *a %= p;
                }
                pending = 0;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    fn push(&mut self, v: Vec<u32>) -> bool {
        let v = self.reduce_from(&v, 0);
        let Some(lead) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inverse_mod(v[lead], self.p).expect("nonzero pivot") as u64;
        let p = self.p as u64;
        let v: Vec<u32> = v.iter().map(|&x| (x as u64 * inv % p) as u32).collect();
        let pos = self.cols.partition_point(|&c| c < lead);
        self.cols.insert(pos, lead);
        self.rows.insert(pos, v);
        true
    }
}

impl RowReducer<u32> for FpReducer {
    fn ncols(&self) -> usize {
        self.ncols
    }

    fn rank(&self) -> usize {
        self.cols.len()
    }

    fn insert(&mut self, rows: Vec<Vec<u32>>) -> usize {
        let mut added = 0;
        for chunk in rows.chunks(BATCH) {
            if self.cols.len() == self.ncols {
                break;
            }
            let pre = par::map(self.exec, chunk, |r| self.reduce_from(r, 0));
            for r in pre {
                if self.push(r) {
                    added += 1;
                }
            }
        }
        added
    }

    fn reduce(&self, row: &[u32]) -> Vec<u32> {
        self.reduce_from(row, 0)
    }

    fn pivots(&self) -> Vec<usize> {
        self.cols.clone()
    }

    fn into_echelon(self: Box<Self>) -> Echelon<u32> {
        let rows = par::map_range(self.exec, self.cols.len(), |k| {
            self.reduce_from(&self.rows[k], k + 1)
        });
        Echelon {
            ncols: self.ncols,
            rows,
            pivots: self.cols,
        }
    }
}

/// Reduced row echelon form of the given rows.
pub fn echelon<F: Field>(f: &F, rows: Vec<Vec<F::Elem>>, ncols: usize, exec: Exec) -> Echelon<F::Elem> {
    let mut r = f.row_reducer(ncols, exec);
    r.insert(rows);
    r.into_echelon()
}

pub fn rank<F: Field>(f: &F, rows: Vec<Vec<F::Elem>>, ncols: usize, exec: Exec) -> usize {
    let mut r = f.row_reducer(ncols, exec);
    r.insert(rows);
    r.rank()
}

/// Null space `{x : M x = 0}` of the matrix with the given rows.
pub fn kernel<F: Field>(f: &F, rows: Vec<Vec<F::Elem>>, ncols: usize, exec: Exec) -> Vec<Vec<F::Elem>> {
    echelon(f, rows, ncols, exec).kernel(f)
}

/// Basis of `{y : y^T M = 0}`, the linear relations among the given rows.
pub fn left_kernel<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize, exec: Exec) -> Vec<Vec<F::Elem>> {
    let m = rows.len();
    let cols: Vec<Vec<F::Elem>> = (0..ncols).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    kernel(f, cols, m, exec)
}
