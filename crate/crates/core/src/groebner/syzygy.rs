//! Graded syzygies computed degree by degree, minimal free resolutions and
//! Betti tables.
//!
//! A homogeneous element of `⊕ S(-e_b)` is a vector of forms whose `b`-th
//! entry has degree `D - e_b`. Kernels are found one degree at a time as
//! left null spaces of Macaulay matrices; minimal generators are those not
//! in the span of monomial multiples of lower-degree ones.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::groebner::hilbert::regularity;
use crate::groebner::ideal::IdealHandle;
use crate::groebner::quotient::QuotientRing;
use crate::multipoly::{monomials_of_degree, MonomialIndex, MonomialOrder, MultiPoly, PolyRing};
use crate::par::Exec;

/// Longest resolution computed before giving up.
pub const RESOLUTION_CAP: usize = 6;

/// A homogeneous element of a graded free module.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement<F: Field> {
    pub degree: u32,
    pub components: Vec<MultiPoly<F>>,
}

/// Coordinates of the degree-`D` piece of `⊕ S(-e_b)`.
struct Layout {
    blocks: Vec<Option<(usize, MonomialIndex)>>,
    width: usize,
}

impl Layout {
    fn new(nvars: usize, shifts: &[u32], d: u32) -> Self {
        let mut width = 0;
        let blocks = shifts
            .iter()
            .map(|&e| {
                if e > d {
                    return None;
                }
                let idx = MonomialIndex::new(monomials_of_degree(nvars, d - e, &MonomialOrder::Grevlex));
                let off = width;
                width += idx.len();
                Some((off, idx))
            })
            .collect();
        Layout { blocks, width }
    }

    fn encode<F: Field>(&self, f: &F, v: &[MultiPoly<F>]) -> Vec<F::Elem> {
        let mut out = vec![f.zero(); self.width];
        for (b, p) in v.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let (off, idx) = self.blocks[b].as_ref().expect("component degree in range");
            for (m, c) in p.terms() {
                out[off + idx.index[m]] = c.clone();
            }
        }
        out
    }

    fn decode<F: Field>(&self, ring: &PolyRing<F>, v: &[F::Elem]) -> Vec<MultiPoly<F>> {
        self.blocks
            .iter()
            .map(|blk| match blk {
                None => ring.zero(),
                Some((off, idx)) => idx.to_poly(ring, &v[*off..*off + idx.len()]),
            })
            .collect()
    }
}

fn multiply<F: Field>(
    ring: &PolyRing<F>,
    m: &crate::multipoly::Monomial,
    g: &ModuleElement<F>,
) -> Vec<MultiPoly<F>> {
    let _ = ring;
    g.components.iter().map(|c| c.mul_monomial(m)).collect()
}

/// Basis of the syzygies of degree `d` among `gens` (elements of
/// `⊕ S(-shifts_b)`), as elements of `⊕ S(-deg gens_a)`.
pub fn syzygies_in_degree<F: Field>(
    ring: &PolyRing<F>,
    gens: &[ModuleElement<F>],
    shifts: &[u32],
    d: u32,
    exec: Exec,
) -> Vec<ModuleElement<F>> {
    let f = &ring.field;
    let target = Layout::new(ring.nvars, shifts, d);
    let src_shifts: Vec<u32> = gens.iter().map(|g| g.degree).collect();
    let source = Layout::new(ring.nvars, &src_shifts, d);
    let n = source.width;
    let mut rows = Vec::with_capacity(n);
    for (a, blk) in source.blocks.iter().enumerate() {
        let Some((off, idx)) = blk else { continue };
        for (k, m) in idx.monomials.iter().enumerate() {
            let mut row = target.encode(f, &multiply(ring, m, &gens[a]));
            row.resize(target.width + n, f.zero());
            row[target.width + off + k] = f.one();
            rows.push(row);
        }
    }
    let mut red = f.row_reducer(target.width + n, exec);
    red.insert(rows);
    let ech = red.into_echelon();
    ech.rows
        .iter()
        .zip(&ech.pivots)
        .filter(|(_, &p)| p >= target.width)
        .map(|(r, _)| ModuleElement {
            degree: d,
            components: source.decode(ring, &r[target.width..]),
        })
        .collect()
}

/// Keep the candidates (sorted by degree) that are not in the submodule
/// generated by the ones kept before.
fn minimalize<F: Field>(
    ring: &PolyRing<F>,
    shifts: &[u32],
    mut candidates: Vec<ModuleElement<F>>,
    exec: Exec,
) -> Vec<ModuleElement<F>> {
    let f = &ring.field;
    candidates.sort_by_key(|c| c.degree);
    let mut kept: Vec<ModuleElement<F>> = Vec::new();
    let mut k = 0;
    while k < candidates.len() {
        let d = candidates[k].degree;
        let end = k + candidates[k..].iter().take_while(|c| c.degree == d).count();
        let layout = Layout::new(ring.nvars, shifts, d);
        let mut red = f.row_reducer(layout.width, exec);
        let lower: Vec<Vec<F::Elem>> = kept
            .iter()
            .flat_map(|h| {
                monomials_of_degree(ring.nvars, d - h.degree, &MonomialOrder::Grevlex)
                    .into_iter()
                    .map(|m| layout.encode(f, &multiply(ring, &m, h)))
                    .collect::<Vec<_>>()
            })
            .collect();
        red.insert(lower);
        for c in &candidates[k..end] {
            if red.insert(vec![layout.encode(f, &c.components)]) == 1 {
                kept.push(c.clone());
            }
        }
        k = end;
    }
    kept
}

/// Minimal generators of the syzygy module of `gens` in degrees `<= max_degree`.
pub fn minimal_syzygies<F: Field>(
    ring: &PolyRing<F>,
    gens: &[ModuleElement<F>],
    shifts: &[u32],
    max_degree: u32,
    exec: Exec,
) -> Vec<ModuleElement<F>> {
    let src_shifts: Vec<u32> = gens.iter().map(|g| g.degree).collect();
    let Some(&lo) = src_shifts.iter().min() else {
        return Vec::new();
    };
    let mut kept: Vec<ModuleElement<F>> = Vec::new();
    for d in lo + 1..=max_degree {
        let k = syzygies_in_degree(ring, gens, shifts, d, exec);
        if k.is_empty() {
            continue;
        }
        let mut all = kept.clone();
        all.extend(k);
        kept = minimalize(ring, &src_shifts, all, exec);
    }
    kept
}

/// Minimal generators of a homogeneous ideal, taken from its generators.
pub fn minimal_generators<F: Field>(i: &IdealHandle<F>) -> Result<Vec<MultiPoly<F>>> {
    if !i.is_homogeneous() {
        return Err(Error::Degenerate("minimal generators need a homogeneous ideal".into()));
    }
    let ring = i.ring().with_order(MonomialOrder::Grevlex);
    let cands = i
        .gens()
        .iter()
        .map(|g| ModuleElement {
            degree: g.total_degree().expect("nonzero"),
            components: vec![g.with_order(&MonomialOrder::Grevlex)],
        })
        .collect();
    Ok(minimalize(&ring, &[0], cands, i.exec())
        .into_iter()
        .map(|e| e.components.into_iter().next().expect("one component"))
        .collect())
}

/// Graded Betti numbers `beta_{i,j}` of `S/I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub entries: BTreeMap<(usize, u32), usize>,
}

impl BettiTable {
    pub fn get(&self, i: usize, j: u32) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, j: u32, v: usize) {
        if v == 0 {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn length(&self) -> usize {
        self.entries.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn total(&self, i: usize) -> usize {
        self.entries.iter().filter(|(k, _)| k.0 == i).map(|(_, v)| v).sum()
    }

    /// `beta_{i, i+r}` in row `r`.
    pub fn row(&self, r: u32) -> Vec<usize> {
        (0..=self.length()).map(|i| self.get(i, i as u32 + r)).collect()
    }

    /// Build from rows `(r, [beta_{0,r}, beta_{1,1+r}, ...])`.
    pub fn from_rows(rows: &[(u32, &[usize])]) -> Self {
        let mut t = BettiTable::default();
        for (r, vals) in rows {
            for (i, &v) in vals.iter().enumerate() {
                t.set(i, i as u32 + r, v);
            }
        }
        t
    }

    /// `sum_i (-1)^i beta_{i,j} t^j`, the numerator of the Hilbert series.
    pub fn numerator(&self) -> Vec<i64> {
        let top = self.entries.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut out = vec![0i64; top + 1];
        for (&(i, j), &v) in &self.entries {
            let s = if i % 2 == 0 { 1 } else { -1 };
            out[j as usize] += s * v as i64;
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    fn nonzero_rows(&self) -> Vec<u32> {
        let mut rows: Vec<u32> = self.entries.keys().map(|&(i, j)| j - i as u32).collect();
        rows.sort();
        rows.dedup();
        rows
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.length();
        let rows = self.nonzero_rows();
        let mut cells: Vec<Vec<String>> = Vec::new();
        cells.push((0..=n).map(|i| i.to_string()).collect());
        cells.push((0..=n).map(|i| self.total(i).to_string()).collect());
        for &r in &rows {
            cells.push(
                self.row(r)
                    .iter()
                    .map(|&v| if v == 0 { ".".to_string() } else { v.to_string() })
                    .collect(),
            );
        }
        let widths: Vec<usize> = (0..=n).map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(1)).collect();
        let mut labels = vec!["".to_string(), "total:".to_string()];
        labels.extend(rows.iter().map(|r| format!("{r}:")));
        let lw = labels.iter().map(|l| l.len()).max().unwrap_or(0);
        for (label, row) in labels.iter().zip(&cells) {
            let body: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            writeln!(f, "{label:>lw$} {}", body.join(" "))?;
        }
        Ok(())
    }
}

/// Minimal graded free resolution of `S/I` by iterated minimal syzygies.
/// Degrees are searched up to `i + reg(S/I)` in homological degree `i`.
pub fn betti_table<F: Field>(i: &IdealHandle<F>) -> Result<BettiTable> {
    let exec = i.exec();
    let ring = i.ring().with_order(MonomialOrder::Grevlex);
    let mut table = BettiTable::default();
    table.set(0, 0, 1);
    let gens = minimal_generators(i)?;
    if gens.is_empty() {
        return Ok(table);
    }
    if gens.iter().any(|g| g.total_degree() == Some(0)) {
        return Ok(BettiTable::default());
    }
    let reg = regularity(i, 0x5eed);
    let mut level: Vec<ModuleElement<F>> = gens
        .into_iter()
        .map(|g| ModuleElement {
            degree: g.total_degree().expect("nonzero"),
            components: vec![g],
        })
        .collect();
    let mut shifts = vec![0u32];
    let mut hom = 1;
    loop {
        for g in &level {
            table.set(hom, g.degree, table.get(hom, g.degree) + 1);
        }
        let next_shifts: Vec<u32> = level.iter().map(|g| g.degree).collect();
        let next = minimal_syzygies(&ring, &level, &shifts, hom as u32 + 1 + reg, exec);
        if next.is_empty() {
            return Ok(table);
        }
        hom += 1;
        if hom > RESOLUTION_CAP {
            return Err(Error::ResolutionTooLong(RESOLUTION_CAP));
        }
        shifts = next_shifts;
        level = next;
    }
}

/// `beta_{i,j}` of `S/I` as the dimension of Koszul homology
/// `H_i(x; S/I)_j`, from ranks of the Koszul differentials over `S/I`.
pub fn koszul_betti<F: Field>(q: &QuotientRing<F>, i: usize, j: u32) -> usize {
    let n = q.ring().nvars;
    let dim_k = |a: usize| -> usize {
        if a > n || (a as u32) > j {
            return 0;
        }
        binom(n, a) * q.dim(j - a as u32)
    };
    let rank_d = |a: usize| -> usize {
        // d_a: Λ^a ⊗ R_{j-a} -> Λ^{a-1} ⊗ R_{j-a+1}
        if a == 0 || a > n || (a as u32) > j || dim_k(a) == 0 {
            return 0;
        }
        koszul_rank(q, a, j - a as u32)
    };
    dim_k(i) - rank_d(i) - rank_d(i + 1)
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, t| acc * (n - t) / (t + 1))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn koszul_rank<F: Field>(q: &QuotientRing<F>, a: usize, e: u32) -> usize {
    let f = &q.ring().field;
    let n = q.ring().nvars;
    let src_table = q.table(e);
    let dst_table = q.table(e + 1);
    let dst_sets = subsets(n, a - 1);
    let dst_pos: std::collections::HashMap<Vec<usize>, usize> =
        dst_sets.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
    let w = dst_table.dim();
    let mut rows = Vec::new();
    for s in subsets(n, a) {
        for r in &src_table.standard.monomials {
            let mut row = vec![f.zero(); dst_sets.len() * w];
            for (k, &v) in s.iter().enumerate() {
                let mut rest = s.clone();
                rest.remove(k);
                let off = dst_pos[&rest] * w;
                let mono = q.ring().term(f.one(), *r);
                let nf = dst_table.nf_shifted(f, &crate::multipoly::Monomial::var(v), &mono);
                let sign_neg = k % 2 == 1;
                for (t, x) in nf.iter().enumerate() {
                    if !f.is_zero(x) {
                        let x = if sign_neg { f.neg(x) } else { x.clone() };
                        row[off + t] = f.add(&row[off + t], &x);
                    }
                }
            }
            rows.push(row);
        }
    }
    let width = dst_sets.len() * w;
    let mut red = f.row_reducer(width, q.exec());
    red.insert(rows);
    red.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::groebner::hilbert::hilbert_data;
    use crate::multipoly::{graded, parse_poly};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(n: usize) -> PolyRing<PrimeField> {
        PolyRing::grevlex(PrimeField::default(), n)
    }

    fn elem(p: MultiPoly<PrimeField>) -> ModuleElement<PrimeField> {
        ModuleElement {
            degree: p.total_degree().unwrap(),
            components: vec![p],
        }
    }

    #[test]
    fn koszul_syzygy_of_two_variables() {
        let r = ring(2);
        let gens = vec![elem(r.var(0)), elem(r.var(1))];
        let s = minimal_syzygies(&r, &gens, &[0], 4, Exec::Sequential);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].degree, 2);
        // (y, -x) up to scale
        let c = &s[0].components;
        let lhs = &(&c[0] * &r.var(0)) + &(&c[1] * &r.var(1));
        assert!(lhs.is_zero());
        assert!(!c[0].is_zero() && !c[1].is_zero());
    }

    #[test]
    fn regular_sequence_of_three_forms() {
        let r = ring(4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gens: Vec<_> = [2u32, 2, 3].iter().map(|&d| elem(graded::random_form(&r, d, &mut rng))).collect();
        let s = minimal_syzygies(&r, &gens, &[0], 8, Exec::Sequential);
        assert_eq!(s.len(), 3);
        let mut degs: Vec<u32> = s.iter().map(|e| e.degree).collect();
        degs.sort();
        assert_eq!(degs, vec![4, 5, 5]);
    }

    #[test]
    fn complete_intersection_betti() {
        let r = ring(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gens = vec![graded::random_form(&r, 2, &mut rng), graded::random_form(&r, 3, &mut rng)];
        let t = betti_table(&IdealHandle::new(&r, gens).unwrap()).unwrap();
        assert_eq!((t.total(0), t.total(1), t.total(2)), (1, 2, 1));
        assert_eq!(t.get(2, 5), 1);
        assert_eq!(t.length(), 2);
    }

    #[test]
    fn twisted_cubic_betti_and_display() {
        let r = ring(4);
        let gens = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        let i = IdealHandle::new(&r, gens).unwrap();
        let t = betti_table(&i).unwrap();
        assert_eq!(t, BettiTable::from_rows(&[(0, &[1]), (1, &[0, 3, 2])]));
        assert_eq!(t.to_string(), "       0 1 2\ntotal: 1 3 2\n    0: 1 . .\n    1: . 3 2\n");
        assert_eq!(t.numerator(), hilbert_data(&i).numerator);
    }

    #[test]
    fn redundant_generators_dropped() {
        let r = ring(3);
        let a = parse_poly(&r, "x0^2").unwrap();
        let b = parse_poly(&r, "x0^2*x1+x0^3").unwrap();
        let i = IdealHandle::new(&r, vec![b, a]).unwrap();
        assert_eq!(minimal_generators(&i).unwrap().len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn betti_matches_koszul_and_hilbert(seed in 0u64..10_000) {
            let r = ring(4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gens: Vec<_> = (0..3).map(|k| graded::random_sparse_form(&r, 2 + (k % 2) as u32, 3, &mut rng)).collect();
            let i = IdealHandle::new(&r, gens).unwrap();
            let t = betti_table(&i).unwrap();
            prop_assert_eq!(t.numerator(), hilbert_data(&i).numerator);
            let q = QuotientRing::new(&i).unwrap();
            for h in 0..=4usize {
                for j in 0..=9u32 {
                    prop_assert_eq!(t.get(h, j), koszul_betti(&q, h, j), "beta_{},{}", h, j);
                }
            }
        }
    }
}
