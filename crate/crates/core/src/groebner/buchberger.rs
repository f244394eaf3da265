//! Buchberger's algorithm with the Gebauer–Möller criteria and sugar
//! selection. S-polynomials of equal sugar are reduced as one batch.

use std::cmp::Ordering;

use crate::exactalg::Field;
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly, PolyRing};
use crate::par::{self, Exec};

type Terms<E> = Vec<(Monomial, E)>;

/// `a + c * u * b` over sorted term lists.
fn merge_shifted<F: Field>(
    f: &F,
    ord: &MonomialOrder,
    a: &[(Monomial, F::Elem)],
    c: &F::Elem,
    u: &Monomial,
    b: &[(Monomial, F::Elem)],
) -> Terms<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let bm = b[j].0.mul(u);
        match ord.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, f.mul(c, &b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let s = f.mul_add(&a[i].1, c, &b[j].1);
                if !f.is_zero(&s) {
                    out.push((bm, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().map(|(m, x)| (m.mul(u), f.mul(c, x))));
    out
}

/// Reduce `p` by monic polynomials with the given leads. With `full`, tails
/// are reduced too; otherwise only until the lead is irreducible.
pub(crate) fn reduce_terms<F: Field>(
    f: &F,
    ord: &MonomialOrder,
    mut p: Terms<F::Elem>,
    basis: &[&[(Monomial, F::Elem)]],
    full: bool,
) -> Terms<F::Elem> {
    let mut rem: Terms<F::Elem> = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let (m, c) = (p[start].0, p[start].1.clone());
        let hit = basis.iter().find(|g| g[0].0.divides(&m));
        match hit {
            Some(g) => {
                let u = m.div(&g[0].0);
                let coef = f.neg(&c);
                p = merge_shifted(f, ord, &p[start + 1..], &coef, &u, &g[1..]);
                start = 0;
            }
            None => {
                if !full {
                    if rem.is_empty() {
                        if start > 0 {
                            p.drain(..start);
                        }
                        return p;
                    }
                    rem.extend_from_slice(&p[start..]);
                    return rem;
                }
                rem.push((m, c));
                start += 1;
            }
        }
    }
    rem
}

fn make_monic<F: Field>(f: &F, p: &mut Terms<F::Elem>) {
    if let Some((_, c)) = p.first() {
        if !f.is_one(c) {
            let inv = f.inv(c).expect("nonzero lead");
            for t in p.iter_mut() {
                t.1 = f.mul(&t.1, &inv);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct State<F: Field> {
    field: F,
    order: MonomialOrder,
    polys: Vec<Terms<F::Elem>>,
    sugar: Vec<u32>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl<F: Field> State<F> {
    fn lead(&self, i: usize) -> Monomial {
        self.polys[i][0].0
    }

    fn active_basis(&self) -> Vec<&[(Monomial, F::Elem)]> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(p, _)| p.as_slice())
            .collect()
    }

    fn spoly(&self, pair: &Pair) -> Terms<F::Elem> {
        let f = &self.field;
        let (a, b) = (&self.polys[pair.i], &self.polys[pair.j]);
        let ua = pair.lcm.div(&a[0].0);
        let ub = pair.lcm.div(&b[0].0);
        let left: Terms<F::Elem> = a[1..].iter().map(|(m, c)| (m.mul(&ua), c.clone())).collect();
        merge_shifted(f, &self.order, &left, &f.neg(&f.one()), &ub, &b[1..])
    }

    /// Insert a monic polynomial and update pairs (Gebauer–Möller).
    fn insert(&mut self, p: Terms<F::Elem>, sugar: u32) {
        let h = self.polys.len();
        let hl = p[0].0;
        self.polys.push(p);
        self.sugar.push(sugar);
        self.active.push(false);

        let cand: Vec<(usize, Monomial)> = (0..h)
            .filter(|&g| self.active[g])
            .map(|g| (g, hl.lcm(&self.lead(g))))
            .collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        for (idx, &(g, l)) in cand.iter().enumerate() {
            let coprime = hl.is_coprime(&self.lead(g));
            let dominated = cand[idx + 1..].iter().any(|(_, l2)| l2.divides(&l))
                || kept.iter().any(|(_, l2)| l2.divides(&l));
            if coprime || !dominated {
                kept.push((g, l));
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|(g, _)| !hl.is_coprime(&self.lead(*g)))
            .map(|(g, l)| {
                let sg = self.sugar[g] + l.degree() - self.lead(g).degree();
                let sh = sugar + l.degree() - hl.degree();
                Pair {
                    i: g,
                    j: h,
                    lcm: l,
                    sugar: sg.max(sh),
                }
            })
            .collect();

        let leads: Vec<Monomial> = self.polys.iter().map(|p| p[0].0).collect();
        self.pairs.retain(|pr| {
            !(hl.divides(&pr.lcm)
                && leads[pr.i].lcm(&hl) != pr.lcm
                && leads[pr.j].lcm(&hl) != pr.lcm)
        });
        self.pairs.extend(new_pairs);

        for g in 0..h {
            if self.active[g] && hl.divides(&self.lead(g)) {
                self.active[g] = false;
            }
        }
        self.active[h] = true;
    }
}

/// Reduced Gröbner basis of the given polynomials in `ring`'s order:
/// monic, sorted by increasing lead monomial.
pub fn buchberger<F: Field>(ring: &PolyRing<F>, gens: &[MultiPoly<F>], exec: Exec) -> Vec<MultiPoly<F>> {
    let f = ring.field.clone();
    let ord = ring.order.clone();
    let mut state = State {
        field: f.clone(),
        order: ord.clone(),
        polys: Vec::new(),
        sugar: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };

    let mut inputs: Vec<Terms<F::Elem>> = gens
        .iter()
        .map(|g| g.with_order(&ord).into_terms())
        .filter(|t| !t.is_empty())
        .collect();
    inputs.sort_by(|a, b| {
        let da = a.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        let db = b.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        da.cmp(&db).then_with(|| ord.cmp(&a[0].0, &b[0].0))
    });
    for p in inputs {
        let sugar = p.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        let mut r = reduce_terms(&f, &ord, p, &state.active_basis(), false);
        if r.is_empty() {
            continue;
        }
        make_monic(&f, &mut r);
        if r[0].0.degree() == 0 {
            return vec![ring.one()];
        }
        state.insert(r, sugar);
    }

    while !state.pairs.is_empty() {
        let s = state.pairs.iter().map(|p| p.sugar).min().expect("pairs");
        let mut batch: Vec<Pair> = Vec::new();
        state.pairs.retain(|p| {
            if p.sugar == s {
                batch.push(p.clone());
                false
            } else {
                true
            }
        });
        batch.sort_by(|a, b| ord.cmp(&a.lcm, &b.lcm).then((a.i, a.j).cmp(&(b.i, b.j))));

        let reduced: Vec<Terms<F::Elem>> = {
            let st = &state;
            let basis = st.active_basis();
            par::map(exec, &batch, |pr| {
                reduce_terms(&st.field, &st.order, st.spoly(pr), &basis, false)
            })
        };
        for (pr, r) in batch.iter().zip(reduced) {
            if r.is_empty() {
                continue;
            }
            let mut r = reduce_terms(&f, &ord, r, &state.active_basis(), false);
            if r.is_empty() {
                continue;
            }
            make_monic(&f, &mut r);
            if r[0].0.degree() == 0 {
                return vec![ring.one()];
            }
            state.insert(r, pr.sugar);
        }
    }

    // minimal and reduced basis
    let mut basis: Vec<Terms<F::Elem>> = state
        .polys
        .iter()
        .zip(&state.active)
        .filter(|(_, a)| **a)
        .map(|(p, _)| p.clone())
        .collect();
    basis.sort_by(|a, b| ord.cmp(&a[0].0, &b[0].0));
    let mut minimal: Vec<Terms<F::Elem>> = Vec::new();
    for p in basis {
        if !minimal.iter().any(|q| q[0].0.divides(&p[0].0)) {
            minimal.push(p);
        }
    }
    let reduced: Vec<Terms<F::Elem>> = par::map_range(exec, minimal.len(), |k| {
        let others: Vec<&[(Monomial, F::Elem)]> = minimal
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, q)| q.as_slice())
            .collect();
        let lead = minimal[k][0].clone();
        let mut tail = reduce_terms(&f, &ord, minimal[k][1..].to_vec(), &others, true);
        let mut out = vec![lead];
        out.append(&mut tail);
        out
    });
    reduced
        .into_iter()
        .map(|t| ring.from_sorted_terms(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::multipoly::parse_poly;

    fn ring(n: usize) -> PolyRing<PrimeField> {
        PolyRing::grevlex(PrimeField::default(), n)
    }

    #[test]
    fn already_a_basis() {
        let r = ring(2);
        let gens = vec![parse_poly(&r, "x0^2").unwrap(), parse_poly(&r, "x0*x1").unwrap()];
        let gb = buchberger(&r, &gens, Exec::Sequential);
        let mut s: Vec<String> = gb.iter().map(|p| p.to_string()).collect();
        s.sort();
        assert_eq!(s, vec!["1*x0*x1", "1*x0^2"]);
    }

    #[test]
    fn unit_ideal() {
        let r = ring(2);
        let gens = vec![parse_poly(&r, "x0*x1-1").unwrap(), parse_poly(&r, "x0").unwrap()];
        assert_eq!(buchberger(&r, &gens, Exec::Sequential), vec![r.one()]);
    }

    #[test]
    fn modes_agree() {
        let r = ring(4);
        let gens: Vec<_> = ["x0^2-x1*x3", "x1^2-x0*x2", "x0*x1-x2*x3+x3^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        assert_eq!(
            buchberger(&r, &gens, Exec::Sequential),
            buchberger(&r, &gens, Exec::Parallel)
        );
    }
}
