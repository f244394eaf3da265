//! Projective emptiness by graded rank sweeps.

use serde::Serialize;

use crate::error::Result;
use crate::exactalg::Field;
use crate::groebner::hilbert::hilbert_data;
use crate::groebner::ideal::IdealHandle;
use crate::groebner::quotient::QuotientRing;
use crate::multipoly::MultiPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Emptiness {
    /// Every form of degree `witness` lies in the ideal.
    Empty { witness: u32 },
    NonEmpty { proj_dim: i64 },
    /// No witness up to `bound`; nothing is claimed.
    Inconclusive { bound: u32 },
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty { .. })
    }
}

/// Progress record of one sweep degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepStep {
    pub degree: u32,
    pub rows: usize,
    pub rank: usize,
    pub target: usize,
}

/// Sweep `d = 1..=bound` for `(base + gens)_d = S_d`, working in `S/base`.
/// Only an `Empty` or `Inconclusive` verdict is possible.
pub fn sweep_emptiness<F: Field>(
    base: &QuotientRing<F>,
    gens: &[MultiPoly<F>],
    bound: u32,
) -> Result<(Emptiness, Vec<SweepStep>)> {
    let mut steps = Vec::new();
    for d in 0..=bound {
        let target = base.dim(d);
        if target == 0 {
            steps.push(SweepStep {
                degree: d,
                rows: 0,
                rank: 0,
                target,
            });
            return Ok((Emptiness::Empty { witness: d }, steps));
        }
        let rows = base.ideal_row_count(gens, d);
        if rows < target {
            // rank cannot reach the target
            base.release(d);
            continue;
        }
        let rank = base.ideal_dim(gens, d);
        steps.push(SweepStep {
            degree: d,
            rows,
            rank,
            target,
        });
        for e in 0..=d {
            base.release(e);
        }
        if rank == target {
            return Ok((Emptiness::Empty { witness: d }, steps));
        }
    }
    Ok((Emptiness::Inconclusive { bound }, steps))
}

/// Emptiness of `V(I)` in projective space. The Macaulay sweep runs first;
/// when it finds no witness up to `bound`, the grevlex Hilbert series decides.
pub fn is_empty_projective<F: Field>(i: &IdealHandle<F>, bound: u32) -> Result<Emptiness> {
    let zero = IdealHandle::zero(i.ring()).with_exec(i.exec());
    let base = QuotientRing::new(&zero)?;
    let (verdict, _) = sweep_emptiness(&base, i.gens(), bound)?;
    if verdict.is_empty() {
        return Ok(verdict);
    }
    let h = hilbert_data(i);
    if h.proj_dim >= 0 {
        return Ok(Emptiness::NonEmpty { proj_dim: h.proj_dim });
    }
    let witness = (0..).find(|&d| h.hilbert_function(d) == 0).expect("finite length quotient");
    Ok(Emptiness::Empty { witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::PrimeField;
    use crate::multipoly::{graded, parse_poly, PolyRing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn irrelevant_ideal_witness_one() {
        let r = PolyRing::grevlex(PrimeField::default(), 5);
        let v = is_empty_projective(&IdealHandle::irrelevant(&r), 5).unwrap();
        assert_eq!(v, Emptiness::Empty { witness: 1 });
    }

    #[test]
    fn hyperplane_is_not_empty() {
        let r = PolyRing::grevlex(PrimeField::default(), 5);
        let i = IdealHandle::new(&r, vec![r.var(0)]).unwrap();
        assert_eq!(is_empty_projective(&i, 4).unwrap(), Emptiness::NonEmpty { proj_dim: 3 });
        let base = QuotientRing::new(&IdealHandle::zero(&r)).unwrap();
        let (v, _) = sweep_emptiness(&base, i.gens(), 4).unwrap();
        assert_eq!(v, Emptiness::Inconclusive { bound: 4 });
    }

    #[test]
    fn regular_sequence_witness() {
        // n generic forms of degrees d_i in n variables: socle degree sum(d_i - 1)
        let r = PolyRing::grevlex(PrimeField::default(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gens: Vec<_> = [2u32, 2, 3].iter().map(|&d| graded::random_form(&r, d, &mut rng)).collect();
        let i = IdealHandle::new(&r, gens).unwrap();
        assert_eq!(is_empty_projective(&i, 10).unwrap(), Emptiness::Empty { witness: 5 });
        // with a low bound the sweep stops, and the Hilbert series still decides
        assert_eq!(is_empty_projective(&i, 2).unwrap(), Emptiness::Empty { witness: 5 });
        let base = QuotientRing::new(&IdealHandle::zero(&r)).unwrap();
        let (v, _) = sweep_emptiness(&base, i.gens(), 4).unwrap();
        assert_eq!(v, Emptiness::Inconclusive { bound: 4 });
    }

    #[test]
    fn sweep_modulo_base() {
        // twisted cubic cut by two hyperplanes is empty
        let r = PolyRing::grevlex(PrimeField::default(), 4);
        let gens = ["x0*x2-x1^2", "x0*x3-x1*x2", "x1*x3-x2^2"]
            .iter()
            .map(|s| parse_poly(&r, s).unwrap())
            .collect();
        let base = QuotientRing::new(&IdealHandle::new(&r, gens).unwrap()).unwrap();
        let (v, steps) = sweep_emptiness(&base, &[r.var(0), r.var(3)], 6).unwrap();
        assert!(v.is_empty());
        assert!(steps.last().is_some_and(|s| s.rank == s.target));
        let (v, _) = sweep_emptiness(&base, &[r.var(0)], 6).unwrap();
        assert_eq!(v, Emptiness::Inconclusive { bound: 6 });
    }
}
