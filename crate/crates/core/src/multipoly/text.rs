//! Plain-text polynomial format: `coeff*x0^a*x3` terms joined by `+`.

use crate::error::{Error, Result};
use crate::exactalg::Field;
use crate::multipoly::monomial::Monomial;
use crate::multipoly::poly::{MultiPoly, PolyRing};

pub fn format_poly<F: Field>(p: &MultiPoly<F>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let f = p.field();
    let mut parts = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let mut s = f.format(c);
        for i in 0..p.nvars() {
            match m.exp(i) {
                0 => {}
                1 => s.push_str(&format!("*x{i}")),
                e => s.push_str(&format!("*x{i}^{e}")),
            }
        }
        parts.push(s);
    }
    parts.join("+")
}

fn split_terms(s: &str) -> Vec<(bool, &str)> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    let mut negative = false;
    for i in 0..bytes.len() {
        let ch = bytes[i];
        if (ch == b'+' || ch == b'-') && i > 0 && !matches!(bytes[i - 1], b'^' | b'*' | b'/' | b'+' | b'-') {
            out.push((negative, &s[start..i]));
            negative = ch == b'-';
            start = i + 1;
        } else if (ch == b'+' || ch == b'-') && i == start {
            if ch == b'-' {
                negative = !negative;
            }
            start = i + 1;
        }
    }
    out.push((negative, &s[start..]));
    out
}

pub fn parse_poly<F: Field>(ring: &PolyRing<F>, s: &str) -> Result<MultiPoly<F>> {
    let f = &ring.field;
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    for (neg, term) in split_terms(&cleaned) {
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in `{s}`")));
        }
        let mut coeff = f.one();
        let mut exps = vec![0u32; ring.nvars];
        for factor in term.split('*') {
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, e) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable `{factor}`")))?;
                if idx >= ring.nvars {
                    return Err(Error::Parse(format!("variable x{idx} out of range")));
                }
                exps[idx] += e;
            } else {
                coeff = f.mul(&coeff, &f.parse(factor)?);
            }
        }
        if neg {
            coeff = f.neg(&coeff);
        }
        terms.push((Monomial::from_exps(&exps)?, coeff));
    }
    Ok(ring.from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{PrimeField, Rationals};

    #[test]
    fn round_trip() {
        let r = PolyRing::grevlex(PrimeField::default(), 3);
        let p = parse_poly(&r, "3*x0^2*x1 + x2 - 2").unwrap();
        assert_eq!(p.to_string(), "3*x0^2*x1+1*x2+10005");
        assert_eq!(parse_poly(&r, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn rational_coefficients() {
        let r = PolyRing::grevlex(Rationals, 2);
        let p = parse_poly(&r, "-3/4*x0*x1+1/2*x1^2").unwrap();
        assert_eq!(p.to_string(), "-3/4*x0*x1+1/2*x1^2");
        assert_eq!(parse_poly(&r, &p.to_string()).unwrap(), p);
        assert_eq!(parse_poly(&r, "0").unwrap(), r.zero());
    }

    #[test]
    fn bad_input() {
        let r = PolyRing::grevlex(Rationals, 2);
        assert!(parse_poly(&r, "x5").is_err());
        assert!(parse_poly(&r, "x0^").is_err());
        assert!(parse_poly(&r, "").is_err());
    }
}
