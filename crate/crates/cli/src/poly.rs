//! Polynomials in `z1, …, zn, zbar1, …, zbarn` with Gaussian-rational
//! coefficients, written like `1 + 2*z1*zbar1 - 1/3i*z1^2` or
//! `(1/2-3i)*zbar2^3`. This is also the format of `Jet::pretty`, so
//! printed jets parse back to the same jet.

use fedosov_core::jet::Monomial;
use fedosov_core::scalar::parse_rational;
use fedosov_core::{GaussianRational, Jet, Order};
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(String),
    Imaginary,
    Variable { holomorphic: bool, index: usize },
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            'i' => {
                out.push(Token::Imaginary);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                out.push(Token::Number(chars[start..i].iter().collect()));
                // `2i` and `1/3i` denote imaginary numbers
                if i < chars.len() && chars[i] == 'i' {
                    out.push(Token::Star);
                    out.push(Token::Imaginary);
                    i += 1;
                }
            }
            'z' => {
                let rest: String = chars[i..].iter().collect();
                let (holomorphic, skip) = if rest.starts_with("zbar") {
                    (false, 4)
                } else {
                    (true, 1)
                };
                i += skip;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let index: usize = if digits.is_empty() {
                    1
                } else {
                    digits.parse().map_err(|_| format!("bad variable index {digits:?}"))?
                };
                if index == 0 {
                    return Err("variable indices start at 1".into());
                }
                out.push(Token::Variable { holomorphic, index });
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn sum(&mut self) -> Result<Jet, String> {
        let mut acc = Jet::zero(self.dim, Order::Exact);
        let mut first = true;
        loop {
            let mut negative = false;
            let mut saw_sign = false;
            while let Some(Token::Plus | Token::Minus) = self.peek() {
                if self.next() == Some(Token::Minus) {
                    negative = !negative;
                }
                saw_sign = true;
            }
            if !first && !saw_sign {
                break;
            }
            let term = self.product()?;
            acc = if negative { acc - term } else { acc + term };
            first = false;
            if !matches!(self.peek(), Some(Token::Plus | Token::Minus)) {
                break;
            }
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Jet, String> {
        let mut acc = self.power()?;
        while let Some(Token::Star) = self.peek() {
            self.next();
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Jet, String> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Token::Number(n)) => {
                    let e: u32 = n.parse().map_err(|_| format!("bad exponent {n:?}"))?;
                    return Ok(base.pow(e));
                }
                other => return Err(format!("expected an exponent, found {other:?}")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Jet, String> {
        let dim = self.dim;
        match self.next() {
            Some(Token::Number(n)) => {
                let q = parse_rational(&n).map_err(|e| e.to_string())?;
                Ok(Jet::constant(dim, GaussianRational::real(q), Order::Exact))
            }
            Some(Token::Imaginary) => Ok(Jet::constant(dim, GaussianRational::i(), Order::Exact)),
            Some(Token::Variable { holomorphic, index }) => {
                if index > dim {
                    return Err(format!("variable index {index} exceeds the dimension {dim}"));
                }
                Ok(if holomorphic {
                    Jet::z(dim, index - 1)
                } else {
                    Jet::zbar(dim, index - 1)
                })
            }
            Some(Token::Open) => {
                let inner = self.sum()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    other => Err(format!("expected ')', found {other:?}")),
                }
            }
            other => Err(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses a polynomial in `dim` complex variables into an exact jet.
pub fn parse_polynomial(text: &str, dim: usize) -> Result<Jet, String> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        dim,
    };
    let jet = parser.sum()?;
    if parser.pos != tokens.len() {
        return Err(format!("trailing input after token {}", parser.pos));
    }
    Ok(jet)
}

/// A single monomial `z^a zbar^b` as a jet with unit coefficient.
pub fn monomial_jet(dim: usize, z: &[u32], zbar: &[u32]) -> Result<Jet, String> {
    if z.len() > dim || zbar.len() > dim {
        return Err(format!("exponent lists longer than the dimension {dim}"));
    }
    let mut exps = vec![0u32; 2 * dim];
    exps[..z.len()].copy_from_slice(z);
    exps[dim..dim + zbar.len()].copy_from_slice(zbar);
    Ok(Jet::monomial(
        dim,
        Monomial::from_exponents(&exps),
        GaussianRational::one(),
        Order::Exact,
    ))
}

/// Exponent lists `(z, zbar)` of a monomial.
pub fn exponents(m: Monomial, dim: usize) -> (Vec<u32>, Vec<u32>) {
    let e = m.exponents(2 * dim);
    (e[..dim].to_vec(), e[dim..].to_vec())
}

pub fn is_zero_coefficient(c: &GaussianRational) -> bool {
    c.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fedosov_core::scalar::rat;

    #[test]
    fn parses_printed_jets() {
        let z = Jet::z(2, 0);
        let zb = Jet::zbar(2, 1);
        let c = GaussianRational::new(rat(-1, 2), rat(3, 1));
        let j = &(&z * &zb).scale(&c) + &Jet::constant(2, GaussianRational::from_ratio(-4, 3), Order::Exact);
        let j = j + z.pow(3).scale(&GaussianRational::i());
        assert_eq!(parse_polynomial(&j.pretty(), 2).unwrap(), j);
    }

    #[test]
    fn signs_and_implicit_imaginary_units() {
        let j = parse_polynomial("-4-4/3i + 1*z1 + -1*z1", 1).unwrap();
        let expected = Jet::constant(1, GaussianRational::new(rat(-4, 1), rat(-4, 3)), Order::Exact);
        assert_eq!(j, expected);
        assert_eq!(parse_polynomial("z", 1).unwrap(), Jet::z(1, 0));
        assert_eq!(
            parse_polynomial("(1+i)^2", 1).unwrap(),
            Jet::constant(1, GaussianRational::new(rat(0, 1), rat(2, 1)), Order::Exact)
        );
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_polynomial("z3", 2).is_err());
        assert!(parse_polynomial("1 +", 1).is_err());
        assert!(parse_polynomial("x", 1).is_err());
        assert!(parse_polynomial("(1", 1).is_err());
        assert!(parse_polynomial("", 1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn printed_polynomials_parse_back(
            terms in proptest::collection::vec(
                (proptest::array::uniform4(0u32..=3), -9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5),
                0..6,
            )
        ) {
            let j = Jet::from_terms(
                2,
                Order::Exact,
                terms.into_iter().map(|(e, a, b, c, d)| {
                    (Monomial::from_exponents(&e), GaussianRational::new(rat(a, b), rat(c, d)))
                }),
            );
            proptest::prop_assert_eq!(parse_polynomial(&j.pretty(), 2).unwrap(), j);
        }
    }
}
