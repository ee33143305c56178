//! Text form of polynomials: `(re+imi)*z1^k*z1c^l + ...`.
//!
//! `zN` is `z_N` and `zNc` is `z*_N` (1-based). The parser accepts general
//! sums and products of numbers, `i`, imaginary literals such as `2.5i`,
//! variables, parentheses and non-negative integer powers, so hand-written
//! forms like `0.5*i*z1c^2 - 0.5*i*z1^2` are fine too. Printing uses the
//! shortest round-trip float representation, so print→parse is exact.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use super::polynomial::{Polynomial, Var};
use crate::error::{Error, Result};

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            write!(f, "({:?}{}{:?}i)", c.re, sign, c.im.abs())?;
            for (alpha, (k, l)) in m.pairs().enumerate() {
                write_power(f, &format!("z{}", alpha + 1), k)?;
                write_power(f, &format!("z{}c", alpha + 1), l)?;
            }
        }
        Ok(())
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, name: &str, k: u32) -> fmt::Result {
    match k {
        0 => Ok(()),
        1 => write!(f, "*{name}"),
        _ => write!(f, "*{name}^{k}"),
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Mode count is inferred from the highest variable index (at least 1).
    fn from_str(s: &str) -> Result<Self> {
        let modes = scan_max_mode(s)?.max(1);
        Polynomial::parse_with_modes(s, modes)
    }
}

impl Polynomial {
    pub fn parse_with_modes(s: &str, mode_count: usize) -> Result<Polynomial> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, modes: mode_count };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(out)
    }
}

fn scan_max_mode(s: &str) -> Result<usize> {
    let b = s.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'z' {
            let start = i + 1;
            let mut j = start;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j > start {
                let n: usize = s[start..j]
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, msg: "bad mode index".into() })?;
                best = best.max(n);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    Ok(best)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    modes: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn constant(&self, c: C64) -> Polynomial {
        Polynomial::constant(self.modes, c)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected integer exponent"));
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii digits")
                .parse()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(self.constant(C64::new(0.0, 1.0)))
            }
            Some(b'z') => self.variable(),
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Polynomial> {
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected mode index after 'z'"));
        }
        let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.error("bad mode index"))?;
        if idx == 0 || idx > self.modes {
            return Err(self.error("mode index out of range"));
        }
        let var = if self.src.get(self.pos) == Some(&b'c') {
            self.pos += 1;
            Var::Zc
        } else {
            Var::Z
        };
        Ok(Polynomial::variable(self.modes, idx - 1, var))
    }

    fn number(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("bad number '{text}'"),
        })?;
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            return Ok(self.constant(C64::new(0.0, value)));
        }
        Ok(self.constant(C64::new(value, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonical_form() {
        let p = Polynomial::monomial(&[(2, 1)], C64::new(1.5, -2.0));
        assert_eq!(p.to_string(), "(1.5-2.0i)*z1^2*z1c");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
    }

    #[test]
    fn parses_hand_written_forms() {
        let p: Polynomial = "0.5*i*z1c^2 - 0.5i*z1^2 + 2*z1*z1c".parse().unwrap();
        let expected = Polynomial::monomial(&[(0, 2)], C64::new(0.0, 0.5))
            + Polynomial::monomial(&[(2, 0)], C64::new(0.0, -0.5))
            + Polynomial::monomial(&[(1, 1)], C64::new(2.0, 0.0));
        assert_eq!(p, expected);

        let q: Polynomial = "(z1 + z2c)^2".parse().unwrap();
        assert_eq!(q.mode_count(), 2);
        assert_eq!(q.term_count(), 3);

        let r = Polynomial::parse_with_modes("-1e-3*z1", 3).unwrap();
        assert_eq!(r.mode_count(), 3);
        assert_eq!(r, Polynomial::z(3, 0).scale(C64::new(-1e-3, 0.0)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!("z0".parse::<Polynomial>().is_err());
        assert!("2 *".parse::<Polynomial>().is_err());
        assert!("z1 ^".parse::<Polynomial>().is_err());
        assert!("(z1".parse::<Polynomial>().is_err());
        assert!(Polynomial::parse_with_modes("z3", 2).is_err());
        assert!("1e".parse::<Polynomial>().is_err());
    }

    #[test]
    fn round_trips_awkward_coefficients() {
        let p = Polynomial::monomial(&[(1, 0), (0, 3)], C64::new(-1e-300, 0.1 + 0.2))
            + Polynomial::monomial(&[(0, 0), (2, 2)], C64::new(std::f64::consts::PI, -0.0));
        let back = Polynomial::parse_with_modes(&p.to_string(), 2).unwrap();
        assert_eq!(back, p);
    }
}
