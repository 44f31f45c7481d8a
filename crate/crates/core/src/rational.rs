//! Exact rational scalars and their `"num/den"` text form.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Formats as `"num/den"`, or `"num"` for integers.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::Syntax {
        line: 0,
        column: 0,
        message: format!("invalid rational {text:?}"),
    };
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => text.parse::<i64>().map(Rational::from_integer).map_err(|_| bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        assert_eq!(format(&frac(2, 4)), "1/2");
        assert_eq!(format(&int(-3)), "-3");
        assert_eq!(parse(" 3/6 ").unwrap(), frac(1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }
}
