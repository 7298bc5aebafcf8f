use std::cmp::Ordering;
use std::fmt;

use super::ast::BinOp;
use super::ErrorKind;

/// Largest magnitude an integer can have and still convert to `f64`
/// exactly.
const EXACT_FLOAT_INT: i64 = 1 << 53;

/// A runtime value. Integers are 64-bit and checked: leaving the range is an
/// [`ErrorKind::OverflowGuard`], never a wraparound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Value {
    pub fn truthy(self) -> bool {
        match self {
            Value::Int(i) => i != 0,
            Value::Float(f) => f != 0.0,
            Value::Bool(b) => b,
        }
    }

    /// Integers and booleans as an integer; `None` for floats.
    fn as_int(self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(i),
            Value::Bool(b) => Some(i64::from(b)),
            Value::Float(_) => None,
        }
    }

    fn as_float(self) -> f64 {
        match self {
            Value::Float(f) => f,
            other => other.as_int().unwrap() as f64,
        }
    }

    pub fn arithmetic(op: BinOp, lhs: Value, rhs: Value) -> Result<Value, ErrorKind> {
        if op == BinOp::Div {
            return true_divide(lhs, rhs);
        }
        match (lhs.as_int(), rhs.as_int()) {
            (Some(a), Some(b)) => {
                let result = match op {
                    BinOp::Add => a.checked_add(b),
                    BinOp::Sub => a.checked_sub(b),
                    BinOp::Mul => a.checked_mul(b),
                    _ => unreachable!("{op:?} is not arithmetic"),
                };
                result.map(Value::Int).ok_or(ErrorKind::OverflowGuard)
            }
            _ => {
                let (a, b) = (lhs.as_float(), rhs.as_float());
                Ok(Value::Float(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    _ => unreachable!("{op:?} is not arithmetic"),
                }))
            }
        }
    }

    pub fn compare(op: BinOp, lhs: Value, rhs: Value) -> Value {
        let ordering = match (lhs.as_int(), rhs.as_int()) {
            (Some(a), Some(b)) => Some(a.cmp(&b)),
            (Some(a), None) => compare_int_float(a, rhs.as_float()),
            (None, Some(b)) => compare_int_float(b, lhs.as_float()).map(Ordering::reverse),
            (None, None) => lhs.as_float().partial_cmp(&rhs.as_float()),
        };
        let result = match (op, ordering) {
            // NaN compares unequal to everything
            (BinOp::Ne, None) => true,
            (_, None) => false,
            (BinOp::Lt, Some(o)) => o == Ordering::Less,
            (BinOp::Gt, Some(o)) => o == Ordering::Greater,
            (BinOp::Le, Some(o)) => o != Ordering::Greater,
            (BinOp::Ge, Some(o)) => o != Ordering::Less,
            (BinOp::Eq, Some(o)) => o == Ordering::Equal,
            (BinOp::Ne, Some(o)) => o != Ordering::Equal,
            _ => unreachable!("{op:?} is not a comparison"),
        };
        Value::Bool(result)
    }
}

fn true_divide(lhs: Value, rhs: Value) -> Result<Value, ErrorKind> {
    if !rhs.truthy() {
        return Err(ErrorKind::DivisionByZero);
    }
    if let (Some(a), Some(b)) = (lhs.as_int(), rhs.as_int()) {
        // beyond 2^53 the float quotient may differ from the reference
        // interpreter's correctly rounded integer division
        if a.unsigned_abs() > EXACT_FLOAT_INT as u64 || b.unsigned_abs() > EXACT_FLOAT_INT as u64 {
            return Err(ErrorKind::OverflowGuard);
        }
    }
    Ok(Value::Float(lhs.as_float() / rhs.as_float()))
}

/// Exact comparison of an integer with a float, as the reference
/// interpreter does it (no rounding of the integer).
fn compare_int_float(i: i64, f: f64) -> Option<Ordering> {
    if f.is_nan() {
        return None;
    }
    if i.unsigned_abs() <= EXACT_FLOAT_INT as u64 {
        return (i as f64).partial_cmp(&f);
    }
    // 2^63 is exactly representable
    if f >= 9_223_372_036_854_775_808.0 {
        return Some(Ordering::Less);
    }
    if f < -9_223_372_036_854_775_808.0 {
        return Some(Ordering::Greater);
    }
    let whole = f.trunc();
    match i.cmp(&(whole as i64)) {
        Ordering::Equal => 0.0.partial_cmp(&(f - whole)),
        other => Some(other),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_value(*self))
    }
}

/// Renders a value exactly as the reference interpreter's `print` does.
pub fn format_value(value: Value) -> String {
    match value {
        Value::Int(i) => i.to_string(),
        Value::Bool(true) => "True".to_string(),
        Value::Bool(false) => "False".to_string(),
        Value::Float(x) => format_float(x),
    }
}

/// Shortest digits that round-trip, laid out like the reference `repr`:
/// positional notation for decimal exponents in `-4..16`, otherwise
/// `d.ddde±XX`; integral values keep a trailing `.0`.
fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }

    // `{:e}` gives the shortest round-trip digit count, e.g.
    // "-2.3333333333333335e0". Re-render at that precision because on an
    // exact tie it rounds up where python rounds half to even.
    let shortest = format!("{x:e}");
    let precision = shortest
        .split_once('e')
        .expect("exponent marker")
        .0
        .trim_start_matches('-')
        .len()
        .saturating_sub(2);
    let sci = format!("{x:.precision$e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let n = digits.len() as i32;
    // value = 0.DIGITS * 10^point
    let point = exponent + 1;

    let body = if !(-3..=16).contains(&point) {
        let (first, rest) = digits.split_at(1);
        let frac = if rest.is_empty() {
            String::new()
        } else {
            format!(".{rest}")
        };
        let esign = if exponent < 0 { '-' } else { '+' };
        format!("{first}{frac}e{esign}{:02}", exponent.unsigned_abs())
    } else if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point >= n {
        format!("{digits}{}.0", "0".repeat((point - n) as usize))
    } else {
        let (whole, frac) = digits.split_at(point as usize);
        format!("{whole}.{frac}")
    };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_bools() {
        assert_eq!(format_value(Value::Int(7)), "7");
        assert_eq!(format_value(Value::Int(-12)), "-12");
        assert_eq!(format_value(Value::Bool(true)), "True");
        assert_eq!(format_value(Value::Bool(false)), "False");
    }

    #[test]
    fn floats_match_reference_repr() {
        // expected strings taken from the reference interpreter's repr()
        let cases: [(f64, &str); 17] = [
            (0.5, "0.5"),
            (7.0 / 3.0, "2.3333333333333335"),
            // exact tie at the last digit: python rounds half to even
            (f64::from_bits(0x430d_b603_2f9c_1b4a), "1045362390565737.2"),
            (2.0, "2.0"),
            (-0.0, "-0.0"),
            (0.1 + 0.2, "0.30000000000000004"),
            (1e16, "1e+16"),
            (1.5e16, "1.5e+16"),
            (1234567890123456.0, "1234567890123456.0"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (1.0 / 3.0, "0.3333333333333333"),
            (-4.5, "-4.5"),
            (123.456, "123.456"),
            (1e301, "1e+301"),
            (5e-324, "5e-324"),
            (100.0, "100.0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_value(Value::Float(x)), want, "{x:e}");
        }
        assert_eq!(format_value(Value::Float(f64::INFINITY)), "inf");
        assert_eq!(format_value(Value::Float(f64::NAN)), "nan");
    }

    #[test]
    fn integer_overflow_is_guarded() {
        assert_eq!(
            Value::arithmetic(BinOp::Mul, Value::Int(i64::MAX), Value::Int(2)),
            Err(ErrorKind::OverflowGuard)
        );
        assert_eq!(
            Value::arithmetic(BinOp::Add, Value::Int(2), Value::Int(3)),
            Ok(Value::Int(5))
        );
    }

    #[test]
    fn division() {
        assert_eq!(
            Value::arithmetic(BinOp::Div, Value::Int(1), Value::Int(2)),
            Ok(Value::Float(0.5))
        );
        assert_eq!(
            Value::arithmetic(BinOp::Div, Value::Int(4), Value::Int(2)),
            Ok(Value::Float(2.0))
        );
        for zero in [
            Value::Int(0),
            Value::Float(0.0),
            Value::Float(-0.0),
            Value::Bool(false),
        ] {
            assert_eq!(
                Value::arithmetic(BinOp::Div, Value::Int(3), zero),
                Err(ErrorKind::DivisionByZero)
            );
        }
    }

    #[test]
    fn mixed_promotes_to_float() {
        assert_eq!(
            Value::arithmetic(BinOp::Add, Value::Int(1), Value::Float(0.5)),
            Ok(Value::Float(1.5))
        );
        assert_eq!(
            Value::arithmetic(BinOp::Sub, Value::Float(2.5), Value::Int(2)),
            Ok(Value::Float(0.5))
        );
    }

    #[test]
    fn exact_int_float_comparison() {
        let big = (1i64 << 53) + 1;
        // (1<<53)+1 rounds to 2^53 as a float; the exact comparison must not
        assert_eq!(
            Value::compare(BinOp::Gt, Value::Int(big), Value::Float(9007199254740992.0)),
            Value::Bool(true)
        );
        assert_eq!(
            Value::compare(BinOp::Eq, Value::Int(2), Value::Float(2.0)),
            Value::Bool(true)
        );
        assert_eq!(
            Value::compare(BinOp::Lt, Value::Float(2.5), Value::Int(3)),
            Value::Bool(true)
        );
        assert_eq!(
            Value::compare(BinOp::Ne, Value::Float(f64::NAN), Value::Int(3)),
            Value::Bool(true)
        );
        assert_eq!(
            Value::compare(BinOp::Eq, Value::Float(f64::NAN), Value::Float(f64::NAN)),
            Value::Bool(false)
        );
    }
}
