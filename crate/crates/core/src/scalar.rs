//! Serializable scalar functions used inside set-valued map descriptors.

use serde::{Deserialize, Serialize};

/// A real function of one variable drawn from a fixed catalogue, so map
/// descriptors round-trip through configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Const { value: f64 },
    /// Coefficients in ascending order: `c0 + c1 u + c2 u² + …`.
    Poly { coeffs: Vec<f64> },
    /// `amplitude · sin(frequency · u + phase)`.
    Sin {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `scale · sqrt(u - shift)`, zero left of `shift`.
    Sqrt {
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `scale · |u - center|`.
    Abs {
        center: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `sin(1/u)` for `u != 0`, extended by `0` at the origin.
    SinReciprocal,
    /// Linear interpolation through `(knots[i], values[i])`, constant outside.
    Piecewise { knots: Vec<f64>, values: Vec<f64> },
    Sum { terms: Vec<ScalarFn> },
    Product { factors: Vec<ScalarFn> },
}

fn one() -> f64 {
    1.0
}

impl ScalarFn {
    pub fn constant(value: f64) -> Self {
        ScalarFn::Const { value }
    }

    pub fn identity() -> Self {
        ScalarFn::Poly {
            coeffs: vec![0.0, 1.0],
        }
    }

    pub fn poly(coeffs: impl Into<Vec<f64>>) -> Self {
        ScalarFn::Poly {
            coeffs: coeffs.into(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ScalarFn::Const { value } => *value,
            ScalarFn::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c),
            ScalarFn::Sin {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * u + phase).sin(),
            ScalarFn::Sqrt { scale, shift } => scale * (u - shift).max(0.0).sqrt(),
            ScalarFn::Abs { center, scale } => scale * (u - center).abs(),
            ScalarFn::SinReciprocal => {
                if u == 0.0 {
                    0.0
                } else {
                    (1.0 / u).sin()
                }
            }
            ScalarFn::Piecewise { knots, values } => piecewise_linear(knots, values, u),
            ScalarFn::Sum { terms } => terms.iter().map(|t| t.eval(u)).sum(),
            ScalarFn::Product { factors } => factors.iter().map(|t| t.eval(u)).product(),
        }
    }

    /// Checks structural well-formedness (knot ordering, matching lengths).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            ScalarFn::Piecewise { knots, values } => {
                if knots.is_empty() || knots.len() != values.len() {
                    return Err("piecewise needs equally many (>= 1) knots and values".into());
                }
                if knots.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("piecewise knots must be strictly increasing".into());
                }
                Ok(())
            }
            ScalarFn::Sum { terms } => terms.iter().try_for_each(ScalarFn::validate),
            ScalarFn::Product { factors } => factors.iter().try_for_each(ScalarFn::validate),
            _ => Ok(()),
        }
    }
}

fn piecewise_linear(knots: &[f64], values: &[f64], u: f64) -> f64 {
    let n = knots.len();
    if n == 0 {
        return 0.0;
    }
    if u <= knots[0] {
        return values[0];
    }
    if u >= knots[n - 1] {
        return values[n - 1];
    }
    let i = knots.partition_point(|&k| k <= u);
    let (x0, x1) = (knots[i - 1], knots[i]);
    let (y0, y1) = (values[i - 1], values[i]);
    y0 + (y1 - y0) * (u - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_values() {
        assert_eq!(ScalarFn::poly([1.0, 2.0, 3.0]).eval(2.0), 17.0);
        assert_eq!(ScalarFn::constant(4.0).eval(-1.0), 4.0);
        assert_eq!(ScalarFn::Sqrt { scale: 2.0, shift: 0.0 }.eval(0.25), 1.0);
        assert_eq!(ScalarFn::Sqrt { scale: 1.0, shift: 1.0 }.eval(0.5), 0.0);
        assert_eq!(ScalarFn::Abs { center: 0.5, scale: 1.0 }.eval(0.2), 0.3);
        assert_eq!(ScalarFn::SinReciprocal.eval(0.0), 0.0);
        assert!((ScalarFn::SinReciprocal.eval(2.0 / std::f64::consts::PI) - 1.0).abs() < 1e-15);
        let pw = ScalarFn::Piecewise {
            knots: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 2.0, 0.0],
        };
        assert_eq!(pw.eval(0.5), 1.0);
        assert_eq!(pw.eval(1.5), 1.0);
        assert_eq!(pw.eval(5.0), 0.0);
        let s = ScalarFn::Sum {
            terms: vec![ScalarFn::identity(), ScalarFn::constant(1.0)],
        };
        assert_eq!(s.eval(2.0), 3.0);
        let p = ScalarFn::Product {
            factors: vec![ScalarFn::identity(), ScalarFn::poly([1.0, -1.0])],
        };
        assert_eq!(p.eval(0.5), 0.25);
    }

    #[test]
    fn piecewise_validation() {
        let bad = ScalarFn::Piecewise {
            knots: vec![0.0, 0.0],
            values: vec![1.0, 2.0],
        };
        assert!(bad.validate().is_err());
        let short = ScalarFn::Piecewise {
            knots: vec![0.0],
            values: vec![],
        };
        assert!(short.validate().is_err());
    }
}
