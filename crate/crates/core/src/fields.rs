//! Closed-form scalar and vector fields on the parameter rectangle.
//!
//! Fields are finite sums of monomials `c x1^p x2^q` and sines
//! `A sin(k1 x1 + k2 x2 + φ)`, so values and derivatives are exact.

use serde::{Deserialize, Serialize};

use crate::tensor::{Coords2, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Term {
    Monomial { coeff: f64, p1: u32, p2: u32 },
    Sine { amp: f64, k1: f64, k2: f64, phase: f64 },
}

fn powi_d(x: f64, p: u32, order: u32) -> f64 {
    // d^order/dx^order of x^p
    if order > p {
        return 0.0;
    }
    let mut factor = 1.0;
    for k in 0..order {
        factor *= (p - k) as f64;
    }
    factor * x.powi((p - order) as i32)
}

impl Term {
    /// Mixed partial `∂1^i ∂2^j` of the term.
    fn derivative(&self, x: Coords2, i: u32, j: u32) -> f64 {
        match *self {
            Term::Monomial { coeff, p1, p2 } => coeff * powi_d(x[0], p1, i) * powi_d(x[1], p2, j),
            Term::Sine { amp, k1, k2, phase } => {
                let arg = k1 * x[0] + k2 * x[1] + phase;
                let order = i + j;
                let trig = match order % 4 {
                    0 => arg.sin(),
                    1 => arg.cos(),
                    2 => -arg.sin(),
                    _ => -arg.cos(),
                };
                amp * k1.powi(i as i32) * k2.powi(j as i32) * trig
            }
        }
    }
}

/// Scalar field as a sum of terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Series {
    pub terms: Vec<Term>,
}

impl Series {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(coeff: f64, p1: u32, p2: u32) -> Self {
        Series {
            terms: vec![Term::Monomial { coeff, p1, p2 }],
        }
    }

    pub fn sine(amp: f64, k1: f64, k2: f64, phase: f64) -> Self {
        Series {
            terms: vec![Term::Sine { amp, k1, k2, phase }],
        }
    }

    pub fn plus(mut self, other: Series) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                Term::Monomial { coeff, p1, p2 } => Term::Monomial {
                    coeff: coeff * s,
                    p1,
                    p2,
                },
                Term::Sine { amp, k1, k2, phase } => Term::Sine {
                    amp: amp * s,
                    k1,
                    k2,
                    phase,
                },
            })
            .collect();
        Series { terms }
    }

    fn derivative(&self, x: Coords2, i: u32, j: u32) -> f64 {
        self.terms.iter().map(|t| t.derivative(x, i, j)).sum()
    }

    pub fn value(&self, x: Coords2) -> f64 {
        self.derivative(x, 0, 0)
    }

    pub fn gradient(&self, x: Coords2) -> [f64; 2] {
        [self.derivative(x, 1, 0), self.derivative(x, 0, 1)]
    }

    pub fn hessian(&self, x: Coords2) -> [[f64; 2]; 2] {
        let h12 = self.derivative(x, 1, 1);
        [[self.derivative(x, 2, 0), h12], [h12, self.derivative(x, 0, 2)]]
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| match *t {
            Term::Monomial { coeff, .. } => coeff == 0.0,
            Term::Sine { amp, .. } => amp == 0.0,
        })
    }
}

/// Vector field with components in the fixed Cartesian frame `{e_i}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecSeries(pub [Series; 3]);

impl VecSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(x: Series, y: Series, z: Series) -> Self {
        VecSeries([x, y, z])
    }

    pub fn value(&self, x: Coords2) -> Vec3 {
        Vec3::new(self.0[0].value(x), self.0[1].value(x), self.0[2].value(x))
    }

    pub fn partials(&self, x: Coords2) -> [Vec3; 2] {
        let g: Vec<[f64; 2]> = self.0.iter().map(|s| s.gradient(x)).collect();
        [
            Vec3::new(g[0][0], g[1][0], g[2][0]),
            Vec3::new(g[0][1], g[1][1], g[2][1]),
        ]
    }

    pub fn scaled(&self, s: f64) -> Self {
        VecSeries([self.0[0].scaled(s), self.0[1].scaled(s), self.0[2].scaled(s)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Series {
        Series::monomial(2.0, 2, 1)
            .plus(Series::sine(0.5, 1.3, -0.7, 0.2))
            .plus(Series::constant(-1.0))
    }

    #[test]
    fn derivatives_match_central_differences() {
        let s = sample();
        let x = Coords2::new(0.4, -0.3);
        let h = 1e-5;
        let e1 = Coords2::new(h, 0.0);
        let e2 = Coords2::new(0.0, h);
        let g = s.gradient(x);
        assert!((g[0] - (s.value(x + e1) - s.value(x - e1)) / (2.0 * h)).abs() < 1e-9);
        assert!((g[1] - (s.value(x + e2) - s.value(x - e2)) / (2.0 * h)).abs() < 1e-9);
        let hs = s.hessian(x);
        let fd12 = (s.gradient(x + e2)[0] - s.gradient(x - e2)[0]) / (2.0 * h);
        let fd22 = (s.gradient(x + e2)[1] - s.gradient(x - e2)[1]) / (2.0 * h);
        assert!((hs[0][1] - fd12).abs() < 1e-8);
        assert!((hs[1][1] - fd22).abs() < 1e-8);
    }

    #[test]
    fn monomial_below_order_vanishes() {
        let s = Series::monomial(3.0, 1, 0);
        assert_eq!(s.hessian(Coords2::new(2.0, 5.0)), [[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(s.gradient(Coords2::new(2.0, 5.0)), [3.0, 0.0]);
    }

    #[test]
    fn json_shape() {
        let s = Series::monomial(1.5, 1, 0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"[{"kind":"monomial","coeff":1.5,"p1":1,"p2":0}]"#);
        let bad = r#"[{"kind":"monomial","coeff":1.5,"p1":1,"p2":0,"extra":1}]"#;
        assert!(serde_json::from_str::<Series>(bad).is_err());
    }
}
