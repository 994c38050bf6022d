//! First-order forward-mode jets: a value with its gradient over at most
//! [`MAX_VARS`] chart coordinates.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_VARS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; MAX_VARS],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        Jet { v, d: [0.0; MAX_VARS] }
    }

    /// Coordinate `i` with value `v`.
    pub fn var(v: f64, i: usize) -> Jet {
        let mut d = [0.0; MAX_VARS];
        d[i] = 1.0;
        Jet { v, d }
    }

    /// `g(self)` given `g(v)` and `g'(v)`.
    pub fn chain(self, value: f64, slope: f64) -> Jet {
        let mut d = self.d;
        for x in d.iter_mut() {
            *x *= slope;
        }
        Jet { v: value, d }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e)
    }

    pub fn powi(self, k: i32) -> Jet {
        self.chain(self.v.powi(k), k as f64 * self.v.powi(k - 1))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        self.v += o.v;
        for (a, b) in self.d.iter_mut().zip(o.d) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        self.v -= o.v;
        for (a, b) in self.d.iter_mut().zip(o.d) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut d = [0.0; MAX_VARS];
        for (i, x) in d.iter_mut().enumerate() {
            *x = self.d[i] * o.v + self.v * o.d[i];
        }
        Jet { v: self.v * o.v, d }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = 1.0 / o.v;
        let mut d = [0.0; MAX_VARS];
        for (i, x) in d.iter_mut().enumerate() {
            *x = (self.d[i] - self.v * inv * o.d[i]) * inv;
        }
        Jet { v: self.v * inv, d }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.v = -self.v;
        for x in self.d.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, c: f64) -> Jet {
        self.v *= c;
        for x in self.d.iter_mut() {
            *x *= c;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, c: f64) -> Jet {
        self.v -= c;
        self
    }
}

/// Determinant of the `n × n` matrix whose rows are the first `n` gradient
/// entries of `rows`, by partial-pivot elimination.
pub fn jacobian_det(rows: &[Jet], n: usize) -> f64 {
    assert_eq!(rows.len(), n);
    let mut a: Vec<[f64; MAX_VARS]> = rows.iter().map(|r| r.d).collect();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        let pivot = a[c];
        for row in a.iter_mut().skip(c + 1) {
            let f = row[c] / pivot[c];
            if f != 0.0 {
                for k in c..n {
                    row[k] -= f * pivot[k];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::var(2.0, 0);
        let y = Jet::var(3.0, 1);
        let z = x * y / (x + y);
        assert!((z.v - 1.2).abs() < 1e-15);
        // ∂/∂x (xy/(x+y)) = y²/(x+y)²
        assert!((z.d[0] - 9.0 / 25.0).abs() < 1e-15);
        assert!((z.d[1] - 4.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn determinant() {
        let rows = [Jet::var(0.0, 1), Jet::var(0.0, 0) * 2.0];
        assert_eq!(jacobian_det(&rows, 2), -2.0);
    }
}
