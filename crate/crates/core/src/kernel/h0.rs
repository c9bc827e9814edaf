//! Spatial factor `h0(x, τ) = ₀F₁(1; a(τ² - x²)/4)` and its partial derivatives.
//!
//! With `Z = A(τ² - x²)`, `A = a/4`, the argument is a sum of quadratics in
//! `τ` and `x`, so Faà di Bruno reduces to pairings:
//!
//! ```text
//! ∂τ^p ∂x^q F(Z) = Σ_{j,l} C(p,j) C(q,l) (2A)^j (2Aτ)^{p-2j} (-2A)^l (-2Ax)^{q-2l} F^{(p-j+q-l)}(Z),
//! C(p,j) = p! / (j! (p-2j)! 2^j),    F^{(n)}(Z) = ₀F₁(n+1; Z) / n!.
//! ```

use crate::error::Result;
use crate::specfun::F01Eval;

/// Number of pairings of `p` items into `j` pairs and `p - 2j` singletons.
fn pairings(p: usize, j: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..(2 * j) {
        v *= (p - i) as f64;
    }
    for i in 1..=j {
        v /= 2.0 * i as f64;
    }
    v
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Derivatives `F^{(n)}(Z)`, `n ≤ order`, at a fixed `(x, τ)`.
pub(crate) struct H0Jet {
    quarter_a: f64,
    x: f64,
    tau: f64,
    f: Vec<f64>,
}

impl H0Jet {
    pub fn new(f01: &F01Eval, a: f64, x: f64, tau: f64, order: usize) -> Result<Self> {
        let quarter_a = 0.25 * a;
        let z = quarter_a * (tau * tau - x * x);
        let mut f = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for n in 0..=order {
            if n > 0 {
                fact *= n as f64;
            }
            if quarter_a == 0.0 {
                f.push(if n == 0 { 1.0 } else { 0.0 });
            } else {
                f.push(f01.eval(n as f64 + 1.0, z)? / fact);
            }
        }
        Ok(H0Jet {
            quarter_a,
            x,
            tau,
            f,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `∂τ^p ∂x^q h0`.
    pub fn partial(&self, p: usize, q: usize) -> f64 {
        if p == 0 && q == 0 {
            return self.f[0];
        }
        let a2 = 2.0 * self.quarter_a;
        if a2 == 0.0 {
            return 0.0;
        }
        let up = a2 * self.tau;
        let vp = -a2 * self.x;
        let mut sum = 0.0;
        for j in 0..=p / 2 {
            let tj = pairings(p, j) * a2.powi(j as i32) * up.powi((p - 2 * j) as i32);
            for l in 0..=q / 2 {
                let tl = pairings(q, l) * (-a2).powi(l as i32) * vp.powi((q - 2 * l) as i32);
                sum += tj * tl * self.f[p - j + q - l];
            }
        }
        sum
    }

    /// `∂τ^r ∂x^q (∂τ + b1)^k h0`.
    pub fn l1k(&self, b1: f64, k: usize, r: usize, q: usize) -> f64 {
        (0..=k)
            .map(|i| binom(k, i) * b1.powi((k - i) as i32) * self.partial(i + r, q))
            .sum()
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    binom(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h0(f01: &F01Eval, a: f64, x: f64, tau: f64) -> f64 {
        H0Jet::new(f01, a, x, tau, 0).unwrap().partial(0, 0)
    }

    #[test]
    fn partials_match_finite_differences() {
        let f01 = F01Eval::default();
        for &a in &[0.8, -1.3] {
            let (x, tau, h) = (0.6, 1.7, 1e-4);
            let jet = H0Jet::new(&f01, a, x, tau, 6).unwrap();
            let dt = (h0(&f01, a, x, tau + h) - h0(&f01, a, x, tau - h)) / (2.0 * h);
            let dx = (h0(&f01, a, x + h, tau) - h0(&f01, a, x - h, tau)) / (2.0 * h);
            let dxx = (h0(&f01, a, x + h, tau) - 2.0 * jet.partial(0, 0) + h0(&f01, a, x - h, tau)) / (h * h);
            let dtx = (h0(&f01, a, x + h, tau + h) - h0(&f01, a, x - h, tau + h)
                - h0(&f01, a, x + h, tau - h)
                + h0(&f01, a, x - h, tau - h))
                / (4.0 * h * h);
            assert!((jet.partial(1, 0) - dt).abs() < 1e-8);
            assert!((jet.partial(0, 1) - dx).abs() < 1e-8);
            assert!((jet.partial(0, 2) - dxx).abs() < 1e-5);
            assert!((jet.partial(1, 1) - dtx).abs() < 1e-6);
            // third τ-derivative from second-derivative differences
            let j_p = H0Jet::new(&f01, a, x, tau + h, 3).unwrap();
            let j_m = H0Jet::new(&f01, a, x, tau - h, 3).unwrap();
            let d3 = (j_p.partial(2, 0) - j_m.partial(2, 0)) / (2.0 * h);
            assert!((jet.partial(3, 0) - d3).abs() < 1e-6);
        }
    }

    #[test]
    fn first_l1_application() {
        let f01 = F01Eval::default();
        let (a, b1, x, tau) = (0.7, -0.3, 0.4, 1.1);
        let jet = H0Jet::new(&f01, a, x, tau, 2).unwrap();
        let z = a * (tau * tau - x * x) / 4.0;
        let expect = a * tau / 2.0 * f01.eval(2.0, z).unwrap() + b1 * f01.eval(1.0, z).unwrap();
        assert!((jet.l1k(b1, 1, 0, 0) - expect).abs() < 1e-14);
    }

    #[test]
    fn light_cone_and_degenerate_values() {
        let f01 = F01Eval::default();
        assert_eq!(h0(&f01, 2.5, 0.9, 0.9), 1.0);
        let jet = H0Jet::new(&f01, 0.0, 0.3, 2.0, 4).unwrap();
        assert_eq!(jet.partial(0, 0), 1.0);
        assert_eq!(jet.partial(2, 1), 0.0);
    }
}
