//! Truncated multivariate Taylor arithmetic in `(x, y, z, t)`.
//!
//! A `Jet<N>` stores Taylor coefficients `f_α/α!` of the monomials of total
//! degree `≤ K`, where `N = C(4+K, 4)` fixes the capacity `K ≤ 4`. The field
//! `ord` is the highest degree that is still exact: differentiating lowers it
//! by one and binary operations take the minimum of their operands.

use super::scalar::Scalar;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

pub const NVAR: usize = 4;
pub const MAX_ORDER: usize = 4;
const NMON: usize = 70;
const NONE: u8 = u8::MAX;

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const T: usize = 3;

struct Tables {
    exps: Vec<[u8; NVAR]>,
    /// Number of monomials of total degree `≤ k`.
    prefix: [usize; MAX_ORDER + 1],
    pairs: Vec<Vec<(u8, u8, u8)>>,
    up: Vec<[u8; NVAR]>,
    fact: Vec<f64>,
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exps = Vec::with_capacity(NMON);
        let mut prefix = [0usize; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER as u8 {
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    for c in (0..=d - a - b).rev() {
                        exps.push([a, b, c, d - a - b - c]);
                    }
                }
            }
            prefix[d as usize] = exps.len();
        }
        assert_eq!(exps.len(), NMON);
        let index = |e: [u8; NVAR]| exps.iter().position(|x| *x == e);
        let deg = |e: &[u8; NVAR]| e.iter().map(|&v| v as usize).sum::<usize>();
        let mut pairs = vec![Vec::new(); MAX_ORDER + 1];
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                let total = deg(ei) + deg(ej);
                if total > MAX_ORDER {
                    continue;
                }
                let sum = [ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2], ei[3] + ej[3]];
                let k = index(sum).expect("monomial product within order");
                for (ord, list) in pairs.iter_mut().enumerate() {
                    if total <= ord {
                        list.push((i as u8, j as u8, k as u8));
                    }
                }
            }
        }
        let up = exps
            .iter()
            .map(|e| {
                let mut out = [NONE; NVAR];
                for (v, slot) in out.iter_mut().enumerate() {
                    let mut f = *e;
                    f[v] += 1;
                    if let Some(k) = index(f) {
                        *slot = k as u8;
                    }
                }
                out
            })
            .collect();
        let fact = exps
            .iter()
            .map(|e| e.iter().map(|&v| factorial(v)).product())
            .collect();
        Tables {
            exps,
            prefix,
            pairs,
            up,
            fact,
        }
    })
}

const fn capacity(n: usize) -> u8 {
    match n {
        1 => 0,
        5 => 1,
        15 => 2,
        35 => 3,
        70 => 4,
        _ => panic!("jet size must be C(4+K, 4) for K <= 4"),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Jet<const N: usize> {
    c: [f64; N],
    ord: u8,
}

pub type Jet1 = Jet<5>;
pub type Jet2 = Jet<15>;
pub type Jet3 = Jet<35>;
pub type Jet4 = Jet<70>;

impl<const N: usize> Jet<N> {
    pub const CAP: u8 = capacity(N);

    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Jet { c, ord: Self::CAP }
    }

    /// The independent variable `var` expanded around `v`.
    pub fn var(v: f64, var: usize) -> Self {
        let mut j = Self::constant(v);
        if Self::CAP >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    pub fn order(&self) -> u8 {
        self.ord
    }

    fn len(ord: u8) -> usize {
        tables().prefix[ord as usize]
    }

    /// Partial derivative `∂^α f` at the expansion point.
    pub fn partial(&self, alpha: [u8; NVAR]) -> f64 {
        let t = tables();
        let deg: u8 = alpha.iter().sum();
        assert!(deg <= self.ord, "partial of degree {deg} exceeds jet order {}", self.ord);
        let k = t.exps.iter().position(|e| *e == alpha).unwrap();
        self.c[k] * t.fact[k]
    }

    /// `∂f/∂var` as a jet one order lower.
    pub fn d(&self, var: usize) -> Self {
        assert!(self.ord >= 1, "cannot differentiate an order-0 jet");
        let t = tables();
        let ord = self.ord - 1;
        let mut c = [0.0; N];
        for (i, slot) in c.iter_mut().enumerate().take(Self::len(ord)) {
            let k = t.up[i][var];
            *slot = (t.exps[i][var] as f64 + 1.0) * self.c[k as usize];
        }
        Jet { c, ord }
    }

    pub fn grad(&self) -> [Self; 3] {
        [self.d(X), self.d(Y), self.d(Z)]
    }

    pub fn lap(&self) -> Self {
        self.d(X).d(X) + self.d(Y).d(Y) + self.d(Z).d(Z)
    }

    /// `Σ f^{(k)}(a₀)/k! δᵏ` with `δ = self − a₀`.
    fn compose(&self, derivs: &[f64; MAX_ORDER + 1]) -> Self {
        let ord = self.ord as usize;
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut acc = Self::constant(derivs[ord] / factorial(ord as u8));
        acc.ord = self.ord;
        for k in (0..ord).rev() {
            acc = acc * delta + derivs[k] / factorial(k as u8);
        }
        acc
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let ord = self.ord.min(o.ord);
        let mut c = [0.0; N];
        for (i, slot) in c.iter_mut().enumerate().take(Self::len(ord)) {
            *slot = self.c[i] + o.c[i];
        }
        Jet { c, ord }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let ord = self.ord.min(o.ord);
        let mut c = [0.0; N];
        for (i, slot) in c.iter_mut().enumerate().take(Self::len(ord)) {
            *slot = self.c[i] - o.c[i];
        }
        Jet { c, ord }
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let ord = self.ord.min(o.ord);
        let mut c = [0.0; N];
        for &(i, j, k) in &tables().pairs[ord as usize] {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet { c, ord }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, v: f64) -> Self {
        self.c[0] += v;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, v: f64) -> Self {
        self.c[0] -= v;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, v: f64) -> Self {
        for x in self.c.iter_mut() {
            *x *= v;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(self, v: f64) -> Self {
        self * (1.0 / v)
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn exp(self) -> Self {
        let e = self.c[0].exp();
        self.compose(&[e; MAX_ORDER + 1])
    }
    fn ln(self) -> Self {
        let a = self.c[0];
        self.compose(&[
            a.ln(),
            1.0 / a,
            -1.0 / (a * a),
            2.0 / (a * a * a),
            -6.0 / (a * a * a * a),
        ])
    }
    fn sqrt(self) -> Self {
        let a = self.c[0];
        let s = a.sqrt();
        self.compose(&[
            s,
            0.5 / s,
            -0.25 / (s * a),
            0.375 / (s * a * a),
            -0.9375 / (s * a * a * a),
        ])
    }
    fn sin(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }
    fn cos(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.c[0];
        self.compose(&[r, -r * r, 2.0 * r * r * r, -6.0 * r.powi(4), 24.0 * r.powi(5)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn polynomial_partials_are_exact() {
        let x = Jet4::var(1.5, X);
        let y = Jet4::var(-0.5, Y);
        let f = x * x * x * y + y * y * 2.0;
        assert!(close(f.partial([3, 1, 0, 0]), 6.0, 1e-14));
        assert!(close(f.partial([2, 1, 0, 0]), 6.0 * 1.5, 1e-14));
        assert!(close(f.partial([0, 2, 0, 0]), 4.0, 1e-14));
        assert!(close(f.partial([1, 0, 0, 0]), 3.0 * 2.25 * -0.5, 1e-14));
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let a = 0.7;
        let x = Jet4::var(a, X);
        let e = x.exp();
        for k in 0..=4u8 {
            assert!(close(e.partial([k, 0, 0, 0]), a.exp(), 1e-13));
        }
        let s = x.sqrt();
        assert!(close(s.partial([3, 0, 0, 0]), 0.375 * a.powf(-2.5), 1e-13));
        let r = x.recip();
        assert!(close(r.partial([4, 0, 0, 0]), 24.0 * a.powi(-5), 1e-12));
        let l = x.ln();
        assert!(close(l.partial([2, 0, 0, 0]), -1.0 / (a * a), 1e-13));
        let c = x.cos();
        assert!(close(c.partial([3, 0, 0, 0]), a.sin(), 1e-13));
    }

    #[test]
    fn derivative_lowers_order_and_commutes() {
        let x = Jet4::var(0.3, X);
        let t = Jet4::var(1.1, T);
        let f = (x * t).sin() * x.exp();
        let fx = f.d(X);
        assert_eq!(fx.order(), 3);
        assert!(close(fx.d(T).value(), f.d(T).d(X).value(), 1e-14));
        assert!(close(fx.d(T).value(), f.partial([1, 0, 0, 1]), 1e-14));
    }

    #[test]
    fn mixed_orders_truncate_to_the_lower() {
        let x = Jet4::var(2.0, X);
        let g = x.d(X) * x;
        assert_eq!(g.order(), 3);
        assert_eq!((Jet2::var(1.0, Y) * 3.0).order(), 2);
    }
}
