//! Hydrogenic eigenfunctions `R_nl(r) Y_lm(θ,φ) e^{−iεt}` written as
//! `B(r) · A(x,y,z)` with `A = r^l Y_lm` a complex homogeneous polynomial and
//! `B` a polynomial in `r` times `e^{−Zr/n}`. Both factors are smooth in the
//! Cartesian coordinates except `B` at the nucleus.

use crate::numerics::{Cx, Scalar};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct Hydrogenic {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub z: f64,
    pub energy: f64,
    kappa: f64,
    radial: Vec<f64>,
    solid: Vec<([usize; 3], Complex64)>,
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl Hydrogenic {
    /// Caller guarantees `0 ≤ l < n`, `|m| ≤ l`, `z > 0`.
    pub fn new(n: u32, l: u32, m: i32, z: f64) -> Hydrogenic {
        let nf = n as f64;
        let kappa = z / nf;
        let k = n - l - 1;
        let alpha = 2 * l + 1;
        let c = 2.0 * z / nf;
        let norm = (c.powi(3) * factorial(k) / (2.0 * nf * factorial(n + l))).sqrt() * c.powi(l as i32);
        // L_k^{(α)}(c r) = Σ (−1)^i C(k+α, k−i) (c r)^i / i!
        let radial = (0..=k)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                norm * sign * binomial(k + alpha, k - i) * c.powi(i as i32) / factorial(i)
            })
            .collect();
        Hydrogenic {
            n,
            l,
            m,
            z,
            energy: -z * z / (2.0 * nf * nf),
            kappa,
            radial,
            solid: solid_harmonic(l, m),
        }
    }

    pub fn psi<T: Scalar>(&self, x: [T; 3], t: T) -> Cx<T> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let mut poly = T::cst(*self.radial.last().unwrap());
        for c in self.radial.iter().rev().skip(1) {
            poly = poly * r + *c;
        }
        let radial = poly * (r * -self.kappa).exp();
        let angular = eval_monomials(&self.solid, &x, self.l as usize);
        angular.scale(radial) * Cx::expi(t * -self.energy)
    }
}

/// `Σ c_e x^e₀ y^e₁ z^e₂` for monomials of total degree ≤ `deg`.
pub(crate) fn eval_monomials<T: Scalar>(terms: &[([usize; 3], Complex64)], x: &[T; 3], deg: usize) -> Cx<T> {
    let mut pw: [Vec<T>; 3] = [vec![T::cst(1.0)], vec![T::cst(1.0)], vec![T::cst(1.0)]];
    for (a, p) in pw.iter_mut().enumerate() {
        for k in 1..=deg {
            let next = p[k - 1] * x[a];
            p.push(next);
        }
    }
    let mut re = T::cst(0.0);
    let mut im = T::cst(0.0);
    for (e, c) in terms {
        let mono = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
        if c.re != 0.0 {
            re = re + mono * c.re;
        }
        if c.im != 0.0 {
            im = im + mono * c.im;
        }
    }
    Cx::new(re, im)
}

/// Monomial expansion of `r^l Y_lm` with the Condon–Shortley phase:
/// `N (x ± iy)^{|m|} Σ_k a_k z^{l−|m|−2k} r^{2k}`.
pub(crate) fn solid_harmonic(l: u32, m: i32) -> Vec<([usize; 3], Complex64)> {
    let ma = m.unsigned_abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - ma) / factorial(l + ma)).sqrt();
    let phase = if m > 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
    let iy = if m >= 0 { 1.0 } else { -1.0 };
    let mut acc: BTreeMap<[usize; 3], Complex64> = BTreeMap::new();
    // (x ± iy)^{ma}
    let mut xy: Vec<([usize; 3], Complex64)> = Vec::new();
    for j in 0..=ma {
        let ipow = Complex64::new(0.0, iy).powu(j);
        xy.push(([(ma - j) as usize, j as usize, 0], ipow * binomial(ma, j)));
    }
    let mut k = 0;
    while 2 * k + ma <= l {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let a_k = 2f64.powi(-(l as i32)) * sign * binomial(l, k) * binomial(2 * l - 2 * k, l)
            * factorial(l - 2 * k)
            / factorial(l - 2 * k - ma);
        let zpow = (l - ma - 2 * k) as usize;
        // r^{2k} = Σ k!/(p! q! s!) x^{2p} y^{2q} z^{2s}
        for p in 0..=k {
            for q in 0..=(k - p) {
                let s = k - p - q;
                let multi = factorial(k) / (factorial(p) * factorial(q) * factorial(s));
                for (e, c) in &xy {
                    let key = [e[0] + 2 * p as usize, e[1] + 2 * q as usize, zpow + 2 * s as usize];
                    *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c * (norm * phase * a_k * multi);
                }
            }
        }
        k += 1;
    }
    acc.into_iter().filter(|(_, c)| c.norm() > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spherical(r: f64, th: f64, ph: f64) -> [f64; 3] {
        [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
    }

    #[test]
    fn ground_state_closed_form() {
        let h = Hydrogenic::new(1, 0, 0, 1.0);
        let v = h.psi([1.0, 0.0, 0.0], 0.0).to_c64();
        assert!((v.re - (-1f64).exp() / PI.sqrt()).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn textbook_orbitals() {
        let (r, th, ph) = (1.3, 0.7, 2.1);
        let x = spherical(r, th, ph);
        // 2s: (2 − r) e^{−r/2} / (4√(2π))
        let v = Hydrogenic::new(2, 0, 0, 1.0).psi(x, 0.0).to_c64();
        let want = (2.0 - r) * (-r / 2.0).exp() / (4.0 * (2.0 * PI).sqrt());
        assert!((v.re - want).abs() < 1e-14);
        // 2p₁: −r e^{−r/2} sinθ e^{iφ} / (8√π)
        let v = Hydrogenic::new(2, 1, 1, 1.0).psi(x, 0.0).to_c64();
        let want = Complex64::from_polar(-r * (-r / 2.0).exp() * th.sin() / (8.0 * PI.sqrt()), ph);
        assert!((v - want).norm() < 1e-14);
        // 3d₂: r² e^{−r/3} sin²θ e^{2iφ} / (162√π)
        let v = Hydrogenic::new(3, 2, 2, 1.0).psi(x, 0.0).to_c64();
        let want = Complex64::from_polar(r * r * (-r / 3.0).exp() * th.sin().powi(2) / (162.0 * PI.sqrt()), 2.0 * ph);
        assert!((v - want).norm() < 1e-14);
        // 3p₀ with Z = 2: scales as Z^{3/2} ψ(Zr)
        let v = Hydrogenic::new(3, 1, 0, 2.0).psi(x, 0.0).to_c64();
        let zr = 2.0 * r;
        let want = 2f64.powf(1.5) * (2.0 / 81.0) / PI.sqrt() * (6.0 - zr) * zr * (-zr / 3.0).exp() * th.cos()
            / 2f64.sqrt();
        assert!((v.re - want).abs() < 1e-13, "{} {}", v.re, want);
    }

    #[test]
    fn negative_m_is_conjugate_up_to_phase() {
        let x = spherical(2.0, 1.1, -0.4);
        for (l, m) in [(1, 1), (2, 1), (2, 2), (3, 3)] {
            let n = l + 1;
            let p = Hydrogenic::new(n, l, m, 1.0).psi(x, 0.0).to_c64();
            let q = Hydrogenic::new(n, l, -m, 1.0).psi(x, 0.0).to_c64();
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((q - p.conj() * sign).norm() < 1e-14);
        }
    }

    #[test]
    fn phase_rotates_at_eigenvalue() {
        let h = Hydrogenic::new(2, 0, 0, 1.0);
        let a = h.psi([0.5, 0.2, 0.1], 0.0).to_c64();
        let b = h.psi([0.5, 0.2, 0.1], 3.0).to_c64();
        assert!((b - a * Complex64::from_polar(1.0, 0.125 * 3.0)).norm() < 1e-15);
    }
}
