//! Polar quantities `ρ`, `S` and their derivatives computed from `Ψ` and its
//! derivatives without ever forming `arg Ψ`, so superpositions are handled
//! like any other state.

use crate::numerics::{Cx, Jet, Scalar};
use serde::{Deserialize, Serialize};

/// `Ψ`, `∇Ψ`, the Hessian of `Ψ` and `∂Ψ/∂t` at one point.
#[derive(Clone, Copy, Debug)]
pub struct PsiDerivs<T> {
    pub psi: Cx<T>,
    pub grad: [Cx<T>; 3],
    pub hess: [[Cx<T>; 3]; 3],
    pub dt: Cx<T>,
}

impl<T: Scalar> PsiDerivs<T> {
    pub fn lap(&self) -> Cx<T> {
        self.hess[0][0] + self.hess[1][1] + self.hess[2][2]
    }
}

impl<const N: usize> PsiDerivs<Jet<N>> {
    /// Splits a Taylor jet of `Ψ` into derivative jets. Needs jet order ≥ 2.
    pub fn from_taylor(psi: Cx<Jet<N>>) -> Self {
        let d = |c: &Cx<Jet<N>>, v: usize| Cx::new(c.re.d(v), c.im.d(v));
        let grad = [d(&psi, 0), d(&psi, 1), d(&psi, 2)];
        let hess = [0, 1, 2].map(|i| [0, 1, 2].map(|j| d(&grad[i], j)));
        PsiDerivs {
            psi,
            grad,
            hess,
            dt: d(&psi, crate::numerics::jet::T),
        }
    }

    pub fn values(&self) -> PsiDerivs<f64> {
        let v = |c: &Cx<Jet<N>>| Cx::new(c.re.value(), c.im.value());
        PsiDerivs {
            psi: v(&self.psi),
            grad: self.grad.each_ref().map(v),
            hess: self.hess.each_ref().map(|row| row.each_ref().map(v)),
            dt: v(&self.dt),
        }
    }
}

/// Pointwise polar bundle. For `T = f64` the entries are numbers; for jets they
/// carry their own Taylor expansions (one order lower per derivative taken).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PolarJet<T> {
    pub rho: T,
    pub grad_rho: [T; 3],
    pub lap_rho: T,
    pub dt_rho: T,
    pub grad_s: [T; 3],
    pub dt_s: T,
    /// `∇·(ρ∇S)`.
    pub div_rho_grad_s: T,
    pub hess_s: Option<[[T; 3]; 3]>,
}

impl<T: Scalar> PolarJet<T> {
    pub fn hess_s_available(&self) -> bool {
        self.hess_s.is_some()
    }

    /// `∇²S`, from the Hessian when present, else from `∇·(ρ∇S)`.
    pub fn lap_s(&self) -> T {
        match &self.hess_s {
            Some(h) => h[0][0] + h[1][1] + h[2][2],
            None => {
                let g = &self.grad_s;
                let gr = &self.grad_rho;
                (self.div_rho_grad_s - (g[0] * gr[0] + g[1] * gr[1] + g[2] * gr[2])) / self.rho
            }
        }
    }
}

/// `conj(a)·b`.
fn cmul_conj<T: Scalar>(a: &Cx<T>, b: &Cx<T>) -> Cx<T> {
    Cx::new(a.re * b.re + a.im * b.im, a.re * b.im - a.im * b.re)
}

/// `ρ = |Ψ|²`, `∇ρ = 2Re(Ψ*∇Ψ)`, `∇²ρ = 2Re(Ψ*∇²Ψ) + 2|∇Ψ|²`,
/// `∇S = Im(Ψ*∇Ψ)/ρ`, `∂S = Im(Ψ*∂Ψ)/ρ`, `∇·(ρ∇S) = Im(Ψ*∇²Ψ)`,
/// `ρ∂ᵢ∂ⱼS = Im(Ψ*∂ᵢ∂ⱼΨ) + Im(∂ⱼΨ*∂ᵢΨ) − ∂ᵢS ∂ⱼρ`.
///
/// No node check: callers guard `ρ` first.
pub fn polar_from_psi<T: Scalar>(d: &PsiDerivs<T>) -> PolarJet<T> {
    let psi = &d.psi;
    let rho = psi.norm_sqr();
    let inv = rho.recip();
    let pg = d.grad.each_ref().map(|g| cmul_conj(psi, g));
    let lap = d.lap();
    let pl = cmul_conj(psi, &lap);
    let grad_sq = d.grad.iter().fold(T::cst(0.0), |a, g| a + g.norm_sqr());
    let pt = cmul_conj(psi, &d.dt);
    let grad_rho = pg.each_ref().map(|c| c.re * 2.0);
    let grad_s = pg.each_ref().map(|c| c.im * inv);
    let hess = [0, 1, 2].map(|i| {
        [0, 1, 2].map(|j| {
            let a = cmul_conj(psi, &d.hess[i][j]).im;
            let b = cmul_conj(&d.grad[j], &d.grad[i]).im;
            (a + b - grad_s[i] * grad_rho[j]) * inv
        })
    });
    PolarJet {
        rho,
        grad_rho,
        lap_rho: pl.re * 2.0 + grad_sq * 2.0,
        dt_rho: pt.re * 2.0,
        grad_s,
        dt_s: pt.im * inv,
        div_rho_grad_s: pl.im,
        hess_s: Some(hess),
    }
}
