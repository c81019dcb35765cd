//! Everything the residual suites need at one space-time point, obtained by
//! one of two independent routes:
//!
//! * [`Route::Jets`]: order-4 Taylor jets of `Ψ`; every derivative of every
//!   field is exact up to rounding.
//! * [`Route::FiniteDifference`]: fields from a [`PolarJet`] at each stencil
//!   point, differentiated once by fourth-order central differences.

use crate::analytic_states::{
    polar_from_psi, polar_jet_with, JetMethod, PolarJet, PsiDerivs, QuantumState, NODE_EPS_ABS,
};
use crate::error::{QflowError, Result};
use crate::field_engine::{div_u, div_v, field_point, FieldPoint};
use crate::numerics::jet::{T, X, Y, Z};
use crate::numerics::{Cx, Jet4, Scalar};
use crate::units::{ZETA, ZETA0};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Route {
    Jets,
    /// Base polar jets by `method`, one finite-difference layer on top.
    FiniteDifference { method: JetMethod, h0: f64, h0_second: f64, dt: f64 },
}

impl Route {
    /// FD layer over analytic polar jets with the default steps.
    pub const FD: Route = Route::FiniteDifference {
        method: JetMethod::Analytic,
        h0: crate::numerics::fd::H0_ORDER4,
        h0_second: crate::numerics::fd::H0_SECOND_ORDER4,
        dt: crate::numerics::fd::DT_DEFAULT,
    };

    /// Polar jets themselves by finite differences of `Ψ`; the suites that are
    /// algebraic in the jet then run on purely numerical derivatives.
    pub const FD_JETS: Route = Route::FiniteDifference {
        method: JetMethod::FD,
        h0: crate::numerics::fd::H0_ORDER4,
        h0_second: crate::numerics::fd::H0_SECOND_ORDER4,
        dt: crate::numerics::fd::DT_DEFAULT,
    };

    pub fn is_numerical(&self) -> bool {
        matches!(self, Route::FiniteDifference { .. })
    }

    pub fn jet_method(&self) -> JetMethod {
        match self {
            Route::Jets => JetMethod::Analytic,
            Route::FiniteDifference { method, .. } => *method,
        }
    }
}

/// Pointwise values and derivatives of the fluid fields.
#[derive(Clone, Copy, Debug)]
pub struct LocalFlow {
    pub x: [f64; 3],
    pub weight: f64,
    pub rho: f64,
    pub grad_rho: [f64; 3],
    pub dt_rho: f64,
    pub fp: FieldPoint<f64>,
    /// `U` and `∇U`.
    pub u_pot: f64,
    pub grad_u_pot: [f64; 3],
    pub div_u: f64,
    pub div_v: f64,
    /// `∇·(ρ∇S)` from `Im(Ψ*∇²Ψ)`.
    pub div_rho_grad_s: f64,
    /// `∇·j` by differentiating `j = ρv`.
    pub div_j: f64,
    /// `∇·(ρu)` by differentiating `ρu`.
    pub div_rho_u: f64,
    pub re_psi_dt_psi: f64,
    /// `Ψ*ĤΨ`.
    pub psi_h_psi: Complex64,
    /// `Re ∇·(Ψ*P̂Ψ)`.
    pub re_div_psi_p_psi: f64,
    pub dt_v: [f64; 3],
    pub dt_u: [f64; 3],
    pub dt_rho_u: [f64; 3],
    pub dt_p_first: f64,
    pub dt_theta: f64,
    pub grad_e: [f64; 3],
    pub grad_f: [f64; 3],
    pub grad_p_first: [f64; 3],
    pub grad_p_second: [f64; 3],
    pub grad_u2: [f64; 3],
    pub grad_v2: [f64; 3],
    pub grad_w2: [f64; 3],
    pub grad_div_v: [f64; 3],
    /// `∇(η∇·v)`.
    pub grad_eta_div_v: [f64; 3],
    /// `∇(∇·(ρv))`.
    pub grad_div_rho_v: [f64; 3],
    pub lap_p_second: f64,
}

fn dot<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cmul_conj<S: Scalar>(a: &Cx<S>, b: &Cx<S>) -> Cx<S> {
    Cx::new(a.re * b.re + a.im * b.im, a.re * b.im - a.im * b.re)
}

pub fn local_flow(state: &QuantumState, x: [f64; 3], t: f64, route: Route, rho_floor: f64) -> Result<LocalFlow> {
    match route {
        Route::Jets => local_jets(state, x, t, rho_floor),
        Route::FiniteDifference {
            method,
            h0,
            h0_second,
            dt,
        } => local_fd(state, x, t, method, h0, h0_second, dt, rho_floor),
    }
}

fn local_jets(state: &QuantumState, x: [f64; 3], t: f64, rho_floor: f64) -> Result<LocalFlow> {
    let psi = state.psi_taylor::<70>(x, t)?;
    let rho0 = psi.norm_sqr().value();
    if !(rho0 >= rho_floor.max(NODE_EPS_ABS)) {
        return Err(QflowError::Node { x, rho: rho0 });
    }
    let d = PsiDerivs::from_taylor(psi);
    let pj: PolarJet<Jet4> = polar_from_psi(&d);
    let fp = field_point(&pj);
    let g = |f: &Jet4| [f.d(X).value(), f.d(Y).value(), f.d(Z).value()];
    let div = |v: &[Jet4; 3]| v[0].d(X).value() + v[1].d(Y).value() + v[2].d(Z).value();
    let tv = |v: &[Jet4; 3]| v.each_ref().map(|c| c.d(T).value());
    let dv = div_v(&pj);
    let rho_u = fp.u.map(|c| c * pj.rho);
    let values = d.values();
    let psi0 = values.psi.to_c64();
    let pot = state.potential();
    let u_pot = pot.eval(&x);
    let psi_h_psi = psi0.conj() * values.lap().to_c64() * -0.5 + psi0.norm_sqr() * u_pot;
    let im_grad = d.grad.each_ref().map(|gi| cmul_conj(&d.psi, gi).im);
    Ok(LocalFlow {
        x,
        weight: 1.0,
        rho: rho0,
        grad_rho: pj.grad_rho.map(|c| c.value()),
        dt_rho: pj.dt_rho.value(),
        fp: to_values(&fp),
        u_pot,
        grad_u_pot: pot.grad(&x),
        div_u: div_u(&pj).value(),
        div_v: dv.value(),
        div_rho_grad_s: pj.div_rho_grad_s.value(),
        div_j: div(&fp.j),
        div_rho_u: div(&rho_u),
        re_psi_dt_psi: (psi0.conj() * values.dt.to_c64()).re,
        psi_h_psi,
        re_div_psi_p_psi: div(&im_grad),
        dt_v: tv(&fp.v),
        dt_u: tv(&fp.u),
        dt_rho_u: tv(&rho_u),
        dt_p_first: fp.p_first.d(T).value(),
        dt_theta: fp.theta.d(T).value(),
        grad_e: g(&fp.e),
        grad_f: g(&fp.f),
        grad_p_first: g(&fp.p_first),
        grad_p_second: g(&fp.p_second),
        grad_u2: g(&dot(&fp.u, &fp.u)),
        grad_v2: g(&dot(&fp.v, &fp.v)),
        grad_w2: g(&dot(&fp.w, &fp.w)),
        grad_div_v: g(&dv),
        grad_eta_div_v: g(&(fp.eta * dv)),
        grad_div_rho_v: g(&pj.div_rho_grad_s),
        lap_p_second: {
            let p = &fp.p_second;
            p.d(X).d(X).value() + p.d(Y).d(Y).value() + p.d(Z).d(Z).value()
        },
    })
}

fn to_values(fp: &FieldPoint<Jet4>) -> FieldPoint<f64> {
    let v3 = |a: &[Jet4; 3]| a.each_ref().map(|c| c.value());
    FieldPoint {
        v: v3(&fp.v),
        u: v3(&fp.u),
        w: v3(&fp.w),
        p_first: fp.p_first.value(),
        p_second: fp.p_second.value(),
        e: fp.e.value(),
        f: fp.f.value(),
        ebar: fp.ebar.value(),
        q: fp.q.value(),
        theta: fp.theta.value(),
        eta: fp.eta.value(),
        ke_u: fp.ke_u.value(),
        ke_v: fp.ke_v.value(),
        j: v3(&fp.j),
    }
}

/// Quantities sampled at stencil points.
#[derive(Clone, Copy)]
struct Probe {
    pj: PolarJet<f64>,
    fp: FieldPoint<f64>,
    div_v: f64,
    psi: Complex64,
}

impl Probe {
    const NS: usize = 9;
    const NV: usize = 5;

    /// `E, F, P, p, u², v², w², ∇·v, η∇·v` then `∇·(ρ∇S)`.
    fn scalars(&self) -> [f64; Self::NS + 1] {
        let f = &self.fp;
        [
            f.e,
            f.f,
            f.p_first,
            f.p_second,
            dot(&f.u, &f.u),
            dot(&f.v, &f.v),
            dot(&f.w, &f.w),
            self.div_v,
            f.eta * self.div_v,
            self.pj.div_rho_grad_s,
        ]
    }

    /// `v, u, ρu, j, Im(Ψ*∇Ψ)`.
    fn vectors(&self) -> [[f64; 3]; Self::NV] {
        let f = &self.fp;
        let rho = self.pj.rho;
        [f.v, f.u, f.u.map(|c| c * rho), f.j, self.pj.grad_s.map(|c| c * rho)]
    }
}

#[allow(clippy::too_many_arguments)]
fn local_fd(
    state: &QuantumState,
    x: [f64; 3],
    t: f64,
    method: JetMethod,
    h0: f64,
    h0_second: f64,
    dt: f64,
    rho_floor: f64,
) -> Result<LocalFlow> {
    let probe = |y: [f64; 3], s: f64| -> Result<Probe> {
        let pj = polar_jet_with(state, y, s, method, rho_floor)?;
        Ok(Probe {
            pj,
            fp: field_point(&pj),
            div_v: div_v(&pj),
            psi: state.psi(y, s)?.to_c64(),
        })
    };
    let centre = probe(x, t)?;
    let stencil = |e: QflowError| match e {
        QflowError::Node { .. } | QflowError::CoulombSingularity => QflowError::Stencil { x },
        other => other,
    };
    let shift = |axis: usize, d: f64| {
        let mut y = x;
        y[axis] += d;
        y
    };
    let h = crate::numerics::fd::step(&x, h0);
    let h2 = crate::numerics::fd::step(&x, h0_second);
    // d1[axis] = (f(+2h), f(+h), f(−h), f(−2h))
    let mut d1 = Vec::with_capacity(3);
    let mut d2 = Vec::with_capacity(3);
    for axis in 0..3 {
        let p: Vec<Probe> = [2.0, 1.0, -1.0, -2.0]
            .iter()
            .map(|k| probe(shift(axis, k * h), t))
            .collect::<Result<_>>()
            .map_err(stencil)?;
        d1.push(p);
        let q: Vec<Probe> = [2.0, 1.0, -1.0, -2.0]
            .iter()
            .map(|k| probe(shift(axis, k * h2), t))
            .collect::<Result<_>>()
            .map_err(stencil)?;
        d2.push(q);
    }
    let tp: Vec<Probe> = [2.0, 1.0, -1.0, -2.0]
        .iter()
        .map(|k| probe(x, t + k * dt))
        .collect::<Result<_>>()
        .map_err(stencil)?;
    let first = |a: f64, b: f64, c: f64, d: f64, step: f64| (-a + 8.0 * b - 8.0 * c + d) / (12.0 * step);
    let second = |a: f64, b: f64, c: f64, d: f64, o: f64, step: f64| {
        (-a + 16.0 * b - 30.0 * o + 16.0 * c - d) / (12.0 * step * step)
    };
    // Spatial gradients of the scalars and divergences of the vectors.
    let mut gs = [[0.0; 3]; Probe::NS + 1];
    let mut divs = [0.0; Probe::NV];
    let mut lap_p = 0.0;
    let c_s = centre.scalars();
    for axis in 0..3 {
        let s: Vec<_> = d1[axis].iter().map(|p| p.scalars()).collect();
        let v: Vec<_> = d1[axis].iter().map(|p| p.vectors()).collect();
        for k in 0..=Probe::NS {
            gs[k][axis] = first(s[0][k], s[1][k], s[2][k], s[3][k], h);
        }
        for k in 0..Probe::NV {
            divs[k] += first(v[0][k][axis], v[1][k][axis], v[2][k][axis], v[3][k][axis], h);
        }
        let s2: Vec<_> = d2[axis].iter().map(|p| p.scalars()).collect();
        lap_p += second(s2[0][3], s2[1][3], s2[2][3], s2[3][3], c_s[3], h2);
    }
    let ts: Vec<_> = tp.iter().map(|p| p.scalars()).collect();
    let tv: Vec<_> = tp.iter().map(|p| p.vectors()).collect();
    let tvec = |k: usize| [0, 1, 2].map(|i| first(tv[0][k][i], tv[1][k][i], tv[2][k][i], tv[3][k][i], dt));
    let tpsi = first(tp[0].psi.re, tp[1].psi.re, tp[2].psi.re, tp[3].psi.re, dt);
    let tpsi_im = first(tp[0].psi.im, tp[1].psi.im, tp[2].psi.im, tp[3].psi.im, dt);
    let trho = |p: &Probe| p.pj.rho;
    let dt_rho = first(trho(&tp[0]), trho(&tp[1]), trho(&tp[2]), trho(&tp[3]), dt);
    let theta = |p: &Probe| p.fp.theta;
    // Laplacian of Ψ on the second-derivative stencil.
    let mut lap_psi = Complex64::new(0.0, 0.0);
    for q in &d2 {
        lap_psi += (-q[0].psi + q[1].psi * 16.0 - centre.psi * 30.0 + q[2].psi * 16.0 - q[3].psi) / (12.0 * h2 * h2);
    }
    let pot = state.potential();
    let u_pot = pot.eval(&x);
    let psi0 = centre.psi;
    let pj = &centre.pj;
    let rho = pj.rho;
    let _ = (ZETA, ZETA0);
    Ok(LocalFlow {
        x,
        weight: 1.0,
        rho,
        grad_rho: pj.grad_rho,
        dt_rho,
        fp: centre.fp,
        u_pot,
        grad_u_pot: pot.grad(&x),
        div_u: div_u(pj),
        div_v: centre.div_v,
        div_rho_grad_s: pj.div_rho_grad_s,
        div_j: divs[3],
        div_rho_u: divs[2],
        re_psi_dt_psi: (psi0.conj() * Complex64::new(tpsi, tpsi_im)).re,
        psi_h_psi: psi0.conj() * lap_psi * -0.5 + psi0.norm_sqr() * u_pot,
        re_div_psi_p_psi: divs[4],
        dt_v: tvec(0),
        dt_u: tvec(1),
        dt_rho_u: tvec(2),
        dt_p_first: first(ts[0][2], ts[1][2], ts[2][2], ts[3][2], dt),
        dt_theta: first(theta(&tp[0]), theta(&tp[1]), theta(&tp[2]), theta(&tp[3]), dt),
        grad_e: gs[0],
        grad_f: gs[1],
        grad_p_first: gs[2],
        grad_p_second: gs[3],
        grad_u2: gs[4],
        grad_v2: gs[5],
        grad_w2: gs[6],
        grad_div_v: gs[7],
        grad_eta_div_v: gs[8],
        grad_div_rho_v: gs[9],
        lap_p_second: lap_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close3(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    /// The two routes agree to finite-difference accuracy.
    #[test]
    fn routes_agree() {
        for s in ["super:1s+2p0", "hydrogen:2p1", "coherent:1+0.5i", "super:2s+3d1"] {
            let st = QuantumState::parse(s).unwrap();
            let x = [0.6, -0.9, 1.3];
            let a = local_flow(&st, x, 0.8, Route::Jets, 0.0).unwrap();
            let b = local_flow(&st, x, 0.8, Route::FD, 0.0).unwrap();
            let sc = a.rho.max(1e-3);
            assert!(close3(a.dt_v, b.dt_v, 1e-7), "{s}");
            assert!(close3(a.dt_rho_u, b.dt_rho_u, 1e-7 * sc), "{s}");
            assert!(close3(a.grad_p_first, b.grad_p_first, 1e-7 * sc), "{s}");
            assert!(close3(a.grad_eta_div_v, b.grad_eta_div_v, 1e-7 * sc), "{s}");
            assert!(close3(a.grad_div_rho_v, b.grad_div_rho_v, 1e-7 * sc), "{s}");
            assert!((a.lap_p_second - b.lap_p_second).abs() < 1e-6 * sc, "{s}");
            assert!((a.div_j - b.div_j).abs() < 1e-8 * sc, "{s}");
            assert!((a.re_div_psi_p_psi - b.re_div_psi_p_psi).abs() < 1e-8 * sc, "{s}");
            assert!((a.psi_h_psi - b.psi_h_psi).norm() < 1e-7 * sc, "{s}");
            assert!((a.dt_theta - b.dt_theta).abs() < 1e-7, "{s}");
        }
    }
}
