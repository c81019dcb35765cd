use crate::error::{QflowError, Result};

/// Brent's method on a sign-changing bracket. Returns once the bracket is
/// narrower than `tol` or `g` vanishes exactly.
pub fn find_root<G>(g: G, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(QflowError::NoBracket { a, b });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let outside = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < tol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < tol
        };
        if outside || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = g(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// First sub-interval of `[a, b]` (split into `n` equal pieces) on which `g`
/// changes sign.
pub fn scan_bracket<G>(g: &G, a: f64, b: f64, n: usize) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut g0 = g(x0);
    for k in 1..=n {
        let x1 = a + h * k as f64;
        let g1 = g(x1);
        if g0 == 0.0 || g0 * g1 < 0.0 {
            return Ok((x0, x1));
        }
        x0 = x1;
        g0 = g1;
    }
    Err(QflowError::NoBracket { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pressure_force_crossover_quadratic() {
        let r = find_root(|r| r.powi(-2) + 2.0 / r - 2.0, (1.0, 2.0), 1e-12).unwrap();
        assert!((r - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn bohr_orbit_balance() {
        let r = find_root(|r| 2.0 / r - 2.0 + 1.0 / r, (1.0, 2.0), 1e-12).unwrap();
        assert!((r - 1.5).abs() < 1e-9);
    }

    #[test]
    fn identity_root_and_missing_bracket() {
        assert!(find_root(|x| x, (-1.0, 1.0), 1e-12).unwrap().abs() < 1e-12);
        assert!(matches!(
            find_root(|x| x * x + 1.0, (-1.0, 1.0), 1e-12),
            Err(QflowError::NoBracket { .. })
        ));
    }

    #[test]
    fn scan_finds_first_sign_change() {
        let (a, b) = scan_bracket(&|x: f64| (x - 0.37) * (x - 2.0), 0.0, 3.0, 30).unwrap();
        assert!(a <= 0.37 && 0.37 <= b);
    }
}
