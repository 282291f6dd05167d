//! Central finite differences with one level of Richardson extrapolation.
//!
//! For a smooth `f`, `D(h) = (f(p + h eᵢ) − f(p − h eᵢ)) / 2h` has error
//! `O(h²)`; `(4 D(h/2) − D(h)) / 3` cancels the leading term, leaving `O(h⁴)`.
//! The same combination is used for second derivatives.

use crate::{Mat4, Point, Result, Vec4};

fn shifted(p: &Point, axis: usize, h: f64) -> Point {
    let mut v = p.to_vec();
    v[axis] += h;
    Point::from_vec(&v)
}

fn shifted2(p: &Point, a: usize, ha: f64, b: usize, hb: f64) -> Point {
    let mut v = p.to_vec();
    v[a] += ha;
    v[b] += hb;
    Point::from_vec(&v)
}

fn central<F>(f: &F, p: &Point, axis: usize, h: f64) -> Result<Mat4>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    let plus = f(&shifted(p, axis, h))?;
    let minus = f(&shifted(p, axis, -h))?;
    Ok((plus - minus) / (2.0 * h))
}

fn second<F>(f: &F, p: &Point, a: usize, b: usize, h: f64, center: &Mat4) -> Result<Mat4>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    if a == b {
        let plus = f(&shifted(p, a, h))?;
        let minus = f(&shifted(p, a, -h))?;
        Ok((plus - center * 2.0 + minus) / (h * h))
    } else {
        let pp = f(&shifted2(p, a, h, b, h))?;
        let pm = f(&shifted2(p, a, h, b, -h))?;
        let mp = f(&shifted2(p, a, -h, b, h))?;
        let mm = f(&shifted2(p, a, -h, b, -h))?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    }
}

/// `∂f/∂xᵃˣⁱˢ` at `p`, Richardson-extrapolated from steps `h` and `h/2`.
pub fn derivative<F>(f: &F, p: &Point, axis: usize, h: f64) -> Result<Mat4>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    let coarse = central(f, p, axis, h)?;
    let fine = central(f, p, axis, h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// All four partial derivatives `[∂ₜf, ∂ₓf, ∂ᵧf, ∂𝓏f]`.
pub fn gradient<F>(f: &F, p: &Point, h: f64) -> Result<[Mat4; 4]>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    Ok([
        derivative(f, p, 0, h)?,
        derivative(f, p, 1, h)?,
        derivative(f, p, 2, h)?,
        derivative(f, p, 3, h)?,
    ])
}

/// Symmetric table of second partials `∂ₐ∂_b f`, Richardson-extrapolated.
pub fn hessian<F>(f: &F, p: &Point, h: f64) -> Result<[[Mat4; 4]; 4]>
where
    F: Fn(&Point) -> Result<Mat4>,
{
    let center = f(p)?;
    let mut out = [[Mat4::zeros(); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let coarse = second(f, p, a, b, h, &center)?;
            let fine = second(f, p, a, b, h / 2.0, &center)?;
            let d = (fine * 4.0 - coarse) / 3.0;
            out[a][b] = d;
            out[b][a] = d;
        }
    }
    Ok(out)
}

/// Scalar-valued convenience wrapper around [`derivative`].
pub fn derivative_scalar<F>(f: &F, p: &Point, axis: usize, h: f64) -> Result<f64>
where
    F: Fn(&Point) -> Result<f64>,
{
    let g = |q: &Point| f(q).map(Mat4::from_element);
    Ok(derivative(&g, p, axis, h)?[(0, 0)])
}

/// Directional derivative of a vector-valued function along `dir`.
pub fn directional_vec<F>(f: &F, p: &Point, dir: &Vec4, h: f64) -> Result<Vec4>
where
    F: Fn(&Point) -> Result<Vec4>,
{
    let eval = |s: f64| f(&Point::from_vec(&(p.to_vec() + dir * s)));
    let d = |h: f64| -> Result<Vec4> { Ok((eval(h)? - eval(-h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartic() {
        // Richardson-extrapolated central differences are exact up to degree 4.
        let f = |p: &Point| Ok(Mat4::from_element(p.t.powi(4) + p.x * p.t.powi(3)));
        let p = Point::new(0.7, -1.3, 0.0, 0.0);
        let d = derivative(&f, &p, 0, 1e-2).unwrap()[(0, 0)];
        let exact = 4.0 * 0.7_f64.powi(3) + 3.0 * (-1.3) * 0.7_f64.powi(2);
        assert!((d - exact).abs() < 1e-10, "{d} vs {exact}");

        let h = hessian(&f, &p, 1e-2).unwrap();
        let dtt = 12.0 * 0.49 + 6.0 * (-1.3) * 0.7;
        let dtx = 3.0 * 0.49;
        assert!((h[0][0][(0, 0)] - dtt).abs() < 1e-8);
        assert!((h[0][1][(0, 0)] - dtx).abs() < 1e-8);
        assert!(h[2][3][(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn exponential_accuracy() {
        let f = |p: &Point| Ok(Mat4::from_element((4.0 * p.t).exp()));
        let p = Point::new(1.5, 0.0, 0.0, 0.0);
        let d = derivative(&f, &p, 0, 1e-4).unwrap()[(0, 0)];
        let exact = 4.0 * 6.0_f64.exp();
        assert!(((d - exact) / exact).abs() < 1e-10);
    }
}
