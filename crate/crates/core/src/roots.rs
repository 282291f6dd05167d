//! Roots of `x³ − m x² + n x − 1` and the `Sol⁴ₘ,ₙ` degeneracy classes.
//!
//! For `m, n > 0` the cubic is negative on `(−∞, 0]`, so every real root is
//! positive and the product of the roots is 1. The critical points
//! `x± = (m ± √(m² − 3n)) / 3` split the positive axis into monotone pieces;
//! each piece with a sign change holds exactly one root, found by bisection
//! and finished with a Newton step.

use num_complex::Complex64;
use serde::Serialize;

/// Roots closer than this are treated as a double root.
pub const DOUBLE_ROOT_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum RootClassification {
    /// Three distinct positive roots `eᵃ < eᵇ < eᶜ`; stores the logarithms.
    ThreeDistinct { a: f64, b: f64, c: f64 },
    /// Two roots coincide; the space is `Sol⁴₀` up to isomorphism.
    DoubleRoot { roots: [f64; 3] },
    /// `m = n`: 1 is a root and the space is the product `Sol³ × ℝ`.
    /// `roots` holds all three roots when they are real.
    ProductCase { roots: Option<[f64; 3]> },
    /// Complex roots or non-positive parameters. `roots` holds the complex
    /// roots when the parameters were positive.
    Invalid {
        reason: String,
        roots: Vec<Complex64>,
    },
}

impl RootClassification {
    /// `(eᵃ, eᵇ, eᶜ)` for the three-distinct case.
    pub fn real_roots(&self) -> Option<[f64; 3]> {
        match self {
            RootClassification::ThreeDistinct { a, b, c } => Some([a.exp(), b.exp(), c.exp()]),
            RootClassification::DoubleRoot { roots } => Some(*roots),
            RootClassification::ProductCase { roots } => *roots,
            RootClassification::Invalid { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RootClassification::ThreeDistinct { .. } => "ThreeDistinct",
            RootClassification::DoubleRoot { .. } => "DoubleRoot",
            RootClassification::ProductCase { .. } => "ProductCase",
            RootClassification::Invalid { .. } => "Invalid",
        }
    }
}

fn cubic(m: f64, n: f64, x: f64) -> f64 {
    ((x - m) * x + n) * x - 1.0
}

fn cubic_prime(m: f64, n: f64, x: f64) -> f64 {
    (3.0 * x - 2.0 * m) * x + n
}

/// Bisection on a bracket where `f(lo) ≤ 0 ≤ f(hi)` or the reverse, then
/// one Newton polish step kept only if it lowers `|f|`.
fn refine(m: f64, n: f64, mut lo: f64, mut hi: f64) -> f64 {
    let rising = cubic(m, n, lo) < cubic(m, n, hi);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * mid.abs().max(1e-300) || mid <= lo || mid >= hi {
            break;
        }
        let f = cubic(m, n, mid);
        if f == 0.0 {
            return mid;
        }
        if (f < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let d = cubic_prime(m, n, x);
    if d != 0.0 {
        let polished = x - cubic(m, n, x) / d;
        if cubic(m, n, polished).abs() < cubic(m, n, x).abs() {
            return polished;
        }
    }
    x
}

/// Upper bound on the positive roots (Cauchy).
fn upper_bound(m: f64, n: f64) -> f64 {
    1.0 + m.max(n).max(1.0)
}

/// Half-width of the root pair near a critical point `xc` where the cubic
/// nearly touches zero: `f(xc) + ½ f''(xc) δ² = 0`.
fn pair_half_gap(m: f64, n: f64, xc: f64) -> f64 {
    let curvature = (6.0 * xc - 2.0 * m).abs();
    if curvature == 0.0 {
        return f64::INFINITY;
    }
    (2.0 * cubic(m, n, xc).abs() / curvature).sqrt()
}

/// The cubic touches zero at the critical point `xc`: either the would-be
/// root pair is tighter than [`DOUBLE_ROOT_GAP`], or `f(xc)` is below the
/// rounding error of evaluating the cubic there (a double root can only be
/// resolved to about `√ε`).
fn tangent_at(m: f64, n: f64, xc: f64) -> bool {
    let scale = xc * xc * xc + m * xc * xc + n * xc + 1.0;
    pair_half_gap(m, n, xc) * 2.0 < DOUBLE_ROOT_GAP
        || cubic(m, n, xc).abs() <= 64.0 * f64::EPSILON * scale
}

/// Classifies the roots of `x³ − m x² + n x − 1`.
pub fn solve_roots(m: f64, n: f64) -> RootClassification {
    if !(m.is_finite() && n.is_finite() && m > 0.0 && n > 0.0) {
        return RootClassification::Invalid {
            reason: format!("m and n must be positive and finite, got ({m}, {n})"),
            roots: Vec::new(),
        };
    }
    let real = real_roots_sorted(m, n);
    if (m - n).abs() <= 1e-12 * m.max(n) {
        return RootClassification::ProductCase {
            roots: match real {
                RealRoots::Three(r) | RealRoots::Double(r) => Some(r),
                RealRoots::One(_) => None,
            },
        };
    }
    match real {
        RealRoots::Three(r) => {
            if r[1] - r[0] < DOUBLE_ROOT_GAP || r[2] - r[1] < DOUBLE_ROOT_GAP {
                RootClassification::DoubleRoot { roots: r }
            } else {
                RootClassification::ThreeDistinct {
                    a: r[0].ln(),
                    b: r[1].ln(),
                    c: r[2].ln(),
                }
            }
        }
        RealRoots::Double(r) => RootClassification::DoubleRoot { roots: r },
        RealRoots::One(_) => RootClassification::Invalid {
            reason: "the cubic has a pair of complex roots".into(),
            roots: cubic_roots(m, n).to_vec(),
        },
    }
}

enum RealRoots {
    Three([f64; 3]),
    /// A tangency within [`DOUBLE_ROOT_GAP`]; the double root is repeated.
    Double([f64; 3]),
    One(f64),
}

fn real_roots_sorted(m: f64, n: f64) -> RealRoots {
    let upper = upper_bound(m, n);
    let disc = m * m - 3.0 * n;
    if disc <= 0.0 {
        // Monotone (or a single inflection tangency): one real root.
        let r = refine(m, n, 0.0, upper);
        let xc = m / 3.0;
        if disc == 0.0 && cubic(m, n, xc).abs() < 1e-15 {
            return RealRoots::Double([xc, xc, xc]);
        }
        return RealRoots::One(r);
    }
    let s = disc.sqrt();
    // Cancellation-free pair: x_lo * x_hi = n / 3.
    let x_hi = (m + s) / 3.0;
    let x_lo = (n / 3.0) / x_hi;
    let f_lo = cubic(m, n, x_lo); // local max
    let f_hi = cubic(m, n, x_hi); // local min
    let (tan_lo, tan_hi) = (tangent_at(m, n, x_lo), tangent_at(m, n, x_hi));
    if f_lo > 0.0 && f_hi < 0.0 && !tan_lo && !tan_hi {
        let r0 = refine(m, n, 0.0, x_lo);
        let r1 = refine(m, n, x_lo, x_hi);
        let r2 = refine(m, n, x_hi, upper);
        return RealRoots::Three([r0, r1, r2]);
    }
    // One sign change, or a pair too close to separate.
    if tan_lo {
        let r = refine(m, n, x_hi, upper);
        return RealRoots::Double([x_lo, x_lo, r]);
    }
    if tan_hi {
        let r = refine(m, n, 0.0, x_lo);
        return RealRoots::Double([r, x_hi, x_hi]);
    }
    let r = if f_lo > 0.0 {
        refine(m, n, 0.0, x_lo)
    } else {
        refine(m, n, x_hi, upper)
    };
    RealRoots::One(r)
}

/// All three roots in the complex plane, each Newton-polished on the full
/// cubic. Real roots come first in ascending order.
pub fn cubic_roots(m: f64, n: f64) -> [Complex64; 3] {
    match real_roots_sorted(m, n) {
        RealRoots::Three(r) | RealRoots::Double(r) => r.map(|x| Complex64::new(x, 0.0)),
        RealRoots::One(r) => {
            // Deflate: x³ − m x² + n x − 1 = (x − r)(x² − (m − r) x + 1/r).
            let p = m - r;
            let q = 1.0 / r;
            let half = Complex64::new(p / 2.0, 0.0);
            let disc = Complex64::new(p * p / 4.0 - q, 0.0).sqrt();
            let polish = |mut z: Complex64| {
                for _ in 0..3 {
                    let f = ((z - m) * z + n) * z - 1.0;
                    let d = (z * 3.0 - 2.0 * m) * z + n;
                    if d.norm() == 0.0 {
                        break;
                    }
                    let next = z - f / d;
                    let fn_ = ((next - m) * next + n) * next - 1.0;
                    if fn_.norm() >= f.norm() {
                        break;
                    }
                    z = next;
                }
                z
            };
            let mut z1 = polish(half - disc);
            let mut z2 = polish(half + disc);
            if z1.im > z2.im {
                std::mem::swap(&mut z1, &mut z2);
            }
            [Complex64::new(r, 0.0), z1, z2]
        }
    }
}

/// Vieta residuals `|λ₁λ₂λ₃ − 1|`, `|λ₁+λ₂+λ₃ − m|`,
/// `|λ₁λ₂ + λ₁λ₃ + λ₂λ₃ − n|`.
pub fn vieta_residuals(m: f64, n: f64, roots: &[Complex64; 3]) -> [f64; 3] {
    let [l1, l2, l3] = *roots;
    [
        (l1 * l2 * l3 - 1.0).norm(),
        (l1 + l2 + l3 - m).norm(),
        (l1 * l2 + l1 * l3 + l2 * l3 - n).norm(),
    ]
}

/// `(m, n)` whose cubic has roots `eᵃ, eᵇ, eᶜ` with `c = −a − b`.
pub fn params_from_exponents(a: f64, b: f64) -> (f64, f64) {
    let c = -a - b;
    let m = a.exp() + b.exp() + c.exp();
    let n = (-a).exp() + (-b).exp() + (-c).exp();
    (m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: sign-change bisection on a fixed bracket.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f(hi) > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn five_six_brackets() {
        let f = |x: f64| x * x * x - 5.0 * x * x + 6.0 * x - 1.0;
        assert_eq!(f(0.0), -1.0);
        assert!(f(0.2) > 0.0 && f(2.0) < 0.0 && f(4.0) > 0.0);
        let oracle = [
            bisect(f, 0.0, 0.2),
            bisect(f, 1.0, 2.0),
            bisect(f, 3.0, 4.0),
        ];

        let class = solve_roots(5.0, 6.0);
        let RootClassification::ThreeDistinct { a, b, c } = class else {
            panic!("expected three roots, got {class:?}");
        };
        assert!(a < b && b < c);
        assert!((a + b + c).abs() < 1e-12);
        let roots = [a.exp(), b.exp(), c.exp()];
        assert!(roots[0] > 0.0 && roots[0] < 0.2);
        assert!(roots[1] > 1.0 && roots[1] < 2.0);
        assert!(roots[2] > 3.0 && roots[2] < 4.0);
        for (r, o) in roots.iter().zip(oracle) {
            assert!((r - o).abs() < 1e-12 * o.max(1.0));
        }
        let res = vieta_residuals(5.0, 6.0, &cubic_roots(5.0, 6.0));
        assert!(res.iter().all(|r| *r < 1e-11), "{res:?}");
    }

    #[test]
    fn m_equal_n_is_product() {
        for m in [2.0, 3.0, 4.0, 7.5] {
            // 1 − m + m − 1 = 0
            assert_eq!(cubic(m, m, 1.0), 0.0);
            assert!(matches!(
                solve_roots(m, m),
                RootClassification::ProductCase { .. }
            ));
        }
    }

    #[test]
    fn exact_double_root() {
        // roots 2, 2, 1/4: m = 4.25, n = 5
        let class = solve_roots(4.25, 5.0);
        let RootClassification::DoubleRoot { roots } = class else {
            panic!("expected a double root, got {class:?}");
        };
        assert!((roots[0] - 0.25).abs() < 1e-12);
        assert!((roots[1] - 2.0).abs() < 1e-7 && (roots[2] - 2.0).abs() < 1e-7);
    }

    #[test]
    fn near_double_root() {
        // roots λ, λ, 1/λ² with a non-representable λ
        for lambda in [1.3_f64, 0.7, 2.9] {
            let m = 2.0 * lambda + 1.0 / (lambda * lambda);
            let n = lambda * lambda + 2.0 / lambda;
            let class = solve_roots(m, n);
            assert!(
                matches!(class, RootClassification::DoubleRoot { .. }),
                "λ = {lambda}: {class:?}"
            );
        }
    }

    #[test]
    fn complex_roots_are_invalid_but_satisfy_vieta() {
        for (m, n) in [(6.0, 11.0), (7.0, 13.0), (1.0, 1.0 + 1e-3), (2.0, 5.0)] {
            let class = solve_roots(m, n);
            if m != n {
                assert!(
                    matches!(class, RootClassification::Invalid { .. }),
                    "{class:?}"
                );
            }
            let roots = cubic_roots(m, n);
            let res = vieta_residuals(m, n, &roots);
            assert!(res.iter().all(|r| *r < 1e-11), "({m},{n}): {res:?}");
        }
    }

    #[test]
    fn nonpositive_parameters() {
        assert!(matches!(
            solve_roots(-1.0, 3.0),
            RootClassification::Invalid { .. }
        ));
        assert!(matches!(
            solve_roots(3.0, 0.0),
            RootClassification::Invalid { .. }
        ));
        assert!(matches!(
            solve_roots(f64::NAN, 3.0),
            RootClassification::Invalid { .. }
        ));
    }

    #[test]
    fn exponents_round_trip() {
        let (m, n) = params_from_exponents(-1.1, 0.3);
        let RootClassification::ThreeDistinct { a, b, c } = solve_roots(m, n) else {
            panic!()
        };
        assert!((a + 1.1).abs() < 1e-12);
        assert!((b - 0.3).abs() < 1e-12);
        assert!((c - 0.8).abs() < 1e-12);
    }
}
