//! Closed-form Dirichlet integrals for the foliation building blocks —
//! rectangles, corner rectangles, parallelograms, trapezoids — and the
//! hyperbolic collar formulas, each backed by a quadrature oracle.
//!
//! Each piece carries the explicit defining function v of its foliation; the
//! Dirichlet integral is ∫∫ (∂v/∂x)² + (∂v/∂y)² over the piece.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FoliationPiece {
    /// [a,b] × [c,d], foliated horizontally by v(x,y) = y.
    Rectangle { a: f64, b: f64, c: f64, d: f64 },
    /// [a,b] × [c,d], leaves from top to left side: v = y − ((d−c)/(b−a))x.
    CornerRectangle { a: f64, b: f64, c: f64, d: f64 },
    /// Vertices (0,0), (a,0), (b,c), (b+a,c); sheared by b, v(x,y) = y.
    Parallelogram { a: f64, b: f64, c: f64 },
    /// Vertical bases of lengths a (at x = 0) and a1 ≥ a (at x = d), joined
    /// by the x-axis; leaves are straight lines between the bases.
    Trapezoid { a: f64, a1: f64, d: f64 },
}

impl FoliationPiece {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidPiece(msg.into()));
        match *self {
            FoliationPiece::Rectangle { a, b, c, d }
            | FoliationPiece::CornerRectangle { a, b, c, d } => {
                if !(b > a && d > c) {
                    return bad("rectangle needs b > a and d > c");
                }
            }
            FoliationPiece::Parallelogram { a, c, .. } => {
                if !(a > 0.0 && c > 0.0) {
                    return bad("parallelogram needs a > 0 and c > 0");
                }
            }
            FoliationPiece::Trapezoid { a, a1, d } => {
                if !(a > 0.0 && a1 >= a && d > 0.0) {
                    return bad("trapezoid needs a1 >= a > 0 and d > 0");
                }
            }
        }
        Ok(())
    }

    /// Closed-form Dirichlet integral of the piece's foliation.
    pub fn closed_form(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            FoliationPiece::Rectangle { a, b, c, d } => rect_dirichlet_raw(a, b, c, d),
            FoliationPiece::CornerRectangle { a, b, c, d } => corner_dirichlet_raw(a, b, c, d).0,
            FoliationPiece::Parallelogram { a, c, .. } => a * c,
            FoliationPiece::Trapezoid { a, a1, d } => trapezoid_dirichlet_raw(a, a1, d),
        })
    }
}

fn rect_dirichlet_raw(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b - a) * (d - c)
}

fn corner_dirichlet_raw(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let ratio = (d - c) / (b - a);
    ((1.0 + ratio * ratio) * (d - c) * (b - a), ratio)
}

fn trapezoid_dirichlet_raw(a: f64, a1: f64, d: f64) -> f64 {
    if a1 == a {
        return a * d; // rectangle limit of the closed form
    }
    let log = (a1 / a).ln();
    (a * a * d / (a1 - a)) * log + (a * a * (a1 - a) / (3.0 * d)) * log
}

/// D_R(v) = area(R) = (b−a)(d−c) for the horizontal foliation.
pub fn rect_dirichlet(piece: &FoliationPiece) -> Result<f64> {
    match piece {
        FoliationPiece::Rectangle { .. } => piece.closed_form(),
        _ => Err(Error::InvalidPiece("expected a rectangle".into())),
    }
}

/// D_R(v) = [1 + ((d−c)/(b−a))²] (d−c)(b−a) for the corner foliation, plus
/// the factor by which the transverse measure on the top side scales.
pub fn corner_dirichlet(piece: &FoliationPiece) -> Result<(f64, f64)> {
    match *piece {
        FoliationPiece::CornerRectangle { a, b, c, d } => {
            piece.validate()?;
            Ok(corner_dirichlet_raw(a, b, c, d))
        }
        _ => Err(Error::InvalidPiece("expected a corner rectangle".into())),
    }
}

/// D_Q(v) = area(Q) = a·c, independent of the shear b.
pub fn parallelogram_dirichlet(piece: &FoliationPiece) -> Result<f64> {
    match piece {
        FoliationPiece::Parallelogram { .. } => piece.closed_form(),
        _ => Err(Error::InvalidPiece("expected a parallelogram".into())),
    }
}

/// D_Q(v) = (a²d/(a₁−a)) ln(a₁/a) + (a²(a₁−a)/(3d)) ln(a₁/a); continuous
/// extension a·d at a₁ = a.
pub fn trapezoid_dirichlet(piece: &FoliationPiece) -> Result<f64> {
    match piece {
        FoliationPiece::Trapezoid { .. } => piece.closed_form(),
        _ => Err(Error::InvalidPiece("expected a trapezoid".into())),
    }
}

/// θ_t = arccos(1/cosh t) ∈ [0, π/2): the Euclidean angle a hyperbolic
/// equidistant ray at distance t subtends with the axis.
pub fn collar_angle(t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidInput("collar_angle needs t >= 0".into()));
    }
    Ok((1.0 / t.cosh()).acos())
}

/// Hyperbolic length of the equidistant arc across the collar of core length
/// ℓ: m = ℓ/cos θ_t = ℓ·cosh t (the combined closed form is the numerically
/// stable one for large t).
pub fn strip_length(len: f64, t: f64) -> Result<f64> {
    if len <= 0.0 {
        return Err(Error::InvalidInput("strip_length needs l > 0".into()));
    }
    if t < 0.0 {
        return Err(Error::InvalidInput("strip_length needs t >= 0".into()));
    }
    Ok(len * t.cosh())
}

/// Midpoint quadrature of |∇v|² over the piece against its defining v.
/// Columns are subdivided over the exact inside-interval (the pieces have at
/// most one slanted side), so the error is O(grid_n⁻²).
pub fn quadrature_dirichlet(piece: &FoliationPiece, grid_n: usize) -> Result<f64> {
    if grid_n < 16 {
        return Err(Error::InvalidInput("quadrature needs grid_n >= 16".into()));
    }
    piece.validate()?;
    let n = grid_n;
    match *piece {
        FoliationPiece::Rectangle { a, b, c, d } => {
            // v = y, integrand 1
            let (hx, hy) = ((b - a) / n as f64, (d - c) / n as f64);
            let mut total = 0.0;
            for _i in 0..n {
                for _j in 0..n {
                    total += hx * hy;
                }
            }
            Ok(total)
        }
        FoliationPiece::CornerRectangle { a, b, c, d } => {
            let k = (d - c) / (b - a);
            let integrand = 1.0 + k * k;
            let (hx, hy) = ((b - a) / n as f64, (d - c) / n as f64);
            let mut total = 0.0;
            for _i in 0..n {
                for _j in 0..n {
                    total += integrand * hx * hy;
                }
            }
            Ok(total)
        }
        FoliationPiece::Parallelogram { a, b, c } => {
            // rows y: the inside x-interval is [b·y/c, b·y/c + a]; v = y
            let hy = c / n as f64;
            let mut total = 0.0;
            for j in 0..n {
                let y = (j as f64 + 0.5) * hy;
                let x0 = b * y / c;
                let hx = a / n as f64;
                for i in 0..n {
                    let _x = x0 + (i as f64 + 0.5) * hx;
                    total += hx * hy; // |∇v|² = 1
                }
            }
            Ok(total)
        }
        FoliationPiece::Trapezoid { a, a1, d } => {
            // columns x: inside y-interval is [0, a + kx]; v = a·y/(kx + a)
            let k = (a1 - a) / d;
            let hx = d / n as f64;
            let mut total = 0.0;
            for i in 0..n {
                let x = (i as f64 + 0.5) * hx;
                let top = a + k * x;
                let hy = top / n as f64;
                for j in 0..n {
                    let y = (j as f64 + 0.5) * hy;
                    let denom = k * x + a;
                    let dvdx = -a * y * k / (denom * denom);
                    let dvdy = a / denom;
                    total += (dvdx * dvdx + dvdy * dvdy) * hx * hy;
                }
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, LN_2};

    #[test]
    fn rectangle_values() {
        let unit = FoliationPiece::Rectangle {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        };
        assert_eq!(rect_dirichlet(&unit).unwrap(), 1.0);
        let r = FoliationPiece::Rectangle {
            a: 0.0,
            b: 2.0,
            c: 0.0,
            d: 3.0,
        };
        assert_eq!(rect_dirichlet(&r).unwrap(), 6.0);
        assert!((quadrature_dirichlet(&r, 64).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn corner_values() {
        let unit = FoliationPiece::CornerRectangle {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        };
        let (energy, scale) = corner_dirichlet(&unit).unwrap();
        assert_eq!(energy, 2.0);
        assert_eq!(scale, 1.0);
        let wide = FoliationPiece::CornerRectangle {
            a: 0.0,
            b: 2.0,
            c: 0.0,
            d: 1.0,
        };
        assert!((corner_dirichlet(&wide).unwrap().0 - 2.5).abs() < 1e-15);
        assert!((quadrature_dirichlet(&unit, 1024).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn parallelogram_shear_invariance() {
        for b in [0.0, 1.0, 10.0, 100.0] {
            let p = FoliationPiece::Parallelogram { a: 2.0, b, c: 3.0 };
            assert_eq!(parallelogram_dirichlet(&p).unwrap(), 6.0);
            assert!((quadrature_dirichlet(&p, 64).unwrap() - 6.0).abs() < 1e-8);
        }
        let unit = FoliationPiece::Parallelogram {
            a: 1.0,
            b: 0.0,
            c: 1.0,
        };
        assert_eq!(parallelogram_dirichlet(&unit).unwrap(), 1.0);
    }

    #[test]
    fn trapezoid_closed_form() {
        let t = FoliationPiece::Trapezoid {
            a: 1.0,
            a1: 2.0,
            d: 1.0,
        };
        let v = trapezoid_dirichlet(&t).unwrap();
        assert!((v - 4.0 / 3.0 * LN_2).abs() < 1e-12);
        let q = quadrature_dirichlet(&t, 2048).unwrap();
        assert!((q - v).abs() < 1e-4, "quadrature {q} vs closed form {v}");
    }

    #[test]
    fn trapezoid_degenerates_to_rectangle() {
        let flat = FoliationPiece::Trapezoid {
            a: 1.0,
            a1: 1.0,
            d: 2.0,
        };
        assert_eq!(trapezoid_dirichlet(&flat).unwrap(), 2.0);
        let near = FoliationPiece::Trapezoid {
            a: 1.0,
            a1: 1.0 + 1e-6,
            d: 1.0,
        };
        let v = trapezoid_dirichlet(&near).unwrap();
        assert!((v - 1.0).abs() / 1.0 < 1e-4);
    }

    #[test]
    fn collar_formulas() {
        assert_eq!(collar_angle(0.0).unwrap(), 0.0);
        let t = 2.0f64.acosh();
        assert!((collar_angle(t).unwrap() - FRAC_PI_3).abs() < 1e-12);
        assert!((FRAC_PI_2 - collar_angle(20.0).unwrap()).abs() < 1e-8);
        // monotone increasing
        let mut prev = -1.0;
        for k in 0..50 {
            let v = collar_angle(k as f64 * 0.25).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(collar_angle(-1.0).is_err());
    }

    #[test]
    fn strip_length_matches_both_forms() {
        assert_eq!(strip_length(3.0, 0.0).unwrap(), 3.0);
        let t = 2.0f64.acosh();
        assert!((strip_length(1.0, t).unwrap() - 2.0).abs() < 1e-12);
        for k in 0..=20 {
            let t = k as f64;
            let m = strip_length(1.5, t).unwrap();
            assert!((m / 1.5 - t.cosh()).abs() <= 1e-12 * t.cosh());
        }
        assert!(strip_length(0.0, 1.0).is_err());
    }

    #[test]
    fn quadrature_guards() {
        let t = FoliationPiece::Trapezoid {
            a: 1.0,
            a1: 2.0,
            d: 1.0,
        };
        assert!(quadrature_dirichlet(&t, 8).is_err());
        let bad = FoliationPiece::Trapezoid {
            a: -1.0,
            a1: 2.0,
            d: 1.0,
        };
        assert!(bad.closed_form().is_err());
    }

    #[test]
    fn quadrature_converges_at_second_order() {
        let t = FoliationPiece::Trapezoid {
            a: 0.7,
            a1: 2.3,
            d: 1.4,
        };
        let exact = trapezoid_dirichlet(&t).unwrap();
        let mut errors = Vec::new();
        for n in [64usize, 128, 256, 512] {
            errors.push((quadrature_dirichlet(&t, n).unwrap() - exact).abs());
        }
        for w in errors.windows(2) {
            // rate >= 1 per doubling (observed ~2)
            assert!(w[1] <= w[0] / 1.9 + 1e-14, "errors {errors:?}");
        }
    }
}
