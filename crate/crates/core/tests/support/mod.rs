//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Strong and weak component counts from boolean transitive closures.
pub fn closure_counts(n: usize, edges: &[(usize, usize)]) -> (usize, usize) {
    let closure = |undirected: bool| {
        let mut reach = vec![vec![false; n]; n];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            reach[a][b] = true;
            if undirected {
                reach[b][a] = true;
            }
        }
        for k in 0..n {
            let via = reach[k].clone();
            for row in reach.iter_mut() {
                if row[k] {
                    for (cell, &r) in row.iter_mut().zip(&via) {
                        *cell |= r;
                    }
                }
            }
        }
        reach
    };
    // Count each class once, at its smallest member.
    let count = |reach: &Vec<Vec<bool>>| {
        (0..n)
            .filter(|&i| (0..i).all(|j| !(reach[i][j] && reach[j][i])))
            .count()
    };
    (count(&closure(false)), count(&closure(true)))
}

/// Pearson r from exact rational sums: the only rounding is the final
/// square root.
pub fn exact_pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let q = |v: f64| BigRational::from_float(v).expect("finite");
    let n = BigRational::from_integer(BigInt::from(xs.len()));
    let (xs, ys): (Vec<_>, Vec<_>) = (xs.iter().map(|&v| q(v)).collect(), ys.iter().map(|&v| q(v)).collect());
    let mx = xs.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let my = ys.iter().fold(BigRational::zero(), |a, b| a + b) / &n;
    let (mut sxy, mut sxx, mut syy) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - &mx, y - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    let r2 = (&sxy * &sxy) / (sxx * syy);
    let r = r2.to_f64().expect("finite").sqrt();
    if sxy.is_negative() {
        -r
    } else {
        r
    }
}

/// `Gamma(k / 2)` for integer `k >= 1` by the half-integer recursion.
pub fn half_gamma(k: u32) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

pub fn t_density(x: f64, df: u32) -> f64 {
    let v = df as f64;
    let c = half_gamma(df + 1) / ((v * std::f64::consts::PI).sqrt() * half_gamma(df));
    c * (1.0 + x * x / v).powf(-(v + 1.0) / 2.0)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f((a + b) / 2.0));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// Two-sided Student t tail by integrating the density over `[0, |t|]`.
pub fn t_two_sided_quadrature(t: f64, df: u32) -> f64 {
    1.0 - 2.0 * integrate(&|x| t_density(x, df), 0.0, t.abs(), 1e-13)
}
