//! 2x2 complex matrices for channel algebra.

use num_complex::Complex64 as C64;

pub type M2 = [[C64; 2]; 2];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn identity() -> M2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn diag(a: C64, b: C64) -> M2 {
    [[a, ZERO], [ZERO, b]]
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn sub(a: &M2, b: &M2) -> M2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn scale(a: &M2, s: C64) -> M2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn adjoint(a: &M2) -> M2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn det(a: &M2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &M2) -> C64 {
    a[0][0] + a[1][1]
}

pub fn inverse(a: &M2) -> M2 {
    let d = det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn frobenius(a: &M2) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|| A* A - 1 ||_F`.
pub fn unitarity_defect(a: &M2) -> f64 {
    frobenius(&sub(&mul(&adjoint(a), a), &identity()))
}

/// Plane-wave channels `(+k, -k)` to parity channels `(even, odd)`.
pub fn to_parity(a: &M2) -> M2 {
    let u = [[ONE, ONE], [ONE, -ONE]];
    scale(&mul(&mul(&u, a), &u), C64::new(0.5, 0.0))
}

pub fn from_parity(a: &M2) -> M2 {
    to_parity(a)
}
