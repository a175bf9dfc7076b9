//! Single-qubit gate algebra and the U3 Euler parameterization.
//!
//!   U3(θ, φ, λ) = R_Z(φ) R_X(−π/2) R_Z(θ) R_X(π/2) R_Z(λ)
//!
//! with R_Z(a) = e^{−iaZ/2} and R_X(a) = e^{−iaX/2}. The product collapses to
//! R_Z(φ) R_Y(θ) R_Z(λ) exactly, which is what [`u3_matrix`] evaluates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hamiltonian::Pauli;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Euler triple (θ, φ, λ) of a U3 gate, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Euler {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl Euler {
    pub const IDENTITY: Euler = Euler {
        theta: 0.0,
        phi: 0.0,
        lambda: 0.0,
    };

    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        Self { theta, phi, lambda }
    }

    pub fn matrix(&self) -> Mat2 {
        u3_matrix(self.theta, self.phi, self.lambda)
    }

    pub fn is_identity(&self) -> bool {
        is_identity_up_to_phase(&self.matrix(), 1e-14)
    }

    pub fn from_matrix(u: &Mat2) -> Self {
        euler_from_unitary(u)
    }
}

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn rz(a: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -a / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, a / 2.0)],
    ]
}

pub fn rx(a: f64) -> Mat2 {
    let c = Complex64::new((a / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(a / 2.0).sin());
    [[c, s], [s, c]]
}

pub fn ry(a: f64) -> Mat2 {
    let c = Complex64::new((a / 2.0).cos(), 0.0);
    let s = Complex64::new((a / 2.0).sin(), 0.0);
    [[c, -s], [s, c]]
}

pub fn hadamard() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// S† = diag(1, −i).
pub fn s_dagger() -> Mat2 {
    [[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]]
}

pub fn pauli(p: Pauli) -> Mat2 {
    p.matrix()
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn is_unitary(a: &Mat2, tol: f64) -> bool {
    max_abs_diff(&mul(&adjoint(a), a), &identity()) <= tol
}

/// Removes the global phase so that the largest-modulus entry of the first
/// column is real and positive.
pub fn canonical_phase(a: &Mat2) -> Mat2 {
    let pivot = if a[0][0].norm() >= a[1][0].norm() {
        a[0][0]
    } else {
        a[1][0]
    };
    let ph = if pivot.norm() > 0.0 {
        pivot.conj() / pivot.norm()
    } else {
        ONE
    };
    let mut out = *a;
    for row in out.iter_mut() {
        for v in row.iter_mut() {
            *v *= ph;
        }
    }
    out
}

pub fn equal_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    max_abs_diff(&canonical_phase(a), &canonical_phase(b)) <= tol
}

pub fn is_identity_up_to_phase(a: &Mat2, tol: f64) -> bool {
    equal_up_to_phase(a, &identity(), tol)
}

/// Closed form of R_Z(φ) R_Y(θ) R_Z(λ).
pub fn u3_matrix(theta: f64, phi: f64, lam: f64) -> Mat2 {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    [
        [
            Complex64::from_polar(c, -(phi + lam) / 2.0),
            -Complex64::from_polar(s, -(phi - lam) / 2.0),
        ],
        [
            Complex64::from_polar(s, (phi - lam) / 2.0),
            Complex64::from_polar(c, (phi + lam) / 2.0),
        ],
    ]
}

/// Partial derivatives of [`u3_matrix`] with respect to (θ, φ, λ).
pub fn u3_derivatives(theta: f64, phi: f64, lam: f64) -> [Mat2; 3] {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let u = u3_matrix(theta, phi, lam);
    let dtheta = [
        [
            Complex64::from_polar(-0.5 * s, -(phi + lam) / 2.0),
            -Complex64::from_polar(0.5 * c, -(phi - lam) / 2.0),
        ],
        [
            Complex64::from_polar(0.5 * c, (phi - lam) / 2.0),
            Complex64::from_polar(-0.5 * s, (phi + lam) / 2.0),
        ],
    ];
    let mi = Complex64::new(0.0, -0.5);
    // ∂φ = (−i/2) Z U, ∂λ = U (−i/2) Z
    let dphi = [
        [mi * u[0][0], mi * u[0][1]],
        [-mi * u[1][0], -mi * u[1][1]],
    ];
    let dlam = [
        [mi * u[0][0], -mi * u[0][1]],
        [mi * u[1][0], -mi * u[1][1]],
    ];
    [dtheta, dphi, dlam]
}

/// Euler angles of any 2×2 unitary, discarding its global phase.
pub fn euler_from_unitary(u: &Mat2) -> Euler {
    // normalize to SU(2): V = [[a, −b*], [b, a*]]
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let g = det.sqrt();
    let a = u[0][0] / g;
    let b = u[1][0] / g;
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (sum, diff) = if b.norm() < 1e-15 {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < 1e-15 {
        (0.0, 2.0 * b.arg())
    } else {
        (-2.0 * a.arg(), 2.0 * b.arg())
    };
    Euler {
        theta,
        phi: 0.5 * (sum + diff),
        lambda: 0.5 * (sum - diff),
    }
}
