//! Two-component states and 2×2 operators in the fixed basis.

use num_complex::Complex;

use crate::scalar::Real;

/// State vector in the fixed basis `{|0⟩, |1⟩}`.
pub type Spinor<T> = [Complex<T>; 2];

/// `⟨a|b⟩`.
#[inline]
pub fn inner<T: Real>(a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

#[inline]
pub fn norm<T: Real>(a: &Spinor<T>) -> T {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

#[inline]
pub fn scale<T: Real>(a: &Spinor<T>, z: Complex<T>) -> Spinor<T> {
    [a[0] * z, a[1] * z]
}

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Op2<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::pauli(T::one(), T::zero(), T::zero(), T::zero())
    }

    /// `a0·I + ax·σx + ay·σy + az·σz`, Hermitian for real coefficients.
    pub fn pauli(a0: T, ax: T, ay: T, az: T) -> Self {
        let c = Complex::new;
        Self {
            m: [[c(a0 + az, T::zero()), c(ax, -ay)], [c(ax, ay), c(a0 - az, T::zero())]],
        }
    }

    pub fn sigma_x() -> Self {
        Self::pauli(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn sigma_y() -> Self {
        Self::pauli(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn sigma_z() -> Self {
        Self::pauli(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// `½ b·σ`.
    pub fn field_hamiltonian(b: [T; 3]) -> Self {
        let h = T::half();
        Self::pauli(T::zero(), h * b[0], h * b[1], h * b[2])
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `⟨a|M|b⟩`.
    pub fn sandwich(&self, a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
        inner(a, &self.apply(b))
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Largest element-wise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> T {
        let a = self.adjoint();
        let mut r = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((self.m[i][j] - a.m[i][j]).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Traceless part `M − (Tr M / 2)·I`.
    pub fn traceless(&self) -> Self {
        let half_tr = self.trace() * T::half();
        let mut m = self.m;
        m[0][0] = m[0][0] - half_tr;
        m[1][1] = m[1][1] - half_tr;
        Self { m }
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> T {
        let mut s = T::zero();
        for row in &self.m {
            for z in row {
                s = s + z.norm_sqr();
            }
        }
        s.sqrt()
    }
}
