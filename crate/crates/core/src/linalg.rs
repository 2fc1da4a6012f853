//! Small dense matrices: a complex 2×2 type for propagators, a real 2×2
//! rotation, and a cyclic Jacobi eigensolver for dense Hermitian matrices.

use std::ops::Mul;

use num_complex::Complex64 as C64;

/// Complex 2×2 matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator2(pub [[C64; 2]; 2]);

impl Propagator2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Self([[o, z], [z, o]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self(m.map(|row| row.map(|x| C64::new(x, 0.0))))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Element-wise complex conjugate.
    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|z| z.conj())))
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Largest element-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    /// max |(U U†) − I| element-wise.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Self::identity())
    }

    /// Squared moduli |M_ij|².
    pub fn abs_sq(&self) -> [[f64; 2]; 2] {
        self.0.map(|row| row.map(|z| z.norm_sqr()))
    }

    pub(crate) fn scale_add(&self, a: C64, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += a * other.0[i][j];
            }
        }
        out
    }
}

impl Mul for Propagator2 {
    type Output = Propagator2;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Propagator2(out)
    }
}

/// Real 2×2 matrix whose rows are the hybrid-mode amplitude vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation2(pub [[f64; 2]; 2]);

impl Rotation2 {
    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, other: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let a = &self.0;
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * other[0][j] + a[i][1] * other[1][j];
            }
        }
        out
    }

    /// R · H · Rᵀ
    pub fn conjugate(&self, h: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        Rotation2(self.mul(h)).mul(&self.transpose().0)
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.mul(&self.transpose().0);
        let mut d: f64 = 0.0;
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                d = d.max((x - id).abs());
            }
        }
        d
    }

    pub fn to_complex(&self) -> Propagator2 {
        Propagator2::from_real(self.0)
    }
}

/// Dense square Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<C64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    /// Adds `v` at (i, j) and its conjugate at (j, i); on the diagonal only
    /// the real part is kept.
    pub fn add_hermitian(&mut self, i: usize, j: usize, v: C64) {
        let n = self.n;
        if i == j {
            self.data[i * n + i] += C64::new(v.re, 0.0);
        } else {
            self.data[i * n + j] += v;
            self.data[j * n + i] += v.conj();
        }
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.data[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Eigenvalues in ascending order by cyclic Jacobi rotations.
    ///
    /// Each rotation first removes the phase of the pivot `a_pq` with a
    /// diagonal unitary and then zeroes the now-real pivot with a plane
    /// rotation. Sweeps stop once the off-diagonal Frobenius norm drops below
    /// `tol` times the norm of the input. Returns `None` if `max_sweeps` runs
    /// out first.
    pub fn eigenvalues_jacobi(&self, tol: f64, max_sweeps: usize) -> Option<Vec<f64>> {
        let n = self.n;
        let mut a = self.clone();
        let scale = a.frobenius().max(f64::MIN_POSITIVE);
        let mut converged = a.off_norm() <= tol * scale;
        let mut sweeps = 0;
        while !converged {
            if sweeps == max_sweeps {
                return None;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    a.rotate(p, q);
                }
            }
            sweeps += 1;
            converged = a.off_norm() <= tol * scale;
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        ev.sort_by(f64::total_cmp);
        Some(ev)
    }

    fn rotate(&mut self, p: usize, q: usize) {
        let n = self.n;
        let apq = self.get(p, q);
        let h = apq.norm();
        if h == 0.0 {
            return;
        }
        let phase = apq / h;
        let app = self.get(p, p).re;
        let aqq = self.get(q, q).re;
        let tau = (aqq - app) / (2.0 * h);
        let t = if tau == 0.0 {
            1.0
        } else {
            tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        // U acts on columns p, q: U = P·R with P = diag(1, e^{-iφ}),
        // R = [[c, s], [-s, c]]; A ← U† A U.
        let pc = phase.conj();
        for k in 0..n {
            let akp = self.data[k * n + p];
            let akq = self.data[k * n + q];
            self.data[k * n + p] = akp * c - akq * pc * s;
            self.data[k * n + q] = akp * s + akq * pc * c;
        }
        for k in 0..n {
            let apk = self.data[p * n + k];
            let aqk = self.data[q * n + k];
            self.data[p * n + k] = apk * c - aqk * phase * s;
            self.data[q * n + k] = apk * s + aqk * phase * c;
        }
        self.data[p * n + q] = C64::new(0.0, 0.0);
        self.data[q * n + p] = C64::new(0.0, 0.0);
        self.data[p * n + p].im = 0.0;
        self.data[q * n + q].im = 0.0;
    }
}
