//! Degree-4 truncated Taylor arithmetic.
//!
//! The defect expansion needs cutoff derivatives up to fourth order, and the
//! cutoffs are built from the exp(−1/s) mollifier whose derivative chain is
//! too sharp to extract spectrally on coarse grids. Propagating a jet
//! (value + first four Taylor coefficients) through the mollifier formula
//! gives every derivative to machine precision at any evaluation point.

/// Taylor coefficients c_k = f^{(k)}(s)/k! for k = 0..=4 at a fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet4 {
    c: [f64; 5],
}

impl Jet4 {
    pub fn constant(value: f64) -> Self {
        Jet4 { c: [value, 0.0, 0.0, 0.0, 0.0] }
    }

    /// The identity function s ↦ s at the point `value`.
    pub fn variable(value: f64) -> Self {
        Jet4 { c: [value, 1.0, 0.0, 0.0, 0.0] }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative (not Taylor coefficient): f^{(k)} = k!·c_k.
    pub fn derivative(&self, k: usize) -> f64 {
        const FACTORIAL: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
        FACTORIAL[k] * self.c[k]
    }

    pub fn add(&self, other: &Jet4) -> Jet4 {
        let mut c = [0.0; 5];
        for k in 0..5 {
            c[k] = self.c[k] + other.c[k];
        }
        Jet4 { c }
    }

    pub fn neg(&self) -> Jet4 {
        let mut c = self.c;
        for v in &mut c {
            *v = -*v;
        }
        Jet4 { c }
    }

    pub fn mul(&self, other: &Jet4) -> Jet4 {
        let mut c = [0.0; 5];
        for i in 0..5 {
            for j in 0..5 - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        Jet4 { c }
    }

    /// Quotient by a jet with nonzero value, via the standard recurrence
    /// q_k = (a_k − Σ_{j=1..k} b_j q_{k−j}) / b_0.
    pub fn div(&self, other: &Jet4) -> Jet4 {
        let b0 = other.c[0];
        let mut q = [0.0; 5];
        for k in 0..5 {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= other.c[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Jet4 { c: q }
    }

    /// exp ∘ jet via e_k = (1/k) Σ_{j=1..k} j·a_j·e_{k−j}.
    pub fn exp(&self) -> Jet4 {
        let mut e = [0.0; 5];
        e[0] = self.c[0].exp();
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (j as f64) * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet4 { c: e }
    }
}
