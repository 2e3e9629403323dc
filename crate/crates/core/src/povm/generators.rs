//! SU(d) generators used by the seed family and the Hermitian expansion.

use num_complex::Complex64;

use crate::tensor::matrix::{ComplexMatrix, ONE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// diag(1−d, 1, …, 1).
pub fn t3(d: usize) -> ComplexMatrix {
    let mut diag = vec![1.0; d];
    diag[0] = 1.0 - d as f64;
    ComplexMatrix::diag_real(&diag)
}

/// |m⟩⟨n| + |n⟩⟨m|
pub fn t1(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    x[(m, n)] = ONE;
    x[(n, m)] = ONE;
    x
}

/// −i|m⟩⟨n| + i|n⟩⟨m|
pub fn t2(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    x[(m, n)] = -I;
    x[(n, m)] = I;
    x
}

/// |m⟩⟨m| − |n⟩⟨n|
pub fn t3_pair(d: usize, m: usize, n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    x[(m, m)] = ONE;
    x[(n, n)] = -ONE;
    x
}

/// Generators entering the seed family.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub d: usize,
    pub t3: ComplexMatrix,
    /// (0, m) for m = 1..d−1, feeding the γ-sum.
    pub zero_pairs: Vec<(usize, usize)>,
    /// (m, n) with 1 ≤ m < n ≤ d−1, feeding the δ-sum.
    pub inner_pairs: Vec<(usize, usize)>,
}

impl GeneratorSet {
    pub fn t1(&self, (m, n): (usize, usize)) -> ComplexMatrix {
        t1(self.d, m, n)
    }

    pub fn t2(&self, (m, n): (usize, usize)) -> ComplexMatrix {
        t2(self.d, m, n)
    }

    pub fn t3_pair(&self, (m, n): (usize, usize)) -> ComplexMatrix {
        t3_pair(self.d, m, n)
    }
}

pub fn build_generators(d: usize) -> GeneratorSet {
    let zero_pairs = (1..d).map(|m| (0, m)).collect();
    let inner_pairs = (1..d)
        .flat_map(|m| (m + 1..d).map(move |n| (m, n)))
        .collect();
    GeneratorSet {
        d,
        t3: t3(d),
        zero_pairs,
        inner_pairs,
    }
}

/// Generalized Gell-Mann matrices, Tr[λ_a λ_b] = 2δ_ab.
///
/// Order: for each j < k the symmetric then the antisymmetric matrix
/// (|j⟩⟨k| + |k⟩⟨j|, −i|j⟩⟨k| + i|k⟩⟨j|), then the d−1 diagonal ones
/// √(2/(l(l+1))) (Σ_{j<l} |j⟩⟨j| − l|l⟩⟨l|).
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            out.push(t1(d, j, k));
            out.push(t2(d, j, k));
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::diag_real(&diag));
    }
    out
}
