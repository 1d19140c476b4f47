use crate::error::{Error, Result};
use crate::matrix::{eigenvalues_sym, vec_cols, DenseMatrix};

/// How a quadratic form on n×n matrices is stored.
#[derive(Debug, Clone)]
pub enum FormRepr {
    /// n²×n² symmetric matrix acting on column-stacked vectors.
    Dense(DenseMatrix),
    /// scale · Σᵢ ⟨Aᵢ,K⟩⟨Aᵢ,L⟩
    Measurements { mats: Vec<DenseMatrix>, scale: f64 },
    /// Σ wᵢⱼ KᵢⱼLᵢⱼ
    EntryWise(DenseMatrix),
}

/// A symmetric bilinear form [Q](K, L) on n×n matrices.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    n: usize,
    repr: FormRepr,
}

impl QuadraticForm {
    pub fn dense(m: DenseMatrix) -> Result<Self> {
        let n = crate::matrix::square_side(m.rows())
            .filter(|_| m.is_square())
            .ok_or_else(|| Error::Dimension(format!("{}x{} is not n²×n²", m.rows(), m.cols())))?;
        if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
            return Err(Error::NotSymmetric(m.asymmetry()));
        }
        Ok(Self {
            n,
            repr: FormRepr::Dense(m),
        })
    }

    pub fn measurements(n: usize, mats: Vec<DenseMatrix>, scale: f64) -> Result<Self> {
        if let Some(bad) = mats.iter().find(|a| a.shape() != (n, n)) {
            return Err(Error::Dimension(format!(
                "measurement is {}x{}, expected {n}x{n}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self {
            n,
            repr: FormRepr::Measurements { mats, scale },
        })
    }

    pub fn entry_wise(weights: DenseMatrix) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::Dimension("entry weights must be square".into()));
        }
        Ok(Self {
            n: weights.rows(),
            repr: FormRepr::EntryWise(weights),
        })
    }

    /// The Frobenius inner product ⟨K, L⟩.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            repr: FormRepr::EntryWise(DenseMatrix::from_fn(n, n, |_, _| 1.0)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn repr(&self) -> &FormRepr {
        &self.repr
    }

    /// [Q](K, L)
    pub fn eval(&self, k: &DenseMatrix, l: &DenseMatrix) -> f64 {
        assert_eq!(k.shape(), (self.n, self.n), "K has the wrong shape");
        assert_eq!(l.shape(), (self.n, self.n), "L has the wrong shape");
        match &self.repr {
            FormRepr::Dense(m) => {
                let kv = vec_cols(k);
                let lv = vec_cols(l);
                crate::matrix::dot(&kv, &m.matvec(&lv))
            }
            FormRepr::Measurements { mats, scale } => {
                scale * mats.iter().map(|a| a.inner(k) * a.inner(l)).sum::<f64>()
            }
            FormRepr::EntryWise(w) => w
                .as_slice()
                .iter()
                .zip(k.as_slice().iter().zip(l.as_slice()))
                .map(|(w, (a, b))| w * a * b)
                .sum(),
        }
    }

    pub fn quad(&self, k: &DenseMatrix) -> f64 {
        self.eval(k, k)
    }

    /// The n²×n² matrix of the form in column-stacked coordinates.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n;
        match &self.repr {
            FormRepr::Dense(m) => m.clone(),
            FormRepr::Measurements { mats, scale } => {
                let mut out = DenseMatrix::zeros(n * n, n * n);
                for a in mats {
                    let v = vec_cols(a);
                    for (i, vi) in v.iter().enumerate() {
                        if *vi == 0.0 {
                            continue;
                        }
                        for (j, vj) in v.iter().enumerate() {
                            out[(i, j)] += scale * vi * vj;
                        }
                    }
                }
                out
            }
            FormRepr::EntryWise(w) => DenseMatrix::from_diag(&vec_cols(w)),
        }
    }

    /// Σ cᵢ Qᵢ as a dense form. All terms must share n.
    pub fn combine(terms: &[(f64, &QuadraticForm)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|t| t.1.n)
            .ok_or_else(|| Error::Dimension("empty combination".into()))?;
        if terms.iter().any(|t| t.1.n != n) {
            return Err(Error::Dimension("forms act on different sizes".into()));
        }
        let mut out = DenseMatrix::zeros(n * n, n * n);
        for (c, q) in terms {
            out.axpy(*c, &q.to_dense());
        }
        Self::dense(out.symmetrize())
    }

    /// Largest |eigenvalue| of the dense representation, i.e. the smallest C
    /// with |[Q](K,L)| ≤ C‖K‖‖L‖.
    pub fn operator_norm(&self) -> f64 {
        eigenvalues_sym(&self.to_dense())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
