use crate::error::{Error, Result};
use crate::isometry::{is_lp_isometry, is_signed_permutation};
use crate::linalg::{Matrix, Scalar, SpaceNorm};

/// Dense expansion is refused above this dimension.
pub const DENSE_DIM_CAP: usize = 4096;

/// Block-monomial operator on `Y = X^B`: output block `i` is
/// `F_i x_{sources[i]}`, where `F_i` is a pool matrix or the identity.
///
/// This is exactly the shape of every `U` built here (block permutation
/// with isometric blocks), and it keeps products cheap at sizes where the
/// dense matrix would not fit.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPermutation<S> {
    block_dim: usize,
    sources: Vec<usize>,
    factors: Vec<Option<usize>>,
    pool: Vec<Matrix<S>>,
}

impl<S: Scalar> BlockPermutation<S> {
    pub fn new(
        block_dim: usize,
        sources: Vec<usize>,
        factors: Vec<Option<usize>>,
        pool: Vec<Matrix<S>>,
    ) -> Result<Self> {
        let b = sources.len();
        if block_dim == 0 || b == 0 {
            return Err(Error::InvalidParameter("block operator needs positive block size and count".into()));
        }
        if factors.len() != b {
            return Err(Error::DimensionMismatch(format!("{b} sources but {} factors", factors.len())));
        }
        let mut hit = vec![false; b];
        for &s in &sources {
            if s >= b || hit[s] {
                return Err(Error::InvalidParameter("block sources do not form a permutation".into()));
            }
            hit[s] = true;
        }
        if pool.iter().any(|m| !m.is_square() || m.rows() != block_dim) {
            return Err(Error::DimensionMismatch(format!("pool matrices must be {block_dim}x{block_dim}")));
        }
        if factors.iter().flatten().any(|&f| f >= pool.len()) {
            return Err(Error::InvalidParameter("factor index outside the pool".into()));
        }
        Ok(Self { block_dim, sources, factors, pool })
    }

    /// Block cycle without factors.
    pub fn permutation(block_dim: usize, sources: Vec<usize>) -> Result<Self> {
        let b = sources.len();
        Self::new(block_dim, sources, vec![None; b], Vec::new())
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn num_blocks(&self) -> usize {
        self.sources.len()
    }

    pub fn dim(&self) -> usize {
        self.block_dim * self.sources.len()
    }

    pub fn source(&self, block: usize) -> usize {
        self.sources[block]
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn factor_index(&self, block: usize) -> Option<usize> {
        self.factors[block]
    }

    pub fn factor(&self, block: usize) -> Option<&Matrix<S>> {
        self.factors[block].map(|k| &self.pool[k])
    }

    pub fn pool(&self) -> &[Matrix<S>] {
        &self.pool
    }

    /// Invertible isometry of `l^p(X^B)` iff every block factor is one of
    /// `X`; the block permutation itself always is.
    pub fn is_isometry(&self, norm: &SpaceNorm) -> bool {
        self.factors.iter().flatten().all(|&k| match norm {
            SpaceNorm::L1 => is_signed_permutation(&self.pool[k]),
            SpaceNorm::Lp(p) => is_lp_isometry(&self.pool[k], p),
        })
    }

    /// The inverse, valid when the factors are isometries (whose inverse is
    /// their transpose).
    pub fn inverse(&self) -> Self {
        let b = self.num_blocks();
        let mut sources = vec![0; b];
        let mut factors = vec![None; b];
        for i in 0..b {
            sources[self.sources[i]] = i;
            factors[self.sources[i]] = self.factors[i];
        }
        let pool = self.pool.iter().map(Matrix::transpose).collect();
        Self { block_dim: self.block_dim, sources, factors, pool }
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for dimension {}", v.len(), self.dim())));
        }
        let d = self.block_dim;
        let mut out = Vec::with_capacity(v.len());
        for i in 0..self.num_blocks() {
            let src = &v[self.sources[i] * d..(self.sources[i] + 1) * d];
            match self.factor(i) {
                Some(f) => out.extend(f.apply(src)?),
                None => out.extend_from_slice(src),
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<Matrix<S>> {
        let n = self.dim();
        if n > DENSE_DIM_CAP {
            return Err(Error::CapExceeded { what: "dense dimension", value: n as u128, cap: DENSE_DIM_CAP as u128 });
        }
        let d = self.block_dim;
        let id = Matrix::identity(d);
        let mut out = Matrix::zeros(n, n);
        for i in 0..self.num_blocks() {
            out.set_block(i * d, self.sources[i] * d, self.factor(i).unwrap_or(&id));
        }
        Ok(out)
    }
}
