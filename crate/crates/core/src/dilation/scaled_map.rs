use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{lp_norm, lp_norm_pow_p, rational_to_f64, Matrix, PNorm, Rational, Scalar, SpaceNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// `J: X -> Y`, block `i` of `Jx` is `b_i^(1/p) B_i x`.
    Embed,
    /// `Q: Y -> X`, `Qy = sum_i b_i^(1/q) B_i y_i`.
    Readout,
}

/// `J` or `Q` with the scalar coefficients kept as rational bases.
///
/// An embed base `b` and a readout base `b` compose to exactly `b`, which is
/// how `Q U^n J` stays rational although the individual coefficients are
/// irrational. Absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledBlockMap<S> {
    kind: MapKind,
    base_dim: usize,
    block_dim: usize,
    blocks: Vec<Option<Matrix<S>>>,
    bases: Vec<Rational>,
}

impl<S: Scalar> ScaledBlockMap<S> {
    pub fn new(
        kind: MapKind,
        base_dim: usize,
        block_dim: usize,
        blocks: Vec<Option<Matrix<S>>>,
        bases: Vec<Rational>,
    ) -> Result<Self> {
        if blocks.len() != bases.len() || blocks.is_empty() {
            return Err(Error::DimensionMismatch(format!("{} blocks with {} bases", blocks.len(), bases.len())));
        }
        let shape = match kind {
            MapKind::Embed => (block_dim, base_dim),
            MapKind::Readout => (base_dim, block_dim),
        };
        if blocks.iter().flatten().any(|b| (b.rows(), b.cols()) != shape) {
            return Err(Error::DimensionMismatch(format!("blocks must be {}x{}", shape.0, shape.1)));
        }
        if bases.iter().any(|b| b < &Rational::zero()) {
            return Err(Error::InvalidParameter("scaling bases must be non-negative".into()));
        }
        Ok(Self { kind, base_dim, block_dim, blocks, bases })
    }

    /// Every block equal to the identity (`block_dim == base_dim`).
    pub fn uniform_identity(kind: MapKind, dim: usize, bases: Vec<Rational>) -> Result<Self> {
        let blocks = vec![Some(Matrix::identity(dim)); bases.len()];
        Self::new(kind, dim, dim, blocks, bases)
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Dimension of the block side.
    pub fn dim(&self) -> usize {
        self.block_dim * self.blocks.len()
    }

    pub fn block(&self, i: usize) -> Option<&Matrix<S>> {
        self.blocks[i].as_ref()
    }

    pub fn base(&self, i: usize) -> &Rational {
        &self.bases[i]
    }

    pub fn bases(&self) -> &[Rational] {
        &self.bases
    }

    fn exponent(&self, norm: &SpaceNorm) -> f64 {
        match (norm, self.kind) {
            (SpaceNorm::L1, MapKind::Embed) => 1.0,
            (SpaceNorm::L1, MapKind::Readout) => 0.0,
            (SpaceNorm::Lp(p), MapKind::Embed) => 1.0 / p.p_f64(),
            (SpaceNorm::Lp(p), MapKind::Readout) => 1.0 / p.q_f64(),
        }
    }

    /// Numeric coefficient `b_i^(1/p)` or `b_i^(1/q)`.
    pub fn coefficient_f64(&self, i: usize, norm: &SpaceNorm) -> f64 {
        let b = &self.bases[i];
        if b.is_one() {
            1.0
        } else if b.is_zero() {
            0.0
        } else {
            rational_to_f64(b).powf(self.exponent(norm))
        }
    }

    /// The map as a float matrix with evaluated coefficients.
    pub fn to_float_matrix(&self, norm: &SpaceNorm) -> Matrix<f64> {
        let (rows, cols) = match self.kind {
            MapKind::Embed => (self.dim(), self.base_dim),
            MapKind::Readout => (self.base_dim, self.dim()),
        };
        let mut out = Matrix::zeros(rows, cols);
        for (i, block) in self.blocks.iter().enumerate() {
            if let Some(b) = block {
                let scaled = b.to_f64().scale(&self.coefficient_f64(i, norm));
                match self.kind {
                    MapKind::Embed => out.set_block(i * self.block_dim, 0, &scaled),
                    MapKind::Readout => out.set_block(0, i * self.block_dim, &scaled),
                }
            }
        }
        out
    }

    /// The map in its own scalar mode, available when every present block
    /// has base 1 (no irrational coefficients to evaluate).
    pub fn to_exact_matrix(&self) -> Option<Matrix<S>> {
        if self.blocks.iter().zip(&self.bases).any(|(b, base)| b.is_some() && !base.is_one()) {
            return None;
        }
        let (rows, cols) = match self.kind {
            MapKind::Embed => (self.dim(), self.base_dim),
            MapKind::Readout => (self.base_dim, self.dim()),
        };
        let mut out = Matrix::zeros(rows, cols);
        for (i, block) in self.blocks.iter().enumerate() {
            if let Some(b) = block {
                match self.kind {
                    MapKind::Embed => out.set_block(i * self.block_dim, 0, b),
                    MapKind::Readout => out.set_block(0, i * self.block_dim, b),
                }
            }
        }
        Some(out)
    }

    /// `||Jx||_p^p = sum_i b_i ||B_i x||_p^p`, exact for integer `p`.
    pub fn embed_norm_pow_p(&self, x: &[S], p: &PNorm) -> Result<S> {
        if self.kind != MapKind::Embed {
            return Err(Error::InvalidParameter("norm of the image is defined for embeddings".into()));
        }
        let mut acc = S::zero();
        for (block, base) in self.blocks.iter().zip(&self.bases) {
            if let Some(b) = block {
                acc = acc + S::from_rational(base) * lp_norm_pow_p(&b.apply(x)?, p)?;
            }
        }
        Ok(acc)
    }

    /// `Qy` with evaluated coefficients.
    pub fn apply_readout_f64(&self, y: &[f64], norm: &SpaceNorm) -> Result<Vec<f64>> {
        if self.kind != MapKind::Readout || y.len() != self.dim() {
            return Err(Error::DimensionMismatch("readout applied to a vector of the wrong size".into()));
        }
        let mut out = vec![0.0; self.base_dim];
        for (i, block) in self.blocks.iter().enumerate() {
            if let Some(b) = block {
                let c = self.coefficient_f64(i, norm);
                let part = b.to_f64().apply(&y[i * self.block_dim..(i + 1) * self.block_dim])?;
                for (o, v) in out.iter_mut().zip(part) {
                    *o += c * v;
                }
            }
        }
        Ok(out)
    }

    /// `||Qy|| / ||y||` for one vector, in the given norm.
    pub fn readout_ratio(&self, y: &[f64], norm: &SpaceNorm) -> Result<f64> {
        let qy = self.apply_readout_f64(y, norm)?;
        let (num, den) = match norm {
            SpaceNorm::L1 => (qy.iter().map(|x| x.abs()).sum(), y.iter().map(|x| x.abs()).sum()),
            SpaceNorm::Lp(p) => (lp_norm(&qy, p), lp_norm(y, p)),
        };
        Ok(if den == 0.0 { 0.0 } else { num / den })
    }
}
