use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar, ScalarMode, SpaceDescriptor, SpaceNorm};

use super::block::BlockPermutation;
use super::scaled_map::{MapKind, ScaledBlockMap};

/// Word length up to which `Q U_w J = T_w` is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guarantee {
    Finite(usize),
    Infinite,
}

impl Guarantee {
    pub fn covers(self, n: usize) -> bool {
        match self {
            Guarantee::Finite(g) => n <= g,
            Guarantee::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Guarantee::Finite(g) => Some(g),
            Guarantee::Infinite => None,
        }
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guarantee::Finite(g) => write!(f, "{g}"),
            Guarantee::Infinite => f.write_str("inf"),
        }
    }
}

/// `(J, {U_label}, Q)` on a constructed space `Y`.
#[derive(Clone, Debug)]
pub struct DilationTriple<S> {
    space: SpaceDescriptor,
    embed: ScaledBlockMap<S>,
    readout: ScaledBlockMap<S>,
    operators: BTreeMap<String, BlockPermutation<S>>,
    guarantee: Guarantee,
}

impl<S: Scalar> DilationTriple<S> {
    pub fn new(
        space: SpaceDescriptor,
        embed: ScaledBlockMap<S>,
        readout: ScaledBlockMap<S>,
        operators: BTreeMap<String, BlockPermutation<S>>,
        guarantee: Guarantee,
    ) -> Result<Self> {
        if embed.kind() != MapKind::Embed || readout.kind() != MapKind::Readout {
            return Err(Error::InvalidParameter("J must embed and Q must read out".into()));
        }
        if operators.is_empty() {
            return Err(Error::Empty("operator family"));
        }
        let nb = embed.num_blocks();
        let bd = embed.block_dim();
        let layout_ok = readout.num_blocks() == nb
            && readout.block_dim() == bd
            && embed.base_dim() == readout.base_dim()
            && space.dim == nb * bd
            && operators.values().all(|u| u.num_blocks() == nb && u.block_dim() == bd);
        if !layout_ok {
            return Err(Error::DimensionMismatch("J, Q and U disagree on the block layout".into()));
        }
        if space.norm == SpaceNorm::L1 && embed.bases().iter().chain(readout.bases()).any(|b| !b.is_one()) {
            return Err(Error::InvalidParameter("l^1 triples carry unit scalings".into()));
        }
        Ok(Self { space, embed, readout, operators, guarantee })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn embed(&self) -> &ScaledBlockMap<S> {
        &self.embed
    }

    pub fn readout(&self) -> &ScaledBlockMap<S> {
        &self.readout
    }

    pub fn operators(&self) -> &BTreeMap<String, BlockPermutation<S>> {
        &self.operators
    }

    pub fn operator(&self, label: &str) -> Result<&BlockPermutation<S>> {
        self.operators.get(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> Vec<String> {
        self.operators.keys().cloned().collect()
    }

    pub fn guarantee(&self) -> Guarantee {
        self.guarantee
    }

    pub fn mode(&self) -> ScalarMode {
        S::MODE
    }

    /// `dim X`.
    pub fn base_dim(&self) -> usize {
        self.embed.base_dim()
    }

    pub fn is_isometric_family(&self) -> bool {
        self.operators.values().all(|u| u.is_isometry(&self.space.norm))
    }

    /// Coefficient produced by an embed base meeting a readout base.
    fn coupling(&self, readout_block: usize, embed_block: usize) -> Result<S> {
        let rb = self.readout.base(readout_block);
        let eb = self.embed.base(embed_block);
        if rb == eb {
            return Ok(S::from_rational(rb));
        }
        match S::MODE {
            ScalarMode::Float => Ok(S::from_f64(
                self.readout.coefficient_f64(readout_block, &self.space.norm)
                    * self.embed.coefficient_f64(embed_block, &self.space.norm),
            )),
            ScalarMode::Exact => {
                if rb.is_zero() || eb.is_zero() {
                    return Ok(S::zero());
                }
                Err(Error::IrrationalComposition(readout_block))
            }
        }
    }

    /// `Q U_{w_1} .. U_{w_n} J` as a `dim X` square matrix. The rightmost
    /// letter acts first.
    pub fn compress<L: AsRef<str>>(&self, word: &[L]) -> Result<Matrix<S>> {
        let ops = word.iter().map(|l| self.operator(l.as_ref())).collect::<Result<Vec<_>>>()?;
        let nb = self.embed.num_blocks();
        // each live block carries its value and the embed block it came from
        let mut state: Vec<Option<(Matrix<S>, usize)>> =
            (0..nb).map(|i| self.embed.block(i).map(|b| (b.clone(), i))).collect();
        for u in ops.iter().rev() {
            let mut next = Vec::with_capacity(nb);
            for i in 0..nb {
                next.push(match &state[u.source(i)] {
                    Some((v, origin)) => Some((
                        match u.factor(i) {
                            Some(f) => f.matmul(v)?,
                            None => v.clone(),
                        },
                        *origin,
                    )),
                    None => None,
                });
            }
            state = next;
        }
        let d = self.base_dim();
        let mut acc = Matrix::zeros(d, d);
        for (i, slot) in state.iter().enumerate() {
            if let (Some(r), Some((v, origin))) = (self.readout.block(i), slot) {
                let c = self.coupling(i, *origin)?;
                acc = acc.add(&r.matmul(v)?.scale(&c))?;
            }
        }
        Ok(acc)
    }

    /// `Q U^n J` for a single label.
    pub fn compress_power(&self, label: &str, n: usize) -> Result<Matrix<S>> {
        self.compress(&vec![label; n])
    }
}
