//! Orthogonal (unnormalized) oscillator bases restricted to one symmetry sector.
//!
//! Two families share the same three-term structure:
//!
//! * the 1D ladder basis `|j) = (a†)^j |0⟩` with `(j|j) = j!`, restricted to one
//!   parity, indexed by `l` with `j = parity + 2l`;
//! * the radial `l = 0` basis `φ_n(r) = e^{-r²/2} L_n^{(d/2-1)}(r²)` of the
//!   isotropic oscillator in `d` dimensions, indexed by `l = n`.
//!
//! In both, the squared coordinate (`q²` or `r²`) and the dilatation generator
//! act as banded operators with small integer coefficients once a fixed power
//! of two is pulled out. Everything here is at unit frequency.

use std::collections::BTreeMap;

use rug::{Integer, Rational};

/// Position-squared operator is stored scaled by this factor.
pub const X2_SCALE: u32 = 2;
/// Dilatation generator is stored scaled by this factor.
pub const D_SCALE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorKind {
    /// 1D ladder basis of one parity (0 = even, 1 = odd).
    Ladder { parity: u32 },
    /// Radial `l = 0` Laguerre basis in `dim` dimensions.
    Radial { dim: u32 },
}

/// A parity / angular-momentum sector plus the reference level and potential power.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub kind: SectorKind,
    /// Sector index `l` of the unperturbed reference state.
    pub reference: usize,
    /// Perturbation is `(x²)^power`.
    pub power: u32,
}

/// Sparse column of a banded integer operator: `(target index, coefficient)`.
pub type Column = Vec<(usize, Integer)>;

impl Sector {
    /// 1D oscillator state `N` with perturbation `q^{2K}`.
    pub fn ladder(state: u32, power: u32) -> Self {
        Sector {
            kind: SectorKind::Ladder { parity: state % 2 },
            reference: (state / 2) as usize,
            power,
        }
    }

    /// Radial `l = 0` state `N` in `dim` dimensions with perturbation `r^{2K}`.
    pub fn radial(dim: u32, state: u32, power: u32) -> Self {
        Sector {
            kind: SectorKind::Radial { dim },
            reference: state as usize,
            power,
        }
    }

    /// Physical basis label (`j` for the ladder basis, `n` for the radial one).
    pub fn label(&self, l: usize) -> usize {
        match self.kind {
            SectorKind::Ladder { parity } => parity as usize + 2 * l,
            SectorKind::Radial { .. } => l,
        }
    }

    /// Inverse of [`Sector::label`]; `None` for a label outside the sector.
    pub fn index_of(&self, label: usize) -> Option<usize> {
        match self.kind {
            SectorKind::Ladder { parity } => {
                let p = parity as usize;
                (label >= p && (label - p) % 2 == 0).then(|| (label - p) / 2)
            }
            SectorKind::Radial { .. } => Some(label),
        }
    }

    /// Sector-index band half-width of the perturbation.
    pub fn band(&self) -> usize {
        self.power as usize
    }

    /// Unperturbed level `E_l` at unit frequency.
    pub fn level(&self, l: usize) -> Rational {
        match self.kind {
            SectorKind::Ladder { .. } => Rational::from((2 * self.label(l) as i64 + 1, 2)),
            SectorKind::Radial { dim } => Rational::from((4 * l as i64 + dim as i64, 2)),
        }
    }

    /// `E_l − E_ref`; both families have level spacing 2 within a sector.
    pub fn gap(&self, l: usize) -> i64 {
        2 * (l as i64 - self.reference as i64)
    }

    /// Squared norm `(l|l)` of the unnormalized basis vector.
    pub fn norm(&self, l: usize) -> Rational {
        match self.kind {
            SectorKind::Ladder { .. } => Rational::from(Integer::from(Integer::factorial(self.label(l) as u32))),
            SectorKind::Radial { dim } => {
                // (a+1)_l / l! with a + 1 = d/2
                let mut h = Rational::from(1);
                for i in 0..l as i64 {
                    h *= Rational::from((dim as i64 + 2 * i, 2 * (i + 1)));
                }
                h
            }
        }
    }

    /// `(l+1|l+1) / (l|l)`.
    pub fn norm_ratio(&self, l: usize) -> Rational {
        match self.kind {
            SectorKind::Ladder { .. } => {
                let j = self.label(l) as i64;
                Rational::from((j + 1) * (j + 2))
            }
            SectorKind::Radial { dim } => Rational::from((dim as i64 + 2 * l as i64, 2 * (l as i64 + 1))),
        }
    }

    /// `X2_SCALE · x²` applied to basis vector `l`.
    pub fn x2_column(&self, l: usize) -> Column {
        let mut col = Vec::with_capacity(3);
        match self.kind {
            SectorKind::Ladder { .. } => {
                let j = self.label(l) as i64;
                if l > 0 {
                    col.push((l - 1, Integer::from(j * (j - 1))));
                }
                col.push((l, Integer::from(2 * j + 1)));
                col.push((l + 1, Integer::from(1)));
            }
            SectorKind::Radial { dim } => {
                let n = l as i64;
                let d = dim as i64;
                if l > 0 {
                    col.push((l - 1, Integer::from(-(2 * n + d - 2))));
                }
                col.push((l, Integer::from(4 * n + d)));
                col.push((l + 1, Integer::from(-(2 * n + 2))));
            }
        }
        col
    }

    /// `D_SCALE · D` applied to basis vector `l`, where `D` generates `∂_k` at fixed `g`.
    pub fn dilatation_column(&self, l: usize) -> Column {
        let mut col = Vec::with_capacity(2);
        match self.kind {
            SectorKind::Ladder { .. } => {
                let j = self.label(l) as i64;
                if l > 0 {
                    col.push((l - 1, Integer::from(j * (j - 1))));
                }
                col.push((l + 1, Integer::from(-1)));
            }
            SectorKind::Radial { dim } => {
                let n = l as i64;
                if l > 0 {
                    col.push((l - 1, Integer::from(-(2 * n + dim as i64 - 2))));
                }
                col.push((l + 1, Integer::from(2 * n + 2)));
            }
        }
        col
    }

    /// `X2_SCALE^power · (x²)^power` applied to basis vector `l`.
    pub fn potential_column(&self, l: usize) -> Column {
        let mut v: BTreeMap<usize, Integer> = BTreeMap::from([(l, Integer::from(1))]);
        for _ in 0..self.power {
            let mut next: BTreeMap<usize, Integer> = BTreeMap::new();
            for (idx, c) in &v {
                for (t, a) in self.x2_column(*idx) {
                    *next.entry(t).or_default() += Integer::from(c * &a);
                }
            }
            v = next;
        }
        v.into_iter().filter(|(_, c)| *c != 0).collect()
    }

    /// Coefficient of basis vector `i` in `(x²)^power |j)`, i.e. `(i|(x²)^power|j)/(i|i)`.
    pub fn potential_element(&self, i: usize, j: usize) -> Rational {
        let scale = Integer::from(Integer::u_pow_u(X2_SCALE, self.power));
        self.potential_column(j)
            .into_iter()
            .find(|(t, _)| *t == i)
            .map(|(_, c)| Rational::from((c, scale.clone())))
            .unwrap_or_default()
    }
}
