//! Rectangular sampling grids and scalar solution fields.
//!
//! A [`ScalarField`] stores one angle function (ω for the sine variants, θ for
//! the sinh variants) sampled on a uniform `(u, v)` grid, row-major with `u`
//! fastest, together with a per-sample validity mask. Invalid samples are
//! excluded from every norm computed by this crate.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The four totally real forms of the sine-Gordon equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationKind {
    /// ω_vv − ω_uu = cos ω sin ω
    HyperbolicSine,
    /// θ_vv − θ_uu = cosh θ sinh θ
    HyperbolicSinh,
    /// ω_vv + ω_uu = cos ω sin ω
    EllipticSine,
    /// θ_vv + θ_uu = cosh θ sinh θ
    EllipticSinh,
}

impl EquationKind {
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Self::HyperbolicSine | Self::HyperbolicSinh)
    }

    pub fn is_sinh(self) -> bool {
        matches!(self, Self::HyperbolicSinh | Self::EllipticSinh)
    }

    /// Right-hand side of the equation.
    pub fn rhs(self, f: f64) -> f64 {
        if self.is_sinh() {
            f.cosh() * f.sinh()
        } else {
            f.cos() * f.sin()
        }
    }

    /// Sign of the u-derivative term: residual = f_vv + `uu_sign`·f_uu − rhs.
    pub fn uu_sign(self) -> f64 {
        if self.is_hyperbolic() {
            -1.0
        } else {
            1.0
        }
    }

    /// The other member of the elliptic Bäcklund pair (sine ↔ sinh). The
    /// hyperbolic equations pair with themselves.
    pub fn backlund_partner(self) -> EquationKind {
        match self {
            Self::HyperbolicSine => Self::HyperbolicSine,
            Self::HyperbolicSinh => Self::HyperbolicSinh,
            Self::EllipticSine => Self::EllipticSinh,
            Self::EllipticSinh => Self::EllipticSine,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HyperbolicSine => "hsg",
            Self::HyperbolicSinh => "hsgh",
            Self::EllipticSine => "esg",
            Self::EllipticSinh => "esgh",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hsg" => Ok(Self::HyperbolicSine),
            "hsgh" => Ok(Self::HyperbolicSinh),
            "esg" => Ok(Self::EllipticSine),
            "esgh" => Ok(Self::EllipticSinh),
            _ => Err(Error::Parse(format!(
                "unknown equation kind {s:?} (expected hsg|hsgh|esg|esgh)"
            ))),
        }
    }
}

/// Uniform rectangular grid in the `(u, v)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u0: f64, v0: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self> {
        if !(du > 0.0) || !(dv > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid spacings must be strictly positive, got du={du}, dv={dv}"
            )));
        }
        if nu < 3 || nv < 3 {
            return Err(Error::GridTooSmall(format!(
                "need at least 3 samples per direction, got nu={nu}, nv={nv}"
            )));
        }
        Ok(Self { u0, v0, du, dv, nu, nv })
    }

    /// Square grid covering `[lo, hi]²` with spacing `h` (last node at `hi`).
    pub fn square(lo: f64, hi: f64, h: f64) -> Result<Self> {
        let n = ((hi - lo) / h).round() as usize + 1;
        Self::new(lo, lo, h, h, n, n)
    }

    #[inline]
    pub fn u(&self, i: usize) -> f64 {
        self.u0 + self.du * i as f64
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        self.v0 + self.dv * j as f64
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nu + i
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && i + 1 < self.nu && j + 1 < self.nv
    }
}

/// A sampled scalar solution on a [`GridSpec`].
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub kind: EquationKind,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec, kind: EquationKind) -> Self {
        Self {
            grid,
            kind,
            values: vec![0.0; grid.len()],
            valid: vec![true; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, kind: EquationKind, value: f64) -> Self {
        let mut f = Self::zeros(grid, kind);
        f.values.fill(value);
        f
    }

    /// Build a field sample-wise; `None` marks the sample invalid.
    pub fn from_fn<F: FnMut(f64, f64) -> Option<f64>>(
        grid: GridSpec,
        kind: EquationKind,
        mut f: F,
    ) -> Self {
        let mut out = Self::zeros(grid, kind);
        for j in 0..grid.nv {
            for i in 0..grid.nu {
                let k = grid.idx(i, j);
                match f(grid.u(i), grid.v(j)) {
                    Some(x) if x.is_finite() => out.values[k] = x,
                    _ => {
                        out.values[k] = 0.0;
                        out.valid[k] = false;
                    }
                }
            }
        }
        out
    }

    pub fn from_parts(grid: GridSpec, kind: EquationKind, values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || valid.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {} values / {} flags",
                grid.len(),
                values.len(),
                valid.len()
            )));
        }
        Ok(Self { grid, kind, values, valid })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = value;
        self.valid[k] = value.is_finite();
    }

    #[inline]
    pub fn invalidate(&mut self, i: usize, j: usize) {
        let k = self.grid.idx(i, j);
        self.values[k] = 0.0;
        self.valid[k] = false;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn validity(&self) -> &[bool] {
        &self.valid
    }

    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| !v).count()
    }

    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        self.grid == other.grid
    }

    pub fn require_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    /// Max |value| over valid samples (0 when none are valid).
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .fold(0.0_f64, |m, (&x, _)| m.max(x.abs()))
    }

    /// Max |value| over valid interior samples.
    pub fn max_abs_interior(&self) -> f64 {
        let mut m = 0.0_f64;
        for j in 1..self.grid.nv.saturating_sub(1) {
            for i in 1..self.grid.nu.saturating_sub(1) {
                if self.is_valid(i, j) {
                    m = m.max(self.at(i, j).abs());
                }
            }
        }
        m
    }

    /// Max |self − other| over samples valid in both fields.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        self.require_same_grid(other)?;
        let mut m = 0.0_f64;
        for k in 0..self.grid.len() {
            if self.valid[k] && other.valid[k] {
                m = m.max((self.values[k] - other.values[k]).abs());
            }
        }
        Ok(m)
    }

    /// Apply `f` to every valid sample in place.
    pub fn map_in_place<F: FnMut(f64) -> f64>(&mut self, mut f: F) {
        for (x, &ok) in self.values.iter_mut().zip(&self.valid) {
            if ok {
                *x = f(*x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_spacing() {
        assert!(GridSpec::new(0.0, 0.0, 0.0, 0.1, 5, 5).is_err());
        assert!(GridSpec::new(0.0, 0.0, 0.1, -0.1, 5, 5).is_err());
        assert!(GridSpec::new(0.0, 0.0, 0.1, 0.1, 2, 5).is_err());
    }

    #[test]
    fn square_grid_hits_endpoints() {
        let g = GridSpec::square(-2.0, 2.0, 0.02).unwrap();
        assert_eq!(g.nu, 201);
        assert!((g.u(g.nu - 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn from_fn_marks_invalid() {
        let g = GridSpec::new(0.0, 0.0, 1.0, 1.0, 3, 3).unwrap();
        let f = ScalarField::from_fn(g, EquationKind::HyperbolicSine, |u, v| {
            if u + v > 2.5 {
                None
            } else {
                Some(u * v)
            }
        });
        // (1,2), (2,1) and (2,2) all have u+v > 2.5
        assert_eq!(f.invalid_count(), 3);
        assert!(!f.is_valid(2, 2));
        assert_eq!(f.at(1, 1), 1.0);
    }

    #[test]
    fn kind_roundtrip() {
        for k in [
            EquationKind::HyperbolicSine,
            EquationKind::HyperbolicSinh,
            EquationKind::EllipticSine,
            EquationKind::EllipticSinh,
        ] {
            assert_eq!(EquationKind::parse(k.name()).unwrap(), k);
        }
        assert_eq!(
            EquationKind::EllipticSine.backlund_partner(),
            EquationKind::EllipticSinh
        );
    }
}
