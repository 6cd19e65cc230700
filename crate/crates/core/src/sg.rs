//! The four totally real sine-Gordon-family equations on sampled grids:
//! residuals, closed-form 1-solitons, Bäcklund transformations (as residual
//! checks and as ODE integration), Bianchi permutability superposition, the
//! coincident-parameter limit and the third Möbius configuration identity.

use crate::error::{Error, Result};
use crate::field::{EquationKind, GridSpec, ScalarField};
use crate::interp::FieldSampler;
use num_complex::Complex64;

/// |value| ceiling during Bäcklund integration; the Riccati-type flow can
/// genuinely blow up and must fail loudly instead of poisoning norms.
pub const OVERFLOW_GUARD: f64 = 1e6;

/// tanh⁻¹ argument clearance: samples with |arg| ≥ 1 − this are invalid.
pub const ATANH_DOMAIN_EPS: f64 = 1e-12;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Spectral parameter σ of the Bäcklund transformation.
///
/// The hyperbolic transformations require σ ∈ ℝ*, the elliptic ones σ ∈ S¹;
/// the flags record which constraints the stored value satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParam {
    re: f64,
    im: f64,
    real_flag: bool,
    unit_flag: bool,
}

impl SpectralParam {
    pub fn real(sigma: f64) -> Result<Self> {
        if sigma == 0.0 || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "real spectral parameter must be finite and nonzero, got {sigma}"
            )));
        }
        Ok(Self {
            re: sigma,
            im: 0.0,
            real_flag: true,
            unit_flag: (sigma.abs() - 1.0).abs() <= 1e-12,
        })
    }

    /// Unit-modulus parameter σ = e^{iφ}.
    pub fn unit(phi: f64) -> Self {
        let (im, re) = phi.sin_cos();
        Self {
            re,
            im,
            real_flag: im == 0.0,
            unit_flag: true,
        }
    }

    pub fn from_complex(sigma: Complex64) -> Result<Self> {
        if sigma.norm() == 0.0 || !sigma.is_finite() {
            return Err(Error::InvalidParameter(
                "spectral parameter must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            re: sigma.re,
            im: sigma.im,
            real_flag: sigma.im == 0.0,
            unit_flag: (sigma.norm() - 1.0).abs() <= 1e-12,
        })
    }

    pub fn is_real(&self) -> bool {
        self.real_flag
    }

    pub fn is_unit(&self) -> bool {
        self.unit_flag
    }

    /// The real value; only meaningful when `is_real`.
    pub fn sigma(&self) -> f64 {
        self.re
    }

    pub fn phi(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
            real_flag: self.real_flag,
            unit_flag: self.unit_flag,
        }
    }

    fn require_for(&self, kind: EquationKind) -> Result<()> {
        if kind.is_hyperbolic() && !self.real_flag {
            return Err(Error::InvalidParameter(
                "hyperbolic Bäcklund transforms require a real spectral parameter".into(),
            ));
        }
        if !kind.is_hyperbolic() && !self.unit_flag {
            return Err(Error::InvalidParameter(
                "elliptic Bäcklund transforms require a unit-modulus spectral parameter".into(),
            ));
        }
        Ok(())
    }
}

/// Exponent coefficients (p, q) of the 1-soliton: exponent = p·u + q·v + c₁.
fn soliton_exponent(kind: EquationKind, sigma: &SpectralParam) -> Result<(f64, f64)> {
    sigma.require_for(kind)?;
    match kind {
        EquationKind::HyperbolicSine | EquationKind::HyperbolicSinh => {
            let s = sigma.sigma();
            Ok(((s - 1.0 / s) / 2.0, (s + 1.0 / s) / 2.0))
        }
        // (σ−σ⁻¹)/(2i) = sin φ, (σ+σ⁻¹)/2 = cos φ on the unit circle
        EquationKind::EllipticSinh => {
            let phi = sigma.phi();
            Ok((phi.sin(), phi.cos()))
        }
        EquationKind::EllipticSine => {
            let phi = sigma.phi();
            Ok((-phi.sin(), -phi.cos()))
        }
    }
}

/// Closed-form 1-soliton above the vacuum seed.
///
/// Sine variants: f = ±2 tan⁻¹ e^E; sinh variants: f = ±2 tanh⁻¹ e^E with the
/// domain restricted to E < 0 (out-of-domain samples flagged invalid).
pub fn one_soliton(
    kind: EquationKind,
    sigma: &SpectralParam,
    c1: f64,
    sign: f64,
    grid: GridSpec,
) -> Result<ScalarField> {
    let (p, q) = soliton_exponent(kind, sigma)?;
    let sgn = if sign < 0.0 { -1.0 } else { 1.0 };
    let field = ScalarField::from_fn(grid, kind, |u, v| {
        let e = p * u + q * v + c1;
        if kind.is_sinh() {
            let t = e.exp();
            if t >= 1.0 - ATANH_DOMAIN_EPS {
                None
            } else {
                Some(sgn * 2.0 * t.atanh())
            }
        } else {
            Some(sgn * 2.0 * e.exp().atan())
        }
    });
    if !field.validity().iter().any(|&v| v) {
        return Err(Error::Domain(
            "1-soliton domain (exponent < 0) does not meet the requested grid".into(),
        ));
    }
    Ok(field)
}

/// Complex-σ 1-soliton, used by the complex-conjugate (breather) BPT check.
pub fn one_soliton_complex(
    kind: EquationKind,
    sigma: Complex64,
    c1: f64,
    grid: GridSpec,
) -> Result<Vec<Complex64>> {
    if sigma.norm() == 0.0 {
        return Err(Error::InvalidParameter("sigma must be nonzero".into()));
    }
    if !kind.is_hyperbolic() {
        return Err(Error::InvalidParameter(
            "complex-parameter solitons are implemented for the hyperbolic kinds".into(),
        ));
    }
    let p = (sigma - sigma.inv()) / 2.0;
    let q = (sigma + sigma.inv()) / 2.0;
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let e = p * grid.u(i) + q * grid.v(j) + c1;
            let t = e.exp();
            let f = if kind.is_sinh() {
                2.0 * t.atanh()
            } else {
                2.0 * t.atan()
            };
            out.push(f);
        }
    }
    Ok(out)
}

/// Second-order central-difference residual of the field's own equation.
/// The boundary ring is zero-filled and flagged invalid.
pub fn pde_residual(field: &ScalarField) -> Result<ScalarField> {
    let g = field.grid;
    if g.nu < 3 || g.nv < 3 {
        return Err(Error::GridTooSmall(format!("{}x{}", g.nu, g.nv)));
    }
    let s = field.kind.uu_sign();
    let mut r = ScalarField::zeros(g, field.kind);
    for j in 0..g.nv {
        for i in 0..g.nu {
            if !g.is_interior(i, j) {
                r.invalidate(i, j);
                continue;
            }
            let ok = field.is_valid(i, j)
                && field.is_valid(i - 1, j)
                && field.is_valid(i + 1, j)
                && field.is_valid(i, j - 1)
                && field.is_valid(i, j + 1);
            if !ok {
                r.invalidate(i, j);
                continue;
            }
            let f = field.at(i, j);
            let fuu = (field.at(i + 1, j) - 2.0 * f + field.at(i - 1, j)) / (g.du * g.du);
            let fvv = (field.at(i, j + 1) - 2.0 * f + field.at(i, j - 1)) / (g.dv * g.dv);
            r.set(i, j, fvv + s * fuu - field.kind.rhs(f));
        }
    }
    Ok(r)
}

/// The pair of first-order Bäcklund relations evaluated with central
/// differences. Hyperbolic case: both fields share the kind; elliptic case:
/// one field is the sine member, the other the sinh member.
fn backlund_terms(
    kind0: EquationKind,
    kind1: EquationKind,
    sigma: &SpectralParam,
) -> Result<BacklundKind> {
    if kind0.is_hyperbolic() != kind1.is_hyperbolic() {
        return Err(Error::InvalidParameter(
            "cannot pair a hyperbolic field with an elliptic field".into(),
        ));
    }
    if kind0.is_hyperbolic() {
        if kind0 != kind1 {
            return Err(Error::InvalidParameter(
                "hyperbolic Bäcklund pairs share the equation kind".into(),
            ));
        }
        sigma.require_for(kind0)?;
        Ok(BacklundKind::Hyperbolic {
            sinh: kind0.is_sinh(),
            sigma: sigma.sigma(),
        })
    } else {
        if kind0 == kind1 {
            return Err(Error::InvalidParameter(
                "the elliptic Bäcklund transformation pairs a sine field with a sinh field".into(),
            ));
        }
        sigma.require_for(kind0)?;
        Ok(BacklundKind::EllipticMixed { phi: sigma.phi() })
    }
}

enum BacklundKind {
    Hyperbolic { sinh: bool, sigma: f64 },
    EllipticMixed { phi: f64 },
}

impl BacklundKind {
    /// Residuals of the two relations given values and first derivatives of
    /// the "0" field (`a`) and the "1" field (`b`). In the elliptic case `th`
    /// denotes the sinh member and `om` the sine member, regardless of role.
    #[allow(clippy::too_many_arguments)]
    fn residuals(
        &self,
        a: f64,
        au: f64,
        av: f64,
        b: f64,
        bu: f64,
        bv: f64,
        b_is_sinh_member: bool,
    ) -> (f64, f64) {
        match *self {
            BacklundKind::Hyperbolic { sinh, sigma } => {
                let sp = if sinh { (b + a).sinh() } else { (b + a).sin() };
                let sm = if sinh { (b - a).sinh() } else { (b - a).sin() };
                let r1 = bv - au - (sigma * sp + sp_inv(sigma) * sm) / 2.0;
                let r2 = bu - av - (sigma * sp - sp_inv(sigma) * sm) / 2.0;
                (r1, r2)
            }
            BacklundKind::EllipticMixed { phi } => {
                // θ_v − ω_u = cosφ sinhθ cosω + sinφ coshθ sinω
                // θ_u + ω_v = sinφ sinhθ cosω − cosφ coshθ sinω
                let (th, thu, thv, om, omu, omv) = if b_is_sinh_member {
                    (b, bu, bv, a, au, av)
                } else {
                    (a, au, av, b, bu, bv)
                };
                let (c, s) = (phi.cos(), phi.sin());
                let r1 = thv - omu - (c * th.sinh() * om.cos() + s * th.cosh() * om.sin());
                let r2 = thu + omv - (s * th.sinh() * om.cos() - c * th.cosh() * om.sin());
                (r1, r2)
            }
        }
    }
}

#[inline]
fn sp_inv(sigma: f64) -> f64 {
    1.0 / sigma
}

/// Central-difference residuals of the Bäcklund relation pair linking `f0`
/// and `f1` with parameter σ. Boundary samples are invalid.
pub fn backlund_residual(
    f0: &ScalarField,
    f1: &ScalarField,
    sigma: &SpectralParam,
) -> Result<(ScalarField, ScalarField)> {
    f0.require_same_grid(f1)?;
    let bk = backlund_terms(f0.kind, f1.kind, sigma)?;
    let g = f0.grid;
    let mut r1 = ScalarField::zeros(g, f1.kind);
    let mut r2 = ScalarField::zeros(g, f1.kind);
    for j in 0..g.nv {
        for i in 0..g.nu {
            if !g.is_interior(i, j) {
                r1.invalidate(i, j);
                r2.invalidate(i, j);
                continue;
            }
            let stencil_ok = |f: &ScalarField| {
                f.is_valid(i, j)
                    && f.is_valid(i - 1, j)
                    && f.is_valid(i + 1, j)
                    && f.is_valid(i, j - 1)
                    && f.is_valid(i, j + 1)
            };
            if !stencil_ok(f0) || !stencil_ok(f1) {
                r1.invalidate(i, j);
                r2.invalidate(i, j);
                continue;
            }
            let du2 = 2.0 * g.du;
            let dv2 = 2.0 * g.dv;
            let a = f0.at(i, j);
            let au = (f0.at(i + 1, j) - f0.at(i - 1, j)) / du2;
            let av = (f0.at(i, j + 1) - f0.at(i, j - 1)) / dv2;
            let b = f1.at(i, j);
            let bu = (f1.at(i + 1, j) - f1.at(i - 1, j)) / du2;
            let bv = (f1.at(i, j + 1) - f1.at(i, j - 1)) / dv2;
            let (q1, q2) = bk.residuals(a, au, av, b, bu, bv, f1.kind.is_sinh());
            r1.set(i, j, q1);
            r2.set(i, j, q2);
        }
    }
    Ok((r1, r2))
}

/// Direction of one integration leg.
#[derive(Clone, Copy)]
enum Leg {
    U,
    V,
}

/// d(transformed angle)/d(leg coordinate) from the Bäcklund relations, given
/// the source jet at the current point.
fn backlund_ode_rhs(
    bk: &BacklundKind,
    target_is_sinh_member: bool,
    psi: f64,
    f0: f64,
    f0u: f64,
    f0v: f64,
    leg: Leg,
) -> f64 {
    match *bk {
        BacklundKind::Hyperbolic { sinh, sigma } => {
            let sp = if sinh { (psi + f0).sinh() } else { (psi + f0).sin() };
            let sm = if sinh { (psi - f0).sinh() } else { (psi - f0).sin() };
            match leg {
                Leg::U => f0v + (sigma * sp - sp_inv(sigma) * sm) / 2.0,
                Leg::V => f0u + (sigma * sp + sp_inv(sigma) * sm) / 2.0,
            }
        }
        BacklundKind::EllipticMixed { phi } => {
            let (c, s) = (phi.cos(), phi.sin());
            if target_is_sinh_member {
                // source ω = f0, target θ = psi
                let (sh, ch) = (psi.sinh(), psi.cosh());
                match leg {
                    Leg::U => -f0v + s * sh * f0.cos() - c * ch * f0.sin(),
                    Leg::V => f0u + c * sh * f0.cos() + s * ch * f0.sin(),
                }
            } else {
                // source θ = f0, target ω = psi
                let (sh, ch) = (f0.sinh(), f0.cosh());
                match leg {
                    Leg::U => f0v - c * sh * psi.cos() - s * ch * psi.sin(),
                    Leg::V => -f0u + s * sh * psi.cos() - c * ch * psi.sin(),
                }
            }
        }
    }
}

/// Substeps per grid cell used by the classical 4th-order stepper.
pub const SUBSTEPS_PER_CELL: usize = 10;

/// Integrate the Bäcklund relations as coupled ODEs to produce the
/// transformed field from a seed solution.
///
/// `seed_value` is the value of the output field at the grid origin; `eps1`
/// selects the leaf: the relations are integrated for ε₁·f₁. Integration runs
/// along the first row then up each column, and the op asserts
/// path-independence against the transposed order (≤ 1e-6 sup difference).
pub fn backlund_integrate(
    f0: &ScalarField,
    sigma: &SpectralParam,
    seed_value: f64,
    eps1: i8,
) -> Result<ScalarField> {
    let target_kind = f0.kind.backlund_partner();
    let bk = backlund_terms(f0.kind, target_kind, sigma)?;
    let g = f0.grid;
    let h = g.du.max(g.dv);
    let res = pde_residual(f0)?;
    let tol = 100.0 * h * h;
    if res.max_abs_interior() > tol {
        return Err(Error::Precondition(format!(
            "seed field does not solve its equation: max residual {:.3e} > {:.3e}",
            res.max_abs_interior(),
            tol
        )));
    }
    let eps = if eps1 < 0 { -1.0 } else { 1.0 };
    let a = integrate_grid(f0, &bk, target_kind, eps * seed_value, true)?;
    let b = integrate_grid(f0, &bk, target_kind, eps * seed_value, false)?;
    let d = a.sup_distance(&b)?;
    if d > 1e-6 {
        return Err(Error::Precondition(format!(
            "path-independence violated: u-first and v-first integrations differ by {d:.3e}"
        )));
    }
    let mut out = a;
    if eps < 0.0 {
        out.map_in_place(|x| -x);
    }
    Ok(out)
}

fn integrate_grid(
    f0: &ScalarField,
    bk: &BacklundKind,
    target_kind: EquationKind,
    psi0: f64,
    u_first: bool,
) -> Result<ScalarField> {
    let g = f0.grid;
    let sampler = FieldSampler::new(f0)?;
    let target_sinh = target_kind.is_sinh();
    let mut out = ScalarField::zeros(g, target_kind);

    let step = |psi: f64, fixed: f64, from: f64, to: f64, leg: Leg| -> Result<f64> {
        let span = to - from;
        let n = SUBSTEPS_PER_CELL;
        let h = span / n as f64;
        let mut y = psi;
        for k in 0..n {
            let t = from + h * k as f64;
            let eval = |tt: f64, yy: f64| -> Result<f64> {
                let (u, v) = match leg {
                    Leg::U => (tt, fixed),
                    Leg::V => (fixed, tt),
                };
                let jet = sampler.jet(u, v)?;
                Ok(backlund_ode_rhs(bk, target_sinh, yy, jet.f, jet.fu, jet.fv, leg))
            };
            let k1 = eval(t, y)?;
            let k2 = eval(t + h / 2.0, y + h / 2.0 * k1)?;
            let k3 = eval(t + h / 2.0, y + h / 2.0 * k2)?;
            let k4 = eval(t + h, y + h * k3)?;
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if !y.is_finite() || y.abs() > OVERFLOW_GUARD {
                let (u, v) = match leg {
                    Leg::U => (t + h, fixed),
                    Leg::V => (fixed, t + h),
                };
                return Err(Error::Overflow { guard: OVERFLOW_GUARD, u, v });
            }
        }
        Ok(y)
    };

    if u_first {
        out.set(0, 0, psi0);
        for i in 1..g.nu {
            let y = step(out.at(i - 1, 0), g.v(0), g.u(i - 1), g.u(i), Leg::U)?;
            out.set(i, 0, y);
        }
        for i in 0..g.nu {
            for j in 1..g.nv {
                let y = step(out.at(i, j - 1), g.u(i), g.v(j - 1), g.v(j), Leg::V)?;
                out.set(i, j, y);
            }
        }
    } else {
        out.set(0, 0, psi0);
        for j in 1..g.nv {
            let y = step(out.at(0, j - 1), g.u(0), g.v(j - 1), g.v(j), Leg::V)?;
            out.set(0, j, y);
        }
        for j in 0..g.nv {
            for i in 1..g.nu {
                let y = step(out.at(i - 1, j), g.v(j), g.u(i - 1), g.u(i), Leg::U)?;
                out.set(i, j, y);
            }
        }
    }
    Ok(out)
}

/// Loose sanity threshold for the BPT preconditions (the legs must actually
/// be Bäcklund transforms of the seed).
const BPT_PRE_TOL: f64 = 1e-2;

fn check_backlund_pair(f0: &ScalarField, f1: &ScalarField, sigma: &SpectralParam) -> Result<()> {
    let (r1, r2) = backlund_residual(f0, f1, sigma)?;
    let m = r1.max_abs_interior().max(r2.max_abs_interior());
    if m > BPT_PRE_TOL {
        return Err(Error::Precondition(format!(
            "field is not a Bäcklund transform of the seed: relation residual {m:.3e}"
        )));
    }
    Ok(())
}

/// Superposition prefactor; for pure kinds (σ₂+σ₁)/(σ₂−σ₁), for the mixed
/// elliptic pair the induced real factor cot((φ₂−φ₁)/2).
fn bpt_prefactor(
    kind: EquationKind,
    sigma1: &SpectralParam,
    sigma2: &SpectralParam,
) -> Result<f64> {
    if kind.is_hyperbolic() {
        sigma1.require_for(kind)?;
        sigma2.require_for(kind)?;
        let (s1, s2) = (sigma1.sigma(), sigma2.sigma());
        if s1 == s2 {
            return Err(Error::InvalidParameter(
                "coincident spectral parameters; use the coincident-parameter limit".into(),
            ));
        }
        Ok((s2 + s1) / (s2 - s1))
    } else {
        sigma1.require_for(kind)?;
        sigma2.require_for(kind)?;
        let dphi = sigma2.phi() - sigma1.phi();
        if dphi == 0.0 {
            return Err(Error::InvalidParameter(
                "coincident spectral parameters; use the coincident-parameter limit".into(),
            ));
        }
        let t = (dphi / 2.0).tan();
        Ok(1.0 / t)
    }
}

/// Algebraic Bianchi superposition: builds the double transform from the
/// seed `f0` and the two single transforms `f1`, `f2`.
///
/// The sine-variant branch of tan⁻¹ is continued row-major from the grid
/// origin; sinh-variant samples where the tanh⁻¹ argument leaves (−1, 1) are
/// flagged invalid.
///
/// Parameter bookkeeping for the mixed elliptic pair: `sigma1`, `sigma2` are
/// the relation parameters of the legs against `f0` (the parameters for
/// which [`backlund_residual`] vanishes). Reversing an arrow negates the
/// parameter, so the returned field satisfies the relation pair against leg
/// `f1` with −σ₂ and against leg `f2` with −σ₁ in the mixed case, and with
/// +σ₂ / +σ₁ in the pure hyperbolic case.
pub fn bpt_superpose(
    f0: &ScalarField,
    f1: &ScalarField,
    f2: &ScalarField,
    sigma1: &SpectralParam,
    sigma2: &SpectralParam,
) -> Result<ScalarField> {
    f0.require_same_grid(f1)?;
    f0.require_same_grid(f2)?;
    if f1.kind != f2.kind {
        return Err(Error::InvalidParameter(
            "both Bäcklund legs must have the same kind".into(),
        ));
    }
    if f1.kind != f0.kind.backlund_partner() {
        return Err(Error::InvalidParameter(format!(
            "legs of kind {} cannot be Bäcklund transforms of a {} seed",
            f1.kind.name(),
            f0.kind.name()
        )));
    }
    check_backlund_pair(f0, f1, sigma1)?;
    check_backlund_pair(f0, f2, sigma2)?;
    let pf = bpt_prefactor(f0.kind, sigma1, sigma2)?;
    // result kind: partner of the legs' kind (same as f0 for pure kinds)
    let out_kind = f1.kind.backlund_partner();
    // eq. (9) carries an extra sign on the sinh-result branch
    let pf = if !f0.kind.is_hyperbolic() && out_kind.is_sinh() {
        -pf
    } else {
        pf
    };
    superpose_with(f0, f1, f2, pf, out_kind)
}

fn superpose_with(
    f0: &ScalarField,
    f1: &ScalarField,
    f2: &ScalarField,
    pf: f64,
    out_kind: EquationKind,
) -> Result<ScalarField> {
    let g = f0.grid;
    let legs_sinh = f1.kind.is_sinh();
    let out_sinh = out_kind.is_sinh();
    let mut out = ScalarField::zeros(g, out_kind);
    // branch continuation state: last valid half-angle offset reference
    let mut prev_row: Vec<Option<f64>> = vec![None; g.nu];
    for j in 0..g.nv {
        let mut left: Option<f64> = None;
        for i in 0..g.nu {
            let k_ok = f0.is_valid(i, j) && f1.is_valid(i, j) && f2.is_valid(i, j);
            if !k_ok {
                out.invalidate(i, j);
                left = None;
                continue;
            }
            let half = (f2.at(i, j) - f1.at(i, j)) / 2.0;
            let inner = if legs_sinh { half.tanh() } else { half.tan() };
            let arg = if pf == 0.0 { 0.0 } else { pf * inner };
            let delta = if out_sinh {
                if !arg.is_finite() || arg.abs() >= 1.0 - ATANH_DOMAIN_EPS {
                    out.invalidate(i, j);
                    left = None;
                    continue;
                }
                2.0 * arg.atanh()
            } else {
                if !arg.is_finite() {
                    out.invalidate(i, j);
                    left = None;
                    continue;
                }
                let raw = 2.0 * arg.atan();
                let reference = left.or(prev_row[i]);
                match reference {
                    Some(r) => raw + TWO_PI * ((r - raw) / TWO_PI).round(),
                    None => raw,
                }
            };
            out.set(i, j, f0.at(i, j) + delta);
            left = Some(delta);
            prev_row[i] = Some(delta);
        }
    }
    Ok(out)
}

/// L'Hospital limit of the superposition at coincident parameters, for the
/// hyperbolic-sine vacuum seed: tan(ω₃/2) = ((σ+σ⁻¹)u/2 + (σ−σ⁻¹)v/2 + c)·sin ω₁.
pub fn bpt_coincident_limit(
    f1: &ScalarField,
    sigma1: &SpectralParam,
    c: f64,
) -> Result<ScalarField> {
    if f1.kind != EquationKind::HyperbolicSine {
        return Err(Error::InvalidParameter(
            "the coincident-parameter limit is stated for the hyperbolic sine equation".into(),
        ));
    }
    sigma1.require_for(f1.kind)?;
    let s = sigma1.sigma();
    let a = (s - 1.0 / s) / 2.0;
    let b = (s + 1.0 / s) / 2.0;
    let g = f1.grid;
    let mut out = ScalarField::zeros(g, f1.kind);
    let mut prev_row: Vec<Option<f64>> = vec![None; g.nu];
    for j in 0..g.nv {
        let mut left: Option<f64> = None;
        for i in 0..g.nu {
            if !f1.is_valid(i, j) {
                out.invalidate(i, j);
                left = None;
                continue;
            }
            let t = (b * g.u(i) + a * g.v(j) + c) * f1.at(i, j).sin();
            let raw = 2.0 * t.atan();
            let delta = match left.or(prev_row[i]) {
                Some(r) => raw + TWO_PI * ((r - raw) / TWO_PI).round(),
                None => raw,
            };
            out.set(i, j, delta);
            left = Some(delta);
            prev_row[i] = Some(delta);
        }
    }
    Ok(out)
}

/// Maximum modulus of the three-term cube-consistency identity over the grid.
///
/// `f1`, `f2`, `f4` are the three single transforms of the vacuum with
/// σ₁, σ₂, σ₃; `f7` the triple transform.
pub fn m3_residual(
    f1: &ScalarField,
    f2: &ScalarField,
    f4: &ScalarField,
    f7: &ScalarField,
    sigma1: &SpectralParam,
    sigma2: &SpectralParam,
    sigma3: &SpectralParam,
    kind: EquationKind,
) -> Result<f64> {
    f1.require_same_grid(f2)?;
    f1.require_same_grid(f4)?;
    f1.require_same_grid(f7)?;
    let (s1, s2, s3) = (
        sigma1.as_complex(),
        sigma2.as_complex(),
        sigma3.as_complex(),
    );
    let c23 = s2 / s3 - s3 / s2;
    let c31 = s3 / s1 - s1 / s3;
    let c12 = s1 / s2 - s2 / s1;
    let ex = |x: f64| -> Complex64 {
        if kind.is_sinh() {
            Complex64::new(x.exp(), 0.0)
        } else {
            Complex64::new(0.0, x).exp()
        }
    };
    let g = f1.grid;
    let mut worst = 0.0_f64;
    for j in 0..g.nv {
        for i in 0..g.nu {
            if !(f1.is_valid(i, j) && f2.is_valid(i, j) && f4.is_valid(i, j) && f7.is_valid(i, j)) {
                continue;
            }
            let (w1, w2, w4, w7) = (f1.at(i, j), f2.at(i, j), f4.at(i, j), f7.at(i, j));
            let total = (ex(w2 + w4) - ex(w1 + w7)) * c23
                + (ex(w1 + w4) - ex(w2 + w7)) * c31
                + (ex(w1 + w2) - ex(w4 + w7)) * c12;
            worst = worst.max(total.norm());
        }
    }
    Ok(worst)
}

/// Complex-arithmetic superposition for the conjugate-parameter (breather)
/// check: returns the largest |imaginary part| of the superposed field.
pub fn bpt_conjugate_imag_norm(
    kind: EquationKind,
    sigma1: Complex64,
    c1: f64,
    grid: GridSpec,
) -> Result<f64> {
    if sigma1.im == 0.0 {
        return Err(Error::InvalidParameter(
            "breather check needs a genuinely complex parameter".into(),
        ));
    }
    let f1 = one_soliton_complex(kind, sigma1, c1, grid)?;
    let sigma2 = sigma1.conj();
    let pf = (sigma2 + sigma1) / (sigma2 - sigma1);
    let mut worst = 0.0_f64;
    for w1 in f1 {
        let w2 = w1.conj();
        let half = (w2 - w1) / 2.0;
        let f3 = if kind.is_sinh() {
            2.0 * (pf * half.tanh()).atanh()
        } else {
            2.0 * (pf * half.tan()).atan()
        };
        if f3.is_finite() {
            worst = worst.max(f3.im.abs());
        }
    }
    Ok(worst)
}
