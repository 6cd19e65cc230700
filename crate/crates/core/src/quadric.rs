//! Confocal quadric parametrizations (hyperbolic paraboloid, elliptic
//! paraboloid, hyperboloid of one sheet), their fundamental forms and
//! Christoffel symbols, the Ivory affinity, the Peterson condition and the
//! tangency-configuration identities.
//!
//! Coordinates of ambient points may carry a factor i (totally real regions
//! of complexified quadrics); these are represented by a real magnitude plus
//! a per-coordinate mask, and every norm is the signature-aware bilinear sum
//! ±(Δcoord)².

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadricKind {
    HyperbolicParaboloid,
    EllipticParaboloid,
    HyperboloidOneSheet,
}

impl QuadricKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::HyperbolicParaboloid => "hyperbolic-paraboloid",
            Self::EllipticParaboloid => "elliptic-paraboloid",
            Self::HyperboloidOneSheet => "hyperboloid-one-sheet",
        }
    }
}

/// Semiaxis data of a confocal family member plus the totally-real region
/// sign ε (paraboloids only; the hyperboloid case carries `eps = 1`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadricSpec {
    pub kind: QuadricKind,
    pub a1: f64,
    pub a2: f64,
    /// Third semiaxis parameter; only meaningful for the hyperboloid.
    pub a3: f64,
    pub eps: i8,
}

impl QuadricSpec {
    pub fn hyperbolic_paraboloid(a1: f64, a2: f64, eps: i8) -> Result<Self> {
        if !(a1 > 0.0 && 0.0 > a2) {
            return Err(Error::InvalidParameter(format!(
                "hyperbolic paraboloid needs a1 > 0 > a2, got a1={a1}, a2={a2}"
            )));
        }
        if (1.0 / a1 - 1.0 / a2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "hyperbolic paraboloid needs 1/a1 - 1/a2 = 1, got {}",
                1.0 / a1 - 1.0 / a2
            )));
        }
        Ok(Self { kind: QuadricKind::HyperbolicParaboloid, a1, a2, a3: f64::NAN, eps: sign(eps) })
    }

    /// Member of the same confocal paraboloid family seen at z < a2, where
    /// both squared semiaxes are positive.
    pub fn elliptic_paraboloid(a1: f64, a2: f64, eps: i8) -> Result<Self> {
        if !(a1 > 0.0 && 0.0 > a2) || (1.0 / a1 - 1.0 / a2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "elliptic paraboloid shares the confocal constraint a1 > 0 > a2, 1/a1 - 1/a2 = 1"
                    .into(),
            ));
        }
        Ok(Self { kind: QuadricKind::EllipticParaboloid, a1, a2, a3: f64::NAN, eps: sign(eps) })
    }

    pub fn hyperboloid(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        if !(a1 > a2 && a2 > 0.0 && a3 < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hyperboloid of one sheet needs a1 > a2 > 0 > a3, got ({a1}, {a2}, {a3})"
            )));
        }
        Ok(Self { kind: QuadricKind::HyperboloidOneSheet, a1, a2, a3, eps: 1 })
    }

    pub fn epsf(&self) -> f64 {
        self.eps as f64
    }

    /// Admissible window for the confocal parameter.
    pub fn check_confocal(&self, z: f64) -> Result<()> {
        let ok = match self.kind {
            QuadricKind::HyperbolicParaboloid => z < self.a1,
            QuadricKind::EllipticParaboloid => z < self.a2,
            QuadricKind::HyperboloidOneSheet => z < self.a2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "confocal parameter z={z} outside the admissible window of the {}",
                self.kind.name()
            )))
        }
    }
}

fn sign(e: i8) -> i8 {
    if e < 0 {
        -1
    } else {
        1
    }
}

/// Confocal family parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfocalParam(pub f64);

/// One scalar that is either real or a real magnitude times i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskedScalar {
    pub value: f64,
    pub imag: bool,
}

impl MaskedScalar {
    pub fn real(v: f64) -> Self {
        Self { value: v, imag: false }
    }

    /// √x as a masked scalar: i·√(−x) for negative radicands.
    pub fn sqrt(x: f64) -> Self {
        if x >= 0.0 {
            Self { value: x.sqrt(), imag: false }
        } else {
            Self { value: (-x).sqrt(), imag: true }
        }
    }

    pub fn mul(self, other: MaskedScalar) -> MaskedScalar {
        let s = if self.imag && other.imag { -1.0 } else { 1.0 };
        MaskedScalar {
            value: s * self.value * other.value,
            imag: self.imag ^ other.imag,
        }
    }

    pub fn scale(self, k: f64) -> MaskedScalar {
        MaskedScalar { value: self.value * k, imag: self.imag }
    }

    fn add(self, other: MaskedScalar) -> Result<MaskedScalar> {
        if self.value == 0.0 {
            return Ok(other);
        }
        if other.value == 0.0 {
            return Ok(self);
        }
        if self.imag != other.imag {
            return Err(Error::Domain(
                "cannot add a real and an imaginary masked scalar".into(),
            ));
        }
        Ok(MaskedScalar { value: self.value + other.value, imag: self.imag })
    }
}

/// Ambient point or vector with per-coordinate imaginary mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub coords: [f64; 3],
    pub imag_mask: [bool; 3],
}

impl SurfacePoint {
    pub fn real(coords: [f64; 3]) -> Self {
        Self { coords, imag_mask: [false; 3] }
    }

    pub fn component(&self, k: usize) -> MaskedScalar {
        MaskedScalar { value: self.coords[k], imag: self.imag_mask[k] }
    }

    pub fn from_components(c: [MaskedScalar; 3]) -> Self {
        Self {
            coords: [c[0].value, c[1].value, c[2].value],
            imag_mask: [c[0].imag, c[1].imag, c[2].imag],
        }
    }

    pub fn is_all_real(&self) -> bool {
        self.imag_mask.iter().zip(&self.coords).all(|(&m, &c)| !m || c == 0.0)
    }

    /// Bilinear dot product Σ xᵢyᵢ with the (−1) of paired imaginary factors.
    pub fn signed_dot(&self, other: &SurfacePoint) -> Result<f64> {
        let mut acc = 0.0;
        for k in 0..3 {
            let p = self.component(k).mul(other.component(k));
            if p.imag && p.value != 0.0 {
                return Err(Error::Domain(
                    "mixed real/imaginary coordinates in a dot product".into(),
                ));
            }
            acc += p.value;
        }
        Ok(acc)
    }

    pub fn signed_sq_norm(&self) -> Result<f64> {
        self.signed_dot(self)
    }

    pub fn sub(&self, other: &SurfacePoint) -> Result<SurfacePoint> {
        let mut c = [MaskedScalar::real(0.0); 3];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.component(k).add(other.component(k).scale(-1.0))?;
        }
        Ok(SurfacePoint::from_components(c))
    }

    pub fn add_point(&self, other: &SurfacePoint) -> Result<SurfacePoint> {
        let mut c = [MaskedScalar::real(0.0); 3];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.component(k).add(other.component(k))?;
        }
        Ok(SurfacePoint::from_components(c))
    }

    pub fn cross(&self, other: &SurfacePoint) -> Result<SurfacePoint> {
        let term = |i: usize, j: usize| -> Result<MaskedScalar> {
            self.component(i)
                .mul(other.component(j))
                .add(self.component(j).mul(other.component(i)).scale(-1.0))
        };
        Ok(SurfacePoint::from_components([
            term(1, 2)?,
            term(2, 0)?,
            term(0, 1)?,
        ]))
    }
}

/// Parametrization point x_z(α, β) of the confocal member at parameter z.
pub fn xz_point(spec: &QuadricSpec, z: ConfocalParam, alpha: f64, beta: f64) -> Result<SurfacePoint> {
    let z = z.0;
    spec.check_confocal(z)?;
    let eps = spec.epsf();
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => {
            let c1 = MaskedScalar::sqrt(spec.a1 - z).scale(alpha);
            let sq_eps = MaskedScalar::sqrt(eps);
            let c2 = MaskedScalar::sqrt(z - spec.a2).mul(sq_eps).scale(beta);
            let c3 = MaskedScalar::real((alpha * alpha - eps * beta * beta + z) / 2.0);
            Ok(SurfacePoint::from_components([c1, c2, c3]))
        }
        QuadricKind::EllipticParaboloid => {
            let c1 = MaskedScalar::sqrt(spec.a1 - z).scale(alpha);
            let sq_eps = MaskedScalar::sqrt(eps);
            let c2 = MaskedScalar::sqrt(spec.a2 - z).mul(sq_eps).scale(beta);
            let c3 = MaskedScalar::real((alpha * alpha + eps * beta * beta + z) / 2.0);
            Ok(SurfacePoint::from_components([c1, c2, c3]))
        }
        QuadricKind::HyperboloidOneSheet => {
            let ca = alpha.cos();
            if ca.abs() < 1e-12 {
                return Err(Error::Domain("hyperboloid pole: |cos α| < 1e-12".into()));
            }
            let sec = 1.0 / ca;
            let c1 = MaskedScalar::sqrt(spec.a1 - z).scale(beta.cos() * sec);
            let c2 = MaskedScalar::sqrt(spec.a2 - z).scale(beta.sin() * sec);
            let c3 = MaskedScalar::sqrt(z - spec.a3).scale(alpha.tan());
            Ok(SurfacePoint::from_components([c1, c2, c3]))
        }
    }
}

/// Tangent vectors (∂x_z/∂α, ∂x_z/∂β).
pub fn xz_tangents(
    spec: &QuadricSpec,
    z: ConfocalParam,
    alpha: f64,
    beta: f64,
) -> Result<(SurfacePoint, SurfacePoint)> {
    let zv = z.0;
    spec.check_confocal(zv)?;
    let eps = spec.epsf();
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => {
            let sq_eps = MaskedScalar::sqrt(eps);
            let xa = SurfacePoint::from_components([
                MaskedScalar::sqrt(spec.a1 - zv),
                MaskedScalar::real(0.0),
                MaskedScalar::real(alpha),
            ]);
            let xb = SurfacePoint::from_components([
                MaskedScalar::real(0.0),
                MaskedScalar::sqrt(zv - spec.a2).mul(sq_eps),
                MaskedScalar::real(-eps * beta),
            ]);
            Ok((xa, xb))
        }
        QuadricKind::EllipticParaboloid => {
            let sq_eps = MaskedScalar::sqrt(eps);
            let xa = SurfacePoint::from_components([
                MaskedScalar::sqrt(spec.a1 - zv),
                MaskedScalar::real(0.0),
                MaskedScalar::real(alpha),
            ]);
            let xb = SurfacePoint::from_components([
                MaskedScalar::real(0.0),
                MaskedScalar::sqrt(spec.a2 - zv).mul(sq_eps),
                MaskedScalar::real(eps * beta),
            ]);
            Ok((xa, xb))
        }
        QuadricKind::HyperboloidOneSheet => {
            let (sa, ca) = alpha.sin_cos();
            if ca.abs() < 1e-12 {
                return Err(Error::Domain("hyperboloid pole: |cos α| < 1e-12".into()));
            }
            let sec = 1.0 / ca;
            let (sb, cb) = beta.sin_cos();
            let xa = SurfacePoint::from_components([
                MaskedScalar::sqrt(spec.a1 - zv).scale(cb * sec * sa * sec),
                MaskedScalar::sqrt(spec.a2 - zv).scale(sb * sec * sa * sec),
                MaskedScalar::sqrt(zv - spec.a3).scale(sec * sec),
            ]);
            let xb = SurfacePoint::from_components([
                MaskedScalar::sqrt(spec.a1 - zv).scale(-sb * sec),
                MaskedScalar::sqrt(spec.a2 - zv).scale(cb * sec),
                MaskedScalar::real(0.0),
            ]);
            Ok((xa, xb))
        }
    }
}

/// The scalar H of the second-form normalization at confocal parameter z.
pub fn h_function_z(spec: &QuadricSpec, z: f64, alpha: f64, beta: f64) -> f64 {
    let eps = spec.epsf();
    let (a, b) = (spec.a1 - z, spec.a2 - z);
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => eps * alpha * alpha / a - beta * beta / b + eps,
        QuadricKind::EllipticParaboloid => -eps * alpha * alpha / a - beta * beta / b - eps,
        QuadricKind::HyperboloidOneSheet => {
            let c = spec.a3 - z;
            beta.cos().powi(2) / a + beta.sin().powi(2) / b - alpha.sin().powi(2) / c
        }
    }
}

/// H of the base member (z = 0).
pub fn h_function(spec: &QuadricSpec, alpha: f64, beta: f64) -> f64 {
    h_function_z(spec, 0.0, alpha, beta)
}

/// First and second fundamental form coefficients in the conjugate
/// parametrization. `second_form_imag` marks second forms carrying an overall
/// factor i (imaginary totally-real regions); the stored L, M, N are the real
/// coefficients of the form divided by that factor.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub second_form_imag: bool,
}

pub fn fundamental_forms(
    spec: &QuadricSpec,
    z: ConfocalParam,
    alpha: f64,
    beta: f64,
) -> Result<FundamentalForms> {
    let zv = z.0;
    spec.check_confocal(zv)?;
    let eps = spec.epsf();
    let h = h_function_z(spec, zv, alpha, beta);
    if h <= 0.0 {
        return Err(Error::Domain(format!(
            "H = {h} not positive at (α,β)=({alpha},{beta}); outside the totally real region"
        )));
    }
    let sh = h.sqrt();
    let (a, b) = (spec.a1 - zv, spec.a2 - zv);
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => Ok(FundamentalForms {
            e: a + alpha * alpha,
            f: -eps * alpha * beta,
            g: -eps * b + beta * beta,
            l: -eps / sh,
            m: 0.0,
            n: 1.0 / sh,
            second_form_imag: spec.eps < 0,
        }),
        QuadricKind::EllipticParaboloid => Ok(FundamentalForms {
            e: a + alpha * alpha,
            f: eps * alpha * beta,
            g: eps * b + beta * beta,
            l: -1.0 / sh,
            m: 0.0,
            n: -eps / sh,
            second_form_imag: spec.eps > 0,
        }),
        QuadricKind::HyperboloidOneSheet => {
            let (sa, ca) = alpha.sin_cos();
            if ca.abs() < 1e-12 {
                return Err(Error::Domain("hyperboloid pole".into()));
            }
            let sec2 = 1.0 / (ca * ca);
            let t2 = sa * sa * sec2;
            let (sb, cb) = beta.sin_cos();
            let c = spec.a3 - zv;
            let l = 1.0 / (ca * sh);
            Ok(FundamentalForms {
                e: sec2 * t2 * (a * cb * cb + b * sb * sb) - c * sec2 * sec2,
                f: sec2 * (sa / ca) * sb * cb * (b - a),
                g: sec2 * (a * sb * sb + b * cb * cb),
                l,
                m: 0.0,
                n: -l,
                second_form_imag: false,
            })
        }
    }
}

/// The six Christoffel symbols of the base member, ordered
/// (Γ¹₁₁, Γ¹₁₂, Γ¹₂₂, Γ²₁₁, Γ²₁₂, Γ²₂₂).
pub fn christoffels(spec: &QuadricSpec, alpha: f64, beta: f64) -> Result<[f64; 6]> {
    let eps = spec.epsf();
    let h = h_function(spec, alpha, beta);
    if h <= 0.0 {
        return Err(Error::Domain(format!("H = {h} not positive")));
    }
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => {
            let la = eps * alpha / (spec.a1 * h);
            let lb = -beta / (spec.a2 * h);
            Ok([la, 0.0, -eps * la, -eps * lb, 0.0, lb])
        }
        QuadricKind::EllipticParaboloid => {
            let la = -eps * alpha / (spec.a1 * h);
            let lb = -beta / (spec.a2 * h);
            Ok([la, 0.0, eps * la, eps * lb, 0.0, lb])
        }
        QuadricKind::HyperboloidOneSheet => {
            let ta = alpha.tan();
            let la = -(2.0 * alpha).sin() / spec.a3 / (2.0 * h);
            let lb = (2.0 * beta).sin() * (1.0 / spec.a2 - 1.0 / spec.a1) / (2.0 * h);
            Ok([la + 2.0 * ta, 0.0, -la, -lb, ta, lb])
        }
    }
}

/// Step used by the closed-form-vs-difference verification oracles.
pub const FD_STEP: f64 = 1e-4;

/// Max residual of the two Peterson-condition identities, with the
/// derivatives of the closed-form symbols taken by central differences.
pub fn peterson_condition_residual(spec: &QuadricSpec, alpha: f64, beta: f64) -> Result<f64> {
    let h = FD_STEP;
    // ratio h22/h11 of the conjugate second form is constant per kind
    let ratio = match spec.kind {
        QuadricKind::HyperbolicParaboloid => -spec.epsf(),
        QuadricKind::EllipticParaboloid => spec.epsf(),
        QuadricKind::HyperboloidOneSheet => -1.0,
    };
    let g = christoffels(spec, alpha, beta)?;
    let (g122, g211) = (g[2], g[3]);
    let d_alpha = {
        let p = christoffels(spec, alpha + h, beta)?[3];
        let m = christoffels(spec, alpha - h, beta)?[3];
        (p - m) / (2.0 * h) * ratio
    };
    let d_beta = {
        let p = christoffels(spec, alpha, beta + h)?[2];
        let m = christoffels(spec, alpha, beta - h)?[2];
        (p - m) / (2.0 * h) / ratio
    };
    let rhs = -2.0 * g211 * g122;
    Ok((d_alpha - rhs).abs().max((d_beta - rhs).abs()))
}

/// The Ivory affinity x₀ ↦ diag[√(1−z/a₁), √(1−z/a₂), ·]x₀ (+ z/2 shift on
/// the third coordinate for the paraboloids; the hyperboloid is central and
/// scales its third coordinate by √(1−z/a₃)).
pub fn ivory_map(spec: &QuadricSpec, z: ConfocalParam, alpha: f64, beta: f64) -> Result<SurfacePoint> {
    let zv = z.0;
    spec.check_confocal(zv)?;
    let x0 = xz_point(spec, ConfocalParam(0.0), alpha, beta)?;
    let r1 = MaskedScalar::sqrt(1.0 - zv / spec.a1);
    let r2 = MaskedScalar::sqrt(1.0 - zv / spec.a2);
    match spec.kind {
        QuadricKind::HyperboloidOneSheet => {
            let r3 = MaskedScalar::sqrt(1.0 - zv / spec.a3);
            Ok(SurfacePoint::from_components([
                x0.component(0).mul(r1),
                x0.component(1).mul(r2),
                x0.component(2).mul(r3),
            ]))
        }
        _ => {
            let c3 = x0.component(2).add(MaskedScalar::real(zv / 2.0))?;
            Ok(SurfacePoint::from_components([
                x0.component(0).mul(r1),
                x0.component(1).mul(r2),
                c3,
            ]))
        }
    }
}

/// Tangency-configuration residual (left minus right of the TC identity).
///
/// Paraboloid form: (√R′_z V₁ − V₀)ᵀ ℰ (√R′_z V₁ − V₀) + εzH₁ with
/// ℰ = diag[1, −ε]; hyperboloid form: the trigonometric identity of the
/// confocal family. `v0`, `v1` are (α, β) pairs.
pub fn tangency_residual(
    spec: &QuadricSpec,
    z: ConfocalParam,
    v0: [f64; 2],
    v1: [f64; 2],
) -> Result<f64> {
    let zv = z.0;
    spec.check_confocal(zv)?;
    match spec.kind {
        QuadricKind::HyperbolicParaboloid => {
            let r1sq = 1.0 - zv / spec.a1;
            let r2sq = 1.0 - zv / spec.a2;
            if r1sq < 0.0 || r2sq < 0.0 {
                return Err(Error::Domain(
                    "real tangency configuration needs real √R′_z".into(),
                ));
            }
            let eps = spec.epsf();
            let s1 = r1sq.sqrt() * v1[0] - v0[0];
            let s2 = r2sq.sqrt() * v1[1] - v0[1];
            let h1 = h_function(spec, v1[0], v1[1]);
            Ok(s1 * s1 - eps * s2 * s2 + eps * zv * h1)
        }
        QuadricKind::HyperboloidOneSheet => {
            let r1 = (1.0 - zv / spec.a1).sqrt();
            let r2 = (1.0 - zv / spec.a2).sqrt();
            let r3 = (1.0 - zv / spec.a3).sqrt();
            let lhs = r1 * v0[1].cos() * v1[1].cos() + r2 * v0[1].sin() * v1[1].sin();
            let rhs = v0[0].cos() * v1[0].cos() + r3 * v0[0].sin() * v1[0].sin();
            Ok(lhs - rhs)
        }
        QuadricKind::EllipticParaboloid => Err(Error::InvalidParameter(
            "tangency residual is defined for the hyperbolic paraboloid and the hyperboloid"
                .into(),
        )),
    }
}

/// Solve the hyperboloid TC for β₁ at fixed (α₀, β₀, α₁): bisection on a
/// bracketing scan, then Newton polish.
pub fn tc_solve_beta1(
    spec: &QuadricSpec,
    z: ConfocalParam,
    alpha0: f64,
    beta0: f64,
    alpha1: f64,
) -> Result<f64> {
    if spec.kind != QuadricKind::HyperboloidOneSheet {
        return Err(Error::InvalidParameter("TC solver is for the hyperboloid".into()));
    }
    let f = |b1: f64| tangency_residual(spec, z, [alpha0, beta0], [alpha1, b1]).unwrap();
    // scan for a sign change over one period
    let n = 256;
    let mut bracket = None;
    let mut prev_b = -std::f64::consts::PI;
    let mut prev_f = f(prev_b);
    for k in 1..=n {
        let b = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let fb = f(b);
        if prev_f == 0.0 {
            bracket = Some((prev_b, prev_b));
            break;
        }
        if prev_f * fb < 0.0 {
            bracket = Some((prev_b, b));
            break;
        }
        prev_b = b;
        prev_f = fb;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::Domain("tangency configuration has no solution for these angles".into())
    })?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut b1 = 0.5 * (lo + hi);
    // Newton polish
    for _ in 0..8 {
        let fb = f(b1);
        let h = 1e-7;
        let d = (f(b1 + h) - f(b1 - h)) / (2.0 * h);
        if d.abs() < 1e-14 {
            break;
        }
        let step = fb / d;
        b1 -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    Ok(b1)
}

/// Unit normal of the confocal member at parameter z, oriented so the
/// hyperbolic-paraboloid second form matches √ε(−ε dα² + dβ²)/√H.
pub fn unit_normal(spec: &QuadricSpec, z: ConfocalParam, alpha: f64, beta: f64) -> Result<SurfacePoint> {
    let (xa, xb) = xz_tangents(spec, z, alpha, beta)?;
    let cr = xb.cross(&xa)?;
    let nsq = cr.signed_sq_norm()?;
    if nsq <= 0.0 {
        return Err(Error::Domain(
            "degenerate or signature-inconsistent normal".into(),
        ));
    }
    let inv = 1.0 / nsq.sqrt();
    Ok(SurfacePoint {
        coords: [cr.coords[0] * inv, cr.coords[1] * inv, cr.coords[2] * inv],
        imag_mask: cr.imag_mask,
    })
}

/// The two algebraic consequences of the hyperboloid tangency configuration.
///
/// First: −[(x¹_{zα₁})ᵀN⁰₀]² + [(x¹_{zβ₁})ᵀN⁰₀]² + z sec²α₁;
/// second: the ruling-reflection identity.
pub fn actc_residual(
    spec: &QuadricSpec,
    z: ConfocalParam,
    p0: [f64; 2],
    p1: [f64; 2],
) -> Result<(f64, f64)> {
    if spec.kind != QuadricKind::HyperboloidOneSheet {
        return Err(Error::InvalidParameter(
            "algebraic TC consequences are stated for the hyperboloid".into(),
        ));
    }
    let tc = tangency_residual(spec, z, p0, p1)?;
    if tc.abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "tangency configuration violated: residual {tc:.3e}"
        )));
    }
    let n0 = unit_normal(spec, ConfocalParam(0.0), p0[0], p0[1])?;
    let (xa1, xb1) = xz_tangents(spec, z, p1[0], p1[1])?;
    let da = xa1.signed_dot(&n0)?;
    let db = xb1.signed_dot(&n0)?;
    let sec1 = 1.0 / p1[0].cos();
    let c1 = -da * da + db * db + z.0 * sec1 * sec1;

    let x0 = xz_point(spec, ConfocalParam(0.0), p0[0], p0[1])?;
    let xz1 = xz_point(spec, z, p1[0], p1[1])?;
    let v01 = xz1.sub(&x0)?;
    let diff = xa1.sub(&xb1)?;
    let sum = xa1.add_point(&xb1)?;
    let w = sum.cross(&v01)?;
    // reflection I − 2 N Nᵀ applied to `diff`
    let dn = diff.signed_dot(&n0)?;
    let refl = SurfacePoint::real([
        diff.coords[0] - 2.0 * dn * n0.coords[0],
        diff.coords[1] - 2.0 * dn * n0.coords[1],
        diff.coords[2] - 2.0 * dn * n0.coords[2],
    ]);
    let c2 = refl.signed_dot(&w)?;
    Ok((c1, c2))
}

/// Distinguished tangent field of the paraboloids:
/// 𝒱₀ = ε(log√H)_α x₀_α − (log√H)_β x₀_β.
pub fn distinguished_field(spec: &QuadricSpec, alpha: f64, beta: f64) -> Result<SurfacePoint> {
    if spec.kind == QuadricKind::HyperboloidOneSheet {
        return Err(Error::InvalidParameter(
            "the distinguished field is implemented for the paraboloids".into(),
        ));
    }
    let eps = spec.epsf();
    let h = h_function(spec, alpha, beta);
    if h <= 0.0 {
        return Err(Error::Domain(format!("H = {h} not positive")));
    }
    let (la, lb) = match spec.kind {
        QuadricKind::HyperbolicParaboloid => (eps * alpha / (spec.a1 * h), -beta / (spec.a2 * h)),
        QuadricKind::EllipticParaboloid => (-eps * alpha / (spec.a1 * h), -beta / (spec.a2 * h)),
        QuadricKind::HyperboloidOneSheet => unreachable!(),
    };
    let (xa, xb) = xz_tangents(spec, ConfocalParam(0.0), alpha, beta)?;
    let mut c = [MaskedScalar::real(0.0); 3];
    for (k, slot) in c.iter_mut().enumerate() {
        *slot = xa
            .component(k)
            .scale(eps * la)
            .add(xb.component(k).scale(-lb))?;
    }
    Ok(SurfacePoint::from_components(c))
}

/// First-order distance of an ambient (real) point to the implicit confocal
/// surface at parameter z: |F| / |∇F|.
pub fn implicit_distance(spec: &QuadricSpec, z: ConfocalParam, p: [f64; 3]) -> Result<f64> {
    let zv = z.0;
    spec.check_confocal(zv)?;
    let [x, y, w] = p;
    let (f, grad) = match spec.kind {
        QuadricKind::HyperbolicParaboloid => {
            let (a, b) = (spec.a1 - zv, zv - spec.a2);
            let f = x * x / (2.0 * a) - y * y / (2.0 * b) + zv / 2.0 - w;
            (f, [x / a, -y / b, -1.0])
        }
        QuadricKind::EllipticParaboloid => {
            let (a, b) = (spec.a1 - zv, spec.a2 - zv);
            let f = x * x / (2.0 * a) + y * y / (2.0 * b) + zv / 2.0 - w;
            (f, [x / a, y / b, -1.0])
        }
        QuadricKind::HyperboloidOneSheet => {
            let (a, b, c) = (spec.a1 - zv, spec.a2 - zv, spec.a3 - zv);
            let f = x * x / a + y * y / b + w * w / c - 1.0;
            (f, [2.0 * x / a, 2.0 * y / b, 2.0 * w / c])
        }
    };
    let gn = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
    if gn == 0.0 {
        return Err(Error::Singular("vanishing implicit gradient".into()));
    }
    Ok(f.abs() / gn)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(eps: i8) -> QuadricSpec {
        QuadricSpec::hyperbolic_paraboloid(2.0, -2.0, eps).unwrap()
    }

    fn hyp() -> QuadricSpec {
        QuadricSpec::hyperboloid(3.0, 2.0, -1.5).unwrap()
    }

    #[test]
    fn spec_invariants() {
        assert!(QuadricSpec::hyperbolic_paraboloid(2.0, -3.0, 1).is_err());
        assert!(QuadricSpec::hyperboloid(2.0, 3.0, -1.0).is_err());
        assert!(QuadricSpec::hyperboloid(3.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn xz_point_examples() {
        let s = hp(1);
        let p = xz_point(&s, ConfocalParam(0.0), 0.0, 0.0).unwrap();
        assert_eq!(p.coords, [0.0, 0.0, 0.0]);
        assert!(p.is_all_real());

        let p = xz_point(&s, ConfocalParam(0.0), 1.0, 0.0).unwrap();
        assert!((p.coords[0] - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((p.coords[2] - 0.5).abs() < 1e-15);

        let hkind = hyp();
        let p = xz_point(&hkind, ConfocalParam(0.0), 0.0, 0.7).unwrap();
        assert!((p.coords[0] - 3.0_f64.sqrt() * 0.7_f64.cos()).abs() < 1e-14);
        assert!((p.coords[1] - 2.0_f64.sqrt() * 0.7_f64.sin()).abs() < 1e-14);
        assert_eq!(p.coords[2], 0.0);
    }

    #[test]
    fn h_examples() {
        assert!((h_function(&hp(1), 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((h_function(&hyp(), 0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((h_function(&hp(1), 1.0, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn forms_at_origin() {
        let ff = fundamental_forms(&hp(1), ConfocalParam(0.0), 0.0, 0.0).unwrap();
        assert!((ff.e - 2.0).abs() < 1e-15);
        assert_eq!(ff.f, 0.0);
        assert!((ff.g - 2.0).abs() < 1e-15);
        assert!((ff.l + 1.0).abs() < 1e-15);
        assert_eq!(ff.m, 0.0);
        assert!((ff.n - 1.0).abs() < 1e-15);
        assert!(!ff.second_form_imag);
    }

    /// Difference quotients of x_z against the closed forms.
    fn fd_forms(
        spec: &QuadricSpec,
        z: ConfocalParam,
        al: f64,
        be: f64,
    ) -> (f64, f64, f64, f64, f64, f64) {
        let h = FD_STEP;
        let p = |a: f64, b: f64| xz_point(spec, z, a, b).unwrap();
        let p0 = p(al, be);
        let mask = p0.imag_mask;
        let dvec = |pa: SurfacePoint, pb: SurfacePoint, s: f64| SurfacePoint {
            coords: std::array::from_fn(|k| (pa.coords[k] - pb.coords[k]) / s),
            imag_mask: mask,
        };
        let xa = dvec(p(al + h, be), p(al - h, be), 2.0 * h);
        let xb = dvec(p(al, be + h), p(al, be - h), 2.0 * h);
        let e = xa.signed_dot(&xa).unwrap();
        let f = xa.signed_dot(&xb).unwrap();
        let g = xb.signed_dot(&xb).unwrap();
        let xaa = SurfacePoint {
            coords: std::array::from_fn(|k| {
                (p(al + h, be).coords[k] - 2.0 * p0.coords[k] + p(al - h, be).coords[k]) / (h * h)
            }),
            imag_mask: mask,
        };
        let xbb = SurfacePoint {
            coords: std::array::from_fn(|k| {
                (p(al, be + h).coords[k] - 2.0 * p0.coords[k] + p(al, be - h).coords[k]) / (h * h)
            }),
            imag_mask: mask,
        };
        let xab = SurfacePoint {
            coords: std::array::from_fn(|k| {
                (p(al + h, be + h).coords[k] - p(al + h, be - h).coords[k]
                    - p(al - h, be + h).coords[k]
                    + p(al - h, be - h).coords[k])
                    / (4.0 * h * h)
            }),
            imag_mask: mask,
        };
        let n0 = unit_normal(spec, z, al, be).unwrap();
        // projection on the normal; an overall i on the product is reported
        // as the real magnitude (matches the stored L, M, N convention)
        let proj = |w: &SurfacePoint| {
            let mut acc = 0.0;
            for k in 0..3 {
                let prod = MaskedScalar { value: w.coords[k], imag: w.imag_mask[k] }
                    .mul(n0.component(k));
                acc += prod.value;
            }
            acc
        };
        (e, f, g, proj(&xaa), proj(&xab), proj(&xbb))
    }

    #[test]
    fn closed_forms_match_differences() {
        let cases: Vec<(QuadricSpec, f64, f64, f64)> = vec![
            (hp(1), 0.0, 0.4, -0.3),
            (hp(1), 0.5, 0.8, 0.2),
            (hp(-1), 0.0, 0.2, 2.5),
            (hyp(), 0.0, 0.3, 0.5),
            (hyp(), -1.0, -0.2, 1.1),
        ];
        for (spec, z, al, be) in cases {
            let z = ConfocalParam(z);
            let ff = fundamental_forms(&spec, z, al, be).unwrap();
            let (e, f, g, paa, pab, pbb) = fd_forms(&spec, z, al, be);
            assert!((ff.e - e).abs() < 1e-6, "{} E {e} vs {}", spec.kind.name(), ff.e);
            assert!((ff.f - f).abs() < 1e-6, "{} F {f} vs {}", spec.kind.name(), ff.f);
            assert!((ff.g - g).abs() < 1e-6, "{} G {g} vs {}", spec.kind.name(), ff.g);
            assert!(
                (ff.l - paa).abs() < 1e-6,
                "{} L fd {paa} vs {}",
                spec.kind.name(),
                ff.l
            );
            assert!(pab.abs() < 1e-6, "{} M {pab}", spec.kind.name());
            assert!(
                (ff.n - pbb).abs() < 1e-6,
                "{} N fd {pbb} vs {}",
                spec.kind.name(),
                ff.n
            );
        }
    }

    #[test]
    fn christoffels_match_differences() {
        // Γᵏᵢⱼ from the metric of x₀ via difference quotients
        let cases: Vec<(QuadricSpec, f64, f64)> = vec![
            (hp(1), 0.4, -0.3),
            (hp(-1), 0.2, 2.5),
            (hyp(), 0.3, 0.5),
        ];
        for (spec, al, be) in cases {
            let z = ConfocalParam(0.0);
            let got = christoffels(&spec, al, be).unwrap();
            let h = 1e-4;
            let ff = |a: f64, b: f64| fundamental_forms(&spec, z, a, b).unwrap();
            let f0 = ff(al, be);
            let de = |sel: fn(&FundamentalForms) -> f64, da: f64, db: f64| {
                (sel(&ff(al + da * h, be + db * h)) - sel(&ff(al - da * h, be - db * h)))
                    / (2.0 * h)
            };
            let (e, f, g) = (f0.e, f0.f, f0.g);
            let ea = de(|x| x.e, 1.0, 0.0);
            let eb = de(|x| x.e, 0.0, 1.0);
            let ga = de(|x| x.g, 1.0, 0.0);
            let gb = de(|x| x.g, 0.0, 1.0);
            let fa = de(|x| x.f, 1.0, 0.0);
            let fb = de(|x| x.f, 0.0, 1.0);
            let det = e * g - f * f;
            let want = [
                (g * ea / 2.0 - f * (fa - eb / 2.0)) / det,
                (g * eb / 2.0 - f * ga / 2.0) / det,
                (g * (fb - ga / 2.0) - f * gb / 2.0) / det,
                (e * (fa - eb / 2.0) - f * ea / 2.0) / det,
                (e * ga / 2.0 - f * eb / 2.0) / det,
                (e * gb / 2.0 - f * (fb - ga / 2.0)) / det,
            ];
            for (k, (&gk, &wk)) in got.iter().zip(want.iter()).enumerate() {
                assert!(
                    (gk - wk).abs() < 1e-6,
                    "{} symbol {k}: closed {gk} vs fd {wk}",
                    spec.kind.name()
                );
            }
        }
    }

    #[test]
    fn christoffels_vanish_at_origin() {
        let g = christoffels(&hp(1), 0.0, 0.0).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
        let gh = christoffels(&hyp(), 0.0, 0.4).unwrap();
        assert_eq!(gh[4], 0.0); // Γ²₁₂ = tan 0
    }

    #[test]
    fn codazzi_residuals_small() {
        // (h11)_β = Γ¹₁₂ h11 − Γ²₁₁ h22 and (h22)_α = Γ²₁₂ h22 − Γ¹₂₂ h11
        for (spec, al, be) in [(hp(1), 0.3, 0.4), (hp(-1), 0.1, 2.2), (hyp(), 0.25, 0.6)] {
            let z = ConfocalParam(0.0);
            let h = 1e-3;
            let ff = |a: f64, b: f64| fundamental_forms(&spec, z, a, b).unwrap();
            // 4th-order differences for the tight tolerance
            let d4 = |sel: fn(&FundamentalForms) -> f64, da: f64, db: f64| {
                (-sel(&ff(al + 2.0 * da * h, be + 2.0 * db * h))
                    + 8.0 * sel(&ff(al + da * h, be + db * h))
                    - 8.0 * sel(&ff(al - da * h, be - db * h))
                    + sel(&ff(al - 2.0 * da * h, be - 2.0 * db * h)))
                    / (12.0 * h)
            };
            let f0 = ff(al, be);
            let gams = christoffels(&spec, al, be).unwrap();
            let r1 = d4(|x| x.l, 0.0, 1.0) - (gams[1] * f0.l - gams[3] * f0.n);
            let r2 = d4(|x| x.n, 1.0, 0.0) - (gams[4] * f0.n - gams[2] * f0.l);
            assert!(r1.abs() < 1e-8, "{}: {r1:.3e}", spec.kind.name());
            assert!(r2.abs() < 1e-8, "{}: {r2:.3e}", spec.kind.name());
        }
    }

    #[test]
    fn peterson_condition_holds() {
        assert!(peterson_condition_residual(&hp(1), 0.3, 0.4).unwrap() <= 1e-8);
        assert!(peterson_condition_residual(&hp(-1), 0.2, 2.5).unwrap() <= 1e-8);
        assert!(peterson_condition_residual(&hp(1), 0.0, 0.0).unwrap() <= 1e-12);
    }

    #[test]
    fn ivory_identity_at_zero() {
        let s = hp(1);
        let a = ivory_map(&s, ConfocalParam(0.0), 0.7, -0.4).unwrap();
        let b = xz_point(&s, ConfocalParam(0.0), 0.7, -0.4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ivory_reaches_confocal_member() {
        for (spec, z) in [(hp(1), 0.8), (hp(1), -1.0), (hyp(), -0.7)] {
            let a = ivory_map(&spec, ConfocalParam(z), 0.5, 0.6).unwrap();
            let b = xz_point(&spec, ConfocalParam(z), 0.5, 0.6).unwrap();
            for k in 0..3 {
                assert!((a.coords[k] - b.coords[k]).abs() < 1e-12);
                assert_eq!(a.imag_mask[k], b.imag_mask[k]);
            }
        }
    }

    #[test]
    fn ivory_mask_flip_below_a2() {
        let s = hp(1);
        let p = ivory_map(&s, ConfocalParam(-3.0), 0.5, 0.6).unwrap();
        assert!(p.imag_mask[1]);
        assert!(!p.imag_mask[0] && !p.imag_mask[2]);
    }

    #[test]
    fn ivory_preserves_ruling_lengths() {
        for (spec, z, al, be) in [
            (hp(1), 0.8, 0.5, -0.7),
            (hp(1), -3.0, 0.5, -0.7),
            (hyp(), -0.9, 0.3, 0.8),
        ] {
            let (xa0, xb0) = xz_tangents(&spec, ConfocalParam(0.0), al, be).unwrap();
            let (xaz, xbz) = xz_tangents(&spec, ConfocalParam(z), al, be).unwrap();
            for s in [1.0, -1.0] {
                let ruling_sq = |xa: &SurfacePoint, xb: &SurfacePoint| {
                    let mut c = [MaskedScalar::real(0.0); 3];
                    for (k, slot) in c.iter_mut().enumerate() {
                        *slot = xa.component(k).add(xb.component(k).scale(s)).unwrap();
                    }
                    SurfacePoint::from_components(c).signed_sq_norm().unwrap()
                };
                let r0 = ruling_sq(&xa0, &xb0);
                let rz = ruling_sq(&xaz, &xbz);
                assert!(
                    (r0 - rz).abs() <= 1e-10,
                    "{} z={z} s={s}: {r0} vs {rz}",
                    spec.kind.name()
                );
            }
        }
    }

    #[test]
    fn tangency_trivial_and_negative_control() {
        let s = hp(1);
        // z = 0, V1 = V0 → residual 0 exactly
        let r = tangency_residual(&s, ConfocalParam(0.0), [0.3, 0.4], [0.3, 0.4]).unwrap();
        assert_eq!(r, 0.0);
        // random V1 → generically far from the TC
        let r = tangency_residual(&s, ConfocalParam(0.9), [0.3, 0.4], [1.1, -0.2]).unwrap();
        assert!(r.abs() > 1e-3);
    }

    #[test]
    fn tc_solver_and_actc() {
        let s = hyp();
        let z = ConfocalParam(-0.8);
        let (a0, b0, a1) = (0.2, 0.5, 0.35);
        let b1 = tc_solve_beta1(&s, z, a0, b0, a1).unwrap();
        let tc = tangency_residual(&s, z, [a0, b0], [a1, b1]).unwrap();
        assert!(tc.abs() <= 1e-10, "tc {tc:.3e}");
        let (c1, c2) = actc_residual(&s, z, [a0, b0], [a1, b1]).unwrap();
        assert!(c1.abs() <= 1e-6, "first consequence {c1:.3e}");
        assert!(c2.abs() <= 1e-6, "second consequence {c2:.3e}");
        // perturbed pair violates the precondition
        let bad = actc_residual(&s, z, [a0, b0], [a1, b1 + 1e-3]);
        assert!(bad.is_err());
    }

    #[test]
    fn confocal_metric_shift_is_z_sec2() {
        // (|dx_z|² − |dx₀|²) = z sec²α (dα² − dβ²) for the hyperboloid
        let s = hyp();
        let (al, be) = (0.4, 1.2);
        let f0 = fundamental_forms(&s, ConfocalParam(0.0), al, be).unwrap();
        let fz = fundamental_forms(&s, ConfocalParam(-0.9), al, be).unwrap();
        let zsec2 = -0.9 / (al.cos() * al.cos());
        assert!((fz.e - f0.e - zsec2).abs() < 1e-12);
        assert!((fz.g - f0.g + zsec2).abs() < 1e-12);
        assert!((fz.f - f0.f).abs() < 1e-12);
    }

    #[test]
    fn distinguished_field_properties() {
        for (spec, al, be) in [(hp(1), 0.3, 0.4), (hp(-1), 0.2, 2.5)] {
            let eps = spec.epsf();
            let h = h_function(&spec, al, be);
            let v0 = distinguished_field(&spec, al, be).unwrap();
            let (xa, xb) = xz_tangents(&spec, ConfocalParam(0.0), al, be).unwrap();
            let nsq = v0.signed_sq_norm().unwrap();
            assert!((nsq - (1.0 - 1.0 / h)).abs() < 1e-12, "|V0|² {nsq}");
            assert!((v0.signed_dot(&xa).unwrap() - eps * al).abs() < 1e-12);
            assert!((v0.signed_dot(&xb).unwrap() + be).abs() < 1e-12);
        }
    }

    #[test]
    fn implicit_distance_vanishes_on_surface() {
        let s = hp(1);
        let p = xz_point(&s, ConfocalParam(0.7), 0.4, 0.9).unwrap();
        assert!(p.is_all_real());
        let d = implicit_distance(&s, ConfocalParam(0.7), p.coords).unwrap();
        assert!(d < 1e-14);
        let off = [p.coords[0], p.coords[1], p.coords[2] + 0.01];
        assert!(implicit_distance(&s, ConfocalParam(0.7), off).unwrap() > 1e-3);
    }
}
