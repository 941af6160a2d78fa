use serde::{Deserialize, Serialize};

use super::{Coef, CoefficientField, CylPoint, DetError};

/// Which integral a lower-order block belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integral {
    X1,
    X2,
}

fn val(f: &dyn CoefficientField, c: Coef, pt: &CylPoint) -> f64 {
    f.value(c, pt)
        .unwrap_or_else(|| panic!("every structure defines {c:?}"))
}

fn grad(f: &dyn CoefficientField, c: Coef, pt: &CylPoint) -> [f64; 3] {
    f.gradient(c, pt)
        .unwrap_or_else(|| panic!("every structure defines {c:?}"))
}

fn abs6(v: [f64; 6]) -> [f64; 6] {
    v.map(f64::abs)
}

/// Field components and trigonometric factors shared by every block.
struct Local {
    r: f64,
    c: f64,
    s: f64,
    a: f64,
    b: f64,
    br: f64,
    bphi: f64,
    bz: f64,
}

impl Local {
    fn new(f: &dyn CoefficientField, pt: &CylPoint) -> Self {
        let (a, b) = f.ab();
        let (s, c) = pt.phi.sin_cos();
        Local {
            r: pt.r,
            c,
            s,
            a,
            b,
            br: val(f, Coef::BR, pt),
            bphi: val(f, Coef::BPhi, pt),
            bz: val(f, Coef::BZ, pt),
        }
    }
}

/// `|LHS − RHS|` of the six second-order equations from `{H, X1} = 0`.
pub fn residual_x1_second(f: &dyn CoefficientField, pt: &CylPoint) -> [f64; 6] {
    let Local { r, c, s, a, b, br, bphi, bz } = Local::new(f, pt);
    let sr = val(f, Coef::SR, pt);
    let gsr = grad(f, Coef::SR, pt);
    let gsf = grad(f, Coef::SPhi, pt);
    let gsz = grad(f, Coef::SZ, pt);
    let (c2, cs) = (c * c, c * s);
    abs6([
        gsr[0] + (2.0 * b * c2 - 2.0 * a * cs - b) * bz / r,
        gsf[0] - (4.0 * a * c2 * bz + 4.0 * b * cs * bz + r * r * bphi - 2.0 * a * bz - gsr[1]) / (r * r),
        gsf[1] - (2.0 * b * c2 * bz - 2.0 * a * cs * bz - b * bz - r * br - sr) / r,
        gsz[1]
            - (-2.0 * b * r * c2 * bphi - 2.0 * a * c2 * br + 2.0 * a * r * cs * bphi - 2.0 * b * cs * br
                - r * r * gsf[2]
                + b * r * bphi
                + 2.0 * a * br),
        gsr[2]
            - (2.0 * b * c2 * br - 2.0 * a * r * c2 * bphi - 2.0 * b * r * cs * bphi - 2.0 * a * cs * br
                - b * br
                - r * bz
                - r * gsz[0])
                / r,
        gsz[2] - br,
    ])
}

/// `|LHS − RHS|` of the six second-order equations from `{H, X2} = 0`.
pub fn residual_x2_second(f: &dyn CoefficientField, pt: &CylPoint) -> [f64; 6] {
    let Local { r, br, bphi, .. } = Local::new(f, pt);
    let sr = val(f, Coef::BigSR, pt);
    let gsr = grad(f, Coef::BigSR, pt);
    let gsf = grad(f, Coef::BigSPhi, pt);
    let gsz = grad(f, Coef::BigSZ, pt);
    abs6([
        gsr[0],
        gsf[0] + gsr[1] / (r * r),
        gsf[1] + sr / r,
        gsz[1] + r * r * gsf[2] + 2.0 * br,
        gsz[2],
        gsr[2] - 2.0 * bphi + gsz[0],
    ])
}

/// `|LHS − RHS|` of the six displayed second-order equations from
/// `{X1, X2} = 0`. Lower-order conditions of this bracket are not covered.
pub fn residual_bracket_second(f: &dyn CoefficientField, pt: &CylPoint) -> [f64; 6] {
    let Local { r, c, s, a, b, br, bphi, bz } = Local::new(f, pt);
    let big_sr = val(f, Coef::BigSR, pt);
    let big_sf = val(f, Coef::BigSPhi, pt);
    let d_sr_phi = grad(f, Coef::BigSR, pt)[1];
    let d_szz_r = grad(f, Coef::BigSZ, pt)[0];
    let d_sf_z = grad(f, Coef::BigSPhi, pt)[2];
    let d_sz_r = grad(f, Coef::SZ, pt)[0];
    let d_sphi_z = grad(f, Coef::SPhi, pt)[2];
    let (a2, b2) = (a * a, b * b);
    let (r2, r3) = (r * r, r * r * r);
    let cp = |k: i32| c.powi(k);

    let k = 8.0 * a * b * cp(4) - 4.0 * (a2 - b2) * cp(3) * s - 6.0 * a * b * cp(2) - 2.0 * b2 * c * s;
    let lin = 2.0 * b * cp(2) - 2.0 * a * c * s - b;
    let e1 = k * d_sr_phi + lin * r2 * d_szz_r - k * r * big_sf - 2.0 * lin * r2 * bphi;

    let e2 = (8.0 * (b2 - 3.0 * a2) * b * r * cp(6) + 8.0 * (a2 - 3.0 * b2) * a * r * cp(5) * s
        + 4.0 * (5.0 * a2 - 3.0 * b2) * b * r * cp(4)
        + 16.0 * r * a * b2 * cp(3) * s
        + 4.0 * cp(2) * r * b2 * b)
        * d_sr_phi
        - (8.0 * a * b * r3 * cp(4) - 4.0 * (a2 - b2) * r3 * cp(3) * s - 6.0 * a * b * r3 * cp(2)
            - 2.0 * b2 * r3 * c * s)
            * d_szz_r
        + b2 * (4.0 * b * cp(2) - 4.0 * a * c * s - 2.0 * b) * r * d_sz_r
        + 4.0 * b2 * (b * s + a * c) * c * r2 * d_sphi_z
        + (8.0 * (3.0 * a2 - b2) * b * cp(6) - 8.0 * (a2 - 3.0 * b2) * a * cp(5) * s
            - 4.0 * (5.0 * a2 - 3.0 * b2) * b * cp(4)
            - 16.0 * a * b2 * cp(3) * s
            - 2.0 * b2 * b * cp(2)
            - 2.0 * a * b2 * c * s
            - b2 * b)
            * r2
            * big_sf
        + (16.0 * (b2 + r2) * a * b * r * cp(4)
            - 8.0 * (a2 * b2 + a2 * r2 - b2 * b2 - b2 * r2) * r * cp(3) * s
            - 12.0 * (b2 + r2) * a * b * r * cp(2)
            - 4.0 * (b2 + r2) * b2 * r * c * s)
            * bphi
        + 8.0 * b2 * ((a2 - b2) * cp(4) + 2.0 * a * b * cp(3) * s - (a2 - b2) * cp(2) - a * b * s * c) * br
        + 2.0 * b2 * lin * r * bz
        + 2.0 * b2 * (a * cp(2) + b * c * s) * r * big_sr;

    let e3 = r2 * d_sf_z + 2.0 * br;

    let e4 = (4.0 * (a2 - b2) * cp(4) + 8.0 * a * b * cp(3) * s + 4.0 * b2 * cp(2)) * d_sr_phi
        + 2.0 * (a * c + b * s) * r2 * c * d_szz_r
        - 2.0 * b2 * d_sz_r
        + (4.0 * (b2 - a2) * cp(4) - 8.0 * a * b * cp(3) * s - 4.0 * b2 * cp(2) - b2) * r * big_sf
        - 4.0 * (b * s + a * c) * r2 * c * bphi
        - 2.0 * b2 * bz
        - 2.0 * b2 * (b * s + a * c) * c * d_szz_r;

    let e5 = (2.0 * b * cp(2) - 2.0 * a * c * s) * d_sr_phi - 2.0 * b * r * cp(2) * big_sf
        + 2.0 * a * c * s * r * big_sf
        - b * d_sr_phi
        + b * r * big_sf
        - r2 * d_sf_z;

    let quad = (a2 - b2) * cp(2) + 2.0 * a * b * s * c + b2;
    let e6 = -16.0 * quad * cp(2) * d_sr_phi - 8.0 * (a * cp(2) + b * c * s) * r2 * d_szz_r
        + (16.0 * (a2 - b2) * cp(4) + 32.0 * a * b * cp(3) * s + 16.0 * b2 * cp(2) + 4.0 * b2) * r * big_sf
        + 16.0 * (a * cp(2) + b * c * s) * r2 * bphi
        - 4.0 * b2 * d_sr_phi;

    abs6([e1, e2, e3, e4, e5, e6])
}

/// Right-hand side `(G_r, G_φ, G_Z)` of the first-order block of `X1`,
/// i.e. what `∇m` must equal. Needs only `W`, not `m`.
pub(super) fn x1_gradient_rhs(f: &dyn CoefficientField, pt: &CylPoint) -> Result<[f64; 3], DetError> {
    let Local { r, c, s, a, b, br, bphi, bz } = Local::new(f, pt);
    let [wr, wf, wz] = f.gradient(Coef::W, pt).ok_or(DetError::Unavailable(Coef::W))?;
    let sr = val(f, Coef::SR, pt);
    let sf = val(f, Coef::SPhi, pt);
    let sz = val(f, Coef::SZ, pt);
    let (c2, cs) = (c * c, c * s);
    Ok([
        (2.0 * a * r * c2 * wr + 2.0 * b * c2 * wf + 2.0 * b * r * cs * wr - 2.0 * a * cs * wf - r * sf * bz
            + r * sz * bphi
            - b * wf)
            / r,
        2.0 * b * r * c2 * wr - 2.0 * a * c2 * wf - 2.0 * a * r * cs * wr - 2.0 * b * cs * wf + r * r * wz
            - b * r * wr
            + sr * bz
            - sz * br
            + 2.0 * a * wf,
        sf * br - sr * bphi + wf,
    ])
}

/// Right-hand side of the first-order block of `X2`, what `∇M` must equal.
fn x2_gradient_rhs(f: &dyn CoefficientField, pt: &CylPoint) -> Result<[f64; 3], DetError> {
    let Local { br, bphi, bz, .. } = Local::new(f, pt);
    let wz = f.gradient(Coef::W, pt).ok_or(DetError::Unavailable(Coef::W))?[2];
    let big_sr = val(f, Coef::BigSR, pt);
    let big_sf = val(f, Coef::BigSPhi, pt);
    let big_sz = val(f, Coef::BigSZ, pt);
    Ok([
        big_sz * bphi - big_sf * bz,
        big_sr * bz - big_sz * br,
        -big_sr * bphi + big_sf * br + 2.0 * wz,
    ])
}

/// `|∇m − G|` or `|∇M − G|` componentwise in `(r, φ, Z)` order. Requires
/// closed forms for the momentum-free parts.
pub fn residual_first_order(
    f: &dyn CoefficientField,
    pt: &CylPoint,
    which: Integral,
) -> Result<[f64; 3], DetError> {
    let (coef, rhs) = match which {
        Integral::X1 => (Coef::M, x1_gradient_rhs(f, pt)?),
        Integral::X2 => (Coef::BigM, x2_gradient_rhs(f, pt)?),
    };
    let g = f.gradient(coef, pt).ok_or(DetError::Unavailable(coef))?;
    Ok(std::array::from_fn(|k| (g[k] - rhs[k]).abs()))
}

/// `|s_r ∂_r W + s_φ ∂_φ W + s_Z ∂_Z W|` with the coefficients of the
/// chosen integral.
pub fn residual_zeroth(f: &dyn CoefficientField, pt: &CylPoint, which: Integral) -> Result<f64, DetError> {
    let [wr, wf, wz] = f.gradient(Coef::W, pt).ok_or(DetError::Unavailable(Coef::W))?;
    let [cr, cf, cz] = match which {
        Integral::X1 => [Coef::SR, Coef::SPhi, Coef::SZ],
        Integral::X2 => [Coef::BigSR, Coef::BigSPhi, Coef::BigSZ],
    };
    Ok((val(f, cr, pt) * wr + val(f, cf, pt) * wf + val(f, cz, pt) * wz).abs())
}
