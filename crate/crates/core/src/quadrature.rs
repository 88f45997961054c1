//! Adaptive Gauss-Kronrod quadrature on finite intervals and on `[0, inf)`.
//!
//! The half-line is mapped to `[0, 1)` by `t = u / (1 - u)`. Each panel is
//! integrated with the 15-point Kronrod rule and its embedded 7-point Gauss
//! rule; the panel with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |value|)`.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be positive and the budget nonzero: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

fn gauss_kronrod(
    f: &mut impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let res_asc = res_asc * scale;
    let res_abs = res_abs * scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    let mid = 0.5 * (a + b);
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        error,
        splittable: mid > a && mid < b,
    })
}

/// Adaptive integration of `f` over `[a, b]`; `f` may fail, which aborts the run.
pub fn integrate_fallible(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    let mut checked = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand(x))
        }
    };
    let mut panels = vec![gauss_kronrod(&mut checked, a, b)?];
    let mut subdivisions = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error_estimate: error,
                subdivisions,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i);
        let Some(worst) = worst.filter(|_| subdivisions < cfg.max_subdivisions) else {
            return Err(Error::QuadratureFailure {
                value,
                error_estimate: error,
                subdivisions,
            });
        };
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gauss_kronrod(&mut checked, p.a, mid)?);
        panels.push(gauss_kronrod(&mut checked, mid, p.b)?);
        subdivisions += 1;
    }
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_fallible(|x| Ok(f(x)), a, b, cfg)
}

/// Adaptive integration over `[0, inf)` through `t = u / (1 - u)`.
pub fn integrate_halfline_fallible(
    mut f: impl FnMut(f64) -> Result<f64>,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_fallible(
        |u| {
            let w = 1.0 - u;
            Ok(f(u / w)? / (w * w))
        },
        0.0,
        1.0,
        cfg,
    )
}

pub fn integrate_halfline(f: impl Fn(f64) -> f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_halfline_fallible(|t| Ok(f(t)), cfg)
}
