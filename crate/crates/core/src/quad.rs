//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Integration starts from caller-supplied breakpoints and repeatedly bisects
//! the panel with the largest error estimate until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)`. Panels whose estimate has hit the rounding
//! floor are retired instead of being split further.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_373_421,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Weights of the embedded 10-point Gauss rule (nodes XGK[1], XGK[3], …).
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default cap on the number of bisections.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    // error estimate already at the rounding floor
    floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();

    // QUADPACK error rescaling
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let mut floor = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err >= err {
            err = min_err;
            floor = true;
        }
    }
    Panel {
        a,
        b,
        value,
        err,
        floor,
    }
}

/// Integrates `f` over `[points[0], points[last]]`, using every entry of
/// `points` as an initial panel boundary.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::Domain(
            "integration needs at least two breakpoints".into(),
        ));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "integration breakpoints must be strictly increasing".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut retired_value = 0.0;
    let mut retired_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        let panel = gauss_kronrod(&f, w[0], w[1]);
        evaluations += 21;
        heap.push(panel);
    }
    let mut subdivisions = 0;
    loop {
        let live_value: f64 = heap.iter().map(|p| p.value).sum();
        let live_err: f64 = heap.iter().map(|p| p.err).sum();
        let value = live_value + retired_value;
        let err = live_err + retired_err;
        if !value.is_finite() {
            return Err(Error::Overflow(format!(
                "integrand produced a non-finite value on [{}, {}]",
                points[0],
                points[points.len() - 1]
            )));
        }
        if err <= abs_tol.max(rel_tol * value.abs()) || heap.is_empty() {
            return Ok(Integral {
                value,
                abs_err: err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = mid <= worst.a || mid >= worst.b;
        if worst.floor || too_narrow {
            retired_value += worst.value;
            retired_err += worst.err;
            continue;
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                a: points[0],
                b: points[points.len() - 1],
                abs_err: err,
                subdivisions,
            });
        }
        subdivisions += 1;
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        evaluations += 42;
    }
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    integrate_with_breaks(f, &[a, b], rel_tol, 0.0, DEFAULT_MAX_SUBDIVISIONS)
}

/// Breakpoints for `∫₀^T g(t) e^{-xt} dt`: a short first panel of width
/// `min(1/x, T)/2^levels` followed by geometrically doubling panels up to `T`.
///
/// Keeps the Kronrod nodes from stepping over a narrow peak when `x` is large.
pub fn laplace_breaks(x: f64, horizon: f64) -> Vec<f64> {
    let mut first = (1.0 / x).min(horizon) / 8.0;
    if !(first > 0.0) {
        first = horizon / 8.0;
    }
    let mut points = vec![0.0];
    let mut edge = first;
    while edge < horizon {
        points.push(edge);
        edge *= 2.0;
    }
    points.push(horizon);
    points
}
