//! Adaptive Gauss–Kronrod quadrature and the substitutions used for
//! semi-infinite and weakly singular integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_478,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// 10-point Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// One 21-point Gauss–Kronrod panel: (Kronrod estimate, |Kronrod − Gauss|).
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[10] * fc;
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration over `[a, b]` split first at `breaks`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> QuadResult {
    let mut pts: Vec<f64> = vec![a, b];
    pts.extend(breaks.iter().copied().filter(|p| p.is_finite() && *p > a && *p < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap = BinaryHeap::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in pts.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    while heap.len() < opts.max_intervals {
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let n = heap.len();
    let (value, error) = heap.into_iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    QuadResult { value, error, intervals: n }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    integrate_with_breaks(f, a, b, &[], opts)
}

/// `∫_a^∞ f(y) dy` through `y = a + c (1/τ² − 1)`, which maps algebraic decay
/// `y^{-p}` with `p ≥ 3/2` to a bounded integrand on `τ ∈ (0, 1]`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, opts: QuadOptions) -> QuadResult {
    let c = scale.abs().max(f64::MIN_POSITIVE);
    let g = |tau: f64| {
        if tau <= 0.0 {
            return 0.0;
        }
        let inv = 1.0 / (tau * tau);
        let y = a + c * (inv - 1.0);
        if !y.is_finite() {
            return 0.0;
        }
        let v = f(y) * 2.0 * c * inv / tau;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let breaks: Vec<f64> = (1..40).map(|k| 0.5f64.powi(k)).collect();
    integrate_with_breaks(g, 0.0, 1.0, &breaks, opts)
}

/// `∫_0^b f(r) dr` through `r = b σ²`, which removes `r^{-1/2}` endpoint
/// singularities at the origin.
pub fn integrate_sqrt_origin<F: Fn(f64) -> f64>(f: F, b: f64, opts: QuadOptions) -> QuadResult {
    let g = |sigma: f64| {
        let r = b * sigma * sigma;
        if r <= 0.0 {
            return 0.0;
        }
        f(r) * 2.0 * b * sigma
    };
    let breaks: Vec<f64> = (1..30).map(|k| 0.5f64.powi(k)).collect();
    integrate_with_breaks(g, 0.0, 1.0, &breaks, opts)
}

/// Riemann zeta function for real `s ≠ 1` (Euler–Maclaurin with 10 Bernoulli terms).
pub fn zeta(s: f64) -> f64 {
    const B2K: [f64; 10] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
        -174611.0 / 330.0,
    ];
    let n = 30.0f64;
    let mut acc: f64 = (1..30).map(|k| (k as f64).powf(-s)).sum();
    acc += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Running factor s(s+1)...(s+2k-2) / (2k)!.
    let mut rising = s;
    let mut fact = 2.0;
    for (k, b) in B2K.iter().enumerate() {
        let k = k as f64 + 1.0;
        acc += b / fact * rising * n.powf(-s - 2.0 * k + 1.0);
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    acc
}
