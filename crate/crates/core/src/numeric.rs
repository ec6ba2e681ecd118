//! Small deterministic numeric helpers shared across modules.

/// Any intermediate beyond this magnitude is treated as an overflow.
pub(crate) const OVERFLOW_GUARD: f64 = 1e300;

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pure function of (master, index); keeps per-instance streams independent.
pub(crate) fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_mul(0xA076_1D64_78BD_642F)))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximum of a concave (or unimodal) function on [lo, hi].
/// Returns (argmax, max). Tolerates -inf plateaus at the edges.
pub(crate) fn golden_section_max<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section minimum of a unimodal function on [lo, hi].
pub(crate) fn golden_section_min<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    iters: usize,
) -> (f64, f64) {
    let (x, v) = golden_section_max(|t| -f(t), lo, hi, iters);
    (x, -v)
}
