//! Internal optimization machinery: a small dense-simplex LP solver with
//! unboundedness certificates, an away-step Frank-Wolfe loop on probability
//! simplices, and a derivative-free concave ascent for unconstrained
//! conjugate evaluations.  Problem sizes here are desk scale (a handful of
//! variables per block), so everything favours determinism and certificates
//! over speed.

pub(crate) mod ascent;
pub(crate) mod fw;
pub(crate) mod lp;

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
/// Returns the argmax and the value.
pub(crate) fn golden_max(
    f: &mut dyn FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    iters: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // evaluate the midpoint and the original endpoints to settle ties
    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    let mut best = (mid, fmid);
    for (t, v) in [(lo, f(lo)), (hi, f(hi)), (c, fc), (d, fd)] {
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}
