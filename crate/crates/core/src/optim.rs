//! One-dimensional search helpers.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut guard = 0;
    while (b - a).abs() > tol && guard < 400 {
        guard += 1;
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((x, fx), |best, cand| if cand.1 > best.1 { cand } else { best })
}

/// Global-ish maximization on `[a, b]`: uniform scan with `samples` points,
/// then golden refinement in the neighbourhood of the best `keep` samples.
pub fn scan_max(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize, keep: usize, tol: f64) -> (f64, f64) {
    let h = (b - a) / (samples - 1) as f64;
    let vals: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let x = if i + 1 == samples { b } else { a + i as f64 * h };
            (x, f(x))
        })
        .collect();
    // Local maxima of the sampled sequence, best first.
    let mut peaks: Vec<usize> = (0..samples)
        .filter(|&i| {
            let left = i == 0 || vals[i - 1].1 <= vals[i].1;
            let right = i + 1 == samples || vals[i + 1].1 <= vals[i].1;
            left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| vals[j].1.total_cmp(&vals[i].1));
    let mut best = vals[peaks[0]];
    for &i in peaks.iter().take(keep) {
        let lo = if i == 0 { a } else { vals[i - 1].0 };
        let hi = if i + 1 == samples { b } else { vals[i + 1].0 };
        let cand = golden_max(&f, lo, hi, tol);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// Bisection on a bracketed sign change. Stops when the bracket is below
/// `xtol` or `|f| < ftol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64, ftol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.abs() < ftol || (b - a) < xtol {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All roots of `f` on `[a, b]` found by sign changes on a uniform grid.
pub fn grid_roots(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize, xtol: f64, ftol: f64) -> Vec<f64> {
    let h = (b - a) / cells as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    if f0 == 0.0 {
        roots.push(a);
    }
    for i in 1..=cells {
        let x1 = if i == cells { b } else { a + i as f64 * h };
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0) {
            roots.push(bisect(&f, x0, x1, xtol, ftol));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}
