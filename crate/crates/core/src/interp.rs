//! Local polynomial interpolation on (possibly non-uniform) nodes.

/// Index of the cell `[x_i, x_{i+1}]` containing `x`, clamped to the table.
pub fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    debug_assert!(n >= 2);
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

/// First index of the 4-point stencil used for cell `i`.
pub fn stencil_start(n: usize, cell: usize) -> usize {
    cell.saturating_sub(1).min(n.saturating_sub(4))
}

/// Lagrange weights of the cubic through `xs[s..s+4]` evaluated at `x`.
pub fn lagrange4(xs: &[f64], s: usize, x: f64) -> [f64; 4] {
    let p = [xs[s], xs[s + 1], xs[s + 2], xs[s + 3]];
    let mut w = [1.0; 4];
    for j in 0..4 {
        for m in 0..4 {
            if m != j {
                w[j] *= (x - p[m]) / (p[j] - p[m]);
            }
        }
    }
    w
}

/// Value at `x` of the local cubic through the four nodes surrounding it.
pub fn cubic_at(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n < 4 {
        let i = locate(xs, x);
        let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] * (1.0 - t) + ys[i + 1] * t;
    }
    let s = stencil_start(n, locate(xs, x));
    let w = lagrange4(xs, s, x);
    w[0] * ys[s] + w[1] * ys[s + 1] + w[2] * ys[s + 2] + w[3] * ys[s + 3]
}

/// Cubic Hermite interpolation on `[x0, x1]` from values and slopes at both ends.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let y = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let dy = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (y, dy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_exact_on_cubics() {
        let xs: Vec<f64> = (0..12).map(|i| (0.3 * i as f64).exp()).collect();
        let f = |x: f64| 2.0 - x + 0.5 * x * x - 0.1 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for &x in &[1.0, 1.7, 5.5, 20.0, 29.0] {
            assert!((cubic_at(&xs, &ys, x) - f(x)).abs() < 1e-9 * f(x).abs().max(1.0));
        }
    }

    #[test]
    fn hermite_reproduces_cubic_and_slope() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let (y, d) = hermite(1.0, 2.0, f(1.0), f(2.0), df(1.0), df(2.0), 1.3);
        assert!((y - f(1.3)).abs() < 1e-14);
        assert!((d - df(1.3)).abs() < 1e-13);
    }

    #[test]
    fn locate_edges() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(locate(&xs, -1.0), 0);
        assert_eq!(locate(&xs, 1.0), 1);
        assert_eq!(locate(&xs, 3.0), 2);
        assert_eq!(locate(&xs, 2.5), 2);
    }
}
