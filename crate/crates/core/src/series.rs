//! Cancellation-free kernels for the removable singularities that appear in
//! the potential, the comparison potential and the nonlinearity.
//!
//! Every kernel is an even entire function of its argument. Below
//! [`TAYLOR_RADIUS`] it is summed from its Maclaurin series in `x^2`; above it
//! the closed form is used, whose relative rounding error is then at most
//! about `1e-16 / TAYLOR_RADIUS^4`.

/// Switch-over radius between the Taylor branch and the closed form.
pub const TAYLOR_RADIUS: f64 = 0.1;

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

/// `sin x / x`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let y = x * x;
        1.0 - y / 6.0 + y * y / 120.0
    } else {
        x.sin() / x
    }
}

/// `(sin 2x - 2x) / x^3`, limit `-4/3`.
pub fn sin2_rem(x: f64) -> f64 {
    const C: [f64; 8] = [
        -4.0 / 3.0,
        4.0 / 15.0,
        -8.0 / 315.0,
        4.0 / 2835.0,
        -8.0 / 155925.0,
        8.0 / 6081075.0,
        -16.0 / 638512875.0,
        4.0 / 10854718875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        ((2.0 * x).sin() - 2.0 * x) / (x * x * x)
    }
}

/// `(1 - cos 2x) / x^2 = 2 sinc(x)^2`, limit `2`.
pub fn cos2_rem(x: f64) -> f64 {
    let s = sinc(x);
    2.0 * s * s
}

/// `(cos 2x - 1 + 2x^2) / x^4`, limit `2/3`.
pub fn cos2_rem4(x: f64) -> f64 {
    const C: [f64; 8] = [
        2.0 / 3.0,
        -4.0 / 45.0,
        2.0 / 315.0,
        -4.0 / 14175.0,
        4.0 / 467775.0,
        -8.0 / 42567525.0,
        2.0 / 638512875.0,
        -4.0 / 97692469875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        let s = x.sin();
        // cos 2x - 1 = -2 sin^2 x
        (2.0 * x * x - 2.0 * s * s) / (x * x * x * x)
    }
}

/// `(sin 4x - 4x) / x^3 = 8 sin2_rem(2x)`.
pub fn sin4_rem(x: f64) -> f64 {
    8.0 * sin2_rem(2.0 * x)
}

/// `(cos 4x - 1 + 8x^2) / x^4 = 16 cos2_rem4(2x)`.
pub fn cos4_rem4(x: f64) -> f64 {
    16.0 * cos2_rem4(2.0 * x)
}

/// Quintic factor `(x - sin 2x / 2 - x cos 2x + sin 4x / 4) / x^5`, limit `4/3`.
///
/// Equals `(x - sin x cos x)(1 - cos 2x) / x^5`.
pub fn quintic(x: f64) -> f64 {
    const C: [f64; 8] = [
        4.0 / 3.0,
        -32.0 / 45.0,
        164.0 / 945.0,
        -368.0 / 14175.0,
        1256.0 / 467775.0,
        -3968.0 / 19348875.0,
        7708.0 / 638512875.0,
        -55184.0 / 97692469875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        let s = x.sin();
        (x - x.sin() * x.cos()) * 2.0 * s * s / x.powi(5)
    }
}

/// `(x - sin x cos x) / x^3`, limit `2/3`.
pub fn twist_rem(x: f64) -> f64 {
    const C: [f64; 8] = [
        2.0 / 3.0,
        -2.0 / 15.0,
        4.0 / 315.0,
        -2.0 / 2835.0,
        4.0 / 155925.0,
        -4.0 / 6081075.0,
        8.0 / 638512875.0,
        -2.0 / 10854718875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        (x - 0.5 * (2.0 * x).sin()) / (x * x * x)
    }
}

/// `x - sin x cos x`, evaluated without cancellation near 0.
pub fn twist(x: f64) -> f64 {
    if x.abs() < TAYLOR_RADIUS {
        twist_rem(x) * x * x * x
    } else {
        x - 0.5 * (2.0 * x).sin()
    }
}

/// Quadratic coefficient kernel `(3 sin 2x - 2 sin 4x + 2x cos 2x) / x^3`, limit `40/3`.
pub fn quad_rem(x: f64) -> f64 {
    const C: [f64; 8] = [
        40.0 / 3.0,
        -224.0 / 15.0,
        656.0 / 105.0,
        -4048.0 / 2835.0,
        32656.0 / 155925.0,
        -3968.0 / 184275.0,
        1048288.0 / 638512875.0,
        -1048496.0 / 10854718875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        (3.0 * (2.0 * x).sin() - 2.0 * (4.0 * x).sin() + 2.0 * x * (2.0 * x).cos()) / (x * x * x)
    }
}

/// Potential kernel `(1 - 2 cos 2x + 2x sin 2x + cos 4x) / x^4`, limit `20/3`.
pub fn potential_rem(x: f64) -> f64 {
    const C: [f64; 8] = [
        20.0 / 3.0,
        -224.0 / 45.0,
        164.0 / 105.0,
        -4048.0 / 14175.0,
        16328.0 / 467775.0,
        -3968.0 / 1289925.0,
        131036.0 / 638512875.0,
        -1048496.0 / 97692469875.0,
    ];
    if x.abs() < TAYLOR_RADIUS {
        horner(&C, x * x)
    } else {
        (1.0 - 2.0 * (2.0 * x).cos() + 2.0 * x * (2.0 * x).sin() + (4.0 * x).cos()) / x.powi(4)
    }
}
