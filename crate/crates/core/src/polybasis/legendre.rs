//! One-dimensional Legendre polynomials on `[-1, 1]` and Gauss–Legendre rules.

/// Values, first and second derivatives of `P_0..=P_n` at `x`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub value: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl LegendreTable {
    pub fn new(x: f64, n: usize) -> Self {
        let mut value = vec![0.0; n + 1];
        let mut d1 = vec![0.0; n + 1];
        let mut d2 = vec![0.0; n + 1];
        value[0] = 1.0;
        if n >= 1 {
            value[1] = x;
            d1[1] = 1.0;
        }
        for k in 1..n {
            let kf = k as f64;
            value[k + 1] = ((2.0 * kf + 1.0) * x * value[k] - kf * value[k - 1]) / (kf + 1.0);
            // P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same recurrence one order up
            d1[k + 1] = d1[k - 1] + (2.0 * kf + 1.0) * value[k];
            d2[k + 1] = d2[k - 1] + (2.0 * kf + 1.0) * d1[k];
        }
        Self { value, d1, d2 }
    }
}

/// Legendre coefficients of the monomial `x^a`.
pub fn monomial_in_legendre(a: usize) -> Vec<f64> {
    // x * P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1)
    let mut coeffs = vec![0.0; a + 1];
    coeffs[0] = 1.0;
    for step in 0..a {
        let mut next = vec![0.0; a + 1];
        for k in 0..=step {
            let c = coeffs[k];
            if c == 0.0 {
                continue;
            }
            let kf = k as f64;
            next[k + 1] += c * (kf + 1.0) / (2.0 * kf + 1.0);
            if k > 0 {
                next[k - 1] += c * kf / (2.0 * kf + 1.0);
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Gauss–Legendre nodes (ascending) and weights with `n` points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}
