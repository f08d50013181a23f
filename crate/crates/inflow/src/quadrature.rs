//! Fixed quadrature rules used throughout the discretization.
//!
//! Triangle rules are given in barycentric coordinates with weights that sum
//! to one; multiply by the triangle area. Segment rules live on [-1, 1].

/// Barycentric point and normalized weight of a triangle rule.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub lambda: [f64; 3],
    pub weight: f64,
}

/// 6-point rule, exact for polynomials of degree 4. Used for all bilinear
/// (mass/stiffness/divergence) and load integrals.
pub const TRI_DEGREE_4: [TriPoint; 6] = {
    const A1: f64 = 0.445948490915965;
    const B1: f64 = 0.108103018168070;
    const W1: f64 = 0.223381589678011;
    const A2: f64 = 0.091576213509771;
    const B2: f64 = 0.816847572980459;
    const W2: f64 = 0.109951743655322;
    [
        TriPoint { lambda: [B1, A1, A1], weight: W1 },
        TriPoint { lambda: [A1, B1, A1], weight: W1 },
        TriPoint { lambda: [A1, A1, B1], weight: W1 },
        TriPoint { lambda: [B2, A2, A2], weight: W2 },
        TriPoint { lambda: [A2, B2, A2], weight: W2 },
        TriPoint { lambda: [A2, A2, B2], weight: W2 },
    ]
};

/// 7-point rule, exact for polynomials of degree 5. Used for the convective
/// trilinear form and for non-polynomial diagnostic integrands.
pub const TRI_DEGREE_5: [TriPoint; 7] = {
    const A1: f64 = 0.470142064105115;
    const B1: f64 = 0.059715871789770;
    const W1: f64 = 0.132394152788506;
    const A2: f64 = 0.101286507323456;
    const B2: f64 = 0.797426985353087;
    const W2: f64 = 0.125939180544827;
    const C: f64 = 1.0 / 3.0;
    [
        TriPoint { lambda: [C, C, C], weight: 0.225 },
        TriPoint { lambda: [B1, A1, A1], weight: W1 },
        TriPoint { lambda: [A1, B1, A1], weight: W1 },
        TriPoint { lambda: [A1, A1, B1], weight: W1 },
        TriPoint { lambda: [B2, A2, A2], weight: W2 },
        TriPoint { lambda: [A2, B2, A2], weight: W2 },
        TriPoint { lambda: [A2, A2, B2], weight: W2 },
    ]
};

/// 3-point Gauss-Legendre rule on [-1, 1], exact for degree 5. Used on
/// boundary segments and interior cross-sections.
pub const SEGMENT_GAUSS_3: [(f64, f64); 3] = {
    // nodes +-sqrt(3/5), 0 with weights 5/9, 8/9
    const X: f64 = 0.774596669241483_4;
    const W0: f64 = 5.0 / 9.0;
    const W1: f64 = 8.0 / 9.0;
    [(-X, W0), (0.0, W1), (X, W0)]
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Used for high-order reference quadrature.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    if n == 1 {
        return vec![(0.0, 2.0)];
    }
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, descending roots for ascending i
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative via three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// High-order triangle rule via the Duffy (collapsed square) transform of an
/// n x n tensor Gauss grid. Exact for polynomial degree roughly `2n - 2`;
/// intended for oracle/error integrals, not assembly.
pub fn duffy_rule(n: usize) -> Vec<TriPoint> {
    let g = gauss_legendre(n);
    let mut pts = Vec::with_capacity(n * n);
    for &(xs, ws) in &g {
        let s = 0.5 * (xs + 1.0);
        for &(xt, wt) in &g {
            let t = 0.5 * (xt + 1.0);
            // (s, t) in [0,1]^2 -> barycentric with Jacobian s; the factor 2
            // normalizes weights to sum to 1 on the reference triangle.
            let l1 = s * (1.0 - t);
            let l2 = s * t;
            let l0 = 1.0 - s;
            pts.push(TriPoint {
                lambda: [l0, l1, l2],
                weight: 0.25 * ws * wt * s * 2.0,
            });
        }
    }
    pts
}
