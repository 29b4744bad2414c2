#![allow(dead_code)]

use ecfnorm::alt::density_bivariate;
use ecfnorm::{sample_alt, AlternativeSpec, RngStream, TransformConstants};
use num_bigint::BigInt;
use num_bigint::Sign;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Fraction bits of the fixed-point accumulator.
const FRAC_BITS: i64 = 320;

/// `J0(z)` from the Taylor series `sum (-1)^k (z^2/4)^k / (k!)^2`, summed in
/// exact big-integer fixed point so cancellation between huge alternating
/// terms costs nothing. Terms are added until they drop below 2^-200 past the
/// peak.
pub fn j0_series_oracle(z: f64) -> f64 {
    let z = z.abs();
    if z == 0.0 {
        return 1.0;
    }
    let bits = z.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let (mant, exp) = if raw_exp == 0 {
        ((bits & ((1u64 << 52) - 1)) as i64, -1074)
    } else {
        (
            ((bits & ((1u64 << 52) - 1)) | (1u64 << 52)) as i64,
            raw_exp - 1075,
        )
    };
    // q = z^2 / 4 = mant^2 * 2^(2 exp - 2)
    let mant2 = BigInt::from(mant) * BigInt::from(mant);
    let shift = 2 * exp - 2;
    let q_approx = z * z / 4.0;

    let one = BigInt::from(1) << FRAC_BITS as usize;
    let tiny = BigInt::from(1) << (FRAC_BITS - 200) as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    loop {
        term *= &mant2;
        if shift >= 0 {
            term <<= shift as usize;
        } else {
            term >>= (-shift) as usize;
        }
        term /= BigInt::from(k * k);
        term = -term;
        sum += &term;
        let magnitude = if term.sign() == Sign::Minus {
            -term.clone()
        } else {
            term.clone()
        };
        if (k as f64) > q_approx.sqrt() + 2.0 && magnitude < tiny {
            break;
        }
        k += 1;
    }
    // Keep 64 fraction bits, then convert.
    let scaled: BigInt = sum >> (FRAC_BITS - 64) as usize;
    let (sign, digits) = scaled.to_u64_digits();
    assert!(digits.len() <= 1, "J0 oracle out of range");
    let mag = digits.first().copied().unwrap_or(0) as f64 / 2f64.powi(64);
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// Small deterministic generator for test data (SplitMix64).
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 16-point Gauss-Legendre over `[lo, hi]`. Infinite ends are
/// mapped to a finite interval with `x = c +- t / (1 - t)`.
pub fn integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    thread_local! {
        static GL: Vec<(f64, f64)> = gauss_legendre(16);
    }
    let finite = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        GL.with(|gl| {
            let h = (b - a) / panels as f64;
            let mut s = 0.0;
            for p in 0..panels {
                let mid = a + (p as f64 + 0.5) * h;
                for &(x, w) in gl {
                    s += w * g(mid + 0.5 * h * x);
                }
            }
            0.5 * h * s
        })
    };
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => finite(f, lo, hi),
        (true, false) => finite(
            &|t: f64| f(lo + t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)),
            0.0,
            1.0,
        ),
        (false, true) => finite(
            &|t: f64| f(hi - t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)),
            0.0,
            1.0,
        ),
        (false, false) => {
            integrate(f, f64::NEG_INFINITY, 0.0, panels) + integrate(f, 0.0, f64::INFINITY, panels)
        }
    }
}

pub fn integrate_2d(
    f: &dyn Fn(f64, f64) -> f64,
    x: (f64, f64),
    y: (f64, f64),
    panels: usize,
) -> f64 {
    integrate(
        &|a| integrate(&|b| f(a, b), y.0, y.1, panels),
        x.0,
        x.1,
        panels,
    )
}

/// Lower support bounds of a bivariate law.
pub fn support_lower(spec: &AlternativeSpec) -> [f64; 2] {
    match *spec {
        AlternativeSpec::BivLogN { sigma1, sigma2, .. } => {
            let c = TransformConstants::lognormal(sigma1, sigma2);
            [-c.a[0] / c.b[0], -c.a[1] / c.b[1]]
        }
        _ => [f64::NEG_INFINITY; 2],
    }
}

/// Integral of the density over the plane.
pub fn density_mass(spec: &AlternativeSpec) -> f64 {
    let lo = support_lower(spec);
    let f = |a: f64, b: f64| density_bivariate(spec, [a, b]).unwrap();
    integrate_2d(&f, (lo[0], f64::INFINITY), (lo[1], f64::INFINITY), 48)
}

/// Outcome of a grid chi-square goodness-of-fit test.
#[derive(Debug)]
pub struct GridChi2 {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub total_probability: f64,
}

/// Draws `draws` points from `spec` and compares cell counts on an 8 x 8
/// grid with cell probabilities integrated from the density. Cell edges are
/// marginal octiles of an independent pilot sample; cells expecting fewer
/// than 5 points are pooled.
pub fn chi2_grid_test(spec: &AlternativeSpec, draws: usize, seed: u64) -> GridChi2 {
    const BINS: usize = 8;
    let pilot = sample_alt(spec, 20_000, &mut RngStream::new(seed, 1)).unwrap();
    let lo = support_lower(spec);
    let edges: Vec<Vec<f64>> = (0..2)
        .map(|j| {
            let mut col = pilot.column(j);
            col.sort_by(f64::total_cmp);
            let mut e = vec![lo[j]];
            e.extend((1..BINS).map(|k| col[k * col.len() / BINS]));
            e.push(f64::INFINITY);
            e
        })
        .collect();
    let cell = |x: f64, e: &[f64]| e[1..BINS].partition_point(|&b| b <= x);
    let x = sample_alt(spec, draws, &mut RngStream::new(seed, 2)).unwrap();
    let mut observed = [[0usize; BINS]; BINS];
    for k in 0..draws {
        let r = x.row(k);
        observed[cell(r[0], &edges[0])][cell(r[1], &edges[1])] += 1;
    }
    let f = |a: f64, b: f64| density_bivariate(spec, [a, b]).unwrap();
    let mut cells = Vec::new();
    let mut total_probability = 0.0;
    for i in 0..BINS {
        for j in 0..BINS {
            let p = integrate_2d(
                &f,
                (edges[0][i], edges[0][i + 1]),
                (edges[1][j], edges[1][j + 1]),
                4,
            );
            total_probability += p;
            cells.push((draws as f64 * p, observed[i][j] as f64));
        }
    }
    let (mut pooled_e, mut pooled_o) = (0.0, 0.0);
    let mut statistic = 0.0;
    let mut n_cells = 0;
    for (e, o) in cells {
        if e < 5.0 {
            pooled_e += e;
            pooled_o += o;
        } else {
            statistic += (o - e) * (o - e) / e;
            n_cells += 1;
        }
    }
    if pooled_e > 0.0 {
        statistic += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e.max(1e-300);
        n_cells += 1;
    }
    let df = n_cells - 1;
    let p_value = 1.0 - ChiSquared::new(df as f64).unwrap().cdf(statistic);
    GridChi2 {
        statistic,
        df,
        p_value,
        total_probability,
    }
}

/// Bivariate laws covering every family and the parameter corners of the
/// power tables.
pub fn bivariate_checklist() -> Vec<AlternativeSpec> {
    [
        "BivN(0,0,1,1,0.5)",
        "BivN(1,-1,2,0.5,-0.3)",
        "NMixA(0.3)",
        "NMixA(-0.5)",
        "NMixB(0.5)",
        "LogN(1,1,0.5)",
        "LogN(0.05,0.5,-0.3)",
        "SinhInvN(0,0,1,1,0.5)",
        "SinhInvN(0,2,1,0.5,-0.3)",
        "GBPL(1,1)",
        "GBPL(1,-1)",
        "GBPL(2,1)",
        "GBPL(5,-1)",
        "GBPL(10,1)",
        "GBPL(10,-1)",
        "Morg(1)",
        "Morg(-0.75)",
        "PearVII(1)",
        "PearVII(10)",
        "IndepN2",
    ]
    .iter()
    .map(|s| AlternativeSpec::parse(s).unwrap())
    .collect()
}
