//! Alternative distributions for power studies.
//!
//! Every alternative has a canonical text form such as `MixN(0.3,1,0.25)`,
//! `BivN(0,0,1,1,0.5)` or `PearVII(10)`. [`AlternativeSpec::parse`] accepts
//! that form (plus `sqrt(x)` for arguments) with exact arity checking, and
//! `Display` writes it back.

mod copula;
mod density;
mod sample;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use copula::{
    gbpl_sample_copula, morgenstern_conditional_cdf, morgenstern_conditional_inverse,
    pearvii_radial_cdf, pearvii_radial_inverse, GbplCopula,
};
pub use density::{density_bivariate, gbpl_printed_density, std_normal_cdf, std_normal_pdf};
pub use sample::sample_alt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlternativeSpec {
    /// `(1 - p) N(0, 1) + p N(mu, var)`.
    MixN {
        p: f64,
        mu: f64,
        var: f64,
    },
    StudentT {
        nu: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    ChiSq {
        nu: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    /// Shape and scale, so `Gamma(1,5)` has mean 5.
    Gamma {
        shape: f64,
        scale: f64,
    },
    Gumbel {
        mu: f64,
        sigma: f64,
    },
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    Normal {
        mu: f64,
        var: f64,
    },
    StdNormal,
    BivNorm {
        mu1: f64,
        mu2: f64,
        sigma1: f64,
        sigma2: f64,
        rho: f64,
    },
    /// `1/2 BivN(0,0,1,1,rho) + 1/2 BivN(1,1,1,1,0.9)`.
    NMixA {
        rho: f64,
    },
    /// `1/2 BivN(0,0,1,1,rho) + 1/2 BivN(0,0,1,1,-rho)`.
    NMixB {
        rho: f64,
    },
    BivLogN {
        sigma1: f64,
        sigma2: f64,
        rho: f64,
    },
    SinhInvN {
        mu1: f64,
        mu2: f64,
        sigma1: f64,
        sigma2: f64,
        rho: f64,
    },
    Gbpl {
        alpha: f64,
        beta: f64,
    },
    Morgenstern {
        alpha: f64,
    },
    PearsonVII {
        alpha: f64,
    },
    IndepStdNormal2,
}

use AlternativeSpec as A;

impl AlternativeSpec {
    /// Number of columns a sample from this law has.
    pub fn dim(&self) -> usize {
        match self {
            A::MixN { .. }
            | A::StudentT { .. }
            | A::Uniform { .. }
            | A::ChiSq { .. }
            | A::Beta { .. }
            | A::Gamma { .. }
            | A::Gumbel { .. }
            | A::LogNormal { .. }
            | A::Normal { .. }
            | A::StdNormal => 1,
            _ => 2,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            A::MixN { .. } => "MixN",
            A::StudentT { .. } => "t",
            A::Uniform { .. } => "U",
            A::ChiSq { .. } => "ChiSq",
            A::Beta { .. } => "B",
            A::Gamma { .. } => "Gamma",
            A::Gumbel { .. } => "Gum",
            A::LogNormal { .. } => "LN",
            A::Normal { .. } => "N",
            A::StdNormal => "StdNormal",
            A::BivNorm { .. } => "BivN",
            A::NMixA { .. } => "NMixA",
            A::NMixB { .. } => "NMixB",
            A::BivLogN { .. } => "LogN",
            A::SinhInvN { .. } => "SinhInvN",
            A::Gbpl { .. } => "GBPL",
            A::Morgenstern { .. } => "Morg",
            A::PearsonVII { .. } => "PearVII",
            A::IndepStdNormal2 => "IndepN2",
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            A::MixN { p, mu, var } => vec![p, mu, var],
            A::StudentT { nu } | A::ChiSq { nu } => vec![nu],
            A::Uniform { a, b } | A::Beta { a, b } => vec![a, b],
            A::Gamma { shape, scale } => vec![shape, scale],
            A::Gumbel { mu, sigma } | A::LogNormal { mu, sigma } => vec![mu, sigma],
            A::Normal { mu, var } => vec![mu, var],
            A::StdNormal | A::IndepStdNormal2 => vec![],
            A::BivNorm {
                mu1,
                mu2,
                sigma1,
                sigma2,
                rho,
            }
            | A::SinhInvN {
                mu1,
                mu2,
                sigma1,
                sigma2,
                rho,
            } => vec![mu1, mu2, sigma1, sigma2, rho],
            A::NMixA { rho } | A::NMixB { rho } => vec![rho],
            A::BivLogN {
                sigma1,
                sigma2,
                rho,
            } => vec![sigma1, sigma2, rho],
            A::Gbpl { alpha, beta } => vec![alpha, beta],
            A::Morgenstern { alpha } | A::PearsonVII { alpha } => vec![alpha],
        }
    }

    /// The correlation parameter of the normal-derived families.
    pub fn rho(&self) -> Option<f64> {
        match *self {
            A::BivNorm { rho, .. }
            | A::NMixA { rho }
            | A::NMixB { rho }
            | A::BivLogN { rho, .. }
            | A::SinhInvN { rho, .. } => Some(rho),
            _ => None,
        }
    }

    /// The same family with its correlation parameter replaced.
    pub fn with_rho(&self, new: f64) -> Option<Self> {
        let mut out = *self;
        match &mut out {
            A::BivNorm { rho, .. }
            | A::NMixA { rho }
            | A::NMixB { rho }
            | A::BivLogN { rho, .. }
            | A::SinhInvN { rho, .. } => *rho = new,
            _ => return None,
        }
        Some(out)
    }

    /// Checks parameter domains.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Domain(format!("{self}: {what}")));
        if self.params().iter().any(|v| !v.is_finite()) {
            return fail("parameters must be finite");
        }
        let rho_ok = |r: f64| (-1.0..=1.0).contains(&r);
        match *self {
            A::MixN { p, var, .. } if !(0.0..=1.0).contains(&p) || var <= 0.0 => {
                fail("need p in [0, 1] and variance > 0")
            }
            A::StudentT { nu } | A::ChiSq { nu } if nu <= 0.0 => {
                fail("degrees of freedom must be > 0")
            }
            A::Uniform { a, b } if a >= b => fail("need a < b"),
            A::Beta { a, b } if a <= 0.0 || b <= 0.0 => fail("shape parameters must be > 0"),
            A::Gamma { shape, scale } if shape <= 0.0 || scale <= 0.0 => {
                fail("shape and scale must be > 0")
            }
            A::Gumbel { sigma, .. } | A::LogNormal { sigma, .. } if sigma <= 0.0 => {
                fail("scale must be > 0")
            }
            A::Normal { var, .. } if var <= 0.0 => fail("variance must be > 0"),
            A::BivNorm {
                sigma1,
                sigma2,
                rho,
                ..
            }
            | A::SinhInvN {
                sigma1,
                sigma2,
                rho,
                ..
            } if sigma1 <= 0.0 || sigma2 <= 0.0 || !rho_ok(rho) => {
                fail("need sigma_i > 0 and rho in [-1, 1]")
            }
            A::BivLogN {
                sigma1,
                sigma2,
                rho,
            } if sigma1 <= 0.0 || sigma2 <= 0.0 || !rho_ok(rho) => {
                fail("need sigma_i > 0 and rho in [-1, 1]")
            }
            A::NMixA { rho } | A::NMixB { rho } if !rho_ok(rho) => fail("rho must lie in [-1, 1]"),
            A::Gbpl { alpha, beta } if alpha <= 0.0 || !rho_ok(beta) => {
                fail("need alpha > 0 and beta in [-1, 1]")
            }
            A::Morgenstern { alpha } if !rho_ok(alpha) => fail("alpha must lie in [-1, 1]"),
            A::PearsonVII { alpha } if alpha <= 0.0 => fail("alpha must be > 0"),
            _ => Ok(()),
        }
    }

    /// Parses the canonical text form. `GammaRate(a,b)` reads `b` as a rate.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(open) => {
                let inner = text[open + 1..].strip_suffix(')').ok_or_else(|| {
                    Error::Parse(format!("`{text}`: missing closing parenthesis"))
                })?;
                let args = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(parse_number)
                        .collect::<Result<Vec<f64>>>()
                        .map_err(|e| Error::Parse(format!("`{text}`: {e}")))?
                };
                (text[..open].trim(), args)
            }
            None => (text, Vec::new()),
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "`{text}`: {name} takes {k} parameter(s), got {}",
                    args.len()
                )))
            }
        };
        let a = &args;
        let spec = match name {
            "MixN" => arity(3).map(|_| A::MixN {
                p: a[0],
                mu: a[1],
                var: a[2],
            }),
            "t" => arity(1).map(|_| A::StudentT { nu: a[0] }),
            "U" => arity(2).map(|_| A::Uniform { a: a[0], b: a[1] }),
            "ChiSq" => arity(1).map(|_| A::ChiSq { nu: a[0] }),
            "B" => arity(2).map(|_| A::Beta { a: a[0], b: a[1] }),
            "Gamma" => arity(2).map(|_| A::Gamma {
                shape: a[0],
                scale: a[1],
            }),
            "GammaRate" => arity(2).map(|_| A::Gamma {
                shape: a[0],
                scale: 1.0 / a[1],
            }),
            "Gum" => arity(2).map(|_| A::Gumbel {
                mu: a[0],
                sigma: a[1],
            }),
            "LN" => arity(2).map(|_| A::LogNormal {
                mu: a[0],
                sigma: a[1],
            }),
            "N" => arity(2).map(|_| A::Normal {
                mu: a[0],
                var: a[1],
            }),
            "StdNormal" => arity(0).map(|_| A::StdNormal),
            "BivN" => arity(5).map(|_| A::BivNorm {
                mu1: a[0],
                mu2: a[1],
                sigma1: a[2],
                sigma2: a[3],
                rho: a[4],
            }),
            "NMixA" => arity(1).map(|_| A::NMixA { rho: a[0] }),
            "NMixB" => arity(1).map(|_| A::NMixB { rho: a[0] }),
            "LogN" => arity(3).map(|_| A::BivLogN {
                sigma1: a[0],
                sigma2: a[1],
                rho: a[2],
            }),
            "SinhInvN" => arity(5).map(|_| A::SinhInvN {
                mu1: a[0],
                mu2: a[1],
                sigma1: a[2],
                sigma2: a[3],
                rho: a[4],
            }),
            "GBPL" => arity(2).map(|_| A::Gbpl {
                alpha: a[0],
                beta: a[1],
            }),
            "Morg" => arity(1).map(|_| A::Morgenstern { alpha: a[0] }),
            "PearVII" => arity(1).map(|_| A::PearsonVII { alpha: a[0] }),
            "IndepN2" => arity(0).map(|_| A::IndepStdNormal2),
            other => Err(Error::Parse(format!(
                "unknown alternative `{other}` in `{text}`"
            ))),
        }?;
        spec.validate()?;
        Ok(spec)
    }

    /// The alternatives of the univariate power tables, in table order.
    pub fn univariate_suite() -> Vec<Self> {
        let s3 = 3f64.sqrt();
        vec![
            A::Normal { mu: 1.0, var: 4.0 },
            A::MixN {
                p: 0.3,
                mu: 1.0,
                var: 0.25,
            },
            A::MixN {
                p: 0.5,
                mu: 1.0,
                var: 4.0,
            },
            A::StudentT { nu: 3.0 },
            A::StudentT { nu: 5.0 },
            A::StudentT { nu: 10.0 },
            A::Uniform { a: -s3, b: s3 },
            A::ChiSq { nu: 5.0 },
            A::ChiSq { nu: 15.0 },
            A::Beta { a: 1.0, b: 4.0 },
            A::Beta { a: 2.0, b: 5.0 },
            A::Gamma {
                shape: 1.0,
                scale: 5.0,
            },
            A::Gamma {
                shape: 5.0,
                scale: 1.0,
            },
            A::Gumbel {
                mu: 1.0,
                sigma: 2.0,
            },
            A::LogNormal {
                mu: 0.0,
                sigma: 1.0,
            },
        ]
    }

    /// The alternatives of the bivariate power table, in table order.
    pub fn bivariate_suite() -> Vec<Self> {
        let rhos = [0.0, 0.1, 0.3, 0.5, -0.1, -0.3, -0.5];
        let mut out = Vec::new();
        for &rho in &rhos[..4] {
            out.push(A::BivNorm {
                mu1: 0.0,
                mu2: 0.0,
                sigma1: 1.0,
                sigma2: 1.0,
                rho,
            });
        }
        for &rho in &rhos[4..] {
            out.push(A::BivNorm {
                mu1: 0.0,
                mu2: 0.0,
                sigma1: 1.0,
                sigma2: 1.0,
                rho,
            });
        }
        out.extend(rhos.iter().map(|&rho| A::NMixA { rho }));
        out.extend(rhos.iter().map(|&rho| A::NMixB { rho }));
        out.extend(rhos.iter().map(|&rho| A::BivLogN {
            sigma1: 1.0,
            sigma2: 1.0,
            rho,
        }));
        out.extend(rhos.iter().map(|&rho| A::BivLogN {
            sigma1: 0.05,
            sigma2: 0.5,
            rho,
        }));
        out.extend(rhos.iter().map(|&rho| A::SinhInvN {
            mu1: 0.0,
            mu2: 0.0,
            sigma1: 1.0,
            sigma2: 1.0,
            rho,
        }));
        out.extend(rhos.iter().map(|&rho| A::SinhInvN {
            mu1: 0.0,
            mu2: 2.0,
            sigma1: 1.0,
            sigma2: 0.5,
            rho,
        }));
        for beta in [-1.0, 1.0] {
            out.extend([1.0, 2.0, 5.0, 10.0].map(|alpha| A::Gbpl { alpha, beta }));
        }
        out.extend([0.5, 0.75, 1.0, -0.5, -0.75, -1.0].map(|alpha| A::Morgenstern { alpha }));
        out.extend([1.0, 2.0, 5.0, 10.0].map(|alpha| A::PearsonVII { alpha }));
        out
    }
}

fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let v = if let Some(arg) = body.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        arg.trim()
            .parse::<f64>()
            .map(f64::sqrt)
            .map_err(|_| Error::Parse(format!("bad number `{t}`")))?
    } else {
        body.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{t}`")))?
    };
    Ok(if neg { -v } else { v })
}

impl fmt::Display for AlternativeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            return f.write_str(self.name());
        }
        write!(f, "{}(", self.name())?;
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for AlternativeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for AlternativeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AlternativeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Location/scale constants `(a_i, b_i)` of the lognormal and
/// inverse-sinh-normal alternatives. `x_i = (w_i - a_i) / b_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformConstants {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl TransformConstants {
    /// `a = e^{s^2/2}`, `b = sqrt(e^{2 s^2} - e^{s^2})`: the lognormal's mean
    /// and standard deviation.
    pub fn lognormal(sigma1: f64, sigma2: f64) -> Self {
        let f = |s: f64| {
            let e = (s * s).exp();
            (e.sqrt(), (e * (e - 1.0)).sqrt())
        };
        let ((a1, b1), (a2, b2)) = (f(sigma1), f(sigma2));
        Self {
            a: [a1, a2],
            b: [b1, b2],
        }
    }

    /// `a = e^{s^2/2} sinh(mu)`, `b = sqrt((e^{s^2} - 1)(e^{s^2} cosh(2 mu) + 1))`.
    pub fn sinh_normal(mu: [f64; 2], sigma: [f64; 2]) -> Self {
        let f = |m: f64, s: f64| {
            let e = (s * s).exp();
            (
                e.sqrt() * m.sinh(),
                ((s * s).exp_m1() * (e * (2.0 * m).cosh() + 1.0)).sqrt(),
            )
        };
        let ((a1, b1), (a2, b2)) = (f(mu[0], sigma[0]), f(mu[1], sigma[1]));
        Self {
            a: [a1, a2],
            b: [b1, b2],
        }
    }
}
