//! Reference sequences with documented indices and verdicts.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::source::{Alternating, FnSource, RatioSource, TermSource};
use crate::value::SignedLogValue;
use crate::verdict::Conclusion;

/// How an entry's terms are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Power(f64),
    InvNLog,
    InvNLogSq,
    LogOverN,
    RaabeProduct,
    GammaRatio(f64),
    Wallis,
    DfactRatio(f64),
    GaussTelescoping,
    HypergeometricRatio,
    FloorExp,
    SinLogPower,
    OscillatingPower,
    AltInvLog,
    AltLog,
    AltHarmonic,
    AltGammaRatio(f64),
    AltExpTheta(f64),
}

/// A catalog sequence and what is known about it analytically.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    /// Name shared by the parametric variants, e.g. `gamma_ratio`.
    pub family: &'static str,
    pub formula: String,
    pub first_index: u64,
    /// Regular-variation index of `|a_n|`, when the sequence is regularly
    /// varying.
    pub alpha: Option<f64>,
    /// Verdict for `Σ a_n`.
    pub verdict: Conclusion,
    /// Limit of `n(α(n) − α)`, when known.
    pub second_order: Option<f64>,
    /// Where the documented values come from.
    pub provenance: String,
    /// `a_n` strictly alternates in sign.
    pub alternating: bool,
    /// `|a_n|` carries a slowly varying factor such as a power of `log n`,
    /// so `log|a_n|/log n` approaches `α` only at a logarithmic rate.
    pub log_factor: bool,
    /// Divergent-at-the-boundary entries where `n a_n / S_n → 0` is visible
    /// over a few decades.
    pub karamata_trend: bool,
    pub note: Option<&'static str>,
    kind: Kind,
}

fn ln(x: f64) -> f64 {
    libm::log(x)
}

impl CatalogEntry {
    fn new(
        name: impl Into<String>,
        family: &'static str,
        formula: impl Into<String>,
        kind: Kind,
        alpha: Option<f64>,
        verdict: Conclusion,
        provenance: impl Into<String>,
    ) -> Self {
        CatalogEntry {
            name: name.into(),
            family,
            formula: formula.into(),
            first_index: 1,
            alpha,
            verdict,
            second_order: None,
            provenance: provenance.into(),
            alternating: false,
            log_factor: false,
            karamata_trend: false,
            note: None,
            kind,
        }
    }

    fn first(mut self, n: u64) -> Self {
        self.first_index = n;
        self
    }

    fn second(mut self, limit: f64) -> Self {
        self.second_order = Some(limit);
        self
    }

    fn log_factor(mut self) -> Self {
        self.log_factor = true;
        self
    }

    fn trend(mut self) -> Self {
        self.karamata_trend = true;
        self
    }

    fn alternating(mut self) -> Self {
        self.alternating = true;
        self
    }

    fn note(mut self, note: &'static str) -> Self {
        self.note = Some(note);
        self
    }

    /// Builds the term source.
    pub fn source(&self) -> Box<dyn TermSource> {
        let name = self.name.clone();
        let alpha = self.alpha;
        let with_index = |s: FnSource| match alpha {
            Some(a) => s.with_known_index(a),
            None => s,
        };
        match self.kind {
            Kind::Power(p) => Box::new(with_index(
                FnSource::from_log(name, 1, move |n| p * ln(n as f64))
                    .with_ratio(move |n| libm::expm1(p * libm::log1p(1.0 / n as f64))),
            )),
            Kind::InvNLog => Box::new(with_index(
                FnSource::from_log(name, 1, |n| {
                    let x = n as f64;
                    -ln(x) - ln(ln(x + 1.0))
                })
                .with_ratio(|n| {
                    let x = n as f64;
                    let l2 = ln(x + 2.0);
                    -(l2 + x * libm::log1p(1.0 / (x + 1.0))) / ((x + 1.0) * l2)
                }),
            )),
            Kind::InvNLogSq => Box::new(with_index(
                FnSource::from_log(name, 2, |n| {
                    let x = n as f64;
                    -ln(x) - 2.0 * ln(ln(x))
                })
                .with_ratio(|n| {
                    let x = n as f64;
                    let (l1, l2) = (ln(x), ln(x + 1.0));
                    -(x * libm::log1p(1.0 / x) * (l1 + l2) + l2 * l2) / ((x + 1.0) * l2 * l2)
                }),
            )),
            Kind::LogOverN => Box::new(with_index(
                FnSource::from_log(name, 2, |n| {
                    let x = n as f64;
                    ln(ln(x)) - ln(x)
                })
                .with_ratio(|n| {
                    let x = n as f64;
                    let l1 = ln(x);
                    (x * libm::log1p(1.0 / x) - l1) / ((x + 1.0) * l1)
                }),
            )),
            Kind::RaabeProduct => Box::new(
                RatioSource::new(
                    name,
                    2,
                    SignedLogValue::from_real(2.0 - libm::exp(0.5)).unwrap(),
                    |n| -libm::expm1(1.0 / (n as f64 + 1.0)),
                )
                .with_known_index(-1.0),
            ),
            Kind::GammaRatio(beta) => Box::new(gamma_ratio(name, beta)),
            Kind::Wallis => Box::new(
                RatioSource::new(name, 1, SignedLogValue::ONE, |n| {
                    let x = n as f64;
                    -(4.0 * x + 1.0) / ((2.0 * x + 1.0) * (2.0 * x + 1.0))
                })
                .with_known_index(-1.0),
            ),
            Kind::DfactRatio(a) => Box::new(
                RatioSource::new(name, 1, SignedLogValue::from_log(-a * LN_2), move |n| {
                    libm::expm1(a * libm::log1p(-1.0 / (2.0 * n as f64 + 2.0)))
                })
                .with_known_index(-a / 2.0),
            ),
            Kind::GaussTelescoping => Box::new(
                RatioSource::new(name, 1, SignedLogValue::from_log(-ln(6.0)), |n| {
                    -2.0 / (n as f64 + 3.0)
                })
                .with_known_index(-2.0),
            ),
            Kind::HypergeometricRatio => Box::new(
                RatioSource::new(name, 1, SignedLogValue::ONE, |n| -2.0 / (n as f64 + 2.0))
                    .with_known_index(-2.0),
            ),
            Kind::FloorExp => Box::new(FnSource::from_log(name, 1, |n| libm::floor(ln(n as f64)))),
            Kind::SinLogPower => Box::new(FnSource::from_log(name, 1, |n| {
                let x = n as f64;
                (0.5 + 0.25 * libm::sin(x)) * ln(x)
            })),
            Kind::OscillatingPower => Box::new(FnSource::from_log(name, 1, |n| {
                let l = ln(n as f64);
                -1.5 * l + 0.3 * libm::sin(l)
            })),
            Kind::AltInvLog => Box::new(Alternating::new(
                FnSource::from_log("|p_n|", 1, |n| -ln(ln(n as f64 + 1.0)))
                    .with_ratio(|n| {
                        let x = n as f64;
                        let l2 = ln(x + 2.0);
                        -libm::log1p(1.0 / (x + 1.0)) / l2
                    })
                    .with_known_index(0.0),
                name,
                true,
            )),
            Kind::AltLog => Box::new(Alternating::new(
                FnSource::from_log("|p_n|", 1, |n| ln(ln(n as f64 + 1.0)))
                    .with_ratio(|n| {
                        let x = n as f64;
                        libm::log1p(1.0 / (x + 1.0)) / ln(x + 1.0)
                    })
                    .with_known_index(0.0),
                name,
                true,
            )),
            Kind::AltHarmonic => Box::new(Alternating::new(
                FnSource::from_log("|p_n|", 1, |n| -ln(n as f64))
                    .with_ratio(|n| -1.0 / (n as f64 + 1.0))
                    .with_known_index(-1.0),
                name,
                true,
            )),
            Kind::AltGammaRatio(beta) => {
                Box::new(Alternating::new(gamma_ratio(String::from("|p_n|"), beta), name, false))
            }
            Kind::AltExpTheta(theta) => Box::new(Alternating::new(
                FnSource::from_log("|p_n|", 1, move |n| libm::pow(n as f64, theta))
                    .with_ratio(move |n| {
                        let x = n as f64;
                        libm::expm1(libm::pow(x, theta) * libm::expm1(theta * libm::log1p(1.0 / x)))
                    })
                    .with_known_index(0.0),
                name,
                true,
            )),
        }
    }
}

/// `|a_n| = Γ(2n+β+1)/(4^n (n!)²)` through its exact ratio.
fn gamma_ratio(name: String, beta: f64) -> RatioSource {
    let a1 = libm::lgamma(3.0 + beta) - 2.0 * LN_2;
    RatioSource::new(name, 1, SignedLogValue::from_log(a1), move |n| {
        let m = n as f64 + 1.0;
        (2.0 * beta - 1.0) / (2.0 * m) + beta * (beta - 1.0) / (4.0 * m * m)
    })
    .with_known_index(beta - 0.5)
}

fn param(v: f64) -> String {
    format!("{v}")
}

/// `2n+β+1` written without `+-`.
fn gamma_arg(beta: f64) -> String {
    let shift = beta + 1.0;
    if shift == 0.0 {
        "2n".into()
    } else if shift < 0.0 {
        format!("2n-{}", param(-shift))
    } else {
        format!("2n+{}", param(shift))
    }
}

/// The built-in sequences, in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn standard() -> Catalog {
        use Conclusion::{Converges as C, Diverges as D};
        let mut e = Vec::new();
        e.push(CatalogEntry::new(
            "p_series_2",
            "p_series_2",
            "1/n^2",
            Kind::Power(-2.0),
            Some(-2.0),
            C,
            "p-series with p = 2; sum π²/6",
        ));
        e.push(CatalogEntry::new(
            "p_series_half",
            "p_series_half",
            "1/n^0.5",
            Kind::Power(-0.5),
            Some(-0.5),
            D,
            "p-series with p = 1/2",
        ));
        e.push(
            CatalogEntry::new(
                "harmonic",
                "harmonic",
                "1/n",
                Kind::Power(-1.0),
                Some(-1.0),
                D,
                "harmonic series; α(n) = −n/(n+1)",
            )
            .second(1.0),
        );
        e.push(
            CatalogEntry::new(
                "inv_n_log",
                "inv_n_log",
                "1/(n*log(n+1))",
                Kind::InvNLog,
                Some(-1.0),
                D,
                "integral test: Σ 1/(n log n) diverges like log log n",
            )
            .log_factor()
            .trend()
            .note("second-order index β = −1 is the undecidable Bertrand case; divergence comes from the integral test"),
        );
        e.push(
            CatalogEntry::new(
                "inv_n_log_sq",
                "inv_n_log_sq",
                "1/(n*log(n)^2)",
                Kind::InvNLogSq,
                Some(-1.0),
                C,
                "integral test: tail Σ_{k>n} ~ 1/log n",
            )
            .first(2)
            .log_factor()
            .trend(),
        );
        e.push(
            CatalogEntry::new(
                "log_over_n",
                "log_over_n",
                "log(n)/n",
                Kind::LogOverN,
                Some(-1.0),
                D,
                "comparison with the harmonic series",
            )
            .first(2)
            .log_factor(),
        );
        e.push(
            CatalogEntry::new(
                "raabe_product",
                "raabe_product",
                "prod_{k=2}^n (2 - exp(1/k))",
                Kind::RaabeProduct,
                Some(-1.0),
                D,
                "ratio 2 − e^{1/(n+1)}: α(n) = n(1 − e^{1/(n+1)}) → −1, n(α(n)+1) → 1/2",
            )
            .first(2)
            .second(0.5)
            .note("the k = 1 factor 2 − e is negative, so the product starts at k = 2"),
        );
        for beta in [-1.0, -0.5, 0.0, 1.0] {
            let alpha = beta - 0.5;
            let mut entry = CatalogEntry::new(
                format!("gamma_ratio({})", param(beta)),
                "gamma_ratio",
                format!("Gamma({})/(4^n (n!)^2)", gamma_arg(beta)),
                Kind::GammaRatio(beta),
                Some(alpha),
                if beta < -0.5 { C } else { D },
                "ratio (1 + β/(2(n+1)))(1 + (β−1)/(2(n+1))): α = β − 1/2; converges iff β < −1/2",
            );
            if beta == -0.5 {
                entry = entry.second(19.0 / 16.0);
            }
            e.push(entry);
        }
        e.push(
            CatalogEntry::new(
                "wallis",
                "wallis",
                "4^(n-1)((n-1)!)^2/((2n-1)!!)^2",
                Kind::Wallis,
                Some(-1.0),
                D,
                "ratio 4n²/(2n+1)²: α(n) = −n(4n+1)/(2n+1)², n(α(n)+1) → 3/4",
            )
            .second(0.75),
        );
        for a in [1.0, 2.0, 3.0] {
            let name = if a == 2.0 {
                String::from("dfact_ratio_sq")
            } else {
                format!("dfact_ratio({})", param(a))
            };
            let mut entry = CatalogEntry::new(
                name,
                "dfact_ratio",
                format!("((2n-1)!!/(2n)!!)^{}", param(a)),
                Kind::DfactRatio(a),
                Some(-a / 2.0),
                if a > 2.0 { C } else { D },
                "ratio ((2n+1)/(2n+2))^a: α = −a/2; converges iff a > 2",
            );
            if a == 2.0 {
                entry = entry.second(1.25);
            }
            e.push(entry);
        }
        e.push(CatalogEntry::new(
            "gauss_telescoping",
            "gauss_telescoping",
            "1/((n+1)(n+2))",
            Kind::GaussTelescoping,
            Some(-2.0),
            C,
            "ratio (n+1)/(n+3): α(n) = −2n/(n+3); telescoping sum 1/2",
        ));
        e.push(
            CatalogEntry::new(
                "hypergeometric_ratio",
                "hypergeometric_ratio",
                "2/(n(n+1))",
                Kind::HypergeometricRatio,
                Some(-2.0),
                C,
                "ratio (n²+n)/(n²+3n+2) = n/(n+2), a_1 = 1; telescoping sum 2",
            )
            .note("with a_1 = 1 the product telescopes to 2/(n(n+1)); 2/((n+1)(n+2)) is the same sequence shifted by one"),
        );
        e.push(
            CatalogEntry::new(
                "floor_exp",
                "floor_exp",
                "exp(floor(log(n)))",
                Kind::FloorExp,
                None,
                D,
                "not regularly varying; n/e ≤ a_n ≤ n",
            ),
        );
        e.push(CatalogEntry::new(
            "sin_log_power",
            "sin_log_power",
            "exp(0.5*log(n) + 0.25*sin(n)*log(n))",
            Kind::SinLogPower,
            None,
            D,
            "not regularly varying; n^{0.25} ≤ a_n ≤ n^{0.75}",
        ));
        e.push(CatalogEntry::new(
            "oscillating_power",
            "oscillating_power",
            "n^-1.5*exp(0.3*sin(log(n)))",
            Kind::OscillatingPower,
            None,
            C,
            "O-regularly varying; e^{−0.3} n^{−1.5} ≤ a_n ≤ e^{0.3} n^{−1.5}",
        ));
        e.push(
            CatalogEntry::new(
                "alt_harmonic",
                "alt_harmonic",
                "(-1)^n/n",
                Kind::AltHarmonic,
                Some(-1.0),
                C,
                "alternating harmonic series; sum −log 2",
            )
            .alternating(),
        );
        e.push(
            CatalogEntry::new(
                "alt_inv_log",
                "alt_inv_log",
                "(-1)^n/log(n+1)",
                Kind::AltInvLog,
                Some(0.0),
                C,
                "α = 0; paired differences ~ −1/(2n (log 2n)²) are summable",
            )
            .alternating()
            .log_factor(),
        );
        e.push(
            CatalogEntry::new(
                "alt_log",
                "alt_log",
                "(-1)^n*log(n+1)",
                Kind::AltLog,
                Some(0.0),
                D,
                "α = 0; paired differences log(1 + 1/(2n+1)) ~ 1/(2n)",
            )
            .alternating()
            .log_factor(),
        );
        for beta in [-1.0, 0.0, 1.0] {
            e.push(
                CatalogEntry::new(
                    format!("alt_gamma_ratio({})", param(beta)),
                    "alt_gamma_ratio",
                    format!("(-1)^(n-1) Gamma({})/(4^n (n!)^2)", gamma_arg(beta)),
                    Kind::AltGammaRatio(beta),
                    Some(beta - 0.5),
                    if beta < 0.5 { C } else { D },
                    "α = β − 1/2: absolute convergence for α < −1, conditional for −1 < α < 0, divergence for α > 0",
                )
                .alternating(),
            );
        }
        e.push(
            CatalogEntry::new(
                "alt_exp_theta(-0.5)",
                "alt_exp_theta",
                "(-1)^n*exp(n^-0.5)",
                Kind::AltExpTheta(-0.5),
                Some(0.0),
                C,
                "α(n) ~ θ n^θ; paired differences ~ θ 2^{θ−1} n^{θ−1} are summable",
            )
            .alternating()
            .note("|p_n| → 1, so the verdict concerns the paired partial sums S_{2n}; S_n itself keeps oscillating by about 1"),
        );
        Catalog { entries: e }
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Exact name lookup. `dfact_ratio(2)` is accepted for `dfact_ratio_sq`,
    /// and parametric names tolerate spacing such as `gamma_ratio( -1 )`.
    pub fn lookup(&self, name: &str) -> Option<&CatalogEntry> {
        let key = canonical(name);
        let key = if key == "dfact_ratio(2)" {
            String::from("dfact_ratio_sq")
        } else {
            key
        };
        self.entries.iter().find(|e| e.name == key)
    }

    /// Entries whose name or family equals `filter`.
    pub fn matching(&self, filter: &str) -> Vec<&CatalogEntry> {
        let key = canonical(filter);
        if let Some(e) = self.lookup(&key) {
            return alloc::vec![e];
        }
        self.entries.iter().filter(|e| e.family == key).collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }
}

/// Normalizes `family( p )` to `family(p)` with the parameter printed in
/// shortest form.
fn canonical(name: &str) -> String {
    let name = name.trim();
    if let (Some(open), true) = (name.find('('), name.ends_with(')')) {
        let family = name[..open].trim();
        let arg = name[open + 1..name.len() - 1].trim();
        if let Ok(v) = arg.parse::<f64>() {
            return format!("{family}({})", param(v));
        }
    }
    String::from(name)
}
