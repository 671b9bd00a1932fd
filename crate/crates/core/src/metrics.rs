//! Spectrum-based suspiciousness metrics.
//!
//! Every division goes through [`div`], which yields 0 for a zero
//! denominator. The guard applies to the innermost quotient, so a formula
//! built from several quotients keeps whatever terms are defined.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::spectra::SpectrumCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Metric {
    Tarantula,
    Ochiai,
    Ochiai2,
    #[default]
    Op2,
    Op1,
    DStar2,
    DStar3,
    Jaccard,
    Kulczynski1,
    Kulczynski2,
    RussellRao,
    SorensenDice,
    Dice,
    Hamann,
    SimpleMatching,
    RogersTanimoto,
    M1,
    M2,
    Wong1,
    Wong2,
    Wong3,
    Ample,
    Anderberg,
    Euclid,
    Hamming,
    Overlap,
    Zoltar,
    Goodman,
    Barinel,
    Er5c,
}

pub const ALL_METRICS: [Metric; 30] = [
    Metric::Tarantula,
    Metric::Ochiai,
    Metric::Ochiai2,
    Metric::Op2,
    Metric::Op1,
    Metric::DStar2,
    Metric::DStar3,
    Metric::Jaccard,
    Metric::Kulczynski1,
    Metric::Kulczynski2,
    Metric::RussellRao,
    Metric::SorensenDice,
    Metric::Dice,
    Metric::Hamann,
    Metric::SimpleMatching,
    Metric::RogersTanimoto,
    Metric::M1,
    Metric::M2,
    Metric::Wong1,
    Metric::Wong2,
    Metric::Wong3,
    Metric::Ample,
    Metric::Anderberg,
    Metric::Euclid,
    Metric::Hamming,
    Metric::Overlap,
    Metric::Zoltar,
    Metric::Goodman,
    Metric::Barinel,
    Metric::Er5c,
];

pub fn list_metrics() -> &'static [Metric] {
    &ALL_METRICS
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Tarantula => "tarantula",
            Metric::Ochiai => "ochiai",
            Metric::Ochiai2 => "ochiai2",
            Metric::Op2 => "op2",
            Metric::Op1 => "op1",
            Metric::DStar2 => "dstar2",
            Metric::DStar3 => "dstar3",
            Metric::Jaccard => "jaccard",
            Metric::Kulczynski1 => "kulczynski1",
            Metric::Kulczynski2 => "kulczynski2",
            Metric::RussellRao => "russellrao",
            Metric::SorensenDice => "sorensendice",
            Metric::Dice => "dice",
            Metric::Hamann => "hamann",
            Metric::SimpleMatching => "simplematching",
            Metric::RogersTanimoto => "rogerstanimoto",
            Metric::M1 => "m1",
            Metric::M2 => "m2",
            Metric::Wong1 => "wong1",
            Metric::Wong2 => "wong2",
            Metric::Wong3 => "wong3",
            Metric::Ample => "ample",
            Metric::Anderberg => "anderberg",
            Metric::Euclid => "euclid",
            Metric::Hamming => "hamming",
            Metric::Overlap => "overlap",
            Metric::Zoltar => "zoltar",
            Metric::Goodman => "goodman",
            Metric::Barinel => "barinel",
            Metric::Er5c => "er5c",
        }
    }

    /// Suspiciousness of a statement with counts `c`.
    pub fn score(self, c: SpectrumCounts) -> f64 {
        let ef = c.ef as f64;
        let ep = c.ep as f64;
        let nf = c.nf as f64;
        let np = c.np as f64;
        let n = ef + ep + nf + np;
        match self {
            Metric::Tarantula => {
                let f = div(ef, ef + nf);
                let p = div(ep, ep + np);
                div(f, f + p)
            }
            Metric::Ochiai => div(ef, ((ef + nf) * (ef + ep)).sqrt()),
            Metric::Ochiai2 => div(ef * np, ((ef + ep) * (nf + np) * (ef + nf) * (ep + np)).sqrt()),
            Metric::Op2 => ef - div(ep, ep + np + 1.0),
            Metric::Op1 => {
                if c.nf > 0 {
                    -1.0
                } else {
                    np
                }
            }
            Metric::DStar2 => div(ef.powi(2), ep + nf),
            Metric::DStar3 => div(ef.powi(3), ep + nf),
            Metric::Jaccard => div(ef, ef + nf + ep),
            Metric::Kulczynski1 => div(ef, nf + ep),
            Metric::Kulczynski2 => 0.5 * (div(ef, ef + nf) + div(ef, ef + ep)),
            Metric::RussellRao => div(ef, n),
            Metric::SorensenDice => div(2.0 * ef, 2.0 * ef + nf + ep),
            Metric::Dice => div(2.0 * ef, ef + nf + ep),
            Metric::Hamann => div(ef + np - nf - ep, n),
            Metric::SimpleMatching => div(ef + np, n),
            Metric::RogersTanimoto => div(ef + np, ef + np + 2.0 * (nf + ep)),
            Metric::M1 => div(ef + np, nf + ep),
            Metric::M2 => div(ef, ef + np + 2.0 * (nf + ep)),
            Metric::Wong1 => ef,
            Metric::Wong2 => ef - ep,
            Metric::Wong3 => {
                let h = if c.ep <= 2 {
                    ep
                } else if c.ep <= 10 {
                    2.0 + 0.1 * (ep - 2.0)
                } else {
                    2.8 + 0.001 * (ep - 10.0)
                };
                ef - h
            }
            Metric::Ample => (div(ef, ef + nf) - div(ep, ep + np)).abs(),
            Metric::Anderberg => div(ef, ef + 2.0 * (nf + ep)),
            Metric::Euclid => (ef + np).sqrt(),
            Metric::Hamming => ef + np,
            Metric::Overlap => div(ef, ef.min(nf).min(ep)),
            Metric::Zoltar => div(ef, ef + nf + ep + div(10000.0 * nf * ep, ef)),
            Metric::Goodman => div(2.0 * ef - nf - ep, 2.0 * ef + nf + ep),
            Metric::Barinel => 1.0 - div(ep, ep + ef),
            Metric::Er5c => {
                if c.nf == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// `a / b`, or 0 when `b` is 0.
pub fn div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

pub fn score(metric: Metric, c: SpectrumCounts) -> f64 {
    metric.score(c)
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    /// Case-insensitive; `dstar` is accepted for `dstar2`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "dstar" {
            return Ok(Metric::DStar2);
        }
        ALL_METRICS
            .iter()
            .copied()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::UnknownMetric(s.to_owned()))
    }
}
