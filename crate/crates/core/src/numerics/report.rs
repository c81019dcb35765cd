use super::quadrature::pairwise_sum;
use serde::{Deserialize, Serialize};

/// Norms of one named equation residual over a sample set.
///
/// `rel = l_inf / scale`, where `scale` is the largest magnitude any additive
/// term of the equation (or the declared reference magnitude) reaches on the
/// sample set. `pass ⇔ rel ≤ tolerance`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualReport {
    pub name: String,
    /// The identity being checked, written out.
    pub anchor: String,
    #[serde(with = "json_f64")]
    pub l_inf: f64,
    #[serde(with = "json_f64")]
    pub l2: f64,
    #[serde(with = "json_f64")]
    pub rel: f64,
    #[serde(with = "json_f64")]
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub skipped: usize,
}

/// Residual magnitude at one sample and the largest term magnitude there.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sample {
    pub weight: f64,
    pub residual: f64,
    pub scale: f64,
}

impl Sample {
    pub fn new(weight: f64, residual: f64, terms: &[f64]) -> Sample {
        Sample {
            weight,
            residual: residual.abs(),
            scale: terms.iter().fold(0.0f64, |m, t| m.max(t.abs())),
        }
    }
}

impl ResidualReport {
    pub fn from_samples(
        name: &str,
        anchor: &str,
        tolerance: f64,
        samples: &[Sample],
        skipped: usize,
    ) -> ResidualReport {
        let l_inf = samples.iter().fold(0.0f64, |m, s| m.max(s.residual));
        let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.scale));
        let sq: Vec<f64> = samples.iter().map(|s| s.weight * s.residual * s.residual).collect();
        let l2 = pairwise_sum(&sq).sqrt();
        let rel = if l_inf == 0.0 {
            0.0
        } else if scale > 0.0 {
            l_inf / scale
        } else {
            f64::INFINITY
        };
        ResidualReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            l_inf,
            l2,
            rel,
            tolerance,
            pass: rel <= tolerance,
            samples: samples.len(),
            skipped,
        }
    }

    /// Scalar check `|value − target| ≤ tolerance`; the normalization is the
    /// unit norm of the density so `rel` equals the absolute error.
    pub fn absolute(name: &str, anchor: &str, value: f64, target: f64, tolerance: f64) -> ResidualReport {
        let err = (value - target).abs();
        ResidualReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            l_inf: err,
            l2: err,
            rel: err,
            tolerance,
            pass: err <= tolerance,
            samples: 1,
            skipped: 0,
        }
    }
}

/// JSON has no infinities: non-finite values travel as `"inf"`, `"-inf"` or
/// `"nan"` so reports round-trip.
mod json_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: '{s}'"))),
            },
        }
    }
}
