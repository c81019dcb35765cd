//! Serializable state descriptions and the CLI shorthand.
//!
//! JSON form (tag `kind`):
//!
//! ```json
//! {"kind": "hydrogenic", "n": 2, "l": 1, "m_l": 1, "z": 1.0}
//! {"kind": "oscillator1d", "n": 0, "omega": 1.0}
//! {"kind": "oscillator3d", "nx": 1, "ny": 0, "nz": 0, "omega": 1.0}
//! {"kind": "coherent1d", "alpha": [1.0, 0.5], "omega": 1.0}
//! {"kind": "superposition", "terms": [{"coeff": [0.7071067811865476, 0.0], "state": {...}}, ...]}
//! {"kind": "determinant", "orbitals": [...], "occupancy": [2], "spin_pairing": "closed_shell",
//!  "nuclear_charge": 2.0, "interacting": true}
//! {"kind": "corrupted", "base": {...}, "corruption": {"kind": "density_drift", "rate": 0.01}}
//! ```
//!
//! Shorthand: `hydrogen:1s`, `hydrogen:2p1`, `hydrogen:2p-1`, `hydrogen:3d2:Z=2`,
//! `osc1d:3`, `osc1d:0:omega=2`, `osc3d:1.0.2`, `coherent:1+0.5i`,
//! `super:1s+2s` (equal weights), `he:1.6875` (closed-shell 1s² with
//! nuclear charge 2), `corrupted:hydrogen:1s`, `phase-shifted:hydrogen:1s`.

use crate::error::{QflowError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Hydrogenic {
        n: u32,
        l: u32,
        m_l: i32,
        #[serde(default = "one")]
        z: f64,
    },
    Oscillator1d {
        n: u32,
        #[serde(default = "one")]
        omega: f64,
    },
    Oscillator3d {
        nx: u32,
        ny: u32,
        nz: u32,
        #[serde(default = "one")]
        omega: f64,
    },
    Coherent1d {
        alpha: [f64; 2],
        #[serde(default = "one")]
        omega: f64,
    },
    Superposition {
        terms: Vec<Term>,
    },
    Determinant {
        orbitals: Vec<StateSpec>,
        occupancy: Vec<u8>,
        #[serde(default)]
        spin_pairing: SpinPairing,
        #[serde(default)]
        nuclear_charge: Option<f64>,
        #[serde(default = "yes")]
        interacting: bool,
    },
    /// Deliberately broken time dependence, used as a must-fail fixture.
    Corrupted {
        base: Box<StateSpec>,
        corruption: Corruption,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Term {
    /// `[re, im]`.
    pub coeff: [f64; 2],
    pub state: StateSpec,
}

impl Term {
    pub fn coeff(&self) -> Complex64 {
        Complex64::new(self.coeff[0], self.coeff[1])
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SpinPairing {
    #[default]
    ClosedShell,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Corruption {
    /// `Ψ → (1 + rate·t)Ψ`: the density grows without any flux.
    DensityDrift { rate: f64 },
    /// `Ψ → e^{−iδt}Ψ`: the phase advances at the wrong energy.
    PhaseShift { delta: f64 },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl StateSpec {
    pub fn hydrogenic(n: u32, l: u32, m_l: i32, z: f64) -> StateSpec {
        StateSpec::Hydrogenic { n, l, m_l, z }
    }

    /// Equal-weight superposition of eigenstates.
    pub fn equal_superposition(states: Vec<StateSpec>) -> StateSpec {
        let c = 1.0 / (states.len() as f64).sqrt();
        StateSpec::Superposition {
            terms: states
                .into_iter()
                .map(|state| Term {
                    coeff: [c, 0.0],
                    state,
                })
                .collect(),
        }
    }

    /// Closed-shell `1s²` determinant with orbital exponent `zeta` in the field
    /// of a nucleus of charge `nuclear_charge`.
    pub fn helium_like(zeta: f64, nuclear_charge: f64) -> StateSpec {
        StateSpec::Determinant {
            orbitals: vec![StateSpec::hydrogenic(1, 0, 0, zeta)],
            occupancy: vec![2],
            spin_pairing: SpinPairing::ClosedShell,
            nuclear_charge: Some(nuclear_charge),
            interacting: true,
        }
    }

    /// JSON document or shorthand.
    pub fn parse(s: &str) -> Result<StateSpec> {
        let s = s.trim();
        if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| QflowError::InvalidState(e.to_string()))
        } else {
            StateSpec::from_shorthand(s)
        }
    }

    pub fn from_shorthand(s: &str) -> Result<StateSpec> {
        let bad = || QflowError::InvalidState(format!("unrecognized state shorthand '{s}'"));
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "hydrogen" | "h" => {
                let mut parts = rest.split(':');
                let orb = parts.next().ok_or_else(bad)?;
                let mut z = 1.0;
                for opt in parts {
                    z = parse_kv(opt, "Z").or_else(|| parse_kv(opt, "z")).ok_or_else(bad)?;
                }
                let (n, l, m) = parse_orbital(orb).ok_or_else(bad)?;
                Ok(StateSpec::hydrogenic(n, l, m, z))
            }
            "osc1d" => {
                let mut parts = rest.split(':');
                let n = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                let mut omega = 1.0;
                for opt in parts {
                    omega = parse_kv(opt, "omega").ok_or_else(bad)?;
                }
                Ok(StateSpec::Oscillator1d { n, omega })
            }
            "osc3d" => {
                let mut parts = rest.split(':');
                let q: Vec<u32> = parts
                    .next()
                    .ok_or_else(bad)?
                    .split('.')
                    .map(|v| v.parse().map_err(|_| bad()))
                    .collect::<Result<_>>()?;
                if q.len() != 3 {
                    return Err(bad());
                }
                let mut omega = 1.0;
                for opt in parts {
                    omega = parse_kv(opt, "omega").ok_or_else(bad)?;
                }
                Ok(StateSpec::Oscillator3d {
                    nx: q[0],
                    ny: q[1],
                    nz: q[2],
                    omega,
                })
            }
            "coherent" => {
                let mut parts = rest.split(':');
                let alpha = parse_complex(parts.next().ok_or_else(bad)?).ok_or_else(bad)?;
                let mut omega = 1.0;
                for opt in parts {
                    omega = parse_kv(opt, "omega").ok_or_else(bad)?;
                }
                Ok(StateSpec::Coherent1d {
                    alpha: [alpha.re, alpha.im],
                    omega,
                })
            }
            "super" => {
                let mut parts = rest.split(':');
                let orbs = parts.next().ok_or_else(bad)?;
                let mut z = 1.0;
                for opt in parts {
                    z = parse_kv(opt, "Z").ok_or_else(bad)?;
                }
                let states = orbs
                    .split('+')
                    .map(|o| parse_orbital(o).map(|(n, l, m)| StateSpec::hydrogenic(n, l, m, z)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                Ok(StateSpec::equal_superposition(states))
            }
            "he" => {
                let zeta: f64 = rest.parse().map_err(|_| bad())?;
                Ok(StateSpec::helium_like(zeta, 2.0))
            }
            "corrupted" => Ok(StateSpec::Corrupted {
                base: Box::new(StateSpec::from_shorthand(rest)?),
                corruption: Corruption::DensityDrift { rate: 0.01 },
            }),
            "phase-shifted" => Ok(StateSpec::Corrupted {
                base: Box::new(StateSpec::from_shorthand(rest)?),
                corruption: Corruption::PhaseShift { delta: 0.01 },
            }),
            _ => Err(bad()),
        }
    }
}

fn parse_kv(opt: &str, key: &str) -> Option<f64> {
    let (k, v) = opt.split_once('=')?;
    (k == key).then(|| v.parse().ok()).flatten()
}

/// `1s`, `2p-1`, `3d2`.
fn parse_orbital(s: &str) -> Option<(u32, u32, i32)> {
    let pos = s.find(|c: char| c.is_ascii_alphabetic())?;
    let n: u32 = s[..pos].parse().ok()?;
    let letter = s[pos..].chars().next()?;
    let l = "spdfghik".find(letter)? as u32;
    let m_str = &s[pos + 1..];
    let m = if m_str.is_empty() { 0 } else { m_str.parse().ok()? };
    Some((n, l, m))
}

/// `1`, `-0.5i`, `1+0.5i`, `1-2i`.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            Some(i) => {
                let re: f64 = body[..i].parse().ok()?;
                let im: f64 = body[i..].trim_start_matches('+').parse().ok()?;
                Some(Complex64::new(re, im))
            }
            None => Some(Complex64::new(0.0, body.parse().ok()?)),
        }
    } else {
        Some(Complex64::new(s.parse().ok()?, 0.0))
    }
}
