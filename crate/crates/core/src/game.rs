//! Generalized Born rule and guess-your-neighbour's-input statistics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instrument::Instrument;
use crate::operator::{Operator, ZERO};
use crate::process::ProcessMatrix;
use crate::TOL;

/// `p(x, y)`, indexed `[x][y]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputDistribution([[f64; 2]; 2]);

impl Default for InputDistribution {
    fn default() -> Self {
        Self::uniform()
    }
}

impl InputDistribution {
    pub fn uniform() -> Self {
        Self([[0.25; 2]; 2])
    }

    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        let sum: f64 = p.iter().flatten().sum();
        if p.iter().flatten().any(|&v| v.is_nan() || v < -TOL) || (sum - 1.0).abs() > TOL {
            return Err(Error::BadDistribution(sum));
        }
        Ok(Self(p.map(|row| row.map(|v| v.max(0.0)))))
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.0[x][y]
    }

    pub fn is_uniform(&self) -> bool {
        self.0.iter().flatten().all(|&v| (v - 0.25).abs() <= TOL)
    }
}

impl Serialize for InputDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = (0..4)
            .map(|k| (format!("{},{}", k >> 1, k & 1), self.0[k >> 1][k & 1]))
            .collect();
        map.serialize(s)
    }
}

/// `Tr[(M_{a|x} ⊗ M_{b|y}) W]` evaluated by contracting Alice's operator
/// first, so a full table costs four small contractions per Alice branch.
pub struct BornKernel {
    w: Vec<Complex64>,
}

impl BornKernel {
    pub fn new(w: &Operator) -> Self {
        let m = w.matrix();
        let w = (0..256).map(|k| m[(k / 16, k % 16)]).collect();
        Self { w }
    }

    /// `R[l][k] = Σ_{ij} M[i][j] W[(j,l),(i,k)]`
    fn contract_alice(&self, ma: &Operator) -> [[Complex64; 4]; 4] {
        let ma = ma.matrix();
        let mut r = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mij = ma[(i, j)];
                if mij == ZERO {
                    continue;
                }
                for l in 0..4 {
                    let row = (j * 4 + l) * 16 + i * 4;
                    for k in 0..4 {
                        r[l][k] += mij * self.w[row + k];
                    }
                }
            }
        }
        r
    }

    fn close_bob(r: &[[Complex64; 4]; 4], mb: &Operator) -> f64 {
        let mb = mb.matrix();
        let mut acc = ZERO;
        for k in 0..4 {
            for l in 0..4 {
                acc += mb[(k, l)] * r[l][k];
            }
        }
        acc.re
    }

    /// Raw table `[a][b][x][y]` with no clamping.
    pub fn table(&self, alice: &Instrument, bob: &Instrument) -> [[[[f64; 2]; 2]; 2]; 2] {
        let mut t = [[[[0.0; 2]; 2]; 2]; 2];
        for a in 0..2 {
            for x in 0..2 {
                let r = self.contract_alice(alice.op(a, x));
                for b in 0..2 {
                    for y in 0..2 {
                        t[a][b][x][y] = Self::close_bob(&r, bob.op(b, y));
                    }
                }
            }
        }
        t
    }
}

/// Clamp `[-TOL, 0)` to zero; anything more negative is an error.
fn clamp_probability(value: f64, idx: (usize, usize, usize, usize)) -> Result<(f64, bool)> {
    if value >= 0.0 {
        Ok((value, false))
    } else if value >= -TOL {
        Ok((0.0, true))
    } else {
        let (a, b, x, y) = idx;
        Err(Error::NegativeProbability { a, b, x, y, value })
    }
}

pub fn born_probability(
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
    a: usize,
    b: usize,
    x: usize,
    y: usize,
) -> Result<f64> {
    let joint = alice.op(a, x).kron(bob.op(b, y));
    let value = joint.trace_product(w.operator()).re;
    clamp_probability(value, (a, b, x, y)).map(|(v, _)| v)
}

#[derive(Clone, Debug)]
pub struct GameStats {
    /// `p(a,b|x,y)` indexed `[a][b][x][y]`
    pub table: [[[[f64; 2]; 2]; 2]; 2],
    pub inputs: InputDistribution,
    pub p_succ: f64,
    pub p1: f64,
    pub p2: f64,
    /// entries in `[-TOL, 0)` that were set to zero
    pub clamped: usize,
}

impl GameStats {
    /// Build from a raw table, clamping tiny negatives and checking
    /// normalization per input pair.
    pub fn from_table(raw: [[[[f64; 2]; 2]; 2]; 2], inputs: InputDistribution) -> Result<Self> {
        let mut table = raw;
        let mut clamped = 0;
        for (a, b, x, y) in indices() {
            let (v, c) = clamp_probability(raw[a][b][x][y], (a, b, x, y))?;
            table[a][b][x][y] = v;
            clamped += c as usize;
        }
        for x in 0..2 {
            for y in 0..2 {
                let sum: f64 = (0..4).map(|k| table[k >> 1][k & 1][x][y]).sum();
                if (sum - 1.0).abs() > TOL {
                    return Err(Error::NotNormalized { x, y, sum });
                }
            }
        }
        let mut p_succ = 0.0;
        let mut p2 = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let pxy = inputs.get(x, y);
                p_succ += pxy * table[y][x][x][y];
                p2 += pxy * table[1 - y][1 - x][x][y];
            }
        }
        Ok(Self {
            table,
            inputs,
            p_succ,
            p1: 1.0 - p_succ - p2,
            p2,
            clamped,
        })
    }

    pub fn p(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[a][b][x][y]
    }

    /// `λ_{abxy} = p(x,y) p(a,b|x,y)`
    pub fn lambda(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.inputs.get(x, y) * self.table[a][b][x][y]
    }

    pub fn gap(&self) -> f64 {
        self.p_succ - self.p2
    }

    /// Every `(a, b, x, y)` with its probability, in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize, usize), f64)> + '_ {
        indices().map(|(a, b, x, y)| ((a, b, x, y), self.table[a][b][x][y]))
    }
}

/// All `(a, b, x, y)` in lexicographic order.
pub fn indices() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1))
}

impl Serialize for GameStats {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let table: BTreeMap<String, f64> = self
            .entries()
            .map(|((a, b, x, y), p)| (format!("{a},{b}|{x},{y}"), p))
            .collect();
        let mut st = s.serialize_struct("GameStats", 7)?;
        st.serialize_field("table", &table)?;
        st.serialize_field("p_xy", &self.inputs)?;
        st.serialize_field("p_succ", &self.p_succ)?;
        st.serialize_field("p1", &self.p1)?;
        st.serialize_field("p2", &self.p2)?;
        st.serialize_field("gap", &self.gap())?;
        st.serialize_field("clamped", &self.clamped)?;
        st.end()
    }
}

pub fn game_stats(
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
    inputs: InputDistribution,
) -> Result<GameStats> {
    GameStats::from_table(BornKernel::new(w.operator()).table(alice, bob), inputs)
}

/// `p_succ − p₂`
pub fn bound_gap(stats: &GameStats) -> f64 {
    stats.gap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CausalFlags {
    /// `p_succ > 1/2`: no causally separable process can do this
    pub violates_causal_inequality: bool,
    /// `p_succ − p₂ > 1/2`
    pub exceeds_gap_bound: bool,
}

pub fn causal_inequality_check(stats: &GameStats) -> CausalFlags {
    CausalFlags {
        violates_causal_inequality: stats.p_succ > 0.5 + TOL,
        exceeds_gap_bound: stats.gap() > 0.5 + TOL,
    }
}
