//! Based signed Gauss diagrams of knot projections and the second
//! coefficient `a₂` of the Conway polynomial.

mod extract;
mod text;

use serde::Serialize;
use thiserror::Error;

use crate::curve::{KnotCurve, SpaceCurve};
use crate::quasi::sphere_directions;

pub use extract::{gauss_diagram, MIN_SAMPLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("projection is not generic: {0}")]
    NonGeneric(String),
    #[error("a2 differs between directions: {0:?}")]
    DirectionsDisagree(Vec<i64>),
    #[error("too few samples ({0}); need at least {MIN_SAMPLES}")]
    TooFewSamples(usize),
    #[error("invalid diagram: {0}")]
    Invalid(String),
}

/// One passage of the curve through a crossing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussEntry {
    pub t: f64,
    pub crossing: usize,
    pub over: bool,
    pub sign: i8,
}

/// Passages in increasing parameter order from the basepoint `t = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GaussDiagram {
    entries: Vec<GaussEntry>,
}

impl GaussDiagram {
    /// Checks that parameters increase in `[0, 1)` and each crossing appears
    /// once over and once under with one sign. Crossing ids are renumbered
    /// by first appearance.
    pub fn new(entries: Vec<GaussEntry>) -> Result<Self, GaussError> {
        for w in entries.windows(2) {
            if !(w[0].t < w[1].t) {
                return Err(GaussError::Invalid("parameters must increase".into()));
            }
        }
        if entries.iter().any(|e| !(0.0..1.0).contains(&e.t)) {
            return Err(GaussError::Invalid("parameter outside [0, 1)".into()));
        }
        if entries.iter().any(|e| e.sign != 1 && e.sign != -1) {
            return Err(GaussError::Invalid("sign must be ±1".into()));
        }
        let mut ids: Vec<usize> = Vec::new();
        for e in &entries {
            if !ids.contains(&e.crossing) {
                ids.push(e.crossing);
            }
        }
        for &id in &ids {
            let ends: Vec<&GaussEntry> = entries.iter().filter(|e| e.crossing == id).collect();
            if ends.len() != 2 || ends[0].over == ends[1].over || ends[0].sign != ends[1].sign {
                return Err(GaussError::Invalid(format!("crossing {id} is not one over and one under passage of one sign")));
            }
        }
        let entries = entries
            .into_iter()
            .map(|e| GaussEntry { crossing: ids.iter().position(|&i| i == e.crossing).expect("collected"), ..e })
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[GaussEntry] {
        &self.entries
    }

    pub fn crossing_count(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn writhe(&self) -> i64 {
        self.entries.iter().filter(|e| e.over).map(|e| e.sign as i64).sum()
    }

    /// The same diagram read from just after its first `k` passages.
    pub fn rebased(&self, k: usize) -> GaussDiagram {
        let n = self.entries.len();
        if n == 0 {
            return self.clone();
        }
        let entries = (0..n)
            .map(|i| {
                let e = self.entries[(i + k) % n];
                GaussEntry { t: i as f64 / n as f64, ..e }
            })
            .collect();
        GaussDiagram::new(entries).expect("rotation keeps a valid diagram")
    }
}

/// Second Conway coefficient by counting, over ordered pairs of crossings
/// `(i, j)`, the arrangements met from the basepoint as
/// `i over, j under, i under, j over`, weighted by the product of signs.
pub fn a2(d: &GaussDiagram) -> i64 {
    let n = d.crossing_count();
    let mut over = vec![0usize; n];
    let mut under = vec![0usize; n];
    let mut sign = vec![0i64; n];
    for (pos, e) in d.entries.iter().enumerate() {
        if e.over {
            over[e.crossing] = pos;
        } else {
            under[e.crossing] = pos;
        }
        sign[e.crossing] = e.sign as i64;
    }
    let mut total = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j && over[i] < under[j] && under[j] < under[i] && under[i] < over[j] {
                total += sign[i] * sign[j];
            }
        }
    }
    total
}

/// Directions tried by [`a2_of_curve`] before giving up.
const DIRECTION_POOL: usize = 24;
pub const DEFAULT_SAMPLES: usize = 4096;

/// `a₂` from five generic projections, which must agree.
pub fn a2_of_curve<C: SpaceCurve<3> + ?Sized>(curve: &C) -> Result<i64, GaussError> {
    a2_of_curve_with(curve, DEFAULT_SAMPLES)
}

pub fn a2_of_curve_with<C: SpaceCurve<3> + ?Sized>(curve: &C, samples: usize) -> Result<i64, GaussError> {
    let mut values = Vec::new();
    let mut last_err = None;
    for d in sphere_directions(DIRECTION_POOL, 0.377) {
        match gauss_diagram(curve, &d, samples) {
            Ok(diag) => values.push(a2(&diag)),
            Err(e @ GaussError::TooFewSamples(_)) => return Err(e),
            Err(e) => last_err = Some(e),
        }
        if values.len() == 5 {
            break;
        }
    }
    if values.len() < 5 {
        return Err(last_err.unwrap_or_else(|| GaussError::NonGeneric("no generic direction".into())));
    }
    if values.iter().any(|&v| v != values[0]) {
        return Err(GaussError::DirectionsDisagree(values));
    }
    Ok(values[0])
}

/// `a₂` of a knot curve through its R³ model.
pub fn a2_of_knot(curve: &KnotCurve) -> Result<i64, GaussError> {
    a2_of_curve(&*curve.r3_model())
}
