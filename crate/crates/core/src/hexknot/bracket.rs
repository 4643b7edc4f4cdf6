//! Kauffman bracket over integer Laurent polynomials in `A`.

use std::collections::BTreeMap;
use std::fmt;

use super::CrossingList;

/// Integer Laurent polynomial: exponent → coefficient, zero terms dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent(BTreeMap<i32, i64>);

impl Laurent {
    pub fn monomial(exp: i32, coef: i64) -> Self {
        let mut m = BTreeMap::new();
        if coef != 0 {
            m.insert(exp, coef);
        }
        Self(m)
    }

    pub fn from_terms(terms: &[(i32, i64)]) -> Self {
        let mut out = Self::default();
        for &(e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, exp: i32, coef: i64) {
        let c = self.0.entry(exp).or_insert(0);
        *c += coef;
        if *c == 0 {
            self.0.remove(&exp);
        }
    }

    pub fn add(&mut self, other: &Laurent) {
        for (&e, &c) in &other.0 {
            self.add_term(e, c);
        }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::default();
        for (&e1, &c1) in &self.0 {
            for (&e2, &c2) in &other.0 {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// `A ↦ A⁻¹`.
    pub fn mirror(&self) -> Laurent {
        Laurent(self.0.iter().map(|(&e, &c)| (-e, c)).collect())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().rev().map(|(e, c)| format!("{c}A^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// End of a strand at a crossing.
#[derive(Clone, Copy)]
enum Port {
    OverIn = 0,
    OverOut = 1,
    UnderIn = 2,
    UnderOut = 3,
}

/// Normalized bracket `(−A³)^(−w) ⟨D⟩` of a closed polygon's diagram.
/// Unknot gives 1.
pub fn normalized_bracket(list: &CrossingList) -> Laurent {
    let n = list.crossings.len();
    if n == 0 {
        return Laurent::monomial(0, 1);
    }
    // Passages along the polygon, in order.
    let mut events: Vec<(usize, f64, usize, bool)> = Vec::with_capacity(2 * n);
    for (k, c) in list.crossings.iter().enumerate() {
        events.push((c.segments.0, c.params.0, k, c.first_over));
        events.push((c.segments.1, c.params.1, k, !c.first_over));
    }
    events.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).expect("finite parameters"));
    let node = |k: usize, p: Port| 4 * k + p as usize;
    // Strand arcs join each exit to the next entry.
    let mut arcs = Vec::with_capacity(2 * n);
    for (idx, &(_, _, k, over)) in events.iter().enumerate() {
        let (_, _, k2, over2) = events[(idx + 1) % events.len()];
        let out = if over { Port::OverOut } else { Port::UnderOut };
        let inn = if over2 { Port::OverIn } else { Port::UnderIn };
        arcs.push((node(k, out), node(k2, inn)));
    }
    let delta = Laurent::from_terms(&[(2, -1), (-2, -1)]);
    let mut delta_pows = vec![Laurent::monomial(0, 1)];
    let mut total = Laurent::default();
    for state in 0u32..(1 << n) {
        let mut uf = UnionFind::new(4 * n);
        for &(a, b) in &arcs {
            uf.union(a, b);
        }
        let mut a_count = 0i32;
        for (k, c) in list.crossings.iter().enumerate() {
            let a_smoothing = state & (1 << k) == 0;
            if a_smoothing {
                a_count += 1;
            }
            use Port::*;
            let pairs = match (c.sign > 0, a_smoothing) {
                (true, true) | (false, false) => [(OverOut, UnderIn), (OverIn, UnderOut)],
                (true, false) | (false, true) => [(OverOut, UnderOut), (OverIn, UnderIn)],
            };
            for (p, q) in pairs {
                uf.union(node(k, p), node(k, q));
            }
        }
        let loops = uf.components();
        while delta_pows.len() < loops {
            let next = delta_pows.last().expect("nonempty").mul(&delta);
            delta_pows.push(next);
        }
        let b_count = n as i32 - a_count;
        total.add(&Laurent::monomial(a_count - b_count, 1).mul(&delta_pows[loops - 1]));
    }
    let w = list.writhe();
    // (−A³)^(−w) = (−1)^w A^(−3w)
    let sign = if w % 2 == 0 { 1 } else { -1 };
    total.mul(&Laurent::monomial(-3 * w, sign))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn components(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// `A⁻⁴ + A⁻¹² − A⁻¹⁶`, the normalized bracket of the right-handed trefoil.
pub fn right_trefoil() -> Laurent {
    Laurent::from_terms(&[(-4, 1), (-12, 1), (-16, -1)])
}
