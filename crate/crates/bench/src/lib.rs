//! Benchmark inputs shared by the criterion targets.

use mlat::body::{ConcreteBody, LpIndex};
use mlat::lattice::{lll_reduce, LatticeBasis};
use mlat::rational::{q, qvec};

pub fn lp_ball(n: usize, p: &str) -> ConcreteBody {
    ConcreteBody::lp(n, LpIndex::parse(p).expect("valid p"), q(1)).expect("valid ball")
}

/// A fixed skewed basis of dimension `n` with small entries, LLL-reduced.
pub fn skewed_basis(n: usize) -> LatticeBasis {
    let cols = (0..n)
        .map(|j| qvec(&(0..n).map(|i| if i == j { 3 } else { ((i * 7 + j * 5) % 5) as i64 - 2 }).collect::<Vec<_>>()))
        .collect();
    lll_reduce(&LatticeBasis::new(cols).expect("full rank"))
}
