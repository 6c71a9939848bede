//! Ranks modulo word-sized primes, used only to cross-check rational ranks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::elim::rank;
use crate::error::{ExactlaError, Result};
use crate::matrix::RationalSparseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeResult {
    pub prime: u64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularReport {
    pub rational_rank: usize,
    pub per_prime: Vec<PrimeResult>,
    /// Every modular rank is at most the rational rank.
    pub consistent: bool,
    /// Some tested prime reproduced the rational rank exactly.
    pub confirmed: bool,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Rank over 𝔽_p. Primes must lie below 2³² so products fit in `u64`.
pub fn rank_mod_p(m: &RationalSparseMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) || p >= 1 << 32 {
        return Err(ExactlaError::NotPrime(p));
    }
    let mut rows: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); m.rows()];
    for (i, j, v) in m.entries() {
        let den = reduce(v.denom(), p);
        if den.is_zero() {
            return Err(ExactlaError::PrimeDividesDenominator {
                prime: p,
                row: i,
                col: j,
            });
        }
        let x = reduce(v.numer(), p) * inv_mod(den, p) % p;
        if x != 0 {
            rows[i].insert(j, x);
        }
    }
    // Pivot rows normalized to leading coefficient 1, keyed by pivot column.
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let hit = row.iter().find(|(c, _)| pivots.contains_key(c)).map(|(c, x)| (*c, *x));
            let Some((c, x)) = hit else { break };
            for (j, y) in &pivots[&c] {
                let e = row.entry(*j).or_insert(0);
                *e = (*e + p - x * y % p) % p;
                if *e == 0 {
                    row.remove(j);
                }
            }
        }
        if let Some((&lead_col, &lead)) = row.iter().next() {
            let inv = inv_mod(lead, p);
            for v in row.values_mut() {
                *v = *v * inv % p;
            }
            pivots.insert(lead_col, row);
        }
    }
    Ok(pivots.len())
}

/// Compares the rational rank of `m` with its ranks modulo each prime.
pub fn modular_check(m: &RationalSparseMatrix, primes: &[u64]) -> Result<ModularReport> {
    let rational_rank = rank(m);
    let per_prime = primes
        .iter()
        .map(|&p| rank_mod_p(m, p).map(|rank| PrimeResult { prime: p, rank }))
        .collect::<Result<Vec<_>>>()?;
    let consistent = per_prime.iter().all(|r| r.rank <= rational_rank);
    let confirmed = per_prime.iter().any(|r| r.rank == rational_rank);
    Ok(ModularReport {
        rational_rank,
        per_prime,
        consistent,
        confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    #[test]
    fn small_prime_drops_rank() {
        // det = 6, so the rank falls mod 2 and mod 3 only.
        let m = RationalSparseMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 1);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 1);
        assert_eq!(rank_mod_p(&m, 5).unwrap(), 2);
        let report = modular_check(&m, &[2, 3, 5]).unwrap();
        assert!(report.consistent && report.confirmed);
    }

    #[test]
    fn denominator_divisible_by_prime() {
        let m = RationalSparseMatrix::from_triplets(1, 1, vec![(0, 0, Q::new(1.into(), 7.into()))]).unwrap();
        assert!(matches!(
            rank_mod_p(&m, 7),
            Err(ExactlaError::PrimeDividesDenominator { prime: 7, .. })
        ));
        assert!(matches!(rank_mod_p(&m, 9), Err(ExactlaError::NotPrime(9))));
    }
}
