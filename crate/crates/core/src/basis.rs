//! Bit-coded definite-particle bases.
//!
//! A basis state of `L` qubits is an `L`-bit pattern; bit `i` set means qubit
//! `i` is up. The `m`-particle sector holds every pattern with exactly `m` set
//! bits, stored in ascending unsigned order. In that order the index of a
//! pattern with set bits `p_1 < p_2 < … < p_m` is `Σ_t C(p_t, t)` (the
//! combinatorial number system), so ranking never scans the list.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const WORDS: usize = 4;

/// Largest supported number of qubits.
pub const MAX_QUBITS: usize = 64 * WORDS;

/// Default cap on sector dimension accepted by [`SectorBasis::new`].
pub const DEFAULT_MAX_DIM: u128 = 1 << 24;

/// A 256-bit basis pattern, least significant word first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pattern([u64; WORDS]);

impl Pattern {
    pub const EMPTY: Pattern = Pattern([0; WORDS]);

    pub fn from_u128(bits: u128) -> Self {
        Pattern([bits as u64, (bits >> 64) as u64, 0, 0])
    }

    /// Returns the pattern as an integer if it fits in 128 bits.
    pub fn to_u128(self) -> Option<u128> {
        if self.0[2] != 0 || self.0[3] != 0 {
            return None;
        }
        Some(self.0[0] as u128 | (self.0[1] as u128) << 64)
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        sites.iter().fold(Pattern::EMPTY, |p, &s| p.with_bit(s))
    }

    #[inline]
    pub fn bit(self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn with_bit(mut self, i: usize) -> Self {
        self.0[i / 64] |= 1 << (i % 64);
        self
    }

    #[inline]
    pub fn without_bit(mut self, i: usize) -> Self {
        self.0[i / 64] &= !(1 << (i % 64));
        self
    }

    #[inline]
    pub fn count_ones(self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exchanges the spins of qubits `i` and `j`.
    #[inline]
    pub fn with_swapped(mut self, i: usize, j: usize) -> Self {
        if self.bit(i) != self.bit(j) {
            self.0[i / 64] ^= 1 << (i % 64);
            self.0[j / 64] ^= 1 << (j % 64);
        }
        self
    }

    /// Positions of the set bits in ascending order.
    pub fn ones(self) -> Ones {
        Ones {
            words: self.0,
            word: 0,
        }
    }

    /// Binary string of the low `qubits` bits, most significant first.
    pub fn to_bit_string(self, qubits: usize) -> String {
        (0..qubits)
            .rev()
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect()
    }
}

impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = self
            .ones()
            .last()
            .map(|b| b + 1)
            .unwrap_or(1);
        write!(f, "Pattern({})", self.to_bit_string(top))
    }
}

pub struct Ones {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Ones {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let tz = w.trailing_zeros() as usize;
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
        }
        None
    }
}

/// `C(n, k)`, or `None` on overflow of `u128`.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        // acc * (n - t) / (t + 1) stays integral at every step
        acc = acc.checked_mul((n - t) as u128)? / (t as u128 + 1);
    }
    Some(acc)
}

/// All `m`-particle patterns of `L` qubits, in ascending order.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    qubits: usize,
    particles: usize,
    states: Vec<Pattern>,
    /// `binom[n * (particles + 1) + t] = C(n, t)`, saturating.
    binom: Vec<u128>,
}

impl SectorBasis {
    pub fn new(qubits: usize, particles: usize) -> Result<Self> {
        Self::with_max_dim(qubits, particles, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(qubits: usize, particles: usize, max_dim: u128) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS || particles > qubits {
            return Err(Error::InvalidSector { qubits, particles });
        }
        let overflow = Error::DimensionOverflow {
            qubits,
            particles,
            limit: max_dim,
        };
        let dim = match binomial(qubits, particles) {
            Some(d) if d <= max_dim => d as usize,
            _ => return Err(overflow),
        };

        let width = particles + 1;
        let mut binom = vec![0u128; (qubits + 1) * width];
        for n in 0..=qubits {
            for t in 0..=particles {
                binom[n * width + t] = binomial(n, t).unwrap_or(u128::MAX);
            }
        }

        let mut states = Vec::with_capacity(dim);
        let mut sites: Vec<usize> = (0..particles).collect();
        loop {
            states.push(Pattern::from_sites(&sites));
            // next combination in colex order == next larger integer
            let mut t = 0;
            while t < particles {
                let limit = if t + 1 < particles { sites[t + 1] } else { qubits };
                if sites[t] + 1 < limit {
                    break;
                }
                t += 1;
            }
            if t == particles {
                break;
            }
            sites[t] += 1;
            for (s, site) in sites.iter_mut().enumerate().take(t) {
                *site = s;
            }
        }
        debug_assert_eq!(states.len(), dim);

        Ok(SectorBasis {
            qubits,
            particles,
            states,
            binom,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Pattern] {
        &self.states
    }

    #[inline]
    pub fn pattern(&self, k: usize) -> Pattern {
        self.states[k]
    }

    #[inline]
    fn choose(&self, n: usize, t: usize) -> u128 {
        self.binom[n * (self.particles + 1) + t]
    }

    /// Index of `pattern` in the basis, in O(L).
    pub fn rank(&self, pattern: Pattern) -> Result<usize> {
        let found = pattern.count_ones();
        if found != self.particles {
            return Err(Error::WrongPopcount {
                expected: self.particles,
                found,
            });
        }
        if let Some(top) = pattern.ones().last() {
            if top >= self.qubits {
                return Err(Error::QubitOutOfRange {
                    index: top,
                    qubits: self.qubits,
                });
            }
        }
        Ok(self.rank_unchecked(pattern))
    }

    /// Rank without validation; `pattern` must belong to the sector.
    #[inline]
    pub fn rank_unchecked(&self, pattern: Pattern) -> usize {
        pattern
            .ones()
            .enumerate()
            .map(|(t, p)| self.choose(p, t + 1))
            .sum::<u128>() as usize
    }

    /// Pattern at index `k`, computed combinatorially rather than read from
    /// the stored list.
    pub fn unrank(&self, k: usize) -> Result<Pattern> {
        if k >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: k,
            });
        }
        let mut rest = k as u128;
        let mut pattern = Pattern::EMPTY;
        let mut upper = self.qubits;
        for t in (1..=self.particles).rev() {
            // largest p < upper with C(p, t) <= rest
            let mut p = upper - 1;
            while self.choose(p, t) > rest {
                p -= 1;
            }
            rest -= self.choose(p, t);
            pattern = pattern.with_bit(p);
            upper = p;
        }
        Ok(pattern)
    }

    /// Index of the state obtained from state `k` by exchanging the spins at
    /// `i` and `j`, or `None` when those spins are equal.
    #[inline]
    pub fn swap_partner(&self, k: usize, i: usize, j: usize) -> Option<usize> {
        let p = self.states[k];
        if p.bit(i) == p.bit(j) {
            None
        } else {
            Some(self.rank_unchecked(p.with_swapped(i, j)))
        }
    }

    /// All basis states that differ from state `k` only by exchanging the
    /// opposite spins at `i` and `j`. Empty when the spins are equal.
    pub fn pair_partners(&self, k: usize, i: usize, j: usize) -> Result<Vec<(usize, Pattern)>> {
        self.check_pair(i, j)?;
        if k >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: k,
            });
        }
        Ok(self
            .swap_partner(k, i, j)
            .map(|l| (l, self.states[l]))
            .into_iter()
            .collect())
    }

    pub(crate) fn check_qubit(&self, i: usize) -> Result<()> {
        if i >= self.qubits {
            return Err(Error::QubitOutOfRange {
                index: i,
                qubits: self.qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(Error::SameQubit(i));
        }
        Ok(())
    }
}

impl PartialEq for SectorBasis {
    fn eq(&self, other: &Self) -> bool {
        self.qubits == other.qubits && self.particles == other.particles
    }
}

impl Eq for SectorBasis {}
