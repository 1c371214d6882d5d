//! Cycle-length sets and the number theory around them.
//!
//! An [`LSpec`] holds a finite set of permitted cycle lengths together with
//! its gcd `g`, the threshold `p` beyond which every multiple of `g` is a sum
//! of permitted lengths, and a membership table for the additive closure.
//!
//! Textual form of a length set (whitespace is ignored everywhere):
//!
//! ```text
//! lset  := item ( "," item )*
//! item  := int | int ".." int [ "step" int ]
//! ```
//!
//! Ranges are inclusive and default to step 1, so `"4,10..16 step 2"` is
//! `{4, 10, 12, 14, 16}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest closure table we are willing to allocate.
const MAX_TABLE: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LSetError {
    #[error("length set is empty")]
    EmptySet,
    #[error("cycle length {0} is below the minimum for this mode")]
    LengthTooSmall(u64),
    #[error("{0} is not a sum of permitted lengths")]
    NotAdmissible(u64),
    #[error("closure table would need {0} entries")]
    TableTooLarge(u64),
    #[error("stream did not stabilise within the budget; consumed prefix {prefix:?}")]
    BudgetExhausted { prefix: Vec<u64> },
    #[error("stream is not strictly increasing at {0}")]
    NotIncreasing(u64),
    #[error("stretch factor {num}/{den} must exceed 1")]
    InvalidStretch { num: u64, den: u64 },
    #[error("no decomposition is defined for length {0}")]
    DecomposerUndefined(u64),
    #[error("cannot parse length set: {0}")]
    Parse(String),
}

/// Whether the lengths describe undirected cycles (length at least 3) or
/// directed ones (length at least 2, where 2 is a pair of antiparallel arcs or
/// a doubled undirected edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LengthMode {
    Directed,
    Undirected,
}

impl LengthMode {
    pub fn min_length(self) -> u64 {
        match self {
            LengthMode::Directed => 2,
            LengthMode::Undirected => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LSpec {
    lengths: Vec<u64>,
    mode: LengthMode,
    g: u64,
    p: u64,
    closure_table: Vec<bool>,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns `(d, x, y)` with `a*x + b*y = d = gcd(a, b)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (d, x, y) = ext_gcd(b, a % b);
        (d, y, x - (a / b) * y)
    }
}

/// Unbounded subset-sum reachability over `parts` for all values `0..=limit`.
fn reachable_sums(parts: &[u64], limit: u64) -> Vec<bool> {
    let mut reach = vec![false; limit as usize + 1];
    reach[0] = true;
    for t in 1..=limit as usize {
        reach[t] = parts
            .iter()
            .any(|&x| x as usize <= t && reach[t - x as usize]);
    }
    reach
}

impl LSpec {
    pub fn new(lengths: &[u64], mode: LengthMode) -> Result<Self, LSetError> {
        if lengths.is_empty() {
            return Err(LSetError::EmptySet);
        }
        let mut lengths = lengths.to_vec();
        lengths.sort_unstable();
        lengths.dedup();
        if let Some(&bad) = lengths.iter().find(|&&x| x < mode.min_length()) {
            return Err(LSetError::LengthTooSmall(bad));
        }
        let g = lengths.iter().copied().fold(0, gcd);
        let scaled: Vec<u64> = lengths.iter().map(|x| x / g).collect();
        let smallest = scaled[0];

        // Scan multiples of g until `smallest` consecutive ones are
        // representable; from there on every multiple is.
        let mut reach: Vec<bool> = vec![true];
        let mut run = 0u64;
        let mut p = 0u64;
        let mut t = 0u64;
        while run < smallest {
            t += 1;
            if t > MAX_TABLE {
                return Err(LSetError::TableTooLarge(t));
            }
            let hit = scaled
                .iter()
                .any(|&x| x <= t && reach[(t - x) as usize]);
            reach.push(hit);
            if hit {
                run += 1;
            } else {
                run = 0;
                p = t;
            }
        }

        let max_len = *lengths.last().expect("non-empty");
        let threshold = (p + 1) * g + max_len;
        if threshold > MAX_TABLE {
            return Err(LSetError::TableTooLarge(threshold));
        }
        let scaled_reach = reachable_sums(&scaled, threshold / g);
        let closure_table = (0..=threshold)
            .map(|n| n % g == 0 && scaled_reach[(n / g) as usize])
            .collect();

        Ok(LSpec {
            lengths,
            mode,
            g,
            p,
            closure_table,
        })
    }

    /// Parses the textual set syntax described at the module level.
    pub fn parse(text: &str, mode: LengthMode) -> Result<Self, LSetError> {
        LSpec::new(&parse_lengths(text)?, mode)
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn mode(&self) -> LengthMode {
        self.mode
    }

    /// Greatest common divisor of the lengths.
    pub fn g(&self) -> u64 {
        self.g
    }

    /// Smallest `p` with `eta * g` in the closure for every `eta > p`.
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn max_length(&self) -> u64 {
        *self.lengths.last().expect("non-empty")
    }

    pub fn contains(&self, len: u64) -> bool {
        self.lengths.binary_search(&len).is_ok()
    }

    /// Last index covered by the closure table.
    pub fn threshold(&self) -> u64 {
        self.closure_table.len() as u64 - 1
    }

    /// Is `n` a sum of (not necessarily distinct) permitted lengths?
    pub fn in_closure(&self, n: u64) -> bool {
        match self.closure_table.get(n as usize) {
            Some(&b) => b,
            None => n.is_multiple_of(self.g),
        }
    }

    /// Splits `n` into permitted lengths using as few parts as possible; ties
    /// go to the lexicographically largest descending sequence.
    pub fn partition_of(&self, n: u64) -> Result<Vec<u64>, LSetError> {
        if n == 0 || !self.in_closure(n) {
            return Err(LSetError::NotAdmissible(n));
        }
        let size = n as usize;
        let mut parts = vec![u32::MAX; size + 1];
        parts[0] = 0;
        for t in 1..=size {
            let mut best = u32::MAX;
            for &x in &self.lengths {
                let x = x as usize;
                if x > t {
                    break;
                }
                let prev = parts[t - x];
                if prev != u32::MAX && prev + 1 < best {
                    best = prev + 1;
                }
            }
            parts[t] = best;
        }
        let mut out = Vec::with_capacity(parts[size] as usize);
        let mut rest = size;
        while rest > 0 {
            let next = self
                .lengths
                .iter()
                .rev()
                .map(|&x| x as usize)
                .find(|&x| x <= rest && parts[rest - x] != u32::MAX && parts[rest - x] + 1 == parts[rest])
                .expect("dp table is consistent");
            out.push(next as u64);
            rest -= next;
        }
        Ok(out)
    }
}

impl fmt::Display for LSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.lengths.iter().map(u64::to_string).collect();
        f.write_str(&items.join(","))
    }
}

/// Parses `"8,10"`, `"4,6..20"` or `"4,10..20 step 2"` into a sorted,
/// duplicate-free list.
pub fn parse_lengths(text: &str) -> Result<Vec<u64>, LSetError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(LSetError::EmptySet);
    }
    let number = |s: &str| -> Result<u64, LSetError> {
        s.parse::<u64>()
            .map_err(|_| LSetError::Parse(format!("bad integer {s:?}")))
    };
    let mut out = Vec::new();
    for item in compact.split(',') {
        if item.is_empty() {
            return Err(LSetError::Parse("empty item".into()));
        }
        match item.split_once("..") {
            None => out.push(number(item)?),
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once("step") {
                    Some((hi, step)) => (hi, number(step)?),
                    None => (rest, 1),
                };
                let (lo, hi) = (number(lo)?, number(hi)?);
                if step == 0 || lo > hi {
                    return Err(LSetError::Parse(format!("bad range {item:?}")));
                }
                out.extend((lo..=hi).step_by(step as usize));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Reads an increasing stream of lengths and returns the shortest prefix whose
/// closure already contains every other consumed element.
///
/// At most `budget` elements are consumed. A finite stream that ends within the
/// budget yields an exact answer. Otherwise the prefix is accepted only once
/// the last consumed element lies beyond the prefix's own closure threshold,
/// i.e. every later element that shares its gcd is known to be redundant.
pub fn finite_core<I>(stream: I, budget: usize, mode: LengthMode) -> Result<LSpec, LSetError>
where
    I: IntoIterator<Item = u64>,
{
    let mut stream = stream.into_iter().peekable();
    let mut consumed: Vec<u64> = Vec::new();
    let mut core_len = 0usize;
    // reach[t]: t is a sum of elements of the current core.
    let mut reach: Vec<bool> = vec![true];

    while consumed.len() < budget {
        let Some(x) = stream.next() else { break };
        if x < mode.min_length() {
            return Err(LSetError::LengthTooSmall(x));
        }
        if consumed.last().is_some_and(|&last| x <= last) {
            return Err(LSetError::NotIncreasing(x));
        }
        consumed.push(x);

        let old_len = reach.len();
        let core = &consumed[..core_len];
        for t in old_len..=x as usize {
            let hit = core.iter().any(|&c| c as usize <= t && reach[t - c as usize]);
            reach.push(hit);
        }
        if !reach[x as usize] {
            // Everything consumed so far joins the prefix.
            let added = consumed[core_len..].to_vec();
            core_len = consumed.len();
            for c in added {
                let c = c as usize;
                for t in c..reach.len() {
                    if reach[t - c] {
                        reach[t] = true;
                    }
                }
            }
        }
    }

    if consumed.is_empty() {
        return Err(LSetError::EmptySet);
    }
    let core = LSpec::new(&consumed[..core_len], mode)?;
    let exhausted = stream.peek().is_none();
    let last = *consumed.last().expect("non-empty");
    if exhausted || last > core.threshold() {
        Ok(core)
    } else {
        Err(LSetError::BudgetExhausted { prefix: consumed })
    }
}

/// How lengths outside the core are rewritten as sums of core lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Decomposition {
    /// The core is the whole set.
    Identity,
    /// `g` is itself a permitted length: `floor(len/ell)` copies of `ell`
    /// followed by `(len mod ell)/g` copies of `g`.
    Filler { ell: u64 },
    /// `g` is not a permitted length. `g = sum(xi[i] * pi[i])` is a Bezout
    /// identity over permitted lengths, `offset = -min(xi) * ell * sum(pi)`.
    /// A length splits into `floor((len - offset)/ell)` copies of `ell` and
    /// `r*xi[i]/g - min(xi)*ell` copies of each `pi[i]`, where
    /// `r = (len - offset) mod ell`.
    Bezout {
        ell: u64,
        pi: Vec<u64>,
        xi: Vec<i128>,
        offset: u64,
    },
}

/// A core of a finite length set together with a decomposer for the lengths
/// that were dropped from it.
#[derive(Debug, Clone)]
pub struct SCore {
    full: LSpec,
    core: LSpec,
    stretch: (u64, u64),
    rule: Decomposition,
}

impl SCore {
    pub fn core(&self) -> &LSpec {
        &self.core
    }

    pub fn full(&self) -> &LSpec {
        &self.full
    }

    /// The stretch factor `s` as `(numerator, denominator)`.
    pub fn stretch(&self) -> (u64, u64) {
        self.stretch
    }

    /// Lengths of the full set that are not in the core.
    pub fn dropped(&self) -> impl Iterator<Item = u64> + '_ {
        self.full
            .lengths()
            .iter()
            .copied()
            .filter(|&x| !self.core.contains(x))
    }

    /// Splits a dropped length into at most `len / s` core lengths.
    pub fn decompose(&self, len: u64) -> Result<Vec<u64>, LSetError> {
        if !self.full.contains(len) || self.core.contains(len) {
            return Err(LSetError::DecomposerUndefined(len));
        }
        let g = self.full.g();
        decompose_with(&self.rule, g, len).ok_or(LSetError::DecomposerUndefined(len))
    }
}

fn decompose_with(rule: &Decomposition, g: u64, len: u64) -> Option<Vec<u64>> {
    match rule {
        Decomposition::Identity => None,
        Decomposition::Filler { ell } => {
            let mut parts = vec![*ell; (len / ell) as usize];
            parts.extend(std::iter::repeat_n(g, ((len % ell) / g) as usize));
            Some(parts)
        }
        Decomposition::Bezout { ell, pi, xi, offset } => {
            let rest = len.checked_sub(*offset)?;
            let q = rest / ell;
            let r = (rest % ell) as i128;
            let xi_min = *xi.iter().min()?;
            let mut parts = vec![*ell; q as usize];
            for (&p, &x) in pi.iter().zip(xi) {
                let rho = r * x / g as i128 - xi_min * *ell as i128;
                debug_assert!(rho >= 0);
                parts.extend(std::iter::repeat_n(p, rho as usize));
            }
            Some(parts)
        }
    }
}

/// Shrinks a finite length set to a core `L'` with the same closure such that
/// every dropped length `len` splits into at most `len / s` core lengths,
/// where `s = s_num / s_den > 1`.
///
/// Every permitted `ell > s` is tried as the repeated part and the one giving
/// the smallest core wins. When no proper core exists the full set is
/// returned and the decomposer is never needed.
pub fn s_core(spec: &LSpec, s_num: u64, s_den: u64) -> Result<SCore, LSetError> {
    if s_den == 0 || s_num <= s_den {
        return Err(LSetError::InvalidStretch { num: s_num, den: s_den });
    }
    let lengths = spec.lengths();
    let g = spec.g();

    // Bezout identity over the shortest prefix of lengths whose gcd is g.
    let bezout = if spec.contains(g) {
        None
    } else {
        let mut pi = vec![lengths[0]];
        let mut xi: Vec<i128> = vec![1];
        let mut d = lengths[0] as i128;
        for &x in &lengths[1..] {
            if d == g as i128 {
                break;
            }
            let (nd, a, b) = ext_gcd(d, x as i128);
            if nd == d {
                continue;
            }
            xi.iter_mut().for_each(|c| *c *= a);
            xi.push(b);
            pi.push(x);
            d = nd;
        }
        Some((pi, xi))
    };

    let mut best: Option<(usize, Decomposition)> = None;
    for &ell in lengths.iter().filter(|&&x| x * s_den > s_num) {
        let (rule, base) = match &bezout {
            None => (Decomposition::Filler { ell }, ell.max(g)),
            Some((pi, xi)) => {
                let xi_min = *xi.iter().min().expect("non-empty");
                let sum_pi: u64 = pi.iter().sum();
                let offset = (-xi_min) as u128 * ell as u128 * sum_pi as u128;
                let Ok(offset) = u64::try_from(offset) else { continue };
                let base = ell.max(*pi.iter().max().expect("non-empty")).max(offset);
                (
                    Decomposition::Bezout {
                        ell,
                        pi: pi.clone(),
                        xi: xi.clone(),
                        offset,
                    },
                    base,
                )
            }
        };
        // The core must reach past every length whose decomposition is too
        // long (or undefined).
        let worst = lengths
            .iter()
            .rev()
            .copied()
            .find(|&len| match decompose_with(&rule, g, len) {
                Some(parts) => parts.len() as u128 * s_num as u128 > len as u128 * s_den as u128,
                None => true,
            })
            .unwrap_or(0);
        let cut = base.max(worst);
        let core_size = lengths.partition_point(|&x| x <= cut);
        if best.as_ref().is_none_or(|(size, _)| core_size < *size) {
            best = Some((core_size, rule));
        }
    }

    let (core_size, rule) = match best {
        Some((size, rule)) if size < lengths.len() => (size, rule),
        _ => (lengths.len(), Decomposition::Identity),
    };
    let core = LSpec::new(&lengths[..core_size], spec.mode())?;
    Ok(SCore {
        full: spec.clone(),
        core,
        stretch: (s_num, s_den),
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent membership oracle: plain unbounded subset sum.
    fn brute_closure(lengths: &[u64], n: u64) -> bool {
        reachable_sums(lengths, n)[n as usize]
    }

    #[test]
    fn frobenius_values() {
        let s = LSpec::new(&[8, 10], LengthMode::Undirected).unwrap();
        assert_eq!((s.g(), s.p()), (2, 11));
        let s = LSpec::new(&[5], LengthMode::Undirected).unwrap();
        assert_eq!((s.g(), s.p()), (5, 0));
        let s = LSpec::new(&[3, 5], LengthMode::Undirected).unwrap();
        assert_eq!((s.g(), s.p()), (1, 7));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(LSpec::new(&[], LengthMode::Directed), Err(LSetError::EmptySet));
        assert_eq!(
            LSpec::new(&[2, 5], LengthMode::Undirected),
            Err(LSetError::LengthTooSmall(2))
        );
        assert!(LSpec::new(&[2, 5], LengthMode::Directed).is_ok());
        assert_eq!(
            LSpec::new(&[1], LengthMode::Directed),
            Err(LSetError::LengthTooSmall(1))
        );
    }

    #[test]
    fn closure_examples() {
        let three = LSpec::new(&[3], LengthMode::Undirected).unwrap();
        assert!(!three.in_closure(7));
        let s = LSpec::new(&[3, 5], LengthMode::Undirected).unwrap();
        assert!(s.in_closure(8));
        let s = LSpec::new(&[8, 10], LengthMode::Undirected).unwrap();
        // 44 = 8 + 8 + 8 + 10 + 10
        assert!(brute_closure(&[8, 10], 44));
        assert!(s.in_closure(44));
        assert!(!s.in_closure(22));
        assert!(s.in_closure(24));
        assert!(!s.in_closure(23));
    }

    #[test]
    fn partition_examples() {
        let s = LSpec::new(&[4], LengthMode::Undirected).unwrap();
        assert_eq!(s.partition_of(12).unwrap(), vec![4, 4, 4]);
        let s = LSpec::new(&[3, 5], LengthMode::Undirected).unwrap();
        assert_eq!(s.partition_of(8).unwrap(), vec![5, 3]);
        let s = LSpec::new(&[8, 10], LengthMode::Undirected).unwrap();
        assert_eq!(s.partition_of(36).unwrap(), vec![10, 10, 8, 8]);
        assert_eq!(s.partition_of(22), Err(LSetError::NotAdmissible(22)));
        assert_eq!(s.partition_of(0), Err(LSetError::NotAdmissible(0)));
    }

    #[test]
    fn partition_prefers_large_parts_on_ties() {
        // 12 = 6+6 = 8+4 = 5+7 ...: two parts, largest-first wins.
        let s = LSpec::new(&[4, 5, 6, 7, 8], LengthMode::Undirected).unwrap();
        assert_eq!(s.partition_of(12).unwrap(), vec![8, 4]);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(parse_lengths("8,10").unwrap(), vec![8, 10]);
        assert_eq!(parse_lengths("4,6..9").unwrap(), vec![4, 6, 7, 8, 9]);
        assert_eq!(parse_lengths(" 4 , 10 .. 16 step 2 ").unwrap(), vec![4, 10, 12, 14, 16]);
        assert_eq!(parse_lengths("5,3,5").unwrap(), vec![3, 5]);
        assert!(parse_lengths("4,,5").is_err());
        assert!(parse_lengths("9..4").is_err());
        assert!(parse_lengths("4..9 step 0").is_err());
        assert!(parse_lengths("x").is_err());
        assert_eq!(parse_lengths("  "), Err(LSetError::EmptySet));
    }

    #[test]
    fn finite_core_examples() {
        let evens = (2..).map(|k| 2 * k);
        let core = finite_core(evens, 200, LengthMode::Undirected).unwrap();
        assert_eq!(core.lengths(), &[4, 6]);

        let core = finite_core([7], 10, LengthMode::Undirected).unwrap();
        assert_eq!(core.lengths(), &[7]);

        // {8,10} misses 12; {8,10,12} misses 14; {8,..,14} covers every
        // even number from 16 on.
        let evens = (4..).map(|k| 2 * k);
        let core = finite_core(evens, 200, LengthMode::Undirected).unwrap();
        assert_eq!(core.lengths(), &[8, 10, 12, 14]);
    }

    #[test]
    fn finite_core_keeps_a_prefix() {
        // 8 is redundant but precedes 9, which is not.
        let core = finite_core([4, 6, 8, 9], 10, LengthMode::Undirected).unwrap();
        assert_eq!(core.lengths(), &[4, 6, 8, 9]);
    }

    #[test]
    fn finite_core_budget() {
        let evens = (4..).map(|k| 2 * k);
        match finite_core(evens, 3, LengthMode::Undirected) {
            Err(LSetError::BudgetExhausted { prefix }) => assert_eq!(prefix, vec![8, 10, 12]),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            finite_core([5, 4], 3, LengthMode::Undirected),
            Err(LSetError::NotIncreasing(4))
        );
        assert_eq!(
            finite_core(std::iter::empty(), 3, LengthMode::Undirected),
            Err(LSetError::EmptySet)
        );
    }

    #[test]
    fn s_core_even_range() {
        let full = LSpec::parse("4..100 step 2", LengthMode::Undirected).unwrap();
        let sc = s_core(&full, 2, 1).unwrap();
        assert!(sc.core().lengths().len() < full.lengths().len());
        assert!(sc.core().lengths().iter().any(|&x| x > 2));
        let parts = sc.decompose(96).unwrap();
        assert_eq!(parts.iter().sum::<u64>(), 96);
        assert!(parts.len() <= 48);
        assert!(parts.iter().all(|&x| sc.core().contains(x)));
    }

    #[test]
    fn s_core_consecutive_range() {
        let full = LSpec::parse("2..50", LengthMode::Directed).unwrap();
        let sc = s_core(&full, 3, 1).unwrap();
        assert!(!sc.core().contains(48));
        let parts = sc.decompose(48).unwrap();
        assert_eq!(parts.iter().sum::<u64>(), 48);
        assert!(parts.len() <= 16);
    }

    #[test]
    fn s_core_degenerates_to_identity() {
        let full = LSpec::new(&[3, 5], LengthMode::Undirected).unwrap();
        let sc = s_core(&full, 10, 1).unwrap();
        assert_eq!(sc.core().lengths(), full.lengths());
        assert_eq!(sc.dropped().count(), 0);
        assert_eq!(sc.decompose(5), Err(LSetError::DecomposerUndefined(5)));
        assert!(matches!(s_core(&full, 1, 1), Err(LSetError::InvalidStretch { .. })));
    }

    #[test]
    fn s_core_with_gcd_in_set() {
        let full = LSpec::parse("2..120 step 2", LengthMode::Directed).unwrap();
        let sc = s_core(&full, 4, 1).unwrap();
        assert!(sc.dropped().count() > 0);
        for len in sc.dropped() {
            let parts = sc.decompose(len).unwrap();
            assert_eq!(parts.iter().sum::<u64>(), len);
            assert!(parts.len() as u64 * 4 <= len);
        }
    }
}
