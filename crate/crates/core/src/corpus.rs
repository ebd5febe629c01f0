//! Seeded test corpus: showcase words, torus words, random locally twisted
//! instances, random diagrams and Markov pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braid::{half_twist_len, half_twist_word, random_locally_twisted_word, BraidWord, Letter, Sign, SignPattern};
use crate::error::{Error, Result};
use crate::planar::Diagram;

pub const SHOWCASE: [&str; 6] = [
    "-1 2 -1 2 -1 2 -1 2 -1",
    "-2 -3 -2 1 -3 -2 -3 -2 1",
    "-2 -3 -2 1 -2 1 -3 -2 1",
    "-2 -3 -2 1 4 -2 -3 1 -2 4",
    "-2 -1 -2 3 -2 4 3 -1 -2 4 3 4",
    "-1 -2 -1 -3 -2 -1 -3 -2 -1 -3 -2 -3",
];

pub const GOLDEN_SEED: u64 = 0x5eed;
pub const LT_CROSSING_CAP: usize = 18;

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub diagram: Diagram,
}

impl Instance {
    fn closure(name: impl Into<String>, w: &BraidWord) -> Instance {
        Instance { name: name.into(), diagram: Diagram::from_braid(w) }
    }
}

fn word(s: &str) -> BraidWord {
    BraidWord::parse(s).expect("corpus word parses")
}

pub fn showcase() -> Vec<Instance> {
    SHOWCASE.iter().enumerate().map(|(k, s)| Instance::closure(format!("showcase-{}", k + 1), &word(s))).collect()
}

/// `Δ · (σ1…σ_{p−1})^{q−p} · Δ`, whose closure is the torus link `T(p, q)`.
pub fn torus_word(p: usize, q: usize) -> Result<BraidWord> {
    if p < 2 || q < p {
        return Err(Error::InvalidInput(format!("torus word needs 2 <= p <= q, got ({p}, {q})")));
    }
    let delta = half_twist_word(1, p, Sign::Pos)?;
    let cycle = BraidWord::new((1..p).map(|i| Letter::new(i, Sign::Pos)).collect(), p)?;
    Ok(delta.concat(&cycle.power(q - p)).concat(&delta))
}

pub fn torus() -> Vec<Instance> {
    let pairs = [(2, 2), (2, 3), (2, 5), (2, 7), (3, 3), (3, 4), (3, 5), (4, 4), (4, 5)];
    pairs
        .iter()
        .map(|&(p, q)| Instance::closure(format!("torus-{p}-{q}"), &torus_word(p, q).expect("valid torus pair")))
        .collect()
}

fn random_pattern(rng: &mut ChaCha8Rng, strands: usize) -> SignPattern {
    SignPattern::new((1..strands).map(|_| if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg }).collect())
}

fn pattern_need(r: &SignPattern) -> usize {
    r.breakpoints().windows(2).map(|b| 2 * half_twist_len(b[0], b[1])).sum()
}

/// A random locally twisted word with at most `cap` letters.
fn random_lt_word(rng: &mut ChaCha8Rng, cap: usize) -> BraidWord {
    loop {
        let strands = rng.gen_range(2..=5);
        let r = random_pattern(rng, strands);
        let need = pattern_need(&r);
        if need > cap {
            continue;
        }
        let budget = rng.gen_range(need..=cap);
        return random_locally_twisted_word(&r, budget, rng.gen()).expect("budget covers the pattern");
    }
}

/// Splices two diagrams along the first pair of outer segments that works.
pub fn sum_anywhere(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    let mut last = Error::NotOuterSegment;
    for &e1 in &d1.outer_segments() {
        for &e2 in &d2.outer_segments() {
            match d1.connected_sum(d2, e1, e2) {
                Ok(d) => return Ok(d),
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

/// Random locally twisted instances. Every fifth one is a connected sum of
/// two closures, so multi-box templates are covered too.
pub fn random_locally_twisted(count: usize, seed: u64) -> Vec<Instance> {
    random_locally_twisted_capped(count, seed, LT_CROSSING_CAP)
}

pub fn random_locally_twisted_capped(count: usize, seed: u64, cap: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            if k % 5 == 4 {
                let a = random_lt_word(&mut rng, cap / 2);
                let b = random_lt_word(&mut rng, cap - a.len());
                let d = sum_anywhere(&Diagram::from_braid(&a), &Diagram::from_braid(&b)).expect("closures can be summed");
                Instance { name: format!("lt-{k} [{a}] # [{b}]"), diagram: d }
            } else {
                let w = random_lt_word(&mut rng, cap);
                Instance::closure(format!("lt-{k} [{w}]"), &w)
            }
        })
        .collect()
}

/// Showcase words, torus words and 100 random locally twisted instances.
pub fn golden() -> Vec<Instance> {
    let mut out = showcase();
    out.extend(torus());
    out.extend(random_locally_twisted(100, GOLDEN_SEED));
    out
}

pub fn random_word(rng: &mut impl Rng, max_strands: usize, max_len: usize) -> BraidWord {
    let strands = rng.gen_range(2..=max_strands);
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len)
        .map(|_| Letter::new(rng.gen_range(1..strands), if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg }))
        .collect();
    BraidWord::new(letters, strands).expect("letters fit the strands")
}

/// Closures of random words with at most 10 crossings and 5 strands.
pub fn random_diagrams(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let w = random_word(&mut rng, 5, 10);
            Instance::closure(format!("random-{k} [{w}]"), &w)
        })
        .collect()
}

/// `(u·v, v·u)` on a common strand count.
pub fn conjugation_pairs(count: usize, seed: u64) -> Vec<(BraidWord, BraidWord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=5);
            let u = random_word(&mut rng, n, 5).with_strands(n).expect("fits");
            let v = random_word(&mut rng, n, 5).with_strands(n).expect("fits");
            (u.concat(&v), v.concat(&u))
        })
        .collect()
}

/// `(w, w·σ_n^{±1})` with `w` on `n ≤ 4` strands.
pub fn stabilization_pairs(count: usize, seed: u64) -> Vec<(BraidWord, BraidWord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = random_word(&mut rng, 4, 9);
            let n = w.strands();
            let sign = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
            let stab = BraidWord::new(vec![Letter::new(n, sign)], n + 1).expect("one letter");
            (w.clone(), w.with_strands(n + 1).expect("more strands").concat(&stab))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_words() {
        assert_eq!(torus_word(2, 5).unwrap().to_string(), "1 1 1 1 1");
        assert_eq!(torus_word(3, 4).unwrap().to_string(), "1 2 1 1 2 1 2 1");
        assert!(torus_word(3, 2).is_err());
        for t in torus() {
            assert!(crate::seifert::is_locally_twisted(&t.diagram), "{}", t.name);
        }
    }

    #[test]
    fn golden_is_locally_twisted_and_capped() {
        let g = golden();
        assert_eq!(g.len(), 6 + 9 + 100);
        for i in &g {
            assert!(i.diagram.crossing_count() <= LT_CROSSING_CAP, "{}", i.name);
            assert!(crate::seifert::classify(&i.diagram).lth, "{}", i.name);
        }
        let again = random_locally_twisted(100, GOLDEN_SEED);
        assert!(again.iter().zip(&g[15..]).all(|(a, b)| a.name == b.name));
    }

    #[test]
    fn random_words_respect_bounds() {
        for i in random_diagrams(50, 1) {
            assert!(i.diagram.crossing_count() <= 10);
        }
        for (a, b) in stabilization_pairs(20, 2) {
            assert_eq!(a.strands() + 1, b.strands());
            assert_eq!(a.len() + 1, b.len());
        }
        for (a, b) in conjugation_pairs(20, 3) {
            assert_eq!(a.len(), b.len());
        }
    }
}
