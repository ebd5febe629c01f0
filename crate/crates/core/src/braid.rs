//! Braid words over the Artin generators, half twists, homogeneity and
//! the locally twisted predicates.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Neg => -1,
            Sign::Pos => 1,
        }
    }

    pub fn of(v: i32) -> Sign {
        if v < 0 {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Pos => Sign::Neg,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Pos => "+",
        })
    }
}

/// A generator `σ_i` or its inverse, stored as a nonzero signed index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: usize, sign: Sign) -> Letter {
        assert!(index >= 1, "generator index starts at 1");
        Letter(index as i32 * sign.value())
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn sign(self) -> Sign {
        Sign::of(self.0)
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn with_sign(self, sign: Sign) -> Letter {
        Letter::new(self.index(), sign)
    }

    pub fn shifted(self, by: isize) -> Letter {
        Letter::new((self.index() as isize + by) as usize, self.sign())
    }

    pub fn raw(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for Letter {
    type Error = Error;
    fn try_from(v: i32) -> Result<Letter> {
        if v == 0 {
            Err(Error::Parse("letter 0 is not a generator".into()))
        } else {
            Ok(Letter(v))
        }
    }
}

impl From<Letter> for i32 {
    fn from(l: Letter) -> i32 {
        l.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    letters: Vec<Letter>,
    strands: usize,
}

impl BraidWord {
    /// Builds a word on `strands` strands. A single strand is only allowed
    /// for the empty word.
    pub fn new(letters: Vec<Letter>, strands: usize) -> Result<BraidWord> {
        if strands == 0 {
            return Err(Error::InvalidInput("a braid needs at least one strand".into()));
        }
        if let Some(l) = letters.iter().find(|l| l.index() >= strands) {
            return Err(Error::InvalidInput(format!(
                "letter {l} needs more than {strands} strands"
            )));
        }
        Ok(BraidWord { letters, strands })
    }

    pub fn from_ints(ints: &[i32], strands: usize) -> Result<BraidWord> {
        let letters = ints
            .iter()
            .map(|&v| Letter::try_from(v))
            .collect::<Result<Vec<_>>>()?;
        BraidWord::new(letters, strands)
    }

    /// Parses whitespace separated nonzero integers; the strand count
    /// defaults to `max|k| + 1`.
    pub fn parse(s: &str) -> Result<BraidWord> {
        BraidWord::parse_with_strands(s, None)
    }

    pub fn parse_with_strands(s: &str, strands: Option<usize>) -> Result<BraidWord> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let v: i32 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("'{tok}' is not an integer")))?;
                Letter::try_from(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let natural = letters.iter().map(|l| l.index() + 1).max().unwrap_or(1);
        let n = match strands {
            Some(n) if n < natural => {
                return Err(Error::Parse(format!(
                    "word needs {natural} strands but {n} were given"
                )))
            }
            Some(n) => n,
            None => natural,
        };
        BraidWord::new(letters, n)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.letters.iter().map(|l| l.sign().value() as i64).sum()
    }

    /// Letterwise sign inversion.
    pub fn mirror(&self) -> BraidWord {
        BraidWord {
            letters: self.letters.iter().map(|l| l.inverse()).collect(),
            strands: self.strands,
        }
    }

    pub fn reversed(&self) -> BraidWord {
        BraidWord {
            letters: self.letters.iter().rev().copied().collect(),
            strands: self.strands,
        }
    }

    pub fn with_strands(&self, strands: usize) -> Result<BraidWord> {
        BraidWord::new(self.letters.clone(), strands)
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord {
            letters,
            strands: self.strands.max(other.strands),
        }
    }

    pub fn power(&self, q: usize) -> BraidWord {
        BraidWord {
            letters: self.letters.repeat(q),
            strands: self.strands,
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<BraidWord> {
        BraidWord::parse(s)
    }
}

/// `r = (r_1, …, r_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPattern(Vec<Sign>);

impl SignPattern {
    pub fn new(signs: Vec<Sign>) -> SignPattern {
        SignPattern(signs)
    }

    pub fn from_ints(v: &[i32]) -> SignPattern {
        SignPattern(v.iter().map(|&x| Sign::of(x)).collect())
    }

    pub fn constant(len: usize, sign: Sign) -> SignPattern {
        SignPattern(vec![sign; len])
    }

    pub fn strands(&self) -> usize {
        self.0.len() + 1
    }

    /// `r_i` for a 1-based generator index.
    pub fn at(&self, i: usize) -> Sign {
        self.0[i - 1]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn negated(&self) -> SignPattern {
        SignPattern(self.0.iter().map(|&s| -s).collect())
    }

    /// Breakpoints `1 = i_1 < … < i_m = n`.
    pub fn breakpoints(&self) -> Vec<usize> {
        let n = self.strands();
        let mut bp = vec![1];
        for i in 2..n {
            if self.at(i - 1) != self.at(i) {
                bp.push(i);
            }
        }
        if n > 1 {
            bp.push(n);
        }
        bp
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", s.value())?;
        }
        f.write_str(")")
    }
}

/// Start position to end position, both 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidInput("not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Permutation(images))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, p: usize) -> usize {
        self.0[p - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// True when `[i..j]` is reversed and everything else is fixed.
    pub fn reverses(&self, i: usize, j: usize) -> bool {
        (1..=self.size()).all(|p| {
            let want = if (i..=j).contains(&p) { i + j - p } else { p };
            self.image(p) == want
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}→{}", k + 1, v)?;
        }
        f.write_str("]")
    }
}

fn half_twist_letters(i: usize, j: usize, sign: Sign) -> Vec<Letter> {
    (i..j)
        .rev()
        .flat_map(|top| (i..=top).map(move |k| Letter::new(k, sign)))
        .collect()
}

/// `δ_{i,j} = (σ_i…σ_{j-1})(σ_i…σ_{j-2})…σ_i` or its letterwise inverse.
pub fn half_twist_word(i: usize, j: usize, sign: Sign) -> Result<BraidWord> {
    if i == 0 || i >= j {
        return Err(Error::InvalidInterval { i, j });
    }
    BraidWord::new(half_twist_letters(i, j, sign), j)
}

pub fn half_twist_len(i: usize, j: usize) -> usize {
    (j - i + 1) * (j - i) / 2
}

pub fn permutation_of(w: &BraidWord) -> Permutation {
    permutation_of_letters(w.letters(), w.strands())
}

fn permutation_of_letters(letters: &[Letter], n: usize) -> Permutation {
    // pos[s] = current position of the strand that started at s
    let mut at: Vec<usize> = (0..=n).collect();
    let mut pos: Vec<usize> = (0..=n).collect();
    for l in letters {
        let i = l.index();
        let (a, b) = (at[i], at[i + 1]);
        at.swap(i, i + 1);
        pos[a] = i + 1;
        pos[b] = i;
    }
    Permutation(pos[1..].to_vec())
}

/// Whether a sign-uniform word on strands `i..j` equals `Δ_{i,j}^{±1}`.
pub fn represents_half_twist(w: &BraidWord, i: usize, j: usize, sign: Sign) -> Result<bool> {
    letters_represent_half_twist(w.letters(), i, j, sign)
}

fn letters_represent_half_twist(letters: &[Letter], i: usize, j: usize, sign: Sign) -> Result<bool> {
    if i == 0 || i >= j {
        return Err(Error::InvalidInterval { i, j });
    }
    for l in letters {
        if l.index() < i || l.index() >= j {
            return Err(Error::InvalidInput(format!("letter {l} outside strands {i}..{j}")));
        }
        if l.sign() != sign {
            return Err(Error::InvalidInput(format!("letter {l} has the wrong sign")));
        }
    }
    if letters.len() != half_twist_len(i, j) {
        return Ok(false);
    }
    Ok(permutation_of_letters(letters, j).reverses(i, j))
}

pub fn is_r_homogeneous(w: &BraidWord, r: &SignPattern) -> bool {
    w.letters()
        .iter()
        .all(|l| l.index() <= r.signs().len() && r.at(l.index()) == l.sign())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    /// Strand interval `[lo, hi]`; letters use indices `lo..hi`.
    pub lo: usize,
    pub hi: usize,
    pub sign: Sign,
    pub letters: Vec<Letter>,
}

impl Layer {
    pub fn twist_len(&self) -> usize {
        half_twist_len(self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    pub breakpoints: Vec<usize>,
    pub layers: Vec<Layer>,
}

pub fn uniform_layers(w: &BraidWord, r: &SignPattern) -> Result<LayerDecomposition> {
    if r.strands() != w.strands() {
        return Err(Error::InvalidInput(format!(
            "sign pattern has length {} but the word has {} strands",
            r.signs().len(),
            w.strands()
        )));
    }
    if !is_r_homogeneous(w, r) {
        return Err(Error::NotHomogeneous);
    }
    let breakpoints = r.breakpoints();
    let layers = breakpoints
        .windows(2)
        .map(|b| Layer {
            lo: b[0],
            hi: b[1],
            sign: r.at(b[0]),
            letters: w
                .letters()
                .iter()
                .filter(|l| (b[0]..b[1]).contains(&l.index()))
                .copied()
                .collect(),
        })
        .collect();
    Ok(LayerDecomposition { breakpoints, layers })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistMode {
    Plus,
    Minus,
    Both,
}

impl TwistMode {
    fn requires(self, sign: Sign) -> bool {
        match self {
            TwistMode::Plus => sign == Sign::Pos,
            TwistMode::Minus => sign == Sign::Neg,
            TwistMode::Both => true,
        }
    }
}

/// Where `v1` ends and `v3` starts inside one layer word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSplit {
    pub layer: usize,
    pub prefix_end: usize,
    pub suffix_start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistWitness {
    pub r: SignPattern,
    pub splits: Vec<LayerSplit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistVerdict {
    pub holds: bool,
    pub witness: Option<TwistWitness>,
}

fn layer_split(k: usize, layer: &Layer) -> Option<LayerSplit> {
    let d = layer.twist_len();
    let len = layer.letters.len();
    if len < 2 * d {
        return None;
    }
    let v1 = &layer.letters[..d];
    let v3 = &layer.letters[len - d..];
    let ok = |v: &[Letter]| {
        letters_represent_half_twist(v, layer.lo, layer.hi, layer.sign).unwrap_or(false)
    };
    (ok(v1) && ok(v3)).then_some(LayerSplit {
        layer: k,
        prefix_end: d,
        suffix_start: len - d,
    })
}

/// Checks `w ∈ H_r^#` for the given pattern.
pub fn twisted_for_pattern(w: &BraidWord, r: &SignPattern, mode: TwistMode) -> Option<TwistWitness> {
    let dec = uniform_layers(w, r).ok()?;
    let mut splits = Vec::new();
    for (k, layer) in dec.layers.iter().enumerate() {
        if mode.requires(layer.sign) {
            splits.push(layer_split(k, layer)?);
        }
    }
    Some(TwistWitness { r: r.clone(), splits })
}

/// Existential check over sign patterns: indices occurring in `w` have
/// forced signs, absent ones are enumerated.
pub fn locally_twisted_check(w: &BraidWord, mode: TwistMode) -> TwistVerdict {
    let n = w.strands();
    let no = TwistVerdict { holds: false, witness: None };
    if n < 2 {
        return no;
    }
    let mut forced: Vec<Option<Sign>> = vec![None; n - 1];
    for l in w.letters() {
        match forced[l.index() - 1] {
            None => forced[l.index() - 1] = Some(l.sign()),
            Some(s) if s != l.sign() => return no,
            Some(_) => {}
        }
    }
    let free: Vec<usize> = (0..n - 1).filter(|&k| forced[k].is_none()).collect();
    assert!(free.len() < 24, "too many free generator indices to enumerate");
    for mask in 0u32..(1u32 << free.len()) {
        let mut signs: Vec<Sign> = forced.iter().map(|s| s.unwrap_or(Sign::Pos)).collect();
        for (b, &k) in free.iter().enumerate() {
            if mask & (1 << b) != 0 {
                signs[k] = Sign::Neg;
            }
        }
        let r = SignPattern(signs);
        if let Some(witness) = twisted_for_pattern(w, &r, mode) {
            return TwistVerdict { holds: true, witness: Some(witness) };
        }
    }
    no
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentWitness {
    /// `u1 · σ_1⁻¹…σ_{n-1}⁻¹ · u2`
    pub prefix_form: BraidWord,
    pub u1: BraidWord,
    pub u2: BraidWord,
    /// `u3 · σ_{n-1}⁻¹…σ_1⁻¹ · u4`
    pub suffix_form: BraidWord,
    pub u3: BraidWord,
    pub u4: BraidWord,
}

pub const FRAGMENT_SEARCH_CAP: usize = 1_000_000;

fn find_run(
    word: &[Letter],
    run: &[Letter],
    before: impl Fn(usize) -> bool,
    after: impl Fn(usize) -> bool,
) -> Option<usize> {
    (0..=word.len().saturating_sub(run.len())).find(|&p| {
        word[p..].starts_with(run)
            && word[..p].iter().all(|l| before(l.index()))
            && word[p + run.len()..].iter().all(|l| after(l.index()))
    })
}

/// Breadth-first search over the far commutativity class of `u` for the two
/// factorizations of `Δ⁻¹`.
pub fn fragment_witness(u: &BraidWord) -> Result<FragmentWitness> {
    fragment_witness_capped(u, FRAGMENT_SEARCH_CAP)
}

pub fn fragment_witness_capped(u: &BraidWord, cap: usize) -> Result<FragmentWitness> {
    let n = u.strands();
    if n < 2 || u.letters().iter().any(|l| l.sign() != Sign::Neg) {
        return Err(Error::Precondition("word must be all-negative on at least 2 strands".into()));
    }
    if !represents_half_twist(&u.mirror(), 1, n, Sign::Pos)? {
        return Err(Error::Precondition("word does not represent the inverse half twist".into()));
    }
    let up: Vec<Letter> = (1..n).map(|i| Letter::new(i, Sign::Neg)).collect();
    let down: Vec<Letter> = up.iter().rev().copied().collect();
    let mut prefix: Option<(Vec<Letter>, usize)> = None;
    let mut suffix: Option<(Vec<Letter>, usize)> = None;

    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(u.letters().to_vec());
    queue.push_back(u.letters().to_vec());
    while let Some(word) = queue.pop_front() {
        if prefix.is_none() {
            if let Some(p) = find_run(&word, &up, |i| i >= 2, |i| i <= n - 2) {
                prefix = Some((word.clone(), p));
            }
        }
        if suffix.is_none() {
            if let Some(p) = find_run(&word, &down, |i| i <= n - 2, |i| i >= 2) {
                suffix = Some((word.clone(), p));
            }
        }
        if prefix.is_some() && suffix.is_some() {
            break;
        }
        for k in 0..word.len().saturating_sub(1) {
            if word[k].index().abs_diff(word[k + 1].index()) >= 2 {
                let mut next = word.clone();
                next.swap(k, k + 1);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(Error::SearchBound(cap));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    let (Some((pw, pp)), Some((sw, sp))) = (prefix, suffix) else {
        return Err(Error::Invariant("far commutativity class has no fragment form".into()));
    };
    let mk = |ls: &[Letter]| BraidWord::new(ls.to_vec(), n);
    let k = n - 1;
    Ok(FragmentWitness {
        prefix_form: mk(&pw)?,
        u1: mk(&pw[..pp])?,
        u2: mk(&pw[pp + k..])?,
        suffix_form: mk(&sw)?,
        u3: mk(&sw[..sp])?,
        u4: mk(&sw[sp + k..])?,
    })
}

/// A uniformly chosen reduced word of the longest permutation on `[lo, hi]`.
fn random_half_twist(lo: usize, hi: usize, sign: Sign, rng: &mut impl Rng) -> Vec<Letter> {
    let mut arrangement: Vec<usize> = (lo..=hi).collect();
    let mut out = Vec::with_capacity(half_twist_len(lo, hi));
    loop {
        let ascents: Vec<usize> = (0..arrangement.len() - 1)
            .filter(|&p| arrangement[p] < arrangement[p + 1])
            .collect();
        let Some(&p) = ascents.choose(rng) else { break };
        arrangement.swap(p, p + 1);
        out.push(Letter::new(lo + p, sign));
    }
    out
}

/// Per layer `Δ^{±1} · random · Δ^{±1}`, layers shuffled together.
pub fn random_locally_twisted_word(r: &SignPattern, budget: usize, seed: u64) -> Result<BraidWord> {
    let n = r.strands();
    if n < 2 {
        return Err(Error::InvalidInput("sign pattern must be nonempty".into()));
    }
    let bp = r.breakpoints();
    let need: usize = bp.windows(2).map(|b| 2 * half_twist_len(b[0], b[1])).sum();
    if budget < need {
        return Err(Error::Budget { budget, need });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers: Vec<(usize, usize, Sign)> = bp.windows(2).map(|b| (b[0], b[1], r.at(b[0]))).collect();
    let mut middle_len = vec![0usize; layers.len()];
    for _ in 0..budget - need {
        middle_len[rng.gen_range(0..layers.len())] += 1;
    }
    let mut words: Vec<Vec<Letter>> = Vec::new();
    for (k, &(lo, hi, sign)) in layers.iter().enumerate() {
        let mut w = random_half_twist(lo, hi, sign, &mut rng);
        for _ in 0..middle_len[k] {
            w.push(Letter::new(rng.gen_range(lo..hi), sign));
        }
        w.extend(random_half_twist(lo, hi, sign, &mut rng));
        words.push(w);
    }
    let mut cursors = vec![0usize; words.len()];
    let mut letters = Vec::with_capacity(budget);
    while letters.len() < budget {
        let open: Vec<usize> = (0..words.len()).filter(|&k| cursors[k] < words[k].len()).collect();
        let k = *open.choose(&mut rng).expect("letters remain");
        letters.push(words[k][cursors[k]]);
        cursors[k] += 1;
    }
    BraidWord::new(letters, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BraidWord {
        BraidWord::parse(s).unwrap()
    }

    /// All positive words of the given length over `σ_1..σ_{n-1}`.
    fn positive_words(n: usize, len: usize) -> Vec<BraidWord> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p: Vec<Letter>| {
                    (1..n).map(move |i| {
                        let mut q = p.clone();
                        q.push(Letter::new(i, Sign::Pos));
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(|ls| BraidWord::new(ls, n).unwrap()).collect()
    }

    #[test]
    fn half_twists() {
        assert_eq!(half_twist_word(1, 2, Sign::Pos).unwrap().to_string(), "1");
        assert_eq!(half_twist_word(1, 3, Sign::Pos).unwrap().to_string(), "1 2 1");
        assert_eq!(half_twist_word(2, 4, Sign::Neg).unwrap().to_string(), "-2 -3 -2");
        assert_eq!(half_twist_word(3, 3, Sign::Pos), Err(Error::InvalidInterval { i: 3, j: 3 }));
    }

    #[test]
    fn half_twist_matches_brute_force() {
        // every length-3 positive word on two generators reversing {1,2,3}
        let reversing: Vec<String> = positive_words(3, 3)
            .into_iter()
            .filter(|w| permutation_of(w).reverses(1, 3))
            .map(|w| w.to_string())
            .collect();
        assert_eq!(reversing, vec!["1 2 1", "2 1 2"]);
        assert!(reversing.contains(&half_twist_word(1, 3, Sign::Pos).unwrap().to_string()));
    }

    #[test]
    fn permutations() {
        let id = permutation_of(&BraidWord::parse_with_strands("", Some(3)).unwrap());
        assert_eq!(id, Permutation::identity(3));
        let p = permutation_of(&BraidWord::parse_with_strands("1 2 3", Some(4)).unwrap());
        assert_eq!(p.images(), &[4, 1, 2, 3]);
        assert!(permutation_of(&w("1 2 1")).reverses(1, 3));
    }

    #[test]
    fn half_twist_recognition() {
        assert!(represents_half_twist(&w("1 2 1"), 1, 3, Sign::Pos).unwrap());
        assert!(represents_half_twist(&w("2 1 2"), 1, 3, Sign::Pos).unwrap());
        assert!(!represents_half_twist(&w("1 2 2"), 1, 3, Sign::Pos).unwrap());
        assert!(represents_half_twist(&w("3"), 1, 3, Sign::Pos).is_err());
    }

    #[test]
    fn homogeneity() {
        let r = SignPattern::from_ints(&[1, -1]);
        assert!(is_r_homogeneous(&w("1 -2 1"), &r));
        assert!(!is_r_homogeneous(&w("1 -1"), &SignPattern::from_ints(&[1])));
        assert!(!is_r_homogeneous(&w("1 -1"), &SignPattern::from_ints(&[-1])));
        assert!(is_r_homogeneous(&BraidWord::parse_with_strands("", Some(3)).unwrap(), &r));
    }

    #[test]
    fn layers_of_the_seven_strand_example() {
        // columns of the 7-strand picture, read top to bottom
        let word = w("-1 -6 -2 -5 -1 -4 -6 3 -5 -1 -6 -1 -4 3 -5 -2 -4 -6 -1 3 -5 -2 -4");
        let r = SignPattern::from_ints(&[-1, -1, 1, -1, -1, -1]);
        let dec = uniform_layers(&word, &r).unwrap();
        assert_eq!(dec.breakpoints, vec![1, 3, 4, 7]);
        let sets: Vec<(usize, usize)> = dec.layers.iter().map(|l| (l.lo, l.hi)).collect();
        assert_eq!(sets, vec![(1, 3), (3, 4), (4, 7)]);
        let v = locally_twisted_check(&word, TwistMode::Both);
        assert!(v.holds);
        assert_eq!(v.witness.unwrap().r, r);
    }

    #[test]
    fn layers_trivial_cases() {
        let word = w("1 2 1 1");
        let r = SignPattern::constant(2, Sign::Pos);
        let dec = uniform_layers(&word, &r).unwrap();
        assert_eq!(dec.layers.len(), 1);
        assert_eq!(dec.layers[0].letters, word.letters());
        let empty = BraidWord::parse_with_strands("", Some(3)).unwrap();
        let dec = uniform_layers(&empty, &SignPattern::from_ints(&[1, -1])).unwrap();
        assert_eq!(dec.breakpoints, vec![1, 2, 3]);
        assert!(dec.layers.iter().all(|l| l.letters.is_empty()));
        assert_eq!(uniform_layers(&w("1 -1"), &SignPattern::from_ints(&[1])), Err(Error::NotHomogeneous));
    }

    #[test]
    fn locally_twisted_examples() {
        let fig1 = [
            "-1 2 -1 2 -1 2 -1 2 -1",
            "-2 -3 -2 1 -3 -2 -3 -2 1",
            "-2 -3 -2 1 -2 1 -3 -2 1",
            "-2 -3 -2 1 4 -2 -3 1 -2 4",
            "-2 -1 -2 3 -2 4 3 -1 -2 4 3 4",
            "-1 -2 -1 -3 -2 -1 -3 -2 -1 -3 -2 -3",
        ];
        for s in fig1 {
            assert!(locally_twisted_check(&w(s), TwistMode::Both).holds, "{s}");
        }
        let hopf = locally_twisted_check(&w("1 1"), TwistMode::Both);
        assert!(hopf.holds);
        let split = &hopf.witness.unwrap().splits[0];
        assert_eq!((split.prefix_end, split.suffix_start), (1, 1));
        assert!(!locally_twisted_check(&w("1"), TwistMode::Both).holds);
        assert!(!locally_twisted_check(&w("-1 2 -1"), TwistMode::Both).holds);
    }

    #[test]
    fn fragment_examples() {
        let f = fragment_witness(&w("-2 -1 -2")).unwrap();
        assert_eq!(f.u1.to_string(), "-2");
        assert_eq!(f.u2.to_string(), "");
        let f = fragment_witness(&w("-1 -2 -1")).unwrap();
        assert_eq!(f.u1.to_string(), "");
        assert_eq!(f.u2.to_string(), "-1");
        let delta = half_twist_word(1, 4, Sign::Neg).unwrap();
        let f = fragment_witness(&delta).unwrap();
        assert!(f.prefix_form.len() == 6 && f.suffix_form.len() == 6);
        assert!(matches!(fragment_witness(&w("-1 -1")), Err(Error::Precondition(_))));
    }

    #[test]
    fn generator_examples() {
        let r = SignPattern::from_ints(&[-1]);
        assert_eq!(random_locally_twisted_word(&r, 2, 7).unwrap().to_string(), "-1 -1");
        let r = SignPattern::from_ints(&[1, 1]);
        let g = random_locally_twisted_word(&r, 6, 3).unwrap();
        assert!(locally_twisted_check(&g, TwistMode::Both).holds);
        assert!(matches!(random_locally_twisted_word(&r, 5, 3), Err(Error::Budget { .. })));
        assert_eq!(g, random_locally_twisted_word(&r, 6, 3).unwrap());
    }
}
