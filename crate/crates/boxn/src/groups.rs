//! Group models with decidable equality via normal forms.
//!
//! A [`GroupModel`] is one of three kinds: a free group, a finite group
//! given by its multiplication table, or a finitely presented group with
//! user-supplied rewriting rules. All of them expose the same word
//! algebra over a symmetric generating alphabet, which is what the ring
//! layer builds on. Generating sets are always closed under inverses;
//! loaders symmetrize automatically and record the pairing.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Default rewrite-step budget for presented models.
pub const DEFAULT_NORMALIZATION_BUDGET: u64 = 1_000_000;
/// Default cutoff when searching for the order of an element.
pub const DEFAULT_ORDER_CUTOFF: u64 = 10_000;

/// A symmetric generating alphabet: generator labels plus the involutive
/// pairing sending each label to the label of its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAlphabet {
    names: Vec<String>,
    pairing: Vec<u32>,
}

impl GeneratorAlphabet {
    /// Builds an alphabet from `(name, inverse_name)` pairs. Every name
    /// must be distinct and the pairing must be an involution.
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for (a, b) in &pairs {
            for n in [a, b] {
                if !names.contains(n) {
                    names.push(n.clone());
                }
            }
        }
        let index = |n: &str| names.iter().position(|m| m == n).unwrap() as u32;
        let mut pairing = vec![u32::MAX; names.len()];
        for (a, b) in &pairs {
            pairing[index(a) as usize] = index(b);
            pairing[index(b) as usize] = index(a);
        }
        if pairing.iter().any(|&p| p == u32::MAX) {
            return Err(Error::InvalidGroup("incomplete inverse pairing".into()));
        }
        for (i, &p) in pairing.iter().enumerate() {
            if pairing[p as usize] != i as u32 {
                return Err(Error::InvalidGroup("pairing is not an involution".into()));
            }
        }
        Ok(GeneratorAlphabet { names, pairing })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// The alphabet index of the inverse of generator `i`.
    pub fn inverse(&self, i: u32) -> u32 {
        self.pairing[i as usize]
    }
}

/// A word over the generating alphabet, stored as alphabet indices.
/// The empty word denotes the identity `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn single(i: u32) -> Self {
        Word(vec![i])
    }

    /// Parses a space-separated word over the alphabet; `"e"` is the identity.
    pub fn parse(text: &str, alphabet: &GeneratorAlphabet) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            match alphabet.index_of(tok) {
                Some(i) => letters.push(i),
                None => return Err(Error::UnknownGenerator(tok.to_string())),
            }
        }
        Ok(Word(letters))
    }

    /// Renders the word as space-separated labels; the identity is `"e"`.
    pub fn render(&self, alphabet: &GeneratorAlphabet) -> String {
        if self.0.is_empty() {
            return "e".to_string();
        }
        self.0
            .iter()
            .map(|&i| alphabet.name(i))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Shortlex order: by length first, then lexicographically by indices.
/// This is the canonical key order for ring-element supports.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Constructive witness that the group has finite abelianization: for
/// each generator `s`, an exponent `m` and words `(a_j, b_j)` with
/// `s^m = prod_j b_j^-1 a_j^-1 b_j a_j` in the group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteAbelianizationWitness {
    /// Keyed by alphabet index of the generator.
    pub entries: BTreeMap<u32, WitnessEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessEntry {
    pub exponent: u64,
    pub commutators: Vec<(Word, Word)>,
}

/// The three supported kinds of group model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Free {
        rank: usize,
    },
    Finite {
        elements: Vec<String>,
        /// `table[i][j]` = index of `elements[i] * elements[j]`.
        table: Vec<Vec<usize>>,
        identity: usize,
        /// Element index of each alphabet generator.
        generator_elems: Vec<usize>,
        /// Canonical (shortest-lex BFS) word for every element.
        words: Vec<Word>,
    },
    Presented {
        /// Rewriting rules `lhs -> rhs`; inverse-pair cancellations are
        /// implicit and always applied first.
        rules: Vec<(Vec<u32>, Vec<u32>)>,
    },
}

/// A group with normal forms over a fixed symmetric generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupModel {
    pub kind: GroupKind,
    pub alphabet: GeneratorAlphabet,
    pub witness: Option<FiniteAbelianizationWitness>,
    pub normalization_budget: u64,
    pub order_cutoff: u64,
}

/// Order of a group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
}

impl fmt::Display for ElementOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementOrder::Finite(m) => write!(f, "{m}"),
            ElementOrder::Infinite => write!(f, "infinite"),
        }
    }
}

impl GroupModel {
    /// Free group with auto-named generators `a, b, c, ...` and inverse
    /// labels `a^-1, ...`.
    pub fn free(rank: usize) -> Arc<GroupModel> {
        let names: Vec<String> = (0..rank)
            .map(|i| {
                char::from(b'a' + (i % 26) as u8).to_string()
                    + &(if i >= 26 {
                        (i / 26).to_string()
                    } else {
                        String::new()
                    })
            })
            .collect();
        Self::free_named(&names)
    }

    /// Free group with the given generator names.
    pub fn free_named(names: &[impl AsRef<str>]) -> Arc<GroupModel> {
        let pairs: Vec<(String, String)> = names
            .iter()
            .map(|n| (n.as_ref().to_string(), format!("{}^-1", n.as_ref())))
            .collect();
        Arc::new(GroupModel {
            kind: GroupKind::Free { rank: names.len() },
            alphabet: GeneratorAlphabet::new(pairs).expect("free alphabet"),
            witness: None,
            normalization_budget: DEFAULT_NORMALIZATION_BUDGET,
            order_cutoff: DEFAULT_ORDER_CUTOFF,
        })
    }

    /// Builds a finite model from element names, a multiplication table and
    /// generator names. The generating set is symmetrized, canonical BFS
    /// words are computed, and the table is checked to be a group.
    pub fn finite(
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        generators: Vec<String>,
    ) -> Result<Arc<GroupModel>> {
        let n = elements.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("table shape mismatch".into()));
        }
        if table.iter().any(|r| r.iter().any(|&k| k >= n)) {
            return Err(Error::InvalidGroup("table index out of range".into()));
        }
        // identity
        let identity = (0..n)
            .find(|&i| (0..n).all(|j| table[i][j] == j && table[j][i] == j))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        // associativity
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        // inverses
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inv[a] = b,
                None => {
                    return Err(Error::InvalidGroup(format!(
                        "element {} has no inverse",
                        elements[a]
                    )))
                }
            }
        }
        // symmetrize generating set, dropping the identity
        let mut gen_elems: Vec<usize> = Vec::new();
        for g in &generators {
            let i = elements
                .iter()
                .position(|e| e == g)
                .ok_or_else(|| Error::InvalidGroup(format!("unknown generator {g}")))?;
            if i != identity && !gen_elems.contains(&i) {
                gen_elems.push(i);
            }
        }
        let mut k = 0;
        while k < gen_elems.len() {
            let i = inv[gen_elems[k]];
            if !gen_elems.contains(&i) {
                gen_elems.push(i);
            }
            k += 1;
        }
        if gen_elems.is_empty() && n > 1 {
            return Err(Error::InvalidGroup("empty generating set".into()));
        }
        let pairs: Vec<(String, String)> = gen_elems
            .iter()
            .map(|&i| (elements[i].clone(), elements[inv[i]].clone()))
            .collect();
        let alphabet = GeneratorAlphabet::new(pairs)?;
        // re-key the generator elements by alphabet index
        let gen_elems: Vec<usize> = alphabet
            .names()
            .iter()
            .map(|n| elements.iter().position(|e| e == n).unwrap())
            .collect();
        // BFS canonical words (shortest, then lexicographically least)
        let mut words: Vec<Option<Word>> = vec![None; n];
        words[identity] = Some(Word::identity());
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for gi in 0..alphabet.len() as u32 {
                let ge = gen_elems[gi as usize];
                let y = table[x][ge];
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.0.push(gi);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        let words: Vec<Word> = words
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| {
                    Error::InvalidGroup(format!(
                        "generators do not generate: {} unreachable",
                        elements[i]
                    ))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Arc::new(GroupModel {
            kind: GroupKind::Finite {
                elements,
                table,
                identity,
                generator_elems: gen_elems,
                words,
            },
            alphabet,
            witness: None,
            normalization_budget: DEFAULT_NORMALIZATION_BUDGET,
            order_cutoff: DEFAULT_ORDER_CUTOFF,
        }))
    }

    /// Builds a presented model. `generators` maps each label to its
    /// inverse label; `rules` rewrite left-hand words to right-hand words.
    pub fn presented(
        generators: Vec<(String, String)>,
        rules: Vec<(Vec<String>, Vec<String>)>,
    ) -> Result<Arc<GroupModel>> {
        let alphabet = GeneratorAlphabet::new(generators)?;
        let compile = |w: &[String]| -> Result<Vec<u32>> {
            w.iter()
                .map(|t| {
                    alphabet
                        .index_of(t)
                        .ok_or_else(|| Error::UnknownGenerator(t.clone()))
                })
                .collect()
        };
        let rules = rules
            .iter()
            .map(|(l, r)| Ok((compile(l)?, compile(r)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(GroupModel {
            kind: GroupKind::Presented { rules },
            alphabet,
            witness: None,
            normalization_budget: DEFAULT_NORMALIZATION_BUDGET,
            order_cutoff: DEFAULT_ORDER_CUTOFF,
        }))
    }

    pub fn is_finite_model(&self) -> bool {
        matches!(self.kind, GroupKind::Finite { .. })
    }

    /// Number of elements for finite models.
    pub fn finite_order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite { elements, .. } => Some(elements.len()),
            _ => None,
        }
    }

    /// Canonical form of a word. Two words normalize to the same result
    /// iff they represent the same group element.
    pub fn normalize(&self, w: &Word) -> Result<Word> {
        for &l in &w.0 {
            if l as usize >= self.alphabet.len() {
                return Err(Error::UnknownGenerator(format!("#{l}")));
            }
        }
        match &self.kind {
            GroupKind::Free { .. } => {
                let mut out: Vec<u32> = Vec::with_capacity(w.0.len());
                for &l in &w.0 {
                    if let Some(&last) = out.last() {
                        if self.alphabet.inverse(last) == l {
                            out.pop();
                            continue;
                        }
                    }
                    out.push(l);
                }
                Ok(Word(out))
            }
            GroupKind::Finite { words, .. } => {
                let idx = self.eval_finite(w)?;
                Ok(words[idx].clone())
            }
            GroupKind::Presented { rules } => self.rewrite(w, rules),
        }
    }

    /// Element index of a word in a finite model.
    pub fn eval_finite(&self, w: &Word) -> Result<usize> {
        match &self.kind {
            GroupKind::Finite {
                table,
                identity,
                generator_elems,
                ..
            } => {
                let mut x = *identity;
                for &l in &w.0 {
                    x = table[x][generator_elems[l as usize]];
                }
                Ok(x)
            }
            _ => Err(Error::UnsupportedModel("finite evaluation".into())),
        }
    }

    /// Canonical word of a finite-model element index.
    pub fn word_of_index(&self, idx: usize) -> Result<Word> {
        match &self.kind {
            GroupKind::Finite { words, .. } => Ok(words[idx].clone()),
            _ => Err(Error::UnsupportedModel("finite evaluation".into())),
        }
    }

    fn rewrite(&self, w: &Word, rules: &[(Vec<u32>, Vec<u32>)]) -> Result<Word> {
        let mut cur = w.0.clone();
        let mut steps: u64 = 0;
        'outer: loop {
            // implicit inverse-pair cancellation, leftmost
            for i in 0..cur.len().saturating_sub(1) {
                if self.alphabet.inverse(cur[i]) == cur[i + 1] {
                    cur.drain(i..i + 2);
                    steps += 1;
                    if steps > self.normalization_budget {
                        return Err(Error::NormalizationBudgetExceeded(
                            self.normalization_budget,
                        ));
                    }
                    continue 'outer;
                }
            }
            // user rules, leftmost position, first matching rule
            let mut best: Option<(usize, usize)> = None;
            for i in 0..=cur.len() {
                for (ri, (lhs, _)) in rules.iter().enumerate() {
                    if lhs.is_empty() || i + lhs.len() > cur.len() {
                        continue;
                    }
                    if &cur[i..i + lhs.len()] == lhs.as_slice() {
                        best = Some((i, ri));
                        break;
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            match best {
                Some((i, ri)) => {
                    let (lhs, rhs) = &rules[ri];
                    cur.splice(i..i + lhs.len(), rhs.iter().copied());
                    steps += 1;
                    if steps > self.normalization_budget {
                        return Err(Error::NormalizationBudgetExceeded(
                            self.normalization_budget,
                        ));
                    }
                }
                None => break,
            }
        }
        Ok(Word(cur))
    }

    /// Product of two words, normalized.
    pub fn multiply(&self, g: &Word, h: &Word) -> Result<Word> {
        let mut letters = g.0.clone();
        letters.extend_from_slice(&h.0);
        self.normalize(&Word(letters))
    }

    /// Inverse of a word, normalized: reverse the letters and apply the
    /// alphabet pairing.
    pub fn invert(&self, g: &Word) -> Result<Word> {
        let letters: Vec<u32> =
            g.0.iter()
                .rev()
                .map(|&l| self.alphabet.inverse(l))
                .collect();
        self.normalize(&Word(letters))
    }

    /// Least `m >= 1` with `g^m = e`, or `Infinite`.
    pub fn element_order(&self, g: &Word) -> Result<ElementOrder> {
        let g = self.normalize(g)?;
        if g.is_identity() {
            return Ok(ElementOrder::Finite(1));
        }
        match &self.kind {
            GroupKind::Free { .. } => Ok(ElementOrder::Infinite),
            GroupKind::Finite { .. } => {
                let mut p = g.clone();
                let mut m = 1u64;
                while !p.is_identity() {
                    p = self.multiply(&p, &g)?;
                    m += 1;
                }
                Ok(ElementOrder::Finite(m))
            }
            GroupKind::Presented { .. } => {
                let mut p = g.clone();
                let mut m = 1u64;
                while !p.is_identity() {
                    if m >= self.order_cutoff {
                        return Err(Error::OrderUndecided(self.order_cutoff));
                    }
                    p = self.multiply(&p, &g)?;
                    m += 1;
                }
                Ok(ElementOrder::Finite(m))
            }
        }
    }

    /// Checks every witness relation `s^m * (commutator product)^-1 = e`.
    /// Returns the list of failing generator labels.
    pub fn validate_witness(&self, witness: &FiniteAbelianizationWitness) -> Result<()> {
        let mut failing = Vec::new();
        for (&gi, entry) in &witness.entries {
            if gi as usize >= self.alphabet.len() || entry.exponent == 0 {
                failing.push(
                    self.alphabet
                        .names()
                        .get(gi as usize)
                        .cloned()
                        .unwrap_or_default(),
                );
                continue;
            }
            let s = Word::single(gi);
            let mut lhs = Word::identity();
            for _ in 0..entry.exponent {
                lhs = self.multiply(&lhs, &s)?;
            }
            let mut rhs = Word::identity();
            for (a, b) in &entry.commutators {
                // b^-1 a^-1 b a
                let c = self.multiply(
                    &self.multiply(&self.invert(b)?, &self.invert(a)?)?,
                    &self.multiply(b, a)?,
                )?;
                rhs = self.multiply(&rhs, &c)?;
            }
            if self.multiply(&lhs, &self.invert(&rhs)?)? != Word::identity() {
                failing.push(self.alphabet.name(gi).to_string());
            }
        }
        if failing.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidWitness(failing))
        }
    }

    /// Auto-witness for finite models: `m_s = order(s)` with empty
    /// commutator factorizations.
    pub fn auto_witness(&self) -> Result<FiniteAbelianizationWitness> {
        if !self.is_finite_model() {
            return Err(Error::UnsupportedModel(
                "auto witness needs a finite model".into(),
            ));
        }
        let mut entries = BTreeMap::new();
        for gi in 0..self.alphabet.len() as u32 {
            match self.element_order(&Word::single(gi))? {
                ElementOrder::Finite(m) => {
                    entries.insert(
                        gi,
                        WitnessEntry {
                            exponent: m,
                            commutators: Vec::new(),
                        },
                    );
                }
                ElementOrder::Infinite => unreachable!("finite model"),
            }
        }
        Ok(FiniteAbelianizationWitness { entries })
    }

    /// Fills missing witness entries for inverse generators: if `s` has a
    /// witness, `s^-1` gets the mirrored one.
    pub fn complete_witness(&self, witness: &mut FiniteAbelianizationWitness) {
        let existing: Vec<u32> = witness.entries.keys().copied().collect();
        for gi in existing {
            let inv = self.alphabet.inverse(gi);
            if witness.entries.contains_key(&inv) {
                continue;
            }
            let entry = witness.entries[&gi].clone();
            // (s^m)^-1 = product of reversed, role-swapped commutators
            let mirrored: Vec<(Word, Word)> = entry
                .commutators
                .iter()
                .rev()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect();
            witness.entries.insert(
                inv,
                WitnessEntry {
                    exponent: entry.exponent,
                    commutators: mirrored,
                },
            );
        }
    }

    /// Randomized local-confluence spot check for presented models:
    /// resolves sampled critical pairs both ways and reports mismatches
    /// as warnings. Never fails the load.
    pub fn confluence_spot_check(&self, max_pairs: usize) -> Vec<String> {
        let GroupKind::Presented { rules } = &self.kind else {
            return Vec::new();
        };
        let mut all_rules: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
        for i in 0..self.alphabet.len() as u32 {
            all_rules.push((vec![i, self.alphabet.inverse(i)], vec![]));
        }
        all_rules.extend(rules.iter().cloned());
        let mut warnings = Vec::new();
        let mut checked = 0usize;
        'outer: for (l1, _) in &all_rules {
            for (l2, _) in &all_rules {
                // overlaps: a proper suffix of l1 equals a prefix of l2
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] == l2[..k] {
                        // resolve the overlap word both ways: reduce the l1
                        // occurrence first, then the l2 occurrence first
                        let left = self.normalize(&Word(l1.clone()));
                        let right = self.normalize(&Word(l2.clone()));
                        if let (Ok(a), Ok(b)) = (left, right) {
                            let mut joined = a.0.clone();
                            joined.extend_from_slice(&l2[k..]);
                            let via1 = self.normalize(&Word(joined));
                            let mut joined2 = l1[..l1.len() - k].to_vec();
                            joined2.extend_from_slice(&b.0);
                            let via2 = self.normalize(&Word(joined2));
                            if let (Ok(x), Ok(y)) = (via1, via2) {
                                if x != y {
                                    warnings.push(format!(
                                        "local confluence violated on overlap of {:?} and {:?}",
                                        Word(l1.clone()).render(&self.alphabet),
                                        Word(l2.clone()).render(&self.alphabet)
                                    ));
                                }
                            }
                        }
                        checked += 1;
                        if checked >= max_pairs {
                            break 'outer;
                        }
                    }
                }
            }
        }
        warnings.dedup();
        warnings
    }

    /// All elements of a finite model as canonical words.
    pub fn all_elements(&self) -> Result<Vec<Word>> {
        match &self.kind {
            GroupKind::Finite { words, .. } => Ok(words.clone()),
            _ => Err(Error::UnsupportedModel("element enumeration".into())),
        }
    }

    /// Breadth-first ball of the given radius over the generating set,
    /// as canonical words (deduplicated, shortlex-sorted).
    pub fn ball(&self, radius: usize, guard: usize) -> Result<Vec<Word>> {
        let mut seen: HashMap<Word, usize> = HashMap::new();
        let e = Word::identity();
        seen.insert(e.clone(), 0);
        let mut frontier = vec![e];
        for depth in 1..=radius {
            let mut next = Vec::new();
            for w in &frontier {
                for gi in 0..self.alphabet.len() as u32 {
                    let mut ext = w.clone();
                    ext.0.push(gi);
                    let n = self.normalize(&ext)?;
                    if !seen.contains_key(&n) {
                        seen.insert(n.clone(), depth);
                        if seen.len() > guard {
                            return Err(Error::BasisTooLarge(guard));
                        }
                        next.push(n);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let mut out: Vec<Word> = seen.into_keys().collect();
        out.sort();
        Ok(out)
    }
}

/// Standard example groups used throughout the test suite and docs.
pub mod standard {
    use super::*;

    /// Cyclic group of order `n`, generator `t`.
    pub fn cyclic(n: usize) -> Arc<GroupModel> {
        assert!(n >= 1);
        let elements: Vec<String> = (0..n)
            .map(|i| {
                if i == 0 {
                    "e".into()
                } else if i == 1 {
                    "t".into()
                } else {
                    format!("t{i}")
                }
            })
            .collect();
        let table: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        GroupModel::finite(elements, table, vec!["t".into()]).expect("cyclic group")
    }

    fn perm_mul(a: &[usize], b: &[usize]) -> Vec<usize> {
        // (a*b)(x) = a(b(x))
        (0..a.len()).map(|x| a[b[x]]).collect()
    }

    /// Symmetric group S3 generated by a transposition and a 3-cycle;
    /// the symmetrized generating set is {(12), (123), (132)}.
    pub fn symmetric3() -> Arc<GroupModel> {
        s3_with_generators(vec!["(12)".into(), "(123)".into()])
    }

    /// Symmetric group S3 generated by all three transpositions.
    pub fn symmetric3_transpositions() -> Arc<GroupModel> {
        s3_with_generators(vec!["(12)".into(), "(13)".into(), "(23)".into()])
    }

    fn s3_with_generators(generators: Vec<String>) -> Arc<GroupModel> {
        let perms: Vec<(String, Vec<usize>)> = vec![
            ("e".into(), vec![0, 1, 2]),
            ("(12)".into(), vec![1, 0, 2]),
            ("(13)".into(), vec![2, 1, 0]),
            ("(23)".into(), vec![0, 2, 1]),
            ("(123)".into(), vec![1, 2, 0]),
            ("(132)".into(), vec![2, 0, 1]),
        ];
        let elements: Vec<String> = perms.iter().map(|(n, _)| n.clone()).collect();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|(_, a)| {
                perms
                    .iter()
                    .map(|(_, b)| {
                        let c = perm_mul(a, b);
                        perms.iter().position(|(_, p)| *p == c).unwrap()
                    })
                    .collect()
            })
            .collect();
        GroupModel::finite(elements, table, generators).expect("S3")
    }

    /// Dihedral group of order 8: rotations `r` and a reflection `s`.
    pub fn dihedral4() -> Arc<GroupModel> {
        // elements r^i s^j, i in 0..4, j in 0..2, with s r = r^-1 s
        let name = |i: usize, j: usize| -> String {
            match (i, j) {
                (0, 0) => "e".into(),
                (i, 0) => format!("r{i}"),
                (0, 1) => "s".into(),
                (i, _) => format!("r{i}s"),
            }
        };
        let mut elements = Vec::new();
        let mut params = Vec::new();
        for j in 0..2 {
            for i in 0..4 {
                elements.push(name(i, j));
                params.push((i, j));
            }
        }
        // (r^i s^j)(r^k s^l) = r^(i + k*(-1)^j mod 4) s^(j+l mod 2)
        let idx = |i: usize, j: usize| params.iter().position(|&p| p == (i % 4, j % 2)).unwrap();
        let table: Vec<Vec<usize>> = params
            .iter()
            .map(|&(i, j)| {
                params
                    .iter()
                    .map(|&(k, l)| {
                        let kk = if j == 1 { (4 - k) % 4 } else { k };
                        idx((i + kk) % 4, (j + l) % 2)
                    })
                    .collect()
            })
            .collect();
        GroupModel::finite(elements, table, vec!["r1".into(), "s".into()]).expect("D4")
    }

    /// Quaternion group Q8 generated by `i` and `j`.
    pub fn quaternion8() -> Arc<GroupModel> {
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        // encode x as (sign, unit) with unit in {1, i, j, k}
        let unit = |x: usize| x / 2;
        let sign = |x: usize| if x % 2 == 0 { 1i32 } else { -1 };
        let code = |s: i32, u: usize| u * 2 + if s > 0 { 0 } else { 1 };
        // unit multiplication table for {1,i,j,k}: value and sign
        let umul = |a: usize, b: usize| -> (usize, i32) {
            match (a, b) {
                (0, x) => (x, 1),
                (x, 0) => (x, 1),
                (1, 1) => (0, -1),
                (2, 2) => (0, -1),
                (3, 3) => (0, -1),
                (1, 2) => (3, 1),
                (2, 1) => (3, -1),
                (2, 3) => (1, 1),
                (3, 2) => (1, -1),
                (3, 1) => (2, 1),
                (1, 3) => (2, -1),
                _ => unreachable!(),
            }
        };
        let table: Vec<Vec<usize>> = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (u, s) = umul(unit(x), unit(y));
                        code(sign(x) * sign(y) * s, u)
                    })
                    .collect()
            })
            .collect();
        GroupModel::finite(
            names.iter().map(|s| s.to_string()).collect(),
            table,
            vec!["i".into(), "j".into()],
        )
        .expect("Q8")
    }

    /// The integers as the free group of rank 1 with generator `t`.
    pub fn integers() -> Arc<GroupModel> {
        GroupModel::free_named(&["t"])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_inverse_pair_cancels() {
        let g = GroupModel::free(2);
        let w = Word::parse("a a^-1", &g.alphabet).unwrap();
        assert_eq!(g.normalize(&w).unwrap(), Word::identity());
    }

    #[test]
    fn s3_transposition_squares_to_identity() {
        let g = standard::symmetric3_transpositions();
        let w = Word::parse("(12) (12)", &g.alphabet).unwrap();
        assert_eq!(g.normalize(&w).unwrap(), Word::identity());
    }

    #[test]
    fn presented_cube_rule() {
        let g = GroupModel::presented(
            vec![("t".into(), "t^-1".into())],
            vec![
                (vec!["t".into(), "t".into(), "t".into()], vec![]),
                (vec!["t^-1".into()], vec!["t".into(), "t".into()]),
            ],
        )
        .unwrap();
        let w = Word::parse("t t t t", &g.alphabet).unwrap();
        let n = g.normalize(&w).unwrap();
        assert_eq!(n.render(&g.alphabet), "t");
        // cross-check against the cyclic table model
        let c3 = standard::cyclic(3);
        let wc = Word::parse("t t t t", &c3.alphabet).unwrap();
        assert_eq!(c3.normalize(&wc).unwrap().render(&c3.alphabet), "t");
    }

    #[test]
    fn multiply_by_identity() {
        let g = GroupModel::free(2);
        let w = Word::parse("a b", &g.alphabet).unwrap();
        assert_eq!(
            g.multiply(&w, &Word::identity()).unwrap(),
            g.normalize(&w).unwrap()
        );
    }

    #[test]
    fn invert_is_antihomomorphism() {
        let g = GroupModel::free(2);
        let w = Word::parse("a b", &g.alphabet).unwrap();
        assert_eq!(g.invert(&w).unwrap().render(&g.alphabet), "b^-1 a^-1");
    }

    #[test]
    fn s3_table_product() {
        let g = standard::symmetric3_transpositions();
        let a = Word::parse("(12)", &g.alphabet).unwrap();
        let b = Word::parse("(13)", &g.alphabet).unwrap();
        let p = g.multiply(&a, &b).unwrap();
        // (12)(13) maps 1->3->3? check through the table directly
        let idx = g.eval_finite(&p).unwrap();
        let GroupKind::Finite { elements, .. } = &g.kind else {
            unreachable!()
        };
        assert_eq!(elements[idx], "(132)");
    }

    #[test]
    fn element_orders() {
        let g = standard::symmetric3_transpositions();
        let t = Word::parse("(12)", &g.alphabet).unwrap();
        assert_eq!(g.element_order(&t).unwrap(), ElementOrder::Finite(2));
        assert_eq!(
            g.element_order(&Word::identity()).unwrap(),
            ElementOrder::Finite(1)
        );
        let f = GroupModel::free(2);
        let ab = Word::parse("a b", &f.alphabet).unwrap();
        assert_eq!(f.element_order(&ab).unwrap(), ElementOrder::Infinite);
    }

    #[test]
    fn witness_validation() {
        let g = standard::symmetric3_transpositions();
        let ok = g.auto_witness().unwrap();
        assert!(g.validate_witness(&ok).is_ok());
        // wrong exponent 3 for a transposition
        let mut bad = FiniteAbelianizationWitness::default();
        bad.entries.insert(
            g.alphabet.index_of("(12)").unwrap(),
            WitnessEntry {
                exponent: 3,
                commutators: vec![],
            },
        );
        assert!(matches!(
            g.validate_witness(&bad),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn normalize_idempotent_and_inverse_law_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for g in [
            GroupModel::free(2),
            standard::symmetric3(),
            standard::dihedral4(),
            standard::quaternion8(),
        ] {
            for _ in 0..200 {
                let len = rng.gen_range(0..8);
                let w = Word(
                    (0..len)
                        .map(|_| rng.gen_range(0..g.alphabet.len() as u32))
                        .collect(),
                );
                let n = g.normalize(&w).unwrap();
                assert_eq!(g.normalize(&n).unwrap(), n);
                assert_eq!(
                    g.multiply(&w, &g.invert(&w).unwrap()).unwrap(),
                    Word::identity()
                );
            }
        }
    }

    #[test]
    fn finite_normalize_agrees_with_table() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = standard::symmetric3();
        for _ in 0..1000 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let len = rng.gen_range(0..6);
                Word(
                    (0..len)
                        .map(|_| rng.gen_range(0..g.alphabet.len() as u32))
                        .collect(),
                )
            };
            let w1 = mk(&mut rng);
            let w2 = mk(&mut rng);
            let prod = g.multiply(&w1, &w2).unwrap();
            let via_table = {
                let i = g.eval_finite(&w1).unwrap();
                let j = g.eval_finite(&w2).unwrap();
                let GroupKind::Finite { table, .. } = &g.kind else {
                    unreachable!()
                };
                g.word_of_index(table[i][j]).unwrap()
            };
            assert_eq!(prod, via_table);
        }
    }

    #[test]
    fn alphabet_pairing_is_involution() {
        for g in [
            standard::symmetric3(),
            standard::dihedral4(),
            standard::quaternion8(),
        ] {
            for i in 0..g.alphabet.len() as u32 {
                assert_eq!(g.alphabet.inverse(g.alphabet.inverse(i)), i);
            }
        }
    }

    #[test]
    fn bfs_words_are_shortest() {
        let g = standard::dihedral4();
        let GroupKind::Finite { words, .. } = &g.kind else {
            unreachable!()
        };
        // r3 = r^-1 is a generator, so its canonical word has length 1
        let r3 = g.alphabet.index_of("r3").unwrap();
        assert_eq!(words[g.eval_finite(&Word::single(r3)).unwrap()].len(), 1);
    }

    #[test]
    fn ball_enumeration_on_z() {
        let g = standard::integers();
        let b1 = g.ball(1, 100).unwrap();
        assert_eq!(b1.len(), 3); // e, t, t^-1
        let b2 = g.ball(2, 100).unwrap();
        assert_eq!(b2.len(), 5);
    }

    #[test]
    fn presented_order_cutoff_is_reported() {
        // no relations: powers of t never reach the identity
        let mut g = GroupModel::presented(vec![("t".into(), "t^-1".into())], vec![]).unwrap();
        Arc::get_mut(&mut g).unwrap().order_cutoff = 25;
        let t = Word::parse("t", &g.alphabet).unwrap();
        assert!(matches!(g.element_order(&t), Err(Error::OrderUndecided(25))));
    }

    #[test]
    fn rewriting_budget_is_reported() {
        // a growing rule never terminates; the budget trips
        let mut g = GroupModel::presented(
            vec![("t".into(), "t^-1".into())],
            vec![(vec!["t".into()], vec!["t".into(), "t".into()])],
        )
        .unwrap();
        Arc::get_mut(&mut g).unwrap().normalization_budget = 100;
        let t = Word::parse("t", &g.alphabet).unwrap();
        assert!(matches!(
            g.normalize(&t),
            Err(Error::NormalizationBudgetExceeded(100))
        ));
    }
}
