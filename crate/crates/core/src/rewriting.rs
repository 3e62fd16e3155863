//! Finitely presented groups given by confluent, shortlex-reducing string
//! rewriting systems.
//!
//! No completion is attempted: a system is accepted only if every rule
//! decreases in shortlex order and every critical pair resolves.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ball_enumerate, Ball, Group};

pub type Letter = u16;

/// A word over a finite alphabet, ordered shortlex (length, then
/// lexicographic in alphabet order).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

/// A critical pair that fails to resolve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPairFailure {
    pub overlap: Word,
    pub left: Word,
    pub right: Word,
}

#[derive(Clone, Debug)]
pub struct RewritingSystem {
    names: Vec<String>,
    rules: Vec<Rule>,
    by_last: HashMap<Letter, Vec<usize>>,
}

impl RewritingSystem {
    pub fn new(names: Vec<String>, rules: Vec<Rule>) -> Result<RewritingSystem> {
        if names.len() > Letter::MAX as usize {
            return Err(Error::Spec("alphabet too large".into()));
        }
        let mut sys = RewritingSystem { names, rules: Vec::new(), by_last: HashMap::new() };
        for rule in rules {
            sys.push_rule(rule)?;
        }
        Ok(sys)
    }

    /// Builds a system from rules written with the alphabet's names.
    pub fn from_strings(names: &[&str], rules: &[(&str, &str)]) -> Result<RewritingSystem> {
        let mut sys = RewritingSystem::new(names.iter().map(|s| s.to_string()).collect(), Vec::new())?;
        for (l, r) in rules {
            let rule = Rule { lhs: sys.parse(l)?, rhs: sys.parse(r)? };
            sys.push_rule(rule)?;
        }
        Ok(sys)
    }

    fn push_rule(&mut self, rule: Rule) -> Result<()> {
        if rule.lhs.0.iter().chain(&rule.rhs.0).any(|&x| x as usize >= self.names.len()) {
            return Err(Error::UnknownLetter(format!("{:?}", rule.lhs)));
        }
        if rule.lhs.is_empty() || rule.rhs >= rule.lhs {
            return Err(Error::NonReducingRule { lhs: self.render(&rule.lhs), rhs: self.render(&rule.rhs) });
        }
        if self.rules.contains(&rule) {
            return Ok(());
        }
        let last = *rule.lhs.0.last().unwrap();
        self.by_last.entry(last).or_default().push(self.rules.len());
        self.rules.push(rule);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| i as Letter)
    }

    /// Parses whitespace-separated letter names. A token that is not a name
    /// is read character by character. `""` and `"ε"` are the empty word.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if token == "ε" || token == "1" && self.letter("1").is_none() {
                continue;
            }
            if let Some(l) = self.letter(token) {
                out.push(l);
                continue;
            }
            for ch in token.chars() {
                let s = ch.to_string();
                out.push(self.letter(&s).ok_or(Error::UnknownLetter(s))?);
            }
        }
        Ok(Word(out))
    }

    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        let single = w.0.iter().all(|&l| self.names[l as usize].chars().count() == 1);
        let parts: Vec<&str> = w.0.iter().map(|&l| self.names[l as usize].as_str()).collect();
        parts.join(if single { "" } else { " " })
    }

    /// The unique irreducible descendant of `w` (the system terminates, and
    /// confluence makes the result independent of the strategy).
    pub fn normal_form(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut input: Vec<Letter> = w.0.iter().rev().copied().collect();
        while let Some(x) = input.pop() {
            out.push(x);
            if let Some(candidates) = self.by_last.get(&x) {
                for &ri in candidates {
                    let rule = &self.rules[ri];
                    if out.ends_with(&rule.lhs.0) {
                        out.truncate(out.len() - rule.lhs.len());
                        input.extend(rule.rhs.0.iter().rev());
                        break;
                    }
                }
            }
        }
        Word(out)
    }

    pub fn is_irreducible(&self, w: &Word) -> bool {
        self.rules.iter().all(|r| !w.0.windows(r.lhs.len()).any(|win| win == r.lhs.0.as_slice()))
    }

    /// Checks every overlap and inclusion of left-hand sides; returns the
    /// first critical pair whose two reducts have different normal forms.
    pub fn verify_confluence(&self) -> std::result::Result<(), CriticalPairFailure> {
        for (i, r1) in self.rules.iter().enumerate() {
            for (j, r2) in self.rules.iter().enumerate() {
                let (l1, l2) = (&r1.lhs.0, &r2.lhs.0);
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] != l2[..k] {
                        continue;
                    }
                    let overlap = Word([&l1[..], &l2[k..]].concat());
                    let left = Word([&r1.rhs.0[..], &l2[k..]].concat());
                    let right = Word([&l1[..l1.len() - k], &r2.rhs.0[..]].concat());
                    self.compare_reducts(overlap, left, right)?;
                }
                if i != j && l2.len() <= l1.len() {
                    for p in 0..=l1.len() - l2.len() {
                        if l1[p..p + l2.len()] != l2[..] {
                            continue;
                        }
                        let right = Word([&l1[..p], &r2.rhs.0[..], &l1[p + l2.len()..]].concat());
                        self.compare_reducts(r1.lhs.clone(), r1.rhs.clone(), right)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn compare_reducts(&self, overlap: Word, left: Word, right: Word) -> std::result::Result<(), CriticalPairFailure> {
        let (a, b) = (self.normal_form(&left), self.normal_form(&right));
        if a == b {
            Ok(())
        } else {
            Err(CriticalPairFailure { overlap, left: a, right: b })
        }
    }
}

/// JSON form: `{"type":"rewriting_group","generators":[...],"inverses":{...},"rules":[[lhs,rhs],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewritingSpec {
    pub generators: Vec<String>,
    pub inverses: BTreeMap<String, String>,
    #[serde(default)]
    pub rules: Vec<(String, String)>,
}

/// Group element in normal form.
pub type GroupElement = Word;

#[derive(Clone, Debug)]
pub struct RewritingGroup {
    system: RewritingSystem,
    inverse: Vec<Letter>,
    generator_letters: Vec<Letter>,
}

impl RewritingGroup {
    /// Alphabet order is `g₁, g₁⁻¹, g₂, g₂⁻¹, …`. Free-reduction rules are
    /// added for every letter, then confluence is verified.
    pub fn from_spec(spec: &RewritingSpec) -> Result<RewritingGroup> {
        let mut names = Vec::new();
        let mut generator_letters = Vec::new();
        for g in &spec.generators {
            let inv = spec
                .inverses
                .get(g)
                .ok_or_else(|| Error::Spec(format!("generator {g} has no formal inverse")))?;
            if inv == g {
                return Err(Error::Spec(format!("inverse of {g} must be a distinct letter")));
            }
            generator_letters.push(names.len() as Letter);
            names.push(g.clone());
            names.push(inv.clone());
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Spec("letter names must be unique".into()));
        }
        if spec.inverses.len() != spec.generators.len() {
            return Err(Error::Spec("inverses must be given exactly for the generators".into()));
        }
        let inverse: Vec<Letter> = (0..names.len() as Letter).map(|l| l ^ 1).collect();
        let mut system = RewritingSystem::new(names, Vec::new())?;
        for (l, r) in &spec.rules {
            let rule = Rule { lhs: system.parse(l)?, rhs: system.parse(r)? };
            system.push_rule(rule)?;
        }
        for l in 0..inverse.len() as Letter {
            system.push_rule(Rule { lhs: Word(vec![l, inverse[l as usize]]), rhs: Word::empty() })?;
        }
        system.verify_confluence().map_err(|f| Error::NotConfluent {
            overlap: system.render(&f.overlap),
            left: system.render(&f.left),
            right: system.render(&f.right),
        })?;
        Ok(RewritingGroup { system, inverse, generator_letters })
    }

    /// Free group on `n` generators `x0, X0, x1, X1, …`.
    pub fn free(n: usize) -> RewritingGroup {
        let generators: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let inverses = generators.iter().map(|g| (g.clone(), g.to_uppercase())).collect();
        RewritingGroup::from_spec(&RewritingSpec { generators, inverses, rules: Vec::new() })
            .expect("free reduction is confluent")
    }

    pub fn system(&self) -> &RewritingSystem {
        &self.system
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        self.system.parse(text)
    }

    pub fn normal_form(&self, w: &Word) -> GroupElement {
        self.system.normal_form(w)
    }

    pub fn element(&self, text: &str) -> Result<GroupElement> {
        Ok(self.normal_form(&self.parse(text)?))
    }

    pub fn formal_inverse(&self, l: Letter) -> Letter {
        self.inverse[l as usize]
    }

    /// All letters, as group elements, without duplicates or the identity.
    pub fn letter_elements(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = Vec::new();
        for l in 0..self.inverse.len() as Letter {
            let x = self.normal_form(&Word(vec![l]));
            if !x.is_empty() && !out.contains(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Ball of radius `radius` for the symmetric set `gens`.
    pub fn ball_enumerate(&self, gens: &[GroupElement], radius: usize, cap: usize) -> Result<Ball<GroupElement>> {
        for s in gens {
            if !gens.contains(&self.inv(s)) {
                return Err(Error::InvalidPair(format!("{} has no inverse in S", self.render(s))));
            }
        }
        ball_enumerate(self, gens, radius, cap)
    }
}

impl Group for RewritingGroup {
    type Elem = GroupElement;

    fn identity(&self) -> Word {
        Word::empty()
    }

    fn mul(&self, a: &Word, b: &Word) -> Word {
        self.system.normal_form(&a.concat(b))
    }

    fn inv(&self, a: &Word) -> Word {
        let w = Word(a.0.iter().rev().map(|&l| self.inverse[l as usize]).collect());
        self.system.normal_form(&w)
    }

    fn generators(&self) -> Vec<Word> {
        self.generator_letters
            .iter()
            .map(|&l| self.normal_form(&Word(vec![l])))
            .filter(|w| !w.is_empty())
            .collect()
    }

    fn render(&self, a: &Word) -> String {
        self.system.render(a)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.lhs.0, self.rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn shortlex_order() {
        assert!(Word(vec![1]) < Word(vec![0, 0]));
        assert!(Word(vec![0, 1]) < Word(vec![1, 0]));
        assert!(Word::empty() < Word(vec![0]));
    }

    #[test]
    fn normal_form_examples() {
        let z = presets::rewriting_z();
        assert_eq!(z.render(&z.element("a A a").unwrap()), "a");
        let z2 = presets::rewriting_z2();
        assert_eq!(z2.render(&z2.element("b a").unwrap()), "ab");
        let d = presets::rewriting_d_infinity();
        assert_eq!(d.render(&d.element("x y y x x").unwrap()), "x");
        assert!(matches!(z.element("q"), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn normal_form_is_idempotent() {
        let z2 = presets::rewriting_z2();
        let w = z2.parse("BAbaBBaAbab").unwrap();
        let nf = z2.normal_form(&w);
        assert_eq!(z2.normal_form(&nf), nf);
        assert!(z2.system().is_irreducible(&nf));
    }

    #[test]
    fn confluence_examples() {
        let free = RewritingGroup::free(2);
        assert!(free.system().verify_confluence().is_ok());

        // b is the formal inverse of a, so {ab → ε, ba → ε} is free reduction
        let spec = RewritingSpec {
            generators: vec!["a".into()],
            inverses: BTreeMap::from([("a".into(), "b".into())]),
            rules: vec![("ab".into(), "".into()), ("ba".into(), "".into())],
        };
        assert!(RewritingGroup::from_spec(&spec).is_ok());

        let bad = RewritingSystem::from_strings(&["a", "b"], &[("ab", "a"), ("ba", "b")]).unwrap();
        let failure = bad.verify_confluence().unwrap_err();
        assert_eq!(bad.render(&failure.overlap), "aba");
        assert_eq!(bad.render(&failure.left), "aa");
        assert_eq!(bad.render(&failure.right), "a");
    }

    #[test]
    fn rejects_non_reducing_rules() {
        let err = RewritingSystem::from_strings(&["a", "b"], &[("a", "ab")]).unwrap_err();
        assert!(matches!(err, Error::NonReducingRule { .. }));
        let err = RewritingSystem::from_strings(&["a", "b"], &[("a", "b")]).unwrap_err();
        assert!(matches!(err, Error::NonReducingRule { .. }));
    }

    #[test]
    fn rejects_unresolved_systems_as_groups() {
        // ab → ε alone, with independent inverses A, B, leaves aB vs Ba unresolved
        let spec = RewritingSpec {
            generators: vec!["a".into(), "b".into()],
            inverses: BTreeMap::from([("a".into(), "A".into()), ("b".into(), "B".into())]),
            rules: vec![("ab".into(), "".into())],
        };
        assert!(matches!(RewritingGroup::from_spec(&spec), Err(Error::NotConfluent { .. })));
    }

    #[test]
    fn ball_sizes() {
        let z = presets::rewriting_z();
        let s = z.letter_elements();
        assert_eq!(z.ball_enumerate(&s, 2, 1000).unwrap().len(), 5);
        let z2 = presets::rewriting_z2();
        assert_eq!(z2.ball_enumerate(&z2.letter_elements(), 2, 1000).unwrap().len(), 13);
        let f2 = RewritingGroup::free(2);
        assert_eq!(f2.ball_enumerate(&f2.letter_elements(), 2, 1000).unwrap().len(), 17);
        let a = z.element("a").unwrap();
        assert!(matches!(z.ball_enumerate(&[a], 2, 100), Err(Error::InvalidPair(_))));
    }
}
