//! String rewriting to normal form over a finite presentation.
//!
//! Users supply a complete (confluent, terminating) system; the engine only
//! enforces a step budget and fails loudly when it is exhausted. Strategy:
//! leftmost match first, earlier rule on ties, repeated until no rule fires.

use serde::Serialize;
use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

pub type Word = Vec<u16>;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum PresentationKind {
    Monoid,
    Semigroup,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub rules: Vec<(Word, Word)>,
    pub kind: PresentationKind,
    single_char: bool,
}

#[derive(Debug)]
pub enum RewriteError {
    BudgetExceeded { word: String, budget: u64 },
    UnknownGenerator { symbol: String, line: usize },
    Malformed { line: usize, message: String },
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteError::BudgetExceeded { word, budget } => {
                write!(f, "rewrite budget {budget} exceeded on word {word:?}")
            }
            RewriteError::UnknownGenerator { symbol, line } => {
                write!(f, "line {line}: unknown generator {symbol:?}")
            }
            RewriteError::Malformed { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl Error for RewriteError {}

impl Presentation {
    pub fn new(generators: Vec<String>, rules: Vec<(Word, Word)>, kind: PresentationKind) -> Self {
        let single_char = generators.iter().all(|g| g.chars().count() == 1);
        Presentation {
            generators,
            rules,
            kind,
            single_char,
        }
    }

    /// File format: first line the space-separated generators, then one rule
    /// per line `lhs -> rhs` with words written as space-separated symbols
    /// (or plain strings when all generators are single characters). The
    /// empty word is written `1`.
    pub fn parse(text: &str, kind: PresentationKind) -> Result<Presentation, RewriteError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (gen_line_no, gen_line) = lines.next().ok_or(RewriteError::Malformed {
            line: 1,
            message: "missing generator line".to_string(),
        })?;
        let generators: Vec<String> = gen_line.split_whitespace().map(String::from).collect();
        if generators.is_empty() {
            return Err(RewriteError::Malformed {
                line: gen_line_no,
                message: "no generators".to_string(),
            });
        }
        let index: BTreeMap<&str, u16> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_str(), i as u16))
            .collect();
        let single = generators.iter().all(|g| g.chars().count() == 1);
        let parse_word = |s: &str, line: usize| -> Result<Word, RewriteError> {
            let s = s.trim();
            if s == "1" {
                return Ok(Vec::new());
            }
            if s.contains(char::is_whitespace) || !single {
                s.split_whitespace()
                    .map(|sym| {
                        index
                            .get(sym)
                            .copied()
                            .ok_or(RewriteError::UnknownGenerator {
                                symbol: sym.to_string(),
                                line,
                            })
                    })
                    .collect()
            } else {
                s.chars()
                    .map(|ch| {
                        index.get(ch.to_string().as_str()).copied().ok_or(
                            RewriteError::UnknownGenerator {
                                symbol: ch.to_string(),
                                line,
                            },
                        )
                    })
                    .collect()
            }
        };
        let mut rules = Vec::new();
        for (line, l) in lines {
            let (lhs, rhs) = l.split_once("->").ok_or(RewriteError::Malformed {
                line,
                message: format!("expected \"lhs -> rhs\", got {l:?}"),
            })?;
            let lhs = parse_word(lhs, line)?;
            if lhs.is_empty() {
                return Err(RewriteError::Malformed {
                    line,
                    message: "rule left side must be nonempty".to_string(),
                });
            }
            rules.push((lhs, parse_word(rhs, line)?));
        }
        Ok(Presentation::new(generators, rules, kind))
    }

    pub fn render(&self, word: &[u16]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<&str> = word
            .iter()
            .map(|&s| self.generators[s as usize].as_str())
            .collect();
        if self.single_char {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    /// Leftmost rewriting with the user's rule order, within a step budget.
    pub fn normal_form(&self, word: &[u16], budget: u64) -> Result<Word, RewriteError> {
        let mut w = word.to_vec();
        let mut steps = 0u64;
        'rewrite: loop {
            for pos in 0..w.len() {
                for (lhs, rhs) in &self.rules {
                    if w.len() >= pos + lhs.len() && w[pos..pos + lhs.len()] == lhs[..] {
                        if steps >= budget {
                            return Err(RewriteError::BudgetExceeded {
                                word: self.render(word),
                                budget,
                            });
                        }
                        steps += 1;
                        w.splice(pos..pos + lhs.len(), rhs.iter().copied());
                        continue 'rewrite;
                    }
                }
            }
            return Ok(w);
        }
    }

    /// The commutative-square monoid with identified squares: generators a,
    /// b subject to ba -> ab and bb -> aa. Normal forms are a^i b^j, j ≤ 1.
    pub fn square_commuting_monoid() -> Presentation {
        Presentation::new(
            vec!["a".into(), "b".into()],
            vec![(vec![1, 0], vec![0, 1]), (vec![1, 1], vec![0, 0])],
            PresentationKind::Monoid,
        )
    }

    pub fn free_monoid(arity: usize) -> Presentation {
        assert!((1..=26).contains(&arity));
        let generators = (0..arity)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Presentation::new(generators, Vec::new(), PresentationKind::Monoid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_monoid_normal_forms() {
        let p = Presentation::square_commuting_monoid();
        // abab -> a a b b -> a a a a
        let w = vec![0, 1, 0, 1];
        assert_eq!(p.normal_form(&w, 100).unwrap(), vec![0, 0, 0, 0]);
        // b -> b, ba -> ab
        assert_eq!(p.normal_form(&[1], 100).unwrap(), vec![1]);
        assert_eq!(p.normal_form(&[1, 0], 100).unwrap(), vec![0, 1]);
        // bbb -> aab
        assert_eq!(p.normal_form(&[1, 1, 1], 100).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn budget_exhaustion_names_the_word() {
        // aa -> aa loops forever
        let p = Presentation::new(
            vec!["a".into()],
            vec![(vec![0, 0], vec![0, 0])],
            PresentationKind::Monoid,
        );
        let err = p.normal_form(&[0, 0], 10).unwrap_err();
        match err {
            RewriteError::BudgetExceeded { word, budget } => {
                assert_eq!(word, "aa");
                assert_eq!(budget, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_roundtrip() {
        let p = Presentation::parse("a b\nba -> ab\nbb -> aa\n", PresentationKind::Monoid).unwrap();
        assert_eq!(p.generators, vec!["a", "b"]);
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.normal_form(&[1, 0], 10).unwrap(), vec![0, 1]);
        // multi-symbol generators need whitespace words
        let p =
            Presentation::parse("g1 g2\ng2 g1 -> g1 g2\n", PresentationKind::Semigroup).unwrap();
        assert_eq!(p.render(&[0, 1]), "g1.g2");
        // empty word spelled 1
        let p = Presentation::parse("a\naa -> 1\n", PresentationKind::Monoid).unwrap();
        assert_eq!(p.normal_form(&[0, 0, 0], 10).unwrap(), vec![0]);
    }

    #[test]
    fn parse_errors() {
        assert!(Presentation::parse("", PresentationKind::Monoid).is_err());
        assert!(Presentation::parse("a\nxb -> a\n", PresentationKind::Monoid).is_err());
        assert!(Presentation::parse("a\naa = a\n", PresentationKind::Monoid).is_err());
    }
}
