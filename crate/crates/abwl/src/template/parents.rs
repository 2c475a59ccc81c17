use std::collections::HashSet;

use super::{CapKind, Template, TemplateError};
use crate::lattice::LatticeError;
use crate::words::{parikh, Letter, Morphism};

/// One way a template letter can sit inside the image of a parent letter:
/// the parent letter (`None` for `ε`) and the Parikh vectors of the image
/// before and after the chosen position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Choice {
    letter: Option<Letter>,
    pre: Vec<i64>,
    suf: Vec<i64>,
}

/// Enumerates the parents of templates under a fixed morphism.
#[derive(Clone, Debug)]
pub struct ParentGenerator {
    m: usize,
    det: i64,
    adj: Vec<i64>,
    empty: Vec<Choice>,
    by_letter: Vec<Vec<Choice>>,
}

fn dedup(v: Vec<Choice>) -> Vec<Choice> {
    let mut seen = HashSet::new();
    v.into_iter().filter(|c| seen.insert(c.clone())).collect()
}

impl ParentGenerator {
    pub fn new(h: &Morphism) -> Result<Self, TemplateError> {
        let m = h.m();
        let mat = h.frequency_matrix();
        let det = mat.det()?;
        if det == 0 {
            return Err(LatticeError::SingularMatrix.into());
        }
        let adj = mat.adjugate()?;
        let adj = (0..m).flat_map(|i| adj.row(i).to_vec()).collect();

        let mut empty = vec![Choice {
            letter: None,
            pre: vec![0; m],
            suf: vec![0; m],
        }];
        let mut by_letter = vec![Vec::new(); m];
        for s in 0..m as Letter {
            let img = h.image(s);
            for i in 0..=img.len() {
                empty.push(Choice {
                    letter: Some(s),
                    pre: parikh(&img[..i], m).0,
                    suf: parikh(&img[i..], m).0,
                });
                if i < img.len() {
                    by_letter[img[i] as usize].push(Choice {
                        letter: Some(s),
                        pre: parikh(&img[..i], m).0,
                        suf: parikh(&img[i + 1..], m).0,
                    });
                }
            }
        }
        Ok(Self {
            m,
            det,
            adj,
            empty: dedup(empty),
            by_letter: by_letter.into_iter().map(dedup).collect(),
        })
    }

    fn choices(&self, l: Option<Letter>) -> &[Choice] {
        match l {
            None => &self.empty,
            Some(c) => &self.by_letter[c as usize],
        }
    }

    /// Whether `p` is a parent of `t`, without enumerating all parents.
    pub fn is_parent(&self, p: &Template, t: &Template) -> bool {
        if p.k() != t.k() || p.m() != self.m || t.m() != self.m {
            return false;
        }
        let choices: Vec<Vec<&Choice>> = (0..=t.k())
            .map(|i| {
                self.choices(t.letters()[i])
                    .iter()
                    .filter(|c| c.letter == p.letters()[i])
                    .collect()
            })
            .collect();
        let mut dfs = Dfs {
            gen: self,
            t,
            picked: Vec::with_capacity(t.k() + 1),
            diffs: vec![0; (t.k() - 1) * self.m],
            rhs: vec![0; self.m],
            out: HashSet::new(),
            limit: usize::MAX,
        };
        dfs.find(&choices, 0, p)
    }

    /// All parents of `t`, sorted. Fails once more than `limit` distinct
    /// parents have been produced.
    pub fn parents(&self, t: &Template, limit: usize) -> Result<Vec<Template>, TemplateError> {
        assert_eq!(t.m(), self.m, "template and morphism alphabets differ");
        let mut dfs = Dfs {
            gen: self,
            t,
            picked: Vec::with_capacity(t.k() + 1),
            diffs: vec![0; (t.k() - 1) * self.m],
            rhs: vec![0; self.m],
            out: HashSet::new(),
            limit,
        };
        dfs.go(0)?;
        let mut out: Vec<Template> = dfs.out.into_iter().collect();
        out.sort_unstable();
        Ok(out)
    }
}

struct Dfs<'a> {
    gen: &'a ParentGenerator,
    t: &'a Template,
    picked: Vec<&'a Choice>,
    diffs: Vec<i64>,
    rhs: Vec<i64>,
    out: HashSet<Template>,
    limit: usize,
}

impl<'a> Dfs<'a> {
    /// Solves `D_j M = d_j - c_{j+1} + c_j` for `j = i - 2` once the choice at
    /// position `i` is fixed; false if the solution is not integral.
    fn solve(&mut self, j: usize) -> bool {
        let m = self.gen.m;
        let (p0, p1, p2) = (self.picked[j], self.picked[j + 1], self.picked[j + 2]);
        let d = self.t.diff(j);
        for c in 0..m {
            self.rhs[c] = d[c] - (p1.suf[c] + p2.pre[c]) + (p0.suf[c] + p1.pre[c]);
        }
        for col in 0..m {
            let x: i64 = (0..m)
                .map(|r| self.rhs[r] * self.gen.adj[r * m + col])
                .sum();
            if x % self.gen.det != 0 {
                return false;
            }
            self.diffs[j * m + col] = x / self.gen.det;
        }
        true
    }

    /// Depth-first search for `target` over per-position choice lists.
    fn find(&mut self, choices: &[Vec<&'a Choice>], i: usize, target: &Template) -> bool {
        for &choice in &choices[i] {
            self.picked.push(choice);
            let ok = i < 2 || (self.solve(i - 2) && self.diff_matches(target, i - 2));
            if ok && (i == self.t.k() || self.find(choices, i + 1, target)) {
                return true;
            }
            self.picked.pop();
        }
        false
    }

    fn diff_matches(&self, target: &Template, j: usize) -> bool {
        let m = self.gen.m;
        self.diffs[j * m..(j + 1) * m] == *target.diff(j)
    }

    fn go(&mut self, i: usize) -> Result<(), TemplateError> {
        let gen = self.gen;
        let k = self.t.k();
        for choice in gen.choices(self.t.letters()[i]) {
            self.picked.push(choice);
            if i < 2 || self.solve(i - 2) {
                if i == k {
                    let letters = self.picked.iter().map(|c| c.letter).collect();
                    self.out
                        .insert(Template::from_raw(letters, self.diffs.clone(), gen.m));
                    if self.out.len() > self.limit {
                        return Err(TemplateError::CapExceeded {
                            kind: CapKind::Members,
                            limit: self.limit,
                        });
                    }
                } else {
                    self.go(i + 1)?;
                }
            }
            self.picked.pop();
        }
        Ok(())
    }
}

/// All parents of `t` under `h`.
pub fn parents(t: &Template, h: &Morphism) -> Result<Vec<Template>, TemplateError> {
    ParentGenerator::new(h)?.parents(t, usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn trivial_parents_include_itself() {
        let h = Morphism::binary("aaaba", "bab").unwrap();
        let t = Template::trivial(2, 2);
        let ps = parents(&t, &h).unwrap();
        assert!(ps.contains(&t));
    }

    #[test]
    fn parents_sorted_and_distinct() {
        let h = Morphism::binary("aab", "bba").unwrap();
        let t = Template::trivial(3, 2);
        let ps = parents(&t, &h).unwrap();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn limit_is_enforced() {
        let h = Morphism::binary("aaaba", "bab").unwrap();
        let gen = ParentGenerator::new(&h).unwrap();
        let t = Template::trivial(5, 2);
        let err = gen.parents(&t, 3).unwrap_err();
        assert_eq!(
            err,
            TemplateError::CapExceeded {
                kind: CapKind::Members,
                limit: 3
            }
        );
    }

    #[test]
    fn singular_matrix_rejected() {
        let h = Morphism::binary("ab", "ab").unwrap();
        assert!(ParentGenerator::new(&h).is_err());
    }

    #[test]
    fn letter_parent_realized_in_image() {
        let ab = Alphabet::binary();
        let h = Morphism::binary("aaaba", "bab").unwrap();
        let t = Template::parse(&ab, "[b,ε,ε,(0,0)]").unwrap();
        for p in parents(&t, &h).unwrap() {
            assert!(p.letters()[0].is_some());
        }
    }
}
