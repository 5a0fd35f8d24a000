//! Strict localization by ground string rewriting.
//!
//! Morphisms of the localized category are words over forward letters (one
//! per base morphism) and backward letters (one per marked morphism), read
//! left to right in diagram order. Four identification families seed the
//! system:
//!
//! - a forward identity letter is deleted;
//! - two adjacent forward letters merge into their composite;
//! - a marked letter cancels against its own backward letter, both ways.
//!
//! All seeds shorten words, so shortlex (length, then letter rank, with
//! backward letters ranking above all forward ones) orients every derived
//! equation. Knuth-Bendix completion runs to a fixpoint and is then
//! re-certified: every critical pair of the final system must join. Normal
//! forms are enumerated by length; since normal forms are closed under
//! prefixes, a length with no new words means none exist at any greater
//! length. Infinite localizations and runaway completions are refused
//! through the meter.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{EngineError, Meter};
use crate::fincat::{CatRef, FinCategory, Functor, MorphismClass, ObjId};

use super::{witness, LocalizationWitness};

/// Letters 0..m are forward morphisms; m..m+|W| are backward marked ones.
type Letter = u32;
type Word = Vec<Letter>;

struct Alphabet {
    base: CatRef,
    /// Marked morphisms in canonical order; letter m + i reverses marked[i].
    marked: Vec<u32>,
}

impl Alphabet {
    fn fwd(&self, m: u32) -> Letter {
        m
    }

    fn letter_dom(&self, l: Letter) -> ObjId {
        let m = self.base.n_morphisms() as u32;
        if l < m {
            self.base.dom(crate::fincat::MorId(l))
        } else {
            self.base.cod(crate::fincat::MorId(self.marked[(l - m) as usize]))
        }
    }

    fn letter_cod(&self, l: Letter) -> ObjId {
        let m = self.base.n_morphisms() as u32;
        if l < m {
            self.base.cod(crate::fincat::MorId(l))
        } else {
            self.base.dom(crate::fincat::MorId(self.marked[(l - m) as usize]))
        }
    }

    fn render(&self, l: Letter) -> String {
        let m = self.base.n_morphisms() as u32;
        if l < m {
            self.base.mor_name(crate::fincat::MorId(l)).to_string()
        } else {
            format!("{}^-", self.base.mor_name(crate::fincat::MorId(self.marked[(l - m) as usize])))
        }
    }
}

/// Rewrite rules keyed by left side length; lefts of length one and two
/// cover every system arising from the seeds, longer lefts are kept
/// generically.
#[derive(Default)]
struct Rules {
    r1: BTreeMap<Letter, Word>,
    r2: BTreeMap<(Letter, Letter), Word>,
    rlong: BTreeMap<Word, Word>,
}

impl Rules {
    fn insert(&mut self, lhs: Word, rhs: Word) {
        match lhs.len() {
            0 => unreachable!("empty left side"),
            1 => {
                self.r1.insert(lhs[0], rhs);
            }
            2 => {
                self.r2.insert((lhs[0], lhs[1]), rhs);
            }
            _ => {
                self.rlong.insert(lhs, rhs);
            }
        }
    }

    fn all(&self) -> Vec<(Word, Word)> {
        let mut out: Vec<(Word, Word)> = Vec::new();
        out.extend(self.r1.iter().map(|(l, r)| (vec![*l], r.clone())));
        out.extend(self.r2.iter().map(|((a, b), r)| (vec![*a, *b], r.clone())));
        out.extend(self.rlong.iter().map(|(l, r)| (l.clone(), r.clone())));
        out
    }

    /// Left side matching a suffix of `out ++ [next]`; returns (consumed
    /// letters from out, replacement).
    fn suffix_match(&self, out: &[Letter], next: Letter) -> Option<(usize, &Word)> {
        if let Some(rhs) = self.r1.get(&next) {
            return Some((0, rhs));
        }
        if let Some(&prev) = out.last() {
            if let Some(rhs) = self.r2.get(&(prev, next)) {
                return Some((1, rhs));
            }
        }
        for (lhs, rhs) in &self.rlong {
            let k = lhs.len();
            if k >= 1
                && lhs[k - 1] == next
                && out.len() >= k - 1
                && out[out.len() - (k - 1)..] == lhs[..k - 1]
            {
                return Some((k - 1, rhs));
            }
        }
        None
    }

    /// Normal form under leftmost reduction; unique once the system is
    /// confluent. Each processed letter keeps the invariant that `out` is
    /// fully irreducible.
    fn normalize(&self, word: &[Letter]) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(word.len());
        let mut pending: Vec<Letter> = word.iter().rev().copied().collect();
        while let Some(next) = pending.pop() {
            match self.suffix_match(&out, next) {
                Some((consumed, rhs)) => {
                    let rhs = rhs.clone();
                    out.truncate(out.len() - consumed);
                    pending.extend(rhs.iter().rev());
                }
                None => out.push(next),
            }
        }
        out
    }

    fn is_normal_extension(&self, out: &[Letter], next: Letter) -> bool {
        self.suffix_match(out, next).is_none()
    }
}

/// Shortlex on (length, letter sequence).
fn shortlex_gt(a: &[Letter], b: &[Letter]) -> bool {
    (a.len(), a) > (b.len(), b)
}

/// Overlaps of `l1` with `l2`: proper suffix-prefix overlaps and full
/// containment, each yielding a superposition with its two one-step
/// reducts.
fn superpositions(l1: &[Letter], r1: &[Letter], l2: &[Letter], r2: &[Letter]) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    // suffix of l1 equals prefix of l2
    let max_k = l1.len().min(l2.len());
    for k in 1..=max_k {
        if k == l1.len() && k == l2.len() {
            continue;
        }
        if l1[l1.len() - k..] == l2[..k] {
            let mut a: Word = r1.to_vec();
            a.extend_from_slice(&l2[k..]);
            let mut b: Word = l1[..l1.len() - k].to_vec();
            b.extend_from_slice(r2);
            out.push((a, b));
        }
    }
    // l2 strictly inside l1
    if l2.len() < l1.len() {
        for start in 0..=l1.len() - l2.len() {
            if &l1[start..start + l2.len()] == l2 {
                let mut b: Word = l1[..start].to_vec();
                b.extend_from_slice(r2);
                b.extend_from_slice(&l1[start + l2.len()..]);
                out.push((r1.to_vec(), b));
            }
        }
    }
    out
}

fn complete(seeds: Vec<(Word, Word)>, meter: &Meter) -> Result<Rules, EngineError> {
    let mut rules = Rules::default();
    let mut queue: VecDeque<(Word, Word)> = seeds.into();
    loop {
        while let Some((u, v)) = queue.pop_front() {
            meter.charge(1 + u.len() as u64 + v.len() as u64)?;
            let nu = rules.normalize(&u);
            let nv = rules.normalize(&v);
            if nu == nv {
                continue;
            }
            let (lhs, rhs) = if shortlex_gt(&nu, &nv) { (nu, nv) } else { (nv, nu) };
            for (l2, r2) in rules.all() {
                for pair in superpositions(&lhs, &rhs, &l2, &r2) {
                    queue.push_back(pair);
                }
                for pair in superpositions(&l2, &r2, &lhs, &rhs) {
                    queue.push_back(pair);
                }
            }
            for pair in superpositions(&lhs, &rhs, &lhs, &rhs) {
                queue.push_back(pair);
            }
            rules.insert(lhs, rhs);
        }
        // re-certify: every critical pair of the final system must join
        let all = rules.all();
        let mut clean = true;
        for (l1, r1) in &all {
            for (l2, r2) in &all {
                meter.charge(1)?;
                for (a, b) in superpositions(l1, r1, l2, r2) {
                    if rules.normalize(&a) != rules.normalize(&b) {
                        queue.push_back((a, b));
                        clean = false;
                    }
                }
            }
        }
        if clean {
            return Ok(rules);
        }
    }
}

/// Builds the strict localization of `base` at `w` as a quotient of zigzag
/// words, together with the projection functor, or refuses within the
/// budget when the result is infinite or too large to table.
pub fn localize_by_rewriting(
    base: &CatRef,
    w: &MorphismClass,
    meter: &Meter,
) -> Result<LocalizationWitness, EngineError> {
    w.check_parent(base)?;
    let m = base.n_morphisms() as u32;
    let marked: Vec<u32> = w.members().map(|x| x.0).collect();
    let ab = Alphabet { base: base.clone(), marked: marked.clone() };

    let mut seeds: Vec<(Word, Word)> = Vec::new();
    for x in base.objects() {
        seeds.push((vec![base.identity(x).0], vec![]));
    }
    for f in base.morphisms() {
        for g in base.morphisms() {
            if base.cod(f) == base.dom(g) && !base.is_identity(f) && !base.is_identity(g) {
                // diagram order: the word [f, g] composes to g after f
                seeds.push((vec![f.0, g.0], vec![base.comp(g, f).0]));
            }
        }
    }
    for (i, &wm) in marked.iter().enumerate() {
        let inv = m + i as u32;
        seeds.push((vec![wm, inv], vec![]));
        seeds.push((vec![inv, wm], vec![]));
    }
    let rules = complete(seeds, meter)?;

    // normal forms by length; prefix closure makes one empty level final
    let mut all: Vec<(ObjId, ObjId, Word)> = Vec::new();
    let mut level: Vec<(ObjId, ObjId, Word)> =
        base.objects().map(|x| (x, x, Vec::new())).collect();
    let letters: Vec<Letter> = (0..m + marked.len() as u32).collect();
    while !level.is_empty() {
        all.extend(level.iter().cloned());
        let mut next = Vec::new();
        for (s, at, word) in &level {
            for &l in &letters {
                if ab.letter_dom(l) == *at && rules.is_normal_extension(word, l) {
                    meter.charge(1 + word.len() as u64)?;
                    let mut w2 = word.clone();
                    w2.push(l);
                    next.push((*s, ab.letter_cod(l), w2));
                }
            }
        }
        level = next;
    }

    // composition table costs |nf|^2; charge before building
    let n = all.len() as u64;
    meter.charge(n * n)?;

    let obj_names: Vec<String> = base.objects().map(|x| base.obj_name(x).to_string()).collect();
    let mut used = BTreeSet::new();
    let mut morphisms = Vec::new();
    for (s, e, word) in &all {
        let mut name = if word.is_empty() {
            format!("id_{}", base.obj_name(*s))
        } else {
            word.iter().map(|&l| ab.render(l)).collect::<Vec<_>>().join(".")
        };
        while !used.insert(name.clone()) {
            name.push('~');
        }
        morphisms.push((name, s.0, e.0));
    }
    let identities: Vec<u32> = base
        .objects()
        .map(|x| all.iter().position(|(s, _, w)| *s == x && w.is_empty()).unwrap() as u32)
        .collect();

    let index: BTreeMap<(u32, u32, &Word), u32> = all
        .iter()
        .enumerate()
        .map(|(i, (s, e, w))| ((s.0, e.0, w), i as u32))
        .collect();
    let mut comps = Vec::new();
    for (i, (fs, fe, fw)) in all.iter().enumerate() {
        for (j, (gs, ge, gw)) in all.iter().enumerate() {
            if fe == gs {
                let mut concat = fw.clone();
                concat.extend_from_slice(gw);
                let nf = rules.normalize(&concat);
                let k = *index.get(&(fs.0, ge.0, &nf)).ok_or_else(|| {
                    EngineError::Inconsistency("composite normal form not enumerated".into())
                })?;
                comps.push((j as u32, i as u32, k));
            }
        }
    }

    let loc = FinCategory::new(
        format!("{}_loc", base.label()),
        obj_names,
        morphisms,
        identities,
        &comps,
    )
    .map_err(|e| EngineError::Inconsistency(format!("quotient assembly: {e}")))?
    .into_ref();

    let obj_map: Vec<ObjId> = base.objects().collect();
    let mor_map: Vec<crate::fincat::MorId> = base
        .morphisms()
        .map(|f| {
            let nf = rules.normalize(&[ab.fwd(f.0)]);
            let (s, e) = (base.dom(f), base.cod(f));
            // normal forms never change endpoints
            crate::fincat::MorId(index[&(s.0, e.0, &nf)])
        })
        .collect();
    let l = Functor::new(base.clone(), loc.clone(), obj_map, mor_map)
        .map_err(|e| EngineError::Inconsistency(format!("projection functor: {e}")))?;
    witness(base.clone(), w.clone(), loc, l)
}
