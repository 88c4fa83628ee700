//! Finitely presented groups: free words, Schreier transversals taken from an
//! explicit permutation action, Reidemeister–Schreier presentations of point
//! stabilizers, Tietze simplification with a substitution ledger, and
//! abelianization via Smith normal form.

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::snf::smith_diagonal;

/// A freely reduced word. Letters are nonzero i32s: letter `g+1` is generator
/// `g`, letter `−(g+1)` its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<i32>);

fn reduce_letters<I: IntoIterator<Item = i32>>(letters: I) -> Vec<i32> {
    let mut stack: Vec<i32> = Vec::new();
    for l in letters {
        debug_assert!(l != 0);
        if stack.last() == Some(&-l) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    stack
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Word {
        Word(vec![g as i32 + 1])
    }

    pub fn from_letters(letters: Vec<i32>) -> Word {
        Word(reduce_letters(letters))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(reduce_letters(self.0.iter().chain(other.0.iter()).copied()))
    }

    pub fn push(&mut self, letter: i32) {
        debug_assert!(letter != 0);
        if self.0.last() == Some(&-letter) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn pow(&self, e: usize) -> Word {
        let mut out = Word::empty();
        for _ in 0..e {
            out = out.concat(self);
        }
        out
    }

    pub fn cyclically_reduced(&self) -> Word {
        let mut v = self.0.clone();
        while v.len() >= 2 && v[0] == -v[v.len() - 1] {
            v.pop();
            v.remove(0);
        }
        Word(v)
    }

    /// Smallest rotation of the word or its inverse; used to recognize
    /// duplicate relators.
    fn canonical_cyclic(&self) -> Vec<i32> {
        let mut best: Option<Vec<i32>> = None;
        for w in [self.0.clone(), self.inverse().0] {
            let n = w.len();
            for r in 0..n.max(1) {
                let rotated: Vec<i32> = (0..n).map(|i| w[(i + r) % n]).collect();
                if best.as_ref().is_none_or(|b| rotated < *b) {
                    best = Some(rotated);
                }
            }
        }
        best.unwrap_or_default()
    }
}

/// A finite presentation: `gen_count` generators and a list of freely and
/// cyclically reduced relators.
#[derive(Clone, Debug)]
pub struct Presentation {
    gen_count: usize,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(gen_count: usize, relators: Vec<Word>) -> Presentation {
        let relators = relators
            .into_iter()
            .map(|w| w.cyclically_reduced())
            .filter(|w| !w.is_empty())
            .collect();
        Presentation {
            gen_count,
            relators,
        }
    }

    /// ⟨X, Y | X^l, Y^m, (XY)^n⟩ — the triangle group on two generators,
    /// with Z eliminated as (XY)⁻¹.
    pub fn triangle(l: u64, m: u64, n: u64) -> Presentation {
        let x = Word::generator(0);
        let y = Word::generator(1);
        let xy = x.concat(&y);
        Presentation::new(2, vec![x.pow(l as usize), y.pow(m as usize), xy.pow(n as usize)])
    }

    pub fn gen_count(&self) -> usize {
        self.gen_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(|r| r.len()).sum()
    }

    /// generator count − relator count; invariant under Tietze eliminations.
    pub fn deficiency(&self) -> i64 {
        self.gen_count as i64 - self.relators.len() as i64
    }

    /// Relator exponent-sum matrix (relators × generators).
    pub fn exponent_matrix(&self) -> Vec<Vec<BigInt>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![BigInt::from(0); self.gen_count];
                for &l in r.letters() {
                    let g = l.unsigned_abs() as usize - 1;
                    row[g] += if l > 0 { 1 } else { -1 };
                }
                row
            })
            .collect()
    }
}

/// Abelianization invariants: free rank plus the nontrivial torsion divisors
/// in their divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abelianization {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

/// Smith normal form of the relator exponent matrix.
pub fn abelianization(pres: &Presentation) -> Abelianization {
    let diag = smith_diagonal(pres.exponent_matrix());
    let nonzero: Vec<&BigInt> = diag.iter().filter(|d| !num_traits::Zero::is_zero(*d)).collect();
    let torsion = nonzero
        .iter()
        .filter(|d| **d > &BigInt::from(1))
        .map(|d| d.to_biguint().unwrap())
        .collect();
    Abelianization {
        free_rank: pres.gen_count - nonzero.len(),
        torsion,
    }
}

/// Coset table, shortlex Schreier transversal, and Schreier generator
/// bookkeeping for a transitive action.
pub struct SchreierData {
    degree: usize,
    basepoint: usize,
    gens: Vec<Perm>,
    inv_gens: Vec<Perm>,
    transversal: Vec<Word>,
    /// schreier_index[p][g]: RS generator id of σ(p, g), or None on tree
    /// edges (where σ(p, g) is freely trivial).
    schreier_index: Vec<Vec<Option<u32>>>,
    /// id → (point, ambient generator)
    schreier_pairs: Vec<(usize, usize)>,
}

/// Breadth-first shortlex transversal for the action, rooted at `basepoint`.
///
/// The BFS expands each point by the positive letters X, Y, … in that order,
/// so every transversal word is the shortlex-least positive word carrying the
/// basepoint to its point (for a finite group the forward edges already cover
/// the orbit). The construction is fully deterministic.
pub fn schreier_transversal(action: &[Perm], basepoint: usize) -> Result<SchreierData> {
    let Some(first) = action.first() else {
        return Err(Error::NoGenerators);
    };
    let degree = first.degree();
    for g in action {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch(degree, g.degree()));
        }
    }
    if basepoint >= degree {
        return Err(Error::PointOutOfRange(basepoint, degree));
    }
    let gens = action.to_vec();
    let inv_gens: Vec<Perm> = gens.iter().map(|g| g.inverse()).collect();

    let mut transversal: Vec<Option<Word>> = vec![None; degree];
    // tree[p][g] marks σ(p, g) = U_p g U_{p·g}⁻¹ as freely trivial
    let mut tree = vec![vec![false; gens.len()]; degree];
    transversal[basepoint] = Some(Word::empty());
    let mut queue = vec![basepoint];
    let mut head = 0;
    while head < queue.len() {
        let p = queue[head];
        head += 1;
        for (gi, g) in gens.iter().enumerate() {
            let forward = g.apply(p);
            if transversal[forward].is_none() {
                let mut w = transversal[p].clone().unwrap();
                w.push(gi as i32 + 1);
                transversal[forward] = Some(w);
                tree[p][gi] = true;
                queue.push(forward);
            }
        }
    }
    if transversal.iter().any(|t| t.is_none()) {
        return Err(Error::NonTransitive);
    }
    let transversal: Vec<Word> = transversal.into_iter().map(|t| t.unwrap()).collect();

    let mut schreier_index = vec![vec![None; gens.len()]; degree];
    let mut schreier_pairs = Vec::new();
    for p in 0..degree {
        for gi in 0..gens.len() {
            if tree[p][gi] {
                continue;
            }
            schreier_index[p][gi] = Some(schreier_pairs.len() as u32);
            schreier_pairs.push((p, gi));
        }
    }
    Ok(SchreierData {
        degree,
        basepoint,
        gens,
        inv_gens,
        transversal,
        schreier_index,
        schreier_pairs,
    })
}

impl SchreierData {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn max_transversal_length(&self) -> usize {
        self.transversal.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Number of non-redundant Schreier generators: degree·gens − (degree−1).
    pub fn schreier_generator_count(&self) -> usize {
        self.schreier_pairs.len()
    }

    pub fn schreier_pairs(&self) -> &[(usize, usize)] {
        &self.schreier_pairs
    }

    pub fn schreier_index(&self, point: usize, gen: usize) -> Option<usize> {
        self.schreier_index[point][gen].map(|i| i as usize)
    }

    /// The Schreier generator σ(p, g) = U_p g U_{p·g}⁻¹ as an ambient word.
    pub fn schreier_generator_word(&self, id: usize) -> Word {
        let (p, gi) = self.schreier_pairs[id];
        let q = self.gens[gi].apply(p);
        self.transversal[p]
            .concat(&Word::generator(gi))
            .concat(&self.transversal[q].inverse())
    }

    fn apply_letter(&self, point: usize, letter: i32) -> usize {
        let gi = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.gens[gi].apply(point)
        } else {
            self.inv_gens[gi].apply(point)
        }
    }

    /// Image of a point under an ambient word.
    pub fn apply_word(&self, point: usize, w: &Word) -> usize {
        w.letters().iter().fold(point, |p, &l| self.apply_letter(p, l))
    }

    /// Rewrites an ambient word stabilizing the basepoint into Schreier
    /// generators (the standard τ map).
    pub fn rewrite_word(&self, w: &Word) -> Result<Word> {
        let (word, end) = self.rewrite_from(self.basepoint, w);
        if end != self.basepoint {
            return Err(Error::NotInStabilizer);
        }
        Ok(word)
    }

    /// τ rewriting along a walk starting at `start`; returns the rewritten
    /// word and the endpoint.
    fn rewrite_from(&self, start: usize, w: &Word) -> (Word, usize) {
        let mut out = Word::empty();
        let mut p = start;
        for &l in w.letters() {
            let gi = l.unsigned_abs() as usize - 1;
            if l > 0 {
                if let Some(id) = self.schreier_index[p][gi] {
                    out.push(id as i32 + 1);
                }
                p = self.gens[gi].apply(p);
            } else {
                let prev = self.inv_gens[gi].apply(p);
                if let Some(id) = self.schreier_index[prev][gi] {
                    out.push(-(id as i32 + 1));
                }
                p = prev;
            }
        }
        (out, p)
    }

    fn perm_of_word(&self, w: &Word) -> Perm {
        let mut images = Vec::with_capacity(self.degree);
        for p in 0..self.degree {
            images.push(self.apply_word(p, w) as u32);
        }
        Perm::from_images(images).expect("word acts as a permutation")
    }
}

/// Splits a relator into root^e with e maximal (linear word periodicity).
fn power_decomposition(w: &Word) -> (Word, usize) {
    let letters = w.letters();
    let n = letters.len();
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        if (0..n).all(|i| letters[i] == letters[i % d]) {
            return (Word::from_letters(letters[..d].to_vec()), n / d);
        }
    }
    (w.clone(), 1)
}

/// Reidemeister–Schreier presentation of the basepoint stabilizer.
///
/// Generators are the non-redundant σ(p, g). For each ambient relator
/// root^e, one relator τ(U_i · root^e · U_i⁻¹) is taken per cycle of the
/// permutation induced by the root (smallest cycle element as the
/// representative); relators for the other points of a cycle are conjugates
/// of that one, hence consequences.
pub fn reidemeister_schreier(pres: &Presentation, sd: &SchreierData) -> Result<Presentation> {
    if pres.gen_count() != sd.gens.len() {
        return Err(Error::InvalidInput(format!(
            "presentation has {} generators but the action has {}",
            pres.gen_count(),
            sd.gens.len()
        )));
    }
    let mut relators = Vec::new();
    for relator in pres.relators() {
        let perm_r = sd.perm_of_word(relator);
        if !perm_r.is_identity() {
            return Err(Error::InvalidInput(
                "relator does not act trivially; the action is not a quotient".into(),
            ));
        }
        let (root, e) = power_decomposition(relator);
        let perm_root = sd.perm_of_word(&root);
        for cycle in perm_root.cycles() {
            let rep = cycle[0];
            let conjugate = sd.transversal[rep]
                .concat(&root.pow(e))
                .concat(&sd.transversal[rep].inverse());
            let rewritten = sd.rewrite_word(&conjugate)?;
            relators.push(rewritten);
        }
    }
    Ok(Presentation::new(sd.schreier_generator_count(), relators))
}

/// Record of the Tietze eliminations, with enough information to rewrite any
/// word over the original generators into the surviving ones.
pub struct Ledger {
    /// (eliminated original generator, its defining word over the generators
    /// still alive at that stage, as original ids).
    pub eliminations: Vec<(usize, Word)>,
    /// Surviving original generator ids, ascending; position = final index.
    pub final_gens: Vec<usize>,
    /// Per original generator id: a word over the final indices.
    rewrite_map: Vec<Word>,
}

impl Ledger {
    /// Rewrites an original generator into the final generators.
    pub fn rewrite_generator(&self, original: usize) -> &Word {
        &self.rewrite_map[original]
    }

    /// Extends the rewriting to words; a homomorphism of free words.
    pub fn rewrite(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            let image = if l > 0 {
                self.rewrite_map[g].clone()
            } else {
                self.rewrite_map[g].inverse()
            };
            out = out.concat(&image);
        }
        out
    }
}

pub struct TietzeOutcome {
    /// The simplified presentation, over final indices 0..final_gens.len().
    pub presentation: Presentation,
    pub ledger: Ledger,
    /// True when simplification had to stop early (substitution budget hit,
    /// or more than one relator left with nothing eliminable).
    pub stuck: bool,
}

const TIETZE_BUDGET_FACTOR: usize = 10_000;

/// Eliminates, one at a time, generators that occur exactly once in some
/// relator. Among all candidates the shortest relator wins, then the lowest
/// generator index. Duplicate relators (up to cyclic rotation and inversion)
/// are dropped as they appear. Deficiency is invariant under each
/// elimination, so a surface-group input with gens − relators = 2g−1 lands
/// on exactly 2g generators and one relator.
pub fn tietze_simplify(pres: &Presentation) -> TietzeOutcome {
    let original_gens = pres.gen_count();
    let mut alive = vec![true; original_gens];
    let mut relators: Vec<Word> = pres.relators().to_vec();
    let mut eliminations: Vec<(usize, Word)> = Vec::new();
    let budget = TIETZE_BUDGET_FACTOR * pres.total_length().max(100);
    let mut blown_budget = false;

    loop {
        // drop cyclic duplicates, keeping first occurrences
        let mut seen = std::collections::BTreeSet::new();
        relators.retain(|r| seen.insert(r.canonical_cyclic()));
        relators.retain(|r| !r.is_empty());

        if relators.iter().map(|r| r.len()).sum::<usize>() > budget {
            blown_budget = true;
            break;
        }

        // candidate: (relator length, generator id, relator index, position)
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for (ri, r) in relators.iter().enumerate() {
            let mut counts: std::collections::BTreeMap<usize, (usize, usize)> =
                std::collections::BTreeMap::new();
            for (pos, &l) in r.letters().iter().enumerate() {
                let g = l.unsigned_abs() as usize - 1;
                let entry = counts.entry(g).or_insert((0, pos));
                entry.0 += 1;
            }
            for (&g, &(count, pos)) in &counts {
                if count != 1 {
                    continue;
                }
                let key = (r.len(), g, ri, pos);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, gen, ri, pos)) = best else {
            break;
        };

        let relator = relators.remove(ri);
        let letters = relator.letters();
        let letter = letters[pos];
        let prefix = Word::from_letters(letters[..pos].to_vec());
        let suffix = Word::from_letters(letters[pos + 1..].to_vec());
        // prefix · gen^ε · suffix = 1
        let definition = if letter > 0 {
            prefix.inverse().concat(&suffix.inverse())
        } else {
            suffix.concat(&prefix)
        };
        debug_assert!(definition
            .letters()
            .iter()
            .all(|&l| l.unsigned_abs() as usize - 1 != gen));

        let pos_letter = gen as i32 + 1;
        let def_inv = definition.inverse();
        for r in relators.iter_mut() {
            if r.letters().iter().all(|&l| l.unsigned_abs() != pos_letter as u32) {
                continue;
            }
            let mut out = Word::empty();
            for &l in r.letters() {
                if l == pos_letter {
                    out = out.concat(&definition);
                } else if l == -pos_letter {
                    out = out.concat(&def_inv);
                } else {
                    out.push(l);
                }
            }
            *r = out.cyclically_reduced();
        }
        alive[gen] = false;
        eliminations.push((gen, definition));
    }

    let final_gens: Vec<usize> = (0..original_gens).filter(|&g| alive[g]).collect();
    let mut final_index = vec![usize::MAX; original_gens];
    for (i, &g) in final_gens.iter().enumerate() {
        final_index[g] = i;
    }

    // back-substitute, newest elimination first, to express every original
    // generator over the final indices
    let mut rewrite_map: Vec<Word> = (0..original_gens)
        .map(|g| {
            if alive[g] {
                Word::generator(final_index[g])
            } else {
                Word::empty()
            }
        })
        .collect();
    for (gen, definition) in eliminations.iter().rev() {
        let mut image = Word::empty();
        for &l in definition.letters() {
            let g = l.unsigned_abs() as usize - 1;
            let part = if l > 0 {
                rewrite_map[g].clone()
            } else {
                rewrite_map[g].inverse()
            };
            image = image.concat(&part);
        }
        rewrite_map[*gen] = image;
    }

    let relabeled: Vec<Word> = relators
        .iter()
        .map(|r| {
            Word::from_letters(
                r.letters()
                    .iter()
                    .map(|&l| {
                        let g = l.unsigned_abs() as usize - 1;
                        let f = final_index[g] as i32 + 1;
                        if l > 0 {
                            f
                        } else {
                            -f
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    let presentation = Presentation::new(final_gens.len(), relabeled);
    let stuck = blown_budget || presentation.relators().len() > 1;
    TietzeOutcome {
        presentation,
        ledger: Ledger {
            eliminations,
            final_gens,
            rewrite_map,
        },
        stuck,
    }
}

/// Convenience: 2g for a genus-g one-relator surface presentation, if the
/// presentation has that shape.
pub fn surface_genus_from_counts(pres: &Presentation) -> Option<u64> {
    if pres.relators().len() == 1 && pres.gen_count().is_multiple_of(2) {
        Some(pres.gen_count() as u64 / 2)
    } else {
        None
    }
}
