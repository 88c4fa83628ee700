//! Permutation groups with a deterministic stabilizer-chain order oracle,
//! plus the centralizer-in-Sym(n) computation used for hypermap automorphisms.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A finite permutation group given by generators.
///
/// The order oracle is a stabilizer chain built deterministically: base points
/// are chosen as the smallest point moved, orbits are grown breadth-first with
/// points and generators in their given order. No randomization, so everything
/// downstream (certificates included) is reproducible.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<StabilizerChain>,
}

impl PermGroup {
    pub fn new(gens: Vec<Perm>) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::NoGenerators);
        };
        let degree = first.degree();
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        Ok(PermGroup {
            degree,
            gens,
            chain: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree, &self.gens))
    }

    /// Exact order of the generated group.
    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// Exact membership test.
    pub fn contains(&self, p: &Perm) -> bool {
        p.degree() == self.degree && self.chain().sift(p.clone()).is_identity()
    }

    /// Orbit of a point under the generated group, ascending.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut in_orbit = vec![false; self.degree];
        in_orbit[point] = true;
        let mut queue = vec![point];
        let mut head = 0;
        while head < queue.len() {
            let p = queue[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if !in_orbit[q] {
                    in_orbit[q] = true;
                    queue.push(q);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbit(0).len() == self.degree
    }

    /// For a transitive group: a non-identity element fixing point 0, if any.
    /// Returns `None` exactly when the action is regular, since the Schreier
    /// generators scanned here generate the point stabilizer.
    pub fn point_stabilizer_witness(&self) -> Result<Option<Perm>> {
        if !self.is_transitive() {
            return Err(Error::NonTransitive);
        }
        let n = self.degree;
        let mut transversal: Vec<Option<Perm>> = vec![None; n];
        transversal[0] = Some(Perm::identity(n));
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let p = queue[head];
            head += 1;
            for g in &self.gens {
                let q = g.apply(p);
                if transversal[q].is_none() {
                    transversal[q] = Some(transversal[p].as_ref().unwrap().then(g));
                    queue.push(q);
                }
            }
        }
        for p in 0..n {
            let u_p = transversal[p].as_ref().unwrap();
            for g in &self.gens {
                let q = g.apply(p);
                let schreier = u_p.then(g).then(&transversal[q].as_ref().unwrap().inverse());
                if !schreier.is_identity() {
                    return Ok(Some(schreier));
                }
            }
        }
        Ok(None)
    }

    /// True iff the (transitive) action is regular, i.e. the group order
    /// equals the degree.
    pub fn is_regular(&self) -> Result<bool> {
        Ok(self.point_stabilizer_witness()?.is_none())
    }

    /// Full centralizer of the group inside Sym(degree), for a transitive
    /// group.
    ///
    /// A centralizing permutation `c` is determined by the image of the base
    /// point 0: `c(0^w) = c(0)^w` for every word `w` in the generators. So we
    /// try each candidate image, propagate through the Schreier graph, and
    /// keep the candidates that actually commute with every generator. This
    /// is the O(n² · gens) method; fine at desk scale.
    ///
    /// The result is returned with its full element list as generators; every
    /// non-identity element is fixed-point-free (the group is semiregular).
    pub fn centralizer_in_sym(&self) -> Result<PermGroup> {
        if !self.is_transitive() {
            return Err(Error::NonTransitive);
        }
        let n = self.degree;
        // BFS discovery edges from point 0: discovered[p] = (parent, gen index)
        let mut discovery: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut order = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for (gi, g) in self.gens.iter().enumerate() {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    discovery[q] = Some((p, gi));
                    order.push(q);
                }
            }
        }
        let mut elements = Vec::new();
        for gamma in 0..n {
            let mut images = vec![0u32; n];
            images[0] = gamma as u32;
            for &p in &order[1..] {
                let (parent, gi) = discovery[p].unwrap();
                images[p] = self.gens[gi].apply(images[parent] as usize) as u32;
            }
            let commutes = (0..n).all(|p| {
                self.gens
                    .iter()
                    .all(|g| images[g.apply(p)] as usize == g.apply(images[p] as usize))
            });
            if !commutes {
                continue;
            }
            if let Ok(c) = Perm::from_images(images) {
                elements.push(c);
            }
        }
        PermGroup::new(elements)
    }
}

struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// transversal[p] = u with base^u = p, or None if p is outside the orbit.
    /// Entries are only ever added, never replaced, so membership proofs made
    /// against earlier transversal states stay valid.
    transversal: Vec<Option<Perm>>,
    /// Orbit points in discovery order.
    orbit_order: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Level {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(Perm::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            transversal,
            orbit_order: vec![base],
        }
    }
}

/// Deterministic Schreier–Sims stabilizer chain.
///
/// A new strong generator fixing the first j base points joins the generator
/// lists of every level from its spawn level through j (its group membership
/// is only known above the spawn level), orbits are extended in place, and
/// the Schreier generators of each affected level are re-sifted. Generators
/// and points are always taken in their given order.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    fn build(degree: usize, gens: &[Perm]) -> StabilizerChain {
        let mut chain = StabilizerChain {
            degree,
            levels: Vec::new(),
        };
        for g in gens {
            chain.adjoin(0, g.clone());
        }
        chain
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for level in &self.levels {
            acc *= BigUint::from(level.orbit_order.len());
        }
        acc
    }

    /// Strips `g` down the chain; the residue is the identity iff `g` lies in
    /// the group.
    fn sift(&self, g: Perm) -> Perm {
        self.sift_from(0, g)
    }

    /// Adjoins `g` (known to fix the bases of all levels before `start`) as a
    /// strong generator.
    fn adjoin(&mut self, start: usize, g: Perm) {
        if g.is_identity() {
            return;
        }
        // g belongs to every level whose leading bases it fixes
        let mut depth = start;
        while depth < self.levels.len() && g.apply(self.levels[depth].base) == self.levels[depth].base
        {
            depth += 1;
        }
        if depth == self.levels.len() {
            let base = (0..self.degree).find(|&p| g.apply(p) != p).unwrap();
            self.levels.push(Level::new(self.degree, base));
        }
        let mut snapshots = Vec::new();
        for l in start..=depth {
            let old_orbit_len = self.levels[l].orbit_order.len();
            let new_gen_index = self.levels[l].gens.len();
            self.levels[l].gens.push(g.clone());
            self.extend_orbit(l);
            snapshots.push((l, old_orbit_len, new_gen_index));
        }
        for (l, old_orbit_len, new_gen_index) in snapshots {
            self.process_new_pairs(l, old_orbit_len, new_gen_index);
        }
    }

    /// Sifts the Schreier generators of level `l` not covered by earlier
    /// calls: pairs with a newly discovered point, or with the new generator.
    fn process_new_pairs(&mut self, l: usize, old_orbit_len: usize, new_gen_index: usize) {
        let mut idx = 0;
        while idx < self.levels[l].orbit_order.len() {
            let p = self.levels[l].orbit_order[idx];
            for gi in 0..self.levels[l].gens.len() {
                if idx < old_orbit_len && gi < new_gen_index {
                    continue;
                }
                let schreier = {
                    let level = &self.levels[l];
                    let u_p = level.transversal[p].as_ref().unwrap();
                    let s = &level.gens[gi];
                    let q = s.apply(p);
                    let u_q_inv = level.transversal[q].as_ref().unwrap().inverse();
                    u_p.then(s).then(&u_q_inv)
                };
                if schreier.is_identity() {
                    continue;
                }
                let residue = self.sift_from(l + 1, schreier);
                // recursion only touches levels beyond l, so the snapshot
                // bounds for this level stay valid
                self.adjoin(l + 1, residue);
            }
            idx += 1;
        }
    }

    fn sift_from(&self, start: usize, mut g: Perm) -> Perm {
        for level in &self.levels[start..] {
            if g.is_identity() {
                break;
            }
            let t = g.apply(level.base);
            match &level.transversal[t] {
                Some(u) => g = g.then(&u.inverse()),
                None => break,
            }
        }
        g
    }

    /// Grows the orbit of level `l` in place under its current generators.
    fn extend_orbit(&mut self, l: usize) {
        let mut idx = 0;
        while idx < self.levels[l].orbit_order.len() {
            let p = self.levels[l].orbit_order[idx];
            for gi in 0..self.levels[l].gens.len() {
                let q = self.levels[l].gens[gi].apply(p);
                if self.levels[l].transversal[q].is_none() {
                    let u = self.levels[l].transversal[p]
                        .as_ref()
                        .unwrap()
                        .then(&self.levels[l].gens[gi]);
                    self.levels[l].transversal[q] = Some(u);
                    self.levels[l].orbit_order.push(q);
                }
            }
            idx += 1;
        }
    }
}
