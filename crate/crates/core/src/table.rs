//! Small finite groups as fully enumerated element tables.
//!
//! Element ids are assigned by breadth-first closure from the identity, which
//! always gets id 0, with the defining generators applied in their given
//! order; the numbering is therefore deterministic and reproducible.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;

/// Default cap on the group order for the minimal-generating-size search.
pub const RANK_CAP: usize = 2000;

/// A finite group with cached element list and multiplication by element id.
pub struct GroupTable {
    degree: usize,
    elems: Vec<Perm>,
    index: HashMap<Vec<u32>, usize>,
    gen_ids: Vec<usize>,
    gens: Vec<Perm>,
    /// Flat multiplication table (order ≤ MUL_TABLE_CAP only).
    mul_table: Option<Vec<u32>>,
    inv: Vec<u32>,
}

const MUL_TABLE_CAP: usize = 1024;

impl GroupTable {
    /// Enumerates the group generated by `gens`, failing once the closure
    /// exceeds `cap` elements.
    pub fn from_generators(gens: &[Perm], cap: usize) -> Result<GroupTable> {
        let pg = PermGroup::new(gens.to_vec())?;
        let degree = pg.degree();
        let mut elems = vec![Perm::identity(degree)];
        let mut index = HashMap::new();
        index.insert(elems[0].images().to_vec(), 0usize);
        let mut head = 0;
        while head < elems.len() {
            let e = elems[head].clone();
            head += 1;
            for g in gens {
                let f = e.then(g);
                if !index.contains_key(f.images()) {
                    if elems.len() >= cap {
                        return Err(Error::CapExceeded(format!(
                            "group closure exceeds cap {cap}"
                        )));
                    }
                    index.insert(f.images().to_vec(), elems.len());
                    elems.push(f);
                }
            }
        }
        let order = elems.len();
        let gen_ids = gens.iter().map(|g| index[g.images()]).collect();
        let mul_table = if order <= MUL_TABLE_CAP {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in 0..order {
                    let f = elems[a].then(&elems[b]);
                    table[a * order + b] = index[f.images()] as u32;
                }
            }
            Some(table)
        } else {
            None
        };
        let mut inv = vec![0u32; order];
        for a in 0..order {
            let f = elems[a].inverse();
            inv[a] = index[f.images()] as u32;
        }
        Ok(GroupTable {
            degree,
            elems,
            index,
            gen_ids,
            gens: gens.to_vec(),
            mul_table,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, id: usize) -> &Perm {
        &self.elems[id]
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elems
    }

    /// Ids of the defining generators.
    pub fn generator_ids(&self) -> &[usize] {
        &self.gen_ids
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.mul_table {
            Some(table) => table[a * self.elems.len() + b] as usize,
            None => {
                let f = self.elems[a].then(&self.elems[b]);
                self.index[f.images()]
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn id_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p.images()).copied()
    }

    pub fn element_order(&self, id: usize) -> usize {
        let mut acc = id;
        let mut t = 1;
        while acc != 0 {
            acc = self.mul(acc, id);
            t += 1;
        }
        t
    }

    /// Subgroup generated by the given element ids, as a sorted id list.
    pub fn subgroup_closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut in_sub = vec![false; self.order()];
        in_sub[0] = true;
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let e = queue[head];
            head += 1;
            for &t in seed {
                let f = self.mul(e, t);
                if !in_sub[f] {
                    in_sub[f] = true;
                    queue.push(f);
                }
            }
        }
        queue.sort_unstable();
        queue
    }

    pub fn generates(&self, tuple: &[usize]) -> bool {
        self.subgroup_closure(tuple).len() == self.order()
    }

    /// One representative per conjugacy class (smallest id), ascending.
    pub fn conjugacy_class_reps(&self) -> Vec<usize> {
        let n = self.order();
        let mut classified = vec![false; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if classified[x] {
                continue;
            }
            reps.push(x);
            let mut queue = vec![x];
            classified[x] = true;
            let mut head = 0;
            while head < queue.len() {
                let e = queue[head];
                head += 1;
                for &g in &self.gen_ids {
                    let c = self.mul(self.mul(self.inv(g), e), g);
                    if !classified[c] {
                        classified[c] = true;
                        queue.push(c);
                    }
                }
            }
        }
        reps
    }

    /// Minimal number of generators (the rank), with a witness tuple.
    ///
    /// Iterates d = 0, 1, 2, …; for each d, seeded random sampling first,
    /// then an exhaustive scan where the first slot ranges over conjugacy
    /// class representatives only (conjugating a generating tuple keeps it
    /// generating, so this loses nothing).
    pub fn min_generating_size(&self) -> Result<(usize, Vec<usize>)> {
        self.min_generating_size_with(RANK_CAP, 0)
    }

    pub fn min_generating_size_with(&self, cap: usize, seed: u64) -> Result<(usize, Vec<usize>)> {
        let order = self.order();
        if order > cap {
            return Err(Error::CapExceeded(format!(
                "rank search capped at order {cap}, group has order {order}"
            )));
        }
        if order == 1 {
            return Ok((0, Vec::new()));
        }
        // d = 1: any element of full order
        for e in 1..order {
            if self.element_order(e) == order {
                return Ok((1, vec![e]));
            }
        }
        let reps = self.conjugacy_class_reps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // every subgroup chain at least doubles, so d ≤ floor(log2 |A|)
        let log2_bound = (usize::BITS - 1 - order.leading_zeros()) as usize;
        for d in 2..=log2_bound {
            for _ in 0..300 * d {
                let tuple: Vec<usize> = (0..d).map(|_| rng.gen_range(0..order)).collect();
                if self.generates(&tuple) {
                    return Ok((d, tuple));
                }
            }
            if let Some(tuple) = self.exhaustive_tuple(d, &reps) {
                return Ok((d, tuple));
            }
        }
        Err(Error::SearchExhausted(
            "no generating tuple below the log2 bound; inconsistent table".into(),
        ))
    }

    fn exhaustive_tuple(&self, d: usize, reps: &[usize]) -> Option<Vec<usize>> {
        let order = self.order();
        let mut tuple = vec![0usize; d];
        // odometer over reps × order^(d-1)
        fn rec(
            table: &GroupTable,
            tuple: &mut Vec<usize>,
            slot: usize,
            reps: &[usize],
            order: usize,
        ) -> bool {
            if slot == tuple.len() {
                return table.generates(tuple);
            }
            if slot == 0 {
                for &r in reps {
                    tuple[0] = r;
                    if rec(table, tuple, 1, reps, order) {
                        return true;
                    }
                }
            } else {
                for e in 1..order {
                    tuple[slot] = e;
                    if rec(table, tuple, slot + 1, reps, order) {
                        return true;
                    }
                }
            }
            false
        }
        if rec(self, &mut tuple, 0, reps, order) {
            Some(tuple)
        } else {
            None
        }
    }

    /// The group as a `PermGroup` on its defining generators.
    pub fn perm_group(&self) -> Result<PermGroup> {
        PermGroup::new(self.gens.clone())
    }
}
