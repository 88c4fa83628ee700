//! From an epimorphism θ: N → A on the simplified stabilizer presentation to
//! the monodromy of the covering hypermap.
//!
//! Conventions: voltages multiply on the RIGHT of the fiber coordinate, deck
//! transformations act by left multiplication. Worked 4-dart example (base
//! points {0, 1} with x = (0 1), A = C₂ = {0, 1}, voltage α(0, X) = 1,
//! α(1, X) = 0, dart (i, a) = 2i + a):
//!
//!   x̂: (0,0)→(1,1)  (0,1)→(1,0)  (1,0)→(0,0)  (1,1)→(0,1)
//!
//! i.e. x̂ = (0 3 1 2), a single 4-cycle, and the deck map (i,a) ↦ (i, 1+a) =
//! (0 1)(2 3) commutes with it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fpgroup::{Ledger, Presentation, SchreierData, Word};
use crate::perm::Perm;
use crate::table::GroupTable;

/// A homomorphism from a presented group to a finite group, recorded as one
/// target element id per presentation generator.
#[derive(Clone, Debug)]
pub struct Hom {
    pub images: Vec<usize>,
}

impl Hom {
    /// Evaluates a word under the homomorphism.
    pub fn eval(&self, word: &Word, target: &GroupTable) -> usize {
        let mut acc = target.identity();
        for &l in word.letters() {
            let g = l.unsigned_abs() as usize - 1;
            let img = self.images[g];
            let img = if l > 0 { img } else { target.inv(img) };
            acc = target.mul(acc, img);
        }
        acc
    }

    /// True iff the images generate the whole target.
    pub fn surjective(&self, target: &GroupTable) -> bool {
        target.generates(&self.images)
    }

    /// True iff every relator maps to the identity.
    pub fn respects(&self, pres: &Presentation, target: &GroupTable) -> bool {
        pres.relators()
            .iter()
            .all(|r| self.eval(r, target) == target.identity())
    }
}

pub const THETA_RANDOM_BUDGET: u64 = 1_000_000;

/// Searches for an epimorphism θ from the simplified one-relator presentation
/// onto A.
///
/// Structured phase first: supports of size d = rank(A) get a generating
/// d-tuple, everything else the identity (for a relator with zero exponent
/// sums this succeeds immediately on abelian targets). Then seeded random
/// assignments, each checked for relator triviality before surjectivity.
/// Deterministic given the seed; the attempt count is reported.
pub fn find_epimorphism(
    spres: &Presentation,
    target: &GroupTable,
    seed: u64,
) -> Result<(Hom, u64)> {
    let gens = spres.gen_count();
    let order = target.order();
    let mut attempts: u64 = 0;

    if order == 1 {
        return Ok((
            Hom {
                images: vec![0; gens],
            },
            0,
        ));
    }
    let (rank, witness) = target.min_generating_size()?;
    if rank > gens {
        return Err(Error::InvalidInput(format!(
            "target needs {rank} generators but the presentation has only {gens}"
        )));
    }

    // structured attempts: ordered supports of size `rank`
    let support_budget = 20_000usize;
    let mut supports = Vec::new();
    enumerate_supports(gens, rank, support_budget, &mut supports);
    for support in &supports {
        attempts += 1;
        let mut images = vec![target.identity(); gens];
        for (slot, &g) in support.iter().enumerate() {
            images[g] = witness[slot];
        }
        let hom = Hom { images };
        if hom.respects(spres, target) && hom.surjective(target) {
            return Ok((hom, attempts));
        }
    }

    // seeded random phase
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..THETA_RANDOM_BUDGET {
        attempts += 1;
        let images: Vec<usize> = (0..gens).map(|_| rng.gen_range(0..order)).collect();
        let hom = Hom { images };
        if hom.respects(spres, target) && hom.surjective(target) {
            return Ok((hom, attempts));
        }
    }
    Err(Error::SearchBudgetExhausted(format!(
        "no epimorphism onto a group of order {order} within {attempts} attempts"
    )))
}

fn enumerate_supports(gens: usize, size: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(
        gens: usize,
        size: usize,
        start: usize,
        current: &mut Vec<usize>,
        budget: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= budget {
            return;
        }
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for g in start..gens {
            current.push(g);
            rec(gens, size, g + 1, current, budget, out);
            current.pop();
        }
    }
    let mut current = Vec::new();
    rec(gens, size, 0, &mut current, budget, out);
}

/// Checks θ against the ORIGINAL Reidemeister–Schreier presentation: every
/// original relator, rewritten through the ledger and evaluated in A, must be
/// the identity. This is the independent consistency check that the ledger
/// rewriting and θ together define a homomorphism on N as first presented.
pub fn verify_theta(
    theta: &Hom,
    rs: &Presentation,
    ledger: &Ledger,
    target: &GroupTable,
) -> bool {
    rs.relators().iter().all(|r| {
        let rewritten = ledger.rewrite(r);
        theta.eval(&rewritten, target) == target.identity()
    })
}

/// Voltage table: one element of A per (base point, ambient generator).
#[derive(Clone, Debug)]
pub struct VoltageAssignment {
    pub base_degree: usize,
    /// `alpha[p][g]` = θ(ledger-rewrite(σ(p, g))), identity on tree edges.
    pub alpha: Vec<Vec<usize>>,
}

/// θ-images of all Schreier generators, spread over the coset table.
#[allow(clippy::needless_range_loop)]
pub fn voltages(
    sd: &SchreierData,
    ledger: &Ledger,
    theta: &Hom,
    target: &GroupTable,
) -> VoltageAssignment {
    let n = sd.degree();
    let gens = sd.gens().len();
    let mut alpha = vec![vec![target.identity(); gens]; n];
    for p in 0..n {
        for g in 0..gens {
            if let Some(id) = sd.schreier_index(p, g) {
                let word = ledger.rewrite(&Word::generator(id));
                alpha[p][g] = theta.eval(&word, target);
            }
        }
    }
    VoltageAssignment {
        base_degree: n,
        alpha,
    }
}

impl VoltageAssignment {
    /// Product of voltages along the cycles of each relator root; all must be
    /// the identity for a valid assignment.
    pub fn relator_cycle_products_trivial(
        &self,
        pres: &Presentation,
        sd: &SchreierData,
        target: &GroupTable,
    ) -> bool {
        pres.relators().iter().all(|r| {
            // walk the relator from every point; the ordered voltage product
            // must vanish (this covers each cycle |cycle| times, cheap at our
            // scale)
            (0..self.base_degree).all(|start| {
                let mut p = start;
                let mut acc = target.identity();
                for &l in r.letters() {
                    debug_assert!(l > 0, "triangle relators are positive words");
                    let g = l as usize - 1;
                    acc = target.mul(acc, self.alpha[p][g]);
                    p = sd.gens()[g].apply(p);
                }
                p == start && acc == target.identity()
            })
        })
    }
}

/// The derived covering: darts (i, a) = i·|A| + a, monodromy x̂, ŷ, and the
/// deck injection of A.
pub struct CoverStructure {
    pub dart_count: usize,
    pub x_hat: Perm,
    pub y_hat: Perm,
    pub group_order: usize,
}

impl CoverStructure {
    pub fn dart(&self, base_point: usize, fiber: usize) -> usize {
        base_point * self.group_order + fiber
    }
}

/// Builds the cover monodromy from base permutations and voltages:
/// (i, a)·ŝ = (i·s, a·α(i, s)).
pub fn build_cover(
    base_x: &Perm,
    base_y: &Perm,
    va: &VoltageAssignment,
    target: &GroupTable,
) -> CoverStructure {
    let n = va.base_degree;
    let order = target.order();
    debug_assert_eq!(base_x.degree(), n);
    let dart_count = n * order;
    let mut x_images = vec![0u32; dart_count];
    let mut y_images = vec![0u32; dart_count];
    for i in 0..n {
        for a in 0..order {
            let dart = i * order + a;
            x_images[dart] = (base_x.apply(i) * order + target.mul(a, va.alpha[i][0])) as u32;
            y_images[dart] = (base_y.apply(i) * order + target.mul(a, va.alpha[i][1])) as u32;
        }
    }
    CoverStructure {
        dart_count,
        x_hat: Perm::from_images(x_images).expect("cover monodromy is a permutation"),
        y_hat: Perm::from_images(y_images).expect("cover monodromy is a permutation"),
        group_order: order,
    }
}

/// Deck transformation for b ∈ A: (i, a) ↦ (i, b⁻¹·a).
///
/// Left multiplication commutes with the right voltage action; using b⁻¹
/// makes b ↦ deck(b) a homomorphism under the crate's left-factor-first
/// composition.
pub fn deck_map(cover: &CoverStructure, target: &GroupTable, b: usize) -> Perm {
    let order = cover.group_order;
    let b_inv = target.inv(b);
    let mut images = vec![0u32; cover.dart_count];
    for i in 0..cover.dart_count / order {
        for a in 0..order {
            images[i * order + a] = (i * order + target.mul(b_inv, a)) as u32;
        }
    }
    Perm::from_images(images).expect("deck map is a permutation")
}

/// Every deck check in one place: commutation with the monodromy, the
/// homomorphism property (all pairs for |A| ≤ 200, generators otherwise),
/// injectivity, fixed-point-freeness off the identity, and fiber regularity.
pub struct DeckChecks {
    pub commutes: bool,
    pub homomorphism: bool,
    pub injective: bool,
    pub fixed_point_free: bool,
    pub regular_on_fibers: bool,
}

pub fn check_deck(cover: &CoverStructure, target: &GroupTable) -> DeckChecks {
    let order = target.order();
    let maps: Vec<Perm> = (0..order).map(|b| deck_map(cover, target, b)).collect();
    let commutes = maps.iter().all(|d| {
        d.then(&cover.x_hat) == cover.x_hat.then(d) && d.then(&cover.y_hat) == cover.y_hat.then(d)
    });
    let homomorphism = if order <= 200 {
        (0..order).all(|b1| {
            (0..order).all(|b2| maps[b1].then(&maps[b2]) == maps[target.mul(b1, b2)])
        })
    } else {
        target.generator_ids().iter().all(|&g1| {
            (0..order).all(|b2| maps[g1].then(&maps[b2]) == maps[target.mul(g1, b2)])
        })
    };
    let injective = {
        let mut distinct = true;
        for b in 1..order {
            if maps[b] == maps[0] {
                distinct = false;
            }
        }
        distinct
    };
    let fixed_point_free = (1..order).all(|b| maps[b].fixed_point_count() == 0);
    let regular_on_fibers = {
        // orbit of (0, identity) under the deck maps is the whole fiber of 0
        let mut hit = vec![false; order];
        for b in 0..order {
            hit[maps[b].apply(0)] = true;
        }
        hit.iter().all(|&h| h)
    };
    DeckChecks {
        commutes,
        homomorphism,
        injective,
        fixed_point_free,
        regular_on_fibers,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::{
        abelianization, reidemeister_schreier, schreier_transversal, tietze_simplify,
    };
    use crate::psl2::{find_generating_triple, Psl2};
    use crate::table::GroupTable;

    fn c2() -> GroupTable {
        GroupTable::from_generators(&[Perm::parse("(0 1)", Some(2)).unwrap()], 10).unwrap()
    }

    fn trivial_group() -> GroupTable {
        GroupTable::from_generators(&[Perm::identity(1)], 10).unwrap()
    }

    /// Full chain up to the simplified presentation for (4,6,12) at q = 23.
    fn q23_chain() -> (
        Presentation,
        SchreierData,
        Presentation,
        crate::fpgroup::Ledger,
    ) {
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        let ctx = Psl2::new(23).unwrap();
        let pres = Presentation::triangle(4, 6, 12);
        let sd = schreier_transversal(&[ctx.perm(t.x), ctx.perm(t.y)], ctx.basepoint()).unwrap();
        let rs = reidemeister_schreier(&pres, &sd).unwrap();
        let out = tietze_simplify(&rs);
        assert!(!out.stuck);
        (pres, sd, rs, out.ledger)
    }

    #[test]
    fn rs_counts_for_q23() {
        let (_, sd, rs, _) = q23_chain();
        assert_eq!(sd.degree(), 24);
        assert!(sd.max_transversal_length() <= 23);
        assert_eq!(rs.gen_count(), 25);
        assert_eq!(rs.relators().len(), 12);
        assert_eq!(rs.deficiency(), 13); // 2g − 1 with g = 7
        let ab = abelianization(&rs);
        assert_eq!(ab.free_rank, 14);
        assert!(ab.torsion.is_empty());
    }

    #[test]
    fn aut_certification_for_c2_cover() {
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        let ctx = Psl2::new(23).unwrap();
        let (x_perm, y_perm) = (ctx.perm(t.x), ctx.perm(t.y));
        let pres = Presentation::triangle(4, 6, 12);
        let sd = schreier_transversal(&[x_perm.clone(), y_perm.clone()], ctx.basepoint()).unwrap();
        let rs = reidemeister_schreier(&pres, &sd).unwrap();
        let out = tietze_simplify(&rs);
        let a = c2();
        let (hom, _) = find_epimorphism(&out.presentation, &a, 0).unwrap();
        let va = voltages(&sd, &out.ledger, &hom, &a);
        let cover = build_cover(&x_perm, &y_perm, &va, &a);
        let dessin =
            crate::dessin::Dessin::from_pair(cover.x_hat.clone(), cover.y_hat.clone()).unwrap();
        assert!(crate::dessin::certify_aut_equals(&dessin, &a, &cover));
        // certifying against the wrong group must fail
        let trivial = trivial_group();
        assert!(!crate::dessin::certify_aut_equals(&dessin, &trivial, &cover));
    }

    #[test]
    fn simplified_q23_is_a_genus_seven_surface_presentation() {
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        let ctx = Psl2::new(23).unwrap();
        let pres = Presentation::triangle(4, 6, 12);
        let sd = schreier_transversal(&[ctx.perm(t.x), ctx.perm(t.y)], ctx.basepoint()).unwrap();
        let rs = reidemeister_schreier(&pres, &sd).unwrap();
        let out = tietze_simplify(&rs);
        assert!(!out.stuck);
        assert_eq!(out.presentation.gen_count(), 14);
        assert_eq!(out.presentation.relators().len(), 1);
        let ab = abelianization(&out.presentation);
        assert_eq!(ab.free_rank, 14);
        assert!(ab.torsion.is_empty());
    }

    #[test]
    fn trivial_group_epimorphism() {
        let (_, sd, rs, _) = q23_chain();
        let out = tietze_simplify(&rs);
        let a = trivial_group();
        let (hom, _) = find_epimorphism(&out.presentation, &a, 0).unwrap();
        assert!(hom.images.iter().all(|&i| i == 0));
        assert!(verify_theta(&hom, &rs, &out.ledger, &a));
        // all voltages are the identity, and the cover is the base action
        let va = voltages(&sd, &out.ledger, &hom, &a);
        assert!(va.alpha.iter().flatten().all(|&v| v == 0));
        let cover = build_cover(&sd.gens()[0], &sd.gens()[1], &va, &a);
        assert_eq!(cover.dart_count, 24);
        assert_eq!(&cover.x_hat, &sd.gens()[0]);
        assert_eq!(&cover.y_hat, &sd.gens()[1]);
    }

    #[test]
    fn c2_epimorphism_verifies() {
        let (_, _, rs, _) = q23_chain();
        let out = tietze_simplify(&rs);
        let a = c2();
        let (hom, _) = find_epimorphism(&out.presentation, &a, 0).unwrap();
        assert!(hom.surjective(&a));
        assert!(verify_theta(&hom, &rs, &out.ledger, &a));
        // into an abelian target every assignment kills a zero-exponent-sum
        // relator, so corruption cannot be detected here; see the S₃ test
        let mut corrupted = hom.clone();
        corrupted.images[0] = 1 - corrupted.images[0];
        assert!(verify_theta(&corrupted, &rs, &out.ledger, &a));
    }

    #[test]
    fn s3_epimorphism_mutations_fail() {
        let (_, _, rs, _) = q23_chain();
        let out = tietze_simplify(&rs);
        let a = GroupTable::from_generators(
            &[
                Perm::parse("(0 1)", Some(3)).unwrap(),
                Perm::parse("(0 1 2)", Some(3)).unwrap(),
            ],
            10,
        )
        .unwrap();
        let (hom, _) = find_epimorphism(&out.presentation, &a, 0).unwrap();
        assert!(hom.surjective(&a));
        assert!(verify_theta(&hom, &rs, &out.ledger, &a));
        // perturb every generator image in turn; at least one perturbation
        // must break the verification (overwhelmingly likely over S₃)
        let mut any_failed = false;
        for g in 0..hom.images.len() {
            let mut corrupted = hom.clone();
            corrupted.images[g] = (corrupted.images[g] + 1) % a.order();
            if !verify_theta(&corrupted, &rs, &out.ledger, &a) {
                any_failed = true;
            }
        }
        assert!(any_failed);
    }

    #[test]
    fn voltages_and_cover_for_c2() {
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        let ctx = Psl2::new(23).unwrap();
        let (x_perm, y_perm) = (ctx.perm(t.x), ctx.perm(t.y));
        let pres = Presentation::triangle(4, 6, 12);
        let sd = schreier_transversal(&[x_perm.clone(), y_perm.clone()], ctx.basepoint()).unwrap();
        let rs = reidemeister_schreier(&pres, &sd).unwrap();
        let out = tietze_simplify(&rs);
        let a = c2();
        let (hom, _) = find_epimorphism(&out.presentation, &a, 0).unwrap();
        assert!(verify_theta(&hom, &rs, &out.ledger, &a));
        let va = voltages(&sd, &out.ledger, &hom, &a);
        assert!(va.relator_cycle_products_trivial(&pres, &sd, &a));
        let cover = build_cover(&x_perm, &y_perm, &va, &a);
        assert_eq!(cover.dart_count, 48);
        // ẑ = (x̂ŷ)⁻¹ is semiregular of order 12
        let z_hat = cover.x_hat.then(&cover.y_hat).inverse();
        assert!(z_hat.is_semiregular());
        assert_eq!(z_hat.cycle_type(), vec![12; 4]);
        let checks = check_deck(&cover, &a);
        assert!(checks.commutes);
        assert!(checks.homomorphism);
        assert!(checks.injective);
        assert!(checks.fixed_point_free);
        assert!(checks.regular_on_fibers);
    }

    #[test]
    fn trivial_voltages_give_disjoint_copies() {
        // non-surjective θ (image C₁ < C₂): the cover splits into two copies
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        let ctx = Psl2::new(23).unwrap();
        let (x_perm, y_perm) = (ctx.perm(t.x), ctx.perm(t.y));
        let pres = Presentation::triangle(4, 6, 12);
        let sd = schreier_transversal(&[x_perm.clone(), y_perm.clone()], ctx.basepoint()).unwrap();
        let rs = reidemeister_schreier(&pres, &sd).unwrap();
        let out = tietze_simplify(&rs);
        let a = c2();
        let hom = Hom {
            images: vec![0; out.presentation.gen_count()],
        };
        assert!(!hom.surjective(&a));
        assert!(verify_theta(&hom, &rs, &out.ledger, &a)); // still a homomorphism
        let va = voltages(&sd, &out.ledger, &hom, &a);
        let cover = build_cover(&x_perm, &y_perm, &va, &a);
        let group =
            crate::group::PermGroup::new(vec![cover.x_hat.clone(), cover.y_hat.clone()]).unwrap();
        assert!(!group.is_transitive());
    }

    #[test]
    fn worked_four_dart_example() {
        // the doc-comment example, pinned as a test
        let base_x = Perm::parse("(0 1)", Some(2)).unwrap();
        let base_y = Perm::identity(2);
        let a = c2();
        let va = VoltageAssignment {
            base_degree: 2,
            alpha: vec![vec![1, 0], vec![0, 0]],
        };
        let cover = build_cover(&base_x, &base_y, &va, &a);
        assert_eq!(cover.x_hat, Perm::parse("(0 3 1 2)", Some(4)).unwrap());
        let deck = deck_map(&cover, &a, 1);
        assert_eq!(deck, Perm::parse("(0 1)(2 3)", Some(4)).unwrap());
        assert_eq!(deck.then(&cover.x_hat), cover.x_hat.then(&deck));
    }
}
