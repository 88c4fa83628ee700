//! PSL₂ over a prime field F_q: sign-normalized unimodular matrices, the
//! degree q+1 action on the projective line, and the search for generating
//! triples with prescribed element orders.

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::triangle::is_prime;

/// An element of PSL₂(F_q), stored as the unique sign-normalized
/// representative: det = 1 and the first nonzero entry in the order
/// (a, b, c, d) lies in {1, …, (q−1)/2}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Psl2Elt {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Psl2Elt {
    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// The group PSL₂(F_q) for an odd prime q, together with its natural action
/// on the projective line P¹(F_q).
///
/// Projective points are indexed 0..=q: index i < q is [i : 1], index q is
/// ∞ = [1 : 0]. The action is on the right: [u : v] ↦ [au+cv : bu+dv], which
/// makes `perm` a homomorphism under the crate's left-factor-first
/// composition. The basepoint is ∞.
pub struct Psl2 {
    q: u64,
}

impl Psl2 {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Psl2 { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree of the projective action.
    pub fn degree(&self) -> usize {
        self.q as usize + 1
    }

    /// Index of ∞, the basepoint.
    pub fn basepoint(&self) -> usize {
        self.q as usize
    }

    #[inline]
    fn fmul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    #[inline]
    fn fadd(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    fn fneg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    fn finv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        // Fermat: a^(q-2)
        let mut acc = 1u64;
        let mut base = a % self.q;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.fmul(acc, base);
            }
            base = self.fmul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn identity(&self) -> Psl2Elt {
        Psl2Elt { a: 1, b: 0, c: 0, d: 1 }
    }

    /// Sign-normalizes (a, b, c, d); fails unless ad − bc = 1.
    /// normalize(M) = normalize(−M), so there is exactly one representative
    /// per group element.
    pub fn normalize(&self, a: u64, b: u64, c: u64, d: u64) -> Result<Psl2Elt> {
        let (a, b, c, d) = (a % self.q, b % self.q, c % self.q, d % self.q)
;
        let det = self.fadd(self.fmul(a, d), self.fneg(self.fmul(b, c)));
        if det != 1 {
            return Err(Error::NotUnimodular { q: self.q, det });
        }
        let half = (self.q - 1) / 2;
        let first_nonzero = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap();
        if first_nonzero <= half {
            Ok(Psl2Elt { a, b, c, d })
        } else {
            Ok(Psl2Elt {
                a: self.fneg(a),
                b: self.fneg(b),
                c: self.fneg(c),
                d: self.fneg(d),
            })
        }
    }

    pub fn mul(&self, x: Psl2Elt, y: Psl2Elt) -> Psl2Elt {
        let a = self.fadd(self.fmul(x.a, y.a), self.fmul(x.b, y.c));
        let b = self.fadd(self.fmul(x.a, y.b), self.fmul(x.b, y.d));
        let c = self.fadd(self.fmul(x.c, y.a), self.fmul(x.d, y.c));
        let d = self.fadd(self.fmul(x.c, y.b), self.fmul(x.d, y.d));
        self.normalize(a, b, c, d).expect("product of unimodular matrices")
    }

    pub fn inverse(&self, x: Psl2Elt) -> Psl2Elt {
        self.normalize(x.d, self.fneg(x.b), self.fneg(x.c), x.a)
            .expect("inverse of unimodular matrix")
    }

    /// Order by iterated multiplication on normalized representatives.
    pub fn order(&self, x: Psl2Elt) -> u64 {
        let id = self.identity();
        let mut acc = x;
        let mut t = 1;
        while acc != id {
            acc = self.mul(acc, x);
            t += 1;
            debug_assert!(t <= self.q + 1);
        }
        t
    }

    /// The permutation of P¹(F_q) induced by `x` (degree q+1).
    #[allow(clippy::needless_range_loop)]
    pub fn perm(&self, x: Psl2Elt) -> Perm {
        let n = self.degree();
        let mut images = vec![0u32; n];
        for i in 0..n {
            let (u, v) = if i == self.basepoint() {
                (1, 0)
            } else {
                (i as u64, 1)
            };
            let u2 = self.fadd(self.fmul(x.a, u), self.fmul(x.c, v));
            let v2 = self.fadd(self.fmul(x.b, u), self.fmul(x.d, v));
            images[i] = if v2 == 0 {
                self.basepoint() as u32
            } else {
                self.fmul(u2, self.finv(v2)) as u32
            };
        }
        Perm::from_images(images).expect("projective action is a bijection")
    }

    /// |PSL₂(F_q)| = q(q²−1)/2 for odd prime q.
    pub fn group_order(&self) -> u128 {
        group_order(self.q)
    }

    /// All normalized elements in lexicographic order of (a, b, c, d).
    ///
    /// SL₂ is scanned in lexicographic order — for a = 0 the entry c = −b⁻¹
    /// is forced and d is free, otherwise b, c are free and d is determined —
    /// and only matrices already in normalized position are yielded, so each
    /// PSL₂ element appears exactly once, in the lex position of its
    /// normalized representative.
    pub fn elements(&self) -> Psl2Iter<'_> {
        Psl2Iter {
            ctx: self,
            a: 0,
            b: 1,
            c: 0,
            d: 0,
            done: false,
        }
    }

    /// First element of the given order in lexicographic normalized-matrix
    /// order.
    pub fn first_of_order(&self, target: u64) -> Option<Psl2Elt> {
        self.elements().find(|&e| self.order(e) == target)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Psl2Elt {
        let q = self.q;
        let a = rng.gen_range(0..q);
        if a == 0 {
            let b = rng.gen_range(1..q);
            let c = self.fneg(self.finv(b));
            let d = rng.gen_range(0..q);
            self.normalize(0, b, c, d).unwrap()
        } else {
            let b = rng.gen_range(0..q);
            let c = rng.gen_range(0..q);
            let d = self.fmul(self.fadd(1, self.fmul(b, c)), self.finv(a));
            self.normalize(a, b, c, d).unwrap()
        }
    }
}

/// Lexicographic scan of PSL₂(F_q); see [`Psl2::elements`].
pub struct Psl2Iter<'a> {
    ctx: &'a Psl2,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    done: bool,
}

impl Iterator for Psl2Iter<'_> {
    type Item = Psl2Elt;

    fn next(&mut self) -> Option<Psl2Elt> {
        let q = self.ctx.q;
        let half = (q - 1) / 2;
        while !self.done {
            let candidate = if self.a == 0 {
                // (0, b, −b⁻¹, d) with b ∈ 1..q, d ∈ 0..q
                if self.b >= q {
                    self.a = 1;
                    self.b = 0;
                    self.c = 0;
                    continue;
                }
                if self.d >= q {
                    self.b += 1;
                    self.d = 0;
                    continue;
                }
                let (b, d) = (self.b, self.d);
                self.d += 1;
                let c = self.ctx.fneg(self.ctx.finv(b));
                Psl2Elt { a: 0, b, c, d }
            } else {
                // (a, b, c, (1+bc)/a) with b, c free
                if self.a >= q {
                    self.done = true;
                    break;
                }
                if self.b >= q {
                    self.a += 1;
                    self.b = 0;
                    self.c = 0;
                    continue;
                }
                if self.c >= q {
                    self.b += 1;
                    self.c = 0;
                    continue;
                }
                let (a, b, c) = (self.a, self.b, self.c);
                self.c += 1;
                let d = self.ctx.fmul(self.ctx.fadd(1, self.ctx.fmul(b, c)), self.ctx.finv(a));
                Psl2Elt { a, b, c, d }
            };
            let first = candidate
                .entries()
                .into_iter()
                .find(|&x| x != 0)
                .unwrap();
            if first <= half {
                return Some(candidate);
            }
        }
        None
    }
}

/// |PSL₂(F_q)| = q(q²−1)/2 for odd q.
pub fn group_order(q: u64) -> u128 {
    let q = q as u128;
    q * (q * q - 1) / 2
}

/// A triple (x, y, z) in PSL₂(F_q) with x·y·z = 1, prescribed orders
/// (l, m, n), and ⟨x, y⟩ the whole group.
#[derive(Clone, Debug)]
pub struct GeneratingTriple {
    pub q: u64,
    pub x: Psl2Elt,
    pub y: Psl2Elt,
    pub z: Psl2Elt,
    pub orders: (u64, u64, u64),
}

impl GeneratingTriple {
    /// Re-checks every invariant from scratch: the product relation, the
    /// exact orders, and the order of the generated permutation group.
    pub fn verify(&self) -> Result<bool> {
        let ctx = Psl2::new(self.q)?;
        let (l, m, n) = self.orders;
        let prod = ctx.mul(ctx.mul(self.x, self.y), self.z);
        if prod != ctx.identity() {
            return Ok(false);
        }
        if ctx.order(self.x) != l || ctx.order(self.y) != m || ctx.order(self.z) != n {
            return Ok(false);
        }
        let group = PermGroup::new(vec![ctx.perm(self.x), ctx.perm(self.y)])?;
        Ok(group.order() == BigUint::from(ctx.group_order()))
    }
}

const RANDOM_TRIPLE_BUDGET: u64 = 200_000;

/// Searches PSL₂(F_q) for a generating triple of orders (l, m, n).
///
/// Requires q prime with q ≡ −1 mod lcm(2l, 2m, 2n), which forces l, m, n to
/// divide (q+1)/2. x is pinned to the first element of order l in
/// lexicographic order; y is sampled with the seeded generator, falling back
/// to a lexicographic scan, so the result is deterministic given the seed.
pub fn find_generating_triple(q: u64, l: u64, m: u64, n: u64, seed: u64) -> Result<GeneratingTriple> {
    if l < 2 || m < 2 || n < 2 {
        return Err(Error::InvalidInput("orders must be at least 2".into()));
    }
    let k = crate::triangle::lcm3(2 * l, 2 * m, 2 * n);
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if !(q + 1).is_multiple_of(k) {
        return Err(Error::InvalidInput(format!(
            "q = {q} is not ≡ -1 mod lcm(2l,2m,2n) = {k}"
        )));
    }
    let ctx = Psl2::new(q)?;
    let x = ctx
        .first_of_order(l)
        .ok_or_else(|| Error::SearchExhausted(format!("no element of order {l} in PSL2({q})")))?;
    let accept = |y: Psl2Elt| -> Option<GeneratingTriple> {
        if ctx.order(y) != m {
            return None;
        }
        let z = ctx.inverse(ctx.mul(x, y));
        if ctx.order(z) != n {
            return None;
        }
        let group = PermGroup::new(vec![ctx.perm(x), ctx.perm(y)]).ok()?;
        if group.order() != BigUint::from(ctx.group_order()) {
            return None;
        }
        Some(GeneratingTriple {
            q,
            x,
            y,
            z,
            orders: (l, m, n),
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_TRIPLE_BUDGET {
        if let Some(t) = accept(ctx.random_element(&mut rng)) {
            return Ok(t);
        }
    }
    // deterministic exhaustive fallback
    for y in ctx.elements() {
        if let Some(t) = accept(y) {
            return Ok(t);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no generating ({l},{m},{n}) triple in PSL2({q})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_identity_and_negation() {
        let ctx = Psl2::new(23).unwrap();
        assert_eq!(
            ctx.normalize(1, 0, 0, 1).unwrap(),
            Psl2Elt { a: 1, b: 0, c: 0, d: 1 }
        );
        // −I is the identity in PSL₂
        assert_eq!(ctx.normalize(22, 0, 0, 22).unwrap(), ctx.identity());
        // first nonzero entry b = 1 is already in {1..11}
        assert_eq!(
            ctx.normalize(0, 1, 22, 0).unwrap(),
            Psl2Elt { a: 0, b: 1, c: 22, d: 0 }
        );
    }

    #[test]
    fn normalize_rejects_non_unimodular() {
        let ctx = Psl2::new(23).unwrap();
        assert!(matches!(
            ctx.normalize(1, 0, 0, 2),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn normalization_is_compatible_with_products() {
        let ctx = Psl2::new(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let x = ctx.random_element(&mut rng);
            let y = ctx.random_element(&mut rng);
            // normalize(M·N) = normalize(normalize(M)·normalize(N)) holds by
            // construction here; check the sign rule: negating one factor
            // gives the same PSL₂ product.
            let neg_x = Psl2Elt {
                a: ctx.fneg(x.a),
                b: ctx.fneg(x.b),
                c: ctx.fneg(x.c),
                d: ctx.fneg(x.d),
            };
            let via_neg = ctx
                .normalize(neg_x.a, neg_x.b, neg_x.c, neg_x.d)
                .unwrap();
            assert_eq!(ctx.mul(via_neg, y), ctx.mul(x, y));
        }
    }

    #[test]
    fn identity_perm() {
        let ctx = Psl2::new(23).unwrap();
        assert!(ctx.perm(ctx.identity()).is_identity());
        assert_eq!(ctx.perm(ctx.identity()).degree(), 24);
    }

    #[test]
    fn unipotent_order_and_cycle_shape() {
        let ctx = Psl2::new(23).unwrap();
        let upper = ctx.normalize(1, 1, 0, 1).unwrap();
        // brute-force powering oracle
        let mut acc = upper;
        let mut t = 1;
        while acc != ctx.identity() {
            acc = ctx.mul(acc, upper);
            t += 1;
        }
        assert_eq!(t, 23);
        assert_eq!(ctx.order(upper), 23);
        // a 23-cycle with a single fixed point
        let p = ctx.perm(upper);
        assert_eq!(p.cycle_type(), vec![23, 1]);
        // the transposed unipotent fixes only ∞
        let lower = ctx.normalize(1, 0, 1, 1).unwrap();
        let p = ctx.perm(lower);
        assert_eq!(p.cycle_type(), vec![23, 1]);
        assert_eq!(p.apply(ctx.basepoint()), ctx.basepoint());
    }

    #[test]
    fn perm_is_a_right_action() {
        // perm(e1·e2) = perm(e1)·perm(e2) under left-factor-first composition
        for q in [5u64, 23] {
            let ctx = Psl2::new(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..1000 {
                let x = ctx.random_element(&mut rng);
                let y = ctx.random_element(&mut rng);
                assert_eq!(ctx.perm(ctx.mul(x, y)), ctx.perm(x).then(&ctx.perm(y)));
            }
        }
    }

    #[test]
    fn basepoint_stabilizer_is_triangular() {
        // Under [u:v] ↦ [au+cv : bu+dv], an element fixes ∞ = [1:0] iff b = 0.
        let ctx = Psl2::new(11).unwrap();
        for e in ctx.elements() {
            let fixes = ctx.perm(e).apply(ctx.basepoint()) == ctx.basepoint();
            assert_eq!(fixes, e.b == 0, "element {e:?}");
        }
    }

    #[test]
    fn element_orders_divide_q_or_half_neighbours() {
        let ctx = Psl2::new(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let e = ctx.random_element(&mut rng);
            let o = ctx.order(e);
            assert!(
                23 % o == 0 || 11 % o == 0 || 12 % o == 0,
                "order {o} divides none of 23, 11, 12"
            );
            // orders coprime to 23 and not dividing 11 divide (q+1)/2 = 12
            if 23 % o != 0 && 11 % o != 0 {
                assert_eq!(12 % o, 0);
            }
        }
    }

    #[test]
    fn semiregular_when_order_divides_half_q_plus_one() {
        let ctx = Psl2::new(23).unwrap();
        for e in ctx.elements() {
            let o = ctx.order(e);
            if o > 1 && 12 % o == 0 {
                assert!(ctx.perm(e).is_semiregular());
                assert_eq!(ctx.perm(e).fixed_point_count(), 0);
            }
        }
    }

    #[test]
    fn order_four_element_has_cycle_type_four_to_the_six() {
        let ctx = Psl2::new(23).unwrap();
        let e = ctx.first_of_order(4).unwrap();
        assert_eq!(ctx.perm(e).cycle_type(), vec![4; 6]);
    }

    #[test]
    fn group_orders_by_formula_and_enumeration() {
        assert_eq!(group_order(23), 6072);
        for q in [3u64, 5, 7] {
            let ctx = Psl2::new(q).unwrap();
            assert_eq!(ctx.elements().count() as u128, group_order(q));
        }
        // PSL₂(F₅) ≅ A₅: cross-check by permutation-group closure
        let ctx = Psl2::new(5).unwrap();
        let gens: Vec<Perm> = ctx.elements().take(8).map(|e| ctx.perm(e)).collect();
        let g = PermGroup::new(gens).unwrap();
        assert_eq!(g.order(), BigUint::from(60u32));
    }

    #[test]
    fn triple_search_q23() {
        let t = find_generating_triple(23, 4, 6, 12, 0).unwrap();
        assert!(t.verify().unwrap());
        let ctx = Psl2::new(23).unwrap();
        let group = PermGroup::new(vec![ctx.perm(t.x), ctx.perm(t.y)]).unwrap();
        assert_eq!(group.order(), BigUint::from(6072u32));
        // all three images and all their nontrivial powers act without fixed
        // points (each is semiregular, and powers of a semiregular
        // permutation stay semiregular)
        for e in [t.x, t.y, t.z] {
            let p = ctx.perm(e);
            assert!(p.is_semiregular());
            let order: u64 = ctx.order(e);
            for k in 1..order {
                let power = p.pow(k);
                assert!(power.is_semiregular());
                assert_eq!(power.fixed_point_count(), 0);
            }
        }
    }

    #[test]
    fn field_axioms_sampled() {
        let ctx = Psl2::new(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let a = rng.gen_range(0..23u64);
            let b = rng.gen_range(0..23u64);
            let c = rng.gen_range(0..23u64);
            assert_eq!(ctx.fmul(a, ctx.fmul(b, c)), ctx.fmul(ctx.fmul(a, b), c));
            assert_eq!(ctx.fadd(a, ctx.fadd(b, c)), ctx.fadd(ctx.fadd(a, b), c));
            assert_eq!(
                ctx.fmul(a, ctx.fadd(b, c)),
                ctx.fadd(ctx.fmul(a, b), ctx.fmul(a, c))
            );
            assert_eq!(ctx.fadd(a, ctx.fneg(a)), 0);
            if a != 0 {
                assert_eq!(ctx.fmul(a, ctx.finv(a)), 1);
            }
        }
        assert_eq!(ctx.order(ctx.identity()), 1);
    }

    #[test]
    fn triple_search_q71() {
        let t = find_generating_triple(71, 2, 4, 9, 0).unwrap();
        assert!(t.verify().unwrap());
        assert_eq!(group_order(71), 178920);
    }

    #[test]
    fn triple_search_rejects_bad_congruence() {
        // 23 ≢ −1 mod 156
        assert!(matches!(
            find_generating_triple(23, 2, 3, 13, 0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn triple_search_is_deterministic() {
        let a = find_generating_triple(23, 4, 6, 12, 5).unwrap();
        let b = find_generating_triple(23, 4, 6, 12, 5).unwrap();
        assert_eq!((a.x, a.y, a.z), (b.x, b.y, b.z));
    }
}
