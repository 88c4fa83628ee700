//! Dessins d'enfants as transitive permutation pairs: genus by Euler
//! counting, passports, type verification, the automorphism group as a
//! centralizer, and the Aut ≅ A certification.

use num_bigint::BigUint;

use crate::cover::{check_deck, CoverStructure};
use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::table::GroupTable;

/// A connected oriented hypermap: darts 0..n with black and white monodromy
/// σ₀, σ₁ and the derived σ₂ satisfying σ₀σ₁σ₂ = 1. σ₂ is always recomputed,
/// never stored stale.
#[derive(Clone, Debug)]
pub struct Dessin {
    sigma0: Perm,
    sigma1: Perm,
    sigma2: Perm,
}

impl Dessin {
    pub fn from_pair(sigma0: Perm, sigma1: Perm) -> Result<Dessin> {
        if sigma0.degree() != sigma1.degree() {
            return Err(Error::DegreeMismatch(sigma0.degree(), sigma1.degree()));
        }
        let group = PermGroup::new(vec![sigma0.clone(), sigma1.clone()])?;
        if !group.is_transitive() {
            return Err(Error::Disconnected);
        }
        let sigma2 = sigma0.then(&sigma1).inverse();
        Ok(Dessin {
            sigma0,
            sigma1,
            sigma2,
        })
    }

    pub fn dart_count(&self) -> usize {
        self.sigma0.degree()
    }

    pub fn sigma0(&self) -> &Perm {
        &self.sigma0
    }

    pub fn sigma1(&self) -> &Perm {
        &self.sigma1
    }

    pub fn sigma2(&self) -> &Perm {
        &self.sigma2
    }

    pub fn monodromy_group(&self) -> PermGroup {
        PermGroup::new(vec![self.sigma0.clone(), self.sigma1.clone()])
            .expect("dessin monodromy is nonempty")
    }

    /// Genus from the Euler characteristic:
    /// χ = c(σ₀) + c(σ₁) + c(σ₂) − n, g = (2 − χ)/2.
    pub fn euler_genus(&self) -> u64 {
        let n = self.dart_count() as i64;
        let chi = self.sigma0.cycles().len() as i64 + self.sigma1.cycles().len() as i64
            + self.sigma2.cycles().len() as i64
            - n;
        let two_g = 2 - chi;
        assert!(
            two_g >= 0 && two_g % 2 == 0,
            "Euler characteristic {chi} impossible for a connected dessin"
        );
        (two_g / 2) as u64
    }

    /// The triple of cycle-type multisets of σ₀, σ₁, σ₂ (each sorted
    /// descending).
    pub fn passport(&self) -> [Vec<usize>; 3] {
        [
            self.sigma0.cycle_type(),
            self.sigma1.cycle_type(),
            self.sigma2.cycle_type(),
        ]
    }

    /// True iff σ₀, σ₁, σ₂ have orders exactly (l, m, n) and each is
    /// semiregular. Semiregularity of a permutation forces every nontrivial
    /// power fixed-point-free, which is the combinatorial torsion-freeness
    /// certificate.
    pub fn verify_type(&self, l: u64, m: u64, n: u64) -> bool {
        let ok = |s: &Perm, target: u64| {
            s.is_semiregular() && s.order() == BigUint::from(target)
        };
        ok(&self.sigma0, l) && ok(&self.sigma1, m) && ok(&self.sigma2, n)
    }

    /// Orders of σ₀, σ₁, σ₂ (the type of the dessin).
    pub fn type_orders(&self) -> (BigUint, BigUint, BigUint) {
        (
            self.sigma0.order(),
            self.sigma1.order(),
            self.sigma2.order(),
        )
    }

    /// Automorphism group of the hypermap: the centralizer of the monodromy
    /// group in Sym(darts). Always semiregular.
    pub fn automorphism_group(&self) -> PermGroup {
        self.monodromy_group()
            .centralizer_in_sym()
            .expect("dessin monodromy is transitive")
    }
}

/// The combinatorial Aut(𝓜) ≅ A certificate:
/// (a) the deck maps commute with the monodromy and form an injective
///     homomorphic image of A (so |Aut| ≥ |A|),
/// (b) the full centralizer has order exactly |A|.
/// An injective homomorphism into a finite group of equal order is an
/// isomorphism, so together these pin Aut(𝓜) ≅ A without any general
/// group-isomorphism machinery.
pub fn certify_aut_equals(dessin: &Dessin, a: &GroupTable, cover: &CoverStructure) -> bool {
    if dessin.dart_count() != cover.dart_count || cover.group_order != a.order() {
        return false;
    }
    let deck = check_deck(cover, a);
    if !(deck.commutes && deck.homomorphism && deck.injective && deck.fixed_point_free) {
        return false;
    }
    let aut = dessin.automorphism_group();
    aut.order() == BigUint::from(a.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, degree: usize) -> Perm {
        Perm::parse(s, Some(degree)).unwrap()
    }

    #[test]
    fn trivial_dessin() {
        let d = Dessin::from_pair(Perm::identity(1), Perm::identity(1)).unwrap();
        assert_eq!(d.dart_count(), 1);
        assert_eq!(d.euler_genus(), 0);
        assert_eq!(d.passport(), [vec![1], vec![1], vec![1]]);
    }

    #[test]
    fn disconnected_rejected() {
        let s0 = p("(0 1)", 4);
        let s1 = p("(0 1)", 4);
        assert!(matches!(
            Dessin::from_pair(s0, s1),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn genus_zero_three_darts() {
        // σ₀ = (0 1), σ₁ = (1 2): χ = 2 + 2 + 1 − 3 = 2, genus 0
        let d = Dessin::from_pair(p("(0 1)", 3), p("(1 2)", 3)).unwrap();
        assert_eq!(d.euler_genus(), 0);
    }

    #[test]
    fn genus_one_four_darts() {
        // σ₀ a 4-cycle, σ₁ the square pairing: χ = 1 + 2 + 1 − 4 = 0
        let d = Dessin::from_pair(p("(0 1 2 3)", 4), p("(0 2)(1 3)", 4)).unwrap();
        assert_eq!(d.euler_genus(), 1);
    }

    #[test]
    fn hand_checked_small_genera() {
        // σ₀ = σ₁ = (0 1): σ₂ = id, χ = 1+1+2−2 = 2
        let d = Dessin::from_pair(p("(0 1)", 2), p("(0 1)", 2)).unwrap();
        assert_eq!(d.euler_genus(), 0);
        // σ₀ = σ₁ = (0 1 2): σ₂ = (0 1 2), χ = 1+1+1−3 = 0
        let d = Dessin::from_pair(p("(0 1 2)", 3), p("(0 1 2)", 3)).unwrap();
        assert_eq!(d.euler_genus(), 1);
    }

    #[test]
    fn verify_type_checks_orders_and_semiregularity() {
        let d = Dessin::from_pair(p("(0 1 2 3)", 4), p("(0 2)(1 3)", 4)).unwrap();
        assert!(d.verify_type(4, 2, 4));
        assert!(!d.verify_type(2, 3, 7));
        // a dessin with a short σ₀ cycle is not semiregular
        let d = Dessin::from_pair(p("(0 1)", 3), p("(1 2)", 3)).unwrap();
        assert!(!d.verify_type(2, 2, 3));
    }

    #[test]
    fn automorphisms_of_regular_c3() {
        let d = Dessin::from_pair(p("(0 1 2)", 3), Perm::identity(3)).unwrap();
        let aut = d.automorphism_group();
        assert_eq!(aut.order(), BigUint::from(3u32));
    }

    #[test]
    fn automorphisms_of_rigid_dessin_trivial() {
        let d = Dessin::from_pair(p("(0 1)", 3), p("(1 2)", 3)).unwrap();
        assert_eq!(d.automorphism_group().order(), BigUint::from(1u32));
    }

    #[test]
    fn aut_group_is_semiregular_and_divides_darts() {
        for (s0, s1, n) in [
            ("(0 1 2 3)", "(0 2)(1 3)", 4usize),
            ("(0 1 2)", "(1 2)", 3),
            ("(0 1)(2 3)", "(0 2)(1 3)", 4),
        ] {
            let d = Dessin::from_pair(p(s0, n), p(s1, n)).unwrap();
            let aut = d.automorphism_group();
            for e in aut.gens() {
                assert!(e.is_identity() || e.fixed_point_count() == 0);
            }
            // a semiregular group's order divides the dart count
            let o: u64 = aut.order().try_into().unwrap();
            assert_eq!(n % o as usize, 0);
        }
    }
}
