//! Constructive realization of finite groups as automorphism groups of
//! dessins d'enfants (oriented hypermaps).
//!
//! The pipeline: pick a certified maximal non-arithmetic hyperbolic triple
//! (l, m, n); find a prime q ≡ −1 mod lcm(2l, 2m, 2n) whose Riemann–Hurwitz
//! genus is large enough; realize the triangle-group quotient onto
//! PSL₂(F_q) by a generating triple of exact orders; take the stabilizer of
//! ∞ on the projective line, present it by Reidemeister–Schreier, simplify
//! to the one-relator surface form; map it onto the target group A, spread
//! the kernel as voltages over the coset graph, and read off the covering
//! dessin. The deck maps inject A into the automorphism group, and a
//! centralizer computation pins |Aut| = |A|. Every step that admits a finite
//! check is recorded in a machine-verifiable certificate.

pub mod cover;
pub mod dessin;
pub mod error;
pub mod fpgroup;
pub mod group;
pub mod perm;
pub mod pipeline;
pub mod psl2;
pub mod snf;
pub mod table;
pub mod triangle;

pub use error::{Error, Result};
pub use perm::Perm;
