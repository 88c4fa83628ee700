//! Hyperbolic triple bookkeeping: admissibility, the modulus k = lcm(2l,2m,2n),
//! maximality/arithmeticity classification, the prime search for q, and the
//! Riemann–Hurwitz genus formulas.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Perm;

/// Deterministic Miller–Rabin, valid for all n < 3.3·10¹⁸ with this witness
/// set.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn lcm3(a: u64, b: u64, c: u64) -> u64 {
    a.lcm(&b).lcm(&c)
}

/// An unordered triple of periods, stored sorted ascending.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Triple {
    l: u64,
    m: u64,
    n: u64,
}

impl Triple {
    pub fn new(l: u64, m: u64, n: u64) -> Result<Triple> {
        if l < 2 || m < 2 || n < 2 {
            return Err(Error::InvalidTriple(format!(
                "periods must be at least 2, got ({l},{m},{n})"
            )));
        }
        let mut v = [l, m, n];
        v.sort_unstable();
        Ok(Triple {
            l: v[0],
            m: v[1],
            n: v[2],
        })
    }

    pub fn parts(&self) -> (u64, u64, u64) {
        (self.l, self.m, self.n)
    }

    /// Exact rational test of 1/l + 1/m + 1/n < 1.
    pub fn is_hyperbolic(&self) -> bool {
        let (l, m, n) = (self.l as u128, self.m as u128, self.n as u128);
        m * n + l * n + l * m < l * m * n
    }

    /// k = lcm(2l, 2m, 2n).
    pub fn modulus_k(&self) -> u64 {
        lcm3(2 * self.l, 2 * self.m, 2 * self.n)
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.l, self.m, self.n)
    }
}

impl std::str::FromStr for Triple {
    type Err = Error;

    /// Parses "l,m,n".
    fn from_str(s: &str) -> Result<Triple> {
        let parts: Vec<&str> = s.trim().trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected l,m,n, got {s:?}")));
        }
        let nums: Vec<u64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad period {p:?}")))
            })
            .collect::<Result<_>>()?;
        Triple::new(nums[0], nums[1], nums[2])
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flag {
    Yes,
    No,
    Uncertified,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::Yes => "yes",
            Flag::No => "no",
            Flag::Uncertified => "uncertified",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Certification {
    PaperAllowlist,
    SingermanTakeuchiTables,
    None,
}

impl Certification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certification::PaperAllowlist => "paper-allowlist",
            Certification::SingermanTakeuchiTables => "singerman-table,takeuchi-table",
            Certification::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TripleClassification {
    pub is_maximal: Flag,
    pub is_arithmetic: Flag,
    pub certified_by: Certification,
}

impl TripleClassification {
    /// The pipeline only accepts triples certified maximal and
    /// non-arithmetic.
    pub fn accepted(&self) -> bool {
        self.is_maximal == Flag::Yes && self.is_arithmetic == Flag::No
    }
}

fn on_allowlist(t: &Triple) -> bool {
    let (l, m, n) = t.parts();
    if l == 2 && m == 3 && (n > 30 || (n >= 13 && is_prime(n))) {
        return true;
    }
    matches!(
        (l, m, n),
        (2, 3, 21) | (2, 4, 9) | (4, 6, 12) | (7, 11, 13) | (8, 9, 10)
    )
}

/// Allowlist classification: certifies the specific triples known to be
/// maximal and non-arithmetic; everything else is reported uncertified.
pub fn classify_triple(t: &Triple) -> TripleClassification {
    if on_allowlist(t) {
        TripleClassification {
            is_maximal: Flag::Yes,
            is_arithmetic: Flag::No,
            certified_by: Certification::PaperAllowlist,
        }
    } else {
        TripleClassification {
            is_maximal: Flag::Uncertified,
            is_arithmetic: Flag::Uncertified,
            certified_by: Certification::None,
        }
    }
}

/// Full classification data transcribed from the published inclusion and
/// arithmeticity lists. Each file carries its own checksum and is rejected
/// wholesale on mismatch, so a corrupted transcription can never silently
/// flip a certificate.
pub struct ClassificationTables {
    /// Triples that are properly contained in a larger triangle group.
    pub non_maximal: BTreeSet<(u64, u64, u64)>,
    /// The arithmetic triangle-group signatures.
    pub arithmetic: BTreeSet<(u64, u64, u64)>,
}

impl ClassificationTables {
    pub fn load(singerman: &Path, takeuchi: &Path) -> Result<ClassificationTables> {
        Ok(ClassificationTables {
            non_maximal: load_triple_table(singerman)?,
            arithmetic: load_triple_table(takeuchi)?,
        })
    }
}

/// Parses a triple table: comment lines start with '#', entry lines are
/// `l<TAB>m<TAB>n<TAB>citation`, and the final line must be
/// `checksum<TAB><hex sha256 of everything before it>`.
fn load_triple_table(path: &Path) -> Result<BTreeSet<(u64, u64, u64)>> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let Some(checksum_at) = text.rfind("checksum\t") else {
        return Err(Error::Parse(format!("{name}: missing checksum line")));
    };
    let (body, checksum_line) = text.split_at(checksum_at);
    let stated = checksum_line
        .trim_end()
        .strip_prefix("checksum\t")
        .ok_or_else(|| Error::Parse(format!("{name}: malformed checksum line")))?;
    let digest = Sha256::digest(body.as_bytes());
    let actual = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
    if !stated.eq_ignore_ascii_case(&actual) {
        return Err(Error::ChecksumMismatch(name));
    }
    let mut set = BTreeSet::new();
    for line in body.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(Error::Parse(format!(
                "{name}: entry needs l, m, n and a citation: {line:?}"
            )));
        }
        let mut v = [0u64; 3];
        for (slot, field) in v.iter_mut().zip(&fields[..3]) {
            *slot = field
                .parse()
                .map_err(|_| Error::Parse(format!("{name}: bad period {field:?}")))?;
        }
        v.sort_unstable();
        set.insert((v[0], v[1], v[2]));
    }
    Ok(set)
}

/// Classification with the full tables enabled. The allowlist still wins
/// where it applies; otherwise membership in the loaded lists decides.
pub fn classify_triple_with_tables(
    t: &Triple,
    tables: &ClassificationTables,
) -> TripleClassification {
    if on_allowlist(t) {
        return classify_triple(t);
    }
    let key = t.parts();
    let key = (key.0, key.1, key.2);
    TripleClassification {
        is_maximal: if tables.non_maximal.contains(&key) {
            Flag::No
        } else {
            Flag::Yes
        },
        is_arithmetic: if tables.arithmetic.contains(&key) {
            Flag::Yes
        } else {
            Flag::No
        },
        certified_by: Certification::SingermanTakeuchiTables,
    }
}

/// Riemann–Hurwitz genus of the point stabilizer for an index-`index`
/// semiregular action of the (l,m,n) triangle group:
/// g = (index/2)(1 − 1/l − 1/m − 1/n) + 1, computed exactly.
pub fn genus_rh(index: &BigUint, t: &Triple) -> Result<BigUint> {
    let (l, m, n) = t.parts();
    if !t.is_hyperbolic() {
        return Err(Error::InvalidTriple(format!(
            "genus formula needs a hyperbolic triple, got {t}"
        )));
    }
    let (lb, mb, nb) = (BigUint::from(l), BigUint::from(m), BigUint::from(n));
    let lmn = &lb * &mb * &nb;
    let s = &mb * &nb + &lb * &nb + &lb * &mb;
    let num = index * (&lmn - &s);
    let den = BigUint::from(2u32) * &lmn;
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::NonIntegralGenus {
            index: index.to_string(),
            l,
            m,
            n,
        });
    }
    Ok(quot + BigUint::one())
}

pub fn genus_rh_u64(index: u64, t: &Triple) -> Result<u64> {
    let g = genus_rh(&BigUint::from(index), t)?;
    g.to_u64().ok_or_else(|| {
        Error::InvalidInput(format!("genus {g} does not fit in 64 bits"))
    })
}

/// Genus of the cover: |A|(g−1)+1. Needs g ≥ 2 unless the group is trivial.
pub fn cover_genus(g_base: u64, order_a: u64) -> Result<u64> {
    if g_base < 2 && order_a != 1 {
        return Err(Error::InvalidInput(format!(
            "cover genus formula needs base genus ≥ 2, got {g_base}"
        )));
    }
    let g = order_a as u128 * (g_base as u128 - 1) + 1;
    u64::try_from(g).map_err(|_| Error::InvalidInput("cover genus overflows".into()))
}

#[derive(Clone, Copy, Debug)]
pub struct QSearchResult {
    pub q: u64,
    pub k: u64,
    /// Base genus from the Riemann–Hurwitz formula at index q+1.
    pub g: u64,
    /// The rank bound this search was asked to satisfy.
    pub d_required: u64,
}

const FIND_Q_SCAN_LIMIT: u64 = 10_000_000;

/// Smallest prime q ≡ −1 mod k with genus ≥ max(d, 2).
///
/// The genus floor of 2 keeps the point stabilizer a non-elementary surface
/// group even for rank 0 and 1 inputs. Dirichlet guarantees termination; the
/// scan limit is a safety net only.
pub fn find_q(t: &Triple, d: u64) -> Result<QSearchResult> {
    if !t.is_hyperbolic() {
        return Err(Error::InvalidTriple(format!("{t} is not hyperbolic")));
    }
    let k = t.modulus_k();
    let need = d.max(2);
    for mult in 1..=FIND_Q_SCAN_LIMIT {
        let q = mult * k - 1;
        if !is_prime(q) {
            continue;
        }
        let g = genus_rh_u64(q + 1, t)?;
        if g >= need {
            return Ok(QSearchResult {
                q,
                k,
                g,
                d_required: d,
            });
        }
    }
    Err(Error::SearchBoundExceeded(format!(
        "no admissible prime for {t} with genus ≥ {need} within the scan limit"
    )))
}

/// First `count` primes ≡ −1 mod k for the triple, ignoring any genus bound.
pub fn admissible_primes(t: &Triple, count: usize) -> Vec<u64> {
    let k = t.modulus_k();
    let mut out = Vec::with_capacity(count);
    let mut mult = 1;
    while out.len() < count && mult <= FIND_Q_SCAN_LIMIT {
        let q = mult * k - 1;
        if is_prime(q) {
            out.push(q);
        }
        mult += 1;
    }
    out
}

fn is_prime_power(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 0;
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            p = f;
            break;
        }
        f += 1;
    }
    if p == 0 {
        return true; // n itself prime
    }
    let mut rest = n;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    rest == 1
}

/// Smallest prime power ≡ −1 mod k, scanning up to `bound` inclusive. Used
/// only to validate minimality claims stated for prime powers rather than
/// primes.
pub fn smallest_prime_power_residue(k: u64, bound: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidInput("modulus must be at least 2".into()));
    }
    let mut n = k - 1;
    while n <= bound {
        if n >= 2 && is_prime_power(n) {
            return Ok(n);
        }
        n += k;
    }
    Err(Error::BoundTooSmall(format!(
        "no prime power ≡ -1 mod {k} up to {bound}"
    )))
}

/// Eligibility for the A₄-stabilizer variant: 3 < q ≡ ±3 or ±13 mod 40 and
/// l, m, n all coprime to 6.
pub fn remark3_eligible(q: u64, t: &Triple) -> Result<bool> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let (l, m, n) = t.parts();
    let congruence = q > 3 && matches!(q % 40, 3 | 13 | 27 | 37);
    let coprime = [l, m, n].iter().all(|&x| x.gcd(&6) == 1);
    Ok(congruence && coprime)
}

/// The explicit cycle triple in S_p for p = 2l−3: x = (0 … l−1),
/// y = (3 2 1 0 l l+1 … p−1) of length l+1, z = (xy)⁻¹ of length p−3.
#[derive(Clone, Debug)]
pub struct Remark4Triple {
    pub p: u64,
    pub x: Perm,
    pub y: Perm,
    pub z: Perm,
    pub orders: (u64, u64, u64),
    /// Fixed points of x, y, z in the natural degree-p action.
    pub fixed_points: (u64, u64, u64),
    /// True iff each of x, y, z fixes at least two points (holds for p ≥ 9;
    /// this is what makes the stabilizer torsion-free downstream).
    pub all_have_two_fixed_points: bool,
    /// ⟨x, y⟩ = S_p, certified by the stabilizer-chain order p!.
    pub generates_symmetric: bool,
}

pub fn remark4_cycle_triple(p: u64) -> Result<Remark4Triple> {
    if p < 5 || p.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "need p = 2l-3 odd with l ≥ 4, got p = {p}"
        )));
    }
    let l = (p + 3) / 2;
    let pu = p as usize;
    let lu = l as usize;
    let x = Perm::from_cycles(pu, &[(0..lu).collect()])?;
    let mut y_cycle: Vec<usize> = vec![3, 2, 1, 0];
    y_cycle.extend(lu..pu);
    let y = Perm::from_cycles(pu, &[y_cycle])?;
    let z = x.then(&y).inverse();
    let orders = (l, l + 1, p - 3);
    debug_assert_eq!(z.order(), BigUint::from(p - 3));
    let fixed = (
        x.fixed_point_count() as u64,
        y.fixed_point_count() as u64,
        z.fixed_point_count() as u64,
    );
    let group = PermGroup::new(vec![x.clone(), y.clone()])?;
    let mut factorial = BigUint::one();
    for i in 2..=p {
        factorial *= BigUint::from(i);
    }
    let generates_symmetric = group.order() == factorial;
    Ok(Remark4Triple {
        p,
        x,
        y,
        z,
        orders,
        fixed_points: fixed,
        all_have_two_fixed_points: fixed.0 >= 2 && fixed.1 >= 2 && fixed.2 >= 2,
        generates_symmetric,
    })
}
