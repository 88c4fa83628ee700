//! Orchestration: the small-group catalog, the end-to-end realization of a
//! finite group as the automorphism group of a dessin, certificate assembly,
//! canonical JSON I/O, and certificate re-validation.

use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cover::{
    build_cover, check_deck, find_epimorphism, verify_theta, voltages, CoverStructure, Hom,
    VoltageAssignment,
};
use crate::dessin::Dessin;
use crate::error::{Error, Result};
use crate::fpgroup::{
    abelianization, reidemeister_schreier, schreier_transversal, tietze_simplify, Abelianization,
    Ledger, Presentation, SchreierData,
};
use crate::group::PermGroup;
use crate::perm::Perm;
use crate::psl2::{find_generating_triple, GeneratingTriple, Psl2};
use crate::table::GroupTable;
use crate::triangle::{
    classify_triple, cover_genus, find_q, genus_rh, genus_rh_u64, is_prime, remark4_cycle_triple,
    Remark4Triple, Triple, TripleClassification,
};

pub const DEFAULT_GROUP_ORDER_CAP: usize = 500;
pub const DEFAULT_DART_CAP: usize = 1_000_000;
pub const DEFAULT_REMARK4_CONSTRUCT_CAP: usize = 10_000;

// ---------------------------------------------------------------------------
// group loading

/// Group input: a catalog name (`trivial`, `C<n>`, `D<n>`, `S<n>`, `A<n>`,
/// `Q8`) or a path to a JSON file `{"degree": n, "generators": [[...], ...]}`.
pub fn load_group(source: &str, cap: usize) -> Result<(GroupTable, String)> {
    if let Some(gens) = catalog_generators(source)? {
        let table = GroupTable::from_generators(&gens, cap)?;
        return Ok((table, format!("catalog:{source}")));
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Error::Parse(format!(
            "unknown group {source:?}: not a catalog name and no such file"
        )));
    }
    let table = load_group_json(path, cap)?;
    Ok((table, format!("file:{source}")))
}

#[derive(Serialize, Deserialize)]
struct GroupFile {
    degree: usize,
    generators: Vec<Vec<u32>>,
}

pub fn load_group_json(path: &Path, cap: usize) -> Result<GroupTable> {
    let text = std::fs::read_to_string(path)?;
    let file: GroupFile = serde_json::from_str(&text)?;
    if file.generators.is_empty() {
        return Err(Error::NoGenerators);
    }
    let gens: Vec<Perm> = file
        .generators
        .into_iter()
        .map(|images| {
            if images.len() != file.degree {
                return Err(Error::DegreeMismatch(images.len(), file.degree));
            }
            Perm::from_images(images)
        })
        .collect::<Result<_>>()?;
    GroupTable::from_generators(&gens, cap)
}

fn catalog_generators(name: &str) -> Result<Option<Vec<Perm>>> {
    if name == "trivial" {
        return Ok(Some(vec![Perm::identity(1)]));
    }
    if name == "Q8" {
        // right regular representation of the quaternion group on
        // {1, i, j, k, −1, −i, −j, −k}
        return Ok(Some(vec![
            Perm::from_images(vec![1, 4, 7, 2, 5, 0, 3, 6])?,
            Perm::from_images(vec![2, 3, 4, 5, 6, 7, 0, 1])?,
        ]));
    }
    let (kind, number) = name.split_at(1);
    let Ok(n) = number.parse::<usize>() else {
        return Ok(None);
    };
    let gens = match kind {
        "C" => {
            if n == 0 {
                return Err(Error::InvalidInput("C0 is not a group".into()));
            }
            if n == 1 {
                vec![Perm::identity(1)]
            } else {
                vec![Perm::from_cycles(n, &[(0..n).collect()])?]
            }
        }
        "D" => {
            // dihedral group of order 2n on the vertices of an n-gon
            if n < 3 {
                return Err(Error::InvalidInput(format!(
                    "D{n} is not in the catalog; give it as a JSON file"
                )));
            }
            let rotation = Perm::from_cycles(n, &[(0..n).collect()])?;
            let reflection =
                Perm::from_images((0..n).map(|i| ((n - i) % n) as u32).collect())?;
            vec![rotation, reflection]
        }
        "S" => {
            if n == 0 {
                return Err(Error::InvalidInput("S0 is not in the catalog".into()));
            }
            if n == 1 {
                vec![Perm::identity(1)]
            } else {
                vec![
                    Perm::from_cycles(n, &[vec![0, 1]])?,
                    Perm::from_cycles(n, &[(0..n).collect()])?,
                ]
            }
        }
        "A" => {
            if n < 3 {
                return Err(Error::InvalidInput(format!(
                    "A{n} is trivial; use `trivial` instead"
                )));
            }
            let three_cycle = Perm::from_cycles(n, &[vec![0, 1, 2]])?;
            if n == 3 {
                vec![three_cycle]
            } else if n % 2 == 1 {
                vec![three_cycle, Perm::from_cycles(n, &[(0..n).collect()])?]
            } else {
                vec![three_cycle, Perm::from_cycles(n, &[(1..n).collect()])?]
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(gens))
}

/// All catalog groups of order at most `max_order`, with their names.
pub fn catalog_groups_up_to(max_order: usize) -> Vec<(String, GroupTable)> {
    let mut names = vec!["trivial".to_string(), "Q8".to_string()];
    for n in 1..=max_order {
        names.push(format!("C{n}"));
    }
    for n in 3..=max_order / 2 {
        names.push(format!("D{n}"));
    }
    for n in 1..=8 {
        names.push(format!("S{n}"));
    }
    for n in 3..=8 {
        names.push(format!("A{n}"));
    }
    let mut out = Vec::new();
    for name in names {
        let Ok(Some(gens)) = catalog_generators(&name) else {
            continue;
        };
        let Ok(table) = GroupTable::from_generators(&gens, max_order) else {
            continue;
        };
        if table.order() <= max_order {
            out.push((name, table));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// certificate schema

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct GroupSection {
    pub source: String,
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
    pub order: u64,
    pub rank: u64,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct TripleSection {
    pub l: u64,
    pub m: u64,
    pub n: u64,
    pub maximal: String,
    pub arithmetic: String,
    pub certified_by: String,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct QSection {
    pub k: u64,
    pub q: u64,
    pub base_genus: u64,
    pub rank_bound: u64,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct Psl2Section {
    pub x: [u64; 4],
    pub y: [u64; 4],
    pub z: [u64; 4],
    pub orders: [u64; 3],
    pub group_order: u64,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct SchreierSection {
    pub basepoint: usize,
    pub index: usize,
    pub max_transversal_length: usize,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct AbelianizationSection {
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct PresentationSection {
    pub rs_generators: usize,
    pub rs_relators: usize,
    pub deficiency: i64,
    pub simplified_generators: usize,
    pub simplified_relators: usize,
    pub stuck: bool,
    pub abelianization_pre: AbelianizationSection,
    pub abelianization_post: AbelianizationSection,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ThetaSection {
    pub images: Vec<usize>,
    pub attempts: u64,
    pub surjective: bool,
    pub verified_on_rs_relators: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct CoverSection {
    pub darts: usize,
    pub genus_formula: u64,
    pub genus_euler: u64,
    pub base_genus_euler: u64,
    pub passport: [Vec<usize>; 3],
    pub monodromy_orders: [u64; 3],
    pub monodromy_semiregular: [bool; 3],
    pub monodromy_transitive: bool,
    pub monodromy_regular: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct AutSection {
    pub order: u64,
    pub equals_group_order: bool,
    pub deck_commutes: bool,
    pub deck_homomorphism: bool,
    pub deck_injective: bool,
    pub deck_fixed_point_free: bool,
    pub deck_regular_on_fibers: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct SeedsSection {
    pub triple_search: u64,
    pub theta_search: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AttemptRecord {
    pub stage: String,
    pub l: u64,
    pub m: u64,
    pub n: u64,
    pub q: u64,
    pub seed: u64,
    pub outcome: String,
}

/// The machine-checkable record of one realization run. Everything needed to
/// re-validate is stored; re-validation replays the deterministic parts and
/// never re-runs a search.
#[derive(Serialize, Deserialize, Clone)]
pub struct Certificate {
    pub format: String,
    pub tool_version: String,
    pub verdict: String,
    pub group: GroupSection,
    pub triple: TripleSection,
    pub q_search: QSection,
    pub psl2: Psl2Section,
    pub schreier: SchreierSection,
    pub presentation: PresentationSection,
    pub theta: ThetaSection,
    pub cover: CoverSection,
    pub aut: AutSection,
    pub seeds: SeedsSection,
    pub attempts: Vec<AttemptRecord>,
    pub checks: Vec<CheckRecord>,
}

/// The dessin file payload; arrays are 0-based one-line permutation images.
#[derive(Serialize, Deserialize, Clone)]
pub struct DessinFile {
    pub darts: usize,
    pub sigma0: Vec<u32>,
    pub sigma1: Vec<u32>,
    #[serde(rename = "type")]
    pub type_orders: [u64; 3],
    pub genus: u64,
    pub passport: [Vec<usize>; 3],
}

impl DessinFile {
    pub fn from_dessin(dessin: &Dessin, type_orders: [u64; 3], genus: u64) -> DessinFile {
        DessinFile {
            darts: dessin.dart_count(),
            sigma0: dessin.sigma0().images().to_vec(),
            sigma1: dessin.sigma1().images().to_vec(),
            type_orders,
            genus,
            passport: dessin.passport(),
        }
    }

    pub fn to_dessin(&self) -> Result<Dessin> {
        Dessin::from_pair(
            Perm::from_images(self.sigma0.clone())?,
            Perm::from_images(self.sigma1.clone())?,
        )
    }
}

/// Canonical JSON: sorted keys (serde_json maps are BTreeMaps), two-space
/// indentation, trailing newline. Byte-identical for equal inputs and seeds.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
}

// ---------------------------------------------------------------------------
// realization

#[derive(Clone, Debug)]
pub struct RealizeOptions {
    pub triple: Option<Triple>,
    pub q: Option<u64>,
    pub seed: u64,
    pub max_group_order: usize,
    pub max_darts: usize,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions {
            triple: None,
            q: None,
            seed: 0,
            max_group_order: DEFAULT_GROUP_ORDER_CAP,
            max_darts: DEFAULT_DART_CAP,
        }
    }
}

/// Everything deterministic computed from (triple, q, generating matrices):
/// the base action, the stabilizer presentation, and its simplification.
struct BasePart {
    triple: Triple,
    q: u64,
    base_genus: u64,
    base_genus_euler: u64,
    trip: GeneratingTriple,
    x_perm: Perm,
    y_perm: Perm,
    z_perm: Perm,
    sd: SchreierData,
    rs: Presentation,
    ab_pre: Abelianization,
    spres: Presentation,
    ledger: Ledger,
    stuck: bool,
    ab_post: Abelianization,
}

fn build_base(triple: Triple, q: u64, trip: GeneratingTriple) -> Result<BasePart> {
    let (l, m, n) = triple.parts();
    let ctx = Psl2::new(q)?;
    let x_perm = ctx.perm(trip.x);
    let y_perm = ctx.perm(trip.y);
    let z_perm = ctx.perm(trip.z);
    let base_genus = genus_rh_u64(q + 1, &triple)?;
    let base_genus_euler =
        Dessin::from_pair(x_perm.clone(), y_perm.clone()).map(|d| d.euler_genus())?;
    let pres = Presentation::triangle(l, m, n);
    let sd = schreier_transversal(&[x_perm.clone(), y_perm.clone()], ctx.basepoint())?;
    let rs = reidemeister_schreier(&pres, &sd)?;
    let ab_pre = abelianization(&rs);
    let out = tietze_simplify(&rs);
    let ab_post = abelianization(&out.presentation);
    Ok(BasePart {
        triple,
        q,
        base_genus,
        base_genus_euler,
        trip,
        x_perm,
        y_perm,
        z_perm,
        sd,
        rs,
        ab_pre,
        spres: out.presentation,
        ledger: out.ledger,
        stuck: out.stuck,
        ab_post,
    })
}

struct CoverPart {
    va: VoltageAssignment,
    cover: CoverStructure,
    dessin: Dessin,
    theta_verified: bool,
    aut_order: u64,
}

fn build_cover_part(a: &GroupTable, base: &BasePart, theta: &Hom) -> Result<CoverPart> {
    let theta_verified = verify_theta(theta, &base.rs, &base.ledger, a);
    let va = voltages(&base.sd, &base.ledger, theta, a);
    let cover = build_cover(&base.x_perm, &base.y_perm, &va, a);
    let dessin = Dessin::from_pair(cover.x_hat.clone(), cover.y_hat.clone())?;
    let aut = dessin.automorphism_group();
    let aut_order = aut
        .order()
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("automorphism group order overflows".into()))?;
    Ok(CoverPart {
        va,
        cover,
        dessin,
        theta_verified,
        aut_order,
    })
}

struct CheckList(Vec<CheckRecord>);

impl CheckList {
    fn new() -> Self {
        CheckList(Vec::new())
    }

    fn add(&mut self, name: &str, pass: bool) {
        self.0.push(CheckRecord {
            name: name.to_string(),
            pass,
        });
    }

    fn all_pass(&self) -> bool {
        self.0.iter().all(|c| c.pass)
    }
}

/// Runs every certificate check on a fully built chain. Shared between
/// `realize` (first construction) and `verify_certificate` (replay).
#[allow(clippy::too_many_arguments)]
fn run_chain_checks(
    a: &GroupTable,
    rank: u64,
    classification: &TripleClassification,
    base: &BasePart,
    theta: &Hom,
    part: &CoverPart,
    pres: &Presentation,
    checks: &mut CheckList,
) {
    let (l, m, n) = base.triple.parts();
    let k = base.triple.modulus_k();
    let q = base.q;
    let index = q as usize + 1;
    let order_a = a.order();

    checks.add("triple-hyperbolic", base.triple.is_hyperbolic());
    checks.add("triple-certified", classification.accepted());
    checks.add(
        "q-admissible",
        is_prime(q) && (q + 1).is_multiple_of(k) && base.base_genus >= rank.max(2),
    );
    checks.add(
        "genus-formula",
        genus_rh_u64(q + 1, &base.triple).is_ok_and(|g| g == base.base_genus),
    );
    checks.add("psl2-triple", base.trip.verify().unwrap_or(false));
    checks.add(
        "base-semiregular",
        base.x_perm.is_semiregular()
            && base.y_perm.is_semiregular()
            && base.z_perm.is_semiregular(),
    );
    checks.add("base-genus-euler", base.base_genus_euler == base.base_genus);

    let two_g = 2 * base.base_genus as usize;
    let expected_relators = index / l as usize + index / m as usize + index / n as usize;
    checks.add(
        "rs-counts",
        base.rs.gen_count() == index * 2 - (index - 1)
            && base.rs.relators().len() == expected_relators
            && base.rs.deficiency() == two_g as i64 - 1,
    );
    checks.add(
        "abelianization-pre",
        base.ab_pre.free_rank == two_g && base.ab_pre.torsion.is_empty(),
    );
    checks.add(
        "tietze-target",
        !base.stuck
            && base.spres.gen_count() == two_g
            && base.spres.relators().len() == 1,
    );
    checks.add(
        "abelianization-post",
        base.ab_post.free_rank == two_g && base.ab_post.torsion.is_empty(),
    );

    checks.add("theta-shape", theta.images.len() == base.spres.gen_count());
    checks.add("theta-relators", theta.respects(&base.spres, a));
    checks.add("theta-surjective", theta.surjective(a));
    checks.add("theta-verified-on-rs", part.theta_verified);
    checks.add(
        "voltage-products",
        part.va.relator_cycle_products_trivial(pres, &base.sd, a),
    );

    let dart_count = index * order_a;
    checks.add("cover-darts", part.cover.dart_count == dart_count);
    let monodromy = part.dessin.monodromy_group();
    checks.add("cover-transitive", monodromy.is_transitive());
    checks.add("cover-type", part.dessin.verify_type(l, m, n));
    let cover_g = cover_genus(base.base_genus, order_a as u64).unwrap_or(u64::MAX);
    checks.add("cover-genus", part.dessin.euler_genus() == cover_g);
    checks.add(
        "monodromy-not-regular",
        monodromy.is_regular().map(|r| !r).unwrap_or(false),
    );

    let deck = check_deck(&part.cover, a);
    checks.add(
        "deck",
        deck.commutes
            && deck.homomorphism
            && deck.injective
            && deck.fixed_point_free
            && deck.regular_on_fibers,
    );
    checks.add("aut-order", part.aut_order == order_a as u64);
}

fn ab_section(ab: &Abelianization) -> AbelianizationSection {
    AbelianizationSection {
        free_rank: ab.free_rank,
        torsion: ab.torsion.iter().map(|t| t.to_string()).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble_certificate(
    source: &str,
    a: &GroupTable,
    rank: u64,
    classification: &TripleClassification,
    base: &BasePart,
    theta: &Hom,
    theta_attempts: u64,
    part: &CoverPart,
    seeds: SeedsSection,
    attempts: Vec<AttemptRecord>,
    checks: CheckList,
) -> Certificate {
    let (l, m, n) = base.triple.parts();
    let deck = check_deck(&part.cover, a);
    let dessin = &part.dessin;
    let (o0, o1, o2) = dessin.type_orders();
    Certificate {
        format: "dessin-realization-certificate/1".to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        verdict: if checks.all_pass() { "pass" } else { "fail" }.to_string(),
        group: GroupSection {
            source: source.to_string(),
            degree: a.degree(),
            generators: a.generators().iter().map(|g| g.images().to_vec()).collect(),
            order: a.order() as u64,
            rank,
        },
        triple: TripleSection {
            l,
            m,
            n,
            maximal: classification.is_maximal.as_str().to_string(),
            arithmetic: classification.is_arithmetic.as_str().to_string(),
            certified_by: classification.certified_by.as_str().to_string(),
        },
        q_search: QSection {
            k: base.triple.modulus_k(),
            q: base.q,
            base_genus: base.base_genus,
            rank_bound: rank.max(2),
        },
        psl2: Psl2Section {
            x: base.trip.x.entries(),
            y: base.trip.y.entries(),
            z: base.trip.z.entries(),
            orders: [l, m, n],
            group_order: crate::psl2::group_order(base.q) as u64,
        },
        schreier: SchreierSection {
            basepoint: base.sd.basepoint(),
            index: base.sd.degree(),
            max_transversal_length: base.sd.max_transversal_length(),
        },
        presentation: PresentationSection {
            rs_generators: base.rs.gen_count(),
            rs_relators: base.rs.relators().len(),
            deficiency: base.rs.deficiency(),
            simplified_generators: base.spres.gen_count(),
            simplified_relators: base.spres.relators().len(),
            stuck: base.stuck,
            abelianization_pre: ab_section(&base.ab_pre),
            abelianization_post: ab_section(&base.ab_post),
        },
        theta: ThetaSection {
            images: theta.images.clone(),
            attempts: theta_attempts,
            surjective: theta.surjective(a),
            verified_on_rs_relators: part.theta_verified,
        },
        cover: CoverSection {
            darts: part.cover.dart_count,
            genus_formula: cover_genus(base.base_genus, a.order() as u64).unwrap_or(u64::MAX),
            genus_euler: dessin.euler_genus(),
            base_genus_euler: base.base_genus_euler,
            passport: dessin.passport(),
            monodromy_orders: [
                o0.to_u64().unwrap_or(u64::MAX),
                o1.to_u64().unwrap_or(u64::MAX),
                o2.to_u64().unwrap_or(u64::MAX),
            ],
            monodromy_semiregular: [
                dessin.sigma0().is_semiregular(),
                dessin.sigma1().is_semiregular(),
                dessin.sigma2().is_semiregular(),
            ],
            monodromy_transitive: dessin.monodromy_group().is_transitive(),
            monodromy_regular: dessin.monodromy_group().is_regular().unwrap_or(true),
        },
        aut: AutSection {
            order: part.aut_order,
            equals_group_order: part.aut_order == a.order() as u64,
            deck_commutes: deck.commutes,
            deck_homomorphism: deck.homomorphism,
            deck_injective: deck.injective,
            deck_fixed_point_free: deck.fixed_point_free,
            deck_regular_on_fibers: deck.regular_on_fibers,
        },
        seeds,
        attempts,
        checks: checks.0,
    }
}

/// Candidate triples for auto-selection, in the fixed default order.
fn candidate_triples() -> Vec<Triple> {
    let mut out = vec![
        Triple::new(4, 6, 12).unwrap(),
        Triple::new(2, 4, 9).unwrap(),
        Triple::new(2, 3, 21).unwrap(),
        Triple::new(2, 3, 13).unwrap(),
    ];
    let mut n = 14;
    while n <= 120 {
        if is_prime(n) {
            out.push(Triple::new(2, 3, n).unwrap());
        }
        n += 1;
    }
    out
}

/// Builds a dessin with Aut ≅ A and its certificate.
///
/// Default triple selection: among the certified candidates, the one whose
/// admissible prime minimizes (q+1)·|A|, subject to genus ≥ max(rank, 2) and
/// the dart cap. Retry policy on a search failure: 3 seeds, then the next
/// admissible prime (up to 3), then the next triple; every attempt is logged
/// in the certificate.
pub fn realize(
    a: &GroupTable,
    source: &str,
    opts: &RealizeOptions,
) -> Result<(Dessin, Certificate)> {
    if a.order() > opts.max_group_order {
        return Err(Error::CapExceeded(format!(
            "group order {} exceeds cap {}",
            a.order(),
            opts.max_group_order
        )));
    }
    let (rank, _) = a.min_generating_size()?;
    let rank = rank as u64;

    // plan: list of (triple, q) pairs to try in order
    let mut plan: Vec<(Triple, u64)> = Vec::new();
    if let Some(t) = opts.triple {
        if !t.is_hyperbolic() {
            return Err(Error::InvalidTriple(format!("{t} is not hyperbolic")));
        }
        if !classify_triple(&t).accepted() {
            return Err(Error::InvalidTriple(format!(
                "{t} is not certified maximal and non-arithmetic"
            )));
        }
        let qs: Vec<u64> = match opts.q {
            Some(q) => {
                let k = t.modulus_k();
                if !is_prime(q) || (q + 1) % k != 0 {
                    return Err(Error::InvalidInput(format!(
                        "q = {q} is not an admissible prime for {t} (k = {k})"
                    )));
                }
                let g = genus_rh_u64(q + 1, &t)?;
                if g < rank.max(2) {
                    return Err(Error::InvalidInput(format!(
                        "q = {q} gives genus {g} < required {}",
                        rank.max(2)
                    )));
                }
                vec![q]
            }
            None => next_admissible_qs(&t, rank, 3)?,
        };
        for q in qs {
            plan.push((t, q));
        }
    } else {
        // auto-select: minimize q+1 (hence darts) over the candidate list
        let mut best: Option<(u64, Triple)> = None;
        for t in candidate_triples() {
            let Ok(r) = find_q(&t, rank) else { continue };
            let darts = (r.q as usize + 1) * a.order();
            if darts > opts.max_darts {
                continue;
            }
            if best.as_ref().is_none_or(|(bq, _)| r.q < *bq) {
                best = Some((r.q, t));
            }
        }
        let Some((_, chosen)) = best else {
            return Err(Error::DegreeCapExceeded(format!(
                "no certified triple fits under the dart cap {}",
                opts.max_darts
            )));
        };
        for q in next_admissible_qs(&chosen, rank, 3)? {
            plan.push((chosen, q));
        }
        // fall back to the remaining candidates in order
        for t in candidate_triples() {
            if t == chosen {
                continue;
            }
            if let Ok(qs) = next_admissible_qs(&t, rank, 2) {
                for q in qs {
                    plan.push((t, q));
                }
            }
        }
    }

    let mut attempts: Vec<AttemptRecord> = Vec::new();
    for (t, q) in plan {
        let (l, m, n) = t.parts();
        if (q as usize + 1) * a.order() > opts.max_darts {
            continue;
        }
        for seed_offset in 0..3u64 {
            let seed = opts.seed + seed_offset;
            let record = |stage: &str, outcome: &str| AttemptRecord {
                stage: stage.to_string(),
                l,
                m,
                n,
                q,
                seed,
                outcome: outcome.to_string(),
            };
            let trip = match find_generating_triple(q, l, m, n, seed) {
                Ok(trip) => trip,
                Err(e) => {
                    attempts.push(record("triple-search", &e.to_string()));
                    continue;
                }
            };
            let base = build_base(t, q, trip)?;
            if base.stuck {
                attempts.push(record("tietze", "stuck"));
                continue;
            }
            let (theta, theta_attempts) = match find_epimorphism(&base.spres, a, seed) {
                Ok(pair) => pair,
                Err(e) => {
                    attempts.push(record("theta-search", &e.to_string()));
                    continue;
                }
            };
            attempts.push(record("full-chain", "ok"));
            let part = build_cover_part(a, &base, &theta)?;
            let classification = classify_triple(&t);
            let mut checks = CheckList::new();
            let pres = Presentation::triangle(l, m, n);
            run_chain_checks(a, rank, &classification, &base, &theta, &part, &pres, &mut checks);
            if !checks.all_pass() {
                let failed: Vec<&str> = checks
                    .0
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Error::Verification(format!(
                    "internal consistency check failed: {}",
                    failed.join(", ")
                )));
            }
            let cert = assemble_certificate(
                source,
                a,
                rank,
                &classification,
                &base,
                &theta,
                theta_attempts,
                &part,
                SeedsSection {
                    triple_search: seed,
                    theta_search: seed,
                },
                attempts,
                checks,
            );
            return Ok((part.dessin, cert));
        }
    }
    Err(Error::SearchBudgetExhausted(
        "all retry attempts exhausted".into(),
    ))
}

/// The first `count` admissible primes meeting the genus bound for rank `d`.
fn next_admissible_qs(t: &Triple, d: u64, count: usize) -> Result<Vec<u64>> {
    let k = t.modulus_k();
    let need = d.max(2);
    let mut out = Vec::new();
    let mut mult = 1u64;
    while out.len() < count && mult < 1_000_000 {
        let q = mult * k - 1;
        if is_prime(q) && genus_rh_u64(q + 1, t).is_ok_and(|g| g >= need) {
            out.push(q);
        }
        mult += 1;
    }
    if out.is_empty() {
        return Err(Error::SearchBoundExceeded(format!(
            "no admissible q for {t}"
        )));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// emission and re-validation

/// Writes `certificate.json` and `dessin.json` into `dir` in canonical form.
pub fn emit(cert: &Certificate, dessin: &Dessin, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let file = DessinFile::from_dessin(
        dessin,
        [cert.triple.l, cert.triple.m, cert.triple.n],
        cert.cover.genus_euler,
    );
    let cert_path = dir.join("certificate.json");
    let dessin_path = dir.join("dessin.json");
    std::fs::write(&cert_path, canonical_json(cert)?)?;
    std::fs::write(&dessin_path, canonical_json(&file)?)?;
    Ok((cert_path, dessin_path))
}

pub struct VerifyReport {
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

/// Re-validates a certificate against its dessin file.
///
/// Replays the deterministic chain from the stored data — group generators,
/// triple, q, the PSL₂ matrices, and the θ images — byte-compares the rebuilt
/// monodromy with the dessin file, re-runs every chain check, and re-checks
/// each stored claim. No search is re-run. Any replay error (stored data so
/// inconsistent that the chain cannot even be rebuilt) is itself a
/// verification failure.
pub fn verify_certificate(cert: &Certificate, file: &DessinFile) -> Result<VerifyReport> {
    match verify_certificate_inner(cert, file) {
        Ok(report) => Ok(report),
        Err(e) => Ok(VerifyReport {
            checks: vec![CheckRecord {
                name: format!("replay-from-stored-data ({e})"),
                pass: false,
            }],
            pass: false,
        }),
    }
}

fn verify_certificate_inner(cert: &Certificate, file: &DessinFile) -> Result<VerifyReport> {
    let mut checks = CheckList::new();

    let gens: Vec<Perm> = cert
        .group
        .generators
        .iter()
        .map(|images| Perm::from_images(images.clone()))
        .collect::<Result<_>>()?;
    let a = GroupTable::from_generators(&gens, cert.group.order.max(1) as usize * 2 + 8)?;
    checks.add("stored-group-order", a.order() as u64 == cert.group.order);
    let (rank, _) = a.min_generating_size()?;
    checks.add("stored-rank", rank as u64 == cert.group.rank);

    let t = Triple::new(cert.triple.l, cert.triple.m, cert.triple.n)?;
    let classification = classify_triple(&t);
    checks.add(
        "stored-classification",
        classification.is_maximal.as_str() == cert.triple.maximal
            && classification.is_arithmetic.as_str() == cert.triple.arithmetic
            && classification.certified_by.as_str() == cert.triple.certified_by,
    );
    checks.add("stored-k", t.modulus_k() == cert.q_search.k);

    let q = cert.q_search.q;
    let ctx = Psl2::new(q)?;
    let norm = |e: [u64; 4]| ctx.normalize(e[0], e[1], e[2], e[3]);
    let x = norm(cert.psl2.x)?;
    let y = norm(cert.psl2.y)?;
    let z = norm(cert.psl2.z)?;
    checks.add(
        "stored-matrices-normalized",
        [x.entries(), y.entries(), z.entries()] == [cert.psl2.x, cert.psl2.y, cert.psl2.z],
    );
    let trip = GeneratingTriple {
        q,
        x,
        y,
        z,
        orders: (cert.triple.l, cert.triple.m, cert.triple.n),
    };
    checks.add(
        "stored-psl2-group-order",
        crate::psl2::group_order(q) as u64 == cert.psl2.group_order,
    );

    let base = build_base(t, q, trip)?;
    checks.add("stored-base-genus", base.base_genus == cert.q_search.base_genus);
    checks.add(
        "stored-presentation-counts",
        base.rs.gen_count() == cert.presentation.rs_generators
            && base.rs.relators().len() == cert.presentation.rs_relators
            && base.rs.deficiency() == cert.presentation.deficiency
            && base.spres.gen_count() == cert.presentation.simplified_generators
            && base.spres.relators().len() == cert.presentation.simplified_relators,
    );
    checks.add(
        "stored-abelianizations",
        ab_section(&base.ab_pre).free_rank == cert.presentation.abelianization_pre.free_rank
            && ab_section(&base.ab_post).free_rank
                == cert.presentation.abelianization_post.free_rank,
    );

    let theta = Hom {
        images: cert.theta.images.clone(),
    };
    if theta.images.iter().any(|&i| i >= a.order()) {
        return Err(Error::Verification("theta image out of range".into()));
    }
    let part = build_cover_part(&a, &base, &theta)?;

    // the dessin file must be byte-for-byte the rebuilt cover
    checks.add(
        "dessin-file-matches-cover",
        file.sigma0 == part.dessin.sigma0().images()
            && file.sigma1 == part.dessin.sigma1().images()
            && file.darts == part.cover.dart_count,
    );
    checks.add(
        "dessin-file-claims",
        file.genus == part.dessin.euler_genus()
            && file.passport == part.dessin.passport()
            && file.type_orders == [cert.triple.l, cert.triple.m, cert.triple.n],
    );
    checks.add(
        "stored-cover-claims",
        cert.cover.darts == part.cover.dart_count
            && cert.cover.genus_euler == part.dessin.euler_genus()
            && cert.cover.genus_formula
                == cover_genus(base.base_genus, a.order() as u64).unwrap_or(u64::MAX)
            && cert.cover.base_genus_euler == base.base_genus_euler
            && cert.cover.passport == part.dessin.passport(),
    );
    checks.add("stored-aut-order", cert.aut.order == part.aut_order);
    checks.add("stored-verdict-pass", cert.verdict == "pass");

    let pres = Presentation::triangle(cert.triple.l, cert.triple.m, cert.triple.n);
    run_chain_checks(
        &a,
        cert.group.rank,
        &classification,
        &base,
        &theta,
        &part,
        &pres,
        &mut checks,
    );

    let pass = checks.all_pass();
    Ok(VerifyReport {
        checks: checks.0,
        pass,
    })
}

pub fn verify_files(cert_path: &Path, dessin_path: &Path) -> Result<VerifyReport> {
    let cert: Certificate = serde_json::from_str(&std::fs::read_to_string(cert_path)?)?;
    let file: DessinFile = serde_json::from_str(&std::fs::read_to_string(dessin_path)?)?;
    verify_certificate(&cert, &file)
}

// ---------------------------------------------------------------------------
// alternative coset-representation reports

#[derive(Clone, Debug)]
pub struct Remark3Report {
    pub triple: Triple,
    pub classification: TripleClassification,
    pub q: u64,
    /// Degree of the A₄-coset representation, q(q²−1)/24.
    pub degree: BigUint,
    pub genus: BigUint,
    /// genus > q(q²−1)/120.
    pub genus_exceeds_bound: bool,
    /// True iff this is the lexicographically first certified triple with all
    /// periods coprime to 6.
    pub smallest_eligible_triple: bool,
}

/// Plans the faster-growth variant where the point stabilizer is a maximal
/// A₄: finds the smallest prime q ≤ `q_bound` with 3 < q ≡ ±3, ±13 mod 40
/// such that l, m, n all divide element orders of PSL₂(F_q) and the genus
/// comes out integral. Construction is not attempted (the degree is cubic in
/// q); this is a report.
pub fn remark3_plan(t: &Triple, q_bound: u64) -> Result<Remark3Report> {
    let (l, m, n) = t.parts();
    if [l, m, n].iter().any(|&x| num_integer::gcd(x, 6) != 1) {
        return Err(Error::InvalidInput(format!(
            "{t} has a period not coprime to 6"
        )));
    }
    if !t.is_hyperbolic() {
        return Err(Error::InvalidTriple(format!("{t} is not hyperbolic")));
    }
    // x must divide an element order of PSL₂(F_q): q, (q−1)/2 or (q+1)/2
    #[allow(clippy::manual_div_ceil)]
    let divides_some_order = |q: u64, x: u64| {
        q.is_multiple_of(x)
            || ((q - 1) / 2).is_multiple_of(x)
            || ((q + 1) / 2).is_multiple_of(x)
    };
    let mut found: Option<(u64, BigUint, BigUint)> = None;
    let mut q = 5;
    while q <= q_bound {
        if is_prime(q)
            && matches!(q % 40, 3 | 13 | 27 | 37)
            && [l, m, n].iter().all(|&x| divides_some_order(q, x))
        {
            let degree = BigUint::from(q) * BigUint::from(q * q - 1) / BigUint::from(24u32);
            match genus_rh(&degree, t) {
                Ok(genus) => {
                    found = Some((q, degree, genus));
                    break;
                }
                Err(Error::NonIntegralGenus { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        q += 2;
    }
    let Some((q, degree, genus)) = found else {
        return Err(Error::SearchExhausted(format!(
            "no eligible q ≤ {q_bound} for {t}"
        )));
    };
    // bound: genus > q(q²−1)/120
    let bound = BigUint::from(q) * BigUint::from(q * q - 1) / BigUint::from(120u32);
    let genus_exceeds_bound = genus > bound;
    let smallest_eligible_triple = smallest_coprime6_certified() == Some(*t);
    Ok(Remark3Report {
        triple: *t,
        classification: classify_triple(t),
        q,
        degree,
        genus,
        genus_exceeds_bound,
        smallest_eligible_triple,
    })
}

/// Lexicographically first certified maximal non-arithmetic triple with all
/// periods coprime to 6.
fn smallest_coprime6_certified() -> Option<Triple> {
    for l in 2..=50u64 {
        for m in l..=50 {
            for n in m..=50 {
                let Ok(t) = Triple::new(l, m, n) else { continue };
                if !t.is_hyperbolic() {
                    continue;
                }
                if [l, m, n].iter().any(|&x| num_integer::gcd(x, 6) != 1) {
                    continue;
                }
                if classify_triple(&t).accepted() {
                    return Some(t);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct Remark4Construction {
    /// Coset action of S_p on the right cosets of AGL₁(p).
    pub degree: usize,
    pub agl_order: u64,
    pub index_verified: bool,
    /// Non-identity affine maps fix at most one point.
    pub frobenius_verified: bool,
    pub transitive: bool,
    pub product_is_identity: bool,
    pub semiregular: (bool, bool, bool),
    pub x_cosets: Perm,
    pub y_cosets: Perm,
    pub z_cosets: Perm,
}

#[derive(Clone, Debug)]
pub struct Remark4Report {
    pub p: u64,
    pub cycle_triple: Remark4Triple,
    pub triple: Triple,
    /// Degree of the AGL₁(p)-coset representation: (p−2)!.
    pub degree: BigUint,
    /// Riemann–Hurwitz genus at that degree, when integral.
    pub genus: Option<BigUint>,
    /// genus > (p−2)!/84, when the genus is defined.
    pub genus_exceeds_bound: Option<bool>,
    pub construction: Option<Remark4Construction>,
}

/// The symmetric-group variant: S_p acting on the (p−2)! cosets of the
/// affine group AGL₁(p). Reports the explicit cycle triple for p = 2l−3 and
/// the genus formula; for small p the coset action is built explicitly and
/// the stabilizer-index and fixed-point conditions are verified.
pub fn remark4_plan(p: u64, construct_cap: usize, force_construct: bool) -> Result<Remark4Report> {
    if !is_prime(p) || p < 5 {
        return Err(Error::InvalidInput(format!(
            "p must be a prime ≥ 5, got {p}"
        )));
    }
    let cycle_triple = remark4_cycle_triple(p)?;
    let (l, m, n) = cycle_triple.orders;
    let triple = Triple::new(l, m, n)?;
    let mut degree = BigUint::one();
    for i in 2..=(p - 2) {
        degree *= BigUint::from(i);
    }
    let genus = match genus_rh(&degree, &triple) {
        Ok(g) => Some(g),
        Err(Error::NonIntegralGenus { .. }) => None,
        Err(e) => return Err(e),
    };
    let genus_exceeds_bound = genus
        .as_ref()
        .map(|g| g * BigUint::from(84u32) > degree.clone());
    let fits = degree.to_usize().map(|d| d <= construct_cap).unwrap_or(false);
    if force_construct && !fits {
        return Err(Error::DegreeCapExceeded(format!(
            "coset construction needs degree (p-2)! = {degree} > cap {construct_cap}"
        )));
    }
    let construction = if fits {
        Some(build_remark4_construction(p, &cycle_triple)?)
    } else {
        None
    };
    Ok(Remark4Report {
        p,
        cycle_triple,
        triple,
        degree,
        genus,
        genus_exceeds_bound,
        construction,
    })
}

/// Explicit transversal construction of the S_p action on AGL₁(p)-cosets.
fn build_remark4_construction(p: u64, ct: &Remark4Triple) -> Result<Remark4Construction> {
    if p > 8 {
        return Err(Error::DegreeCapExceeded(format!(
            "coset construction enumerates S_{p}; only p ≤ 7 is materialized"
        )));
    }
    let pu = p as usize;
    // AGL₁(p) = { t ↦ a·t + b : a ∈ F_p^*, b ∈ F_p } as permutations of F_p
    let mut agl = Vec::new();
    for a in 1..p {
        for b in 0..p {
            let images: Vec<u32> = (0..p).map(|t| ((a * t + b) % p) as u32).collect();
            agl.push(Perm::from_images(images)?);
        }
    }
    let frobenius_verified = agl
        .iter()
        .all(|h| h.is_identity() || h.fixed_point_count() <= 1);

    // canonical form of the right coset Hg: the least element h·g
    let coset_key = |g: &Perm| -> Vec<u32> {
        agl.iter()
            .map(|h| h.then(g).into_images())
            .min()
            .expect("AGL is nonempty")
    };
    let all = Perm::all(pu)?;
    let mut index_of = std::collections::HashMap::new();
    let mut reps: Vec<Perm> = Vec::new();
    for g in &all {
        if let std::collections::hash_map::Entry::Vacant(slot) = index_of.entry(coset_key(g)) {
            slot.insert(reps.len());
            reps.push(g.clone());
        }
    }
    let degree = reps.len();
    let mut factorial = 1u64;
    for i in 2..=(p - 2) {
        factorial *= i;
    }
    let index_verified = degree as u64 == factorial;

    let coset_perm = |s: &Perm| -> Result<Perm> {
        let images: Vec<u32> = reps
            .iter()
            .map(|g| index_of[&coset_key(&g.then(s))] as u32)
            .collect();
        Perm::from_images(images)
    };
    let x_cosets = coset_perm(&ct.x)?;
    let y_cosets = coset_perm(&ct.y)?;
    let z_cosets = coset_perm(&ct.z)?;
    let group = PermGroup::new(vec![x_cosets.clone(), y_cosets.clone()])?;
    Ok(Remark4Construction {
        degree,
        agl_order: p * (p - 1),
        index_verified,
        frobenius_verified,
        transitive: group.is_transitive(),
        product_is_identity: x_cosets.then(&y_cosets).then(&z_cosets).is_identity(),
        semiregular: (
            x_cosets.is_semiregular(),
            y_cosets.is_semiregular(),
            z_cosets.is_semiregular(),
        ),
        x_cosets,
        y_cosets,
        z_cosets,
    })
}
