//! `dessin` — build an oriented hypermap whose automorphism group is a given
//! finite group, and verify the resulting certificates.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 search
//! budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use dessin_core::pipeline::{
    canonical_json, emit, load_group, realize, remark3_plan, remark4_plan, verify_files,
    RealizeOptions, DEFAULT_DART_CAP, DEFAULT_GROUP_ORDER_CAP, DEFAULT_REMARK4_CONSTRUCT_CAP,
};
use dessin_core::psl2::find_generating_triple;
use dessin_core::triangle::{
    classify_triple, classify_triple_with_tables, find_q, ClassificationTables, Triple,
};
use dessin_core::Error;

#[derive(Parser)]
#[command(
    name = "dessin",
    about = "Realize a finite group as the full automorphism group of a dessin d'enfant",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dessin with Aut ≅ the given group and emit its certificate.
    Realize {
        /// Catalog name (trivial, `C<n>`, `D<n>`, `S<n>`, `A<n>`, Q8) or JSON file.
        #[arg(long)]
        group: String,
        /// Pin the triple, e.g. 4,6,12.
        #[arg(long)]
        triple: Option<Triple>,
        /// Pin the prime q.
        #[arg(long)]
        q: Option<u64>,
        /// Seed for the deterministic searches.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for certificate.json and dessin.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the certificate to standard output.
        #[arg(long)]
        stdout: bool,
        #[arg(long, default_value_t = DEFAULT_GROUP_ORDER_CAP)]
        max_group_order: usize,
        #[arg(long, default_value_t = DEFAULT_DART_CAP)]
        max_darts: usize,
    },
    /// Hyperbolicity, modulus k and classification of a triple.
    TripleInfo {
        /// The triple, e.g. 2,3,13.
        triple: Triple,
        /// Non-maximal signatures table (checksummed TSV); needs --takeuchi.
        #[arg(long, requires = "takeuchi")]
        singerman: Option<PathBuf>,
        /// Arithmetic signatures table (checksummed TSV); needs --singerman.
        #[arg(long, requires = "singerman")]
        takeuchi: Option<PathBuf>,
    },
    /// Smallest admissible prime q for a triple and rank bound.
    FindQ {
        triple: Triple,
        #[arg(long, default_value_t = 0)]
        rank: u64,
    },
    /// Search PSL₂(F_q) for a generating triple of orders (l, m, n).
    Psl2Triple {
        q: u64,
        l: u64,
        m: u64,
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plan the A₄-stabilizer variant for a triple with periods coprime to 6.
    Remark3 {
        triple: Triple,
        #[arg(long, default_value_t = 100_000)]
        q_bound: u64,
    },
    /// Plan the S_p / AGL₁(p) variant; constructs the coset action for small p.
    Remark4 {
        p: u64,
        /// Force the coset construction (errors above the cap).
        #[arg(long)]
        construct: bool,
        #[arg(long, default_value_t = DEFAULT_REMARK4_CONSTRUCT_CAP)]
        construct_cap: usize,
    },
    /// Re-validate a certificate against its dessin file.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        dessin: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Verification(_) => 1,
        Error::SearchExhausted(_) | Error::SearchBudgetExhausted(_) | Error::SearchBoundExceeded(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Realize {
            group,
            triple,
            q,
            seed,
            out,
            stdout,
            max_group_order,
            max_darts,
        } => {
            let (table, source) = load_group(&group, max_group_order)?;
            let opts = RealizeOptions {
                triple,
                q,
                seed,
                max_group_order,
                max_darts,
            };
            let started = Instant::now();
            let (dessin, cert) = realize(&table, &source, &opts)?;
            eprintln!(
                "realized {} (order {}) as Aut of a {}-dart dessin of type ({},{},{}) over q = {} \
                 in {:.2?}: base genus {}, cover genus {}, |Aut| = {}, verdict {}",
                source,
                cert.group.order,
                cert.cover.darts,
                cert.triple.l,
                cert.triple.m,
                cert.triple.n,
                cert.q_search.q,
                started.elapsed(),
                cert.q_search.base_genus,
                cert.cover.genus_euler,
                cert.aut.order,
                cert.verdict,
            );
            if stdout {
                print!("{}", canonical_json(&cert)?);
            }
            let dir = match (&out, stdout) {
                (Some(dir), _) => Some(dir.clone()),
                (None, false) => Some(PathBuf::from(".")),
                (None, true) => None,
            };
            if let Some(dir) = dir {
                let (cert_path, dessin_path) = emit(&cert, &dessin, &dir)?;
                eprintln!(
                    "wrote {} and {}",
                    cert_path.display(),
                    dessin_path.display()
                );
            }
            Ok(if cert.verdict == "pass" { 0 } else { 1 })
        }
        Command::TripleInfo {
            triple,
            singerman,
            takeuchi,
        } => {
            let c = match (singerman, takeuchi) {
                (Some(s), Some(t)) => {
                    let tables = ClassificationTables::load(&s, &t)?;
                    classify_triple_with_tables(&triple, &tables)
                }
                _ => classify_triple(&triple),
            };
            println!("triple {triple}");
            println!("hyperbolic: {}", triple.is_hyperbolic());
            if triple.is_hyperbolic() {
                println!("k = lcm(2l,2m,2n) = {}", triple.modulus_k());
            }
            println!("maximal: {}", c.is_maximal.as_str());
            println!("arithmetic: {}", c.is_arithmetic.as_str());
            println!("certified by: {}", c.certified_by.as_str());
            println!("accepted by the pipeline: {}", c.accepted());
            Ok(0)
        }
        Command::FindQ { triple, rank } => {
            let r = find_q(&triple, rank)?;
            println!(
                "triple {triple}: k = {}, q = {}, base genus = {} (rank bound {})",
                r.k, r.q, r.g, r.d_required
            );
            Ok(0)
        }
        Command::Psl2Triple { q, l, m, n, seed } => {
            let t = find_generating_triple(q, l, m, n, seed)?;
            println!("x = {:?}", t.x.entries());
            println!("y = {:?}", t.y.entries());
            println!("z = {:?}", t.z.entries());
            println!(
                "orders ({}, {}, {}), x·y·z = 1, ⟨x,y⟩ = PSL2({q}) of order {}",
                l,
                m,
                n,
                dessin_core::psl2::group_order(q)
            );
            Ok(0)
        }
        Command::Remark3 { triple, q_bound } => {
            let r = remark3_plan(&triple, q_bound)?;
            println!("triple {triple} (maximal: {}, arithmetic: {}){}",
                r.classification.is_maximal.as_str(),
                r.classification.is_arithmetic.as_str(),
                if r.smallest_eligible_triple {
                    " — the smallest such example"
                } else {
                    ""
                }
            );
            println!("smallest eligible prime q = {}", r.q);
            println!("degree q(q²−1)/24 = {}", r.degree);
            println!(
                "genus = {} (> q(q²−1)/120: {})",
                r.genus, r.genus_exceeds_bound
            );
            Ok(0)
        }
        Command::Remark4 {
            p,
            construct,
            construct_cap,
        } => {
            let r = remark4_plan(p, construct_cap, construct)?;
            let (l, m, n) = r.cycle_triple.orders;
            println!("p = {p}: cycle triple of orders ({l}, {m}, {n})");
            println!("x = {}", r.cycle_triple.x);
            println!("y = {}", r.cycle_triple.y);
            println!("z = {}", r.cycle_triple.z);
            println!(
                "fixed points in the natural action: {:?} (all ≥ 2: {})",
                r.cycle_triple.fixed_points, r.cycle_triple.all_have_two_fixed_points
            );
            println!(
                "⟨x,y⟩ = S_{p}: {}",
                r.cycle_triple.generates_symmetric
            );
            println!("coset degree (p−2)! = {}", r.degree);
            match (&r.genus, r.genus_exceeds_bound) {
                (Some(g), Some(bound_ok)) => {
                    println!("genus = {g} (> (p−2)!/84: {bound_ok})");
                }
                _ => println!("genus: not integral at this degree (non-smooth case)"),
            }
            match &r.construction {
                Some(c) => {
                    println!(
                        "coset action built: degree {}, |AGL1({p})| = {}, index verified: {}, \
                         Frobenius condition: {}, transitive: {}, x·y·z = 1: {}, semiregular: {:?}",
                        c.degree,
                        c.agl_order,
                        c.index_verified,
                        c.frobenius_verified,
                        c.transitive,
                        c.product_is_identity,
                        c.semiregular,
                    );
                }
                None => println!("coset action skipped (degree above cap {construct_cap})"),
            }
            Ok(0)
        }
        Command::Verify {
            certificate,
            dessin,
        } => {
            let report = verify_files(&certificate, &dessin)?;
            for check in &report.checks {
                println!("{} {}", if check.pass { "ok  " } else { "FAIL" }, check.name);
            }
            if report.pass {
                println!("verification: pass");
                Ok(0)
            } else {
                println!("verification: FAIL");
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
