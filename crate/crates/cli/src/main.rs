//! `grcalc`: dimension tables, element computations and verification
//! suites.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use grcalc::catprop::{catass_dim, catlie_dim, catlie_dim_formula};
use grcalc::freelie::{bch, witt_dim, LieElement, LyndonBasis};
use grcalc::grfun::{FunctorInstance, FunctorKind, GrMorphism};
use grcalc::jacobi::{chord_basis, chord_count, mlie_dim, prop_dim, prop_dim_enumerated};
use grcalc::tower::{project_hom, tower_compose, tower_hom_dim, tower_hom_rank};
use grcalc::verify::{self, VerifySuiteReport};

use output::{emit, Document, Table, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "grcalc", version, about = "Exact computations with functors on free groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report elapsed milliseconds on stderr.
    #[arg(long, global = true)]
    timings: bool,
    /// Largest truncation degree accepted.
    #[arg(long, global = true, default_value_t = 6)]
    cap_d: usize,
    /// Largest rank or arity accepted.
    #[arg(long, global = true, default_value_t = 4)]
    cap_rank: usize,
    /// Largest Jacobi grading accepted.
    #[arg(long, global = true, default_value_t = 3)]
    cap_degree: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension tables.
    Dims {
        #[command(subcommand)]
        subject: Dims,
    },
    /// Lyndon coordinates of bch_d(a, b).
    Bch {
        #[arg(long)]
        d: usize,
    },
    /// Run a verification suite: freelie, grfun, catprop, tower, jacobi or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// The truncated categories of free groups.
    Tower {
        #[command(subcommand)]
        action: TowerCmd,
    },
    /// Jacobi diagrams and the Casimir PROP.
    Jacobi {
        #[command(subcommand)]
        action: JacobiCmd,
    },
}

#[derive(Subcommand)]
enum Dims {
    /// dim Cat Lie(s, t) for s, t <= max-s.
    Catlie {
        #[arg(long)]
        max_s: usize,
        #[arg(long)]
        max_t: Option<usize>,
    },
    /// dim Cat Ass(s, t) for s, t <= max-s.
    Catass {
        #[arg(long)]
        max_s: usize,
        #[arg(long)]
        max_t: Option<usize>,
    },
    /// Dimension of the Passi quotient at Free(t).
    Passi {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    /// dim P_n(s, t).
    Prop {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Also compute by enumerating the whole space.
        #[arg(long)]
        enumerate: bool,
    },
    /// dim MLie on `legs` legs in degree `degree`.
    Mlie {
        #[arg(long)]
        legs: usize,
        #[arg(long)]
        degree: usize,
    },
    /// Witt numbers for k = 1..max-k.
    Witt {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max_k: usize,
    },
    /// Hom-space dims of the level-d tower category.
    Tower(TowerDimArgs),
}

#[derive(Args)]
struct TowerDimArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    d: usize,
    /// Also compute the rank spanned by projected homomorphisms.
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Hom-space dimension.
    Dim(TowerDimArgs),
    /// Composite g . f of projected homomorphisms at level d.
    Compose {
        /// Homomorphism, e.g. "a->ab; b->B".
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        d: usize,
    },
    /// The tower verification suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum JacobiCmd {
    /// dim MLie.
    Mlie {
        #[arg(long)]
        legs: usize,
        #[arg(long)]
        degree: usize,
    },
    /// dim P_n(s, t) by components and by enumeration.
    Prop {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
    },
    /// The chord basis of Chord_n(s, 2n + s).
    Chord {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// Include the diagrams as edge lists.
        #[arg(long)]
        list: bool,
    },
    /// The jacobi verification suite up to the given grading.
    Verify {
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Usage(s)
    }
}

struct Caps {
    d: usize,
    rank: usize,
    degree: usize,
}

impl Caps {
    fn d(&self, v: usize) -> Result<(), Failure> {
        cap("degree", v, self.d, "--cap-d")
    }

    fn rank(&self, v: usize) -> Result<(), Failure> {
        cap("rank", v, self.rank, "--cap-rank")
    }

    fn degree(&self, v: usize) -> Result<(), Failure> {
        cap("Jacobi grading", v, self.degree, "--cap-degree")
    }
}

fn cap(what: &str, v: usize, limit: usize, flag: &str) -> Result<(), Failure> {
    if v > limit {
        Err(Failure::Usage(format!("cap exceeded: {what} {v} > {limit} (raise with {flag})")))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    if cli.global.timings {
        eprintln!("elapsed_ms: {}", start.elapsed().as_millis());
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let caps = Caps { d: g.cap_d, rank: g.cap_rank, degree: g.cap_degree };
    let (doc, ok) = match &cli.command {
        Command::Dims { subject } => (dims(subject, &caps)?, true),
        Command::Bch { d } => {
            caps.d(*d)?;
            (bch_doc(*d)?, true)
        }
        Command::Verify { suite, seed } => {
            let reports = verify::run(suite, *seed).map_err(|e| e.to_string())?;
            report_doc(reports)
        }
        Command::Tower { action } => match action {
            TowerCmd::Dim(a) => (tower_dims(a, &caps)?.into(), true),
            TowerCmd::Compose { f, g, d } => {
                caps.d(*d)?;
                (compose_doc(f, g, *d, &caps)?, true)
            }
            TowerCmd::Verify { seed } => {
                report_doc(verify::run("tower", *seed).map_err(|e| e.to_string())?)
            }
        },
        Command::Jacobi { action } => jacobi(action, &caps)?,
    };
    emit(&doc, g.format, g.out.as_deref())?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn dims(subject: &Dims, caps: &Caps) -> Result<Document, Failure> {
    let table = match subject {
        Dims::Catlie { max_s, max_t } => {
            let max_t = max_t.unwrap_or(*max_s);
            caps.rank(*max_s)?;
            caps.rank(max_t)?;
            let mut t = Table::new("catlie", &["s", "t"]);
            for s in 0..=*max_s {
                for tt in 0..=max_t {
                    let d = catlie_dim(s, tt);
                    if d as u128 != catlie_dim_formula(s, tt) {
                        return Err(Failure::Usage(format!("internal mismatch at ({s},{tt})")));
                    }
                    t.push(&[s, tt], d as u64, "enumeration");
                }
            }
            t
        }
        Dims::Catass { max_s, max_t } => {
            let max_t = max_t.unwrap_or(*max_s);
            caps.rank(*max_s)?;
            caps.rank(max_t)?;
            let mut t = Table::new("catass", &["s", "t"]);
            for s in 0..=*max_s {
                for tt in 0..=max_t {
                    t.push(&[s, tt], catass_dim(s, tt), "enumeration");
                }
            }
            t
        }
        Dims::Passi { d, t } => {
            caps.d(*d)?;
            caps.rank(*t)?;
            let mut table = Table::new("passi", &["d", "t"]);
            table.push(&[*d, *t], FunctorInstance::new(FunctorKind::Passi(*d)).dim(*t) as u64, "enumeration");
            table
        }
        Dims::Prop { n, s, t, enumerate } => {
            caps.degree(*n)?;
            caps.rank(*s)?;
            caps.rank(*t)?;
            let mut table = Table::new("prop", &["n", "s", "t"]);
            table.push(&[*n, *s, *t], prop_dim(*n, *s, *t) as u64, "formula");
            if *enumerate {
                table.push(&[*n, *s, *t], prop_dim_enumerated(*n, *s, *t) as u64, "rank");
            }
            table
        }
        Dims::Mlie { legs, degree } => {
            caps.degree(*degree)?;
            caps.rank(*legs)?;
            let mut table = Table::new("mlie", &["legs", "degree"]);
            table.push(&[*legs, *degree], mlie_dim(*legs, *degree) as u64, "rank");
            table
        }
        Dims::Witt { t, max_k } => {
            caps.rank(*t)?;
            caps.d(*max_k)?;
            let mut table = Table::new("witt", &["t", "k"]);
            for k in 1..=*max_k {
                table.push(&[*t, k], witt_dim(*t, k), "formula");
            }
            table
        }
        Dims::Tower(a) => tower_dims(a, caps)?,
    };
    Ok(table.into())
}

fn tower_dims(a: &TowerDimArgs, caps: &Caps) -> Result<Table, Failure> {
    caps.rank(a.s)?;
    caps.rank(a.t)?;
    caps.d(a.d)?;
    let mut table = Table::new("tower", &["s", "t", "d"]);
    let dim = tower_hom_dim(a.s, a.t, a.d);
    table.push(&[a.s, a.t, a.d], dim as u64, "formula");
    if a.check {
        let rank = tower_hom_rank(a.s, a.t, a.d, a.d, dim as usize);
        table.push(&[a.s, a.t, a.d], rank as u64, "rank");
    }
    Ok(table)
}

fn bch_doc(d: usize) -> Result<Document, Failure> {
    let basis = LyndonBasis::shared(2, d);
    let z = bch(&LieElement::generator(&basis, 1), &LieElement::generator(&basis, 2))
        .map_err(|e| e.to_string())?;
    let mut terms = Vec::new();
    let mut records = Vec::new();
    for (i, w) in basis.words().iter().enumerate() {
        let c = z.coeff(w);
        if c.is_zero() {
            continue;
        }
        terms.push(json!({ "word": w.to_alpha(), "bracket": basis.bracketing(i), "coeff": c.to_string() }));
        records.push(vec![w.to_alpha(), basis.bracketing(i), c.to_string()]);
    }
    Ok(Document {
        json: json!({ "schema": SCHEMA, "d": d, "terms": terms }),
        header: vec!["word".into(), "bracket".into(), "coeff".into()],
        records,
    })
}

fn compose_doc(f: &str, g: &str, d: usize, caps: &Caps) -> Result<Document, Failure> {
    let g = GrMorphism::parse(g, None).map_err(|e| format!("--g: {e}"))?;
    let f = GrMorphism::parse(f, Some(g.source())).map_err(|e| format!("--f: {e}"))?;
    for r in [f.source(), f.target(), g.target()] {
        caps.rank(r)?;
    }
    let h = tower_compose(&project_hom(&g, d), &project_hom(&f, d)).map_err(|e| e.to_string())?;
    let terms = h.normal_form_terms();
    let records: Vec<Vec<String>> =
        terms.iter().map(|(ws, c)| vec![ws.join(" | "), c.to_string()]).collect();
    let json_terms: Vec<_> =
        terms.iter().map(|(ws, c)| json!({ "words": ws, "coeff": c.to_string() })).collect();
    let rep = h.representatives().iter().map(|(_, r)| r.to_string()).collect::<Vec<_>>();
    Ok(Document {
        json: json!({
            "schema": SCHEMA,
            "d": d,
            "source": h.source(),
            "target": h.target(),
            "representatives": rep,
            "normal_form": json_terms,
        }),
        header: vec!["words".into(), "coeff".into()],
        records,
    })
}

fn report_doc(reports: Vec<VerifySuiteReport>) -> (Document, bool) {
    let ok = reports.iter().all(VerifySuiteReport::passed);
    let mut records = Vec::new();
    for r in &reports {
        for c in &r.checks {
            let status = serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from));
            records.push(vec![
                r.suite.clone(),
                c.id.clone(),
                status.unwrap_or_default(),
                c.anchor.clone(),
                c.witness.clone().unwrap_or_default(),
            ]);
        }
    }
    let json = json!({ "schema": SCHEMA, "passed": ok, "suites": reports });
    let header = ["suite", "check", "status", "anchor", "witness"].map(String::from).to_vec();
    (Document { json, header, records }, ok)
}

fn jacobi(action: &JacobiCmd, caps: &Caps) -> Result<(Document, bool), Failure> {
    Ok(match action {
        JacobiCmd::Mlie { legs, degree } => {
            dims(&Dims::Mlie { legs: *legs, degree: *degree }, caps).map(|d| (d, true))?
        }
        JacobiCmd::Prop { n, s, t } => {
            dims(&Dims::Prop { n: *n, s: *s, t: *t, enumerate: true }, caps).map(|d| (d, true))?
        }
        JacobiCmd::Chord { n, s, list } => {
            caps.degree(*n)?;
            caps.rank(*s)?;
            let count = chord_count(*n, *s);
            let mut json = json!({ "schema": SCHEMA, "n": n, "s": s, "exits": 2 * n + s, "count": count as u64 });
            let mut records = vec![vec![n.to_string(), s.to_string(), count.to_string()]];
            if *list {
                let basis = chord_basis(*n, *s);
                json["diagrams"] = serde_json::to_value(&basis).map_err(|e| e.to_string())?;
                records = basis
                    .iter()
                    .map(|d| {
                        let edges = d.edge_list().1;
                        let e: Vec<String> = edges.iter().map(|[a, b]| format!("{a}-{b}")).collect();
                        vec![n.to_string(), s.to_string(), e.join(" ")]
                    })
                    .collect();
            }
            let last = if *list { "edges" } else { "count" };
            let header = vec!["n".into(), "s".into(), last.into()];
            (Document { json, header, records }, true)
        }
        JacobiCmd::Verify { max_degree, seed } => {
            caps.degree(*max_degree)?;
            report_doc(vec![verify::run_jacobi(*seed, *max_degree)])
        }
    })
}
