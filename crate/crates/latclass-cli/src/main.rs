//! `latclass`: command-line front end.
//!
//! Exit codes: 0 success, 1 audit or verification mismatch, 2 resource cap,
//! 3 malformed input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use latclass::classify::{
    self, classify_genus, classify_unimodular, dedup, exceptional_report, extend_orthogonal_roots,
    genus_audit, kneser_neighbor, neighbor_search, orbit_method, parse_mass_table, parse_rational,
    triplicate, unimodular_mass, unimodular_rank_needed, ClassRecord, GenusClassification,
    GenusKind, GenusSymbol, NeighborFilter, OrbitMethodOptions, OrbitStrategy, TypeTag,
    UnimodularOptions,
};
use latclass::invariants::{self, BVParams, GenusInvariant, Variant};
use latclass::io::{self, ListFile};
use latclass::isometry::{self, SearchOptions};
use latclass::lattice::{standard_lattice, Lattice};
use latclass::{mod2, residue, rootsys, shortvec, Error};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "latclass", version, about = "Classification of integral Euclidean lattices")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Cap on vectors produced by one short-vector enumeration.
    #[arg(long, global = true, default_value_t = shortvec::DEFAULT_CAP)]
    vector_cap: usize,
    /// Node budget of one isometry search.
    #[arg(long, global = true, default_value_t = isometry::DEFAULT_BUDGET)]
    budget: u64,
    /// Largest dimension for mod 2 orbit computations.
    #[arg(long, global = true, default_value_t = mod2::DEFAULT_MOD2_CAP)]
    mod2_cap: usize,
    /// Manifest path (default: next to the output, or `latclass-<command>.manifest`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

/// A lattice: a standard name (`E8`, `D12++I2`, `<6>`), `gram:2,-1;-1,2`, or `FILE@K`
/// for the K-th record (from 1) of a list file.
type Spec = String;

#[derive(Subcommand)]
enum Cmd {
    /// Short vectors up to a norm bound.
    Shortvec {
        lattice: Spec,
        #[arg(long)]
        bound: i64,
        /// Print the vectors, one per sign pair.
        #[arg(long)]
        list: bool,
    },
    /// Order and generators of O(L).
    Aut {
        lattice: Spec,
        #[arg(long)]
        generators: bool,
    },
    /// Isometry test.
    Iso { a: Spec, b: Spec },
    /// The BV hash.
    Bv {
        lattice: Spec,
        #[arg(long, default_value_t = 3)]
        depth: i64,
        #[arg(long, default_value = "parity")]
        variant: String,
        /// Genus invariant (`bv1`, `bv2`, `bv3`, `flat24`) for a lattice of G(n,p).
        #[arg(long, requires = "p")]
        invariant: Option<String>,
        #[arg(long)]
        p: Option<i64>,
    },
    /// The residue module.
    Residue { lattice: Spec },
    /// Glue A and B along a full anti-embedding of res A into res B.
    Glue {
        a: Spec,
        b: Spec,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Kneser d-neighbors, of a given line or by random search.
    Neighbor {
        lattice: Spec,
        #[arg(long)]
        d: i64,
        /// Comma separated coordinates of x.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Attempts for the random search.
        #[arg(long, default_value_t = 100)]
        attempts: usize,
        #[arg(long)]
        no_units: bool,
        #[arg(long)]
        root_system: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// One orthogonal-root step: the r1 = 0 classes of rank n+2 from all classes of rank n.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// The orbit method on a complete source list.
    Orbitmethod {
        #[arg(long)]
        input: PathBuf,
        /// Vector type, e.g. `6`, `3char`, `30sp`.
        #[arg(long = "type")]
        tag: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[arg(long)]
        assert_unique: bool,
        /// Trust the predicted |O(N)| instead of computing it.
        #[arg(long)]
        no_verify: bool,
    },
    /// Exceptional vectors and their W(L)±-orbits.
    Exc {
        #[arg(long)]
        input: PathBuf,
    },
    /// Triplication along every root orbit of every class of a list.
    Triplicate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Count and mass audit of a list.
    Audit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        expected_count: Option<usize>,
        /// Expected total mass `p/q` (default for II(n): the mass formula).
        #[arg(long)]
        expected_mass: Option<String>,
        /// Table of reduced masses per root system.
        #[arg(long)]
        mass_table: Option<PathBuf>,
    },
    /// All unimodular classes up to a rank; writes `X<n>.lst` per rank and `II<n>.lst`
    /// for the even ones.
    ClassifyUnimodular {
        #[arg(long, default_value_t = 16)]
        max_rank: usize,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// The genus G(n,p) by the orbit method.
    ClassifyGenus {
        n: usize,
        p: i64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Direct,
    Dominant,
}

impl From<StrategyArg> for OrbitStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => OrbitStrategy::Auto,
            StrategyArg::Direct => OrbitStrategy::Direct,
            StrategyArg::Dominant => OrbitStrategy::Dominant,
        }
    }
}

#[derive(Debug)]
enum Fail {
    Mismatch(String),
    Cap(String),
    Input(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Mismatch(_) => 1,
            Fail::Cap(_) => 2,
            Fail::Input(_) => 3,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::BudgetExceeded(_) => Fail::Cap(e.to_string()),
            Error::Inconsistent(_) => Fail::Mismatch(e.to_string()),
            _ => Fail::Input(e.to_string()),
        }
    }
}

type R<T> = std::result::Result<T, Fail>;

struct Ctx {
    global: Global,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    out: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn atomic_write(path: &Path, bytes: &[u8]) -> R<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Fail::Input(format!("cannot write {}: {e}", path.display())))
}

impl Ctx {
    fn read(&mut self, path: &Path) -> R<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Fail::Input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push((path.display().to_string(), sha256_hex(text.as_bytes())));
        Ok(text)
    }

    fn read_list(&mut self, path: &Path) -> R<ListFile> {
        let text = self.read(path)?;
        io::parse(&text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, path: &Path, text: &str) -> R<()> {
        atomic_write(path, text.as_bytes())?;
        self.outputs.push((path.display().to_string(), sha256_hex(text.as_bytes())));
        Ok(())
    }

    fn say(&mut self, line: impl AsRef<str>) {
        println!("{}", line.as_ref());
        self.out.push_str(line.as_ref());
        self.out.push('\n');
    }

    fn lattice(&mut self, spec: &str) -> R<Lattice> {
        if let Some(body) = spec.strip_prefix("gram:") {
            let rows: Vec<Vec<i64>> = body
                .split(';')
                .map(|r| {
                    r.split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<i64>().map_err(|_| Fail::Input(format!("bad Gram entry {t:?}"))))
                        .collect::<R<Vec<i64>>>()
                })
                .collect::<R<_>>()?;
            return Ok(Lattice::new(rows)?);
        }
        if let Some((path, k)) = spec.rsplit_once('@') {
            let k: usize = k.parse().map_err(|_| Fail::Input(format!("bad record index in {spec:?}")))?;
            let f = self.read_list(Path::new(path))?;
            let n = f.records.len();
            let rec = k
                .checked_sub(1)
                .and_then(|i| f.records.into_iter().nth(i))
                .ok_or_else(|| Fail::Input(format!("{path} has {n} records, asked for {k}")))?;
            return Ok(rec.lattice);
        }
        Ok(standard_lattice(spec)?)
    }

    fn search(&self) -> SearchOptions {
        SearchOptions { budget: self.global.budget, vector_cap: self.global.vector_cap }
    }
}

fn genus_of(l: &Lattice) -> R<GenusSymbol> {
    let n = l.rank();
    let d = l.det();
    if d == 1 {
        return Ok(GenusSymbol { rank: n, kind: GenusKind::Unimodular });
    }
    if l.is_even() {
        return Ok(GenusSymbol { rank: n, kind: GenusKind::EvenDet(d) });
    }
    Err(Fail::Input(format!("no list genus for an odd lattice of determinant {d}")))
}

fn record(l: Lattice, prov: String) -> R<ClassRecord> {
    Ok(ClassRecord::unimodular(l, prov)?)
}

fn matrix_lines(m: &[Vec<i64>]) -> Vec<String> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect()
}

fn run(cli: &Cli, ctx: &mut Ctx) -> R<()> {
    match &cli.cmd {
        Cmd::Shortvec { lattice, bound, list } => {
            let l = ctx.lattice(lattice)?;
            let rep = shortvec::short_vectors_capped(&l, *bound, ctx.global.vector_cap)?;
            for (k, c) in &rep.counts {
                ctx.say(format!("r{k} {c}"));
            }
            if *list {
                for (v, k) in &rep.pairs {
                    ctx.say(format!("{k}: {}", matrix_lines(std::slice::from_ref(v))[0]));
                }
            }
        }
        Cmd::Aut { lattice, generators } => {
            let l = ctx.lattice(lattice)?;
            let g = isometry::automorphisms_with(&l, &[], ctx.search())?;
            ctx.say(format!("order {}", g.order));
            ctx.say(format!("generators {}", g.generators.len()));
            if *generators {
                for (i, m) in g.generators.iter().enumerate() {
                    ctx.say(format!("g{}", i + 1));
                    for line in matrix_lines(m) {
                        ctx.say(line);
                    }
                }
            }
        }
        Cmd::Iso { a, b } => {
            let (la, lb) = (ctx.lattice(a)?, ctx.lattice(b)?);
            match isometry::isometry_with(&la, &lb, ctx.search())? {
                Some(m) => {
                    ctx.say("isometric");
                    for line in matrix_lines(&m) {
                        ctx.say(line);
                    }
                }
                None => ctx.say("not isometric"),
            }
        }
        Cmd::Bv { lattice, depth, variant, invariant, p } => {
            let l = ctx.lattice(lattice)?;
            let h = match (invariant, p) {
                (Some(name), Some(p)) => {
                    let w: GenusInvariant = name.parse()?;
                    invariants::bv_np(&l, *p, &[w])?.remove(0)
                }
                _ => {
                    let v: Variant = variant.parse()?;
                    invariants::bv(&l, &BVParams::depth(*depth).with_variant(v))?
                }
            };
            ctx.say(format!("{} vertices {}", h.hex(), h.vertex_count));
        }
        Cmd::Residue { lattice } => {
            let l = ctx.lattice(lattice)?;
            let r = residue::residue(&l);
            let divs: Vec<String> = r.divisors.iter().map(|d| d.to_string()).collect();
            ctx.say(format!("order {}", r.order()));
            ctx.say(format!("divisors {}", if divs.is_empty() { "-".into() } else { divs.join(" ") }));
            for (i, row) in r.bilinear.iter().enumerate() {
                let row: Vec<String> = row.iter().map(|q| q.to_string()).collect();
                ctx.say(format!("b{} {}", i + 1, row.join(" ")));
            }
            if let Some(q) = &r.quadratic {
                let q: Vec<String> = q.iter().map(|x| x.to_string()).collect();
                ctx.say(format!("q {}", q.join(" ")));
            }
            if l.det() == 1 {
                let exc = residue::exceptional_vectors(&l)?;
                ctx.say(format!("exc {}", exc.len()));
            }
        }
        Cmd::Glue { a, b, output } => {
            let (la, lb) = (ctx.lattice(a)?, ctx.lattice(b)?);
            let Some(eta) = residue::find_anti_embedding(&la, &lb)? else {
                ctx.say("no anti-embedding");
                return Ok(());
            };
            let ov = residue::glue_pair(&la, &lb, &eta)?;
            let m = ov.lattice;
            let (_, desc) = rootsys::root_data(&m)?;
            ctx.say(format!("det {} root {}", m.det(), desc));
            match output {
                Some(path) => {
                    let rec = record(m.clone(), format!("glue({a},{b})"))?;
                    let text = io::serialize(&ListFile::new(genus_of(&m)?, vec![rec]));
                    ctx.write(path, &text)?;
                }
                None => {
                    for line in matrix_lines(&m.gram()) {
                        ctx.say(line);
                    }
                }
            }
        }
        Cmd::Neighbor { lattice, d, x, attempts, no_units, root_system, output } => {
            let l = ctx.lattice(lattice)?;
            let found: Vec<(Lattice, String)> = match x {
                Some(xs) => {
                    let x: Vec<i64> = xs
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| Fail::Input(format!("bad coordinate {t:?}"))))
                        .collect::<R<_>>()?;
                    vec![(kneser_neighbor(&l, *d, &x)?, format!("nb({lattice},{d},{xs})"))]
                }
                None => {
                    let filter = NeighborFilter {
                        root_system: root_system.as_deref().map(str::parse).transpose()?,
                        no_units: *no_units,
                    };
                    neighbor_search(&l, *d, *attempts, &filter, ctx.global.seed)?
                        .into_iter()
                        .enumerate()
                        .map(|(i, m)| (m, format!("nb({lattice},{d},seed{},{i})", ctx.global.seed)))
                        .collect()
                }
            };
            let mut recs = Vec::new();
            for (m, prov) in found {
                let rec = record(m, prov)?;
                ctx.say(format!("{} det {}", rec.root_system, rec.lattice.det()));
                recs.push(rec);
            }
            ctx.say(format!("neighbors {}", recs.len()));
            if let Some(path) = output {
                let genus = match recs.first() {
                    Some(r) => genus_of(&r.lattice)?,
                    None => genus_of(&l)?,
                };
                ctx.write(path, &io::serialize(&ListFile::new(genus, recs)))?;
            }
        }
        Cmd::Extend { input, output } => {
            let f = ctx.read_list(input)?;
            let n = f.header.rank;
            let mut classes = f.records;
            let cands = extend_orthogonal_roots(&mut classes, ctx.global.mod2_cap)?;
            let k = cands.len();
            let out = dedup(cands.into_iter().map(|c| c.candidate).collect())?;
            if !out.unresolved.is_empty() {
                return Err(Fail::Cap(format!("{} candidates left unresolved", out.unresolved.len())));
            }
            let mut recs = out.classes;
            classify::canonical_order(&mut recs);
            ctx.say(format!("candidates {k} classes {} merged {}", recs.len(), out.merged));
            for r in &recs {
                ctx.say(format!("{} {}", r.root_system, r.mass()));
            }
            let genus = GenusSymbol { rank: n + 2, kind: GenusKind::Unimodular };
            ctx.write(output, &io::serialize(&ListFile::new(genus, recs)))?;
        }
        Cmd::Orbitmethod { input, tag, target, output, strategy, assert_unique, no_verify } => {
            let mut src = ctx.read_list(input)?.records;
            let tag: TypeTag = tag.parse()?;
            let target: GenusSymbol = target.parse()?;
            let opts = OrbitMethodOptions {
                strategy: (*strategy).into(),
                assert_unique_orbit: *assert_unique,
                verify_groups: !*no_verify,
                vector_cap: ctx.global.vector_cap,
            };
            let run = orbit_method(&mut src, tag, &target, opts)?;
            ctx.say(format!("orbits per source {:?}", run.orbits_per_source));
            ctx.say(format!("classes {}", run.outputs.len()));
            ctx.say(format!("input weight {}", run.input_weight));
            ctx.say(format!("output weight {}", run.output_weight));
            ctx.write(output, &io::serialize(&ListFile::new(target, run.outputs.clone())))?;
            if !run.conserved() {
                return Err(Fail::Mismatch("mass not conserved".into()));
            }
        }
        Cmd::Exc { input } => {
            let f = ctx.read_list(input)?;
            for r in exceptional_report(&f.records)? {
                ctx.say(format!(
                    "{} exc {} orbits {} sizes {:?}",
                    r.root_system, r.exc_count, r.orbits, r.orbit_sizes
                ));
            }
        }
        Cmd::Triplicate { input } => {
            let f = ctx.read_list(input)?;
            let list = f.records;
            let mut ok = true;
            for (i, c) in list.iter().enumerate() {
                let (rd, _) = rootsys::root_data(&c.lattice)?;
                let roots = rd.all_roots();
                if roots.is_empty() {
                    continue;
                }
                let g = isometry::automorphisms_with(&c.lattice, &[], ctx.search())?;
                let orb = isometry::vector_orbits(&g.generators, &roots)?;
                for a in &orb.representatives {
                    let t = triplicate(&c.lattice, a)?;
                    let mut ids = Vec::new();
                    for m in &t.lattices {
                        let mut found = None;
                        for (j, d) in list.iter().enumerate() {
                            if isometry::isometry_with(&d.lattice, m, ctx.search())?.is_some() {
                                found = Some(j + 1);
                                break;
                            }
                        }
                        ok &= found.is_some();
                        ids.push(found.map_or("?".to_string(), |j| j.to_string()));
                    }
                    ok &= t.all_two_neighbors();
                    ctx.say(format!(
                        "{} {} -> {} source {} indices {:?}",
                        i + 1,
                        c.root_system,
                        ids.join(" "),
                        t.source_index + 1,
                        t.pair_indices.iter().map(|p| p.1).collect::<Vec<_>>()
                    ));
                }
            }
            if !ok {
                return Err(Fail::Mismatch("a triplication left the list or was not a 2-neighbor triple".into()));
            }
        }
        Cmd::Audit { input, expected_count, expected_mass, mass_table } => {
            let f = ctx.read_list(input)?;
            let g = f.header.genus;
            let mass = match expected_mass {
                Some(s) => Some(parse_rational(s).ok_or_else(|| Fail::Input(format!("bad rational {s:?}")))?),
                None if g.kind == GenusKind::UnimodularEven => unimodular_mass(g.rank),
                None => None,
            };
            let table = match mass_table {
                Some(p) => {
                    let text = ctx.read(p)?;
                    Some(parse_mass_table(&text)?)
                }
                None => None,
            };
            let rep = genus_audit(&f.records, *expected_count, mass, table.as_ref());
            ctx.say(format!("classes {}", rep.count));
            ctx.say(format!("mass {}", rep.mass));
            if let Some(m) = &rep.expected_mass {
                ctx.say(format!("expected mass {m}"));
            }
            for (k, (c, m)) in &rep.by_root_system {
                ctx.say(format!("{k} {c} {m}"));
            }
            for k in &rep.table_mismatches {
                ctx.say(format!("table mismatch {k}"));
            }
            ctx.say(format!("distinct invariants {}", rep.distinct_invariants));
            ctx.say(if rep.passed() { "PASS" } else { "FAIL" });
            if !rep.passed() {
                return Err(Fail::Mismatch("audit failed".into()));
            }
        }
        Cmd::ClassifyUnimodular { max_rank, output_dir } => {
            let u = classify_unimodular(UnimodularOptions { max_rank: *max_rank, mod2_cap: ctx.global.mod2_cap })?;
            std::fs::create_dir_all(output_dir)
                .map_err(|e| Fail::Input(format!("cannot create {}: {e}", output_dir.display())))?;
            for n in 1..=*max_rank {
                let genus = GenusSymbol { rank: n, kind: GenusKind::Unimodular };
                let recs = u.all[n].clone();
                ctx.say(format!("{n} {} {}", recs.len(), classify::total_mass(&recs)));
                let even: Vec<ClassRecord> = recs.iter().filter(|r| r.lattice.is_even()).cloned().collect();
                let path = output_dir.join(format!("X{n}.lst"));
                ctx.write(&path, &io::serialize(&ListFile::new(genus, recs)))?;
                if !even.is_empty() {
                    let genus = GenusSymbol { rank: n, kind: GenusKind::UnimodularEven };
                    let path = output_dir.join(format!("II{n}.lst"));
                    ctx.write(&path, &io::serialize(&ListFile::new(genus, even)))?;
                }
            }
            if u.unresolved() > 0 {
                return Err(Fail::Cap(format!("{} candidates left unresolved", u.unresolved())));
            }
        }
        Cmd::ClassifyGenus { n, p, output, strategy } => {
            let target = GenusSymbol::gnp(*n, *p);
            let need = unimodular_rank_needed(&target);
            let u = classify_unimodular(UnimodularOptions { max_rank: need, mod2_cap: ctx.global.mod2_cap })?;
            let mut cache = GenusClassification::default();
            let opts = OrbitMethodOptions {
                strategy: (*strategy).into(),
                vector_cap: ctx.global.vector_cap,
                ..Default::default()
            };
            let list = classify_genus(&target, &u, &mut cache, opts)?;
            for r in &cache.runs {
                ctx.say(format!("{} -> {}: {} classes", r.tag, r.target, r.outputs.len()));
            }
            for r in &list {
                ctx.say(format!("{} {}", r.root_system, r.mass()));
            }
            ctx.say(format!("{target} {}", list.len()));
            ctx.write(output, &io::serialize(&ListFile::new(target, list)))?;
        }
    }
    Ok(())
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Shortvec { .. } => "shortvec",
        Cmd::Aut { .. } => "aut",
        Cmd::Iso { .. } => "iso",
        Cmd::Bv { .. } => "bv",
        Cmd::Residue { .. } => "residue",
        Cmd::Glue { .. } => "glue",
        Cmd::Neighbor { .. } => "neighbor",
        Cmd::Extend { .. } => "extend",
        Cmd::Orbitmethod { .. } => "orbitmethod",
        Cmd::Exc { .. } => "exc",
        Cmd::Triplicate { .. } => "triplicate",
        Cmd::Audit { .. } => "audit",
        Cmd::ClassifyUnimodular { .. } => "classify-unimodular",
        Cmd::ClassifyGenus { .. } => "classify-genus",
    }
}

fn manifest(cli: &Cli, ctx: &Ctx, code: u8) -> String {
    let g = &ctx.global;
    let mut m = String::new();
    let _ = writeln!(m, "tool latclass {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(m, "format-version {}", io::FORMAT_VERSION);
    let _ = writeln!(m, "hash-version {}", invariants::HASH_VERSION);
    let args: Vec<String> = std::env::args().skip(1).collect();
    let _ = writeln!(m, "command {}", command_name(&cli.cmd));
    let _ = writeln!(m, "args {}", args.join(" "));
    let _ = writeln!(m, "seed {}", g.seed);
    let _ = writeln!(m, "threads {}", rayon::current_num_threads());
    let _ = writeln!(m, "vector-cap {}", g.vector_cap);
    let _ = writeln!(m, "budget {}", g.budget);
    let _ = writeln!(m, "mod2-cap {}", g.mod2_cap);
    for (p, h) in &ctx.inputs {
        let _ = writeln!(m, "input {p} sha256 {h}");
    }
    for (p, h) in &ctx.outputs {
        let _ = writeln!(m, "output {p} sha256 {h}");
    }
    let _ = writeln!(m, "stdout sha256 {}", sha256_hex(ctx.out.as_bytes()));
    let _ = writeln!(m, "exit {code}");
    m
}

fn manifest_path(cli: &Cli, ctx: &Ctx) -> PathBuf {
    if let Some(p) = &cli.global.manifest {
        return p.clone();
    }
    match ctx.outputs.first() {
        Some((p, _)) if !matches!(cli.cmd, Cmd::ClassifyUnimodular { .. }) => PathBuf::from(format!("{p}.manifest")),
        _ => match &cli.cmd {
            Cmd::ClassifyUnimodular { output_dir, .. } => output_dir.join("latclass-classify-unimodular.manifest"),
            cmd => PathBuf::from(format!("latclass-{}.manifest", command_name(cmd))),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    if cli.global.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global();
    }
    let mut ctx = Ctx { global: cli.global.clone(), inputs: Vec::new(), outputs: Vec::new(), out: String::new() };
    let code = match run(&cli, &mut ctx) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Fail::Mismatch(m) => eprintln!("mismatch: {m}"),
                Fail::Cap(m) => eprintln!("resource cap: {m}"),
                Fail::Input(m) => eprintln!("malformed input: {m}"),
            }
            f.code()
        }
    };
    let path = manifest_path(&cli, &ctx);
    if let Err(Fail::Input(m) | Fail::Cap(m) | Fail::Mismatch(m)) = atomic_write(&path, manifest(&cli, &ctx, code).as_bytes()) {
        eprintln!("{m}");
    }
    ExitCode::from(code)
}
