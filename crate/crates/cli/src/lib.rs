//! Command-line front end for the `maxones` tool.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxones_core::classify::{classify, ClassifyOptions};
use maxones_core::clone::{coclone_member, locate_coclone, parse_language, resolve_relation, CoCloneLabel, ConstraintLanguage};
use maxones_core::delta::{affine_form, decompose, delta_matroid_witness, in_q};
use maxones_core::gadget::{
    catalog, derive_eq_or_impl, derive_nand_m, search_gadget, verify_catalog, verify_gadget, Gadget, LinkKind,
    SearchBounds,
};
use maxones_core::relation::{flip, parse_relations, project, render_relation, CoordinateSet, Relation};
use maxones_core::solver::{
    cycle_reduction, drop_constants, greedy_apx, max2sat3_gadget_chain, mis_to_maxones, parse_weight,
    solve_exact_with_budget, solve_ilp2_with_budget, to_ilp2, Formula, Instance, Solution, WeightedGraph,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: maxones_core::Error },
    #[error(transparent)]
    Core(#[from] maxones_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InFile { source, .. } | CliError::Core(source) => source.exit_code(),
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

#[derive(Debug, Parser)]
#[command(name = "maxones", version, about = "Bounded-occurrence Max Ones toolkit")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Cap on enumerated assignments in exact solvers.
    #[arg(long, env = "MAXONES_BUDGET", default_value_t = 1 << 20, global = true)]
    pub budget: u64,
    #[arg(long, default_value_t = 0x5eed, global = true)]
    pub seed: u64,
    /// Worker threads; 0 means the rayon default.
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(subcommand)]
    Relation(RelationCmd),
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    #[command(subcommand)]
    Gadget(GadgetCmd),
    #[command(subcommand)]
    Catalog(CatalogCmd),
    #[command(subcommand)]
    Solve(SolveCmd),
    #[command(subcommand)]
    Reduce(ReduceCmd),
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct RelFiles {
    /// Relation definition file; may be repeated.
    #[arg(long = "relation")]
    pub relation: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RelationCmd {
    /// Print every relation of a file.
    Show { file: PathBuf },
    /// Print a built-in relation such as NAND3 or IMPL.
    Named { name: String },
    Project(CoordArgs),
    Flip(CoordArgs),
}

#[derive(Debug, Args)]
pub struct CoordArgs {
    file: PathBuf,
    #[arg(long)]
    name: Option<String>,
    /// Comma-separated 1-based coordinates.
    #[arg(long)]
    coords: String,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    DeltaMatroid { file: PathBuf },
    Affine { file: PathBuf },
    QClass { file: PathBuf },
    Coclone { file: PathBuf },
    Decompose { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum GadgetCmd {
    /// Check a gadget file against its target relation.
    Verify {
        gadget: PathBuf,
        #[command(flatten)]
        rels: RelFiles,
    },
    Search(SearchArgs),
    EqOrImpl {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    Nand {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Target relation name.
    #[arg(long)]
    target: String,
    #[arg(long)]
    language: PathBuf,
    #[arg(long)]
    occurrences: usize,
    #[command(flatten)]
    bounds: BoundArgs,
    #[command(flatten)]
    rels: RelFiles,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long = "search-aux", default_value_t = 2)]
    aux: usize,
    #[arg(long = "search-cons", default_value_t = 3)]
    cons: usize,
}

impl BoundArgs {
    fn bounds(&self) -> SearchBounds {
        SearchBounds {
            max_aux: self.aux,
            max_constraints: self.cons,
            ..SearchBounds::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    List,
    Verify,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    rels: RelFiles,
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    Exact(InstanceArgs),
    Greedy {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Occurrence bound; defaults to the instance's own bound.
        #[arg(long)]
        occurrences: Option<usize>,
    },
    Ilp2(InstanceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LinkArg {
    Eq2,
    Impl,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Replace repeated variables by gadget-linked copies.
    Cycle {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long)]
        gadget: PathBuf,
        #[arg(long, value_enum)]
        link: LinkArg,
    },
    Mis {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        occurrences: usize,
    },
    Max2sat3 {
        #[arg(long)]
        formula: PathBuf,
    },
    Dropconst {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Non-1-valid relation used to force zeros.
        #[arg(long)]
        name: String,
        #[arg(long)]
        threshold: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    language: PathBuf,
    #[arg(long)]
    occurrences: usize,
    #[command(flatten)]
    bounds: BoundArgs,
    #[command(flatten)]
    rels: RelFiles,
}

/// Human-readable lines plus the `key=value` result block.
#[derive(Default, Debug)]
pub struct Report {
    text: Vec<String>,
    kv: Vec<(String, String)>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn kv(&mut self, k: impl Into<String>, v: impl ToString) {
        self.kv.push((k.into(), v.to_string()));
    }

    fn write(&self, out: &mut dyn Write, format: Format) -> std::io::Result<()> {
        if format == Format::Text {
            for l in &self.text {
                writeln!(out, "{l}")?;
            }
        }
        writeln!(out, "---BEGIN RESULT---")?;
        for (k, v) in &self.kv {
            writeln!(out, "{k}={v}")?;
        }
        writeln!(out, "---END RESULT---")
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: maxones_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

fn relation_file(path: &Path) -> CliResult<Vec<(String, Relation)>> {
    let text = read(path)?;
    let rels = in_file(path, parse_relations(&text))?;
    if rels.is_empty() {
        return Err(CliError::Usage(format!("{}: no relations defined", path.display())));
    }
    Ok(rels)
}

fn table(files: &RelFiles) -> CliResult<BTreeMap<String, Relation>> {
    let mut t = BTreeMap::new();
    for p in &files.relation {
        t.extend(relation_file(p)?);
    }
    Ok(t)
}

fn pick(path: &Path, name: Option<&str>) -> CliResult<(String, Relation)> {
    let rels = relation_file(path)?;
    match name {
        None => Ok(rels.into_iter().next().expect("non-empty")),
        Some(n) => rels
            .into_iter()
            .find(|(m, _)| m == n)
            .ok_or_else(|| CliError::Usage(format!("{}: no relation named {n}", path.display()))),
    }
}

fn coords(text: &str) -> CliResult<CoordinateSet> {
    let idx = text
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad coordinate list {text:?}: {e}")))?;
    Ok(CoordinateSet::new(&idx)?)
}

fn tuples(r: &Relation) -> String {
    r.tuples().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

fn load_language(path: &Path, rels: &RelFiles) -> CliResult<ConstraintLanguage> {
    let t = table(rels)?;
    let text = read(path)?;
    // a language file may carry its own relation blocks ahead of the header
    let (defs, body) = match text.find("language ") {
        Some(i) if text[..i].contains("relation ") => (&text[..i], &text[i..]),
        _ => ("", text.as_str()),
    };
    let mut t = t;
    t.extend(in_file(path, parse_relations(defs))?);
    in_file(path, parse_language(body, &t))
}

fn load_instance(args: &InstanceArgs) -> CliResult<Instance> {
    let t = table(&args.rels)?;
    in_file(&args.instance, Instance::parse(&read(&args.instance)?, &t))
}

fn report_solution(rep: &mut Report, inst: &Instance, sol: Option<&Solution>) {
    match sol {
        None => {
            rep.line("infeasible");
            rep.kv("feasible", false);
        }
        Some(s) => {
            let ones: Vec<&str> = inst
                .names
                .iter()
                .zip(&s.assignment)
                .filter(|(_, b)| **b)
                .map(|(n, _)| n.as_str())
                .collect();
            rep.line(format!("measure {}", s.measure));
            rep.line(format!("ones: {}", ones.join(" ")));
            rep.kv("feasible", true);
            rep.kv("measure", s.measure);
            rep.kv("ones", ones.join(","));
        }
    }
}

fn relation_cmd(cmd: &RelationCmd, rep: &mut Report) -> CliResult<()> {
    match cmd {
        RelationCmd::Show { file } => {
            for (n, r) in relation_file(file)? {
                rep.line(render_relation(&n, &r).trim_end());
                rep.kv(format!("{n}.arity"), r.arity());
                rep.kv(format!("{n}.tuples"), tuples(&r));
            }
        }
        RelationCmd::Named { name } => {
            let r = resolve_relation(name, &BTreeMap::new())
                .ok_or_else(|| CliError::Usage(format!("unknown relation name {name}")))?;
            rep.line(render_relation(name, &r).trim_end());
            rep.kv("arity", r.arity());
            rep.kv("tuples", tuples(&r));
        }
        RelationCmd::Project(a) | RelationCmd::Flip(a) => {
            let (n, r) = pick(&a.file, a.name.as_deref())?;
            let c = coords(&a.coords)?;
            let out = if matches!(cmd, RelationCmd::Project(_)) { project(&r, &c)? } else { flip(&r, &c)? };
            rep.line(render_relation(&format!("{n}_{}", a.coords.replace(',', "_")), &out).trim_end());
            rep.kv("arity", out.arity());
            rep.kv("tuples", tuples(&out));
        }
    }
    Ok(())
}

fn analyze_cmd(cmd: &AnalyzeCmd, rep: &mut Report) -> CliResult<()> {
    match cmd {
        AnalyzeCmd::DeltaMatroid { file } => {
            for (n, r) in relation_file(file)? {
                match delta_matroid_witness(&r) {
                    None => {
                        rep.line(format!("{n}: true"));
                        rep.kv(format!("{n}.delta_matroid"), true);
                    }
                    Some(w) => {
                        rep.line(format!("{n}: false, witness {w}"));
                        rep.kv(format!("{n}.delta_matroid"), false);
                        rep.kv(format!("{n}.witness"), w);
                    }
                }
            }
        }
        AnalyzeCmd::Affine { file } => {
            for (n, r) in relation_file(file)? {
                let s = affine_form(&r)?;
                rep.line(format!("{n}: {s}{}", if s.is_coupled() { " (coupled)" } else { "" }));
                rep.kv(format!("{n}.system"), &s);
                rep.kv(format!("{n}.coupled"), s.is_coupled());
            }
        }
        AnalyzeCmd::QClass { file } => {
            for (n, r) in relation_file(file)? {
                match in_q(&r) {
                    Some(q) => {
                        rep.line(format!("{n}: {q}"));
                        rep.kv(format!("{n}.in_q"), true);
                        rep.kv(format!("{n}.factors"), q);
                    }
                    None => {
                        rep.line(format!("{n}: not in Q"));
                        rep.kv(format!("{n}.in_q"), false);
                    }
                }
            }
        }
        AnalyzeCmd::Coclone { file } => {
            let rels = relation_file(file)?;
            for (n, r) in &rels {
                let single = ConstraintLanguage::from_relations(n, [(n.as_str(), r.clone())]);
                let l = locate_coclone(&single);
                rep.line(format!("{n}: {l}"));
                rep.kv(format!("{n}.coclone"), l);
                rep.kv(format!("{n}.in_IE2"), coclone_member(r, CoCloneLabel::IE2));
            }
            let all = ConstraintLanguage::from_relations("file", rels.iter().map(|(n, r)| (n.as_str(), r.clone())));
            let l = locate_coclone(&all);
            rep.line(format!("language: {l}"));
            rep.kv("language.coclone", l);
        }
        AnalyzeCmd::Decompose { file } => {
            for (n, r) in relation_file(file)? {
                let parts = decompose(&r);
                let shown: Vec<String> = parts.iter().map(|(c, p)| format!("{c}:[{}]", tuples(p))).collect();
                rep.line(format!("{n}: {}", shown.join(" x ")));
                rep.kv(format!("{n}.parts"), parts.len());
                rep.kv(format!("{n}.factors"), shown.join(";"));
            }
        }
    }
    Ok(())
}

fn gadget_cmd(cmd: &GadgetCmd, rep: &mut Report) -> CliResult<()> {
    match cmd {
        GadgetCmd::Verify { gadget, rels } => {
            let t = table(rels)?;
            let g = in_file(gadget, Gadget::parse(&read(gadget)?))?;
            let target = resolve_relation(&g.target, &t)
                .ok_or_else(|| CliError::Usage(format!("{}: unknown target {}", gadget.display(), g.target)))?;
            let mut env = ConstraintLanguage::new("env");
            for c in &g.constraints {
                if let Some(r) = resolve_relation(&c.relation, &t) {
                    env.insert(&c.relation, r);
                }
            }
            let ok = in_file(gadget, verify_gadget(&target, &g, &env))?;
            rep.line(format!("{}: {}", g.target, if ok { "verified" } else { "does not represent the target" }));
            rep.kv("target", &g.target);
            rep.kv("verified", ok);
        }
        GadgetCmd::Search(a) => {
            let lang = load_language(&a.language, &a.rels)?;
            let t = table(&a.rels)?;
            let target = resolve_relation(&a.target, &t)
                .ok_or_else(|| CliError::Usage(format!("unknown target {}", a.target)))?;
            let res = search_gadget(&a.target, &target, &lang, a.occurrences, a.bounds.bounds())?;
            rep.line(format!("search {} after {} nodes", res.outcome, res.nodes));
            if let Some(g) = &res.gadget {
                rep.line(g.to_string().trim_end());
            }
            rep.kv("outcome", res.outcome);
            rep.kv("nodes", res.nodes);
            if let Some(g) = &res.gadget {
                rep.kv("constraints", g.constraints.len());
                rep.kv("aux", g.aux_count);
            }
        }
        GadgetCmd::EqOrImpl { file, name } => {
            let (_, r) = pick(file, name.as_deref())?;
            let (g, kind) = derive_eq_or_impl(&r)?;
            rep.line(g.to_string().trim_end());
            rep.kv("link", kind);
            rep.kv("constraints", g.constraints.len());
        }
        GadgetCmd::Nand { file, name, m } => {
            let (_, r) = pick(file, name.as_deref())?;
            let x = derive_nand_m(&r, *m)?;
            rep.line(format!("NAND{m} on coordinates {x}"));
            rep.kv("coords", x);
        }
    }
    Ok(())
}

fn catalog_cmd(cmd: &CatalogCmd, rep: &mut Report) {
    match cmd {
        CatalogCmd::List => {
            for e in catalog() {
                rep.line(format!("{:<5} {:<16} {}", e.name, e.tag.to_string(), e.tuples));
                rep.kv(e.name, e.tuples);
            }
        }
        CatalogCmd::Verify => {
            let r = verify_catalog();
            rep.line(r.to_string().trim_end());
            rep.kv("verified", r.passed());
            rep.kv("entries", r.entries.len());
            rep.kv("summary", r.summary());
        }
    }
}

fn solve_cmd(cmd: &SolveCmd, budget: u64, rep: &mut Report) -> CliResult<()> {
    match cmd {
        SolveCmd::Exact(a) => {
            let inst = load_instance(a)?;
            let s = solve_exact_with_budget(&inst, budget)?;
            report_solution(rep, &inst, s.as_ref());
        }
        SolveCmd::Greedy { inst, occurrences } => {
            let i = load_instance(inst)?;
            let l = occurrences
                .or(i.bound)
                .unwrap_or_else(|| i.max_occurrence().max(1));
            let s = greedy_apx(&i, l)?;
            report_solution(rep, &i, Some(&s));
            rep.kv("occurrences", l);
        }
        SolveCmd::Ilp2(a) => {
            let inst = load_instance(a)?;
            let model = to_ilp2(&inst)?;
            rep.line(model.to_string().trim_end());
            let s = solve_ilp2_with_budget(&model, budget)?;
            report_solution(rep, &inst, s.as_ref());
            rep.kv("max_column_sum", model.column_sums().into_iter().max().unwrap_or(0));
        }
    }
    Ok(())
}

fn reduce_cmd(cmd: &ReduceCmd, rep: &mut Report) -> CliResult<()> {
    match cmd {
        ReduceCmd::Cycle { inst, gadget, link } => {
            let i = load_instance(inst)?;
            let g = in_file(gadget, Gadget::parse(&read(gadget)?))?;
            let t = table(&inst.rels)?;
            let mut env = ConstraintLanguage::new("env");
            for c in &g.constraints {
                let r = resolve_relation(&c.relation, &t)
                    .ok_or_else(|| CliError::Usage(format!("{}: unknown relation {}", gadget.display(), c.relation)))?;
                env.insert(&c.relation, r);
            }
            let kind = match link {
                LinkArg::Eq2 => LinkKind::Eq2,
                LinkArg::Impl => LinkKind::Impl,
            };
            let out = cycle_reduction(&i, kind, &g, &env)?;
            rep.line(out.to_string().trim_end());
            rep.kv("vars", out.names.len());
            rep.kv("constraints", out.constraints.len());
            rep.kv("max_occurrence", out.max_occurrence());
        }
        ReduceCmd::Mis { graph, occurrences } => {
            let g = in_file(graph, WeightedGraph::parse(&read(graph)?))?;
            let out = in_file(graph, mis_to_maxones(&g, *occurrences))?;
            rep.line(out.to_string().trim_end());
            rep.kv("vars", out.names.len());
            rep.kv("constraints", out.constraints.len());
        }
        ReduceCmd::Max2sat3 { formula } => {
            let f = in_file(formula, Formula::parse(&read(formula)?))?;
            let chain = in_file(formula, max2sat3_gadget_chain(&f))?;
            rep.line(chain.graph.to_string().trim_end());
            rep.kv("nodes", chain.graph.names.len());
            rep.kv("edges", chain.graph.edges.len());
            rep.kv("instance_constraints", chain.instance.constraints.len());
        }
        ReduceCmd::Dropconst { inst, name, threshold } => {
            let i = load_instance(inst)?;
            let (out, map) = drop_constants(&i, name)?;
            rep.line(out.to_string().trim_end());
            rep.kv("c", map.c);
            rep.kv("L", map.l);
            if let Some(k) = threshold {
                let k = parse_weight(k).ok_or_else(|| CliError::Usage(format!("bad threshold {k}")))?;
                rep.kv("threshold", map.apply(k)?);
            }
        }
    }
    Ok(())
}

fn classify_cmd(a: &ClassifyArgs, seed: u64, rep: &mut Report) -> CliResult<()> {
    let lang = load_language(&a.language, &a.rels)?;
    let opts = ClassifyOptions {
        search: a.bounds.bounds(),
        seed,
    };
    let v = classify(&lang, a.occurrences, &opts)?;
    let verified = v.reverify();
    rep.line(v.to_string().trim_end());
    rep.kv("verdict", &v.class);
    for (i, e) in v.evidence.iter().enumerate() {
        rep.kv(format!("evidence.{i}"), format!("{}: {}", e.tag(), e.describe()));
    }
    rep.kv("evidence_verified", verified);
    Ok(())
}

fn execute(cli: &Cli) -> CliResult<Report> {
    let mut rep = Report::default();
    match &cli.command {
        Command::Relation(c) => relation_cmd(c, &mut rep)?,
        Command::Analyze(c) => analyze_cmd(c, &mut rep)?,
        Command::Gadget(c) => gadget_cmd(c, &mut rep)?,
        Command::Catalog(c) => catalog_cmd(c, &mut rep),
        Command::Solve(c) => solve_cmd(c, cli.budget, &mut rep)?,
        Command::Reduce(c) => reduce_cmd(c, &mut rep)?,
        Command::Classify(a) => classify_cmd(a, cli.seed, &mut rep)?,
    }
    Ok(rep)
}

/// Runs one command; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    if cli.jobs > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match execute(&cli) {
        Ok(rep) => match rep.write(out, cli.format) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
