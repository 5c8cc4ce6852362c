//! One function per subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use grsc_core::conditions::{self, Condition, ConditionReport, Rational};
use grsc_core::corpus::{self, Figure5Params};
use grsc_core::cycles::BudgetExceeded;
use grsc_core::diagram::{self, Diagram, DiagramError};
use grsc_core::format::{parse_graph, write_graph};
use grsc_core::geometry::{self, BallConfig, EmbedConfig, GeometryError, MemberStats, SearchConfig};
use grsc_core::graph::LabelledGraph;
use grsc_core::pieces::{self, PieceError, PieceIndex};
use grsc_core::presentation::{self, Presentation, PresentationError, Verdict};
use grsc_core::solver::{Solver, SolverConfig, SolverError, VerifiedCondition, WordVerdict};
use serde::Serialize;
use serde_json::json;

use crate::report::{to_value, CliError, Outcome, Status};
use crate::Global;

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn load_graph(path: &Path) -> Result<LabelledGraph, CliError> {
    parse_graph(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_condition(s: &str) -> Result<Condition, CliError> {
    s.parse().map_err(|e: conditions::ConditionError| CliError::Input(e.to_string()))
}

fn parse_ratio(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Input(format!("`{s}` is not a positive rational"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
    if n <= 0 || d <= 0 {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn budget(e: BudgetExceeded) -> CliError {
    CliError::Budget(e.to_string())
}

fn piece_error(e: PieceError) -> CliError {
    match e {
        PieceError::Budget(b) => budget(b),
        e => CliError::module("pieces", e),
    }
}

fn presentation_error(e: PresentationError) -> CliError {
    match e {
        PresentationError::Budget(b) => budget(b),
        PresentationError::Piece(p) => piece_error(p),
        e => CliError::module("presentation", e),
    }
}

fn solver_error(e: SolverError) -> CliError {
    CliError::module("solver", e)
}

fn geometry_error(e: GeometryError) -> CliError {
    match e {
        GeometryError::Budget(b) => budget(b),
        GeometryError::Solver(s) => solver_error(s),
        e => CliError::module("geometry", e),
    }
}

fn verified(g: &LabelledGraph, cond: Condition, cycles: u64) -> Result<(ConditionReport, VerifiedCondition), CliError> {
    let report = conditions::check(g, cond, cycles).map_err(budget)?;
    let v = VerifiedCondition::from_report(&report).map_err(solver_error)?;
    Ok((report, v))
}

fn solver_config(global: &Global, certificates: bool) -> SolverConfig {
    SolverConfig { node_budget: global.nodes, certificates, ..SolverConfig::default() }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CheckArgs {
    pub graph: PathBuf,
    /// C7, Cp:1/6, Gr6, Grp:1/6, ...
    #[arg(long)]
    pub cond: String,
}

pub fn check(a: CheckArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let cond = parse_condition(&a.cond)?;
    let r = conditions::check(&g, cond, global.budget).map_err(budget)?;
    Ok(Outcome::new(r.holds, r))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PiecesArgs {
    pub graph: PathBuf,
    /// Only essential pieces (readable from two automorphism orbits).
    #[arg(long)]
    pub essential: bool,
    #[arg(long, default_value_t = 16)]
    pub max_len: usize,
}

pub fn pieces(a: PiecesArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let idx = PieceIndex::new(&g).map_err(piece_error)?;
    let ps = pieces::maximal_pieces(&idx, a.essential, a.max_len, global.budget).map_err(piece_error)?;
    let longest = ps.iter().map(|p| p.length).max().unwrap_or(0);
    Ok(Outcome::new(
        true,
        json!({ "essential": a.essential, "max_len": a.max_len, "count": ps.len(), "longest": longest, "pieces": ps }),
    ))
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresentMode {
    Simple,
    Pi1,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PresentArgs {
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = PresentMode::Simple)]
    pub mode: PresentMode,
}

fn presentation_json(p: &Presentation) -> serde_json::Value {
    let merged: Vec<_> = p.merged.iter().map(|(kept, prov)| json!({ "kept": kept, "dropped": prov })).collect();
    json!({
        "alphabet": p.alphabet.names(),
        "relators": p.relator_strings(),
        "provenance": p.provenance,
        "merged": merged,
        "max_relator_len": p.max_relator_len(),
        "conciseness": presentation::presentation_conciseness(p),
    })
}

pub fn present(a: PresentArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let p = match a.mode {
        PresentMode::Simple => presentation::relators_simple_cycles(&g, global.budget).map_err(budget)?,
        PresentMode::Pi1 => presentation::relators_pi1(&g),
    };
    Ok(Outcome::new(true, presentation_json(&p)))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassifyArgs {
    pub graph: PathBuf,
    /// Extract an explicit free-subgroup witness when there is one.
    #[arg(long)]
    pub witness: bool,
}

pub fn classify(a: ClassifyArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let c = presentation::classify(&g, global.budget, a.witness).map_err(presentation_error)?;
    let status = if matches!(c.verdict, Verdict::Inconclusive { .. }) { Status::Unknown } else { Status::Holds };
    Ok(Outcome::with(status, c))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WordArgs {
    pub graph: PathBuf,
    /// Condition to verify first; it fixes the area bound of the search.
    #[arg(long)]
    pub cond: String,
    /// Space-separated letters, `-x` for an inverse.
    #[arg(long, allow_hyphen_values = true)]
    pub word: String,
    /// Write a van Kampen diagram for a trivial word.
    #[arg(long)]
    pub emit_diagram: Option<PathBuf>,
    /// Search only; skip abelian and finite-quotient certificates.
    #[arg(long)]
    pub no_certificates: bool,
}

pub fn word(a: WordArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let cond = parse_condition(&a.cond)?;
    let w = g.alphabet().parse_word(&a.word).map_err(|e| CliError::Input(e.to_string()))?.free_reduce();
    let (_, verified) = verified(&g, cond, global.budget)?;
    let p = presentation::relators_simple_cycles(&g, global.budget).map_err(budget)?;
    let solver = Solver::new(&p, verified, solver_config(global, !a.no_certificates));
    let verdict = solver.solve(&w).map_err(solver_error)?;
    let mut diagram_file = None;
    if let (Some(path), WordVerdict::Trivial { derivation, .. }) = (&a.emit_diagram, &verdict) {
        let d = diagram::derivation_to_diagram(&w, derivation, &p).map_err(|e| CliError::module("diagram", e))?;
        write_text(path, &d.to_json())?;
        diagram_file = Some(json!({ "path": path, "area": d.area(), "boundary_length": d.boundary().len() }));
    }
    let status = match verdict {
        WordVerdict::Trivial { .. } => Status::Holds,
        WordVerdict::Nontrivial { .. } => Status::Fails,
        WordVerdict::Unknown { .. } => Status::Unknown,
    };
    Ok(Outcome::with(
        status,
        json!({
            "word": g.alphabet().format_word(&w),
            "length": w.len(),
            "condition": verified,
            "area_bound": verified.area_bound(w.len()),
            "relators": p.relators.len(),
            "verdict": verdict,
            "diagram": diagram_file,
        }),
    ))
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramCommand {
    /// Validate a diagram file and lift its faces into a graph.
    Verify(DiagramArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DiagramArgs {
    pub diagram: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    /// Graphical mode: lifts may be ambiguous up to a graph automorphism.
    #[arg(long)]
    pub gr: bool,
}

pub fn diagram_verify(a: DiagramArgs, _global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let d = Diagram::from_json(&read_text(&a.diagram)?).map_err(|e| CliError::Input(format!("{}: {e}", a.diagram.display())))?;
    let validation = match d.validate() {
        Ok(v) => v,
        Err(e @ (DiagramError::NotPlanar { .. } | DiagramError::NotSimplyConnected { .. })) => {
            return Ok(Outcome::new(false, json!({ "valid": false, "reason": e.to_string() })));
        }
        Err(e) => return Err(CliError::module("diagram", e)),
    };
    let lifts = match diagram::lift_faces(&d, &g, a.gr) {
        Ok(l) => Ok(l),
        Err(e @ (DiagramError::NoLift(_) | DiagramError::AmbiguousLift { .. } | DiagramError::Unlabelled)) => {
            Err(e.to_string())
        }
        Err(e) => return Err(CliError::module("diagram", e)),
    };
    let forgotten = diagram::forget_degree2(&d);
    let pq = json!({
        "(3,6)": diagram::is_pq_diagram(&forgotten, 3, 6, false),
        "(3,7)": diagram::is_pq_diagram(&forgotten, 3, 7, false),
        "[3,6]": diagram::is_pq_diagram(&forgotten, 3, 6, true),
    });
    let lifted = lifts.is_ok();
    let (lifts, lift_error) = match lifts {
        Ok(l) => (to_value(l), None),
        Err(e) => (serde_json::Value::Null, Some(e)),
    };
    Ok(Outcome::new(
        lifted,
        json!({
            "valid": true,
            "validation": validation,
            "lifts": lifts,
            "lift_error": lift_error,
            "forgotten": pq,
            "area": diagram::area_bounds(&d),
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EmbedArgs {
    pub graph: PathBuf,
    /// Component name, or its index when no component has that name.
    #[arg(long)]
    pub component: String,
    /// Ball radius; defaults to the least admissible one.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Base vertex, local to the component.
    #[arg(long, default_value_t = 0)]
    pub base: usize,
    /// Condition backing the solver; by default the strongest of Grp:1/6, Gr7, Gr6 that holds.
    #[arg(long)]
    pub cond: Option<String>,
    /// Check injectivity only, without Cayley distances.
    #[arg(long)]
    pub no_distances: bool,
}

fn strongest_condition(g: &LabelledGraph, budget: u64) -> Result<(ConditionReport, VerifiedCondition), CliError> {
    let mut last = None;
    for c in ["Grp:1/6", "Gr7", "Gr6"] {
        match verified(g, parse_condition(c)?, budget) {
            Ok(v) => return Ok(v),
            Err(e @ CliError::Budget(_)) => return Err(e),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("three attempts"))
}

pub fn embed(a: EmbedArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let comp = g
        .find_component(&a.component)
        .or_else(|| a.component.parse().ok().filter(|&c: &usize| c < g.components().len()))
        .ok_or_else(|| CliError::Input(format!("no component `{}`", a.component)))?;
    let vertices = &g.components()[comp].vertices;
    let &base = vertices
        .get(a.base)
        .ok_or_else(|| CliError::Input(format!("component has {} vertices, base {} is out of range", vertices.len(), a.base)))?;
    let (report, verified) = match &a.cond {
        Some(c) => verified(&g, parse_condition(c)?, global.budget)?,
        None => strongest_condition(&g, global.budget)?,
    };
    let p = presentation::relators_simple_cycles(&g, global.budget).map_err(budget)?;
    let solver = Solver::new(&p, verified, solver_config(global, true));
    let diameter = MemberStats::of(&g.component_graph(comp)).diameter as usize;
    let radius = a.radius.unwrap_or(diameter + p.max_relator_len());
    let cfg = EmbedConfig { radius, distances: !a.no_distances, ball: BallConfig::default() };
    let e = geometry::embed_component(&g, comp, base, &solver, cfg).map_err(geometry_error)?;
    let holds = e.labels_respected && e.injective && e.isometric != Some(false);
    Ok(Outcome::new(holds, json!({ "condition": report.condition, "radius": radius, "embedding": e })))
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LacunaryArg {
    Girth,
    Search,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LacunaryArgs {
    /// Each component is one member of the sequence, in file order.
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = LacunaryArg::Girth)]
    pub mode: LacunaryArg,
    /// Sparseness constant for the girth set.
    #[arg(long = "K", default_value = "3")]
    pub k: String,
    /// Override the diameter/girth constant C (girth mode).
    #[arg(long)]
    pub c: Option<String>,
    /// Longest relation tried per member (search mode).
    #[arg(long, default_value_t = 6)]
    pub max_len: usize,
}

pub fn lacunary(a: LacunaryArgs, global: &Global) -> Result<Outcome, CliError> {
    let g = load_graph(&a.graph)?;
    let k = parse_ratio(&a.k)?;
    let seq: Vec<LabelledGraph> = (0..g.components().len()).map(|c| g.component_graph(c)).collect();
    let stats: Vec<MemberStats> = seq.iter().map(MemberStats::of).collect();
    let selection = match a.mode {
        LacunaryArg::Girth => {
            let c = a.c.as_deref().map(parse_ratio).transpose()?;
            geometry::lacunary_select_girth(&stats, c)
        }
        LacunaryArg::Search => {
            let cfg = SearchConfig { max_len: a.max_len, node_budget: global.nodes, cycle_budget: global.budget, certificates: true };
            geometry::lacunary_select_search(&seq, cfg)
        }
    };
    let (holds, report) = match selection {
        Ok(r) => (true, r),
        Err(GeometryError::InsufficientData { partial, .. }) => (false, *partial),
        Err(e) => return Err(geometry_error(e)),
    };
    let mut girths: Vec<u64> = stats.iter().map(|s| s.girth).filter(|&x| x > 0).collect();
    girths.sort_unstable();
    girths.dedup();
    let sparse = geometry::sparse_check(&girths, k).map_err(geometry_error)?;
    let names: Vec<String> = (0..g.components().len()).map(|c| g.component_name(c)).collect();
    Ok(Outcome::new(holds, json!({ "members": names, "selection": report, "girth_sparseness": sparse })))
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Figure1,
    Classical,
    Figure5,
    CayleyCycle,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Generators (classical).
    #[arg(long, default_value = "a b")]
    pub alphabet: String,
    /// Relator word (classical); repeat for several.
    #[arg(long = "relator", allow_hyphen_values = true)]
    pub relators: Vec<String>,
    /// Members 1..=n (figure5).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Seed words per block (figure5).
    #[arg(long, default_value_t = 6)]
    pub p: usize,
    /// Cycle length (cayley-cycle).
    #[arg(long, default_value_t = 7)]
    pub k: usize,
    /// Cycle letter (cayley-cycle).
    #[arg(long, default_value = "a")]
    pub letter: String,
}

pub fn gen(a: GenArgs, _global: &Global) -> Result<Outcome, CliError> {
    let corpus_err = |e: corpus::CorpusError| CliError::Input(e.to_string());
    let g = match a.kind {
        GenKind::Figure1 => corpus::figure1(),
        GenKind::Classical => {
            let alphabet = grsc_core::alphabet::Alphabet::new(a.alphabet.split_whitespace())
                .map_err(|e| CliError::Input(e.to_string()))?;
            let rels = a
                .relators
                .iter()
                .map(|r| alphabet.parse_word(r).map_err(|e| CliError::Input(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            corpus::classical(&alphabet, &rels).map_err(corpus_err)?
        }
        GenKind::Figure5 => {
            let members = corpus::figure5(Figure5Params { p: a.p }, a.n, corpus::figure5_default_f).map_err(corpus_err)?;
            let parts: Vec<LabelledGraph> = members.into_iter().map(|m| m.graph).collect();
            LabelledGraph::disjoint_union(corpus::figure5_alphabet(), &parts)
                .map_err(|e| CliError::Internal(e.to_string()))?
        }
        GenKind::CayleyCycle => corpus::cayley_cycle(a.k, &a.letter).map_err(corpus_err)?,
    };
    let text = write_graph(&g);
    write_text(&a.output, &text)?;
    let round_trip = parse_graph(&read_text(&a.output)?).is_ok_and(|h| write_graph(&h) == text);
    Ok(Outcome::new(
        round_trip,
        json!({
            "output": a.output,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "components": (0..g.components().len()).map(|c| g.component_name(c)).collect::<Vec<_>>(),
            "round_trip": round_trip,
        }),
    ))
}
