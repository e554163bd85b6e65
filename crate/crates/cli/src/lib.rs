//! The `ultraframe` command line, as a library so it can be driven from tests.
//!
//! Exit codes: 0 when a verdict was computed (including negative ones),
//! 1 for bad input, 2 when a resource cap was hit, 3 when an internal
//! cross-check failed.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ultraframe::census::{
    generated_substructure_verdict, hull_census, modal_logic_coincides, reflexive_point_in_ue, ue_skeleton,
    FamilyPresentation, GeneratedVerdict, ReflexiveVerdict,
};
use ultraframe::fo::{ef_game, eval_fo, los_like_check, parse_fo, satisfying_set, ultraproduct, Assignment, FOFormula};
use ultraframe::gen;
use ultraframe::modal::{eval_modal, frame_valid, modally_equivalent_upto, n_bisimilar, parse_modal, truth_set, Model, ModalFormula, Valuation};
use ultraframe::{build_ue, canonical_form, eta_is_isomorphism, hull, Error, Frame, Limits, Result, Ultrafilter, VertexSet};

#[derive(Parser, Debug)]
#[command(name = "ultraframe", version, about = "Ultrafilter extensions, hull censuses and logic checkers for Kripke frames")]
struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = "ULTRAFRAME_JOBS")]
    jobs: Option<usize>,
    /// Seed for generated test data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ultrafilter extension of a finite frame.
    #[command(subcommand)]
    Ue(UeCommand),
    /// Modal formulas on a frame.
    #[command(subcommand)]
    Modal(ModalCommand),
    /// Bounded bisimilarity of two pointed models.
    Bisim {
        frame1: PathBuf,
        world1: String,
        frame2: PathBuf,
        world2: String,
        #[arg(long)]
        depth: usize,
        /// Valuation of the first model, `p0=a,b` (repeatable).
        #[arg(long = "val1")]
        val1: Vec<String>,
        /// Valuation of the second model.
        #[arg(long = "val2")]
        val2: Vec<String>,
    },
    /// First-order formulas and games.
    #[command(subcommand)]
    Fo(FoCommand),
    /// Ultraproduct of frames over the principal ultrafilter at an index.
    Ultraproduct {
        #[arg(long)]
        index: usize,
        #[arg(required = true)]
        frames: Vec<PathBuf>,
    },
    /// The depth-n hull of a vertex and its type certificate.
    Hull {
        frame: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        depth: usize,
    },
    /// Hull-type census of a family.
    Census {
        family: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Finite skeleton of a family's ultrafilter extension.
    Skeleton {
        family: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Verdicts about a family's ultrafilter extension.
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Random test data, controlled by `--seed`.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand, Debug)]
enum UeCommand {
    /// Print the extension as frame JSON.
    Build {
        frame: PathBuf,
        /// Also print Graphviz DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Check the three definitions of the relation and the embedding.
    CrossCheck { frame: PathBuf },
}

#[derive(Args, Debug)]
struct Valued {
    /// Letter extension, `p0=a,b` (repeatable).
    #[arg(long = "val")]
    val: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum ModalCommand {
    /// Truth set of a formula, or its value at one world.
    Eval {
        frame: PathBuf,
        /// A formula, or `@file` with one formula per line.
        formula: String,
        #[arg(long)]
        at: Option<String>,
        #[command(flatten)]
        valuation: Valued,
    },
    /// Validity on the frame under every valuation.
    Valid {
        frame: PathBuf,
        /// A formula, or `@file` with one formula per line.
        formula: String,
    },
}

#[derive(Subcommand, Debug)]
enum FoCommand {
    /// Evaluate a formula; with one unassigned free variable print its extension.
    Eval {
        frame: PathBuf,
        /// A formula, or `@file` with one formula per line.
        formula: String,
        /// `x=a` (repeatable).
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Play the k-round Ehrenfeucht-Fraisse game.
    Ef {
        #[arg(long)]
        rounds: usize,
        frame1: PathBuf,
        frame2: PathBuf,
    },
    /// Compare a one-variable formula on the frame and on its extension.
    LosLike {
        frame: PathBuf,
        formula: String,
        #[arg(long)]
        at: String,
    },
}

#[derive(Subcommand, Debug)]
enum DetectCommand {
    /// Does the extension have a reflexive point?
    Reflexive {
        family: PathBuf,
        #[arg(long, default_value_t = 10)]
        threshold: usize,
    },
    /// Is the frame a generated substructure of its extension?
    Generated { family: PathBuf },
    /// Do the frame and its extension have the same modal logic up to depth n?
    Lambda {
        family: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// A random frame.
    Frame {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Cap on in- plus out-degree instead of a density.
        #[arg(long)]
        max_deg: Option<usize>,
    },
    /// A random modal formula.
    Modal {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        letters: u32,
    },
    /// A random first-order sentence.
    Sentence {
        #[arg(long)]
        rank: usize,
    },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Error::resource(format!("cannot start worker pool: {e}"))),
    };
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_frame(path: &Path) -> Result<Frame> {
    Frame::from_json(&read(path)?)
}

fn load_family(path: &Path) -> Result<FamilyPresentation> {
    FamilyPresentation::from_json(&read(path)?)
}

/// `text`, or the non-blank, non-comment lines of the file after `@`.
fn formula_texts(text: &str) -> Result<Vec<String>> {
    match text.strip_prefix('@') {
        Some(path) => Ok(read(Path::new(path))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()),
        None => Ok(vec![text.to_string()]),
    }
}

fn modal_formulas(text: &str) -> Result<Vec<ModalFormula>> {
    formula_texts(text)?.iter().map(|t| parse_modal(t)).collect()
}

fn fo_formulas(text: &str) -> Result<Vec<FOFormula>> {
    formula_texts(text)?.iter().map(|t| parse_fo(t)).collect()
}

fn split_pair(item: &str) -> Result<(&str, &str)> {
    item.split_once('=').ok_or_else(|| Error::input(format!("expected name=value, got {item:?}")))
}

fn parse_valuation(frame: &Frame, items: &[String]) -> Result<Valuation> {
    let mut out = Valuation::new();
    for item in items {
        let (letter, ids) = split_pair(item)?;
        let p: u32 = letter
            .strip_prefix('p')
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| Error::input(format!("letters are p0, p1, ...; got {letter:?}")))?;
        let ids: Vec<&str> = ids.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let set = frame.set_of_ids(&ids)?;
        if out.insert(p, set).is_some() {
            return Err(Error::input(format!("letter {letter} given twice")));
        }
    }
    Ok(out)
}

fn names(frame: &Frame, set: &VertexSet) -> String {
    serde_json::to_string(&frame.names(set)).expect("strings serialize")
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serializes")
}

fn dispatch(cli: &Cli) -> Result<String> {
    let limits = Limits::from_env();
    let mut out = String::new();
    match &cli.command {
        Command::Ue(UeCommand::Build { frame, dot }) => {
            let ue = build_ue(&load_frame(frame)?, &limits)?;
            writeln!(out, "{}", ue.to_json()).ok();
            if *dot {
                out.push_str(&ue.to_dot());
            }
        }
        Command::Ue(UeCommand::CrossCheck { frame }) => {
            let f = load_frame(frame)?;
            // build_ue compares A, B and C on every pair and fails loudly
            let ue = build_ue(&f, &limits)?;
            if !eta_is_isomorphism(&f, &ue) {
                return Err(Error::defect("A=B=C: ok; eta-iso: FAILED"));
            }
            writeln!(out, "A=B=C: ok; eta-iso: ok").ok();
        }
        Command::Modal(ModalCommand::Eval { frame, formula, at, valuation }) => {
            let f = load_frame(frame)?;
            let model = Model::new(f.clone(), parse_valuation(&f, &valuation.val)?)?;
            let at = at.as_deref().map(|w| f.vertex(w)).transpose()?;
            for phi in modal_formulas(formula)? {
                match at {
                    Some(w) => writeln!(out, "{}", eval_modal(&model, w, &phi)?),
                    None => writeln!(out, "{}", names(&f, &truth_set(&model, &phi))),
                }
                .ok();
            }
        }
        Command::Modal(ModalCommand::Valid { frame, formula }) => {
            let f = load_frame(frame)?;
            for phi in modal_formulas(formula)? {
                let v = frame_valid(&f, &phi, &limits)?;
                match v.counterexample {
                    None => writeln!(out, "valid"),
                    Some((val, w)) => {
                        let shown: Vec<String> = val.iter().map(|(p, s)| format!("p{p}={}", f.names(s).join(","))).collect();
                        writeln!(out, "not valid: fails at {} under {}", f.id(w), shown.join(" "))
                    }
                }
                .ok();
            }
        }
        Command::Bisim { frame1, world1, frame2, world2, depth, val1, val2 } => {
            let (f1, f2) = (load_frame(frame1)?, load_frame(frame2)?);
            let m1 = Model::new(f1.clone(), parse_valuation(&f1, val1)?)?;
            let m2 = Model::new(f2.clone(), parse_valuation(&f2, val2)?)?;
            let (w1, w2) = (f1.vertex(world1)?, f2.vertex(world2)?);
            let bisimilar = n_bisimilar(&m1, w1, &m2, w2, *depth)?;
            let letters: Vec<u32> =
                m1.valuation().keys().chain(m2.valuation().keys()).copied().collect::<BTreeSet<_>>().into_iter().collect();
            let eq = modally_equivalent_upto(&m1, w1, &m2, w2, *depth, &letters, &limits)?;
            if eq.equivalent != bisimilar {
                return Err(Error::defect("bisimulation and modal equivalence disagree"));
            }
            if bisimilar {
                writeln!(out, "bisimilar at depth {depth}").ok();
            } else {
                writeln!(out, "not bisimilar at depth {depth}").ok();
                if let Some(w) = eq.witness {
                    writeln!(out, "distinguished by: {w}").ok();
                }
            }
        }
        Command::Fo(FoCommand::Eval { frame, formula, assign }) => {
            let f = load_frame(frame)?;
            let mut asg = Assignment::new();
            for item in assign {
                let (x, id) = split_pair(item)?;
                asg.insert(x.to_string(), f.vertex(id)?);
            }
            for phi in fo_formulas(formula)? {
                let open: Vec<String> = phi.free_vars().into_iter().filter(|x| !asg.contains_key(x)).collect();
                match open.as_slice() {
                    [] => writeln!(out, "{}", eval_fo(&f, &phi, &asg)?).ok(),
                    [x] if asg.is_empty() => writeln!(out, "{}", names(&f, &satisfying_set(&f, &phi, x)?)).ok(),
                    _ => return Err(Error::input(format!("unassigned free variables {open:?}"))),
                };
            }
        }
        Command::Fo(FoCommand::Ef { rounds, frame1, frame2 }) => {
            let (f1, f2) = (load_frame(frame1)?, load_frame(frame2)?);
            let game = ef_game(&f1, &f2, *rounds, &limits)?;
            if game.duplicator_wins {
                writeln!(out, "WINNER: Duplicator ({rounds} rounds)").ok();
            } else {
                writeln!(out, "WINNER: Spoiler ({rounds} rounds)").ok();
                for (i, m) in game.spoiler_line.iter().enumerate() {
                    let reply = m.duplicator.as_deref().map_or("no reply".to_string(), |d| format!("Duplicator answers {d}"));
                    writeln!(out, "  {}. Spoiler plays {} in structure {}; {reply}", i + 1, m.spoiler, m.structure).ok();
                }
            }
        }
        Command::Fo(FoCommand::LosLike { frame, formula, at }) => {
            let f = load_frame(frame)?;
            let u = Ultrafilter::principal(&f, f.vertex(at)?)?;
            for phi in fo_formulas(formula)? {
                if !los_like_check(&f, &phi, &u, &limits)? {
                    return Err(Error::defect(format!("{phi} separates the frame from its extension at {at}")));
                }
                writeln!(out, "agrees: {phi}").ok();
            }
        }
        Command::Ultraproduct { index, frames } => {
            let fs = frames.iter().map(|p| load_frame(p)).collect::<Result<Vec<_>>>()?;
            let d = Ultrafilter::on_indices(fs.len(), *index)?;
            writeln!(out, "{}", ultraproduct(&fs, &d, &limits)?.frame.to_json()).ok();
        }
        Command::Hull { frame, at, depth } => {
            let f = load_frame(frame)?;
            let h = hull(&f, f.vertex(at)?, *depth)?;
            writeln!(out, "{}", h.to_json()).ok();
            writeln!(out, "type: {}", canonical_form(&h)).ok();
        }
        Command::Census { family, depth } => {
            writeln!(out, "{}", hull_census(&load_family(family)?, *depth)?.to_json()).ok();
        }
        Command::Skeleton { family, depth, budget } => {
            writeln!(out, "{}", ue_skeleton(&load_family(family)?, *depth, *budget)?.to_json()).ok();
        }
        Command::Detect(DetectCommand::Reflexive { family, threshold }) => {
            let v = reflexive_point_in_ue(&load_family(family)?, *threshold)?;
            let head = match v {
                ReflexiveVerdict::Yes { .. } => "Yes",
                ReflexiveVerdict::No { .. } => "No",
                ReflexiveVerdict::Unknown { .. } => "Unknown",
            };
            writeln!(out, "{head}\n{}", json(&v)).ok();
        }
        Command::Detect(DetectCommand::Generated { family }) => {
            let v = generated_substructure_verdict(&load_family(family)?)?;
            let head = match v {
                GeneratedVerdict::Yes { .. } => "Yes",
                GeneratedVerdict::No { .. } => "No",
                GeneratedVerdict::Unknown { .. } => "Unknown",
            };
            writeln!(out, "{head}\n{}", json(&v)).ok();
        }
        Command::Detect(DetectCommand::Lambda { family, depth, budget }) => {
            let report = modal_logic_coincides(&load_family(family)?, *depth, *budget)?;
            writeln!(out, "{}\n{}", report.coincides, json(&report)).ok();
        }
        Command::Gen(g) => {
            let mut r = gen::rng(cli.seed);
            match g {
                GenCommand::Frame { vertices, density, max_deg } => {
                    let f = match max_deg {
                        Some(m) => gen::random_bounded_frame(&mut r, *vertices, *m),
                        None if (0.0..=1.0).contains(density) => gen::random_frame(&mut r, *vertices, *density),
                        None => return Err(Error::input(format!("density must be in [0, 1], got {density}"))),
                    };
                    writeln!(out, "{}", f.to_json()).ok();
                }
                GenCommand::Modal { depth, letters } => {
                    writeln!(out, "{}", gen::random_modal(&mut r, *depth, (*letters).max(1))).ok();
                }
                GenCommand::Sentence { rank } => {
                    writeln!(out, "{}", gen::random_sentence(&mut r, *rank)).ok();
                }
            }
        }
    }
    Ok(out)
}
