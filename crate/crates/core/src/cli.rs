//! The `cantor` command-line front end.
//!
//! Exit codes: 0 for success or a true/found answer, 1 for a checked false or
//! absent answer, 2 for usage, input or validation errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::findyn::{self, EquivariantMap, FiniteSystem, StateId};
use crate::fraisse::{self, AmalgamProblem};
use crate::odometer::{self, OdometerSpec};
use crate::spiral;
use crate::tower::{self, LevelPartition, LiftOutcome, Tower};

#[derive(Parser, Debug)]
#[command(name = "cantor", version, about = "Cantor-set dynamics through towers of finite systems")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spiral levels W_n and their collapse maps.
    #[command(subcommand)]
    Spiral(SpiralCmd),
    /// Odometers given as `pre:period` digit bases.
    #[command(subcommand)]
    Odometer(OdometerCmd),
    /// Towers stored as JSON.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Joint embedding, amalgamation and generic chains.
    #[command(subcommand)]
    Fraisse(FraisseCmd),
}

#[derive(Subcommand, Debug)]
enum SpiralCmd {
    /// Build W_n and summarize it.
    Build {
        #[arg(long)]
        n: usize,
    },
    /// Check that the collapse W_{n+1} → W_n preserves every relation pair.
    Verify {
        #[arg(long)]
        n: usize,
    },
    /// List the wandering points of W_n.
    Wandering {
        #[arg(long)]
        n: usize,
    },
    /// Write W_n as DOT or JSON.
    Export {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the tower W_1 ← … ← W_depth as JSON.
    Tower {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OdometerCmd {
    /// Add one to a digit vector.
    Step {
        #[arg(long)]
        spec: OdometerSpec,
        /// Comma-separated digits, least significant first.
        #[arg(long, value_delimiter = ',')]
        digits: Vec<u64>,
    },
    /// The finite system on the first n digits.
    Truncate {
        #[arg(long)]
        spec: OdometerSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide conjugacy of two odometers.
    Conj {
        #[arg(long)]
        a: OdometerSpec,
        #[arg(long)]
        b: OdometerSpec,
    },
    /// Whether the space splits into k cyclically permuted clopen pieces.
    Phi {
        #[arg(long)]
        spec: OdometerSpec,
        #[arg(long)]
        k: u64,
    },
    /// Whether some clopen set is mapped onto its complement.
    Swap {
        #[arg(long)]
        spec: OdometerSpec,
    },
    /// Write the tower of the first `depth` truncations as JSON.
    Tower {
        #[arg(long)]
        spec: OdometerSpec,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum TowerCmd {
    /// Check bondings and level sizes.
    Validate {
        #[arg(long)]
        tower: PathBuf,
        /// Also require strictly growing levels.
        #[arg(long)]
        cantor: bool,
    },
    /// Bounded search for a lift of φ: L_source → W_n through the collapse.
    Lift {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        source_level: usize,
        /// JSON assignment array; the identity when omitted.
        #[arg(long)]
        phi: Option<PathBuf>,
        /// JSON `{"level": .., "blocks": [[..], ..]}`; A_φ when omitted.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        max_k: usize,
        #[arg(long, default_value_t = 1)]
        max_level: usize,
    },
    /// Search for successive cyclically permuted refinements.
    Star {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Search the first `depth` levels for a wandering atom.
    Wandering {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand, Debug)]
enum FraisseCmd {
    /// The product of two permutation systems with its projections.
    Jep {
        /// A cycle type such as `3,2,1`, or a path to a system JSON file.
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amalgamate the problem in a JSON file.
    Amalgamate {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a generic chain.
    Chain {
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<usize>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Periodic atoms on the chain side, wandering points on the spiral side.
    Certify {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, default_value_t = 2)]
        spiral_depth: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Dot,
    Json,
}

/// A checked answer: true/found or false/absent.
enum Answer {
    Yes,
    No,
}

impl Answer {
    fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.out, "{}", s.as_ref())?;
        Ok(())
    }

    /// Prints `human` or `machine` depending on `--json`.
    fn emit(&mut self, human: impl AsRef<str>, machine: serde_json::Value) -> Result<()> {
        if self.json {
            self.line(machine.to_string())
        } else {
            self.line(human)
        }
    }

    /// Writes `content` to `path`, or prints it.
    fn artifact(&mut self, path: &Option<PathBuf>, content: &str) -> Result<()> {
        match path {
            Some(p) => {
                fs::write(p, content)?;
                if !self.json {
                    self.line(format!("wrote {}", p.display()))?;
                }
                Ok(())
            }
            None => self.line(content),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 2,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Ctx { out, json: cli.json };
    let result = match cli.command {
        Command::Spiral(c) => spiral_cmd(&mut ctx, c),
        Command::Odometer(c) => odometer_cmd(&mut ctx, c),
        Command::Tower(c) => tower_cmd(&mut ctx, c),
        Command::Fraisse(c) => fraisse_cmd(&mut ctx, c),
    };
    match result {
        Ok(Answer::Yes) => 0,
        Ok(Answer::No) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn spiral_cmd(ctx: &mut Ctx, cmd: SpiralCmd) -> Result<Answer> {
    match cmd {
        SpiralCmd::Build { n } => {
            let level = spiral::build_level(n)?;
            let sys = level.system();
            if ctx.json {
                ctx.line(sys.to_json())?;
            } else {
                ctx.line(format!(
                    "W_{n}: {} states in {} spirals, {} relation pairs",
                    sys.len(),
                    6usize.pow(n as u32),
                    sys.edge_count()
                ))?;
            }
            Ok(Answer::Yes)
        }
        SpiralCmd::Verify { n } => {
            let upper = spiral::build_level(n + 1)?;
            let lower = spiral::build_level(n)?;
            let bad = spiral::collapse_violations(&upper, &lower)?;
            let human = if bad.is_empty() {
                "xi morphism: OK".to_string()
            } else {
                let (x, y) = bad[0];
                format!(
                    "xi morphism: FAILED, {} violations, first {} → {}",
                    bad.len(),
                    upper.point(x),
                    upper.point(y)
                )
            };
            ctx.emit(human, json!({"n": n, "ok": bad.is_empty(), "violations": bad.len()}))?;
            Ok(Answer::from_bool(bad.is_empty()))
        }
        SpiralCmd::Wandering { n } => {
            let level = spiral::build_level(n)?;
            let points = spiral::wandering_points(&level);
            let names: Vec<String> = points.iter().map(ToString::to_string).collect();
            if ctx.json {
                ctx.line(json!(names).to_string())?;
            } else {
                ctx.line(format!("{} wandering points in W_{n}", names.len()))?;
                for p in &names {
                    ctx.line(p)?;
                }
            }
            Ok(Answer::from_bool(!names.is_empty()))
        }
        SpiralCmd::Export { n, format, out } => {
            let level = spiral::build_level(n)?;
            let content = match format {
                Format::Dot => level.to_dot(),
                Format::Json => level.system().to_json(),
            };
            ctx.artifact(&out, &content)?;
            Ok(Answer::Yes)
        }
        SpiralCmd::Tower { depth, out } => {
            let t = spiral::spiral_tower(depth)?;
            ctx.artifact(&out, &t.to_json())?;
            Ok(Answer::Yes)
        }
    }
}

fn odometer_cmd(ctx: &mut Ctx, cmd: OdometerCmd) -> Result<Answer> {
    match cmd {
        OdometerCmd::Step { spec, digits } => {
            let next = odometer::step(&spec, &digits)?;
            let human = next.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
            ctx.emit(human, json!(next))?;
            Ok(Answer::Yes)
        }
        OdometerCmd::Truncate { spec, n, format, out } => {
            let t = odometer::truncation(&spec, n)?;
            let content = match format {
                Format::Dot => t.system().to_dot(&format!("odometer_{n}")),
                Format::Json => t.system().to_json(),
            };
            ctx.artifact(&out, &content)?;
            Ok(Answer::Yes)
        }
        OdometerCmd::Conj { a, b } => {
            let (sa, sb) = (a.supernatural(), b.supernatural());
            let yes = odometer::conjugate(&a, &b);
            let human = if yes {
                format!("conjugate: both have supernatural number {sa}")
            } else {
                format!("not conjugate: {sa} vs {sb}")
            };
            ctx.emit(human, json!({"a": a, "b": b, "a_supernatural": sa, "b_supernatural": sb, "conjugate": yes}))?;
            Ok(Answer::from_bool(yes))
        }
        OdometerCmd::Phi { spec, k } => {
            if k == 0 {
                return Err(Error::Precondition("k must be positive".into()));
            }
            let level = odometer::phi_k_odometer(&spec, k);
            let human = match level {
                Some(n) => format!("holds: {k} cyclic pieces from level {n}"),
                None => format!("fails: {k} does not divide {}", spec.supernatural()),
            };
            ctx.emit(human, json!({"spec": spec, "k": k, "holds": level.is_some(), "level": level}))?;
            Ok(Answer::from_bool(level.is_some()))
        }
        OdometerCmd::Swap { spec } => {
            let level = odometer::phi_k_odometer(&spec, 2);
            let human = match level {
                Some(n) => format!("holds: σ(x)=1−x satisfiable from level {n}"),
                None => "fails: σ(x)=1−x unsatisfiable".to_string(),
            };
            ctx.emit(human, json!({"spec": spec, "holds": level.is_some(), "level": level}))?;
            Ok(Answer::from_bool(level.is_some()))
        }
        OdometerCmd::Tower { spec, depth, out } => {
            let t = spec.tower(depth)?.cantor(true);
            ctx.artifact(&out, &t.to_json())?;
            Ok(Answer::Yes)
        }
    }
}

#[derive(Deserialize)]
struct PartitionRepr {
    level: usize,
    blocks: Vec<Vec<StateId>>,
}

fn tower_cmd(ctx: &mut Ctx, cmd: TowerCmd) -> Result<Answer> {
    match cmd {
        TowerCmd::Validate { tower, cantor } => {
            let t = Tower::from_json(&read(&tower)?)?;
            let t = if cantor { t.cantor(true) } else { t };
            let sizes: Vec<usize> = t.levels().iter().map(|l| l.len()).collect();
            match t.validate() {
                Ok(()) => {
                    ctx.emit(format!("valid: level sizes {sizes:?}"), json!({"valid": true, "sizes": sizes}))?;
                    Ok(Answer::Yes)
                }
                Err(v) => {
                    ctx.emit(format!("invalid: {v}"), json!({"valid": false, "violation": v.to_string()}))?;
                    Ok(Answer::No)
                }
            }
        }
        TowerCmd::Lift {
            tower,
            n,
            source_level,
            phi,
            partition,
            max_k,
            max_level,
        } => {
            let t = Tower::from_json(&read(&tower)?)?;
            let source = t.level(source_level).map_err(|e| Error::Precondition(e.to_string()))?.clone();
            let base = spiral::build_level(n)?;
            let phi = match phi {
                Some(p) => {
                    let a: Vec<StateId> = serde_json::from_str(&read(&p)?)?;
                    EquivariantMap::new(source, base.system().clone(), a)
                        .map_err(|e| Error::Precondition(e.to_string()))?
                }
                None => {
                    if source.len() != base.len() {
                        return Err(Error::Precondition(format!(
                            "level {source_level} is not W_{n}; pass --phi"
                        )));
                    }
                    let a = (0..source.len()).collect();
                    EquivariantMap::new(source, base.system().clone(), a)?
                }
            };
            let refinement = match partition {
                Some(p) => {
                    let r: PartitionRepr = serde_json::from_str(&read(&p)?)?;
                    LevelPartition::new(&t, r.level, r.blocks)?
                }
                None => LevelPartition::from_fibers(&t, source_level, &phi)?,
            };
            match tower::lifting_check(&t, source_level, &phi, n, &refinement, max_k, max_level)? {
                LiftOutcome::Found(lift) => {
                    let human = format!(
                        "found: ψ from level {} onto W_{} (k = {})",
                        lift.level,
                        n + lift.k,
                        lift.k
                    );
                    let machine = json!({
                        "outcome": "found",
                        "k": lift.k,
                        "level": lift.level,
                        "psi": lift.psi.assignment(),
                    });
                    ctx.emit(human, machine)?;
                    Ok(Answer::Yes)
                }
                LiftOutcome::AbsentWithinBounds => {
                    let human = format!("absent within bounds: k ≤ {max_k}, level ≤ {max_level}");
                    ctx.emit(human, json!({"outcome": "absent-within-bounds", "max_k": max_k, "max_level": max_level}))?;
                    Ok(Answer::No)
                }
            }
        }
        TowerCmd::Star { tower, depth } => {
            let t = Tower::from_json(&read(&tower)?)?;
            match tower::property_star(&t, depth)? {
                Some(w) => {
                    let levels: Vec<usize> = w.partitions.iter().map(|p| p.level()).collect();
                    let human = format!("holds: digits {:?} at levels {levels:?}", w.digits);
                    ctx.emit(human, json!({"holds": true, "digits": w.digits, "levels": levels}))?;
                    Ok(Answer::Yes)
                }
                None => {
                    ctx.emit(format!("absent within depth {depth}"), json!({"holds": false}))?;
                    Ok(Answer::No)
                }
            }
        }
        TowerCmd::Wandering { tower, depth } => {
            let t = Tower::from_json(&read(&tower)?)?;
            match tower::wandering_clopen_exists(&t, depth) {
                Some(u) => {
                    let label = t.level(u.level())?.label(u.states()[0]).to_string();
                    let human = format!("wandering atom {label} at level {}", u.level());
                    ctx.emit(human, json!({"wandering": true, "level": u.level(), "state": u.states()[0], "label": label}))?;
                    Ok(Answer::Yes)
                }
                None => {
                    ctx.emit(format!("no wandering atom in the first {depth} levels"), json!({"wandering": false}))?;
                    Ok(Answer::No)
                }
            }
        }
    }
}

fn system_arg(s: &str) -> Result<Arc<FiniteSystem>> {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == ',') {
        let shape = s
            .split(',')
            .map(|p| match p.parse::<usize>() {
                Ok(l) if l > 0 => Ok(l),
                _ => Err(Error::Parse(format!("bad cycle length {p:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Arc::new(FiniteSystem::from_cycle_type(&shape)));
    }
    Ok(Arc::new(FiniteSystem::from_json(&read(&PathBuf::from(s))?)?))
}

fn fraisse_cmd(ctx: &mut Ctx, cmd: FraisseCmd) -> Result<Answer> {
    match cmd {
        FraisseCmd::Jep { x, y, out } => {
            let (z, _, _) = fraisse::jep(&system_arg(&x)?, &system_arg(&y)?)?;
            let lengths = findyn::cycle_decomposition(&z)?.lengths();
            if out.is_some() || ctx.json {
                ctx.artifact(&out, &z.to_json())?;
            }
            if !ctx.json {
                ctx.line(format!("apex: {} states, cycle lengths {lengths:?}; projections verified", z.len()))?;
            }
            Ok(Answer::Yes)
        }
        FraisseCmd::Amalgamate { problem, out } => {
            let p = AmalgamProblem::from_json(&read(&problem)?)?;
            let s = fraisse::amalgamate(&p)?;
            let ok = fraisse::verify_amalgam(&p, &s);
            if out.is_some() || ctx.json {
                ctx.artifact(&out, &s.to_json())?;
            }
            if !ctx.json {
                let lengths = findyn::cycle_decomposition(&s.apex)?.lengths();
                let verdict = if ok { "verified" } else { "FAILED verification" };
                ctx.line(format!("apex: {} states, cycle lengths {lengths:?}; {verdict}", s.apex.len()))?;
            }
            Ok(Answer::from_bool(ok))
        }
        FraisseCmd::Chain { schedule, depth, out } => {
            let t = fraisse::generic_chain(&schedule, depth)?;
            if out.is_some() || ctx.json {
                ctx.artifact(&out, &t.to_json())?;
            }
            if !ctx.json {
                let sizes: Vec<usize> = t.levels().iter().map(|l| l.len()).collect();
                ctx.line(format!("chain level sizes {sizes:?}"))?;
            }
            Ok(Answer::Yes)
        }
        FraisseCmd::Certify { chain, spiral_depth } => {
            let t = Tower::from_json(&read(&chain)?)?;
            let c = fraisse::not_special_certificate(&t, spiral_depth)?;
            if ctx.json {
                ctx.line(serde_json::to_string(&c)?)?;
            } else {
                for l in &c.chain {
                    ctx.line(format!(
                        "level {}: {} states, order {}, max atom period {}, periods divide order: {}",
                        l.level, l.states, l.order, l.max_period, l.periods_divide_order
                    ))?;
                }
                for s in &c.spirals {
                    ctx.line(format!("W_{}: {} wandering points", s.n, s.wandering))?;
                }
                ctx.line(if c.holds() { "not special: certified" } else { "certificate FAILED" })?;
            }
            Ok(Answer::from_bool(c.holds()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cantor").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn conj_examples() {
        let (code, out, _) = run_str(&["odometer", "conj", "--a", ":2", "--b", ":3"]);
        assert_eq!(code, 1);
        assert!(out.starts_with("not conjugate"), "{out}");
        let (code, _, _) = run_str(&["odometer", "conj", "--a", "2", "--b", "4"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn swap_examples() {
        let (code, out, _) = run_str(&["odometer", "swap", "--spec", ":3"]);
        assert_eq!((code, out.trim()), (1, "fails: σ(x)=1−x unsatisfiable"));
        assert_eq!(run_str(&["odometer", "swap", "--spec", ":2"]).0, 0);
    }

    #[test]
    fn verify_example() {
        let (code, out, _) = run_str(&["spiral", "verify", "--n", "1"]);
        assert_eq!((code, out.trim()), (0, "xi morphism: OK"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["spiral", "nope"]).0, 2);
        assert_eq!(run_str(&["odometer", "conj", "--a", "x", "--b", "2"]).0, 2);
        let (code, _, err) = run_str(&["tower", "validate", "--tower", "/nonexistent/t.json"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("odometer"));
    }
}
