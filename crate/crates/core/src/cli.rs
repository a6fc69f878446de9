//! The `ultra` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::catalog::enumerate_ultrametrics;
use crate::cu::embed_into_cu;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::fu::{build_fu, build_fu_literal, embed_into_fu};
use crate::group::{block_translate_embed, embed_into_group};
use crate::io::{parse_space, read_document, SpaceDoc};
use crate::lego::lego_decompose;
use crate::metric::{chain_ultrametric_id, discretize, validate_isosceles, validate_metric, validate_ultrametric, DSet};
use crate::pu::{build_pu_prefix, embed_into_pu};
use crate::resolution::{radial_resolution, top_split};
use crate::splice::{splice_metric, splice_section_invariance};
use crate::union::{radial_block_decomposition, verify_union_at_scale};

/// Largest number of sections `splice --invariance` enumerates.
const MAX_SECTIONS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "ultra", version, about = "Exact tools for finite ultrametric spaces and their universal targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Metric,
    Ultrametric,
    Isosceles,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report axiom violations; exits 1 if there are any.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "metric")]
        kind: Kind,
    },
    /// Chain ultrametric of the identity map.
    Chain {
        file: PathBuf,
        /// Restrict to a 1-separated net first.
        #[arg(long)]
        discretize: bool,
    },
    /// Decompose an ultrametric space (tree as JSON by default).
    Decompose {
        file: PathBuf,
        #[arg(long, group = "format")]
        newick: bool,
        #[arg(long, group = "format")]
        dot: bool,
        /// Radial resolution around this point.
        #[arg(long, group = "format", value_name = "X0")]
        radial: Option<String>,
        /// Split at the diameter.
        #[arg(long, group = "format")]
        top: bool,
    },
    /// Finite universal spaces.
    Fu {
        #[command(subcommand)]
        command: FuCommand,
    },
    /// Embed a metric space into the countable universal space.
    CuEmbed { file: PathBuf },
    /// Prefixes of the proper universal space.
    Pu {
        #[command(subcommand)]
        command: PuCommand,
    },
    /// Coarse disjoint unions.
    Union {
        #[command(subcommand)]
        command: UnionCommand,
    },
    /// Splice fibers along a section.
    Splice {
        file: PathBuf,
        /// Compare all sections instead of printing the spliced space.
        #[arg(long)]
        invariance: bool,
    },
    /// Embed an integral ultrametric space into the Z/2 vector space.
    GroupEmbed {
        file: PathBuf,
        /// Embed radial blocks around this point with translations.
        #[arg(long, value_name = "X0")]
        blocks: Option<String>,
    },
    /// One space per isometry class with at most m points and values in D.
    Enumerate { m: usize, dset: String },
}

#[derive(Debug, Subcommand)]
enum FuCommand {
    Build {
        m: usize,
        dset: String,
        /// Use the recursion with first part FU(m-1, D \ {k}).
        #[arg(long)]
        literal: bool,
    },
    Embed { file: PathBuf, m: usize, dset: String },
}

#[derive(Debug, Subcommand)]
enum PuCommand {
    Build { count: u64 },
    Embed { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum UnionCommand {
    /// Splice the `parts` of a space file with the default stride.
    Build { file: PathBuf },
    /// Check the bounded-set condition at one scale or at every integer
    /// scale up to the largest level.
    Verify {
        file: PathBuf,
        #[arg(long)]
        scale: Option<String>,
    },
    /// Radial blocks of an integral ultrametric space.
    Radial { file: PathBuf, x0: String },
}

/// Comma-separated non-negative integers; 0 is added if missing.
pub fn parse_dset(text: &str) -> Result<DSet> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| Error::Parse(format!("{s:?} is not a non-negative integer"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(DSet::from_values(values))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Output text and whether the command succeeded.
fn execute(command: Command) -> Result<(String, bool)> {
    let ok = |s: String| Ok((s, true));
    match command {
        Command::Validate { file, kind } => {
            let space = read_document(&file)?.space()?;
            let report = match kind {
                Kind::Metric => validate_metric(&space),
                Kind::Ultrametric => validate_ultrametric(&space),
                Kind::Isosceles => validate_isosceles(&space),
            };
            let name = format!("{kind:?}").to_lowercase();
            let valid = report.is_empty();
            let out = json!({
                "kind": name,
                "points": space.len(),
                "valid": valid,
                "violations": report.violations,
            });
            Ok((pretty(&out), valid))
        }
        Command::Chain { file, discretize: net } => {
            let space = parse_space(&file)?;
            let chained = if net { discretize(&space).space } else { chain_ultrametric_id(&space) };
            ok(SpaceDoc::from_space(&chained).to_json())
        }
        Command::Decompose { file, newick, dot, radial, top } => {
            let space = parse_space(&file)?;
            if let Some(x0) = radial {
                return ok(SpaceDoc::from_resolution(&radial_resolution(&space, &x0)?).to_json());
            }
            if top {
                return ok(SpaceDoc::from_resolution(&top_split(&space)?).to_json());
            }
            let tree = lego_decompose(&space)?;
            if newick {
                ok(format!("{}\n", tree.newick()))
            } else if dot {
                ok(tree.dot())
            } else {
                ok(pretty(&tree))
            }
        }
        Command::Fu { command: FuCommand::Build { m, dset, literal } } => {
            let d = parse_dset(&dset)?;
            let fu = if literal { build_fu_literal(m, &d)? } else { build_fu(m, &d)? };
            let doc = SpaceDoc { labels: Some(fu.labels.clone()), ..SpaceDoc::from_space(&fu.space) };
            ok(doc.to_json())
        }
        Command::Fu { command: FuCommand::Embed { file, m, dset } } => {
            let space = parse_space(&file)?;
            let d = parse_dset(&dset)?;
            let e = embed_into_fu(&space, m, &d)?;
            let map: Vec<_> = (0..space.len())
                .map(|x| json!({ "point": space.id(x), "target": e.target.space.id(e.map[x]) }))
                .collect();
            let out = json!({ "m": m, "dset": d, "target_points": e.target.space.len(), "map": map });
            ok(pretty(&out))
        }
        Command::CuEmbed { file } => {
            let space = parse_space(&file)?;
            let e = embed_into_cu(&space)?;
            let points: Vec<_> = e
                .placements
                .iter()
                .map(|p| json!({ "point": p.point, "via": p.via, "level": p.image.level, "coords": p.image.address.coords }))
                .collect();
            let out = json!({
                "center": e.center,
                "net": e.net,
                "snap_radius": e.snap_radius,
                "points": points,
                "distortion": e.distortion,
            });
            ok(pretty(&out))
        }
        Command::Pu { command: PuCommand::Build { count } } => {
            let prefix = build_pu_prefix(count)?;
            ok(SpaceDoc::from_union(&prefix.as_union()?).to_json())
        }
        Command::Pu { command: PuCommand::Embed { file } } => {
            let u = read_document(&file)?.union()?;
            ok(pretty(&embed_into_pu(&u)?))
        }
        Command::Union { command: UnionCommand::Build { file } } => {
            let mut doc = read_document(&file)?;
            doc.levels = None;
            ok(SpaceDoc::from_union(&doc.union()?).to_json())
        }
        Command::Union { command: UnionCommand::Verify { file, scale } } => {
            let u = read_document(&file)?.union()?;
            let scales: Vec<Dist> = match scale {
                Some(s) => vec![s.parse()?],
                None => {
                    let top = u.levels.last().expect("unions are non-empty").floor();
                    let top: u64 = top.try_into().map_err(|_| Error::InvalidArgument("level too large".into()))?;
                    (0..=top).map(Dist::from_int).collect()
                }
            };
            let mut witnesses = Vec::new();
            for m in &scales {
                match verify_union_at_scale(&u, m) {
                    Ok(w) => witnesses.push(w),
                    Err(failure) => {
                        let out = json!({ "verified": false, "failure": failure, "witnesses": witnesses });
                        return Ok((pretty(&out), false));
                    }
                }
            }
            ok(pretty(&json!({ "verified": true, "witnesses": witnesses })))
        }
        Command::Union { command: UnionCommand::Radial { file, x0 } } => {
            let space = parse_space(&file)?;
            ok(SpaceDoc::from_union(&radial_block_decomposition(&space, &x0)?).to_json())
        }
        Command::Splice { file, invariance } => {
            let spec = read_document(&file)?.splice_spec()?;
            if !invariance {
                return ok(SpaceDoc::from_space(&splice_metric(&spec)?).to_json());
            }
            let count = spec.fibers.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
            if count.is_none_or(|c| c > MAX_SECTIONS) {
                return Err(Error::Guard(format!("more than {MAX_SECTIONS} sections")));
            }
            let mut all: Vec<Vec<usize>> = vec![Vec::new()];
            for f in &spec.fibers {
                all = all.into_iter().flat_map(|s| (0..f.len()).map(move |i| [s.clone(), vec![i]].concat())).collect();
            }
            ok(pretty(&splice_section_invariance(&spec, &all)?))
        }
        Command::GroupEmbed { file, blocks } => {
            let space = parse_space(&file)?;
            match blocks {
                Some(x0) => ok(pretty(&block_translate_embed(&radial_block_decomposition(&space, &x0)?, None)?)),
                None => ok(pretty(&embed_into_group(&space, None)?)),
            }
        }
        Command::Enumerate { m, dset } => {
            let d = parse_dset(&dset)?;
            let c = enumerate_ultrametrics(m, &d)?;
            let spaces: Vec<SpaceDoc> = c.spaces.iter().map(SpaceDoc::from_space).collect();
            ok(pretty(&json!({ "m": m, "dset": d, "count": spaces.len(), "spaces": spaces })))
        }
    }
}

/// Runs the command line; returns the exit status (0 success, 1 failed
/// validation or bad data, 2 usage error).
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, success)) => {
            let _ = out.write_all(text.as_bytes());
            if success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
