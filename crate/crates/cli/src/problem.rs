//! Problem files: line-oriented declarations of an algebroid, optional higher
//! structures and the tasks to run on them.
//!
//! ```text
//! # comment
//! seed 7
//! param even c
//! base even x
//! base odd th
//! fiber even 1
//! anchor 1 x = 1
//! structure 1 2 2 = c
//! higher poisson = 1 + y*eta_x*eta_y
//! task cartan samples=20 degree=2
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tulczyjew_core::algebroid::{Algebroid, AlgebroidData, FiberLabel};
use tulczyjew_core::expr::parse_at;
use tulczyjew_core::graded_algebra::{GradedVariable, Parity, Poly};
use tulczyjew_core::higher_structures::{HigherStructure, Kind};

pub const PROBLEM_SCHEMA: &str = "tulczyjew-problem/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct InputError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl InputError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        InputError {
            line,
            column,
            message: message.into(),
        }
    }
}

fn locate(e: tulczyjew_core::Error, line: usize, column: usize) -> InputError {
    match e {
        tulczyjew_core::Error::Parse {
            line,
            column,
            message,
        } => InputError::at(line, column, message),
        other => InputError::at(line, column, other.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskName {
    VerifyAlgebroid,
    BuildTriple,
    VerifyTriple,
    HigherMaster,
    Linfty,
    BaseBrackets,
    FormsBrackets,
    Cartan,
    Koszul,
    ClassicalLimit,
}

impl TaskName {
    pub const ALL: [TaskName; 10] = [
        TaskName::VerifyAlgebroid,
        TaskName::BuildTriple,
        TaskName::VerifyTriple,
        TaskName::HigherMaster,
        TaskName::Linfty,
        TaskName::BaseBrackets,
        TaskName::FormsBrackets,
        TaskName::Cartan,
        TaskName::Koszul,
        TaskName::ClassicalLimit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskName::VerifyAlgebroid => "verify-algebroid",
            TaskName::BuildTriple => "build-triple",
            TaskName::VerifyTriple => "verify-triple",
            TaskName::HigherMaster => "higher-master",
            TaskName::Linfty => "linfty",
            TaskName::BaseBrackets => "base-brackets",
            TaskName::FormsBrackets => "forms-brackets",
            TaskName::Cartan => "cartan",
            TaskName::Koszul => "koszul",
            TaskName::ClassicalLimit => "classical-limit",
        }
    }

    fn parse(s: &str) -> Option<TaskName> {
        TaskName::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TaskName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Task parameters; unset values fall back to command-line overrides, then defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskParams {
    pub samples: Option<usize>,
    pub degree: Option<u32>,
    pub arity: Option<usize>,
}

const PARAM_KEYS: [&str; 3] = ["samples", "degree", "arity"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub name: TaskName,
    pub params: TaskParams,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct Higher {
    pub kind: Kind,
    pub source: String,
    pub structure: HigherStructure,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub algebroid: Algebroid,
    pub higher: Vec<Higher>,
    pub tasks: Vec<TaskSpec>,
    pub seed: Option<u64>,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    /// 1-based column of a subslice of this line.
    fn col(&self, part: &str) -> usize {
        part.as_ptr() as usize - self.text.as_ptr() as usize + 1
    }
}

fn parity_word(l: &Line, w: &str) -> Result<Parity, InputError> {
    match w {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        _ => Err(InputError::at(
            l.no,
            l.col(w),
            format!("expected `even` or `odd`, found `{w}`"),
        )),
    }
}

fn valid_name(w: &str) -> bool {
    let mut c = w.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphanumeric())
        && w.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

/// Splits `lhs = rhs`; returns the left words and the right-hand slice.
fn split_eq<'a>(l: &Line<'a>, rest: &'a str) -> Result<(Vec<&'a str>, &'a str), InputError> {
    let Some(i) = rest.find('=') else {
        return Err(InputError::at(
            l.no,
            l.col(rest) + rest.len(),
            "expected `=`",
        ));
    };
    let rhs = &rest[i + 1..];
    Ok((rest[..i].split_whitespace().collect(), rhs))
}

struct Decl<'a> {
    line: Line<'a>,
    keyword: &'a str,
    rest: &'a str,
}

pub fn parse_problem(text: &str) -> Result<Problem, InputError> {
    let mut decls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let kw_end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        decls.push(Decl {
            line: Line {
                no: i + 1,
                text: raw,
            },
            keyword: &trimmed[..kw_end],
            rest: &trimmed[kw_end..],
        });
    }

    let mut params = Vec::new();
    let mut base = Vec::new();
    let mut fiber: Vec<FiberLabel> = Vec::new();
    let mut names: BTreeMap<String, (Parity, &str)> = BTreeMap::new();
    let mut seed = None;
    let mut tasks = Vec::new();

    // declarations first, so expressions may precede them in the file
    for d in &decls {
        let l = &d.line;
        let words: Vec<&str> = d.rest.split_whitespace().collect();
        match d.keyword {
            "param" | "base" | "fiber" => {
                if words.len() != 2 {
                    return Err(InputError::at(
                        l.no,
                        l.col(d.keyword),
                        format!("usage: {} even|odd <name>", d.keyword),
                    ));
                }
                let p = parity_word(l, words[0])?;
                let name = words[1];
                if !valid_name(name) {
                    return Err(InputError::at(
                        l.no,
                        l.col(name),
                        format!("invalid name `{name}`"),
                    ));
                }
                if name == tulczyjew_core::cartan_calculus::HBAR {
                    return Err(InputError::at(
                        l.no,
                        l.col(name),
                        format!("`{name}` is reserved"),
                    ));
                }
                let ns = if d.keyword == "fiber" {
                    "fiber"
                } else {
                    "base"
                };
                let key = format!("{ns}:{name}");
                if let Some((q, kw)) = names.get(&key) {
                    let msg = if *q != p {
                        format!("`{name}` already declared {q} by `{kw}`")
                    } else {
                        format!("`{name}` declared twice")
                    };
                    return Err(InputError::at(l.no, l.col(name), msg));
                }
                names.insert(key, (p, d.keyword));
                match d.keyword {
                    "param" => params.push(GradedVariable::new(name, p, 0)),
                    "base" => base.push(GradedVariable::new(name, p, 0)),
                    _ => fiber.push(FiberLabel::new(name, p)),
                }
            }
            "seed" => {
                let w = words.first().copied().unwrap_or("");
                if words.len() != 1 {
                    return Err(InputError::at(
                        l.no,
                        l.col(d.keyword),
                        "usage: seed <integer>",
                    ));
                }
                seed =
                    Some(w.parse::<u64>().map_err(|_| {
                        InputError::at(l.no, l.col(w), format!("invalid seed `{w}`"))
                    })?);
            }
            "task" => {
                let Some(&name) = words.first() else {
                    return Err(InputError::at(
                        l.no,
                        l.col(d.keyword),
                        "usage: task <name> [key=value ...]",
                    ));
                };
                let task = TaskName::parse(name).ok_or_else(|| {
                    InputError::at(l.no, l.col(name), format!("unknown task `{name}`"))
                })?;
                let mut tp = TaskParams::default();
                for kv in &words[1..] {
                    let Some((k, v)) = kv.split_once('=') else {
                        return Err(InputError::at(
                            l.no,
                            l.col(kv),
                            format!("expected key=value, found `{kv}`"),
                        ));
                    };
                    let bad = || {
                        InputError::at(
                            l.no,
                            l.col(kv) + k.len() + 1,
                            format!("invalid value `{v}` for `{k}`"),
                        )
                    };
                    match k {
                        "samples" => tp.samples = Some(v.parse().map_err(|_| bad())?),
                        "degree" => tp.degree = Some(v.parse().map_err(|_| bad())?),
                        "arity" => tp.arity = Some(v.parse().map_err(|_| bad())?),
                        _ => {
                            return Err(InputError::at(
                                l.no,
                                l.col(kv),
                                format!(
                                    "unknown task parameter `{k}` (expected one of {})",
                                    PARAM_KEYS.join(", ")
                                ),
                            ))
                        }
                    }
                }
                tasks.push(TaskSpec {
                    name: task,
                    params: tp,
                    line: l.no,
                });
            }
            "anchor" | "structure" | "higher" => {}
            other => {
                return Err(InputError::at(
                    l.no,
                    l.col(other),
                    format!("unknown keyword `{other}`"),
                ));
            }
        }
    }

    let chart =
        tulczyjew_core::algebroid::base_chart_for(&params, &base).map_err(|e| locate(e, 1, 1))?;
    let fiber_index = |l: &Line, w: &str| {
        fiber
            .iter()
            .position(|f| f.name == w)
            .ok_or_else(|| InputError::at(l.no, l.col(w), format!("unknown fiber label `{w}`")))
    };
    let base_index = |l: &Line, w: &str| {
        base.iter()
            .position(|b| b.name() == w)
            .ok_or_else(|| InputError::at(l.no, l.col(w), format!("unknown base coordinate `{w}`")))
    };
    let expr = |l: &Line, rhs: &str| -> Result<Poly, InputError> {
        parse_at(rhs, &chart, l.no, l.col(rhs)).map_err(|e| locate(e, l.no, l.col(rhs)))
    };
    let check_parity = |l: &Line, rhs: &str, p: &Poly, want: Parity| {
        if !p.is_zero() && p.parity() != Some(want) {
            return Err(InputError::at(
                l.no,
                l.col(rhs),
                format!("expression must be {want}"),
            ));
        }
        Ok(())
    };

    let mut anchor = Vec::new();
    let mut structure = Vec::new();
    let mut higher_src = Vec::new();
    let mut seen_anchor = BTreeMap::new();
    for d in &decls {
        let l = &d.line;
        match d.keyword {
            "anchor" => {
                let (lhs, rhs) = split_eq(l, d.rest)?;
                if lhs.len() != 2 {
                    return Err(InputError::at(
                        l.no,
                        l.col(d.keyword),
                        "usage: anchor <fiber> <base> = <expr>",
                    ));
                }
                let (a, b) = (fiber_index(l, lhs[0])?, base_index(l, lhs[1])?);
                if seen_anchor.insert((a, b), l.no).is_some() {
                    return Err(InputError::at(
                        l.no,
                        l.col(lhs[0]),
                        "anchor component given twice",
                    ));
                }
                let p = expr(l, rhs)?;
                check_parity(l, rhs, &p, fiber[a].parity + base[b].parity())?;
                anchor.push(((a, b), p));
            }
            "structure" => {
                let (lhs, rhs) = split_eq(l, d.rest)?;
                if lhs.len() != 3 {
                    return Err(InputError::at(
                        l.no,
                        l.col(d.keyword),
                        "usage: structure <fiber> <fiber> <fiber> = <expr>",
                    ));
                }
                let (a, b, c) = (
                    fiber_index(l, lhs[0])?,
                    fiber_index(l, lhs[1])?,
                    fiber_index(l, lhs[2])?,
                );
                let p = expr(l, rhs)?;
                check_parity(
                    l,
                    rhs,
                    &p,
                    fiber[a].parity + fiber[b].parity + fiber[c].parity,
                )?;
                structure.push(((a, b, c), p));
            }
            "higher" => {
                let (lhs, rhs) = split_eq(l, d.rest)?;
                let kind = match lhs.as_slice() {
                    ["poisson"] => Kind::Poisson,
                    ["schouten"] => Kind::Schouten,
                    _ => {
                        return Err(InputError::at(
                            l.no,
                            l.col(d.keyword),
                            "usage: higher poisson|schouten = <expr>",
                        ));
                    }
                };
                higher_src.push((l, kind, rhs));
            }
            _ => {}
        }
    }

    let first_line = decls
        .iter()
        .find(|d| d.keyword == "structure")
        .map(|d| d.line.no)
        .unwrap_or(1);
    let data = AlgebroidData::new(params, base.clone(), fiber.clone(), anchor, structure)
        .map_err(|e| locate(e, first_line, 1))?;
    let algebroid = Algebroid::new(data).map_err(|e| locate(e, first_line, 1))?;

    let mut higher = Vec::new();
    for (l, kind, rhs) in higher_src {
        let sp = algebroid.charts().structure_space(kind.side());
        let body =
            parse_at(rhs, &sp.chart, l.no, l.col(rhs)).map_err(|e| locate(e, l.no, l.col(rhs)))?;
        let structure = HigherStructure::new(&algebroid, kind, body)
            .map_err(|e| locate(e, l.no, l.col(rhs)))?;
        higher.push(Higher {
            kind,
            source: rhs.trim().to_string(),
            structure,
        });
    }

    Ok(Problem {
        algebroid,
        higher,
        tasks,
        seed,
    })
}
