//! Line-oriented instance files.
//!
//! ```text
//! # optional comments
//! kingsgrid <width> <height> <maxcut|maxcutw|color3>
//! edge <i> <j> <w>
//! ...
//! ```
//!
//! Writers emit edges sorted by `(i, j)` with `i < j`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{OimError, Result};
use crate::grid::GridTopology;
use crate::problem::{ColorAssignment, ProblemInstance, ProblemKind};

pub fn write_instance(instance: &ProblemInstance) -> String {
    write_instance_with_comments(instance, &[])
}

/// Writes the instance preceded by `#` comment lines.
pub fn write_instance_with_comments(instance: &ProblemInstance, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let g = instance.grid();
    let _ = writeln!(
        out,
        "kingsgrid {} {} {}",
        g.width(),
        g.height(),
        instance.kind().token()
    );
    for e in instance.edges() {
        let _ = writeln!(out, "edge {} {} {}", e.i, e.j, e.w);
    }
    out
}

/// Comment line recording a hidden coloring.
pub fn certificate_comment(colors: &ColorAssignment) -> String {
    let mut s = String::from("certificate");
    for c in &colors.0 {
        let _ = write!(s, " {c}");
    }
    s
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| OimError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| OimError::Parse {
        line,
        msg: format!("invalid {what} {tok:?}"),
    })
}

pub fn read_instance(text: &str) -> Result<ProblemInstance> {
    let mut header: Option<(GridTopology, ProblemKind)> = None;
    let mut edges = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let keyword = toks.next().unwrap_or_default();
        match keyword {
            "kingsgrid" => {
                if header.is_some() {
                    return Err(OimError::Parse {
                        line: line_no,
                        msg: "duplicate kingsgrid header".into(),
                    });
                }
                let w: usize = parse_num(toks.next(), "width", line_no)?;
                let h: usize = parse_num(toks.next(), "height", line_no)?;
                let kind_tok = toks.next().ok_or_else(|| OimError::Parse {
                    line: line_no,
                    msg: "missing problem kind".into(),
                })?;
                let kind = ProblemKind::from_token(kind_tok).ok_or_else(|| OimError::Parse {
                    line: line_no,
                    msg: format!("unknown problem kind {kind_tok:?}"),
                })?;
                let grid = GridTopology::new(w, h).map_err(|e| OimError::Parse {
                    line: line_no,
                    msg: e.to_string(),
                })?;
                header = Some((grid, kind));
            }
            "edge" => {
                if header.is_none() {
                    return Err(OimError::Parse {
                        line: line_no,
                        msg: "edge before kingsgrid header".into(),
                    });
                }
                let i: usize = parse_num(toks.next(), "node index", line_no)?;
                let j: usize = parse_num(toks.next(), "node index", line_no)?;
                let w: i64 = parse_num(toks.next(), "weight", line_no)?;
                edges.push((line_no, i, j, w));
            }
            other => {
                return Err(OimError::Parse {
                    line: line_no,
                    msg: format!("unknown directive {other:?}"),
                })
            }
        }
        if let Some(extra) = toks.next() {
            return Err(OimError::Parse {
                line: line_no,
                msg: format!("unexpected token {extra:?}"),
            });
        }
    }
    let (grid, kind) = header.ok_or(OimError::Parse {
        line: 0,
        msg: "missing kingsgrid header".into(),
    })?;
    // Validate edge by edge so errors carry the offending line.
    let mut seen = BTreeSet::new();
    let mut accepted = Vec::with_capacity(edges.len());
    for (line_no, i, j, w) in edges {
        let single = ProblemInstance::new(grid, kind, [(i, j, w)]).and_then(|_| {
            if seen.insert((i.min(j), i.max(j))) {
                Ok(())
            } else {
                Err(OimError::DuplicateEdge {
                    i: i.min(j),
                    j: i.max(j),
                })
            }
        });
        if let Err(e) = single {
            return Err(OimError::Parse {
                line: line_no,
                msg: e.to_string(),
            });
        }
        accepted.push((i, j, w));
    }
    ProblemInstance::new(grid, kind, accepted)
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    read_instance(&std::fs::read_to_string(path)?)
}

pub fn save_instance(path: &Path, instance: &ProblemInstance, comments: &[String]) -> Result<()> {
    std::fs::write(path, write_instance_with_comments(instance, comments))?;
    Ok(())
}
