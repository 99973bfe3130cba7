//! Plain-text edge lists: one `src dst` pair per line, 0-indexed, `#` starts a
//! comment. A `# nodes: d` comment records the node count so isolated
//! trailing nodes survive a roundtrip.

use std::fmt::Write as _;
use std::path::Path;

use super::dag::Dag;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str, n_nodes: Option<usize>) -> Result<Dag> {
    let mut edges = Vec::new();
    let mut hinted = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(v) = c.trim().strip_prefix("nodes:") {
                hinted = Some(v.trim().parse::<usize>().map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [a, b] => {
                let parse = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse { line: line_no, msg: format!("{s:?}: {e}") });
                edges.push((parse(a)?, parse(b)?));
            }
            _ => return Err(Error::Parse { line: line_no, msg: format!("expected `src dst`, got {:?}", body.trim()) }),
        }
    }
    let needed = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    let d = n_nodes.or(hinted).unwrap_or(needed);
    if needed > d {
        return Err(Error::Config(format!("edge list references node {} but the graph has {d} nodes", needed - 1)));
    }
    Dag::from_edges(d, &edges)
}

pub fn format_edge_list(g: &Dag) -> String {
    let mut s = format!("# nodes: {}\n", g.n_nodes());
    for (a, b) in g.edges() {
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

pub fn read_edge_list(path: impl AsRef<Path>, n_nodes: Option<usize>) -> Result<Dag> {
    parse_edge_list(&std::fs::read_to_string(path)?, n_nodes)
}

pub fn write_edge_list(path: impl AsRef<Path>, g: &Dag) -> Result<()> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}
