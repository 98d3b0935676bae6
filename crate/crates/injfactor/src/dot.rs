//! Graphviz output for a map restricted to a rectangular window.

use std::collections::HashSet;
use std::fmt::Write;

use crate::element::Element;
use crate::error::Error;
use crate::injection::Injection;

pub const MAX_NODES: usize = 10_000;

/// Nodes of a window with one edge `x → (x)f` per node. Targets that fall
/// outside the window are listed in `outside`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub nodes: Vec<(Element, (i64, i64))>,
    pub edges: Vec<(Element, Element)>,
    pub outside: Vec<Element>,
}

/// Window of `rows × cols` grid positions.
///
/// On cell carriers, row `r` holds the cells `(i0 + r, j)` with `j` running
/// over `cols` values centred on 0, where `i0` is the least first coordinate
/// among the first carrier elements. On other carriers the first
/// `rows · cols` elements are laid out row by row.
pub fn graph_window(f: &Injection, rows: usize, cols: usize) -> Result<Graph, Error> {
    let n = rows.saturating_mul(cols);
    if n > MAX_NODES {
        return Err(Error::WindowTooLarge(n));
    }
    let c = f.carrier();
    let head = c.window(n.max(64));
    let nodes: Vec<(Element, (i64, i64))> = if !head.is_empty() && head.iter().all(|x| x.as_cell().is_some()) {
        let i0 = head.iter().filter_map(Element::as_cell).map(|(i, _)| i).min().unwrap();
        let j0 = -((cols as i64 - 1) / 2);
        (0..rows as i64)
            .flat_map(|r| (0..cols as i64).map(move |k| (r, k)))
            .map(|(r, k)| (Element::cell(i0 + r, j0 + k), (k, r)))
            .filter(|(x, _)| c.contains(x))
            .collect()
    } else {
        head.into_iter().take(n).enumerate().map(|(k, x)| (x, ((k % cols) as i64, (k / cols) as i64))).collect()
    };
    let inside: HashSet<&Element> = nodes.iter().map(|(x, _)| x).collect();
    let mut outside = Vec::new();
    let mut seen = HashSet::new();
    let edges: Vec<(Element, Element)> = nodes
        .iter()
        .map(|(x, _)| {
            let y = f.eval(x);
            if !inside.contains(&y) && seen.insert(y.clone()) {
                outside.push(y.clone());
            }
            (x.clone(), y)
        })
        .collect();
    Ok(Graph { nodes, edges, outside })
}

fn quote(x: &Element) -> String {
    format!("\"{}\"", x.to_string().replace('"', "\\\""))
}

impl Graph {
    /// DOT text with fixed node positions (for `neato -n`); nodes outside the
    /// window are dashed.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        writeln!(s, "digraph \"{}\" {{", name.replace('"', "\\\"")).unwrap();
        writeln!(s, "  node [shape=circle, fontsize=10];").unwrap();
        for (x, (col, row)) in &self.nodes {
            writeln!(s, "  {} [pos=\"{},{}!\"];", quote(x), col * 72, -row * 72).unwrap();
        }
        for y in &self.outside {
            writeln!(s, "  {} [style=dashed];", quote(y)).unwrap();
        }
        for (x, y) in &self.edges {
            writeln!(s, "  {} -> {};", quote(x), quote(y)).unwrap();
        }
        s.push_str("}\n");
        s
    }
}
