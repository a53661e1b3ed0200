//! Input formats, generators, and independence complexes of graphs.
//!
//! Facet files hold one facet per line as whitespace-separated elements in
//! `1..=64`. `#` starts a comment. An optional `n <N>` line fixes the ground
//! size when it should exceed the largest element present.
//!
//! Graph files hold one edge `u v` per line (a leading `e` is accepted), with
//! an optional `p <n> <m>` or `p edge <n> <m>` header and `#` comments.
//! Without a header the vertex count is the largest endpoint seen.

use std::fmt::Write as _;

use serde::Serialize;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::face::{Face, MAX_GROUND};
use crate::family::SetFamily;
use crate::rng::Prng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    n_vertices: u32,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Normalizes each edge to `(min, max)` and sorts. Rejects loops,
    /// duplicates and endpoints outside `1..=n_vertices`.
    pub fn new(n_vertices: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph> {
        if n_vertices > MAX_GROUND {
            return Err(Error::invalid(format!(
                "{n_vertices} vertices exceed the limit of {MAX_GROUND}"
            )));
        }
        let mut norm = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            for w in [u, v] {
                if w == 0 || w > n_vertices {
                    return Err(Error::invalid(format!(
                        "endpoint {w} outside 1..={n_vertices}"
                    )));
                }
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::invalid("duplicate edge"));
        }
        Ok(Graph {
            n_vertices,
            edges: norm,
        })
    }

    pub fn path(n: u32) -> Result<Graph> {
        Graph::new(n, (1..n).map(|i| (i, i + 1)))
    }

    pub fn cycle(n: u32) -> Result<Graph> {
        if n < 3 {
            return Err(Error::invalid("a cycle needs at least 3 vertices"));
        }
        Graph::new(n, (1..n).map(|i| (i, i + 1)).chain([(1, n)]))
    }

    pub fn complete(n: u32) -> Result<Graph> {
        Graph::new(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))))
    }

    pub fn n_vertices(&self) -> u32 {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Neighbourhood of each vertex as a face; index 0 is vertex 1.
    pub fn adjacency(&self) -> Vec<Face> {
        let mut adj = vec![Face::EMPTY; self.n_vertices as usize];
        for &(u, v) in &self.edges {
            adj[(u - 1) as usize] = adj[(u - 1) as usize].with(v);
            adj[(v - 1) as usize] = adj[(v - 1) as usize].with(u);
        }
        adj
    }

    pub fn is_independent(&self, set: Face) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| !(set.contains(u) && set.contains(v)))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_number(token: &str, line: usize) -> Result<u32> {
    token.parse::<u32>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a positive integer, found {token:?}"),
    })
}

pub fn parse_facets(text: &str) -> Result<Complex> {
    let (n, facets) = parse_set_lines(text, "facets")?;
    Complex::from_facets(SetFamily::new(n, facets)?)
}

/// Reads a set family in the facet format. Unlike [`parse_facets`], members
/// contained in other members are kept.
pub fn parse_family(text: &str) -> Result<SetFamily> {
    let (n, members) = parse_set_lines(text, "members")?;
    SetFamily::new(n, members)
}

fn parse_set_lines(text: &str, what: &str) -> Result<(u32, Vec<Face>)> {
    let mut header_n: Option<(u32, usize)> = None;
    let mut facets = Vec::new();
    let mut max_seen = 0u32;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens[0] == "n" {
            if tokens.len() != 2 || header_n.is_some() || !facets.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "header must be a single `n <N>` line before any set".into(),
                });
            }
            let n = parse_number(tokens[1], line)?;
            if n > MAX_GROUND {
                return Err(Error::Parse {
                    line,
                    message: format!("ground size {n} exceeds {MAX_GROUND}"),
                });
            }
            header_n = Some((n, line));
            continue;
        }
        let mut elements = Vec::with_capacity(tokens.len());
        for tok in tokens {
            let e = parse_number(tok, line)?;
            if e == 0 || e > MAX_GROUND {
                return Err(Error::Parse {
                    line,
                    message: format!("element {e} outside 1..={MAX_GROUND}"),
                });
            }
            elements.push(e);
        }
        let face = Face::from_elements(elements).expect("range checked");
        max_seen = max_seen.max(face.max_element());
        facets.push(face);
    }
    if facets.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: format!("no {what}"),
        });
    }
    let n = match header_n {
        Some((n, line)) if n < max_seen => {
            return Err(Error::Parse {
                line,
                message: format!("header n = {n} is below the largest element {max_seen}"),
            })
        }
        Some((n, _)) => n,
        None => max_seen,
    };
    Ok((n, facets))
}

/// Canonical facet text: an `n` header and one facet per line in canonical order.
pub fn facets_to_text(cx: &Complex) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", cx.ground_n()).unwrap();
    for f in cx.facets() {
        let line: Vec<String> = f.elements().map(|e| e.to_string()).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut header_n: Option<u32> = None;
    let mut edges = Vec::new();
    let mut max_seen = 0u32;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens[0] == "p" {
            let rest: Vec<&str> = tokens[1..]
                .iter()
                .copied()
                .filter(|t| *t != "edge")
                .collect();
            if rest.len() != 2 || header_n.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "expected a single `p <n> <m>` header".into(),
                });
            }
            let n = parse_number(rest[0], line)?;
            parse_number(rest[1], line)?;
            if n > MAX_GROUND {
                return Err(Error::Parse {
                    line,
                    message: format!("{n} vertices exceed {MAX_GROUND}"),
                });
            }
            header_n = Some(n);
            continue;
        }
        if tokens[0] == "e" {
            tokens.remove(0);
        }
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected an edge `u v`".into(),
            });
        }
        let u = parse_number(tokens[0], line)?;
        let v = parse_number(tokens[1], line)?;
        for w in [u, v] {
            if w == 0 || w > MAX_GROUND {
                return Err(Error::Parse {
                    line,
                    message: format!("vertex {w} outside 1..={MAX_GROUND}"),
                });
            }
        }
        if u == v {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at vertex {u}"),
            });
        }
        max_seen = max_seen.max(u).max(v);
        edges.push((u.min(v), u.max(v)));
    }
    let n = header_n.unwrap_or(max_seen);
    if n < max_seen {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {n} vertices but vertex {max_seen} appears"),
        });
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, edges)
}

pub fn graph_to_text(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p {} {}", g.n_vertices, g.edges.len()).unwrap();
    for (u, v) in &g.edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Complex of independent sets; its facets are the maximal independent sets,
/// found as maximal cliques of the complement graph.
pub fn independence_complex(g: &Graph) -> Complex {
    let n = g.n_vertices();
    let adj = g.adjacency();
    let all = Face::prefix(n);
    let comp: Vec<Face> = (1..=n)
        .map(|v| {
            all.difference(adj[(v - 1) as usize])
                .difference(Face::singleton(v))
        })
        .collect();
    let mut cliques = Vec::new();
    bron_kerbosch(&comp, Face::EMPTY, all, Face::EMPTY, &mut cliques);
    Complex::from_facets(SetFamily::new(n, cliques).expect("vertices within ground set"))
        .expect("at least the empty clique")
}

fn bron_kerbosch(adj: &[Face], r: Face, mut p: Face, mut x: Face, out: &mut Vec<Face>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = p
        .union(x)
        .elements()
        .max_by_key(|&u| p.meet_size(adj[(u - 1) as usize]))
        .expect("p non-empty");
    let branch = p.difference(adj[(pivot - 1) as usize]);
    for v in branch.elements() {
        let nv = adj[(v - 1) as usize];
        bron_kerbosch(adj, r.with(v), p.intersection(nv), x.intersection(nv), out);
        p = p.difference(Face::singleton(v));
        x = x.with(v);
    }
}

pub fn gen_complete(n: u32) -> Result<Complex> {
    if !(1..=MAX_GROUND).contains(&n) {
        return Err(Error::invalid(format!("n = {n} outside 1..={MAX_GROUND}")));
    }
    Complex::simplex(n)
}

/// Parameters for [`gen_random`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RandomSpec {
    /// Independence complex of an Erdős–Rényi graph `G(n, p)`.
    GnpGraph { n: u32, p: f64 },
    /// `count` uniformly random facets with sizes in `min_size..=max_size`.
    RandomFacets {
        n: u32,
        count: usize,
        min_size: usize,
        max_size: usize,
    },
}

/// `G(n, p)`: pairs `(u, v)` with `u < v` are visited in lexicographic order
/// and each is an edge when `bernoulli(p)` succeeds.
pub fn gen_gnp_graph(n: u32, p: f64, seed: u64) -> Result<Graph> {
    if n > MAX_GROUND {
        return Err(Error::invalid(format!("n = {n} exceeds {MAX_GROUND}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = Prng::new(seed);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.bernoulli(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

pub fn gen_random(spec: &RandomSpec, seed: u64) -> Result<Complex> {
    match *spec {
        RandomSpec::GnpGraph { n, p } => Ok(independence_complex(&gen_gnp_graph(n, p, seed)?)),
        RandomSpec::RandomFacets {
            n,
            count,
            min_size,
            max_size,
        } => {
            if !(1..=MAX_GROUND).contains(&n) {
                return Err(Error::invalid(format!("n = {n} outside 1..={MAX_GROUND}")));
            }
            if count == 0 || min_size == 0 || min_size > max_size || max_size > n as usize {
                return Err(Error::invalid(format!(
                    "need count >= 1 and 1 <= min_size <= max_size <= n, got count = {count}, sizes {min_size}..={max_size}, n = {n}"
                )));
            }
            let mut rng = Prng::new(seed);
            let elements: Vec<u32> = (1..=n).collect();
            let facets: Vec<Face> = (0..count)
                .map(|_| {
                    let size = rng.range_inclusive(min_size as u64, max_size as u64) as usize;
                    Face::from_elements(rng.sample(&elements, size)).expect("elements in range")
                })
                .collect();
            Complex::from_facets(SetFamily::new(n, facets)?)
        }
    }
}
