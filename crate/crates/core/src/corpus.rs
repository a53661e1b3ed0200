//! The shipped verification corpus.
//!
//! Every instance is produced from fixed parameters and seeds, so the files
//! under `corpus/` can be regenerated byte for byte with [`standard_corpus`].

use serde::Serialize;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::ingest::{
    facets_to_text, gen_complete, gen_gnp_graph, gen_random, graph_to_text, independence_complex,
    parse_facets, parse_graph, Graph, RandomSpec,
};

/// How an instance is stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Facets(Complex),
    Graph(Graph),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    pub source: Source,
}

/// Input file kind, inferred from the extension unless forced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Facets,
    Graph,
}

impl InputKind {
    pub fn extension(self) -> &'static str {
        match self {
            InputKind::Facets => "facets",
            InputKind::Graph => "graph",
        }
    }

    pub fn from_extension(ext: &str) -> Option<InputKind> {
        match ext {
            "facets" => Some(InputKind::Facets),
            "graph" => Some(InputKind::Graph),
            _ => None,
        }
    }
}

impl Instance {
    pub fn kind(&self) -> InputKind {
        match self.source {
            Source::Facets(_) => InputKind::Facets,
            Source::Graph(_) => InputKind::Graph,
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.{}", self.name, self.kind().extension())
    }

    pub fn text(&self) -> String {
        match &self.source {
            Source::Facets(cx) => facets_to_text(cx),
            Source::Graph(g) => graph_to_text(g),
        }
    }

    pub fn complex(&self) -> Complex {
        match &self.source {
            Source::Facets(cx) => cx.clone(),
            Source::Graph(g) => independence_complex(g),
        }
    }
}

/// Parses file contents of the given kind into a complex.
pub fn load_text(kind: InputKind, text: &str) -> Result<Complex> {
    match kind {
        InputKind::Facets => parse_facets(text),
        InputKind::Graph => Ok(independence_complex(&parse_graph(text)?)),
    }
}

/// Seed used for every generated corpus instance.
pub const CORPUS_SEED: u64 = 20_240_601;

/// Complete complexes on `[1]..[14]`, independence complexes of paths and
/// cycles on 4 to 16 vertices, `G(n, p)` graphs with `n <= 16`, and random
/// facet complexes with `N <= 16`. Sixty instances in all.
pub fn standard_corpus() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for n in 1..=14 {
        out.push(Instance {
            name: format!("complete_{n:02}"),
            source: Source::Facets(gen_complete(n)?),
        });
    }
    for n in 4..=16 {
        out.push(Instance {
            name: format!("path_{n:02}"),
            source: Source::Graph(Graph::path(n)?),
        });
    }
    for n in 4..=16 {
        out.push(Instance {
            name: format!("cycle_{n:02}"),
            source: Source::Graph(Graph::cycle(n)?),
        });
    }
    for (i, n) in [8u32, 10, 12, 14, 16].into_iter().enumerate() {
        for (j, p) in [0.15, 0.3].into_iter().enumerate() {
            let seed = CORPUS_SEED + (10 * i + j) as u64;
            out.push(Instance {
                name: format!("gnp_{n:02}_{}", (p * 100.0) as u32),
                source: Source::Graph(gen_gnp_graph(n, p, seed)?),
            });
        }
    }
    for (i, n) in [8u32, 10, 12, 14, 16].into_iter().enumerate() {
        for (j, count) in [3usize, 6].into_iter().enumerate() {
            let spec = RandomSpec::RandomFacets {
                n,
                count,
                min_size: n as usize / 2,
                max_size: n as usize - 2,
            };
            let seed = CORPUS_SEED + 1000 + (10 * i + j) as u64;
            out.push(Instance {
                name: format!("facets_{n:02}_{count}"),
                source: Source::Facets(gen_random(&spec, seed)?),
            });
        }
    }
    let mut names: Vec<&str> = out.iter().map(|i| i.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != out.len() {
        return Err(Error::Invariant("duplicate corpus instance name".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let corpus = standard_corpus().unwrap();
        assert_eq!(corpus.len(), 60);
        for inst in &corpus {
            let cx = inst.complex();
            assert!(cx.ground_n() <= 16, "{}", inst.name);
            assert!(cx.rank() >= 1, "{}", inst.name);
        }
    }

    #[test]
    fn text_round_trips() {
        for inst in standard_corpus().unwrap() {
            let parsed = load_text(inst.kind(), &inst.text()).unwrap();
            assert_eq!(parsed, inst.complex(), "{}", inst.name);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(standard_corpus().unwrap(), standard_corpus().unwrap());
    }
}
