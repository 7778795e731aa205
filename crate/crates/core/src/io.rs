//! Instance files.
//!
//! Two formats are supported:
//!
//! - a JSON instance document carrying the network of friends, an optional
//!   coalition structure, model tag, player names, reduction provenance and
//!   gadget layout;
//! - a DIMACS-like edge list for bare graphs: `c` comment lines, one header
//!   `p ahg <n> <m>` (0-based ids) or `p edge <n> <m>` (1-based ids), then
//!   `e <i> <j>` lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coalition::CoalitionStructure;
use crate::error::{Error, Result};
use crate::gadgets::GadgetLayout;
use crate::game::{Game, UtilityModel};
use crate::graph::FriendshipGraph;
use crate::reductions::{build, PaddingStep, PlacedGadget, ReductionArtifact, ReductionTarget};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub format_version: String,
    pub players: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<UtilityModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Gadget sidecar written by the `gadget` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<GadgetLayout>,
}

/// Where a reduced instance came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub target: ReductionTarget,
    pub k_original: usize,
    pub k_effective: usize,
    pub k_prime: usize,
    /// Source graph after preprocessing.
    pub source: SourceGraph,
    pub preprocessing: Vec<PaddingStep>,
    pub vertex_players: Vec<usize>,
    pub edge_players: Vec<usize>,
    pub incidence_players: Vec<IncidenceEntry>,
    pub dummy_players: Vec<Vec<usize>>,
    pub gadgets: Vec<PlacedGadget>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceEntry {
    pub vertex: usize,
    pub edge: usize,
    pub player: usize,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

impl InstanceDocument {
    /// A document holding only a graph.
    pub fn from_graph(graph: &FriendshipGraph) -> Self {
        InstanceDocument {
            format_version: FORMAT_VERSION.into(),
            players: graph.num_vertices(),
            names: None,
            edges: graph.edges().to_vec(),
            partition: None,
            model: None,
            provenance: None,
            layout: None,
        }
    }

    pub fn from_game(game: &Game, gamma: Option<&CoalitionStructure>, model: Option<UtilityModel>) -> Self {
        InstanceDocument {
            partition: gamma.map(CoalitionStructure::to_lists),
            model,
            ..Self::from_graph(game.graph())
        }
    }

    pub fn from_artifact(r: &ReductionArtifact) -> Self {
        let provenance = Provenance {
            target: r.target,
            k_original: r.k_original,
            k_effective: r.k_effective,
            k_prime: r.k_prime,
            source: SourceGraph {
                vertices: r.source.num_vertices(),
                edges: r.source.edges().to_vec(),
            },
            preprocessing: r.preprocessing_log.clone(),
            vertex_players: r.vertex_players.clone(),
            edge_players: r.edge_players.clone(),
            incidence_players: r
                .incidence_players
                .iter()
                .map(|(&(vertex, edge), &player)| IncidenceEntry { vertex, edge, player })
                .collect(),
            dummy_players: r.dummy_players.clone(),
            gadgets: r.gadgets.clone(),
        };
        InstanceDocument {
            provenance: Some(provenance),
            ..Self::from_game(&r.game, Some(&r.gamma), r.target.models().first().copied())
        }
    }

    /// Sorts and normalizes edges and partition blocks.
    pub fn canonicalize(&mut self) {
        for e in &mut self.edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        self.edges.sort_unstable();
        self.edges.dedup();
        if let Some(p) = &mut self.partition {
            for block in p.iter_mut() {
                block.sort_unstable();
            }
            p.sort();
        }
    }

    /// Checks ids, the partition and the version; field names appear in errors.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(invalid(
                "format_version",
                format!(
                    "unsupported version `{}`, expected `{FORMAT_VERSION}`",
                    self.format_version
                ),
            ));
        }
        let n = self.players;
        if let Some(names) = &self.names {
            if names.len() != n {
                return Err(invalid("names", format!("{} names for {n} players", names.len())));
            }
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                return Err(invalid("edges", format!("edge [{a},{b}] has an id outside 0..{n}")));
            }
            if a == b {
                return Err(invalid("edges", format!("self-loop on player {a}")));
            }
        }
        if let Some(p) = &self.partition {
            let mut seen = vec![false; n];
            for block in p {
                if block.is_empty() {
                    return Err(invalid("partition", "empty block"));
                }
                for &q in block {
                    if q >= n {
                        return Err(invalid("partition", format!("player {q} outside 0..{n}")));
                    }
                    if std::mem::replace(&mut seen[q], true) {
                        return Err(invalid(
                            "partition",
                            format!("overlapping blocks: player {q} appears twice"),
                        ));
                    }
                }
            }
            if let Some(q) = seen.iter().position(|&s| !s) {
                return Err(invalid("partition", format!("player {q} is not covered by any block")));
            }
        }
        if let Some(l) = &self.layout {
            if l.players().end > n {
                return Err(invalid("layout", format!("gadget covers players beyond 0..{n}")));
            }
        }
        if self.provenance.is_some() && self.partition.is_none() {
            return Err(invalid(
                "partition",
                "reduced instances must carry their coalition structure",
            ));
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<FriendshipGraph> {
        FriendshipGraph::new(self.players, self.edges.iter().copied())
    }

    pub fn game(&self) -> Result<Game> {
        Ok(Game::new(self.graph()?))
    }

    pub fn coalition_structure(&self) -> Result<Option<CoalitionStructure>> {
        self.partition
            .as_ref()
            .map(|p| CoalitionStructure::from_lists(self.players, p))
            .transpose()
    }

    /// Rebuilds the reduction from the stored source graph and checks that it
    /// matches the stored game, partition and maps.
    pub fn to_artifact(&self) -> Result<Option<ReductionArtifact>> {
        let Some(prov) = &self.provenance else {
            return Ok(None);
        };
        let source = FriendshipGraph::new(prov.source.vertices, prov.source.edges.iter().copied())
            .map_err(|e| invalid("provenance.source", e.to_string()))?;
        let mut r = build(&source, prov.k_effective, prov.target).map_err(|e| invalid("provenance", e.to_string()))?;
        r.k_original = prov.k_original;
        r.preprocessing_log = prov.preprocessing.clone();
        let rebuilt = Self::from_artifact(&r);
        let stored = rebuilt.provenance.as_ref().expect("from_artifact sets provenance");
        if rebuilt.players != self.players || rebuilt.edges != self.edges {
            return Err(invalid(
                "edges",
                "graph differs from the reduction of the stored source",
            ));
        }
        if rebuilt.partition != self.partition {
            return Err(invalid(
                "partition",
                "partition differs from the reduction of the stored source",
            ));
        }
        if stored != prov {
            return Err(invalid(
                "provenance",
                "maps differ from the reduction of the stored source",
            ));
        }
        Ok(Some(r))
    }

    /// Player names, defaulting to decimal ids.
    pub fn player_name(&self, p: usize) -> String {
        self.names
            .as_ref()
            .and_then(|n| n.get(p).cloned())
            .unwrap_or_else(|| p.to_string())
    }
}

/// Parses, validates and canonicalizes a JSON instance document.
pub fn parse_instance(text: &str) -> Result<InstanceDocument> {
    let mut doc: InstanceDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.validate()?;
    doc.canonicalize();
    Ok(doc)
}

/// Canonical pretty JSON with a trailing newline.
pub fn serialize_instance(doc: &InstanceDocument) -> String {
    let mut doc = doc.clone();
    doc.canonicalize();
    let mut out = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    out.push('\n');
    out
}

/// Id base of an edge-list file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListFlavor {
    /// `p ahg`, 0-based ids.
    Ahg,
    /// `p edge`, 1-based ids (DIMACS clique benchmarks).
    Dimacs,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses an edge-list graph. Duplicate edges are merged.
pub fn parse_edge_list(text: &str) -> Result<FriendshipGraph> {
    let mut header: Option<(EdgeListFlavor, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let column = raw.len() - raw.trim_start().len() + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let number = |pos: usize| -> Result<usize> {
            let tok = fields
                .get(pos)
                .ok_or_else(|| parse_error(line_no, column, format!("expected {} fields", pos + 1)))?;
            let col = raw.find(tok).map_or(column, |c| c + 1);
            tok.parse()
                .map_err(|_| parse_error(line_no, col, format!("`{tok}` is not a non-negative integer")))
        };
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(parse_error(line_no, column, "duplicate `p` header"));
                }
                let flavor = match fields.get(1) {
                    Some(&"ahg") => EdgeListFlavor::Ahg,
                    Some(&"edge") | Some(&"col") => EdgeListFlavor::Dimacs,
                    _ => {
                        return Err(parse_error(
                            line_no,
                            column,
                            "header must be `p ahg <n> <m>` or `p edge <n> <m>`",
                        ))
                    }
                };
                header = Some((flavor, number(2)?, number(3)?));
            }
            "e" => {
                let Some((flavor, n, _)) = header else {
                    return Err(parse_error(line_no, column, "edge line before the `p` header"));
                };
                let (mut a, mut b) = (number(1)?, number(2)?);
                if flavor == EdgeListFlavor::Dimacs {
                    if a == 0 || b == 0 {
                        return Err(parse_error(line_no, column, "`p edge` files use 1-based ids"));
                    }
                    a -= 1;
                    b -= 1;
                }
                if a >= n || b >= n || a == b {
                    return Err(parse_error(
                        line_no,
                        column,
                        format!("invalid edge {{{a},{b}}} for {n} vertices"),
                    ));
                }
                edges.push((a, b));
            }
            other => return Err(parse_error(line_no, column, format!("unknown line type `{other}`"))),
        }
    }
    let Some((_, n, _)) = header else {
        return Err(parse_error(1, 1, "missing `p` header"));
    };
    FriendshipGraph::new(n, edges)
}

/// Writes the `p ahg` form (0-based ids).
pub fn write_edge_list(graph: &FriendshipGraph) -> String {
    let mut out = format!("p ahg {} {}\n", graph.num_vertices(), graph.num_edges());
    for &(a, b) in graph.edges() {
        writeln!(out, "e {a} {b}").expect("writing to a String cannot fail");
    }
    out
}

/// Reads a graph from either format, picking by the first non-blank character.
pub fn parse_graph_any(text: &str) -> Result<FriendshipGraph> {
    if text.trim_start().starts_with('{') {
        parse_instance(text)?.graph()
    } else {
        parse_edge_list(text)
    }
}

/// Player counts per provenance class, for summaries.
pub fn provenance_summary(p: &Provenance) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([
        ("vertex_players", p.vertex_players.len()),
        ("edge_players", p.edge_players.len()),
        ("incidence_players", p.incidence_players.len()),
        ("dummy_players", p.dummy_players.iter().map(Vec::len).sum()),
        ("gadgets", p.gadgets.len()),
    ])
}
