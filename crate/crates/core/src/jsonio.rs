//! JSON schemas for the file formats the CLI consumes and emits.
//!
//! Rationals travel as `"p/q"` strings (or `"p"` for integers), words as
//! display strings against the owning system's alphabet, and paths by edge
//! label. Output maps are ordered, so identical inputs serialize to
//! identical bytes.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::{
    BaseLocation, DecompEdge, DecompVertex, GraphEdge, LevelDecomposition, MRDiagram, Resolution,
    ResolutionLevel, SeparableDecomposition, SolutionGraph, TwistGenerator,
};
use crate::lattice::LatticeInstance;
use crate::oracle::SolutionSet;
use crate::parse::parse_equations;
use crate::pseudogroup::{BandSystem, Base, Interval, MoveKind, MoveRecord, Rat};
use crate::systems::{EquationSystem, Substitution};
use crate::words::{Alphabet, PositiveWord, SymbolId};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("json: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("bad word {0:?}: every letter must be a known symbol")]
    BadWord(String),
    #[error("unknown edge label {0:?}")]
    UnknownLabel(String),
    #[error("{0}")]
    Invalid(String),
}

pub fn rational_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_str(s: &str) -> Result<Rat, JsonError> {
    let parse_int =
        |t: &str| BigInt::from_str(t.trim()).map_err(|_| JsonError::BadRational(s.to_string()));
    match s.split_once('/') {
        Some((n, d)) => {
            let denom = parse_int(d)?;
            if denom == BigInt::from(0) {
                return Err(JsonError::BadRational(s.to_string()));
            }
            Ok(BigRational::new(parse_int(n)?, denom))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

fn word_to_string(w: &PositiveWord, alphabet: &Alphabet) -> String {
    w.display(alphabet).to_string()
}

fn word_from_str(s: &str, alphabet: &Alphabet) -> Result<PositiveWord, JsonError> {
    let mut letters = Vec::new();
    for c in s.chars() {
        if c.is_whitespace() {
            continue;
        }
        let id = alphabet
            .lookup(&c.to_string())
            .ok_or_else(|| JsonError::BadWord(s.to_string()))?;
        letters.push(id);
    }
    Ok(PositiveWord::new(letters))
}

fn symbol_from_str(s: &str, alphabet: &Alphabet) -> Result<SymbolId, JsonError> {
    alphabet
        .lookup(s)
        .ok_or_else(|| JsonError::UnknownSymbol(s.to_string()))
}

// ---------------------------------------------------------------------------
// Lattice instances

#[derive(Serialize, Deserialize)]
pub struct LatticeInstanceWire {
    pub rank: usize,
    pub generators: Vec<Vec<i64>>,
    pub lengths: Vec<String>,
}

pub fn lattice_instance_from_json(text: &str) -> Result<LatticeInstance, JsonError> {
    let wire: LatticeInstanceWire = serde_json::from_str(text)?;
    let generators = wire
        .generators
        .iter()
        .map(|g| g.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let lengths = wire
        .lengths
        .iter()
        .map(|s| rational_from_str(s))
        .collect::<Result<Vec<_>, _>>()?;
    LatticeInstance::new(wire.rank, generators, lengths)
        .map_err(|e| JsonError::Invalid(e.to_string()))
}

#[derive(Serialize)]
pub struct PositiveBasisWire {
    pub change_of_basis: Vec<Vec<String>>,
    pub expressions: Vec<Vec<String>>,
}

pub fn positive_basis_to_json(b: &crate::lattice::PositiveBasis) -> String {
    let wire = PositiveBasisWire {
        change_of_basis: b
            .change_of_basis
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect(),
        expressions: b
            .expressions
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("serializable")
}

// ---------------------------------------------------------------------------
// Band systems and traces

#[derive(Serialize, Deserialize)]
pub struct BandSystemWire {
    pub components: Vec<[String; 2]>,
    pub bases: Vec<BaseWire>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marks: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct BaseWire {
    pub id: usize,
    pub support: [String; 2],
    pub partner: usize,
    pub offset: String,
}

pub fn band_system_from_json(text: &str) -> Result<BandSystem, JsonError> {
    let wire: BandSystemWire = serde_json::from_str(text)?;
    let mut components = Vec::new();
    for [lo, hi] in &wire.components {
        components.push(
            Interval::new(rational_from_str(lo)?, rational_from_str(hi)?)
                .map_err(|e| JsonError::Invalid(e.to_string()))?,
        );
    }
    let mut bases = Vec::new();
    for b in &wire.bases {
        bases.push(Base {
            id: b.id,
            support: Interval::new(
                rational_from_str(&b.support[0])?,
                rational_from_str(&b.support[1])?,
            )
            .map_err(|e| JsonError::Invalid(e.to_string()))?,
            partner: b.partner,
            offset: rational_from_str(&b.offset)?,
        });
    }
    let marks = wire
        .marks
        .iter()
        .map(|m| rational_from_str(m))
        .collect::<Result<Vec<_>, _>>()?;
    BandSystem::new(components, bases, marks).map_err(|e| JsonError::Invalid(e.to_string()))
}

pub fn band_system_to_json(bs: &BandSystem) -> String {
    let wire = BandSystemWire {
        components: bs
            .components()
            .iter()
            .map(|c| [rational_to_string(&c.lo), rational_to_string(&c.hi)])
            .collect(),
        bases: bs
            .bases()
            .iter()
            .map(|b| BaseWire {
                id: b.id,
                support: [
                    rational_to_string(&b.support.lo),
                    rational_to_string(&b.support.hi),
                ],
                partner: b.partner,
                offset: rational_to_string(&b.offset),
            })
            .collect(),
        marks: bs.marks().iter().map(rational_to_string).collect(),
    };
    serde_json::to_string_pretty(&wire).expect("serializable")
}

/// One trace line per move: `{move, args, chi_before, chi_after,
/// total_length}`.
pub fn move_record_to_json(r: &MoveRecord) -> String {
    let interval_arg = |iv: &Interval| {
        serde_json::json!({
            "subinterval": [rational_to_string(&iv.lo), rational_to_string(&iv.hi)]
        })
    };
    let (name, args) = match &r.kind {
        MoveKind::RemoveIsolated { base } => {
            ("remove_isolated", serde_json::json!({ "base": base }))
        }
        MoveKind::RemoveDouble { subinterval } => ("remove_double", interval_arg(subinterval)),
        MoveKind::TrimSemiIsolated { subinterval } => {
            ("trim_semi_isolated", interval_arg(subinterval))
        }
        MoveKind::SplitInterior { subinterval } => ("split_interior", interval_arg(subinterval)),
        MoveKind::EntireTransformation { carrier } => (
            "entire_transformation",
            serde_json::json!({ "carrier": carrier }),
        ),
        MoveKind::DehnTwistPositiveEnd => ("dehn_twist_positive_end", serde_json::json!({})),
        MoveKind::Terminal {
            rational_degeneration,
        } => (
            "terminal",
            serde_json::json!({ "rational_degeneration": rational_degeneration }),
        ),
    };
    serde_json::json!({
        "move": name,
        "args": args,
        "chi_before": r.chi_before,
        "chi_after": r.chi_after,
        "total_length": rational_to_string(&r.total_length),
    })
    .to_string()
}

// ---------------------------------------------------------------------------
// Substitutions and solution sets

pub fn substitution_to_map(s: &Substitution, alphabet: &Alphabet) -> BTreeMap<String, String> {
    s.bindings()
        .map(|(v, w)| (alphabet.name(v).to_string(), word_to_string(w, alphabet)))
        .collect()
}

pub fn substitution_from_map(
    map: &BTreeMap<String, String>,
    alphabet: &Alphabet,
) -> Result<Substitution, JsonError> {
    let mut s = Substitution::new();
    for (name, word) in map {
        let var = symbol_from_str(name, alphabet)?;
        let image = word_from_str(word, alphabet)?;
        if image.is_empty() {
            return Err(JsonError::Invalid(format!("image of {name} is empty")));
        }
        s.bind(var, image);
    }
    Ok(s)
}

pub fn substitution_from_json(text: &str, sys: &EquationSystem) -> Result<Substitution, JsonError> {
    let map: BTreeMap<String, String> = serde_json::from_str(text)?;
    substitution_from_map(&map, sys.alphabet())
}

#[derive(Serialize)]
pub struct SolutionSetWire {
    pub complete: bool,
    pub count: usize,
    pub solutions: Vec<BTreeMap<String, String>>,
}

pub fn solution_set_to_json(set: &SolutionSet, alphabet: &Alphabet) -> String {
    let wire = SolutionSetWire {
        complete: set.complete,
        count: set.solutions.len(),
        solutions: set
            .solutions
            .iter()
            .map(|s| substitution_to_map(s, alphabet))
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("serializable")
}

// ---------------------------------------------------------------------------
// Solution graphs, twists, resolutions, diagrams

#[derive(Serialize, Deserialize)]
pub struct SolutionGraphWire {
    pub vertices: usize,
    pub base: usize,
    pub edges: Vec<GraphEdgeWire>,
    /// variable name -> sequence of edge labels
    pub paths: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
pub struct GraphEdgeWire {
    pub label: String,
    pub from: usize,
    pub to: usize,
}

pub fn solution_graph_from_wire(
    wire: &SolutionGraphWire,
    sys: &EquationSystem,
) -> Result<SolutionGraph, JsonError> {
    let edges: Vec<GraphEdge> = wire
        .edges
        .iter()
        .map(|e| GraphEdge {
            label: e.label.clone(),
            from: e.from,
            to: e.to,
        })
        .collect();
    let edge_index = |label: &str| -> Result<usize, JsonError> {
        edges
            .iter()
            .position(|e| e.label == label)
            .ok_or_else(|| JsonError::UnknownLabel(label.to_string()))
    };
    let mut paths = BTreeMap::new();
    for (var, labels) in &wire.paths {
        let id = symbol_from_str(var, sys.alphabet())?;
        let path = labels
            .iter()
            .map(|l| edge_index(l))
            .collect::<Result<Vec<_>, _>>()?;
        paths.insert(id, path);
    }
    let graph = SolutionGraph {
        vertex_count: wire.vertices,
        base_vertex: wire.base,
        edges,
        paths,
    };
    graph
        .validate(sys.alphabet())
        .map_err(|e| JsonError::Invalid(e.to_string()))?;
    Ok(graph)
}

pub fn solution_graph_to_wire(g: &SolutionGraph, alphabet: &Alphabet) -> SolutionGraphWire {
    SolutionGraphWire {
        vertices: g.vertex_count,
        base: g.base_vertex,
        edges: g
            .edges
            .iter()
            .map(|e| GraphEdgeWire {
                label: e.label.clone(),
                from: e.from,
                to: e.to,
            })
            .collect(),
        paths: g
            .paths
            .iter()
            .map(|(&v, path)| {
                (
                    alphabet.name(v).to_string(),
                    path.iter().map(|&ei| g.edges[ei].label.clone()).collect(),
                )
            })
            .collect(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TwistWire {
    DehnTwistOnCyclicEdge {
        edge: String,
        variable: String,
        twist_word: String,
    },
    GeneralizedAbelian {
        variables: Vec<String>,
        exponent: Option<u32>,
    },
    LabelTwist {
        label: String,
        replacement: Vec<String>,
    },
}

pub fn twist_from_wire(w: &TwistWire, sys: &EquationSystem) -> Result<TwistGenerator, JsonError> {
    Ok(match w {
        TwistWire::DehnTwistOnCyclicEdge {
            edge,
            variable,
            twist_word,
        } => TwistGenerator::DehnTwistOnCyclicEdge {
            edge: edge.clone(),
            variable: symbol_from_str(variable, sys.alphabet())?,
            twist_word: word_from_str(twist_word, sys.alphabet())?,
        },
        TwistWire::GeneralizedAbelian {
            variables,
            exponent,
        } => TwistGenerator::GeneralizedAbelian {
            variables: variables
                .iter()
                .map(|v| symbol_from_str(v, sys.alphabet()))
                .collect::<Result<Vec<_>, _>>()?,
            exponent: *exponent,
        },
        TwistWire::LabelTwist { label, replacement } => TwistGenerator::LabelTwist {
            label: label.clone(),
            replacement: replacement.clone(),
        },
    })
}

pub fn twist_to_wire(t: &TwistGenerator, alphabet: &Alphabet) -> TwistWire {
    match t {
        TwistGenerator::DehnTwistOnCyclicEdge {
            edge,
            variable,
            twist_word,
        } => TwistWire::DehnTwistOnCyclicEdge {
            edge: edge.clone(),
            variable: alphabet.name(*variable).to_string(),
            twist_word: word_to_string(twist_word, alphabet),
        },
        TwistGenerator::GeneralizedAbelian {
            variables,
            exponent,
        } => TwistWire::GeneralizedAbelian {
            variables: variables
                .iter()
                .map(|&v| alphabet.name(v).to_string())
                .collect(),
            exponent: *exponent,
        },
        TwistGenerator::LabelTwist { label, replacement } => TwistWire::LabelTwist {
            label: label.clone(),
            replacement: replacement.clone(),
        },
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelDecompositionWire {
    Graph(SolutionGraphWire),
    Separable(SeparableDecompositionWire),
    AbelianEdge { variables: Vec<String> },
}

#[derive(Serialize, Deserialize)]
pub struct ResolutionLevelWire {
    pub decomposition: LevelDecompositionWire,
    #[serde(default)]
    pub twists: Vec<TwistWire>,
}

#[derive(Serialize, Deserialize)]
pub struct ResolutionWire {
    pub name: String,
    #[serde(default)]
    pub levels: Vec<ResolutionLevelWire>,
    pub terminal: SolutionGraphWire,
}

pub fn resolution_from_wire(
    wire: &ResolutionWire,
    sys: &EquationSystem,
) -> Result<Resolution, JsonError> {
    let mut levels = Vec::new();
    for lw in &wire.levels {
        let decomposition = match &lw.decomposition {
            LevelDecompositionWire::Graph(g) => {
                LevelDecomposition::Graph(solution_graph_from_wire(g, sys)?)
            }
            LevelDecompositionWire::Separable(d) => {
                LevelDecomposition::Separable(decomposition_from_wire(d, sys)?)
            }
            LevelDecompositionWire::AbelianEdge { variables } => LevelDecomposition::AbelianEdge {
                variables: variables
                    .iter()
                    .map(|v| symbol_from_str(v, sys.alphabet()))
                    .collect::<Result<Vec<_>, _>>()?,
            },
        };
        let twists = lw
            .twists
            .iter()
            .map(|t| twist_from_wire(t, sys))
            .collect::<Result<Vec<_>, _>>()?;
        levels.push(ResolutionLevel {
            decomposition,
            twists,
        });
    }
    Ok(Resolution {
        name: wire.name.clone(),
        levels,
        terminal: solution_graph_from_wire(&wire.terminal, sys)?,
    })
}

pub fn resolution_to_wire(r: &Resolution, alphabet: &Alphabet) -> ResolutionWire {
    ResolutionWire {
        name: r.name.clone(),
        levels: r
            .levels
            .iter()
            .map(|l| ResolutionLevelWire {
                decomposition: match &l.decomposition {
                    LevelDecomposition::Graph(g) => {
                        LevelDecompositionWire::Graph(solution_graph_to_wire(g, alphabet))
                    }
                    LevelDecomposition::Separable(d) => {
                        LevelDecompositionWire::Separable(decomposition_to_wire(d, alphabet))
                    }
                    LevelDecomposition::AbelianEdge { variables } => {
                        LevelDecompositionWire::AbelianEdge {
                            variables: variables
                                .iter()
                                .map(|&v| alphabet.name(v).to_string())
                                .collect(),
                        }
                    }
                },
                twists: l
                    .twists
                    .iter()
                    .map(|t| twist_to_wire(t, alphabet))
                    .collect(),
            })
            .collect(),
        terminal: solution_graph_to_wire(&r.terminal, alphabet),
    }
}

/// An `.mrd` file: the system inline (equation text) plus its resolutions.
#[derive(Serialize, Deserialize)]
pub struct MRDiagramWire {
    pub system: String,
    pub resolutions: Vec<ResolutionWire>,
}

pub fn mr_diagram_from_json(text: &str) -> Result<MRDiagram, JsonError> {
    let wire: MRDiagramWire = serde_json::from_str(text)?;
    let system = parse_equations(&wire.system)
        .map_err(|e| JsonError::Invalid(format!("embedded system: {e}")))?;
    let resolutions = wire
        .resolutions
        .iter()
        .map(|r| resolution_from_wire(r, &system))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MRDiagram {
        system,
        resolutions,
    })
}

pub fn mr_diagram_to_json(m: &MRDiagram) -> String {
    let wire = MRDiagramWire {
        system: crate::parse::print_equations(&m.system),
        resolutions: m
            .resolutions
            .iter()
            .map(|r| resolution_to_wire(r, m.system.alphabet()))
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("serializable")
}

// ---------------------------------------------------------------------------
// Separable decompositions

#[derive(Serialize, Deserialize)]
pub struct SeparableDecompositionWire {
    pub vertices: Vec<DecompVertexWire>,
    pub edges: Vec<DecompEdgeWire>,
    pub base: BaseLocationWire,
}

#[derive(Serialize, Deserialize)]
pub struct DecompVertexWire {
    pub id: usize,
    pub generators: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct DecompEdgeWire {
    pub label: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseLocationWire {
    Vertex(usize),
    EdgeInterior {
        from: usize,
        to: usize,
        label_to_base: String,
        label_from_base: String,
    },
}

pub fn decomposition_from_wire(
    wire: &SeparableDecompositionWire,
    sys: &EquationSystem,
) -> Result<SeparableDecomposition, JsonError> {
    let vertices = wire
        .vertices
        .iter()
        .map(|v| {
            Ok(DecompVertex {
                id: v.id,
                generators: v
                    .generators
                    .iter()
                    .map(|g| symbol_from_str(g, sys.alphabet()))
                    .collect::<Result<Vec<_>, JsonError>>()?,
            })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let edges = wire
        .edges
        .iter()
        .map(|e| DecompEdge {
            label: e.label.clone(),
            from: e.from,
            to: e.to,
        })
        .collect();
    let base = match &wire.base {
        BaseLocationWire::Vertex(v) => BaseLocation::Vertex(*v),
        BaseLocationWire::EdgeInterior {
            from,
            to,
            label_to_base,
            label_from_base,
        } => BaseLocation::EdgeInterior {
            from: *from,
            to: *to,
            label_to_base: label_to_base.clone(),
            label_from_base: label_from_base.clone(),
        },
    };
    let d = SeparableDecomposition {
        vertices,
        edges,
        base,
    };
    d.validate(sys.alphabet())
        .map_err(|e| JsonError::Invalid(e.to_string()))?;
    Ok(d)
}

pub fn decomposition_to_wire(
    d: &SeparableDecomposition,
    alphabet: &Alphabet,
) -> SeparableDecompositionWire {
    SeparableDecompositionWire {
        vertices: d
            .vertices
            .iter()
            .map(|v| DecompVertexWire {
                id: v.id,
                generators: v
                    .generators
                    .iter()
                    .map(|&g| alphabet.name(g).to_string())
                    .collect(),
            })
            .collect(),
        edges: d
            .edges
            .iter()
            .map(|e| DecompEdgeWire {
                label: e.label.clone(),
                from: e.from,
                to: e.to,
            })
            .collect(),
        base: match &d.base {
            BaseLocation::Vertex(v) => BaseLocationWire::Vertex(*v),
            BaseLocation::EdgeInterior {
                from,
                to,
                label_to_base,
                label_from_base,
            } => BaseLocationWire::EdgeInterior {
                from: *from,
                to: *to,
                label_to_base: label_to_base.clone(),
                label_from_base: label_from_base.clone(),
            },
        },
    }
}

pub fn decomposition_from_json(
    text: &str,
    sys: &EquationSystem,
) -> Result<SeparableDecomposition, JsonError> {
    let wire: SeparableDecompositionWire = serde_json::from_str(text)?;
    decomposition_from_wire(&wire, sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::conjugacy_resolution;
    use crate::pseudogroup::fixture_f7;

    #[test]
    fn rational_round_trip() {
        for s in ["0", "-3", "7/5", "-144/377"] {
            let r = rational_from_str(s).unwrap();
            assert_eq!(rational_to_string(&r), s);
        }
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }

    #[test]
    fn band_system_round_trip() {
        let bs = fixture_f7();
        let json = band_system_to_json(&bs);
        let back = band_system_from_json(&json).unwrap();
        assert_eq!(back, bs);
    }

    #[test]
    fn mr_diagram_round_trip() {
        let sys = parse_equations("XZ = ZY").unwrap();
        let m = MRDiagram {
            system: sys.clone(),
            resolutions: vec![conjugacy_resolution(&sys)],
        };
        let json = mr_diagram_to_json(&m);
        let back = mr_diagram_from_json(&json).unwrap();
        assert_eq!(mr_diagram_to_json(&back), json);
    }

    #[test]
    fn bundled_band_fixtures_match_constructors() {
        use crate::pseudogroup::*;
        let cases: [(&str, BandSystem); 8] = [
            ("fixture1", fixture_f1()),
            ("fixture2", fixture_f2()),
            ("fixture3", fixture_f3()),
            ("fixture4", fixture_f4()),
            ("fixture4p", fixture_f4_partnered()),
            ("fixture5", fixture_f5()),
            ("fixture6", fixture_f6()),
            ("fixture7", fixture_f7()),
        ];
        for (name, bs) in cases {
            let path = format!("{}/fixtures/bands/{name}.json", env!("CARGO_MANIFEST_DIR"));
            let text = std::fs::read_to_string(&path).unwrap();
            let parsed = band_system_from_json(&text).unwrap();
            assert_eq!(parsed, bs, "{name}.json drifted from its constructor");
        }
    }

    #[test]
    fn lattice_instance_parses() {
        let inst = lattice_instance_from_json(
            r#"{"rank": 2, "generators": [[2,-1],[-1,1]], "lengths": ["1","7/5"]}"#,
        )
        .unwrap();
        assert_eq!(inst.rank(), 2);
    }
}
