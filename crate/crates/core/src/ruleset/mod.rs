//! Substitution rules: prototiles with symmetry and edge decorations,
//! per-prototile child placements, the rule-file parser/serializer, and
//! the exact dissection validator. Rule files are the single source of
//! truth; the builtin rules are shipped files embedded verbatim.

mod parse;
mod validate;

pub use parse::{parse_rule_file, serialize_rule, ParseError};
pub use validate::{
    check_edge_orientations, validate_rule, EdgeOrientationReport, TileReport, ValidationReport,
};

use crate::geometry::{ConvexPolygon, Isometry};
use crate::numberfield::{ExtScalar, Field};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mirror {
    SelfMirror,
    Chiral,
}

#[derive(Clone, Debug)]
pub struct Prototile {
    pub label: String,
    pub poly: ConvexPolygon,
    /// order of the rotational self-symmetry of the marked tile
    pub rotsym: u32,
    pub mirror: Mirror,
    /// designated anchor edge index
    pub anchor: usize,
    /// per-edge direction marks, along (+) or against (-) the ccw cycle
    pub edges: Option<Vec<bool>>,
    /// generator of the rotation stabilizer when rotsym > 1
    pub sym_rot: Option<Isometry>,
    /// a reflecting self-map when mirror = self
    pub sym_mir: Option<Isometry>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChildRule {
    pub child: usize,
    /// placement inside zeta * T_parent
    pub motion: Isometry,
}

#[derive(Clone, Debug)]
pub struct RuleSet {
    pub name: String,
    pub field: Field,
    pub prototiles: Vec<Prototile>,
    /// children[i] dissect zeta * T_i
    pub children: Vec<Vec<ChildRule>>,
}

impl RuleSet {
    pub fn prototile_index(&self, label: &str) -> Option<usize> {
        self.prototiles.iter().position(|p| p.label == label)
    }

    pub fn zeta(&self) -> ExtScalar {
        ExtScalar::from_cyc(self.field.zeta())
    }

    /// Inflated prototile zeta * T_i, the region its children dissect.
    pub fn inflated(&self, i: usize) -> ConvexPolygon {
        let z = self.zeta();
        let vs = self.prototiles[i]
            .poly
            .vertices()
            .iter()
            .map(|v| &z * v)
            .collect();
        ConvexPolygon::new(vs).expect("inflation preserves convexity")
    }

    pub fn count_matrix(&self) -> CountMatrix {
        let m = self.prototiles.len();
        let mut mat = vec![vec![0u64; m]; m];
        for (j, kids) in self.children.iter().enumerate() {
            for ch in kids {
                mat[ch.child][j] += 1;
            }
        }
        CountMatrix(mat)
    }
}

/// entry [i][j] counts copies of T_i in the dissection of T_j
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountMatrix(pub Vec<Vec<u64>>);

impl CountMatrix {
    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.0[i][j]
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "pinwheel", "sigma3", "sigma4", "sigma5", "sigma6", "sigma8",
];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "pinwheel" => include_str!("../../rules/pinwheel.rules"),
        "sigma3" => include_str!("../../rules/sigma3.rules"),
        "sigma4" => include_str!("../../rules/sigma4.rules"),
        "sigma5" => include_str!("../../rules/sigma5.rules"),
        "sigma6" => include_str!("../../rules/sigma6.rules"),
        "sigma8" => include_str!("../../rules/sigma8.rules"),
        _ => return None,
    })
}

pub fn builtin_rule(name: &str) -> Result<RuleSet, String> {
    let text = builtin_text(name)
        .ok_or_else(|| format!("unknown builtin rule '{name}' (expected one of {BUILTIN_NAMES:?})"))?;
    parse_rule_file(text).map_err(|es| {
        let lines: Vec<String> = es.iter().map(|e| e.to_string()).collect();
        format!("builtin rule '{name}' failed to parse: {}", lines.join("; "))
    })
}
