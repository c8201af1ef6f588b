//! The on-disk workspace format.
//!
//! A document is a JSON object with a `schema` tag, an ordered list of named
//! objects and an optional free-form `summary`. Every number is an exact
//! rational written as a string, `"p"` or `"p/q"`. Matrices are lists of rows.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "ncwb/1";

pub type RawMatrix = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema: String,
    pub objects: Vec<RawObject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawObject {
    Algebra {
        name: String,
        basis: Vec<String>,
        unit: Vec<String>,
        /// `products[i][j]` holds the coordinates of `e_i e_j`.
        products: Vec<Vec<Vec<String>>>,
    },
    Bimodule {
        name: String,
        algebra: String,
        dim: usize,
        left: Vec<RawMatrix>,
        right: Vec<RawMatrix>,
    },
    LeftModule {
        name: String,
        algebra: String,
        dim: usize,
        left: Vec<RawMatrix>,
    },
    Calculus {
        name: String,
        bimodule: String,
        differential: RawMatrix,
    },
    CartanPair {
        name: String,
        bimodule: String,
        actions: Vec<RawMatrix>,
    },
    Connection {
        name: String,
        calculus: String,
        module: String,
        /// Columns are `nabla` of the module basis, in the quotient basis of `M (x)_A E`.
        matrix: RawMatrix,
    },
    Builtin {
        name: String,
        builtin: String,
        #[serde(default)]
        params: Vec<String>,
    },
    BimoduleMap {
        name: String,
        source: String,
        target: String,
        matrix: RawMatrix,
    },
    OperatorAlgebra {
        name: String,
        pair: String,
        generators: Vec<String>,
        basis: Vec<RawMatrix>,
    },
    Relations {
        name: String,
        pair: String,
        max_len: usize,
        words: usize,
        image_dim: usize,
        relations: Vec<Vec<RawTerm>>,
    },
}

/// `coeff` times a word; letters are `a:<basis name>` or `m:<field index>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub coeff: String,
    pub word: Vec<String>,
}

impl RawObject {
    pub fn name(&self) -> &str {
        match self {
            RawObject::Algebra { name, .. }
            | RawObject::Bimodule { name, .. }
            | RawObject::LeftModule { name, .. }
            | RawObject::Calculus { name, .. }
            | RawObject::CartanPair { name, .. }
            | RawObject::Connection { name, .. }
            | RawObject::Builtin { name, .. }
            | RawObject::BimoduleMap { name, .. }
            | RawObject::OperatorAlgebra { name, .. }
            | RawObject::Relations { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RawObject::Algebra { .. } => "algebra",
            RawObject::Bimodule { .. } => "bimodule",
            RawObject::LeftModule { .. } => "left_module",
            RawObject::Calculus { .. } => "calculus",
            RawObject::CartanPair { .. } => "cartan_pair",
            RawObject::Connection { .. } => "connection",
            RawObject::Builtin { .. } => "builtin",
            RawObject::BimoduleMap { .. } => "bimodule_map",
            RawObject::OperatorAlgebra { .. } => "operator_algebra",
            RawObject::Relations { .. } => "relations",
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, serde_json::Error> {
    serde_json::from_str(text)
}

/// Pretty JSON with a trailing newline; the canonical byte form of a document.
pub fn render_document(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
