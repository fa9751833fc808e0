use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maf::Maf;
use crate::network::{validate_network, NetworkSpec, Template};
use crate::scalar::ScalarFn;

pub const FORMAT_VERSION: u32 = 1;

/// On-disk network document. Exactly one of `n` (with `nodes`) or
/// `template` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<Template>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: usize,
    pub maf: Maf,
    #[serde(default)]
    pub neighbors: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_gain: Option<ScalarFn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub j: usize,
    pub gain: ScalarFn,
}

/// A parsed document before truncation.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    Explicit(NetworkSpec),
    Template(Template),
}

impl NetworkSource {
    /// The spec at `size`; templates default to their own size, explicit
    /// networks accept only their own.
    pub fn spec(&self, size: Option<usize>) -> Result<NetworkSpec> {
        match self {
            NetworkSource::Explicit(spec) => match size {
                Some(m) if m != spec.n() => {
                    Err(Error::Parse(format!("truncation {m} requested for a non-template network with n = {}", spec.n())))
                }
                _ => Ok(spec.clone()),
            },
            NetworkSource::Template(t) => {
                let m = size.unwrap_or(t.size);
                if m == 0 {
                    return Err(Error::Parse("truncation size must be positive".into()));
                }
                t.expand(m)
            }
        }
    }

    pub fn is_template(&self) -> bool {
        matches!(self, NetworkSource::Template(_))
    }
}

/// Parses a network document. Errors carry the JSON path of the offending
/// field and the line/column reported by the parser.
pub fn parse_network(text: &str) -> Result<NetworkSource> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: NetworkFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!("field `{path}`: {inner}"))
    })?;
    file.into_source()
}

impl NetworkFile {
    pub fn into_source(self) -> Result<NetworkSource> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!("field `version`: expected {FORMAT_VERSION}, got {}", self.version)));
        }
        match (self.n, self.template) {
            (Some(_), Some(_)) => Err(Error::Parse("fields `n` and `template` are mutually exclusive".into())),
            (None, None) => Err(Error::Parse("one of the fields `n` or `template` is required".into())),
            (None, Some(t)) => {
                if !self.nodes.is_empty() {
                    return Err(Error::Parse("field `nodes` must be empty for a template network".into()));
                }
                if t.size == 0 {
                    return Err(Error::Parse("field `template.size` must be positive".into()));
                }
                // expand once so that a malformed band is reported at load time
                t.expand(t.size)?;
                Ok(NetworkSource::Template(t))
            }
            (Some(n), None) => {
                let mut slots: Vec<Option<NodeEntry>> = vec![None; n];
                for (k, node) in self.nodes.into_iter().enumerate() {
                    if node.id >= n {
                        return Err(Error::Parse(format!("field `nodes[{k}].id`: {} out of range for n = {n}", node.id)));
                    }
                    let id = node.id;
                    if slots[id].replace(node).is_some() {
                        return Err(Error::Parse(format!("field `nodes[{k}].id`: duplicate id {id}")));
                    }
                }
                let mut neighbors = Vec::with_capacity(n);
                let mut gains = Vec::with_capacity(n);
                let mut mafs = Vec::with_capacity(n);
                let mut external = Vec::with_capacity(n);
                for (i, slot) in slots.into_iter().enumerate() {
                    let node = slot.ok_or_else(|| Error::Parse(format!("field `nodes`: node {i} is missing")))?;
                    neighbors.push(node.neighbors.iter().map(|e| e.j).collect());
                    gains.push(node.neighbors.into_iter().map(|e| e.gain).collect());
                    mafs.push(node.maf);
                    external.push(node.external_gain);
                }
                Ok(NetworkSource::Explicit(NetworkSpec::from_rows(neighbors, gains, mafs, external)?))
            }
        }
    }

    /// Explicit document for a spec; templated specs are written node by node.
    pub fn from_spec(spec: &NetworkSpec) -> Self {
        let nodes = (0..spec.n())
            .map(|i| NodeEntry {
                id: i,
                maf: spec.maf(i).clone(),
                neighbors: spec.edges(i).map(|(j, g)| EdgeEntry { j, gain: g.clone() }).collect(),
                external_gain: spec.external_gain(i).cloned(),
            })
            .collect();
        NetworkFile { version: FORMAT_VERSION, n: Some(spec.n()), template: None, nodes }
    }

    pub fn from_template(t: &Template) -> Self {
        NetworkFile { version: FORMAT_VERSION, n: None, template: Some(t.clone()), nodes: vec![] }
    }
}

pub fn serialize_network(spec: &NetworkSpec) -> Result<String> {
    serde_json::to_string_pretty(&NetworkFile::from_spec(spec)).map_err(|e| Error::Io(e.to_string()))
}

pub fn read_network_source(path: &Path) -> Result<NetworkSource> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_network(&text)
}

fn checked(spec: NetworkSpec) -> Result<NetworkSpec> {
    let report = validate_network(&spec);
    if !report.passed() {
        let failed: Vec<String> =
            report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        return Err(Error::Validation(failed.join("; ")));
    }
    Ok(spec)
}

/// Reads, expands (templates at `truncation`, default their own size) and
/// validates a network file.
pub fn load_network(path: &Path, truncation: Option<usize>) -> Result<NetworkSpec> {
    checked(read_network_source(path)?.spec(truncation)?)
}

/// One validated spec per truncation size.
pub fn load_network_sizes(path: &Path, sizes: &[usize]) -> Result<Vec<NetworkSpec>> {
    let source = read_network_source(path)?;
    if sizes.is_empty() {
        return Ok(vec![checked(source.spec(None)?)?]);
    }
    sizes.iter().map(|&m| checked(source.spec(Some(m))?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::PlusVector;
    use crate::operators::eval_gamma;

    const TWO: &str = r#"{
  "version": 1,
  "n": 2,
  "nodes": [
    {"id": 0, "maf": {"kind": "sum"}, "neighbors": [{"j": 1, "gain": {"kind": "linear", "params": {"a": 2.0}}}]},
    {"id": 1, "maf": {"kind": "sum"}, "neighbors": [{"j": 0, "gain": {"kind": "linear", "params": {"a": 0.125}}}],
     "external_gain": {"kind": "linear", "params": {"a": 1.0}}}
  ]
}"#;

    const CHAIN: &str = r#"{
  "version": 1,
  "template": {
    "size": 10,
    "maf": {"kind": "sum"},
    "band": [
      {"offset": -1, "gain": {"kind": "linear", "params": {"a": 0.25}}},
      {"offset": 1, "gain": {"kind": "linear", "params": {"a": 0.25}}}
    ]
  }
}"#;

    #[test]
    fn minimal_two_node() {
        let spec = parse_network(TWO).unwrap().spec(None).unwrap();
        assert_eq!(spec.n(), 2);
        let g = eval_gamma(&spec, &PlusVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(g.as_slice(), &[2.0, 0.125]);
        assert!(spec.external_gain(1).is_some() && spec.external_gain(0).is_none());
    }

    #[test]
    fn unknown_maf_names_the_field() {
        let bad = TWO.replacen("\"sum\"", "\"median\"", 1);
        let err = parse_network(&bad).unwrap_err().to_string();
        assert!(err.contains("nodes[0].maf"), "{err}");
        assert!(err.contains("median"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn structural_problems() {
        assert!(parse_network(&TWO.replace("\"version\": 1", "\"version\": 2")).is_err());
        assert!(parse_network(&TWO.replace("\"id\": 1", "\"id\": 0")).is_err());
        assert!(parse_network(&TWO.replace("\"j\": 1", "\"j\": 0")).is_err());
        let extra = TWO.replace("\"n\": 2,", "\"n\": 2, \"m\": 3,");
        assert!(parse_network(&extra).unwrap_err().to_string().contains("m"));
    }

    #[test]
    fn template_sizes() {
        let src = parse_network(CHAIN).unwrap();
        assert!(src.is_template());
        assert_eq!(src.spec(None).unwrap().n(), 10);
        let a = src.spec(Some(50)).unwrap();
        let b = src.spec(Some(100)).unwrap();
        assert_eq!(a.neighbors(0), &[1]);
        assert_eq!(a.neighbors(49), &[48]);
        for i in 1..49 {
            assert_eq!(a.neighbors(i), b.neighbors(i));
            assert_eq!(a.gains_of(i), b.gains_of(i));
        }
        assert!(parse_network(TWO).unwrap().spec(Some(3)).is_err());
    }

    #[test]
    fn round_trip() {
        let spec = parse_network(TWO).unwrap().spec(None).unwrap();
        let again = parse_network(&serialize_network(&spec).unwrap()).unwrap().spec(None).unwrap();
        assert_eq!(spec, again);
        let t = parse_network(CHAIN).unwrap().spec(Some(7)).unwrap();
        let again = parse_network(&serialize_network(&t).unwrap()).unwrap().spec(None).unwrap();
        let probe = PlusVector::new((0..7).map(|k| k as f64 * 0.3).collect()).unwrap();
        assert_eq!(eval_gamma(&t, &probe).unwrap(), eval_gamma(&again, &probe).unwrap());
    }
}
