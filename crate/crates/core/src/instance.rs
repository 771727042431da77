//! JSON problem instances: a lattice basis, a concrete body and optional
//! target, distance and shifts. Rationals are strings such as `"355/113"`
//! or plain JSON integers.

use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::body::{ConcreteBody, LpIndex, Polytope};
use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::rational::{self, serde_q, QVec, Q};

/// A body as written in an instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    /// `scale · B_pⁿ`; `p` is a rational string or `"inf"`.
    Lp {
        n: usize,
        p: String,
        #[serde(with = "serde_q", default = "one")]
        scale: Q,
    },
    /// `{x : A x ≤ b}` with every `b_i > 0`, so the origin is interior.
    Polytope {
        #[serde(with = "serde_q::mat")]
        a: Vec<QVec>,
        #[serde(with = "serde_q::vec")]
        b: QVec,
    },
    /// Any bounded nonempty `{x : A x ≤ b}`; only for commands that do not
    /// need the origin inside (integer feasibility).
    Halfspaces {
        #[serde(with = "serde_q::mat")]
        a: Vec<QVec>,
        #[serde(with = "serde_q::vec")]
        b: QVec,
    },
    /// `{x : |⟨a_i, x⟩| ≤ 1}`.
    SymmetricPolytope {
        #[serde(with = "serde_q::mat")]
        normals: Vec<QVec>,
    },
    /// `{x : (x − c)ᵗ A (x − c) ≤ 1}`.
    Ellipsoid {
        #[serde(with = "serde_q::mat")]
        shape: Vec<QVec>,
        #[serde(with = "serde_q::vec", default)]
        center: QVec,
    },
    /// `body + shift`.
    Shifted {
        body: Box<BodySpec>,
        #[serde(with = "serde_q::vec")]
        shift: QVec,
    },
}

fn one() -> Q {
    Q::one()
}

fn schema(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{field}: {msg}"))
}

impl BodySpec {
    pub fn lp(n: usize, p: &str, scale: Q) -> Self {
        BodySpec::Lp { n, p: p.into(), scale }
    }

    /// Builds the body, reporting problems with the field path.
    pub fn build(&self) -> Result<ConcreteBody> {
        self.build_at("body")
    }

    fn build_at(&self, at: &str) -> Result<ConcreteBody> {
        let wrap = |field: &str, e: Error| schema(&format!("{at}.{field}"), e);
        match self {
            BodySpec::Lp { n, p, scale } => {
                let p = LpIndex::parse(p).map_err(|e| wrap("p", e))?;
                ConcreteBody::lp(*n, p, scale.clone()).map_err(|e| wrap("scale", e))
            }
            BodySpec::Polytope { a, b } => {
                check_rows(at, a, b)?;
                if let Some(i) = b.iter().position(|x| !x.is_positive()) {
                    return Err(schema(&format!("{at}.b[{i}]"), "must be positive (the origin must be interior)"));
                }
                Ok(ConcreteBody::Polytope(Polytope::new(a.clone(), b.clone()).map_err(|e| wrap("a", e))?))
            }
            BodySpec::Halfspaces { a, b } => {
                check_rows(at, a, b)?;
                let p = Polytope::general(a.clone(), b.clone()).map_err(|e| wrap("a", e))?;
                if p.vertices().is_empty() {
                    return Err(schema(at, "the polytope is empty"));
                }
                Ok(ConcreteBody::Polytope(p))
            }
            BodySpec::SymmetricPolytope { normals } => {
                Ok(ConcreteBody::Polytope(Polytope::symmetric(normals).map_err(|e| wrap("normals", e))?))
            }
            BodySpec::Ellipsoid { shape, center } => {
                let center = if center.is_empty() { vec![Q::zero(); shape.len()] } else { center.clone() };
                let e = Ellipsoid::new(shape.clone(), center).map_err(|e| wrap("shape", e))?;
                ConcreteBody::ellipsoid(e).map_err(|e| wrap("shape", e))
            }
            BodySpec::Shifted { body, shift } => {
                let inner = body.build_at(&format!("{at}.body"))?;
                inner.shifted(shift.clone()).map_err(|e| wrap("shift", e))
            }
        }
    }
}

fn check_rows(at: &str, a: &[QVec], b: &[Q]) -> Result<()> {
    if a.len() != b.len() {
        return Err(schema(&format!("{at}.b"), format!("has {} entries but A has {} rows", b.len(), a.len())));
    }
    Ok(())
}

/// An instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub lattice: LatticeBasis,
    pub body: BodySpec,
    #[serde(with = "opt_vec", default, skip_serializing_if = "Option::is_none")]
    pub target: Option<QVec>,
    #[serde(with = "opt_q", default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<Q>,
    #[serde(with = "opt_mat", default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<QVec>>,
}

impl Instance {
    pub fn new(lattice: LatticeBasis, body: BodySpec) -> Self {
        Instance { lattice, body, target: None, distance: None, shifts: None }
    }

    /// Parses and validates; errors carry the line and column or the
    /// offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)
            .map_err(|e| Error::Schema(format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e))))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    fn validate(&self) -> Result<()> {
        let body = self.body.build()?;
        let n = self.lattice.dim();
        if body_dim(&body) != n {
            return Err(schema(
                "body",
                format!("dimension {} does not match the lattice dimension {n}", body_dim(&body)),
            ));
        }
        if let Some(t) = &self.target {
            if t.len() != n {
                return Err(schema("target", format!("has {} entries, expected {n}", t.len())));
            }
        }
        if let Some(d) = &self.distance {
            if d.is_negative() {
                return Err(schema("distance", "must be nonnegative"));
            }
        }
        if let Some(s) = &self.shifts {
            if let Some(i) = s.iter().position(|v| v.len() != n) {
                return Err(schema(&format!("shifts[{i}]"), format!("expected {n} entries")));
            }
        }
        Ok(())
    }

    pub fn body(&self) -> Result<ConcreteBody> {
        self.body.build()
    }

    pub fn target(&self) -> Result<&QVec> {
        self.target.as_ref().ok_or_else(|| schema("target", "required by this command"))
    }

    pub fn distance(&self) -> Result<&Q> {
        self.distance.as_ref().ok_or_else(|| schema("distance", "required by this command"))
    }
}

fn body_dim(b: &ConcreteBody) -> usize {
    crate::body::ConvexBody::dim(b)
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

mod opt_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<QVec>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_q::vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<QVec>, D::Error> {
        serde_q::vec::deserialize(d).map(Some)
    }
}

mod opt_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&rational::fmt_q(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        serde_q::deserialize(d).map(Some)
    }
}

mod opt_mat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<QVec>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_q::mat::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<QVec>>, D::Error> {
        serde_q::mat::deserialize(d).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::rational::{q, qr};

    #[test]
    fn minimal_ball_instance() {
        let inst = Instance::parse(
            r#"{"lattice": {"columns": [["1","0"],["0","1"]]}, "body": {"type": "lp", "n": 2, "p": "2"}}"#,
        )
        .unwrap();
        let c = inst.body().unwrap().centering();
        assert_eq!(c.inner, q(1));
        assert_eq!(c.outer, q(1));
    }

    #[test]
    fn polytope_needs_positive_offsets() {
        let text = r#"{"lattice": {"columns": [[1,0],[0,1]]},
            "body": {"type": "polytope", "a": [[1,0],[-1,0],[0,1],[0,-1]], "b": [1, 1, 0, 1]}}"#;
        match Instance::parse(text) {
            Err(Error::Schema(m)) => assert!(m.contains("body.b[2]"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rationals_round_trip() {
        let text = r#"{"lattice": {"columns": [["355/113","0"],["0","1"]]}, "body": {"type": "lp", "n": 2, "p": "inf", "scale": "355/113"}, "target": ["355/113", "-7/2"]}"#;
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst.target.as_ref().unwrap()[0], qr(355, 113));
        let again = Instance::parse(&inst.to_json()).unwrap();
        assert_eq!(again, inst);
        assert!(inst.to_json().contains("\"355/113\""));
    }

    #[test]
    fn syntax_errors_report_line_and_column() {
        match Instance::parse("{\n  \"lattice\": [\n") {
            Err(Error::Schema(m)) => assert!(m.starts_with("line "), "{m}"),
            other => panic!("{other:?}"),
        }
        match Instance::parse(r#"{"lattice": {"columns": [[1]]}, "body": {"type": "cube"}}"#) {
            Err(Error::Schema(m)) => assert!(m.contains("cube"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_a_schema_error() {
        let text = r#"{"lattice": {"columns": [[1,0],[0,1]]}, "body": {"type": "lp", "n": 3, "p": "1"}}"#;
        assert!(matches!(Instance::parse(text), Err(Error::Schema(_))));
    }
}
