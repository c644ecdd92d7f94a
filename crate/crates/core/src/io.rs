//! JSON documents for rings, modules and complexes, and JSON renderings of
//! results.
//!
//! A ring document is `{"field":{"p":101},"ring":{...}}`. Module and
//! complex documents carry the ring alongside, under `"module"` or
//! `"complex"`. Relation matrices of a module have one row per generator
//! and one column per relation.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complex::{FreeComplex, PolyMatrix, PresentedComplex};
use crate::error::{QpdError, Result};
use crate::gmod::{IsoVerdict, Presentation};
use crate::linalg::PrimeField;
use crate::poly::{MonomialOrder, PolyRing};
use crate::qpd::{QpdCertificate, QpdVerdict};
use crate::resolution::Resolution;
use crate::ring::QuotientRing;

/// Degree bound used when a ring document omits `truncation`.
pub const DEFAULT_TRUNCATION: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub p: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_degrees: Option<Vec<u32>>,
    #[serde(default)]
    pub ideal: Vec<String>,
    #[serde(default)]
    pub order: MonomialOrder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TermDoc {
    /// `(shift, rank)` runs, in generator order.
    Free { free: Vec<(i64, usize)> },
    Module { module: ModuleSpec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSpec {
    #[serde(default)]
    pub min_index: i64,
    pub terms: Vec<TermDoc>,
    #[serde(default)]
    pub diffs: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub field: FieldDoc,
    pub ring: RingSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexSpec>,
}

/// Overrides applied while building a document.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub p: Option<u32>,
    pub truncation: Option<u32>,
}

/// A parsed document: the ring and, if present, the module or complex.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub ring: Arc<QuotientRing>,
    pub object: Option<PresentedComplex>,
}

impl Loaded {
    pub fn object(&self) -> Result<&PresentedComplex> {
        self.object
            .as_ref()
            .ok_or_else(|| QpdError::arg("document has neither a \"module\" nor a \"complex\" entry"))
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| {
        QpdError::arg(format!("line {}, column {}: {e}", e.line(), e.column()))
    })
}

fn at(path: &str, e: QpdError) -> QpdError {
    QpdError::arg(format!("{path}: {e}"))
}

pub fn build_ring(field: &FieldDoc, spec: &RingSpec, ov: Overrides) -> Result<Arc<QuotientRing>> {
    let f = PrimeField::new(ov.p.unwrap_or(field.p)).map_err(|e| at("field.p", e))?;
    let degrees = spec.var_degrees.clone().unwrap_or_else(|| vec![1; spec.vars.len()]);
    let q = PolyRing::new(f, spec.vars.clone(), degrees, spec.order).map_err(|e| at("ring", e))?;
    let gens = spec
        .ideal
        .iter()
        .enumerate()
        .map(|(i, s)| q.parse(s).map_err(|e| at(&format!("ring.ideal[{i}]"), e)))
        .collect::<Result<Vec<_>>>()?;
    let t = ov.truncation.or(spec.truncation).unwrap_or(DEFAULT_TRUNCATION);
    Ok(Arc::new(QuotientRing::new(q, gens, t).map_err(|e| at("ring.ideal", e))?))
}

fn build_presentation(ring: &QuotientRing, m: &ModuleSpec, path: &str) -> Result<Presentation> {
    let n = m.generators.len();
    let shifts: Vec<i64> = m.generators.iter().map(|g| g.shift).collect();
    let cols = m.relations.first().map(|r| r.len()).unwrap_or(0);
    if !m.relations.is_empty() && m.relations.len() != n {
        return Err(QpdError::arg(format!(
            "{path}.relations: {} rows for {n} generators",
            m.relations.len()
        )));
    }
    let mut relations = vec![Vec::with_capacity(n); cols];
    for (i, row) in m.relations.iter().enumerate() {
        if row.len() != cols {
            return Err(QpdError::arg(format!("{path}.relations[{i}]: ragged row")));
        }
        for (j, s) in row.iter().enumerate() {
            let f = ring
                .parse(s)
                .map_err(|e| at(&format!("{path}.relations[{i}][{j}]"), e))?;
            relations[j].push(ring.normal_form(&f));
        }
    }
    Ok(Presentation { shifts, relations })
}

fn build_complex(ring: &Arc<QuotientRing>, c: &ComplexSpec) -> Result<PresentedComplex> {
    let mut terms = Vec::with_capacity(c.terms.len());
    for (k, t) in c.terms.iter().enumerate() {
        terms.push(match t {
            TermDoc::Free { free } => Presentation {
                shifts: free.iter().flat_map(|&(s, r)| std::iter::repeat_n(s, r)).collect(),
                relations: Vec::new(),
            },
            TermDoc::Module { module } => build_presentation(ring, module, &format!("complex.terms[{k}].module"))?,
        });
    }
    let mut diffs = Vec::with_capacity(c.diffs.len());
    for (k, d) in c.diffs.iter().enumerate() {
        let cols = terms.get(k + 1).map(|t| t.shifts.len()).unwrap_or(0);
        let rows: Vec<Vec<&str>> = d.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        diffs.push(PolyMatrix::parse(ring, &rows, cols).map_err(|e| at(&format!("complex.diffs[{k}]"), e))?);
    }
    PresentedComplex::new(ring.clone(), c.min_index, terms, diffs).map_err(|e| at("complex", e))
}

pub fn build(doc: &Document, ov: Overrides) -> Result<Loaded> {
    let ring = build_ring(&doc.field, &doc.ring, ov)?;
    let object = match (&doc.module, &doc.complex) {
        (Some(_), Some(_)) => return Err(QpdError::arg("a document holds a module or a complex, not both")),
        (Some(m), None) => {
            let pres = build_presentation(&ring, m, "module")?;
            Some(PresentedComplex::module(ring.clone(), pres, 0).map_err(|e| at("module", e))?)
        }
        (None, Some(c)) => Some(build_complex(&ring, c)?),
        (None, None) => None,
    };
    Ok(Loaded { ring, object })
}

pub fn load(text: &str, ov: Overrides) -> Result<Loaded> {
    build(&parse_document(text)?, ov)
}

pub fn field_doc(ring: &QuotientRing) -> FieldDoc {
    FieldDoc { p: ring.field().p() }
}

pub fn ring_spec(ring: &QuotientRing) -> RingSpec {
    let q = ring.poly_ring();
    RingSpec {
        vars: q.names().to_vec(),
        var_degrees: Some(q.degrees().to_vec()),
        ideal: ring.generators().iter().map(|g| q.format(g)).collect(),
        order: q.order(),
        truncation: Some(ring.truncation()),
    }
}

pub fn ring_document(ring: &QuotientRing) -> Document {
    Document {
        field: field_doc(ring),
        ring: ring_spec(ring),
        module: None,
        complex: None,
    }
}

fn runs(shifts: &[i64]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &s in shifts {
        match out.last_mut() {
            Some((t, n)) if *t == s => *n += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

fn module_spec(ring: &QuotientRing, p: &Presentation) -> ModuleSpec {
    let relations = if p.relations.is_empty() {
        Vec::new()
    } else {
        (0..p.shifts.len())
            .map(|i| p.relations.iter().map(|col| ring.format(&col[i])).collect())
            .collect()
    };
    ModuleSpec {
        generators: p.shifts.iter().map(|&shift| GeneratorDoc { shift }).collect(),
        relations,
    }
}

pub fn complex_spec(c: &PresentedComplex) -> ComplexSpec {
    let ring = c.ring();
    ComplexSpec {
        min_index: c.min_index(),
        terms: c
            .terms()
            .iter()
            .map(|t| {
                if t.relations.is_empty() {
                    TermDoc::Free { free: runs(&t.shifts) }
                } else {
                    TermDoc::Module {
                        module: module_spec(ring, t),
                    }
                }
            })
            .collect(),
        diffs: c.diffs().iter().map(|d| d.to_strings(ring)).collect(),
    }
}

pub fn complex_document(c: &PresentedComplex) -> Document {
    Document {
        complex: Some(complex_spec(c)),
        ..ring_document(c.ring())
    }
}

pub fn free_complex_spec(c: &FreeComplex) -> ComplexSpec {
    complex_spec(&PresentedComplex::from_free(c))
}

/// `{"pd": ..., "betti": [[i, [counts from the lowest shift]], ...]}` plus
/// the graded Betti triples and the resolution itself.
pub fn resolution_json(r: &Resolution) -> Value {
    json!({
        "pd": r.pd,
        "betti": r.betti(),
        "graded_betti": r.graded_betti(),
        "top_index": r.top_index,
        "window": r.window,
        "minimal": r.minimal,
        "resolution": free_complex_spec(&r.complex),
    })
}

fn iso_json(v: &IsoVerdict) -> Value {
    match v {
        IsoVerdict::ProvenIsomorphic(_) => json!({"verdict": "proven_isomorphic"}),
        IsoVerdict::ProvenNot(r) => json!({"verdict": "proven_not", "reason": r}),
        IsoVerdict::NotFoundWithinTrials { trials, seed } => {
            json!({"verdict": "not_found_within_trials", "trials": trials, "seed": seed})
        }
    }
}

pub fn certificate_json(c: &QpdCertificate) -> Value {
    let mult: BTreeMap<String, usize> = c.multiplicities.iter().map(|(i, a)| (i.to_string(), *a)).collect();
    json!({
        "value": c.value,
        "sup": c.sup,
        "hsup": c.hsup,
        "hinf": c.hinf,
        "base_index": c.base_index,
        "multiplicities": mult,
        "copies": c.copies,
        "window": c.window,
        "witnesses": c.witnesses.iter().map(|(j, v)| json!([j, iso_json(v)])).collect::<Vec<_>>(),
        "resolution": free_complex_spec(&c.resolution),
    })
}

/// `{"verdict": ..., "value": ..., ...}`; the report wraps it under `"qpd"`.
pub fn verdict_json(v: &QpdVerdict) -> Value {
    match v {
        QpdVerdict::Certified {
            cert,
            exact,
            ab_check,
            strategy,
        } => json!({
            "verdict": "certified",
            "value": cert.value,
            "exact": exact,
            "ab_check": ab_check,
            "strategy": strategy,
            "certificate": certificate_json(cert),
        }),
        QpdVerdict::UpperBound {
            value,
            cert,
            reason,
            strategy,
        } => json!({
            "verdict": "upper_bound",
            "value": value,
            "exact": false,
            "reason": reason,
            "strategy": strategy,
            "certificate": certificate_json(cert),
        }),
        QpdVerdict::NotFoundWithinBounds { budgets } => json!({
            "verdict": "not_found_within_bounds",
            "budgets": budgets,
        }),
        QpdVerdict::InfiniteNotCertifiable { note } => json!({
            "verdict": "infinite_not_certifiable",
            "note": note,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RING: &str =
        r#"{"field":{"p":101},"ring":{"vars":["x","y"],"var_degrees":[1,1],"ideal":["x^2","y^2"],"order":"degrevlex","truncation":6}}"#;

    #[test]
    fn ring_round_trip() {
        let doc = parse_document(RING).unwrap();
        let l = build(&doc, Overrides::default()).unwrap();
        let back = ring_document(&l.ring);
        assert_eq!(back, doc);
        assert_eq!(serde_json::to_string(&back).unwrap(), RING);
    }

    #[test]
    fn module_and_complex_documents() {
        let m = r#"{"field":{"p":101},"ring":{"vars":["x","y"],"ideal":[]},
            "module":{"generators":[{"shift":0}],"relations":[["x","y"]]}}"#;
        let l = load(m, Overrides::default()).unwrap();
        let c = l.object().unwrap();
        assert_eq!(c.terms()[0].relations.len(), 2);

        let c = r#"{"field":{"p":101},"ring":{"vars":["x","y"],"ideal":[]},
            "complex":{"min_index":0,"terms":[{"free":[[0,1]]},{"free":[[1,2]]}],"diffs":[[["x","y"]]]}}"#;
        let l = load(c, Overrides::default()).unwrap();
        let pc = l.object().unwrap();
        assert!(pc.is_free());
        let doc = complex_document(pc);
        let again = build(&doc, Overrides::default()).unwrap();
        assert_eq!(complex_spec(again.object().unwrap()), complex_spec(pc));
    }

    #[test]
    fn errors_carry_positions() {
        let e = load("{\"field\":{\"p\":101},\n\"ring\":{\"vars\":[\"x\"],\"ideal\":[\"x^^2\"]}}", Overrides::default())
            .unwrap_err()
            .to_string();
        assert!(e.contains("ring.ideal[0]") && e.contains("position"), "{e}");
        let e = load("{\"field\":", Overrides::default()).unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let e = load(
            r#"{"field":{"p":101},"ring":{"vars":["x"],"ideal":[]},"complex":{"terms":[{"free":[[0,1]]},{"free":[[1,1]]}],"diffs":[[["x","x"]]]}}"#,
            Overrides::default(),
        )
        .unwrap_err()
        .to_string();
        assert!(e.contains("complex.diffs[0]"), "{e}");
    }

    #[test]
    fn bound_json_shape() {
        let r = QuotientRing::standard(101, &["x", "y"], &[], 6).unwrap();
        let k = PresentedComplex::module(r.clone(), crate::resolution::residue_field(&r), 0).unwrap();
        let res = crate::resolution::pd(&k, None).unwrap();
        let v = resolution_json(&res);
        assert_eq!(v["pd"], json!({"verdict": "finite", "value": 2}));
        assert_eq!(v["betti"], json!([[0, [1]], [1, [2]], [2, [1]]]));
    }
}
