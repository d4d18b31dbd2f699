//! JSON file formats. Every file carries `format_version` (currently 1) and a
//! `kind`. Parsing is strict: unknown fields are rejected, and an object
//! without an identity entry is a parse error, raised before the category
//! laws are checked. Canonical output has sorted keys, objects and morphisms
//! in category order, and composites of non-identity pairs only (composites
//! with an identity are implied).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::category::{CategoryBuilder, FinCategory, Mor, Ob};
use crate::constructions::CommaCategory;
use crate::error::{Error, Result};
use crate::functor::FunctorData;
use crate::instances::{parse_subset, DynSystemData};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismEntry {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceEntry {
    pub a: String,
    pub b: String,
    pub phi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    pub format_version: u32,
    pub kind: String,
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismEntry>,
    pub identities: BTreeMap<String, String>,
    /// Triples (g, f, g∘f).
    pub composition: Vec<[String; 3]>,
    /// Comma objects ↦ their (a, b, φ); informational, ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<BTreeMap<String, ProvenanceEntry>>,
}

/// A category given inline or as a path relative to the referring file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryRef {
    Path(String),
    Inline(Box<CategoryFile>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub format_version: u32,
    pub kind: String,
    pub name: String,
    pub source: CategoryRef,
    /// Omitted in diagram files; the command supplies the target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<CategoryRef>,
    pub object_map: BTreeMap<String, String>,
    pub morphism_map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorRef {
    Path(String),
    Inline(Box<FunctorFile>),
}

/// The cospan α: A → C ← B: β and optionally a chosen comma object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupFile {
    pub format_version: u32,
    pub kind: String,
    pub alpha: FunctorRef,
    pub beta: FunctorRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

/// A competing square (b'', g'': b'' → b, F~: αa' → βb'') over a slice object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateFile {
    pub format_version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    pub slice_object: String,
    pub b: String,
    pub g: String,
    pub ftilde: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub format_version: u32,
    pub kind: String,
    pub omega: Vec<String>,
    /// Each generator maps every state to a state.
    pub generators: Vec<BTreeMap<String, String>>,
    pub truncation: usize,
}

#[derive(Deserialize)]
struct Header {
    format_version: Option<u32>,
    kind: Option<String>,
}

fn line_of(text: &str, needle: &str) -> usize {
    let quoted = format!("\"{needle}\"");
    text.lines().position(|l| l.contains(&quoted)).map_or(0, |i| i + 1)
}

fn parse_error(line: usize, reason: impl Into<String>) -> Error {
    Error::ParseError { line, reason: reason.into() }
}

/// Parses `text` as `kind`, checking the header before the body.
pub fn parse_kind<T: DeserializeOwned>(text: &str, kind: &str) -> Result<T> {
    let header: Header = serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.to_string()))?;
    match header.format_version {
        Some(FORMAT_VERSION) => {}
        Some(found) => return Err(Error::VersionMismatch { expected: FORMAT_VERSION, found }),
        None => return Err(parse_error(1, "missing field `format_version`")),
    }
    match header.kind.as_deref() {
        Some(k) if k == kind => {}
        Some(k) => return Err(parse_error(line_of(text, "kind"), format!("expected kind `{kind}`, found `{k}`"))),
        None => return Err(parse_error(1, "missing field `kind`")),
    }
    serde_json::from_str(text).map_err(|e| parse_error(e.line(), e.to_string()))
}

/// Serializes with sorted keys and two-space indentation, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

impl CategoryFile {
    pub fn parse(text: &str) -> Result<CategoryFile> {
        let file: CategoryFile = parse_kind(text, "category")?;
        file.check_identities(text)?;
        Ok(file)
    }

    fn check_identities(&self, text: &str) -> Result<()> {
        for o in &self.objects {
            if !self.identities.contains_key(o) {
                return Err(parse_error(line_of(text, "identities"), format!("object `{o}` has no identity entry")));
            }
        }
        Ok(())
    }

    /// Validates into a category.
    pub fn build(&self) -> Result<FinCategory> {
        for o in &self.objects {
            if !self.identities.contains_key(o) {
                return Err(parse_error(0, format!("object `{o}` has no identity entry")));
            }
        }
        let mut b = CategoryBuilder::new(self.name.clone());
        for o in &self.objects {
            b.add_object(o.clone());
        }
        for m in &self.morphisms {
            let (d, c) = (b.object_by_id(&m.dom)?, b.object_by_id(&m.cod)?);
            b.add_morphism(m.id.clone(), d, c);
        }
        for (o, m) in &self.identities {
            let (x, f) = (b.object_by_id(o)?, b.morphism_by_id(m)?);
            b.set_identity(x, f);
        }
        for [g, f, h] in &self.composition {
            let (g, f, h) = (b.morphism_by_id(g)?, b.morphism_by_id(f)?, b.morphism_by_id(h)?);
            b.set_composite(g, f, h);
        }
        b.build()
    }

    pub fn from_category(c: &FinCategory) -> CategoryFile {
        let composition = c
            .composable_pairs()
            .filter(|&(g, f)| !c.is_identity(g) && !c.is_identity(f))
            .map(|(g, f)| [c.mor_name(g).to_string(), c.mor_name(f).to_string(), c.mor_name(c.compose(g, f)).to_string()])
            .collect();
        CategoryFile {
            format_version: FORMAT_VERSION,
            kind: "category".into(),
            name: c.name().to_string(),
            objects: c.object_ids().to_vec(),
            morphisms: c
                .morphism_records()
                .iter()
                .map(|m| MorphismEntry { id: m.id.clone(), dom: c.ob_name(m.dom).into(), cod: c.ob_name(m.cod).into() })
                .collect(),
            identities: c.objects().map(|x| (c.ob_name(x).to_string(), c.mor_name(c.id(x)).to_string())).collect(),
            composition,
            provenance: None,
        }
    }

    /// A comma category with its provenance side-table.
    pub fn from_comma(cc: &CommaCategory) -> CategoryFile {
        let mut file = CategoryFile::from_category(&cc.base);
        let (a, b, c) = (cc.a_cat(), cc.b_cat(), cc.c_cat());
        file.provenance = Some(
            cc.base
                .objects()
                .map(|x| {
                    let p = cc.provenance(x);
                    (
                        cc.base.ob_name(x).to_string(),
                        ProvenanceEntry {
                            a: a.ob_name(p.a).into(),
                            b: b.ob_name(p.b).into(),
                            phi: c.mor_name(p.phi).into(),
                        },
                    )
                })
                .collect(),
        );
        file
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

impl FunctorFile {
    pub fn parse(text: &str) -> Result<FunctorFile> {
        parse_kind(text, "functor")
    }

    pub fn from_functor(f: &FunctorData, inline: bool) -> FunctorFile {
        let r = |c: &FinCategory| {
            if inline {
                CategoryRef::Inline(Box::new(CategoryFile::from_category(c)))
            } else {
                CategoryRef::Path(format!("{}.json", c.name()))
            }
        };
        FunctorFile {
            format_version: FORMAT_VERSION,
            kind: "functor".into(),
            name: f.name().to_string(),
            source: r(f.source()),
            target: Some(r(f.target())),
            object_map: f.object_map_names(),
            morphism_map: f.morphism_map_names(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

/// Reads a file, or standard input for `-`.
pub fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Io { path: "-".into(), reason: e.to_string() })?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), reason: e.to_string() })
}

fn base_dir(path: &Path) -> PathBuf {
    if path.as_os_str() == "-" {
        return PathBuf::from(".");
    }
    path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

/// Loads categories and functors, resolving relative references and sharing
/// each referenced file once.
#[derive(Default)]
pub struct Loader {
    categories: BTreeMap<PathBuf, Arc<FinCategory>>,
}

impl Loader {
    pub fn new() -> Loader {
        Loader::default()
    }

    pub fn category(&mut self, path: &Path) -> Result<Arc<FinCategory>> {
        if let Some(c) = self.categories.get(path) {
            return Ok(c.clone());
        }
        let c = Arc::new(CategoryFile::parse(&read_text(path)?)?.build()?);
        if path.as_os_str() != "-" {
            self.categories.insert(path.to_path_buf(), c.clone());
        }
        Ok(c)
    }

    fn category_ref(&mut self, r: &CategoryRef, dir: &Path) -> Result<Arc<FinCategory>> {
        match r {
            CategoryRef::Path(p) => self.category(&dir.join(p)),
            CategoryRef::Inline(file) => {
                file.check_identities("")?;
                Ok(Arc::new(file.build()?))
            }
        }
    }

    /// A functor file; `target` overrides or supplies the target category.
    pub fn functor(&mut self, path: &Path, target: Option<Arc<FinCategory>>) -> Result<FunctorData> {
        let file = FunctorFile::parse(&read_text(path)?)?;
        self.functor_file(&file, &base_dir(path), target)
    }

    pub fn functor_file(&mut self, file: &FunctorFile, dir: &Path, target: Option<Arc<FinCategory>>) -> Result<FunctorData> {
        let source = self.category_ref(&file.source, dir)?;
        let target = match (target, &file.target) {
            (Some(t), _) => t,
            (None, Some(r)) => self.category_ref(r, dir)?,
            (None, None) => return Err(parse_error(0, "functor file has no `target`")),
        };
        FunctorData::from_names(file.name.clone(), source, target, &file.object_map, &file.morphism_map)
    }

    fn functor_ref(&mut self, r: &FunctorRef, dir: &Path) -> Result<FunctorData> {
        match r {
            FunctorRef::Path(p) => self.functor(&dir.join(p), None),
            FunctorRef::Inline(file) => self.functor_file(file, dir, None),
        }
    }

    /// α, β and the optional comma object id of a setup file.
    pub fn setup(&mut self, path: &Path) -> Result<(FunctorData, FunctorData, Option<String>)> {
        let file: SetupFile = parse_kind(&read_text(path)?, "setup")?;
        let dir = base_dir(path);
        let alpha = self.functor_ref(&file.alpha, &dir)?;
        let beta = if file.beta == file.alpha { alpha.clone() } else { self.functor_ref(&file.beta, &dir)? };
        Ok((alpha, beta, file.object))
    }
}

pub fn parse_candidate(text: &str) -> Result<CandidateFile> {
    parse_kind(text, "candidate")
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile> {
        parse_kind(text, "system")
    }

    pub fn to_system(&self) -> Result<DynSystemData> {
        let ix = |s: &str| self.omega.iter().position(|o| o == s);
        let mut gens = Vec::with_capacity(self.generators.len());
        for (gi, g) in self.generators.iter().enumerate() {
            let mut table = Vec::with_capacity(self.omega.len());
            for o in &self.omega {
                let img = g.get(o).ok_or_else(|| Error::NotTotal { generator: format!("g{gi}"), point: o.clone() })?;
                table.push(ix(img).ok_or_else(|| Error::UnknownObject { id: img.clone() })?);
            }
            if let Some(k) = g.keys().find(|k| ix(k).is_none()) {
                return Err(Error::UnknownObject { id: k.clone() });
            }
            gens.push(table);
        }
        DynSystemData::new(self.omega.clone(), gens, self.truncation)
    }

    pub fn from_system(sys: &DynSystemData) -> SystemFile {
        SystemFile {
            format_version: FORMAT_VERSION,
            kind: "system".into(),
            omega: sys.omega.clone(),
            generators: sys
                .generators
                .iter()
                .map(|g| sys.omega.iter().zip(g).map(|(o, &v)| (o.clone(), sys.omega[v].clone())).collect())
                .collect(),
            truncation: sys.truncation,
        }
    }
}

/// Parses a subset of `sys.omega` in "{a,b}" syntax.
pub fn parse_state_subset(sys: &DynSystemData, text: &str) -> Result<u32> {
    parse_subset(&sys.omega, text)
}

/// Resolves a morphism id, reporting which category lacked it.
pub fn morphism_in(c: &FinCategory, id: &str) -> Result<Mor> {
    c.mor(id)
}

pub fn object_in(c: &FinCategory, id: &str) -> Result<Ob> {
    c.ob(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERVAL: &str = r#"{
  "format_version": 1,
  "kind": "category",
  "name": "I",
  "objects": ["a", "b"],
  "morphisms": [
    {"id": "id_a", "dom": "a", "cod": "a"},
    {"id": "id_b", "dom": "b", "cod": "b"},
    {"id": "u", "dom": "a", "cod": "b"}
  ],
  "identities": {"a": "id_a", "b": "id_b"},
  "composition": []
}"#;

    #[test]
    fn interval_round_trip() {
        let file = CategoryFile::parse(INTERVAL).unwrap();
        let c = file.build().unwrap();
        let out = CategoryFile::from_category(&c).to_json();
        assert_eq!(CategoryFile::parse(&out).unwrap().to_json(), out);
        assert_eq!(CategoryFile::parse(&out).unwrap().build().unwrap(), c);
    }

    #[test]
    fn unknown_field_rejected() {
        let text = INTERVAL.replace("\"composition\": []", "\"composition\": [], \"extra\": 1");
        assert!(matches!(CategoryFile::parse(&text), Err(Error::ParseError { .. })));
    }

    #[test]
    fn missing_identity_is_parse_error() {
        let text = INTERVAL.replace("\"identities\": {\"a\": \"id_a\", \"b\": \"id_b\"}", "\"identities\": {\"a\": \"id_a\"}");
        match CategoryFile::parse(&text) {
            Err(Error::ParseError { line, reason }) => {
                assert_eq!(line, 11);
                assert!(reason.contains("`b`"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_checked_first() {
        let text = INTERVAL.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(CategoryFile::parse(&text), Err(Error::VersionMismatch { expected: 1, found: 2 })));
    }

    #[test]
    fn syntax_error_carries_line() {
        let text = INTERVAL.replace("\"b\"],", "\"b\"]");
        assert!(matches!(CategoryFile::parse(&text), Err(Error::ParseError { line: 6, .. })));
    }
}
