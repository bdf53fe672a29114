//! Compilation of analyzed templates into a `CompiledModule`: flattened
//! virtual-node instructions, a hoisted-constant table for maximal static
//! element subtrees, and compile-time shape flags.

use std::collections::HashSet;
use std::sync::Arc;

use indexmap::IndexMap;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{analyze, parse, Analyzed, AnalyzedKind, ParseError, PathExpr, TemplateKey};
use crate::vnode::{self, Flag, PropValue, Props, VNode};

/// Serialized-module format version.
const MODULE_VERSION: u64 = 1;

/// Key source for a compiled element.
#[derive(Clone, Debug, PartialEq)]
pub enum InstrKey {
    Literal(String),
    Path(PathExpr),
}

/// Flattened node-building instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Instr {
    MakeEl {
        tag: String,
        static_props: IndexMap<String, String>,
        dyn_props: Vec<(String, PathExpr)>,
        key: Option<InstrKey>,
        flag: Flag,
        children: Vec<Instr>,
    },
    MakeText(String),
    ReadText(PathExpr),
    UseHoisted(u32),
    ForEach {
        list: PathExpr,
        item: String,
        key: PathExpr,
        body: Box<Instr>,
    },
    Branch {
        cond: PathExpr,
        then_branch: Vec<Instr>,
        else_branch: Vec<Instr>,
    },
}

/// Compiler output: hoisted-constant table plus the instruction tree that
/// builds a virtual tree from a state value.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledModule {
    pub hoisted: Vec<VNode>,
    pub program: Instr,
    pub source_hash: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("duplicate literal key `{0}` among siblings")]
    DuplicateStaticKey(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum ModuleError {
    #[error("unsupported module version {found} (expected {MODULE_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("malformed module: {0}")]
    MalformedModule(String),
}

/// Compile a template source with static hoisting enabled.
pub fn compile(source: &str) -> Result<CompiledModule, CompileError> {
    let ast = parse(source)?;
    compile_analyzed(&analyze(&ast), true, source_hash(source))
}

/// Debug mode that rebuilds everything at instantiation time; serves as the
/// hoisting-soundness oracle.
pub fn compile_without_hoisting(source: &str) -> Result<CompiledModule, CompileError> {
    let ast = parse(source)?;
    compile_analyzed(&analyze(&ast), false, source_hash(source))
}

pub fn compile_analyzed(
    analyzed: &Analyzed,
    hoisting: bool,
    source_hash: String,
) -> Result<CompiledModule, CompileError> {
    let mut hoisted = Vec::new();
    let program = if hoisting && analyzed.is_static {
        // Fully static template: hoist the root itself.
        let node = build_static(analyzed, &mut hoisted)?;
        let id = push_hoisted(&mut hoisted, node);
        Instr::UseHoisted(id)
    } else {
        compile_node(analyzed, hoisting, &mut hoisted, false)?
    };
    Ok(CompiledModule {
        hoisted,
        program,
        source_hash,
    })
}

fn source_hash(source: &str) -> String {
    let digest = Sha256::digest(source.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn push_hoisted(hoisted: &mut Vec<VNode>, node: VNode) -> u32 {
    let id = hoisted.len() as u32;
    let VNode::Element(el) = node else {
        unreachable!("only element subtrees are hoisted")
    };
    let mut el = Arc::try_unwrap(el).expect("freshly built constant");
    el.flag = Flag::Static;
    el.hoist_id = Some(id);
    hoisted.push(VNode::Element(Arc::new(el)));
    id
}

/// Materialize a static subtree as a literal virtual node (shape flags on
/// inner nodes; the caller marks the table root).
fn build_static(node: &Analyzed, _hoisted: &mut Vec<VNode>) -> Result<VNode, CompileError> {
    match &node.kind {
        AnalyzedKind::Text(s) => Ok(vnode::text(s)),
        AnalyzedKind::Element {
            tag,
            static_attrs,
            key,
            children,
            ..
        } => {
            let mut props = Props::new();
            for (name, value) in static_attrs {
                props.insert(name.clone(), PropValue::str(value));
            }
            let built: Vec<VNode> = children
                .iter()
                .map(|c| build_static(c, _hoisted))
                .collect::<Result<_, _>>()?;
            let key = match key {
                Some(TemplateKey::Literal(k)) => Some(Arc::from(k.as_str())),
                Some(TemplateKey::Dynamic(_)) => {
                    unreachable!("dynamic keys are never static")
                }
                None => None,
            };
            vnode::make_element(tag.as_str(), props, built, key, None).map_err(|e| match e {
                vnode::VNodeError::DuplicateKey(k) => CompileError::DuplicateStaticKey(k),
                vnode::VNodeError::InvalidTag(_) => {
                    unreachable!("parser validated the tag")
                }
            })
        }
        _ => unreachable!("dynamic node in a static subtree"),
    }
}

fn compile_node(
    node: &Analyzed,
    hoisting: bool,
    hoisted: &mut Vec<VNode>,
    force_inline_root: bool,
) -> Result<Instr, CompileError> {
    if hoisting && node.is_static && !force_inline_root {
        if let AnalyzedKind::Element { .. } = node.kind {
            // Maximal static element subtree strictly below a dynamic
            // ancestor becomes one shared constant.
            let built = build_static(node, hoisted)?;
            let id = push_hoisted(hoisted, built);
            return Ok(Instr::UseHoisted(id));
        }
    }
    match &node.kind {
        AnalyzedKind::Text(s) => Ok(Instr::MakeText(s.clone())),
        AnalyzedKind::Hole(path) => Ok(Instr::ReadText(path.clone())),
        AnalyzedKind::Each { list, item, key, body } => {
            // The body root is rebuilt per item (each item carries its own
            // key), so it always compiles inline; its children may hoist.
            let body = compile_node(body, hoisting, hoisted, true)?;
            Ok(Instr::ForEach {
                list: list.clone(),
                item: item.clone(),
                key: key.clone(),
                body: Box::new(body),
            })
        }
        AnalyzedKind::If {
            cond,
            then_children,
            else_children,
        } => {
            let then_branch = then_children
                .iter()
                .map(|c| compile_node(c, hoisting, hoisted, false))
                .collect::<Result<_, _>>()?;
            let else_branch = else_children
                .iter()
                .map(|c| compile_node(c, hoisting, hoisted, false))
                .collect::<Result<_, _>>()?;
            Ok(Instr::Branch {
                cond: cond.clone(),
                then_branch,
                else_branch,
            })
        }
        AnalyzedKind::Element {
            tag,
            static_attrs,
            dynamic_attrs,
            key,
            children,
        } => {
            let compiled: Vec<Instr> = children
                .iter()
                .map(|c| compile_node(c, hoisting, hoisted, false))
                .collect::<Result<_, _>>()?;
            let flag = infer_instr_flag(&compiled, hoisted)?;
            let key = match key {
                Some(TemplateKey::Literal(k)) => Some(InstrKey::Literal(k.clone())),
                Some(TemplateKey::Dynamic(p)) => Some(InstrKey::Path(p.clone())),
                None => None,
            };
            Ok(Instr::MakeEl {
                tag: tag.clone(),
                static_props: static_attrs.clone(),
                dyn_props: dynamic_attrs.clone(),
                key,
                flag,
                children: compiled,
            })
        }
    }
}

/// Compile-time shape inference over child instructions, mirroring the
/// runtime rules: a ForEach-only list is keyed, a holes+text-only list is
/// text, statically keyed element lists are keyed.
fn infer_instr_flag(children: &[Instr], hoisted: &[VNode]) -> Result<Flag, CompileError> {
    check_literal_keys(children, hoisted)?;
    if children.is_empty() {
        return Ok(Flag::NoChildren);
    }
    if children
        .iter()
        .all(|c| matches!(c, Instr::MakeText(_) | Instr::ReadText(_)))
    {
        return Ok(Flag::OnlyTextChildren);
    }
    if children.len() == 1 && matches!(children[0], Instr::ForEach { .. }) {
        return Ok(Flag::OnlyKeyedChildren);
    }
    let all_keyed_elements = children.iter().all(|c| match c {
        Instr::MakeEl { key, .. } => key.is_some(),
        Instr::UseHoisted(id) => hoisted
            .get(*id as usize)
            .and_then(|n| n.key())
            .is_some(),
        _ => false,
    });
    if all_keyed_elements {
        return Ok(Flag::OnlyKeyedChildren);
    }
    Ok(Flag::AnyChildren)
}

fn check_literal_keys(children: &[Instr], hoisted: &[VNode]) -> Result<(), CompileError> {
    let mut seen: HashSet<String> = HashSet::new();
    for child in children {
        let literal = match child {
            Instr::MakeEl {
                key: Some(InstrKey::Literal(k)),
                ..
            } => Some(k.clone()),
            Instr::UseHoisted(id) => hoisted
                .get(*id as usize)
                .and_then(|n| n.key())
                .map(|k| k.to_string()),
            _ => None,
        };
        if let Some(k) = literal {
            if !seen.insert(k.clone()) {
                return Err(CompileError::DuplicateStaticKey(k));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Byte form of a module: deterministic compact JSON.
pub fn emit(module: &CompiledModule) -> Vec<u8> {
    let mut map = Map::new();
    map.insert("version".into(), MODULE_VERSION.into());
    map.insert(
        "source_hash".into(),
        Value::String(module.source_hash.clone()),
    );
    map.insert(
        "hoisted".into(),
        Value::Array(module.hoisted.iter().map(vnode::json::to_value).collect()),
    );
    map.insert("program".into(), instr_to_value(&module.program));
    serde_json::to_vec(&Value::Object(map)).expect("module json")
}

pub fn load(bytes: &[u8]) -> Result<CompiledModule, ModuleError> {
    let malformed = |msg: &str| ModuleError::MalformedModule(msg.to_string());
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| ModuleError::MalformedModule(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| malformed("not an object"))?;
    let version = obj
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing version"))?;
    if version != MODULE_VERSION {
        return Err(ModuleError::VersionMismatch { found: version });
    }
    let source_hash = obj
        .get("source_hash")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing source_hash"))?
        .to_string();
    let raw_hoisted = obj
        .get("hoisted")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing hoisted table"))?;
    let mut hoisted = Vec::with_capacity(raw_hoisted.len());
    for (index, raw) in raw_hoisted.iter().enumerate() {
        let node = vnode::json::from_value(raw)
            .map_err(|e| ModuleError::MalformedModule(e.to_string()))?;
        if has_delta(&node) {
            return Err(malformed("hoisted constants must not carry deltas"));
        }
        let VNode::Element(el) = node else {
            return Err(malformed("hoisted constants must be elements"));
        };
        let mut el = Arc::try_unwrap(el).expect("freshly deserialized");
        el.flag = Flag::Static;
        el.hoist_id = Some(index as u32);
        hoisted.push(VNode::Element(Arc::new(el)));
    }
    let program = instr_from_value(
        obj.get("program").ok_or_else(|| malformed("missing program"))?,
    )?;
    validate_instr(&program, hoisted.len())?;
    Ok(CompiledModule {
        hoisted,
        program,
        source_hash,
    })
}

fn has_delta(node: &VNode) -> bool {
    match node {
        VNode::Text(_) => false,
        VNode::Element(el) => el.delta.is_some() || el.children.iter().any(has_delta),
    }
}

fn validate_instr(instr: &Instr, table_len: usize) -> Result<(), ModuleError> {
    match instr {
        Instr::UseHoisted(id) => {
            if (*id as usize) >= table_len {
                return Err(ModuleError::MalformedModule(format!(
                    "hoisted reference {id} out of range ({table_len} constants)"
                )));
            }
            Ok(())
        }
        Instr::MakeEl { children, .. } => {
            for child in children {
                validate_instr(child, table_len)?;
            }
            Ok(())
        }
        Instr::ForEach { body, .. } => {
            if !matches!(**body, Instr::MakeEl { .. }) {
                return Err(ModuleError::MalformedModule(
                    "each body must be an element".into(),
                ));
            }
            validate_instr(body, table_len)
        }
        Instr::Branch {
            then_branch,
            else_branch,
            ..
        } => {
            for child in then_branch.iter().chain(else_branch) {
                validate_instr(child, table_len)?;
            }
            Ok(())
        }
        Instr::MakeText(_) | Instr::ReadText(_) => Ok(()),
    }
}

fn instr_to_value(instr: &Instr) -> Value {
    let mut map = Map::new();
    match instr {
        Instr::MakeEl {
            tag,
            static_props,
            dyn_props,
            key,
            flag,
            children,
        } => {
            map.insert("t".into(), "mkel".into());
            map.insert("tag".into(), Value::String(tag.clone()));
            let mut props = Map::new();
            for (name, value) in static_props {
                props.insert(name.clone(), Value::String(value.clone()));
            }
            map.insert("props".into(), Value::Object(props));
            map.insert(
                "dyn_props".into(),
                Value::Array(
                    dyn_props
                        .iter()
                        .map(|(name, path)| {
                            Value::Array(vec![
                                Value::String(name.clone()),
                                Value::String(path.dotted()),
                            ])
                        })
                        .collect(),
                ),
            );
            match key {
                Some(InstrKey::Literal(k)) => {
                    let mut key_map = Map::new();
                    key_map.insert("lit".into(), Value::String(k.clone()));
                    map.insert("key".into(), Value::Object(key_map));
                }
                Some(InstrKey::Path(p)) => {
                    let mut key_map = Map::new();
                    key_map.insert("path".into(), Value::String(p.dotted()));
                    map.insert("key".into(), Value::Object(key_map));
                }
                None => {}
            }
            map.insert("flag".into(), Value::String(flag.name().into()));
            map.insert(
                "children".into(),
                Value::Array(children.iter().map(instr_to_value).collect()),
            );
        }
        Instr::MakeText(s) => {
            map.insert("t".into(), "mktext".into());
            map.insert("s".into(), Value::String(s.clone()));
        }
        Instr::ReadText(path) => {
            map.insert("t".into(), "readtext".into());
            map.insert("path".into(), Value::String(path.dotted()));
        }
        Instr::UseHoisted(id) => {
            map.insert("t".into(), "hoist".into());
            map.insert("id".into(), (*id).into());
        }
        Instr::ForEach {
            list,
            item,
            key,
            body,
        } => {
            map.insert("t".into(), "each".into());
            map.insert("list".into(), Value::String(list.dotted()));
            map.insert("as".into(), Value::String(item.clone()));
            map.insert("key".into(), Value::String(key.dotted()));
            map.insert("body".into(), instr_to_value(body));
        }
        Instr::Branch {
            cond,
            then_branch,
            else_branch,
        } => {
            map.insert("t".into(), "if".into());
            map.insert("cond".into(), Value::String(cond.dotted()));
            map.insert(
                "then".into(),
                Value::Array(then_branch.iter().map(instr_to_value).collect()),
            );
            map.insert(
                "else".into(),
                Value::Array(else_branch.iter().map(instr_to_value).collect()),
            );
        }
    }
    Value::Object(map)
}

fn instr_from_value(value: &Value) -> Result<Instr, ModuleError> {
    let malformed = |msg: String| ModuleError::MalformedModule(msg);
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("instruction must be an object".into()))?;
    let t = obj
        .get("t")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("instruction missing `t`".into()))?;
    let parse_path = |v: Option<&Value>, what: &str| -> Result<PathExpr, ModuleError> {
        let s = v
            .and_then(Value::as_str)
            .ok_or_else(|| malformed(format!("missing {what}")))?;
        PathExpr::parse(s).ok_or_else(|| malformed(format!("bad path `{s}` in {what}")))
    };
    match t {
        "mkel" => {
            let tag = obj
                .get("tag")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed("mkel missing tag".into()))?
                .to_string();
            let mut static_props = IndexMap::new();
            if let Some(props) = obj.get("props").and_then(Value::as_object) {
                for (name, value) in props {
                    let value = value
                        .as_str()
                        .ok_or_else(|| malformed("static prop must be a string".into()))?;
                    static_props.insert(name.clone(), value.to_string());
                }
            }
            let mut dyn_props = Vec::new();
            if let Some(entries) = obj.get("dyn_props").and_then(Value::as_array) {
                for entry in entries {
                    let pair = entry
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| malformed("dyn prop must be a [name, path] pair".into()))?;
                    let name = pair[0]
                        .as_str()
                        .ok_or_else(|| malformed("dyn prop name must be a string".into()))?;
                    let path = parse_path(Some(&pair[1]), "dyn prop path")?;
                    dyn_props.push((name.to_string(), path));
                }
            }
            let key = match obj.get("key") {
                None => None,
                Some(raw) => {
                    let key_obj = raw
                        .as_object()
                        .ok_or_else(|| malformed("key must be an object".into()))?;
                    if let Some(lit) = key_obj.get("lit") {
                        Some(InstrKey::Literal(
                            lit.as_str()
                                .ok_or_else(|| malformed("literal key must be a string".into()))?
                                .to_string(),
                        ))
                    } else {
                        Some(InstrKey::Path(parse_path(key_obj.get("path"), "key path")?))
                    }
                }
            };
            let flag_name = obj
                .get("flag")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed("mkel missing flag".into()))?;
            let flag = Flag::from_name(flag_name)
                .filter(|f| *f != Flag::Static)
                .ok_or_else(|| malformed(format!("bad mkel flag `{flag_name}`")))?;
            let children = obj
                .get("children")
                .and_then(Value::as_array)
                .map(|arr| arr.iter().map(instr_from_value).collect::<Result<Vec<_>, _>>())
                .transpose()?
                .unwrap_or_default();
            Ok(Instr::MakeEl {
                tag,
                static_props,
                dyn_props,
                key,
                flag,
                children,
            })
        }
        "mktext" => Ok(Instr::MakeText(
            obj.get("s")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed("mktext missing `s`".into()))?
                .to_string(),
        )),
        "readtext" => Ok(Instr::ReadText(parse_path(obj.get("path"), "readtext path")?)),
        "hoist" => {
            let id = obj
                .get("id")
                .and_then(Value::as_u64)
                .ok_or_else(|| malformed("hoist missing id".into()))?;
            Ok(Instr::UseHoisted(id as u32))
        }
        "each" => {
            let item = obj
                .get("as")
                .and_then(Value::as_str)
                .ok_or_else(|| malformed("each missing `as`".into()))?;
            if !super::is_ident(item) {
                return Err(malformed(format!("bad item binding `{item}`")));
            }
            Ok(Instr::ForEach {
                list: parse_path(obj.get("list"), "each list path")?,
                item: item.to_string(),
                key: parse_path(obj.get("key"), "each key path")?,
                body: Box::new(instr_from_value(
                    obj.get("body")
                        .ok_or_else(|| malformed("each missing body".into()))?,
                )?),
            })
        }
        "if" => {
            let branch = |name: &str| -> Result<Vec<Instr>, ModuleError> {
                obj.get(name)
                    .and_then(Value::as_array)
                    .map(|arr| arr.iter().map(instr_from_value).collect())
                    .transpose()
                    .map(Option::unwrap_or_default)
            };
            Ok(Instr::Branch {
                cond: parse_path(obj.get("cond"), "if cond path")?,
                then_branch: branch("then")?,
                else_branch: branch("else")?,
            })
        }
        other => Err(malformed(format!("unknown instruction `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_static_template_hoists_the_root() {
        let module = compile("<div>Hello World</div>").unwrap();
        assert_eq!(module.program, Instr::UseHoisted(0));
        assert_eq!(module.hoisted.len(), 1);
        let root = module.hoisted[0].as_element().unwrap();
        assert_eq!(root.flag, Flag::Static);
        assert_eq!(root.hoist_id, Some(0));
        assert_eq!(root.effective_flag(), Flag::OnlyTextChildren);
    }

    #[test]
    fn maximal_static_subtree_is_hoisted() {
        let module = compile("<div><span>static</span>{x}</div>").unwrap();
        assert_eq!(module.hoisted.len(), 1);
        let Instr::MakeEl { children, flag, .. } = &module.program else {
            panic!("root should stay dynamic");
        };
        assert_eq!(*flag, Flag::AnyChildren);
        assert_eq!(children.len(), 2);
        assert_eq!(children[0], Instr::UseHoisted(0));
        assert!(matches!(&children[1], Instr::ReadText(p) if p.dotted() == "x"));
        let span = module.hoisted[0].as_element().unwrap();
        assert_eq!(&*span.tag, "span");
    }

    #[test]
    fn static_text_next_to_holes_stays_inline() {
        let module = compile("<p>Hello {user.name}!</p>").unwrap();
        assert!(module.hoisted.is_empty());
        let Instr::MakeEl { children, flag, .. } = &module.program else {
            panic!()
        };
        assert_eq!(*flag, Flag::OnlyTextChildren);
        assert_eq!(children.len(), 3);
        assert!(matches!(&children[0], Instr::MakeText(s) if s == "Hello "));
        assert!(matches!(&children[1], Instr::ReadText(_)));
        assert!(matches!(&children[2], Instr::MakeText(s) if s == "!"));
    }

    #[test]
    fn each_only_child_list_is_keyed() {
        let module = compile("<ul>{#each xs as x key=x.id}<li>{x.t}</li>{/each}</ul>").unwrap();
        let Instr::MakeEl { flag, children, .. } = &module.program else {
            panic!()
        };
        assert_eq!(*flag, Flag::OnlyKeyedChildren);
        assert!(matches!(&children[0], Instr::ForEach { .. }));
    }

    #[test]
    fn literal_keyed_siblings_are_keyed_and_checked() {
        // Fully static keyed list: the root itself hoists.
        let module = compile(r#"<ul><li key="a">x</li><li key="b">y</li></ul>"#).unwrap();
        assert_eq!(module.program, Instr::UseHoisted(0));
        let root = module.hoisted[0].as_element().unwrap();
        assert_eq!(root.effective_flag(), Flag::OnlyKeyedChildren);

        // Mixed dynamic + hoisted keyed siblings still infer keyed.
        let module = compile(r#"<ul><li key="a">{x}</li><li key="b">y</li></ul>"#).unwrap();
        let Instr::MakeEl { flag, children, .. } = &module.program else {
            panic!()
        };
        assert_eq!(*flag, Flag::OnlyKeyedChildren);
        assert!(matches!(&children[0], Instr::MakeEl { .. }));
        assert!(matches!(&children[1], Instr::UseHoisted(_)));

        for src in [
            r#"<ul><li key="a">x</li><li key="a">y</li></ul>"#,
            r#"<ul><li key="a">{x}</li><li key="a">y</li></ul>"#,
        ] {
            let err = compile(src).unwrap_err();
            assert_eq!(err, CompileError::DuplicateStaticKey("a".into()));
        }
    }

    #[test]
    fn no_hoisting_mode_builds_everything_inline() {
        let module = compile_without_hoisting("<div><span>static</span>{x}</div>").unwrap();
        assert!(module.hoisted.is_empty());
        let Instr::MakeEl { children, .. } = &module.program else {
            panic!()
        };
        assert!(matches!(&children[0], Instr::MakeEl { .. }));
    }

    #[test]
    fn compile_is_deterministic() {
        let src = r#"<div id="app"><b>hi</b>{#each xs as x key=x.id}<li>{x.t}</li>{/each}</div>"#;
        let a = emit(&compile(src).unwrap());
        let b = emit(&compile(src).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn emit_load_round_trips() {
        let src = r#"<div class="page"><h1>Title</h1><p>Hi {user.name}</p><ul>{#each items as it key=it.id}<li class={it.cls}>{it.label}</li>{/each}</ul>{#if flags.on}<b>on</b>{:else}<i>off</i>{/if}</div>"#;
        let module = compile(src).unwrap();
        let bytes = emit(&module);
        let back = load(&bytes).unwrap();
        assert_eq!(module, back);
        assert_eq!(emit(&back), bytes);
    }

    #[test]
    fn load_rejects_truncated_and_versioned_input() {
        let module = compile("<div>Hello World</div>").unwrap();
        let bytes = emit(&module);
        let truncated = &bytes[..bytes.len() - 5];
        assert!(matches!(
            load(truncated),
            Err(ModuleError::MalformedModule(_))
        ));

        let mut value: Value = serde_json::from_slice(&bytes).unwrap();
        value["version"] = 2.into();
        let bumped = serde_json::to_vec(&value).unwrap();
        assert_eq!(
            load(&bumped),
            Err(ModuleError::VersionMismatch { found: 2 })
        );
    }

    #[test]
    fn load_rejects_out_of_range_hoist_refs() {
        let bad = br#"{"version":1,"source_hash":"x","hoisted":[],"program":{"t":"hoist","id":3}}"#;
        assert!(matches!(load(bad), Err(ModuleError::MalformedModule(_))));
    }
}
