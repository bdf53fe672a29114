//! Staticness analysis: a node is static iff its subtree contains no holes,
//! dynamic attributes, dynamic keys, each-blocks, or if-blocks — nothing
//! that depends on the state.

use indexmap::IndexMap;

use super::{PathExpr, TemplateAst, TemplateKey};

#[derive(Clone, Debug, PartialEq)]
pub struct Analyzed {
    pub is_static: bool,
    pub kind: AnalyzedKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyzedKind {
    Element {
        tag: String,
        static_attrs: IndexMap<String, String>,
        dynamic_attrs: Vec<(String, PathExpr)>,
        key: Option<TemplateKey>,
        children: Vec<Analyzed>,
    },
    Text(String),
    Hole(PathExpr),
    Each {
        list: PathExpr,
        item: String,
        key: PathExpr,
        body: Box<Analyzed>,
    },
    If {
        cond: PathExpr,
        then_children: Vec<Analyzed>,
        else_children: Vec<Analyzed>,
    },
}

pub fn analyze(ast: &TemplateAst) -> Analyzed {
    match ast {
        TemplateAst::Text(s) => Analyzed {
            is_static: true,
            kind: AnalyzedKind::Text(s.clone()),
        },
        TemplateAst::Hole(path) => Analyzed {
            is_static: false,
            kind: AnalyzedKind::Hole(path.clone()),
        },
        TemplateAst::Each(each) => Analyzed {
            is_static: false,
            kind: AnalyzedKind::Each {
                list: each.list.clone(),
                item: each.item.clone(),
                key: each.key.clone(),
                body: Box::new(analyze(&each.body)),
            },
        },
        TemplateAst::If(node) => Analyzed {
            is_static: false,
            kind: AnalyzedKind::If {
                cond: node.cond.clone(),
                then_children: node.then_children.iter().map(analyze).collect(),
                else_children: node.else_children.iter().map(analyze).collect(),
            },
        },
        TemplateAst::Element(el) => {
            let children: Vec<Analyzed> = el.children.iter().map(analyze).collect();
            let is_static = el.dynamic_attrs.is_empty()
                && !matches!(el.key, Some(TemplateKey::Dynamic(_)))
                && children.iter().all(|c| c.is_static);
            Analyzed {
                is_static,
                kind: AnalyzedKind::Element {
                    tag: el.tag.clone(),
                    static_attrs: el.static_attrs.clone(),
                    dynamic_attrs: el.dynamic_attrs.clone(),
                    key: el.key.clone(),
                    children,
                },
            }
        }
    }
}
