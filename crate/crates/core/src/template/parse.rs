//! Recursive-descent parser for the template DSL.
//!
//! Grammar sketch:
//!   element    = `<` name attrs (`/>` | `>` content `</` name `>`)
//!   attr       = name `=` (`"` chars `"` | `{` path `}`)
//!   content    = (element | text | `{` path `}` | each-block | if-block)*
//!   each-block = `{#each` path `as` ident `key=` path `}` content `{/each}`
//!   if-block   = `{#if` path `}` content [`{:else}` content] `{/if}`
//!
//! Whitespace-only text between nodes is dropped; other text is preserved
//! verbatim. A template is a single root element.

use indexmap::IndexMap;
use thiserror::Error;

use super::{is_ident, EachT, ElementT, IfT, PathExpr, TemplateAst, TemplateKey};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn parse(source: &str) -> Result<TemplateAst, ParseError> {
    let mut parser = Parser::new(source);
    parser.skip_whitespace();
    if !parser.looking_at("<") {
        return Err(parser.error("template must start with a root element"));
    }
    let root = parser.element()?;
    parser.skip_whitespace();
    if !parser.at_end() {
        return Err(parser.error("unexpected content after the root element"));
    }
    Ok(TemplateAst::Element(root))
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let ch = self.peek()?;
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(ch)
    }

    fn looking_at(&self, token: &str) -> bool {
        self.rest().starts_with(token)
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.looking_at(token) {
            for _ in token.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect_whitespace(&mut self) -> Result<(), ParseError> {
        if !matches!(self.peek(), Some(c) if c.is_whitespace()) {
            return Err(self.error("expected whitespace"));
        }
        self.skip_whitespace();
        Ok(())
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return Err(self.error("expected an identifier")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn path(&mut self) -> Result<PathExpr, ParseError> {
        let mut segments = vec![self.ident().map_err(|_| self.error("expected a state path"))?];
        while self.looking_at(".") {
            self.bump();
            segments.push(self.ident()?);
        }
        Ok(PathExpr::new(segments))
    }

    fn element(&mut self) -> Result<ElementT, ParseError> {
        self.expect("<")?;
        let tag = self.ident()?;
        if !tag.bytes().next().map(|b| b.is_ascii_lowercase()).unwrap_or(false)
            || !tag.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        {
            return Err(self.error(format!("tag `{tag}` must be lowercase ascii")));
        }
        let mut static_attrs = IndexMap::new();
        let mut dynamic_attrs: Vec<(String, PathExpr)> = Vec::new();
        let mut key = None;
        loop {
            let had_space = matches!(self.peek(), Some(c) if c.is_whitespace());
            self.skip_whitespace();
            if self.looking_at("/>") || self.looking_at(">") {
                break;
            }
            if !had_space {
                return Err(self.error("expected whitespace before attribute"));
            }
            let name = self.ident()?;
            self.expect("=")?;
            let duplicate = static_attrs.contains_key(&name)
                || dynamic_attrs.iter().any(|(n, _)| n == &name)
                || (name == "key" && key.is_some());
            if duplicate {
                return Err(self.error(format!("duplicate attribute `{name}`")));
            }
            if self.eat("\"") {
                let value = self.quoted_rest()?;
                if name == "key" {
                    key = Some(TemplateKey::Literal(value));
                } else {
                    static_attrs.insert(name, value);
                }
            } else if self.eat("{") {
                let path = self.path()?;
                self.expect("}")?;
                if name == "key" {
                    key = Some(TemplateKey::Dynamic(path));
                } else {
                    dynamic_attrs.push((name, path));
                }
            } else {
                return Err(self.error("attribute value must be a quoted literal or `{path}`"));
            }
        }
        if self.eat("/>") {
            return Ok(ElementT {
                tag,
                static_attrs,
                dynamic_attrs,
                key,
                children: Vec::new(),
            });
        }
        self.expect(">")?;
        let children = self.content()?;
        self.expect("</")?;
        let close = self.ident()?;
        if close != tag {
            return Err(self.error(format!("unbalanced tags: expected `</{tag}>`, found `</{close}>`")));
        }
        self.expect(">")?;
        Ok(ElementT {
            tag,
            static_attrs,
            dynamic_attrs,
            key,
            children,
        })
    }

    /// Body of the current quoted literal; the opening quote is consumed.
    fn quoted_rest(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        loop {
            match self.peek() {
                Some('"') => {
                    let value = self.src[start..self.pos].to_string();
                    self.bump();
                    return Ok(value);
                }
                Some(_) => {
                    self.bump();
                }
                None => return Err(self.error("unterminated attribute literal")),
            }
        }
    }

    /// Child sequence, stopping before `</`, `{/...}`, or `{:else}`.
    fn content(&mut self) -> Result<Vec<TemplateAst>, ParseError> {
        let mut children = Vec::new();
        loop {
            if self.at_end()
                || self.looking_at("</")
                || self.looking_at("{/each}")
                || self.looking_at("{/if}")
                || self.looking_at("{:else}")
            {
                return Ok(children);
            }
            if self.looking_at("{#each") {
                children.push(TemplateAst::Each(self.each_block()?));
            } else if self.looking_at("{#if") {
                children.push(TemplateAst::If(self.if_block()?));
            } else if self.looking_at("{#") {
                return Err(self.error("unknown block; expected `{#each` or `{#if`"));
            } else if self.looking_at("{:") || self.looking_at("{/") {
                return Err(self.error("block close without a matching open"));
            } else if self.looking_at("{") {
                self.bump();
                let path = self.path().map_err(|e| ParseError {
                    message: format!("bad hole syntax: {}", e.message),
                    ..e
                })?;
                self.expect("}")
                    .map_err(|e| ParseError {
                        message: format!("bad hole syntax: {}", e.message),
                        ..e
                    })?;
                children.push(TemplateAst::Hole(path));
            } else if self.looking_at("<") {
                children.push(TemplateAst::Element(self.element()?));
            } else {
                let text = self.text_run();
                if !text.chars().all(char::is_whitespace) {
                    children.push(TemplateAst::Text(text));
                }
            }
        }
    }

    fn text_run(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '<' || c == '{' {
                break;
            }
            if c == '}' {
                break;
            }
            self.bump();
        }
        // A stray `}` is consumed as text so it produces a clear error at the
        // next structural token rather than an infinite loop.
        if self.peek() == Some('}') && self.pos == start {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    fn each_block(&mut self) -> Result<EachT, ParseError> {
        self.expect("{#each")?;
        self.expect_whitespace()?;
        let list = self.path()?;
        self.expect_whitespace()?;
        self.expect("as")?;
        self.expect_whitespace()?;
        let item = self.ident()?;
        self.expect_whitespace()?;
        self.expect("key=")?;
        let raw_key = self.path()?;
        self.skip_whitespace();
        self.expect("}")?;
        if raw_key.segments.len() < 2 || raw_key.segments[0] != item {
            return Err(self.error(format!(
                "each key must be a path under the item binding, like `{item}.id`"
            )));
        }
        let key = PathExpr::new(raw_key.segments[1..].to_vec());
        let children = self.content()?;
        self.expect("{/each}")?;
        let mut elements: Vec<ElementT> = Vec::new();
        for child in children {
            match child {
                TemplateAst::Element(el) => elements.push(el),
                TemplateAst::Text(_) => {
                    return Err(self.error("each body must be a single element"))
                }
                _ => return Err(self.error("each body must be a single element")),
            }
        }
        if elements.len() != 1 {
            return Err(self.error("each body must be a single element"));
        }
        let body = elements.remove(0);
        if body.key.is_some() {
            return Err(self.error("each body takes its key from the block header"));
        }
        if !is_ident(&item) {
            return Err(self.error("bad item binding"));
        }
        Ok(EachT {
            list,
            item,
            key,
            body: Box::new(TemplateAst::Element(body)),
        })
    }

    fn if_block(&mut self) -> Result<IfT, ParseError> {
        self.expect("{#if")?;
        self.expect_whitespace()?;
        let cond = self.path()?;
        self.skip_whitespace();
        self.expect("}")?;
        let then_children = self.content()?;
        let else_children = if self.eat("{:else}") {
            self.content()?
        } else {
            Vec::new()
        };
        self.expect("{/if}")?;
        Ok(IfT {
            cond,
            then_children,
            else_children,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root_children(src: &str) -> Vec<TemplateAst> {
        match parse(src).unwrap() {
            TemplateAst::Element(el) => el.children,
            _ => unreachable!(),
        }
    }

    #[test]
    fn plain_text_child() {
        let kids = root_children("<div>Hello World</div>");
        assert_eq!(kids, vec![TemplateAst::Text("Hello World".into())]);
    }

    #[test]
    fn single_hole() {
        let kids = root_children("<p>{user.name}</p>");
        assert_eq!(
            kids,
            vec![TemplateAst::Hole(PathExpr::parse("user.name").unwrap())]
        );
    }

    #[test]
    fn each_block_shape() {
        let kids = root_children("<ul>{#each todos as t key=t.id}<li>{t.text}</li>{/each}</ul>");
        assert_eq!(kids.len(), 1);
        match &kids[0] {
            TemplateAst::Each(each) => {
                assert_eq!(each.list, PathExpr::parse("todos").unwrap());
                assert_eq!(each.item, "t");
                assert_eq!(each.key, PathExpr::parse("id").unwrap());
                assert!(matches!(&*each.body, TemplateAst::Element(el) if el.tag == "li"));
            }
            other => panic!("expected each block, got {other:?}"),
        }
    }

    #[test]
    fn if_else_block() {
        let kids =
            root_children("<div>{#if flags.on}<b>yes</b>{:else}<i>no</i>{/if}</div>");
        match &kids[0] {
            TemplateAst::If(node) => {
                assert_eq!(node.cond, PathExpr::parse("flags.on").unwrap());
                assert_eq!(node.then_children.len(), 1);
                assert_eq!(node.else_children.len(), 1);
            }
            other => panic!("expected if block, got {other:?}"),
        }
    }

    #[test]
    fn whitespace_between_elements_is_dropped() {
        let kids = root_children("<div>\n  <b>x</b>\n  <i>y</i>\n</div>");
        assert_eq!(kids.len(), 2);
        let kids = root_children("<div>  left <b>x</b></div>");
        assert_eq!(kids[0], TemplateAst::Text("  left ".into()));
    }

    #[test]
    fn attributes_literal_dynamic_and_key() {
        let ast = parse(r#"<div id="app" class={user.cls} key="root"><br/></div>"#).unwrap();
        let TemplateAst::Element(el) = ast else { unreachable!() };
        assert_eq!(el.static_attrs.get("id"), Some(&"app".to_string()));
        assert_eq!(el.dynamic_attrs, vec![("class".into(), PathExpr::parse("user.cls").unwrap())]);
        assert_eq!(el.key, Some(TemplateKey::Literal("root".into())));
        assert!(matches!(&el.children[0], TemplateAst::Element(b) if b.tag == "br"));
    }

    #[test]
    fn errors_carry_position() {
        let err = parse("<div>\n<b>x</i>\n</div>").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unbalanced"), "{}", err.message);

        let err = parse("<div>{user..name}</div>").unwrap_err();
        assert!(err.message.contains("bad hole syntax"), "{}", err.message);

        let err = parse("<div>{#for x}</div>").unwrap_err();
        assert!(err.message.contains("unknown block"), "{}", err.message);
    }

    #[test]
    fn each_requires_item_relative_key() {
        let err = parse("<ul>{#each xs as x key=id}<li>a</li>{/each}</ul>").unwrap_err();
        assert!(err.message.contains("item binding"), "{}", err.message);
    }

    #[test]
    fn each_body_must_be_single_element() {
        assert!(parse("<ul>{#each xs as x key=x.id}{x.t}{/each}</ul>").is_err());
        assert!(parse("<ul>{#each xs as x key=x.id}<li>a</li><li>b</li>{/each}</ul>").is_err());
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(parse("<div></div><div></div>").is_err());
        assert!(parse("").is_err());
    }
}
