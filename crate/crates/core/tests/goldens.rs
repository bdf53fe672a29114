//! Golden-file checks: compiled modules, rendered DOM, and patch streams are
//! byte-stable artifacts. Regenerate with `REGEN_GOLDENS=1 cargo test -p
//! vdom-core --test goldens` and review the diff by hand.

use std::fs;
use std::path::PathBuf;

use vdom_core::diff::{diff, json as patch_json};
use vdom_core::dom::{serialize, Document};
use vdom_core::runtime::instantiate;
use vdom_core::template::{compile, emit, load};

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn read_fixture(name: &str) -> String {
    fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

fn check_golden(name: &str, actual: &str) {
    let path = fixture_path(name);
    if std::env::var_os("REGEN_GOLDENS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("golden {name} missing ({e}); run with REGEN_GOLDENS=1"));
    assert_eq!(
        actual, expected,
        "golden {name} drifted; regenerate deliberately with REGEN_GOLDENS=1"
    );
}

fn module_bytes(template: &str) -> Vec<u8> {
    emit(&compile(read_fixture(template).trim_end()).unwrap())
}

#[test]
fn compiled_modules_are_byte_stable() {
    for (template, golden) in [
        ("hello.tpl", "hello.module.json"),
        ("page.tpl", "page.module.json"),
        ("feed.tpl", "feed.module.json"),
    ] {
        let bytes = module_bytes(template);
        check_golden(golden, std::str::from_utf8(&bytes).unwrap());
        // And the golden itself loads back to the same module.
        let module = load(&bytes).unwrap();
        assert_eq!(emit(&module), bytes);
    }
}

#[test]
fn hello_module_renders_the_expected_dom() {
    let module = load(&module_bytes("hello.tpl")).unwrap();
    let node = instantiate(&module, &serde_json::json!({})).unwrap();
    let mut doc = Document::new();
    let dom = doc.realize(&node);
    assert_eq!(serialize(&dom), "<div>Hello World</div>");
}

#[test]
fn page_render_and_patch_goldens() {
    let module = load(&module_bytes("page.tpl")).unwrap();
    let state_a: serde_json::Value =
        serde_json::from_str(&read_fixture("page_state_a.json")).unwrap();
    let state_b: serde_json::Value =
        serde_json::from_str(&read_fixture("page_state_b.json")).unwrap();

    let old = instantiate(&module, &state_a).unwrap();
    let new = instantiate(&module, &state_b).unwrap();

    let mut doc = Document::new();
    let mut dom = doc.realize(&old);
    check_golden("page_render_a.golden.html", &serialize(&dom));

    let (patch, _) = diff(&old, &new);
    check_golden("page_patch.golden.json", &patch_json::patch_to_string(&patch));

    doc.apply(&mut dom, &patch).unwrap();
    check_golden("page_render_b.golden.html", &serialize(&dom));

    // The patched DOM matches a from-scratch render of state B.
    let mut fresh = Document::new();
    let fresh_dom = fresh.realize(&new);
    assert_eq!(serialize(&dom), serialize(&fresh_dom));
}
