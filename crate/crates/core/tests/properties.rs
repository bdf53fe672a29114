//! Property tests for the virtual-node layer: flag invariants on arbitrary
//! constructed trees, purity of flag inference, and structural equality as
//! an equivalence relation.

use proptest::prelude::*;
use std::sync::Arc;
use vdom_core::vnode::{
    infer_flag, make_element, structural_eq, text, Flag, PropValue, Props, VNode,
};

fn arb_prop_value() -> impl Strategy<Value = PropValue> {
    prop_oneof![
        "[a-z]{0,6}".prop_map(PropValue::str),
        any::<bool>().prop_map(PropValue::Bool),
        (-1000i32..1000).prop_map(|n| PropValue::Num(n as f64 / 8.0)),
        (0u64..64).prop_map(PropValue::EventRef),
    ]
}

fn arb_props() -> impl Strategy<Value = Props> {
    prop::collection::vec(("[a-z]{1,5}", arb_prop_value()), 0..3).prop_map(|entries| {
        let mut props = Props::new();
        for (name, value) in entries {
            props.insert(name, value);
        }
        props
    })
}

/// Trees built exclusively through the public constructors, so every
/// element's flag came from `infer_flag`.
fn arb_tree() -> impl Strategy<Value = VNode> {
    let leaf = prop_oneof![
        "[a-z ]{0,8}".prop_map(|s| text(&s)),
        arb_props().prop_map(|props| make_element("span", props, vec![], None, None).unwrap()),
    ];
    leaf.prop_recursive(4, 64, 6, |inner| {
        let keyed = prop::collection::vec(inner.clone(), 1..6).prop_map(|children| {
            let keyed: Vec<VNode> = children
                .into_iter()
                .enumerate()
                .map(|(i, child)| {
                    let body = match child {
                        VNode::Element(el) => el.children.clone(),
                        t @ VNode::Text(_) => vec![t],
                    };
                    make_element("li", Props::new(), body, Some(Arc::from(format!("k{i}").as_str())), None)
                        .unwrap()
                })
                .collect();
            make_element("ul", Props::new(), keyed, None, None).unwrap()
        });
        let plain = (arb_props(), prop::collection::vec(inner, 0..5)).prop_map(|(props, children)| {
            make_element("div", props, children, None, None).unwrap()
        });
        prop_oneof![plain, keyed]
    })
}

fn flag_invariants_hold(node: &VNode) -> bool {
    match node {
        VNode::Text(_) => true,
        VNode::Element(el) => {
            let ok = match el.flag {
                Flag::NoChildren => el.children.is_empty(),
                Flag::OnlyTextChildren => el.children.iter().all(|c| c.as_text().is_some()),
                Flag::OnlyKeyedChildren => {
                    let mut seen = std::collections::HashSet::new();
                    el.children.iter().all(|c| {
                        c.key().map(|k| seen.insert(k.clone())).unwrap_or(false)
                    })
                }
                Flag::AnyChildren => true,
                Flag::Static => false, // never produced by make_element
            };
            ok && el.children.iter().all(flag_invariants_hold)
        }
    }
}

proptest! {
    #[test]
    fn constructed_trees_satisfy_flag_invariants(tree in arb_tree()) {
        prop_assert!(flag_invariants_hold(&tree));
    }

    #[test]
    fn infer_flag_depends_only_on_child_shapes(children in prop::collection::vec(arb_tree(), 0..6)) {
        let first = infer_flag(&children);
        // Cloning children (same shapes, same nodes) cannot change the flag,
        // and neither can wrapping them in a different parent.
        let cloned: Vec<VNode> = children.to_vec();
        prop_assert_eq!(first, infer_flag(&cloned));
    }

    #[test]
    fn structural_eq_is_reflexive_and_symmetric(a in arb_tree(), b in arb_tree()) {
        prop_assert!(structural_eq(&a, &a));
        prop_assert!(structural_eq(&a, &a.clone()));
        prop_assert_eq!(structural_eq(&a, &b), structural_eq(&b, &a));
    }

    #[test]
    fn structural_eq_is_transitive_on_sampled_triples(
        a in arb_tree(),
        b in arb_tree(),
        c in arb_tree(),
    ) {
        if structural_eq(&a, &b) && structural_eq(&b, &c) {
            prop_assert!(structural_eq(&a, &c));
        }
        // Equal trees obtained by cloning are transitively equal.
        let x = a.clone();
        let y = x.clone();
        prop_assert!(structural_eq(&a, &x) && structural_eq(&x, &y) && structural_eq(&a, &y));
    }

    #[test]
    fn canonical_json_round_trips(tree in arb_tree()) {
        let value = vdom_core::vnode::json::to_value(&tree);
        let back = vdom_core::vnode::json::from_value(&value).unwrap();
        prop_assert!(structural_eq(&tree, &back));
        prop_assert_eq!(
            vdom_core::vnode::json::to_canonical_string(&tree),
            vdom_core::vnode::json::to_canonical_string(&back)
        );
    }
}
