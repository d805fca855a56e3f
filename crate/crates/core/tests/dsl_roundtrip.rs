mod common;

use proptest::prelude::*;
use rfm_core::dsl::{parse_expr, parse_syntax, print_expr};
use rfm_core::{parse, print, Parsed};

proptest! {
    #[test]
    fn expressions_survive_print_parse(seed in any::<u64>()) {
        let e = common::expr(&mut common::rng(seed), 3);
        let text = print_expr(&e);
        prop_assert_eq!(parse_syntax(&format!("manifold {text}")).unwrap(), Parsed::Manifold(e));
    }

    #[test]
    fn descriptors_survive_print_parse(seed in any::<u64>()) {
        let p = Parsed::Descriptor(common::descriptor(&mut common::rng(seed)));
        let text = print(&p);
        let back = parse_syntax(&text).unwrap_or_else(|d| panic!("{text}\n{d:?}"));
        prop_assert_eq!(print(&back), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn traces_survive_print_parse(seed in any::<u64>()) {
        let p = Parsed::Trace(common::trace(&mut common::rng(seed)));
        let text = print(&p);
        prop_assert_eq!(parse_syntax(&text).unwrap(), p);
    }
}

#[test]
fn diagnostics_point_at_the_offending_token() {
    let errs = parse("roundfold {\n  m = 7;\n  n = ;\n}\n").unwrap_err();
    assert_eq!(errs[0].span.line, 3);
    assert!(errs[0].to_string().starts_with("3:"));
}

#[test]
fn unknown_field_has_hint() {
    let errs = parse("roundfold { m = 7; n = 4; evnts = []; }").unwrap_err();
    assert!(errs.iter().any(|d| d.hint.is_some()), "{errs:?}");
}

#[test]
fn validation_errors_map_to_event_lines() {
    let text = "roundfold {\n  m = 7;\n  n = 4;\n  events = [\n    birth(c1 : S(3)),\n    death(c9)\n  ];\n}\n";
    let errs = parse(text).unwrap_err();
    assert!(errs.iter().any(|d| d.span.line == 6), "{errs:?}");
}

#[test]
fn flat_products_parse() {
    let e = parse_expr("S(2) * S(3) * S(1)").unwrap();
    assert_eq!(e.factors().len(), 3);
    assert_eq!(e.dim(), 6);
}
