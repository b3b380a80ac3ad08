mod common;

use jetsym::frontend::{parse_model, FrontendError, GARDNER, POTENTIAL_BURGERS};
use proptest::prelude::*;

use common::{arb_poly, arb_pseudo_op};

#[test]
fn fixtures_round_trip_byte_identically() {
    for src in [GARDNER, POTENTIAL_BURGERS] {
        let m = parse_model(src).unwrap();
        let printed = m.to_source();
        let again = parse_model(&printed).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.to_source(), printed);
    }
}

#[test]
fn multi_component_models() {
    let src = "depvars u, v;\nsystem nls { rhs: -v_xx + eps*u^2*v, u_xx - eps*v^2*u; }\nchar q = u_x, v_x;\n";
    let m = parse_model(src).unwrap();
    assert_eq!(m.depvars, ["u", "v"]);
    assert_eq!(parse_model(&m.to_source()).unwrap(), m);
    let err = parse_model("depvars u, v;\nchar q = u;").unwrap_err();
    assert!(matches!(err, FrontendError::Semantic { .. }));
    let err = parse_model("depvars u, v;\noperator A { Dx; }").unwrap_err();
    assert!(matches!(err, FrontendError::Semantic { .. }));
}

#[test]
fn higher_truncation_orders() {
    let m = parse_model("set eps_order = 2;\ndensity d = eps^2*u + eps^3*u_x;").unwrap();
    assert_eq!(m.densities["d"].eps_order(), 2);
    assert_eq!(m.densities["d"].to_string(), "eps^2*u");
}

#[test]
fn malformed_inputs_never_panic() {
    for src in [
        "",
        "set",
        "set eps_order",
        "set eps_order = ;",
        "set foo = 1;",
        "system",
        "system s {",
        "system s { rhs: }",
        "char q = ;",
        "char q = u^;",
        "char q = u^u;",
        "char q = ((u);",
        "density d = 1/0;",
        "density d = u/x;",
        "operator A { Dx^-1 }",
        "operator A { }",
        "char q = u{};",
        "char q = w{2};",
        "char Dx = u;",
        "char u_x = u;",
        "depvars x;",
        "density d = Dxi;",
        "char q = u^99999999999;",
        "@",
        "char q = u $ 1;",
        "char q = 1/2/0;",
    ] {
        assert!(
            parse_model(src).is_err() || src.is_empty(),
            "{src:?} parsed"
        );
    }
    // Coefficients are exact big rationals.
    let m = parse_model("char q = 99999999999999999999999999^2*u;").unwrap();
    assert!(m.characteristics["q"][0]
        .to_string()
        .starts_with("9999999999999999999999999800000000000000000000000001*"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printed_polynomials_parse_back(p in arb_poly(6, 5, true)) {
        let m = parse_model(&format!("density d = {p};")).unwrap();
        prop_assert_eq!(&m.densities["d"], &p);
    }

    #[test]
    fn printed_operators_parse_back(a in arb_pseudo_op()) {
        let m = parse_model(&format!("operator A {{ {a} }}")).unwrap();
        prop_assert_eq!(&m.operators["A"], &a);
    }

    #[test]
    fn arbitrary_text_is_handled(src in "[a-zDx_{}()^*/+;=:, 0-9\n-]{0,60}") {
        let _ = parse_model(&src);
    }
}
