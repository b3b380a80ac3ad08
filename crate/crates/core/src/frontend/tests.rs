use super::*;
use crate::engine::check_symmetry;
use crate::jet::Space;
use crate::operator::PseudoDiffOp;

fn gardner() -> Model {
    parse_model(GARDNER).unwrap()
}

fn burgers() -> Model {
    parse_model(POTENTIAL_BURGERS).unwrap()
}

#[test]
fn gardner_system_and_operator() {
    let m = gardner();
    let s = Space::scalar(1);
    let u = s.u(0);
    let rhs = s.int(6) * (&u + s.eps() * u.pow(2)) * s.u(1) - s.u(3);
    assert_eq!(m.systems["gardner"].rhs(), &[rhs]);
    let e = &m.operators["E"];
    let mut expected = PseudoDiffOp::zero(s);
    expected.add_local(0, s.int(2) * s.u(1) + s.int(3) * s.eps() * &u * s.u(1));
    expected.add_local(1, s.int(4) * &u + s.int(3) * s.eps() * u.pow(2));
    expected.add_local(3, s.int(-1));
    assert_eq!(e, &expected);
    assert_eq!(
        m.operators["R"],
        expected.compose(&PseudoDiffOp::dxi(s)).unwrap()
    );
}

#[test]
fn fixtures_round_trip() {
    for src in [GARDNER, POTENTIAL_BURGERS] {
        let m = parse_model(src).unwrap();
        let printed = m.to_source();
        let again = parse_model(&printed).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.to_source(), printed);
        assert_eq!(again.hash(), m.hash());
    }
}

#[test]
fn fixture_characteristics_are_symmetries() {
    for (m, sys) in [(gardner(), "gardner"), (burgers(), "burgers")] {
        for (name, q) in &m.characteristics {
            if name.ends_with("_printed") || name == "R1Q12" || name == "K2" {
                continue;
            }
            let report = check_symmetry(&q[0], &m.systems[sys]).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.residual);
        }
    }
}

#[test]
fn printed_burgers_forms_fail() {
    let m = burgers();
    for name in ["Q4_printed", "Q5_printed", "Q6_printed"] {
        let q = &m.characteristics[name][0];
        assert!(!check_symmetry(q, &m.systems["burgers"]).unwrap().passed());
    }
}

#[test]
fn unbarred_second_flow_is_not_a_symmetry() {
    let m = gardner();
    let k2 = m.operators["R"].apply(&m.characteristics["K1"][0]).unwrap();
    assert_eq!(k2, m.characteristics["K2"][0]);
    let report = check_symmetry(&k2, &m.systems["gardner"]).unwrap();
    let crate::engine::Residual::Poly(r) = &report.residual else {
        panic!("scalar residual expected");
    };
    assert_eq!(r.eps_valuation(), Some(1));
}

#[test]
fn indexed_and_repeated_jets_agree() {
    let a = parse_model("char a = u{3} + u{0};").unwrap();
    let b = parse_model("char a = u_xxx + u;").unwrap();
    assert_eq!(a, b);
}

#[test]
fn undeclared_name() {
    let err = parse_model("char bad = u_y;").unwrap_err();
    assert!(matches!(err, FrontendError::Name { ref name, .. } if name == "u_y"));
    assert_eq!(err.to_string(), "1:12: undeclared name `u_y`");
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_model("set eps_order = 1;\nchar q = (u + ;").unwrap_err();
    match err {
        FrontendError::Parse { pos, expected, .. } => {
            assert_eq!((pos.line, pos.col), (2, 15));
            assert!(expected.iter().any(|e| e == "identifier"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_model("operator D { Dx }\nchar q = D;").is_err());
    assert!(parse_model("char q = u; char q = u_x;").is_err());
    assert!(parse_model("density d = u / u;").is_err());
    assert!(parse_model("system s { rhs: u_x; }\nset eps_order = 2;").is_err());
}

#[test]
fn operator_composition_is_coefficient_left() {
    let m =
        parse_model("operator A { u*Dx; }\noperator B { Dx*u; }\noperator C { u*Dxi*u; }").unwrap();
    let s = Space::scalar(1);
    let mut a = PseudoDiffOp::zero(s);
    a.add_local(1, s.u(0));
    assert_eq!(m.operators["A"], a);
    let mut b = a.clone();
    b.add_local(0, s.u(1));
    assert_eq!(m.operators["B"], b);
    assert_eq!(
        m.operators["C"],
        PseudoDiffOp::nonlocal_term(&s.u(0), &s.u(0))
    );
}
