use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::ring::{ratio, EpsPoly};

fn s() -> Space {
    Space::scalar(1)
}

fn gardner() -> EvolutionSystem {
    let s = s();
    let u = s.u(0);
    EvolutionSystem::scalar(s.int(6) * (&u + s.eps() * u.pow(2)) * s.u(1) - s.u(3)).unwrap()
}

fn burgers() -> EvolutionSystem {
    let s = s();
    EvolutionSystem::scalar(s.u(2) + s.eps() * s.u(1).pow(2)).unwrap()
}

#[test]
fn total_x_derivative() {
    let s = s();
    let p = s.eps() * s.x() * s.u(0).pow(2);
    assert_eq!(
        dx_total(&p),
        s.eps() * s.u(0).pow(2) + s.int(2) * s.eps() * s.x() * s.u(0) * s.u(1)
    );
    assert!(dx_total(&s.t()).is_zero());
}

#[test]
fn total_t_derivative_on_gardner() {
    let s = s();
    let u = s.u(0);
    let p = s.eps() * (s.int(3) * s.t() * u.pow(2) + s.x() * &u);
    let expected = s.eps()
        * (s.int(3) * u.pow(2) + s.int(36) * s.t() * u.pow(2) * s.u(1)
            - s.int(6) * s.t() * &u * s.u(3)
            + s.int(6) * s.x() * &u * s.u(1)
            - s.x() * s.u(3));
    assert_eq!(dt_total(&p, &gardner()).unwrap(), expected);
}

#[test]
fn total_t_derivative_on_burgers() {
    let s = s();
    assert_eq!(
        dt_total(&s.u(0), &burgers()).unwrap(),
        s.u(2) + s.eps() * s.u(1).pow(2)
    );
}

#[test]
fn euler_examples() {
    let s = s();
    let u = s.u(0);
    let h = u.pow(3) + s.eps() * u.pow(4).scale(&ratio(1, 2)) + s.u(1).pow(2).scale(&ratio(1, 2));
    assert_eq!(
        euler(&h),
        vec![s.int(3) * u.pow(2) + s.int(2) * s.eps() * u.pow(3) - s.u(2)]
    );
    assert!(euler(&dx_total(&(u.pow(3) * s.x())))
        .iter()
        .all(DiffPoly::is_zero));
}

#[test]
fn integrate_examples() {
    let s = s();
    let u = s.u(0);
    let p = s.int(3) * u.pow(2) * s.u(1) - s.u(3);
    assert_eq!(integrate_x(&p).unwrap(), u.pow(3) - s.u(2));
    assert_eq!(
        integrate_x(&s.x()).unwrap(),
        s.x().pow(2).scale(&ratio(1, 2))
    );
    let err = integrate_x(&s.u(1).pow(2)).unwrap_err();
    assert!(matches!(err, Error::NotExact { .. }));
    assert_eq!(err.obstruction().unwrap(), &[s.int(-2) * s.u(2)]);
    assert!(integrate_x(&u).is_err());
}

#[test]
fn frechet_examples() {
    let s = s();
    let k = gardner().rhs()[0].clone();
    let fk = frechet(&k);
    let u = s.u(0);
    assert_eq!(
        fk.local_coefficient(0).unwrap(),
        &(s.int(6) * s.u(1) + s.int(12) * s.eps() * &u * s.u(1))
    );
    assert_eq!(
        fk.local_coefficient(1).unwrap(),
        &(s.int(6) * &u + s.int(6) * s.eps() * u.pow(2))
    );
    assert_eq!(fk.local_coefficient(3).unwrap(), &s.int(-1));
    assert!(fk.local_coefficient(2).is_none());
}

#[test]
fn helmholtz_examples() {
    let s = s();
    let u = s.u(0);
    assert!(helmholtz_selfadjoint(&[s.int(3) * u.pow(2) - s.u(2)]));
    assert!(!helmholtz_selfadjoint(&[s.u(1)]));
    assert!(!helmholtz_selfadjoint(&[&u * s.u(1)]));
    assert!(helmholtz_selfadjoint(&[
        s.eps() * (s.int(6) * s.t() * &u + s.x())
    ]));
}

#[test]
fn reconstruct_examples() {
    let s = s();
    let u = s.u(0);
    let g = s.eps() * (s.int(6) * s.t() * &u + s.x());
    let f = reconstruct_density(&[g]).unwrap();
    assert_eq!(
        f.density,
        s.eps() * (s.int(3) * s.t() * u.pow(2) + s.x() * &u)
    );
    assert!(matches!(
        reconstruct_density(&[s.u(1)]),
        Err(Error::NotVariational { .. })
    ));
    let mass = reconstruct_density(&[s.one()]).unwrap();
    assert!(mass.equivalent(&Functional::new(u.clone())));
}

#[test]
fn multi_component_euler() {
    let s = Space::new(2, 1);
    let (u, v) = (s.jet(0, 0), s.jet(1, 0));
    let h = &u * s.jet(1, 1);
    assert_eq!(euler(&h), vec![s.jet(1, 1), -s.jet(0, 1)]);
    let sys = EvolutionSystem::new(vec![v.clone(), u.clone()]).unwrap();
    assert_eq!(dt_total(&(&u * &v), &sys).unwrap(), v.pow(2) + u.pow(2));
}

#[test]
fn mismatched_spaces_rejected() {
    let a = Space::scalar(1).u(0);
    let b = Space::scalar(2).u(0);
    assert!(matches!(a.try_add(&b), Err(Error::OrderMismatch { .. })));
    let sys = EvolutionSystem::scalar(Space::scalar(2).u(2)).unwrap();
    assert!(dt_total(&a, &sys).is_err());
}

fn arb_poly(max_order: usize) -> impl Strategy<Value = DiffPoly> {
    let term = (
        -4i64..5,
        0i64..3,
        prop::collection::vec(0usize..=max_order, 0..4),
        0u32..2,
        0u32..2,
    );
    prop::collection::vec(term, 0..5).prop_map(|terms| {
        let s = Space::scalar(1);
        let mut p = s.zero();
        for (c0, c1, jets, xe, te) in terms {
            let mut m = s.x().pow(xe) * s.t().pow(te);
            for k in jets {
                m = m * s.u(k);
            }
            p = p + m.scale_eps(&EpsPoly::from_coeffs(vec![ratio(c0, 1), ratio(c1, 2)], 1));
        }
        p
    })
}

proptest! {
    #[test]
    fn euler_kills_total_derivatives(p in arb_poly(3)) {
        prop_assert!(is_exact(&dx_total(&p)));
    }

    #[test]
    fn integrate_inverts_dx(p in arb_poly(3)) {
        let dp = dx_total(&p);
        let r = integrate_x(&dp).unwrap();
        prop_assert_eq!(dx_total(&r), dp);
    }

    #[test]
    fn dx_is_a_derivation(a in arb_poly(2), b in arb_poly(2)) {
        prop_assert_eq!(dx_total(&(&a * &b)), dx_total(&a) * &b + &a * dx_total(&b));
    }

    #[test]
    fn gradients_reconstruct(p in arb_poly(2)) {
        let g = euler(&p);
        prop_assert!(helmholtz_selfadjoint(&g));
        let f = reconstruct_density(&g).unwrap();
        prop_assert_eq!(f.gradient(), g);
    }
}
