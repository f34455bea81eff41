mod common;

use common::{group, pair, table, GROUPS};
use qrf::group::{build_heisenberg, FiniteGroup};
use qrf::invariant::{charge_projectors, invariant_algebra, TwirlSpec};
use qrf::linalg::{frob_dist, rank};
use qrf::relative::invariant_dimension_oracle;
use qrf::repr::{
    block_diag_left, block_diag_right, fourier_unitary, regular_left, regular_right,
    validate_irrep_table, UnitaryRep,
};

fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

#[test]
fn s3_table_is_permutation_composition() {
    let g = group("s3");
    let perms = lex_permutations(3);
    for (a, p) in perms.iter().enumerate() {
        for (b, q) in perms.iter().enumerate() {
            let pq: Vec<usize> = (0..3).map(|i| p[q[i]]).collect();
            let c = perms.iter().position(|r| *r == pq).unwrap();
            assert_eq!(g.mul(a, b), c);
        }
    }
}

#[test]
fn bundled_groups_have_expected_structure() {
    let expect: [(&str, usize, bool, usize); 7] = [
        ("z2", 2, true, 2),
        ("z3", 3, true, 3),
        ("z6", 6, true, 6),
        ("s3", 6, false, 1),
        ("d4", 8, false, 2),
        ("q8", 8, false, 2),
        ("h3", 27, false, 3),
    ];
    for (key, order, abelian, center) in expect {
        let g = group(key);
        assert_eq!(g.order(), order, "{key}");
        assert_eq!(g.is_abelian(), abelian, "{key}");
        assert_eq!(g.center().len(), center, "{key}");
    }
}

#[test]
fn bundled_heisenberg_matches_builder() {
    let built: FiniteGroup = build_heisenberg(3).unwrap();
    assert_eq!(group("h3").table(), built.table());
}

#[test]
fn every_irrep_table_validates() {
    for key in GROUPS {
        let r = validate_irrep_table(&table(key));
        assert!(r.passed(), "{key}: {}", r.to_json());
    }
}

#[test]
fn fourier_intertwines_both_regular_actions() {
    for key in GROUPS {
        let t = table(key);
        let g = t.group().clone();
        let f = fourier_unitary(&t).unwrap().into_matrix();
        for e in g.elements() {
            let l = regular_left(&g, e, "A").unwrap().into_matrix();
            let r = regular_right(&g, e, "A").unwrap().into_matrix();
            assert!(
                frob_dist(&(&f * l * f.adjoint()), &block_diag_left(&t, e)) < 1e-9,
                "{key}"
            );
            assert!(
                frob_dist(&(&f * r * f.adjoint()), &block_diag_right(&t, e)) < 1e-9,
                "{key}"
            );
        }
    }
}

#[test]
fn multiplicities_from_characters() {
    let (t, perm) = pair("s3", "perm");
    assert_eq!(t.multiplicities(&perm.character()).unwrap(), vec![1, 0, 1]);
    let (t, std) = pair("s3", "standard");
    assert_eq!(t.multiplicities(&std.character()).unwrap(), vec![0, 0, 1]);
    let (t, sum) = pair("z2", "sum");
    assert_eq!(t.multiplicities(&sum.character()).unwrap(), vec![1, 1]);
    for key in GROUPS {
        let t = table(key);
        let reg = UnitaryRep::regular(t.group().clone());
        assert_eq!(
            t.multiplicities(&reg.character()).unwrap(),
            t.dims(),
            "{key}"
        );
    }
}

#[test]
fn regular_charge_projectors_have_rank_dq_squared() {
    for key in GROUPS {
        let t = table(key);
        let reg = UnitaryRep::regular(t.group().clone());
        let ps = charge_projectors(&reg, &t, "A").unwrap();
        for (p, q) in ps.iter().zip(t.irreps()) {
            assert_eq!(rank(p.matrix()), q.dim * q.dim, "{key} {}", q.label);
        }
    }
}

#[test]
fn s3_standard_invariant_algebra_dimension() {
    // L ⊗ standard: multiplicities m_q = d_q · 2 (standard ⊗ regular), so
    // Σ m_q² = 2² + 2² + 4² = 24.
    let (t, std) = pair("s3", "standard");
    let spec = TwirlSpec::frame_and_system(t.group().clone(), &std).unwrap();
    assert_eq!(invariant_algebra(&spec).dim(), 24);
    assert_eq!(invariant_dimension_oracle(&t, &std).unwrap(), 24);
}
