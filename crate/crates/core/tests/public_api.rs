use spreadkit::decomposition::{spread_approximation, verify_decomposition, StopReason};
use spreadkit::ingest::{independence_complex, parse_facets, parse_family, parse_graph};
use spreadkit::oracle::{ekr_verdict, UNLIMITED};
use spreadkit::spreadness::{lemma_spread_check, local_lym_check};
use spreadkit::{Face, Rational, SetFamily};

fn face(es: &[u32]) -> Face {
    Face::from_elements(es.iter().copied()).unwrap()
}

#[test]
fn path_graph_end_to_end() {
    let g = parse_graph("p 4 3\n1 2\n2 3\n3 4\n").unwrap();
    let cx = independence_complex(&g);
    let expected = SetFamily::new(4, [face(&[1, 3]), face(&[1, 4]), face(&[2, 4])]).unwrap();
    assert_eq!(cx.facets(), &expected);
    assert_eq!(cx.rank(), 2);
    assert!(lemma_spread_check(&cx, 1).unwrap().holds);
    let lym = local_lym_check(&cx, 1).unwrap();
    assert!(lym.holds);
    assert_eq!(lym.worst_ratio, Rational::new(1, 4));
    let v = ekr_verdict(&cx, 1, 1, UNLIMITED).unwrap();
    assert_eq!(v.max_size, 1);
    assert!(v.star_optimal);
}

#[test]
fn family_files_keep_nested_members() {
    let fam = parse_family("1 2\n1 2 3\n").unwrap();
    assert_eq!(fam.len(), 2);
    let cx = parse_facets("1 2\n1 2 3\n").unwrap();
    assert_eq!(cx.facets().len(), 1);
}

#[test]
fn star_decomposes_into_one_piece() {
    let cx = parse_facets("1 2 3 4 5 6 7 8 9 10 11 12\n").unwrap();
    let layer = cx.layer(3);
    let star = layer.containing(face(&[1]));
    let d = spread_approximation(&star, &layer, Rational::from_integer(2), 1).unwrap();
    assert_eq!(d.cover, vec![face(&[1])]);
    assert_eq!(d.stop_reason, StopReason::Exhausted);
    let v = verify_decomposition(&d, &star, &layer, 1, Some(Rational::from_integer(4))).unwrap();
    assert!(v.procedure_ok());
    assert!(v.cover_t_intersecting.holds);
}
