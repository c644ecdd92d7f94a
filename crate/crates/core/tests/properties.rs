//! Cross-module properties driven through JSON documents.

use proptest::prelude::*;
use qpd_core::io::{complex_document, complex_spec, load, verdict_json, Loaded, Overrides};
use qpd_core::qpd::{qpd_eval, QpdOptions};
use qpd_core::resolution::{depth_presented, pd, ring_depth, Bound};

fn mono(a: u32, b: u32) -> String {
    match (a, b) {
        (0, 0) => "1".into(),
        (a, 0) => format!("x^{a}"),
        (0, b) => format!("y^{b}"),
        (a, b) => format!("x^{a}*y^{b}"),
    }
}

fn cyclic(ideal: &str, shift: i64, index: i64, rels: &[String]) -> Loaded {
    let rels: Vec<String> = rels.iter().map(|r| format!("\"{r}\"")).collect();
    let text = format!(
        r#"{{"field":{{"p":101}},"ring":{{"vars":["x","y"],"ideal":{ideal}}},
            "complex":{{"min_index":{index},"terms":[{{"module":{{"generators":[{{"shift":{shift}}}],"relations":[[{}]]}}}}],"diffs":[]}}}}"#,
        rels.join(",")
    );
    load(&text, Overrides::default()).unwrap()
}

fn opts() -> QpdOptions {
    QpdOptions {
        search: None,
        ..QpdOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // over k[x,y] every module has finite pd, so qpd + hsup = pd = depth R - depth M
    #[test]
    fn comparison_and_ab_formula(a in 1u32..4, b in 1u32..4, c in 0u32..3, d in 0u32..3) {
        prop_assume!((c, d) != (0, 0));
        let l = cyclic("[]", 0, 0, &[mono(a, 0), mono(0, b), mono(c, d)]);
        let m = l.object().unwrap();
        let v = qpd_eval(m, &opts()).unwrap();
        let p = pd(m, None).unwrap().pd.finite().unwrap();
        let depth_r = ring_depth(&l.ring).unwrap().depth.finite().unwrap();
        let depth_m = depth_presented(m).unwrap().depth.finite().unwrap();
        prop_assert_eq!(v.exact_value(), Some(p));
        prop_assert_eq!(p, depth_r - depth_m);
    }

    #[test]
    fn qpd_ignores_shift_and_twist(a in 1u32..3, b in 1u32..3, s in -2i64..3, t in -2i64..3) {
        let ideal = r#"["x^2","y^2"]"#;
        let rels = [mono(a, 0), mono(0, b)];
        let base = qpd_eval(cyclic(ideal, 0, 0, &rels).object().unwrap(), &opts()).unwrap();
        let moved = qpd_eval(cyclic(ideal, t, s, &rels).object().unwrap(), &opts()).unwrap();
        prop_assert_eq!(base.value(), moved.value());
        prop_assert_eq!(base.exact_value().is_some(), moved.exact_value().is_some());
    }

    #[test]
    fn documents_round_trip(a in 0u32..3, b in 0u32..3, c in 0u32..3, d in 0u32..3) {
        let text = format!(
            r#"{{"field":{{"p":101}},"ring":{{"vars":["x","y"],"ideal":["x^3"]}},
                "complex":{{"min_index":1,"terms":[{{"free":[[0,1]]}},{{"free":[[{},1],[{},1]]}}],"diffs":[[["{}","{}"]]]}}}}"#,
            a + b, c + d, mono(a, b), mono(c, d)
        );
        let l = load(&text, Overrides::default()).unwrap();
        let m = l.object().unwrap();
        let again = load(&serde_json::to_string(&complex_document(m)).unwrap(), Overrides::default()).unwrap();
        prop_assert_eq!(complex_spec(again.object().unwrap()), complex_spec(m));
    }

    #[test]
    fn evaluation_is_deterministic(a in 1u32..3, b in 1u32..3, seed in 0u64..50) {
        let l = cyclic(r#"["x^2","x*y","y^2"]"#, 0, 0, &[mono(a, 0), mono(0, b)]);
        let o = QpdOptions { seed, ..opts() };
        let x = verdict_json(&qpd_eval(l.object().unwrap(), &o).unwrap());
        let y = verdict_json(&qpd_eval(l.object().unwrap(), &o).unwrap());
        prop_assert_eq!(x, y);
    }
}

#[test]
fn zero_module_has_no_qpd_value() {
    let l = cyclic("[]", 0, 0, &["1".to_string()]);
    let m = l.object().unwrap();
    assert_eq!(pd(m, None).unwrap().pd, Bound::MinusInfinity);
    assert!(qpd_eval(m, &opts()).is_err());
}
