//! Exercise the C surface from Rust: object lifecycles, the status
//! codes, the thread-local error text, and a few known scores.

use std::ffi::{CStr, CString};
use std::ptr;

use clickgraph_ffi::*;

fn demo_data() -> CString {
    CString::new(
        "q1\td1\t20\nq2\td1\t10\nq2\td2\t10\nq3\td1\t10\nq3\td3\t2\nq4\td1\t5\nq4\td3\t10\n",
    )
    .unwrap()
}

unsafe fn make_graph() -> *mut CgGraph {
    let data = demo_data();
    let mut g: *mut CgGraph = ptr::null_mut();
    assert_eq!(cg_graph_from_edge_data(data.as_ptr(), &mut g), CgStatus::Ok);
    assert!(!g.is_null());
    g
}

unsafe fn last_error() -> String {
    CStr::from_ptr(cg_last_error()).to_string_lossy().into_owned()
}

#[test]
fn version_is_populated() {
    let v = unsafe { CStr::from_ptr(cg_version()) };
    assert!(!v.to_bytes().is_empty());
}

#[test]
fn graph_counts_round_trip() {
    unsafe {
        let g = make_graph();
        assert_eq!(cg_graph_query_count(g), 4);
        assert_eq!(cg_graph_url_count(g), 3);
        assert_eq!(cg_graph_edge_count(g), 7);
        assert_eq!(cg_graph_total_uf(g), 67);
        cg_graph_free(g);
    }
}

#[test]
fn cosine_search_matches_known_scores() {
    unsafe {
        let g = make_graph();
        let mut e: *mut CgEngine = ptr::null_mut();
        assert_eq!(cg_engine_new(g, CgModel::Uf, 0, 0, &mut e), CgStatus::Ok);
        cg_graph_free(g); // engine holds its own reference

        let query = CString::new("q1").unwrap();
        let mut list: *mut CgSimilarList = ptr::null_mut();
        assert_eq!(
            cg_engine_similar(e, query.as_ptr(), CgMethod::Cosine, 0.0, 0, 2, &mut list),
            CgStatus::Ok
        );
        assert_eq!(cg_similar_len(list), 2);
        let first = CStr::from_ptr(cg_similar_query(list, 0)).to_str().unwrap();
        assert_eq!(first, "q3");
        assert!((cg_similar_score(list, 0) - 0.980581).abs() < 1e-6);
        let second = CStr::from_ptr(cg_similar_query(list, 1)).to_str().unwrap();
        assert_eq!(second, "q2");
        // q2's score is exactly 1/sqrt(2)
        assert!((cg_similar_score(list, 1) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);

        // out-of-range probes are inert
        assert!(cg_similar_query(list, 99).is_null());
        assert!(cg_similar_score(list, 99).is_nan());

        cg_similar_free(list);
        cg_engine_free(e);
    }
}

#[test]
fn walk_search_orders_ties_by_query() {
    unsafe {
        let g = make_graph();
        let mut e: *mut CgEngine = ptr::null_mut();
        assert_eq!(cg_engine_new(g, CgModel::Uf, 0, 0, &mut e), CgStatus::Ok);
        cg_graph_free(g);

        let query = CString::new("q1").unwrap();
        let mut list: *mut CgSimilarList = ptr::null_mut();
        assert_eq!(
            cg_engine_similar(e, query.as_ptr(), CgMethod::Ppr, 0.5, 1, 10, &mut list),
            CgStatus::Ok
        );
        assert_eq!(cg_similar_len(list), 3);
        let names: Vec<String> = (0..3)
            .map(|i| {
                CStr::from_ptr(cg_similar_query(list, i)).to_str().unwrap().to_string()
            })
            .collect();
        assert_eq!(names, ["q2", "q3", "q4"]);
        assert!((cg_similar_score(list, 0) - 1.0 / 9.0).abs() < 1e-9);
        assert!((cg_similar_score(list, 2) - 1.0 / 18.0).abs() < 1e-9);

        cg_similar_free(list);
        cg_engine_free(e);
    }
}

#[test]
fn weighted_engine_exposes_edge_values() {
    unsafe {
        let g = make_graph();
        let mut e: *mut CgEngine = ptr::null_mut();
        assert_eq!(cg_engine_new(g, CgModel::UfwIqf, 5, 4, &mut e), CgStatus::Ok);

        let q = CString::new("q1").unwrap();
        let d = CString::new("d1").unwrap();
        let mut value = 0.0;
        assert_eq!(
            cg_engine_edge_weight(e, q.as_ptr(), d.as_ptr(), &mut value),
            CgStatus::Ok
        );
        assert!((value - 0.169_916).abs() < 1e-6, "value = {value}");

        let absent = CString::new("d2").unwrap();
        assert_eq!(
            cg_engine_edge_weight(e, q.as_ptr(), absent.as_ptr(), &mut value),
            CgStatus::OutOfRange
        );
        assert!(last_error().contains("d2"));

        cg_engine_free(e);
        cg_graph_free(g);
    }
}

#[test]
fn failures_set_status_and_message() {
    unsafe {
        let mut g: *mut CgGraph = ptr::null_mut();

        let missing = CString::new("/no/such/file.tsv").unwrap();
        assert_eq!(cg_graph_from_edge_file(missing.as_ptr(), &mut g), CgStatus::Io);
        assert!(last_error().contains("/no/such/file.tsv"));

        let junk = CString::new("a\tb\tnot-a-number\n").unwrap();
        assert_eq!(cg_graph_from_edge_data(junk.as_ptr(), &mut g), CgStatus::Parse);

        assert_eq!(
            cg_graph_from_edge_data(ptr::null(), &mut g),
            CgStatus::NullArgument
        );
        let data = demo_data();
        assert_eq!(
            cg_graph_from_edge_data(data.as_ptr(), ptr::null_mut()),
            CgStatus::NullArgument
        );

        let graph = make_graph();
        let mut e: *mut CgEngine = ptr::null_mut();
        // q_total below the observed per-URL query count
        assert_eq!(cg_engine_new(graph, CgModel::UfIqf, 1, 0, &mut e), CgStatus::Weight);
        assert_eq!(cg_engine_new(graph, CgModel::Uf, 0, 0, &mut e), CgStatus::Ok);

        let ghost = CString::new("ghost").unwrap();
        let mut list: *mut CgSimilarList = ptr::null_mut();
        assert_eq!(
            cg_engine_similar(e, ghost.as_ptr(), CgMethod::Cosine, 0.0, 0, 5, &mut list),
            CgStatus::OutOfRange
        );
        assert!(last_error().contains("ghost"));

        let q1 = CString::new("q1").unwrap();
        assert_eq!(
            cg_engine_similar(e, q1.as_ptr(), CgMethod::Ppr, 1.5, 1, 5, &mut list),
            CgStatus::Similarity
        );
        assert!(last_error().contains("1.5"));

        // frees tolerate null
        cg_graph_free(ptr::null_mut());
        cg_engine_free(ptr::null_mut());
        cg_similar_free(ptr::null_mut());

        cg_engine_free(e);
        cg_graph_free(graph);
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/clickgraph.h"
    ))
    .expect("header generated at build time");
    for symbol in [
        "cg_version",
        "cg_last_error",
        "cg_graph_from_edge_file",
        "cg_graph_from_edge_data",
        "cg_graph_free",
        "cg_engine_new",
        "cg_engine_similar",
        "cg_engine_edge_weight",
        "cg_similar_len",
        "cg_similar_query",
        "cg_similar_score",
        "cg_similar_free",
        "CgStatus",
        "CgModel",
        "CgMethod",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
