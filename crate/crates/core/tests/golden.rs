use forge_core::expansion::{exact_profile, unique_neighbor_list, DEFAULT_BUDGET};
use forge_core::graphs::named::octagon_with_diagonals;
use forge_core::Side;
use serde_json::Value;

fn load(name: &str) -> Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn octagon_profile_matches_golden_file() {
    let golden = load("octagon_profile.json");
    let t_max = golden["t_max"].as_u64().unwrap() as usize;
    let ratios: Vec<f64> = golden["min_ratio"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let uniques: Vec<u64> = golden["unique_at_min"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    let g = octagon_with_diagonals();
    let p = exact_profile(&g, Side::Whole, t_max, DEFAULT_BUDGET).unwrap();
    for t in 1..=t_max {
        let e = p.entry(t);
        assert!((e.min_ratio - ratios[t - 1]).abs() < 1e-12, "t = {t}: {} vs {}", e.min_ratio, ratios[t - 1]);
        assert_eq!(e.unique as u64, uniques[t - 1], "t = {t}");
        assert_eq!(unique_neighbor_list(&g, &e.argmin).len(), e.unique);
    }
}

#[test]
fn octagon_pair_with_two_common_neighbors() {
    // 0 and 3 share 4 and 7, leaving one private neighbor each.
    let g = octagon_with_diagonals();
    assert_eq!(unique_neighbor_list(&g, &[0, 3]), vec![1, 2]);
}
