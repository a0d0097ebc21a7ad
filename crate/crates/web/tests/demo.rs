use floppy_metric::metric::is_floppy;
use floppy_metric::{PartialMetric, Rational};
use floppy_web::{analyze, extend_step, generate, play_game, SLIDER_STEPS};
use serde_json::{json, Value};

const HGRAPH: &str = r#"{"vertices":["a","b","x","y"],"edges":[{"u":"a","v":"b","w":"10"},{"u":"a","v":"x","w":"1"},{"u":"b","v":"y","w":"1"}]}"#;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("operation succeeds")).unwrap()
}

#[test]
fn analysis_lists_missing_pairs_with_intervals() {
    let a = parse(analyze(HGRAPH));
    assert_eq!(a["floppy"]["floppy"], json!(true));
    let missing = a["missing"].as_array().unwrap();
    assert_eq!(missing.len(), 3);
    let xy = missing
        .iter()
        .find(|p| p["pair"] == json!(["x", "y"]))
        .unwrap();
    assert_eq!((&xy["check"], &xy["hat"]), (&json!("8"), &json!("12")));
    assert_eq!(xy["interval"]["lo"], json!("32/3"));
}

#[test]
fn slider_maps_onto_the_admissible_interval() {
    let lo = parse(extend_step(HGRAPH, "x,y", 0));
    assert_eq!(lo["r"], json!("32/3"));
    let half = parse(extend_step(HGRAPH, "x,y", SLIDER_STEPS / 2));
    assert_eq!(half["r"], json!("34/3"));
    assert!(extend_step(HGRAPH, "x,y", SLIDER_STEPS).is_err());
    assert!(extend_step(HGRAPH, "a,b", 0)
        .unwrap_err()
        .starts_with("ALREADY_EDGE"));
}

#[test]
fn repeated_steps_reach_a_floppy_full_metric() {
    let mut doc = HGRAPH.to_string();
    for slider in [0, 999, 321] {
        let a = parse(analyze(&doc));
        let pair = &a["missing"][0]["pair"];
        let key = format!(
            "{},{}",
            pair[0].as_str().unwrap(),
            pair[1].as_str().unwrap()
        );
        let step = parse(extend_step(&doc, &key, slider));
        doc = step["analysis"]["metric"].to_string();
        let m = PartialMetric::from_json(&doc).unwrap();
        assert!(is_floppy(&m).unwrap().floppy);
    }
    let last = parse(analyze(&doc));
    assert_eq!(last["validation"]["full"], json!(true));
    assert!(last["missing"].as_array().unwrap().is_empty());
}

#[test]
fn games_are_won_by_the_interval_strategy() {
    for seed in 0..5 {
        let t = parse(play_game(HGRAPH, seed));
        assert_eq!(t["verdict"], json!("PLAYER_I_WINS"));
    }
    let cycle = generate("cycle", 5, 0).unwrap();
    assert_eq!(
        parse(play_game(&cycle, 3))["verdict"],
        json!("PLAYER_I_WINS")
    );
}

#[test]
fn generated_documents_parse() {
    for kind in ["cantor", "path", "cycle", "star", "random"] {
        let doc = generate(kind, 4, 9).unwrap();
        let m = PartialMetric::from_json(&doc).unwrap();
        assert!(m.vertices().len() >= 4);
    }
    let cantor = parse(analyze(&generate("cantor", 1, 0).unwrap()));
    let pair = cantor["missing"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["pair"] == json!(["0", "1"]))
        .unwrap();
    assert_eq!(pair["hat"], json!(Rational::one().to_string()));
    assert!(generate("torus", 3, 0).is_err());
    assert!(analyze("not json")
        .unwrap_err()
        .starts_with("REJECT_MALFORMED"));
}
