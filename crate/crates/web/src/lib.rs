//! Browser bindings for the metric library.
//!
//! Each operation takes and returns JSON strings. The plain functions are
//! usable natively; the `js_*` wrappers expose them to JavaScript and turn
//! errors into thrown strings.

use floppy_metric::game::{play, RandomPlayerTwo, Sampler, WinningPlayerOne};
use floppy_metric::generators::GenKind;
use floppy_metric::metric::{validate, DistanceTables, ValidationReport};
use floppy_metric::{
    one_step_extend, AdmissibleInterval, Doubleton, Error, FloppyReport, GenSpec, Mode,
    PartialMetric, Rational,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Resolution of the slider that places a value inside the admissible interval.
pub const SLIDER_STEPS: u32 = 1000;

#[derive(Debug, Serialize)]
pub struct PairInfo {
    pub pair: Doubleton,
    pub hat: Rational,
    pub check: Rational,
    pub interval: AdmissibleInterval,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub metric: PartialMetric,
    pub validation: ValidationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floppy: Option<FloppyReport>,
    pub missing: Vec<PairInfo>,
}

#[derive(Debug, Serialize)]
pub struct StepResult {
    pub pair: Doubleton,
    pub r: Rational,
    pub analysis: Analysis,
}

fn message(e: Error) -> String {
    format!("{}: {e}", e.code())
}

fn encode<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn analysis(m: PartialMetric) -> Result<Analysis, String> {
    let validation = validate(&m);
    if !validation.graph_pseudometric {
        return Ok(Analysis {
            metric: m,
            validation,
            floppy: None,
            missing: Vec::new(),
        });
    }
    let t = DistanceTables::new(&m).map_err(message)?;
    let missing = t
        .non_edges()
        .map(|(i, j)| {
            let (hat, check) = (t.hat_ix(i, j).clone(), t.check_ix(i, j));
            PairInfo {
                pair: t.doubleton(i, j),
                interval: AdmissibleInterval::from_bounds(&check, &hat),
                hat,
                check,
            }
        })
        .collect();
    Ok(Analysis {
        floppy: validation.graph_metric.then(|| t.floppy_report()),
        metric: m,
        validation,
        missing,
    })
}

/// Validation, floppiness and the admissible interval of every missing pair.
pub fn analyze(doc: &str) -> Result<String, String> {
    let m = PartialMetric::from_json(doc).map_err(message)?;
    encode(&analysis(m)?)
}

/// Adds `pair` at the value `lo + (hi - lo) * slider / SLIDER_STEPS`.
pub fn extend_step(doc: &str, pair: &str, slider: u32) -> Result<String, String> {
    if slider >= SLIDER_STEPS {
        return Err(format!("slider must be below {SLIDER_STEPS}"));
    }
    let m = PartialMetric::from_json(doc).map_err(message)?;
    let xy: Doubleton = pair.parse().map_err(message)?;
    let iv = floppy_metric::admissible_interval(&m, &xy).map_err(message)?;
    let frac = Rational::new(i64::from(slider), i64::from(SLIDER_STEPS));
    let r = &iv.lo + &(&(&iv.hi - &iv.lo) * &frac);
    let next = one_step_extend(&m, &xy, &r, Mode::Theorem).map_err(message)?;
    encode(&StepResult {
        pair: xy,
        r,
        analysis: analysis(next)?,
    })
}

/// One full game: the interval strategy against a seeded random opponent.
pub fn play_game(doc: &str, seed: u64) -> Result<String, String> {
    let m = PartialMetric::from_json(doc).map_err(message)?;
    let mut one = WinningPlayerOne::new(&m).map_err(message)?;
    let mut two = RandomPlayerTwo::new(seed, Sampler::Mixed);
    let lambda = m.missing_pairs().len();
    let t = play(&m, lambda, &mut one, &mut two).map_err(message)?;
    encode(&t)
}

/// A sample metric: `cantor`, `path`, `cycle`, `star` or `random`.
pub fn generate(kind: &str, size: u32, seed: u64) -> Result<String, String> {
    let n = size as usize;
    let kind = match kind {
        "cantor" => GenKind::Cantor { depth: size },
        "path" => GenKind::Path { n },
        "cycle" => GenKind::Cycle { n },
        "star" => GenKind::Star { n },
        "random" => GenKind::RandomFloppy {
            n,
            density: Rational::new(1, 2),
            seed,
        },
        other => return Err(format!("unknown generator {other:?}")),
    };
    let m = GenSpec::new(kind).generate().map_err(message)?;
    Ok(m.to_json())
}

#[wasm_bindgen(js_name = analyze)]
pub fn js_analyze(doc: &str) -> Result<String, JsValue> {
    analyze(doc).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = extendStep)]
pub fn js_extend_step(doc: &str, pair: &str, slider: u32) -> Result<String, JsValue> {
    extend_step(doc, pair, slider).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = playGame)]
pub fn js_play_game(doc: &str, seed: u32) -> Result<String, JsValue> {
    play_game(doc, u64::from(seed)).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = generate)]
pub fn js_generate(kind: &str, size: u32, seed: u32) -> Result<String, JsValue> {
    generate(kind, size, u64::from(seed)).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = sliderSteps)]
pub fn js_slider_steps() -> u32 {
    SLIDER_STEPS
}
