//! Browser bindings. Every export takes and returns JSON text; failures come
//! back as `{"ok": false, "error": {...}}` rather than exceptions.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use eqcohom::fixtures::{self, Fixture, FIXTURE_NAMES};
use eqcohom::graph::{analyze_graph_action, Graph, GraphAction};
use eqcohom::instance::LinearInstance;
use eqcohom::periodic::{lifted_potential, window, PeriodicGraph};
use eqcohom::report::{analyze_instance as analyze, analyze_periodic, EdgeCochain};

/// Largest window radius the page will draw.
pub const MAX_RADIUS: u32 = 6;

fn ok<T: Serialize>(result: &T) -> String {
    json!({ "ok": true, "result": result }).to_string()
}

fn err(kind: &str, message: impl std::fmt::Display) -> String {
    json!({ "ok": false, "error": { "kind": kind, "message": message.to_string() } }).to_string()
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| err("parse", format!("{what}: {e}")))
}

#[wasm_bindgen]
pub fn fixture_names() -> String {
    json!(FIXTURE_NAMES).to_string()
}

/// Fixture documents as pretty JSON strings keyed by role.
#[wasm_bindgen]
pub fn fixture(name: &str) -> String {
    match fixtures::by_name(name) {
        Err(e) => err("unknown_fixture", e),
        Ok(Fixture::Instance(inst)) => {
            ok(&json!({ "kind": "instance", "instance": pretty(&inst) }))
        }
        Ok(Fixture::Graph(g, a)) => {
            ok(&json!({ "kind": "graph", "graph": pretty(&g), "action": pretty(&a) }))
        }
        Ok(Fixture::Periodic(pg, w)) => {
            ok(&json!({ "kind": "periodic", "pgraph": pretty(&pg), "w": pretty(&w) }))
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixtures serialize")
}

#[wasm_bindgen]
pub fn analyze_instance(instance_json: &str) -> String {
    let inst: LinearInstance = match parse("instance", instance_json) {
        Ok(i) => i,
        Err(e) => return e,
    };
    match analyze(&inst) {
        Ok(a) => {
            let assertions: Vec<Value> = a
                .assertions()
                .into_iter()
                .map(|(name, passed)| json!({ "name": name, "passed": passed }))
                .collect();
            json!({ "ok": true, "result": a, "assertions": assertions }).to_string()
        }
        Err(report) => json!({
            "ok": false,
            "error": { "kind": "validation", "message": report.to_string(), "issues": report.issues },
        })
        .to_string(),
    }
}

#[wasm_bindgen]
pub fn analyze_graph(graph_json: &str, action_json: &str) -> String {
    let parsed = parse::<Graph>("graph", graph_json)
        .and_then(|g| Ok((g, parse::<GraphAction>("action", action_json)?)));
    match parsed {
        Err(e) => e,
        Ok((g, a)) => match analyze_graph_action(&g, &a) {
            Ok(r) => ok(&r),
            Err(e) => err("validation", e),
        },
    }
}

#[derive(Debug, Serialize)]
struct LiftVertex {
    v: usize,
    cell: Vec<i64>,
    potential: String,
}

#[derive(Debug, Serialize)]
struct LiftEdge {
    id: u64,
    from: (usize, Vec<i64>),
    to: (usize, Vec<i64>),
    value: String,
}

/// Decomposition of `w` plus the lift restricted to the window of the given
/// radius, for drawing.
#[wasm_bindgen]
pub fn decompose_periodic(pgraph_json: &str, w_json: &str, radius: u32) -> String {
    if radius > MAX_RADIUS {
        return err("argument", format!("radius must be at most {MAX_RADIUS}"));
    }
    let pg: PeriodicGraph = match parse("periodic graph", pgraph_json) {
        Ok(p) => p,
        Err(e) => return e,
    };
    let w = match parse::<EdgeCochain>("w", w_json)
        .and_then(|c| c.resolve(&pg.quotient).map_err(|m| err("validation", m)))
    {
        Ok(w) => w,
        Err(e) => return e,
    };
    let analysis = match analyze_periodic(&pg, &w, radius) {
        Ok(a) => a,
        Err(e) if e.is_precondition() => return err("precondition", e),
        Err(e) => return err("validation", e),
    };
    let dec = &analysis.decomposition;
    let comp = pg.quotient.component_of();
    let cells = window(pg.d, radius);
    let vertices: Vec<LiftVertex> = cells
        .iter()
        .flat_map(|cell| {
            (0..pg.quotient.n_vertices).map(|v| LiftVertex {
                v,
                cell: cell.clone(),
                potential: lifted_potential(&dec.a, &dec.f, comp[v], v, cell).to_string(),
            })
        })
        .collect();
    let r = radius as i64;
    let edges: Vec<LiftEdge> = cells
        .iter()
        .flat_map(|cell| {
            pg.quotient
                .edges
                .iter()
                .zip(&pg.voltages)
                .zip(&w)
                .filter_map(move |((e, t), we)| {
                    let target: Vec<i64> = cell.iter().zip(t).map(|(b, s)| b + s).collect();
                    target.iter().all(|x| x.abs() <= r).then(|| LiftEdge {
                        id: e.id,
                        from: (e.o, cell.clone()),
                        to: (e.t, target),
                        value: we.to_string(),
                    })
                })
        })
        .collect();
    json!({
        "ok": true,
        "result": analysis,
        "lift": { "d": pg.d, "radius": radius, "vertices": vertices, "edges": edges },
    })
    .to_string()
}
