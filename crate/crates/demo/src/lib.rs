//! Browser bindings: generate an instance, solve it, and decide it exactly.
//! Every function takes and returns JSON text.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rainbow_ham::gen::{build_extremal, random_instance, BuilderKind, GenSpec, Model};
use rainbow_ham::model::sigma2_of;
use rainbow_ham::oracle::{exact_rainbow_ham_cycle, exact_rainbow_ham_path, Decision, OracleBudget, OracleOptions};
use rainbow_ham::solver::{solve, solve_pair};
use rainbow_ham::Instance;

/// Node budget for in-browser exact search.
const DEMO_NODES: u64 = 20_000_000;

fn parse(text: &str) -> Result<Instance, String> {
    Instance::from_json_str(text).map_err(|e| e.to_string())
}

/// `family` is `random`, `b2`, `b3`, `c2`, `c3` or `dirac`.
pub fn generate_json(family: &str, n: usize, k: usize, p: f64, seed: u64) -> Result<String, String> {
    let inst = if family == "random" {
        let spec = GenSpec {
            n,
            k,
            model: Model::UniformSupergraph { p },
            seed,
        };
        random_instance(&spec).map_err(|e| e.to_string())?
    } else {
        let kind: BuilderKind = family.parse().map_err(|e: rainbow_ham::Error| e.to_string())?;
        build_extremal(kind, n, k).map_err(|e| e.to_string())?.instance
    };
    Ok(inst.to_json_string())
}

/// The instance's per-color Ore sums and whether the hypothesis holds.
pub fn describe_json(instance: &str) -> Result<String, String> {
    let inst = parse(instance)?;
    let c = &inst.collection;
    let sums: Vec<String> = c.graphs().iter().map(|g| sigma2_of(g).to_string()).collect();
    let holds = c.check_hypothesis(inst.k).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": c.vertex_count(),
        "m": c.color_count(),
        "k": inst.k,
        "u": inst.u,
        "v": inst.v,
        "sigma2": sums,
        "bound": c.vertex_count() + inst.k,
        "hypothesis": holds,
    })
    .to_string())
}

pub fn solve_json(instance: &str) -> Result<String, String> {
    let inst = parse(instance)?;
    let sol = if inst.k == 0 && inst.forest.is_empty() {
        solve_pair(&inst.collection, inst.u, inst.v)
    } else {
        solve(&inst.collection, &inst.forest, inst.u, inst.v, inst.k)
    }
    .map_err(|e| e.to_string())?;
    let mut out = sol.to_json();
    if let Some(map) = out.as_object_mut() {
        map.remove("trace");
    }
    Ok(out.to_string())
}

/// Exhaustive search for the instance's `u,v`-path, or for a rainbow
/// Hamiltonian cycle when `cycle` is set.
pub fn oracle_json(instance: &str, cycle: bool) -> Result<String, String> {
    let inst = parse(instance)?;
    if inst.collection.vertex_count() > 12 {
        return Err("exact search in the browser is limited to 12 vertices".into());
    }
    let opts = OracleOptions {
        budget: OracleBudget::nodes(DEMO_NODES),
        ..OracleOptions::default()
    };
    let (label, cert): (&str, Value) = if cycle {
        let (d, _) = exact_rainbow_ham_cycle(&inst.collection, &opts).map_err(|e| e.to_string())?;
        let cert = match &d {
            Decision::Found(c) => json!(c),
            _ => Value::Null,
        };
        (d.label(), cert)
    } else {
        let (d, _) = exact_rainbow_ham_path(&inst.collection, inst.u, inst.v, &inst.forest, &opts)
            .map_err(|e| e.to_string())?;
        let cert = match &d {
            Decision::Found(c) => json!(c),
            _ => Value::Null,
        };
        (d.label(), cert)
    };
    Ok(json!({ "decision": label, "certificate": cert }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn generate(family: &str, n: usize, k: usize, p: f64, seed: u32) -> Result<String, JsValue> {
    js(generate_json(family, n, k, p, u64::from(seed)))
}

#[wasm_bindgen]
pub fn describe(instance: &str) -> Result<String, JsValue> {
    js(describe_json(instance))
}

#[wasm_bindgen(js_name = solveInstance)]
pub fn solve_instance(instance: &str) -> Result<String, JsValue> {
    js(solve_json(instance))
}

#[wasm_bindgen]
pub fn oracle(instance: &str, cycle: bool) -> Result<String, JsValue> {
    js(oracle_json(instance, cycle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(text: &str, key: &str) -> Value {
        serde_json::from_str::<Value>(text).unwrap()[key].clone()
    }

    #[test]
    fn random_instance_solves_to_a_path() {
        let inst = generate_json("random", 10, 2, 0.5, 3).unwrap();
        assert_eq!(field(&describe_json(&inst).unwrap(), "hypothesis"), true);
        assert_eq!(field(&solve_json(&inst).unwrap(), "outcome"), "path");
        assert_eq!(field(&oracle_json(&inst, false).unwrap(), "decision"), "found");
    }

    #[test]
    fn blocked_build_is_certified() {
        let inst = generate_json("b2", 6, 0, 0.0, 0).unwrap();
        let out = solve_json(&inst).unwrap();
        assert_eq!(field(&out, "outcome"), "extremal");
        assert_eq!(field(&out, "certificate")["kind"], "B2");
        assert_eq!(field(&oracle_json(&inst, false).unwrap(), "decision"), "not_found");
        assert_eq!(field(&oracle_json(&inst, true).unwrap(), "decision"), "found");
    }

    #[test]
    fn errors_are_messages() {
        assert!(generate_json("b3", 5, 0, 0.0, 0).is_err());
        assert!(solve_json("not json").is_err());
        let dirac = generate_json("dirac", 7, 0, 0.0, 0).unwrap();
        assert!(solve_json(&dirac).unwrap_err().contains("precondition"));
    }
}
