// SPDX-License-Identifier: Apache-2.0

//! The shipped worked examples.

use crate::error::CliError;
use crate::scenario::Scenario;

pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    /// Runnable scenarios, each a JSON file under `scenarios/`.
    pub variants: &'static [(&'static str, &'static str)],
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "ex51",
        summary: "ball source fixed point: volume root, linearized stability, return to rest",
        variants: &[("ex51", include_str!("../scenarios/ex51.json"))],
    },
    Builtin {
        name: "ex52",
        summary: "nilpotent B: comparison pair (V, W1) dominates the orbit",
        variants: &[("ex52", include_str!("../scenarios/ex52.json"))],
    },
    Builtin {
        name: "ex53",
        summary: "mixed-area chains: closed-form area (k=2), cubic threshold (k=3), segment instability (k=4)",
        variants: &[
            ("ex53_k2", include_str!("../scenarios/ex53_k2.json")),
            ("ex53_k4_instability", include_str!("../scenarios/ex53_k4_instability.json")),
        ],
    },
    Builtin {
        name: "ex54",
        summary: "practical (lambda, A, T) stability of D_H u = Bu, closed-form mu values against eigenvalues",
        variants: &[("ex54", include_str!("../scenarios/ex54.json"))],
    },
    Builtin {
        name: "ex55",
        summary: "instability in (V, V) under a ball source",
        variants: &[("ex55", include_str!("../scenarios/ex55.json"))],
    },
];

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().flat_map(|b| b.variants.iter().map(|(n, _)| *n))
}

pub fn source(name: &str) -> Option<&'static str> {
    BUILTINS
        .iter()
        .flat_map(|b| b.variants.iter())
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn scenario(name: &str) -> Option<Result<Scenario, CliError>> {
    source(name).map(Scenario::from_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_entries_and_all_variants_parse() {
        assert_eq!(BUILTINS.len(), 5);
        for name in scenario_names() {
            let s = scenario(name).unwrap().unwrap();
            assert_eq!(s.name, name);
        }
        assert_eq!(scenario_names().count(), 6);
        assert!(scenario("ex56").is_none());
    }
}
