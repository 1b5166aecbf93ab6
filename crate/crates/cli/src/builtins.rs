//! Scenario files shipped inside the binary.

const BUILTINS: &[(&str, &str)] = &[
    ("darboux", include_str!("../scenarios/darboux.json")),
    ("angular-momentum", include_str!("../scenarios/angular-momentum.json")),
    ("conformal-symplectic", include_str!("../scenarios/conformal-symplectic.json")),
    ("so3-cartan", include_str!("../scenarios/so3-cartan.json")),
    ("abelian-cartan", include_str!("../scenarios/abelian-cartan.json")),
];

pub const NAMES: [&str; 5] = ["darboux", "angular-momentum", "conformal-symplectic", "so3-cartan", "abelian-cartan"];

pub fn get(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
