//! Prints a generated scenario: `cargo run --example gen_scenario -- [seed]`.

fn main() {
    let seed = std::env::args().nth(1).map_or(42, |s| s.parse().expect("seed must be an integer"));
    let s = v2x_core::sim::Scenario::generate(&v2x_core::sim::GeneratorParams::default(), seed);
    print!("{}", v2x_core::io::scenario_to_toml(&s).expect("scenario serializes"));
}
