//! Fixtures shared by the criterion benches.

use rcjs_core::instance::generate_instance;
use rcjs_core::{GenConfig, Instance};

/// Instance with the default generator settings (about 10.5 jobs per machine).
pub fn desk_instance(machines: usize, seed: u64) -> Instance {
    generate_instance(&GenConfig::new(machines, 0.3, 0.5, seed)).expect("valid generator settings")
}

pub fn desk_set(machines: usize, count: u64, base_seed: u64) -> Vec<Instance> {
    (0..count)
        .map(|s| desk_instance(machines, base_seed + s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(
            desk_set(2, 3, 5)
                .iter()
                .map(Instance::len)
                .collect::<Vec<_>>(),
            desk_set(2, 3, 5)
                .iter()
                .map(Instance::len)
                .collect::<Vec<_>>()
        );
        assert_eq!(desk_instance(3, 1).machines(), 3);
    }
}
