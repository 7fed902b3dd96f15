//! Model sources compiled into the library: the three application-stage
//! models, the host node machine model, and the catalog files its includes
//! refer to. The same files ship on disk under `models/` for editing.

pub const STAGE1_MODEL: &str = include_str!("../../models/stage1.aspen");
pub const STAGE2_MODEL: &str = include_str!("../../models/stage2.aspen");
pub const STAGE3_MODEL: &str = include_str!("../../models/stage3.aspen");
pub const NODE_MACHINE: &str = include_str!("../../models/simple_node.aspen");

const CATALOG: &[(&str, &str)] = &[
    (
        "memory/ddr3_1066.aspen",
        include_str!("../../models/memory/ddr3_1066.aspen"),
    ),
    (
        "memory/gddr5.aspen",
        include_str!("../../models/memory/gddr5.aspen"),
    ),
    ("links/pcie.aspen", include_str!("../../models/links/pcie.aspen")),
    (
        "sockets/intel_xeon_e5_2680.aspen",
        include_str!("../../models/sockets/intel_xeon_e5_2680.aspen"),
    ),
    (
        "sockets/nvidia_m2090.aspen",
        include_str!("../../models/sockets/nvidia_m2090.aspen"),
    ),
    (
        "sockets/dwave_vesuvius_20.aspen",
        include_str!("../../models/sockets/dwave_vesuvius_20.aspen"),
    ),
];

/// Bundled fallback for include resolution; keys use forward slashes.
pub fn bundled_include(path: &str) -> Option<&'static str> {
    CATALOG
        .iter()
        .find(|(name, _)| *name == path)
        .map(|(_, text)| *text)
}
