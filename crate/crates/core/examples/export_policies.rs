//! Export the shipped policy configurations as policy documents, plus the
//! output-table variant in which the low execution may write high
//! channels. Regenerates `fixtures/policies/`.
//!
//! Usage: `cargo run -p multex-core --example export_policies -- <dir>`

use multex_core::em::config::{PrivCell, TableTemplate};
use multex_core::policies::{builtin_policy, ni_policy, PolicyDoc, BUILTIN_POLICY_NAMES};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "fixtures/policies".to_string());
    std::fs::create_dir_all(&dir).expect("create output directory");
    for name in BUILTIN_POLICY_NAMES {
        let config = builtin_policy(name).expect("builtin");
        let doc = PolicyDoc::from_config(&config);
        let path = format!("{dir}/{name}.policy.json");
        std::fs::write(&path, doc.to_json() + "\n").expect("write policy file");
        println!("wrote {path}");
    }

    // Variant output table: the low execution may also send to high
    // channels. Kept as a documented table variant, not a named policy.
    let mut variant = ni_policy();
    variant.name = "ni-low-to-high-output".to_string();
    variant.description = "NI with a relaxed output table: the low execution \
                           can send output items to high channels as well"
        .to_string();
    variant.t_r = TableTemplate::from_levels(
        vec![PrivCell::ASK_TELL, PrivCell::ASK_TELL],
        vec![PrivCell::NONE, PrivCell::ASK_TELL],
    );
    let doc = PolicyDoc::from_config(&variant);
    let path = format!("{dir}/ni-low-to-high-output.policy.json");
    std::fs::write(&path, doc.to_json() + "\n").expect("write policy file");
    println!("wrote {path}");
}
