//! Run manifests: config echo, per-output content hashes, stage timings.

use serde_json::json;
use std::collections::BTreeMap;

/// FNV-1a 64-bit content hash, stable across platforms.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Accumulates outputs and stage timings, then serializes to JSON.
pub struct Manifest {
    config_echo: BTreeMap<String, String>,
    outputs: Vec<(String, usize, u64)>,
    stages: Vec<(String, f64)>,
}

impl Manifest {
    pub fn new(config_echo: BTreeMap<String, String>) -> Self {
        Manifest {
            config_echo,
            outputs: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn record_output(&mut self, name: &str, content: &[u8]) {
        self.outputs.push((name.to_string(), content.len(), fnv1a64(content)));
    }

    pub fn record_stage(&mut self, name: &str, seconds: f64) {
        self.stages.push((name.to_string(), seconds));
    }

    pub fn to_json(&self) -> String {
        let outputs: Vec<_> = self
            .outputs
            .iter()
            .map(|(name, bytes, hash)| {
                json!({ "path": name, "bytes": bytes, "fnv1a64": format!("{hash:016x}") })
            })
            .collect();
        let stages: Vec<_> = self
            .stages
            .iter()
            .map(|(name, secs)| json!({ "stage": name, "seconds": secs }))
            .collect();
        serde_json::to_string_pretty(&json!({
            "library_version": env!("CARGO_PKG_VERSION"),
            "config": self.config_echo,
            "outputs": outputs,
            "stages": stages,
        }))
        .expect("manifest serialization")
    }
}
