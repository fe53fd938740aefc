//! The on-disk formats: write a model file, validate it, hash it, and
//! store a policy stamped with the hash of the model it was built for.
//!
//! ```bash
//! cargo run --example model_files
//! ```

use ssp_lab::io;
use ssp_lab::model::AnySsp;
use ssp_lab::rollout::greedy_policy;
use ssp_lab::scenarios::{sharpness_chain, SharpnessSpec};

fn main() {
    let dir = std::env::temp_dir().join("ssp-lab-model-files");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let inst = sharpness_chain(&SharpnessSpec { m: 3, eps: 0.1 }).unwrap();
    let model_path = dir.join("chain.json");
    io::save_model(&AnySsp::Kernel(inst.model.clone()), &model_path).unwrap();
    println!("wrote {}", model_path.display());

    let loaded = io::load_model(&model_path).unwrap();
    let report = loaded.validate();
    println!("validation: {report}");
    assert!(report.is_valid());

    let hash = io::kernel_hash(&inst.model);
    println!("model hash: {hash}");

    let (pi, _) = greedy_policy(&inst.model, &inst.surrogate);
    let policy_path = dir.join("rollout_policy.json");
    io::save_policy(&pi, &hash, &policy_path).unwrap();
    let stored = io::load_policy(&policy_path).unwrap();
    println!(
        "policy file: actions {:?} stamped with {}...",
        stored.actions,
        &stored.model_hash[..12]
    );
    assert_eq!(stored.model_hash, hash);

    let values_path = dir.join("surrogate.json");
    io::save_values(&inst.surrogate, &values_path).unwrap();
    let raw = io::load_values(&values_path).unwrap();
    println!("value file round-trip: {raw:?}");
    assert_eq!(raw, inst.surrogate.values());

    // The model file is the canonical serialization, so a reload hashes
    // identically.
    match io::load_model(&model_path).unwrap() {
        AnySsp::Kernel(m) => assert_eq!(io::kernel_hash(&m), hash),
        _ => unreachable!(),
    }
    println!("reload hashes identically.");
}
