use proptest::prelude::*;
use sha2::{Digest, Sha256};
use strategic_labor::rc_sgd::SgdConfig;
use strategic_labor::runner::{run_sgd, run_sweep, write_sgd_csv, write_sweep_csv, SGD_HEADER};
use strategic_labor::scenario::{ScenarioConfig, SweepAxis, PRESETS};
use strategic_labor::Error;

#[test]
fn every_preset_round_trips() {
    for (id, _) in PRESETS {
        let cfg = ScenarioConfig::preset(id).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again, "{id}");
        assert_eq!(cfg.hash(), again.hash(), "{id}");
    }
}

#[test]
fn hash_is_sha256_of_a_blob_of_sorted_json() {
    let cfg = ScenarioConfig::preset("thm31-demo").unwrap();
    let json = serde_json::to_string(&serde_json::to_value(&cfg).unwrap()).unwrap();
    let keys = ["\"coate_loury\"", "\"id\"", "\"model\"", "\"numerics\"", "\"seed\""];
    let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0{json}", json.len()));
    assert_eq!(cfg.hash(), hex::encode(h.finalize()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edited_presets_round_trip(
        which in 0..PRESETS.len(),
        seed in any::<u64>(),
        grid in prop::option::of(64usize..4096),
        values in prop::collection::vec(1.0..20.0f64, 0..6),
    ) {
        let mut cfg = ScenarioConfig::preset(PRESETS[which].0).unwrap();
        cfg.seed = seed;
        cfg.numerics.grid_n = grid;
        if let Some(s) = cfg.sweep.as_mut() {
            s.values = values;
        }
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        prop_assert_eq!(&cfg, &again);
    }
}

#[test]
fn unknown_keys_are_named() {
    let cases = [
        ("id = \"x\"\nmodel = \"continuous\"\nsede = 3\n", "sede"),
        ("id = \"x\"\nmodel = \"coate-loury\"\n[coate_loury]\nwage = 1\nreward_pos = 1\npenalty_neg = 1\nskilled = { family = \"power\", exponent = 1 }\nunskilled = { family = \"uniform\" }\ncost = { family = \"cauchy\" }\n", "coate_loury.cost"),
        ("id = \"x\"\nmodel = \"triangle\"\n", "model"),
    ];
    for (doc, key) in cases {
        match ScenarioConfig::parse(doc) {
            Err(Error::Config { key: got, .. }) => assert!(got.starts_with(key), "{got} for {doc}"),
            other => panic!("{other:?} for {doc}"),
        }
    }
}

fn sweep_bytes(cfg: &ScenarioConfig, values: &[f64]) -> Vec<u8> {
    let rows = run_sweep(cfg, SweepAxis::A, values).unwrap();
    let mut out = Vec::new();
    write_sweep_csv(&mut out, &cfg.id, SweepAxis::A, &rows).unwrap();
    out
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let cfg = ScenarioConfig::preset("linear-flat").unwrap();
    let a = sweep_bytes(&cfg, &[1.0, 2.0, 4.0, 8.0]);
    let b = sweep_bytes(&cfg, &[1.0, 2.0, 4.0, 8.0]);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines[0].starts_with("scenario,axis,value,policy,"));
    assert_eq!(lines[1].split(',').take(4).collect::<Vec<_>>(), ["linear-flat", "a", "1", "stable"]);
    assert_eq!(lines[2].split(',').nth(3), Some("optimal"));
    let empty = String::from_utf8(sweep_bytes(&cfg, &[])).unwrap();
    assert_eq!(empty.lines().count(), 1);
}

fn sgd_bytes(cfg: &ScenarioConfig) -> Vec<u8> {
    let trials = run_sgd(cfg).unwrap();
    let mut out = Vec::new();
    write_sgd_csv(&mut out, &cfg.id, &trials).unwrap();
    out
}

#[test]
fn sgd_csv_is_byte_identical_and_seed_sensitive() {
    let mut cfg = ScenarioConfig::preset("sgd-a2w1c5").unwrap();
    cfg.sgd = Some(SgdConfig {
        rounds: 3,
        trials: 3,
        ..cfg.sgd.unwrap()
    });
    let a = sgd_bytes(&cfg);
    assert_eq!(a, sgd_bytes(&cfg));
    let text = String::from_utf8(a.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), SGD_HEADER.join(","));
    // 2 modes x 3 rounds x (3 trials + mean, p05, p95).
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 6);
    cfg.seed = 1;
    assert_ne!(a, sgd_bytes(&cfg));
    cfg.sgd = Some(SgdConfig {
        rounds: 0,
        ..cfg.sgd.unwrap()
    });
    assert_eq!(String::from_utf8(sgd_bytes(&cfg)).unwrap().lines().count(), 1);
}
