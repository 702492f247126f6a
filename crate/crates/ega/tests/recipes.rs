mod common;

use common::{recipe_feature_count, write_replica, REPLICAS};
use ega::pipeline::prepare;
use ega::EgaError;
use ega_core::TaskKind;

#[test]
fn replicas_give_the_documented_column_counts() {
    let dir = tempfile::tempdir().unwrap();
    for &(name, task, want) in REPLICAS {
        let data = write_replica(name, dir.path(), 200, 5);
        assert_eq!(recipe_feature_count(name, task, &data), want, "{name}");
    }
    let loan = dir.path().join("loan_default.csv");
    assert_eq!(
        recipe_feature_count("loan_default_remapped", TaskKind::Classification, &loan),
        76
    );
}

#[test]
fn forest_fire_seasons_and_raw_target() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_replica("forest_fires", dir.path(), 60, 2);
    let p = prepare(&common::recipe_config(
        "forest_fires",
        TaskKind::Regression,
        &data,
        &[2],
        1,
    ))
    .unwrap();
    let names = p.dataset.feature_names();
    for s in [
        "month_winter",
        "month_spring",
        "month_summer",
        "month_autumn",
        "day_sun",
    ] {
        assert!(names.iter().any(|n| n == s), "{s} missing from {names:?}");
    }
    let raw = ega::io::read_dataset(&data).unwrap();
    let area = raw.column_index("area").unwrap();
    assert!((p.dataset.target()[0] - raw.features().get(0, area)).abs() < 1e-12);
}

#[test]
fn uncleaned_auto_mpg_is_rejected_with_the_column_name() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_replica("auto_mpg", dir.path(), 30, 1);
    let text = std::fs::read_to_string(&data).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut cells: Vec<String> = lines[3].split(',').map(str::to_string).collect();
    cells[3] = "?".into();
    lines[3] = cells.join(",");
    std::fs::write(&data, lines.join("\n")).unwrap();
    match prepare(&common::recipe_config(
        "auto_mpg",
        TaskKind::Regression,
        &data,
        &[2],
        1,
    )) {
        Err(EgaError::Config(m)) => assert!(m.contains("horsepower"), "{m}"),
        other => panic!("unexpected {other:?}"),
    }
}
