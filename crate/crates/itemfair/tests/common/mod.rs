#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_itemfair"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// `k` examinees with evenly spread ability; `ideal` columns score exactly g,
/// then one column per extra value in `extra`.
pub fn ideal_csv(k: usize, ideal: usize, extra: &[fn(f64) -> f64]) -> String {
    let mut s = String::new();
    let n = ideal + extra.len();
    let header: Vec<String> = (1..=n).map(|i| format!("i{i}")).collect();
    let _ = writeln!(s, ",{}", header.join(","));
    for e in 0..k {
        let g = e as f64 / (k - 1) as f64;
        let mut cells: Vec<String> = (0..ideal).map(|_| format!("{g}")).collect();
        cells.extend(extra.iter().map(|f| format!("{}", f(g))));
        let _ = writeln!(s, "s{},{}", e + 1, cells.join(","));
    }
    s
}

pub fn write(dir: &Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

pub fn items_json(items: &[(f64, f64, f64, f64)]) -> String {
    let body: Vec<String> = items
        .iter()
        .map(|(a, b, c, cap)| format!(r#"{{"a":{a},"b":{b},"c":{c},"cap":{cap}}}"#))
        .collect();
    format!("[{}]", body.join(","))
}
