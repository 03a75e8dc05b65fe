//! Fixture files and a runner for the `reebdist` binary.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reebdist::io::{write_mesh, MeshFormat};
use reebdist::synthetic;

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reebdist"))
        .args(args)
        .output()
        .expect("reebdist binary runs")
}

pub fn write_scalars(path: &Path, values: &[f64]) {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{v}");
    }
    std::fs::write(path, s).unwrap();
}

/// Input files for every subcommand:
/// - `sphere.off`, `torus.off`: small surfaces;
/// - `a1.txt`, `a2.txt`, `b1.txt`, `b2.txt`, `c1.txt`: scalars on the sphere;
/// - `fields.csv`: the manifest of four bivariate sphere items in two classes;
/// - `sites.csv`: five time-series sites.
pub struct Fixture {
    pub dir: tempfile::TempDir,
}

impl Fixture {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sphere = synthetic::icosphere(2);
        write_mesh(&sphere, p.join("sphere.off"), MeshFormat::Off).unwrap();
        write_mesh(&synthetic::torus(16, 8, 1.0, 0.4), p.join("torus.off"), MeshFormat::Off).unwrap();
        for name in ["a1", "a2", "b1", "b2", "c1"] {
            let f = synthetic::random_smooth_field(&sphere, &mut rng, 3, 2.0);
            write_scalars(&p.join(format!("{name}.txt")), &f);
        }
        let mut manifest = String::from("id,geometry,fields,label\n");
        for (k, class) in ["x", "x", "y", "y"].iter().enumerate() {
            let base = if *class == "x" { 1.0 } else { 3.0 };
            let f: Vec<f64> = sphere.vertices().iter().map(|v| base * v[0] + 0.05 * k as f64 * v[1]).collect();
            let g: Vec<f64> = sphere.vertices().iter().map(|v| v[2] * v[2] + 0.1 * k as f64 * v[0]).collect();
            write_scalars(&p.join(format!("m{k}f.txt")), &f);
            write_scalars(&p.join(format!("m{k}g.txt")), &g);
            let _ = writeln!(manifest, "item{k},sphere.off,m{k}f.txt;m{k}g.txt,{class}");
        }
        std::fs::write(p.join("fields.csv"), manifest).unwrap();
        let mut sites = String::from("id,geometry,fields,label\n");
        for t in 0..5 {
            let f: Vec<f64> = sphere.vertices().iter().map(|v| v[0] + 0.1 * t as f64 * v[1]).collect();
            let g: Vec<f64> = sphere
                .vertices()
                .iter()
                .map(|v| if t < 3 { v[2] } else { v[2] * v[2] })
                .collect();
            write_scalars(&p.join(format!("s{t}f.txt")), &f);
            write_scalars(&p.join(format!("s{t}g.txt")), &g);
            let _ = writeln!(sites, "site{t},sphere.off,s{t}f.txt;s{t}g.txt,");
        }
        std::fs::write(p.join("sites.csv"), sites).unwrap();
        Fixture { dir }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}
