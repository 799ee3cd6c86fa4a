//! The `quatfact` command-line tool.
//!
//! Exit codes: 0 when every check passes, 1 when a structure or residual
//! check fails (including inputs rejected for lacking the required
//! structure), 2 on usage or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::certificate::{residual_report, Certified, Check, ResidualReport};
use crate::embedding::{classify, CMatrix, DEFAULT_TOL};
use crate::error::Error;
use crate::io::MatrixFile;
use crate::jordan::jordan_quaternionic;
use crate::quaternion::qvec_norm;
use crate::quaternionic::{
    diagonalize_commuting_normal, operator_norm_witness, polar_quaternionic, qr_quaternionic, right_eigen_residual,
    right_eigenpairs, right_eigenvalues, schur_commuting, svd_quaternionic,
};
use crate::selfdual::{polar_selfdual, polar_symmetric, schur_selfdual_commuting};
use crate::tensor::{tensor_mixed_dual, verify_tensor_transpose};
use crate::testkit::{
    generate, rank_deficient_quaternionic, singular_selfdual, singular_symmetric, GenSpec, Generated, StructureClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "quatfact", version, about = "Structured factorizations of quaternion matrices")]
struct Cli {
    /// Structural tolerance, relative to max(1, |X|_F).
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for randomized steps (generation, eigenvector deflation).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory receiving factor files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report structure flags and deviations.
    Check {
        file: PathBuf,
        /// Comma-separated flags that must hold, e.g. `quaternionic,unitary`.
        #[arg(long, value_delimiter = ',')]
        expect: Vec<String>,
    },
    /// Joint quaternionic Schur form of commuting quaternionic matrices.
    Schur {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Joint diagonalization of commuting normal quaternionic matrices.
    Diag {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Quaternionic QR decomposition.
    Qr { file: PathBuf },
    /// Quaternionic singular value decomposition.
    Svd { file: PathBuf },
    /// Quaternionic polar decomposition.
    Polar { file: PathBuf },
    /// Polar decomposition of a complex symmetric matrix.
    PolarSymmetric { file: PathBuf },
    /// Polar decomposition of a self-dual matrix.
    PolarSelfdual { file: PathBuf },
    /// Joint Schur form of commuting self-dual matrices.
    SchurSelfdual {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Kramers-paired Jordan form.
    Jordan { file: PathBuf },
    /// Complex right eigenvalues of a quaternion matrix.
    Spectrum { file: PathBuf },
    /// Operator norm of a quaternion matrix.
    Norm { file: PathBuf },
    /// Check the tensor-product identities on a pair of even-dimensional matrices.
    TensorVerify { x: PathBuf, y: PathBuf },
    /// Write seeded random matrices of a structure class.
    Gen {
        /// quaternionic, hermitian-quaternionic, normal-quaternionic, selfdual,
        /// symmetric, symplectic-unitary, commuting-family(k),
        /// selfdual-commuting-family(k)
        #[arg(long)]
        class: String,
        /// Quaternion dimension; matrices are 2n x 2n.
        #[arg(long)]
        n: usize,
        /// Make the matrix singular with (quaternion or half) rank r.
        #[arg(long)]
        rank: Option<usize>,
        /// Write quaternion entries instead of the complex image.
        #[arg(long)]
        quaternion: bool,
    },
}

/// Outcome of a command before it is rendered.
enum Outcome {
    Usage(String),
    Failed(String),
    Report {
        report: ResidualReport,
        extra: Vec<(String, String)>,
        factors: Vec<(String, CMatrix)>,
    },
    Written(Vec<PathBuf>),
}

fn load(path: &Path) -> Result<MatrixFile, Outcome> {
    let text = fs::read_to_string(path).map_err(|e| Outcome::Usage(format!("{}: {e}", path.display())))?;
    MatrixFile::parse(&text).map_err(|e| Outcome::Usage(format!("{}: {e}", path.display())))
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<CMatrix>, Outcome> {
    paths.iter().map(|p| load(p).map(|m| m.to_complex())).collect()
}

fn failed(e: Error) -> Outcome {
    Outcome::Failed(e.to_string())
}

fn report_of(r: &dyn Certified) -> ResidualReport {
    residual_report(r)
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.16e} {:+.16e}i", z.re, z.im)
}

fn diag_matrix(d: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { Complex64::new(0.0, 0.0) })
}

fn execute(cli: &Cli) -> Outcome {
    let tol = cli.tol;
    let seed = cli.seed;
    match &cli.command {
        Command::Check { file, expect } => {
            let x = match load(file) {
                Ok(m) => m.to_complex(),
                Err(o) => return o,
            };
            let r = classify(&x, tol);
            let mut checks = Vec::new();
            for name in expect {
                let name = name.trim();
                match r.rows().iter().find(|row| row.0 == name) {
                    Some(row) => checks.push(Check::new(format!("expect.{name}"), row.2, r.threshold())),
                    None => return Outcome::Usage(format!("--expect: unknown flag `{name}`")),
                }
            }
            let mut extra = vec![
                ("tolerance".to_string(), format!("{:.2e}", r.tolerance)),
                ("threshold".to_string(), format!("{:.2e}", r.threshold())),
            ];
            for (name, flag, dev) in r.rows() {
                extra.push((name.to_string(), format!("{} (deviation {:.2e})", if flag { "yes" } else { "no" }, dev)));
            }
            Outcome::Report {
                report: ResidualReport {
                    kind: "structure".into(),
                    checks,
                },
                extra,
                factors: vec![],
            }
        }
        Command::Schur { files } => {
            let xs = match load_all(files) {
                Ok(x) => x,
                Err(o) => return o,
            };
            match schur_commuting(&xs, tol, seed) {
                Ok(r) => {
                    let mut factors = vec![("U".to_string(), r.u.clone())];
                    for (j, b) in r.blocks.iter().enumerate() {
                        factors.push((format!("T{j}"), b.t.clone()));
                        factors.push((format!("S{j}"), b.s.clone()));
                    }
                    let extra = r
                        .blocks
                        .iter()
                        .enumerate()
                        .map(|(j, b)| (format!("residual.{j}"), format!("{:.2e}", b.residual)))
                        .collect();
                    Outcome::Report {
                        report: report_of(&r),
                        extra,
                        factors,
                    }
                }
                Err(e) => failed(e),
            }
        }
        Command::Diag { files } => {
            let xs = match load_all(files) {
                Ok(x) => x,
                Err(o) => return o,
            };
            match diagonalize_commuting_normal(&xs, tol, seed) {
                Ok(r) => {
                    let mut factors = vec![("U".to_string(), r.u.clone())];
                    let mut extra = Vec::new();
                    for (j, d) in r.diagonals.iter().enumerate() {
                        factors.push((format!("D{j}"), diag_matrix(d)));
                        for (k, z) in d.iter().enumerate() {
                            extra.push((format!("D{j}.{k}"), fmt_complex(*z)));
                        }
                    }
                    Outcome::Report {
                        report: report_of(&r),
                        extra,
                        factors,
                    }
                }
                Err(e) => failed(e),
            }
        }
        Command::Qr { file } => single(file, |x| {
            let r = qr_quaternionic(x, tol)?;
            Ok((report_of(&r), vec![], vec![("Q".into(), r.q.clone()), ("R".into(), r.r.clone())]))
        }),
        Command::Svd { file } => single(file, |x| {
            let r = svd_quaternionic(x, tol, seed)?;
            let extra = r
                .singular_values
                .iter()
                .enumerate()
                .map(|(k, s)| (format!("singular_value.{k}"), format!("{s:.16e}")))
                .collect();
            Ok((
                report_of(&r),
                extra,
                vec![("U".into(), r.u.clone()), ("D".into(), r.d.clone()), ("V".into(), r.v.clone())],
            ))
        }),
        Command::Polar { file } => single(file, |x| polar_outcome(polar_quaternionic(x, tol)?)),
        Command::PolarSymmetric { file } => single(file, |x| polar_outcome(polar_symmetric(x, tol)?)),
        Command::PolarSelfdual { file } => single(file, |x| polar_outcome(polar_selfdual(x, tol)?)),
        Command::SchurSelfdual { files } => {
            let xs = match load_all(files) {
                Ok(x) => x,
                Err(o) => return o,
            };
            match schur_selfdual_commuting(&xs, tol, seed) {
                Ok(r) => {
                    let mut factors = vec![("U".to_string(), r.u.clone())];
                    for (j, b) in r.blocks.iter().enumerate() {
                        factors.push((format!("T{j}"), b.t.clone()));
                        factors.push((format!("C{j}"), b.c.clone()));
                    }
                    Outcome::Report {
                        report: report_of(&r),
                        extra: vec![],
                        factors,
                    }
                }
                Err(e) => failed(e),
            }
        }
        Command::Jordan { file } => single(file, |x| {
            let r = jordan_quaternionic(x, tol)?;
            let mut extra: Vec<(String, String)> = r
                .blocks
                .iter()
                .enumerate()
                .map(|(k, b)| (format!("block.{k}"), format!("{} size {}", fmt_complex(b.eigenvalue), b.size)))
                .collect();
            extra.push(("condition".into(), format!("{:.2e}", r.condition)));
            Ok((report_of(&r), extra, vec![("S".into(), r.s.clone()), ("J".into(), r.j.clone())]))
        }),
        Command::Spectrum { file } => {
            let q = match load(file) {
                Ok(m) => match m.to_quaternion(tol) {
                    Ok(q) => q,
                    Err(e) => return failed(e),
                },
                Err(o) => return o,
            };
            let values = match right_eigenvalues(&q) {
                Ok(v) => v,
                Err(e) => return failed(e),
            };
            let pairs = match right_eigenpairs(&q) {
                Ok(p) => p,
                Err(e) => return failed(e),
            };
            let worst = pairs
                .iter()
                .map(|p| right_eigen_residual(&q, p).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max);
            let extra = values
                .iter()
                .enumerate()
                .map(|(k, z)| (format!("eigenvalue.{k}"), fmt_complex(*z)))
                .collect();
            Outcome::Report {
                report: ResidualReport {
                    kind: "right-eigenvalues".into(),
                    checks: vec![Check::new("eigenpair.residual", worst, 1e-9)],
                },
                extra,
                factors: vec![],
            }
        }
        Command::Norm { file } => {
            let q = match load(file) {
                Ok(m) => match m.to_quaternion(tol) {
                    Ok(q) => q,
                    Err(e) => return failed(e),
                },
                Err(o) => return o,
            };
            let (sigma, v) = match operator_norm_witness(&q) {
                Ok(r) => r,
                Err(e) => return failed(e),
            };
            let attained = q.mul_vec(&v).map(|qv| qvec_norm(&qv) / qvec_norm(&v)).unwrap_or(f64::NAN);
            let gap = (attained - sigma).abs() / sigma.max(f64::MIN_POSITIVE);
            Outcome::Report {
                report: ResidualReport {
                    kind: "operator-norm".into(),
                    checks: vec![Check::new("witness.relative_gap", if sigma == 0.0 { 0.0 } else { gap }, 1e-9)],
                },
                extra: vec![("norm".into(), format!("{sigma:.16e}"))],
                factors: vec![],
            }
        }
        Command::TensorVerify { x, y } => {
            let (x, y) = match (load(x), load(y)) {
                (Ok(x), Ok(y)) => (x.to_complex(), y.to_complex()),
                (Err(o), _) | (_, Err(o)) => return o,
            };
            let scale = x.norm().max(1.0) * y.norm().max(1.0);
            let t = match verify_tensor_transpose(&x, &y) {
                Ok(v) => v,
                Err(e) => return failed(e),
            };
            let m = match tensor_mixed_dual(&x, &y) {
                Ok(v) => v,
                Err(e) => return failed(e),
            };
            Outcome::Report {
                report: ResidualReport {
                    kind: "tensor-identities".into(),
                    checks: vec![
                        Check::new("transpose.relative", t / scale, 1e-11),
                        Check::new("mixed_dual.relative", m / scale, 1e-12),
                    ],
                },
                extra: vec![],
                factors: vec![],
            }
        }
        Command::Gen {
            class,
            n,
            rank,
            quaternion,
        } => gen(cli, class, *n, *rank, *quaternion),
    }
}

type Single = (ResidualReport, Vec<(String, String)>, Vec<(String, CMatrix)>);

fn single(file: &Path, f: impl FnOnce(&CMatrix) -> crate::error::Result<Single>) -> Outcome {
    let x = match load(file) {
        Ok(m) => m.to_complex(),
        Err(o) => return o,
    };
    match f(&x) {
        Ok((report, extra, factors)) => Outcome::Report {
            report,
            extra,
            factors,
        },
        Err(e) => failed(e),
    }
}

fn polar_outcome(r: crate::quaternionic::PolarResult) -> crate::error::Result<Single> {
    Ok((
        report_of(&r),
        vec![],
        vec![("U".into(), r.u.clone()), ("P".into(), r.p.clone()), ("W".into(), r.w.clone())],
    ))
}

fn gen(cli: &Cli, class: &str, n: usize, rank: Option<usize>, quaternion: bool) -> Outcome {
    let Some(class) = StructureClass::parse(class) else {
        return Outcome::Usage(format!("--class: unknown structure class `{class}`"));
    };
    if n == 0 {
        return Outcome::Usage("--n: must be at least 1".into());
    }
    let Some(dir) = &cli.out else {
        return Outcome::Usage("--out: gen needs an output directory".into());
    };
    let generated = match rank {
        None => generate(&GenSpec {
            n,
            class,
            seed: cli.seed,
        }),
        Some(r) => match class {
            StructureClass::Quaternionic => Generated::Matrix(rank_deficient_quaternionic(n, r, cli.seed)),
            StructureClass::SelfDual => Generated::Matrix(singular_selfdual(n, r, cli.seed)),
            StructureClass::Symmetric => Generated::Matrix(singular_symmetric(2 * n, r, cli.seed)),
            _ => return Outcome::Usage(format!("--rank: not supported for class `{}`", class.name())),
        },
    };
    let family = matches!(generated, Generated::Family(_));
    let mut written = Vec::new();
    if let Err(e) = fs::create_dir_all(dir) {
        return Outcome::Usage(format!("--out: {}: {e}", dir.display()));
    }
    for (k, x) in generated.into_matrices().into_iter().enumerate() {
        let file = if quaternion {
            match crate::embedding::chi_inv(&x, cli.tol) {
                Ok(q) => MatrixFile::Quaternion(q),
                Err(_) => {
                    return Outcome::Usage(format!("--quaternion: class `{}` is not quaternionic", class.name()))
                }
            }
        } else {
            MatrixFile::Complex(x)
        };
        let name = if family { format!("matrix_{k}.qm") } else { "matrix.qm".to_string() };
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, file.serialize()) {
            return Outcome::Usage(format!("--out: {}: {e}", path.display()));
        }
        written.push(path);
    }
    Outcome::Written(written)
}

fn render(cli: &Cli, outcome: Outcome, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    match outcome {
        Outcome::Usage(msg) => {
            writeln!(err, "error: {msg}")?;
            Ok(2)
        }
        Outcome::Failed(msg) => {
            match cli.format {
                Format::Text => writeln!(out, "failed: {msg}")?,
                Format::Machine => writeln!(out, "error={msg}\npassed=false")?,
            }
            Ok(1)
        }
        Outcome::Written(paths) => {
            for p in paths {
                match cli.format {
                    Format::Text => writeln!(out, "wrote {}", p.display())?,
                    Format::Machine => writeln!(out, "file={}", p.display())?,
                }
            }
            Ok(0)
        }
        Outcome::Report {
            report,
            extra,
            factors,
        } => {
            if let Some(dir) = &cli.out {
                if let Err(e) = fs::create_dir_all(dir) {
                    writeln!(err, "error: --out: {}: {e}", dir.display())?;
                    return Ok(2);
                }
                for (name, m) in &factors {
                    let path = dir.join(format!("{name}.qm"));
                    if let Err(e) = fs::write(&path, MatrixFile::Complex(m.clone()).serialize()) {
                        writeln!(err, "error: --out: {}: {e}", path.display())?;
                        return Ok(2);
                    }
                }
            }
            match cli.format {
                Format::Text => {
                    for (k, v) in &extra {
                        writeln!(out, "{k}: {v}")?;
                    }
                    write!(out, "{report}")?;
                    writeln!(out, "{}", if report.all_passed() { "PASS" } else { "FAIL" })?;
                }
                Format::Machine => {
                    for (k, v) in &extra {
                        writeln!(out, "{k}={v}")?;
                    }
                    write!(out, "{}", report.to_machine())?;
                }
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let outcome = execute(&cli);
    render(&cli, outcome, out, err).unwrap_or(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["quatfact"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    #[test]
    fn check_z() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "z.qm", "quatmat 1\nkind complex\nrows 2\ncols 2\nentries\n0 0\n1 0\n-1 0\n0 0\n");
        let (code, out, _) = call(&["check", &f, "--expect", "quaternionic,symplectic,unitary"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("quaternionic: yes"));
        assert!(out.contains("symplectic: yes"));
        let (code, _, _) = call(&["check", &f, "--expect", "hermitian"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn spectrum_of_j() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "j.qm", "quatmat 1\nkind quaternion\nrows 1\ncols 1\nentries\n0 0 1 0\n");
        let (code, out, _) = call(&["spectrum", &f]);
        assert_eq!(code, 0);
        let values: Vec<Complex64> = out
            .lines()
            .filter_map(|l| l.strip_prefix("eigenvalue."))
            .map(|l| {
                let parts: Vec<&str> = l.split_whitespace().collect();
                let im = parts[2].trim_end_matches('i');
                Complex64::new(parts[1].parse().unwrap(), im.parse().unwrap())
            })
            .collect();
        assert_eq!(values.len(), 2, "{out}");
        assert!((values[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((values[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn malformed_entry_count() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "bad.qm", "quatmat 1\nkind complex\nrows 2\ncols 2\nentries\n1 0\n0 0\n0 1\n");
        let (code, _, err) = call(&["qr", &f]);
        assert_eq!(code, 2);
        assert!(err.contains("entries") && err.contains("entry count 3"), "{err}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["qr"]).0, 2);
        assert_eq!(call(&["gen", "--class", "bogus", "--n", "2", "--out", "/tmp"]).0, 2);
    }

    #[test]
    fn structure_failure_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(dir.path(), "d.qm", "quatmat 1\nkind complex\nrows 2\ncols 2\nentries\n1 0\n0 0\n0 0\n2 0\n");
        let (code, out, _) = call(&["qr", &f]);
        assert_eq!(code, 1);
        assert!(out.contains("not quaternionic"));
    }

    #[test]
    fn gen_then_factor() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_string_lossy().into_owned();
        let (code, out, _) = call(&["gen", "--class", "quaternionic", "--n", "3", "--seed", "4", "--out", &d]);
        assert_eq!(code, 0, "{out}");
        let f = dir.path().join("matrix.qm").to_string_lossy().into_owned();
        let fdir = dir.path().join("factors").to_string_lossy().into_owned();
        let (code, out, _) = call(&["svd", &f, "--out", &fdir, "--format", "machine"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("passed=true"));
        assert!(dir.path().join("factors/U.qm").exists());
    }
}
