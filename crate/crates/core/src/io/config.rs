//! INI-style run configuration.
//!
//! Grammar: `[section]` headers, `key = value` lines, `#` comments and blank
//! lines. Sections are `problem`, `mesh`, `scheme` and `output`; every key is
//! optional unless noted.
//!
//! ```text
//! [problem]
//! kind = table2          # table1..table4, custom, obstacle, decay (required)
//! level = 8              # manufactured kinds: h = dt = nu_T = 1/level, T = 1
//! levels = 8,16,32       # convergence levels (default: level)
//! a = 1                  # custom only (required), with nu1 / nu2 in [scheme]
//! seed = 1               # decay only
//!
//! [mesh]
//! type = squares         # squares, obstacle or gmsh
//! n = 8                  # squares: cells per side (default: level)
//! m = 14                 # obstacle: cells per unit length
//! upper = up.msh         # gmsh: one file per subdomain
//! lower = low.msh
//!
//! [scheme]
//! variant = SAV          # SAV or AV
//! nu1, nu2, nu_t1, nu_t2, nu_t, kappa, dt, final_time
//! subgrid_degree = 1     # 0 or 1
//! picard_tol = 1e-9
//! picard_max = 50
//!
//! [output]
//! dir = out
//! snapshot_times = 2,4,5
//! probe = 1.75, 0.5
//! energy_monitor = false
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{ManufacturedParams, ManufacturedProblem, TablePreset};
use crate::mesh::{default_tag_table, import_gmsh, obstacle_meshes, CoupledMesh, Point};
use crate::scheme::{DecayProblem, ObstacleProblem, Probe, Problem, SchemeConfig, Variant};
use crate::{Error, Result};

const SECTIONS: [(&str, &[&str]); 4] = [
    ("problem", &["kind", "level", "levels", "a", "seed"]),
    ("mesh", &["type", "n", "m", "upper", "lower"]),
    (
        "scheme",
        &[
            "variant",
            "nu1",
            "nu2",
            "nu_t",
            "nu_t1",
            "nu_t2",
            "kappa",
            "dt",
            "final_time",
            "subgrid_degree",
            "picard_tol",
            "picard_max",
        ],
    ),
    ("output", &["dir", "snapshot_times", "probe", "energy_monitor"]),
];

/// Obstacle defaults: resolution, time step, eddy viscosity, final time, probe.
pub const OBSTACLE_RESOLUTION: usize = 14;
pub const OBSTACLE_NU: [f64; 2] = [1e-3, 1.0];
pub const OBSTACLE_DT: f64 = 0.01;
pub const OBSTACLE_NU_T: f64 = 0.01;
pub const OBSTACLE_FINAL_TIME: f64 = 20.0;
pub const OBSTACLE_PROBE: Point = [1.75, 0.5];

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemKind {
    /// One of the four numbered manufactured setups.
    Table(u8),
    /// Manufactured solution with user parameters.
    Custom(ManufacturedParams),
    Obstacle,
    /// Unforced decay from seeded random data.
    Decay { seed: u64 },
}

impl ProblemKind {
    pub fn is_manufactured(&self) -> bool {
        matches!(self, ProblemKind::Table(_) | ProblemKind::Custom(_))
    }

    /// Parameters of the manufactured solution, if any.
    pub fn manufactured(&self) -> Option<ManufacturedParams> {
        match self {
            ProblemKind::Table(n) => TablePreset::get(*n).map(|p| p.params),
            ProblemKind::Custom(p) => Some(*p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    /// Unit squares above and below `y = 0` with `n` cells per side.
    Squares { n: usize },
    Obstacle { m: usize },
    Gmsh { upper: PathBuf, lower: PathBuf },
}

impl MeshSource {
    pub fn build(&self) -> Result<CoupledMesh> {
        match self {
            MeshSource::Squares { n } => CoupledMesh::unit_squares(*n),
            MeshSource::Obstacle { m } => {
                let (up, low) = obstacle_meshes(*m)?;
                CoupledMesh::new(up, low)
            }
            MeshSource::Gmsh { upper, lower } => {
                let table = default_tag_table();
                let read = |p: &Path| -> Result<_> {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                    import_gmsh(&text, &table)
                };
                CoupledMesh::new(read(upper)?, read(lower)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub mesh: MeshSource,
    pub scheme: SchemeConfig,
    /// Convergence levels (manufactured kinds only).
    pub levels: Vec<usize>,
    pub snapshot_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub probe: Option<Probe>,
    pub energy_monitor: bool,
}

impl RunConfig {
    pub fn build_problem(&self) -> Box<dyn Problem> {
        match &self.problem {
            ProblemKind::Obstacle => Box::new(ObstacleProblem::default()),
            ProblemKind::Decay { seed } => Box::new(DecayProblem::new(*seed)),
            kind => Box::new(ManufacturedProblem::new(kind.manufactured().expect("manufactured kind"))),
        }
    }

    /// Checks cross-field constraints: scheme parameters, mesh files and the
    /// position of snapshot times on the time grid.
    pub fn validate(&self) -> Result<()> {
        self.scheme
            .validate()
            .map_err(|e| Error::config("scheme", "-", e.to_string()))?;
        if let MeshSource::Gmsh { upper, lower } = &self.mesh {
            for (key, p) in [("upper", upper), ("lower", lower)] {
                if !p.is_file() {
                    return Err(Error::config("mesh", key, format!("file {} does not exist", p.display())));
                }
            }
        }
        for &t in &self.snapshot_times {
            let r = t / self.scheme.dt;
            if (r - r.round()).abs() > 1e-9 || r.round() < 1.0 || r.round() as usize > self.scheme.n_levels() {
                return Err(Error::config(
                    "output",
                    "snapshot_times",
                    format!("{t} is not a time level in [dt, T]"),
                ));
            }
        }
        if self.levels.iter().any(|&l| l < 2) {
            return Err(Error::config("problem", "levels", "levels must be at least 2"));
        }
        Ok(())
    }
}

type Sections = BTreeMap<String, BTreeMap<String, (usize, String)>>;

fn tokenize(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    let known: BTreeMap<&str, &[&str]> = SECTIONS.into_iter().collect();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("malformed section header '{line}'"),
                })?
                .trim()
                .to_ascii_lowercase();
            if !known.contains_key(name.as_str()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown section [{name}]"),
                });
            }
            out.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let section = current.clone().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "key outside of any section".into(),
        })?;
        let key = key.trim().to_ascii_lowercase();
        if !known[section.as_str()].contains(&key.as_str()) {
            return Err(Error::config(&section, &key, "unknown key"));
        }
        let entry = out.get_mut(&section).expect("section inserted");
        if entry.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
            return Err(Error::config(&section, &key, format!("duplicate key at line {line_no}")));
        }
    }
    Ok(out)
}

struct Reader {
    sections: Sections,
    used: BTreeSet<(String, String)>,
}

impl Reader {
    fn raw(&mut self, section: &str, key: &str) -> Option<String> {
        let v = self.sections.get(section)?.get(key)?.1.clone();
        self.used.insert((section.into(), key.into()));
        Some(v)
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str, expected: &str) -> Result<Option<T>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(section, key, format!("expected {expected}, got '{v}'"))),
        }
    }

    fn require<T: FromStr>(&mut self, section: &str, key: &str, expected: &str) -> Result<T> {
        self.get(section, key, expected)?
            .ok_or_else(|| Error::config(section, key, "missing required key"))
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str, expected: &str) -> Result<Option<Vec<T>>> {
        let Some(v) = self.raw(section, key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::config(section, key, format!("expected a comma-separated list of {expected}, got '{v}'")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn bool(&mut self, section: &str, key: &str) -> Result<Option<bool>> {
        match self.raw(section, key).map(|v| v.to_ascii_lowercase()) {
            None => Ok(None),
            Some(v) if v == "true" || v == "yes" || v == "1" => Ok(Some(true)),
            Some(v) if v == "false" || v == "no" || v == "0" => Ok(Some(false)),
            Some(v) => Err(Error::config(section, key, format!("expected a boolean, got '{v}'"))),
        }
    }
}

fn parse_kind(r: &mut Reader) -> Result<ProblemKind> {
    let kind: String = r.require("problem", "kind", "a problem kind")?;
    let lower = kind.to_ascii_lowercase();
    Ok(match lower.as_str() {
        "obstacle" => ProblemKind::Obstacle,
        "decay" => ProblemKind::Decay {
            seed: r.get("problem", "seed", "an unsigned integer")?.unwrap_or(1),
        },
        "custom" => ProblemKind::Custom(ManufacturedParams {
            a: r.require("problem", "a", "a number")?,
            nu: [r.require("scheme", "nu1", "a number")?, r.require("scheme", "nu2", "a number")?],
            kappa: r.get("scheme", "kappa", "a number")?.unwrap_or(1.0),
        }),
        other => {
            let n = other
                .strip_prefix("table")
                .and_then(|d| d.parse::<u8>().ok())
                .filter(|n| TablePreset::get(*n).is_some())
                .ok_or_else(|| {
                    Error::config(
                        "problem",
                        "kind",
                        format!("expected table1..table4, custom, obstacle or decay, got '{kind}'"),
                    )
                })?;
            ProblemKind::Table(n)
        }
    })
}

/// Parses and validates a configuration. Relative mesh paths are kept as written.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut r = Reader {
        sections: tokenize(text)?,
        used: BTreeSet::new(),
    };
    let problem = parse_kind(&mut r)?;

    let mut scheme = SchemeConfig::default();
    let level: Option<usize> = r.get("problem", "level", "an unsigned integer")?;
    let mut levels: Vec<usize> = r.list("problem", "levels", "unsigned integers")?.unwrap_or_default();
    let mut default_mesh = MeshSource::Squares { n: 8 };
    let mut probe = None;
    match &problem {
        ProblemKind::Table(_) | ProblemKind::Custom(_) => {
            let params = problem.manufactured().expect("manufactured kind");
            let level = match level {
                Some(l) => l,
                None => *levels
                    .first()
                    .ok_or_else(|| Error::config("problem", "level", "missing required key"))?,
            };
            if level < 2 {
                return Err(Error::config("problem", "level", "level must be at least 2"));
            }
            let h = 1.0 / level as f64;
            scheme.nu = params.nu;
            scheme.kappa = params.kappa;
            scheme.nu_t = [h, h];
            scheme.dt = h;
            scheme.final_time = 1.0;
            if let ProblemKind::Table(n) = problem {
                scheme.variant = TablePreset::get(n).expect("valid table").variant;
            }
            if levels.is_empty() {
                levels.push(level);
            }
            default_mesh = MeshSource::Squares { n: level };
        }
        ProblemKind::Obstacle => {
            scheme.nu = OBSTACLE_NU;
            scheme.nu_t = [OBSTACLE_NU_T; 2];
            scheme.dt = OBSTACLE_DT;
            scheme.final_time = OBSTACLE_FINAL_TIME;
            default_mesh = MeshSource::Obstacle { m: OBSTACLE_RESOLUTION };
            probe = Some(Probe {
                domain: 0,
                point: OBSTACLE_PROBE,
            });
        }
        ProblemKind::Decay { .. } => {
            if let Some(l) = level {
                default_mesh = MeshSource::Squares { n: l };
            }
        }
    }

    let mesh = match r.get::<String>("mesh", "type", "a mesh type")?.map(|s| s.to_ascii_lowercase()) {
        None => match default_mesh {
            MeshSource::Squares { n } => MeshSource::Squares {
                n: r.get("mesh", "n", "an unsigned integer")?.unwrap_or(n),
            },
            MeshSource::Obstacle { m } => MeshSource::Obstacle {
                m: r.get("mesh", "m", "an unsigned integer")?.unwrap_or(m),
            },
            g => g,
        },
        Some(t) if t == "squares" => MeshSource::Squares {
            n: r.require("mesh", "n", "an unsigned integer")?,
        },
        Some(t) if t == "obstacle" => MeshSource::Obstacle {
            m: r.get("mesh", "m", "an unsigned integer")?.unwrap_or(OBSTACLE_RESOLUTION),
        },
        Some(t) if t == "gmsh" => MeshSource::Gmsh {
            upper: PathBuf::from(r.require::<String>("mesh", "upper", "a path")?),
            lower: PathBuf::from(r.require::<String>("mesh", "lower", "a path")?),
        },
        Some(t) => return Err(Error::config("mesh", "type", format!("expected squares, obstacle or gmsh, got '{t}'"))),
    };

    if let Some(v) = r.get::<String>("scheme", "variant", "SAV or AV")? {
        scheme.variant = v.parse::<Variant>().map_err(|m| Error::config("scheme", "variant", m))?;
    }
    let num = |r: &mut Reader, key: &str| r.get::<f64>("scheme", key, "a number");
    if let Some(v) = num(&mut r, "nu1")? {
        scheme.nu[0] = v;
    }
    if let Some(v) = num(&mut r, "nu2")? {
        scheme.nu[1] = v;
    }
    if let Some(v) = num(&mut r, "nu_t")? {
        scheme.nu_t = [v, v];
    }
    if let Some(v) = num(&mut r, "nu_t1")? {
        scheme.nu_t[0] = v;
    }
    if let Some(v) = num(&mut r, "nu_t2")? {
        scheme.nu_t[1] = v;
    }
    if let Some(v) = num(&mut r, "kappa")? {
        scheme.kappa = v;
    }
    if let Some(v) = num(&mut r, "dt")? {
        scheme.dt = v;
    }
    if let Some(v) = num(&mut r, "final_time")? {
        scheme.final_time = v;
    }
    if let Some(v) = r.get("scheme", "subgrid_degree", "0 or 1")? {
        scheme.subgrid_degree = v;
    }
    if let Some(v) = num(&mut r, "picard_tol")? {
        scheme.picard_tol = v;
    }
    if let Some(v) = r.get("scheme", "picard_max", "an unsigned integer")? {
        scheme.picard_max = v;
    }
    let snapshot_times = r.list("output", "snapshot_times", "numbers")?.unwrap_or_default();
    let output_dir = PathBuf::from(r.get::<String>("output", "dir", "a path")?.unwrap_or_else(|| "out".into()));
    if let Some(p) = r.list::<f64>("output", "probe", "numbers")? {
        let [x, y] = p[..] else {
            return Err(Error::config("output", "probe", "expected two coordinates 'x, y'"));
        };
        probe = Some(Probe {
            domain: if y >= 0.0 { 0 } else { 1 },
            point: [x, y],
        });
    }
    let energy_monitor = r
        .bool("output", "energy_monitor")?
        .unwrap_or(matches!(problem, ProblemKind::Decay { .. }));

    for (section, keys) in &r.sections {
        if let Some(key) = keys.keys().find(|k| !r.used.contains(&(section.clone(), (*k).clone()))) {
            return Err(Error::config(section, key, format!("key does not apply to problem kind '{}'", kind_name(&problem))));
        }
    }

    let cfg = RunConfig {
        problem,
        mesh,
        scheme,
        levels,
        snapshot_times,
        output_dir,
        probe,
        energy_monitor,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn kind_name(k: &ProblemKind) -> String {
    match k {
        ProblemKind::Table(n) => format!("table{n}"),
        ProblemKind::Custom(_) => "custom".into(),
        ProblemKind::Obstacle => "obstacle".into(),
        ProblemKind::Decay { .. } => "decay".into(),
    }
}

/// Reads a configuration file; relative mesh and output paths are resolved
/// against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolved = resolve_paths(&text, base);
    parse_config(&resolved)
}

fn resolve_paths(text: &str, base: &Path) -> String {
    let mut section = String::new();
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        let t = line.trim();
        if let Some(s) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = s.trim().to_ascii_lowercase();
        } else if let Some((k, v)) = t.split('#').next().unwrap_or("").split_once('=') {
            let k = k.trim().to_ascii_lowercase();
            let is_path = (section == "mesh" && (k == "upper" || k == "lower")) || (section == "output" && k == "dir");
            let v = v.trim();
            if is_path && Path::new(v).is_relative() {
                out.push_str(&format!("{k} = {}\n", base.join(v).display()));
                continue;
            }
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}
