use std::path::Path;

use trefoil_core::curve::stereo::pole_avoiding;
use trefoil_core::curve::KnotCurve;
use trefoil_core::gauss::a2_of_knot;
use trefoil_core::hexknot::{classify_hexagon, parse_hexagon};
use trefoil_core::solve::{
    certify_trefoil, check_separation, trefoil_quadrisecant_proximity, find_inscribed_prisms, find_quadrisecants, kappa, thickness,
    CertifiedTrefoil, ConfigTuple, SearchParams,
};

use crate::config::{CommandName, ConfigEcho, RunConfig, DEFAULT_SEARCH_GRID};
use crate::document::*;
use crate::CliError;

/// Random six-point sets drawn for the adjacency check.
pub const SEPARATION_SETS: usize = 2000;

fn search_params(cfg: &RunConfig) -> SearchParams {
    // For quadrisecants `grid` counts line seeds; the trefoils they are
    // compared with come from the default configuration search.
    let grid = if cfg.command == CommandName::Quadrisecants { DEFAULT_SEARCH_GRID } else { cfg.grid };
    SearchParams { grid, tol: cfg.tol }
}

fn solutions(cfg: &RunConfig, basepoint: f64) -> Result<Vec<ConfigTuple>, CliError> {
    Ok(find_inscribed_prisms(&*cfg.curve.s3_model(), basepoint, &search_params(cfg))?)
}

pub fn cmd_search(cfg: &RunConfig) -> Result<Payload, CliError> {
    let runs = cfg
        .basepoints
        .iter()
        .map(|&b| Ok(BasepointRun { basepoint: b, solutions: solutions(cfg, b)?.iter().map(SolutionRecord::from).collect() }))
        .collect::<Result<_, CliError>>()?;
    Ok(Payload::Search(SearchPayload { runs }))
}

pub fn cmd_invariant(cfg: &RunConfig) -> Result<Payload, CliError> {
    let mut runs = Vec::new();
    let mut warnings = Vec::new();
    for &b in &cfg.basepoints {
        let rep = kappa(&cfg.curve, b, &search_params(cfg))?;
        if rep.non_transverse() > 0 {
            warnings.push(format!(
                "basepoint {b}: {} non-transverse root(s); signed count withheld, parity from the raw count",
                rep.non_transverse()
            ));
        }
        runs.push(InvariantRun {
            basepoint: b,
            kappa: rep.kappa,
            parity: rep.parity,
            non_transverse: rep.non_transverse(),
            solutions: rep.solutions.iter().map(SolutionRecord::from).collect(),
        });
    }
    let a2 = a2_of_knot(&cfg.curve);
    let abs_matches_a2 = match &a2 {
        Ok(a) => runs.iter().map(|r| r.kappa.map(|k| k.abs() == a.abs())).collect::<Option<Vec<bool>>>().map(|v| v.iter().all(|&x| x)),
        Err(_) => None,
    };
    Ok(Payload::Invariant(InvariantPayload {
        runs,
        a2: a2.as_ref().ok().copied(),
        a2_error: a2.err().map(|e| e.to_string()),
        abs_matches_a2,
        warnings,
    }))
}

pub fn cmd_thickness(cfg: &RunConfig) -> Result<Payload, CliError> {
    let model = cfg.curve.s3_model();
    let rep = thickness(&*model)?;
    let mut sols = Vec::new();
    for &b in &cfg.basepoints {
        sols.extend(solutions(cfg, b)?);
    }
    let (separation, separation_error) = match check_separation(&*model, &sols, rep.tau, SEPARATION_SETS, cfg.seed) {
        Ok(s) => (
            Some(SeparationRecord {
                min_solution_distance: s.min_solution_distance,
                solutions_checked: s.solutions_checked,
                random_sets: s.random_sets,
                random_sets_below: s.random_sets_below,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Payload::Thickness(ThicknessPayload {
        tau: rep.tau,
        kind: format!("{:?}", rep.kind),
        triple: rep.triple,
        separation,
        separation_error,
    }))
}

fn picture_pole(curve: &KnotCurve, sol: &ConfigTuple) -> Option<[f64; 4]> {
    match curve {
        KnotCurve::R3(_) => None,
        KnotCurve::S3(c) => {
            let p = pole_avoiding(c, &sol.points, 0.2);
            Some([p.x, p.y, p.z, p.w])
        }
    }
}

fn certify_all(cfg: &RunConfig) -> Result<(usize, Vec<CertRecord>, Vec<CertifiedTrefoil>), CliError> {
    let mut found = 0;
    let mut records = Vec::new();
    let mut trefoils = Vec::new();
    for &b in &cfg.basepoints {
        let sols = solutions(cfg, b)?;
        found += sols.len();
        for (i, sol) in sols.iter().enumerate() {
            let pole = picture_pole(&cfg.curve, sol);
            match certify_trefoil(&cfg.curve, sol) {
                Ok(c) => {
                    records.push(CertRecord::certified(b, i, &c, pole));
                    trefoils.push(c);
                }
                Err(u) => records.push(CertRecord::unresolved(b, i, &u, pole)),
            }
        }
    }
    Ok((found, records, trefoils))
}

pub fn cmd_certify(cfg: &RunConfig) -> Result<Payload, CliError> {
    let (solutions_found, results, trefoils) = certify_all(cfg)?;
    Ok(Payload::Certify(CertifyPayload { solutions_found, certified: trefoils.len(), results }))
}

pub fn cmd_quadrisecants(cfg: &RunConfig) -> Result<Payload, CliError> {
    let picture = cfg.curve.r3_model();
    let quads = find_quadrisecants(&*picture, cfg.grid);
    let (_, records, trefoils) = certify_all(cfg)?;
    let proximity = trefoil_quadrisecant_proximity(&*picture, &trefoils, &quads)
        .into_iter()
        .map(|r| ProximityRecord { trefoil: r.trefoil, quadrisecant: r.quadrisecant, distance: r.distance })
        .collect();
    Ok(Payload::Quadrisecants(QuadrisecantPayload {
        quadrisecants: quads.iter().map(QuadRecord::from).collect(),
        trefoils: records.into_iter().filter(|r| r.status == CertStatus::Certified).collect(),
        proximity,
    }))
}

pub fn cmd_classify_hex(points: &Path) -> Result<(ConfigEcho, Payload), CliError> {
    let text = std::fs::read_to_string(points).map_err(|e| CliError::Io(points.display().to_string(), e.to_string()))?;
    let hex = parse_hexagon(&text)?;
    let class = classify_hexagon(&hex);
    let echo = ConfigEcho {
        command: CommandName::ClassifyHex,
        curve: None,
        points_file: Some(points.display().to_string()),
        grid: None,
        tol: None,
        basepoints: vec![],
        seed: None,
    };
    let payload = HexPayload {
        points: hex.points().map(|p| [p.x, p.y, p.z]),
        hex_kind: format!("{:?}", class.kind),
        margin: class.margin,
    };
    Ok((echo, Payload::ClassifyHex(payload)))
}
