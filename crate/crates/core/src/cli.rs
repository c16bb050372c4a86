//! The `ea` command line: check, tests, cohomology, verify, states, extend,
//! bell. Algebra files are Greechie DSL or explicit-table JSON; every
//! command has a `--json` mode whose output is stable-ordered and
//! byte-reproducible across runs.
//!
//! Exit codes: 0 for a completed run, 1 for a failed assertion (a `verify`
//! property that does not hold, or an infeasible extension under
//! `--expect-feasible`), 2 for input errors.

use crate::algebra::EffectAlgebra;
use crate::bell;
use crate::cohomology::{self, relative, CheckReport};
use crate::format;
use crate::rational::format_rational;
use crate::states;
use crate::testspace::TestTable;
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "ea", version, about = "Exact cohomology and state analysis of finite effect algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit machine-readable JSON with stable ordering.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest cohomology degree to compute (default: the height for finite
    /// orthoalgebras, otherwise 4).
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// Seed for randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the effect-algebra axioms of a file and report structure.
    Check { file: PathBuf },
    /// Enumerate the tests of one degree.
    Tests {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// Cohomology dimension tables.
    Cohomology {
        file: PathBuf,
        /// cyclic or hochschild.
        #[arg(long, default_value = "cyclic")]
        theory: String,
        /// Comma-separated element labels generating a subalgebra; computes
        /// the relative cohomology of the pair instead.
        #[arg(long)]
        relative: Option<String>,
    },
    /// Structural theorem checks.
    Verify {
        file: PathBuf,
        /// mayer-vietoris | generalized-mv | kunneth-hochschild |
        /// kunneth-cyclic | hh-hc-product | coproduct | trivial-tests |
        /// height | cyclic-identities
        #[arg(long)]
        property: String,
        /// Second operand for product/coproduct properties (defaults to the
        /// main file).
        #[arg(long)]
        with: Option<PathBuf>,
        /// Comma-separated block indices forming the left part of a binary
        /// union split (default: block 0 against the rest).
        #[arg(long)]
        split: Option<String>,
    },
    /// State-space queries.
    States {
        file: PathBuf,
        /// List all two-valued states.
        #[arg(long)]
        two_valued: bool,
        /// Decide classical realizability of the state in this file.
        #[arg(long)]
        classical: Option<PathBuf>,
    },
    /// Extend a state along an injective morphism into a larger algebra.
    Extend {
        base: PathBuf,
        target: PathBuf,
        /// Map file sending base labels to target labels.
        #[arg(long)]
        map: PathBuf,
        /// State file over the base algebra.
        #[arg(long)]
        state: PathBuf,
        /// Drop positivity: look for a signed extension.
        #[arg(long)]
        signed: bool,
        /// Also report whether the degree-two obstruction class vanishes.
        #[arg(long)]
        check_obstruction: bool,
        /// Exit nonzero when no extension exists.
        #[arg(long)]
        expect_feasible: bool,
    },
    /// Bell-scenario analysis of a no-signaling box.
    Bell {
        /// Box CSV (default: the bundled table).
        #[arg(long = "box")]
        box_file: Option<PathBuf>,
        /// Print the CHSH value only.
        #[arg(long)]
        chsh: bool,
        /// Decide local-polytope membership.
        #[arg(long)]
        local: bool,
        /// Report the signed-mixture (chain-level obstruction) verdict.
        #[arg(long)]
        obstruction: bool,
    },
}

pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
}

fn fail(msg: impl Into<String>) -> Outcome {
    Outcome { exit_code: 2, stdout: format!("error: {}\n", msg.into()) }
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<EffectAlgebra, Outcome> {
    let text = read(path)?;
    format::load_algebra(&text).map_err(fail)
}

fn default_degree(alg: &EffectAlgebra, requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| {
        if alg.is_orthoalgebra().is_ok() {
            alg.height()
        } else {
            4
        }
    })
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(outcome) => outcome,
        Err(outcome) => outcome,
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Outcome> {
    match &cli.command {
        Command::Check { file } => check_cmd(cli, file),
        Command::Tests { file, degree, count_only } => {
            tests_cmd(cli, file, *degree, *count_only)
        }
        Command::Cohomology { file, theory, relative } => {
            cohomology_cmd(cli, file, theory, relative.as_deref())
        }
        Command::Verify { file, property, with, split } => {
            verify_cmd(cli, file, property, with.as_deref(), split.as_deref())
        }
        Command::States { file, two_valued, classical } => {
            states_cmd(cli, file, *two_valued, classical.as_deref())
        }
        Command::Extend { base, target, map, state, signed, check_obstruction, expect_feasible } => {
            extend_cmd(cli, base, target, map, state, *signed, *check_obstruction, *expect_feasible)
        }
        Command::Bell { box_file, chsh, local, obstruction } => {
            bell_cmd(cli, box_file.as_deref(), *chsh, *local, *obstruction)
        }
    }
}

#[derive(Serialize)]
struct CheckDoc {
    file: String,
    name: String,
    elements: usize,
    valid: bool,
    violations: Vec<String>,
    atoms: usize,
    height: usize,
    blocks: Option<usize>,
}

fn check_cmd(cli: &Cli, file: &Path) -> Result<Outcome, Outcome> {
    let text = read(file)?;
    // a Greechie diagram that fails to paste is itself an input error; the
    // witness travels in the message
    let alg = format::load_algebra(&text).map_err(fail)?;
    let report = alg.verify_axioms();
    let doc = CheckDoc {
        file: file.display().to_string(),
        name: alg.name().to_string(),
        elements: alg.element_count(),
        valid: report.is_valid(),
        violations: report.describe(&alg),
        atoms: alg.atoms().len(),
        height: alg.height(),
        blocks: alg.blocks().ok().map(|b| b.len()),
    };
    let stdout = if cli.json {
        to_json(&doc)
    } else if doc.valid {
        format!(
            "{}: valid effect algebra with {} elements, {} atoms, height {}{}\n",
            doc.name,
            doc.elements,
            doc.atoms,
            doc.height,
            match doc.blocks {
                Some(b) => format!(", {b} blocks"),
                None => ", not an orthoalgebra".into(),
            }
        )
    } else {
        format!("{}: INVALID\n{}\n", doc.name, doc.violations.join("\n"))
    };
    Ok(Outcome { exit_code: if doc.valid { 0 } else { 2 }, stdout })
}

#[derive(Serialize)]
struct TestsDoc {
    name: String,
    degree: usize,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tests: Option<Vec<Vec<String>>>,
}

fn tests_cmd(cli: &Cli, file: &Path, degree: usize, count_only: bool) -> Result<Outcome, Outcome> {
    let alg = load(file)?;
    let mut table = TestTable::new(&alg);
    let dt = table.degree(degree).map_err(|e| fail(e.to_string()))?;
    let tests = if count_only {
        None
    } else {
        Some(
            dt.tests
                .iter()
                .map(|t| t.0.iter().map(|e| alg.label(*e).to_string()).collect())
                .collect(),
        )
    };
    let doc = TestsDoc { name: alg.name().to_string(), degree, count: dt.len(), tests };
    let stdout = if cli.json {
        to_json(&doc)
    } else {
        let mut s = format!("{}: {} tests in degree {}\n", doc.name, doc.count, doc.degree);
        if let Some(ts) = &doc.tests {
            for t in ts {
                s.push_str(&format!("  ({})\n", t.join(", ")));
            }
        }
        s
    };
    Ok(Outcome { exit_code: 0, stdout })
}

#[derive(Serialize)]
struct CohomologyDoc {
    name: String,
    theory: String,
    max_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_to: Option<Vec<String>>,
    dims: Vec<usize>,
}

fn cohomology_cmd(
    cli: &Cli,
    file: &Path,
    theory: &str,
    relative: Option<&str>,
) -> Result<Outcome, Outcome> {
    let alg = load(file)?;
    let nmax = default_degree(&alg, cli.max_degree);
    let doc = match relative {
        None => {
            let table = match theory {
                "cyclic" => cohomology::hc_dims(&alg, nmax),
                "hochschild" => cohomology::hh_dims(&alg, nmax),
                other => return Err(fail(format!("unknown theory {other}"))),
            }
            .map_err(|e| fail(e.to_string()))?;
            CohomologyDoc {
                name: alg.name().to_string(),
                theory: table.theory,
                max_degree: nmax,
                relative_to: None,
                dims: table.dims,
            }
        }
        Some(labels) => {
            if theory != "cyclic" {
                return Err(fail("relative cohomology is built inside the cyclic theory"));
            }
            let seed = parse_labels(&alg, labels)?;
            let (sub, incl) = alg.subalgebra_generated(&seed);
            let mask = alg.subset_mask(&incl.map);
            let pair = relative::RelativePair::new(&alg, mask)
                .map_err(|e| fail(e.to_string()))?;
            let table =
                relative::relative_dims(&pair, nmax).map_err(|e| fail(e.to_string()))?;
            CohomologyDoc {
                name: alg.name().to_string(),
                theory: table.theory,
                max_degree: nmax,
                relative_to: Some(sub.labels().to_vec()),
                dims: table.dims,
            }
        }
    };
    let stdout = if cli.json {
        to_json(&doc)
    } else {
        format!(
            "{} {} cohomology dims (degree 0..{}): {:?}\n",
            doc.name, doc.theory, doc.max_degree, doc.dims
        )
    };
    Ok(Outcome { exit_code: 0, stdout })
}

fn parse_labels(alg: &EffectAlgebra, labels: &str) -> Result<Vec<crate::algebra::ElementId>, Outcome> {
    labels
        .split(',')
        .map(|l| {
            let l = l.trim();
            alg.element_by_label(l)
                .ok_or_else(|| fail(format!("unknown element label {l}")))
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyDoc {
    name: String,
    property: String,
    passed: bool,
    details: Vec<String>,
}

fn verify_cmd(
    cli: &Cli,
    file: &Path,
    property: &str,
    with: Option<&Path>,
    split: Option<&str>,
) -> Result<Outcome, Outcome> {
    let alg = load(file)?;
    let nmax = default_degree(&alg, cli.max_degree);
    let other = match with {
        Some(p) => Some(load(p)?),
        None => None,
    };
    let second = other.as_ref().unwrap_or(&alg);
    let report: CheckReport = match property {
        "mayer-vietoris" => {
            let blocks = alg.blocks().map_err(|e| fail(e.to_string()))?;
            let chosen: Vec<usize> = match split {
                None => vec![0],
                Some(s) => s
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|e| fail(e.to_string())))
                    .collect::<Result<_, _>>()?,
            };
            if chosen.iter().any(|&i| i >= blocks.len()) {
                return Err(fail(format!("split index out of range (there are {} blocks)", blocks.len())));
            }
            let mut mask_a = vec![false; alg.element_count()];
            let mut mask_b = vec![false; alg.element_count()];
            for (i, bl) in blocks.iter().enumerate() {
                let target = if chosen.contains(&i) { &mut mask_a } else { &mut mask_b };
                for e in bl {
                    target[e.idx()] = true;
                }
            }
            cohomology::mv::mayer_vietoris_check(&alg, &mask_a, &mask_b, nmax)
                .map_err(|e| fail(e.to_string()))?
        }
        "generalized-mv" => cohomology::mv::generalized_mv_check(&alg, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "kunneth-hochschild" => cohomology::kunneth::kunneth_hochschild_check(&alg, second, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "kunneth-cyclic" => cohomology::kunneth::kunneth_cyclic_consistency(&alg, second, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "hh-hc-product" => cohomology::kunneth::hh_eq_hc_product_l1_check(&alg, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "coproduct" => relative::coproduct_check(&alg, second, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "trivial-tests" => relative::trivial_tests_check(&alg, nmax)
            .map_err(|e| fail(e.to_string()))?,
        "height" => relative::height_vanishing_check(&alg).map_err(|e| fail(e.to_string()))?,
        "cyclic-identities" => {
            let violations = crate::testspace::verify_cyclic_relations(&alg, nmax.min(3));
            let mut report = CheckReport::new(format!("cyclic-set identities of {}", alg.name()));
            report.note(format!("degrees checked: 0..{}", nmax.min(3)));
            for v in violations {
                report.fail(v);
            }
            report
        }
        other => return Err(fail(format!("unknown property {other}"))),
    };
    let doc = VerifyDoc {
        name: alg.name().to_string(),
        property: property.to_string(),
        passed: report.passed,
        details: report.details,
    };
    let stdout = if cli.json {
        to_json(&doc)
    } else {
        let mut s = format!(
            "{} / {}: {}\n",
            doc.name,
            doc.property,
            if doc.passed { "PASS" } else { "FAIL" }
        );
        for d in &doc.details {
            s.push_str(&format!("  {d}\n"));
        }
        s
    };
    Ok(Outcome { exit_code: if doc.passed { 0 } else { 1 }, stdout })
}

#[derive(Serialize)]
struct StatesDoc {
    name: String,
    two_valued_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_valued: Option<Vec<BTreeMap<String, String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classical: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<String>>,
}

fn states_cmd(
    cli: &Cli,
    file: &Path,
    two_valued: bool,
    classical: Option<&Path>,
) -> Result<Outcome, Outcome> {
    let alg = load(file)?;
    let verts = states::two_valued_states(&alg);
    let mut doc = StatesDoc {
        name: alg.name().to_string(),
        two_valued_count: verts.len(),
        two_valued: None,
        classical: None,
        weights: None,
    };
    if two_valued {
        doc.two_valued = Some(
            verts
                .iter()
                .map(|v| {
                    alg.elements()
                        .map(|e| (alg.label(e).to_string(), format_rational(v.get(e))))
                        .collect()
                })
                .collect(),
        );
    }
    if let Some(path) = classical {
        let text = read(path)?;
        let sigma = format::state_from_json(&alg, &text).map_err(fail)?;
        match states::is_classical(&alg, &sigma) {
            Some(w) => {
                doc.classical = Some(true);
                doc.weights = Some(w.iter().map(format_rational).collect());
            }
            None => doc.classical = Some(false),
        }
    }
    let stdout = if cli.json {
        to_json(&doc)
    } else {
        let mut s = format!("{}: {} two-valued states\n", doc.name, doc.two_valued_count);
        if let Some(list) = &doc.two_valued {
            for (i, v) in list.iter().enumerate() {
                let ones: Vec<&str> = v
                    .iter()
                    .filter(|(_, val)| val.as_str() == "1")
                    .map(|(k, _)| k.as_str())
                    .collect();
                s.push_str(&format!("  state {i}: 1 on {{{}}}\n", ones.join(", ")));
            }
        }
        if let Some(c) = doc.classical {
            s.push_str(&format!(
                "state is {}\n",
                if c { "classical (a mixture of two-valued states)" } else { "NOT classical" }
            ));
        }
        s
    };
    Ok(Outcome { exit_code: 0, stdout })
}

#[derive(Serialize)]
struct ExtendDoc {
    base: String,
    target: String,
    mode: String,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstruction_vanishes: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn extend_cmd(
    cli: &Cli,
    base: &Path,
    target: &Path,
    map: &Path,
    state: &Path,
    signed: bool,
    check_obstruction: bool,
    expect_feasible: bool,
) -> Result<Outcome, Outcome> {
    let a = load(base)?;
    let b = load(target)?;
    let m = format::morphism_from_json(&a, &b, &read(map)?).map_err(fail)?;
    let sigma = format::state_from_json(&a, &read(state)?).map_err(fail)?;
    let mode = if signed { states::ExtensionMode::Signed } else { states::ExtensionMode::Positive };
    let problem = states::ExtensionProblem::new(&a, &b, m, sigma, mode)
        .map_err(|e| fail(e.to_string()))?;
    let extension = states::extend_state(&problem);
    let mut doc = ExtendDoc {
        base: a.name().to_string(),
        target: b.name().to_string(),
        mode: if signed { "signed".into() } else { "positive".into() },
        feasible: extension.is_some(),
        witness: extension.as_ref().map(|ext| {
            b.elements()
                .map(|e| (b.label(e).to_string(), format_rational(&ext.values()[e.idx()])))
                .collect()
        }),
        obstruction_vanishes: None,
    };
    if check_obstruction {
        // base point: the restriction of any state on the target, found by LP
        let tau0 = states::faithful_state(&b)
            .or_else(|_| {
                states::random_classical_states(&b, 1, cli.seed)
                    .pop()
                    .ok_or(states::StateError::EmptyStateSpace)
            })
            .map_err(|e| fail(format!("no base state on the target: {e}")))?;
        let sigma0 = states::StateVector {
            values: a
                .elements()
                .map(|e| tau0.get(problem.inclusion.apply(e)).clone())
                .collect(),
        };
        doc.obstruction_vanishes =
            Some(states::cyclic_obstruction_vanishes(&problem, &sigma0));
    }
    let stdout = if cli.json {
        to_json(&doc)
    } else {
        let mut s = format!(
            "{} extension of a state on {} along {} ↪ {}: {}\n",
            doc.mode,
            doc.base,
            doc.base,
            doc.target,
            if doc.feasible { "feasible" } else { "infeasible" }
        );
        if let Some(o) = doc.obstruction_vanishes {
            s.push_str(&format!(
                "degree-two obstruction class: {}\n",
                if o { "vanishes" } else { "does not vanish" }
            ));
        }
        s
    };
    let exit_code = if expect_feasible && !doc.feasible { 1 } else { 0 };
    Ok(Outcome { exit_code, stdout })
}

#[derive(Serialize)]
struct BellDoc {
    box_rows: Vec<Vec<String>>,
    no_signaling: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    chsh: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    local: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstruction_vanishes: Option<bool>,
}

fn bell_cmd(
    cli: &Cli,
    box_file: Option<&Path>,
    chsh_only: bool,
    local: bool,
    obstruction: bool,
) -> Result<Outcome, Outcome> {
    let b = match box_file {
        Some(p) => format::box_from_csv(&read(p)?).map_err(fail)?,
        None => bell::bell_paper_box(),
    };
    let ns = bell::verify_no_signaling(&b);
    let all = !chsh_only && !local && !obstruction;
    let mut doc = BellDoc {
        box_rows: (0..4)
            .map(|c| b.row(c).iter().map(format_rational).collect())
            .collect(),
        no_signaling: ns.passed,
        chsh: None,
        local: None,
        obstruction_vanishes: None,
    };
    if chsh_only || all {
        doc.chsh = Some(format_rational(&bell::chsh(&b)));
    }
    if local || all {
        doc.local = Some(bell::is_local(&b).is_some());
    }
    if obstruction || all {
        doc.obstruction_vanishes = Some(bell::signed_local_weights(&b).is_some());
    }
    let stdout = if cli.json {
        to_json(&doc)
    } else if chsh_only && !local && !obstruction {
        format!("{}\n", doc.chsh.as_ref().unwrap())
    } else {
        let mut s = String::new();
        s.push_str(&format!(
            "no-signaling: {}\n",
            if doc.no_signaling { "yes" } else { "NO" }
        ));
        if let Some(v) = &doc.chsh {
            s.push_str(&format!("chsh: {v}\n"));
        }
        if let Some(l) = doc.local {
            s.push_str(&format!("local: {}\n", if l { "yes" } else { "no" }));
        }
        if let Some(o) = doc.obstruction_vanishes {
            s.push_str(&format!(
                "signed-mixture obstruction vanishes: {}\n",
                if o { "yes" } else { "no" }
            ));
        }
        s
    };
    Ok(Outcome { exit_code: 0, stdout })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
