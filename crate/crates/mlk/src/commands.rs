//! The three subcommands. Each returns the report and the exit code.

use mlk_core::bounds::{report_from_rhos, EmbeddingSet};
use mlk_core::siegel::{injectivity_diameter, lambda_clamped, reduce};

use crate::document::{digest, BoundOut, Input, OutputDocument, RhoOut, TermOut, DEFAULT_EPSILON};
use crate::error::CliError;
use crate::parallel;
use crate::suites::{self, Subjects, Suite};

/// Injectivity diameters, in input order, with the failing embedding named.
fn rhos(input: &Input) -> Result<Vec<f64>, CliError> {
    parallel::map(&input.periods, |index, p| {
        injectivity_diameter(p).map_err(|source| CliError::Embedding { index, source })
    })
    .into_iter()
    .collect()
}

fn embedding_set(input: &Input) -> Result<EmbeddingSet, CliError> {
    Ok(EmbeddingSet::new(input.g, input.degree, input.periods.clone())?)
}

pub fn bound(input: &Input, epsilon: Option<f64>) -> Result<(OutputDocument, i32), CliError> {
    let set = embedding_set(input)?;
    let eps = epsilon.or(input.options.epsilon).unwrap_or(DEFAULT_EPSILON);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Parse("epsilon must lie in (0, 1)".into()));
    }
    if input.periods.len() != input.degree {
        return Err(CliError::Invalid(mlk_core::Error::IncompleteEmbeddingData {
            degree: input.degree,
            found: input.periods.len(),
        }));
    }
    let rep = report_from_rhos(&rhos(input)?, set.genus(), set.degree(), eps)?;
    let mut doc = OutputDocument::new("bound", input.digest.clone(), input.g, input.degree);
    doc.bound = Some(BoundOut {
        kappa: rep.kappa.into(),
        epsilon: rep.epsilon.into(),
        thm11_total: rep.thm11_total.into(),
        cor14_total: rep.cor14_total.into(),
        clamped: rep.clamped,
        per_embedding: rep
            .per_embedding
            .iter()
            .enumerate()
            .map(|(index, t)| TermOut {
                index,
                rho: t.rho.into(),
                rho_clamped: t.rho_clamped.into(),
                term: t.term.into(),
            })
            .collect(),
    });
    Ok((doc, 0))
}

pub fn rho(input: &Input) -> Result<(OutputDocument, i32), CliError> {
    let rows = parallel::map(&input.periods, |index, p| {
        let err = |source| CliError::Embedding { index, source };
        let lc = lambda_clamped(p).map_err(err)?;
        let after = injectivity_diameter(&reduce(p).map_err(err)?).map_err(err)?;
        Ok(RhoOut {
            index,
            rho: lc.rho.into(),
            rho_clamped: lc.rho_clamped.into(),
            lambda: lc.lambda.into(),
            lemma32_ok: lc.lemma32_ok,
            reduced: p.is_reduced(),
            rho_after_reduce: after.into(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, CliError>>()?;
    let mut doc = OutputDocument::new("rho", input.digest.clone(), input.g, input.degree);
    doc.rho = rows;
    Ok((doc, 0))
}

/// Where `verify` gets its matrices.
#[derive(Debug, Clone)]
pub enum VerifySource {
    File(Input),
    Random { count: usize, dim: usize },
    Builtin,
}

pub fn verify(
    source: &VerifySource,
    suites: &[Suite],
    seed: u64,
    budget: Option<u64>,
) -> Result<(OutputDocument, i32), CliError> {
    let (subjects, mut opts, digest, g, degree) = match source {
        VerifySource::File(input) => (
            Subjects::Input {
                set: embedding_set(input)?,
            },
            input.options.clone(),
            input.digest.clone(),
            input.g,
            input.degree,
        ),
        VerifySource::Random { count, dim } => {
            if *count == 0 || *dim == 0 {
                return Err(CliError::Parse("--random and --dim must be positive".into()));
            }
            (
                Subjects::Random { count: *count, dim: *dim },
                Default::default(),
                digest(format!("random count={count} dim={dim} seed={seed}").as_bytes()),
                *dim,
                1,
            )
        }
        VerifySource::Builtin => (Subjects::Builtin, Default::default(), digest(b"builtin"), 1, 1),
    };
    if budget.is_some() {
        opts.budget = budget;
    }
    let mut doc = OutputDocument::new("verify", digest, g, degree);
    for &suite in suites {
        doc.checks.extend(suites::run(suite, &subjects, &opts, seed)?);
    }
    doc.finish_checks();
    let code = if doc.all_pass() { 0 } else { 1 };
    Ok((doc, code))
}
