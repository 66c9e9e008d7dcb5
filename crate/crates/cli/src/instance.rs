//! Instance resolution: matrix from file or synthetic spec, RHS
//! bundled or generated.

use crate::{InstanceArgs, SolverArg};
use krylest::{
    generate_rhs, load_matrix_market, load_vector_market, DenseVector, Error, ProblemKind, Result,
    SparseMatrix, SyntheticSpec,
};

pub struct ResolvedInstance {
    pub matrix: SparseMatrix,
    pub rhs: DenseVector,
    pub kind: ProblemKind,
    /// Human-readable matrix source for the summary.
    pub matrix_source: String,
    pub rhs_source: String,
    pub seed: Option<u64>,
}

pub fn resolve(args: &InstanceArgs, solver: SolverArg) -> Result<ResolvedInstance> {
    let (matrix, matrix_source) = match (&args.matrix, &args.synthetic) {
        (Some(path), None) => (
            load_matrix_market(path)?,
            path.display().to_string(),
        ),
        (None, Some(spec)) => (
            SyntheticSpec::parse(spec)?.build()?,
            format!("synthetic:{spec}"),
        ),
        (None, None) => {
            return Err(Error::InvalidParam(
                "one of --matrix or --synthetic is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    if solver == SolverArg::Cg && matrix.rows() != matrix.cols() {
        return Err(Error::InvalidParam(format!(
            "cg needs a square SPD matrix, got {} x {}",
            matrix.rows(),
            matrix.cols()
        )));
    }

    // Least-squares solvers get the noisy RHS; least-norm solvers (and
    // cg, which needs a consistent system) get b = A x_gen.
    let kind = if solver.is_least_norm() || solver == SolverArg::Cg {
        ProblemKind::LeastNorm
    } else {
        ProblemKind::LeastSquares
    };

    if args.rhs == "bundled" {
        let path = args.matrix.as_ref().ok_or_else(|| {
            Error::InvalidParam("--rhs bundled needs --matrix (not --synthetic)".into())
        })?;
        if solver.is_least_norm() {
            return Err(Error::InvalidParam(
                "bundled right-hand sides are least-squares data; least-norm solvers need --rhs generated:<seed>".into(),
            ));
        }
        let mut b_path = path.clone();
        let stem = b_path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidParam("matrix path has no file stem".into()))?
            .to_string();
        b_path.set_file_name(format!("{stem}_b.mtx"));
        let rhs = load_vector_market(&b_path)?;
        if rhs.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                what: "bundled rhs",
                expected: matrix.rows(),
                got: rhs.len(),
            });
        }
        Ok(ResolvedInstance {
            matrix,
            rhs,
            kind,
            matrix_source,
            rhs_source: b_path.display().to_string(),
            seed: None,
        })
    } else if let Some(seed_str) = args.rhs.strip_prefix("generated:") {
        let seed: u64 = seed_str.parse().map_err(|_| {
            Error::InvalidParam(format!("rhs seed `{seed_str}` is not an integer"))
        })?;
        let inst = generate_rhs(&matrix, kind, seed)?;
        Ok(ResolvedInstance {
            matrix: inst.matrix,
            rhs: inst.rhs,
            kind,
            matrix_source,
            rhs_source: format!("generated:{seed}"),
            seed: Some(seed),
        })
    } else {
        Err(Error::InvalidParam(format!(
            "--rhs must be `bundled` or `generated:<seed>`, got `{}`",
            args.rhs
        )))
    }
}
