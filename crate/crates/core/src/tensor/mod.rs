//! Tensor fields on a single coordinate chart.

mod alternating;
mod dense;
mod endo;

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{parse_expr_with, Expr, ParseError, Scalar};

pub use alternating::{combinations, Alternating, Form, Lower, Multivector, Upper, Variance};
pub use dense::DenseTensor;
pub use endo::Endo;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TensorError {
    #[error("chart needs at least one coordinate")]
    EmptyChart,
    #[error("coordinate `{0}` declared twice")]
    DuplicateCoordinate(String),
    #[error("expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeTooHigh { degree: usize, dim: usize },
    #[error("operation needs degree at least {needed}, found {found}")]
    DegreeTooLow { needed: usize, found: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// A coordinate chart: ordered coordinate names plus functions declared
/// nonvanishing on the region of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    nonvanishing: Vec<Scalar>,
}

impl Chart {
    pub fn new<S: Into<String>>(coords: impl IntoIterator<Item = S>) -> Result<Self, TensorError> {
        let coords: Vec<String> = coords.into_iter().map(Into::into).collect();
        if coords.is_empty() {
            return Err(TensorError::EmptyChart);
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(TensorError::DuplicateCoordinate(c.clone()));
            }
        }
        Ok(Chart {
            coords,
            nonvanishing: Vec::new(),
        })
    }

    /// Chart on `x1, …, xn`.
    pub fn standard(n: usize) -> Self {
        Chart::new((1..=n).map(|i| alloc::format!("x{i}"))).expect("n >= 1")
    }

    pub fn with_nonvanishing(mut self, f: Scalar) -> Self {
        self.declare_nonvanishing(f);
        self
    }

    pub fn declare_nonvanishing(&mut self, f: Scalar) {
        if !self.nonvanishing.contains(&f) {
            self.nonvanishing.push(f);
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn nonvanishing(&self) -> &[Scalar] {
        &self.nonvanishing
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ParseError> {
        parse_expr_with::<_, &str>(text, &self.coords, &[])
    }

    /// Parses and canonicalises `text`, resolving names bound in `defs`.
    pub fn scalar_with<N: AsRef<str>>(&self, text: &str, defs: &[(N, Expr)]) -> Result<Scalar, ScalarParseError> {
        let e = parse_expr_with(text, &self.coords, defs)?;
        Ok(e.to_scalar()?)
    }

    pub fn scalar(&self, text: &str) -> Result<Scalar, ScalarParseError> {
        self.scalar_with::<&str>(text, &[])
    }

    pub fn display(&self, s: &Scalar) -> String {
        alloc::format!("{}", s.to_expr().display(&self.coords))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
}

/// Section `X + α` of the generalized tangent bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedSection {
    pub vector: Multivector,
    pub covector: Form,
}

impl GeneralizedSection {
    pub fn new(vector: Multivector, covector: Form) -> Self {
        assert_eq!(vector.degree(), 1, "vector part must be a vector field");
        assert_eq!(covector.degree(), 1, "covector part must be a 1-form");
        assert_eq!(vector.dim(), covector.dim(), "parts live on different charts");
        GeneralizedSection { vector, covector }
    }

    pub fn zero(dim: usize) -> Self {
        GeneralizedSection::new(Multivector::zero(dim, 1), Form::zero(dim, 1))
    }

    pub fn from_vector(x: Multivector) -> Self {
        let n = x.dim();
        GeneralizedSection::new(x, Form::zero(n, 1))
    }

    pub fn from_covector(a: Form) -> Self {
        let n = a.dim();
        GeneralizedSection::new(Multivector::zero(n, 1), a)
    }

    /// The coordinate frame `∂1, …, ∂n, dx1, …, dxn`.
    pub fn frame(dim: usize) -> Vec<Self> {
        (0..dim)
            .map(|i| Self::from_vector(Multivector::basis(dim, &[i])))
            .chain((0..dim).map(|i| Self::from_covector(Form::basis(dim, &[i]))))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn add(&self, o: &Self) -> Self {
        GeneralizedSection::new(self.vector.add(&o.vector), self.covector.add(&o.covector))
    }

    pub fn sub(&self, o: &Self) -> Self {
        GeneralizedSection::new(self.vector.sub(&o.vector), self.covector.sub(&o.covector))
    }

    pub fn scale(&self, f: &Scalar) -> Self {
        GeneralizedSection::new(self.vector.scale(f), self.covector.scale(f))
    }

    /// The symmetric pairing `½(α(Y) + β(X))`.
    pub fn pairing(&self, o: &Self) -> Scalar {
        self.covector
            .pair(&o.vector)
            .add(&o.covector.pair(&self.vector))
            .mul(&Scalar::ratio(1, 2))
    }

    pub fn components(&self) -> impl Iterator<Item = &Scalar> {
        self.vector.components().iter().chain(self.covector.components())
    }

    pub fn is_zero_exact(&self) -> bool {
        self.components().all(Scalar::is_zero)
    }
}

/// Tensor field of any supported kind, for dynamically typed front ends.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorField {
    Multivector(Multivector),
    Form(Form),
    Endomorphism(Endo),
}

impl TensorField {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TensorField::Multivector(_) => "multivector",
            TensorField::Form(_) => "form",
            TensorField::Endomorphism(_) => "endomorphism",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TensorField::Multivector(m) => m.dim(),
            TensorField::Form(f) => f.dim(),
            TensorField::Endomorphism(e) => e.dim(),
        }
    }

    pub fn wedge(&self, other: &TensorField) -> Result<TensorField, TensorError> {
        match (self, other) {
            (TensorField::Form(a), TensorField::Form(b)) => a.try_wedge(b).map(TensorField::Form),
            (TensorField::Multivector(a), TensorField::Multivector(b)) => {
                a.try_wedge(b).map(TensorField::Multivector)
            }
            (a, b) => Err(TensorError::KindMismatch {
                expected: a.kind_name(),
                found: b.kind_name(),
            }),
        }
    }

    pub fn as_form(&self) -> Result<&Form, TensorError> {
        match self {
            TensorField::Form(f) => Ok(f),
            other => Err(TensorError::KindMismatch {
                expected: "form",
                found: other.kind_name(),
            }),
        }
    }

    pub fn as_multivector(&self) -> Result<&Multivector, TensorError> {
        match self {
            TensorField::Multivector(m) => Ok(m),
            other => Err(TensorError::KindMismatch {
                expected: "multivector",
                found: other.kind_name(),
            }),
        }
    }

    pub fn as_endo(&self) -> Result<&Endo, TensorError> {
        match self {
            TensorField::Endomorphism(e) => Ok(e),
            other => Err(TensorError::KindMismatch {
                expected: "endomorphism",
                found: other.kind_name(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_rejects_duplicates() {
        assert_eq!(
            Chart::new(["x", "y", "x"]),
            Err(TensorError::DuplicateCoordinate("x".into()))
        );
        assert_eq!(Chart::new(Vec::<String>::new()), Err(TensorError::EmptyChart));
    }

    #[test]
    fn dynamic_wedge_checks_kinds() {
        let a = TensorField::Form(Form::basis(3, &[0]));
        let b = TensorField::Multivector(Multivector::basis(3, &[1]));
        assert!(matches!(a.wedge(&b), Err(TensorError::KindMismatch { .. })));
        let c = TensorField::Form(Form::basis(3, &[1]));
        assert_eq!(a.wedge(&c).unwrap(), TensorField::Form(Form::basis(3, &[0, 1])));
    }

    #[test]
    fn generalized_frame_has_two_n_sections() {
        let f = GeneralizedSection::frame(3);
        assert_eq!(f.len(), 6);
        assert_eq!(f[0].pairing(&f[3]), Scalar::ratio(1, 2));
    }
}
