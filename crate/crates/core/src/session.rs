//! Session configuration: variable names (most significant first), the
//! coefficient field, and the default precision and horizon.

use serde::Serialize;

use crate::coeff::CoeffField;
use crate::error::{Error, Result};
use crate::expr::{
    format_polynomial, format_series, parse_bivariate, parse_polynomial, parse_series,
    BivariatePolynomial, INDETERMINATE, TOWER_INDETERMINATE,
};
use crate::poly::ValPolynomial;
use crate::series::TruncatedSeries;
use crate::value_group::{ConvexSubgroup, Exponent};

/// Default precision and horizon: this many units of the least significant
/// variable.
pub const DEFAULT_DEPTH: i64 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SessionConfig {
    pub variables: Vec<String>,
    #[serde(serialize_with = "crate::session::field_str")]
    pub coefficient_field: CoeffField,
    pub default_precision: Exponent,
    pub horizon: Exponent,
}

fn field_str<S: serde::Serializer>(f: &CoeffField, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(f)
}

fn depth(rank: usize, k: i64) -> Exponent {
    Exponent::unit(rank, rank - 1).scale(k)
}

impl SessionConfig {
    /// Missing precision or horizon default to each other, then to
    /// `DEFAULT_DEPTH` in the last variable.
    pub fn new(
        variables: Vec<String>,
        field: CoeffField,
        precision: Option<Exponent>,
        horizon: Option<Exponent>,
    ) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::Session("at least one variable is required".into()));
        }
        for (i, v) in variables.iter().enumerate() {
            let valid = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || v == INDETERMINATE || v == TOWER_INDETERMINATE || v == "O" {
                return Err(Error::Session(format!("invalid variable name `{v}`")));
            }
            if variables[..i].contains(v) {
                return Err(Error::Session(format!("duplicate variable `{v}`")));
            }
        }
        let rank = variables.len();
        for e in precision.iter().chain(horizon.iter()) {
            if e.rank().is_some_and(|r| r != rank) {
                return Err(Error::RankMismatch {
                    left: e.rank().unwrap_or(0),
                    right: rank,
                });
            }
        }
        let (precision, horizon) = match (precision, horizon) {
            (Some(p), Some(h)) => (p, h),
            (Some(p), None) => (p.clone(), p),
            (None, Some(h)) => (h.clone(), h),
            (None, None) => (depth(rank, DEFAULT_DEPTH), depth(rank, DEFAULT_DEPTH)),
        };
        if precision < horizon {
            return Err(Error::Session(format!(
                "precision {precision} is below the horizon {horizon}"
            )));
        }
        Ok(SessionConfig {
            variables,
            coefficient_field: field,
            default_precision: precision,
            horizon,
        })
    }

    pub fn parse_vars(text: &str) -> Vec<String> {
        text.split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.variables.len()
    }

    pub fn field(&self) -> CoeffField {
        self.coefficient_field
    }

    pub fn series(&self, text: &str) -> Result<TruncatedSeries> {
        parse_series(text, &self.variables, self.coefficient_field)
    }

    pub fn polynomial(&self, text: &str) -> Result<ValPolynomial> {
        parse_polynomial(text, &self.variables, self.coefficient_field)
    }

    pub fn bivariate(&self, text: &str) -> Result<BivariatePolynomial> {
        parse_bivariate(text, &self.variables, self.coefficient_field)
    }

    /// Parses `"(a,b)"`, `"inf"`, or a bare integer in rank 1.
    pub fn exponent(&self, text: &str) -> Result<Exponent> {
        let e: Exponent = match text.trim().parse::<i64>() {
            Ok(n) => Exponent::new([n]),
            Err(_) => text.trim().parse()?,
        };
        if e.rank().is_some_and(|r| r != self.rank()) {
            return Err(Error::RankMismatch {
                left: e.rank().unwrap_or(0),
                right: self.rank(),
            });
        }
        Ok(e)
    }

    pub fn subgroup(&self, j: usize) -> Result<ConvexSubgroup> {
        ConvexSubgroup::new(self.rank(), j)
    }

    /// Variable names of the residue field of `v_Δ`: the last `j` names.
    pub fn residue_names(&self, delta: &ConvexSubgroup) -> Vec<String> {
        self.variables[self.rank() - delta.index()..].to_vec()
    }

    pub fn render(&self, x: &TruncatedSeries) -> String {
        let names = &self.variables[self.rank() - x.rank().min(self.rank())..];
        format_series(x, names)
    }

    pub fn render_polynomial(&self, f: &ValPolynomial) -> String {
        let names = &self.variables[self.rank() - f.rank().min(self.rank())..];
        format_polynomial(f, names, INDETERMINATE)
    }
}
