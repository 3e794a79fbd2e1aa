use thiserror::Error;

use super::groebner::{groebner_in, Budget, GroebnerBasis, GroebnerError};
use super::monomial::{Monomial, MonomialOrder};
use super::parse::{parse_poly, ParseError};
use super::poly::SparsePoly;

#[derive(Debug, Clone, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("relation {0} is not homogeneous for the given weights")]
    NotHomogeneous(usize),
    #[error("{0} weights given for {1} variables")]
    WeightCount(usize, usize),
    #[error("duplicate variable name '{0}'")]
    DuplicateVariable(String),
}

/// `K[vars] / (relations)` with a cached Gröbner basis.
#[derive(Clone, Debug)]
pub struct PresentedAlgebra {
    pub vars: Vec<String>,
    pub relations: Vec<SparsePoly>,
    pub weights: Option<Vec<i64>>,
    gb: GroebnerBasis,
}

impl PresentedAlgebra {
    pub fn new(vars: Vec<String>, relations: Vec<SparsePoly>, weights: Option<Vec<i64>>) -> Result<Self, AlgebraError> {
        Self::with_order(vars, relations, weights, MonomialOrder::GrevLex, Budget::default())
    }

    pub fn with_order(vars: Vec<String>, relations: Vec<SparsePoly>, weights: Option<Vec<i64>>, order: MonomialOrder, budget: Budget) -> Result<Self, AlgebraError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(AlgebraError::DuplicateVariable(v.clone()));
            }
        }
        if let Some(w) = &weights {
            if w.len() != vars.len() {
                return Err(AlgebraError::WeightCount(w.len(), vars.len()));
            }
            for (i, r) in relations.iter().enumerate() {
                if !r.is_homogeneous(w) {
                    return Err(AlgebraError::NotHomogeneous(i));
                }
            }
        }
        let gb = groebner_in(vars.len(), &relations, order, budget)?;
        Ok(PresentedAlgebra { vars, relations, weights, gb })
    }

    /// Parse relations in the text format.
    pub fn parse(vars: &[&str], relations: &[&str]) -> Result<Self, AlgebraError> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let rels = relations.iter().map(|r| parse_poly(r, &vars)).collect::<Result<Vec<_>, _>>()?;
        PresentedAlgebra::new(vars, rels, None)
    }

    /// The polynomial ring in the given variables.
    pub fn polynomial_ring(vars: &[&str]) -> Self {
        PresentedAlgebra::parse(vars, &[]).expect("free algebra")
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn groebner(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn order(&self) -> MonomialOrder {
        self.gb.order
    }

    pub fn normal_form(&self, f: &SparsePoly) -> SparsePoly {
        self.gb.normal_form(f)
    }

    pub fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        self.normal_form(&a.mul(b))
    }

    pub fn is_zero_ring(&self) -> bool {
        self.gb.is_unit()
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        self.gb.is_standard(m)
    }

    /// Standard monomials of total degree at most `d`.
    pub fn standard_monomials(&self, d: u32) -> Vec<Monomial> {
        if self.is_zero_ring() {
            return Vec::new();
        }
        Monomial::all_up_to_degree(self.nvars(), d).into_iter().filter(|m| self.is_standard(m)).collect()
    }

    pub fn parse_element(&self, s: &str) -> Result<SparsePoly, ParseError> {
        parse_poly(s, &self.vars)
    }

    pub fn is_graded(&self) -> bool {
        self.weights.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_normal_forms() {
        let a = PresentedAlgebra::parse(&["x", "y"], &["x*y - 1"]).unwrap();
        let f = a.parse_element("x*y").unwrap();
        assert_eq!(a.normal_form(&f).to_text(&a.vars), "1");
        let g = a.parse_element("x^2*y").unwrap();
        assert_eq!(a.normal_form(&g).to_text(&a.vars), "x");
        assert!(a.normal_form(&a.relations[0]).is_zero());
    }

    #[test]
    fn weights_must_make_relations_homogeneous() {
        let vars = vec!["t".to_string(), "u".to_string()];
        let r = parse_poly("t*u - 1", &vars).unwrap();
        assert!(PresentedAlgebra::new(vars.clone(), vec![r.clone()], Some(vec![1, -1])).is_ok());
        assert!(matches!(PresentedAlgebra::new(vars, vec![r], Some(vec![1, 1])), Err(AlgebraError::NotHomogeneous(0))));
    }
}
