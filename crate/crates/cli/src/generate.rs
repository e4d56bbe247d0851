//! Graph families for `tritile generate`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tritile::constructions::{
    g3_construction, planted_factor_graph, q_graph, random_graph_with_exact_min_degree, with_noise,
    ColumnLabeling, ConstructionError, G3Params, SidonBudget,
};
use tritile::graph::TripartiteGraph;
use tritile::pattern::{uniform_blowup, BlockAssignment, PatternId};
use tritile::solver::{g3_no_factor_certificate, Certificate, ColumnCheck, NoFactorCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gamma3,
    Theta33,
    Theta32,
    Theta22,
    Qgraph,
    G3,
    Random,
    Planted,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "gamma3" => Family::Gamma3,
            "theta33" => Family::Theta33,
            "theta32" => Family::Theta32,
            "theta22" => Family::Theta22,
            "qgraph" => Family::Qgraph,
            "g3" => Family::G3,
            "random" => Family::Random,
            "planted" => Family::Planted,
            _ => return Err(format!("unknown family `{s}`")),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

/// Family parameters; each family reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Block size of a pattern blow-up.
    pub m: Option<usize>,
    /// Modulus of a `Q(n, d)` graph.
    pub n: Option<usize>,
    pub d: Option<usize>,
    /// Class size of random and planted graphs.
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub h: Option<usize>,
    pub q: Option<usize>,
    pub r: Option<usize>,
    /// Exact bar-min-degree of a random graph.
    pub level: Option<usize>,
    /// Extra-edge probability of a planted graph.
    pub p: Option<f64>,
    /// Probability of flipping each cross pair afterwards.
    pub noise: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenerateError {
    /// The construction does not exist or was not found within budget.
    Infeasible(String),
    Invalid(String),
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::Infeasible(m) => write!(f, "infeasible: {m}"),
            GenerateError::Invalid(m) => write!(f, "invalid parameters: {m}"),
        }
    }
}

impl From<ConstructionError> for GenerateError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::Infeasible { .. } | ConstructionError::ColumnInfeasible { .. } => {
                GenerateError::Infeasible(e.to_string())
            }
            _ => GenerateError::Invalid(e.to_string()),
        }
    }
}

/// Metadata written next to every generated graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub family: Family,
    pub seed: u64,
    pub params: Params,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: Option<usize>,
    pub bar_min_degree: usize,
    pub graph_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<ColumnLabeling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlockAssignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<Value>,
}

pub struct Generated {
    pub graph: TripartiteGraph,
    pub h: Option<usize>,
    pub columns: Option<ColumnLabeling>,
    pub blocks: Option<BlockAssignment>,
    pub extra: Option<Value>,
    /// A certificate known from the construction itself.
    pub certificate: Option<Certificate>,
}

fn need<T: Copy>(v: Option<T>, name: &str, family: Family) -> Result<T, GenerateError> {
    v.ok_or_else(|| GenerateError::Invalid(format!("{family} needs --{name}")))
}

pub fn generate(family: Family, params: &Params, seed: u64) -> Result<Generated, GenerateError> {
    let plain = |graph| Generated { graph, h: params.h, columns: None, blocks: None, extra: None, certificate: None };
    let mut out = match family {
        Family::Gamma3 | Family::Theta33 | Family::Theta32 | Family::Theta22 => {
            let id = match family {
                Family::Gamma3 => PatternId::Gamma3,
                Family::Theta33 => PatternId::Theta33,
                Family::Theta32 => PatternId::Theta32,
                _ => PatternId::Theta22,
            };
            let m = need(params.m, "m", family)?;
            // the two-part pattern sits on (V1, V2) with V3 joined to both
            let b = uniform_blowup(&id.pattern().padded_to_three(), m).map_err(|e| GenerateError::Invalid(e.to_string()))?;
            Generated { blocks: Some(b.blocks), ..plain(b.graph) }
        }
        Family::Qgraph => {
            let q = q_graph(need(params.n, "n", family)?, need(params.d, "d", family)?, seed, SidonBudget::default())?;
            Generated { extra: Some(json!({ "sidon_pair": q.pair })), ..plain(q.graph) }
        }
        Family::G3 => {
            let p = G3Params::new(need(params.h, "h", family)?, need(params.q, "q", family)?, need(params.r, "r", family)?)?;
            let g3 = g3_construction(p, seed, SidonBudget::default())?;
            let certificate = match g3_no_factor_certificate(&g3.graph, &g3.columns, p.h) {
                ColumnCheck::Certificate(arg) => Some(Certificate::NoFactor(NoFactorCertificate::ColumnArgument(arg))),
                ColumnCheck::NotApplicable(_) => None,
            };
            Generated {
                graph: g3.graph,
                h: Some(p.h),
                columns: Some(g3.columns),
                blocks: None,
                extra: Some(json!({ "sidon_pairs": g3.sidon_pairs })),
                certificate,
            }
        }
        Family::Random => {
            let n = need(params.big_n, "N", family)?;
            if n == 0 {
                return Err(GenerateError::Invalid("N must be positive".into()));
            }
            plain(random_graph_with_exact_min_degree(n, need(params.level, "level", family)?, seed))
        }
        Family::Planted => {
            let h = need(params.h, "h", family)?;
            let (graph, cert) = planted_factor_graph(need(params.big_n, "N", family)?, h, params.p.unwrap_or(0.0), seed)?;
            Generated { h: Some(h), certificate: Some(Certificate::Factor(cert)), ..plain(graph) }
        }
    };
    if let Some(p) = params.noise {
        out.graph = with_noise(&out.graph, p, seed ^ 0x6e6f_6973_65)?;
        // the construction's certificate no longer applies
        out.certificate = None;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g3_metadata() {
        let p = Params { h: Some(3), q: Some(1), r: Some(1), ..Params::default() };
        let g = generate(Family::G3, &p, 0).unwrap();
        assert_eq!(g.graph.n(), 12);
        assert_eq!(g.graph.bar_min_degree(), 9);
        assert!(g.certificate.unwrap().verify(&g.graph, 3).is_ok());
    }

    #[test]
    fn qgraph_with_zero_degree_is_empty() {
        let p = Params { n: Some(7), d: Some(0), ..Params::default() };
        let g = generate(Family::Qgraph, &p, 0).unwrap();
        assert_eq!((g.graph.n(), g.graph.edge_count()), (7, 0));
    }

    #[test]
    fn infeasible_and_invalid() {
        let p = Params { n: Some(7), d: Some(4), ..Params::default() };
        assert!(matches!(generate(Family::Qgraph, &p, 0), Err(GenerateError::Infeasible(_))));
        assert!(matches!(generate(Family::Gamma3, &Params::default(), 0), Err(GenerateError::Invalid(_))));
    }

    #[test]
    fn theta22_is_padded() {
        let p = Params { m: Some(3), ..Params::default() };
        let g = generate(Family::Theta22, &p, 0).unwrap();
        assert_eq!(g.graph.n(), 6);
        assert_eq!(g.graph.bar_min_degree(), 3);
    }

    #[test]
    fn names_round_trip() {
        for f in ["gamma3", "theta33", "theta32", "theta22", "qgraph", "g3", "random", "planted"] {
            assert_eq!(f.parse::<Family>().unwrap().to_string(), f);
        }
    }
}
